use super::{Binder, Context, Formula, Term};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

/// A substitution target together with its sort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortedTerm {
    pub term: Term,
    pub sort: String,
}

impl SortedTerm {
    pub fn var(name: &str, sort: &str) -> Self {
        SortedTerm {
            term: Term::var(name),
            sort: sort.to_string(),
        }
    }

    pub fn param(name: &str, sort: &str) -> Self {
        SortedTerm {
            term: Term::param(name),
            sort: sort.to_string(),
        }
    }
}

fn term_vars(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(v) => {
            out.insert(v.clone());
        }
        Term::Param(_) => {}
        Term::App(_, args) => args.iter().for_each(|a| term_vars(a, out)),
    }
}

fn term_params(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(_) => {}
        Term::Param(p) => {
            out.insert(p.clone());
        }
        Term::App(_, args) => args.iter().for_each(|a| term_params(a, out)),
    }
}

pub fn free_vars(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_free(f, &mut Vec::new(), &mut out);
    out
}

fn collect_free(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    let mut add = |t: &Term, bound: &Vec<String>| {
        let mut vs = BTreeSet::new();
        term_vars(t, &mut vs);
        out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
    };
    match f {
        Formula::True | Formula::False => {}
        Formula::Rel(_, ts) => ts.iter().for_each(|t| add(t, bound)),
        Formula::Eq(a, b) => {
            add(a, bound);
            add(b, bound);
        }
        Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| collect_free(g, bound, out)),
        Formula::Exists(bs, b) | Formula::Forall(bs, b) => {
            let n = bound.len();
            bound.extend(bs.iter().map(|x| x.name.clone()));
            collect_free(b, bound, out);
            bound.truncate(n);
        }
        Formula::Not(b) => collect_free(b, bound, out),
        Formula::Implies(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
    }
}

pub fn params_of(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    fn go(f: &Formula, out: &mut BTreeSet<String>) {
        match f {
            Formula::True | Formula::False => {}
            Formula::Rel(_, ts) => ts.iter().for_each(|t| term_params(t, out)),
            Formula::Eq(a, b) => {
                term_params(a, out);
                term_params(b, out);
            }
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| go(g, out)),
            Formula::Exists(_, b) | Formula::Forall(_, b) | Formula::Not(b) => go(b, out),
            Formula::Implies(a, b) => {
                go(a, out);
                go(b, out);
            }
        }
    }
    go(f, &mut out);
    out
}

fn all_vars(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Rel(_, ts) => ts.iter().for_each(|t| term_vars(t, out)),
        Formula::Eq(a, b) => {
            term_vars(a, out);
            term_vars(b, out);
        }
        Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| all_vars(g, out)),
        Formula::Exists(bs, b) | Formula::Forall(bs, b) => {
            out.extend(bs.iter().map(|x| x.name.clone()));
            all_vars(b, out);
        }
        Formula::Not(b) => all_vars(b, out),
        Formula::Implies(a, b) => {
            all_vars(a, out);
            all_vars(b, out);
        }
    }
}

/// `base` with primes appended until it avoids `taken`.
pub fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

fn subst_term(t: &Term, map: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Param(_) => t.clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| subst_term(a, map)).collect()),
    }
}

fn subst_rec(f: &Formula, map: &BTreeMap<String, Term>) -> Formula {
    if map.is_empty() {
        return f.clone();
    }
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Rel(r, ts) => Formula::Rel(r.clone(), ts.iter().map(|t| subst_term(t, map)).collect()),
        Formula::Eq(a, b) => Formula::Eq(subst_term(a, map), subst_term(b, map)),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| subst_rec(g, map)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| subst_rec(g, map)).collect()),
        Formula::Not(b) => Formula::Not(Box::new(subst_rec(b, map))),
        Formula::Implies(a, b) => {
            Formula::Implies(Box::new(subst_rec(a, map)), Box::new(subst_rec(b, map)))
        }
        Formula::Exists(bs, body) | Formula::Forall(bs, body) => {
            let fv = free_vars(body);
            let mut inner: BTreeMap<String, Term> = map
                .iter()
                .filter(|(k, _)| !bs.iter().any(|b| &b.name == *k) && fv.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            let mut incoming = BTreeSet::new();
            inner.values().for_each(|t| term_vars(t, &mut incoming));
            let mut taken = BTreeSet::new();
            all_vars(body, &mut taken);
            taken.extend(incoming.iter().cloned());
            taken.extend(inner.keys().cloned());
            let mut new_bs = Vec::with_capacity(bs.len());
            for b in bs {
                if incoming.contains(&b.name) {
                    let fresh = fresh_name(&b.name, &taken);
                    taken.insert(fresh.clone());
                    inner.insert(b.name.clone(), Term::Var(fresh.clone()));
                    new_bs.push(Binder::new(&fresh, &b.sort));
                } else {
                    new_bs.push(b.clone());
                }
            }
            let body = Box::new(subst_rec(body, &inner));
            if matches!(f, Formula::Exists(..)) {
                Formula::Exists(new_bs, body)
            } else {
                Formula::Forall(new_bs, body)
            }
        }
    }
}

/// Simultaneous capture-avoiding substitution of free variables of `f`
/// (well-sorted in `ctx`). Bound variables are renamed by appending primes.
pub fn substitute(f: &Formula, ctx: &Context, map: &BTreeMap<String, SortedTerm>) -> Result<Formula> {
    for (v, st) in map {
        if let Some(s) = ctx.sort_of(v) {
            if s != st.sort {
                return Err(Error::sort(
                    v.clone(),
                    format!("substituting a `{}` term for a variable of sort `{s}`", st.sort),
                ));
            }
        }
    }
    let plain = map.iter().map(|(k, v)| (k.clone(), v.term.clone())).collect();
    Ok(subst_rec(f, &plain))
}

/// Renames bound variables to `_0, _1, ...` in traversal order.
pub fn canonical_rename(f: &Formula) -> Formula {
    fn go(f: &Formula, env: &mut Vec<(String, String)>, next: &mut usize) -> Formula {
        let rn = |t: &Term, env: &Vec<(String, String)>| -> Term {
            fn r(t: &Term, env: &Vec<(String, String)>) -> Term {
                match t {
                    Term::Var(v) => env
                        .iter()
                        .rev()
                        .find(|(o, _)| o == v)
                        .map(|(_, n)| Term::Var(n.clone()))
                        .unwrap_or_else(|| t.clone()),
                    Term::Param(_) => t.clone(),
                    Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| r(a, env)).collect()),
                }
            }
            r(t, env)
        };
        match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Rel(r, ts) => Formula::Rel(r.clone(), ts.iter().map(|t| rn(t, env)).collect()),
            Formula::Eq(a, b) => Formula::Eq(rn(a, env), rn(b, env)),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| go(g, env, next)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| go(g, env, next)).collect()),
            Formula::Not(b) => Formula::Not(Box::new(go(b, env, next))),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(go(a, env, next)), Box::new(go(b, env, next)))
            }
            Formula::Exists(bs, body) | Formula::Forall(bs, body) => {
                let depth = env.len();
                let mut new_bs = Vec::new();
                for b in bs {
                    let n = format!("_{next}");
                    *next += 1;
                    env.push((b.name.clone(), n.clone()));
                    new_bs.push(Binder::new(&n, &b.sort));
                }
                let body = Box::new(go(body, env, next));
                env.truncate(depth);
                if matches!(f, Formula::Exists(..)) {
                    Formula::Exists(new_bs, body)
                } else {
                    Formula::Forall(new_bs, body)
                }
            }
        }
    }
    go(f, &mut Vec::new(), &mut 0)
}

/// Structural equality up to renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    canonical_rename(a) == canonical_rename(b)
}
