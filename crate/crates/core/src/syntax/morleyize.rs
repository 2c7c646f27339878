use super::subst::{canonical_rename, fresh_name, substitute, SortedTerm};
use super::{check_sequent, Context, Formula, Mode, Sequent, Term, Theory};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};

/// A relation introduced for a negated subformula: `relation(context)` holds
/// exactly where `formula` (classical, in `context`) fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegationName {
    pub relation: String,
    pub context: Context,
    pub formula: Formula,
}

#[derive(Debug, Clone)]
pub struct Morleyized {
    pub theory: Theory,
    pub negations: Vec<NegationName>,
}

/// Free variables in order of first occurrence.
fn ordered_free(f: &Formula) -> Vec<String> {
    fn term(t: &Term, bound: &[String], out: &mut Vec<String>) {
        match t {
            Term::Var(v) if !bound.contains(v) && !out.contains(v) => out.push(v.clone()),
            Term::App(_, args) => args.iter().for_each(|a| term(a, bound, out)),
            _ => {}
        }
    }
    fn go(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match f {
            Formula::True | Formula::False => {}
            Formula::Rel(_, ts) => ts.iter().for_each(|t| term(t, bound, out)),
            Formula::Eq(a, b) => {
                term(a, bound, out);
                term(b, bound, out);
            }
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| go(g, bound, out)),
            Formula::Exists(bs, b) | Formula::Forall(bs, b) => {
                let n = bound.len();
                bound.extend(bs.iter().map(|x| x.name.clone()));
                go(b, bound, out);
                bound.truncate(n);
            }
            Formula::Not(b) => go(b, bound, out),
            Formula::Implies(a, b) => {
                go(a, bound, out);
                go(b, bound, out);
            }
        }
    }
    let mut out = Vec::new();
    go(f, &mut Vec::new(), &mut out);
    out
}

struct State {
    theory: Theory,
    negations: Vec<NegationName>,
    by_key: BTreeMap<(Vec<String>, Formula), usize>,
    counter: usize,
}

impl State {
    fn sort_in(scope: &[(String, String)], v: &str) -> Result<String> {
        scope
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|(_, s)| s.clone())
            .ok_or_else(|| Error::sort(v, "variable not in scope"))
    }

    /// Relation atom standing for the classical negation of `phi`.
    fn negate(&mut self, phi: &Formula, scope: &[(String, String)]) -> Result<Formula> {
        let fv = ordered_free(phi);
        let sorts: Vec<String> = fv.iter().map(|v| Self::sort_in(scope, v)).collect::<Result<_>>()?;
        let positional: Vec<(String, String)> = fv
            .iter()
            .enumerate()
            .map(|(i, _)| (format!("z{}", i + 1), sorts[i].clone()))
            .collect();
        let ctx = Context::new(positional.clone())?;
        let renaming: BTreeMap<String, SortedTerm> = fv
            .iter()
            .zip(&positional)
            .map(|(v, (z, s))| (v.clone(), SortedTerm::var(z, s)))
            .collect();
        let src_ctx = Context::new(fv.iter().cloned().zip(sorts.iter().cloned()).collect())?;
        let canon = substitute(phi, &src_ctx, &renaming)?;
        let key = (sorts.clone(), canonical_rename(&canon));
        let args: Vec<Term> = fv.iter().map(|v| Term::var(v)).collect();
        if let Some(&i) = self.by_key.get(&key) {
            return Ok(Formula::Rel(self.negations[i].relation.clone(), args));
        }
        let base = match phi {
            Formula::Rel(r, _) => format!("N_{r}"),
            Formula::Eq(..) => "N_eq".to_string(),
            _ => String::new(),
        };
        let taken = |n: &str, th: &Theory| th.signature.relation(n).is_some();
        let name = if !base.is_empty() && !taken(&base, &self.theory) {
            base
        } else {
            loop {
                self.counter += 1;
                let n = format!("N_{}", self.counter);
                if !taken(&n, &self.theory) {
                    break n;
                }
            }
        };
        let sort_refs: Vec<&str> = sorts.iter().map(String::as_str).collect();
        self.theory.signature.add_relation(&name, &sort_refs)?;
        let idx = self.negations.len();
        self.negations.push(NegationName {
            relation: name.clone(),
            context: ctx.clone(),
            formula: canon.clone(),
        });
        self.by_key.insert(key, idx);
        let inner = self.tr(&canon, &mut positional.clone())?;
        let n_atom = Formula::Rel(name.clone(), ctx.names().map(Term::var).collect());
        self.theory.push_axiom_unchecked(
            Some(&format!("{name}_excl")),
            Sequent::new(ctx.clone(), Formula::And(vec![inner.clone(), n_atom.clone()]), Formula::False),
        );
        self.theory.push_axiom_unchecked(
            Some(&format!("{name}_lem")),
            Sequent::new(ctx, Formula::True, Formula::Or(vec![inner, n_atom])),
        );
        Ok(Formula::Rel(name, args))
    }

    fn tr(&mut self, f: &Formula, scope: &mut Vec<(String, String)>) -> Result<Formula> {
        Ok(match f {
            Formula::True | Formula::False | Formula::Rel(..) | Formula::Eq(..) => f.clone(),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| self.tr(g, scope)).collect::<Result<_>>()?),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| self.tr(g, scope)).collect::<Result<_>>()?),
            Formula::Exists(bs, b) => {
                let n = scope.len();
                scope.extend(bs.iter().map(|x| (x.name.clone(), x.sort.clone())));
                let body = self.tr(b, scope);
                scope.truncate(n);
                Formula::Exists(bs.clone(), Box::new(body?))
            }
            Formula::Not(b) => self.negate(b, scope)?,
            Formula::Implies(a, b) => {
                let na = self.negate(a, scope)?;
                Formula::Or(vec![na, self.tr(b, scope)?])
            }
            Formula::Forall(bs, b) => {
                let inner = Formula::Exists(bs.clone(), Box::new(Formula::Not(b.clone())));
                self.negate(&inner, scope)?
            }
        })
    }
}

/// Moves top-level universal quantifiers and implications of the conclusion
/// into the context and premise.
fn lift_conclusion(seq: &Sequent) -> Result<Sequent> {
    let mut ctx = seq.context.clone();
    let mut premise = vec![seq.premise.clone()];
    let mut conclusion = seq.conclusion.clone();
    loop {
        match conclusion {
            Formula::Forall(bs, body) => {
                let mut body = *body;
                for b in bs {
                    let mut name = b.name.clone();
                    if ctx.sort_of(&name).is_some() {
                        let mut taken: BTreeSet<String> = ctx.names().map(String::from).collect();
                        taken.extend(super::free_vars(&body));
                        name = fresh_name(&b.name, &taken);
                        let inner_ctx = Context::empty().extended(&b.name, &b.sort);
                        let map = BTreeMap::from([(b.name.clone(), SortedTerm::var(&name, &b.sort))]);
                        body = substitute(&body, &inner_ctx, &map)?;
                    }
                    ctx = ctx.extended(&name, &b.sort);
                }
                conclusion = body;
            }
            Formula::Implies(a, b) => {
                premise.push(*a);
                conclusion = *b;
            }
            c => {
                conclusion = c;
                break;
            }
        }
    }
    let premise = if premise.len() == 1 {
        premise.pop().unwrap()
    } else {
        Formula::And(premise.into_iter().filter(|p| *p != Formula::True).collect()).normalize_top()
    };
    Ok(Sequent::new(ctx, premise, conclusion))
}

impl Formula {
    fn normalize_top(self) -> Formula {
        match self {
            Formula::And(mut fs) if fs.len() <= 1 => fs.pop().unwrap_or(Formula::True),
            f => f,
        }
    }
}

/// Coherent theory over the signature extended by one relation per negated
/// subformula, with exclusion and excluded-middle axioms for each.
pub fn morleyize(t: &Theory) -> Result<Morleyized> {
    for a in &t.axioms {
        check_sequent(&t.signature, &a.sequent, Mode::Classical)?;
    }
    let mut st = State {
        theory: Theory::new(t.signature.clone()),
        negations: Vec::new(),
        by_key: BTreeMap::new(),
        counter: 0,
    };
    let mut translated = Vec::new();
    for a in &t.axioms {
        let seq = lift_conclusion(&a.sequent)?;
        let mut scope = seq.context.vars.clone();
        let premise = st.tr(&seq.premise, &mut scope)?;
        let conclusion = st.tr(&seq.conclusion, &mut scope)?;
        translated.push((a.name.clone(), Sequent::new(seq.context, premise, conclusion)));
    }
    let aux = std::mem::take(&mut st.theory.axioms);
    for (name, seq) in translated {
        st.theory.push_axiom_unchecked(Some(&name), seq);
    }
    st.theory.axioms.extend(aux);
    st.theory.schemes = t.schemes.clone();
    for a in &st.theory.axioms {
        check_sequent(&st.theory.signature, &a.sequent, Mode::Geometric)?;
    }
    Ok(Morleyized {
        theory: st.theory,
        negations: st.negations,
    })
}
