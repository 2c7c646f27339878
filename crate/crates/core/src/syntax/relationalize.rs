use super::subst::free_vars;
use super::{Axiom, Binder, Context, Formula, Sequent, Signature, Term, Theory};
use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// Name of the graph relation replacing function `f`: `f` capitalized, with
/// `G` appended until it is free in `sig`.
pub fn graph_relation_name(sig: &Signature, f: &str) -> String {
    let mut chars = f.chars();
    let mut name: String = match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => "G".into(),
    };
    while sig.relation(&name).is_some() || (name != f && sig.function(&name).is_some()) {
        name.push('G');
    }
    name
}

struct Flattener<'a> {
    sig: &'a Signature,
    names: &'a [(String, String)],
    taken: BTreeSet<String>,
    next: usize,
}

impl Flattener<'_> {
    fn fresh(&mut self) -> String {
        loop {
            self.next += 1;
            let v = format!("v{}", self.next);
            if self.taken.insert(v.clone()) {
                return v;
            }
        }
    }

    fn graph(&self, f: &str) -> Result<(String, String)> {
        let (i, sym) = self
            .sig
            .function(f)
            .ok_or_else(|| Error::UnknownSymbol(f.to_string()))?;
        Ok((self.names[i].0.clone(), self.sig.sort_name(sym.result).to_string()))
    }

    /// Replaces every application by a fresh variable, recording graph atoms.
    fn term(&mut self, t: &Term, binders: &mut Vec<Binder>, atoms: &mut Vec<Formula>) -> Result<Term> {
        match t {
            Term::App(f, args) => {
                let (rel, sort) = self.graph(f)?;
                let mut flat = Vec::with_capacity(args.len() + 1);
                for a in args {
                    flat.push(self.term(a, binders, atoms)?);
                }
                let v = self.fresh();
                flat.push(Term::Var(v.clone()));
                atoms.push(Formula::Rel(rel, flat));
                binders.push(Binder::new(&v, &sort));
                Ok(Term::Var(v))
            }
            t => Ok(t.clone()),
        }
    }

    /// Records the graph atoms asserting `t` evaluates to `target`.
    fn into(
        &mut self,
        t: &Term,
        target: &Term,
        binders: &mut Vec<Binder>,
        atoms: &mut Vec<Formula>,
    ) -> Result<()> {
        let Term::App(f, args) = t else {
            atoms.push(Formula::Eq(t.clone(), target.clone()));
            return Ok(());
        };
        let (rel, _) = self.graph(f)?;
        let mut flat = Vec::with_capacity(args.len() + 1);
        for a in args {
            flat.push(self.term(a, binders, atoms)?);
        }
        flat.push(target.clone());
        atoms.push(Formula::Rel(rel, flat));
        Ok(())
    }

    /// Graph atoms plus the residual atom (if any) for a single atom.
    fn atom(&mut self, f: &Formula, binders: &mut Vec<Binder>) -> Result<Vec<Formula>> {
        let mut atoms = Vec::new();
        match f {
            Formula::Rel(r, args) => {
                let mut flat = Vec::new();
                for a in args {
                    flat.push(self.term(a, binders, &mut atoms)?);
                }
                atoms.push(Formula::Rel(r.clone(), flat));
            }
            Formula::Eq(a, b) => match (a, b) {
                (Term::App(..), Term::App(..)) => {
                    let v = self.fresh();
                    let sort = match a {
                        Term::App(g, _) => self.graph(g)?.1,
                        _ => unreachable!(),
                    };
                    let target = Term::Var(v.clone());
                    self.into(a, &target, binders, &mut atoms)?;
                    self.into(b, &target, binders, &mut atoms)?;
                    binders.push(Binder::new(&v, &sort));
                }
                (Term::App(..), s) => self.into(a, s, binders, &mut atoms)?,
                (s, Term::App(..)) => self.into(b, s, binders, &mut atoms)?,
                _ => atoms.push(f.clone()),
            },
            _ => unreachable!("atom expected"),
        }
        order_by_first_use(binders, &atoms);
        Ok(atoms)
    }

    fn formula(&mut self, f: &Formula) -> Result<Formula> {
        Ok(match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Rel(..) | Formula::Eq(..) => {
                if !f.has_function_terms() {
                    return Ok(f.clone());
                }
                let mut binders = Vec::new();
                let atoms = self.atom(f, &mut binders)?;
                Formula::exists(binders, Formula::and(atoms))
            }
            Formula::And(fs) => Formula::And(fs.iter().map(|g| self.formula(g)).collect::<Result<_>>()?),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| self.formula(g)).collect::<Result<_>>()?),
            Formula::Exists(bs, b) => match self.formula(b)? {
                Formula::Exists(inner, body) => {
                    let mut all = bs.clone();
                    all.extend(inner);
                    Formula::Exists(all, body)
                }
                body => Formula::Exists(bs.clone(), Box::new(body)),
            },
            _ => return Err(Error::Unsupported("classical connective in a functional theory".into())),
        })
    }
}

fn first_use(v: &str, atoms: &[Formula]) -> usize {
    atoms
        .iter()
        .position(|a| free_vars(a).contains(v))
        .unwrap_or(usize::MAX)
}

fn order_by_first_use(binders: &mut [Binder], atoms: &[Formula]) {
    binders.sort_by_key(|b| first_use(&b.name, atoms));
}

fn translate(fl: &mut Flattener, seq: &Sequent) -> Result<Sequent> {
    let mut ctx = seq.context.clone();
    let mut premise = Vec::new();
    let mut lifted = Vec::new();
    for c in seq.premise.conjuncts() {
        let is_atom = matches!(c, Formula::Rel(..) | Formula::Eq(..));
        if is_atom && c.has_function_terms() {
            premise.extend(fl.atom(c, &mut lifted)?);
        } else {
            premise.push(fl.formula(c)?);
        }
    }
    let conclusion = match &seq.conclusion {
        c @ (Formula::Rel(..) | Formula::Eq(..)) if c.has_function_terms() => {
            let mut graphs = Vec::new();
            let residual = match c {
                Formula::Rel(r, args) => {
                    let mut flat = Vec::new();
                    for a in args {
                        flat.push(fl.term(a, &mut lifted, &mut graphs)?);
                    }
                    Formula::Rel(r.clone(), flat)
                }
                Formula::Eq(a, b) => {
                    let a = fl.term(a, &mut lifted, &mut graphs)?;
                    let b = fl.term(b, &mut lifted, &mut graphs)?;
                    Formula::Eq(a, b)
                }
                _ => unreachable!(),
            };
            premise.extend(graphs);
            residual
        }
        c => fl.formula(c)?,
    };
    for b in lifted {
        ctx = ctx.extended(&b.name, &b.sort);
    }
    Ok(Sequent::new(ctx, Formula::and(premise), conclusion))
}

/// Replaces each function symbol by its graph relation with totality and
/// functionality axioms, and flattens every function term.
pub fn relationalize(t: &Theory) -> Result<Theory> {
    let src = &t.signature;
    let mut sig = Signature {
        sorts: src.sorts.clone(),
        relations: src.relations.clone(),
        functions: Vec::new(),
    };
    let mut names = Vec::new();
    for f in &src.functions {
        let name = graph_relation_name(&sig, &f.name);
        let mut arity: Vec<&str> = f.args.iter().map(|&s| src.sort_name(s)).collect();
        arity.push(src.sort_name(f.result));
        sig.add_relation(&name, &arity)?;
        names.push((name, f.name.clone()));
    }
    let mut out = Theory::new(sig.clone());
    for (i, f) in src.functions.iter().enumerate() {
        let rel = &names[i].0;
        let ctx = Context::new(
            f.args
                .iter()
                .enumerate()
                .map(|(k, &s)| (format!("x{}", k + 1), src.sort_name(s).to_string()))
                .collect(),
        )?;
        let xs: Vec<Term> = ctx.names().map(Term::var).collect();
        let res = src.sort_name(f.result);
        let with = |y: &str| {
            let mut a = xs.clone();
            a.push(Term::var(y));
            Formula::Rel(rel.clone(), a)
        };
        out.push_axiom_unchecked(
            Some(&format!("{}_total", f.name)),
            Sequent::new(
                ctx.clone(),
                Formula::True,
                Formula::Exists(vec![Binder::new("y", res)], Box::new(with("y"))),
            ),
        );
        let ctx2 = ctx.extended("y", res).extended("y'", res);
        out.push_axiom_unchecked(
            Some(&format!("{}_functional", f.name)),
            Sequent::new(
                ctx2,
                Formula::And(vec![with("y"), with("y'")]),
                Formula::eq_vars("y", "y'"),
            ),
        );
    }
    for a in &t.axioms {
        let mut taken: BTreeSet<String> = a.sequent.context.names().map(String::from).collect();
        collect_bound(&a.sequent.premise, &mut taken);
        collect_bound(&a.sequent.conclusion, &mut taken);
        let mut fl = Flattener {
            sig: src,
            names: &names,
            taken,
            next: 0,
        };
        let seq = translate(&mut fl, &a.sequent)?;
        out.axioms.push(Axiom {
            name: a.name.clone(),
            sequent: seq,
        });
    }
    for s in &t.schemes {
        s.validate(&sig)?;
        out.schemes.push(s.clone());
    }
    for a in &out.axioms {
        super::check_sequent(&out.signature, &a.sequent, super::Mode::Geometric)?;
    }
    Ok(out)
}

fn collect_bound(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| collect_bound(g, out)),
        Formula::Exists(bs, b) | Formula::Forall(bs, b) => {
            out.extend(bs.iter().map(|x| x.name.clone()));
            collect_bound(b, out);
        }
        Formula::Not(b) => collect_bound(b, out),
        Formula::Implies(a, b) => {
            collect_bound(a, out);
            collect_bound(b, out);
        }
        _ => {
            out.extend(free_vars(f));
        }
    }
}
