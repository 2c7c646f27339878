use super::{Axiom, Binder, Context, Formula, Sequent, Signature, Term};
use crate::error::{Error, Result};
use std::fmt;

/// Finite generators for axiom families that are infinitary in general.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Generator {
    /// `true => exists x1..xn. R(xi, xj) for all i < j`, one instance per n.
    AtLeast { rel: String },
    /// `true => q·1 = 0 for some 1 <= q <= n`, over relational `Add`, `Zero`, `One`.
    FiniteChar { add: String, zero: String, one: String },
}

impl Generator {
    pub fn from_parts(name: &str, args: &[String]) -> Result<Self> {
        match (name, args) {
            ("atleast", [rel]) => Ok(Generator::AtLeast { rel: rel.clone() }),
            ("finite_char", [add, zero, one]) => Ok(Generator::FiniteChar {
                add: add.clone(),
                zero: zero.clone(),
                one: one.clone(),
            }),
            _ => Err(Error::invalid(format!(
                "unknown scheme generator `{name}` with {} arguments",
                args.len()
            ))),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::AtLeast { rel } => write!(f, "atleast({rel})"),
            Generator::FiniteChar { add, zero, one } => {
                write!(f, "finite_char({add}, {zero}, {one})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scheme {
    pub name: String,
    pub generator: Generator,
    pub bound: usize,
}

fn expect_arity(sig: &Signature, rel: &str, want: usize) -> Result<String> {
    let (_, r) = sig
        .relation(rel)
        .ok_or_else(|| Error::UnknownSymbol(rel.to_string()))?;
    if r.arity.len() != want || r.arity.iter().any(|&s| s != r.arity[0]) {
        return Err(Error::sort(
            rel,
            format!("scheme generator needs a {want}-ary relation over a single sort"),
        ));
    }
    Ok(sig.sort_name(r.arity[0]).to_string())
}

impl Scheme {
    pub fn validate(&self, sig: &Signature) -> Result<()> {
        self.sort(sig).map(|_| ())
    }

    fn sort(&self, sig: &Signature) -> Result<String> {
        match &self.generator {
            Generator::AtLeast { rel } => expect_arity(sig, rel, 2),
            Generator::FiniteChar { add, zero, one } => {
                let s = expect_arity(sig, add, 3)?;
                for r in [zero, one] {
                    if expect_arity(sig, r, 1)? != s {
                        return Err(Error::sort(r.as_str(), "sort differs from addition"));
                    }
                }
                Ok(s)
            }
        }
    }

    /// Instances up to `bound`, sorted over `sig`.
    pub fn instances(&self, sig: &Signature, bound: usize) -> Vec<Axiom> {
        let sort = self.sort(sig).unwrap_or_default();
        match &self.generator {
            Generator::AtLeast { rel } => (1..=bound)
                .map(|n| Axiom {
                    name: format!("{}_{n}", self.name),
                    sequent: at_least(rel, &sort, n),
                })
                .collect(),
            Generator::FiniteChar { add, zero, one } if bound > 0 => {
                let disjuncts = (1..=bound).map(|q| char_divides(add, zero, one, &sort, q)).collect();
                vec![Axiom {
                    name: format!("{}_{bound}", self.name),
                    sequent: Sequent::new(Context::empty(), Formula::True, Formula::or(disjuncts)),
                }]
            }
            Generator::FiniteChar { .. } => Vec::new(),
        }
    }
}

fn at_least(rel: &str, sort: &str, n: usize) -> Sequent {
    let vars: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let mut atoms = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            atoms.push(Formula::Rel(rel.into(), vec![Term::var(&vars[i]), Term::var(&vars[j])]));
        }
    }
    let binders = vars.iter().map(|v| Binder::new(v, sort)).collect();
    Sequent::new(Context::empty(), Formula::True, Formula::exists(binders, Formula::and(atoms)))
}

/// `exists y1..yq. One(y1) & Add(y1,y1,y2) & ... & Zero(yq)`, i.e. q·1 = 0.
fn char_divides(add: &str, zero: &str, one: &str, sort: &str, q: usize) -> Formula {
    let ys: Vec<String> = (1..=q).map(|i| format!("y{i}")).collect();
    let mut atoms = vec![Formula::Rel(one.into(), vec![Term::var(&ys[0])])];
    for i in 1..q {
        atoms.push(Formula::Rel(
            add.into(),
            vec![Term::var(&ys[i - 1]), Term::var(&ys[0]), Term::var(&ys[i])],
        ));
    }
    atoms.push(Formula::Rel(zero.into(), vec![Term::var(&ys[q - 1])]));
    let binders = ys.iter().map(|v| Binder::new(v, sort)).collect();
    Formula::exists(binders, Formula::and(atoms))
}
