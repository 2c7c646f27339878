use super::structure::{DefinableSet, Point, Structure};
use crate::error::{Error, Result};
use crate::syntax::{check_formula, Context, Formula, Mode, Sequent, Signature, SortId, Term, Theory};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy)]
enum Slot {
    Var(usize),
    Param(usize),
}

#[derive(Debug, Clone)]
enum Node {
    True,
    False,
    Rel(usize, Vec<Slot>),
    Eq(Slot, Slot),
    And(Vec<Node>),
    Or(Vec<Node>),
    Exists(Vec<(usize, SortId)>, Box<Node>),
    Forall(Vec<(usize, SortId)>, Box<Node>),
    Not(Box<Node>),
    Implies(Box<Node>, Box<Node>),
}

/// A formula resolved against a signature and context for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Compiled {
    root: Node,
    context: Vec<SortId>,
    slots: usize,
    params: Vec<(String, SortId)>,
}

struct Compiler<'a> {
    sig: &'a Signature,
    scope: Vec<(String, usize)>,
    slots: usize,
    params: Vec<(String, SortId)>,
    param_sorts: &'a BTreeMap<String, String>,
}

impl Compiler<'_> {
    fn slot(&mut self, t: &Term) -> Result<Slot> {
        match t {
            Term::Var(v) => self
                .scope
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, s)| Slot::Var(*s))
                .ok_or_else(|| Error::sort(v.clone(), "variable not in context")),
            Term::Param(p) => {
                if let Some(i) = self.params.iter().position(|(n, _)| n == p) {
                    return Ok(Slot::Param(i));
                }
                let sort = self
                    .param_sorts
                    .get(p)
                    .and_then(|s| self.sig.sort_id(s))
                    .ok_or_else(|| Error::UnknownParameter(p.clone()))?;
                self.params.push((p.clone(), sort));
                Ok(Slot::Param(self.params.len() - 1))
            }
            Term::App(f, _) => Err(Error::Unsupported(format!(
                "function term `{f}` in evaluation; relationalize first"
            ))),
        }
    }

    fn bind(&mut self, bs: &[crate::syntax::Binder]) -> Result<Vec<(usize, SortId)>> {
        let mut out = Vec::with_capacity(bs.len());
        for b in bs {
            let sort = self
                .sig
                .sort_id(&b.sort)
                .ok_or_else(|| Error::sort(b.name.clone(), format!("undeclared sort `{}`", b.sort)))?;
            let s = self.slots;
            self.slots += 1;
            self.scope.push((b.name.clone(), s));
            out.push((s, sort));
        }
        Ok(out)
    }

    fn node(&mut self, f: &Formula) -> Result<Node> {
        Ok(match f {
            Formula::True => Node::True,
            Formula::False => Node::False,
            Formula::Rel(r, args) => {
                let (i, _) = self
                    .sig
                    .relation(r)
                    .ok_or_else(|| Error::UnknownSymbol(r.clone()))?;
                Node::Rel(i, args.iter().map(|a| self.slot(a)).collect::<Result<_>>()?)
            }
            Formula::Eq(a, b) => Node::Eq(self.slot(a)?, self.slot(b)?),
            Formula::And(fs) => Node::And(fs.iter().map(|g| self.node(g)).collect::<Result<_>>()?),
            Formula::Or(fs) => Node::Or(fs.iter().map(|g| self.node(g)).collect::<Result<_>>()?),
            Formula::Exists(bs, body) | Formula::Forall(bs, body) => {
                let depth = self.scope.len();
                let binders = self.bind(bs)?;
                let body = self.node(body);
                self.scope.truncate(depth);
                let body = Box::new(body?);
                if matches!(f, Formula::Exists(..)) {
                    Node::Exists(binders, body)
                } else {
                    Node::Forall(binders, body)
                }
            }
            Formula::Not(b) => Node::Not(Box::new(self.node(b)?)),
            Formula::Implies(a, b) => Node::Implies(Box::new(self.node(a)?), Box::new(self.node(b)?)),
        })
    }
}

impl Compiled {
    /// Compiles a parameter-free formula (classical connectives allowed).
    pub fn new(sig: &Signature, ctx: &Context, f: &Formula) -> Result<Self> {
        Self::with_params(sig, ctx, f, &BTreeMap::new())
    }

    /// Compiles a formula whose parameters are sorted by `param_sorts`.
    pub fn with_params(
        sig: &Signature,
        ctx: &Context,
        f: &Formula,
        param_sorts: &BTreeMap<String, String>,
    ) -> Result<Self> {
        check_formula(sig, ctx, f, param_sorts, Mode::Classical)?;
        let context = ctx.sort_ids(sig)?;
        let mut c = Compiler {
            sig,
            scope: ctx.names().enumerate().map(|(i, v)| (v.to_string(), i)).collect(),
            slots: ctx.len(),
            params: Vec::new(),
            param_sorts,
        };
        let root = c.node(f)?;
        Ok(Compiled {
            root,
            context,
            slots: c.slots,
            params: c.params,
        })
    }

    pub fn context_sorts(&self) -> &[SortId] {
        &self.context
    }

    /// Parameters in the order their values must be supplied.
    pub fn params(&self) -> &[(String, SortId)] {
        &self.params
    }

    fn env(&self, assignment: &[usize]) -> Vec<usize> {
        let mut env = vec![0; self.slots];
        env[..assignment.len()].copy_from_slice(assignment);
        env
    }

    /// Evaluates at `assignment` (one element per context variable) with
    /// parameter values in [`Compiled::params`] order.
    pub fn eval(&self, m: &Structure, assignment: &[usize], params: &[usize]) -> bool {
        let mut env = self.env(assignment);
        holds(&self.root, m, &mut env, params)
    }

    /// All satisfying tuples of `m`, in lexicographic order.
    pub fn extension(&self, m: &Structure, params: &[usize]) -> Vec<Vec<usize>> {
        let mut env = vec![0; self.slots];
        let n = self.context.len();
        m.tuples(&self.context)
            .filter(|t| {
                env[..n].copy_from_slice(t);
                holds(&self.root, m, &mut env, params)
            })
            .collect()
    }

    /// First tuple (lexicographic) satisfying the formula, if any.
    pub fn find(&self, m: &Structure, params: &[usize], mut pred: impl FnMut(&[usize]) -> bool) -> Option<Vec<usize>> {
        let mut env = vec![0; self.slots];
        let n = self.context.len();
        m.tuples(&self.context).find(|t| {
            if !pred(t) {
                return false;
            }
            env[..n].copy_from_slice(t);
            holds(&self.root, m, &mut env, params)
        })
    }
}

#[inline]
fn value(s: Slot, env: &[usize], params: &[usize]) -> usize {
    match s {
        Slot::Var(i) => env[i],
        Slot::Param(i) => params[i],
    }
}

fn holds(n: &Node, m: &Structure, env: &mut Vec<usize>, params: &[usize]) -> bool {
    match n {
        Node::True => true,
        Node::False => false,
        Node::Rel(r, args) => m
            .relation(*r)
            .contains_by(args.len(), |i| value(args[i], env, params)),
        Node::Eq(a, b) => value(*a, env, params) == value(*b, env, params),
        Node::And(fs) => fs.iter().all(|g| holds(g, m, env, params)),
        Node::Or(fs) => fs.iter().any(|g| holds(g, m, env, params)),
        Node::Exists(bs, body) => quantify(bs, body, m, env, params, true),
        Node::Forall(bs, body) => quantify(bs, body, m, env, params, false),
        Node::Not(b) => !holds(b, m, env, params),
        Node::Implies(a, b) => !holds(a, m, env, params) || holds(b, m, env, params),
    }
}

fn quantify(
    bs: &[(usize, SortId)],
    body: &Node,
    m: &Structure,
    env: &mut Vec<usize>,
    params: &[usize],
    existential: bool,
) -> bool {
    let Some(&(slot, sort)) = bs.first() else {
        return holds(body, m, env, params);
    };
    for e in 0..m.size(sort) {
        env[slot] = e;
        if quantify(&bs[1..], body, m, env, params, existential) == existential {
            return existential;
        }
    }
    !existential
}

fn check_assignment(m: &Structure, sorts: &[SortId], a: &[usize]) -> Result<()> {
    if a.len() != sorts.len() || a.iter().zip(sorts).any(|(&e, &s)| e >= m.size(s)) {
        return Err(Error::sort(
            m.id.clone(),
            "assignment does not match the context's sorts",
        ));
    }
    Ok(())
}

/// Tarski satisfaction of a parameter-free formula at an assignment.
pub fn eval(f: &Formula, ctx: &Context, m: &Structure, assignment: &[usize]) -> Result<bool> {
    let c = Compiled::new(m.signature(), ctx, f)?;
    check_assignment(m, &c.context, assignment)?;
    Ok(c.eval(m, assignment, &[]))
}

/// `⟦f, ctx⟧` over a family of structures.
pub fn definable(f: &Formula, ctx: &Context, family: &[Structure]) -> Result<DefinableSet> {
    if f.has_params() {
        return Err(Error::invalid(
            "formula has parameters; use definable_with_params",
        ));
    }
    let mut members = BTreeSet::new();
    let mut compiled: Option<(usize, Compiled)> = None;
    for (i, m) in family.iter().enumerate() {
        let reuse = matches!(&compiled, Some((j, _)) if std::sync::Arc::ptr_eq(family[*j].signature(), m.signature()));
        if !reuse {
            compiled = Some((i, Compiled::new(m.signature(), ctx, f)?));
        }
        let c = &compiled.as_ref().unwrap().1;
        for t in c.extension(m, &[]) {
            members.insert(Point::new(i, t));
        }
    }
    Ok(DefinableSet::new(ctx.clone(), members))
}

/// A sequent compiled against a signature.
#[derive(Debug, Clone)]
pub struct CompiledSequent {
    premise: Compiled,
    conclusion: Compiled,
}

impl CompiledSequent {
    pub fn new(sig: &Signature, s: &Sequent) -> Result<Self> {
        Ok(CompiledSequent {
            premise: Compiled::new(sig, &s.context, &s.premise)?,
            conclusion: Compiled::new(sig, &s.context, &s.conclusion)?,
        })
    }

    /// First assignment satisfying the premise but not the conclusion.
    pub fn counterexample(&self, m: &Structure) -> Option<Vec<usize>> {
        let mut env_p = vec![0; self.premise.slots];
        let mut env_c = vec![0; self.conclusion.slots];
        let n = self.premise.context.len();
        m.tuples(&self.premise.context).find(|t| {
            env_p[..n].copy_from_slice(t);
            env_c[..n].copy_from_slice(t);
            holds(&self.premise.root, m, &mut env_p, &[]) && !holds(&self.conclusion.root, m, &mut env_c, &[])
        })
    }

    pub fn holds(&self, m: &Structure) -> bool {
        self.counterexample(m).is_none()
    }
}

pub fn satisfies_sequent(m: &Structure, s: &Sequent) -> Result<bool> {
    Ok(CompiledSequent::new(m.signature(), s)?.holds(m))
}

/// Failing axiom with the element names of its first counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomFailure {
    pub axiom: String,
    pub assignment: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoryCheck {
    pub holds: bool,
    pub failures: Vec<AxiomFailure>,
    /// Some scheme was instantiated below its declared bound.
    pub schemes_inconclusive: bool,
    pub scheme_bound: usize,
}

/// A theory's axioms and scheme instances compiled once for many structures.
#[derive(Debug, Clone)]
pub struct CompiledTheory {
    axioms: Vec<(String, Context, CompiledSequent)>,
    pub schemes_inconclusive: bool,
    pub scheme_bound: usize,
}

impl CompiledTheory {
    pub fn new(sig: &Signature, t: &Theory, scheme_bound: usize) -> Result<Self> {
        let axioms = t
            .instantiate(scheme_bound)
            .into_iter()
            .map(|a| {
                let c = CompiledSequent::new(sig, &a.sequent)?;
                Ok((a.name, a.sequent.context, c))
            })
            .collect::<Result<_>>()?;
        Ok(CompiledTheory {
            axioms,
            schemes_inconclusive: t.schemes_truncated_at(scheme_bound),
            scheme_bound,
        })
    }

    pub fn holds(&self, m: &Structure) -> bool {
        self.axioms.iter().all(|(_, _, s)| s.holds(m))
    }

    pub fn check(&self, m: &Structure) -> TheoryCheck {
        let mut failures = Vec::new();
        for (name, ctx, s) in &self.axioms {
            if let Some(t) = s.counterexample(m) {
                let sorts = ctx.sort_ids(m.signature()).unwrap_or_default();
                failures.push(AxiomFailure {
                    axiom: name.clone(),
                    assignment: m.show_tuple(&sorts, &t),
                });
            }
        }
        TheoryCheck {
            holds: failures.is_empty(),
            failures,
            schemes_inconclusive: self.schemes_inconclusive,
            scheme_bound: self.scheme_bound,
        }
    }
}

/// Checks every axiom and scheme instance (up to `scheme_bound`) in `m`.
pub fn check_theory(m: &Structure, t: &Theory, scheme_bound: usize) -> Result<TheoryCheck> {
    Ok(CompiledTheory::new(m.signature(), t, scheme_bound)?.check(m))
}
