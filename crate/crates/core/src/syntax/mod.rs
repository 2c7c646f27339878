//! Signatures, geometric formulas, sequents and theories, together with the
//! theory DSL and the syntactic transformations (function elimination and
//! Morleyization).

mod morleyize;
mod parser;
mod print;
mod relationalize;
mod scheme;
mod subst;

pub use morleyize::{morleyize, Morleyized, NegationName};
pub use parser::{
    parse_classical_theory, parse_formula, parse_formula_with_params, parse_functional_theory,
    parse_theory,
};
pub use print::{print_formula, print_sequent, print_term, print_theory};
pub use relationalize::{graph_relation_name, relationalize};
pub use scheme::{Generator, Scheme};
pub use subst::{
    alpha_eq, canonical_rename, free_vars, fresh_name, params_of, substitute, SortedTerm,
};

use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Index of a sort in its [`Signature`].
pub type SortId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationSymbol {
    pub name: String,
    pub arity: Vec<SortId>,
}

/// Function symbols are only accepted on input to [`relationalize`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunctionSymbol {
    pub name: String,
    pub args: Vec<SortId>,
    pub result: SortId,
}

/// A multi-sorted relational vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    pub sorts: Vec<String>,
    pub relations: Vec<RelationSymbol>,
    pub functions: Vec<FunctionSymbol>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_sort(&mut self, name: &str) -> Result<SortId> {
        if self.sort_id(name).is_some() {
            return Err(Error::sort(name, "sort declared twice"));
        }
        self.sorts.push(name.to_string());
        Ok(self.sorts.len() - 1)
    }

    pub fn add_relation(&mut self, name: &str, arity: &[&str]) -> Result<usize> {
        if self.relation(name).is_some() || self.function(name).is_some() {
            return Err(Error::sort(name, "symbol declared twice"));
        }
        let arity = arity
            .iter()
            .map(|s| {
                self.sort_id(s)
                    .ok_or_else(|| Error::sort(name, format!("undeclared sort `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.relations.push(RelationSymbol {
            name: name.to_string(),
            arity,
        });
        Ok(self.relations.len() - 1)
    }

    pub fn add_function(&mut self, name: &str, args: &[&str], result: &str) -> Result<usize> {
        if self.relation(name).is_some() || self.function(name).is_some() {
            return Err(Error::sort(name, "symbol declared twice"));
        }
        let lookup = |s: &str| {
            self.sort_id(s)
                .ok_or_else(|| Error::sort(name, format!("undeclared sort `{s}`")))
        };
        let args = args.iter().map(|s| lookup(s)).collect::<Result<Vec<_>>>()?;
        let result = lookup(result)?;
        self.functions.push(FunctionSymbol {
            name: name.to_string(),
            args,
            result,
        });
        Ok(self.functions.len() - 1)
    }

    pub fn sort_id(&self, name: &str) -> Option<SortId> {
        self.sorts.iter().position(|s| s == name)
    }

    pub fn sort_name(&self, id: SortId) -> &str {
        &self.sorts[id]
    }

    pub fn relation(&self, name: &str) -> Option<(usize, &RelationSymbol)> {
        self.relations
            .iter()
            .enumerate()
            .find(|(_, r)| r.name == name)
    }

    pub fn function(&self, name: &str) -> Option<(usize, &FunctionSymbol)> {
        self.functions
            .iter()
            .enumerate()
            .find(|(_, f)| f.name == name)
    }

    /// Sort names of a relation's arity.
    pub fn arity_names(&self, rel: &RelationSymbol) -> Vec<&str> {
        rel.arity.iter().map(|&s| self.sort_name(s)).collect()
    }

    pub fn max_arity(&self) -> usize {
        self.relations
            .iter()
            .map(|r| r.arity.len())
            .max()
            .unwrap_or(0)
    }

    /// True when every symbol of `self` occurs in `other` with the same arity.
    pub fn is_subsignature_of(&self, other: &Signature) -> bool {
        self.sorts.iter().all(|s| other.sort_id(s).is_some())
            && self.relations.iter().all(|r| {
                other.relation(&r.name).is_some_and(|(_, o)| {
                    self.arity_names(r) == other.arity_names(o)
                })
            })
    }
}

/// An ordered list of distinct variables with their sorts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Context {
    pub vars: Vec<(String, String)>,
}

impl Context {
    pub fn new(vars: Vec<(String, String)>) -> Result<Self> {
        for (i, (v, _)) in vars.iter().enumerate() {
            if vars[..i].iter().any(|(w, _)| w == v) {
                return Err(Error::sort(v.clone(), "variable repeated in context"));
            }
        }
        Ok(Context { vars })
    }

    pub fn empty() -> Self {
        Context::default()
    }

    /// `x1 : sort[0], x2 : sort[1], ...`
    pub fn numbered(prefix: &str, sorts: &[&str]) -> Self {
        Context {
            vars: sorts
                .iter()
                .enumerate()
                .map(|(i, s)| (format!("{prefix}{}", i + 1), s.to_string()))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn sort_of(&self, var: &str) -> Option<&str> {
        self.vars
            .iter()
            .find(|(v, _)| v == var)
            .map(|(_, s)| s.as_str())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().map(|(v, _)| v.as_str())
    }

    pub fn sorts(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().map(|(_, s)| s.as_str())
    }

    pub fn sort_ids(&self, sig: &Signature) -> Result<Vec<SortId>> {
        self.vars
            .iter()
            .map(|(v, s)| {
                sig.sort_id(s)
                    .ok_or_else(|| Error::sort(v.clone(), format!("undeclared sort `{s}`")))
            })
            .collect()
    }

    pub fn extended(&self, var: &str, sort: &str) -> Self {
        let mut vars = self.vars.clone();
        vars.push((var.to_string(), sort.to_string()));
        Context { vars }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Param(String),
    /// Function application; only valid before [`relationalize`].
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn param(name: &str) -> Self {
        Term::Param(name.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Binder {
    pub name: String,
    pub sort: String,
}

impl Binder {
    pub fn new(name: &str, sort: &str) -> Self {
        Binder {
            name: name.to_string(),
            sort: sort.to_string(),
        }
    }
}

/// First-order formulas. The geometric fragment uses only `True` through
/// `Exists`; `Not`, `Implies` and `Forall` occur only in classical input to
/// [`morleyize`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Rel(String, Vec<Term>),
    Eq(Term, Term),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Vec<Binder>, Box<Formula>),
    Not(Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Vec<Binder>, Box<Formula>),
}

impl Formula {
    pub fn rel(name: &str, args: &[&str]) -> Self {
        Formula::Rel(name.to_string(), args.iter().map(|a| Term::var(a)).collect())
    }

    pub fn eq_vars(a: &str, b: &str) -> Self {
        Formula::Eq(Term::var(a), Term::var(b))
    }

    /// Conjunction that collapses the empty and singleton cases.
    pub fn and(mut parts: Vec<Formula>) -> Self {
        match parts.len() {
            0 => Formula::True,
            1 => parts.pop().unwrap(),
            _ => Formula::And(parts),
        }
    }

    /// Disjunction that collapses the empty and singleton cases.
    pub fn or(mut parts: Vec<Formula>) -> Self {
        match parts.len() {
            0 => Formula::False,
            1 => parts.pop().unwrap(),
            _ => Formula::Or(parts),
        }
    }

    pub fn exists(binders: Vec<Binder>, body: Formula) -> Self {
        if binders.is_empty() {
            body
        } else {
            Formula::Exists(binders, Box::new(body))
        }
    }

    /// True for formulas built only from the geometric connectives.
    pub fn is_geometric(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Eq(..) | Formula::Rel(..) => true,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_geometric),
            Formula::Exists(_, b) => b.is_geometric(),
            Formula::Not(_) | Formula::Implies(..) | Formula::Forall(..) => false,
        }
    }

    pub fn has_params(&self) -> bool {
        !params_of(self).is_empty()
    }

    pub fn has_function_terms(&self) -> bool {
        fn term(t: &Term) -> bool {
            matches!(t, Term::App(..))
        }
        match self {
            Formula::True | Formula::False => false,
            Formula::Rel(_, ts) => ts.iter().any(term),
            Formula::Eq(a, b) => term(a) || term(b),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().any(Formula::has_function_terms),
            Formula::Exists(_, b) | Formula::Forall(_, b) | Formula::Not(b) => {
                b.has_function_terms()
            }
            Formula::Implies(a, b) => a.has_function_terms() || b.has_function_terms(),
        }
    }

    /// Removes empty and singleton `And`/`Or` nodes and empty binders. Parsing
    /// a printed formula yields its normal form.
    pub fn normalize(&self) -> Formula {
        match self {
            Formula::And(fs) => Formula::and(fs.iter().map(Formula::normalize).collect()),
            Formula::Or(fs) => Formula::or(fs.iter().map(Formula::normalize).collect()),
            Formula::Exists(bs, b) => Formula::exists(bs.clone(), b.normalize()),
            Formula::Forall(bs, b) => {
                if bs.is_empty() {
                    b.normalize()
                } else {
                    Formula::Forall(bs.clone(), Box::new(b.normalize()))
                }
            }
            Formula::Not(b) => Formula::Not(Box::new(b.normalize())),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(a.normalize()), Box::new(b.normalize()))
            }
            f => f.clone(),
        }
    }

    /// Top-level conjuncts (a non-conjunction is its own single conjunct).
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(fs) => fs.iter().collect(),
            Formula::True => vec![],
            f => vec![f],
        }
    }
}

/// `premise ⊢_context conclusion`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub context: Context,
    pub premise: Formula,
    pub conclusion: Formula,
}

impl Sequent {
    pub fn new(context: Context, premise: Formula, conclusion: Formula) -> Self {
        Sequent {
            context,
            premise,
            conclusion,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Axiom {
    pub name: String,
    pub sequent: Sequent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    pub signature: Signature,
    pub axioms: Vec<Axiom>,
    pub schemes: Vec<Scheme>,
}

impl Theory {
    pub fn new(signature: Signature) -> Self {
        Theory {
            signature,
            axioms: Vec::new(),
            schemes: Vec::new(),
        }
    }

    /// Appends an axiom after checking it is well-formed over the signature.
    pub fn add_axiom(&mut self, name: Option<&str>, sequent: Sequent) -> Result<()> {
        check_sequent(&self.signature, &sequent, Mode::Geometric)?;
        self.push_axiom_unchecked(name, sequent);
        Ok(())
    }

    pub(crate) fn push_axiom_unchecked(&mut self, name: Option<&str>, sequent: Sequent) {
        let name = match name {
            Some(n) => n.to_string(),
            None => self.next_axiom_name(),
        };
        self.axioms.push(Axiom { name, sequent });
    }

    fn next_axiom_name(&self) -> String {
        let mut i = self.axioms.len() + 1;
        loop {
            let candidate = format!("ax{i}");
            if self.axioms.iter().all(|a| a.name != candidate) {
                return candidate;
            }
            i += 1;
        }
    }

    pub fn is_geometric(&self) -> bool {
        self.axioms.iter().all(|a| {
            a.sequent.premise.is_geometric() && a.sequent.conclusion.is_geometric()
        })
    }

    /// Axioms plus scheme instances up to `bound` (capped by each scheme's own bound).
    pub fn instantiate(&self, bound: usize) -> Vec<Axiom> {
        let mut out = self.axioms.clone();
        for s in &self.schemes {
            out.extend(s.instances(&self.signature, bound.min(s.bound)));
        }
        out
    }

    /// True when some scheme declares a larger bound than `bound`.
    pub fn schemes_truncated_at(&self, bound: usize) -> bool {
        self.schemes.iter().any(|s| s.bound > bound)
    }
}

/// Which connectives and term forms a check admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Geometric,
    Classical,
    Functional,
}

/// Checks that `f` is well-sorted in `ctx` over `sig`. Parameters are typed by
/// `params`; any parameter not in the map is an error.
pub fn check_formula(
    sig: &Signature,
    ctx: &Context,
    f: &Formula,
    params: &BTreeMap<String, String>,
    mode: Mode,
) -> Result<()> {
    let mut scope: Vec<(String, String)> = ctx.vars.clone();
    check_rec(sig, &mut scope, f, params, mode)
}

pub(crate) fn check_sequent(sig: &Signature, s: &Sequent, mode: Mode) -> Result<()> {
    for (v, sort) in &s.context.vars {
        if sig.sort_id(sort).is_none() {
            return Err(Error::sort(v.clone(), format!("undeclared sort `{sort}`")));
        }
    }
    Context::new(s.context.vars.clone())?;
    let none = BTreeMap::new();
    check_formula(sig, &s.context, &s.premise, &none, mode)?;
    check_formula(sig, &s.context, &s.conclusion, &none, mode)
}

fn term_sort(
    sig: &Signature,
    scope: &[(String, String)],
    t: &Term,
    params: &BTreeMap<String, String>,
    mode: Mode,
) -> Result<String> {
    match t {
        Term::Var(v) => scope
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|(_, s)| s.clone())
            .ok_or_else(|| Error::sort(v.clone(), "variable not in context")),
        Term::Param(p) => params
            .get(p)
            .cloned()
            .ok_or_else(|| Error::UnknownParameter(p.clone())),
        Term::App(f, args) => {
            if mode != Mode::Functional {
                return Err(Error::sort(
                    f.clone(),
                    "function terms are only accepted by relationalize",
                ));
            }
            let (_, sym) = sig
                .function(f)
                .ok_or_else(|| Error::UnknownSymbol(f.clone()))?;
            if sym.args.len() != args.len() {
                return Err(Error::sort(
                    f.clone(),
                    format!("expects {} arguments, got {}", sym.args.len(), args.len()),
                ));
            }
            for (a, &want) in args.iter().zip(&sym.args) {
                let got = term_sort(sig, scope, a, params, mode)?;
                if got != sig.sort_name(want) {
                    return Err(Error::sort(
                        f.clone(),
                        format!("argument of sort `{got}` where `{}` expected", sig.sort_name(want)),
                    ));
                }
            }
            Ok(sig.sort_name(sym.result).to_string())
        }
    }
}

fn check_rec(
    sig: &Signature,
    scope: &mut Vec<(String, String)>,
    f: &Formula,
    params: &BTreeMap<String, String>,
    mode: Mode,
) -> Result<()> {
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Rel(r, args) => {
            let (_, sym) = sig
                .relation(r)
                .ok_or_else(|| Error::UnknownSymbol(r.clone()))?;
            if sym.arity.len() != args.len() {
                return Err(Error::sort(
                    r.clone(),
                    format!("arity {} but {} arguments given", sym.arity.len(), args.len()),
                ));
            }
            for (a, &want) in args.iter().zip(&sym.arity) {
                let got = term_sort(sig, scope, a, params, mode)?;
                if got != sig.sort_name(want) {
                    return Err(Error::sort(
                        r.clone(),
                        format!("argument of sort `{got}` where `{}` expected", sig.sort_name(want)),
                    ));
                }
            }
            Ok(())
        }
        Formula::Eq(a, b) => {
            let sa = term_sort(sig, scope, a, params, mode)?;
            let sb = term_sort(sig, scope, b, params, mode)?;
            if sa != sb {
                return Err(Error::sort(
                    "=",
                    format!("equality between sorts `{sa}` and `{sb}`"),
                ));
            }
            Ok(())
        }
        Formula::And(fs) | Formula::Or(fs) => {
            for g in fs {
                check_rec(sig, scope, g, params, mode)?;
            }
            Ok(())
        }
        Formula::Exists(bs, body) | Formula::Forall(bs, body) => {
            if matches!(f, Formula::Forall(..)) && mode != Mode::Classical {
                return Err(Error::Unsupported("`forall` outside classical input".into()));
            }
            for b in bs {
                if sig.sort_id(&b.sort).is_none() {
                    return Err(Error::sort(b.name.clone(), format!("undeclared sort `{}`", b.sort)));
                }
            }
            let depth = scope.len();
            scope.extend(bs.iter().map(|b| (b.name.clone(), b.sort.clone())));
            let r = check_rec(sig, scope, body, params, mode);
            scope.truncate(depth);
            r
        }
        Formula::Not(b) => {
            if mode != Mode::Classical {
                return Err(Error::Unsupported("negation outside classical input".into()));
            }
            check_rec(sig, scope, b, params, mode)
        }
        Formula::Implies(a, b) => {
            if mode != Mode::Classical {
                return Err(Error::Unsupported("implication outside classical input".into()));
            }
            check_rec(sig, scope, a, params, mode)?;
            check_rec(sig, scope, b, params, mode)
        }
    }
}

#[cfg(test)]
mod tests;
