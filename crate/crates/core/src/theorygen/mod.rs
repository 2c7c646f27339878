//! Theory synthesis from an indexed groupoid and diagnostics for atomic
//! theories.

mod atomic;

pub use atomic::{
    bouquet_decomposition, decidability_witness, default_sentence_pool, is_ultrahomogeneous, minimal_formula,
    BouquetComponent, Decomposition, DecidabilityWitness, Ultrahomogeneity,
};

use crate::definable::PointSpace;
use crate::error::{Error, Result};
use crate::groupoid::{Groupoid, Indexing};
use crate::semantics::{Compiled, TupleIter};
use crate::syntax::{print_formula, print_sequent, Binder, Context, Formula, Sequent, Signature, SortId, Term, Theory};
use fixedbitset::FixedBitSet;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

/// The base signature plus one relation per parameter tuple.
#[derive(Debug, Clone)]
pub struct ExtendedSignature {
    pub signature: Arc<Signature>,
    /// Base relation count; the added relations follow in `tuples` order.
    pub base_relations: usize,
    /// Added relation name and its parameter tuple.
    pub tuples: Vec<(String, Vec<usize>)>,
    pub bound: usize,
}

fn escape(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        match c {
            'Z' => out.push_str("ZZ"),
            c if c.is_ascii_alphanumeric() => out.push(c),
            c => out.push_str(&format!("Z{:x}Z", c as u32)),
        }
    }
    out
}

/// `R__m1_m2...` with each name escaped so that the encoding is injective.
pub fn tuple_relation_name(names: &[&str]) -> String {
    let parts: Vec<String> = names.iter().map(|n| escape(n)).collect();
    format!("R__{}", parts.join("_"))
}

/// Adds `R_m⃗` for every ordered parameter tuple (repeats allowed) of length
/// `1..=bound`, with arity the tuple's sort profile.
pub fn extend_signature(g: &Groupoid, ix: &Indexing, bound: usize) -> Result<ExtendedSignature> {
    if bound == 0 {
        return Err(Error::invalid("tuple bound must be at least 1"));
    }
    let base = g.signature();
    let mut sig: Signature = (**base).clone();
    let mut tuples = Vec::new();
    for len in 1..=bound {
        for t in TupleIter::new(vec![ix.len(); len]) {
            let names: Vec<&str> = t.iter().map(|&p| ix.name(p)).collect();
            let mut name = tuple_relation_name(&names);
            while sig.relation(&name).is_some() {
                name.push('\'');
            }
            let arity: Vec<&str> = t.iter().map(|&p| base.sort_name(ix.sort(p))).collect();
            sig.add_relation(&name, &arity)?;
            tuples.push((name, t));
        }
    }
    Ok(ExtendedSignature {
        signature: Arc::new(sig),
        base_relations: base.relations.len(),
        tuples,
        bound,
    })
}

/// Interprets each `R_m⃗` as the fibre of the orbit of `⟦x⃗ = m⃗⟧`; the
/// arrows are revalidated as isomorphisms of the extended structures.
pub fn interpret_extension(g: &Groupoid, ix: &Indexing, ext: &ExtendedSignature) -> Result<Groupoid> {
    let mut extra: Vec<Vec<Vec<Vec<usize>>>> = vec![Vec::new(); g.len()];
    for (_, t) in &ext.tuples {
        let d = crate::definable::tuple_definable(g, ix, t);
        let space = PointSpace::new(g, &d.context)?;
        let orbit = space.orbit(&space.to_bits(&d)?);
        let mut per_object = vec![Vec::new(); g.len()];
        for i in orbit.ones() {
            per_object[space.object_of(i)].push(space.tuple_of(i));
        }
        for (o, rows) in per_object.into_iter().enumerate() {
            extra[o].push(rows);
        }
    }
    let objects = g
        .objects()
        .iter()
        .zip(extra)
        .map(|(m, e)| m.over(ext.signature.clone(), e))
        .collect::<Result<Vec<_>>>()?;
    Groupoid::with_signature(ext.signature.clone(), objects, g.arrows().to_vec(), false)
}

/// Bounds on the sequents considered by [`theory_of_groupoid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthesisBounds {
    /// Context variables.
    pub vars: usize,
    /// Atoms conjoined in a premise.
    pub premise_atoms: usize,
    /// Disjuncts in a conclusion.
    pub conclusion_atoms: usize,
    /// Allow `∃w. atom` disjuncts in conclusions.
    pub exists: bool,
    /// Give up once more axioms than this would be emitted.
    pub max_axioms: usize,
}

impl Default for SynthesisBounds {
    fn default() -> Self {
        SynthesisBounds {
            vars: 2,
            premise_atoms: 2,
            conclusion_atoms: 2,
            exists: true,
            max_axioms: 20_000,
        }
    }
}

const VAR_NAMES: [&str; 5] = ["x", "y", "z", "u", "v"];
const BOUND_VAR: &str = "w";

struct Literal {
    formula: Formula,
    ext: FixedBitSet,
    vars: BTreeSet<usize>,
    /// Premise literals obtained by substituting a context variable for the
    /// bound one; a conclusion containing any of them is trivial.
    instances: Vec<usize>,
}

fn atoms_over(sig: &Signature, sorts: &[SortId], bound: Option<SortId>) -> Vec<(Formula, BTreeSet<usize>)> {
    let n = sorts.len();
    let mut out = Vec::new();
    for sym in &sig.relations {
        let choices: Vec<Vec<Option<usize>>> = sym
            .arity
            .iter()
            .map(|&s| {
                let mut c: Vec<Option<usize>> = (0..n).filter(|&i| sorts[i] == s).map(Some).collect();
                if bound == Some(s) {
                    c.push(None);
                }
                c
            })
            .collect();
        for pick in TupleIter::new(choices.iter().map(Vec::len).collect()) {
            let slots: Vec<Option<usize>> = pick.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
            let uses_bound = slots.iter().any(Option::is_none);
            if bound.is_some() != uses_bound {
                continue;
            }
            let args = slots
                .iter()
                .map(|s| match s {
                    Some(i) => Term::var(VAR_NAMES[*i]),
                    None => Term::var(BOUND_VAR),
                })
                .collect();
            let mut f = Formula::Rel(sym.name.clone(), args);
            if let Some(b) = bound {
                f = Formula::exists(vec![Binder::new(BOUND_VAR, sig.sort_name(b))], f);
            }
            out.push((f, slots.iter().flatten().copied().collect()));
        }
    }
    out
}

fn substitute_bound(f: &Formula, var: &str) -> Option<Formula> {
    match f {
        Formula::Exists(_, body) => match &**body {
            Formula::Rel(r, args) => Some(Formula::Rel(
                r.clone(),
                args.iter()
                    .map(|t| if *t == Term::var(BOUND_VAR) { Term::var(var) } else { t.clone() })
                    .collect(),
            )),
            _ => None,
        },
        _ => None,
    }
}

fn rename_vars(f: &Formula, perm: &[usize]) -> Formula {
    let rename = |t: &Term| match t {
        Term::Var(v) => match VAR_NAMES.iter().position(|n| n == v) {
            Some(i) => Term::var(VAR_NAMES[perm[i]]),
            None => t.clone(),
        },
        other => other.clone(),
    };
    match f {
        Formula::Rel(r, args) => Formula::Rel(r.clone(), args.iter().map(rename).collect()),
        Formula::Eq(a, b) => Formula::Eq(rename(a), rename(b)),
        Formula::And(ps) => Formula::And(ps.iter().map(|p| rename_vars(p, perm)).collect()),
        Formula::Or(ps) => Formula::Or(ps.iter().map(|p| rename_vars(p, perm)).collect()),
        Formula::Exists(bs, body) => Formula::Exists(bs.clone(), Box::new(rename_vars(body, perm))),
        other => other.clone(),
    }
}

fn sorted_parts(f: Formula, and: bool) -> Formula {
    match f {
        Formula::And(mut ps) if and => {
            ps.sort();
            Formula::And(ps)
        }
        Formula::Or(mut ps) if !and => {
            ps.sort();
            Formula::Or(ps)
        }
        other => other,
    }
}

/// Printed form of a sequent minimized over sort-preserving renamings of
/// the context variables.
fn canonical_key(ctx: &Context, premise: &Formula, conclusion: &Formula, sorts: &[SortId]) -> String {
    let n = sorts.len();
    let mut best: Option<String> = None;
    for perm in TupleIter::new(vec![n; n]) {
        let distinct: BTreeSet<usize> = perm.iter().copied().collect();
        if distinct.len() != n || (0..n).any(|i| sorts[perm[i]] != sorts[i]) {
            continue;
        }
        let p = sorted_parts(rename_vars(premise, &perm), true);
        let c = sorted_parts(rename_vars(conclusion, &perm), false);
        let s = print_sequent(&Sequent::new(ctx.clone(), p, c));
        if best.as_ref().is_none_or(|b| s < *b) {
            best = Some(s);
        }
    }
    best.unwrap_or_default()
}

/// The extended signature, the groupoid interpreting it and its theory.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub extension: ExtendedSignature,
    pub groupoid: Groupoid,
    pub theory: Theory,
}

/// [`extend_signature`], [`interpret_extension`] and [`theory_of_groupoid`]
/// in sequence.
pub fn synthesize(g: &Groupoid, ix: &Indexing, tuple_bound: usize, bounds: &SynthesisBounds) -> Result<Synthesis> {
    let extension = extend_signature(g, ix, tuple_bound)?;
    let groupoid = interpret_extension(g, ix, &extension)?;
    let theory = theory_of_groupoid(&groupoid, bounds)?;
    Ok(Synthesis {
        extension,
        groupoid,
        theory,
    })
}

/// Nondecreasing sort profiles of length `n`.
fn profiles(sorts: usize, n: usize) -> Vec<Vec<SortId>> {
    TupleIter::new(vec![sorts; n]).filter(|p| p.windows(2).all(|w| w[0] <= w[1])).collect()
}

/// A kept sequent as literal sets over the variables of its sort profile.
struct Kept {
    sorts: Vec<SortId>,
    premise: Vec<Formula>,
    conclusion: Vec<Formula>,
}

impl Kept {
    /// Some renaming of this sequent's variables into `sorts` turns its
    /// premise into a subset of `premise` and its conclusion into a subset
    /// of `conclusion`.
    fn subsumes(&self, sorts: &[SortId], premise: &[Formula], conclusion: &[Formula]) -> bool {
        let (m, n) = (self.sorts.len(), sorts.len());
        if m > n {
            return false;
        }
        TupleIter::new(vec![n; m]).any(|inj| {
            let distinct: BTreeSet<usize> = inj.iter().copied().collect();
            distinct.len() == m
                && (0..m).all(|i| sorts[inj[i]] == self.sorts[i])
                && self.premise.iter().all(|f| premise.contains(&rename_vars(f, &inj)))
                && self.conclusion.iter().all(|f| conclusion.contains(&rename_vars(f, &inj)))
        })
    }
}

/// Kept sequents bucketed by the variable-free shapes of their conclusion
/// literals, so that only buckets whose shapes occur in a candidate's
/// conclusion need a full check.
#[derive(Default)]
struct KeptIndex {
    buckets: HashMap<Vec<String>, Vec<Kept>>,
}

fn shape(f: &Formula) -> String {
    print_formula(&rename_vars(f, &[0; VAR_NAMES.len()]))
}

impl KeptIndex {
    fn insert(&mut self, k: Kept) {
        let mut key: Vec<String> = k.conclusion.iter().map(shape).collect();
        key.sort();
        key.dedup();
        self.buckets.entry(key).or_default().push(k);
    }

    fn subsumes(&self, sorts: &[SortId], premise: &[Formula], conclusion: &[Formula]) -> bool {
        let mut shapes: Vec<String> = conclusion.iter().map(shape).collect();
        shapes.sort();
        shapes.dedup();
        (0u32..1 << shapes.len()).any(|mask| {
            let key: Vec<String> = (0..shapes.len()).filter(|i| mask >> i & 1 == 1).map(|i| shapes[i].clone()).collect();
            self.buckets
                .get(&key)
                .is_some_and(|ks| ks.iter().any(|k| k.subsumes(sorts, premise, conclusion)))
        })
    }
}

/// Every sequent within `bounds` valid in all objects of `g`, keeping for
/// each premise only its minimal valid conclusions and dropping sequents
/// subsumed by a kept one (after renaming variables, a smaller premise and a
/// smaller conclusion, possibly in fewer variables).
pub fn theory_of_groupoid(g: &Groupoid, bounds: &SynthesisBounds) -> Result<Theory> {
    let sig = g.signature().clone();
    let mut theory = Theory::new((*sig).clone());
    if bounds.vars > VAR_NAMES.len() {
        return Err(Error::invalid(format!("at most {} context variables", VAR_NAMES.len())));
    }
    let mut seen: HashSet<String> = HashSet::new();
    let mut kept = KeptIndex::default();
    for n in 0..=bounds.vars {
        for profile in profiles(sig.sorts.len(), n) {
            let names: Vec<&str> = profile.iter().map(|&s| sig.sort_name(s)).collect();
            let ctx = Context::new(
                (0..n).map(|i| (VAR_NAMES[i].to_string(), names[i].to_string())).collect(),
            )?;
            synthesize_context(g, &sig, &ctx, &profile, bounds, &mut theory, &mut seen, &mut kept)?;
        }
    }
    Ok(theory)
}

#[allow(clippy::too_many_arguments)]
fn synthesize_context(
    g: &Groupoid,
    sig: &Arc<Signature>,
    ctx: &Context,
    profile: &[SortId],
    bounds: &SynthesisBounds,
    theory: &mut Theory,
    seen: &mut HashSet<String>,
    global: &mut KeptIndex,
) -> Result<()> {
    let n = profile.len();
    let space = PointSpace::new(g, ctx)?;
    let extension = |f: &Formula| -> Result<FixedBitSet> {
        let c = Compiled::new(sig, ctx, f)?;
        let mut bits = space.empty_set();
        for o in 0..g.len() {
            for t in c.extension(g.object(o), &[]) {
                bits.insert(space.index_of(o, &t));
            }
        }
        Ok(bits)
    };
    let mut lits: Vec<Literal> = Vec::new();
    for (f, vars) in atoms_over(sig, profile, None) {
        lits.push(Literal {
            ext: extension(&f)?,
            formula: f,
            vars,
            instances: Vec::new(),
        });
    }
    let premise_lits = lits.len();
    for i in 0..n {
        for j in i + 1..n {
            if profile[i] == profile[j] {
                let f = Formula::eq_vars(VAR_NAMES[i], VAR_NAMES[j]);
                lits.push(Literal {
                    ext: extension(&f)?,
                    formula: f,
                    vars: [i, j].into(),
                    instances: Vec::new(),
                });
            }
        }
    }
    if bounds.exists {
        for s in 0..sig.sorts.len() {
            for (f, vars) in atoms_over(sig, profile, Some(s)) {
                let instances = (0..n)
                    .filter(|&i| profile[i] == s)
                    .filter_map(|i| {
                        let inst = substitute_bound(&f, VAR_NAMES[i])?;
                        lits[..premise_lits].iter().position(|l| l.formula == inst)
                    })
                    .collect();
                lits.push(Literal {
                    ext: extension(&f)?,
                    formula: f,
                    vars,
                    instances,
                });
            }
        }
    }

    let full = space.full_set();
    let mut kept: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for size in 0..=bounds.premise_atoms.min(premise_lits) {
        let premises: Vec<Vec<usize>> = if size == 0 {
            vec![Vec::new()]
        } else {
            TupleIter::new(vec![premise_lits; size])
                .filter(|p| p.windows(2).all(|w| w[0] < w[1]))
                .collect()
        };
        for premise in premises {
            let mut ext = full.clone();
            for &i in &premise {
                ext.intersect_with(&lits[i].ext);
            }
            let candidates: Vec<usize> = (0..lits.len())
                .filter(|&i| {
                    !premise.contains(&i)
                        && !lits[i].instances.iter().any(|k| premise.contains(k))
                        && !lits[i].ext.is_disjoint(&ext)
                })
                .collect();
            let mut minimal: Vec<Vec<usize>> = Vec::new();
            if ext.is_clear() {
                minimal.push(Vec::new());
            } else {
                for k in 1..=bounds.conclusion_atoms {
                    for pick in TupleIter::new(vec![candidates.len(); k]) {
                        if !pick.windows(2).all(|w| w[0] < w[1]) {
                            continue;
                        }
                        let concl: Vec<usize> = pick.iter().map(|&i| candidates[i]).collect();
                        if minimal.iter().any(|m| m.iter().all(|x| concl.contains(x))) {
                            continue;
                        }
                        let mut cover = space.empty_set();
                        for &i in &concl {
                            cover.union_with(&lits[i].ext);
                        }
                        if ext.is_subset(&cover) {
                            minimal.push(concl);
                        }
                    }
                }
            }
            for concl in minimal {
                let used: BTreeSet<usize> =
                    premise.iter().chain(&concl).flat_map(|&i| lits[i].vars.iter().copied()).collect();
                if used.len() != n {
                    continue;
                }
                let subsumed = kept.iter().any(|(p, c)| {
                    p.iter().all(|x| premise.contains(x)) && c.iter().all(|x| concl.contains(x))
                });
                if subsumed {
                    continue;
                }
                let ps: Vec<Formula> = premise.iter().map(|&i| lits[i].formula.clone()).collect();
                let cs: Vec<Formula> = concl.iter().map(|&i| lits[i].formula.clone()).collect();
                if global.subsumes(profile, &ps, &cs) {
                    continue;
                }
                kept.push((premise.clone(), concl));
                global.insert(Kept {
                    sorts: profile.to_vec(),
                    premise: ps.clone(),
                    conclusion: cs.clone(),
                });
                let (p, c) = (Formula::and(ps), Formula::or(cs));
                let key = canonical_key(ctx, &p, &c, profile);
                if !seen.insert(key) {
                    continue;
                }
                if theory.axioms.len() >= bounds.max_axioms {
                    return Err(Error::cap("synthesized axioms", theory.axioms.len() + 1, bounds.max_axioms));
                }
                theory.add_axiom(None, Sequent::new(ctx.clone(), p, c))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
