//! Elimination of parameters and bounded conservativity, decided with
//! certificates: synthesized formulas for positive answers, witness pairs
//! or countermodels for negative ones.

use crate::definable::{tuple_definable, upper_bound_formula, HomCache, PointSpace};
use crate::error::{Error, Result};
use crate::groupoid::{Groupoid, Indexing};
use crate::semantics::{
    canonical_query, default_carriers, for_each_structure, interpretation_count, Compiled, CompiledTheory,
    DefinableSet, Point, Structure, TheoryCheck, TupleIter,
};
use crate::syntax::{Binder, Context, Formula, Signature, Term, Theory};
use fixedbitset::FixedBitSet;
use std::sync::Arc;

/// A point of the orbit and a point outside it lying hom-above the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub inside: Point,
    pub outside: Point,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElimEntry {
    /// Parameter indices, sorted with repeats kept.
    pub tuple: Vec<usize>,
    pub names: Vec<String>,
    pub context: Context,
    pub orbit: DefinableSet,
    pub upper_bound: Formula,
    pub eliminates: bool,
    pub formula: Option<Formula>,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElimVerdict {
    pub eliminates: bool,
    /// Largest tuple length examined; a positive verdict holds up to it.
    pub bound: usize,
    pub entries: Vec<ElimEntry>,
    /// Tuples skipped because no object interprets them.
    pub uninterpreted: usize,
}

impl ElimVerdict {
    pub fn first_failure(&self) -> Option<&ElimEntry> {
        self.entries.iter().find(|e| !e.eliminates)
    }
}

/// Disjunction of the canonical queries of the hom-minimal members of an
/// up-closed set; `⊤` for the whole space and `⊥` for the empty set.
pub(crate) fn synthesize(cache: &mut HomCache<'_, '_>, bits: &FixedBitSet) -> Result<Formula> {
    let space = cache.space();
    if bits.count_ones(..) == space.len() && !space.is_empty() {
        return Ok(Formula::True);
    }
    let g = space.groupoid();
    let ctx = space.context().clone();
    let mut parts = Vec::new();
    for p in cache.minimal_points(bits) {
        let (o, t) = (space.object_of(p), space.tuple_of(p));
        parts.push(canonical_query(g.object(o), &t, &ctx)?);
    }
    Ok(Formula::or(parts))
}

/// Decides whether the orbit of `⟦x⃗ = m⃗⟧` is parameter-free definable,
/// i.e. up-closed under the hom-preorder of the objects.
pub fn eliminates_at_tuple(g: &Groupoid, ix: &Indexing, tuple: &[usize]) -> Result<ElimEntry> {
    if tuple.is_empty() {
        return Err(Error::invalid("parameter tuple must be nonempty"));
    }
    if let Some(&p) = tuple.iter().find(|&&p| p >= ix.len()) {
        return Err(Error::UnknownParameter(format!("#{p}")));
    }
    let names: Vec<String> = tuple.iter().map(|&p| ix.name(p).to_string()).collect();
    if ix.objects_interpreting(tuple).is_empty() {
        return Err(Error::invalid(format!(
            "tuple ({}) is not interpreted in any object",
            names.join(", ")
        )));
    }
    let d = tuple_definable(g, ix, tuple);
    let space = PointSpace::new(g, &d.context)?;
    let bits = space.orbit(&space.to_bits(&d)?);
    let mut cache = HomCache::new(&space);
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let upper_bound = upper_bound_formula(&name_refs, &d.context);
    let (formula, witness) = match cache.up_closure_violation(&bits) {
        None => (Some(synthesize(&mut cache, &bits)?), None),
        Some((p, q)) => (
            None,
            Some(Witness {
                inside: space.point(p),
                outside: space.point(q),
            }),
        ),
    };
    Ok(ElimEntry {
        tuple: tuple.to_vec(),
        names,
        context: d.context.clone(),
        orbit: space.to_definable(&bits),
        upper_bound,
        eliminates: witness.is_none(),
        formula,
        witness,
    })
}

/// Nondecreasing sequences over `0..n` of lengths `1..=max_len`.
pub fn canonical_tuples(n: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(n: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let start = cur.last().copied().unwrap_or(0);
        for p in start..n {
            cur.push(p);
            go(n, len, cur, out);
            cur.pop();
        }
    }
    for len in 1..=max_len {
        go(n, len, &mut Vec::new(), &mut out);
    }
    out
}

/// Runs [`eliminates_at_tuple`] on every interpreted canonical tuple of
/// length at most `max_tuple_len`.
pub fn eliminates_parameters(g: &Groupoid, ix: &Indexing, max_tuple_len: usize) -> Result<ElimVerdict> {
    if max_tuple_len == 0 {
        return Err(Error::invalid("tuple bound must be at least 1"));
    }
    let mut entries = Vec::new();
    let mut uninterpreted = 0;
    for t in canonical_tuples(ix.len(), max_tuple_len) {
        if ix.objects_interpreting(&t).is_empty() {
            uninterpreted += 1;
            continue;
        }
        entries.push(eliminates_at_tuple(g, ix, &t)?);
    }
    Ok(ElimVerdict {
        eliminates: entries.iter().all(|e| e.eliminates),
        bound: max_tuple_len,
        entries,
        uninterpreted,
    })
}

/// A parameter-free formula whose extension over the objects is exactly `d`.
pub fn is_pf_definable(d: &DefinableSet, g: &Groupoid) -> Result<Option<Formula>> {
    let space = PointSpace::new(g, &d.context)?;
    let bits = space.to_bits(d)?;
    let mut cache = HomCache::new(&space);
    if !cache.is_up_closed(&bits) {
        return Ok(None);
    }
    synthesize(&mut cache, &bits).map(Some)
}

/// A formula in context, one entry of a conservativity pool.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolEntry {
    pub context: Context,
    pub formula: Formula,
}

/// Formulas compared pairwise (within a shared context) by
/// [`conservative_at_level`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FormulaPool {
    pub entries: Vec<PoolEntry>,
}

impl FormulaPool {
    pub fn new(entries: Vec<PoolEntry>) -> Self {
        FormulaPool { entries }
    }

    /// For every context `x1..xn` (`n ≤ max_vars`, every sort profile):
    /// `⊤`, `⊥`, all equalities and relation atoms over the variables, and,
    /// with `exists_closures`, each atom with one slot bound by `∃y`.
    pub fn atomic(sig: &Signature, max_vars: usize, exists_closures: bool) -> Self {
        let mut entries = Vec::new();
        for n in 0..=max_vars {
            for profile in TupleIter::new(vec![sig.sorts.len(); n]) {
                let sorts: Vec<&str> = profile.iter().map(|&s| sig.sort_name(s)).collect();
                let ctx = Context::numbered("x", &sorts);
                let vars: Vec<&str> = ctx.names().collect();
                let mut fs = vec![Formula::True, Formula::False];
                for i in 0..n {
                    for j in i + 1..n {
                        if profile[i] == profile[j] {
                            fs.push(Formula::eq_vars(vars[i], vars[j]));
                        }
                    }
                }
                for sym in &sig.relations {
                    let choices: Vec<Vec<usize>> = sym
                        .arity
                        .iter()
                        .map(|&s| (0..n).filter(|&i| profile[i] == s).collect())
                        .collect();
                    let sizes: Vec<usize> = choices.iter().map(Vec::len).collect();
                    for pick in TupleIter::new(sizes) {
                        let args: Vec<&str> = pick.iter().zip(&choices).map(|(&k, c)| vars[c[k]]).collect();
                        fs.push(Formula::rel(&sym.name, &args));
                    }
                    if exists_closures {
                        for slot in 0..sym.arity.len() {
                            let mut sizes: Vec<usize> = choices.iter().map(Vec::len).collect();
                            sizes[slot] = 1;
                            for pick in TupleIter::new(sizes) {
                                let args: Vec<Term> = (0..sym.arity.len())
                                    .map(|k| {
                                        if k == slot {
                                            Term::var("y")
                                        } else {
                                            Term::var(vars[choices[k][pick[k]]])
                                        }
                                    })
                                    .collect();
                                let binder = Binder::new("y", sig.sort_name(sym.arity[slot]));
                                fs.push(Formula::exists(vec![binder], Formula::Rel(sym.name.clone(), args)));
                            }
                        }
                    }
                }
                fs.dedup();
                entries.extend(fs.into_iter().map(|formula| PoolEntry {
                    context: ctx.clone(),
                    formula,
                }));
            }
        }
        FormulaPool { entries }
    }
}

/// A pool containment valid over the objects but refuted by a small model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Countermodel {
    pub context: Context,
    pub premise: Formula,
    pub conclusion: Formula,
    pub model: Structure,
    pub tuple: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConservativityVerdict {
    /// Every object satisfies the theory and no countermodel was found.
    pub conservative: bool,
    pub size_bound: usize,
    pub scheme_bound: usize,
    pub schemes_inconclusive: bool,
    /// Objects failing the theory, with their check results.
    pub object_failures: Vec<(String, TheoryCheck)>,
    /// Pool containments valid over the objects.
    pub containments: usize,
    pub models_checked: usize,
    pub countermodel: Option<Countermodel>,
}

/// Semantic stand-in for conservativity: every containment between pool
/// formulas that holds over the objects must hold in every model of `t`
/// with at most `size_bound` elements per sort.
pub fn conservative_at_level(
    g: &Groupoid,
    t: &Theory,
    pool: &FormulaPool,
    size_bound: usize,
    scheme_bound: usize,
    cap: usize,
) -> Result<ConservativityVerdict> {
    let sig: Arc<Signature> = g.signature().clone();
    let theory = CompiledTheory::new(&sig, t, scheme_bound)?;
    let mut verdict = ConservativityVerdict {
        conservative: false,
        size_bound,
        scheme_bound,
        schemes_inconclusive: theory.schemes_inconclusive,
        object_failures: Vec::new(),
        containments: 0,
        models_checked: 0,
        countermodel: None,
    };
    for m in g.objects() {
        let check = theory.check(m);
        if !check.holds {
            verdict.object_failures.push((m.id.clone(), check));
        }
    }
    if !verdict.object_failures.is_empty() {
        return Ok(verdict);
    }

    let compiled: Vec<Compiled> = pool
        .entries
        .iter()
        .map(|e| Compiled::new(&sig, &e.context, &e.formula))
        .collect::<Result<_>>()?;
    let extension = |i: usize, m: &Structure| -> Vec<Vec<usize>> { compiled[i].extension(m, &[]) };
    let mut pairs = Vec::new();
    for i in 0..pool.entries.len() {
        for j in 0..pool.entries.len() {
            if i == j || pool.entries[i].context != pool.entries[j].context {
                continue;
            }
            let holds = g.objects().iter().all(|m| {
                let ej = extension(j, m);
                extension(i, m).iter().all(|t| ej.binary_search(t).is_ok())
            });
            if holds {
                pairs.push((i, j));
            }
        }
    }
    verdict.containments = pairs.len();

    let mut total = 0usize;
    for sizes in TupleIter::new(vec![size_bound + 1; sig.sorts.len()]) {
        total = total.saturating_add(interpretation_count(&sig, &sizes));
    }
    if total > cap {
        return Err(Error::cap("models within the size bound", total, cap));
    }
    for sizes in TupleIter::new(vec![size_bound + 1; sig.sorts.len()]) {
        let carriers = default_carriers(&sig, &sizes);
        let mut found = None;
        for_each_structure(&sig, &carriers, "N", cap, |n| {
            if !theory.holds(&n) {
                return true;
            }
            verdict.models_checked += 1;
            for &(i, j) in &pairs {
                let ctx_sorts = pool.entries[i].context.sort_ids(&sig).unwrap_or_default();
                let c = &compiled[j];
                if let Some(t) = compiled[i].find(&n, &[], |t| !c.eval(&n, t, &[])) {
                    found = Some(Countermodel {
                        context: pool.entries[i].context.clone(),
                        premise: pool.entries[i].formula.clone(),
                        conclusion: pool.entries[j].formula.clone(),
                        tuple: n.show_tuple(&ctx_sorts, &t),
                        model: n,
                    });
                    return false;
                }
            }
            true
        })?;
        if found.is_some() {
            verdict.countermodel = found;
            return Ok(verdict);
        }
    }
    verdict.conservative = true;
    Ok(verdict)
}

#[cfg(test)]
mod tests;
