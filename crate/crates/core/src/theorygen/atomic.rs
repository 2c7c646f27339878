use crate::definable::{HomCache, PointSpace};
use crate::elimination::{is_pf_definable, FormulaPool};
use crate::error::{Error, Result};
use crate::groupoid::{Groupoid, Indexing};
use crate::semantics::{
    canonical_query, check_partial_iso, definable, enumerate_isos, eval, extend_partial_iso, DefinableSet,
    Structure,
};
use crate::syntax::{Context, Formula, SortId};

/// The canonical query of `⟨n⃗, M⟩` when it is a minimal formula: every
/// tuple satisfying it is hom-equivalent to `n⃗` (so has the same type over
/// the family) and every pool formula in the same context either contains
/// or misses its extension.
pub fn minimal_formula(
    g: &Groupoid,
    object: usize,
    tuple: &[usize],
    ctx: &Context,
    pool: &FormulaPool,
) -> Result<Option<Formula>> {
    let sorts = ctx.sort_ids(g.signature())?;
    let candidate = canonical_query(g.object(object), tuple, ctx)?;
    let space = PointSpace::new(g, ctx)?;
    let ext = space.to_bits(&definable(&candidate, ctx, g.objects())?)?;
    let p = space.index_of(object, tuple);
    let mut cache = HomCache::new(&space);
    if !ext.ones().all(|q| cache.leq(q, p)) {
        return Ok(None);
    }
    for entry in &pool.entries {
        if entry.context.sort_ids(g.signature()).ok().as_deref() != Some(sorts.as_slice()) {
            continue;
        }
        let d = definable(&entry.formula, &entry.context, g.objects())?;
        let d = space.to_bits(&DefinableSet::new(ctx.clone(), d.members))?;
        if !ext.is_subset(&d) && !ext.is_disjoint(&d) {
            return Ok(None);
        }
    }
    Ok(Some(candidate))
}

/// Outcome of [`is_ultrahomogeneous`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ultrahomogeneity {
    pub ultrahomogeneous: bool,
    /// First partial isomorphism (by domain size, then lexicographically)
    /// with no extension to an automorphism.
    pub witness: Option<Vec<(SortId, usize, usize)>>,
    pub checked: usize,
}

/// Tries every partial isomorphism of `m` against [`extend_partial_iso`].
pub fn is_ultrahomogeneous(m: &Structure) -> Result<Ultrahomogeneity> {
    let elems: Vec<(SortId, usize)> = (0..m.signature().sorts.len())
        .flat_map(|s| (0..m.size(s)).map(move |e| (s, e)))
        .collect();
    let mut checked = 0;
    for size in 1..=elems.len() {
        let mut found = None;
        for_each_subset(elems.len(), size, &mut |dom| {
            for_each_injection(&elems, dom, &mut |pairs| {
                if check_partial_iso(m, pairs).is_err() {
                    return true;
                }
                checked += 1;
                match extend_partial_iso(m, pairs) {
                    Ok(Some(_)) => true,
                    _ => {
                        found = Some(pairs.to_vec());
                        false
                    }
                }
            })
        });
        if found.is_some() {
            return Ok(Ultrahomogeneity {
                ultrahomogeneous: false,
                witness: found,
                checked,
            });
        }
    }
    Ok(Ultrahomogeneity {
        ultrahomogeneous: true,
        witness: None,
        checked,
    })
}

type Visit<'a, T> = &'a mut dyn FnMut(&[T]) -> bool;

fn for_each_subset(n: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..n {
            cur.push(i);
            if !go(i + 1, n, k, cur, f) {
                return false;
            }
            cur.pop();
        }
        true
    }
    go(0, n, k, &mut Vec::new(), f)
}

/// Sort-preserving injections from `dom` into `elems`.
fn for_each_injection(
    elems: &[(SortId, usize)],
    dom: &[usize],
    f: Visit<'_, (SortId, usize, usize)>,
) -> bool {
    fn go(
        elems: &[(SortId, usize)],
        dom: &[usize],
        used: &mut Vec<bool>,
        cur: &mut Vec<(SortId, usize, usize)>,
        f: Visit<'_, (SortId, usize, usize)>,
    ) -> bool {
        if cur.len() == dom.len() {
            return f(cur);
        }
        let (s, a) = elems[dom[cur.len()]];
        for (j, &(t, b)) in elems.iter().enumerate() {
            if t != s || used[j] {
                continue;
            }
            used[j] = true;
            cur.push((s, a, b));
            let go_on = go(elems, dom, used, cur, f);
            cur.pop();
            used[j] = false;
            if !go_on {
                return false;
            }
        }
        true
    }
    go(elems, dom, &mut vec![false; elems.len()], &mut Vec::new(), f)
}

/// The complement of the diagonal assembled from distinct parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecidabilityWitness {
    pub set: DefinableSet,
    /// A parameter-free formula for `set`, when one exists.
    pub formula: Option<Formula>,
}

/// Builds `C = ⋃_{m≠m'} ⟦x = m ∧ x' = m'⟧` in the two-variable context `c`
/// and returns it when it is stable and exactly complements `⟦x = x'⟧`.
pub fn decidability_witness(g: &Groupoid, ix: &Indexing, c: &Context) -> Result<Option<DecidabilityWitness>> {
    let sorts = c.sort_ids(g.signature())?;
    if sorts.len() != 2 || sorts[0] != sorts[1] {
        return Err(Error::invalid("context must have two variables of one sort"));
    }
    let s = sorts[0];
    let space = PointSpace::new(g, c)?;
    let mut set = space.empty_set();
    let params: Vec<usize> = (0..ix.len()).filter(|&p| ix.sort(p) == s).collect();
    for &m in &params {
        for &n in &params {
            if m == n {
                continue;
            }
            for o in ix.objects_interpreting(&[m, n]) {
                let t = ix.tuple(o, &[m, n]).expect("interpreted");
                set.insert(space.index_of(o, &t));
            }
        }
    }
    if !space.is_stable(&set) {
        return Ok(None);
    }
    let diag = space.to_bits(&definable(&Formula::eq_vars(&names(c)[0], &names(c)[1]), c, g.objects())?)?;
    if !set.is_disjoint(&diag) {
        return Ok(None);
    }
    let mut union = set.clone();
    union.union_with(&diag);
    if union != space.full_set() {
        return Ok(None);
    }
    let set = space.to_definable(&set);
    let formula = is_pf_definable(&set, g)?;
    Ok(Some(DecidabilityWitness { set, formula }))
}

fn names(c: &Context) -> Vec<String> {
    c.names().map(str::to_string).collect()
}

/// One connected component with its isolating sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BouquetComponent {
    pub objects: Vec<usize>,
    /// Automorphism group order of the component's first object.
    pub group_order: usize,
    pub sentence: Formula,
}

/// Outcome of [`bouquet_decomposition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decomposition {
    Found(Vec<BouquetComponent>),
    /// Isomorphic objects lying in different components.
    CrossIso { left: usize, right: usize },
    /// No pool sentence isolates this component.
    PoolExhausted { component: Vec<usize> },
}

/// `⊤`, every nullary relation, and the canonical-query sentence of each
/// object.
pub fn default_sentence_pool(g: &Groupoid) -> Result<Vec<Formula>> {
    let mut pool = vec![Formula::True];
    for r in g.signature().relations.iter().filter(|r| r.arity.is_empty()) {
        pool.push(Formula::Rel(r.name.clone(), Vec::new()));
    }
    for m in g.objects() {
        let q = canonical_query(m, &[], &Context::empty())?;
        if !pool.contains(&q) {
            pool.push(q);
        }
    }
    Ok(pool)
}

/// Splits `g` into components and isolates each with a sentence from `pool`
/// true in exactly that component's objects.
pub fn bouquet_decomposition(g: &Groupoid, pool: &[Formula]) -> Result<Decomposition> {
    let comps = g.components();
    let mut comp_of = vec![0; g.len()];
    for (k, c) in comps.iter().enumerate() {
        c.iter().for_each(|&o| comp_of[o] = k);
    }
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            if comp_of[i] != comp_of[j] && !enumerate_isos(g.object(i), g.object(j)).is_empty() {
                return Ok(Decomposition::CrossIso { left: i, right: j });
            }
        }
    }
    let empty = Context::empty();
    let truth: Vec<Vec<bool>> = pool
        .iter()
        .map(|f| g.objects().iter().map(|m| eval(f, &empty, m, &[])).collect())
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (k, comp) in comps.iter().enumerate() {
        let hit = truth
            .iter()
            .position(|row| (0..g.len()).all(|o| row[o] == (comp_of[o] == k)));
        match hit {
            Some(i) => out.push(BouquetComponent {
                objects: comp.clone(),
                group_order: g.hom(comp[0], comp[0]).len(),
                sentence: pool[i].clone(),
            }),
            None => {
                return Ok(Decomposition::PoolExhausted {
                    component: comp.clone(),
                })
            }
        }
    }
    Ok(Decomposition::Found(out))
}

