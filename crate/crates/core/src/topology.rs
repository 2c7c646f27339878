//! Logical topologies on objects and arrows, openness of the target map,
//! separation, the lattice of stable opens and étale-completeness checks.

use crate::definable::{HomCache, PointSpace};
use crate::error::{Error, Result};
use crate::groupoid::{Groupoid, Indexing, Morphism};
use crate::semantics::{enumerate_isos, Compiled, DefinableSet, ElemMap, Point, TupleIter};
use crate::syntax::{Binder, Context, Formula, Term};
use fixedbitset::FixedBitSet;
use std::collections::BTreeMap;

/// Default number of distinct parameters in a basic sentence.
pub const DEFAULT_MAX_PARAMS: usize = 2;

/// A basic open of objects: every sentence listed has this extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectOpen {
    pub sentences: Vec<Formula>,
    pub extension: FixedBitSet,
}

#[derive(Debug, Clone)]
pub struct ObjectBasis {
    pub opens: Vec<ObjectOpen>,
    pub max_params: usize,
    pub objects: usize,
}

impl ObjectBasis {
    /// Intersection of the basic opens containing object `o`.
    pub fn neighbourhood(&self, o: usize) -> FixedBitSet {
        let mut u = FixedBitSet::with_capacity(self.objects);
        u.insert_range(..);
        for b in &self.opens {
            if b.extension.contains(o) {
                u.intersect_with(&b.extension);
            }
        }
        u
    }

    /// Is `set` a union of finite intersections of basic opens?
    pub fn is_open(&self, set: &FixedBitSet) -> bool {
        set.ones().all(|o| self.neighbourhood(o).is_subset(set))
    }
}

/// `⊤`, equalities between parameters, and relation atoms whose slots are
/// parameters or existentially bound variables, using at most `max_params`
/// distinct parameters. Sentences with equal extensions share one open.
pub fn object_basis(g: &Groupoid, ix: &Indexing, max_params: usize) -> Result<ObjectBasis> {
    let sig = g.signature();
    let param_sorts = ix.param_sorts(g);
    let mut sentences = vec![Formula::True];
    for p in 0..ix.len() {
        for q in p..ix.len() {
            if ix.sort(p) == ix.sort(q) && if p == q { max_params >= 1 } else { max_params >= 2 } {
                sentences.push(Formula::Eq(Term::param(ix.name(p)), Term::param(ix.name(q))));
            }
        }
    }
    for sym in &sig.relations {
        // Slot choice 0 is a fresh bound variable; k > 0 is parameter k - 1.
        let choices: Vec<Vec<Option<usize>>> = sym
            .arity
            .iter()
            .map(|&s| std::iter::once(None).chain((0..ix.len()).filter(|&p| ix.sort(p) == s).map(Some)).collect())
            .collect();
        for pick in TupleIter::new(choices.iter().map(Vec::len).collect()) {
            let slots: Vec<Option<usize>> = pick.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
            let mut distinct: Vec<usize> = slots.iter().flatten().copied().collect();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() > max_params {
                continue;
            }
            let mut binders = Vec::new();
            let args = slots
                .iter()
                .zip(&sym.arity)
                .map(|(slot, &s)| match slot {
                    Some(p) => Term::param(ix.name(*p)),
                    None => {
                        let y = format!("y{}", binders.len() + 1);
                        binders.push(Binder::new(&y, sig.sort_name(s)));
                        Term::Var(y)
                    }
                })
                .collect();
            sentences.push(Formula::exists(binders, Formula::Rel(sym.name.clone(), args)));
        }
    }
    let empty = Context::empty();
    let mut by_ext: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut opens: Vec<ObjectOpen> = Vec::new();
    for f in sentences {
        let c = Compiled::with_params(sig, &empty, &f, &param_sorts)?;
        let ps: Vec<usize> = c.params().iter().map(|(p, _)| ix.param(p).expect("known parameter")).collect();
        let mut ext = FixedBitSet::with_capacity(g.len());
        for o in ix.objects_interpreting(&ps) {
            if c.eval(g.object(o), &[], &ix.tuple(o, &ps).unwrap()) {
                ext.insert(o);
            }
        }
        let key: Vec<usize> = ext.ones().collect();
        match by_ext.get(&key) {
            Some(&i) => opens[i].sentences.push(f),
            None => {
                by_ext.insert(key, opens.len());
                opens.push(ObjectOpen {
                    sentences: vec![f],
                    extension: ext,
                });
            }
        }
    }
    Ok(ObjectBasis {
        opens,
        max_params,
        objects: g.len(),
    })
}

/// A basic open of arrows: source in `source`, `α(b⃗) = c⃗` for the mapped
/// parameter pairs, target in `target` (indices into the object basis,
/// `None` for `⊤`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrowOpen {
    pub source: Option<usize>,
    pub mapping: Vec<(usize, usize)>,
    pub target: Option<usize>,
    pub extension: FixedBitSet,
}

#[derive(Debug, Clone)]
pub struct ArrowBasis {
    pub opens: Vec<ArrowOpen>,
    pub max_mapping: usize,
}

/// Every triple of (object open or `⊤`, parameter mapping of length at most
/// `max_mapping`, object open or `⊤`).
pub fn arrow_basis(g: &Groupoid, ix: &Indexing, objects: &ObjectBasis, max_mapping: usize) -> ArrowBasis {
    let arrows = g.arrows();
    let mut all = FixedBitSet::with_capacity(arrows.len());
    all.insert_range(..);
    let side = |pick_dst: bool| -> Vec<FixedBitSet> {
        objects
            .opens
            .iter()
            .map(|b| {
                let mut s = FixedBitSet::with_capacity(arrows.len());
                for (i, a) in arrows.iter().enumerate() {
                    if b.extension.contains(if pick_dst { a.dst } else { a.src }) {
                        s.insert(i);
                    }
                }
                s
            })
            .collect()
    };
    let (src_sets, dst_sets) = (side(false), side(true));
    let pairs: Vec<(usize, usize)> = (0..ix.len())
        .flat_map(|b| (0..ix.len()).filter(move |&c| ix.sort(b) == ix.sort(c)).map(move |c| (b, c)))
        .collect();
    let pair_sets: Vec<FixedBitSet> = pairs
        .iter()
        .map(|&(b, c)| {
            let mut s = FixedBitSet::with_capacity(arrows.len());
            for (i, a) in arrows.iter().enumerate() {
                if let (Some(x), Some(y)) = (ix.get(a.src, b), ix.get(a.dst, c)) {
                    if a.apply(ix.sort(b), x) == y {
                        s.insert(i);
                    }
                }
            }
            s
        })
        .collect();
    let mut mappings: Vec<(Vec<(usize, usize)>, FixedBitSet)> = vec![(Vec::new(), all.clone())];
    let mut frontier = mappings.clone();
    for _ in 0..max_mapping {
        let mut next = Vec::new();
        for (m, set) in &frontier {
            let start = m.last().map_or(0, |last| pairs.iter().position(|p| p == last).unwrap() + 1);
            for k in start..pairs.len() {
                let mut s = set.clone();
                s.intersect_with(&pair_sets[k]);
                let mut m2 = m.clone();
                m2.push(pairs[k]);
                next.push((m2, s));
            }
        }
        mappings.extend(next.iter().cloned());
        frontier = next;
    }
    let sides: Vec<Option<usize>> = std::iter::once(None).chain((0..objects.opens.len()).map(Some)).collect();
    let mut opens = Vec::new();
    for &source in &sides {
        for (mapping, mset) in &mappings {
            for &target in &sides {
                let mut ext = mset.clone();
                if let Some(s) = source {
                    ext.intersect_with(&src_sets[s]);
                }
                if let Some(t) = target {
                    ext.intersect_with(&dst_sets[t]);
                }
                opens.push(ArrowOpen {
                    source,
                    mapping: mapping.clone(),
                    target,
                    extension: ext,
                });
            }
        }
    }
    ArrowBasis { opens, max_mapping }
}

/// Objects hit by the target map on a set of arrows.
pub fn target_image(g: &Groupoid, arrows: &FixedBitSet) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(g.len());
    for i in arrows.ones() {
        out.insert(g.arrows()[i].dst);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenMapVerdict {
    pub open: bool,
    /// Index of an arrow open whose target image is not open, and an object
    /// of that image whose neighbourhood escapes it.
    pub failure: Option<(usize, usize)>,
}

/// Checks that the target map sends every basic arrow open to an open set
/// of the object topology.
pub fn is_open_map_t(g: &Groupoid, objects: &ObjectBasis, arrows: &ArrowBasis) -> OpenMapVerdict {
    let hoods: Vec<FixedBitSet> = (0..g.len()).map(|o| objects.neighbourhood(o)).collect();
    for (i, b) in arrows.opens.iter().enumerate() {
        let image = target_image(g, &b.extension);
        if let Some(o) = image.ones().find(|&o| !hoods[o].is_subset(&image)) {
            return OpenMapVerdict {
                open: false,
                failure: Some((i, o)),
            };
        }
    }
    OpenMapVerdict {
        open: true,
        failure: None,
    }
}

/// Distinct objects are separated by a basic open.
pub fn is_t0(objects: &ObjectBasis) -> bool {
    first_inseparable(objects).is_none()
}

/// The first pair of objects lying in exactly the same basic opens.
pub fn first_inseparable(objects: &ObjectBasis) -> Option<(usize, usize)> {
    let n = objects.objects;
    let profile = |o: usize| -> Vec<bool> { objects.opens.iter().map(|b| b.extension.contains(o)).collect() };
    let profiles: Vec<Vec<bool>> = (0..n).map(profile).collect();
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| profiles[i] == profiles[j])
}

/// The least open containing a point `⟨a⃗, M⟩` in the topology of
/// definables with parameters: the points `⟨h(a⃗), N⟩` for which the
/// parameters interpreted in `M` induce a homomorphism `h: M → N`.
pub fn least_open(space: &PointSpace<'_>, ix: &Indexing, i: usize) -> FixedBitSet {
    let g = space.groupoid();
    let (om, a) = (space.object_of(i), space.tuple_of(i));
    let m = g.object(om);
    let sig = g.signature();
    let named: Vec<usize> = (0..ix.len()).filter(|&p| ix.get(om, p).is_some()).collect();
    let mut out = space.empty_set();
    'objects: for on in ix.objects_interpreting(&named) {
        let n = g.object(on);
        let mut h: Vec<Vec<Option<usize>>> = (0..sig.sorts.len()).map(|s| vec![None; m.size(s)]).collect();
        for &p in &named {
            let s = ix.sort(p);
            let (x, y) = (ix.get(om, p).unwrap(), ix.get(on, p).unwrap());
            match h[s][x] {
                Some(z) if z != y => continue 'objects,
                _ => h[s][x] = Some(y),
            }
        }
        for (r, t) in m.atoms() {
            let arity = &sig.relations[r].arity;
            let image: Vec<usize> = t.iter().zip(arity).map(|(&e, &s)| h[s][e].unwrap()).collect();
            if !n.relation(r).contains(&image) {
                continue 'objects;
            }
        }
        let b: Vec<usize> = a.iter().zip(space.sorts()).map(|(&e, &s)| h[s][e].unwrap()).collect();
        out.insert(space.index_of(on, &b));
    }
    out
}

/// Orbits of the least opens: every stable open is a union of these.
pub fn stable_open_generators(space: &PointSpace<'_>, ix: &Indexing) -> Vec<FixedBitSet> {
    let mut gens: Vec<FixedBitSet> = Vec::new();
    for i in 0..space.len() {
        let o = space.orbit(&least_open(space, ix, i));
        if !gens.contains(&o) {
            gens.push(o);
        }
    }
    gens.sort_by_key(|s| s.ones().next());
    gens
}

/// All stable opens of `⟦⊤, c⟧`, as distinct extensions ordered by size.
pub fn stable_open_lattice(g: &Groupoid, ix: &Indexing, c: &Context, cap: usize) -> Result<Vec<DefinableSet>> {
    let space = PointSpace::new(g, c)?;
    let gens = stable_open_generators(&space, ix);
    let all = crate::definable::union_closure(&space, &gens, cap)?;
    Ok(all.iter().map(|b| space.to_definable(b)).collect())
}

/// Hasse edges `(i, j)` of a family ordered by inclusion: `i ⊂ j` with
/// nothing strictly between.
pub fn hasse_edges(family: &[DefinableSet]) -> Vec<(usize, usize)> {
    let lt = |i: usize, j: usize| family[i].len() < family[j].len() && family[i].is_subset(&family[j]);
    let mut edges = Vec::new();
    for i in 0..family.len() {
        for j in 0..family.len() {
            if lt(i, j) && !(0..family.len()).any(|k| lt(i, k) && lt(k, j)) {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Compares the stable opens of `⟦⊤, c⟧` with its parameter-free
/// definables. Both are unions of principal sets; they agree iff every
/// point's least stable open is its hom-up-set. Returns the first point
/// where they differ.
pub fn lattice_gap(g: &Groupoid, ix: &Indexing, c: &Context) -> Result<Option<Point>> {
    let space = PointSpace::new(g, c)?;
    let mut cache = HomCache::new(&space);
    for k in 0..cache.classes().len() {
        let i = cache.classes().reps[k];
        let stable = space.orbit(&least_open(&space, ix, i));
        if &stable != cache.up_set(i) {
            return Ok(Some(space.point(i)));
        }
    }
    Ok(None)
}

/// Isomorphisms `M → N` agreeing on every interpreted parameter tuple of
/// length at most `tuple_bound` with some arrow of the groupoid.
pub fn hom_space_closure(g: &Groupoid, ix: &Indexing, m: usize, n: usize, tuple_bound: usize) -> Result<Vec<ElemMap>> {
    if m >= g.len() || n >= g.len() {
        return Err(Error::invalid("object not in the groupoid"));
    }
    let hom = g.hom(m, n);
    let named: Vec<usize> = (0..ix.len()).filter(|&p| ix.get(m, p).is_some()).collect();
    let tuples = crate::elimination::canonical_tuples(named.len(), tuple_bound);
    let agrees = |a: &ElemMap, b: &ElemMap, t: &[usize]| {
        t.iter().all(|&k| {
            let p = named[k];
            let (s, e) = (ix.sort(p), ix.get(m, p).unwrap());
            a[s][e] == b[s][e]
        })
    };
    Ok(enumerate_isos(g.object(m), g.object(n))
        .into_iter()
        .filter(|alpha| tuples.iter().all(|t| hom.iter().any(|gamma| agrees(alpha, &gamma.map, t))))
        .collect())
}

/// The first isomorphism between objects that is not an arrow.
pub fn check_etale_complete(g: &Groupoid) -> Option<Morphism> {
    g.missing_iso()
}

#[cfg(test)]
mod tests;
