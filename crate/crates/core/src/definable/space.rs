use crate::error::{Error, Result};
use crate::groupoid::{Groupoid, Morphism};
use crate::semantics::{hom_leq, DefinableSet, Point, Structure, TupleIter};
use crate::syntax::{Context, SortId};
use fixedbitset::FixedBitSet;
use std::collections::HashMap;

/// Largest point space materialized before giving up.
pub const DEFAULT_POINT_CAP: usize = 1 << 22;

/// All points `⟨a⃗, M⟩` of a groupoid in one context, numbered in
/// `(object, tuple)` order so that bitsets and [`DefinableSet`]s agree.
#[derive(Debug, Clone)]
pub struct PointSpace<'g> {
    g: &'g Groupoid,
    context: Context,
    sorts: Vec<SortId>,
    offsets: Vec<usize>,
}

impl<'g> PointSpace<'g> {
    pub fn new(g: &'g Groupoid, context: &Context) -> Result<Self> {
        Self::with_cap(g, context, DEFAULT_POINT_CAP)
    }

    pub fn with_cap(g: &'g Groupoid, context: &Context, cap: usize) -> Result<Self> {
        let sorts = context.sort_ids(g.signature())?;
        let mut offsets = Vec::with_capacity(g.len() + 1);
        let mut total = 0usize;
        offsets.push(0);
        for m in g.objects() {
            let n = sorts.iter().try_fold(1usize, |acc, &s| acc.checked_mul(m.size(s)));
            total = n.and_then(|n| total.checked_add(n)).unwrap_or(usize::MAX);
            if total > cap {
                return Err(Error::cap(format!("points in context of length {}", sorts.len()), total, cap));
            }
            offsets.push(total);
        }
        Ok(PointSpace {
            g,
            context: context.clone(),
            sorts,
            offsets,
        })
    }

    pub fn groupoid(&self) -> &'g Groupoid {
        self.g
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn sorts(&self) -> &[SortId] {
        &self.sorts
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index range of the points over object `o`.
    pub fn object_range(&self, o: usize) -> std::ops::Range<usize> {
        self.offsets[o]..self.offsets[o + 1]
    }

    pub fn object_of(&self, i: usize) -> usize {
        self.offsets.partition_point(|&off| off <= i) - 1
    }

    pub fn tuple_of(&self, i: usize) -> Vec<usize> {
        let o = self.object_of(i);
        let m = self.g.object(o);
        let mut rest = i - self.offsets[o];
        let mut t = vec![0; self.sorts.len()];
        for k in (0..self.sorts.len()).rev() {
            let n = m.size(self.sorts[k]);
            t[k] = rest % n;
            rest /= n;
        }
        t
    }

    pub fn point(&self, i: usize) -> Point {
        Point::new(self.object_of(i), self.tuple_of(i))
    }

    pub fn index_of(&self, object: usize, tuple: &[usize]) -> usize {
        let m = self.g.object(object);
        let mut i = 0;
        for (k, &e) in tuple.iter().enumerate() {
            i = i * m.size(self.sorts[k]) + e;
        }
        self.offsets[object] + i
    }

    pub fn index(&self, p: &Point) -> Result<usize> {
        if p.object >= self.g.len() || p.tuple.len() != self.sorts.len() {
            return Err(Error::sort("point", "point does not match the context"));
        }
        let m = self.g.object(p.object);
        if p.tuple.iter().zip(&self.sorts).any(|(&e, &s)| e >= m.size(s)) {
            return Err(Error::sort("point", "tuple outside the carrier"));
        }
        Ok(self.index_of(p.object, &p.tuple))
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.len())
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn to_bits(&self, d: &DefinableSet) -> Result<FixedBitSet> {
        if d.context.sort_ids(self.g.signature())? != self.sorts {
            return Err(Error::sort("context", "definable set lives in another context"));
        }
        let mut s = self.empty_set();
        for p in &d.members {
            s.insert(self.index(p)?);
        }
        Ok(s)
    }

    pub fn to_definable(&self, bits: &FixedBitSet) -> DefinableSet {
        DefinableSet::new(self.context.clone(), bits.ones().map(|i| self.point(i)).collect())
    }

    /// Image of point `i` under an arrow leaving its object.
    pub fn act(&self, i: usize, a: &Morphism) -> usize {
        let t: Vec<usize> = self.tuple_of(i).iter().zip(&self.sorts).map(|(&e, &s)| a.apply(s, e)).collect();
        self.index_of(a.dst, &t)
    }

    /// Closure under the arrows. Arrows are closed under composition, so a
    /// single pass over the arrows leaving each member suffices.
    pub fn orbit(&self, bits: &FixedBitSet) -> FixedBitSet {
        let mut out = bits.clone();
        for i in bits.ones() {
            for a in self.g.out_arrows(self.object_of(i)) {
                out.insert(self.act(i, a));
            }
        }
        out
    }

    pub fn is_stable(&self, bits: &FixedBitSet) -> bool {
        bits.ones()
            .all(|i| self.g.out_arrows(self.object_of(i)).iter().all(|a| bits.contains(self.act(i, a))))
    }

    /// Partition into orbits; `class[i]` is the orbit number of point `i`,
    /// and orbits are numbered by their least point.
    pub fn orbit_classes(&self) -> OrbitClasses {
        const NONE: usize = usize::MAX;
        let mut class = vec![NONE; self.len()];
        let mut reps = Vec::new();
        let mut members = Vec::new();
        for i in 0..self.len() {
            if class[i] != NONE {
                continue;
            }
            let c = reps.len();
            reps.push(i);
            let mut ms = Vec::new();
            for a in self.g.out_arrows(self.object_of(i)) {
                let j = self.act(i, a);
                if class[j] == NONE {
                    class[j] = c;
                    ms.push(j);
                }
            }
            ms.sort_unstable();
            members.push(ms);
        }
        OrbitClasses { class, reps, members }
    }
}

/// The orbit partition of a point space.
#[derive(Debug, Clone)]
pub struct OrbitClasses {
    pub class: Vec<usize>,
    pub reps: Vec<usize>,
    pub members: Vec<Vec<usize>>,
}

impl OrbitClasses {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Orbits meeting `bits`, in increasing order.
    pub fn classes_of(&self, bits: &FixedBitSet) -> Vec<usize> {
        let mut cs: Vec<usize> = bits.ones().map(|i| self.class[i]).collect();
        cs.sort_unstable();
        cs.dedup();
        cs
    }
}

/// Atomic facts of `a⃗` in `m` are preserved at `b⃗` in `n`: repeated entries
/// stay repeated and every atom over the entries maps to an atom.
pub(crate) fn atomic_leq(m: &Structure, a: &[(SortId, usize)], n: &Structure, b: &[(SortId, usize)]) -> bool {
    let mut image: HashMap<(SortId, usize), usize> = HashMap::new();
    for (&(s, x), &(t, y)) in a.iter().zip(b) {
        if s != t {
            return false;
        }
        if *image.entry((s, x)).or_insert(y) != y {
            return false;
        }
    }
    let sig = m.signature();
    for (r, t) in m.atoms() {
        let arity = &sig.relations[r].arity;
        let mut mapped = Vec::with_capacity(t.len());
        for (&e, &s) in t.iter().zip(arity) {
            match image.get(&(s, e)) {
                Some(&y) => mapped.push(y),
                None => break,
            }
        }
        if mapped.len() == t.len() && !n.relation(r).contains(&mapped) {
            return false;
        }
    }
    true
}

/// The hom-preorder on points of one space, computed per orbit: points in
/// one orbit are hom-equivalent, so every up-set is a union of orbits.
pub struct HomCache<'s, 'g> {
    space: &'s PointSpace<'g>,
    classes: OrbitClasses,
    up: HashMap<usize, FixedBitSet>,
    depth: Option<usize>,
    game: GameMemo,
}

type GameKey = (usize, Vec<(SortId, usize)>, usize, Vec<(SortId, usize)>, usize);
type GameMemo = HashMap<GameKey, bool>;

impl<'s, 'g> HomCache<'s, 'g> {
    /// The full hom-preorder.
    pub fn new(space: &'s PointSpace<'g>) -> Self {
        Self::build(space, None)
    }

    /// The preorder of the existential positive game with `depth` rounds:
    /// `p ≤ q` iff every existential positive formula of quantifier depth at
    /// most `depth` true at `p` is true at `q`.
    pub fn with_depth(space: &'s PointSpace<'g>, depth: usize) -> Self {
        Self::build(space, Some(depth))
    }

    fn build(space: &'s PointSpace<'g>, depth: Option<usize>) -> Self {
        HomCache {
            classes: space.orbit_classes(),
            space,
            up: HashMap::new(),
            depth,
            game: HashMap::new(),
        }
    }

    pub fn space(&self) -> &'s PointSpace<'g> {
        self.space
    }

    pub fn classes(&self) -> &OrbitClasses {
        &self.classes
    }

    /// `p_i ≤ p_j`.
    pub fn leq(&mut self, i: usize, j: usize) -> bool {
        self.up_set(i).contains(j)
    }

    fn leq_points(&mut self, i: usize, j: usize) -> bool {
        let sp = self.space;
        let g = sp.groupoid();
        let (oi, oj) = (sp.object_of(i), sp.object_of(j));
        let (ti, tj) = (sp.tuple_of(i), sp.tuple_of(j));
        match self.depth {
            None => hom_leq(g.object(oi), &ti, g.object(oj), &tj, sp.sorts()).unwrap_or(false),
            Some(k) => {
                let a: Vec<(SortId, usize)> = sp.sorts().iter().copied().zip(ti).collect();
                let b: Vec<(SortId, usize)> = sp.sorts().iter().copied().zip(tj).collect();
                game_leq(g, &mut self.game, oi, a, oj, b, k)
            }
        }
    }

    /// Up-set of point `i`.
    pub fn up_set(&mut self, i: usize) -> &FixedBitSet {
        let c = self.classes.class[i];
        if !self.up.contains_key(&c) {
            let rep = self.classes.reps[c];
            let mut bits = self.space.empty_set();
            for d in 0..self.classes.len() {
                if d == c || self.leq_points(rep, self.classes.reps[d]) {
                    for &j in &self.classes.members[d] {
                        bits.insert(j);
                    }
                }
            }
            self.up.insert(c, bits);
        }
        &self.up[&c]
    }

    /// The first member `p` of `bits` and a point `q ∉ bits` with `p ≤ q`,
    /// if `bits` is not up-closed.
    pub fn up_closure_violation(&mut self, bits: &FixedBitSet) -> Option<(usize, usize)> {
        for c in self.classes.classes_of(bits) {
            let members = self.classes.members[c].clone();
            if let Some(&p) = members.iter().find(|&&p| bits.contains(p)) {
                if members.iter().any(|&q| !bits.contains(q)) {
                    let q = members.iter().copied().find(|&q| !bits.contains(q)).unwrap();
                    return Some((p, q));
                }
                let up = self.up_set(p).clone();
                if let Some(q) = up.ones().find(|&q| !bits.contains(q)) {
                    return Some((p, q));
                }
            }
        }
        None
    }

    pub fn is_up_closed(&mut self, bits: &FixedBitSet) -> bool {
        self.up_closure_violation(bits).is_none()
    }

    /// Representatives of the hom-minimal orbits within `bits`: one point
    /// per equivalence class of minimal orbits, least index first.
    pub fn minimal_points(&mut self, bits: &FixedBitSet) -> Vec<usize> {
        let reps: Vec<usize> = self
            .classes
            .classes_of(bits)
            .into_iter()
            .map(|c| *self.classes.members[c].iter().find(|&&p| bits.contains(p)).unwrap())
            .collect();
        let mut chosen: Vec<usize> = Vec::new();
        for &p in &reps {
            let dominated = reps.iter().any(|&q| q != p && self.leq(q, p) && !self.leq(p, q));
            let duplicate = chosen.iter().any(|&q| self.leq(q, p) && self.leq(p, q));
            if !dominated && !duplicate {
                chosen.push(p);
            }
        }
        chosen
    }
}

/// Duplicator wins the `k`-round existential positive forth game from
/// `(m, a⃗)` to `(n, b⃗)`.
fn game_leq(
    g: &Groupoid,
    memo: &mut GameMemo,
    om: usize,
    a: Vec<(SortId, usize)>,
    on: usize,
    b: Vec<(SortId, usize)>,
    k: usize,
) -> bool {
    let (m, n) = (g.object(om), g.object(on));
    if !atomic_leq(m, &a, n, &b) {
        return false;
    }
    let sorts = m.signature().sorts.len();
    let unpicked: Vec<(SortId, usize)> = (0..sorts)
        .flat_map(|s| (0..m.size(s)).map(move |e| (s, e)))
        .filter(|x| !a.contains(x))
        .collect();
    if k >= unpicked.len() {
        // Spoiler can exhaust the structure, so the game is the hom test.
        let ta: Vec<usize> = a.iter().map(|x| x.1).collect();
        let tb: Vec<usize> = b.iter().map(|x| x.1).collect();
        let ss: Vec<SortId> = a.iter().map(|x| x.0).collect();
        return hom_leq(m, &ta, n, &tb, &ss).unwrap_or(false);
    }
    if k == 0 {
        return true;
    }
    let key = (om, a, on, b, k);
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let (_, a, _, b, _) = key.clone();
    let result = unpicked.iter().all(|&(s, e)| {
        (0..n.size(s)).any(|f| {
            let mut a2 = a.clone();
            a2.push((s, e));
            let mut b2 = b.clone();
            b2.push((s, f));
            game_leq(g, memo, om, a2, on, b2, k - 1)
        })
    });
    memo.insert(key, result);
    result
}

/// Every tuple of the given sort profile in every object, as points.
pub fn all_points(g: &Groupoid, sorts: &[SortId]) -> Vec<Point> {
    let mut out = Vec::new();
    for (o, m) in g.objects().iter().enumerate() {
        for t in TupleIter::new(sorts.iter().map(|&s| m.size(s)).collect()) {
            out.push(Point::new(o, t));
        }
    }
    out
}
