//! Model groupoids: finite structures with a composition-closed set of
//! isomorphisms between them, together with parameter indexings.

mod construct;
mod document;
mod indexing;

pub use construct::{bouquet, etale_completion, maximal_groupoid, reindexing_counterexample, MaximalGroupoid};
pub use document::{
    load_groupoid, ArrowDoc, GroupoidDoc, IndexingDoc, LoadedGroupoid, ObjectDoc, SignatureDoc,
};
pub use indexing::{disjoint_indexing, shared_indexing, trivial_indexing, Indexing};

use crate::error::{Error, Result};
use crate::semantics::{check_iso, compose, enumerate_isos, invert, ElemMap, Structure};
use crate::syntax::Signature;
use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

/// An arrow between objects, referenced by their position in the groupoid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Morphism {
    pub src: usize,
    pub dst: usize,
    pub map: ElemMap,
}

impl Morphism {
    pub fn identity(object: usize, m: &Structure) -> Self {
        Morphism {
            src: object,
            dst: object,
            map: m.identity_map(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.src == self.dst && self.map.iter().all(|f| f.iter().enumerate().all(|(i, &j)| i == j))
    }

    /// `other ∘ self`; requires `self.dst == other.src`.
    pub fn then(&self, other: &Morphism) -> Morphism {
        debug_assert_eq!(self.dst, other.src);
        Morphism {
            src: self.src,
            dst: other.dst,
            map: compose(&self.map, &other.map),
        }
    }

    pub fn inverse(&self, dst: &Structure) -> Morphism {
        Morphism {
            src: self.dst,
            dst: self.src,
            map: invert(&self.map, dst),
        }
    }

    pub fn apply(&self, sort: usize, e: usize) -> usize {
        self.map[sort][e]
    }

    pub fn describe(&self, objects: &[Structure]) -> String {
        let (m, n) = (&objects[self.src], &objects[self.dst]);
        let sig = m.signature();
        let mut parts = Vec::new();
        for (s, f) in self.map.iter().enumerate() {
            for (a, &b) in f.iter().enumerate() {
                let prefix = if sig.sorts.len() > 1 { format!("{}.", sig.sort_name(s)) } else { String::new() };
                parts.push(format!("{prefix}{}->{}", m.element_name(s, a), n.element_name(s, b)));
            }
        }
        format!("{} -> {} {{{}}}", m.id, n.id, parts.join(", "))
    }
}

/// A finite groupoid of structures over one signature. Arrows are kept
/// sorted by `(src, dst, map)`, so each hom-set is a contiguous slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Groupoid {
    signature: Arc<Signature>,
    objects: Vec<Structure>,
    arrows: Vec<Morphism>,
}

impl Groupoid {
    /// Validates closure under identities, inverses and composition. With
    /// `auto_complete`, missing arrows are generated instead of rejected.
    pub fn new(objects: Vec<Structure>, arrows: Vec<Morphism>, auto_complete: bool) -> Result<Self> {
        let signature = match objects.first() {
            Some(m) => m.signature().clone(),
            None => Arc::new(Signature::new()),
        };
        Self::with_signature(signature, objects, arrows, auto_complete)
    }

    pub fn with_signature(
        signature: Arc<Signature>,
        objects: Vec<Structure>,
        arrows: Vec<Morphism>,
        auto_complete: bool,
    ) -> Result<Self> {
        let mut ids = BTreeSet::new();
        for m in &objects {
            if **m.signature() != *signature {
                return Err(Error::InvalidStructure {
                    structure: m.id.clone(),
                    message: "signature differs from the groupoid's".into(),
                });
            }
            if !ids.insert(m.id.as_str()) {
                return Err(Error::InvalidStructure {
                    structure: m.id.clone(),
                    message: "object id used twice".into(),
                });
            }
        }
        for a in &arrows {
            if a.src >= objects.len() || a.dst >= objects.len() {
                return Err(Error::invalid("arrow refers to a missing object"));
            }
            check_iso(&objects[a.src], &objects[a.dst], &a.map).map_err(|atom| Error::NotIsomorphism {
                arrow: a.describe(&objects),
                atom,
            })?;
        }
        let arrows = if auto_complete {
            close(&objects, arrows)
        } else {
            check_closed(&objects, &arrows)?;
            arrows
        };
        let mut arrows = arrows;
        arrows.sort();
        arrows.dedup();
        Ok(Groupoid {
            signature,
            objects,
            arrows,
        })
    }

    /// Objects with their full automorphism groups and all cross isomorphisms.
    pub fn etale_complete(objects: Vec<Structure>) -> Result<Self> {
        let mut arrows = Vec::new();
        for i in 0..objects.len() {
            for j in 0..objects.len() {
                for map in enumerate_isos(&objects[i], &objects[j]) {
                    arrows.push(Morphism { src: i, dst: j, map });
                }
            }
        }
        let signature = match objects.first() {
            Some(m) => m.signature().clone(),
            None => Arc::new(Signature::new()),
        };
        Self::assemble(signature, objects, arrows)
    }

    /// Identities only.
    pub fn discrete(objects: Vec<Structure>) -> Result<Self> {
        let arrows = objects
            .iter()
            .enumerate()
            .map(|(i, m)| Morphism::identity(i, m))
            .collect();
        Self::new(objects, arrows, false)
    }

    /// Trusted constructor for arrow sets already known to be closed.
    pub(crate) fn assemble(signature: Arc<Signature>, objects: Vec<Structure>, mut arrows: Vec<Morphism>) -> Result<Self> {
        arrows.sort();
        arrows.dedup();
        Ok(Groupoid {
            signature,
            objects,
            arrows,
        })
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn objects(&self) -> &[Structure] {
        &self.objects
    }

    pub fn object(&self, i: usize) -> &Structure {
        &self.objects[i]
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.objects.iter().position(|m| m.id == id)
    }

    pub fn arrows(&self) -> &[Morphism] {
        &self.arrows
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    fn hom_range(&self, src: usize, dst: usize) -> std::ops::Range<usize> {
        let lo = self.arrows.partition_point(|a| (a.src, a.dst) < (src, dst));
        let hi = self.arrows.partition_point(|a| (a.src, a.dst) <= (src, dst));
        lo..hi
    }

    /// `Hom_X(src, dst)` in canonical order.
    pub fn hom(&self, src: usize, dst: usize) -> &[Morphism] {
        &self.arrows[self.hom_range(src, dst)]
    }

    /// Arrows leaving `src`.
    pub fn out_arrows(&self, src: usize) -> &[Morphism] {
        let lo = self.arrows.partition_point(|a| a.src < src);
        let hi = self.arrows.partition_point(|a| a.src <= src);
        &self.arrows[lo..hi]
    }

    pub fn arrow_index(&self, a: &Morphism) -> Option<usize> {
        self.arrows.binary_search(a).ok()
    }

    pub fn contains_arrow(&self, a: &Morphism) -> bool {
        self.arrow_index(a).is_some()
    }

    /// Connected components, each sorted, in order of least member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.objects.len()];
        let mut out = Vec::new();
        for start in 0..self.objects.len() {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(i) = queue.pop_front() {
                comp.push(i);
                for a in self.out_arrows(i) {
                    if !seen[a.dst] {
                        seen[a.dst] = true;
                        queue.push_back(a.dst);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    /// Same objects with every isomorphism between them.
    pub fn etale_completion(&self) -> Groupoid {
        etale_completion(self)
    }

    /// The first isomorphism between objects that is not an arrow.
    pub fn missing_iso(&self) -> Option<Morphism> {
        for i in 0..self.objects.len() {
            for j in 0..self.objects.len() {
                let hom = self.hom(i, j);
                for map in enumerate_isos(&self.objects[i], &self.objects[j]) {
                    let a = Morphism { src: i, dst: j, map };
                    if hom.binary_search(&a).is_err() {
                        return Some(a);
                    }
                }
            }
        }
        None
    }
}

fn check_closed(objects: &[Structure], arrows: &[Morphism]) -> Result<()> {
    let set: HashSet<&Morphism> = arrows.iter().collect();
    for (i, m) in objects.iter().enumerate() {
        let id = Morphism::identity(i, m);
        if !set.contains(&id) {
            return Err(Error::ClosureViolation {
                missing: format!("identity of {}", m.id),
            });
        }
    }
    for a in arrows {
        let inv = a.inverse(&objects[a.dst]);
        if !set.contains(&inv) {
            return Err(Error::ClosureViolation {
                missing: format!("inverse of {}", a.describe(objects)),
            });
        }
    }
    let mut by_src: Vec<Vec<&Morphism>> = vec![Vec::new(); objects.len()];
    for a in arrows {
        by_src[a.src].push(a);
    }
    for a in arrows {
        for b in &by_src[a.dst] {
            let c = a.then(b);
            if !set.contains(&c) {
                return Err(Error::ClosureViolation {
                    missing: format!("composite {}", c.describe(objects)),
                });
            }
        }
    }
    Ok(())
}

/// Closure under identities, inverses and composition.
fn close(objects: &[Structure], arrows: Vec<Morphism>) -> Vec<Morphism> {
    let mut set: HashSet<Morphism> = HashSet::new();
    let mut queue: VecDeque<Morphism> = VecDeque::new();
    let push = |a: Morphism, set: &mut HashSet<Morphism>, queue: &mut VecDeque<Morphism>| {
        if set.insert(a.clone()) {
            queue.push_back(a);
        }
    };
    for (i, m) in objects.iter().enumerate() {
        push(Morphism::identity(i, m), &mut set, &mut queue);
    }
    for a in arrows {
        push(a, &mut set, &mut queue);
    }
    let mut by_src: Vec<Vec<Morphism>> = vec![Vec::new(); objects.len()];
    let mut by_dst: Vec<Vec<Morphism>> = vec![Vec::new(); objects.len()];
    while let Some(a) = queue.pop_front() {
        let mut fresh = vec![a.inverse(&objects[a.dst])];
        for b in &by_src[a.dst] {
            fresh.push(a.then(b));
        }
        for b in &by_dst[a.src] {
            fresh.push(b.then(&a));
        }
        if a.dst == a.src {
            fresh.push(a.then(&a));
        }
        by_src[a.src].push(a.clone());
        by_dst[a.dst].push(a);
        for f in fresh {
            push(f, &mut set, &mut queue);
        }
    }
    set.into_iter().collect()
}

#[cfg(test)]
mod tests;
