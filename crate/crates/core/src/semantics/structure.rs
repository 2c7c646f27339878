use crate::error::{Error, Result};
use crate::syntax::{Context, Signature, SortId};
use fixedbitset::FixedBitSet;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Interpretation of one relation: sorted tuples plus a dense membership mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationTable {
    tuples: Vec<Vec<usize>>,
    strides: Vec<usize>,
    mask: FixedBitSet,
}

impl RelationTable {
    fn new(sizes: &[usize], mut tuples: Vec<Vec<usize>>) -> Self {
        tuples.sort();
        tuples.dedup();
        let mut strides = vec![0; sizes.len()];
        let mut total = 1usize;
        for i in (0..sizes.len()).rev() {
            strides[i] = total;
            total = total.saturating_mul(sizes[i]);
        }
        let mut mask = FixedBitSet::with_capacity(total);
        for t in &tuples {
            mask.insert(Self::code(&strides, t));
        }
        RelationTable { tuples, strides, mask }
    }

    fn code(strides: &[usize], t: &[usize]) -> usize {
        t.iter().zip(strides).map(|(a, s)| a * s).sum()
    }

    #[inline]
    pub fn contains(&self, t: &[usize]) -> bool {
        self.mask.contains(Self::code(&self.strides, t))
    }

    /// Membership for a tuple given through an index map.
    #[inline]
    pub fn contains_by(&self, len: usize, mut at: impl FnMut(usize) -> usize) -> bool {
        let mut code = 0;
        for i in 0..len {
            code += at(i) * self.strides[i];
        }
        self.mask.contains(code)
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// A finite structure: per-sort carriers of named elements and per-relation
/// tuples of element indices.
#[derive(Debug, Clone)]
pub struct Structure {
    pub id: String,
    signature: Arc<Signature>,
    carriers: Vec<Vec<String>>,
    relations: Vec<RelationTable>,
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.carriers == other.carriers
            && self.relations == other.relations
            && (Arc::ptr_eq(&self.signature, &other.signature) || self.signature == other.signature)
    }
}

impl Eq for Structure {}

/// Per-sort element maps, `map[sort][elem]`.
pub type ElemMap = Vec<Vec<usize>>;

impl Structure {
    /// Builds a structure from index data; tuples are validated against the arities.
    pub fn from_indices(
        id: impl Into<String>,
        signature: Arc<Signature>,
        carriers: Vec<Vec<String>>,
        relations: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let id = id.into();
        let bad = |message: String| Error::InvalidStructure {
            structure: id.clone(),
            message,
        };
        if carriers.len() != signature.sorts.len() {
            return Err(bad(format!(
                "{} carriers for {} sorts",
                carriers.len(),
                signature.sorts.len()
            )));
        }
        for (s, c) in carriers.iter().enumerate() {
            let distinct: BTreeSet<&String> = c.iter().collect();
            if distinct.len() != c.len() {
                return Err(bad(format!("repeated element in sort `{}`", signature.sort_name(s))));
            }
        }
        if relations.len() != signature.relations.len() {
            return Err(bad("relation count differs from signature".into()));
        }
        let mut tables = Vec::with_capacity(relations.len());
        for (r, tuples) in relations.into_iter().enumerate() {
            let sym = &signature.relations[r];
            let sizes: Vec<usize> = sym.arity.iter().map(|&s| carriers[s].len()).collect();
            for t in &tuples {
                if t.len() != sizes.len() {
                    return Err(bad(format!("tuple of length {} in `{}`", t.len(), sym.name)));
                }
                if t.iter().zip(&sizes).any(|(a, n)| a >= n) {
                    return Err(bad(format!("tuple outside the carrier in `{}`", sym.name)));
                }
            }
            tables.push(RelationTable::new(&sizes, tuples));
        }
        Ok(Structure {
            id,
            signature,
            carriers,
            relations: tables,
        })
    }

    /// Builds a structure from element names.
    pub fn from_names(
        id: impl Into<String>,
        signature: Arc<Signature>,
        carriers: &BTreeMap<String, Vec<String>>,
        relations: &BTreeMap<String, Vec<Vec<String>>>,
    ) -> Result<Self> {
        let id = id.into();
        let bad = |message: String| Error::InvalidStructure {
            structure: id.clone(),
            message,
        };
        for s in carriers.keys() {
            if signature.sort_id(s).is_none() {
                return Err(bad(format!("unknown sort `{s}`")));
            }
        }
        for r in relations.keys() {
            if signature.relation(r).is_none() {
                return Err(bad(format!("unknown relation `{r}`")));
            }
        }
        let cars: Vec<Vec<String>> = signature
            .sorts
            .iter()
            .map(|s| carriers.get(s).cloned().unwrap_or_default())
            .collect();
        let mut rels = Vec::new();
        for sym in &signature.relations {
            let mut tuples = Vec::new();
            for t in relations.get(&sym.name).map(Vec::as_slice).unwrap_or(&[]) {
                if t.len() != sym.arity.len() {
                    return Err(bad(format!(
                        "`{}` has arity {} but a tuple of length {}",
                        sym.name,
                        sym.arity.len(),
                        t.len()
                    )));
                }
                let mut idx = Vec::with_capacity(t.len());
                for (e, &s) in t.iter().zip(&sym.arity) {
                    let i = cars[s].iter().position(|x| x == e).ok_or_else(|| {
                        bad(format!(
                            "`{e}` in `{}` is not an element of sort `{}`",
                            sym.name,
                            signature.sort_name(s)
                        ))
                    })?;
                    idx.push(i);
                }
                tuples.push(idx);
            }
            rels.push(tuples);
        }
        Self::from_indices(id, signature, cars, rels)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn carrier(&self, sort: SortId) -> &[String] {
        &self.carriers[sort]
    }

    pub fn carriers(&self) -> &[Vec<String>] {
        &self.carriers
    }

    pub fn size(&self, sort: SortId) -> usize {
        self.carriers[sort].len()
    }

    /// Total number of elements over all sorts.
    pub fn total_size(&self) -> usize {
        self.carriers.iter().map(Vec::len).sum()
    }

    pub fn relation(&self, r: usize) -> &RelationTable {
        &self.relations[r]
    }

    pub fn relation_by_name(&self, name: &str) -> Option<&RelationTable> {
        self.signature.relation(name).map(|(i, _)| &self.relations[i])
    }

    pub fn element(&self, sort: SortId, name: &str) -> Option<usize> {
        self.carriers[sort].iter().position(|e| e == name)
    }

    pub fn element_name(&self, sort: SortId, i: usize) -> &str {
        &self.carriers[sort][i]
    }

    /// Relation atoms as `(relation, tuple)` in signature then tuple order.
    pub fn atoms(&self) -> impl Iterator<Item = (usize, &Vec<usize>)> {
        self.relations
            .iter()
            .enumerate()
            .flat_map(|(r, t)| t.tuples().iter().map(move |tu| (r, tu)))
    }

    pub fn atom_count(&self) -> usize {
        self.relations.iter().map(RelationTable::len).sum()
    }

    /// Readable `R(a, b)` for a tuple of indices.
    pub fn show_atom(&self, r: usize, t: &[usize]) -> String {
        let sym = &self.signature.relations[r];
        let names: Vec<&str> = t
            .iter()
            .zip(&sym.arity)
            .map(|(&e, &s)| self.carriers[s][e].as_str())
            .collect();
        format!("{}({})", sym.name, names.join(", "))
    }

    pub fn show_tuple(&self, sorts: &[SortId], t: &[usize]) -> Vec<String> {
        t.iter()
            .zip(sorts)
            .map(|(&e, &s)| self.carriers[s][e].clone())
            .collect()
    }

    /// All tuples over the given sort profile, in lexicographic order.
    pub fn tuples(&self, sorts: &[SortId]) -> TupleIter {
        TupleIter::new(sorts.iter().map(|&s| self.size(s)).collect())
    }

    /// Same carriers and relations with a different id.
    pub fn renamed(&self, id: impl Into<String>) -> Self {
        let mut s = self.clone();
        s.id = id.into();
        s
    }

    /// Reinterprets over a larger signature (new relations empty).
    pub fn over(&self, signature: Arc<Signature>, extra: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let mut rels: Vec<Vec<Vec<usize>>> = self.relations.iter().map(|t| t.tuples().to_vec()).collect();
        rels.extend(extra);
        Self::from_indices(self.id.clone(), signature, self.carriers.clone(), rels)
    }

    /// Same carrier sizes and relation tuples, ignoring names and id.
    pub fn same_interpretation(&self, other: &Structure) -> bool {
        self.carriers.iter().map(Vec::len).eq(other.carriers.iter().map(Vec::len))
            && self.relations == other.relations
    }

    pub fn identity_map(&self) -> ElemMap {
        self.carriers.iter().map(|c| (0..c.len()).collect()).collect()
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)
    }
}

/// Odometer over tuples with per-position bounds.
pub struct TupleIter {
    sizes: Vec<usize>,
    cur: Vec<usize>,
    done: bool,
}

impl TupleIter {
    pub fn new(sizes: Vec<usize>) -> Self {
        let done = sizes.contains(&0);
        TupleIter {
            cur: vec![0; sizes.len()],
            sizes,
            done,
        }
    }
}

impl Iterator for TupleIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let mut i = self.sizes.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.cur[i] += 1;
            if self.cur[i] < self.sizes[i] {
                break;
            }
            self.cur[i] = 0;
        }
        Some(out)
    }
}

/// A tuple in a structure of a family, identified by the structure's index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub object: usize,
    pub tuple: Vec<usize>,
}

impl Point {
    pub fn new(object: usize, tuple: Vec<usize>) -> Self {
        Point { object, tuple }
    }
}

/// A set of points of a family over a fixed context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefinableSet {
    pub context: Context,
    pub members: BTreeSet<Point>,
}

impl DefinableSet {
    pub fn new(context: Context, members: BTreeSet<Point>) -> Self {
        DefinableSet { context, members }
    }

    pub fn empty(context: Context) -> Self {
        DefinableSet {
            context,
            members: BTreeSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.members.contains(p)
    }

    pub fn is_subset(&self, other: &DefinableSet) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Members as `(object id, element names)` pairs.
    pub fn describe(&self, family: &[Structure], sig: &Signature) -> Vec<(String, Vec<String>)> {
        let sorts = self.context.sort_ids(sig).unwrap_or_default();
        self.members
            .iter()
            .map(|p| {
                let m = &family[p.object];
                (m.id.clone(), m.show_tuple(&sorts, &p.tuple))
            })
            .collect()
    }
}
