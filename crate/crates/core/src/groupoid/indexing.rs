use super::Groupoid;
use crate::error::{Error, Result};
use crate::syntax::SortId;
use std::collections::{BTreeMap, BTreeSet};

/// Parameters with sorts and, per object, a partial surjection from
/// parameters onto the carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Indexing {
    params: Vec<(String, SortId)>,
    by_name: BTreeMap<String, usize>,
    /// `interp[object][param]`
    interp: Vec<Vec<Option<usize>>>,
}

impl Indexing {
    /// Validates sorts and per-object surjectivity.
    pub fn new(g: &Groupoid, params: Vec<(String, SortId)>, interp: Vec<Vec<Option<usize>>>) -> Result<Self> {
        let sig = g.signature();
        let mut by_name = BTreeMap::new();
        for (i, (p, s)) in params.iter().enumerate() {
            if *s >= sig.sorts.len() {
                return Err(Error::sort(p.clone(), "parameter of an undeclared sort"));
            }
            if by_name.insert(p.clone(), i).is_some() {
                return Err(Error::invalid(format!("parameter `{p}` declared twice")));
            }
        }
        if interp.len() != g.len() {
            return Err(Error::invalid("interpretation count differs from object count"));
        }
        for (o, row) in interp.iter().enumerate() {
            let m = g.object(o);
            if row.len() != params.len() {
                return Err(Error::invalid(format!("interpretation row for {} has the wrong length", m.id)));
            }
            let mut hit: Vec<Vec<bool>> = (0..sig.sorts.len()).map(|s| vec![false; m.size(s)]).collect();
            for (p, v) in row.iter().enumerate() {
                if let Some(e) = *v {
                    let s = params[p].1;
                    if e >= m.size(s) {
                        return Err(Error::invalid(format!(
                            "parameter `{}` interpreted outside the carrier of {}",
                            params[p].0, m.id
                        )));
                    }
                    hit[s][e] = true;
                }
            }
            for (s, hs) in hit.iter().enumerate() {
                if let Some(e) = hs.iter().position(|h| !h) {
                    return Err(Error::NotSurjective {
                        object: m.id.clone(),
                        element: m.element_name(s, e).to_string(),
                    });
                }
            }
        }
        Ok(Indexing { params, by_name, interp })
    }

    pub fn params(&self) -> &[(String, SortId)] {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn param(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, p: usize) -> &str {
        &self.params[p].0
    }

    pub fn sort(&self, p: usize) -> SortId {
        self.params[p].1
    }

    /// Interpretation of parameter `p` in object `o`.
    pub fn get(&self, o: usize, p: usize) -> Option<usize> {
        self.interp[o][p]
    }

    pub fn row(&self, o: usize) -> &[Option<usize>] {
        &self.interp[o]
    }

    /// Interpretation of a whole parameter tuple, if every entry is defined.
    pub fn tuple(&self, o: usize, ps: &[usize]) -> Option<Vec<usize>> {
        ps.iter().map(|&p| self.interp[o][p]).collect()
    }

    /// Objects interpreting every parameter of `ps`.
    pub fn objects_interpreting(&self, ps: &[usize]) -> Vec<usize> {
        (0..self.interp.len()).filter(|&o| ps.iter().all(|&p| self.interp[o][p].is_some())).collect()
    }

    /// Parameter-name to sort-name map, for parsing formulas with parameters.
    pub fn param_sorts(&self, g: &Groupoid) -> BTreeMap<String, String> {
        self.params
            .iter()
            .map(|(p, s)| (p.clone(), g.signature().sort_name(*s).to_string()))
            .collect()
    }

    /// Resolves parameter names.
    pub fn resolve(&self, names: &[String]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| self.param(n).ok_or_else(|| Error::UnknownParameter(n.clone())))
            .collect()
    }

    /// Precomposes with `sigma` (new parameter `i` takes the old value of
    /// `sigma[i]`) and revalidates surjectivity onto every carrier.
    pub fn reindex(&self, g: &Groupoid, sigma: &[Option<usize>]) -> Result<Indexing> {
        if sigma.len() != self.params.len() {
            return Err(Error::invalid("reindexing map must be given on the whole parameter set"));
        }
        for (i, t) in sigma.iter().enumerate() {
            if let Some(j) = *t {
                if j >= self.params.len() || self.params[j].1 != self.params[i].1 {
                    return Err(Error::invalid(format!(
                        "reindexing sends `{}` to a parameter of another sort",
                        self.params[i].0
                    )));
                }
            }
        }
        let interp = self
            .interp
            .iter()
            .map(|row| sigma.iter().map(|t| t.and_then(|j| row[j])).collect())
            .collect();
        Indexing::new(g, self.params.clone(), interp)
    }

    /// Same parameters with arbitrary replacement interpretations.
    pub fn with_interpretation(&self, g: &Groupoid, interp: Vec<Vec<Option<usize>>>) -> Result<Indexing> {
        Indexing::new(g, self.params.clone(), interp)
    }

    /// Restricted to the listed objects, in that order.
    pub fn restrict(&self, g: &Groupoid, objects: &[usize]) -> Result<Indexing> {
        Indexing::new(g, self.params.clone(), objects.iter().map(|&o| self.interp[o].clone()).collect())
    }

    /// No two objects interpret a common parameter.
    pub fn is_disjoint(&self) -> bool {
        (0..self.params.len()).all(|p| self.interp.iter().filter(|row| row[p].is_some()).count() <= 1)
    }
}

/// One parameter per element name, shared by every object whose carrier
/// contains that name. Names occurring in several sorts are qualified as
/// `sort.name`.
pub fn trivial_indexing(g: &Groupoid) -> Indexing {
    let sig = g.signature();
    let mut sorts_of: BTreeMap<&str, BTreeSet<SortId>> = BTreeMap::new();
    for m in g.objects() {
        for s in 0..sig.sorts.len() {
            for e in m.carrier(s) {
                sorts_of.entry(e.as_str()).or_default().insert(s);
            }
        }
    }
    let mut params: Vec<(String, SortId)> = Vec::new();
    let mut key: BTreeMap<(SortId, &str), usize> = BTreeMap::new();
    for m in g.objects() {
        for s in 0..sig.sorts.len() {
            for e in m.carrier(s) {
                if key.contains_key(&(s, e.as_str())) {
                    continue;
                }
                let name = if sorts_of[e.as_str()].len() > 1 {
                    format!("{}.{e}", sig.sort_name(s))
                } else {
                    e.clone()
                };
                key.insert((s, e.as_str()), params.len());
                params.push((name, s));
            }
        }
    }
    let interp = g
        .objects()
        .iter()
        .map(|m| {
            let mut row = vec![None; params.len()];
            for s in 0..sig.sorts.len() {
                for (i, e) in m.carrier(s).iter().enumerate() {
                    row[key[&(s, e.as_str())]] = Some(i);
                }
            }
            row
        })
        .collect();
    Indexing::new(g, params, interp).expect("trivial indexing is surjective")
}

/// One parameter `object.element` per element of each object, interpreted
/// only in its own object.
pub fn disjoint_indexing(g: &Groupoid) -> Indexing {
    let sig = g.signature();
    let mut params = Vec::new();
    let mut owner = Vec::new();
    for (o, m) in g.objects().iter().enumerate() {
        for s in 0..sig.sorts.len() {
            for (i, e) in m.carrier(s).iter().enumerate() {
                let name = if sig.sorts.len() > 1 {
                    format!("{}.{}.{e}", m.id, sig.sort_name(s))
                } else {
                    format!("{}.{e}", m.id)
                };
                params.push((name, s));
                owner.push((o, i));
            }
        }
    }
    let interp = (0..g.len())
        .map(|o| owner.iter().map(|&(q, i)| (q == o).then_some(i)).collect())
        .collect();
    Indexing::new(g, params, interp).expect("disjoint indexing is surjective")
}

/// An indexing given by named parameters and per-object maps to element
/// names; validated for sorts and surjectivity.
pub fn shared_indexing(
    g: &Groupoid,
    params: &[(String, String)],
    maps: &BTreeMap<String, BTreeMap<String, String>>,
) -> Result<Indexing> {
    let sig = g.signature();
    let mut ps = Vec::new();
    for (p, s) in params {
        let sid = sig
            .sort_id(s)
            .ok_or_else(|| Error::sort(p.clone(), format!("undeclared sort `{s}`")))?;
        ps.push((p.clone(), sid));
    }
    for id in maps.keys() {
        if g.object_index(id).is_none() {
            return Err(Error::invalid(format!("interpretation for unknown object `{id}`")));
        }
    }
    let mut interp = Vec::new();
    for m in g.objects() {
        let mut row = vec![None; ps.len()];
        if let Some(map) = maps.get(&m.id) {
            for (p, e) in map {
                let i = ps
                    .iter()
                    .position(|(q, _)| q == p)
                    .ok_or_else(|| Error::UnknownParameter(p.clone()))?;
                let el = m.element(ps[i].1, e).ok_or_else(|| {
                    Error::invalid(format!("`{e}` is not an element of {} of the parameter's sort", m.id))
                })?;
                row[i] = Some(el);
            }
        }
        interp.push(row);
    }
    Indexing::new(g, ps, interp)
}
