use super::structure::{ElemMap, Structure, TupleIter};
use crate::error::{Error, Result};
use crate::syntax::SortId;

const UNSET: usize = usize::MAX;

/// Backtracking search for relation-preserving maps `m -> n`.
///
/// Elements of `m` are assigned sort by sort in carrier order and targets are
/// tried in increasing order, so solutions arrive lexicographically. Each
/// relation tuple of `m` is checked as soon as its last element is assigned.
struct Search<'a> {
    m: &'a Structure,
    n: &'a Structure,
    order: Vec<(SortId, usize)>,
    checks: Vec<Vec<(usize, &'a [usize])>>,
    fixed: ElemMap,
    injective: bool,
    map: ElemMap,
    used: Vec<Vec<bool>>,
}

impl<'a> Search<'a> {
    fn new(m: &'a Structure, n: &'a Structure, fixed: &[(SortId, usize, usize)], injective: bool) -> Option<Self> {
        let sorts = m.signature().sorts.len();
        let mut order = Vec::new();
        let mut position = vec![Vec::new(); sorts];
        for (s, pos) in position.iter_mut().enumerate() {
            for e in 0..m.size(s) {
                pos.push(order.len());
                order.push((s, e));
            }
        }
        let mut checks = vec![Vec::new(); order.len()];
        let sig = m.signature();
        for (r, t) in m.atoms() {
            let arity = &sig.relations[r].arity;
            match t.iter().zip(arity).map(|(&e, &s)| position[s][e]).max() {
                Some(k) => checks[k].push((r, t.as_slice())),
                None => {
                    // Nullary atom: must hold in the target outright.
                    if !n.relation(r).contains(&[]) {
                        return None;
                    }
                }
            }
        }
        let mut pinned: ElemMap = (0..sorts).map(|s| vec![UNSET; m.size(s)]).collect();
        for &(s, a, b) in fixed {
            if a >= m.size(s) || b >= n.size(s) {
                return None;
            }
            if pinned[s][a] != UNSET && pinned[s][a] != b {
                return None;
            }
            pinned[s][a] = b;
        }
        Some(Search {
            m,
            n,
            order,
            checks,
            fixed: pinned,
            injective,
            map: (0..sorts).map(|s| vec![UNSET; m.size(s)]).collect(),
            used: (0..sorts).map(|s| vec![false; n.size(s)]).collect(),
        })
    }

    fn consistent(&self, k: usize) -> bool {
        let sig = self.m.signature();
        self.checks[k].iter().all(|&(r, t)| {
            let arity = &sig.relations[r].arity;
            self.n
                .relation(r)
                .contains_by(t.len(), |i| self.map[arity[i]][t[i]])
        })
    }

    fn run(&mut self, k: usize, visit: &mut dyn FnMut(&ElemMap) -> bool) -> bool {
        if k == self.order.len() {
            return visit(&self.map);
        }
        let (s, e) = self.order[k];
        let (lo, hi) = match self.fixed[s][e] {
            UNSET => (0, self.n.size(s)),
            b => (b, b + 1),
        };
        for b in lo..hi {
            if self.injective && self.used[s][b] {
                continue;
            }
            self.map[s][e] = b;
            if self.consistent(k) {
                self.used[s][b] = true;
                let go_on = self.run(k + 1, visit);
                self.used[s][b] = false;
                if !go_on {
                    self.map[s][e] = UNSET;
                    return false;
                }
            }
        }
        self.map[s][e] = UNSET;
        true
    }
}

/// Visits relation-preserving maps `m -> n` agreeing with `fixed`
/// (`(sort, source, target)` triples) in lexicographic order until `visit`
/// returns false.
pub fn search_homs(
    m: &Structure,
    n: &Structure,
    fixed: &[(SortId, usize, usize)],
    injective: bool,
    mut visit: impl FnMut(&ElemMap) -> bool,
) {
    if let Some(mut s) = Search::new(m, n, fixed, injective) {
        s.run(0, &mut visit);
    }
}

/// All homomorphisms `m -> n`, lexicographic in carrier order.
pub fn enumerate_homs(m: &Structure, n: &Structure) -> Vec<ElemMap> {
    let mut out = Vec::new();
    search_homs(m, n, &[], false, |h| {
        out.push(h.clone());
        true
    });
    out
}

fn same_shape(m: &Structure, n: &Structure) -> bool {
    let sorts = m.signature().sorts.len();
    let rels = m.signature().relations.len();
    (0..sorts).all(|s| m.size(s) == n.size(s)) && (0..rels).all(|r| m.relation(r).len() == n.relation(r).len())
}

/// Visits isomorphisms `m -> n` agreeing with `fixed`.
pub fn search_isos(
    m: &Structure,
    n: &Structure,
    fixed: &[(SortId, usize, usize)],
    visit: impl FnMut(&ElemMap) -> bool,
) {
    // A bijection mapping each relation injectively into an equally large
    // relation has a relation-preserving inverse.
    if same_shape(m, n) {
        search_homs(m, n, fixed, true, visit);
    }
}

pub fn enumerate_isos(m: &Structure, n: &Structure) -> Vec<ElemMap> {
    let mut out = Vec::new();
    search_isos(m, n, &[], |h| {
        out.push(h.clone());
        true
    });
    out
}

/// Checks that `map` is an isomorphism `m -> n`; the error names a violated atom.
pub fn check_iso(m: &Structure, n: &Structure, map: &ElemMap) -> std::result::Result<(), String> {
    let sig = m.signature();
    for s in 0..sig.sorts.len() {
        if map.get(s).map(Vec::len) != Some(m.size(s)) || m.size(s) != n.size(s) {
            return Err(format!("not a bijection on sort `{}`", sig.sort_name(s)));
        }
        let mut seen = vec![false; n.size(s)];
        for &b in &map[s] {
            if b >= n.size(s) || seen[b] {
                return Err(format!("not a bijection on sort `{}`", sig.sort_name(s)));
            }
            seen[b] = true;
        }
    }
    if map.len() != sig.sorts.len() {
        return Err("map has the wrong number of sorts".into());
    }
    for (r, sym) in sig.relations.iter().enumerate() {
        for t in m.relation(r).tuples() {
            let image: Vec<usize> = t.iter().zip(&sym.arity).map(|(&e, &s)| map[s][e]).collect();
            if !n.relation(r).contains(&image) {
                return Err(format!(
                    "{} holds in {} but {} does not hold in {}",
                    m.show_atom(r, t),
                    m.id,
                    n.show_atom(r, &image),
                    n.id
                ));
            }
        }
        if m.relation(r).len() != n.relation(r).len() {
            let inv = invert(map, n);
            for t in n.relation(r).tuples() {
                let pre: Vec<usize> = t.iter().zip(&sym.arity).map(|(&e, &s)| inv[s][e]).collect();
                if !m.relation(r).contains(&pre) {
                    return Err(format!(
                        "{} holds in {} but {} does not hold in {}",
                        n.show_atom(r, t),
                        n.id,
                        m.show_atom(r, &pre),
                        m.id
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Inverse of a bijective map whose targets live in `n`.
pub fn invert(map: &ElemMap, n: &Structure) -> ElemMap {
    map.iter()
        .enumerate()
        .map(|(s, f)| {
            let mut inv = vec![0; n.size(s)];
            for (a, &b) in f.iter().enumerate() {
                if b < inv.len() {
                    inv[b] = a;
                }
            }
            inv
        })
        .collect()
}

/// `g ∘ f`
pub fn compose(f: &ElemMap, g: &ElemMap) -> ElemMap {
    f.iter()
        .enumerate()
        .map(|(s, fs)| fs.iter().map(|&b| g[s][b]).collect())
        .collect()
}

fn pinned(sorts: &[SortId], a: &[usize], b: &[usize]) -> Result<Vec<(SortId, usize, usize)>> {
    if a.len() != sorts.len() || b.len() != sorts.len() {
        return Err(Error::sort("tuple", "tuple lengths differ from the sort profile"));
    }
    Ok(sorts
        .iter()
        .zip(a.iter().zip(b))
        .map(|(&s, (&x, &y))| (s, x, y))
        .collect())
}

/// Is there a homomorphism `m -> n` sending tuple `a` to tuple `b` pointwise?
pub fn hom_leq(m: &Structure, a: &[usize], n: &Structure, b: &[usize], sorts: &[SortId]) -> Result<bool> {
    let fixed = pinned(sorts, a, b)?;
    let mut found = false;
    search_homs(m, n, &fixed, false, |_| {
        found = true;
        false
    });
    Ok(found)
}

/// Verifies that `pairs` is a partial isomorphism of `m`: a well-defined
/// injective map that preserves and reflects every atom over its domain.
pub fn check_partial_iso(m: &Structure, pairs: &[(SortId, usize, usize)]) -> Result<()> {
    let sig = m.signature();
    let sorts = sig.sorts.len();
    let mut f: ElemMap = (0..sorts).map(|s| vec![UNSET; m.size(s)]).collect();
    let mut back: ElemMap = (0..sorts).map(|s| vec![UNSET; m.size(s)]).collect();
    let name = |s: SortId, e: usize| m.element_name(s, e).to_string();
    for &(s, a, b) in pairs {
        if a >= m.size(s) || b >= m.size(s) {
            return Err(Error::invalid("partial map refers to elements outside the carrier"));
        }
        if f[s][a] != UNSET && f[s][a] != b {
            return Err(Error::NotPartialIso {
                atom: format!("{} is sent to both {} and {}", name(s, a), name(s, f[s][a]), name(s, b)),
            });
        }
        if back[s][b] != UNSET && back[s][b] != a {
            return Err(Error::NotPartialIso {
                atom: format!("{} and {} are both sent to {}", name(s, back[s][b]), name(s, a), name(s, b)),
            });
        }
        f[s][a] = b;
        back[s][b] = a;
    }
    let domain: Vec<Vec<usize>> = f
        .iter()
        .map(|fs| (0..fs.len()).filter(|&e| fs[e] != UNSET).collect())
        .collect();
    for (r, sym) in sig.relations.iter().enumerate() {
        let sizes: Vec<usize> = sym.arity.iter().map(|&s| domain[s].len()).collect();
        for idx in TupleIter::new(sizes) {
            let t: Vec<usize> = idx.iter().zip(&sym.arity).map(|(&i, &s)| domain[s][i]).collect();
            let image: Vec<usize> = t.iter().zip(&sym.arity).map(|(&e, &s)| f[s][e]).collect();
            let (src, dst) = (m.relation(r).contains(&t), m.relation(r).contains(&image));
            if src != dst {
                let (yes, no) = if src { (&t, &image) } else { (&image, &t) };
                return Err(Error::NotPartialIso {
                    atom: format!("{} holds but {} does not", m.show_atom(r, yes), m.show_atom(r, no)),
                });
            }
        }
    }
    Ok(())
}

/// A total automorphism of `m` extending the partial isomorphism `pairs`,
/// found by complete backtracking; `None` if no extension exists.
pub fn extend_partial_iso(m: &Structure, pairs: &[(SortId, usize, usize)]) -> Result<Option<ElemMap>> {
    check_partial_iso(m, pairs)?;
    let mut found = None;
    search_isos(m, m, pairs, |h| {
        found = Some(h.clone());
        false
    });
    Ok(found)
}
