use super::{Groupoid, Indexing, Morphism};
use crate::error::{Error, Result};
use crate::semantics::{check_iso, enumerate_isos, for_each_structure, interpretation_count, CompiledTheory, ElemMap, Structure};
use crate::syntax::{SortId, Theory};
use std::sync::Arc;

/// Same objects with every isomorphism between them as arrows.
pub fn etale_completion(g: &Groupoid) -> Groupoid {
    let mut arrows = Vec::new();
    for i in 0..g.len() {
        for j in 0..g.len() {
            for map in enumerate_isos(g.object(i), g.object(j)) {
                arrows.push(Morphism { src: i, dst: j, map });
            }
        }
    }
    Groupoid::assemble(g.signature().clone(), g.objects().to_vec(), arrows).expect("isomorphisms are closed")
}

/// Disjoint union of single-object groupoids. Each arrow list must be a
/// subgroup of the automorphisms of its structure; the identity may be left
/// implicit.
pub fn bouquet(components: Vec<(Structure, Vec<ElemMap>)>) -> Result<Groupoid> {
    let mut objects = Vec::new();
    let mut arrows = Vec::new();
    for (i, (m, maps)) in components.into_iter().enumerate() {
        arrows.push(Morphism::identity(i, &m));
        for map in maps {
            arrows.push(Morphism { src: i, dst: i, map });
        }
        objects.push(m);
    }
    for a in &arrows {
        check_iso(&objects[a.src], &objects[a.dst], &a.map).map_err(|atom| Error::NotIsomorphism {
            arrow: a.describe(&objects),
            atom,
        })?;
    }
    arrows.sort();
    arrows.dedup();
    Groupoid::new(objects, arrows, false)
}

/// The groupoid of all indexed models of a theory whose carriers are
/// quotients of subsets of a finite parameter set, with all isomorphisms.
#[derive(Debug, Clone)]
pub struct MaximalGroupoid {
    pub groupoid: Groupoid,
    pub indexing: Indexing,
    /// Candidate indexed structures examined before the theory filter.
    pub candidates: usize,
    pub scheme_bound: usize,
    pub schemes_inconclusive: bool,
}

/// Partitions of `0..n` as restricted growth strings, lexicographically.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max {
            cur.push(b);
            go(i + 1, n, if b == max { max + 1 } else { max }, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, 0, &mut Vec::new(), &mut out);
    out
}

/// Per-sort subquotients of the parameters of that sort: a list of blocks,
/// each a sorted list of parameter positions.
fn subquotients(members: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    for mask in 0u64..(1 << members.len()) {
        let subset: Vec<usize> = (0..members.len()).filter(|&i| mask >> i & 1 == 1).map(|i| members[i]).collect();
        for rgs in partitions(subset.len()) {
            let blocks = rgs.iter().copied().max().map_or(0, |b| b + 1);
            let mut bs = vec![Vec::new(); blocks];
            for (k, &b) in rgs.iter().enumerate() {
                bs[b].push(subset[k]);
            }
            out.push(bs);
        }
    }
    out
}

/// Enumerates, in canonical order, one object per choice of subset of the
/// parameters, equivalence relation on it and relational interpretation,
/// keeping those that satisfy `t` (schemes instantiated up to
/// `scheme_bound`). Fails when more than `cap` candidates would be examined.
pub fn maximal_groupoid(t: &Theory, params: &[(String, String)], scheme_bound: usize, cap: usize) -> Result<MaximalGroupoid> {
    let sig = Arc::new(t.signature.clone());
    let mut ps: Vec<(String, SortId)> = Vec::new();
    for (p, s) in params {
        let sid = sig.sort_id(s).ok_or_else(|| Error::sort(p.clone(), format!("undeclared sort `{s}`")))?;
        ps.push((p.clone(), sid));
    }
    if params.len() > 16 {
        return Err(Error::cap("parameters", params.len(), 16));
    }
    let compiled = CompiledTheory::new(&sig, t, scheme_bound)?;
    let per_sort: Vec<Vec<Vec<Vec<usize>>>> = (0..sig.sorts.len())
        .map(|s| {
            let members: Vec<usize> = (0..ps.len()).filter(|&p| ps[p].1 == s).collect();
            subquotients(&members)
        })
        .collect();

    let mut choices: Vec<Vec<usize>> = vec![Vec::new()];
    for options in &per_sort {
        choices = choices
            .into_iter()
            .flat_map(|c| {
                (0..options.len()).map(move |k| {
                    let mut c = c.clone();
                    c.push(k);
                    c
                })
            })
            .collect();
    }
    let mut candidates = 0usize;
    for c in &choices {
        let sizes: Vec<usize> = c.iter().enumerate().map(|(s, &k)| per_sort[s][k].len()).collect();
        candidates = candidates.saturating_add(interpretation_count(&sig, &sizes));
    }
    if candidates > cap {
        return Err(Error::cap("candidate indexed structures", candidates, cap));
    }

    let mut objects = Vec::new();
    let mut interp = Vec::new();
    for c in &choices {
        let blocks: Vec<&Vec<Vec<usize>>> = c.iter().enumerate().map(|(s, &k)| &per_sort[s][k]).collect();
        let carriers: Vec<Vec<String>> = blocks
            .iter()
            .map(|bs| {
                bs.iter()
                    .map(|b| b.iter().map(|&p| ps[p].0.as_str()).collect::<Vec<_>>().join("~"))
                    .collect()
            })
            .collect();
        let mut row = vec![None; ps.len()];
        for bs in &blocks {
            for (e, b) in bs.iter().enumerate() {
                for &p in b {
                    row[p] = Some(e);
                }
            }
        }
        for_each_structure(&sig, &carriers, "", usize::MAX, |m| {
            if compiled.holds(&m) {
                objects.push(m.renamed(format!("M{}", objects.len())));
                interp.push(row.clone());
            }
            true
        })?;
    }
    let discrete = Groupoid::assemble(sig.clone(), objects, Vec::new())?;
    let groupoid = etale_completion(&discrete);
    let indexing = Indexing::new(&groupoid, ps, interp)?;
    Ok(MaximalGroupoid {
        groupoid,
        indexing,
        candidates,
        scheme_bound,
        schemes_inconclusive: compiled.schemes_inconclusive,
    })
}

/// Searches for an object and a sort-preserving partial map `σ` on the
/// parameters such that the reindexed model (interpretations `old ∘ σ`) is
/// surjective but not isomorphic, as an indexed model, to any object.
/// Returns `(object, σ)` for the first failure.
pub fn reindexing_counterexample(g: &Groupoid, ix: &Indexing) -> Option<(usize, Vec<Option<usize>>)> {
    let n = ix.len();
    let choices: Vec<Vec<Option<usize>>> = (0..n)
        .map(|p| std::iter::once(None).chain((0..n).filter(|&q| ix.sort(q) == ix.sort(p)).map(Some)).collect())
        .collect();
    let sizes: Vec<usize> = choices.iter().map(Vec::len).collect();
    let sorts = g.signature().sorts.len();
    for o in 0..g.len() {
        let m = g.object(o);
        for pick in crate::semantics::TupleIter::new(sizes.clone()) {
            let sigma: Vec<Option<usize>> = pick.iter().enumerate().map(|(p, &k)| choices[p][k]).collect();
            let row: Vec<Option<usize>> = sigma.iter().map(|t| t.and_then(|q| ix.get(o, q))).collect();
            let mut hit: Vec<Vec<bool>> = (0..sorts).map(|s| vec![false; m.size(s)]).collect();
            for (p, v) in row.iter().enumerate() {
                if let Some(e) = v {
                    hit[ix.sort(p)][*e] = true;
                }
            }
            if !hit.iter().flatten().all(|&h| h) {
                continue;
            }
            if !reindexed_iso_exists(g, ix, o, &row) {
                return Some((o, sigma));
            }
        }
    }
    None
}

fn reindexed_iso_exists(g: &Groupoid, ix: &Indexing, o: usize, row: &[Option<usize>]) -> bool {
    let m = g.object(o);
    (0..g.len()).any(|t| {
        enumerate_isos(m, g.object(t))
            .iter()
            .any(|map| (0..ix.len()).all(|p| row[p].map(|e| map[ix.sort(p)][e]) == ix.get(t, p)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts_are_bell_numbers() {
        let bell: Vec<usize> = (0..6).map(|n| partitions(n).len()).collect();
        assert_eq!(bell, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn subquotients_of_two() {
        assert_eq!(subquotients(&[0, 1]).len(), 5);
    }
}
