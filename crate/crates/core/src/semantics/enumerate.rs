use super::structure::{Structure, TupleIter};
use crate::error::{Error, Result};
use crate::syntax::Signature;
use std::sync::Arc;

/// Number of relational interpretations over carriers of the given sizes,
/// saturating at `usize::MAX`.
pub fn interpretation_count(sig: &Signature, sizes: &[usize]) -> usize {
    let slots: usize = sig
        .relations
        .iter()
        .map(|r| r.arity.iter().map(|&s| sizes[s]).product::<usize>())
        .sum();
    if slots >= usize::BITS as usize {
        usize::MAX
    } else {
        1usize << slots
    }
}

/// Element names used for enumerated carriers: `e0, e1, ...` per sort.
pub fn default_carriers(sig: &Signature, sizes: &[usize]) -> Vec<Vec<String>> {
    (0..sig.sorts.len())
        .map(|s| (0..sizes[s]).map(|i| format!("e{i}")).collect())
        .collect()
}

/// Visits every structure with the given carriers, in order of the binary
/// counter over all possible atoms, until `visit` returns false. Fails
/// without visiting anything when there are more than `cap` candidates.
pub fn for_each_structure(
    sig: &Arc<Signature>,
    carriers: &[Vec<String>],
    id: &str,
    cap: usize,
    mut visit: impl FnMut(Structure) -> bool,
) -> Result<usize> {
    let sizes: Vec<usize> = carriers.iter().map(Vec::len).collect();
    let count = interpretation_count(sig, &sizes);
    if count > cap {
        return Err(Error::cap(format!("structures with carrier sizes {sizes:?}"), count, cap));
    }
    let slots: Vec<(usize, Vec<usize>)> = sig
        .relations
        .iter()
        .enumerate()
        .flat_map(|(r, sym)| {
            TupleIter::new(sym.arity.iter().map(|&s| sizes[s]).collect()).map(move |t| (r, t))
        })
        .collect();
    for mask in 0..count {
        let mut rels = vec![Vec::new(); sig.relations.len()];
        for (i, (r, t)) in slots.iter().enumerate() {
            if mask >> i & 1 == 1 {
                rels[*r].push(t.clone());
            }
        }
        let m = Structure::from_indices(id, sig.clone(), carriers.to_vec(), rels)?;
        if !visit(m) {
            break;
        }
    }
    Ok(count)
}
