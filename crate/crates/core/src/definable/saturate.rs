use super::space::{HomCache, PointSpace};
use crate::error::{Error, Result};
use crate::groupoid::Groupoid;
use crate::semantics::DefinableSet;
use crate::syntax::Context;
use fixedbitset::FixedBitSet;
use std::collections::BTreeSet;

/// Default bound on the number of sets materialized from a family.
pub const DEFAULT_FAMILY_CAP: usize = 1 << 16;

/// The parameter-free definable sets of one context using at most
/// `max_extra_vars` nested quantifiers. They are exactly the sets up-closed
/// under the preorder of the existential positive game of that depth, which
/// is what is stored; the sets themselves are produced on demand.
pub struct DefinableFamily<'s, 'g> {
    cache: HomCache<'s, 'g>,
    pub max_extra_vars: usize,
    generators: Vec<FixedBitSet>,
}

impl<'s, 'g> DefinableFamily<'s, 'g> {
    pub fn space(&self) -> &'s PointSpace<'g> {
        self.cache.space()
    }

    /// Principal up-sets, distinct, in order of least member.
    pub fn generators(&self) -> &[FixedBitSet] {
        &self.generators
    }

    pub fn contains_bits(&mut self, bits: &FixedBitSet) -> bool {
        self.cache.is_up_closed(bits)
    }

    pub fn contains(&mut self, d: &DefinableSet) -> Result<bool> {
        let bits = self.space().to_bits(d)?;
        Ok(self.contains_bits(&bits))
    }

    pub fn cache(&mut self) -> &mut HomCache<'s, 'g> {
        &mut self.cache
    }

    /// Every member set, closing the generators under union; fails once more
    /// than `cap` sets appear.
    pub fn enumerate(&self, cap: usize) -> Result<Vec<FixedBitSet>> {
        union_closure(self.space(), &self.generators, cap)
    }
}

/// All unions of `generators` (including the empty union), sorted by
/// cardinality and then by members.
pub(crate) fn union_closure(space: &PointSpace<'_>, generators: &[FixedBitSet], cap: usize) -> Result<Vec<FixedBitSet>> {
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = vec![space.empty_set()];
    seen.insert(Vec::new());
    let mut frontier = 0;
    while frontier < out.len() {
        let base = out[frontier].clone();
        frontier += 1;
        for gen in generators {
            if gen.is_subset(&base) {
                continue;
            }
            let mut u = base.clone();
            u.union_with(gen);
            if seen.insert(u.ones().collect()) {
                out.push(u);
                if out.len() > cap {
                    return Err(Error::cap("sets in the definable family", out.len(), cap));
                }
            }
        }
    }
    out.sort_by_cached_key(|s| (s.count_ones(..), s.ones().collect::<Vec<_>>()));
    Ok(out)
}

/// The family of parameter-free definables over `space` with at most
/// `max_extra_vars` nested quantifiers.
pub fn saturate_definables<'s, 'g>(space: &'s PointSpace<'g>, max_extra_vars: usize) -> DefinableFamily<'s, 'g> {
    let mut cache = HomCache::with_depth(space, max_extra_vars);
    let mut generators: Vec<FixedBitSet> = Vec::new();
    for c in 0..cache.classes().len() {
        let rep = cache.classes().reps[c];
        let up = cache.up_set(rep).clone();
        if !generators.contains(&up) {
            generators.push(up);
        }
    }
    generators.sort_by_key(|s| s.ones().next());
    DefinableFamily {
        cache,
        max_extra_vars,
        generators,
    }
}

/// Quantifier depth at which the game preorder coincides with the
/// hom-preorder: the largest total carrier size.
pub fn full_depth(g: &Groupoid) -> usize {
    g.objects().iter().map(|m| m.total_size()).max().unwrap_or(0)
}

/// Convenience wrapper returning the whole family as definable sets.
pub fn saturate_family(g: &Groupoid, context: &Context, max_extra_vars: usize, cap: usize) -> Result<Vec<DefinableSet>> {
    let space = PointSpace::new(g, context)?;
    let fam = saturate_definables(&space, max_extra_vars);
    Ok(fam.enumerate(cap)?.iter().map(|b| space.to_definable(b)).collect())
}
