//! Definables with parameters, the groupoid action on points, orbits and
//! the parameter-free definability oracles.

mod saturate;
mod space;

pub(crate) use saturate::union_closure;
pub use saturate::{full_depth, saturate_definables, saturate_family, DefinableFamily, DEFAULT_FAMILY_CAP};
pub use space::{all_points, HomCache, OrbitClasses, PointSpace, DEFAULT_POINT_CAP};

use crate::error::{Error, Result};
use crate::groupoid::{Groupoid, Indexing, Morphism};
use crate::semantics::{Compiled, DefinableSet, Point};
use crate::syntax::{Context, Formula, Term};
use std::collections::BTreeSet;

/// `⟦c : f⟧` where `f` may mention parameters of `ix`; only objects
/// interpreting every parameter of `f` contribute.
pub fn definable_with_params(f: &Formula, c: &Context, g: &Groupoid, ix: &Indexing) -> Result<DefinableSet> {
    let compiled = Compiled::with_params(g.signature(), c, f, &ix.param_sorts(g))?;
    let ps: Vec<usize> = compiled
        .params()
        .iter()
        .map(|(p, _)| ix.param(p).ok_or_else(|| Error::UnknownParameter(p.clone())))
        .collect::<Result<_>>()?;
    let mut members = BTreeSet::new();
    for o in ix.objects_interpreting(&ps) {
        let values = ix.tuple(o, &ps).expect("interpreted");
        for t in compiled.extension(g.object(o), &values) {
            members.insert(Point::new(o, t));
        }
    }
    Ok(DefinableSet::new(c.clone(), members))
}

/// Context `x1, ..., xn` matching the sorts of a parameter tuple.
pub fn tuple_context(g: &Groupoid, ix: &Indexing, params: &[usize]) -> Context {
    let sorts: Vec<&str> = params.iter().map(|&p| g.signature().sort_name(ix.sort(p))).collect();
    Context::numbered("x", &sorts)
}

/// `x⃗ = m⃗` as a formula with parameters.
pub fn tuple_formula(ctx: &Context, names: &[&str]) -> Formula {
    Formula::and(
        ctx.names()
            .zip(names)
            .map(|(x, m)| Formula::Eq(Term::var(x), Term::param(m)))
            .collect(),
    )
}

/// `⟦x⃗ = m⃗⟧`: one point per object interpreting the whole tuple.
pub fn tuple_definable(g: &Groupoid, ix: &Indexing, params: &[usize]) -> DefinableSet {
    let ctx = tuple_context(g, ix, params);
    let members = ix
        .objects_interpreting(params)
        .into_iter()
        .map(|o| Point::new(o, ix.tuple(o, params).unwrap()))
        .collect();
    DefinableSet::new(ctx, members)
}

/// Transports a point along an arrow leaving its object.
pub fn act(g: &Groupoid, d: &Context, p: &Point, a: &Morphism) -> Result<Point> {
    if a.src != p.object {
        return Err(Error::invalid(format!(
            "arrow leaves {} but the point lies over {}",
            g.object(a.src).id,
            g.object(p.object).id
        )));
    }
    let sorts = d.sort_ids(g.signature())?;
    if sorts.len() != p.tuple.len() {
        return Err(Error::sort("point", "tuple does not match the context"));
    }
    Ok(Point::new(
        a.dst,
        p.tuple.iter().zip(&sorts).map(|(&e, &s)| a.apply(s, e)).collect(),
    ))
}

/// Smallest stable superset.
pub fn orbit(d: &DefinableSet, g: &Groupoid) -> Result<DefinableSet> {
    let space = PointSpace::new(g, &d.context)?;
    let bits = space.to_bits(d)?;
    Ok(space.to_definable(&space.orbit(&bits)))
}

pub fn is_stable(d: &DefinableSet, g: &Groupoid) -> Result<bool> {
    let space = PointSpace::new(g, &d.context)?;
    let bits = space.to_bits(d)?;
    Ok(space.is_stable(&bits))
}

/// `⋀ x_i = x_j` over the positions where the parameter names coincide
/// (each repeat tied to its first occurrence).
pub fn upper_bound_formula(names: &[&str], ctx: &Context) -> Formula {
    let vars: Vec<&str> = ctx.names().collect();
    let mut parts = Vec::new();
    for j in 0..names.len() {
        if let Some(i) = (0..j).find(|&i| names[i] == names[j]) {
            parts.push(Formula::eq_vars(vars[i], vars[j]));
        }
    }
    Formula::and(parts)
}
