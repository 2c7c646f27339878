use super::*;
use crate::definable::{full_depth, saturate_definables};
use crate::fixtures;
use crate::groupoid::{trivial_indexing, LoadedGroupoid};
use crate::semantics::{definable, hom_leq};
use crate::syntax::{parse_formula, parse_theory};
use std::collections::BTreeSet;

fn param(lg: &LoadedGroupoid, names: &[&str]) -> Vec<usize> {
    names.iter().map(|n| lg.indexing.param(n).unwrap()).collect()
}

/// Orbit by repeatedly applying every arrow until nothing new appears.
fn naive_orbit(g: &Groupoid, start: &BTreeSet<Point>) -> BTreeSet<Point> {
    let mut set = start.clone();
    loop {
        let mut next = set.clone();
        for p in &set {
            for a in g.arrows().iter().filter(|a| a.src == p.object) {
                next.insert(Point::new(a.dst, p.tuple.iter().map(|&e| a.map[0][e]).collect()));
            }
        }
        if next == set {
            return set;
        }
        set = next;
    }
}

fn extension(g: &Groupoid, ctx: &Context, f: &Formula) -> BTreeSet<Point> {
    definable(f, ctx, g.objects()).unwrap().members
}

#[test]
fn gf4_alpha_eliminates() {
    let lg = fixtures::gf4_groupoid();
    let g = &lg.groupoid;
    let e = eliminates_at_tuple(g, &lg.indexing, &param(&lg, &["a"])).unwrap();
    assert!(e.eliminates);
    let f = e.formula.unwrap();
    let ext = extension(g, &e.context, &f);
    let start: BTreeSet<Point> = [Point::new(0, vec![2])].into();
    assert_eq!(ext, naive_orbit(g, &start));
    let names: Vec<&str> = ext.iter().map(|p| g.object(0).element_name(0, p.tuple[0])).collect();
    assert_eq!(names, vec!["a", "b"]);
    let minpoly = parse_formula(g.signature(), &e.context, "exists y, z. Mul(x1, x1, y) & Add(y, x1, z) & One(z)").unwrap();
    assert_eq!(extension(g, &e.context, &minpoly), ext);
}

#[test]
fn subsets_distinct_pair_eliminates() {
    let lg = fixtures::subsets_groupoid();
    let g = &lg.groupoid;
    let e = eliminates_at_tuple(g, &lg.indexing, &param(&lg, &["3", "4"])).unwrap();
    assert!(e.eliminates);
    let neq = parse_formula(g.signature(), &e.context, "Neq(x1, x2)").unwrap();
    assert_eq!(e.orbit.members, extension(g, &e.context, &neq));
    assert_eq!(extension(g, &e.context, e.formula.as_ref().unwrap()), e.orbit.members);
}

#[test]
fn linear_order_top_fails_with_witness() {
    let lg = fixtures::linear_orders_groupoid();
    let g = &lg.groupoid;
    let e = eliminates_at_tuple(g, &lg.indexing, &param(&lg, &["b"])).unwrap();
    assert!(!e.eliminates);
    let w = e.witness.unwrap();
    assert!(e.orbit.contains(&w.inside));
    assert!(!e.orbit.contains(&w.outside));
    let sorts = [0];
    assert!(hom_leq(g.object(w.inside.object), &w.inside.tuple, g.object(w.outside.object), &w.outside.tuple, &sorts).unwrap());
    assert_eq!(g.object(w.inside.object).id, "L2");
    assert_eq!(g.object(w.outside.object).id, "L3");
}

#[test]
fn uninterpreted_tuple_is_rejected() {
    let lg = fixtures::gf_bouquet();
    let g = &lg.groupoid;
    let t = param(&lg, &["0_2", "0_4"]);
    assert!(eliminates_at_tuple(g, &lg.indexing, &t).is_err());
}

#[test]
fn canonical_tuple_counts() {
    assert_eq!(canonical_tuples(2, 2), vec![vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 1]]);
    assert_eq!(canonical_tuples(5, 3).len(), 5 + 15 + 35);
}

#[test]
fn rigid_chain_eliminates() {
    let lg = fixtures::automorphism_groupoid(fixtures::chain3()).unwrap();
    assert_eq!(lg.groupoid.arrows().len(), 1);
    let v = eliminates_parameters(&lg.groupoid, &lg.indexing, 3).unwrap();
    assert!(v.eliminates);
    for e in &v.entries {
        assert_eq!(e.orbit.len(), 1);
        assert_eq!(extension(&lg.groupoid, &e.context, e.formula.as_ref().unwrap()), e.orbit.members);
    }
}

fn is_eq_neq_conjunction(f: &Formula) -> bool {
    match f {
        Formula::True | Formula::Eq(..) => true,
        Formula::Rel(r, _) => r == "Neq",
        Formula::And(ps) => ps.iter().all(is_eq_neq_conjunction),
        _ => false,
    }
}

#[test]
fn subsets_eliminate_with_atomic_formulas() {
    let lg = fixtures::subsets_groupoid();
    let v = eliminates_parameters(&lg.groupoid, &lg.indexing, 3).unwrap();
    assert!(v.eliminates);
    assert_eq!(v.entries.len(), 5 + 15 + 35);
    for e in &v.entries {
        let f = e.formula.as_ref().unwrap();
        assert!(is_eq_neq_conjunction(f), "{f:?}");
        assert_eq!(extension(&lg.groupoid, &e.context, f), e.orbit.members);
        let ub = extension(&lg.groupoid, &e.context, &e.upper_bound);
        assert!(e.orbit.members.is_subset(&ub));
    }
}

#[test]
fn linear_orders_fail_at_bound_one() {
    let lg = fixtures::linear_orders_groupoid();
    let v = eliminates_parameters(&lg.groupoid, &lg.indexing, 1).unwrap();
    assert!(!v.eliminates);
    assert!(v.first_failure().unwrap().witness.is_some());
}

#[test]
fn pf_definable_cases() {
    let lg = fixtures::subsets_groupoid();
    let g = &lg.groupoid;
    let c = Context::numbered("x", &["V"]);
    let full = definable(&Formula::True, &c, g.objects()).unwrap();
    assert_eq!(is_pf_definable(&full, g).unwrap(), Some(Formula::True));

    let s3 = g.object_index("S3").unwrap();
    let single = DefinableSet::new(c.clone(), [Point::new(s3, vec![0])].into());
    assert_eq!(is_pf_definable(&single, g).unwrap(), None);

    let c2 = Context::numbered("x", &["V", "V"]);
    let neq = definable(&parse_formula(g.signature(), &c2, "Neq(x1, x2)").unwrap(), &c2, g.objects()).unwrap();
    let f = is_pf_definable(&neq, g).unwrap().unwrap();
    assert_eq!(extension(g, &c2, &f), neq.members);
}

#[test]
fn pf_definability_agrees_with_saturation() {
    for lg in [fixtures::linear_orders_groupoid(), fixtures::subsets_up_to(2), fixtures::gf4_groupoid()] {
        let g = &lg.groupoid;
        let sort = g.signature().sort_name(0).to_string();
        let c = Context::numbered("x", &[sort.as_str()]);
        let space = PointSpace::new(g, &c).unwrap();
        let mut fam = saturate_definables(&space, full_depth(g));
        let n = space.len();
        for mask in 0u32..1 << n {
            let mut bits = space.empty_set();
            (0..n).filter(|i| mask >> i & 1 == 1).for_each(|i| bits.insert(i));
            let d = space.to_definable(&bits);
            let f = is_pf_definable(&d, g).unwrap();
            assert_eq!(f.is_some(), fam.contains_bits(&bits));
            if let Some(f) = f {
                assert_eq!(extension(g, &c, &f), d.members);
            }
        }
    }
}

#[test]
fn decidable_subsets_are_conservative() {
    let lg = fixtures::subsets_groupoid();
    let t = fixtures::decidable_theory();
    let pool = FormulaPool::atomic(lg.groupoid.signature(), 2, true);
    let v = conservative_at_level(&lg.groupoid, &t, &pool, 4, 4, 1 << 20).unwrap();
    assert!(v.conservative, "{:?}", v.countermodel);
    assert!(v.containments > 0);
    assert_eq!(v.models_checked, 4);
}

#[test]
fn all_small_models_are_trivially_conservative() {
    let t = parse_theory("sort V\nrel P(V)\naxiom inhabited true => exists x. x = x").unwrap();
    let sig = Arc::new(t.signature.clone());
    let mut objects = Vec::new();
    for n in 1..=2 {
        let carriers = default_carriers(&sig, &[n]);
        for_each_structure(&sig, &carriers, "M", 1 << 10, |m| {
            objects.push(m.renamed(format!("M{}", objects.len())));
            true
        })
        .unwrap();
    }
    let g = Groupoid::etale_complete(objects).unwrap();
    let pool = FormulaPool::atomic(&sig, 2, true);
    let v = conservative_at_level(&g, &t, &pool, 2, 2, 1 << 20).unwrap();
    assert!(v.conservative);
}

#[test]
fn two_element_set_is_not_conservative() {
    let t = fixtures::decidable_theory();
    let lg = fixtures::subsets_up_to(2);
    let g = &lg.groupoid;
    let s01 = g.object_index("S01").unwrap();
    let only = Groupoid::etale_complete(vec![g.object(s01).clone()]).unwrap();
    let empty = Context::empty();
    let three = parse_formula(
        only.signature(),
        &empty,
        "exists x, y, z. Neq(x, y) & Neq(x, z) & Neq(y, z)",
    )
    .unwrap();
    let pool = FormulaPool::new(vec![
        PoolEntry { context: empty.clone(), formula: three.clone() },
        PoolEntry { context: empty.clone(), formula: Formula::False },
    ]);
    let v = conservative_at_level(&only, &t, &pool, 3, 3, 1 << 20).unwrap();
    assert!(!v.conservative);
    let cm = v.countermodel.unwrap();
    assert_eq!(cm.premise, three);
    assert_eq!(cm.conclusion, Formula::False);
    assert_eq!(cm.model.total_size(), 3);
    let _ = trivial_indexing(&only);
}

#[test]
fn failing_object_is_reported_separately() {
    let t = parse_theory("sort V\nrel Neq(V, V)\naxiom [x] true => Neq(x, x)").unwrap();
    let lg = fixtures::subsets_up_to(1);
    let pool = FormulaPool::atomic(lg.groupoid.signature(), 1, false);
    let v = conservative_at_level(&lg.groupoid, &t, &pool, 2, 2, 1 << 20).unwrap();
    assert!(!v.conservative);
    assert_eq!(v.object_failures.len(), 1);
    assert!(v.countermodel.is_none());
}
