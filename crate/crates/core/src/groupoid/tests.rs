use super::*;
use crate::fixtures;
use crate::semantics::compose;
use crate::syntax::{parse_theory, Signature};
use std::collections::BTreeMap;

fn two_sets_with_neq() -> Vec<Structure> {
    let mut sig = Signature::new();
    sig.add_sort("V").unwrap();
    sig.add_relation("Neq", &["V", "V"]).unwrap();
    let sig = Arc::new(sig);
    ["A", "B"]
        .iter()
        .map(|id| {
            Structure::from_indices(*id, sig.clone(), vec![vec!["x".into(), "y".into()]], vec![vec![vec![0, 1], vec![1, 0]]])
                .unwrap()
        })
        .collect()
}

/// Closure of an arrow set under composition and inverses by naive iteration.
fn brute_closure(objects: &[Structure], arrows: Vec<Morphism>) -> BTreeSet<Morphism> {
    let mut set: BTreeSet<Morphism> = arrows.into_iter().collect();
    for (i, m) in objects.iter().enumerate() {
        set.insert(Morphism::identity(i, m));
    }
    loop {
        let mut next = set.clone();
        for a in &set {
            next.insert(a.inverse(&objects[a.dst]));
            for b in &set {
                if a.dst == b.src {
                    next.insert(Morphism {
                        src: a.src,
                        dst: b.dst,
                        map: compose(&a.map, &b.map),
                    });
                }
            }
        }
        if next == set {
            return set;
        }
        set = next;
    }
}

#[test]
fn single_object_identity_is_valid() {
    let g = Groupoid::discrete(vec![fixtures::k2()]).unwrap();
    assert_eq!(g.arrows().len(), 1);
    assert!(g.arrows()[0].is_identity());
}

#[test]
fn missing_inverse_is_rejected_without_auto_complete() {
    let a = fixtures::k2().renamed("A");
    let b = fixtures::k2().renamed("B");
    let arrows = vec![
        Morphism::identity(0, &a),
        Morphism::identity(1, &b),
        Morphism { src: 0, dst: 1, map: vec![vec![1, 0]] },
    ];
    let err = Groupoid::new(vec![a, b], arrows, false).unwrap_err();
    assert!(matches!(err, Error::ClosureViolation { .. }), "{err:?}");
}

#[test]
fn auto_complete_matches_brute_closure() {
    let a = fixtures::k2().renamed("A");
    let b = fixtures::k2().renamed("B");
    let objects = vec![a.clone(), b.clone()];
    let cross = Morphism { src: 0, dst: 1, map: vec![vec![1, 0]] };
    let g = Groupoid::new(objects.clone(), vec![cross.clone()], true).unwrap();
    let expected = brute_closure(&objects, vec![cross]);
    let got: BTreeSet<Morphism> = g.arrows().iter().cloned().collect();
    assert_eq!(got, expected);
    assert_eq!(g.hom(0, 1).len(), 1);
    assert_eq!(g.hom(1, 0).len(), 1);
}

#[test]
fn non_iso_arrow_names_atom() {
    let a = fixtures::k2();
    let arrows = vec![Morphism { src: 0, dst: 0, map: vec![vec![0, 0]] }];
    let err = Groupoid::new(vec![a], arrows, true).unwrap_err();
    assert!(matches!(err, Error::NotIsomorphism { .. }), "{err:?}");
}

#[test]
fn etale_completion_adds_frobenius() {
    let g = fixtures::gf4_identity_groupoid().groupoid;
    assert_eq!(g.arrows().len(), 1);
    let c = g.etale_completion();
    assert_eq!(c.arrows().len(), 2);
    assert_eq!(c.etale_completion().arrows(), c.arrows());
    assert!(c.missing_iso().is_none());
    assert!(g.missing_iso().is_some());
}

#[test]
fn etale_completion_of_two_sets() {
    let objects = two_sets_with_neq();
    let g = Groupoid::discrete(objects).unwrap();
    let c = g.etale_completion();
    assert_eq!(c.hom(0, 0).len(), 2);
    assert_eq!(c.hom(1, 1).len(), 2);
    assert_eq!(c.hom(0, 1).len() + c.hom(1, 0).len(), 4);
    for a in g.arrows() {
        assert!(c.contains_arrow(a));
    }
}

#[test]
fn hom_sets_are_torsors() {
    let lg = fixtures::subsets_up_to(3);
    let g = &lg.groupoid;
    for i in 0..g.len() {
        let aut = g.hom(i, i).len();
        for j in 0..g.len() {
            let n = g.hom(i, j).len();
            assert!(n == 0 || n == aut);
        }
    }
}

#[test]
fn disjoint_indexing_counts() {
    let objects = vec![
        fixtures::k2(),
        fixtures::graph("K3", &["a", "b", "c"], &[("a", "b"), ("a", "c"), ("b", "c")], true),
    ];
    let g = Groupoid::etale_complete(objects).unwrap();
    let ix = disjoint_indexing(&g);
    assert_eq!(ix.len(), 5);
    assert!(ix.is_disjoint());
    assert_eq!(ix.objects_interpreting(&[0]), vec![0]);
    assert_eq!(ix.get(1, 0), None);
}

#[test]
fn trivial_indexing_is_total_on_one_object() {
    let g = Groupoid::etale_complete(vec![fixtures::k3()]).unwrap();
    let ix = trivial_indexing(&g);
    assert_eq!(ix.len(), 3);
    assert!((0..3).all(|p| ix.get(0, p).is_some()));
}

fn names(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

#[test]
fn shared_indexing_cases() {
    let g = Groupoid::etale_complete(vec![fixtures::k2()]).unwrap();
    let params = vec![("p".to_string(), "V".to_string()), ("q".to_string(), "V".to_string())];
    let ok = BTreeMap::from([("K2".to_string(), names(&[("p", "a"), ("q", "b")]))]);
    assert!(shared_indexing(&g, &params, &ok).is_ok());

    let three = vec![
        ("p".to_string(), "V".to_string()),
        ("q".to_string(), "V".to_string()),
        ("r".to_string(), "V".to_string()),
    ];
    let collapsed = BTreeMap::from([("K2".to_string(), names(&[("p", "a"), ("q", "a"), ("r", "b")]))]);
    assert!(shared_indexing(&g, &three, &collapsed).is_ok());

    let missing = BTreeMap::from([("K2".to_string(), names(&[("p", "a")]))]);
    match shared_indexing(&g, &params, &missing).unwrap_err() {
        Error::NotSurjective { element, .. } => assert_eq!(element, "b"),
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn reindex_cases() {
    let g = Groupoid::etale_complete(vec![fixtures::k2()]).unwrap();
    let ix = trivial_indexing(&g);
    assert_eq!(ix.reindex(&g, &[Some(0), Some(1)]).unwrap(), ix);
    let swapped = ix.reindex(&g, &[Some(1), Some(0)]).unwrap();
    assert_eq!(swapped.get(0, 0), ix.get(0, 1));
    assert_eq!(swapped.get(0, 1), ix.get(0, 0));
    let err = ix.reindex(&g, &[Some(0), Some(0)]).unwrap_err();
    assert!(matches!(err, Error::NotSurjective { .. }), "{err:?}");
}

#[test]
fn bouquet_cases() {
    let single = bouquet(vec![(fixtures::chain3(), vec![])]).unwrap();
    assert_eq!(single.arrows().len(), 1);

    let gf2 = fixtures::gf2();
    let gf4 = fixtures::gf4();
    let frob = vec![vec![0, 1, 3, 2]];
    let b = bouquet(vec![(gf2, vec![]), (gf4.clone(), vec![frob])]).unwrap();
    assert_eq!(b.arrows().len(), 3);
    assert_eq!(b.components().len(), 2);

    let k3 = fixtures::k3();
    let rotation = vec![vec![1, 2, 0]];
    let err = bouquet(vec![(k3, vec![rotation])]).unwrap_err();
    assert!(matches!(err, Error::ClosureViolation { .. }), "{err:?}");
}

#[test]
fn maximal_groupoid_of_empty_theory() {
    let t = parse_theory("sort V").unwrap();
    let params = vec![("p1".to_string(), "V".to_string()), ("p2".to_string(), "V".to_string())];
    let mg = maximal_groupoid(&t, &params, 2, 1000).unwrap();
    assert_eq!(mg.groupoid.len(), 5);
    assert!(mg.groupoid.missing_iso().is_none());
    assert!(reindexing_counterexample(&mg.groupoid, &mg.indexing).is_none());

    let inhabited = parse_theory("sort V\naxiom true => exists x. x = x").unwrap();
    let mg = maximal_groupoid(&inhabited, &params, 2, 1000).unwrap();
    assert_eq!(mg.groupoid.len(), 4);
}

#[test]
fn maximal_groupoid_cap() {
    let t = parse_theory("sort V\nrel E(V, V)").unwrap();
    let params: Vec<(String, String)> = (0..3).map(|i| (format!("p{i}"), "V".to_string())).collect();
    let err = maximal_groupoid(&t, &params, 2, 10).unwrap_err();
    assert!(matches!(err, Error::CapExceeded { .. }), "{err:?}");
}

#[test]
fn maximal_groupoid_closed_under_reindexing_at_three() {
    let t = parse_theory("sort V\nrel P(V)").unwrap();
    let params: Vec<(String, String)> = (0..3).map(|i| (format!("p{i}"), "V".to_string())).collect();
    let mg = maximal_groupoid(&t, &params, 2, 100_000).unwrap();
    assert!(reindexing_counterexample(&mg.groupoid, &mg.indexing).is_none());
}

#[test]
fn document_round_trip() {
    let lg = fixtures::gf_bouquet();
    let doc = GroupoidDoc::from_groupoid(&lg.groupoid, Some(&lg.indexing));
    let again = load_groupoid(&doc.to_json()).unwrap();
    assert_eq!(again.groupoid, lg.groupoid);
    assert_eq!(again.indexing, lg.indexing);
}

#[test]
fn document_rejects_unknown_fields() {
    let text = r#"{"signature": {"sorts": ["V"]}, "objects": [], "extra": 1}"#;
    assert!(matches!(load_groupoid(text).unwrap_err(), Error::Json(_)));
}
