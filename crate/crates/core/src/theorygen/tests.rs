use super::*;
use crate::definable::tuple_definable;
use crate::elimination::{eliminates_parameters, FormulaPool};
use crate::fixtures;
use crate::groupoid::trivial_indexing;
use crate::semantics::{check_theory, definable, Point, Structure};
use crate::syntax::{parse_formula, parse_theory, print_theory};
use std::collections::BTreeSet;

fn small_bounds() -> SynthesisBounds {
    SynthesisBounds {
        vars: 2,
        premise_atoms: 2,
        conclusion_atoms: 2,
        exists: false,
        max_axioms: 5000,
    }
}

#[test]
fn relation_names_are_injective() {
    assert_eq!(tuple_relation_name(&["a", "b"]), "R__a_b");
    let names = [
        tuple_relation_name(&["a_b"]),
        tuple_relation_name(&["a", "b"]),
        tuple_relation_name(&["aZ5fZb"]),
        tuple_relation_name(&["0_2"]),
    ];
    let set: BTreeSet<&String> = names.iter().collect();
    assert_eq!(set.len(), names.len());
}

#[test]
fn extension_counts() {
    let lg = fixtures::subsets_up_to(2);
    let ext = extend_signature(&lg.groupoid, &lg.indexing, 2).unwrap();
    assert_eq!(lg.indexing.len(), 2);
    assert_eq!(ext.tuples.len(), 2 + 4);
    assert_eq!(ext.signature.relations.len(), ext.base_relations + 6);
    let one = fixtures::subsets_up_to(1);
    assert_eq!(extend_signature(&one.groupoid, &one.indexing, 1).unwrap().tuples.len(), 1);
    assert!(extend_signature(&one.groupoid, &one.indexing, 0).is_err());
}

#[test]
fn gf4_alpha_relation_is_its_orbit() {
    let lg = fixtures::gf4_groupoid();
    let ext = extend_signature(&lg.groupoid, &lg.indexing, 1).unwrap();
    let g = interpret_extension(&lg.groupoid, &lg.indexing, &ext).unwrap();
    assert_eq!(g.arrows().len(), lg.groupoid.arrows().len());
    let m = g.object(0);
    let rows = m.relation_by_name("R__a").unwrap().tuples();
    let names: BTreeSet<&str> = rows.iter().map(|t| m.element_name(0, t[0])).collect();
    assert_eq!(names, ["a", "b"].into());
}

#[test]
fn rigid_object_relations_are_singletons() {
    let lg = fixtures::automorphism_groupoid(fixtures::chain3()).unwrap();
    let ext = extend_signature(&lg.groupoid, &lg.indexing, 1).unwrap();
    let g = interpret_extension(&lg.groupoid, &lg.indexing, &ext).unwrap();
    for (name, t) in &ext.tuples {
        let rows = g.object(0).relation_by_name(name).unwrap().tuples();
        assert_eq!(rows, &[vec![lg.indexing.get(0, t[0]).unwrap()]]);
    }
}

#[test]
fn extension_relations_are_orbits_on_corpus() {
    for lg in [fixtures::subsets_up_to(3), fixtures::linear_orders_groupoid(), fixtures::two_block_groupoid()] {
        let ext = extend_signature(&lg.groupoid, &lg.indexing, 2).unwrap();
        let g = interpret_extension(&lg.groupoid, &lg.indexing, &ext).unwrap();
        for (name, t) in &ext.tuples {
            let d = tuple_definable(&lg.groupoid, &lg.indexing, t);
            let orbit = crate::definable::orbit(&d, &lg.groupoid).unwrap();
            let sorts: Vec<&str> = d.context.sorts().collect();
            let c = crate::syntax::Context::numbered("x", &sorts);
            let vars: Vec<&str> = c.names().collect();
            let f = crate::syntax::Formula::rel(name, &vars);
            let got = definable(&f, &c, g.objects()).unwrap();
            assert_eq!(got.members, orbit.members, "{name}");
        }
    }
}

#[test]
fn two_block_theory_has_block_axioms() {
    let lg = fixtures::two_block_groupoid();
    let t = theory_of_groupoid(&lg.groupoid, &small_bounds()).unwrap();
    let text = print_theory(&t);
    assert!(text.contains("[x] U1(x) & U2(x) => false"), "{text}");
    assert!(text.contains("[x, y] Lt(x, y) => U1(x) | U2(y)"), "{text}");
    for m in lg.groupoid.objects() {
        assert!(check_theory(m, &t, 0).unwrap().holds);
    }
    let back = parse_theory(&text).unwrap();
    assert_eq!(back.axioms.len(), t.axioms.len());
}

#[test]
fn synthesized_theory_holds_and_eliminates() {
    for lg in [fixtures::gf4_groupoid(), fixtures::subsets_up_to(2), fixtures::linear_orders_groupoid()] {
        let bounds = SynthesisBounds { exists: true, premise_atoms: 1, max_axioms: 100_000, ..small_bounds() };
        let s = synthesize(&lg.groupoid, &lg.indexing, 2, &bounds).unwrap();
        for m in s.groupoid.objects() {
            assert!(check_theory(m, &s.theory, 0).unwrap().holds, "{}", m.id);
        }
        let v = eliminates_parameters(&s.groupoid, &lg.indexing, 2).unwrap();
        assert!(v.eliminates);
        for e in &v.entries {
            let name = &s.extension.tuples.iter().find(|(_, t)| *t == e.tuple).unwrap().0;
            let vars: Vec<&str> = e.context.names().collect();
            let r = definable(&crate::syntax::Formula::rel(name, &vars), &e.context, s.groupoid.objects()).unwrap();
            assert_eq!(r.members, e.orbit.members);
        }
    }
}

#[test]
fn no_variables_and_no_atoms_gives_empty_theory() {
    let lg = fixtures::subsets_up_to(2);
    let bounds = SynthesisBounds {
        vars: 0,
        premise_atoms: 0,
        conclusion_atoms: 0,
        exists: false,
        max_axioms: 10,
    };
    assert!(theory_of_groupoid(&lg.groupoid, &bounds).unwrap().axioms.is_empty());
}

#[test]
fn axiom_cap_is_reported() {
    let lg = fixtures::two_block_groupoid();
    let bounds = SynthesisBounds { max_axioms: 1, ..small_bounds() };
    assert!(matches!(theory_of_groupoid(&lg.groupoid, &bounds), Err(Error::CapExceeded { .. })));
}

#[test]
fn ultrahomogeneity_examples() {
    assert!(is_ultrahomogeneous(&fixtures::k3()).unwrap().ultrahomogeneous);
    assert!(is_ultrahomogeneous(&fixtures::point()).unwrap().ultrahomogeneous);
    let gf4 = fixtures::gf4();
    assert!(is_ultrahomogeneous(&gf4).unwrap().ultrahomogeneous);
    let p3 = fixtures::p3();
    let v = is_ultrahomogeneous(&p3).unwrap();
    assert!(!v.ultrahomogeneous);
    let w = v.witness.unwrap();
    let shown: Vec<(&str, &str)> = w.iter().map(|&(s, a, b)| (p3.element_name(s, a), p3.element_name(s, b))).collect();
    assert_eq!(shown, vec![("a", "b")]);
}

#[test]
fn minimal_formula_examples() {
    let lg = fixtures::subsets_groupoid();
    let g = &lg.groupoid;
    let pool = FormulaPool::atomic(g.signature(), 2, true);
    let c = crate::syntax::Context::numbered("x", &["V", "V"]);
    let top = g.object_index("S01234").unwrap();
    let m = g.object(top);
    let t = [m.element(0, "3").unwrap(), m.element(0, "5").or(m.element(0, "4")).unwrap()];
    let f = minimal_formula(g, top, &t, &c, &pool).unwrap().unwrap();
    let neq = parse_formula(g.signature(), &c, "Neq(x1, x2)").unwrap();
    let within: BTreeSet<Point> =
        definable(&neq, &c, g.objects()).unwrap().members.into_iter().filter(|p| p.object == top).collect();
    assert_eq!(definable(&f, &c, g.objects()).unwrap().members, within);
    let small = g.object_index("S34").unwrap();
    let t = [g.object(small).element(0, "3").unwrap(), g.object(small).element(0, "4").unwrap()];
    assert!(minimal_formula(g, small, &t, &c, &pool).unwrap().is_none());

    let gf = fixtures::gf4_groupoid();
    let c1 = crate::syntax::Context::numbered("x", &["F"]);
    let a = gf.groupoid.object(0).element(0, "a").unwrap();
    let pool = FormulaPool::atomic(gf.groupoid.signature(), 1, true);
    let f = minimal_formula(&gf.groupoid, 0, &[a], &c1, &pool).unwrap().unwrap();
    let ext: BTreeSet<Point> = definable(&f, &c1, gf.groupoid.objects()).unwrap().members;
    assert_eq!(ext.len(), 2);

    let lo = fixtures::linear_orders_groupoid();
    let c1 = crate::syntax::Context::numbered("x", &["V"]);
    let l2 = lo.groupoid.object_index("L2").unwrap();
    let b = lo.groupoid.object(l2).element(0, "b").unwrap();
    let pool = FormulaPool::atomic(lo.groupoid.signature(), 1, true);
    assert!(minimal_formula(&lo.groupoid, l2, &[b], &c1, &pool).unwrap().is_none());
}

#[test]
fn decidability_witness_examples() {
    let lg = fixtures::subsets_groupoid();
    let c = crate::syntax::Context::new(vec![("x".into(), "V".into()), ("x'".into(), "V".into())]).unwrap();
    let w = decidability_witness(&lg.groupoid, &lg.indexing, &c).unwrap().unwrap();
    let neq = parse_formula(lg.groupoid.signature(), &c, "Neq(x, x')").unwrap();
    assert_eq!(w.set, definable(&neq, &c, lg.groupoid.objects()).unwrap());
    let f = w.formula.unwrap();
    assert_eq!(definable(&f, &c, lg.groupoid.objects()).unwrap(), w.set);

    let mut sig = crate::syntax::Signature::new();
    sig.add_sort("V").unwrap();
    let sig = std::sync::Arc::new(sig);
    let objects: Vec<Structure> = (1..=2)
        .map(|n| Structure::from_indices(format!("E{n}"), sig.clone(), vec![(0..n).map(|i| i.to_string()).collect()], vec![]).unwrap())
        .collect();
    let g = Groupoid::etale_complete(objects.clone()).unwrap();
    let ix = trivial_indexing(&g);
    let w = decidability_witness(&g, &ix, &c).unwrap().unwrap();
    assert_eq!(w.set.len(), 2);
    assert!(w.formula.is_none());

    let g = Groupoid::etale_complete(vec![objects[0].clone()]).unwrap();
    let ix = trivial_indexing(&g);
    let w = decidability_witness(&g, &ix, &c).unwrap().unwrap();
    assert!(w.set.is_empty());
    assert_eq!(w.formula, Some(crate::syntax::Formula::False));
}

#[test]
fn bouquet_of_fields_decomposes() {
    let lg = fixtures::gf_bouquet();
    let pool = default_sentence_pool(&lg.groupoid).unwrap();
    match bouquet_decomposition(&lg.groupoid, &pool).unwrap() {
        Decomposition::Found(parts) => {
            assert_eq!(parts.len(), 2);
            let orders: Vec<usize> = parts.iter().map(|p| p.group_order).collect();
            assert_eq!(orders, vec![1, 2]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn connected_groupoid_is_isolated_by_truth() {
    let k2a = fixtures::k2();
    let k2b = k2a.renamed("K2b");
    let g = Groupoid::etale_complete(vec![k2a, k2b]).unwrap();
    let d = bouquet_decomposition(&g, &[crate::syntax::Formula::True]).unwrap();
    match d {
        Decomposition::Found(parts) => {
            assert_eq!(parts.len(), 1);
            assert_eq!(parts[0].sentence, crate::syntax::Formula::True);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn indistinguishable_components_exhaust_the_pool() {
    let lo = fixtures::linear_orders_groupoid();
    let d = bouquet_decomposition(&lo.groupoid, &[crate::syntax::Formula::True]).unwrap();
    assert!(matches!(d, Decomposition::PoolExhausted { .. }));
}

#[test]
fn cross_isomorphic_components_are_rejected() {
    let k2a = fixtures::k2();
    let k2b = k2a.renamed("K2b");
    let g = Groupoid::discrete(vec![k2a, k2b]).unwrap();
    assert!(matches!(
        bouquet_decomposition(&g, &[crate::syntax::Formula::True]).unwrap(),
        Decomposition::CrossIso { left: 0, right: 1 }
    ));
}
