use super::*;
use crate::elimination::eliminates_parameters;
use crate::fixtures;
use crate::groupoid::{bouquet, disjoint_indexing, shared_indexing, trivial_indexing};
use crate::semantics::Structure;
use crate::syntax::{print_formula, Signature};
use std::collections::BTreeMap;
use std::sync::Arc;

fn open_of<'a>(b: &'a ObjectBasis, text: &str) -> &'a ObjectOpen {
    b.opens
        .iter()
        .find(|o| o.sentences.iter().any(|s| print_formula(s) == text))
        .unwrap_or_else(|| panic!("no open for {text}"))
}

fn bare_sets(sizes: &[usize]) -> Groupoid {
    let mut sig = Signature::new();
    sig.add_sort("V").unwrap();
    let sig = Arc::new(sig);
    let objects = sizes
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let carrier = (0..n).map(|i| format!("e{k}_{i}")).collect();
            Structure::from_indices(format!("M{k}"), sig.clone(), vec![carrier], vec![]).unwrap()
        })
        .collect();
    Groupoid::etale_complete(objects).unwrap()
}

#[test]
fn local_parameter_opens_its_object() {
    let g = bare_sets(&[1, 1]);
    let ix = trivial_indexing(&g);
    let b = object_basis(&g, &ix, 1).unwrap();
    let o = open_of(&b, "$e0_0 = $e0_0");
    assert_eq!(o.extension.ones().collect::<Vec<_>>(), vec![0]);
}

#[test]
fn subsets_element_open_has_eight_objects() {
    let lg = fixtures::subsets_up_to(4);
    let b = object_basis(&lg.groupoid, &lg.indexing, 2).unwrap();
    assert_eq!(lg.groupoid.len(), 15);
    assert_eq!(open_of(&b, "$3 = $3").extension.count_ones(..), 8);
}

#[test]
fn bouquet_parameter_is_local() {
    let lg = fixtures::gf_bouquet();
    let b = object_basis(&lg.groupoid, &lg.indexing, 1).unwrap();
    let o = open_of(&b, "One($1_4)");
    let gf4 = lg.groupoid.object_index("GF4").unwrap();
    assert_eq!(o.extension.ones().collect::<Vec<_>>(), vec![gf4]);
}

#[test]
fn arrow_basis_examples() {
    let lg = fixtures::gf4_groupoid();
    let g = &lg.groupoid;
    let ob = object_basis(g, &lg.indexing, 1).unwrap();
    let ab = arrow_basis(g, &lg.indexing, &ob, 1);
    let all = ab.opens.iter().find(|o| o.source.is_none() && o.target.is_none() && o.mapping.is_empty()).unwrap();
    assert_eq!(all.extension.count_ones(..), g.arrows().len());
    let (a, bb) = (lg.indexing.param("a").unwrap(), lg.indexing.param("b").unwrap());
    let frob = ab
        .opens
        .iter()
        .find(|o| o.source.is_none() && o.target.is_none() && o.mapping == vec![(a, bb)])
        .unwrap();
    let ids: Vec<usize> = frob.extension.ones().collect();
    assert_eq!(ids.len(), 1);
    assert!(!g.arrows()[ids[0]].is_identity());
}

#[test]
fn subsets_mapping_open_matches_brute_count() {
    let lg = fixtures::subsets_groupoid();
    let g = &lg.groupoid;
    let ob = object_basis(g, &lg.indexing, 1).unwrap();
    let ab = arrow_basis(g, &lg.indexing, &ob, 1);
    let (p3, p4) = (lg.indexing.param("3").unwrap(), lg.indexing.param("4").unwrap());
    let open = ab
        .opens
        .iter()
        .find(|o| o.source.is_none() && o.target.is_none() && o.mapping == vec![(p3, p4)])
        .unwrap();
    let brute = g
        .arrows()
        .iter()
        .filter(|a| {
            let (m, n) = (g.object(a.src), g.object(a.dst));
            match (m.element(0, "3"), n.element(0, "4")) {
                (Some(x), Some(y)) => a.map[0][x] == y,
                _ => false,
            }
        })
        .count();
    assert_eq!(open.extension.count_ones(..), brute);
    assert!(brute > 0);
}

#[test]
fn open_map_on_eliminating_and_discrete_instances() {
    for lg in [fixtures::subsets_up_to(3), fixtures::gf4_groupoid()] {
        let ob = object_basis(&lg.groupoid, &lg.indexing, 2).unwrap();
        let ab = arrow_basis(&lg.groupoid, &lg.indexing, &ob, 1);
        assert!(is_open_map_t(&lg.groupoid, &ob, &ab).open);
    }
    let g = bare_sets(&[1, 2, 3]);
    let ix = disjoint_indexing(&g);
    let ob = object_basis(&g, &ix, 1).unwrap();
    assert!((0..g.len()).all(|o| ob.neighbourhood(o).count_ones(..) == 1));
    let ab = arrow_basis(&g, &ix, &ob, 1);
    assert!(is_open_map_t(&g, &ob, &ab).open);
}

#[test]
fn t0_cases() {
    let lg = fixtures::subsets_up_to(3);
    assert!(is_t0(&object_basis(&lg.groupoid, &lg.indexing, 1).unwrap()));

    let single = fixtures::automorphism_groupoid(fixtures::k3()).unwrap();
    assert!(is_t0(&object_basis(&single.groupoid, &single.indexing, 2).unwrap()));

    let a = fixtures::k2().renamed("A");
    let b = fixtures::k2().renamed("B");
    let g = Groupoid::etale_complete(vec![a, b]).unwrap();
    let params = vec![("p".to_string(), "V".to_string()), ("q".to_string(), "V".to_string())];
    let row: BTreeMap<String, String> = [("p", "a"), ("q", "b")].iter().map(|(x, y)| (x.to_string(), y.to_string())).collect();
    let maps = BTreeMap::from([("A".to_string(), row.clone()), ("B".to_string(), row)]);
    let ix = shared_indexing(&g, &params, &maps).unwrap();
    let ob = object_basis(&g, &ix, 2).unwrap();
    assert!(!is_t0(&ob));
    assert_eq!(first_inseparable(&ob), Some((0, 1)));
}

#[test]
fn rigid_object_lattice_is_powerset() {
    let lg = fixtures::automorphism_groupoid(fixtures::chain3()).unwrap();
    let c = Context::numbered("x", &["V"]);
    let lat = stable_open_lattice(&lg.groupoid, &lg.indexing, &c, 1 << 10).unwrap();
    assert_eq!(lat.len(), 8);
}

#[test]
fn gf4_lattice_over_orbits() {
    let lg = fixtures::gf4_groupoid();
    let g = &lg.groupoid;
    let c = Context::numbered("x", &["F"]);
    let lat = stable_open_lattice(g, &lg.indexing, &c, 1 << 10).unwrap();
    let shown: Vec<Vec<&str>> = lat
        .iter()
        .map(|d| d.members.iter().map(|p| g.object(0).element_name(0, p.tuple[0])).collect())
        .collect();
    assert_eq!(shown.len(), 8);
    assert!(shown.contains(&vec![]));
    assert!(shown.contains(&vec!["a", "b"]));
    assert!(shown.contains(&vec!["0", "1", "a", "b"]));
    assert!(!shown.contains(&vec!["a"]));
    for d in &lat {
        assert!(crate::definable::is_stable(d, g).unwrap());
    }
    assert!(hasse_edges(&lat).contains(&(0, 1)));
}

#[test]
fn lattice_gap_matches_elimination() {
    let c = Context::numbered("x", &["V"]);
    let subsets = fixtures::subsets_up_to(3);
    assert_eq!(lattice_gap(&subsets.groupoid, &subsets.indexing, &c).unwrap(), None);
    let orders = fixtures::linear_orders_groupoid();
    assert!(lattice_gap(&orders.groupoid, &orders.indexing, &c).unwrap().is_some());
    assert!(!eliminates_parameters(&orders.groupoid, &orders.indexing, 1).unwrap().eliminates);
}

#[test]
fn hom_space_closure_cases() {
    let lg = fixtures::automorphism_groupoid(fixtures::k3()).unwrap();
    let g = &lg.groupoid;
    assert_eq!(hom_space_closure(g, &lg.indexing, 0, 0, 1).unwrap().len(), 6);
    assert_eq!(hom_space_closure(g, &lg.indexing, 0, 0, 3).unwrap().len(), 6);

    let rotations = bouquet(vec![(fixtures::k3(), vec![vec![vec![1, 2, 0]], vec![vec![2, 0, 1]]])]).unwrap();
    let ix = trivial_indexing(&rotations);
    assert_eq!(rotations.hom(0, 0).len(), 3);
    assert_eq!(hom_space_closure(&rotations, &ix, 0, 0, 3).unwrap().len(), 3);
    assert_eq!(hom_space_closure(&rotations, &ix, 0, 0, 1).unwrap().len(), 6);
    assert!(hom_space_closure(&rotations, &ix, 0, 5, 1).is_err());
}

#[test]
fn etale_completeness_checks() {
    assert!(check_etale_complete(&fixtures::gf4_identity_groupoid().groupoid).is_some());
    assert!(check_etale_complete(&fixtures::gf4_groupoid().groupoid).is_none());
    assert!(check_etale_complete(&fixtures::gf_bouquet().groupoid).is_none());
}
