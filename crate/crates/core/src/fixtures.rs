//! Small reference instances: finite fields, decidable sets, linear orders,
//! graphs and the bundled data files.

use crate::error::Result;
use crate::groupoid::{load_groupoid, trivial_indexing, Groupoid, LoadedGroupoid};
use crate::semantics::Structure;
use crate::syntax::{parse_theory, Signature, Theory};
use std::collections::BTreeMap;
use std::sync::Arc;

pub const FIELD_THEORY: &str = include_str!("../data/field.theory");
pub const DECIDABLE_THEORY: &str = include_str!("../data/decidable.theory");
pub const LINEAR_ORDER_THEORY: &str = include_str!("../data/linear_order.theory");
pub const TWO_BLOCK_THEORY: &str = include_str!("../data/two_block.theory");
pub const GRAPH_THEORY: &str = include_str!("../data/graph.theory");

pub const GF4_JSON: &str = include_str!("../data/gf4.json");
pub const GF4_IDENTITY_JSON: &str = include_str!("../data/gf4_identity.json");
pub const GF_BOUQUET_JSON: &str = include_str!("../data/gf_bouquet.json");
pub const SUBSETS_JSON: &str = include_str!("../data/subsets.json");
pub const LINEAR_ORDERS_JSON: &str = include_str!("../data/linear_orders.json");
pub const TWO_BLOCK_JSON: &str = include_str!("../data/two_block.json");

fn load(text: &str) -> LoadedGroupoid {
    load_groupoid(text).expect("bundled groupoid is valid")
}

fn theory(text: &str) -> Theory {
    parse_theory(text).expect("bundled theory is valid")
}

pub fn field_theory() -> Theory {
    theory(FIELD_THEORY)
}

pub fn decidable_theory() -> Theory {
    theory(DECIDABLE_THEORY)
}

pub fn linear_order_theory() -> Theory {
    theory(LINEAR_ORDER_THEORY)
}

pub fn two_block_theory() -> Theory {
    theory(TWO_BLOCK_THEORY)
}

/// `{GF(4)}` with both automorphisms, trivially indexed.
pub fn gf4_groupoid() -> LoadedGroupoid {
    load(GF4_JSON)
}

/// `{GF(4)}` with the identity only.
pub fn gf4_identity_groupoid() -> LoadedGroupoid {
    load(GF4_IDENTITY_JSON)
}

/// `GF(2)` and `GF(4)` with full automorphism groups, no cross arrows and
/// per-object parameters.
pub fn gf_bouquet() -> LoadedGroupoid {
    load(GF_BOUQUET_JSON)
}

/// Every nonempty subset of `{0..4}` with `Neq` and all isomorphisms.
pub fn subsets_groupoid() -> LoadedGroupoid {
    load(SUBSETS_JSON)
}

/// Strict linear orders on `{a}`, `{a,b}`, `{a,b,c}` with all isomorphisms.
pub fn linear_orders_groupoid() -> LoadedGroupoid {
    load(LINEAR_ORDERS_JSON)
}

/// Two-block orders `a1 < a2 < b1 < b2` in shapes 1+1, 2+1, 1+2, 2+2.
pub fn two_block_groupoid() -> LoadedGroupoid {
    load(TWO_BLOCK_JSON)
}

pub fn gf4() -> Structure {
    gf4_groupoid().groupoid.object(0).clone()
}

pub fn ring_signature() -> Arc<Signature> {
    gf4_groupoid().groupoid.signature().clone()
}

/// `GF(2)` over the relational ring signature.
pub fn gf2() -> Structure {
    let sig = ring_signature();
    let mut rels: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
    let s = |x: u8| x.to_string();
    for x in 0..2u8 {
        for y in 0..2u8 {
            rels.entry("Add".into()).or_default().push(vec![s(x), s(y), s(x ^ y)]);
            rels.entry("Mul".into()).or_default().push(vec![s(x), s(y), s(x & y)]);
        }
    }
    rels.insert("Zero".into(), vec![vec!["0".into()]]);
    rels.insert("One".into(), vec![vec!["1".into()]]);
    let carriers = BTreeMap::from([("F".to_string(), vec!["0".to_string(), "1".to_string()])]);
    Structure::from_names("GF2", sig, &carriers, &rels).expect("GF(2) is well formed")
}

/// One sort `V`, one binary relation `E`.
pub fn graph_signature() -> Arc<Signature> {
    let mut sig = Signature::new();
    sig.add_sort("V").unwrap();
    sig.add_relation("E", &["V", "V"]).unwrap();
    Arc::new(sig)
}

/// A graph on the given vertices; each listed edge is added in both
/// directions when `symmetric`.
pub fn graph(id: &str, vertices: &[&str], edges: &[(&str, &str)], symmetric: bool) -> Structure {
    let mut tuples = Vec::new();
    for &(a, b) in edges {
        tuples.push(vec![a.to_string(), b.to_string()]);
        if symmetric && a != b {
            tuples.push(vec![b.to_string(), a.to_string()]);
        }
    }
    let carriers = BTreeMap::from([("V".to_string(), vertices.iter().map(|v| v.to_string()).collect())]);
    let rels = BTreeMap::from([("E".to_string(), tuples)]);
    Structure::from_names(id, graph_signature(), &carriers, &rels).expect("graph is well formed")
}

pub fn k2() -> Structure {
    graph("K2", &["a", "b"], &[("a", "b")], true)
}

pub fn k3() -> Structure {
    graph("K3", &["a", "b", "c"], &[("a", "b"), ("a", "c"), ("b", "c")], true)
}

/// The path `a - b - c`.
pub fn p3() -> Structure {
    graph("P3", &["a", "b", "c"], &[("a", "b"), ("b", "c")], true)
}

/// One vertex, no edges.
pub fn point() -> Structure {
    graph("Pt", &["a"], &[], false)
}

/// The strict chain `a < b < c`; rigid, and every endomorphism is the identity.
pub fn chain3() -> Structure {
    graph("C3", &["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")], false)
}

/// A structure with its full automorphism group, trivially indexed.
pub fn automorphism_groupoid(m: Structure) -> Result<LoadedGroupoid> {
    let groupoid = Groupoid::etale_complete(vec![m])?;
    let indexing = trivial_indexing(&groupoid);
    Ok(LoadedGroupoid {
        groupoid,
        indexing,
        explicit_indexing: false,
        auto_complete: false,
        etale_complete: true,
    })
}

/// Nonempty subsets of `{0..n-1}` with `Neq`, all isomorphisms, trivial indexing.
pub fn subsets_up_to(n: usize) -> LoadedGroupoid {
    let mut sig = Signature::new();
    sig.add_sort("V").unwrap();
    sig.add_relation("Neq", &["V", "V"]).unwrap();
    let sig = Arc::new(sig);
    let mut objects = Vec::new();
    for mask in 1u32..(1 << n) {
        let els: Vec<String> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i.to_string()).collect();
        let k = els.len();
        let rels = vec![(0..k)
            .flat_map(|a| (0..k).filter(move |&b| b != a).map(move |b| vec![a, b]))
            .collect()];
        let id = format!("S{}", els.concat());
        objects.push(Structure::from_indices(id, sig.clone(), vec![els], rels).unwrap());
    }
    objects.sort_by_key(|m| (m.total_size(), m.id.clone()));
    let groupoid = Groupoid::etale_complete(objects).unwrap();
    let indexing = trivial_indexing(&groupoid);
    LoadedGroupoid {
        groupoid,
        indexing,
        explicit_indexing: false,
        auto_complete: false,
        etale_complete: true,
    }
}
