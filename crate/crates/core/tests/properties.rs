use elimpar::definable::{orbit, tuple_definable};
use elimpar::elimination::{canonical_tuples, eliminates_at_tuple};
use elimpar::fixtures::{graph, graph_signature};
use elimpar::groupoid::{trivial_indexing, Groupoid};
use elimpar::semantics::{canonical_query, definable, DefinableSet, Point, Structure, TupleIter};
use elimpar::syntax::{parse_formula, print_formula, Binder, Context, Formula, Term};
use proptest::prelude::*;
use std::collections::BTreeSet;

const NAMES: [&str; 3] = ["a", "b", "c"];

fn graph_from(id: String, size: usize, mask: u16) -> Structure {
    let mut edges = Vec::new();
    for (i, x) in NAMES[..size].iter().enumerate() {
        for (j, y) in NAMES[..size].iter().enumerate() {
            if mask >> (i * 3 + j) & 1 == 1 {
                edges.push((*x, *y));
            }
        }
    }
    graph(&id, &NAMES[..size], &edges, false)
}

fn graphs(max_objects: usize) -> impl Strategy<Value = Vec<Structure>> {
    prop::collection::vec((1usize..=3, any::<u16>()), 1..=max_objects).prop_map(|specs| {
        specs
            .into_iter()
            .enumerate()
            .map(|(k, (size, mask))| graph_from(format!("G{k}"), size, mask))
            .collect()
    })
}

fn brute_hom(m: &Structure, a: &[usize], n: &Structure, b: &[usize]) -> bool {
    TupleIter::new(vec![n.size(0); m.size(0)]).any(|f| {
        a.iter().zip(b).all(|(&x, &y)| f[x] == y)
            && m.relation(0).tuples().iter().all(|t| n.relation(0).contains(&[f[t[0]], f[t[1]]]))
    })
}

fn leaf() -> impl Strategy<Value = Formula> {
    let var = prop::sample::select(vec!["x", "y"]);
    prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        (var.clone(), var.clone()).prop_map(|(a, b)| Formula::rel("E", &[a, b])),
        (var.clone(), var).prop_map(|(a, b)| Formula::eq_vars(a, b)),
    ]
}

fn formula() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Formula::Or),
            inner.prop_map(|body| {
                let link = Formula::Rel("E".into(), vec![Term::var("x"), Term::var("z")]);
                Formula::Exists(vec![Binder::new("z", "V")], Box::new(Formula::And(vec![link, body])))
            }),
        ]
    })
}

fn xy() -> Context {
    Context::new(vec![("x".into(), "V".into()), ("y".into(), "V".into())]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_formulas_reparse_to_the_same_meaning(f in formula(), objects in graphs(2)) {
        let sig = graph_signature();
        let text = print_formula(&f);
        let back = parse_formula(&sig, &xy(), &text).unwrap();
        prop_assert_eq!(print_formula(&back), text);
        prop_assert_eq!(
            definable(&f, &xy(), &objects).unwrap().members,
            definable(&back, &xy(), &objects).unwrap().members
        );
    }

    #[test]
    fn orbits_are_least_stable_supersets(objects in graphs(3), picks in prop::collection::vec((0usize..3, 0usize..3), 0..4)) {
        let g = Groupoid::etale_complete(objects).unwrap();
        let ctx = Context::new(vec![("x".into(), "V".into())]).unwrap();
        let members: BTreeSet<Point> = picks
            .iter()
            .filter(|&&(o, _)| o < g.len())
            .map(|&(o, e)| Point::new(o, vec![e % g.object(o).size(0)]))
            .collect();
        let d = DefinableSet::new(ctx, members);
        let o = orbit(&d, &g).unwrap();
        prop_assert!(d.is_subset(&o));
        prop_assert_eq!(&orbit(&o, &g).unwrap(), &o);
        for p in &o.members {
            let reached = d.members.iter().any(|q| {
                g.hom(q.object, p.object).iter().any(|a| a.map[0][q.tuple[0]] == p.tuple[0])
            });
            prop_assert!(reached);
        }
    }

    #[test]
    fn etale_completion_is_idempotent(objects in graphs(3)) {
        let g = Groupoid::discrete(objects).unwrap();
        let c = g.etale_completion();
        prop_assert!(g.arrows().iter().all(|a| c.contains_arrow(a)));
        prop_assert!(c.missing_iso().is_none());
        let cc = c.etale_completion();
        prop_assert_eq!(cc.arrows(), c.arrows());
    }

    #[test]
    fn canonical_query_satisfiers_are_hom_images(objects in graphs(2), a in 0usize..3, b in 0usize..3) {
        let m = &objects[0];
        let t = vec![a % m.size(0), b % m.size(0)];
        let q = canonical_query(m, &t, &xy()).unwrap();
        let ext = definable(&q, &xy(), &objects).unwrap();
        for (o, n) in objects.iter().enumerate() {
            for u in TupleIter::new(vec![n.size(0); 2]) {
                prop_assert_eq!(ext.contains(&Point::new(o, u.clone())), brute_hom(m, &t, n, &u));
            }
        }
    }

    #[test]
    fn elimination_certificates_check_out(objects in graphs(3)) {
        let g = Groupoid::etale_complete(objects).unwrap();
        let ix = trivial_indexing(&g);
        for tuple in canonical_tuples(ix.len(), 2) {
            if ix.objects_interpreting(&tuple).is_empty() {
                continue;
            }
            let e = eliminates_at_tuple(&g, &ix, &tuple).unwrap();
            prop_assert_eq!(&e.orbit, &orbit(&tuple_definable(&g, &ix, &tuple), &g).unwrap());
            match (&e.formula, &e.witness) {
                (Some(f), None) => {
                    prop_assert_eq!(&definable(f, &e.context, g.objects()).unwrap().members, &e.orbit.members);
                }
                (None, Some(w)) => {
                    prop_assert!(e.orbit.contains(&w.inside) && !e.orbit.contains(&w.outside));
                    prop_assert!(brute_hom(
                        g.object(w.inside.object), &w.inside.tuple,
                        g.object(w.outside.object), &w.outside.tuple
                    ));
                }
                _ => prop_assert!(false, "entry carries both or neither certificate"),
            }
        }
    }
}
