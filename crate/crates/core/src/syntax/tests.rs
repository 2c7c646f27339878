use super::*;
use std::collections::BTreeMap;

const DECIDABLE: &str = "\
sort V
rel Neq(V, V)
axiom [x, x'] x = x' & Neq(x, x') => false
axiom [x, x'] true => x = x' | Neq(x, x')
";

#[test]
fn minimal_theory_parses() {
    let t = parse_theory("sort V; rel Neq(V,V); axiom [x] Neq(x,x) => false").unwrap();
    assert_eq!(t.axioms.len(), 1);
    assert_eq!(t.axioms[0].name, "ax1");
    assert_eq!(t.axioms[0].sequent.context.vars, vec![("x".into(), "V".into())]);
}

#[test]
fn decidability_axioms_parse() {
    let t = parse_theory(DECIDABLE).unwrap();
    assert_eq!(t.axioms.len(), 2);
    let s = &t.axioms[1].sequent;
    assert_eq!(s.premise, Formula::True);
    assert_eq!(
        s.conclusion,
        Formula::Or(vec![Formula::eq_vars("x", "x'"), Formula::rel("Neq", &["x", "x'"])])
    );
}

#[test]
fn arity_mismatch_names_symbol() {
    let err = parse_theory("sort V\nrel Neq(V)\naxiom [x, y] Neq(x, y) => false").unwrap_err();
    match err {
        Error::Sort { symbol, .. } => assert_eq!(symbol, "Neq"),
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn syntax_error_has_position() {
    let err = parse_theory("sort V\nrel R(V)\naxiom [x] R(x) => => false").unwrap_err();
    match err {
        Error::Syntax { line, column, .. } => {
            assert_eq!(line, 3);
            assert_eq!(column, 19);
        }
        e => panic!("unexpected {e:?}"),
    }
}

#[test]
fn print_examples() {
    assert_eq!(print_formula(&Formula::True), "true");
    let f = Formula::Exists(
        vec![Binder::new("y", "K")],
        Box::new(Formula::And(vec![Formula::rel("Mul", &["x", "x", "y"])])),
    );
    assert_eq!(print_formula(&f), "exists y. Mul(x, x, y)");
}

#[test]
fn theory_round_trip() {
    let t = parse_theory(DECIDABLE).unwrap();
    let printed = print_theory(&t);
    let again = parse_theory(&printed).unwrap();
    assert_eq!(t, again);
    assert_eq!(printed, print_theory(&again));
}

#[test]
fn unannotated_binder_without_relation_needs_annotation_when_ambiguous() {
    let src = "sort A; sort B; rel R(A, B)\naxiom true => exists x. x = x";
    assert!(matches!(parse_theory(src), Err(Error::Sort { .. })));
    let t = parse_theory("sort A; sort B; rel R(A, B)\naxiom true => exists x:B. x = x").unwrap();
    let printed = print_theory(&t);
    assert!(printed.contains("exists x:B. x = x"), "{printed}");
}

#[test]
fn parameters_print_and_parse() {
    let mut sig = Signature::new();
    sig.add_sort("V").unwrap();
    let ctx = Context::numbered("x", &["V"]);
    let params = BTreeMap::from([("p1~p2".to_string(), "V".to_string()), ("a".to_string(), "V".to_string())]);
    let f = Formula::Or(vec![
        Formula::Eq(Term::var("x1"), Term::param("p1~p2")),
        Formula::Eq(Term::var("x1"), Term::param("a")),
    ]);
    let text = print_formula(&f);
    assert_eq!(text, "x1 = $\"p1~p2\" | x1 = $a");
    assert_eq!(parse_formula_with_params(&sig, &ctx, &text, &params).unwrap(), f);
    assert!(matches!(
        parse_formula(&sig, &ctx, "x1 = $a"),
        Err(Error::UnknownParameter(_))
    ));
}

#[test]
fn substitution_examples() {
    let ctx = Context::new(vec![("x".into(), "V".into()), ("y".into(), "V".into())]).unwrap();
    let f = Formula::eq_vars("x", "y");
    let map = BTreeMap::from([("y".to_string(), SortedTerm::param("m", "V"))]);
    assert_eq!(
        substitute(&f, &ctx, &map).unwrap(),
        Formula::Eq(Term::var("x"), Term::param("m"))
    );

    let g = Formula::Exists(vec![Binder::new("y", "V")], Box::new(Formula::rel("R", &["x", "y"])));
    let ctx_x = Context::numbered("x", &["V"]);
    let ctx_x = Context::new(vec![("x".into(), ctx_x.vars[0].1.clone())]).unwrap();
    let map = BTreeMap::from([("x".to_string(), SortedTerm::var("y", "V"))]);
    let out = substitute(&g, &ctx_x, &map).unwrap();
    assert_eq!(
        out,
        Formula::Exists(vec![Binder::new("y'", "V")], Box::new(Formula::rel("R", &["y", "y'"])))
    );

    let ctx2 = Context::numbered("y", &["V", "V"]);
    let map = BTreeMap::from([
        ("y1".to_string(), SortedTerm::param("a", "V")),
        ("y2".to_string(), SortedTerm::param("a", "V")),
    ]);
    assert_eq!(
        substitute(&Formula::eq_vars("y1", "y2"), &ctx2, &map).unwrap(),
        Formula::Eq(Term::param("a"), Term::param("a"))
    );

    let bad = BTreeMap::from([("y1".to_string(), SortedTerm::param("a", "W"))]);
    assert!(substitute(&Formula::eq_vars("y1", "y2"), &ctx2, &bad).is_err());
}

#[test]
fn alpha_equivalence() {
    let a = Formula::Exists(vec![Binder::new("y", "V")], Box::new(Formula::rel("R", &["x", "y"])));
    let b = Formula::Exists(vec![Binder::new("z", "V")], Box::new(Formula::rel("R", &["x", "z"])));
    let c = Formula::Exists(vec![Binder::new("z", "V")], Box::new(Formula::rel("R", &["z", "x"])));
    assert!(alpha_eq(&a, &b));
    assert!(!alpha_eq(&a, &c));
}

#[test]
fn relationalize_unary() {
    let t = parse_functional_theory("sort S\nfun f(S) : S\naxiom [x] true => f(x) = x").unwrap();
    let r = relationalize(&t).unwrap();
    assert!(r.signature.functions.is_empty());
    let (_, rel) = r.signature.relation("F").unwrap();
    assert_eq!(rel.arity.len(), 2);
    assert_eq!(r.axioms.len(), 3);
    let s = &r.axioms[2].sequent;
    assert_eq!(s.context.len(), 2);
    let y = s.context.vars[1].0.clone();
    assert_eq!(s.premise, Formula::rel("F", &["x", &y]));
    assert_eq!(s.conclusion, Formula::eq_vars(&y, "x"));
}

#[test]
fn relationalize_ring_signature() {
    let src = "sort K\nfun add(K, K) : K\nfun mul(K, K) : K\nfun zero() : K\nfun one() : K";
    let r = relationalize(&parse_functional_theory(src).unwrap()).unwrap();
    let names: Vec<(&str, usize)> = r.signature.relations.iter().map(|r| (r.name.as_str(), r.arity.len())).collect();
    assert_eq!(names, vec![("Add", 3), ("Mul", 3), ("Zero", 1), ("One", 1)]);
    assert_eq!(r.axioms.len(), 8);
}

#[test]
fn relationalize_field_sequent() {
    let src = "sort K\nfun mul(K, K) : K\nfun sub(K, K) : K\nfun one() : K\n\
               axiom [x, x'] true => exists y. mul(y, sub(x, x')) = one()";
    let r = relationalize(&parse_functional_theory(src).unwrap()).unwrap();
    let got = &r.axioms.last().unwrap().sequent.conclusion;
    let k = |n: &str| Binder::new(n, "K");
    let want = Formula::Exists(
        vec![k("y"), k("d"), k("p")],
        Box::new(Formula::And(vec![
            Formula::rel("Sub", &["x", "x'", "d"]),
            Formula::rel("Mul", &["y", "d", "p"]),
            Formula::rel("One", &["p"]),
        ])),
    );
    assert!(alpha_eq(got, &want), "{}", print_formula(got));
}

#[test]
fn morleyize_negated_equality() {
    let t = parse_classical_theory("sort V\naxiom [x, y] ~(x = y) => true").unwrap();
    let m = morleyize(&t).unwrap();
    assert!(m.theory.signature.relation("N_eq").is_some());
    assert_eq!(m.negations.len(), 1);
    assert_eq!(m.theory.axioms.len(), 3);
    assert!(m.theory.is_geometric());
}

#[test]
fn morleyize_negation_free_is_identity() {
    let t = parse_classical_theory(DECIDABLE).unwrap();
    let m = morleyize(&t).unwrap();
    assert_eq!(m.theory, t);
}

#[test]
fn morleyize_reuses_alpha_equivalent_negations() {
    let src = "sort V; rel E(V, V)\naxiom true => forall x. ~E(x, x)\naxiom [y] E(y, y) & ~E(y, y) => false";
    let m = morleyize(&parse_classical_theory(src).unwrap()).unwrap();
    assert_eq!(m.negations.len(), 1);
    assert_eq!(m.negations[0].relation, "N_E");
    assert_eq!(m.theory.axioms.len(), 4);
}

#[test]
fn classical_connectives_rejected_in_geometric_input() {
    assert!(parse_theory("sort V; rel E(V,V)\naxiom [x] ~E(x,x) => false").is_err());
    assert!(parse_theory("sort V; rel E(V,V)\naxiom true => forall x. E(x,x)").is_err());
}

#[test]
fn schemes_parse_and_instantiate() {
    let t = parse_theory("sort V; rel Neq(V, V)\nscheme big atleast(Neq) bound 3").unwrap();
    let inst = t.instantiate(10);
    assert_eq!(inst.len(), 3);
    assert_eq!(print_sequent(&inst[0].sequent), "[] true => exists x1:V. true");
    assert_eq!(
        print_sequent(&inst[2].sequent),
        "[] true => exists x1, x2, x3. Neq(x1, x2) & Neq(x1, x3) & Neq(x2, x3)"
    );
    assert!(t.schemes_truncated_at(2));
    assert_eq!(parse_theory(&print_theory(&t)).unwrap(), t);
}
