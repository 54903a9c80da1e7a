mod common;

use common::*;
use horn_limits::{parse_atom, parse_clause, parse_ground_atom, parse_interpretation, parse_program, Error};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn printed_programs_parse_back(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_finitary_program(&mut r, &Shape::with_pairs());
        let again = parse_program(&p.to_string()).unwrap();
        prop_assert_eq!(&again, &p);
        prop_assert_eq!(again.to_string(), p.to_string());
    }

    #[test]
    fn printed_interpretations_parse_back(seed in any::<u64>()) {
        let shape = Shape::small();
        let mut r = rng(seed);
        let i = random_interpretation(&mut r, &base_up_to(&shape, 4), 0.1);
        prop_assert_eq!(parse_interpretation(&i.to_string()).unwrap(), i);
    }

    #[test]
    fn garbage_never_panics(s in "[a-zA-Z(),.:\\- ^{}0-9%\n]{0,40}") {
        let _ = parse_program(&s);
        let _ = parse_interpretation(&s);
    }
}

#[test]
fn iterated_shorthand_expands() {
    assert_eq!(parse_ground_atom("p(f^3(a))").unwrap().to_string(), "p(f(f(f(a))))");
    assert_eq!(parse_atom("p(g^2(X), b)").unwrap().to_string(), "p(g(g(X)),b)");
    assert!(parse_ground_atom("p(f^0(a))").is_err());
    assert!(parse_ground_atom("p(f^2(a, b))").is_err());
}

#[test]
fn errors_carry_positions() {
    let e = parse_program("p(a).\n  q(X) :- .").unwrap_err();
    assert!(matches!(e, Error::Syntax { .. }));
    let at = e.position().unwrap();
    assert_eq!((at.line, at.column), (2, 11));
    let e = parse_program("p(a).\np(a, b).").unwrap_err();
    assert!(matches!(e, Error::Arity { .. }));
    assert_eq!(e.position().unwrap().line, 2);
    assert!(matches!(parse_program(":- p(a)."), Err(Error::GoalClause { .. })));
    assert!(matches!(parse_interpretation("p(X)"), Err(Error::NonGround { .. })));
}

#[test]
fn clause_requires_exactly_one() {
    assert!(parse_clause("p(a). q(a).").is_err());
    assert!(parse_clause("").is_err());
    assert_eq!(parse_clause("p(X) :- q(X).").unwrap().to_string(), "p(X) :- q(X).");
}

#[test]
fn duplicates_collapse_up_to_renaming() {
    let p = parse_program("p(X) :- q(X).\np(Y) :- q(Y).\nq(a).").unwrap();
    assert_eq!(p.len(), 2);
}

#[test]
fn each_underscore_is_a_fresh_variable() {
    let p = parse_program("p(X) :- q(X, _), r(_).").unwrap();
    let c = &p.clauses()[0];
    assert_eq!(c.to_string(), "p(X) :- q(X,_1), r(_2).");
    let m = horn_limits::bounded_least_model(&parse_program("p(X) :- q(X, _), r(_).\nq(a, b).\nr(c).").unwrap(), 2).unwrap();
    assert!(m.model.to_string().contains("p(a)"));
}
