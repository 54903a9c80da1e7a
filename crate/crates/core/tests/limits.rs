mod common;

use common::*;
use horn_limits::limits::{Certainty, ModelVerdict, Tail};
use horn_limits::{bounded_least_model, clause_limits, model_limit_comparison, parse_clause, SequenceSchema};

fn schema(name: &str) -> SequenceSchema {
    SequenceSchema::from_json(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

#[test]
fn shrinking_sequence_models() {
    let s = schema("descend.seq");
    for n in 1..=20u64 {
        let p = s.expand_at(n).unwrap();
        let m = bounded_least_model(&p, 25).unwrap().model;
        let expected: std::collections::BTreeSet<String> =
            (0..=n).map(|i| horn_limits::Term::iterate("f", i, horn_limits::Term::constant("a"))).map(|t| format!("p({t})")).collect();
        assert_eq!(strings(&m), expected, "n = {n}");
    }
}

#[test]
fn shrinking_sequence_limit_differs() {
    let s = schema("descend.seq");
    let l = clause_limits(&s);
    assert!(l.limit_exists);
    assert_eq!(l.limit_program.as_ref().unwrap().to_string(), "p(X) :- p(f(X)).\n");
    let r = model_limit_comparison(&s, 10, 20).unwrap();
    assert!(r.model_of_limit.is_empty());
    assert_eq!(r.verdict, ModelVerdict::NotEqual { witness: horn_limits::parse_ground_atom("p(a)").unwrap() });
    assert_eq!(r.certainty, Certainty::Heuristic);
    assert!(r.rows.iter().filter(|row| row.atom.level() <= 10).all(|row| row.tail == Tail::Present));
}

#[test]
fn growing_sequence_limit_agrees() {
    let s = schema("ascend.seq");
    let l = clause_limits(&s);
    assert_eq!(l.limit_program.as_ref().unwrap().to_string(), "p(f(X)) :- p(X).\n");
    let r = model_limit_comparison(&s, 10, 20).unwrap();
    assert!(r.model_of_limit.is_empty());
    assert!(!r.rows.is_empty());
    assert!(r.rows.iter().all(|row| row.tail == Tail::Absent));
    assert_eq!(r.verdict, ModelVerdict::Equal);
    assert_eq!(r.certainty, Certainty::TheoremBacked);
}

#[test]
fn model_of_limit_is_below_liminf_on_every_fixture() {
    for name in ["descend.seq", "ascend.seq", "covered.seq"] {
        let r = model_limit_comparison(&schema(name), 8, 24).unwrap();
        assert!(r.model_of_limit.is_subset(&r.liminf_models), "{name}");
        assert!(r.liminf_models.is_subset(&r.limsup_models), "{name}");
    }
    let alt = schema("alternating.seq");
    let l = clause_limits(&alt);
    assert!(!l.limit_exists);
    assert_eq!(l.obstruction.unwrap(), parse_clause("p(a).").unwrap());
    assert!(model_limit_comparison(&alt, 5, 10).is_err());
}

#[test]
fn lower_limit_is_contained_in_upper() {
    let mut r = rng(41);
    let shape = Shape::small();
    for _ in 0..100 {
        let mut s = SequenceSchema::new();
        for _ in 0..4 {
            let c = random_certified_rule(&mut r, &shape);
            s = match rand::Rng::gen_range(&mut r, 0..3) {
                0 => s.with_stable(c, rand::Rng::gen_range(&mut r, 1..5)),
                1 => s.with_sporadic(c, [1, 3, 7]),
                _ => {
                    let m = rand::Rng::gen_range(&mut r, 1..4);
                    s.with_periodic(c, m, rand::Rng::gen_range(&mut r, 0..m), 1)
                }
            };
        }
        let l = clause_limits(&s);
        assert!(l.lower.clause_set().is_subset(&l.upper.clause_set()));
        assert_eq!(l.limit_exists, l.lower == l.upper);
        // set-theoretic reading on a long stretch of indices
        let tail: Vec<_> = (60..=72).map(|n| s.expand_at(n).unwrap().clause_set()).collect();
        for c in l.lower.clauses() {
            assert!(tail.iter().all(|set| set.contains(&c.normalized()) || set.contains(c)));
        }
    }
}

#[test]
fn schema_rejects_unknown_keys_and_bad_periods() {
    assert!(SequenceSchema::from_json(r#"{"stable":[],"extra":1}"#).is_err());
    assert!(SequenceSchema::from_json(r#"{"periodic":[{"clause":"p(a).","modulus":0,"residue":0}]}"#).is_err());
    assert!(SequenceSchema::from_json(r#"{"periodic":[{"clause":"p(a).","modulus":2,"residue":2}]}"#).is_err());
    assert!(SequenceSchema::from_json(r#"{"indexed":[{"template":"p(f^{k}(a))."}]}"#).is_err());
}
