//! Seeded generators and brute-force oracles shared by the integration
//! suites. The oracles deliberately avoid the library's matching, indexing
//! and enumeration code: they work on raw terms and exhaustive grounding.
#![allow(dead_code)]

use std::collections::BTreeSet;

use horn_limits::{Atom, GroundAtom, HornClause, Interpretation, Program, Term};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Vocabulary for random programs and interpretations.
#[derive(Debug, Clone)]
pub struct Shape {
    pub constants: Vec<&'static str>,
    pub functors: Vec<(&'static str, usize)>,
    pub predicates: Vec<(&'static str, usize)>,
    pub vars: Vec<&'static str>,
    pub max_clauses: usize,
    pub max_body: usize,
    /// Maximum height of argument terms in generated clauses.
    pub max_term_height: u32,
}

impl Shape {
    /// Two constants, two unary functors, predicates of arity 1 and 2.
    pub fn small() -> Self {
        Shape {
            constants: vec!["a", "b"],
            functors: vec![("f", 1), ("g", 1)],
            predicates: vec![("p", 1), ("q", 2), ("r", 1)],
            vars: vec!["X", "Y", "Z"],
            max_clauses: 6,
            max_body: 2,
            max_term_height: 3,
        }
    }

    /// Adds a binary functor; only usable with small depths.
    pub fn with_pairs() -> Self {
        let mut s = Self::small();
        s.functors = vec![("f", 1), ("h", 2)];
        s.max_term_height = 2;
        s
    }
}

pub fn height(t: &Term) -> u32 {
    match t {
        Term::Var(_) | Term::Const(_) => 1,
        Term::App(_, args) => 1 + args.iter().map(height).max().unwrap_or(0),
    }
}

pub fn level(a: &Atom) -> u32 {
    1 + a.args.iter().map(height).max().unwrap_or(0)
}

pub fn random_term(rng: &mut ChaCha8Rng, shape: &Shape, max_height: u32, vars: &[&str]) -> Term {
    let leaf = max_height <= 1 || rng.gen_bool(0.35);
    if leaf {
        if !vars.is_empty() && rng.gen_bool(0.6) {
            Term::var(vars.choose(rng).unwrap())
        } else {
            Term::constant(shape.constants.choose(rng).unwrap())
        }
    } else {
        let (f, arity) = *shape.functors.choose(rng).unwrap();
        let args = (0..arity).map(|_| random_term(rng, shape, max_height - 1, vars)).collect();
        Term::app(f, args)
    }
}

pub fn random_atom(rng: &mut ChaCha8Rng, shape: &Shape, max_height: u32, vars: &[&str]) -> Atom {
    let (p, arity) = *shape.predicates.choose(rng).unwrap();
    Atom::new(p, (0..arity).map(|_| random_term(rng, shape, max_height, vars)).collect())
}

fn all_subterms(t: &Term, out: &mut Vec<Term>) {
    if !out.contains(t) {
        out.push(t.clone());
    }
    if let Term::App(_, args) = t {
        for a in args {
            all_subterms(a, out);
        }
    }
}

fn atom_vars(a: &Atom) -> BTreeSet<String> {
    fn go(t: &Term, out: &mut BTreeSet<String>) {
        match t {
            Term::Var(v) => {
                out.insert(v.to_string());
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| go(a, out)),
        }
    }
    let mut out = BTreeSet::new();
    a.args.iter().for_each(|t| go(t, &mut out));
    out
}

fn unary_predicate(shape: &Shape) -> Option<&'static str> {
    shape.predicates.iter().find(|(_, n)| *n == 1).map(|(p, _)| *p)
}

/// A rule whose body arguments are drawn from the head's subterms, extended
/// with unary body atoms until every head variable is bound. Bodies lean
/// towards proper subterms and the head predicate so that rules fire.
pub fn random_certified_rule(rng: &mut ChaCha8Rng, shape: &Shape) -> HornClause {
    let h = rng.gen_range(2..=shape.max_term_height.max(2));
    let head = random_atom(rng, shape, h, &shape.vars);
    let mut pool = Vec::new();
    head.args.iter().for_each(|t| all_subterms(t, &mut pool));
    let proper: Vec<Term> = pool.iter().filter(|t| !head.args.contains(t)).cloned().collect();
    let mut body: Vec<Atom> = Vec::new();
    for _ in 0..rng.gen_range(1..=shape.max_body) {
        let (p, arity) = if rng.gen_bool(0.5) {
            (head.predicate.to_string(), head.args.len())
        } else {
            let (p, n) = *shape.predicates.choose(rng).unwrap();
            (p.to_string(), n)
        };
        if arity > 0 && pool.is_empty() {
            continue;
        }
        let args = (0..arity)
            .map(|_| {
                let from = if !proper.is_empty() && rng.gen_bool(0.7) { &proper } else { &pool };
                from.choose(rng).unwrap().clone()
            })
            .collect();
        body.push(Atom::new(&p, args));
    }
    let bound: BTreeSet<String> = body.iter().flat_map(atom_vars).collect();
    let p = unary_predicate(shape).expect("shape needs a unary predicate");
    for v in atom_vars(&head).difference(&bound) {
        body.push(Atom::new(p, vec![Term::var(v)]));
    }
    HornClause::new(head, body)
}

pub fn random_fact(rng: &mut ChaCha8Rng, shape: &Shape, max_height: u32) -> HornClause {
    HornClause::fact(random_atom(rng, shape, max_height, &[]))
}

/// Certified, range-restricted program with at least one fact. Some facts
/// are ground instances of rule bodies so that derivations actually happen.
pub fn random_certified_program(rng: &mut ChaCha8Rng, shape: &Shape) -> Program {
    let n = rng.gen_range(2.min(shape.max_clauses)..=shape.max_clauses);
    let fact_height = |rng: &mut ChaCha8Rng| rng.gen_range(1..=shape.max_term_height.min(2));
    let h = fact_height(rng);
    let mut clauses = vec![random_fact(rng, shape, h)];
    let mut rules: Vec<HornClause> = Vec::new();
    while clauses.len() < n {
        let roll: f64 = rng.gen();
        if roll < 0.5 {
            let rule = random_certified_rule(rng, shape);
            rules.push(rule.clone());
            clauses.push(rule);
        } else if roll < 0.8 && !rules.is_empty() {
            let rule = rules.choose(rng).unwrap().clone();
            let names: Vec<String> = rule.body.iter().flat_map(atom_vars).collect::<BTreeSet<_>>().into_iter().collect();
            let values: Vec<Term> = names
                .iter()
                .map(|_| {
                    let h = rng.gen_range(1..=2);
                    random_term(rng, shape, h, &[])
                })
                .collect();
            let values: Vec<&Term> = values.iter().collect();
            for body in &rule.body {
                if clauses.len() < n {
                    clauses.push(HornClause::fact(instantiate(body, &names, &values)));
                }
            }
        } else {
            let h = fact_height(rng);
            clauses.push(random_fact(rng, shape, h));
        }
    }
    Program::new(clauses).expect("generated program is well-formed")
}

/// Range-restricted program with no containment requirement: bodies are
/// arbitrary and the head only uses body variables.
pub fn random_finitary_program(rng: &mut ChaCha8Rng, shape: &Shape) -> Program {
    let n = rng.gen_range(1..=shape.max_clauses);
    let mut clauses = vec![random_fact(rng, shape, shape.max_term_height)];
    while clauses.len() < n {
        if rng.gen_bool(0.4) {
            clauses.push(random_fact(rng, shape, shape.max_term_height));
            continue;
        }
        let body: Vec<Atom> = (0..rng.gen_range(1..=shape.max_body))
            .map(|_| random_atom(rng, shape, shape.max_term_height, &shape.vars))
            .collect();
        let vars: Vec<String> = body.iter().flat_map(atom_vars).collect::<BTreeSet<_>>().into_iter().collect();
        let vars: Vec<&str> = vars.iter().map(String::as_str).collect();
        let head = random_atom(rng, shape, shape.max_term_height, &vars);
        clauses.push(HornClause::new(head, body));
    }
    Program::new(clauses).expect("generated program is well-formed")
}

/// Every ground term over the shape's vocabulary of height at most `h`.
pub fn terms_up_to(shape: &Shape, h: u32) -> Vec<Term> {
    let mut all: Vec<Term> = shape.constants.iter().map(|c| Term::constant(c)).collect();
    let mut by_height = vec![all.clone()];
    for _ in 2..=h {
        let mut next = Vec::new();
        for &(f, arity) in &shape.functors {
            for args in tuples(&all, arity) {
                let t = Term::app(f, args);
                if height(&t) == by_height.len() as u32 + 1 {
                    next.push(t);
                }
            }
        }
        all.extend(next.iter().cloned());
        by_height.push(next);
    }
    all
}

fn tuples(items: &[Term], n: usize) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |t| {
                    let mut v = prefix.clone();
                    v.push(t.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Every ground atom of level at most `depth` over the shape's vocabulary.
pub fn base_up_to(shape: &Shape, depth: u32) -> Vec<GroundAtom> {
    if depth < 2 {
        return shape
            .predicates
            .iter()
            .filter(|(_, n)| *n == 0)
            .map(|(p, _)| GroundAtom::new(Atom::new(p, vec![])).unwrap())
            .collect();
    }
    let terms = terms_up_to(shape, depth - 1);
    let mut out = Vec::new();
    for &(p, arity) in &shape.predicates {
        for args in tuples(&terms, arity) {
            out.push(GroundAtom::new(Atom::new(p, args)).unwrap());
        }
    }
    out
}

pub fn random_interpretation(rng: &mut ChaCha8Rng, base: &[GroundAtom], density: f64) -> Interpretation {
    Interpretation::new(base.iter().filter(|_| rng.gen_bool(density)).cloned())
}

/// Two interpretations that agree below a random level and then diverge.
pub fn random_close_pair(
    rng: &mut ChaCha8Rng,
    base: &[GroundAtom],
    density: f64,
) -> (Interpretation, Interpretation) {
    let i = random_interpretation(rng, base, density);
    let max = base.iter().map(GroundAtom::level).max().unwrap_or(1);
    let from = rng.gen_range(1..=max);
    let j = Interpretation::new(base.iter().filter(|a| {
        if a.level() < from {
            i.contains(a)
        } else {
            rng.gen_bool(density)
        }
    }).cloned());
    (i, j)
}

fn substitute(t: &Term, names: &[String], values: &[&Term]) -> Term {
    match t {
        Term::Var(v) => values[names.iter().position(|n| n.as_str() == v.as_ref()).expect("bound variable")].clone(),
        Term::Const(_) => t.clone(),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| substitute(a, names, values)).collect()),
    }
}

fn instantiate(a: &Atom, names: &[String], values: &[&Term]) -> Atom {
    Atom { predicate: a.predicate.clone(), args: a.args.iter().map(|t| substitute(t, names, values)).collect() }
}

/// Least model restricted to level ≤ `depth`, by exhaustive grounding over
/// terms of height ≤ `depth - 1`. Exponential in the number of variables per
/// clause; keep `depth` small.
pub fn oracle_least_model(program: &Program, shape: &Shape, depth: u32) -> BTreeSet<String> {
    let terms = terms_up_to(shape, depth.saturating_sub(1).max(1));
    let mut model: BTreeSet<String> = BTreeSet::new();
    loop {
        let mut next = model.clone();
        for clause in program.clauses() {
            let names: Vec<String> = clause
                .atoms()
                .flat_map(atom_vars)
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            for values in tuples(&terms, names.len()) {
                let values: Vec<&Term> = values.iter().collect();
                let head = instantiate(&clause.head, &names, &values);
                if level(&head) > depth {
                    continue;
                }
                if clause.body.iter().all(|b| model.contains(&instantiate(b, &names, &values).to_string())) {
                    next.insert(head.to_string());
                }
            }
        }
        if next == model {
            return model;
        }
        model = next;
    }
}

/// Independent term containment: every subterm of a body argument occurs
/// as a subterm of some head argument.
pub fn oracle_containment(clause: &HornClause) -> bool {
    let mut head = Vec::new();
    clause.head.args.iter().for_each(|t| all_subterms(t, &mut head));
    clause.body.iter().all(|b| {
        let mut sub = Vec::new();
        b.args.iter().for_each(|t| all_subterms(t, &mut sub));
        sub.iter().all(|t| head.contains(t))
    })
}

/// Level distance by direct scan: exponent of the least level in the
/// symmetric difference, `None` for equal sets.
pub fn oracle_distance_exponent(i: &Interpretation, j: &Interpretation) -> Option<u32> {
    let a: BTreeSet<&GroundAtom> = i.iter().collect();
    let b: BTreeSet<&GroundAtom> = j.iter().collect();
    a.symmetric_difference(&b).map(|x| level(x.as_atom())).min()
}

pub fn strings(i: &Interpretation) -> BTreeSet<String> {
    i.iter().map(|a| a.to_string()).collect()
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}
