//! The immediate consequence operator and depth-bounded least fixpoints.
//!
//! `tp_step` computes `{ head(π)Θ : π ∈ Π, body(π)Θ ⊆ I }` restricted to
//! atoms of level ≤ D. `bounded_least_model` runs the Kleene iteration
//! `I₀ = ∅, I_{k+1} = I_k ∪ tp_step(I_k)` to its fixpoint, which exists
//! because `HB_{≤D}` is finite. Heads above the bound are dropped and
//! counted; for programs that pass the term-containment check no derivation
//! of a level-≤D atom passes through a higher atom, so the truncation is
//! exact there.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::guard;
use crate::syntax::{
    ground_terms_up_to, Atom, GroundAtom, HornClause, Interpretation, Name, Program, Signature,
    Term,
};

/// Bindings from variable names to ground terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution(BTreeMap<Name, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Panics if `value` is not ground.
    pub fn bind(mut self, var: &str, value: Term) -> Self {
        assert!(value.is_ground(), "substitution values must be ground");
        self.0.insert(var.into(), value);
        self
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.0.get(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.0.iter().map(|(k, v)| (&**k, v))
    }

    /// Replaces bound variables; unbound ones are left in place.
    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply_term(a)).collect()),
        }
    }

    pub fn apply(&self, atom: &Atom) -> Atom {
        Atom { predicate: atom.predicate.clone(), args: atom.args.iter().map(|a| self.apply_term(a)).collect() }
    }

    /// Grounds `atom`, or returns the first variable left unbound.
    pub fn ground(&self, atom: &Atom) -> std::result::Result<GroundAtom, String> {
        let applied = self.apply(atom);
        if let Some(v) = applied.vars().into_iter().next() {
            return Err(v.to_string());
        }
        Ok(GroundAtom::new_unchecked(applied))
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

fn match_term(pattern: &Term, target: &Term, subst: &mut Substitution) -> bool {
    match (pattern, target) {
        (Term::Var(v), _) => match subst.0.get(v) {
            Some(bound) => bound == target,
            None => {
                subst.0.insert(v.clone(), target.clone());
                true
            }
        },
        (Term::Const(a), Term::Const(b)) => a == b,
        (Term::App(f, ps), Term::App(g, ts)) => {
            f == g && ps.len() == ts.len() && ps.iter().zip(ts).all(|(p, t)| match_term(p, t, subst))
        }
        _ => false,
    }
}

/// One-way matching: the unique extension of `seed` under which `pattern`
/// instantiates to `target`, if any.
pub fn match_atom(pattern: &Atom, target: &GroundAtom, seed: &Substitution) -> Option<Substitution> {
    if pattern.predicate.as_ref() != target.predicate() || pattern.args.len() != target.args().len() {
        return None;
    }
    let mut s = seed.clone();
    pattern
        .args
        .iter()
        .zip(target.args())
        .all(|(p, t)| match_term(p, t, &mut s))
        .then_some(s)
}

/// Ground atoms bucketed by predicate, each bucket in canonical order.
#[derive(Default)]
pub(crate) struct AtomIndex<'a> {
    buckets: HashMap<&'a str, HashMap<usize, Vec<&'a GroundAtom>>>,
}

impl<'a> AtomIndex<'a> {
    pub(crate) fn new(atoms: impl IntoIterator<Item = &'a GroundAtom>) -> Self {
        let mut buckets: HashMap<_, HashMap<_, Vec<_>>> = HashMap::new();
        for a in atoms {
            buckets.entry(a.predicate()).or_default().entry(a.args().len()).or_default().push(a);
        }
        AtomIndex { buckets }
    }

    fn candidates(&self, pattern: &Atom) -> &[&'a GroundAtom] {
        self.buckets
            .get(pattern.predicate.as_ref())
            .and_then(|by_arity| by_arity.get(&pattern.args.len()))
            .map_or(&[], Vec::as_slice)
    }

    fn is_empty_for(&self, pattern: &Atom) -> bool {
        self.candidates(pattern).is_empty()
    }
}

/// Enumerates every substitution matching `body[i]` against `sources[i]`,
/// left to right, extending `seed`.
pub(crate) fn join(
    body: &[Atom],
    sources: &[&AtomIndex<'_>],
    seed: &Substitution,
    out: &mut impl FnMut(&Substitution),
) {
    match body.split_first() {
        None => out(seed),
        Some((first, rest)) => {
            for cand in sources[0].candidates(first) {
                if let Some(s) = match_atom(first, cand, seed) {
                    join(rest, &sources[1..], &s, out);
                }
            }
        }
    }
}

fn non_finitary(clause: &HornClause, variable: String) -> Error {
    Error::NonFinitary { clause: clause.to_string(), variable }
}

/// Result of one application of the operator.
pub(crate) struct Step {
    pub(crate) derived: BTreeSet<GroundAtom>,
    pub(crate) dropped: BTreeSet<GroundAtom>,
}

fn naive_step(
    program: &Program,
    current: &BTreeSet<GroundAtom>,
    admit: &impl Fn(&GroundAtom) -> bool,
) -> Result<Step> {
    let index = AtomIndex::new(current);
    let mut step = Step { derived: BTreeSet::new(), dropped: BTreeSet::new() };
    for clause in program.clauses() {
        let sources = vec![&index; clause.body.len()];
        let mut err = None;
        join(&clause.body, &sources, &Substitution::new(), &mut |s| {
            if err.is_some() {
                return;
            }
            match s.ground(&clause.head) {
                Ok(h) if admit(&h) => {
                    step.derived.insert(h);
                }
                Ok(h) => {
                    step.dropped.insert(h);
                }
                Err(v) => err = Some(non_finitary(clause, v)),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(step)
}

fn check_within(i: &Interpretation, depth: u32) -> Result<()> {
    if depth == 0 {
        return Err(Error::InvalidDepth(depth));
    }
    match i.iter().find(|a| a.level() > depth) {
        Some(a) => Err(Error::AboveDepth { atom: a.to_string(), level: a.level(), depth }),
        None => Ok(()),
    }
}

/// One application of the immediate consequence operator, truncated at level
/// `depth`.
pub fn tp_step(program: &Program, interp: &Interpretation, depth: u32) -> Result<Interpretation> {
    check_within(interp, depth)?;
    let step = naive_step(program, interp.atoms(), &|a| a.level() <= depth)?;
    Ok(Interpretation::from_parts(step.derived, Some(depth)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Re-evaluate every clause against the whole interpretation each stage.
    Naive,
    /// Only enumerate substitutions that use at least one atom new in the
    /// previous stage.
    SemiNaive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixpointReport {
    pub model: Interpretation,
    /// Operator applications until `I_{k+1} = I_k`; the last one adds nothing.
    pub iterations: usize,
    /// Newly derived atoms per stage; `delta_sizes.len() == iterations`.
    pub delta_sizes: Vec<usize>,
    /// The program passed both guard checks, so the model equals the true
    /// least model restricted to level ≤ D.
    pub exact: bool,
    /// Distinct atoms derived above the depth bound and discarded.
    pub dropped_above_depth: usize,
}

/// Stages of a Kleene iteration under an admission filter.
pub(crate) struct Kleene {
    pub(crate) model: BTreeSet<GroundAtom>,
    pub(crate) deltas: Vec<Vec<GroundAtom>>,
    pub(crate) dropped: BTreeSet<GroundAtom>,
}

pub(crate) fn kleene(
    program: &Program,
    strategy: Strategy,
    admit: impl Fn(&GroundAtom) -> bool,
) -> Result<Kleene> {
    if let Some((clause, v)) = guard::first_non_finitary(program) {
        return Err(non_finitary(&clause, v));
    }
    let mut model: BTreeSet<GroundAtom> = BTreeSet::new();
    let mut deltas: Vec<Vec<GroundAtom>> = Vec::new();
    let mut dropped = BTreeSet::new();
    loop {
        let step = match (strategy, deltas.last()) {
            (Strategy::Naive, _) | (Strategy::SemiNaive, None) => naive_step(program, &model, &admit)?,
            (Strategy::SemiNaive, Some(delta)) => semi_naive_step(program, &model, delta, &admit)?,
        };
        dropped.extend(step.dropped);
        let fresh: Vec<GroundAtom> = step.derived.into_iter().filter(|a| !model.contains(a)).collect();
        model.extend(fresh.iter().cloned());
        let done = fresh.is_empty();
        deltas.push(fresh);
        if done {
            break;
        }
        // every productive stage adds an atom of the finite admitted base
        debug_assert!(deltas.len() <= model.len() + 1);
    }
    Ok(Kleene { model, deltas, dropped })
}

/// Semi-naive stage: for body position `i`, positions before `i` range over
/// the previous interpretation, `i` over the delta, and later positions over
/// the full current interpretation. Facts never fire here, they all fired in
/// the first stage.
fn semi_naive_step(
    program: &Program,
    model: &BTreeSet<GroundAtom>,
    delta: &[GroundAtom],
    admit: &impl Fn(&GroundAtom) -> bool,
) -> Result<Step> {
    let delta_set: BTreeSet<&GroundAtom> = delta.iter().collect();
    let full = AtomIndex::new(model);
    let old = AtomIndex::new(model.iter().filter(|a| !delta_set.contains(a)));
    let new = AtomIndex::new(delta);
    let mut step = Step { derived: BTreeSet::new(), dropped: BTreeSet::new() };
    for clause in program.rules() {
        for i in 0..clause.body.len() {
            if new.is_empty_for(&clause.body[i]) {
                continue;
            }
            let sources: Vec<&AtomIndex> = (0..clause.body.len())
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Less => &old,
                    std::cmp::Ordering::Equal => &new,
                    std::cmp::Ordering::Greater => &full,
                })
                .collect();
            let mut err = None;
            join(&clause.body, &sources, &Substitution::new(), &mut |s| {
                if err.is_some() {
                    return;
                }
                match s.ground(&clause.head) {
                    Ok(h) if model.contains(&h) => {}
                    Ok(h) if admit(&h) => {
                        step.derived.insert(h);
                    }
                    Ok(h) => {
                        step.dropped.insert(h);
                    }
                    Err(v) => err = Some(non_finitary(clause, v)),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
    }
    Ok(step)
}

/// Least model of `program` restricted to atoms of level ≤ `depth`.
pub fn bounded_least_model(program: &Program, depth: u32) -> Result<FixpointReport> {
    bounded_least_model_with(program, depth, Strategy::SemiNaive)
}

pub fn bounded_least_model_with(program: &Program, depth: u32, strategy: Strategy) -> Result<FixpointReport> {
    if depth == 0 {
        return Err(Error::InvalidDepth(depth));
    }
    let run = kleene(program, strategy, |a| a.level() <= depth)?;
    Ok(FixpointReport {
        iterations: run.deltas.len(),
        delta_sizes: run.deltas.iter().map(Vec::len).collect(),
        exact: guard::check_program(program).certified(),
        dropped_above_depth: run.dropped.len(),
        model: Interpretation::from_parts(run.model, Some(depth)),
    })
}

/// A ground clause instance `head :- body`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundInstance {
    pub head: GroundAtom,
    pub body: Vec<GroundAtom>,
}

impl fmt::Display for GroundInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (i, b) in self.body.iter().enumerate() {
            f.write_str(if i == 0 { " :- " } else { ", " })?;
            write!(f, "{b}")?;
        }
        f.write_str(".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelCheck {
    pub holds: bool,
    /// First violated ground instance, in clause order then canonical order.
    pub witness: Option<GroundInstance>,
}

/// Checks that `interp` satisfies every ground instance of every clause whose
/// atoms all have level ≤ `depth`. Satisfaction is relative to that instance
/// space: instances with a higher atom are not inspected.
pub fn is_bounded_model(program: &Program, interp: &Interpretation, depth: u32) -> Result<ModelCheck> {
    check_within(interp, depth)?;
    let index = AtomIndex::new(interp.atoms());
    // Head variables not bound by the body range over the bounded universe.
    let universe: Option<Vec<Term>> = if guard::first_non_finitary(program).is_some() {
        let sig = program
            .signature()
            .merge(&Signature::of_atoms(interp.iter())?)?;
        Some(ground_terms_up_to(&sig, depth.saturating_sub(1)))
    } else {
        None
    };
    for clause in program.clauses() {
        let sources = vec![&index; clause.body.len()];
        let mut witness = None;
        join(&clause.body, &sources, &Substitution::new(), &mut |s| {
            if witness.is_some() {
                return;
            }
            let body: Vec<GroundAtom> = clause
                .body
                .iter()
                .map(|b| s.ground(b).expect("body fully matched"))
                .collect();
            let mut check_head = |s: &Substitution| {
                if witness.is_some() {
                    return;
                }
                let head = s.ground(&clause.head).expect("head grounded");
                if head.level() <= depth && !interp.contains(&head) {
                    witness = Some(GroundInstance { head, body: body.clone() });
                }
            };
            let free: Vec<&str> = {
                let bound = clause.body_vars();
                clause.head.vars().into_iter().filter(|v| !bound.contains(v)).collect()
            };
            match &universe {
                Some(terms) if !free.is_empty() => for_each_binding(&free, terms, s, &mut check_head),
                _ => check_head(s),
            }
        });
        if witness.is_some() {
            return Ok(ModelCheck { holds: false, witness });
        }
    }
    Ok(ModelCheck { holds: true, witness: None })
}

fn for_each_binding(vars: &[&str], terms: &[Term], seed: &Substitution, f: &mut impl FnMut(&Substitution)) {
    match vars.split_first() {
        None => f(seed),
        Some((v, rest)) => {
            for t in terms {
                let s = seed.clone().bind(v, t.clone());
                for_each_binding(rest, terms, &s, f);
            }
        }
    }
}
