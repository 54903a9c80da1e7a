//! Membership in the least Herbrand model for programs that pass the
//! term-containment check.
//!
//! Under term containment every atom in a derivation of `q` only uses terms
//! that already occur in `q`. The search space is therefore the finite set
//! `U(q)` of atoms over the program's predicates whose arguments are
//! subterms of `q`, and the least fixpoint restricted to `U(q)` decides
//! membership. Facts participate exactly when their arguments lie in that
//! pool.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::engine::{join, kleene, match_atom, AtomIndex, Strategy, Substitution};
use crate::error::{Error, Result};
use crate::guard;
use crate::syntax::{GroundAtom, HornClause, Program, Term};

/// A derivation of `root`: `root = head(clause)Θ` and the children derive
/// `body(clause)Θ` in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTree {
    pub root: GroundAtom,
    pub clause: HornClause,
    pub substitution: Substitution,
    pub children: Vec<ProofTree>,
}

impl ProofTree {
    /// Number of nodes on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        1 + self.children.iter().map(ProofTree::height).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ProofTree::size).sum::<usize>()
    }

    /// Replays the derivation: each node must be an instance of a clause of
    /// `program` whose body instances are exactly the children's roots.
    pub fn is_valid_for(&self, program: &Program) -> bool {
        if !program.contains(&self.clause) {
            return false;
        }
        match self.substitution.ground(&self.clause.head) {
            Ok(h) if h == self.root => {}
            _ => return false,
        }
        if self.children.len() != self.clause.body.len() {
            return false;
        }
        self.clause.body.iter().zip(&self.children).all(|(b, child)| {
            matches!(self.substitution.ground(b), Ok(g) if g == child.root) && child.is_valid_for(program)
        })
    }

    pub fn nodes(&self) -> Vec<&ProofTree> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.nodes());
        }
        out
    }

    fn render(&self, indent: usize, out: &mut String) {
        use std::fmt::Write;
        let _ = write!(out, "{:indent$}{}  [{}", "", self.root, self.clause, indent = indent);
        if !self.substitution.is_empty() {
            let _ = write!(out, " {}", self.substitution);
        }
        out.push_str("]\n");
        for c in &self.children {
            c.render(indent + 2, out);
        }
    }
}

impl fmt::Display for ProofTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render(0, &mut s);
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Membership::In => "In",
            Membership::Out => "Out",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Membership,
    /// Present iff `status` is `In`; of minimal height.
    pub proof: Option<ProofTree>,
    /// `|U(q)|`, the number of candidate atoms.
    pub universe_size: u64,
    /// Atoms of `U(q)` actually derived.
    pub derived: usize,
}

fn universe_size(program: &Program, pool: usize) -> u64 {
    program
        .signature()
        .predicates
        .values()
        .map(|&arity| (pool as u64).saturating_pow(arity as u32))
        .fold(0u64, u64::saturating_add)
}

/// Decides whether `query` belongs to the least Herbrand model of `program`.
///
/// Fails with [`Error::Uncertified`] unless the program passes both guard
/// checks; without term containment membership is undecidable in general.
pub fn decide_membership(program: &Program, query: &GroundAtom) -> Result<Verdict> {
    let report = guard::check_program(program);
    if !report.certified() {
        return Err(Error::Uncertified(report.first_failure().unwrap_or_default()));
    }
    let pool: HashSet<Term> = query.subterms().into_iter().collect();
    let size = universe_size(program, pool.len());
    let bound = (program.signature().predicates.len() as u64)
        .saturating_mul((pool.len() as u64).saturating_pow(program.signature().max_predicate_arity() as u32));
    assert!(size <= bound, "restricted universe exceeds its finiteness bound");

    let run = kleene(program, Strategy::SemiNaive, |a| a.args().iter().all(|t| pool.contains(t)))?;
    assert!(run.model.len() as u64 <= size);

    let status = if run.model.contains(query) { Membership::In } else { Membership::Out };
    let proof = match status {
        Membership::In => {
            let stages: HashMap<&GroundAtom, usize> = run
                .deltas
                .iter()
                .enumerate()
                .flat_map(|(i, d)| d.iter().map(move |a| (a, i + 1)))
                .collect();
            Some(build_tree(program, &stages, query))
        }
        Membership::Out => None,
    };
    Ok(Verdict { status, proof, universe_size: size, derived: run.model.len() })
}

/// A minimal-height derivation of `query`, or `None` when it is not in the
/// least model.
pub fn proof_tree(program: &Program, query: &GroundAtom) -> Result<Option<ProofTree>> {
    Ok(decide_membership(program, query)?.proof)
}

/// An atom first derived at stage `s` has a derivation of height `s` whose
/// body atoms come from stages `< s`; taking the first such clause and
/// substitution in canonical order keeps the result deterministic.
fn build_tree(program: &Program, stages: &HashMap<&GroundAtom, usize>, atom: &GroundAtom) -> ProofTree {
    let stage = stages[atom];
    let earlier: Vec<&GroundAtom> = {
        let mut v: Vec<_> = stages.iter().filter(|(_, &s)| s < stage).map(|(a, _)| *a).collect();
        v.sort();
        v
    };
    let index = AtomIndex::new(earlier.iter().copied());
    for clause in program.clauses() {
        let Some(seed) = match_atom(&clause.head, atom, &Substitution::new()) else {
            continue;
        };
        let sources = vec![&index; clause.body.len()];
        let mut found: Option<Substitution> = None;
        join(&clause.body, &sources, &seed, &mut |s| {
            if found.is_none() {
                found = Some(s.clone());
            }
        });
        if let Some(subst) = found {
            let children = clause
                .body
                .iter()
                .map(|b| {
                    let g = subst.ground(b).expect("matched body atom is ground");
                    build_tree(program, stages, &g)
                })
                .collect();
            return ProofTree { root: atom.clone(), clause: clause.clone(), substitution: subst, children };
        }
    }
    unreachable!("derived atom {atom} has no justification")
}
