//! Syntactic certification of programs.
//!
//! Two independent per-clause checks:
//!
//! * **term containment** – every term occurring in a body atom (any
//!   subterm of any argument, variables included) also occurs in the head.
//!   This forces every derivation step to be level non-increasing from head
//!   to body, which is what makes membership decidable and fixed points
//!   stable. The stricter top-level reading (each body argument is itself a
//!   head argument) is reported alongside when the two disagree.
//! * **finitary** (range restriction) – every head variable of a rule occurs
//!   in its body, and facts are ground. Only finitary programs map finite
//!   interpretations to finite interpretations.
//!
//! Both checks are linear in clause size up to hashing.

use std::collections::HashSet;

use serde::Serialize;

use crate::syntax::{HornClause, Program, Term};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContainmentVerdict {
    pub passes: bool,
    /// First body term (outermost first, left to right) missing from the head.
    pub offending: Option<String>,
    /// Verdict under the top-level-argument reading; only filled in when it
    /// differs from `passes`.
    pub top_level_passes: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinitaryVerdict {
    pub passes: bool,
    /// Head variable absent from the body (rules), or the first variable of a
    /// non-ground fact.
    pub unbound_variable: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseVerdict {
    pub clause: HornClause,
    pub containment: ContainmentVerdict,
    pub finitary: FinitaryVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardReport {
    pub clauses: Vec<ClauseVerdict>,
    pub containment_all: bool,
    pub finitary_all: bool,
}

impl GuardReport {
    /// Both checks pass for every clause.
    pub fn certified(&self) -> bool {
        self.containment_all && self.finitary_all
    }

    /// First failing clause with a short reason, for error messages.
    pub fn first_failure(&self) -> Option<String> {
        self.clauses.iter().find_map(|v| {
            if let Some(t) = &v.containment.offending {
                Some(format!("`{}`: body term {t} does not occur in the head", v.clause))
            } else {
                v.finitary
                    .unbound_variable
                    .as_ref()
                    .map(|x| format!("`{}`: variable {x} is not bound by the body", v.clause))
            }
        })
    }
}

/// Term-containment check for one clause. Facts pass vacuously.
pub fn check_containment(clause: &HornClause) -> ContainmentVerdict {
    let head_terms: HashSet<&Term> = clause.head.subterms();
    let mut offending = None;
    'outer: for b in &clause.body {
        for arg in &b.args {
            let mut missing = None;
            arg.visit(&mut |t| {
                if missing.is_none() && !head_terms.contains(t) {
                    missing = Some(t);
                }
            });
            if let Some(t) = missing {
                offending = Some(t.to_string());
                break 'outer;
            }
        }
    }
    let passes = offending.is_none();
    if passes {
        debug_assert!(clause.body_vars().is_subset(&clause.head.vars()));
    }

    let head_args: HashSet<&Term> = clause.head.args.iter().collect();
    let top_level = clause.body.iter().all(|b| b.args.iter().all(|a| head_args.contains(a)));
    ContainmentVerdict {
        passes,
        offending,
        top_level_passes: (top_level != passes).then_some(top_level),
    }
}

/// Range-restriction check for one clause.
pub fn check_finitary(clause: &HornClause) -> FinitaryVerdict {
    let head_vars = clause.head.vars();
    let unbound = if clause.is_fact() {
        head_vars.into_iter().next()
    } else {
        let body_vars = clause.body_vars();
        head_vars.into_iter().find(|v| !body_vars.contains(v))
    };
    FinitaryVerdict { passes: unbound.is_none(), unbound_variable: unbound.map(str::to_string) }
}

pub fn check_program(program: &Program) -> GuardReport {
    let clauses: Vec<_> = program
        .clauses()
        .iter()
        .map(|c| ClauseVerdict {
            clause: c.clone(),
            containment: check_containment(c),
            finitary: check_finitary(c),
        })
        .collect();
    GuardReport {
        containment_all: clauses.iter().all(|v| v.containment.passes),
        finitary_all: clauses.iter().all(|v| v.finitary.passes),
        clauses,
    }
}

/// Only the finitary half; cheaper when containment is irrelevant.
pub fn first_non_finitary(program: &Program) -> Option<(HornClause, String)> {
    program.clauses().iter().find_map(|c| {
        check_finitary(c).unbound_variable.map(|v| (c.clone(), v))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_clause, parse_program};

    fn containment(text: &str) -> ContainmentVerdict {
        check_containment(&parse_clause(text).unwrap())
    }

    fn finitary(text: &str) -> FinitaryVerdict {
        check_finitary(&parse_clause(text).unwrap())
    }

    #[test]
    fn growing_head_passes() {
        let v = containment("p(f(X)) :- p(X).");
        assert!(v.passes);
        assert_eq!(v.offending, None);
        // X is not a top-level head argument, so the stricter reading disagrees
        assert_eq!(v.top_level_passes, Some(false));
    }

    #[test]
    fn growing_body_fails_with_offending_term() {
        let v = containment("p(X) :- p(f(X)).");
        assert!(!v.passes);
        assert_eq!(v.offending.as_deref(), Some("f(X)"));
        assert_eq!(v.top_level_passes, None);
    }

    #[test]
    fn facts_pass_vacuously() {
        assert!(containment("p(f(a)).").passes);
        assert!(containment("q.").passes);
    }

    #[test]
    fn body_constant_must_occur_in_head() {
        let v = containment("p(X) :- q(X, a).");
        assert_eq!(v.offending.as_deref(), Some("a"));
        assert!(containment("p(g(X, a)) :- q(X, a).").passes);
    }

    #[test]
    fn iterated_family_passes() {
        for k in 1..=5 {
            let v = containment(&format!("p(f^{k}(X)) :- p(X)."));
            assert!(v.passes, "k = {k}");
        }
    }

    #[test]
    fn finitary_examples() {
        assert!(finitary("p(f(X)) :- p(X).").passes);
        let v = finitary("p(X, Y) :- q(X).");
        assert_eq!(v.unbound_variable.as_deref(), Some("Y"));
        let v = finitary("p(X).");
        assert!(!v.passes);
        assert_eq!(v.unbound_variable.as_deref(), Some("X"));
    }

    #[test]
    fn program_flags_are_conjunctions() {
        let r = check_program(&parse_program("p(f(X)) :- p(X).\np(f(a)).").unwrap());
        assert!(r.certified());
        let r = check_program(&parse_program("p(X) :- p(f(X)).\np(f(a)).").unwrap());
        assert!(!r.containment_all);
        assert!(r.finitary_all);
        assert!(r.first_failure().unwrap().contains("f(X)"));
        assert!(check_program(&Program::empty()).certified());
    }
}
