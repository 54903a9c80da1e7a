//! Fixpoint semantics for definite Horn programs: bounded least models,
//! a term-containment guard with a decider for certified programs, limits
//! of program sequences, and a level-based ultrametric on interpretations.

pub mod cli;
pub mod decider;
pub mod engine;
pub mod error;
pub mod guard;
pub mod limits;
pub mod metric;
pub mod parser;
pub mod report;
pub mod syntax;

pub use decider::{decide_membership, proof_tree, Membership, ProofTree, Verdict};
pub use engine::{bounded_least_model, is_bounded_model, tp_step, FixpointReport, Strategy, Substitution};
pub use error::{Error, Position, Result};
pub use guard::{check_program, GuardReport};
pub use limits::{clause_limits, model_limit_comparison, LimitVerdict, ModelLimitReport, SequenceSchema};
pub use metric::{distance, set_distance, stability_probe, DyadicDistance, StabilityReport};
pub use parser::{parse_atom, parse_clause, parse_ground_atom, parse_interpretation, parse_program};
pub use syntax::{Atom, GroundAtom, HornClause, Interpretation, Program, Signature, Term};
