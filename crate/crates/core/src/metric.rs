//! The level-mapping ultrametric on interpretations and a bounded-horizon
//! stability probe for fixed points of the consequence operator.
//!
//! `d(I, J) = 2^-n` where `n` is the least level of an atom in exactly one of
//! `I`, `J`, and `d(I, I) = 0`. Distances are kept as exponents, never as
//! floats.

use std::cmp::Ordering;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use crate::engine::tp_step;
use crate::error::{Error, Result};
use crate::guard;
use crate::syntax::{bounded_base, Interpretation, Program, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DyadicDistance {
    Zero,
    /// Exactly `2^-n`.
    Exp(u32),
    /// At most `2^-n`: two truncations agree on every level below `n` and
    /// nothing is known above.
    AtMost(u32),
}

impl DyadicDistance {
    /// Exponent of the (upper bound on the) distance, `None` for zero.
    pub fn exponent(&self) -> Option<u32> {
        match *self {
            DyadicDistance::Zero => None,
            DyadicDistance::Exp(n) | DyadicDistance::AtMost(n) => Some(n),
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, DyadicDistance::AtMost(_))
    }
}

impl Ord for DyadicDistance {
    /// Orders by value, treating `AtMost(n)` as just below `Exp(n)`.
    fn cmp(&self, other: &Self) -> Ordering {
        fn key(d: &DyadicDistance) -> (u8, std::cmp::Reverse<u32>, u8) {
            match *d {
                DyadicDistance::Zero => (0, std::cmp::Reverse(u32::MAX), 0),
                DyadicDistance::AtMost(n) => (1, std::cmp::Reverse(n), 0),
                DyadicDistance::Exp(n) => (1, std::cmp::Reverse(n), 1),
            }
        }
        key(self).cmp(&key(other))
    }
}

impl PartialOrd for DyadicDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DyadicDistance::Zero => f.write_str("0"),
            DyadicDistance::Exp(n) => write!(f, "2^-{n}"),
            DyadicDistance::AtMost(n) => write!(f, "<=2^-{n}"),
        }
    }
}

impl FromStr for DyadicDistance {
    type Err = String;

    /// Accepts `0`, `2^-n` and `<=2^-n` with `n ≥ 1`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s == "0" {
            return Ok(DyadicDistance::Zero);
        }
        let (at_most, rest) = match s.strip_prefix("<=") {
            Some(r) => (true, r),
            None => (false, s),
        };
        let n: u32 = rest
            .strip_prefix("2^-")
            .and_then(|e| e.parse().ok())
            .filter(|&n| n >= 1)
            .ok_or_else(|| format!("expected `0` or `2^-n` with n >= 1, got `{s}`"))?;
        Ok(if at_most { DyadicDistance::AtMost(n) } else { DyadicDistance::Exp(n) })
    }
}

/// Distance between two interpretations.
///
/// When either side is a depth-`D` truncation and the two sets agree on
/// every level up to `D`, the true interpretations may still differ above
/// `D`, so the result is the marker `AtMost(D + 1)` rather than `Zero`.
pub fn distance(i: &Interpretation, j: &Interpretation) -> DyadicDistance {
    let first = i.symmetric_difference(j).next().map(|a| a.level());
    let bound = match (i.depth_bound(), j.depth_bound()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    match (first, bound) {
        (Some(n), Some(d)) if n > d => DyadicDistance::AtMost(d + 1),
        (Some(n), _) => DyadicDistance::Exp(n),
        (None, Some(d)) => DyadicDistance::AtMost(d + 1),
        (None, None) => DyadicDistance::Zero,
    }
}

/// Distance between the sets as given, ignoring depth bounds. This is the
/// exact metric of the truncated space `2^{HB≤D}`.
pub fn set_distance(i: &Interpretation, j: &Interpretation) -> DyadicDistance {
    match i.symmetric_difference(j).next() {
        Some(a) => DyadicDistance::Exp(a.level()),
        None => DyadicDistance::Zero,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trial {
    pub perturbation: Interpretation,
    pub initial_distance: DyadicDistance,
    /// `d(fᵗ(I₀), J)` for `t = 1..=steps`.
    pub trajectory: Vec<DyadicDistance>,
    pub max_distance: DyadicDistance,
    /// First step (1-based) whose distance reached epsilon.
    pub first_escape: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    /// No trajectory reached epsilon within the horizon. Evidence, not proof.
    NoEscapeObserved,
    /// Trial `index` reached epsilon, refuting stability.
    InstabilityWitness { trial: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub fixpoint: Interpretation,
    pub epsilon: DyadicDistance,
    pub steps: usize,
    pub depth: u32,
    pub trials: Vec<Trial>,
    pub classification: Classification,
}

/// Iterates `I_{t+1} = f(I_t)` (truncated at `depth`) from each perturbation
/// and records the distance to the fixed point `fixpoint`. A trajectory
/// escapes when some distance is `≥ epsilon`.
///
/// Distances are measured in the truncated space, so two truncations that
/// agree up to `depth` are at distance zero here.
pub fn stability_probe(
    program: &Program,
    fixpoint: &Interpretation,
    perturbations: &[Interpretation],
    epsilon: DyadicDistance,
    steps: usize,
    depth: u32,
) -> Result<StabilityReport> {
    if perturbations.is_empty() {
        return Err(Error::NoPerturbations);
    }
    if let Some((clause, variable)) = guard::first_non_finitary(program) {
        return Err(Error::NonFinitary { clause: clause.to_string(), variable });
    }
    let image = tp_step(program, fixpoint, depth)?;
    if let Some(a) = image.symmetric_difference(fixpoint).next() {
        let reason = if image.contains(a) { "is derived but absent" } else { "is present but not derived" };
        return Err(Error::NotFixpoint { atom: a.to_string(), reason });
    }

    let mut trials = Vec::with_capacity(perturbations.len());
    for start in perturbations {
        let mut current = start.clone();
        let mut trajectory = Vec::with_capacity(steps);
        for _ in 0..steps {
            current = tp_step(program, &current, depth)?;
            trajectory.push(set_distance(&current, fixpoint));
        }
        let first_escape = trajectory.iter().position(|d| *d >= epsilon).map(|i| i + 1);
        trials.push(Trial {
            perturbation: start.clone(),
            initial_distance: set_distance(start, fixpoint),
            max_distance: trajectory.iter().copied().max().unwrap_or(DyadicDistance::Zero),
            trajectory,
            first_escape,
        });
    }
    let classification = match trials.iter().position(|t| t.first_escape.is_some()) {
        Some(trial) => Classification::InstabilityWitness { trial },
        None => Classification::NoEscapeObserved,
    };
    Ok(StabilityReport {
        fixpoint: fixpoint.clone(),
        epsilon,
        steps,
        depth,
        trials,
        classification,
    })
}

/// `J △ {A}` for every ground atom `A` over `signature` with level in
/// `levels`, in canonical order of `A`. Each lies at distance exactly
/// `2^-level(A)` from `J`.
pub fn perturbation_family(
    fixpoint: &Interpretation,
    signature: &Signature,
    levels: RangeInclusive<u32>,
) -> Result<Vec<Interpretation>> {
    if levels.is_empty() || *levels.end() == 0 {
        return Ok(Vec::new());
    }
    let base = bounded_base(signature, *levels.end())?;
    Ok(base
        .iter()
        .filter(|a| levels.contains(&a.level()))
        .map(|a| fixpoint.toggle(a))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_interpretation, parse_program};

    fn interp(s: &str) -> Interpretation {
        parse_interpretation(s).unwrap()
    }

    #[test]
    fn distance_examples() {
        let i = interp("p(a)\np(f(a))");
        assert_eq!(distance(&i, &i), DyadicDistance::Zero);
        for k in 1..=10u32 {
            let i = interp(&format!("p(f^{k}(a))"));
            assert_eq!(distance(&i, &Interpretation::empty()), DyadicDistance::Exp(k + 2));
        }
        assert_eq!(distance(&interp("p(a)"), &Interpretation::empty()), DyadicDistance::Exp(2));
    }

    #[test]
    fn truncations_yield_marker() {
        let i = interp("p(a)").truncate(4);
        assert_eq!(distance(&i, &i), DyadicDistance::AtMost(5));
        let j = interp("p(a)\np(f^5(a))");
        assert_eq!(distance(&i, &j), DyadicDistance::AtMost(5));
        assert_eq!(distance(&i, &Interpretation::empty()), DyadicDistance::Exp(2));
        assert_eq!(set_distance(&i, &i), DyadicDistance::Zero);
    }

    #[test]
    fn ordering() {
        use DyadicDistance::*;
        assert!(Zero < Exp(40));
        assert!(Exp(3) < Exp(2));
        assert!(AtMost(3) < Exp(3));
        assert!(Exp(4) < AtMost(3));
        let mut v = vec![Exp(2), Zero, Exp(5), AtMost(5)];
        v.sort();
        assert_eq!(v, [Zero, AtMost(5), Exp(5), Exp(2)]);
    }

    #[test]
    fn parse_and_print() {
        for s in ["0", "2^-3", "<=2^-7"] {
            assert_eq!(s.parse::<DyadicDistance>().unwrap().to_string(), s);
        }
        assert!("2^-0".parse::<DyadicDistance>().is_err());
        assert!("0.125".parse::<DyadicDistance>().is_err());
    }

    #[test]
    fn shrinking_rule_escapes() {
        let p = parse_program("p(X) :- p(f(X)).").unwrap();
        let k = 5;
        let start = interp(&format!("p(f^{k}(a))"));
        let r = stability_probe(&p, &Interpretation::empty(), &[start], DyadicDistance::Exp(3), 6, 8).unwrap();
        let t = &r.trials[0];
        assert_eq!(t.initial_distance, DyadicDistance::Exp(k + 2));
        assert_eq!(t.trajectory[k as usize - 1], DyadicDistance::Exp(2));
        assert_eq!(t.first_escape, Some(4));
        assert_eq!(t.max_distance, DyadicDistance::Exp(2));
        assert_eq!(r.classification, Classification::InstabilityWitness { trial: 0 });
    }

    #[test]
    fn growing_rule_does_not_escape() {
        let p = parse_program("p(f(X)) :- p(X).").unwrap();
        let start = interp("p(f^3(a))");
        let r = stability_probe(&p, &Interpretation::empty(), &[start], DyadicDistance::Exp(4), 10, 9).unwrap();
        let t = &r.trials[0];
        assert!(t.trajectory.iter().all(|d| *d <= t.initial_distance));
        assert_eq!(r.classification, Classification::NoEscapeObserved);
    }

    #[test]
    fn fixed_point_is_stationary() {
        let p = parse_program("p(f(X)) :- p(X).\np(f(a)).").unwrap();
        let j = crate::engine::bounded_least_model(&p, 6).unwrap().model;
        let r = stability_probe(&p, &j, std::slice::from_ref(&j), DyadicDistance::Exp(3), 5, 6).unwrap();
        assert!(r.trials[0].trajectory.iter().all(|d| *d == DyadicDistance::Zero));
    }

    #[test]
    fn probe_errors() {
        let p = parse_program("p(f(X)) :- p(X).\np(f(a)).").unwrap();
        let e = DyadicDistance::Exp(3);
        assert_eq!(
            stability_probe(&p, &Interpretation::empty(), &[], e, 3, 5).unwrap_err(),
            Error::NoPerturbations
        );
        let err = stability_probe(&p, &Interpretation::empty(), &[Interpretation::empty()], e, 3, 5).unwrap_err();
        assert!(matches!(err, Error::NotFixpoint { ref atom, .. } if atom == "p(f(a))"));
    }

    #[test]
    fn perturbation_family_examples() {
        let sig = Signature::new().with_constant("a").with_functor("f", 1).with_predicate("p", 1);
        let fam = perturbation_family(&Interpretation::empty(), &sig, 3..=4).unwrap();
        let got: Vec<String> = fam.iter().map(|i| i.to_string()).collect();
        assert_eq!(got, ["p(f(a))\n", "p(f(f(a)))\n"]);
        #[allow(clippy::reversed_empty_ranges)]
        let empty = perturbation_family(&Interpretation::empty(), &sig, 4..=3).unwrap();
        assert!(empty.is_empty());
        let j = interp("p(a)");
        let fam = perturbation_family(&j, &sig, 2..=2).unwrap();
        assert_eq!(fam, vec![Interpretation::empty()]);
        assert_eq!(distance(&fam[0], &j), DyadicDistance::Exp(2));
    }
}
