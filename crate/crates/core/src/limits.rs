//! Limits of program sequences and of their least models.
//!
//! A [`SequenceSchema`] is a finite description of an infinite sequence
//! `Π₁, Π₂, …`: clauses present from some index on, at finitely many
//! explicit indices, periodically, or generated by a template whose exponents
//! mention the index `n`. For such sequences the set-theoretic lower limit
//! (clauses in almost every `Πₙ`) and upper limit (clauses in infinitely many
//! `Πₙ`) are computable exactly. Limits of least models are only observable
//! through a finite window of indices and a depth bound.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Deserialize;

use crate::engine::bounded_least_model;
use crate::error::{Error, Result};
use crate::guard;
use crate::parser::{parse_clause, parse_template};
use crate::syntax::{GroundAtom, HornClause, Interpretation, Program, Signature};

/// Upper bound on the lcm of periodic moduli in one schema.
pub const MAX_PERIOD: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableEntry {
    pub clause: HornClause,
    pub from: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SporadicEntry {
    pub clause: HornClause,
    pub indices: BTreeSet<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicEntry {
    pub clause: HornClause,
    pub modulus: u64,
    pub residue: u64,
    pub from: u64,
}

impl PeriodicEntry {
    pub fn active_at(&self, n: u64) -> bool {
        n >= self.from && n % self.modulus == self.residue
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedTemplate {
    pub template: String,
    /// The template mentions the index; otherwise it denotes one clause
    /// present at every index.
    pub varies: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SequenceSchema {
    pub stable: Vec<StableEntry>,
    pub sporadic: Vec<SporadicEntry>,
    pub periodic: Vec<PeriodicEntry>,
    pub indexed: Vec<IndexedTemplate>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchema {
    #[serde(default)]
    stable: Vec<RawStable>,
    #[serde(default)]
    sporadic: Vec<RawSporadic>,
    #[serde(default)]
    periodic: Vec<RawPeriodic>,
    #[serde(default)]
    indexed: Vec<RawIndexed>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStable {
    clause: String,
    #[serde(default = "one")]
    from: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSporadic {
    clause: String,
    indices: Vec<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPeriodic {
    clause: String,
    modulus: u64,
    residue: u64,
    #[serde(default = "one")]
    from: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIndexed {
    template: String,
}

fn one() -> u64 {
    1
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl SequenceSchema {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses the JSON schema format and validates every entry.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSchema = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let clause = |s: &str| parse_clause(s).map_err(|e| Error::Schema(format!("clause `{s}`: {e}")));
        let mut schema = SequenceSchema::new();
        for e in raw.stable {
            schema = schema.with_stable(clause(&e.clause)?, e.from);
        }
        for e in raw.sporadic {
            schema = schema.with_sporadic(clause(&e.clause)?, e.indices);
        }
        for e in raw.periodic {
            schema = schema.with_periodic(clause(&e.clause)?, e.modulus, e.residue, e.from);
        }
        for e in raw.indexed {
            schema = schema.with_template(&e.template)?;
        }
        schema.validate()?;
        Ok(schema)
    }

    pub fn with_stable(mut self, clause: HornClause, from: u64) -> Self {
        self.stable.push(StableEntry { clause, from });
        self
    }

    pub fn with_sporadic(mut self, clause: HornClause, indices: impl IntoIterator<Item = u64>) -> Self {
        self.sporadic.push(SporadicEntry { clause, indices: indices.into_iter().collect() });
        self
    }

    pub fn with_periodic(mut self, clause: HornClause, modulus: u64, residue: u64, from: u64) -> Self {
        self.periodic.push(PeriodicEntry { clause, modulus, residue, from });
        self
    }

    pub fn with_template(mut self, template: &str) -> Result<Self> {
        let (_, varies) = parse_template(template, 1)
            .map_err(|e| Error::Schema(format!("template `{template}`: {e}")))?;
        self.indexed.push(IndexedTemplate { template: template.to_string(), varies });
        Ok(self)
    }

    /// Checks index ranges, moduli, and arity consistency across all entries.
    pub fn validate(&self) -> Result<()> {
        let mut sig = Signature::new();
        let mut period = 1u64;
        for e in &self.stable {
            if e.from == 0 {
                return Err(Error::Schema(format!("`{}`: from must be at least 1", e.clause)));
            }
            sig.add_clause(&e.clause, None)?;
        }
        for e in &self.sporadic {
            if e.indices.contains(&0) {
                return Err(Error::Schema(format!("`{}`: indices start at 1", e.clause)));
            }
            sig.add_clause(&e.clause, None)?;
        }
        for e in &self.periodic {
            if e.modulus < 2 || e.residue >= e.modulus || e.from == 0 {
                return Err(Error::Schema(format!(
                    "`{}`: need modulus >= 2, residue < modulus and from >= 1",
                    e.clause
                )));
            }
            period = period / gcd(period, e.modulus) * e.modulus;
            if period > MAX_PERIOD {
                return Err(Error::Schema(format!("combined period exceeds {MAX_PERIOD}")));
            }
            sig.add_clause(&e.clause, None)?;
        }
        for t in &self.indexed {
            let (c, _) = parse_template(&t.template, 1)?;
            sig.add_clause(&c, None)?;
        }
        Ok(())
    }

    /// The program `Πₙ`.
    pub fn expand_at(&self, n: u64) -> Result<Program> {
        if n == 0 {
            return Err(Error::InvalidIndex(n));
        }
        let mut clauses = Vec::new();
        clauses.extend(self.stable.iter().filter(|e| e.from <= n).map(|e| e.clause.clone()));
        clauses.extend(self.sporadic.iter().filter(|e| e.indices.contains(&n)).map(|e| e.clause.clone()));
        clauses.extend(self.periodic.iter().filter(|e| e.active_at(n)).map(|e| e.clause.clone()));
        for t in &self.indexed {
            let (c, _) = parse_template(&t.template, n)
                .map_err(|e| Error::Schema(format!("template `{}` at n = {n}: {e}", t.template)))?;
            clauses.push(c);
        }
        Program::new(clauses)
    }
}

/// `Πₙ` for the given schema; see [`SequenceSchema::expand_at`].
pub fn expand_schema_at(schema: &SequenceSchema, n: u64) -> Result<Program> {
    schema.expand_at(n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitVerdict {
    pub limit_exists: bool,
    /// Equal to the lower limit; present iff the limit exists.
    pub limit_program: Option<Program>,
    /// A clause in the upper but not the lower limit; present iff the limit
    /// does not exist.
    pub obstruction: Option<HornClause>,
    pub lower: Program,
    pub upper: Program,
}

enum Presence<'a> {
    Cofinite,
    Periodic(&'a PeriodicEntry),
}

/// Set-theoretic lower and upper limits of the clause sequence.
///
/// A clause is in the upper limit iff some stable, periodic, or constant
/// template entry produces it; sporadic entries and index-dependent templates
/// produce each clause at finitely many indices. It is in the lower limit iff
/// it has a stable entry or its periodic entries jointly cover every residue
/// class of the combined period.
pub fn clause_limits(schema: &SequenceSchema) -> LimitVerdict {
    let constant_templates: Vec<HornClause> = schema
        .indexed
        .iter()
        .filter(|t| !t.varies)
        .map(|t| parse_template(&t.template, 1).expect("validated template").0)
        .collect();
    let entries = schema
        .stable
        .iter()
        .map(|e| (&e.clause, Presence::Cofinite))
        .chain(schema.periodic.iter().map(|e| (&e.clause, Presence::Periodic(e))))
        .chain(constant_templates.iter().map(|c| (c, Presence::Cofinite)));
    let mut order: Vec<HornClause> = Vec::new();
    let mut spelled: BTreeMap<HornClause, HornClause> = BTreeMap::new();
    let mut presence: BTreeMap<HornClause, Vec<Presence>> = BTreeMap::new();
    for (clause, p) in entries {
        let key = clause.normalized();
        if !spelled.contains_key(&key) {
            spelled.insert(key.clone(), clause.clone());
            order.push(key.clone());
        }
        presence.entry(key).or_default().push(p);
    }

    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for key in &order {
        let ps = &presence[key];
        let clause = spelled[key].clone();
        upper.push(clause.clone());
        let cofinite = ps.iter().any(|p| matches!(p, Presence::Cofinite)) || {
            let periodic: Vec<&PeriodicEntry> = ps
                .iter()
                .filter_map(|p| match p {
                    Presence::Periodic(e) => Some(*e),
                    Presence::Cofinite => None,
                })
                .collect();
            let period = periodic.iter().fold(1u64, |acc, e| acc / gcd(acc, e.modulus) * e.modulus);
            (0..period).all(|x| periodic.iter().any(|e| x % e.modulus == e.residue))
        };
        if cofinite {
            lower.push(clause);
        }
    }
    let obstruction = upper.iter().find(|c| !lower.contains(c)).cloned();
    let lower = Program::new(lower).expect("schema arities were validated");
    let upper = Program::new(upper).expect("schema arities were validated");
    debug_assert!(lower.clause_set().is_subset(&upper.clause_set()));
    LimitVerdict {
        limit_exists: obstruction.is_none(),
        limit_program: obstruction.is_none().then(|| lower.clone()),
        obstruction,
        lower,
        upper,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Present,
    Absent,
    /// Membership changes inside the stabilization window.
    Unsettled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomRow {
    pub atom: GroundAtom,
    /// Membership in `Mₙ` for `n = 1..=horizon`.
    pub present: Vec<bool>,
    pub tail: Tail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelVerdict {
    Equal,
    NotEqual { witness: GroundAtom },
    /// Some atom has not settled inside the window.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certainty {
    /// Every sampled program in the window and the limit program pass both
    /// guard checks, so equality of the model limits is guaranteed.
    TheoremBacked,
    /// Sampled-window evidence only.
    Heuristic,
}

impl fmt::Display for Certainty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Certainty::TheoremBacked => "theorem-backed",
            Certainty::Heuristic => "heuristic",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelLimitReport {
    pub depth: u32,
    pub horizon: u64,
    /// Number of final sampled indices an atom's membership must be constant
    /// over to count as settled.
    pub window: u64,
    pub limits: LimitVerdict,
    pub rows: Vec<AtomRow>,
    pub liminf_models: Interpretation,
    pub limsup_models: Interpretation,
    pub model_of_limit: Interpretation,
    pub verdict: ModelVerdict,
    pub certainty: Certainty,
}

/// Least model of `program` restricted to level ≤ `depth`.
///
/// Certified programs are evaluated at `depth` directly. Other programs may
/// derive low atoms through higher ones, so they are evaluated up to the
/// highest fact level first and then truncated.
fn truncated_model(program: &Program, depth: u32) -> Result<(Interpretation, bool)> {
    let certified = guard::check_program(program).certified();
    let working = if certified { depth } else { depth.max(program.max_fact_level().unwrap_or(0)) };
    let report = bounded_least_model(program, working)?;
    Ok((report.model.truncate(depth), certified))
}

/// Stabilization window: the last `max(5, horizon / 4)` indices, capped at
/// the horizon.
pub fn window_len(horizon: u64) -> u64 {
    (horizon / 4).max(5).min(horizon)
}

/// Compares the limit of the least models `Mₙ` (observed at level ≤ `depth`
/// over `n = 1..=horizon`) with the least model of the limit program.
pub fn model_limit_comparison(schema: &SequenceSchema, depth: u32, horizon: u64) -> Result<ModelLimitReport> {
    if depth == 0 {
        return Err(Error::InvalidDepth(depth));
    }
    if horizon == 0 {
        return Err(Error::InvalidIndex(horizon));
    }
    let limits = clause_limits(schema);
    let limit_program = match (&limits.limit_program, &limits.obstruction) {
        (Some(p), _) => p.clone(),
        (None, obstruction) => {
            return Err(Error::LimitDoesNotExist {
                obstruction: obstruction.as_ref().map(|c| c.to_string()).unwrap_or_default(),
            })
        }
    };

    let window = window_len(horizon);
    let window_start = horizon - window + 1;
    let mut models = Vec::with_capacity(horizon as usize);
    let mut window_certified = true;
    for n in 1..=horizon {
        let program = schema.expand_at(n)?;
        let (model, certified) = truncated_model(&program, depth)?;
        if n >= window_start {
            window_certified &= certified;
        }
        models.push(model);
    }

    let seen: BTreeSet<GroundAtom> = models.iter().flat_map(|m| m.iter().cloned()).collect();
    let rows: Vec<AtomRow> = seen
        .into_iter()
        .map(|atom| {
            let present: Vec<bool> = models.iter().map(|m| m.contains(&atom)).collect();
            let tail_slice = &present[(window_start - 1) as usize..];
            let tail = if tail_slice.iter().all(|&b| b) {
                Tail::Present
            } else if tail_slice.iter().all(|&b| !b) {
                Tail::Absent
            } else {
                Tail::Unsettled
            };
            AtomRow { atom, present, tail }
        })
        .collect();

    let in_window = |r: &AtomRow| r.present[(window_start - 1) as usize..].iter().any(|&b| b);
    let liminf: BTreeSet<GroundAtom> =
        rows.iter().filter(|r| r.tail == Tail::Present).map(|r| r.atom.clone()).collect();
    let limsup: BTreeSet<GroundAtom> = rows
        .iter()
        .filter(|r| r.tail == Tail::Present || (r.tail == Tail::Unsettled && in_window(r)))
        .map(|r| r.atom.clone())
        .collect();
    debug_assert!(liminf.is_subset(&limsup));

    let (model_of_limit, limit_certified) = truncated_model(&limit_program, depth)?;
    let verdict = if rows.iter().any(|r| r.tail == Tail::Unsettled) {
        ModelVerdict::Inconclusive
    } else {
        match liminf.symmetric_difference(model_of_limit.atoms()).min() {
            None => ModelVerdict::Equal,
            Some(w) => ModelVerdict::NotEqual { witness: w.clone() },
        }
    };
    let certainty =
        if window_certified && limit_certified { Certainty::TheoremBacked } else { Certainty::Heuristic };

    Ok(ModelLimitReport {
        depth,
        horizon,
        window,
        limits,
        rows,
        liminf_models: Interpretation::from_parts(liminf, Some(depth)),
        limsup_models: Interpretation::from_parts(limsup, Some(depth)),
        model_of_limit,
        verdict,
        certainty,
    })
}
