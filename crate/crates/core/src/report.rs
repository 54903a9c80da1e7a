//! Stable JSON documents and text renderings for every report type.
//!
//! The JSON field sets here are the machine contract of the CLI and the C
//! ABI; fields are never added conditionally.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use crate::decider::{ProofTree, Verdict};
use crate::engine::FixpointReport;
use crate::guard::{ContainmentVerdict, FinitaryVerdict, GuardReport};
use crate::limits::{Certainty, LimitVerdict, ModelLimitReport, ModelVerdict, Tail};
use crate::metric::{Classification, StabilityReport};
use crate::syntax::{Interpretation, Program};

fn atoms(i: &Interpretation) -> Vec<String> {
    i.iter().map(|a| a.to_string()).collect()
}

fn clauses(p: &Program) -> Vec<String> {
    p.clauses().iter().map(|c| c.to_string()).collect()
}

#[derive(Serialize)]
pub struct ModelJson {
    pub model: Vec<String>,
    pub iterations: usize,
    pub delta_sizes: Vec<usize>,
    pub exact: bool,
    pub dropped_above_depth: usize,
}

impl From<&FixpointReport> for ModelJson {
    fn from(r: &FixpointReport) -> Self {
        ModelJson {
            model: atoms(&r.model),
            iterations: r.iterations,
            delta_sizes: r.delta_sizes.clone(),
            exact: r.exact,
            dropped_above_depth: r.dropped_above_depth,
        }
    }
}

#[derive(Serialize)]
pub struct ClauseJson<'a> {
    pub clause: String,
    pub term_containment: &'a ContainmentVerdict,
    pub finitary: &'a FinitaryVerdict,
}

#[derive(Serialize)]
pub struct GuardJson<'a> {
    pub clauses: Vec<ClauseJson<'a>>,
    pub term_containment_all: bool,
    pub finitary_all: bool,
}

impl<'a> From<&'a GuardReport> for GuardJson<'a> {
    fn from(r: &'a GuardReport) -> Self {
        GuardJson {
            clauses: r
                .clauses
                .iter()
                .map(|v| ClauseJson {
                    clause: v.clause.to_string(),
                    term_containment: &v.containment,
                    finitary: &v.finitary,
                })
                .collect(),
            term_containment_all: r.containment_all,
            finitary_all: r.finitary_all,
        }
    }
}

#[derive(Serialize)]
pub struct ProofJson {
    pub atom: String,
    pub clause: String,
    pub substitution: BTreeMap<String, String>,
    pub children: Vec<ProofJson>,
}

impl From<&ProofTree> for ProofJson {
    fn from(t: &ProofTree) -> Self {
        ProofJson {
            atom: t.root.to_string(),
            clause: t.clause.to_string(),
            substitution: t.substitution.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            children: t.children.iter().map(ProofJson::from).collect(),
        }
    }
}

#[derive(Serialize)]
pub struct VerdictJson {
    pub query: String,
    pub status: String,
    pub universe_size: u64,
    pub proof: Option<ProofJson>,
}

impl VerdictJson {
    pub fn new(query: &str, v: &Verdict) -> Self {
        VerdictJson {
            query: query.to_string(),
            status: v.status.to_string(),
            universe_size: v.universe_size,
            proof: v.proof.as_ref().map(ProofJson::from),
        }
    }
}

#[derive(Serialize)]
pub struct LimitJson {
    pub exists: bool,
    pub program: Option<Vec<String>>,
    pub obstruction: Option<String>,
    pub lower: Vec<String>,
    pub upper: Vec<String>,
}

impl From<&LimitVerdict> for LimitJson {
    fn from(v: &LimitVerdict) -> Self {
        LimitJson {
            exists: v.limit_exists,
            program: v.limit_program.as_ref().map(clauses),
            obstruction: v.obstruction.as_ref().map(|c| c.to_string()),
            lower: clauses(&v.lower),
            upper: clauses(&v.upper),
        }
    }
}

fn tail_name(t: Tail) -> &'static str {
    match t {
        Tail::Present => "present",
        Tail::Absent => "absent",
        Tail::Unsettled => "unsettled",
    }
}

fn verdict_name(v: &ModelVerdict) -> &'static str {
    match v {
        ModelVerdict::Equal => "Equal",
        ModelVerdict::NotEqual { .. } => "NotEqual",
        ModelVerdict::Inconclusive => "Inconclusive",
    }
}

#[derive(Serialize)]
pub struct RowJson {
    pub atom: String,
    pub present: Vec<bool>,
    pub tail: &'static str,
}

#[derive(Serialize)]
pub struct ModelLimitJson {
    pub depth: u32,
    pub horizon: u64,
    pub window: u64,
    pub rows: Vec<RowJson>,
    pub liminf_models: Vec<String>,
    pub limsup_models: Vec<String>,
    pub model_of_limit: Vec<String>,
    pub verdict: &'static str,
    pub witness: Option<String>,
    pub certainty: String,
}

impl From<&ModelLimitReport> for ModelLimitJson {
    fn from(r: &ModelLimitReport) -> Self {
        ModelLimitJson {
            depth: r.depth,
            horizon: r.horizon,
            window: r.window,
            rows: r
                .rows
                .iter()
                .map(|row| RowJson { atom: row.atom.to_string(), present: row.present.clone(), tail: tail_name(row.tail) })
                .collect(),
            liminf_models: atoms(&r.liminf_models),
            limsup_models: atoms(&r.limsup_models),
            model_of_limit: atoms(&r.model_of_limit),
            verdict: verdict_name(&r.verdict),
            witness: match &r.verdict {
                ModelVerdict::NotEqual { witness } => Some(witness.to_string()),
                _ => None,
            },
            certainty: r.certainty.to_string(),
        }
    }
}

#[derive(Serialize)]
pub struct LimitReportJson {
    pub limit: LimitJson,
    pub models: Option<ModelLimitJson>,
}

#[derive(Serialize)]
pub struct TrialJson {
    pub perturbation: Vec<String>,
    pub initial_distance: String,
    pub trajectory: Vec<String>,
    pub max_distance: String,
    pub first_escape: Option<usize>,
}

#[derive(Serialize)]
pub struct StabilityJson {
    pub fixpoint: Vec<String>,
    pub epsilon: String,
    pub steps: usize,
    pub depth: u32,
    pub trials: Vec<TrialJson>,
    pub classification: &'static str,
    pub witness_trial: Option<usize>,
}

impl From<&StabilityReport> for StabilityJson {
    fn from(r: &StabilityReport) -> Self {
        StabilityJson {
            fixpoint: atoms(&r.fixpoint),
            epsilon: r.epsilon.to_string(),
            steps: r.steps,
            depth: r.depth,
            trials: r
                .trials
                .iter()
                .map(|t| TrialJson {
                    perturbation: atoms(&t.perturbation),
                    initial_distance: t.initial_distance.to_string(),
                    trajectory: t.trajectory.iter().map(|d| d.to_string()).collect(),
                    max_distance: t.max_distance.to_string(),
                    first_escape: t.first_escape,
                })
                .collect(),
            classification: match r.classification {
                Classification::NoEscapeObserved => "no-escape-observed",
                Classification::InstabilityWitness { .. } => "instability-witness",
            },
            witness_trial: match r.classification {
                Classification::InstabilityWitness { trial } => Some(trial),
                Classification::NoEscapeObserved => None,
            },
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize infallibly")
}

/// ANSI styling for pass/fail words.
#[derive(Debug, Clone, Copy, Default)]
pub struct Style {
    pub color: bool,
}

impl Style {
    fn paint(&self, ok: bool, word: &str) -> String {
        if self.color {
            format!("\x1b[{}m{word}\x1b[0m", if ok { 32 } else { 31 })
        } else {
            word.to_string()
        }
    }

    fn pass_fail(&self, ok: bool) -> String {
        self.paint(ok, if ok { "pass" } else { "FAIL" })
    }
}

pub fn model_text(r: &FixpointReport, trace: bool) -> String {
    let mut s = String::new();
    if trace {
        for (i, d) in r.delta_sizes.iter().enumerate() {
            let _ = writeln!(s, "% stage {}: +{d}", i + 1);
        }
        let _ = writeln!(
            s,
            "% iterations: {}, exact: {}, dropped above depth: {}",
            r.iterations, r.exact, r.dropped_above_depth
        );
    }
    s.push_str(&r.model.to_string());
    s
}

pub fn guard_text(r: &GuardReport, style: Style) -> String {
    // cells are (verdict, detail); padding is computed on the unstyled text
    type Cell = (bool, String);
    let cell = |ok: bool, detail: String| (ok, detail);
    let rows: Vec<(String, Cell, Cell)> = r
        .clauses
        .iter()
        .map(|v| {
            let mut detail = String::new();
            if let Some(t) = &v.containment.offending {
                let _ = write!(detail, " ({t})");
            }
            if let Some(top) = v.containment.top_level_passes {
                let _ = write!(detail, " [top-level: {}]", if top { "pass" } else { "fail" });
            }
            let fin = v.finitary.unbound_variable.as_ref().map(|x| format!(" ({x})")).unwrap_or_default();
            (v.clause.to_string(), cell(v.containment.passes, detail), cell(v.finitary.passes, fin))
        })
        .collect();
    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max("clause".len());
    let mid = rows.iter().map(|r| 4 + r.1 .1.len()).max().unwrap_or(0).max("term containment".len());
    let mut s = String::new();
    let _ = writeln!(s, "{:width$}  {:mid$}  finitary", "clause", "term containment");
    for (clause, (c_ok, c_detail), (f_ok, f_detail)) in rows {
        let pad = mid - 4 - c_detail.len();
        let _ = writeln!(
            s,
            "{clause:width$}  {}{c_detail}{:pad$}  {}{f_detail}",
            style.pass_fail(c_ok),
            "",
            style.pass_fail(f_ok)
        );
    }
    let _ = writeln!(
        s,
        "term containment: {}, finitary: {}",
        style.pass_fail(r.containment_all),
        style.pass_fail(r.finitary_all)
    );
    s
}

pub fn verdict_text(v: &Verdict, proof: bool) -> String {
    let mut s = format!("{}\n", v.status);
    if proof {
        if let Some(t) = &v.proof {
            s.push_str(&t.to_string());
        }
    }
    s
}

fn atom_list(i: &Interpretation) -> String {
    if i.is_empty() {
        "{}".to_string()
    } else {
        format!("{{{}}}", atoms(i).join(", "))
    }
}

pub fn limit_text(v: &LimitVerdict, models: Option<&ModelLimitReport>) -> String {
    let mut s = String::new();
    if v.limit_exists {
        let _ = writeln!(s, "clause limit: exists");
        for c in clauses(v.limit_program.as_ref().expect("limit exists")) {
            let _ = writeln!(s, "  {c}");
        }
    } else {
        let _ = writeln!(s, "clause limit: does not exist");
        if let Some(c) = &v.obstruction {
            let _ = writeln!(s, "  obstruction: {c}");
        }
    }
    if let Some(r) = models {
        let _ = writeln!(
            s,
            "least models: depth {}, horizon {}, window n = {}..{}",
            r.depth,
            r.horizon,
            r.horizon - r.window + 1,
            r.horizon
        );
        let _ = writeln!(s, "  lim inf M_n:      {}", atom_list(&r.liminf_models));
        let _ = writeln!(s, "  lim sup M_n:      {}", atom_list(&r.limsup_models));
        let _ = writeln!(s, "  model of limit:   {}", atom_list(&r.model_of_limit));
        let unsettled: Vec<String> =
            r.rows.iter().filter(|row| row.tail == Tail::Unsettled).map(|row| row.atom.to_string()).collect();
        if !unsettled.is_empty() {
            let _ = writeln!(s, "  unsettled:        {}", unsettled.join(", "));
        }
        match &r.verdict {
            ModelVerdict::NotEqual { witness } => {
                let _ = writeln!(s, "verdict: NotEqual (witness {witness})");
            }
            other => {
                let _ = writeln!(s, "verdict: {}", verdict_name(other));
            }
        }
        let _ = writeln!(s, "certainty: {}", r.certainty);
        if r.certainty == Certainty::Heuristic {
            let _ = writeln!(s, "note: sampled-window evidence only");
        }
    }
    s
}

pub fn stability_text(r: &StabilityReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "fixed point: {}", atom_list(&r.fixpoint));
    let _ = writeln!(s, "epsilon {}, steps {}, depth {}", r.epsilon, r.steps, r.depth);
    for (i, t) in r.trials.iter().enumerate() {
        let traj: Vec<String> = t.trajectory.iter().map(|d| d.to_string()).collect();
        let _ = write!(
            s,
            "trial {i}: start {} d0={} max={} [{}]",
            atom_list(&t.perturbation),
            t.initial_distance,
            t.max_distance,
            traj.join(" ")
        );
        if let Some(step) = t.first_escape {
            let _ = write!(s, " escapes at step {step}");
        }
        s.push('\n');
    }
    match r.classification {
        Classification::NoEscapeObserved => {
            let _ = writeln!(s, "no-escape-observed (bounded horizon; not a proof of stability)");
        }
        Classification::InstabilityWitness { trial } => {
            let _ = writeln!(s, "instability-witness: trial {trial}");
        }
    }
    s
}
