//! Command-line front end. [`run`] is the whole program minus process
//! plumbing, so tests can drive it with in-memory writers.

use std::fmt;
use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::decider::{decide_membership, Membership};
use crate::engine::bounded_least_model;
use crate::error::Error;
use crate::guard::check_program;
use crate::limits::{clause_limits, model_limit_comparison, SequenceSchema};
use crate::metric::{distance, perturbation_family, stability_probe, DyadicDistance};
use crate::parser::{parse_ground_atom, parse_interpretation, parse_program};
use crate::report::{self, Style};
use crate::syntax::{Interpretation, Program, Signature};

/// Bounded least models, sequence limits and stability for definite Horn programs.
#[derive(Debug, Parser)]
#[command(name = "horn-limits", version)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify a program: term containment and range restriction per clause.
    Check {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Least model restricted to atoms of level <= depth.
    Model {
        file: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        depth: u32,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Decide membership of a ground atom in the least model.
    Decide {
        file: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long)]
        proof: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print a minimal-height proof tree for a ground atom.
    Prooftree {
        file: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long)]
        json: bool,
    },
    /// Clause limits of a program sequence and the limit of its least models.
    Limit {
        seqfile: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        depth: u32,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        horizon: u64,
        #[arg(long)]
        json: bool,
    },
    /// Level-metric distance between two interpretation files.
    Distance { file_i: PathBuf, file_j: PathBuf },
    /// Probe a fixed point with single-atom perturbations.
    Stability {
        file: PathBuf,
        /// Interpretation file, or `auto` for the bounded least model.
        #[arg(long)]
        fixpoint: String,
        #[arg(long, value_parser = parse_distance)]
        eps: DyadicDistance,
        /// Inclusive level range `a..b`.
        #[arg(long, value_parser = parse_levels)]
        levels: RangeInclusive<u32>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        steps: u64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        depth: u32,
        /// Probe only this many perturbations, drawn with `--seed`.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

fn parse_distance(s: &str) -> Result<DyadicDistance, String> {
    match s.parse()? {
        d @ DyadicDistance::Exp(_) => Ok(d),
        _ => Err("epsilon must be a positive power of two, written 2^-k".into()),
    }
}

fn parse_levels(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected a..b, got `{s}`"))?;
    let a: u32 = a.trim().parse().map_err(|_| format!("bad level `{a}`"))?;
    let b: u32 = b.trim().parse().map_err(|_| format!("bad level `{b}`"))?;
    if a == 0 {
        return Err("levels start at 1".into());
    }
    Ok(a..=b)
}

/// An error tied to the input it came from.
#[derive(Debug)]
pub struct CliError {
    pub source: Option<String>,
    pub error: Error,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.source, self.error.position()) {
            (Some(src), Some(at)) => write!(f, "{src}:{}:{}: {}", at.line, at.column, self.error),
            (Some(src), None) => write!(f, "{src}: {}", self.error),
            (None, _) => write!(f, "{}", self.error),
        }
    }
}

fn at(source: impl Into<String>) -> impl FnOnce(Error) -> CliError {
    let source = source.into();
    move |error| CliError { source: Some(source), error }
}

fn bare(error: Error) -> CliError {
    CliError { source: None, error }
}

enum Failure {
    Io(String),
    Input(CliError),
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        Failure::Input(e)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    let text = read(path)?;
    Ok(parse_program(&text).map_err(at(path.display().to_string()))?)
}

fn load_interpretation(path: &Path) -> Result<Interpretation, Failure> {
    let text = read(path)?;
    Ok(parse_interpretation(&text).map_err(at(path.display().to_string()))?)
}

/// Color is on only for terminals, and `HORN_LIMITS_COLOR=0` turns it off.
pub fn style_from_env(is_terminal: bool) -> Style {
    let disabled = std::env::var("HORN_LIMITS_COLOR").map(|v| v == "0").unwrap_or(false);
    Style { color: is_terminal && !disabled }
}

/// Executes one command, writing the report to `out` and diagnostics to
/// `err`. Returns the process exit code: 0 success, 1 negative verdict
/// (`check` failure, `decide`/`prooftree` Out), 2 input or usage errors.
pub fn run(config: &RunConfig, style: Style, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(config, style, out) {
        Ok(code) => code,
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Input(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| Failure::Io(format!("writing output: {e}")))
}

fn emit_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    emit(out, &report::to_json(value))?;
    emit(out, "\n")
}

fn dispatch(config: &RunConfig, style: Style, out: &mut dyn Write) -> Result<i32, Failure> {
    match &config.command {
        Command::Check { file, json } => {
            let program = load_program(file)?;
            let r = check_program(&program);
            if *json {
                emit_json(out, &report::GuardJson::from(&r))?;
            } else {
                emit(out, &report::guard_text(&r, style))?;
            }
            Ok(if r.certified() { 0 } else { 1 })
        }
        Command::Model { file, depth, trace, json } => {
            let program = load_program(file)?;
            let r = bounded_least_model(&program, *depth).map_err(at(file.display().to_string()))?;
            if *json {
                emit_json(out, &report::ModelJson::from(&r))?;
            } else {
                emit(out, &report::model_text(&r, *trace))?;
            }
            Ok(0)
        }
        Command::Decide { file, query, proof, json } => decide(file, query, *proof, *json, out),
        Command::Prooftree { file, query, json } => decide(file, query, true, *json, out),
        Command::Limit { seqfile, depth, horizon, json } => {
            let text = read(seqfile)?;
            let source = seqfile.display().to_string();
            let schema = SequenceSchema::from_json(&text).map_err(at(source.clone()))?;
            let limits = clause_limits(&schema);
            let models = if limits.limit_exists {
                Some(model_limit_comparison(&schema, *depth, *horizon).map_err(at(source))?)
            } else {
                None
            };
            if *json {
                emit_json(
                    out,
                    &report::LimitReportJson {
                        limit: report::LimitJson::from(&limits),
                        models: models.as_ref().map(report::ModelLimitJson::from),
                    },
                )?;
            } else {
                emit(out, &report::limit_text(&limits, models.as_ref()))?;
            }
            Ok(0)
        }
        Command::Distance { file_i, file_j } => {
            let i = load_interpretation(file_i)?;
            let j = load_interpretation(file_j)?;
            emit(out, &format!("{}\n", distance(&i, &j)))?;
            Ok(0)
        }
        Command::Stability { file, fixpoint, eps, levels, steps, depth, sample: k, seed, json } => {
            let program = load_program(file)?;
            let source = file.display().to_string();
            let j = if fixpoint == "auto" {
                bounded_least_model(&program, *depth).map_err(at(source.clone()))?.model
            } else {
                load_interpretation(Path::new(fixpoint))?
            };
            let sig = program
                .signature()
                .merge(&Signature::of_atoms(j.iter()).map_err(bare)?)
                .map_err(bare)?;
            let mut family = perturbation_family(&j, &sig, levels.clone()).map_err(bare)?;
            if let Some(k) = *k {
                if k < family.len() {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    let mut picked = sample(&mut rng, family.len(), k).into_vec();
                    picked.sort_unstable();
                    family = picked.into_iter().map(|i| family[i].clone()).collect();
                }
            }
            let r = stability_probe(&program, &j, &family, *eps, *steps as usize, *depth).map_err(at(source))?;
            if *json {
                emit_json(out, &report::StabilityJson::from(&r))?;
            } else {
                emit(out, &report::stability_text(&r))?;
            }
            Ok(0)
        }
    }
}

fn decide(file: &Path, query: &str, proof: bool, json: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let program = load_program(file)?;
    let q = parse_ground_atom(query).map_err(at("--query"))?;
    let v = decide_membership(&program, &q).map_err(at(file.display().to_string()))?;
    if json {
        emit_json(out, &report::VerdictJson::new(q.as_str(), &v))?;
    } else {
        emit(out, &report::verdict_text(&v, proof))?;
    }
    Ok(match v.status {
        Membership::In => 0,
        Membership::Out => 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_ranges() {
        assert_eq!(parse_levels("3..8").unwrap(), 3..=8);
        assert_eq!(parse_levels("2..=2").unwrap(), 2..=2);
        assert!(parse_levels("0..3").is_err());
        assert!(parse_levels("3").is_err());
    }

    #[test]
    fn epsilon_must_be_positive() {
        assert_eq!(parse_distance("2^-3").unwrap(), DyadicDistance::Exp(3));
        assert!(parse_distance("0").is_err());
    }

    #[test]
    fn diagnostics_name_source_and_position() {
        let e = CliError {
            source: Some("prog.pl".into()),
            error: crate::parser::parse_program("p(a).\nq(").unwrap_err(),
        };
        assert!(e.to_string().starts_with("prog.pl:2:3: "), "{e}");
    }
}
