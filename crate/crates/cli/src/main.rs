//! `contextuality`: load, validate, analyse and transform empirical models and
//! simulations stored as JSON.
//!
//! Exit codes: 0 success, 1 I/O or parse error, 2 validation failure,
//! 3 verification failed.

mod error;
mod input;

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use contextuality::analysis::{self, Budget, Check, SearchOutcome};
use contextuality::model::{zoo, OutcomeMaps};
use contextuality::{EmpiricalModel, Face, SemifieldHom, SemifieldKind, SemifieldValue, Simulation};
use serde::Serialize;

use error::CliError;

#[derive(Parser)]
#[command(name = "contextuality", version, about = "Contextuality analysis of empirical models")]
struct Cli {
    /// Write the JSON result here instead of stdout.
    #[arg(short, long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Indent the JSON and print a human-readable summary on stderr.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a model, morphism, simulation or scenario file is valid.
    Validate {
        input: String,
        /// Artifact type; detected from the top-level keys when omitted.
        #[arg(long, value_enum)]
        kind: Option<ArtifactKind>,
    },
    /// Contextuality report for a model.
    Analyze {
        model: String,
        /// Comma-separated subset of nc, ncf, sc, lc.
        #[arg(long, value_delimiter = ',', value_parser = parse_check, default_value = "nc,ncf,sc,lc")]
        checks: Vec<Check>,
        /// Include witnesses (global distribution, consistent section, decomposition).
        #[arg(long)]
        witnesses: bool,
    },
    /// Push a model forward along a morphism.
    Push {
        morphism: String,
        model: String,
        /// Fail with exit code 3 unless the pushforward equals this model.
        #[arg(long, value_name = "MODEL")]
        verify: Option<String>,
    },
    /// Search for a simulation `from → to`.
    Simexists {
        from: String,
        to: String,
        /// Time budget in seconds (unlimited when neither this nor the
        /// environment variable is set).
        #[arg(long, env = "CONTEXTUALITY_MAX_SECONDS")]
        max_seconds: Option<f64>,
    },
    /// The simulation removing a Graham-reducible measurement.
    Graham {
        model: String,
        /// Measurement to remove; the first reducible one by default.
        #[arg(long)]
        vertex: Option<String>,
        /// Outcome used off the support; the first outcome by default.
        #[arg(long)]
        fallback: Option<String>,
    },
    /// Tensor product of two models.
    Tensor { left: String, right: String },
    /// Restrict a model to a subset of its measurements.
    Restrict {
        model: String,
        /// Comma-separated measurements to keep.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        to: Vec<String>,
        /// Emit the restriction simulation instead of the restricted model.
        #[arg(long)]
        simulation: bool,
    },
    /// Relabel (and merge) outcomes of a model.
    CoarseGrain {
        model: String,
        /// Outcome maps `{"x": {"0": "0", "1": "0"}}`, inline or as a file.
        /// Measurements without a map keep their outcomes.
        #[arg(long)]
        maps: String,
        /// Emit the coarse-graining simulation instead of the coarse model.
        #[arg(long)]
        simulation: bool,
    },
    /// Convex mixture of models on the same scenario.
    Mix {
        #[arg(required = true)]
        models: Vec<String>,
        /// Comma-separated weights, one per model, summing to one.
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<String>,
    },
    /// Apply a semifield homomorphism to a nonnegative model.
    Collapse {
        model: String,
        #[arg(long, value_enum, default_value = "boolean")]
        to: CollapseTarget,
    },
    /// List the built-in models, or print one.
    Zoo { name: Option<String> },
}

#[derive(Clone, Copy, ValueEnum)]
enum ArtifactKind {
    Model,
    Morphism,
    Simulation,
    Scenario,
}

impl ArtifactKind {
    fn name(self) -> &'static str {
        match self {
            ArtifactKind::Model => "model",
            ArtifactKind::Morphism => "morphism",
            ArtifactKind::Simulation => "simulation",
            ArtifactKind::Scenario => "scenario",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CollapseTarget {
    Boolean,
    SignedRational,
}

fn parse_check(s: &str) -> Result<Check, String> {
    s.parse().map_err(|e: analysis::AnalysisError| e.to_string())
}

/// A serialized result plus a one-line summary for `--pretty`.
struct Output {
    compact: String,
    indented: String,
    summary: String,
}

fn emit<T: Serialize>(value: &T, summary: impl Into<String>) -> Output {
    Output {
        compact: serde_json::to_string(value).expect("serializable"),
        indented: serde_json::to_string_pretty(value).expect("serializable"),
        summary: summary.into(),
    }
}

#[derive(Serialize)]
struct Validated {
    valid: bool,
    kind: &'static str,
}

#[derive(Serialize)]
struct ZooList {
    models: Vec<&'static str>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum SimExists<'a> {
    Decided {
        exists: bool,
        maximal_relations: usize,
        relations_examined: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<&'a Simulation>,
    },
    Budget {
        status: &'static str,
        maximal_relations: usize,
        relations_examined: usize,
    },
}

fn detect(text: &str, source: &str) -> Result<ArtifactKind, CliError> {
    let value: serde_json::Value = input::parse(source, text)?;
    let has = |k: &str| value.get(k).is_some();
    if has("morphism") {
        Ok(ArtifactKind::Simulation)
    } else if has("components") {
        Ok(ArtifactKind::Morphism)
    } else if has("tables") {
        Ok(ArtifactKind::Model)
    } else if has("cover") {
        Ok(ArtifactKind::Scenario)
    } else {
        Err(CliError::Parse {
            input: source.to_string(),
            at: ".".to_string(),
            message: "not a model, morphism, simulation or scenario".to_string(),
        })
    }
}

fn validate(source: &str, kind: Option<ArtifactKind>) -> Result<Output, CliError> {
    let kind = match kind {
        Some(k) => k,
        None if source.starts_with("zoo:") => ArtifactKind::Model,
        None => detect(&input::read(source)?, source)?,
    };
    match kind {
        ArtifactKind::Model => input::model(source).map(drop)?,
        ArtifactKind::Morphism => input::morphism(source).map(drop)?,
        ArtifactKind::Simulation => input::simulation(source).map(drop)?,
        ArtifactKind::Scenario => input::scenario(source).map(drop)?,
    }
    Ok(emit(&Validated { valid: true, kind: kind.name() }, format!("valid {}", kind.name())))
}

fn report_summary(r: &analysis::ContextualityReport) -> String {
    let mut parts = Vec::new();
    if let Some(nc) = r.noncontextual {
        parts.push(format!("non-contextual: {nc}"));
    }
    if let (Some(ncf), Some(cf)) = (&r.ncf, &r.cf) {
        parts.push(format!("NCF {} (CF {})", ncf.0, cf.0));
    }
    if let Some(sc) = r.strongly_contextual {
        parts.push(format!("strongly contextual: {sc}"));
    }
    if let Some(lc) = r.logically_contextual {
        parts.push(format!("logically contextual: {lc}"));
    }
    parts.join("; ")
}

fn model_summary(what: &str, m: &EmpiricalModel) -> String {
    format!(
        "{what}: {} measurements, {} contexts, {}",
        m.scenario().num_measurements(),
        m.scenario().cover().len(),
        m.kind()
    )
}

fn simulation_summary(what: &str, s: &Simulation) -> String {
    format!(
        "{what}: {} measurements -> {} measurements",
        s.source().scenario().num_measurements(),
        s.target().scenario().num_measurements()
    )
}

fn weight(kind: SemifieldKind, text: &str) -> Result<SemifieldValue, CliError> {
    let json = match (kind, text) {
        (SemifieldKind::Boolean, "true") => serde_json::Value::Bool(true),
        (SemifieldKind::Boolean, "false") => serde_json::Value::Bool(false),
        _ => serde_json::Value::String(text.to_string()),
    };
    SemifieldValue::from_json(kind, &json).map_err(|e| CliError::Usage(format!("weight {text:?}: {e}")))
}

fn run(command: Command) -> Result<Output, CliError> {
    match command {
        Command::Validate { input, kind } => validate(&input, kind),
        Command::Analyze { model, checks, witnesses } => {
            let e = input::model(&model)?;
            let checks: BTreeSet<Check> = checks.into_iter().collect();
            let report = analysis::analyze(&e, &checks, witnesses).map_err(CliError::invalid)?;
            let summary = report_summary(&report);
            Ok(emit(&report, summary))
        }
        Command::Push { morphism, model, verify } => {
            let m = input::morphism(&morphism)?;
            let d = input::model(&model)?;
            let pushed = m.pushforward(&d).map_err(CliError::invalid)?;
            if let Some(target) = verify {
                let e = input::model(&target)?;
                m.simulates(&d, &e)
                    .map_err(|err| CliError::Verification(format!("{target}: {err}")))?;
            }
            let summary = model_summary("pushforward", &pushed);
            Ok(emit(&pushed, summary))
        }
        Command::Simexists { from, to, max_seconds } => {
            let d = input::model(&from)?;
            let e = input::model(&to)?;
            let budget = match max_seconds {
                Some(s) if s.is_finite() && s >= 0.0 => Budget::seconds(s),
                Some(s) => return Err(CliError::Usage(format!("invalid time budget {s}"))),
                None => Budget::unlimited(),
            };
            let outcome = analysis::simulation_exists(&d, &e, budget).map_err(CliError::invalid)?;
            let stats = outcome.stats();
            let (body, summary) = match &outcome {
                SearchOutcome::Found { simulation, .. } => (
                    SimExists::Decided {
                        exists: true,
                        maximal_relations: stats.maximal_relations,
                        relations_examined: stats.relations_examined,
                        witness: Some(simulation),
                    },
                    "simulation found",
                ),
                SearchOutcome::NotFound { .. } => (
                    SimExists::Decided {
                        exists: false,
                        maximal_relations: stats.maximal_relations,
                        relations_examined: stats.relations_examined,
                        witness: None,
                    },
                    "no simulation exists",
                ),
                SearchOutcome::BudgetExceeded { .. } => (
                    SimExists::Budget {
                        status: "budget_exceeded",
                        maximal_relations: stats.maximal_relations,
                        relations_examined: stats.relations_examined,
                    },
                    "budget exceeded",
                ),
            };
            let summary = format!(
                "{summary} ({} of {} maximal relations examined)",
                stats.relations_examined, stats.maximal_relations
            );
            Ok(emit(&body, summary))
        }
        Command::Graham { model, vertex, fallback } => {
            let e = input::model(&model)?;
            let x = match vertex {
                Some(x) => x,
                None => e
                    .scenario()
                    .graham_reducible_vertices()
                    .into_iter()
                    .next()
                    .ok_or_else(|| CliError::Invalid("no measurement is Graham-reducible".to_string()))?,
            };
            let sim = Simulation::graham(&e, &x, fallback.as_deref()).map_err(CliError::invalid)?;
            let summary = simulation_summary(&format!("Graham reduction of {x:?}"), &sim);
            Ok(emit(&sim, summary))
        }
        Command::Tensor { left, right } => {
            let a = input::model(&left)?;
            let b = input::model(&right)?;
            let t = a.tensor(&b).map_err(CliError::invalid)?;
            let summary = model_summary("tensor", &t);
            Ok(emit(&t, summary))
        }
        Command::Restrict { model, to, simulation } => {
            let e = input::model(&model)?;
            let subset: Face = to.into_iter().collect();
            if simulation {
                let sim = Simulation::restriction(&e, &subset).map_err(CliError::invalid)?;
                let summary = simulation_summary("restriction", &sim);
                Ok(emit(&sim, summary))
            } else {
                let r = e.restrict(&subset).map_err(CliError::invalid)?;
                let summary = model_summary("restriction", &r);
                Ok(emit(&r, summary))
            }
        }
        Command::CoarseGrain { model, maps, simulation } => {
            let e = input::model(&model)?;
            let maps: OutcomeMaps = input::inline_or_file(&maps)?;
            if simulation {
                let sim = Simulation::coarse_grain(&e, &maps).map_err(CliError::invalid)?;
                let summary = simulation_summary("coarse-graining", &sim);
                Ok(emit(&sim, summary))
            } else {
                let c = e.coarse_grain(&maps).map_err(CliError::invalid)?;
                let summary = model_summary("coarse-graining", &c);
                Ok(emit(&c, summary))
            }
        }
        Command::Mix { models, weights } => {
            if models.len() != weights.len() {
                return Err(CliError::Usage(format!(
                    "{} models but {} weights",
                    models.len(),
                    weights.len()
                )));
            }
            let models = models.iter().map(|m| input::model(m)).collect::<Result<Vec<_>, _>>()?;
            let kind = models[0].kind();
            let terms = weights
                .iter()
                .zip(models)
                .map(|(w, m)| Ok((weight(kind, w)?, m)))
                .collect::<Result<Vec<_>, CliError>>()?;
            let mixed = EmpiricalModel::mix(&terms).map_err(CliError::invalid)?;
            let summary = model_summary("mixture", &mixed);
            Ok(emit(&mixed, summary))
        }
        Command::Collapse { model, to } => {
            let e = input::model(&model)?;
            let hom = match to {
                CollapseTarget::Boolean => SemifieldHom::Collapse,
                CollapseTarget::SignedRational => SemifieldHom::Inclusion,
            };
            let c = e.collapse(hom).map_err(CliError::invalid)?;
            let summary = model_summary("collapse", &c);
            Ok(emit(&c, summary))
        }
        Command::Zoo { name: None } => Ok(emit(&ZooList { models: zoo::NAMES.to_vec() }, zoo::NAMES.join(", "))),
        Command::Zoo { name: Some(name) } => {
            let e = input::model(&format!("zoo:{name}"))?;
            let summary = model_summary(&name, &e);
            Ok(emit(&e, summary))
        }
    }
}

fn write_output(out: &Output, path: Option<&PathBuf>, pretty: bool) -> Result<(), CliError> {
    let text = if pretty { &out.indented } else { &out.compact };
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| CliError::Io {
            path: p.clone(),
            source: e,
        })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| CliError::Io {
                path: "<stdout>".into(),
                source: e,
            })?;
        }
    }
    if pretty {
        eprintln!("{}", out.summary);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = run(cli.command).and_then(|out| write_output(&out, cli.output.as_ref(), cli.pretty));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
