//! Subcommands of the `entanglers` binary.
//!
//! Every command produces a JSON document (written to `--json <path>` or to
//! stdout) and a short human summary on stderr. Seeded commands are
//! replay-deterministic: the JSON carries no timestamps unless `--timing`
//! is passed.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use entanglers::constructions::{
    build_householder_bue, build_permutation_bue, e1_certify_positive, e1_product_identity_check, e2_certify_rank3,
    householder_trace, GateKind, CERTIFY_MIN_THRESHOLD,
};
use entanglers::formats;
use entanglers::linalg;
use entanglers::search::{entanglement_profile, prevalence_trial, verify_gate, SearchConfig, Verdict};
use entanglers::varieties::{closure_dim_bound, dimension_gate, variety_dim, VarietyKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COUNTEREXAMPLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Samples for the cyclic product identity in `certify-appendices`.
pub const IDENTITY_SAMPLES: usize = 1000;
/// Default restarts for `certify-appendices`.
pub const CERTIFY_RESTARTS: usize = 500;

#[derive(Debug, Parser)]
#[command(name = "entanglers", version, about = "Universal entanglers for two identical particles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Bosonic,
    Fermionic,
    Distinguishable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    Permutation,
    Householder,
}

#[derive(Debug, Clone, Args)]
pub struct Dims {
    #[arg(long)]
    pub kind: Family,
    /// Single-particle dimension (bosonic, fermionic).
    #[arg(long)]
    pub d: Option<usize>,
    /// First local dimension (distinguishable).
    #[arg(long)]
    pub d1: Option<usize>,
    /// Second local dimension (distinguishable).
    #[arg(long)]
    pub d2: Option<usize>,
}

impl Dims {
    pub fn gate_kind(&self) -> Result<GateKind> {
        let kind = match (self.kind, self.d, self.d1, self.d2) {
            (Family::Bosonic, Some(d), None, None) => GateKind::Bosonic { d },
            (Family::Fermionic, Some(d), None, None) => GateKind::Fermionic { d },
            (Family::Distinguishable, None, Some(d1), Some(d2)) => GateKind::Distinguishable { d1, d2 },
            (Family::Distinguishable, ..) => bail!("distinguishable systems take --d1 and --d2"),
            _ => bail!("bosonic and fermionic systems take --d only"),
        };
        Ok(kind.validate()?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Record wall time in the manifest (breaks byte-identical replay).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SearchFlags {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Residual at or below which a counterexample is reported.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Best residual at or above which nothing counts as found.
    #[arg(long)]
    pub certify_threshold: Option<f64>,
}

impl SearchFlags {
    pub fn config(&self, default_restarts: usize) -> SearchConfig {
        let base = SearchConfig { restarts: default_restarts, ..SearchConfig::default() };
        SearchConfig {
            seed: self.seed.unwrap_or(base.seed),
            restarts: self.restarts.unwrap_or(base.restarts),
            max_iters: self.max_iters.unwrap_or(base.max_iters),
            tolerance: self.tol.unwrap_or(base.tolerance),
            certify_threshold: self.certify_threshold.unwrap_or(base.certify_threshold),
            ..base
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension-counting test for the existence of universal entanglers.
    Gate {
        #[command(flatten)]
        dims: Dims,
        #[command(flatten)]
        output: Output,
    },
    /// Build one of the explicit bosonic entanglers and write it as a matrix file.
    Construct {
        #[arg(value_enum)]
        construction: Construction,
        #[arg(long)]
        d: usize,
        /// Matrix file to write; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Search a gate for a product state mapped to a product state.
    Verify {
        unitary: PathBuf,
        /// Expected family; must match the file.
        #[arg(long)]
        kind: Option<Family>,
        #[command(flatten)]
        search: SearchFlags,
        #[command(flatten)]
        output: Output,
    },
    /// Numerical checks of the E1/E2 polynomial systems behind the Householder gate.
    CertifyAppendices {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        search: SearchFlags,
        #[command(flatten)]
        output: Output,
    },
    /// Fraction of Haar-random gates for which no counterexample is found.
    Prevalence {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[command(flatten)]
        search: SearchFlags,
        #[command(flatten)]
        output: Output,
    },
    /// Image-residual statistics over random product inputs.
    Profile {
        unitary: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

/// Everything needed to replay a run on the same platform.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tool_version: String,
    pub platform: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunManifest {
    fn new(command: &str, config: Value, seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            config,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            platform: format!("{}-{}", std::env::consts::ARCH, std::env::consts::OS),
            wall_time_s: None,
        }
    }
}

/// Result of one command: the JSON document, a summary and the exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    pub summary: String,
    pub exit_code: i32,
}

fn attach(mut report: Value, mut manifest: RunManifest, output: &Output, started: Instant) -> Value {
    if output.timing {
        manifest.wall_time_s = Some(started.elapsed().as_secs_f64());
    }
    report["manifest"] = serde_json::to_value(manifest).expect("manifest serializes");
    report
}

fn family_of(kind: GateKind) -> Family {
    match kind {
        GateKind::Bosonic { .. } => Family::Bosonic,
        GateKind::Fermionic { .. } => Family::Fermionic,
        GateKind::Distinguishable { .. } => Family::Distinguishable,
    }
}

pub fn run(cli: &Cli) -> Result<(Outcome, Option<PathBuf>)> {
    let started = Instant::now();
    match &cli.command {
        Command::Gate { dims, output } => {
            let kind = dims.gate_kind()?;
            let variety = kind.variety();
            let prediction = dimension_gate(variety)?;
            let bound = match variety {
                VarietyKind::Segre { .. } => Value::Null,
                v => {
                    let (bound, group_dim) = closure_dim_bound(v)?;
                    json!({"bound": bound, "group_dim": group_dim})
                }
            };
            let summary = format!(
                "{kind}\n  variety dimension  {}\n  2 x dim (lhs)      {}\n  ambient dim (rhs)  {}\n  lhs >= rhs         {}\n  entangler exists   {}",
                variety_dim(variety)?,
                prediction.lhs,
                prediction.rhs,
                prediction.inequality_holds,
                prediction.exists
            );
            let report = json!({
                "command": "gate",
                "kind": kind,
                "variety": variety,
                "variety_dim": variety_dim(variety)?,
                "exists": prediction.exists,
                "prediction": prediction,
                "closure_dim_bound": bound,
            });
            let manifest = RunManifest::new("gate", json!({"kind": kind}), None);
            Ok((
                Outcome { report: attach(report, manifest, output, started), summary, exit_code: EXIT_OK },
                output.json.clone(),
            ))
        }
        Command::Construct { construction, d, out, output } => {
            let gate = match construction {
                Construction::Permutation => build_permutation_bue(*d)?,
                Construction::Householder => build_householder_bue(*d)?,
            };
            let n = gate.n();
            let square = gate.matrix() * gate.matrix();
            let involution_defect = linalg::max_abs_diff(&square, &linalg::CMatrix::identity(n, n));
            let trace = gate.trace();
            let text = formats::to_json(&gate)?;
            let mut summary = format!(
                "{} entangler for d = {d}: {n}x{n}, unitarity defect {:.3e}, involution defect {:.3e}, trace {}",
                gate.provenance(),
                gate.unitarity_defect(),
                involution_defect,
                trace.re
            );
            if *construction == Construction::Householder {
                summary.push_str(&format!(" (expected C(d+1,2) - 2d = {})", householder_trace(*d)));
            }
            let report = match out {
                Some(path) => {
                    formats::write_matrix_file(path, &gate)?;
                    summary.push_str(&format!("\n  written to {}", path.display()));
                    let report = json!({
                        "command": "construct",
                        "construction": gate.provenance(),
                        "kind": gate.kind(),
                        "n": n,
                        "unitarity_defect": gate.unitarity_defect(),
                        "involution_defect": involution_defect,
                        "trace": trace,
                        "out": path,
                    });
                    let manifest =
                        RunManifest::new("construct", json!({"construction": gate.provenance(), "d": d}), None);
                    attach(report, manifest, output, started)
                }
                None => serde_json::from_str(&text)?,
            };
            Ok((Outcome { report, summary, exit_code: EXIT_OK }, output.json.clone()))
        }
        Command::Verify { unitary, kind, search, output } => {
            let gate = formats::read_matrix_file(unitary)?;
            if let Some(k) = kind {
                if *k != family_of(gate.kind()) {
                    bail!("{} holds a {} gate, not {:?}", unitary.display(), gate.kind(), k);
                }
            }
            let cfg = search.config(SearchConfig::default().restarts);
            let report = verify_gate(&gate, &cfg)?;
            let exit_code = match report.verdict {
                Verdict::NoneFoundWithinBudget => EXIT_OK,
                Verdict::CounterexampleFound => EXIT_COUNTEREXAMPLE,
                Verdict::Inconclusive => EXIT_INCONCLUSIVE,
            };
            let summary = format!(
                "{} ({}): {} after {} restarts, best residual {:.4e}",
                gate.kind(),
                gate.provenance(),
                report.verdict.as_str(),
                report.restarts_run,
                report.best_residual
            );
            let manifest = RunManifest::new("verify", json!({"input": unitary, "search": cfg}), Some(cfg.seed));
            let value = serde_json::to_value(&report)?;
            Ok((Outcome { report: attach(value, manifest, output, started), summary, exit_code }, output.json.clone()))
        }
        Command::CertifyAppendices { d, search, output } => {
            let cfg = search.config(CERTIFY_RESTARTS);
            let e1 = e1_certify_positive(*d, &cfg, CERTIFY_MIN_THRESHOLD)?;
            let identity = e1_product_identity_check(*d, IDENTITY_SAMPLES, cfg.seed)?;
            let mut lines = vec![
                format!("E1 minimum over the unit sphere: {:.4e} ({})", e1.min_found, pass(e1.passed)),
                format!("cyclic product identity on {IDENTITY_SAMPLES} samples: {}", pass(identity)),
            ];
            let mut all_passed = e1.passed && identity;
            let e2 = if *d >= 5 {
                let e2 = e2_certify_rank3(*d, &cfg, CERTIFY_MIN_THRESHOLD)?;
                lines.push(format!("E2 minimum sigma3 ratio over S: {:.4e} ({})", e2.min_found, pass(e2.passed)));
                all_passed &= e2.passed;
                serde_json::to_value(e2)?
            } else {
                let e2 = e2_certify_rank3(*d, &cfg, CERTIFY_MIN_THRESHOLD)?;
                lines.push(format!(
                    "E2 skipped (the construction needs d >= 5); diagnostic minimum {:.4e}",
                    e2.min_found
                ));
                json!({"skipped": true, "note": "the Householder construction requires d >= 5", "diagnostic": e2})
            };
            let report = json!({
                "command": "certify-appendices",
                "d": d,
                "e1": e1,
                "product_identity": {"passed": identity, "samples": IDENTITY_SAMPLES, "seed": cfg.seed},
                "e2": e2,
                "all_passed": all_passed,
            });
            let manifest = RunManifest::new("certify-appendices", json!({"d": d, "search": cfg}), Some(cfg.seed));
            let summary = lines.join("\n");
            Ok((
                Outcome { report: attach(report, manifest, output, started), summary, exit_code: EXIT_OK },
                output.json.clone(),
            ))
        }
        Command::Prevalence { dims, count, search, output } => {
            let kind = dims.gate_kind()?;
            let cfg = search.config(SearchConfig::default().restarts);
            let report = prevalence_trial(kind, *count, &cfg)?;
            let summary = format!(
                "{kind}: {} of {} Haar gates with no counterexample (fraction {}), {} with counterexamples, {} inconclusive",
                report.none_found, report.num_gates, report.fraction_none_found, report.counterexamples_found, report.inconclusive
            );
            let manifest =
                RunManifest::new("prevalence", json!({"kind": kind, "count": count, "search": cfg}), Some(cfg.seed));
            let value = serde_json::to_value(&report)?;
            Ok((
                Outcome { report: attach(value, manifest, output, started), summary, exit_code: EXIT_OK },
                output.json.clone(),
            ))
        }
        Command::Profile { unitary, samples, seed, output } => {
            let gate = formats::read_matrix_file(unitary)?;
            let profile = entanglement_profile(&gate, *samples, *seed)?;
            let summary = format!(
                "{}: image residual over {} random product inputs: min {:.4e}, mean {:.4e}, max {:.4e}",
                gate.kind(),
                samples,
                profile.min,
                profile.mean,
                profile.max
            );
            let manifest = RunManifest::new("profile", json!({"input": unitary, "samples": samples}), Some(*seed));
            let value = serde_json::to_value(&profile)?;
            Ok((
                Outcome { report: attach(value, manifest, output, started), summary, exit_code: EXIT_OK },
                output.json.clone(),
            ))
        }
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Parses `args`, runs the command, writes the JSON and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli).and_then(|(outcome, path)| emit(&outcome, path.as_deref()).map(|_| outcome.exit_code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn emit(outcome: &Outcome, path: Option<&std::path::Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(&outcome.report)? + "\n";
    eprintln!("{}", outcome.summary);
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}
