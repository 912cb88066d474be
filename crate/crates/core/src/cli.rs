//! Command-line front end: `analyze`, `scan` and `dominate`.
//!
//! Inputs are matrix files (JSON or CSV) or built-in models written as
//! `casestudy:NAME`. Exit status is 0 on success, 1 on I/O, parse or usage
//! errors and 2 when a numerical stage fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{Complex, DVector};
use serde::Serialize;

use crate::asymptotics::{
    boundary_decomposition, classify_longterm_with, linspace, rank_one_limit_with, AsymptoticClass,
    AsymptoticKind, BoundaryDecomposition, RankOneLimit,
};
use crate::casestudies;
use crate::domination::{domination_check, DominationReport};
use crate::error::{Error, Result};
use crate::linalg::{eig, EigenData};
use crate::matrix::{GeneratorMatrix, MatrixFile};
use crate::positivity::{
    eventual_positivity_scan_with, pf_certificate_with, weak_condition_check,
    weak_condition_search, PfCertificate, PositivityCertificate, WeakViolation,
};
use crate::spectral::{peripheral_report_default, pole_data_with, PeripheralReport, PoleData};
use crate::structure::{irreducibility_report, IrreducibilityOptions, IrreducibilityReport};
use crate::tol;

pub const SCHEMA: &str = "sgspec/1";

#[derive(Debug, Parser)]
#[command(
    name = "sgspec",
    version,
    about = "Spectral and positivity analysis of matrix semigroups e^{tA}"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full analysis pipeline on one generator.
    Analyze {
        input: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Sample the minimum entry of e^{tA} and certify or refute eventual positivity.
    Scan {
        input: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Check uniform asymptotic domination of e^{tA} by e^{tB}.
    Dominate {
        a: String,
        b: String,
        /// Positive vector for the individual (per-f) deficit, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        f: Option<Vec<f64>>,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// Absolute threshold below which an off-diagonal entry is treated as zero.
    #[arg(long)]
    pub tol_zero: Option<f64>,
    /// Eigenvalue clustering radius.
    #[arg(long)]
    pub cluster_tol: Option<f64>,
    #[arg(long, default_value_t = 50.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.05)]
    pub grid: f64,
    /// Write the main output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Also write the CSV trace to this file.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    /// Leave per-stage timings out of the report.
    #[arg(long)]
    pub no_timings: bool,
}

/// A loaded generator with whatever designated vectors came with it.
#[derive(Debug, Clone)]
pub struct Input {
    pub source: String,
    pub generator: GeneratorMatrix,
    pub vectors: BTreeMap<String, Vec<f64>>,
    pub provenance: Option<String>,
}

pub fn load_input(spec: &str) -> Result<Input> {
    if let Some(name) = spec.strip_prefix("casestudy:") {
        let m = casestudies::by_name(name)?;
        return Ok(Input {
            source: spec.to_string(),
            generator: m.generator,
            vectors: m.designated_vectors,
            provenance: Some(m.provenance),
        });
    }
    let path = PathBuf::from(spec);
    let with_path = |e: Error| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{spec}: {io}"))),
        Error::Parse {
            line,
            column,
            message,
        } => Error::Parse {
            line,
            column,
            message: format!("{spec}: {message}"),
        },
        other => other,
    };
    let generator = GeneratorMatrix::load(&path).map_err(with_path)?;
    let text = std::fs::read_to_string(&path).map_err(|e| with_path(e.into()))?;
    let vectors = serde_json::from_str::<MatrixFile>(&text)
        .map(|f| f.vectors)
        .unwrap_or_default();
    Ok(Input {
        source: spec.to_string(),
        generator,
        vectors,
        provenance: None,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Stage<T> {
    Ok { result: T },
    Skipped { reason: String },
    Failed { error: String, numerical: bool },
}

impl<T> Stage<T> {
    pub fn result(&self) -> Option<&T> {
        match self {
            Stage::Ok { result } => Some(result),
            _ => None,
        }
    }

    fn failed_numerically(&self) -> bool {
        matches!(
            self,
            Stage::Failed {
                numerical: true,
                ..
            }
        )
    }
}

/// Outcomes that mean "does not apply to this generator".
fn not_applicable(e: &Error) -> bool {
    matches!(
        e,
        Error::NoRankOneLimit(_)
            | Error::Defective { .. }
            | Error::NotSimple { .. }
            | Error::SpectralBoundNotEigenvalue { .. }
            | Error::Capacity { .. }
    )
}

fn stage<T>(r: Result<T>) -> Stage<T> {
    match r {
        Ok(result) => Stage::Ok { result },
        Err(e) if not_applicable(&e) => Stage::Skipped {
            reason: e.to_string(),
        },
        Err(e) => Stage::Failed {
            numerical: e.is_numerical(),
            error: e.to_string(),
        },
    }
}

fn skipped<T>(reason: &str) -> Stage<T> {
    Stage::Skipped {
        reason: reason.to_string(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterSummary {
    #[serde(serialize_with = "crate::serde_complex::serialize")]
    pub center: Complex<f64>,
    pub algebraic: usize,
    pub geometric: usize,
    pub defective: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenSummary {
    #[serde(with = "crate::serde_complex::vec")]
    pub eigenvalues: Vec<Complex<f64>>,
    pub clusters: Vec<ClusterSummary>,
    pub spectral_bound: f64,
    pub cluster_tol: f64,
}

impl EigenSummary {
    fn from(e: &EigenData) -> Self {
        Self {
            eigenvalues: e.eigenvalues.clone(),
            clusters: e
                .clusters
                .iter()
                .map(|c| ClusterSummary {
                    center: c.center,
                    algebraic: c.algebraic,
                    geometric: c.geometric,
                    defective: c.defective,
                })
                .collect(),
            spectral_bound: e.spectral_bound(),
            cluster_tol: e.cluster_tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakConditionReport {
    /// `Some` when the input designates `f` and `phi`.
    pub designated_pair_holds: Option<bool>,
    /// `false` when a strictly positive Perron pair with a gap settles it.
    pub searched: bool,
    pub holds_for_all_pairs: bool,
    pub violation: Option<WeakViolation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdicts {
    pub irreducible: Option<bool>,
    pub eventually_positive: Option<bool>,
    pub weak_condition_violated: Option<bool>,
    pub rank_one_limit: bool,
    pub longterm: Option<AsymptoticKind>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub input: String,
    pub input_digest: String,
    pub dim: usize,
    pub provenance: Option<String>,
    pub verdicts: Verdicts,
    pub eigendata: Stage<EigenSummary>,
    pub irreducibility: Stage<IrreducibilityReport>,
    pub pf_certificate: Stage<PfCertificate>,
    pub positivity: Stage<PositivityCertificate>,
    pub weak_condition: Stage<WeakConditionReport>,
    pub peripheral: Stage<PeripheralReport>,
    pub pole_data: Stage<PoleData>,
    pub longterm: Stage<AsymptoticClass>,
    /// Limit projection of `e^{t(A - spb)}` when it converges.
    pub limit_projection: Stage<BoundaryDecomposition>,
    pub rank_one_limit: Stage<RankOneLimit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl AnalysisReport {
    pub fn any_numerical_failure(&self) -> bool {
        self.eigendata.failed_numerically()
            || self.irreducibility.failed_numerically()
            || self.pf_certificate.failed_numerically()
            || self.positivity.failed_numerically()
            || self.weak_condition.failed_numerically()
            || self.peripheral.failed_numerically()
            || self.pole_data.failed_numerically()
            || self.longterm.failed_numerically()
            || self.limit_projection.failed_numerically()
            || self.rank_one_limit.failed_numerically()
    }
}

struct Timer(BTreeMap<String, f64>);

impl Timer {
    fn run<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0
            .insert(name.to_string(), start.elapsed().as_secs_f64() * 1e3);
        out
    }
}

fn weak_stage(input: &Input, pf: Option<&PfCertificate>) -> Stage<WeakConditionReport> {
    let a = &input.generator;
    stage((|| {
        let designated_pair_holds = match (input.vectors.get("f"), input.vectors.get("phi")) {
            (Some(f), Some(phi)) => Some(weak_condition_check(
                a,
                &DVector::from_row_slice(f),
                &DVector::from_row_slice(phi),
            )?),
            _ => None,
        };
        // ⟨φ, e^{tA} f⟩ ~ e^{spb t} ⟨φ, u⟩ ⟨ψ, f⟩ > 0 for every positive pair
        if pf.is_some_and(|p| p.has_positive_perron_pair()) {
            return Ok(WeakConditionReport {
                designated_pair_holds,
                searched: false,
                holds_for_all_pairs: true,
                violation: None,
            });
        }
        let violation = weak_condition_search(a, tol::brute_force_cap())?;
        Ok(WeakConditionReport {
            designated_pair_holds,
            searched: true,
            holds_for_all_pairs: false,
            violation,
        })
    })())
}

fn eigen(a: &GeneratorMatrix, flags: &Flags) -> Result<EigenData> {
    eig(
        a,
        flags
            .cluster_tol
            .unwrap_or_else(|| tol::cluster_tol(a.norm_inf())),
    )
}

pub fn analyze(input: &Input, flags: &Flags) -> AnalysisReport {
    let a = &input.generator;
    let mut timer = Timer(BTreeMap::new());
    let e = timer.run("eig", || eigen(a, flags));

    let irreducibility = timer.run("irreducibility", || {
        stage(irreducibility_report(
            a,
            &IrreducibilityOptions {
                zero_tol: flags.tol_zero,
                ..IrreducibilityOptions::default()
            },
        ))
    });

    let e = match e {
        Ok(e) => e,
        Err(err) => {
            let failed: Stage<()> = stage(Err(err));
            let reason = "eigendecomposition failed";
            let eigendata = match failed {
                Stage::Failed { error, numerical } => Stage::Failed { error, numerical },
                Stage::Skipped { reason } => Stage::Skipped { reason },
                Stage::Ok { .. } => unreachable!(),
            };
            return finish(
                input,
                flags,
                timer,
                eigendata,
                irreducibility,
                skipped(reason),
                skipped(reason),
                weak_stage(input, None),
                skipped(reason),
                skipped(reason),
                skipped(reason),
                skipped(reason),
                skipped(reason),
            );
        }
    };

    let pf = timer.run("pf_certificate", || stage(pf_certificate_with(a, &e)));
    let weak_condition = timer.run("weak_condition", || weak_stage(input, pf.result()));
    let positivity = timer.run("positivity", || {
        stage(eventual_positivity_scan_with(
            a,
            &e,
            pf.result(),
            flags.t_max,
            flags.grid,
        ))
    });
    let peripheral = timer.run("peripheral", || Stage::Ok {
        result: peripheral_report_default(&e),
    });
    let pole = timer.run("pole_data", || stage(pole_data_with(a, &e)));
    let class = timer.run("longterm", || classify_longterm_with(&e));
    let limit_projection = timer.run("limit_projection", || match class.rescaled_kind {
        AsymptoticKind::ConvergesRankOne | AsymptoticKind::ConvergesProjection { .. } => {
            stage(boundary_decomposition(&a.shifted(-class.spb)))
        }
        _ => skipped("rescaled semigroup does not converge"),
    });
    let rank_one = timer.run("rank_one_limit", || {
        let gap = pf.result().map_or(0.0, |p| p.gap);
        let t_end = if gap.is_finite() && gap > 0.0 {
            40.0 / gap
        } else {
            flags.t_max
        };
        stage(rank_one_limit_with(a, &e, &linspace(t_end, 100)))
    });
    finish(
        input,
        flags,
        timer,
        Stage::Ok {
            result: EigenSummary::from(&e),
        },
        irreducibility,
        pf,
        positivity,
        weak_condition,
        peripheral,
        pole,
        Stage::Ok { result: class },
        limit_projection,
        rank_one,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish(
    input: &Input,
    flags: &Flags,
    timer: Timer,
    eigendata: Stage<EigenSummary>,
    irreducibility: Stage<IrreducibilityReport>,
    pf_certificate: Stage<PfCertificate>,
    positivity: Stage<PositivityCertificate>,
    weak_condition: Stage<WeakConditionReport>,
    peripheral: Stage<PeripheralReport>,
    pole_data: Stage<PoleData>,
    longterm: Stage<AsymptoticClass>,
    limit_projection: Stage<BoundaryDecomposition>,
    rank_one_limit: Stage<RankOneLimit>,
) -> AnalysisReport {
    use crate::positivity::PositivityKind;
    let verdicts = Verdicts {
        irreducible: irreducibility.result().map(|r| r.verdict),
        eventually_positive: positivity.result().and_then(|p| match p.kind {
            PositivityKind::EventuallyPositive => Some(true),
            PositivityKind::Refuted => Some(false),
            PositivityKind::Inconclusive => None,
        }),
        weak_condition_violated: weak_condition.result().and_then(|w| {
            match w.designated_pair_holds {
                Some(holds) => Some(!holds),
                None if w.holds_for_all_pairs => Some(false),
                None => w.violation.as_ref().map(|_| true),
            }
        }),
        rank_one_limit: rank_one_limit.result().is_some(),
        longterm: longterm.result().map(|c| c.kind),
    };
    AnalysisReport {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        input: input.source.clone(),
        input_digest: input.generator.digest(),
        dim: input.generator.dim(),
        provenance: input.provenance.clone(),
        verdicts,
        eigendata,
        irreducibility,
        pf_certificate,
        positivity,
        weak_condition,
        peripheral,
        pole_data,
        longterm,
        limit_projection,
        rank_one_limit,
        timings_ms: (!flags.no_timings).then_some(timer.0),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub input: String,
    pub input_digest: String,
    pub certificate: PositivityCertificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

pub fn scan(input: &Input, flags: &Flags) -> Result<ScanReport> {
    let a = &input.generator;
    let mut timer = Timer(BTreeMap::new());
    let certificate = timer.run("scan", || -> Result<_> {
        let e = eigen(a, flags)?;
        let pf = match pf_certificate_with(a, &e) {
            Ok(pf) => Some(pf),
            Err(Error::Defective { .. }) => None,
            Err(err) => return Err(err),
        };
        eventual_positivity_scan_with(a, &e, pf.as_ref(), flags.t_max, flags.grid)
    })?;
    Ok(ScanReport {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        input: input.source.clone(),
        input_digest: a.digest(),
        certificate,
        timings_ms: (!flags.no_timings).then_some(timer.0),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DominateReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub input_a: String,
    pub input_b: String,
    pub input_digest_a: String,
    pub input_digest_b: String,
    pub report: DominationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

pub fn dominate(a: &Input, b: &Input, f: Option<&[f64]>, flags: &Flags) -> Result<DominateReport> {
    let mut timer = Timer(BTreeMap::new());
    let report = timer.run("dominate", || {
        domination_check(&a.generator, &b.generator, f, flags.t_max, flags.grid)
    })?;
    Ok(DominateReport {
        schema: SCHEMA,
        tool_version: env!("CARGO_PKG_VERSION"),
        input_a: a.source.clone(),
        input_b: b.source.clone(),
        input_digest_a: a.generator.digest(),
        input_digest_b: b.generator.digest(),
        report,
        timings_ms: (!flags.no_timings).then_some(timer.0),
    })
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialise")
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        2
    } else {
        1
    }
}

pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Analyze { input, flags } => load_input(input).and_then(|inp| {
            let report = analyze(&inp, flags);
            let csv = report
                .positivity
                .result()
                .map(|c| c.trace_csv())
                .unwrap_or_else(|| "t,min_entry\n".to_string());
            write_outputs(flags, to_json(&report), csv)?;
            Ok(if report.any_numerical_failure() { 2 } else { 0 })
        }),
        Command::Scan { input, flags } => load_input(input).and_then(|inp| {
            let report = scan(&inp, flags)?;
            write_outputs(flags, to_json(&report), report.certificate.trace_csv())?;
            Ok(0)
        }),
        Command::Dominate { a, b, f, flags } => load_input(a).and_then(|ia| {
            let ib = load_input(b)?;
            let report = dominate(&ia, &ib, f.as_deref(), flags)?;
            write_outputs(flags, to_json(&report), report.report.deficit_csv())?;
            Ok(0)
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("sgspec: {e}");
            exit_code(&e)
        }
    }
}

/// Main output to `--out` or stdout in the chosen format; the CSV trace
/// additionally to `--trace-out`.
fn write_outputs(flags: &Flags, json: String, csv: String) -> Result<()> {
    let main = match flags.format {
        Format::Json => json + "\n",
        Format::Csv => csv.clone(),
    };
    match &flags.out {
        Some(path) => std::fs::write(path, main)?,
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            match out.write_all(main.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    if let Some(path) = &flags.trace_out {
        std::fs::write(path, csv)?;
    }
    Ok(())
}

pub fn main() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                1
            } else {
                0
            }
        }
    }
}
