//! Config-driven runs over `finsler-core` with JSON or CSV reports.

mod config;

pub use config::{default_samples, parse_config, ConfigError, FieldError, RunConfig, SchwarzTarget, Task, Tolerances};

use finsler_core::automorphisms::random_automorphism;
use finsler_core::comparison::{caratheodory, verify_sandwich};
use finsler_core::curvature::{bisectional_samples, curvature_bounds, sectional_samples};
use finsler_core::domains::derive_seed;
use finsler_core::norms::{certify_scc, certify_sn, default_s_grid, default_scc_grid, Certificate};
use finsler_core::schwarz::{schwarz_bound, Corpus};
use finsler_core::{ComplexMatrix, CurvatureReport, FinslerError, MetricSpec, NormSpec, SandwichReport, SchwarzReport};
use rayon::prelude::*;
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Numeric {
        context: String,
        #[source]
        source: FinslerError,
    },
}

impl RunError {
    /// Config problems and numeric failures share status 2.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, RunError>;
}

impl<T> Context<T> for finsler_core::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, RunError> {
        self.map_err(|source| RunError::Numeric {
            context: what(),
            source,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Columns and rows of text cells. Floats go through [`cell`] and read back
/// to the same bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn quantities(pairs: &[(&str, f64)]) -> Self {
        let mut t = Self::new(&["quantity", "value"]);
        for (k, v) in pairs {
            t.push(vec![k.to_string(), cell(*v)]);
        }
        t
    }
}

/// Shortest round-trip form of `x`, with an exponent at extreme magnitudes.
pub fn cell(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalResult {
    pub min_f: f64,
    pub max_f: f64,
    /// Extremes of `F/F_C`.
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Largest `|F(f(Z); f_*V) − F(Z;V)|/F(Z;V)` over random automorphisms.
    pub max_invariance_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TensorWitness {
    pub z: ComplexMatrix,
    pub v: ComplexMatrix,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyResult {
    pub certificate: Certificate,
    /// Smallest eigenvalue of `G_{ij̄}` over the sampled `(Z;V)`.
    pub min_tensor_eigenvalue: f64,
    pub tensor_witness: Option<TensorWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureResult {
    #[serde(flatten)]
    pub bounds: CurvatureReport,
    pub sectional_min: f64,
    pub sectional_max: f64,
    pub bisectional_min: f64,
    pub bisectional_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichResult {
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    #[serde(flatten)]
    pub report: SandwichReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SchwarzResult {
    pub source_curvature: CurvatureReport,
    pub target_curvature: CurvatureReport,
    #[serde(flatten)]
    pub report: SchwarzReport,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum TaskResult {
    Eval(EvalResult),
    Certify(CertifyResult),
    Curvature(CurvatureResult),
    Sandwich(Box<SandwichResult>),
    Schwarz(Box<SchwarzResult>),
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub task: Task,
    pub metric: String,
    pub pass: bool,
    pub result: TaskResult,
    pub table: Table,
    pub provenance: Provenance,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

/// What gets printed in place of a report when a run fails.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub task: Task,
    pub status: i32,
    pub error: String,
    pub provenance: Provenance,
}

impl ErrorReport {
    pub fn new(config: &RunConfig, error: &RunError) -> Self {
        Self {
            task: config.task,
            status: error.exit_code(),
            error: error.to_string(),
            provenance: provenance(config),
        }
    }
}

fn provenance(config: &RunConfig) -> Provenance {
    Provenance {
        version: VERSION,
        seed: config.seed,
        samples: config.samples,
        tolerances: config.tolerances,
    }
}

pub fn run(config: &RunConfig) -> Result<RunReport, RunError> {
    let (pass, result, table) = match config.task {
        Task::Eval => eval(config)?,
        Task::Certify => certify(config)?,
        Task::Curvature => curvature(config)?,
        Task::Sandwich => sandwich(config)?,
        Task::Schwarz => schwarz(config)?,
    };
    Ok(RunReport {
        task: config.task,
        metric: config.metric.label(),
        pass,
        result,
        table,
        provenance: provenance(config),
    })
}

type Outcome = (bool, TaskResult, Table);

fn eval(config: &RunConfig) -> Result<Outcome, RunError> {
    let m = &config.metric;
    let d = m.domain;
    let seed = config.seed;
    let rows = (0..config.samples as u64)
        .into_par_iter()
        .map(|i| -> finsler_core::Result<[f64; 3]> {
            let z = d.sample_point(derive_seed(seed, 1, i));
            let v = d.sample_tangent(derive_seed(seed, 2, i));
            let f = random_automorphism(&d, derive_seed(seed, 3, i))?;
            let a = m.eval(&z, &v)?;
            let b = m.eval(&f.apply(&z)?, &f.differential(&z, &v)?)?;
            Ok([a, caratheodory(&d, &z, &v)?, (a - b).abs() / a])
        })
        .collect::<finsler_core::Result<Vec<_>>>()
        .context(|| format!("evaluating {}", m.label()))?;
    let mut table = Table::new(&["sample", "F", "caratheodory", "invariance_deviation"]);
    let mut r = EvalResult {
        min_f: f64::INFINITY,
        max_f: 0.0,
        min_ratio: f64::INFINITY,
        max_ratio: 0.0,
        max_invariance_deviation: 0.0,
    };
    for (i, [f, c, dev]) in rows.into_iter().enumerate() {
        r.min_f = r.min_f.min(f);
        r.max_f = r.max_f.max(f);
        r.min_ratio = r.min_ratio.min(f / c);
        r.max_ratio = r.max_ratio.max(f / c);
        r.max_invariance_deviation = r.max_invariance_deviation.max(dev);
        table.push(vec![i.to_string(), cell(f), cell(c), cell(dev)]);
    }
    let pass = r.max_invariance_deviation <= config.tolerances.invariance;
    Ok((pass, TaskResult::Eval(r), table))
}

fn norm_certificate(m: &MetricSpec, seed: u64) -> finsler_core::Result<Certificate> {
    match &m.norm {
        NormSpec::G(g) => certify_scc(g, &default_scc_grid(g.k(), 500, seed)),
        NormSpec::Phi(phi) => certify_sn(phi, &default_s_grid(1000)),
    }
}

fn certify(config: &RunConfig) -> Result<Outcome, RunError> {
    let m = &config.metric;
    let d = m.domain;
    let seed = config.seed;
    let certificate = norm_certificate(m, seed).context(|| format!("certifying {}", m.label()))?;
    let eigs = (0..config.samples as u64)
        .into_par_iter()
        .map(|i| -> finsler_core::Result<(f64, u64)> {
            let z = d.sample_point(derive_seed(seed, 4, i));
            let v = d.sample_tangent(derive_seed(seed, 5, i));
            Ok((m.fundamental_tensor(&z, &v)?.min_eigenvalue()?, i))
        })
        .collect::<finsler_core::Result<Vec<_>>>()
        .context(|| format!("fundamental tensor of {}", m.label()))?;
    let (min_eig, at) = eigs
        .iter()
        .copied()
        .fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a });
    let tensor_witness = (min_eig <= 0.0).then(|| TensorWitness {
        z: d.sample_point(derive_seed(seed, 4, at)),
        v: d.sample_tangent(derive_seed(seed, 5, at)),
        min_eigenvalue: min_eig,
    });
    let table = Table::quantities(&[
        ("certificate_worst_margin", certificate.worst_margin),
        ("min_tensor_eigenvalue", min_eig),
    ]);
    let pass = certificate.pass && tensor_witness.is_none();
    let result = CertifyResult {
        certificate,
        min_tensor_eigenvalue: min_eig,
        tensor_witness,
    };
    Ok((pass, TaskResult::Certify(result), table))
}

fn bounds_of(m: &MetricSpec) -> Result<CurvatureReport, RunError> {
    curvature_bounds(m).context(|| format!("curvature bounds of {}", m.label()))
}

fn extremes(xs: &[f64]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    })
}

fn curvature(config: &RunConfig) -> Result<Outcome, RunError> {
    let m = &config.metric;
    let bounds = bounds_of(m)?;
    let ctx = || format!("curvature samples of {}", m.label());
    let (smin, smax) = extremes(&sectional_samples(m, config.samples, config.seed).context(ctx)?);
    let (bmin, bmax) = extremes(&bisectional_samples(m, config.samples, config.seed).context(ctx)?);
    let tol = config.tolerances.curvature;
    let pass =
        smin >= -bounds.k1 - tol && smax <= -bounds.k2 + tol && bmin >= -bounds.bisectional_bound - tol && bmax <= tol;
    let table = Table::quantities(&[
        ("K1", bounds.k1),
        ("K2", bounds.k2),
        ("lu", bounds.lu),
        ("bisectional_bound", bounds.bisectional_bound),
        ("sectional_min", smin),
        ("sectional_max", smax),
        ("bisectional_min", bmin),
        ("bisectional_max", bmax),
    ]);
    let result = CurvatureResult {
        bounds,
        sectional_min: smin,
        sectional_max: smax,
        bisectional_min: bmin,
        bisectional_max: bmax,
    };
    Ok((pass, TaskResult::Curvature(result), table))
}

fn sandwich(config: &RunConfig) -> Result<Outcome, RunError> {
    let m = &config.metric;
    let bounds = bounds_of(m)?;
    let mut report =
        verify_sandwich(m, &bounds, config.samples, config.seed).context(|| format!("sandwich for {}", m.label()))?;
    let t = &config.tolerances;
    report.pass = report.lower_margin >= -t.sandwich
        && report.upper_margin >= -t.sandwich
        && report.lower_equality <= t.equality
        && report.upper_equality <= t.equality;
    let table = Table::quantities(&[
        ("K1", bounds.k1),
        ("K2", bounds.k2),
        ("lower_margin", report.lower_margin),
        ("upper_margin", report.upper_margin),
        ("lower_equality", report.lower_equality),
        ("upper_equality", report.upper_equality),
    ]);
    let pass = report.pass;
    Ok((
        pass,
        TaskResult::Sandwich(Box::new(SandwichResult {
            k1: bounds.k1,
            k2: bounds.k2,
            report,
        })),
        table,
    ))
}

fn schwarz(config: &RunConfig) -> Result<Outcome, RunError> {
    let (src, tgt) = (&config.metric, &config.schwarz.metric);
    let source_curvature = bounds_of(src)?;
    let target_curvature = bounds_of(tgt)?;
    let bound = schwarz_bound(&source_curvature, &target_curvature);
    let ctx = || format!("schwarz corpus {} → {}", src.domain, tgt.domain);
    let corpus = Corpus::build(
        &src.domain,
        &tgt.domain,
        config.schwarz.maps,
        config.samples,
        config.seed,
    )
    .context(ctx)?;
    let mut report = corpus.check(src, tgt, bound).context(ctx)?;
    report.pass = report.min_margin >= -config.tolerances.violation;
    let table = Table::quantities(&[
        ("bound", bound),
        ("min_margin", report.min_margin),
        ("sup_ratio", report.sup_ratio),
        ("violations", report.violations as f64),
    ]);
    let pass = report.pass;
    Ok((
        pass,
        TaskResult::Schwarz(Box::new(SchwarzResult {
            source_curvature,
            target_curvature,
            report,
        })),
        table,
    ))
}

/// Renders a report: pretty JSON, or the report's table as CSV.
pub fn emit_report(report: &RunReport, format: Format) -> String {
    match format {
        Format::Json => to_json(report),
        Format::Csv => to_csv(&report.table),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports contain only serializable data");
    s.push('\n');
    s
}

pub fn to_csv(table: &Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("cells are UTF-8")
}
