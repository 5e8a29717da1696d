//! Experiment harness: instance builders, seeded multi-sample runs of the
//! solver, aggregation, separation scans and SVG plots.

mod instances;
mod scan;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use instances::{
    build_euclid_instance, build_random_instance, build_rank1_instance, build_separable_instance, build_slack_instance,
    euclid_matrix, load_custom_instance, parse_custom_instance, slack_matrix,
};
pub use scan::{run_separation_scan, ScanFamily, ScanRow, SeparationTable};
pub use svg::{emit_svg, plot_geometry, render_svg, PlotGeometry};

use crate::caratheodory::{
    approx_caratheodory, error_bound, regime, AtomOracle, Method, NormKind, RunTrace, SolverConfig, StopRule,
};
use crate::decomp::diag_correspondence;
use crate::error::{Error, Result};
use crate::par;
use crate::tensor::{ComplexMatrix, NnTensor};

/// Overrides the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "APPROXCARA_OUTPUT_DIR";
pub const DEFAULT_SAMPLES: usize = 20;
pub const DEFAULT_K_MAX: u64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    Random,
    Rank1,
    Euclid,
    Slack,
    Separable,
    CustomFile,
}

/// A single value or a list in config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

fn default_n() -> usize {
    1
}
fn default_p() -> f64 {
    2.0
}
fn default_norm() -> NormKind {
    NormKind::Lp
}
fn default_methods() -> OneOrMany<Method> {
    OneOrMany::Many(vec![Method::Ordered, Method::Greedy])
}
fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceKind,
    pub d: OneOrMany<usize>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_norm")]
    pub norm: NormKind,
    #[serde(default = "default_methods", alias = "method")]
    pub methods: OneOrMany<Method>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub k_max: Option<u64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; `APPROXCARA_OUTPUT_DIR` takes precedence.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Input file for `custom-file` instances.
    #[serde(default)]
    pub path: Option<PathBuf>,
    /// Number of product states for `separable` instances (default `4 d^{n+1}`).
    #[serde(default)]
    pub atoms: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(instance: InstanceKind, d: usize) -> Self {
        ExperimentConfig {
            instance,
            d: OneOrMany::One(d),
            n: 1,
            p: 2.0,
            norm: NormKind::Lp,
            methods: default_methods(),
            samples: DEFAULT_SAMPLES,
            k_max: None,
            epsilon: None,
            seed: 0,
            output: None,
            path: None,
            atoms: None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// `.json` files are read as JSON, everything else as TOML.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = if path.extension().is_some_and(|e| e == "json") {
            Self::from_json_str(&text)?
        } else {
            Self::from_toml_str(&text)?
        };
        if let (Some(p), Some(dir)) = (&cfg.path, path.parent()) {
            if p.is_relative() {
                cfg.path = Some(dir.join(p));
            }
        }
        Ok(cfg)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.d.to_vec()
    }

    pub fn methods(&self) -> Vec<Method> {
        self.methods.to_vec()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        let dims = self.dims();
        if dims.is_empty() {
            return bad("d must list at least one dimension".into());
        }
        let min_d = match self.instance {
            InstanceKind::Euclid => 2,
            InstanceKind::Slack => 3,
            _ => 1,
        };
        if let Some(&d) = dims.iter().find(|&&d| d < min_d) {
            return bad(format!("{:?} instances need d >= {min_d}, got {d}", self.instance));
        }
        if self.methods().is_empty() {
            return bad("at least one method is required".into());
        }
        let matrix_only = matches!(self.instance, InstanceKind::Rank1 | InstanceKind::Euclid | InstanceKind::Slack);
        if matrix_only && self.n != 1 {
            return bad(format!("{:?} instances are matrices (n = 1)", self.instance));
        }
        if self.instance == InstanceKind::Separable && self.norm != NormKind::Schatten {
            return bad("separable instances use the Schatten norm".into());
        }
        if self.instance == InstanceKind::CustomFile && self.path.is_none() {
            return bad("custom-file instances need `path`".into());
        }
        regime(self.p, self.norm).map_err(|e| Error::Config(e.to_string()))?;
        if self.k_max == Some(0) {
            return bad("k_max must be at least 1".into());
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return bad(format!("epsilon must be positive, got {e}"));
            }
        }
        Ok(())
    }

    pub fn stop_rule(&self) -> StopRule {
        match (self.epsilon, self.k_max) {
            (None, None) => StopRule::k_max(DEFAULT_K_MAX),
            (epsilon, k_max) => StopRule { epsilon, k_max },
        }
    }

    /// `APPROXCARA_OUTPUT_DIR`, then `output`, then `./out`.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output.clone().unwrap_or_else(|| PathBuf::from("out")),
        }
    }
}

/// A target and the atoms to approximate it with.
#[derive(Clone, Debug)]
pub struct Instance {
    pub target: ComplexMatrix,
    pub oracle: AtomOracle,
}

/// Nonnegative tensor as an ℓp target over basis atoms, or through the
/// diagonal correspondence as a Schatten target over diagonal matrix units.
pub fn tensor_instance(t: &NnTensor, norm: NormKind) -> Result<Instance> {
    match norm {
        NormKind::Lp => Ok(Instance { target: t.to_matrix(), oracle: AtomOracle::basis_atoms(t.n(), t.d())? }),
        NormKind::Schatten => {
            Ok(Instance { target: diag_correspondence(t)?, oracle: AtomOracle::diagonal_basis_atoms(t.n(), t.d())? })
        }
    }
}

/// The instance for `sample` at dimension `d`; seeded by `seed + sample`.
pub fn build_instance(cfg: &ExperimentConfig, d: usize, sample: usize) -> Result<Instance> {
    let seed = sample_seed(cfg.seed, sample);
    let t = match cfg.instance {
        InstanceKind::Random => build_random_instance(cfg.n, d, seed)?,
        InstanceKind::Rank1 => build_rank1_instance(d, seed)?,
        InstanceKind::Euclid => build_euclid_instance(d)?,
        InstanceKind::Slack => build_slack_instance(d)?,
        InstanceKind::CustomFile => load_custom_instance(cfg.path.as_deref().expect("validated"), cfg.n, d)?,
        InstanceKind::Separable => {
            let count = cfg.atoms.unwrap_or(4 * d.pow(cfg.n as u32 + 1));
            let (target, oracle) = build_separable_instance(cfg.n, d, cfg.p, count, seed)?;
            return Ok(Instance { target, oracle });
        }
    };
    tensor_instance(&t, cfg.norm)
}

pub fn sample_seed(seed: u64, sample: usize) -> u64 {
    seed.wrapping_add(sample as u64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleStatus {
    Ok,
    Infeasible,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub sample: usize,
    pub seed: u64,
    pub status: SampleStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub steps: u64,
    pub final_error: Option<f64>,
    /// Relative to the output directory.
    pub trace_file: String,
}

/// Mean and population standard deviation over the samples that reached `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub k: u64,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
    pub envelope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub d: usize,
    pub method: Method,
    pub diameter: f64,
    pub samples: Vec<SampleOutcome>,
    pub rows: Vec<AggregateRow>,
    #[serde(skip)]
    pub traces: Vec<Option<RunTrace>>,
}

impl SeriesReport {
    pub fn subdir(&self) -> String {
        format!("d{}_{}", self.d, self.method)
    }

    pub fn row(&self, k: u64) -> Option<&AggregateRow> {
        self.rows.get(k.checked_sub(1)? as usize).filter(|r| r.k == k)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rng: String,
    pub series: Vec<SeriesReport>,
}

impl ExperimentReport {
    pub fn all_infeasible(&self) -> bool {
        self.series.iter().flat_map(|s| &s.samples).all(|o| o.status != SampleStatus::Ok)
    }

    pub fn series_for(&self, d: usize, method: Method) -> Option<&SeriesReport> {
        self.series.iter().find(|s| s.d == d && s.method == method)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `d{d}_{method}/trace_{sample}.csv`, `report.json` and `plot.svg`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for s in &self.series {
            let sub = dir.join(s.subdir());
            fs::create_dir_all(&sub)?;
            for (o, t) in s.samples.iter().zip(&s.traces) {
                if let Some(t) = t {
                    fs::write(dir.join(&o.trace_file), t.to_csv())?;
                }
            }
        }
        fs::write(dir.join("report.json"), self.to_json()?)?;
        if self.series.iter().any(|s| s.rows.iter().any(|r| r.mean > 0.0)) {
            emit_svg(self, &dir.join("plot.svg"))?;
        }
        Ok(())
    }
}

pub(crate) fn aggregate(traces: &[Option<RunTrace>], diameter: f64, p: f64, norm: NormKind) -> Result<Vec<AggregateRow>> {
    let len = traces.iter().flatten().map(|t| t.records.len()).max().unwrap_or(0);
    let mut rows = Vec::with_capacity(len);
    for i in 0..len {
        let errs: Vec<f64> = traces.iter().flatten().filter_map(|t| t.records.get(i)).map(|r| r.error).collect();
        let count = errs.len();
        let mean = errs.iter().sum::<f64>() / count as f64;
        let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / count as f64;
        let k = i as u64 + 1;
        rows.push(AggregateRow { k, mean, std: var.sqrt(), count, envelope: error_bound(k, diameter, p, norm)? });
    }
    Ok(rows)
}

/// Runs every configured `(d, method)` pair over `samples` seeded instances.
/// Solver failures are recorded per sample; instance construction errors
/// are returned.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut series = Vec::new();
    for d in cfg.dims() {
        let instances = par::map_indexed(cfg.samples, |s| build_instance(cfg, d, s)).into_iter().collect::<Result<Vec<_>>>()?;
        for method in cfg.methods() {
            series.push(run_series(cfg, d, method, &instances)?);
        }
    }
    Ok(ExperimentReport { config: cfg.clone(), rng: "ChaCha8, per-sample seed = seed + sample".into(), series })
}

/// One `(d, method)` series over prebuilt instances, sample `s` seeded by
/// `seed + s`. The envelope uses the diameter of the first oracle.
pub fn run_series(cfg: &ExperimentConfig, d: usize, method: Method, instances: &[Instance]) -> Result<SeriesReport> {
    let first = instances.first().ok_or_else(|| Error::Config("no instances to run".into()))?;
    let diameter = first.oracle.diameter(cfg.p, cfg.norm)?;
    let solver = SolverConfig { p: cfg.p, norm: cfg.norm, method, stop: cfg.stop_rule(), seed: cfg.seed };
    let runs: Vec<(SampleOutcome, Option<RunTrace>)> = par::map_indexed(instances.len(), |s| {
        let seed = sample_seed(cfg.seed, s);
        let inst = &instances[s];
        match approx_caratheodory(&inst.target, &inst.oracle, &SolverConfig { seed, ..solver }) {
            Ok(out) => {
                let o = SampleOutcome {
                    sample: s,
                    seed,
                    status: SampleStatus::Ok,
                    message: None,
                    steps: out.trace.steps(),
                    final_error: out.trace.final_error(),
                    trace_file: format!("d{d}_{method}/trace_{s}.csv"),
                };
                (o, Some(out.trace))
            }
            Err(e) => {
                let status = if matches!(e, Error::Infeasible { .. }) { SampleStatus::Infeasible } else { SampleStatus::Failed };
                log::warn!("d = {d}, {method}, sample {s}: {e}");
                let o = SampleOutcome {
                    sample: s,
                    seed,
                    status,
                    message: Some(e.to_string()),
                    steps: 0,
                    final_error: None,
                    trace_file: String::new(),
                };
                (o, None)
            }
        }
    });
    let (samples, traces): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    let rows = aggregate(&traces, diameter, cfg.p, cfg.norm)?;
    Ok(SeriesReport { d, method, diameter, samples, rows, traces })
}
