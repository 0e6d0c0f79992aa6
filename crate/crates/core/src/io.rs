//! Problem files (TOML) and CSV/manifest output.
//!
//! ```toml
//! [grid]
//! L = 80.0
//! n = 4096
//!
//! [system]
//! N = 1
//! rho = 1.0
//!
//! [component.1]
//! a = 0.0
//! b = 1.0
//! epsilon = 0.05
//! kernel = { kind = "gaussian", width = 1.0, amplitude = 1.0 }
//! source = { kind = "gaussian", center = 0.0, width = 1.0, amplitude = 1.0 }
//! nonlinearity = { kind = "tanh-linear", alpha = 0.5, w = [1.0] }
//!
//! [solver]
//! tol = 1e-12
//! max_iter = 200
//! seed = 7
//!
//! [sweep]
//! threshold_fractions = [1.0, 0.5, 0.25, 0.125]
//!
//! [continuity]
//! alpha_offsets = [0.05, 0.01]
//! ```
//!
//! Unknown keys anywhere are errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fixed_point::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::model::{
    ComponentSpec, Family, GridParams, KernelShape, KernelSpec, NonlinearTerm, NonlinearitySpec,
    ProblemSpec, SourceSpec,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    #[serde(rename = "L")]
    length: f64,
    n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemSection {
    #[serde(rename = "N")]
    count: usize,
    #[serde(default = "default_rho")]
    rho: f64,
}

fn default_rho() -> f64 {
    1.0
}

fn default_amplitude() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum KernelEntry {
    Gaussian {
        width: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    Laplace {
        scale: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    #[serde(rename = "tophat")]
    TopHat {
        half_width: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    Samples {
        values: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum SourceEntry {
    Gaussian {
        center: f64,
        width: f64,
        amplitude: f64,
    },
    DifferenceOfGaussians {
        center: f64,
        width_pos: f64,
        width_neg: f64,
        amplitude: f64,
    },
    Samples {
        values: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum NonlinearityEntry {
    TanhLinear { alpha: f64, w: Vec<f64> },
    Sine { alpha: f64, w: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentSection {
    a: f64,
    b: f64,
    epsilon: f64,
    kernel: KernelEntry,
    source: SourceEntry,
    nonlinearity: NonlinearityEntry,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            seed: 0,
        }
    }
}

/// Sweep points, either absolute or as fractions of the admissibility
/// threshold. Exactly one of the two lists must be given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSettings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_fractions: Option<Vec<f64>>,
}

/// Each offset `delta` compares the file's nonlinearity with a copy whose
/// amplitudes are `alpha_m - delta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuitySettings {
    pub alpha_offsets: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileLayout {
    grid: GridSection,
    system: SystemSection,
    component: BTreeMap<String, ComponentSection>,
    #[serde(default)]
    solver: SolverSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep: Option<SweepSettings>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    continuity: Option<ContinuitySettings>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub spec: ProblemSpec,
    pub solver: SolverSettings,
    pub sweep: Option<SweepSettings>,
    pub continuity: Option<ContinuitySettings>,
}

pub fn parse_problem(path: impl AsRef<Path>) -> Result<ProblemFile> {
    parse_problem_str(&fs::read_to_string(path)?)
}

pub fn parse_problem_str(text: &str) -> Result<ProblemFile> {
    let layout: FileLayout = toml::from_str(text)?;
    let mut errors = Vec::new();
    let count = layout.system.count;
    let mut components = Vec::with_capacity(count);
    let mut terms = Vec::with_capacity(count);

    for key in layout.component.keys() {
        match key.parse::<usize>() {
            Ok(m) if (1..=count).contains(&m) => {}
            _ => errors.push(format!(
                "unknown component block [component.{key}]; expected indices 1..={count}"
            )),
        }
    }
    for m in 1..=count {
        let Some(c) = layout.component.get(&m.to_string()) else {
            errors.push(format!("missing block [component.{m}]"));
            continue;
        };
        let kernel = match &c.kernel {
            KernelEntry::Gaussian { width, amplitude } => KernelSpec::gaussian(*width, *amplitude),
            KernelEntry::Laplace { scale, amplitude } => KernelSpec::laplace(*scale, *amplitude),
            KernelEntry::TopHat {
                half_width,
                amplitude,
            } => KernelSpec::top_hat(*half_width, *amplitude),
            KernelEntry::Samples { values } => KernelSpec::samples(values.clone()),
        };
        let source = match &c.source {
            SourceEntry::Gaussian {
                center,
                width,
                amplitude,
            } => SourceSpec::gaussian(*center, *width, *amplitude),
            SourceEntry::DifferenceOfGaussians {
                center,
                width_pos,
                width_neg,
                amplitude,
            } => SourceSpec::DifferenceOfGaussians {
                center: *center,
                width_pos: *width_pos,
                width_neg: *width_neg,
                amplitude: *amplitude,
            },
            SourceEntry::Samples { values } => SourceSpec::Samples(values.clone()),
        };
        terms.push(match &c.nonlinearity {
            NonlinearityEntry::TanhLinear { alpha, w } => {
                NonlinearTerm::tanh_linear(*alpha, w.clone())
            }
            NonlinearityEntry::Sine { alpha, w } => NonlinearTerm::sine(*alpha, w.clone()),
        });
        components.push(ComponentSpec {
            a: c.a,
            b: c.b,
            epsilon: c.epsilon,
            kernel,
            source,
        });
    }

    let spec = ProblemSpec {
        grid: GridParams {
            length: layout.grid.length,
            n: layout.grid.n,
        },
        rho: layout.system.rho,
        components,
        nonlinearity: NonlinearitySpec::new(terms),
    };
    if errors.is_empty() {
        errors.extend(spec.validation_errors());
    }

    let s = &layout.solver;
    if !(s.tol > 0.0) {
        errors.push(format!("solver: tol must be positive, got {}", s.tol));
    }
    if s.max_iter == 0 {
        errors.push("solver: max_iter must be at least 1".into());
    }
    if let Some(sweep) = &layout.sweep {
        match (&sweep.eps, &sweep.threshold_fractions) {
            (Some(_), Some(_)) | (None, None) => {
                errors.push("sweep: give exactly one of `eps` or `threshold_fractions`".into())
            }
            (Some(v), None) | (None, Some(v)) if v.is_empty() => {
                errors.push("sweep: the list of values is empty".into())
            }
            _ => {}
        }
    }
    if let Some(c) = &layout.continuity {
        if c.alpha_offsets.is_empty() {
            errors.push("continuity: alpha_offsets is empty".into());
        }
    }

    if !errors.is_empty() {
        return Err(Error::InvalidProblem(errors));
    }
    Ok(ProblemFile {
        spec,
        solver: layout.solver,
        sweep: layout.sweep,
        continuity: layout.continuity,
    })
}

/// Serialize back to the problem-file format.
pub fn to_toml_string(file: &ProblemFile) -> Result<String> {
    let spec = &file.spec;
    let component = spec
        .components
        .iter()
        .zip(&spec.nonlinearity.terms)
        .enumerate()
        .map(|(m, (c, t))| {
            let kernel = match &c.kernel.shape {
                KernelShape::Gaussian { width } => KernelEntry::Gaussian {
                    width: *width,
                    amplitude: c.kernel.amplitude,
                },
                KernelShape::Laplace { scale } => KernelEntry::Laplace {
                    scale: *scale,
                    amplitude: c.kernel.amplitude,
                },
                KernelShape::TopHat { half_width } => KernelEntry::TopHat {
                    half_width: *half_width,
                    amplitude: c.kernel.amplitude,
                },
                KernelShape::Samples(v) => KernelEntry::Samples {
                    values: v.iter().map(|s| s * c.kernel.amplitude).collect(),
                },
            };
            let source = match &c.source {
                SourceSpec::Gaussian {
                    center,
                    width,
                    amplitude,
                } => SourceEntry::Gaussian {
                    center: *center,
                    width: *width,
                    amplitude: *amplitude,
                },
                SourceSpec::DifferenceOfGaussians {
                    center,
                    width_pos,
                    width_neg,
                    amplitude,
                } => SourceEntry::DifferenceOfGaussians {
                    center: *center,
                    width_pos: *width_pos,
                    width_neg: *width_neg,
                    amplitude: *amplitude,
                },
                SourceSpec::Samples(v) => SourceEntry::Samples { values: v.clone() },
            };
            let nonlinearity = match t.family {
                Family::TanhLinear => NonlinearityEntry::TanhLinear {
                    alpha: t.alpha,
                    w: t.w.clone(),
                },
                Family::Sine => NonlinearityEntry::Sine {
                    alpha: t.alpha,
                    w: t.w.clone(),
                },
            };
            (
                (m + 1).to_string(),
                ComponentSection {
                    a: c.a,
                    b: c.b,
                    epsilon: c.epsilon,
                    kernel,
                    source,
                    nonlinearity,
                },
            )
        })
        .collect();
    let layout = FileLayout {
        grid: GridSection {
            length: spec.grid.length,
            n: spec.grid.n,
        },
        system: SystemSection {
            count: spec.len(),
            rho: spec.rho,
        },
        component,
        solver: file.solver.clone(),
        sweep: file.sweep.clone(),
        continuity: file.continuity.clone(),
    };
    toml::to_string(&layout).map_err(|e| Error::InvalidArgument(e.to_string()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// 17 significant digits: enough to round-trip any f64.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Comma-separated, header row, LF line endings.
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&v| format_f64(v)).collect());
    }

    pub fn push_fields(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_to(&self, out: impl Write) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(fs::File::create(path)?)
    }
}
