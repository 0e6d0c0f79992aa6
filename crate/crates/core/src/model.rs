//! Problem instances: coefficients, kernels, sources, nonlinearity, and the
//! scalar constants of the contraction argument.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{forward_transform, l1_norm, Grid, RealField, SpectralField, VectorField};
use crate::symbol::{system_lower_bound, SymbolParams};

#[derive(Clone, Debug, PartialEq)]
pub enum KernelShape {
    /// Unit-mass Gaussian of standard deviation `width`.
    Gaussian { width: f64 },
    /// Unit-mass `(1 / 2 scale) exp(-|x| / scale)`.
    Laplace { scale: f64 },
    /// Unit-mass box on `[-half_width, half_width]`.
    TopHat { half_width: f64 },
    /// Raw node values; not rescaled.
    Samples(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    pub shape: KernelShape,
    pub amplitude: f64,
}

impl KernelSpec {
    pub fn gaussian(width: f64, amplitude: f64) -> Self {
        Self {
            shape: KernelShape::Gaussian { width },
            amplitude,
        }
    }

    pub fn laplace(scale: f64, amplitude: f64) -> Self {
        Self {
            shape: KernelShape::Laplace { scale },
            amplitude,
        }
    }

    pub fn top_hat(half_width: f64, amplitude: f64) -> Self {
        Self {
            shape: KernelShape::TopHat { half_width },
            amplitude,
        }
    }

    pub fn samples(values: Vec<f64>) -> Self {
        Self {
            shape: KernelShape::Samples(values),
            amplitude: 1.0,
        }
    }

    /// Continuum L1 norm, when it has a closed form.
    pub fn closed_form_l1(&self) -> Option<f64> {
        match self.shape {
            KernelShape::Samples(_) => None,
            _ => Some(self.amplitude.abs()),
        }
    }

    /// Grid values. Smooth profiles are point-sampled; kinked ones (Laplace,
    /// top-hat) are cell-averaged over `[x - h/2, x + h/2]` so that the grid
    /// mass equals the continuum mass.
    pub fn discretize(&self, grid: &Grid) -> Result<RealField> {
        let amp = self.amplitude;
        let h = grid.spacing();
        match &self.shape {
            KernelShape::Gaussian { width } => {
                let s = *width;
                Ok(grid.sample(|x| amp * (-x * x / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt())))
            }
            KernelShape::Laplace { scale } => {
                let tau = *scale;
                // antiderivative of (1/2 tau) e^{-|y|/tau}, centred at 0
                let anti = move |y: f64| 0.5 * y.signum() * (-(-y.abs() / tau).exp_m1());
                Ok(grid.sample(|x| amp * (anti(x + 0.5 * h) - anti(x - 0.5 * h)) / h))
            }
            KernelShape::TopHat { half_width } => {
                let w = *half_width;
                Ok(grid.sample(|x| {
                    let overlap = ((x + 0.5 * h).min(w) - (x - 0.5 * h).max(-w)).max(0.0);
                    amp * overlap / (2.0 * w * h)
                }))
            }
            KernelShape::Samples(v) => RealField::new(grid, v.iter().map(|s| amp * s).collect()),
        }
    }

    fn validate(&self, label: &str, n: usize, errors: &mut Vec<String>) {
        if !self.amplitude.is_finite() {
            errors.push(format!("{label}: kernel amplitude must be finite"));
        }
        let positive = |name: &str, v: f64, errors: &mut Vec<String>| {
            if !(v.is_finite() && v > 0.0) {
                errors.push(format!("{label}: kernel {name} must be positive, got {v}"));
            }
        };
        match &self.shape {
            KernelShape::Gaussian { width } => positive("width", *width, errors),
            KernelShape::Laplace { scale } => positive("scale", *scale, errors),
            KernelShape::TopHat { half_width } => positive("half_width", *half_width, errors),
            KernelShape::Samples(v) => {
                if v.len() != n {
                    errors.push(format!(
                        "{label}: sampled kernel has {} values, grid has {n} nodes",
                        v.len()
                    ));
                }
                if v.iter().any(|s| !s.is_finite()) {
                    errors.push(format!(
                        "{label}: sampled kernel must be absolutely integrable (finite values)"
                    ));
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SourceSpec {
    /// `amplitude * exp(-(x - center)^2 / (2 width^2))`.
    Gaussian {
        center: f64,
        width: f64,
        amplitude: f64,
    },
    /// `amplitude * (N(x; center, width_pos) - N(x; center, width_neg))` with
    /// unit-mass normal densities `N`, so the source has zero mean.
    DifferenceOfGaussians {
        center: f64,
        width_pos: f64,
        width_neg: f64,
        amplitude: f64,
    },
    Samples(Vec<f64>),
}

fn normal_density(x: f64, center: f64, width: f64) -> f64 {
    let d = (x - center) / width;
    (-0.5 * d * d).exp() / (width * (2.0 * PI).sqrt())
}

impl SourceSpec {
    pub fn gaussian(center: f64, width: f64, amplitude: f64) -> Self {
        Self::Gaussian {
            center,
            width,
            amplitude,
        }
    }

    pub fn discretize(&self, grid: &Grid) -> Result<RealField> {
        match self {
            SourceSpec::Gaussian {
                center,
                width,
                amplitude,
            } => Ok(grid.sample(|x| {
                let d = (x - center) / width;
                amplitude * (-0.5 * d * d).exp()
            })),
            SourceSpec::DifferenceOfGaussians {
                center,
                width_pos,
                width_neg,
                amplitude,
            } => Ok(grid.sample(|x| {
                amplitude
                    * (normal_density(x, *center, *width_pos)
                        - normal_density(x, *center, *width_neg))
            })),
            SourceSpec::Samples(v) => RealField::new(grid, v.clone()),
        }
    }

    /// True when the source is identically zero by construction.
    pub fn is_trivial(&self) -> bool {
        match self {
            SourceSpec::Gaussian { amplitude, .. } => *amplitude == 0.0,
            SourceSpec::DifferenceOfGaussians {
                width_pos,
                width_neg,
                amplitude,
                ..
            } => *amplitude == 0.0 || width_pos == width_neg,
            SourceSpec::Samples(v) => v.iter().all(|&s| s == 0.0),
        }
    }

    fn validate(&self, label: &str, n: usize, errors: &mut Vec<String>) {
        let finite = |name: &str, v: f64, errors: &mut Vec<String>| {
            if !v.is_finite() {
                errors.push(format!("{label}: source {name} must be finite"));
            }
        };
        let positive = |name: &str, v: f64, errors: &mut Vec<String>| {
            if !(v.is_finite() && v > 0.0) {
                errors.push(format!("{label}: source {name} must be positive, got {v}"));
            }
        };
        match self {
            SourceSpec::Gaussian {
                center,
                width,
                amplitude,
            } => {
                finite("center", *center, errors);
                finite("amplitude", *amplitude, errors);
                positive("width", *width, errors);
            }
            SourceSpec::DifferenceOfGaussians {
                center,
                width_pos,
                width_neg,
                amplitude,
            } => {
                finite("center", *center, errors);
                finite("amplitude", *amplitude, errors);
                positive("width_pos", *width_pos, errors);
                positive("width_neg", *width_neg, errors);
            }
            SourceSpec::Samples(v) => {
                if v.len() != n {
                    errors.push(format!(
                        "{label}: sampled source has {} values, grid has {n} nodes",
                        v.len()
                    ));
                }
                if v.iter().any(|s| !s.is_finite()) {
                    errors.push(format!("{label}: sampled source must be finite"));
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `g(z) = alpha * tanh(w . z)`
    TanhLinear,
    /// `g(z) = alpha * sin(w . z)`
    Sine,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::TanhLinear => "tanh-linear",
            Family::Sine => "sine",
        }
    }
}

/// One scalar map `g_m : R^N -> R`.
#[derive(Clone, Debug, PartialEq)]
pub struct NonlinearTerm {
    pub family: Family,
    pub alpha: f64,
    pub w: Vec<f64>,
}

impl NonlinearTerm {
    pub fn tanh_linear(alpha: f64, w: Vec<f64>) -> Self {
        Self {
            family: Family::TanhLinear,
            alpha,
            w,
        }
    }

    pub fn sine(alpha: f64, w: Vec<f64>) -> Self {
        Self {
            family: Family::Sine,
            alpha,
            w,
        }
    }

    fn w_length(&self) -> f64 {
        self.w.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `sup_z |grad g_m(z)| = |alpha| |w|`, attained at `w . z = 0`.
    pub fn gradient_bound(&self) -> f64 {
        self.alpha.abs() * self.w_length()
    }

    fn dot(&self, z: &[f64]) -> f64 {
        self.w.iter().zip(z).map(|(w, z)| w * z).sum()
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        let s = self.dot(z);
        match self.family {
            Family::TanhLinear => self.alpha * s.tanh(),
            Family::Sine => self.alpha * s.sin(),
        }
    }

    pub fn gradient(&self, z: &[f64]) -> Vec<f64> {
        let s = self.dot(z);
        let d = match self.family {
            Family::TanhLinear => {
                let c = s.cosh();
                1.0 / (c * c)
            }
            Family::Sine => s.cos(),
        };
        self.w.iter().map(|w| self.alpha * d * w).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.alpha == 0.0 || self.w.iter().all(|&w| w == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonlinearitySpec {
    pub terms: Vec<NonlinearTerm>,
}

impl NonlinearitySpec {
    pub fn new(terms: Vec<NonlinearTerm>) -> Self {
        Self { terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.terms.iter().all(NonlinearTerm::is_trivial)
    }

    pub fn eval(&self, z: &[f64]) -> Vec<f64> {
        self.terms.iter().map(|t| t.eval(z)).collect()
    }

    /// Same nonlinearity with every `alpha_m` shifted by `-delta`.
    pub fn with_alpha_offset(&self, delta: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| NonlinearTerm {
                    alpha: t.alpha - delta,
                    ..t.clone()
                })
                .collect(),
        }
    }
}

/// `M = sum_m sup_z |grad g_m(z)|`.
pub fn gradient_bound(nl: &NonlinearitySpec) -> f64 {
    nl.terms.iter().map(NonlinearTerm::gradient_bound).sum()
}

/// `G_m(x) = g_m(u(x))` at every node.
#[allow(clippy::needless_range_loop)]
pub fn eval_nonlinearity(nl: &NonlinearitySpec, u: &VectorField) -> Result<VectorField> {
    if nl.len() != u.len() {
        return Err(Error::ComponentMismatch {
            expected: nl.len(),
            got: u.len(),
        });
    }
    let grid = u.grid();
    let n = grid.len();
    let mut out = vec![vec![0.0; n]; nl.len()];
    let mut z = vec![0.0; u.len()];
    for j in 0..n {
        for (zm, c) in z.iter_mut().zip(u.components()) {
            *zm = c.samples()[j];
        }
        for (m, term) in nl.terms.iter().enumerate() {
            out[m][j] = term.eval(&z);
        }
    }
    VectorField::new(
        out.into_iter()
            .map(|s| RealField::new(grid, s))
            .collect::<Result<Vec<_>>>()?,
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentSpec {
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
    pub kernel: KernelSpec,
    pub source: SourceSpec,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridParams {
    pub length: f64,
    pub n: usize,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            length: 80.0,
            n: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub grid: GridParams,
    pub rho: f64,
    pub components: Vec<ComponentSpec>,
    pub nonlinearity: NonlinearitySpec,
}

impl ProblemSpec {
    /// Build and validate.
    pub fn new(
        grid: GridParams,
        rho: f64,
        components: Vec<ComponentSpec>,
        nonlinearity: NonlinearitySpec,
    ) -> Result<Self> {
        let spec = Self {
            grid,
            rho,
            components,
            nonlinearity,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Check every invariant and report all violations at once.
    pub fn validate(&self) -> Result<()> {
        let errors = self.validation_errors();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidProblem(errors))
        }
    }

    pub fn validation_errors(&self) -> Vec<String> {
        let mut errors = Vec::new();
        let n_comp = self.components.len();
        let nodes = self.grid.n;
        if !(self.grid.length.is_finite() && self.grid.length > 0.0) {
            errors.push(format!(
                "grid: L must be positive, got {}",
                self.grid.length
            ));
        }
        if nodes < crate::grid::MIN_NODES || !nodes.is_multiple_of(2) {
            errors.push(format!("grid: n must be even and at least 8, got {nodes}"));
        }
        if n_comp == 0 {
            errors.push("system: N must be at least 1".into());
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            errors.push(format!(
                "system: rho must lie in (0, 1] (closed ball B_rho), got {}",
                self.rho
            ));
        }
        if self.nonlinearity.len() != n_comp {
            errors.push(format!(
                "nonlinearity: {} terms for {n_comp} components",
                self.nonlinearity.len()
            ));
        }
        for (m, c) in self.components.iter().enumerate() {
            let label = format!("component.{}", m + 1);
            if c.b == 0.0 {
                errors.push(format!(
                    "{label}: b = 0; drift required (L_{{a,b}} needs b != 0 for its Fredholm lower bound)"
                ));
            }
            if !c.a.is_finite() || !c.b.is_finite() {
                errors.push(format!("{label}: a and b must be finite"));
            }
            if !(c.epsilon.is_finite() && c.epsilon >= 0.0) {
                errors.push(format!(
                    "{label}: epsilon must be nonnegative, got {}",
                    c.epsilon
                ));
            }
            c.kernel.validate(&label, nodes, &mut errors);
            c.source.validate(&label, nodes, &mut errors);
        }
        for (m, t) in self.nonlinearity.terms.iter().enumerate() {
            let label = format!("component.{}", m + 1);
            if t.w.len() != n_comp {
                errors.push(format!(
                    "{label}: nonlinearity weight vector w has length {}, expected N = {n_comp}",
                    t.w.len()
                ));
            }
            if !t.alpha.is_finite() || t.w.iter().any(|w| !w.is_finite()) {
                errors.push(format!("{label}: nonlinearity parameters must be finite"));
            }
        }
        if n_comp > 0 && self.components.iter().all(|c| c.kernel_is_zero()) {
            errors.push(
                "all kernels vanish: the aggregate kernel size K^2 = sum ||K_m||_L1^2 must be positive"
                    .into(),
            );
        }
        if n_comp > 0 && self.components.iter().all(|c| c.source.is_trivial()) {
            errors.push(
                "all sources vanish: the sources f_m must not vanish identically for some m".into(),
            );
        }
        if n_comp > 0 && self.nonlinearity.len() == n_comp && self.nonlinearity.is_trivial() {
            errors.push("nonlinearity is trivial: g must be nontrivial with g(0) = 0".into());
        }
        errors
    }

    pub fn symbols(&self) -> Result<Vec<SymbolParams>> {
        self.components
            .iter()
            .map(|c| SymbolParams::new(c.a, c.b))
            .collect()
    }

    pub fn make_grid(&self) -> Result<Grid> {
        Grid::new(self.grid.length, self.grid.n)
    }

    pub fn epsilons(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.epsilon).collect()
    }

    pub fn with_nonlinearity(&self, nonlinearity: NonlinearitySpec) -> Result<Self> {
        Self::new(self.grid, self.rho, self.components.clone(), nonlinearity)
    }

    pub fn with_epsilons(&self, eps: &[f64]) -> Result<Self> {
        if eps.len() != self.len() {
            return Err(Error::ComponentMismatch {
                expected: self.len(),
                got: eps.len(),
            });
        }
        let mut out = self.clone();
        for (c, &e) in out.components.iter_mut().zip(eps) {
            c.epsilon = e;
        }
        out.validate()?;
        Ok(out)
    }

    /// Rescale every `epsilon_m` by one common factor so that the largest one
    /// becomes `target`. With all `epsilon_m = 0` the ratios are undefined and
    /// every component gets `target`.
    pub fn with_epsilon_max(&self, target: f64) -> Result<Self> {
        let current = epsilon_max(self);
        let eps: Vec<f64> = if current > 0.0 {
            self.epsilons()
                .iter()
                .map(|e| {
                    if *e == current {
                        target
                    } else {
                        e * (target / current)
                    }
                })
                .collect()
        } else {
            vec![target; self.len()]
        };
        self.with_epsilons(&eps)
    }
}

impl ComponentSpec {
    fn kernel_is_zero(&self) -> bool {
        self.kernel.amplitude == 0.0
            || matches!(&self.kernel.shape, KernelShape::Samples(v) if v.iter().all(|&s| s == 0.0))
    }
}

/// `epsilon = max_m epsilon_m`.
pub fn epsilon_max(spec: &ProblemSpec) -> f64 {
    spec.components.iter().fold(0.0, |m, c| m.max(c.epsilon))
}

/// `K = sqrt(sum_m ||K_m||_L1^2)` with grid L1 norms of the discretized kernels.
pub fn kernel_aggregate(spec: &ProblemSpec) -> Result<f64> {
    let grid = spec.make_grid()?;
    let norms = spec
        .components
        .iter()
        .map(|c| c.kernel.discretize(&grid).map(|k| l1_norm(&k)))
        .collect::<Result<Vec<_>>>()?;
    aggregate_norms(&norms)
}

fn aggregate_norms(norms: &[f64]) -> Result<f64> {
    let k = norms.iter().map(|v| v * v).sum::<f64>().sqrt();
    if k > 0.0 {
        Ok(k)
    } else {
        Err(Error::DegenerateConstants(
            "aggregate kernel size K is zero".into(),
        ))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionConstants {
    /// Uniform symbol lower bound.
    pub c: f64,
    /// Aggregate kernel size.
    pub kernel: f64,
    /// Summed gradient bound of the nonlinearity.
    pub gradient: f64,
    pub epsilon: f64,
    pub sigma: f64,
    pub threshold: f64,
    pub u0_norm: f64,
    pub rho: f64,
    /// `0 < epsilon <= threshold`.
    pub admissible: bool,
}

impl ContractionConstants {
    pub fn from_parts(
        c: f64,
        kernel: f64,
        gradient: f64,
        epsilon: f64,
        rho: f64,
        u0_norm: f64,
    ) -> Result<Self> {
        if gradient <= 0.0 {
            return Err(Error::DegenerateConstants(
                "gradient bound M is zero (trivial nonlinearity)".into(),
            ));
        }
        if kernel <= 0.0 {
            return Err(Error::DegenerateConstants(
                "aggregate kernel size K is zero".into(),
            ));
        }
        if !(c > 0.0) {
            return Err(Error::DegenerateConstants(
                "symbol lower bound C is not positive".into(),
            ));
        }
        let sigma = epsilon * gradient * kernel / c;
        let threshold = rho * c / (gradient * kernel * (u0_norm + 1.0));
        Ok(Self {
            c,
            kernel,
            gradient,
            epsilon,
            sigma,
            threshold,
            u0_norm,
            rho,
            admissible: epsilon > 0.0 && epsilon <= threshold,
        })
    }

    /// A-priori size bound `epsilon M K (|u0| + 1) / C` of the perturbation.
    pub fn perturbation_bound(&self) -> f64 {
        self.epsilon * self.gradient * self.kernel * (self.u0_norm + 1.0) / self.c
    }
}

pub fn contraction_constants(spec: &ProblemSpec, u0_norm: f64) -> Result<ContractionConstants> {
    if !(u0_norm >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "u0 norm must be nonnegative, got {u0_norm}"
        )));
    }
    let c = system_lower_bound(&spec.symbols()?)?;
    ContractionConstants::from_parts(
        c,
        kernel_aggregate(spec)?,
        gradient_bound(&spec.nonlinearity),
        epsilon_max(spec),
        spec.rho,
        u0_norm,
    )
}

/// A problem laid out on its grid: discretized data plus cached transforms.
#[derive(Clone, Debug)]
pub struct Problem {
    spec: ProblemSpec,
    grid: Grid,
    symbols: Vec<SymbolParams>,
    c: f64,
    kernels: Vec<RealField>,
    kernel_l1: Vec<f64>,
    kernel_hats: Vec<SpectralField>,
    sources: VectorField,
    source_hats: Vec<SpectralField>,
}

impl Problem {
    pub fn new(spec: &ProblemSpec) -> Result<Self> {
        spec.validate()?;
        let grid = spec.make_grid()?;
        let symbols = spec.symbols()?;
        let c = system_lower_bound(&symbols)?;
        let kernels = spec
            .components
            .iter()
            .map(|comp| comp.kernel.discretize(&grid))
            .collect::<Result<Vec<_>>>()?;
        let sources = VectorField::new(
            spec.components
                .iter()
                .map(|comp| comp.source.discretize(&grid))
                .collect::<Result<Vec<_>>>()?,
        )?;
        for (m, k) in kernels.iter().enumerate() {
            let edge = k.edge_magnitude();
            if edge > crate::grid::EDGE_DECAY_TOL {
                log::warn!(
                    "kernel {} has not decayed at the window edge ({edge:.3e}); consider a larger L",
                    m + 1
                );
            }
        }
        for (m, f) in sources.components().iter().enumerate() {
            let edge = f.edge_magnitude();
            if edge > crate::grid::EDGE_DECAY_TOL {
                log::warn!(
                    "source {} has not decayed at the window edge ({edge:.3e}); consider a larger L",
                    m + 1
                );
            }
        }
        Ok(Self {
            kernel_l1: kernels.iter().map(l1_norm).collect(),
            kernel_hats: kernels.iter().map(forward_transform).collect(),
            source_hats: sources.components().iter().map(forward_transform).collect(),
            spec: spec.clone(),
            grid,
            symbols,
            c,
            kernels,
            sources,
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[SymbolParams] {
        &self.symbols
    }

    pub fn symbol_bound(&self) -> f64 {
        self.c
    }

    pub fn kernels(&self) -> &[RealField] {
        &self.kernels
    }

    pub fn kernel_l1_norms(&self) -> &[f64] {
        &self.kernel_l1
    }

    pub fn kernel_hats(&self) -> &[SpectralField] {
        &self.kernel_hats
    }

    pub fn sources(&self) -> &VectorField {
        &self.sources
    }

    pub fn source_hats(&self) -> &[SpectralField] {
        &self.source_hats
    }

    pub fn epsilons(&self) -> Vec<f64> {
        self.spec.epsilons()
    }

    pub fn nonlinearity(&self) -> &NonlinearitySpec {
        &self.spec.nonlinearity
    }

    /// Same discretization with a different nonlinearity.
    pub fn with_nonlinearity(&self, nl: NonlinearitySpec) -> Result<Self> {
        let spec = self.spec.with_nonlinearity(nl)?;
        Ok(Self {
            spec,
            ..self.clone()
        })
    }

    /// Same discretization with different kernel strengths.
    pub fn with_epsilons(&self, eps: &[f64]) -> Result<Self> {
        let spec = self.spec.with_epsilons(eps)?;
        Ok(Self {
            spec,
            ..self.clone()
        })
    }

    pub fn with_epsilon_max(&self, target: f64) -> Result<Self> {
        let spec = self.spec.with_epsilon_max(target)?;
        Ok(Self {
            spec,
            ..self.clone()
        })
    }

    /// Same problem with the source data replaced by raw grid fields. Unlike
    /// [`Problem::new`], an all-zero source is accepted here.
    pub fn with_source_fields(&self, sources: VectorField) -> Result<Self> {
        if sources.len() != self.len() {
            return Err(Error::ComponentMismatch {
                expected: self.len(),
                got: sources.len(),
            });
        }
        crate::grid::check_same_grid(&self.grid, sources.grid())?;
        let mut spec = self.spec.clone();
        for (c, f) in spec.components.iter_mut().zip(sources.components()) {
            c.source = SourceSpec::Samples(f.samples().to_vec());
        }
        Ok(Self {
            spec,
            source_hats: sources.components().iter().map(forward_transform).collect(),
            sources,
            ..self.clone()
        })
    }

    pub fn kernel_aggregate(&self) -> Result<f64> {
        aggregate_norms(&self.kernel_l1)
    }

    pub fn constants(&self, u0_norm: f64) -> Result<ContractionConstants> {
        ContractionConstants::from_parts(
            self.c,
            self.kernel_aggregate()?,
            gradient_bound(&self.spec.nonlinearity),
            epsilon_max(&self.spec),
            self.spec.rho,
            u0_norm,
        )
    }
}
