//! The map `T_g`, its Picard iteration, and the certificates around it.
//!
//! For a given `v`, `u = T_g v` solves
//! `L_{a_m,b_m} u_m = epsilon_m (K_m * g_m(u0 + v))`, i.e. in frequency space
//! `u^_m = epsilon_m sqrt(2 pi) K^_m G^_m / lambda_m` with `G_m = g_m(u0 + v)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{
    check_same_grid, forward_transform, Grid, RealField, SpectralField, VectorField,
};
use crate::linear::{
    divide_by_symbol, multiply_by_symbol, solve_linear, to_real, zero_mode_ratio, LinearSolution,
    ZERO_MODE_TOL,
};
use crate::model::{eval_nonlinearity, ContractionConstants, Problem};

/// Slack on the contraction factor absorbing quadrature error.
pub const CONTRACTION_SLACK: f64 = 1.01;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Clone, Debug)]
pub struct ResidualReport {
    /// `|R_m| / reference_scale` over nonzero bins, per component.
    pub component_residuals: Vec<f64>,
    /// `(sum_m |R_m|^2)^{1/2} / reference_scale`.
    pub relative: f64,
    /// `|f^_m(0) + epsilon_m sqrt(2 pi) K^_m(0) G^_m(0)|` per component.
    pub zero_mode_defect: Vec<f64>,
    /// `|f| + |epsilon K * g(u)|`, both over nonzero bins.
    pub reference_scale: f64,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub u0: VectorField,
    pub u_p: VectorField,
    pub u_cumulative: VectorField,
    pub iterations: usize,
    pub converged: bool,
    pub diff_norms: Vec<f64>,
    pub empirical_rates: Vec<f64>,
    pub constants: ContractionConstants,
    pub certified: bool,
    pub residual: ResidualReport,
}

impl SolveReport {
    pub fn sigma(&self) -> f64 {
        self.constants.sigma
    }
}

#[derive(Clone, Debug)]
pub struct ContractionProbeReport {
    pub pairs: usize,
    pub skipped: usize,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub sigma: f64,
    pub seed: u64,
    pub pass: bool,
}

/// Integral term `epsilon_m sqrt(2 pi) K^_m G^_m` for every component.
fn integral_term_hats(problem: &Problem, g: &VectorField) -> Vec<SpectralField> {
    let root = (2.0 * PI).sqrt();
    problem
        .epsilons()
        .iter()
        .zip(problem.kernel_hats())
        .zip(g.components())
        .map(|((&eps, kh), gm)| {
            let gh = forward_transform(gm);
            let coeffs = kh
                .coeffs()
                .iter()
                .zip(gh.coeffs())
                .map(|(k, g)| k * g * (eps * root))
                .collect();
            SpectralField::new(problem.grid(), coeffs).expect("same grid")
        })
        .collect()
}

fn check_vector(problem: &Problem, v: &VectorField) -> Result<()> {
    check_same_grid(problem.grid(), v.grid())?;
    if v.len() != problem.len() {
        return Err(Error::ComponentMismatch {
            expected: problem.len(),
            got: v.len(),
        });
    }
    Ok(())
}

pub fn apply_t(problem: &Problem, u0: &VectorField, v: &VectorField) -> Result<VectorField> {
    check_vector(problem, u0)?;
    check_vector(problem, v)?;
    let g = eval_nonlinearity(problem.nonlinearity(), &u0.add(v)?)?;
    let rhs = integral_term_hats(problem, &g);
    let components = problem
        .symbols()
        .iter()
        .zip(&rhs)
        .map(|(symbol, r)| to_real(&divide_by_symbol(symbol, r), "T_g"))
        .collect();
    VectorField::new(components)
}

pub fn picard_solve(problem: &Problem, tol: f64, max_iter: usize) -> Result<SolveReport> {
    let linear = solve_linear(problem)?;
    let start = VectorField::zeros(problem.grid(), problem.len());
    picard_solve_from(problem, &linear, &start, tol, max_iter)
}

/// Picard iteration `u^{k+1} = T_g(u^k)` from an arbitrary starting point.
pub fn picard_solve_from(
    problem: &Problem,
    linear: &LinearSolution,
    start: &VectorField,
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    check_vector(problem, start)?;
    let u0 = &linear.u0;
    let constants = problem.constants(u0.l2_norm())?;

    let mut current = start.clone();
    let mut diff_norms = Vec::new();
    let mut converged = false;
    while diff_norms.len() < max_iter {
        let next = apply_t(problem, u0, &current)?;
        let d = next.sub(&current)?.l2_norm();
        diff_norms.push(d);
        current = next;
        if d <= tol {
            converged = true;
            break;
        }
        if !d.is_finite() {
            break;
        }
    }
    let empirical_rates: Vec<f64> = diff_norms
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    let rates_ok = empirical_rates
        .iter()
        .all(|&r| r <= constants.sigma * CONTRACTION_SLACK);
    let certified = converged && constants.admissible && rates_ok;
    if !converged {
        log::warn!(
            "Picard iteration stopped after {} steps without reaching tol {tol:e} (last difference {:e})",
            diff_norms.len(),
            diff_norms.last().copied().unwrap_or(f64::NAN)
        );
    }
    let u_cumulative = u0.add(&current)?;
    let residual = residual(problem, &u_cumulative)?;
    Ok(SolveReport {
        u0: u0.clone(),
        iterations: diff_norms.len(),
        u_p: current,
        u_cumulative,
        converged,
        diff_norms,
        empirical_rates,
        constants,
        certified,
        residual,
    })
}

/// Residual of `L u_m = f_m + epsilon_m K_m * g_m(u)` over the nonzero bins.
pub fn residual(problem: &Problem, u: &VectorField) -> Result<ResidualReport> {
    check_vector(problem, u)?;
    let uhs: Vec<SpectralField> = u.components().iter().map(forward_transform).collect();
    for (m, uh) in uhs.iter().enumerate() {
        let ratio = zero_mode_ratio(uh);
        if ratio > ZERO_MODE_TOL {
            return Err(Error::ZeroModeNotRepresentable {
                component: m + 1,
                relative: ratio,
            });
        }
    }
    let g = eval_nonlinearity(problem.nonlinearity(), u)?;
    let integral = integral_term_hats(problem, &g);

    let mut residual_sq = Vec::with_capacity(problem.len());
    let mut zero_mode_defect = Vec::with_capacity(problem.len());
    let (mut f_sq, mut int_sq) = (0.0, 0.0);
    let dp = problem.grid().frequency_spacing();
    for m in 0..problem.len() {
        let lu = multiply_by_symbol(&problem.symbols()[m], &uhs[m]);
        let fh = &problem.source_hats()[m];
        let ih = &integral[m];
        let mut acc = 0.0;
        for i in 1..problem.grid().len() {
            let r: Complex64 = lu.coeffs()[i] - fh.coeffs()[i] - ih.coeffs()[i];
            acc += r.norm_sqr();
        }
        residual_sq.push(acc * dp);
        zero_mode_defect.push((fh.zero_mode() + ih.zero_mode()).norm());
        f_sq += fh.l2_norm_nonzero_modes().powi(2);
        int_sq += ih.l2_norm_nonzero_modes().powi(2);
    }
    let reference_scale = f_sq.sqrt() + int_sq.sqrt();
    if reference_scale == 0.0 {
        return Err(Error::TrivialProblem);
    }
    Ok(ResidualReport {
        component_residuals: residual_sq
            .iter()
            .map(|r| r.sqrt() / reference_scale)
            .collect(),
        relative: residual_sq.iter().sum::<f64>().sqrt() / reference_scale,
        zero_mode_defect,
        reference_scale,
    })
}

/// Zero-mean random real field with smooth spectrum, unit L2 norm.
fn random_unit_component(grid: &Grid, rng: &mut impl Rng) -> RealField {
    let mut spec = SpectralField::zeros(grid);
    let half = grid.len() / 2;
    let decay = 2.0;
    for i in 1..half {
        let p = grid.frequency(i);
        let envelope = (-0.5 * (p / decay).powi(2)).exp();
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * envelope;
        let mirror = grid.mirror_index(i);
        spec.coeffs_mut()[i] = c;
        spec.coeffs_mut()[mirror] = c.conj();
    }
    let field = to_real(&spec, "random field");
    let norm = field.l2_norm();
    if norm > 0.0 {
        field.scale(1.0 / norm)
    } else {
        field
    }
}

/// Random zero-mean vector field of norm exactly `radius`.
pub fn random_field(
    grid: &Grid,
    components: usize,
    radius: f64,
    rng: &mut impl Rng,
) -> VectorField {
    let parts: Vec<RealField> = (0..components)
        .map(|_| random_unit_component(grid, rng).scale(rng.random_range(0.1..1.0)))
        .collect();
    let v = VectorField::new(parts).expect("shared grid");
    let norm = v.l2_norm();
    v.scale(radius / norm)
}

/// Random point of the closed ball `B_rho` (radius uniform in `(0, rho]`).
pub fn random_ball_point(
    grid: &Grid,
    components: usize,
    rho: f64,
    rng: &mut impl Rng,
) -> VectorField {
    let r = rho * (1.0 - rng.random::<f64>());
    random_field(grid, components, r, rng)
}

/// Largest `|T v1 - T v2| / |v1 - v2|` over the given pairs; identical pairs
/// are skipped.
pub fn probe_pairs(
    problem: &Problem,
    u0: &VectorField,
    pairs: &[(VectorField, VectorField)],
) -> Result<(Vec<f64>, usize)> {
    let mut ratios = Vec::with_capacity(pairs.len());
    let mut skipped = 0;
    for (v1, v2) in pairs {
        let dv = v1.sub(v2)?.l2_norm();
        if dv == 0.0 {
            skipped += 1;
            continue;
        }
        let du = apply_t(problem, u0, v1)?
            .sub(&apply_t(problem, u0, v2)?)?
            .l2_norm();
        ratios.push(du / dv);
    }
    Ok((ratios, skipped))
}

pub fn verify_contraction(
    problem: &Problem,
    u0: &VectorField,
    pairs: usize,
    seed: u64,
) -> Result<ContractionProbeReport> {
    if pairs == 0 {
        return Err(Error::InvalidArgument("need at least one pair".into()));
    }
    let constants = problem.constants(u0.l2_norm())?;
    let rho = problem.spec().rho;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<(VectorField, VectorField)> = (0..pairs)
        .map(|_| {
            let v1 = random_ball_point(problem.grid(), problem.len(), rho, &mut rng);
            let v2 = random_ball_point(problem.grid(), problem.len(), rho, &mut rng);
            (v1, v2)
        })
        .collect();
    let (ratios, skipped) = probe_pairs(problem, u0, &samples)?;
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(ContractionProbeReport {
        pairs: ratios.len(),
        skipped,
        max_ratio,
        sigma: constants.sigma,
        seed,
        pass: max_ratio <= constants.sigma * CONTRACTION_SLACK,
        ratios,
    })
}
