//! Linear nonhomogeneous system `L_{a_m,b_m} u_m = f_m`, solved by symbol
//! division.
//!
//! Two bins are not divided: the zero bin, where the symbol's logarithm is
//! singular (its continuum limit `f^(0) / lambda(0)` is 0), and the Nyquist
//! bin, whose single coefficient cannot carry the complex symbol value of a
//! real field. Both are set to 0.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{
    forward_transform, inverse_transform_with_residue, RealField, SpectralField, VectorField,
};
use crate::model::Problem;
use crate::symbol::SymbolParams;

/// Relative imaginary residue tolerated after the inverse transform of a solve.
pub const REALNESS_TOL: f64 = 1e-10;

/// Relative zero-bin content accepted by [`apply_operator`].
pub const ZERO_MODE_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct LinearSolution {
    pub u0: VectorField,
    /// `|f^_m(0)|`: the equation mismatch left in the unrepresented zero bin.
    pub zero_mode_defect: Vec<f64>,
    pub spectra: Vec<SpectralField>,
}

impl LinearSolution {
    pub fn norm(&self) -> f64 {
        self.u0.l2_norm()
    }
}

/// `rhs / lambda` on every resolved bin.
pub(crate) fn divide_by_symbol(symbol: &SymbolParams, rhs: &SpectralField) -> SpectralField {
    let grid = rhs.grid();
    let nyq = grid.nyquist_index();
    let mut out = SpectralField::zeros(grid);
    for (i, (o, r)) in out.coeffs_mut().iter_mut().zip(rhs.coeffs()).enumerate() {
        if i != 0 && i != nyq {
            *o = r / symbol.eval(grid.frequency(i));
        }
    }
    out
}

/// `lambda * u^` on every resolved bin.
pub(crate) fn multiply_by_symbol(symbol: &SymbolParams, u: &SpectralField) -> SpectralField {
    let grid = u.grid();
    let nyq = grid.nyquist_index();
    let mut out = SpectralField::zeros(grid);
    for (i, (o, c)) in out.coeffs_mut().iter_mut().zip(u.coeffs()).enumerate() {
        if i != 0 && i != nyq {
            *o = c * symbol.eval(grid.frequency(i));
        }
    }
    out
}

pub(crate) fn to_real(spec: &SpectralField, what: &str) -> RealField {
    let (field, residue) = inverse_transform_with_residue(spec);
    if residue > REALNESS_TOL {
        log::warn!("{what}: imaginary residue {residue:.3e} after inverse transform");
    }
    field
}

pub fn solve_linear(problem: &Problem) -> Result<LinearSolution> {
    if problem.sources().is_zero() {
        log::warn!("all sources vanish; the linear solution is identically zero");
    }
    let mut components = Vec::with_capacity(problem.len());
    let mut spectra = Vec::with_capacity(problem.len());
    let mut defects = Vec::with_capacity(problem.len());
    for (symbol, fh) in problem.symbols().iter().zip(problem.source_hats()) {
        let uh = divide_by_symbol(symbol, fh);
        components.push(to_real(&uh, "linear solve"));
        defects.push(fh.zero_mode().norm());
        spectra.push(uh);
    }
    Ok(LinearSolution {
        u0: VectorField::new(components)?,
        zero_mode_defect: defects,
        spectra,
    })
}

pub(crate) fn zero_mode_ratio(uh: &SpectralField) -> f64 {
    let scale = uh.max_abs();
    if scale == 0.0 {
        0.0
    } else {
        uh.zero_mode().norm() / scale
    }
}

/// Apply `L_{a_m,b_m}` to one component.
pub fn apply_operator(problem: &Problem, m: usize, u: &RealField) -> Result<RealField> {
    crate::grid::check_same_grid(problem.grid(), u.grid())?;
    let symbol = problem.symbols().get(m).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "component index {m} out of range for N = {}",
            problem.len()
        ))
    })?;
    let uh = forward_transform(u);
    let ratio = zero_mode_ratio(&uh);
    if ratio > ZERO_MODE_TOL {
        return Err(Error::ZeroModeNotRepresentable {
            component: m + 1,
            relative: ratio,
        });
    }
    Ok(to_real(
        &multiply_by_symbol(symbol, &uh),
        "operator application",
    ))
}

/// Largest `|lambda u^ - f^| / max |f^|` over resolved bins.
pub fn symbol_equation_defect(
    symbol: &SymbolParams,
    uh: &SpectralField,
    fh: &SpectralField,
) -> f64 {
    let grid = uh.grid();
    let nyq = grid.nyquist_index();
    let scale = fh.max_abs().max(f64::MIN_POSITIVE);
    (0..grid.len())
        .filter(|&i| i != 0 && i != nyq)
        .map(|i| {
            let lhs: Complex64 = uh.coeffs()[i] * symbol.eval(grid.frequency(i));
            (lhs - fh.coeffs()[i]).norm()
        })
        .fold(0.0, f64::max)
        / scale
}
