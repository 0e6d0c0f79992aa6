//! Uniform truncation of the real line and the discrete Fourier convention.
//!
//! The window is `[-L/2, L/2)` with `n` nodes `x_j = -L/2 + j h`, `h = L/n`.
//! The matched frequency lattice is `p_k = 2 pi k / L`, `k` in `[-n/2, n/2)`.
//! Spectral coefficients are stored in FFT order: index `i < n/2` holds
//! `k = i`, index `i >= n/2` holds `k = i - n` (so index `n/2` is the Nyquist
//! bin `k = -n/2`).
//!
//! The transform pair is the rectangle-rule quadrature of the unitary
//! continuous transform:
//!
//! ```text
//! F(p_k)  = h / sqrt(2 pi)  * sum_j f(x_j) exp(-i p_k x_j)
//! f(x_j)  = dp / sqrt(2 pi) * sum_k F(p_k) exp(+i p_k x_j)
//! ```
//!
//! so a convolution picks up the familiar `sqrt(2 pi)` factor:
//! `(k * g)^ = sqrt(2 pi) k^ g^`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Relative imaginary residue above which an inverse transform is rejected.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-8;

/// Magnitude above which a field is considered not to have decayed at the
/// window edge.
pub const EDGE_DECAY_TOL: f64 = 1e-8;

pub const MIN_NODES: usize = 8;

#[derive(Clone)]
pub struct Grid {
    length: f64,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("length", &self.length)
            .field("n", &self.n)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.length == other.length && self.n == other.n
    }
}

impl Grid {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "length must be positive and finite, got {length}"
            )));
        }
        if n < MIN_NODES {
            return Err(Error::InvalidGrid(format!(
                "n too small: need at least {MIN_NODES} nodes, got {n}"
            )));
        }
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("n must be even, got {n}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            length,
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node spacing `h = L / n`.
    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Frequency spacing `dp = 2 pi / L`.
    pub fn frequency_spacing(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn node(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Integer wavenumber `k` stored at FFT index `i`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Frequency `p_k` stored at FFT index `i`.
    pub fn frequency(&self, i: usize) -> f64 {
        self.wavenumber(i) as f64 * self.frequency_spacing()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.frequency(i)).collect()
    }

    /// FFT index of the Nyquist bin `k = -n/2`.
    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    /// FFT index holding `-p` for the bin at index `i`.
    pub fn mirror_index(&self, i: usize) -> usize {
        (self.n - i) % self.n
    }

    /// Point-sample `f` at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField {
            grid: self.clone(),
            samples: (0..self.n).map(|j| f(self.node(j))).collect(),
        }
    }

    pub fn zeros(&self) -> RealField {
        RealField {
            grid: self.clone(),
            samples: vec![0.0; self.n],
        }
    }

    /// Number of nodes at each end that make up the outermost 5% of the window.
    fn edge_width(&self) -> usize {
        (self.n / 20).max(1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    grid: Grid,
    samples: Vec<f64>,
}

impl RealField {
    pub fn new(grid: &Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            samples,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, alpha: f64) -> Self {
        self.map(|v| alpha * v)
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &RealField) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + alpha * b)
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|&v| v == 0.0)
    }

    /// Largest magnitude over the outermost 5% of nodes (n/20 at each end).
    pub fn edge_magnitude(&self) -> f64 {
        let w = self.grid.edge_width();
        let n = self.samples.len();
        self.samples[..w]
            .iter()
            .chain(&self.samples[n - w..])
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sqrt(h * sum f_j^2)`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.spacing() * self.samples.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn zero_mode(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `sqrt(dp * sum |F_k|^2)`, equal to the physical L2 norm by Parseval.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.frequency_spacing() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>())
            .sqrt()
    }

    /// L2 norm restricted to the nonzero bins.
    pub fn l2_norm_nonzero_modes(&self) -> f64 {
        (self.grid.frequency_spacing() * self.coeffs[1..].iter().map(|c| c.norm_sqr()).sum::<f64>())
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest `|F(-p) - conj F(p)|` relative to the largest coefficient.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let worst = (0..self.coeffs.len())
            .map(|i| (self.coeffs[self.grid.mirror_index(i)] - self.coeffs[i].conj()).norm())
            .fold(0.0, f64::max);
        worst / scale
    }

    /// Evaluate the trigonometric interpolant at an arbitrary point. The
    /// Nyquist bin contributes its even (cosine) part only.
    pub fn evaluate_at(&self, x: f64) -> f64 {
        let g = &self.grid;
        let nyq = g.nyquist_index();
        let mut acc = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let p = g.frequency(i);
            if i == nyq {
                acc += c.re * (p * x).cos();
            } else {
                acc += (c * Complex64::from_polar(1.0, p * x)).re;
            }
        }
        acc * g.frequency_spacing() / (2.0 * PI).sqrt()
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|c| c * alpha).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    components: Vec<RealField>,
}

impl VectorField {
    pub fn new(components: Vec<RealField>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidArgument(
                "a vector field needs at least one component".into(),
            ));
        };
        for c in &components[1..] {
            check_same_grid(first.grid(), c.grid())?;
        }
        Ok(Self { components })
    }

    pub fn zeros(grid: &Grid, count: usize) -> Self {
        Self {
            components: (0..count.max(1)).map(|_| grid.zeros()).collect(),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, m: usize) -> &RealField {
        &self.components[m]
    }

    pub fn components(&self) -> &[RealField] {
        &self.components
    }

    pub fn into_components(self) -> Vec<RealField> {
        self.components
    }

    /// The vector `u(x_j)` in R^N.
    pub fn point(&self, j: usize) -> Vec<f64> {
        self.components.iter().map(|c| c.samples[j]).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(RealField::is_zero)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            components: self.components.iter().map(|c| c.scale(alpha)).collect(),
        }
    }

    /// `self + alpha * other`, componentwise.
    pub fn axpy(&self, alpha: f64, other: &VectorField) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::ComponentMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.axpy(alpha, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { components })
    }

    pub fn add(&self, other: &VectorField) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &VectorField) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn l2_norm(&self) -> f64 {
        l2_norm(self)
    }
}

pub(crate) fn check_same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

fn alternating(i: usize) -> f64 {
    if i.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub fn forward_transform(f: &RealField) -> SpectralField {
    let g = f.grid();
    let mut buf: Vec<Complex64> = f.samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    g.forward.process(&mut buf);
    // exp(-i p_k x_0) = exp(i pi k) = (-1)^i in FFT order (n even).
    let scale = g.spacing() / (2.0 * PI).sqrt();
    for (i, c) in buf.iter_mut().enumerate() {
        *c *= scale * alternating(i);
    }
    SpectralField {
        grid: g.clone(),
        coeffs: buf,
    }
}

/// Inverse transform returning the real part together with the relative
/// imaginary residue `|Im| / |whole|` in L2.
pub(crate) fn inverse_transform_with_residue(spec: &SpectralField) -> (RealField, f64) {
    let g = spec.grid();
    let mut buf: Vec<Complex64> = spec
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c * alternating(i))
        .collect();
    g.inverse.process(&mut buf);
    let scale = g.frequency_spacing() / (2.0 * PI).sqrt();
    let mut re_sq = 0.0;
    let mut im_sq = 0.0;
    let samples = buf
        .iter()
        .map(|c| {
            let v = c * scale;
            re_sq += v.re * v.re;
            im_sq += v.im * v.im;
            v.re
        })
        .collect();
    let total = re_sq + im_sq;
    let residue = if total > 0.0 {
        (im_sq / total).sqrt()
    } else {
        0.0
    };
    (
        RealField {
            grid: g.clone(),
            samples,
        },
        residue,
    )
}

pub fn inverse_transform(spec: &SpectralField) -> Result<RealField> {
    let (field, residue) = inverse_transform_with_residue(spec);
    if residue > IMAGINARY_RESIDUE_TOL {
        return Err(Error::NonRealResult { residue });
    }
    Ok(field)
}

/// `||u||^2 = sum_m h sum_j u_m(x_j)^2`.
pub fn l2_norm(u: &VectorField) -> f64 {
    u.components
        .iter()
        .map(|c| {
            let n = c.l2_norm();
            n * n
        })
        .sum::<f64>()
        .sqrt()
}

/// `h sum_j |k(x_j)|`.
pub fn l1_norm(k: &RealField) -> f64 {
    k.grid.spacing() * k.samples.iter().map(|v| v.abs()).sum::<f64>()
}

/// `(k * g)(x) = integral k(x - y) g(y) dy`, evaluated spectrally as
/// `inverse(sqrt(2 pi) k^ g^)`. The result is a periodic convolution on the
/// window; a warning is logged when either factor has not decayed at the edge.
pub fn convolve(k: &RealField, g: &RealField) -> Result<RealField> {
    check_same_grid(k.grid(), g.grid())?;
    for (name, f) in [("kernel", k), ("integrand", g)] {
        let edge = f.edge_magnitude();
        if edge > EDGE_DECAY_TOL {
            log::warn!(
                "convolution {name} reaches {edge:.3e} in the outer 5% of the window; \
                 periodic wrap-around may alias the result"
            );
        }
    }
    let kh = forward_transform(k);
    let gh = forward_transform(g);
    Ok(convolve_spectral(&kh, &gh))
}

/// Convolution with both factors already transformed. Real inputs give a
/// conjugate-symmetric product, so the imaginary residue is discarded.
pub(crate) fn convolve_spectral(kh: &SpectralField, gh: &SpectralField) -> RealField {
    let factor = (2.0 * PI).sqrt();
    let coeffs = kh
        .coeffs
        .iter()
        .zip(&gh.coeffs)
        .map(|(a, b)| a * b * factor)
        .collect();
    let product = SpectralField {
        grid: kh.grid.clone(),
        coeffs,
    };
    inverse_transform_with_residue(&product).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gaussian(s: f64) -> impl Fn(f64) -> f64 {
        move |x| (-x * x / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt())
    }

    #[test]
    fn grid_arithmetic() {
        let g = Grid::new(80.0, 8).unwrap();
        assert_eq!(g.spacing(), 10.0);
        assert_eq!(g.node(0), -40.0);
        assert!((g.frequency_spacing() - 0.0785398).abs() < 1e-7);
        let g = Grid::new(2.0 * PI, 16).unwrap();
        assert_eq!(g.frequency_spacing(), 1.0);
        assert_eq!(g.wavenumber(8), -8);
        assert_eq!(g.wavenumber(7), 7);
        assert_eq!(g.wavenumber(15), -1);
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        let err = Grid::new(1.0, 0).unwrap_err();
        assert!(err.to_string().contains("n too small"));
        assert!(Grid::new(1.0, 9).is_err());
        assert!(Grid::new(0.0, 16).is_err());
        assert!(Grid::new(-3.0, 16).is_err());
        assert!(Grid::new(f64::NAN, 16).is_err());
    }

    #[test]
    fn gaussian_is_self_dual() {
        let g = Grid::new(80.0, 4096).unwrap();
        let f = g.sample(|x| (-x * x / 2.0).exp());
        let fh = forward_transform(&f);
        let err = (0..g.len())
            .map(|i| {
                let p = g.frequency(i);
                (fh.coeffs()[i] - Complex64::new((-p * p / 2.0).exp(), 0.0)).norm()
            })
            .fold(0.0, f64::max);
        assert!(err <= 1e-12, "max error {err:e}");
    }

    #[test]
    fn shift_theorem() {
        let g = Grid::new(80.0, 4096).unwrap();
        let f = g.sample(|x| (-(x - 2.0) * (x - 2.0) / 2.0).exp());
        let fh = forward_transform(&f);
        let err = (0..g.len())
            .map(|i| {
                let p = g.frequency(i);
                let expect = Complex64::from_polar((-p * p / 2.0).exp(), -2.0 * p);
                (fh.coeffs()[i] - expect).norm()
            })
            .fold(0.0, f64::max);
        assert!(err <= 1e-12, "max error {err:e}");
    }

    #[test]
    fn zero_in_zero_out() {
        let g = Grid::new(10.0, 64).unwrap();
        let fh = forward_transform(&g.zeros());
        assert!(fh.coeffs().iter().all(|c| c.norm() == 0.0));
        let f = inverse_transform(&SpectralField::zeros(&g)).unwrap();
        assert!(f.is_zero());
        let c = convolve(&g.sample(gaussian(1.0)), &g.zeros()).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn top_hat_round_trip() {
        let g = Grid::new(80.0, 4096).unwrap();
        let f = g.sample(|x| if x.abs() <= 1.0 { 1.0 } else { 0.0 });
        let back = inverse_transform(&forward_transform(&f)).unwrap();
        let err = back.axpy(-1.0, &f).unwrap().l2_norm() / f.l2_norm();
        assert!(err <= 1e-12, "{err:e}");
    }

    #[test]
    fn non_symmetric_spectrum_is_reported() {
        let g = Grid::new(10.0, 32).unwrap();
        let mut s = SpectralField::zeros(&g);
        s.coeffs_mut()[3] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            inverse_transform(&s),
            Err(Error::NonRealResult { .. })
        ));
    }

    #[test]
    fn gaussian_norms() {
        let g = Grid::new(80.0, 4096).unwrap();
        let v = g.sample(|x| (-x * x / 2.0).exp());
        let u = VectorField::new(vec![v.clone()]).unwrap();
        assert!((l2_norm(&u) - PI.powf(0.25)).abs() < 1e-10);
        let u2 = VectorField::new(vec![v.clone(), v.clone()]).unwrap();
        assert!((l2_norm(&u2) - 2f64.sqrt() * l2_norm(&u)).abs() < 1e-14);
        assert_eq!(l2_norm(&VectorField::zeros(&g, 3)), 0.0);

        assert!((l1_norm(&g.sample(gaussian(1.0))) - 1.0).abs() < 1e-10);
        assert_eq!(l1_norm(&g.zeros()), 0.0);
    }

    #[test]
    fn gaussian_convolution_law() {
        let g = Grid::new(80.0, 4096).unwrap();
        let (s1, s2) = (1.0, 1.5);
        let a = g.sample(gaussian(s1));
        let b = g.sample(gaussian(s2));
        let expect = g.sample(gaussian((s1 * s1 + s2 * s2).sqrt()));
        let got = convolve(&a, &b).unwrap();
        let rel = got.axpy(-1.0, &expect).unwrap().l2_norm() / expect.l2_norm();
        assert!(rel <= 1e-10, "{rel:e}");
        let swapped = convolve(&b, &a).unwrap();
        let diff = swapped.axpy(-1.0, &got).unwrap().max_abs();
        assert!(diff < 1e-15);
    }

    #[test]
    fn box_convolution_matches_direct_quadrature() {
        let g = Grid::new(80.0, 4096).unwrap();
        let boxf = g.sample(|x| if x.abs() <= 0.5 { 1.0 } else { 0.0 });
        let got = convolve(&boxf, &boxf).unwrap();
        // O(n^2) direct trapezoid sum over the same samples.
        let h = g.spacing();
        let n = g.len();
        let s = boxf.samples();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let mut acc = 0.0;
            for l in 0..n {
                // x_j - x_l = (j - l) h sits at node index j - l + n/2.
                let idx = j as isize - l as isize + (n / 2) as isize;
                if idx >= 0 && (idx as usize) < n {
                    acc += s[idx as usize] * s[l];
                }
            }
            worst = worst.max((acc * h - got.samples()[j]).abs());
        }
        assert!(worst <= 1e-6, "{worst:e}");
        // and the continuum triangle up to rectangle-rule resolution
        let tri_err = (0..n)
            .map(|j| (got.samples()[j] - (1.0 - g.node(j).abs()).max(0.0)).abs())
            .fold(0.0, f64::max);
        assert!(tri_err <= 2.0 * h, "{tri_err:e}");
    }

    #[test]
    fn edge_magnitude_sees_undecayed_fields() {
        let g = Grid::new(20.0, 64).unwrap();
        assert!(g.sample(|_| 1.0).edge_magnitude() == 1.0);
        assert!(g.sample(|x| (-x * x).exp()).edge_magnitude() < 1e-8);
    }

    fn random_field(g: &Grid, seed: &[f64]) -> RealField {
        RealField::new(g, seed.to_vec()).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn parseval_and_round_trip(samples in prop::collection::vec(-1.0f64..1.0, 256)) {
            let g = Grid::new(17.0, 256).unwrap();
            let f = random_field(&g, &samples);
            let fh = forward_transform(&f);
            let phys = f.l2_norm();
            prop_assume!(phys > 0.0);
            prop_assert!((fh.l2_norm() - phys).abs() <= 1e-12 * phys);
            prop_assert!(fh.conjugate_symmetry_defect() <= 1e-12);
            let back = inverse_transform(&fh).unwrap();
            let err = back.axpy(-1.0, &f).unwrap().l2_norm();
            prop_assert!(err <= 1e-12 * phys);
        }

        #[test]
        fn transform_is_linear(
            a in prop::collection::vec(-1.0f64..1.0, 64),
            b in prop::collection::vec(-1.0f64..1.0, 64),
            alpha in -3.0f64..3.0,
            beta in -3.0f64..3.0,
        ) {
            let g = Grid::new(5.0, 64).unwrap();
            let (fa, fb) = (random_field(&g, &a), random_field(&g, &b));
            let combo = fa.scale(alpha).axpy(beta, &fb).unwrap();
            let lhs = forward_transform(&combo);
            let ha = forward_transform(&fa);
            let hb = forward_transform(&fb);
            for i in 0..g.len() {
                let rhs = ha.coeffs()[i] * alpha + hb.coeffs()[i] * beta;
                prop_assert!((lhs.coeffs()[i] - rhs).norm() <= 1e-12);
            }
        }

        #[test]
        fn l1_triangle_inequality(
            a in prop::collection::vec(-1.0f64..1.0, 32),
            b in prop::collection::vec(-1.0f64..1.0, 32),
        ) {
            let g = Grid::new(3.0, 32).unwrap();
            let (fa, fb) = (random_field(&g, &a), random_field(&g, &b));
            let sum = fa.axpy(1.0, &fb).unwrap();
            prop_assert!(l1_norm(&sum) <= l1_norm(&fa) + l1_norm(&fb) + 1e-14);
        }
    }
}
