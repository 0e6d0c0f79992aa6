//! Fourier symbol of `L_{a,b} = (1/2) ln(-d^2/dx^2) - b d/dx - a` and its
//! uniform lower bound.
//!
//! Under the unitary transform `d/dx -> i p`, the symbol is
//! `lambda(p) = ln(|p| / e^a) - i b p`. Its modulus is bounded below by a
//! positive constant whenever `b != 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolParams {
    a: f64,
    b: f64,
}

impl SymbolParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if b == 0.0 {
            return Err(Error::DriftRequired);
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "symbol coefficients must be finite, got a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Symbol value for `p != 0`, no check. Re is even in `p`, Im is odd.
    pub(crate) fn eval(&self, p: f64) -> Complex64 {
        Complex64::new(p.abs().ln() - self.a, -self.b * p)
    }
}

pub fn lambda(params: &SymbolParams, p: f64) -> Result<Complex64> {
    if p == 0.0 {
        return Err(Error::SingularSymbol);
    }
    Ok(params.eval(p))
}

pub fn modulus(params: &SymbolParams, p: f64) -> Result<f64> {
    Ok(lambda(params, p)?.norm())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundResult {
    /// `inf_p |lambda(p)|`.
    pub c: f64,
    /// Minimizing frequency.
    pub p_star: f64,
    /// Golden-section plus Newton steps spent on the winning bracket.
    pub iterations: usize,
    /// False when the minimizer sits on the edge of the scan window.
    pub interior: bool,
    /// `|ln p* - a + b^2 p*^2|`.
    pub stationarity_defect: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanWindow {
    pub p_min: f64,
    pub p_max: f64,
    pub points: usize,
    /// Target bracket width in `ln p`, i.e. relative width in `p`.
    pub rel_width: f64,
}

impl Default for ScanWindow {
    fn default() -> Self {
        Self {
            p_min: 1e-12,
            p_max: 1e12,
            points: 2048,
            rel_width: 1e-12,
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

pub fn lower_bound(params: &SymbolParams) -> Result<BoundResult> {
    lower_bound_in(params, &ScanWindow::default())
}

/// Minimize `phi(p) = ln^2(p / e^a) + b^2 p^2` over the window.
///
/// Works in `t = ln p`, where `phi(t) = (t - a)^2 + b^2 e^{2t}`. A log-spaced
/// scan locates every local-minimum bracket, golden-section narrows each one,
/// and a safeguarded Newton step on `t - a + b^2 e^{2t} = 0` polishes the
/// stationary point (golden-section alone stalls near `sqrt(eps)` on flat
/// minima).
pub fn lower_bound_in(params: &SymbolParams, window: &ScanWindow) -> Result<BoundResult> {
    if params.b == 0.0 {
        return Err(Error::DriftRequired);
    }
    if !(window.p_min > 0.0 && window.p_max > window.p_min && window.points >= 3) {
        return Err(Error::InvalidArgument(format!(
            "bad scan window {window:?}"
        )));
    }
    let (a, b2) = (params.a, params.b * params.b);
    let phi = |t: f64| (t - a) * (t - a) + b2 * (2.0 * t).exp();
    let stationarity = |t: f64| t - a + b2 * (2.0 * t).exp();

    let (t_lo, t_hi) = (window.p_min.ln(), window.p_max.ln());
    let last = window.points - 1;
    let ts: Vec<f64> = (0..window.points)
        .map(|i| t_lo + (t_hi - t_lo) * i as f64 / last as f64)
        .collect();
    let vals: Vec<f64> = ts.iter().map(|&t| phi(t)).collect();

    let mut best: Option<BoundResult> = None;
    for i in 0..window.points {
        let left_ok = i == 0 || vals[i] <= vals[i - 1];
        let right_ok = i == last || vals[i] <= vals[i + 1];
        if !(left_ok && right_ok) {
            continue;
        }
        let mut lo = ts[i.saturating_sub(1)];
        let mut hi = ts[(i + 1).min(last)];
        let mut iterations = 0;

        // golden section
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let (mut f1, mut f2) = (phi(x1), phi(x2));
        while hi - lo > window.rel_width && iterations < 200 {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - INV_PHI * (hi - lo);
                f1 = phi(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + INV_PHI * (hi - lo);
                f2 = phi(x2);
            }
            iterations += 1;
        }
        let mut t = 0.5 * (lo + hi);

        // Newton polish inside the original scan bracket; the stationarity
        // function is strictly increasing so a sign change pins the root.
        let (mut blo, mut bhi) = (ts[i.saturating_sub(1)], ts[(i + 1).min(last)]);
        if stationarity(blo) < 0.0 && stationarity(bhi) > 0.0 {
            for _ in 0..60 {
                let s = stationarity(t);
                if s == 0.0 {
                    break;
                }
                if s < 0.0 {
                    blo = t;
                } else {
                    bhi = t;
                }
                let ds = 1.0 + 2.0 * b2 * (2.0 * t).exp();
                let mut next = t - s / ds;
                if !(next > blo && next < bhi) {
                    next = 0.5 * (blo + bhi);
                }
                iterations += 1;
                if (next - t).abs() <= 1e-16 * t.abs().max(1.0) {
                    t = next;
                    break;
                }
                t = next;
            }
        }

        let c = phi(t).sqrt();
        let interior = t > t_lo && t < t_hi && i != 0 && i != last;
        let candidate = BoundResult {
            c,
            p_star: t.exp(),
            iterations,
            interior,
            stationarity_defect: stationarity(t).abs(),
        };
        if best.is_none_or(|b| candidate.c < b.c) {
            best = Some(candidate);
        }
    }
    // The scan always has a global minimum point, so at least one bracket exists.
    best.ok_or_else(|| Error::InvalidArgument("scan found no minimum".into()))
}

/// Uniform bound `C = min_m C_m` shared by every component.
pub fn system_lower_bound(all: &[SymbolParams]) -> Result<f64> {
    if all.is_empty() {
        return Err(Error::InvalidArgument("need at least one component".into()));
    }
    all.iter()
        .map(|p| lower_bound(p).map(|r| r.c))
        .try_fold(f64::INFINITY, |m, c| c.map(|c| m.min(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn sp(a: f64, b: f64) -> SymbolParams {
        SymbolParams::new(a, b).unwrap()
    }

    #[test]
    fn symbol_values() {
        let l = lambda(&sp(0.0, 1.0), 1.0).unwrap();
        assert_eq!(l, Complex64::new(0.0, -1.0));
        let l = lambda(&sp(0.0, 1.0), E).unwrap();
        assert!((l - Complex64::new(1.0, -E)).norm() < 1e-15);
        let (a, b) = (0.7, -1.3);
        let l = lambda(&sp(a, b), a.exp()).unwrap();
        assert!(l.re.abs() < 1e-15);
        assert!((l.im + b * a.exp()).abs() < 1e-15);
    }

    #[test]
    fn modulus_values() {
        assert_eq!(modulus(&sp(0.0, 1.0), 1.0).unwrap(), 1.0);
        assert!((modulus(&sp(0.0, 1.0), E).unwrap() - (1.0 + E * E).sqrt()).abs() < 1e-15);
        assert!((modulus(&sp(1.0, 2.0), E).unwrap() - 2.0 * E).abs() < 1e-14);
    }

    #[test]
    fn zero_frequency_and_zero_drift_rejected() {
        assert!(matches!(
            lambda(&sp(0.0, 1.0), 0.0),
            Err(Error::SingularSymbol)
        ));
        assert!(matches!(
            SymbolParams::new(0.0, 0.0),
            Err(Error::DriftRequired)
        ));
        assert!(matches!(
            system_lower_bound(&[]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn evenness_and_divergence() {
        let p = sp(0.4, -2.5);
        for &x in &[1e-6, 0.3, 1.0, 7.5, 1e4] {
            assert_eq!(modulus(&p, x).unwrap(), modulus(&p, -x).unwrap());
        }
        let q = sp(0.0, 1.0);
        assert!(modulus(&q, 1e-9).unwrap() > 10.0);
        assert!(modulus(&q, 1e9).unwrap() > 1e8);
    }

    #[test]
    fn unit_drift_bound_matches_reference() {
        // t + e^{2t} = 0 solved to 30 digits offline:
        // p* = 0.652918640419204715..., C = 0.779767136088000288...
        let r = lower_bound(&sp(0.0, 1.0)).unwrap();
        assert!(r.interior);
        assert!((r.p_star - 0.652_918_640_419_204_7).abs() < 1e-12);
        assert!((r.c - 0.779_767_136_088_000_3).abs() < 1e-14);
        assert!(r.stationarity_defect <= 1e-8);
        assert!(r.iterations > 0);
    }

    #[test]
    fn strong_drift_bound() {
        let r = lower_bound(&sp(0.0, 10.0)).unwrap();
        assert!(r.c > 0.0 && r.c <= 10.0);
        assert!(r.stationarity_defect <= 1e-8);
        assert!((r.c - 2.413_626_353_452_644_6).abs() < 1e-13);
    }

    #[test]
    fn bound_never_exceeds_value_at_e_to_a() {
        for &(a, b) in &[
            (0.0, 1.0),
            (0.3, -0.7),
            (-2.0, 0.1),
            (3.0, 5.0),
            (1.0, 1e-3),
        ] {
            let r = lower_bound(&sp(a, b)).unwrap();
            assert!(r.c <= b.abs() * a.exp() * (1.0 + 1e-15), "{a} {b}");
        }
    }

    #[test]
    fn system_bound_is_component_min() {
        let c1 = lower_bound(&sp(0.0, 1.0)).unwrap().c;
        let c2 = lower_bound(&sp(0.0, 2.0)).unwrap().c;
        assert_eq!(system_lower_bound(&[sp(0.0, 1.0)]).unwrap(), c1);
        assert_eq!(
            system_lower_bound(&[sp(0.0, 1.0), sp(0.0, 2.0)]).unwrap(),
            c1.min(c2)
        );
        assert_eq!(
            system_lower_bound(&[sp(0.0, 1.0), sp(0.0, 1.0)]).unwrap(),
            c1
        );
    }

    #[test]
    fn doubling_drift_never_decreases_bound() {
        for &(a, b) in &[(0.0, 0.5), (1.5, -0.2), (-1.0, 3.0)] {
            let c1 = lower_bound(&sp(a, b)).unwrap().c;
            let c2 = lower_bound(&sp(a, 2.0 * b)).unwrap().c;
            assert!(c2 >= c1);
        }
    }
}
