//! Reference computations shared by the integration and acceptance tests.
//! Nothing here calls into the FFT path of the library.
#![allow(dead_code, clippy::excessive_precision)]

use std::f64::consts::PI;

use num_complex::Complex64;

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

fn adapt(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (val, err) = gk15(f, a, b);
    if err <= tol || depth == 0 {
        return val;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss-Kronrod quadrature of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    adapt(&f, a, b, tol, 60)
}

/// Continuum solution of `(ln|p| - a - i b p) u^ = f^` at `x` for the
/// source `amp * exp(-(x - c)^2 / (2 s^2))`, from the inverse Fourier
/// integral folded onto `p > 0`.
pub fn gaussian_source_solution(a: f64, b: f64, amp: f64, s: f64, c: f64, x: f64) -> f64 {
    gaussian_source_solution_above(a, b, amp, s, c, x, 0.0)
}

/// As [`gaussian_source_solution`], with the band `|p| < p_low` left out of
/// the integral.
pub fn gaussian_source_solution_above(
    a: f64,
    b: f64,
    amp: f64,
    s: f64,
    c: f64,
    x: f64,
    p_low: f64,
) -> f64 {
    let cutoff = 40.0 / s;
    let integrand = |p: f64| {
        if p == 0.0 {
            return 0.0;
        }
        let fh = amp * s * (-0.5 * s * s * p * p).exp();
        let lam = Complex64::new(p.ln() - a, -b * p);
        (fh * Complex64::from_polar(1.0, p * (x - c)) / lam).re
    };
    let mut total = 0.0;
    let mut lo = p_low;
    for hi in [1e-3, 0.1, 1.0, 4.0 / s, cutoff] {
        if hi > lo {
            total += integrate(integrand, lo, hi, 1e-14);
            lo = hi;
        }
    }
    2.0 * total / (2.0 * PI).sqrt()
}

/// `min_p |ln p - a - i b p|` by brute force over a logarithmic scan of
/// `[p_min, p_max]`.
pub fn scan_lower_bound(a: f64, b: f64, p_min: f64, p_max: f64, points: usize) -> (f64, f64) {
    let (l0, l1) = (p_min.ln(), p_max.ln());
    let step = (l1 - l0) / (points - 1) as f64;
    let mut best = (f64::INFINITY, f64::NAN);
    for i in 0..points {
        let t = l0 + i as f64 * step;
        let p = t.exp();
        let v = ((t - a).powi(2) + (b * p).powi(2)).sqrt();
        if v < best.0 {
            best = (v, p);
        }
    }
    best
}

/// Direct `O(n^2)` DFT in the library's convention, with `p_k = 2 pi k / L`
/// for `k = -n/2 .. n/2 - 1`, indexed by `k + n/2`.
pub fn direct_dft(x: &[f64], values: &[f64], length: f64) -> Vec<(f64, Complex64)> {
    let n = values.len() as i64;
    let h = length / n as f64;
    (-n / 2..n / 2)
        .map(|k| {
            let p = 2.0 * PI * k as f64 / length;
            let s: Complex64 = x
                .iter()
                .zip(values)
                .map(|(&xj, &v)| v * Complex64::from_polar(1.0, -p * xj))
                .sum();
            (p, s * h / (2.0 * PI).sqrt())
        })
        .collect()
}

/// Inverse of [`direct_dft`]; returns the real part.
pub fn direct_idft(x: &[f64], spectrum: &[(f64, Complex64)], length: f64) -> Vec<f64> {
    let dp = 2.0 * PI / length;
    x.iter()
        .map(|&xj| {
            let s: Complex64 = spectrum
                .iter()
                .map(|&(p, c)| c * Complex64::from_polar(1.0, p * xj))
                .sum();
            (s * dp / (2.0 * PI).sqrt()).re
        })
        .collect()
}
