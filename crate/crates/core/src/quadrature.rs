//! One-dimensional quadrature building blocks: adaptive Gauss–Kronrod,
//! Gauss–Legendre nodes, trapezoid end corrections, the locally corrected
//! trapezoid rule for `ln|u − v|` kernels, and Lagrange interpolation weights.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    Segment {
        a,
        b,
        value: kron * h,
        error: ((kron - gauss) * h).norm(),
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// Globally adaptive 15-point Gauss–Kronrod integration of a complex
/// function over `[a, b]`. Bisects the segment with the largest error
/// estimate until the total estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_adaptive<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    budget: usize,
) -> Result<Integral> {
    let mut segs = vec![gk15(&mut f, a, b)];
    let mut evals = 15;
    loop {
        let total: Complex64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::Domain("non-finite integrand".into()));
        }
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok(Integral { value: total, error: err, evaluations: evals });
        }
        if evals + 30 > budget {
            return Err(Error::QuadratureNonConvergence { budget, estimate: err });
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc });
        let s = segs.swap_remove(idx);
        let m = 0.5 * (s.a + s.b);
        segs.push(gk15(&mut f, s.a, m));
        segs.push(gk15(&mut f, m, s.b));
        evals += 30;
    }
}

/// Real-valued convenience wrapper around [`integrate_adaptive`].
pub fn integrate_adaptive_real<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    budget: usize,
) -> Result<f64> {
    integrate_adaptive(|x| Complex64::new(f(x), 0.0), a, b, abs_tol, rel_tol, budget)
        .map(|r| r.value.re)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * p - pm) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Solve a small dense real system in place (Gaussian elimination with
/// partial pivoting). Used only for the tiny moment systems below.
fn solve_small(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Number of end nodes touched by [`gregory_end_weights`].
pub const GREGORY_NODES: usize = 6;

/// Additive corrections `c_j` to the unit trapezoid weights at the first
/// `GREGORY_NODES` nodes of an end (the rule is `h Σ (1 + c_j) g_j`, with
/// the plain trapezoid's ½ folded into `c_0`). Exact for polynomials of
/// degree < `GREGORY_NODES`.
pub fn gregory_end_weights() -> [f64; GREGORY_NODES] {
    // Σ_j c_j j^p = −(δ_p0 + ζ(−p))
    let rhs = [-0.5, 1.0 / 12.0, 0.0, -1.0 / 120.0, 0.0, 1.0 / 252.0];
    let a: Vec<Vec<f64>> = (0..GREGORY_NODES)
        .map(|p| (0..GREGORY_NODES).map(|j| (j as f64).powi(p as i32)).collect())
        .collect();
    let x = solve_small(a, rhs.to_vec());
    let mut out = [0.0; GREGORY_NODES];
    out.copy_from_slice(&x);
    out
}

/// Diagonal correction stencil width for the log-corrected trapezoid rule.
pub const LOG_STENCIL: usize = 2;

const ZETA_ODD: [f64; 4] = [
    1.202_056_903_159_594_2,
    1.036_927_755_143_37,
    1.008_349_277_381_922_8,
    1.002_008_392_826_082_2,
];

/// `ζ'(−2l)` for `l ≥ 1`.
fn zeta_prime_neg_even(l: usize) -> f64 {
    let mut fact = 1.0;
    for i in 1..=2 * l {
        fact *= i as f64;
    }
    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
    sign * fact * ZETA_ODD[l - 1] / (2.0 * (2.0 * std::f64::consts::PI).powi(2 * l as i32))
}

/// Weights `β_1..β_M` of the symmetric second-difference correction in
///
/// `∫ φ(v) ln|u_i − v| dv ≈ h Σ_{j≠i} φ_j ln|u_i − u_j| + h φ_i ln(h/2π)
///    + h Σ_m β_m (φ_{i+m} + φ_{i−m} − 2φ_i)`.
///
/// The base rule misses `2 Σ_l ζ'(−2l) φ^{(2l)} h^{2l+1}/(2l)!`, so the
/// weights solve `Σ_m β_m m^{2l} = ζ'(−2l)` for `l = 1..M`; the result is
/// of order `2M + 3`.
pub fn log_correction_weights(m: usize) -> Vec<f64> {
    assert!((1..=4).contains(&m), "stencil width 1..=4 supported");
    let a: Vec<Vec<f64>> = (1..=m)
        .map(|l| (1..=m).map(|j| (j as f64).powi(2 * l as i32)).collect())
        .collect();
    let rhs: Vec<f64> = (1..=m).map(zeta_prime_neg_even).collect();
    solve_small(a, rhs)
}

/// Diagonal self-term factor `ln(h/2π)` of the log-corrected rule.
pub fn log_diagonal(h: f64) -> f64 {
    (h / (2.0 * std::f64::consts::PI)).ln()
}

/// Lagrange basis weights at `t` for the given nodes.
pub fn lagrange_weights(nodes: &[f64], t: f64) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![1.0; n];
    for (i, wi) in w.iter_mut().enumerate() {
        for j in 0..n {
            if j != i {
                *wi *= (t - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_polynomial_exact() {
        let r = integrate_adaptive(|x| Complex64::new(x.powi(6), x), 0.0, 2.0, 1e-14, 0.0, 1000).unwrap();
        assert!((r.value.re - 128.0 / 7.0).abs() < 1e-12);
        assert!((r.value.im - 2.0).abs() < 1e-13);
    }

    #[test]
    fn gk_budget_exhaustion_reported() {
        let r = integrate_adaptive(|x| Complex64::new((1.0 / x).sin() / x, 0.0), 1e-8, 1.0, 1e-15, 0.0, 100);
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
    }

    #[test]
    fn gauss_legendre_moments() {
        for n in [1, 2, 5, 16, 17] {
            let (x, w) = gauss_legendre(n);
            for p in 0..2 * n {
                let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((s - exact).abs() < 1e-13, "n={n} p={p}: {s} vs {exact}");
            }
        }
    }

    #[test]
    fn gregory_rule_integrates_polynomials() {
        let c = gregory_end_weights();
        let n = 40;
        let h = 1.0 / n as f64;
        for p in 0..6 {
            let mut s = 0.0;
            for j in 0..=n {
                let mut w = 1.0;
                if j < GREGORY_NODES {
                    w += c[j];
                }
                if n - j < GREGORY_NODES {
                    w += c[n - j];
                }
                s += w * (j as f64 * h).powi(p);
            }
            s *= h;
            assert!((s - 1.0 / (p as f64 + 1.0)).abs() < 1e-13, "p={p}");
        }
    }

    #[test]
    fn log_corrected_trapezoid_gaussian_moment() {
        // ∫ ln|t| e^{−t²} dt = −(√π/2)(γ + 2 ln 2)
        let exact = -(std::f64::consts::PI.sqrt() / 2.0) * (crate::specfun::EULER_GAMMA + 2.0 * 2f64.ln());
        let beta = log_correction_weights(LOG_STENCIL);
        let mut errs = vec![];
        for &h in &[0.2, 0.1, 0.05] {
            let m = (8.0 / h) as i64;
            let phi = |j: i64| (-(j as f64 * h).powi(2)).exp();
            let mut s = h * phi(0) * log_diagonal(h);
            for j in -m..=m {
                if j != 0 {
                    s += h * phi(j) * (j as f64 * h).abs().ln();
                }
            }
            for (mi, b) in beta.iter().enumerate() {
                let mm = mi as i64 + 1;
                s += h * b * (phi(mm) + phi(-mm) - 2.0 * phi(0));
            }
            errs.push((s - exact).abs());
        }
        assert!(errs[2] < 1e-9, "{errs:?}");
        assert!(errs[0] / errs[1] > 30.0, "{errs:?}");
    }

    #[test]
    fn lagrange_reproduces_cubic() {
        let nodes = [0.0, 0.5, 1.3, 2.0, 3.1];
        let w = lagrange_weights(&nodes, 0.77);
        let s: f64 = nodes.iter().zip(&w).map(|(x, w)| w * (x * x * x - x)).sum();
        assert!((s - (0.77f64.powi(3) - 0.77)).abs() < 1e-13);
    }
}
