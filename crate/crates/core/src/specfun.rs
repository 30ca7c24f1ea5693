//! Real-argument Bessel and Hankel functions of orders 0 and 1, the free-space
//! kernels `Φ_k` and `Φ_0`, and the smooth difference `Φ_k − Φ_0` with its
//! first and second derivatives.
//!
//! Evaluation strategy for `z > 0`:
//!
//! * `z ≤ 8`: ascending power series in double precision;
//! * `8 < z ≤ 20`: the same series summed in double-double arithmetic, since
//!   the alternating terms grow to ~1e7 before cancelling;
//! * `z > 20`: Hankel's asymptotic expansion, truncated at its smallest term
//!   (which is below 1e-17 relative for `z > 20`).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex value used throughout the crate.
pub type ComplexVal = Complex64;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Points closer than this are treated as coincident.
pub const COINCIDENT_TOL: f64 = 1e-14;

/// Upper end of the plain double-precision series.
const SERIES_F64_MAX: f64 = 8.0;
/// Series / asymptotic crossover.
pub const HANKEL_CROSSOVER: f64 = 20.0;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl Point2 {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    pub fn norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x1 * s, self.x2 * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x1, -self.x2)
    }
}

// ---------------------------------------------------------------------------
// double-double arithmetic (only what the series need)

#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let e = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: e }
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let s = Dd::quick_two_sum(s.hi, s.lo + t.hi);
        Dd::quick_two_sum(s.hi, s.lo + t.lo)
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        Dd::quick_two_sum(p, e)
    }

    fn mul_f(self, b: f64) -> Dd {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p) + self.lo * b;
        Dd::quick_two_sum(p, e)
    }

    fn div_f(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let r = self.add(Dd::from(q1).mul_f(-b));
        let q2 = r.hi / b;
        let r = r.add(Dd::from(q2).mul_f(-b));
        let q3 = r.hi / b;
        Dd::quick_two_sum(q1, q2).add(Dd::from(q3))
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

// ---------------------------------------------------------------------------
// ascending series

/// Pieces of the ascending series for orders 0 and 1 at argument `z`:
///
/// * `j0m1 = J0(z) − 1`
/// * `j1 = J1(z)`
/// * `s0 = Σ_{m≥1} (−1)^{m+1} H_m q^m / (m!)²`, so that
///   `Y0 = (2/π)[(ln(z/2) + γ) J0 + s0]`
/// * `s1 = (z/2) Σ_{m≥0} (−1)^m (H_m + H_{m+1}) q^m / (m!(m+1)!)`, so that
///   `Y1 = (2/π)(ln(z/2) + γ) J1 − 2/(πz) − s1/π`
///
/// with `q = z²/4` and `H_m` the harmonic numbers.
#[derive(Debug, Clone, Copy)]
struct SeriesParts {
    j0m1: f64,
    j1: f64,
    s0: f64,
    s1: f64,
}

fn series_f64(z: f64) -> SeriesParts {
    let half = 0.5 * z;
    let q = half * half;
    let mut j0m1 = 0.0;
    let mut j1_sum = 1.0; // m = 0 term of Σ (−q)^m/(m!(m+1)!)
    let mut s0 = 0.0;
    let mut s1_sum = 1.0; // (H_0 + H_1) = 1
    let mut t0 = 1.0; // (−q)^m/(m!)²
    let mut t1 = 1.0; // (−q)^m/(m!(m+1)!)
    let mut harm = 0.0; // H_m
    for m in 1..200 {
        let mf = m as f64;
        t0 *= -q / (mf * mf);
        t1 *= -q / (mf * (mf + 1.0));
        harm += 1.0 / mf;
        let h_next = harm + 1.0 / (mf + 1.0);
        j0m1 += t0;
        j1_sum += t1;
        s0 -= harm * t0;
        s1_sum += (harm + h_next) * t1;
        if t0.abs() < 1e-18 * (1.0 + j0m1.abs()) && t1.abs() < 1e-18 * j1_sum.abs() && m > 2 {
            break;
        }
    }
    SeriesParts {
        j0m1,
        j1: half * j1_sum,
        s0,
        s1: half * s1_sum,
    }
}

fn series_dd(z: f64) -> SeriesParts {
    let half = Dd::from(0.5 * z);
    let q = half.mul(half);
    let mut j0m1 = Dd::ZERO;
    let mut j1_sum = Dd::from(1.0);
    let mut s0 = Dd::ZERO;
    let mut s1_sum = Dd::from(1.0);
    let mut t0 = Dd::from(1.0);
    let mut t1 = Dd::from(1.0);
    let mut harm = Dd::ZERO;
    for m in 1..200 {
        let mf = m as f64;
        t0 = t0.mul(q).neg().div_f(mf * mf);
        t1 = t1.mul(q).neg().div_f(mf * (mf + 1.0));
        harm = harm.add(Dd::from(1.0).div_f(mf));
        let h_next = harm.add(Dd::from(1.0).div_f(mf + 1.0));
        j0m1 = j0m1.add(t0);
        j1_sum = j1_sum.add(t1);
        s0 = s0.add(harm.mul(t0).neg());
        s1_sum = s1_sum.add(harm.add(h_next).mul(t1));
        if t0.hi.abs() < 1e-34 && t1.hi.abs() < 1e-34 {
            break;
        }
    }
    SeriesParts {
        j0m1: j0m1.to_f64(),
        j1: half.mul(j1_sum).to_f64(),
        s0: s0.to_f64(),
        s1: half.mul(s1_sum).to_f64(),
    }
}

fn series(z: f64) -> SeriesParts {
    if z <= SERIES_F64_MAX {
        series_f64(z)
    } else {
        series_dd(z)
    }
}

/// J0, J1, Y0, Y1 from the series pieces.
fn bessel_from_series(z: f64, p: &SeriesParts) -> [f64; 4] {
    let lg = (0.5 * z).ln() + EULER_GAMMA;
    let j0 = 1.0 + p.j0m1;
    let j1 = p.j1;
    let y0 = (2.0 / PI) * (lg * j0 + p.s0);
    let y1 = (2.0 / PI) * lg * j1 - 2.0 / (PI * z) - p.s1 / PI;
    [j0, j1, y0, y1]
}

// ---------------------------------------------------------------------------
// Hankel asymptotic expansion

/// `H_ν^{(1)}(z)` for integer `ν ∈ {0, 1}` and large `z`.
fn hankel_asymptotic(nu: u32, z: f64) -> Complex64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    for k in 1..80 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term = term * I * ((mu - odd * odd) / (8.0 * kf * z));
        let mag = term.norm();
        if mag > last {
            break;
        }
        sum += term;
        if mag < 1e-18 * sum.norm() {
            break;
        }
        last = mag;
    }
    let phase = Complex64::new(z.cos(), z.sin())
        * Complex64::from_polar(1.0, -(nu as f64) * FRAC_PI_2 - FRAC_PI_4);
    (2.0 / (PI * z)).sqrt() * phase * sum
}

fn check_arg(z: f64) -> Result<()> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::Domain(format!("Bessel argument must be finite and > 0, got {z}")));
    }
    Ok(())
}

/// `(J0, J1, Y0, Y1)` at `z > 0`.
pub fn bessel_jy01(z: f64) -> Result<[f64; 4]> {
    check_arg(z)?;
    if z <= HANKEL_CROSSOVER {
        Ok(bessel_from_series(z, &series(z)))
    } else {
        let h0 = hankel_asymptotic(0, z);
        let h1 = hankel_asymptotic(1, z);
        Ok([h0.re, h1.re, h0.im, h1.im])
    }
}

/// `H_0^{(1)}(z)` for real `z > 0`.
pub fn hankel1_0(z: f64) -> Result<ComplexVal> {
    let [j0, _, y0, _] = bessel_jy01(z)?;
    Ok(Complex64::new(j0, y0))
}

/// `H_1^{(1)}(z)` for real `z > 0`.
pub fn hankel1_1(z: f64) -> Result<ComplexVal> {
    let [_, j1, _, y1] = bessel_jy01(z)?;
    Ok(Complex64::new(j1, y1))
}

/// Both `H_0^{(1)}(z)` and `H_1^{(1)}(z)`.
pub fn hankel1_01(z: f64) -> Result<(ComplexVal, ComplexVal)> {
    let [j0, j1, y0, y1] = bessel_jy01(z)?;
    Ok((Complex64::new(j0, y0), Complex64::new(j1, y1)))
}

// ---------------------------------------------------------------------------
// free-space kernels

fn separation(x: Point2, y: Point2) -> Result<(Point2, f64)> {
    let r = x - y;
    let d = r.norm();
    if !(d >= COINCIDENT_TOL) {
        return Err(Error::CoincidentPoints { distance: d });
    }
    Ok((r, d))
}

/// `Φ_0(x, y) = (1/2π) ln(1/|x − y|)`.
pub fn phi_0(x: Point2, y: Point2) -> Result<ComplexVal> {
    let (_, d) = separation(x, y)?;
    Ok(Complex64::new(-d.ln() / (2.0 * PI), 0.0))
}

/// `Φ_k(x, y) = (i/4) H_0^{(1)}(k|x − y|)`; `k = 0` gives `Φ_0`.
pub fn phi_k(x: Point2, y: Point2, k: f64) -> Result<ComplexVal> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("wavenumber must be finite and >= 0, got {k}")));
    }
    if k == 0.0 {
        return phi_0(x, y);
    }
    let (_, d) = separation(x, y)?;
    Ok(0.25 * I * hankel1_0(k * d)?)
}

/// Which argument a gradient is taken with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Wrt {
    X,
    Y,
}

/// `∇Φ_k` with respect to `x` or `y`.
pub fn phi_k_gradient(x: Point2, y: Point2, k: f64, wrt: Wrt) -> Result<[ComplexVal; 2]> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("wavenumber must be finite and > 0, got {k}")));
    }
    let (r, d) = separation(x, y)?;
    // dΦ/dR = −(ik/4) H1(kR)
    let dphi = -0.25 * I * k * hankel1_1(k * d)?;
    let s = match wrt {
        Wrt::X => 1.0,
        Wrt::Y => -1.0,
    };
    Ok([dphi * (s * r.x1 / d), dphi * (s * r.x2 / d)])
}

/// `∇_x Φ_0(x, y)`.
pub fn phi_0_gradient(x: Point2, y: Point2) -> Result<[f64; 2]> {
    let (r, d) = separation(x, y)?;
    let c = -1.0 / (2.0 * PI * d * d);
    Ok([c * r.x1, c * r.x2])
}

/// Hessian `∂_{x_i}∂_{x_j} Φ_0(x, y)`.
pub fn phi_0_hessian(x: Point2, y: Point2) -> Result<[[f64; 2]; 2]> {
    let (r, d) = separation(x, y)?;
    let d2 = d * d;
    let c = 1.0 / (2.0 * PI * d2 * d2);
    let rr = [r.x1, r.x2];
    let mut h = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let delta = if i == j { d2 } else { 0.0 };
            h[i][j] = c * (2.0 * rr[i] * rr[j] - delta);
        }
    }
    Ok(h)
}

/// Radial profile of a free-space Helmholtz kernel at distance `d`:
/// `Φ_k`, `dΦ_k/dR`, `d²Φ_k/dR²`, plus `J0(kd)`, `J1(kd)` for log-splitting.
#[derive(Debug, Clone, Copy)]
pub struct RadialKernel {
    pub value: ComplexVal,
    pub d1: ComplexVal,
    pub d2: ComplexVal,
    pub j0: f64,
    pub j1: f64,
}

pub fn radial_kernel(k: f64, d: f64) -> Result<RadialKernel> {
    let z = k * d;
    let [j0, j1, y0, y1] = bessel_jy01(z)?;
    let h0 = Complex64::new(j0, y0);
    let h1 = Complex64::new(j1, y1);
    let value = 0.25 * I * h0;
    let d1 = -0.25 * I * k * h1;
    // H1' = H0 − H1/z
    let d2 = -0.25 * I * k * k * (h0 - h1 / z);
    Ok(RadialKernel { value, d1, d2, j0, j1 })
}

/// Hessian of `Φ_k(x, y)` with respect to `x`.
pub fn phi_k_hessian(x: Point2, y: Point2, k: f64) -> Result<[[ComplexVal; 2]; 2]> {
    let (r, d) = separation(x, y)?;
    let rk = radial_kernel(k, d)?;
    Ok(radial_hessian(rk.d1, rk.d2, r, d))
}

/// `Hess g(|r|) = g'' r̂r̂ᵀ + (g'/R)(I − r̂r̂ᵀ)`.
pub fn radial_hessian(g1: ComplexVal, g2: ComplexVal, r: Point2, d: f64) -> [[ComplexVal; 2]; 2] {
    let u = [r.x1 / d, r.x2 / d];
    let gr = g1 / d;
    let mut h = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let delta = if i == j { 1.0 } else { 0.0 };
            h[i][j] = g2 * (u[i] * u[j]) + gr * (delta - u[i] * u[j]);
        }
    }
    h
}

// ---------------------------------------------------------------------------
// regular part Φ_k − Φ_0

/// Largest separation for which the cancellation-safe forms are used.
pub const REGULAR_PART_BALL: f64 = 2.0;

/// Radial profile of `g = Φ_k − Φ_0`: `(g, g', g'')` at distance `d`.
///
/// For `kd ≤ 8` this uses series forms in which the logarithms of both
/// kernels are cancelled analytically; `g''` is only available for
/// `d ≥ COINCIDENT_TOL` since it grows like `ln d`.
pub fn regular_radial(k: f64, d: f64) -> Result<(ComplexVal, ComplexVal, Option<ComplexVal>)> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("wavenumber must be finite and > 0, got {k}")));
    }
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::Domain(format!("distance must be finite and >= 0, got {d}")));
    }
    let z = k * d;
    let lk = (0.5 * k).ln() + EULER_GAMMA;
    if d == 0.0 {
        let g = Complex64::new(-lk / (2.0 * PI), 0.25);
        return Ok((g, Complex64::new(0.0, 0.0), None));
    }
    let (g, g1, h0) = if z <= SERIES_F64_MAX {
        let p = series_f64(z);
        let j0 = 1.0 + p.j0m1;
        let j1 = p.j1;
        let g = Complex64::new(-(d.ln() * p.j0m1 + lk * j0 + p.s0) / (2.0 * PI), 0.25 * j0);
        // g' = −(ik/4)J1 + (k/2π)(ln(kd/2) + γ)J1 − k s1/(4π)
        let lg = (0.5 * z).ln() + EULER_GAMMA;
        let g1 = Complex64::new(k * lg * j1 / (2.0 * PI) - k * p.s1 / (4.0 * PI), -0.25 * k * j1);
        let [_, _, y0, _] = bessel_from_series(z, &p);
        (g, g1, Complex64::new(j0, y0))
    } else {
        let (h0, h1) = hankel1_01(z)?;
        let g = 0.25 * I * h0 + d.ln() / (2.0 * PI);
        let g1 = -0.25 * I * k * h1 + 1.0 / (2.0 * PI * d);
        (g, g1, h0)
    };
    let g2 = if d >= COINCIDENT_TOL {
        Some(-0.25 * I * k * k * h0 - g1 / d)
    } else {
        None
    };
    Ok((g, g1, g2))
}

/// `Φ_k(x, y) − Φ_0(x, y)`, continuous up to `x = y`.
pub fn regular_part_value(x: Point2, y: Point2, k: f64) -> Result<ComplexVal> {
    let d = (x - y).norm();
    if d > REGULAR_PART_BALL {
        return Ok(phi_k(x, y, k)? - phi_0(x, y)?);
    }
    Ok(regular_radial(k, d)?.0)
}

/// `∇_x(Φ_k − Φ_0)`, continuous up to `x = y` (where it vanishes).
pub fn regular_part_gradient(x: Point2, y: Point2, k: f64) -> Result<[ComplexVal; 2]> {
    let r = x - y;
    let d = r.norm();
    if d > REGULAR_PART_BALL {
        let g = phi_k_gradient(x, y, k, Wrt::X)?;
        let g0 = phi_0_gradient(x, y)?;
        return Ok([g[0] - g0[0], g[1] - g0[1]]);
    }
    if d < COINCIDENT_TOL {
        return Ok([Complex64::new(0.0, 0.0); 2]);
    }
    let (_, g1, _) = regular_radial(k, d)?;
    Ok([g1 * (r.x1 / d), g1 * (r.x2 / d)])
}

/// Hessian `∂_{x_i}∂_{x_j}(Φ_k − Φ_0)`; grows like `ln|x − y|`.
pub fn regular_part_hessian(x: Point2, y: Point2, k: f64) -> Result<[[ComplexVal; 2]; 2]> {
    let r = x - y;
    let d = r.norm();
    if d < COINCIDENT_TOL {
        return Err(Error::CoincidentPoints { distance: d });
    }
    if d > REGULAR_PART_BALL {
        let h = phi_k_hessian(x, y, k)?;
        let h0 = phi_0_hessian(x, y)?;
        let mut out = h;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] -= h0[i][j];
            }
        }
        return Ok(out);
    }
    let (_, g1, g2) = regular_radial(k, d)?;
    let g2 = g2.ok_or(Error::CoincidentPoints { distance: d })?;
    Ok(radial_hessian(g1, g2, r, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    // reference values (Abramowitz & Stegun tables)
    const J0_1: f64 = 0.765_197_686_557_966_6;
    const Y0_1: f64 = 0.088_256_964_215_676_96;
    const J1_1: f64 = 0.440_050_585_744_933_5;
    const Y1_1: f64 = -0.781_212_821_300_288_7;

    #[test]
    fn table_values_at_one() {
        let [j0, j1, y0, y1] = bessel_jy01(1.0).unwrap();
        assert!((j0 - J0_1).abs() < 1e-15);
        assert!((y0 - Y0_1).abs() < 1e-15);
        assert!((j1 - J1_1).abs() < 1e-15);
        assert!((y1 - Y1_1).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(hankel1_0(0.0).is_err());
        assert!(hankel1_0(-1.0).is_err());
        assert!(hankel1_1(f64::NAN).is_err());
        assert!(hankel1_0(f64::INFINITY).is_err());
    }

    #[test]
    fn dd_and_f64_series_agree_on_moderate_arguments() {
        for &z in &[0.5, 2.0, 5.0, 7.9] {
            let a = bessel_from_series(z, &series_f64(z));
            let b = bessel_from_series(z, &series_dd(z));
            for i in 0..4 {
                assert!((a[i] - b[i]).abs() < 5e-14, "z={z} i={i}: {} vs {}", a[i], b[i]);
            }
        }
    }

    #[test]
    fn crossover_branches_agree() {
        for &z in &[16.0, 18.0, 20.0, 22.0, 25.0] {
            let s = bessel_from_series(z, &series_dd(z));
            let h0 = hankel_asymptotic(0, z);
            let h1 = hankel_asymptotic(1, z);
            let scale0 = h0.norm();
            let scale1 = h1.norm();
            assert!((Complex64::new(s[0], s[2]) - h0).norm() < 1e-13 * scale0, "z={z}");
            assert!((Complex64::new(s[1], s[3]) - h1).norm() < 1e-13 * scale1, "z={z}");
        }
    }

    #[test]
    fn coincident_points_rejected() {
        let p = Point2::new(0.3, 0.4);
        assert!(matches!(phi_k(p, p, 1.0), Err(Error::CoincidentPoints { .. })));
        assert!(phi_k_gradient(p, p, 1.0, Wrt::X).is_err());
        assert!(regular_part_hessian(p, p, 1.0).is_err());
        assert!(regular_part_value(p, p, 1.0).is_ok());
    }

    #[test]
    fn phi_zero_at_unit_distance() {
        let v = phi_k(Point2::new(0.0, 0.0), Point2::new(0.6, 0.8), 0.0).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn regular_part_diagonal_limit() {
        let k = 1.7;
        let (g, g1, _) = regular_radial(k, 0.0).unwrap();
        let (gs, g1s, _) = regular_radial(k, 1e-12).unwrap();
        assert!((g - gs).norm() < 1e-10);
        assert!(g1.norm() == 0.0 && g1s.norm() < 1e-10);
    }
}
