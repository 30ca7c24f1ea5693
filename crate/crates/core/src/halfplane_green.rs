//! Dirichlet and impedance Green's functions of `Δ + k²` in the half planes
//! `U_a^± = {±(x2 − a) > 0}`, with the correction term `P_k^±`.
//!
//! With `ρ = k|z|` and `σ = ±z2/|z| ∈ [0, 1]`, the substitution `t = s²`
//! turns the defining integral into
//!
//! `P_k^±(z) = F(ρ, σ) = (e^{iρ}/π) ∫_0^∞ 2e^{−ρs²}[1 + σ(1 + is²)] / (√(s² − 2i)[s² − i(1 + σ)]²) ds`,
//!
//! so `P` depends on `k` only through `ρ`. A single table of the slowly
//! varying factor `Q = e^{−iρ}F` in `(ln ρ, σ)` therefore serves every
//! wavenumber and both sides; it is built once on first use.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;
use crate::specfun::{phi_k, radial_hessian, radial_kernel, ComplexVal, Point2, Wrt, COINCIDENT_TOL};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Integrand-evaluation budget for one direct `P` evaluation.
pub const P_BUDGET: usize = 100_000;
/// Absolute accuracy target of the direct `P` quadrature.
pub const P_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Upper => 1.0,
            Side::Lower => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlaneSpec {
    pub side: Side,
    pub a: f64,
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagePoint {
    pub source: Point2,
    pub reflected: Point2,
}

impl ImagePoint {
    pub fn new(y: Point2, a: f64) -> Self {
        Self { source: y, reflected: Point2::new(y.x1, 2.0 * a - y.x2) }
    }
}

impl HalfPlaneSpec {
    pub fn new(side: Side, a: f64, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("half plane needs finite a and k > 0 (a={a}, k={k})")));
        }
        Ok(Self { side, a, k })
    }

    /// Whether `x` lies in the closed half plane.
    pub fn contains(&self, x: Point2) -> bool {
        self.side.sign() * (x.x2 - self.a) >= 0.0
    }

    fn check(&self, x: Point2, y: Point2) -> Result<()> {
        for (name, p) in [("x", x), ("y", y)] {
            if !self.contains(p) {
                return Err(Error::SideViolation(format!(
                    "{name} = ({}, {}) is not in the {:?} half plane of height {}",
                    p.x1, p.x2, self.side, self.a
                )));
            }
        }
        Ok(())
    }
}

/// `G^{(D)}(x, y; a) = Φ_k(x, y) − Φ_k(x, y_a')`.
pub fn dirichlet_green(spec: &HalfPlaneSpec, x: Point2, y: Point2) -> Result<ComplexVal> {
    spec.check(x, y)?;
    let img = ImagePoint::new(y, spec.a);
    Ok(phi_k(x, y, spec.k)? - phi_k(x, img.reflected, spec.k)?)
}

// ---------------------------------------------------------------------------
// direct evaluation of P

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > -0.5 && sigma <= 1.0 + 1e-12) {
        return Err(Error::SideViolation(format!("z outside the closed half plane (σ = {sigma})")));
    }
    Ok(())
}

/// `F(ρ, σ)` by adaptive quadrature on `s ∈ [0, 1]` plus the tail mapped
/// by `s = 1/v`.
pub fn p_scaled_direct(rho: f64, sigma: f64, budget: usize) -> Result<ComplexVal> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::ZeroLength);
    }
    check_sigma(sigma)?;
    let head = |s: f64| {
        let t = s * s;
        let num = 2.0 * (-rho * t).exp() * Complex64::new(1.0 + sigma, sigma * t);
        let den = Complex64::new(t, -2.0).sqrt() * Complex64::new(t, -(1.0 + sigma)).powi(2);
        num / den
    };
    let tail = |v: f64| {
        if v == 0.0 {
            return ZERO;
        }
        let v2 = v * v;
        let num = 2.0 * (-rho / v2).exp() * v * Complex64::new(v2 * (1.0 + sigma), sigma);
        let den = Complex64::new(1.0, -2.0 * v2).sqrt() * Complex64::new(1.0, -(1.0 + sigma) * v2).powi(2);
        num / den
    };
    let h = integrate_adaptive(head, 0.0, 1.0, 0.5 * P_TOL, 0.0, budget / 2)?;
    let t = integrate_adaptive(tail, 0.0, 1.0, 0.5 * P_TOL, 0.0, budget - h.evaluations)?;
    Ok(Complex64::from_polar(1.0 / PI, rho) * (h.value + t.value))
}

fn rho_sigma(spec: &HalfPlaneSpec, z: Point2) -> Result<(f64, f64, f64)> {
    let r = z.norm();
    if !(r > 0.0) || !z.is_finite() {
        return Err(Error::ZeroLength);
    }
    Ok((spec.k * r, spec.side.sign() * z.x2 / r, r))
}

/// `P_k^±(z)` by direct adaptive quadrature.
pub fn pk_correction(spec: &HalfPlaneSpec, z: Point2) -> Result<ComplexVal> {
    pk_correction_budget(spec, z, P_BUDGET)
}

/// As [`pk_correction`] with an explicit evaluation budget.
pub fn pk_correction_budget(spec: &HalfPlaneSpec, z: Point2, budget: usize) -> Result<ComplexVal> {
    let (rho, sigma, _) = rho_sigma(spec, z)?;
    p_scaled_direct(rho, sigma, budget)
}

// ---------------------------------------------------------------------------
// tabulated P

const XI_MIN: f64 = -2.772_588_722_239_781; // ln(1/16)
const XI_MAX: f64 = 8.317_766_166_719_343; // ln(4096)
const XI_PANELS: usize = 28;
const XI_DEG: usize = 14;
const SIG_MIN: f64 = -0.25;
const SIG_MAX: f64 = 1.0;
const SIG_DEG: usize = 18;

/// Chebyshev tensor-product table of `Q(ξ, σ) = e^{−iρ}F(ρ, σ)`, `ξ = ln ρ`.
pub struct PTable {
    /// `coef[panel][a * SIG_DEG + b]`
    coef: Vec<Vec<Complex64>>,
}

fn cheb_points(n: usize) -> Vec<f64> {
    (0..n).map(|j| (PI * (j as f64 + 0.5) / n as f64).cos()).collect()
}

/// `T_n(x)`, `T_n'(x)`, `T_n''(x)` for `n < len`.
fn cheb_basis(x: f64, len: usize, t: &mut [f64], d1: &mut [f64], d2: &mut [f64]) {
    t[0] = 1.0;
    d1[0] = 0.0;
    d2[0] = 0.0;
    if len > 1 {
        t[1] = x;
        d1[1] = 1.0;
        d2[1] = 0.0;
    }
    for n in 1..len - 1 {
        t[n + 1] = 2.0 * x * t[n] - t[n - 1];
        d1[n + 1] = 2.0 * t[n] + 2.0 * x * d1[n] - d1[n - 1];
        d2[n + 1] = 4.0 * d1[n] + 2.0 * x * d2[n] - d2[n - 1];
    }
}

impl PTable {
    fn build() -> Self {
        let px = cheb_points(XI_DEG);
        let ps = cheb_points(SIG_DEG);
        let width = (XI_MAX - XI_MIN) / XI_PANELS as f64;
        let sig_c = 0.5 * (SIG_MIN + SIG_MAX);
        let sig_h = 0.5 * (SIG_MAX - SIG_MIN);
        let coef = (0..XI_PANELS)
            .map(|p| {
                let x0 = XI_MIN + p as f64 * width;
                let mut vals = vec![ZERO; XI_DEG * SIG_DEG];
                for (i, &xi_hat) in px.iter().enumerate() {
                    let rho = (x0 + 0.5 * width * (xi_hat + 1.0)).exp();
                    for (j, &s_hat) in ps.iter().enumerate() {
                        let sigma = sig_c + sig_h * s_hat;
                        let f = p_scaled_direct(rho, sigma, P_BUDGET)
                            .expect("P table node quadrature converges");
                        vals[i * SIG_DEG + j] = f * Complex64::from_polar(1.0, -rho);
                    }
                }
                // 2D discrete Chebyshev transform
                let mut c = vec![ZERO; XI_DEG * SIG_DEG];
                for a in 0..XI_DEG {
                    for b in 0..SIG_DEG {
                        let mut s = ZERO;
                        for i in 0..XI_DEG {
                            let ta = (a as f64 * PI * (i as f64 + 0.5) / XI_DEG as f64).cos();
                            for j in 0..SIG_DEG {
                                let tb = (b as f64 * PI * (j as f64 + 0.5) / SIG_DEG as f64).cos();
                                s += vals[i * SIG_DEG + j] * (ta * tb);
                            }
                        }
                        let fa = if a == 0 { 1.0 } else { 2.0 };
                        let fb = if b == 0 { 1.0 } else { 2.0 };
                        c[a * SIG_DEG + b] = s * (fa * fb / (XI_DEG * SIG_DEG) as f64);
                    }
                }
                c
            })
            .collect();
        Self { coef }
    }

    /// The process-wide table, built on first use.
    pub fn global() -> &'static PTable {
        static TABLE: OnceLock<PTable> = OnceLock::new();
        TABLE.get_or_init(PTable::build)
    }

    pub fn covers(rho: f64) -> bool {
        let xi = rho.ln();
        (XI_MIN..=XI_MAX).contains(&xi)
    }

    /// `Q, Q_ξ, Q_σ, Q_ξξ, Q_ξσ, Q_σσ` at `(ln ρ, σ)`.
    fn eval(&self, xi: f64, sigma: f64) -> [Complex64; 6] {
        let width = (XI_MAX - XI_MIN) / XI_PANELS as f64;
        let p = (((xi - XI_MIN) / width).floor() as isize).clamp(0, XI_PANELS as isize - 1) as usize;
        let x0 = XI_MIN + p as f64 * width;
        let xh = 2.0 * (xi - x0) / width - 1.0;
        let sh = (2.0 * sigma - SIG_MIN - SIG_MAX) / (SIG_MAX - SIG_MIN);
        let (mut ta, mut da, mut dda) = ([0.0; XI_DEG], [0.0; XI_DEG], [0.0; XI_DEG]);
        let (mut tb, mut db, mut ddb) = ([0.0; SIG_DEG], [0.0; SIG_DEG], [0.0; SIG_DEG]);
        cheb_basis(xh, XI_DEG, &mut ta, &mut da, &mut dda);
        cheb_basis(sh, SIG_DEG, &mut tb, &mut db, &mut ddb);
        let c = &self.coef[p];
        let mut out = [ZERO; 6];
        for a in 0..XI_DEG {
            let row = &c[a * SIG_DEG..(a + 1) * SIG_DEG];
            let (mut s0, mut s1, mut s2) = (ZERO, ZERO, ZERO);
            for b in 0..SIG_DEG {
                s0 += row[b] * tb[b];
                s1 += row[b] * db[b];
                s2 += row[b] * ddb[b];
            }
            out[0] += s0 * ta[a];
            out[1] += s0 * da[a];
            out[2] += s1 * ta[a];
            out[3] += s0 * dda[a];
            out[4] += s1 * da[a];
            out[5] += s2 * ta[a];
        }
        let gx = 2.0 / width;
        let gs = 2.0 / (SIG_MAX - SIG_MIN);
        out[1] *= gx;
        out[2] *= gs;
        out[3] *= gx * gx;
        out[4] *= gx * gs;
        out[5] *= gs * gs;
        out
    }
}

/// Value, gradient and Hessian of a function of `z`.
#[derive(Debug, Clone, Copy)]
pub struct Derivs2 {
    pub value: ComplexVal,
    pub grad: [ComplexVal; 2],
    pub hess: [[ComplexVal; 2]; 2],
}

/// `P_k^±(z)` with gradient and Hessian in `z`. Uses the table when
/// `k|z|` is in range, otherwise direct quadrature with fourth-order
/// finite differences.
pub fn pk_derivs(spec: &HalfPlaneSpec, z: Point2) -> Result<Derivs2> {
    let (rho, sigma, r) = rho_sigma(spec, z)?;
    check_sigma(sigma)?;
    if !PTable::covers(rho) {
        return pk_derivs_fd(spec, z);
    }
    let k = spec.k;
    let s = spec.side.sign();
    let [q, q_x, q_s, q_xx, q_xs, q_ss] = PTable::global().eval(rho.ln(), sigma);
    let e = Complex64::from_polar(1.0, rho);
    let q_r = q_x / rho;
    let q_rr = (q_xx - q_x) / (rho * rho);
    let q_rs = q_xs / rho;
    let f = e * q;
    let f_r = e * (I * q + q_r);
    let f_s = e * q_s;
    let f_rr = e * (-q + 2.0 * I * q_r + q_rr);
    let f_rs = e * (I * q_s + q_rs);
    let f_ss = e * q_ss;
    let zz = [z.x1, z.x2];
    let r3 = r * r * r;
    let r5 = r3 * r * r;
    let dlt = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let mut rg = [0.0; 2];
    let mut sg = [0.0; 2];
    for i in 0..2 {
        rg[i] = zz[i] / r;
        sg[i] = s * (dlt(i, 1) / r - z.x2 * zz[i] / r3);
    }
    let mut grad = [ZERO; 2];
    let mut hess = [[ZERO; 2]; 2];
    for i in 0..2 {
        grad[i] = k * f_r * rg[i] + f_s * sg[i];
        for j in 0..2 {
            let r_ij = (dlt(i, j) - zz[i] * zz[j] / (r * r)) / r;
            let s_ij = s
                * (-dlt(i, 1) * zz[j] / r3 - (dlt(1, j) * zz[i] + z.x2 * dlt(i, j)) / r3
                    + 3.0 * z.x2 * zz[i] * zz[j] / r5);
            hess[i][j] = k * k * f_rr * (rg[i] * rg[j])
                + k * f_rs * (rg[i] * sg[j] + rg[j] * sg[i])
                + f_ss * (sg[i] * sg[j])
                + k * f_r * r_ij
                + f_s * s_ij;
        }
    }
    Ok(Derivs2 { value: f, grad, hess })
}

/// Fourth-order central differences of the directly evaluated `P`.
pub fn pk_derivs_fd(spec: &HalfPlaneSpec, z: Point2) -> Result<Derivs2> {
    let p = |dz1: f64, dz2: f64| pk_correction(spec, Point2::new(z.x1 + dz1, z.x2 + dz2));
    let value = p(0.0, 0.0)?;
    // resolve the wavelength at large |z| and the singular scale at small |z|
    let h = (0.02 / spec.k).min(1e-2 * z.norm());
    // stay inside the closed half plane when z sits on its boundary
    let d1 = |f: &dyn Fn(f64) -> Result<ComplexVal>| -> Result<ComplexVal> {
        Ok((f(-2.0 * h)? - 8.0 * f(-h)? + 8.0 * f(h)? - f(2.0 * h)?) / (12.0 * h))
    };
    let d2 = |f: &dyn Fn(f64) -> Result<ComplexVal>| -> Result<ComplexVal> {
        Ok((-f(-2.0 * h)? + 16.0 * f(-h)? - 30.0 * f(0.0)? + 16.0 * f(h)? - f(2.0 * h)?) / (12.0 * h * h))
    };
    let g1 = d1(&|t| p(t, 0.0))?;
    let g2 = d1(&|t| p(0.0, t))?;
    let h11 = d2(&|t| p(t, 0.0))?;
    let h22 = d2(&|t| p(0.0, t))?;
    let h12 = d1(&|t| d1(&|u| p(u, t)))?;
    Ok(Derivs2 { value, grad: [g1, g2], hess: [[h11, h12], [h12, h22]] })
}

// ---------------------------------------------------------------------------
// impedance Green's function

/// Smooth (image + correction) part of the impedance kernel,
/// `Φ_k(x, y_a') + P_k^±(x − y_a')`, with the derivatives needed by the
/// boundary operators.
#[derive(Debug, Clone, Copy)]
pub struct KernelDerivs {
    pub value: ComplexVal,
    pub grad_x: [ComplexVal; 2],
    pub grad_y: [ComplexVal; 2],
    /// `∂_{x_i} ∂_{y_j}`
    pub mixed: [[ComplexVal; 2]; 2],
}

/// `∂y = S ∂z` with `S = diag(−1, 1)` for `z = x − y_a'`.
const YSIGN: [f64; 2] = [-1.0, 1.0];

pub fn image_terms(spec: &HalfPlaneSpec, x: Point2, y: Point2) -> Result<KernelDerivs> {
    let img = ImagePoint::new(y, spec.a);
    let z = x - img.reflected;
    let r = z.norm();
    if r < COINCIDENT_TOL {
        return Err(Error::CoincidentPoints { distance: r });
    }
    let rk = radial_kernel(spec.k, r)?;
    let ghat = [z.x1 / r, z.x2 / r];
    let hz = radial_hessian(rk.d1, rk.d2, z, r);
    let p = pk_derivs(spec, z)?;
    let mut out = KernelDerivs {
        value: rk.value + p.value,
        grad_x: [ZERO; 2],
        grad_y: [ZERO; 2],
        mixed: [[ZERO; 2]; 2],
    };
    for i in 0..2 {
        let gz = rk.d1 * ghat[i] + p.grad[i];
        out.grad_x[i] = gz;
        out.grad_y[i] = gz * YSIGN[i];
        for j in 0..2 {
            out.mixed[i][j] = (hz[i][j] + p.hess[i][j]) * YSIGN[j];
        }
    }
    Ok(out)
}

/// `G^{(I)}(x, y; a) = Φ_k(x, y) + Φ_k(x, y_a') + P_k^±(x − y_a')`, using
/// direct quadrature for `P`.
pub fn impedance_green(spec: &HalfPlaneSpec, x: Point2, y: Point2) -> Result<ComplexVal> {
    spec.check(x, y)?;
    let img = ImagePoint::new(y, spec.a);
    let z = x - img.reflected;
    Ok(phi_k(x, y, spec.k)? + phi_k(x, img.reflected, spec.k)? + pk_correction(spec, z)?)
}

/// `∇_x G^{(I)}` or `∇_y G^{(I)}`: analytic for the two `Φ_k` terms, the
/// correction term from [`pk_derivs`].
pub fn impedance_green_gradient(
    spec: &HalfPlaneSpec,
    x: Point2,
    y: Point2,
    wrt: Wrt,
) -> Result<[ComplexVal; 2]> {
    spec.check(x, y)?;
    let free = crate::specfun::phi_k_gradient(x, y, spec.k, wrt)?;
    let img = image_terms(spec, x, y)?;
    let g = match wrt {
        Wrt::X => img.grad_x,
        Wrt::Y => img.grad_y,
    };
    Ok([free[0] + g[0], free[1] + g[1]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_matches_direct_quadrature() {
        let spec = HalfPlaneSpec::new(Side::Upper, 0.0, 1.0).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..40 {
            let rho = (XI_MIN + 0.01 + (XI_MAX - XI_MIN - 0.02) * (i as f64 * 0.618_034).fract()).exp();
            let sigma = (i as f64 * 0.414_214).fract();
            let z = Point2::new(rho * (1.0 - sigma * sigma).sqrt(), rho * sigma);
            let t = pk_derivs(&spec, z).unwrap().value;
            let d = pk_correction(&spec, z).unwrap();
            worst = worst.max((t - d).norm());
        }
        assert!(worst < 1e-10, "worst table error {worst:e}");
    }

    #[test]
    fn table_derivatives_match_finite_differences() {
        for side in [Side::Upper, Side::Lower] {
            let spec = HalfPlaneSpec::new(side, 0.0, 2.0).unwrap();
            let z = Point2::new(0.4, side.sign() * 0.7);
            let a = pk_derivs(&spec, z).unwrap();
            let b = pk_derivs_fd(&spec, z).unwrap();
            for i in 0..2 {
                assert!((a.grad[i] - b.grad[i]).norm() < 1e-7 * (1.0 + a.grad[i].norm()));
                for j in 0..2 {
                    assert!((a.hess[i][j] - b.hess[i][j]).norm() < 1e-5 * (1.0 + a.hess[i][j].norm()));
                }
            }
        }
    }

    #[test]
    fn zero_length_rejected() {
        let spec = HalfPlaneSpec::new(Side::Upper, 0.0, 1.0).unwrap();
        assert!(matches!(pk_correction(&spec, Point2::new(0.0, 0.0)), Err(Error::ZeroLength)));
    }

    #[test]
    fn side_violation_rejected() {
        let spec = HalfPlaneSpec::new(Side::Upper, 0.0, 1.0).unwrap();
        let r = dirichlet_green(&spec, Point2::new(0.0, 1.0), Point2::new(0.0, -1.0));
        assert!(matches!(r, Err(Error::SideViolation(_))));
    }
}
