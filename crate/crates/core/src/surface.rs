//! Interface geometry: graph profiles `x2 = f(x1)`, truncated quadrature
//! meshes with a smooth taper, and the strip heights `h_± `.
//!
//! Meshes live on a uniform grid in a computational variable `u`, mapped to
//! `x1 = τ(u)`. Without grading `τ(u) = u`; with grading
//! `τ(u) = c + b·asinh(q·sinh((u − c)/b))`, which shrinks the spacing by
//! the factor `q` near `x1 = c` and leaves it unchanged far away.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, gregory_end_weights, GREGORY_NODES};
use crate::specfun::Point2;

/// Profile description as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSpec {
    Flat {
        #[serde(default)]
        c: f64,
    },
    GaussianBump {
        h: f64,
        sigma: f64,
        #[serde(default)]
        center: f64,
    },
    DampedSine {
        h: f64,
        period: f64,
        decay: f64,
    },
    CustomSpline {
        x: Vec<f64>,
        f: Vec<f64>,
    },
}

/// Natural cubic spline through `(x_i, f_i)`, extended by its end values.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalSpline {
    x: Vec<f64>,
    f: Vec<f64>,
    /// second derivatives at the knots
    m: Vec<f64>,
}

impl NaturalSpline {
    pub fn new(x: &[f64], f: &[f64]) -> Result<Self> {
        let n = x.len();
        if n < 3 || f.len() != n {
            return Err(Error::InvalidParameter("spline needs at least 3 samples of equal length".into()));
        }
        if x.iter().chain(f).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("spline samples must be finite".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("spline abscissae must be strictly increasing".into()));
        }
        // tridiagonal system for interior second derivatives
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let a = h0 / 6.0;
            let b = (h0 + h1) / 3.0;
            let cc = h1 / 6.0;
            let r = (f[i + 1] - f[i]) / h1 - (f[i] - f[i - 1]) / h0;
            let denom = b - a * c[i - 1];
            c[i] = cc / denom;
            d[i] = (r - a * d[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        Ok(Self { x: x.to_vec(), f: f.to_vec(), m })
    }

    fn locate(&self, t: f64) -> usize {
        match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    /// `(f, f', f'')` at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let n = self.x.len();
        if t <= self.x[0] {
            return (self.f[0], 0.0, 0.0);
        }
        if t >= self.x[n - 1] {
            return (self.f[n - 1], 0.0, 0.0);
        }
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let v = a * self.f[i] + b * self.f[i + 1] + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (self.f[i + 1] - self.f[i]) / h + (-(3.0 * a * a - 1.0) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let d2 = a * m0 + b * m1;
        (v, d1, d2)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Flat(f64),
    Bump { h: f64, sigma: f64, center: f64 },
    Sine { h: f64, period: f64, decay: f64 },
    Spline(NaturalSpline),
}

/// The interface `x2 = f(x1)` with analytic derivatives and bounds
/// `f_minus ≤ f ≤ f_plus`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceProfile {
    shape: Shape,
    pub f_minus: f64,
    pub f_plus: f64,
    pub spec: ProfileSpec,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidParameter(format!("{name} must be finite and positive, got {v}")));
    }
    Ok(())
}

fn finite(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
    }
    Ok(())
}

pub fn make_profile(spec: &ProfileSpec) -> Result<SurfaceProfile> {
    let (shape, fm, fp) = match *spec {
        ProfileSpec::Flat { c } => {
            finite("c", c)?;
            (Shape::Flat(c), c, c)
        }
        ProfileSpec::GaussianBump { h, sigma, center } => {
            finite("h", h)?;
            finite("center", center)?;
            positive("sigma", sigma)?;
            (Shape::Bump { h, sigma, center }, h.min(0.0), h.max(0.0))
        }
        ProfileSpec::DampedSine { h, period, decay } => {
            finite("h", h)?;
            positive("period", period)?;
            positive("decay", decay)?;
            let shape = Shape::Sine { h, period, decay };
            let (lo, hi) = sampled_bounds(&shape, -4.0 * decay, 4.0 * decay);
            (shape, lo.min(0.0), hi.max(0.0))
        }
        ProfileSpec::CustomSpline { ref x, ref f } => {
            let s = NaturalSpline::new(x, f)?;
            let shape = Shape::Spline(s);
            let (lo, hi) = sampled_bounds(&shape, x[0], x[x.len() - 1]);
            (shape, lo, hi)
        }
    };
    Ok(SurfaceProfile { shape, f_minus: fm, f_plus: fp, spec: spec.clone() })
}

fn sampled_bounds(shape: &Shape, a: f64, b: f64) -> (f64, f64) {
    let n = 20_000;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..=n {
        let t = a + (b - a) * i as f64 / n as f64;
        let v = eval_shape(shape, t).0;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

fn eval_shape(shape: &Shape, t: f64) -> (f64, f64, f64) {
    match shape {
        Shape::Flat(c) => (*c, 0.0, 0.0),
        Shape::Bump { h, sigma, center } => {
            let s = (t - center) / sigma;
            let e = h * (-0.5 * s * s).exp();
            (e, -e * s / sigma, e * (s * s - 1.0) / (sigma * sigma))
        }
        Shape::Sine { h, period, decay } => {
            let w = 2.0 * std::f64::consts::PI / period;
            let g = (-(t / decay).powi(2)).exp();
            let dg = -2.0 * t / (decay * decay) * g;
            let ddg = (4.0 * t * t / decay.powi(4) - 2.0 / (decay * decay)) * g;
            let (sn, cs) = (w * t).sin_cos();
            (
                h * sn * g,
                h * (w * cs * g + sn * dg),
                h * (-w * w * sn * g + 2.0 * w * cs * dg + sn * ddg),
            )
        }
        Shape::Spline(s) => s.eval(t),
    }
}

impl SurfaceProfile {
    pub fn f(&self, x1: f64) -> f64 {
        eval_shape(&self.shape, x1).0
    }

    pub fn df(&self, x1: f64) -> f64 {
        eval_shape(&self.shape, x1).1
    }

    pub fn d2f(&self, x1: f64) -> f64 {
        eval_shape(&self.shape, x1).2
    }

    /// `(f, f', f'')` in one call.
    pub fn eval(&self, x1: f64) -> (f64, f64, f64) {
        eval_shape(&self.shape, x1)
    }

    pub fn point(&self, x1: f64) -> Point2 {
        Point2::new(x1, self.f(x1))
    }

    /// Unit normal pointing out of `D^+` (downward): `(f', −1)/√(1 + f'²)`.
    pub fn normal(&self, x1: f64) -> Point2 {
        let d = self.df(x1);
        let s = (1.0 + d * d).sqrt();
        Point2::new(d / s, -1.0 / s)
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.shape, Shape::Flat(_))
    }

    /// Signed height of `x` above the surface, `x2 − f(x1)`.
    pub fn height_above(&self, x: Point2) -> f64 {
        x.x2 - self.f(x.x1)
    }

    /// Distance from `x` to the graph, by Newton refinement of the foot
    /// point near `x1`. Returns `(distance, foot parameter)`.
    pub fn distance(&self, x: Point2) -> (f64, f64) {
        let mut t = x.x1;
        for _ in 0..50 {
            let (f, d1, d2) = self.eval(t);
            // minimise ½((t − x1)² + (f − x2)²)
            let g = (t - x.x1) + (f - x.x2) * d1;
            let h = 1.0 + d1 * d1 + (f - x.x2) * d2;
            let step = if h > 0.1 { g / h } else { g };
            let step = step.clamp(-0.5, 0.5);
            t -= step;
            if step.abs() < 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        let p = self.point(t);
        ((x - p).norm(), t)
    }
}

/// `h_± ` with `h_- = f^- − margin`, `h_+ = f^+ + margin`.
pub fn strip_heights(profile: &SurfaceProfile, margin: f64) -> Result<(f64, f64)> {
    positive("margin", margin)?;
    Ok((profile.f_minus - margin, profile.f_plus + margin))
}

/// Default strip margin `0.25(1 + f^+ − f^-)`.
pub fn default_margin(profile: &SurfaceProfile) -> f64 {
    0.25 * (1.0 + profile.f_plus - profile.f_minus)
}

// ---------------------------------------------------------------------------
// parameter map

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grading {
    /// `x1` at which the spacing is finest.
    pub center: f64,
    /// Spacing reduction factor `q ∈ (0, 1]`.
    pub ratio: f64,
    /// Transition length `b`.
    pub width: f64,
}

impl Grading {
    fn validate(&self) -> Result<()> {
        finite("grading center", self.center)?;
        positive("grading width", self.width)?;
        if !(self.ratio > 0.0 && self.ratio <= 1.0) {
            return Err(Error::InvalidParameter(format!("grading ratio must be in (0, 1], got {}", self.ratio)));
        }
        Ok(())
    }

    /// `x1 = τ(u)` and `τ'(u)`.
    pub fn map(&self, u: f64) -> (f64, f64) {
        let s = (u - self.center) / self.width;
        let q = self.ratio;
        let a = s.abs();
        if a > 30.0 {
            let ly = q.ln() + a - std::f64::consts::LN_2;
            if ly > 20.0 {
                return (self.center + s.signum() * self.width * (q.ln() + a), 1.0);
            }
        }
        let y = q * s.sinh();
        let x = self.center + self.width * y.asinh();
        let d = q * s.cosh() / (1.0 + y * y).sqrt();
        (x, d)
    }

    /// `u = τ^{-1}(x1)`.
    pub fn inverse(&self, x1: f64) -> f64 {
        let s = (x1 - self.center) / self.width;
        let q = self.ratio;
        let a = s.abs();
        if a > 30.0 {
            return self.center + s.signum() * self.width * (a - q.ln());
        }
        self.center + self.width * (s.sinh() / q).asinh()
    }
}

fn map_param(g: Option<&Grading>, u: f64) -> (f64, f64) {
    match g {
        Some(g) => g.map(u),
        None => (u, 1.0),
    }
}

fn inverse_param(g: Option<&Grading>, x1: f64) -> f64 {
    match g {
        Some(g) => g.inverse(x1),
        None => x1,
    }
}

// ---------------------------------------------------------------------------
// mesh

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QuadRule {
    #[default]
    Trapezoid,
    GaussPanels,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshSpec {
    /// Half-width `A` of the truncation window.
    pub a: f64,
    /// Half-width of the untapered core.
    pub a_core: f64,
    pub n: usize,
    #[serde(default)]
    pub rule: QuadRule,
    #[serde(default)]
    pub grading: Option<Grading>,
}

/// Shape parameter of the Kaiser-type taper.
pub const TAPER_BETA: f64 = 10.0;

fn kaiser_rate(t: f64) -> f64 {
    // I0(β√x) − 1 − β²x/4 with x = 4t(1 − t), a series in y = β²t(1 − t)
    let y = TAPER_BETA * TAPER_BETA * t * (1.0 - t);
    let mut term = y;
    let mut sum = 0.0;
    for m in 2..60 {
        term *= y / (m * m) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

fn kaiser_cumulative(t: f64) -> f64 {
    let (x, w) = gauss_legendre(48);
    x.iter().zip(&w).map(|(x, w)| 0.5 * t * w * kaiser_rate(0.5 * t * (x + 1.0))).sum()
}

/// Monotone `C²` step from 0 at `t ≤ 0` to 1 at `t ≥ 1`, the normalised
/// integral of a Kaiser-type window with its two lowest series terms
/// removed. Its spectrum is far smaller away from zero frequency than
/// that of the `exp(−1/t)` step, which keeps lateral waves excited by the
/// taper small.
pub fn smooth_step(t: f64) -> f64 {
    static TOTAL: std::sync::OnceLock<f64> = std::sync::OnceLock::new();
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let total = *TOTAL.get_or_init(|| kaiser_cumulative(1.0));
    if t > 0.5 {
        1.0 - kaiser_cumulative(1.0 - t) / total
    } else {
        kaiser_cumulative(t) / total
    }
}

/// Window taper: 1 on `[−A_core, A_core]`, 0 outside `(−A, A)`.
pub fn taper(x1: f64, a: f64, a_core: f64) -> f64 {
    1.0 - smooth_step((x1.abs() - a_core) / (a - a_core))
}

/// Quadrature mesh on the truncated surface `Γ(A)`.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub profile: SurfaceProfile,
    pub spec: MeshSpec,
    pub nodes: Vec<Point2>,
    /// `x1` of each node
    pub params: Vec<f64>,
    /// computational coordinate of each node
    pub u: Vec<f64>,
    /// quadrature weight × arclength Jacobian
    pub weights: Vec<f64>,
    /// unit normals out of `D^+`
    pub normals: Vec<Point2>,
    pub taper: Vec<f64>,
    /// `ds/du = τ'(u)·√(1 + f'²)`
    pub jac: Vec<f64>,
    /// `f''` at the nodes
    pub curv: Vec<f64>,
    /// grid step in `u` (trapezoid rule)
    pub h: f64,
    pub window: (f64, f64),
}

impl SurfaceMesh {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn grading(&self) -> Option<&Grading> {
        self.spec.grading.as_ref()
    }

    /// Geometry at computational coordinate `u`: point, downward normal,
    /// `ds/du`.
    pub fn geometry_at(&self, u: f64) -> (Point2, Point2, f64) {
        let (x1, dx) = map_param(self.grading(), u);
        let (f, d1, _) = self.profile.eval(x1);
        let s = (1.0 + d1 * d1).sqrt();
        (Point2::new(x1, f), Point2::new(d1 / s, -1.0 / s), dx * s)
    }

    pub fn u_of_param(&self, x1: f64) -> f64 {
        inverse_param(self.grading(), x1)
    }

    /// Local node spacing in arclength.
    pub fn spacing(&self, i: usize) -> f64 {
        self.h * self.jac[i]
    }

    /// Nearest node index to computational coordinate `u`.
    pub fn nearest_index(&self, u: f64) -> usize {
        let i = ((u - self.u[0]) / self.h).round();
        (i.max(0.0) as usize).min(self.len() - 1)
    }

    /// Interpolated taper at parameter `x1`.
    pub fn taper_at(&self, x1: f64) -> f64 {
        taper(x1, self.spec.a, self.spec.a_core)
    }
}

pub fn make_mesh(profile: &SurfaceProfile, spec: &MeshSpec) -> Result<SurfaceMesh> {
    positive("A", spec.a)?;
    positive("A_core", spec.a_core)?;
    if spec.a_core >= spec.a {
        return Err(Error::Window(format!("A_core ({}) must be smaller than A ({})", spec.a_core, spec.a)));
    }
    if spec.n < 16 {
        return Err(Error::DegenerateMesh(format!("N = {} < 16", spec.n)));
    }
    if let Some(g) = &spec.grading {
        g.validate()?;
    }
    let g = spec.grading.as_ref();
    let u0 = inverse_param(g, -spec.a);
    let u1 = inverse_param(g, spec.a);
    let n = spec.n;
    let (u, uw, h) = match spec.rule {
        QuadRule::Trapezoid => {
            let h = (u1 - u0) / (n - 1) as f64;
            let c = gregory_end_weights();
            let u: Vec<f64> = (0..n).map(|j| u0 + h * j as f64).collect();
            let w: Vec<f64> = (0..n)
                .map(|j| {
                    let mut e = 1.0;
                    if j < GREGORY_NODES {
                        e += c[j];
                    }
                    if n - 1 - j < GREGORY_NODES {
                        e += c[n - 1 - j];
                    }
                    h * e
                })
                .collect();
            (u, w, h)
        }
        QuadRule::GaussPanels => {
            let order = [16usize, 12, 10, 8]
                .into_iter()
                .find(|p| n % p == 0)
                .ok_or_else(|| Error::DegenerateMesh(format!("N = {n} is not a multiple of 8, 10, 12 or 16")))?;
            let panels = n / order;
            let (gx, gw) = gauss_legendre(order);
            let len = (u1 - u0) / panels as f64;
            let mut u = Vec::with_capacity(n);
            let mut w = Vec::with_capacity(n);
            for p in 0..panels {
                let a = u0 + p as f64 * len;
                for (x, wt) in gx.iter().zip(&gw) {
                    u.push(a + 0.5 * len * (x + 1.0));
                    w.push(0.5 * len * wt);
                }
            }
            (u, w, (u1 - u0) / (n - 1) as f64)
        }
    };
    let mut mesh = SurfaceMesh {
        profile: profile.clone(),
        spec: *spec,
        nodes: Vec::with_capacity(n),
        params: Vec::with_capacity(n),
        u: u.clone(),
        weights: Vec::with_capacity(n),
        normals: Vec::with_capacity(n),
        taper: Vec::with_capacity(n),
        jac: Vec::with_capacity(n),
        curv: Vec::with_capacity(n),
        h,
        window: (-spec.a, spec.a),
    };
    for (j, &uj) in u.iter().enumerate() {
        let (x1, dx) = map_param(g, uj);
        let (f, d1, d2) = profile.eval(x1);
        let s = (1.0 + d1 * d1).sqrt();
        mesh.nodes.push(Point2::new(x1, f));
        mesh.params.push(x1);
        mesh.normals.push(Point2::new(d1 / s, -1.0 / s));
        mesh.jac.push(dx * s);
        mesh.weights.push(uw[j] * dx * s);
        mesh.curv.push(d2);
        mesh.taper.push(taper(x1, spec.a, spec.a_core));
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spline_reproduces_cubic_interior_and_bounds() {
        let x: Vec<f64> = (0..41).map(|i| -2.0 + 0.1 * i as f64).collect();
        let f: Vec<f64> = x.iter().map(|t| (t * 1.3).sin()).collect();
        let p = make_profile(&ProfileSpec::CustomSpline { x: x.clone(), f }).unwrap();
        assert!((p.f(0.33) - (0.33f64 * 1.3).sin()).abs() < 1e-4);
        assert!((p.df(0.33) - 1.3 * (0.33f64 * 1.3).cos()).abs() < 1e-3);
        assert!(p.f_minus >= -1.0 && p.f_plus <= 1.0);
    }

    #[test]
    fn spline_rejects_unsorted() {
        let r = make_profile(&ProfileSpec::CustomSpline { x: vec![0.0, 2.0, 1.0], f: vec![0.0; 3] });
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn grading_roundtrip() {
        let g = Grading { center: 0.3, ratio: 0.05, width: 0.7 };
        for &x in &[-30.0, -1.0, 0.3, 0.31, 2.0, 45.0] {
            let u = g.inverse(x);
            let (y, d) = g.map(u);
            assert!((x - y).abs() < 1e-10 * (1.0 + x.abs()), "{x} {y}");
            let e = 1e-6;
            let fd = (g.map(u + e).0 - g.map(u - e).0) / (2.0 * e);
            assert!((fd - d).abs() < 1e-6);
        }
        assert!((g.map(g.inverse(0.3)).1 - 0.05).abs() < 1e-12);
    }

    #[test]
    fn distance_to_bump() {
        let p = make_profile(&ProfileSpec::GaussianBump { h: 0.3, sigma: 1.0, center: 0.0 }).unwrap();
        let x = Point2::new(0.0, -0.2);
        let (d, t) = p.distance(x);
        assert!((d - 0.5).abs() < 1e-12 && t.abs() < 1e-12);
    }

    #[test]
    fn taper_shape() {
        assert_eq!(taper(0.0, 10.0, 5.0), 1.0);
        assert_eq!(taper(5.0, 10.0, 5.0), 1.0);
        assert_eq!(taper(10.0, 10.0, 5.0), 0.0);
        assert!((taper(7.5, 10.0, 5.0) - 0.5).abs() < 1e-15);
        // C² at the ends: the step starts like t³
        let (a, b) = (smooth_step(1e-3), smooth_step(2e-3));
        assert!((b / a - 8.0).abs() < 0.1);
        let mut last = 0.0;
        for i in 1..100 {
            let v = smooth_step(i as f64 / 100.0);
            assert!(v > last);
            assert!((v + smooth_step(1.0 - i as f64 / 100.0) - 1.0).abs() < 1e-14);
            last = v;
        }
    }
}
