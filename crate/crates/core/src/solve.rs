//! Direct problem: admissibility gate, incident traces, the linear solve
//! for the densities, and field evaluation through the layer-potential
//! representation
//!
//! `u_+ = D⁺φ + S⁺ψ` in `D^+`, `u_- = μ⁻¹(D⁻φ + S⁻ψ)` in `D^-`.

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bie::{assemble_m, layer_rows, matvec, LayerRows, MediumSide, NearOptions, OpTag, OperatorKind, Quadrature, SystemMatrix};
use crate::error::{Error, Result};
use crate::halfplane_green::{HalfPlaneSpec, Side};
use crate::specfun::{phi_k, phi_k_gradient, phi_k_hessian, ComplexVal, Point2, Wrt};
use crate::surface::SurfaceMesh;

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);
const I: C = C::new(0.0, 1.0);

/// Wavenumbers, transmission coefficient and strip heights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    pub k_plus: f64,
    pub k_minus: f64,
    pub mu: f64,
    pub h_minus: f64,
    pub h_plus: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum Admissibility {
    Admissible,
    Inadmissible(String),
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible)
    }
}

impl MediumParams {
    pub fn new(k_plus: f64, k_minus: f64, mu: f64, h_minus: f64, h_plus: f64) -> Result<Self> {
        for (name, v) in [("k_plus", k_plus), ("k_minus", k_minus), ("mu", mu)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and positive, got {v}")));
            }
        }
        if !(h_minus.is_finite() && h_plus.is_finite() && h_minus < h_plus) {
            return Err(Error::InvalidParameter(format!("strip heights must satisfy h_- < h_+ (got {h_minus}, {h_plus})")));
        }
        Ok(Self { k_plus, k_minus, mu, h_minus, h_plus })
    }

    /// Kernel half planes `(U_{h_-}^+ with k_+, U_{h_+}^- with k_-)`.
    pub fn half_planes(&self) -> (HalfPlaneSpec, HalfPlaneSpec) {
        (
            HalfPlaneSpec { side: Side::Upper, a: self.h_minus, k: self.k_plus },
            HalfPlaneSpec { side: Side::Lower, a: self.h_plus, k: self.k_minus },
        )
    }

    /// `(plus, minus)` operator descriptors for `tag`.
    pub fn operator_kinds(&self, tag: OpTag) -> (OperatorKind, OperatorKind) {
        (
            OperatorKind { tag, side: MediumSide::Plus, k: self.k_plus, strip_height: self.h_minus },
            OperatorKind { tag, side: MediumSide::Minus, k: self.k_minus, strip_height: self.h_plus },
        )
    }
}

/// The uniqueness condition `(μ − 1)(k_+² − k_-²μ) ≥ 0`, `k_+² ≠ k_-²μ`.
pub fn admissibility_check(k_plus: f64, k_minus: f64, mu: f64) -> Admissibility {
    let kp2 = k_plus * k_plus;
    let km2mu = k_minus * k_minus * mu;
    if kp2 == km2mu {
        return Admissibility::Inadmissible(format!(
            "k_+^2 = k_-^2 mu ({kp2} = {km2mu}); the condition requires k_+^2 != k_-^2 mu"
        ));
    }
    let prod = (mu - 1.0) * (kp2 - km2mu);
    if prod < 0.0 {
        return Admissibility::Inadmissible(format!(
            "(mu - 1)(k_+^2 - k_-^2 mu) = {prod} < 0; the condition requires it to be >= 0"
        ));
    }
    Admissibility::Admissible
}

/// Incident wave in `D^+`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IncidentField {
    /// `e^{ik_+ x·d}` with `d2 < 0`.
    PlaneWave { d: Point2 },
    /// `Φ_{k_+}(x, y)`.
    PointSource { y: Point2 },
    /// `∇_xΦ_{k_+}(x, y)·direction`.
    Hypersingular { y: Point2, direction: Point2 },
}

impl IncidentField {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: Point2, name: &str| {
            if !v.is_finite() || (v.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!("{name} must be a unit vector")));
            }
            Ok(())
        };
        match *self {
            IncidentField::PlaneWave { d } => {
                unit(d, "plane-wave direction")?;
                if d.x2 >= 0.0 {
                    return Err(Error::InvalidParameter("plane-wave direction must point downward (d2 < 0)".into()));
                }
            }
            IncidentField::PointSource { y } => {
                if !y.is_finite() {
                    return Err(Error::InvalidParameter("source location must be finite".into()));
                }
            }
            IncidentField::Hypersingular { y, direction } => {
                if !y.is_finite() {
                    return Err(Error::InvalidParameter("source location must be finite".into()));
                }
                unit(direction, "hypersingular direction")?;
            }
        }
        Ok(())
    }

    fn is_tapered(&self) -> bool {
        matches!(self, IncidentField::PlaneWave { .. })
    }

    /// `u^i(x)`.
    pub fn value(&self, x: Point2, k: f64) -> Result<ComplexVal> {
        match *self {
            IncidentField::PlaneWave { d } => Ok(C::from_polar(1.0, k * x.dot(d))),
            IncidentField::PointSource { y } => phi_k(x, y, k),
            IncidentField::Hypersingular { y, direction } => {
                let g = phi_k_gradient(x, y, k, Wrt::X)?;
                Ok(g[0] * direction.x1 + g[1] * direction.x2)
            }
        }
    }

    /// `∇u^i(x)`.
    pub fn gradient(&self, x: Point2, k: f64) -> Result<[ComplexVal; 2]> {
        match *self {
            IncidentField::PlaneWave { d } => {
                let v = C::from_polar(1.0, k * x.dot(d)) * I * k;
                Ok([v * d.x1, v * d.x2])
            }
            IncidentField::PointSource { y } => phi_k_gradient(x, y, k, Wrt::X),
            IncidentField::Hypersingular { y, direction } => {
                let h = phi_k_hessian(x, y, k)?;
                Ok([
                    h[0][0] * direction.x1 + h[0][1] * direction.x2,
                    h[1][0] * direction.x1 + h[1][1] * direction.x2,
                ])
            }
        }
    }

    fn source(&self) -> Option<Point2> {
        match *self {
            IncidentField::PlaneWave { .. } => None,
            IncidentField::PointSource { y } | IncidentField::Hypersingular { y, .. } => Some(y),
        }
    }
}

/// Minimum distance of a point source from the surface.
pub const SOURCE_MIN_DISTANCE: f64 = 1e-6;

/// TSP data `g1 = −u^i|_Γ`, `g2 = −∂_n u^i|_Γ` at the mesh nodes, tapered
/// for plane waves.
pub fn incident_traces(inc: &IncidentField, mesh: &SurfaceMesh, k_plus: f64) -> Result<(Vec<C>, Vec<C>)> {
    inc.validate()?;
    if let Some(y) = inc.source() {
        let (dist, _) = mesh.profile.distance(y);
        if dist < SOURCE_MIN_DISTANCE {
            return Err(Error::SourceOnSurface { distance: dist });
        }
    }
    let n = mesh.len();
    let mut g1 = Vec::with_capacity(n);
    let mut g2 = Vec::with_capacity(n);
    for i in 0..n {
        let x = mesh.nodes[i];
        let t = if inc.is_tapered() { mesh.taper[i] } else { 1.0 };
        let u = inc.value(x, k_plus)?;
        let g = inc.gradient(x, k_plus)?;
        let nrm = mesh.normals[i];
        g1.push(-u * t);
        g2.push(-(g[0] * nrm.x1 + g[1] * nrm.x2) * t);
    }
    Ok((g1, g2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityPair {
    pub phi: Vec<C>,
    pub psi: Vec<C>,
}

impl DensityPair {
    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    fn from_stacked(x: &[C], n: usize) -> Self {
        Self { phi: x[..n].to_vec(), psi: x[n..].to_vec() }
    }

    pub fn stacked(&self) -> Vec<C> {
        self.phi.iter().chain(&self.psi).copied().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum LinearSolver {
    Lu,
    Gmres { tol: f64, restart: usize },
}

impl Default for LinearSolver {
    fn default() -> Self {
        LinearSolver::Lu
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    /// `‖Mχ − G‖₂ / ‖G‖₂`
    pub residual: f64,
    /// Estimated 1-norm condition number (LU only).
    pub condition_estimate: Option<f64>,
    pub iterations: usize,
}

/// Pivots smaller than this times the largest entry signal singularity.
pub const PIVOT_TOL: f64 = 1e-13;

/// LU factorisation of `M`, reusable for many right-hand sides.
pub struct DirectSolver {
    lu: PartialPivLu<C>,
    n: usize,
    pub condition_estimate: f64,
}

fn norm2(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn one_norm(m: faer::MatRef<'_, C>) -> f64 {
    (0..m.ncols()).map(|j| (0..m.nrows()).map(|i| m[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
}

impl DirectSolver {
    pub fn new(matrix: &SystemMatrix) -> Result<Self> {
        let a = matrix.mat.as_ref();
        let scale = (0..a.ncols())
            .flat_map(|j| (0..a.nrows()).map(move |i| (i, j)))
            .map(|(i, j)| a[(i, j)].norm())
            .fold(0.0, f64::max);
        let lu = a.partial_piv_lu();
        let u = lu.U();
        let pivot = (0..u.nrows()).map(|i| u[(i, i)].norm()).fold(f64::INFINITY, f64::min);
        if !(pivot > PIVOT_TOL * scale) {
            return Err(Error::SingularMatrix { pivot, scale });
        }
        let n = a.nrows();
        let mut s = Self { lu, n, condition_estimate: f64::NAN };
        s.condition_estimate = one_norm(a) * s.inverse_one_norm_estimate();
        Ok(s)
    }

    pub fn solve_vec(&self, b: &[C]) -> Vec<C> {
        let mut x = Mat::<C>::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_in_place(x.as_mut());
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }

    fn solve_adjoint_vec(&self, b: &[C]) -> Vec<C> {
        let mut x = Mat::<C>::from_fn(self.n, 1, |i, _| b[i]);
        self.lu.solve_adjoint_in_place(x.as_mut());
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }

    /// Hager–Higham estimate of `‖M⁻¹‖₁`.
    fn inverse_one_norm_estimate(&self) -> f64 {
        let n = self.n;
        let mut x = vec![C::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve_vec(&x);
            est = y.iter().map(|z| z.norm()).sum::<f64>();
            let xi: Vec<C> = y.iter().map(|z| if z.norm() > 0.0 { z / z.norm() } else { C::new(1.0, 0.0) }).collect();
            let z = self.solve_adjoint_vec(&xi);
            let (j, zmax) = z.iter().enumerate().fold((0, 0.0), |acc, (i, v)| if v.norm() > acc.1 { (i, v.norm()) } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x = vec![ZERO; n];
            x[j] = C::new(1.0, 0.0);
        }
        est
    }
}

/// Restarted GMRES with modified Gram–Schmidt Arnoldi.
pub fn gmres(a: faer::MatRef<'_, C>, b: &[C], tol: f64, restart: usize, max_iter: usize) -> Result<(Vec<C>, usize, f64)> {
    let n = b.len();
    let bnorm = norm2(b);
    let mut x = vec![ZERO; n];
    if bnorm == 0.0 {
        return Ok((x, 0, 0.0));
    }
    let m = restart.max(1);
    let mut total = 0;
    loop {
        let ax = matvec(a, &x);
        let r: Vec<C> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let beta = norm2(&r);
        if beta / bnorm <= tol {
            return Ok((x, total, beta / bnorm));
        }
        if total >= max_iter {
            return Err(Error::NotConverged { tol, residual: beta / bnorm });
        }
        let mut v: Vec<Vec<C>> = vec![r.iter().map(|z| z / beta).collect()];
        let mut h = vec![vec![ZERO; m]; m + 1];
        let mut cs = vec![ZERO; m];
        let mut sn = vec![ZERO; m];
        let mut g = vec![ZERO; m + 1];
        g[0] = C::new(beta, 0.0);
        let mut k_used = 0;
        for k in 0..m {
            let mut w = matvec(a, &v[k]);
            for (i, vi) in v.iter().enumerate() {
                let hik: C = vi.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                h[i][k] = hik;
                for (wj, vj) in w.iter_mut().zip(vi) {
                    *wj -= hik * vj;
                }
            }
            let hn = norm2(&w);
            h[k + 1][k] = C::new(hn, 0.0);
            for i in 0..k {
                let t = cs[i].conj() * h[i][k] + sn[i].conj() * h[i + 1][k];
                h[i + 1][k] = -sn[i] * h[i][k] + cs[i] * h[i + 1][k];
                h[i][k] = t;
            }
            let den = (h[k][k].norm_sqr() + h[k + 1][k].norm_sqr()).sqrt();
            if den == 0.0 {
                k_used = k;
                break;
            }
            cs[k] = h[k][k] / den;
            sn[k] = h[k + 1][k] / den;
            h[k][k] = C::new(den, 0.0);
            h[k + 1][k] = ZERO;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k].conj() * g[k];
            total += 1;
            k_used = k + 1;
            if g[k + 1].norm() / bnorm <= tol || hn == 0.0 || total >= max_iter {
                break;
            }
            v.push(w.iter().map(|z| z / hn).collect());
        }
        // back substitution
        let mut y = vec![ZERO; k_used];
        for i in (0..k_used).rev() {
            let s: C = (i + 1..k_used).map(|j| h[i][j] * y[j]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&v[j]) {
                *xi += yj * vi;
            }
        }
    }
}

fn check_rhs(matrix: &SystemMatrix, g1: &[C], g2: &[C]) -> Result<()> {
    if g1.len() != matrix.n || g2.len() != matrix.n {
        return Err(Error::Dimension(format!("rhs lengths {}, {} vs N = {}", g1.len(), g2.len(), matrix.n)));
    }
    Ok(())
}

fn relative_residual(matrix: &SystemMatrix, x: &[C], b: &[C]) -> f64 {
    let ax = matvec(matrix.mat.as_ref(), x);
    let r: Vec<C> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let bn = norm2(b);
    if bn == 0.0 {
        norm2(&r)
    } else {
        norm2(&r) / bn
    }
}

/// Solve `Mχ = (g1, g2)`.
pub fn solve_densities(matrix: &SystemMatrix, g1: &[C], g2: &[C], solver: LinearSolver) -> Result<(DensityPair, SolveDiagnostics)> {
    check_rhs(matrix, g1, g2)?;
    let b: Vec<C> = g1.iter().chain(g2).copied().collect();
    match solver {
        LinearSolver::Lu => {
            let lu = DirectSolver::new(matrix)?;
            let x = lu.solve_vec(&b);
            let residual = relative_residual(matrix, &x, &b);
            Ok((
                DensityPair::from_stacked(&x, matrix.n),
                SolveDiagnostics { residual, condition_estimate: Some(lu.condition_estimate), iterations: 0 },
            ))
        }
        LinearSolver::Gmres { tol, restart } => {
            let (x, it, _) = gmres(matrix.mat.as_ref(), &b, tol, restart, 20 * matrix.dim())?;
            let residual = relative_residual(matrix, &x, &b);
            Ok((DensityPair::from_stacked(&x, matrix.n), SolveDiagnostics { residual, condition_estimate: None, iterations: it }))
        }
    }
}

impl DirectSolver {
    /// Solve for one right-hand side and report the residual.
    pub fn solve(&self, matrix: &SystemMatrix, g1: &[C], g2: &[C]) -> Result<(DensityPair, SolveDiagnostics)> {
        check_rhs(matrix, g1, g2)?;
        let b: Vec<C> = g1.iter().chain(g2).copied().collect();
        let x = self.solve_vec(&b);
        let residual = relative_residual(matrix, &x, &b);
        Ok((
            DensityPair::from_stacked(&x, matrix.n),
            SolveDiagnostics { residual, condition_estimate: Some(self.condition_estimate), iterations: 0 },
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Plus,
    Minus,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Plus => "plus",
            Region::Minus => "minus",
        }
    }
}

/// A solved scattering problem.
#[derive(Debug, Clone)]
pub struct ScatterSolution {
    pub densities: DensityPair,
    pub mesh: SurfaceMesh,
    pub params: MediumParams,
    pub incident: IncidentField,
    pub diagnostics: SolveDiagnostics,
}

/// Assemble, solve and package a scattering problem.
pub fn solve_scattering(
    mesh: &SurfaceMesh,
    params: &MediumParams,
    incident: &IncidentField,
    quad: Quadrature,
    solver: LinearSolver,
) -> Result<ScatterSolution> {
    let m = assemble_m(mesh, params, quad)?;
    let (g1, g2) = incident_traces(incident, mesh, params.k_plus)?;
    let (densities, diagnostics) = solve_densities(&m, &g1, &g2, solver)?;
    Ok(ScatterSolution { densities, mesh: mesh.clone(), params: *params, incident: *incident, diagnostics })
}

/// Which side of the surface `x` lies on.
pub fn region_of(mesh: &SurfaceMesh, x: Point2) -> Region {
    if mesh.profile.height_above(x) > 0.0 {
        Region::Plus
    } else {
        Region::Minus
    }
}

/// Evaluation rows for the field at `x`, already scaled by `μ⁻¹` in `D^-`.
pub fn field_rows(mesh: &SurfaceMesh, params: &MediumParams, x: Point2, dir: Option<Point2>, opts: &NearOptions) -> Result<(Region, LayerRows)> {
    let region = region_of(mesh, x);
    let (sp, sm) = params.half_planes();
    let mut rows = match region {
        Region::Plus => layer_rows(mesh, &sp, x, dir, opts)?,
        Region::Minus => layer_rows(mesh, &sm, x, dir, opts)?,
    };
    if region == Region::Minus {
        let s = 1.0 / params.mu;
        for v in rows.d.iter_mut().chain(rows.s.iter_mut()) {
            *v *= s;
        }
        for v in rows.dd.iter_mut().flatten().chain(rows.ds.iter_mut().flatten()) {
            *v *= s;
        }
    }
    Ok((region, rows))
}

/// `u_+(x)` (scattered) in `D^+` or `u_-(x)` (transmitted) in `D^-`.
pub fn evaluate_field(sol: &ScatterSolution, x: Point2) -> Result<(ComplexVal, Region)> {
    evaluate_field_with(sol, x, &NearOptions::default())
}

pub fn evaluate_field_with(sol: &ScatterSolution, x: Point2, opts: &NearOptions) -> Result<(ComplexVal, Region)> {
    let (region, rows) = field_rows(&sol.mesh, &sol.params, x, None, opts)?;
    Ok((rows.apply(&sol.densities.phi, &sol.densities.psi), region))
}

/// Rectangular evaluation grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x1_min: f64,
    pub x1_max: f64,
    pub x2_min: f64,
    pub x2_max: f64,
    pub n1: usize,
    pub n2: usize,
    /// Mask points closer to the surface than this many local spacings.
    #[serde(default = "default_mask")]
    pub mask_spacings: f64,
}

fn default_mask() -> f64 {
    3.0
}

impl GridSpec {
    pub fn points(&self) -> Vec<Point2> {
        let lin = |a: f64, b: f64, n: usize, i: usize| if n <= 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
        let mut out = Vec::with_capacity(self.n1 * self.n2);
        for i2 in 0..self.n2 {
            for i1 in 0..self.n1 {
                out.push(Point2::new(lin(self.x1_min, self.x1_max, self.n1, i1), lin(self.x2_min, self.x2_max, self.n2, i2)));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub x: Point2,
    pub u: ComplexVal,
    pub region: Region,
    pub masked: bool,
}

/// Row-major field table over `grid` (`x1` fastest); points inside the
/// masking tube are flagged and left at zero.
pub fn evaluate_field_grid(sol: &ScatterSolution, grid: &GridSpec) -> Result<Vec<FieldSample>> {
    let pts = grid.points();
    let opts = NearOptions::default();
    let res: Vec<Result<FieldSample>> = crate::par::map_range(0, pts.len(), &|i| {
        let x = pts[i];
        let region = region_of(&sol.mesh, x);
        let (dist, foot) = sol.mesh.profile.distance(x);
        let idx = sol.mesh.nearest_index(sol.mesh.u_of_param(foot));
        if dist < grid.mask_spacings * sol.mesh.spacing(idx) {
            return Ok(FieldSample { x, u: ZERO, region, masked: true });
        }
        let (u, region) = evaluate_field_with(sol, x, &opts)?;
        Ok(FieldSample { x, u, region, masked: false })
    });
    res.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility_examples() {
        assert_eq!(admissibility_check(3.0, 1.0, 2.0), Admissibility::Admissible);
        assert_eq!(admissibility_check(1.0, 2.0, 1.0), Admissibility::Admissible);
        assert!(!admissibility_check(2.0, 2.0, 1.0).is_admissible());
        // (μ−1) < 0 with k_+² > k_-²μ
        match admissibility_check(2.0, 1.0, 0.5) {
            Admissibility::Inadmissible(r) => assert!(r.contains(">= 0")),
            _ => panic!(),
        }
    }

    #[test]
    fn gmres_solves_small_system() {
        let n = 30;
        let a = Mat::<C>::from_fn(n, n, |i, j| {
            if i == j {
                C::new(2.0, 0.5)
            } else {
                C::new(0.3 / (1.0 + (i as f64 - j as f64).abs()), 0.1 * ((i * j) % 3) as f64 / n as f64)
            }
        });
        let b: Vec<C> = (0..n).map(|i| C::new(i as f64, 1.0)).collect();
        let (x, _, res) = gmres(a.as_ref(), &b, 1e-12, 10, 1000).unwrap();
        let ax = matvec(a.as_ref(), &x);
        let err: f64 = ax.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9 && res < 1e-12);
    }

    #[test]
    fn plane_wave_must_point_down() {
        let inc = IncidentField::PlaneWave { d: Point2::new(0.0, 1.0) };
        assert!(inc.validate().is_err());
    }
}
