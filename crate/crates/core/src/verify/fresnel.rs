//! Closed-form reflection and transmission of a plane wave at a flat
//! interface, and the full-pipeline comparison against it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bie::{NearOptions, Quadrature};
use crate::error::{Error, Result};
use super::{Check, SuiteReport, Table};
use crate::solve::{evaluate_field_with, solve_scattering, IncidentField, LinearSolver, MediumParams, Region};
use crate::specfun::{ComplexVal, Point2};
use crate::surface::{make_mesh, make_profile, MeshSpec, ProfileSpec, QuadRule};

type C = Complex64;
const I: C = C::new(0.0, 1.0);

// ---------------------------------------------------------------------------
// Fresnel oracle

/// Closed-form reflected and transmitted plane waves for `f ≡ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FresnelSolution {
    pub r: ComplexVal,
    pub t: ComplexVal,
    pub alpha: f64,
    pub beta: ComplexVal,
    pub evanescent: bool,
    pub k_plus: f64,
    pub mu: f64,
    pub d: Point2,
}

pub fn fresnel_flat(k_plus: f64, k_minus: f64, mu: f64, d: Point2) -> Result<FresnelSolution> {
    if (d.norm() - 1.0).abs() > 1e-12 || d.x2 >= 0.0 {
        return Err(Error::InvalidParameter("direction must be a unit vector with d2 < 0".into()));
    }
    let alpha = -k_plus * d.x2;
    if alpha < 1e-12 {
        return Err(Error::GrazingIncidence { alpha });
    }
    let disc = k_minus * k_minus - (k_plus * d.x1).powi(2);
    let beta = C::new(disc, 0.0).sqrt();
    let beta = if beta.im < 0.0 { -beta } else { beta };
    let den = alpha + mu * beta;
    Ok(FresnelSolution {
        r: (alpha - mu * beta) / den,
        t: C::new(2.0 * alpha, 0.0) / den,
        alpha,
        beta,
        evanescent: disc < 0.0,
        k_plus,
        mu,
        d,
    })
}

impl FresnelSolution {
    /// Scattered field `u_+` above the interface.
    pub fn scattered(&self, x: Point2) -> ComplexVal {
        self.r * (I * self.k_plus * (self.d.x1 * x.x1 - self.d.x2 * x.x2)).exp()
    }

    /// Transmitted field `u_-` below the interface.
    pub fn transmitted(&self, x: Point2) -> ComplexVal {
        self.t * (I * (self.k_plus * self.d.x1 * x.x1) - I * self.beta * x.x2).exp()
    }

    pub fn field(&self, x: Point2) -> (ComplexVal, Region) {
        if x.x2 > 0.0 {
            (self.scattered(x), Region::Plus)
        } else {
            (self.transmitted(x), Region::Minus)
        }
    }

    /// `|1 + R − T|`.
    pub fn continuity_residual(&self) -> f64 {
        (1.0 + self.r - self.t).norm()
    }

    /// `|α(1 − R) − μβT|`.
    pub fn flux_matching_residual(&self) -> f64 {
        (self.alpha * (1.0 - self.r) - self.mu * self.beta * self.t).norm()
    }

    /// `|α(1 − |R|²) − μβ|T|²|` for propagating transmission.
    pub fn energy_residual(&self) -> Option<f64> {
        if self.evanescent {
            return None;
        }
        Some((self.alpha * (1.0 - self.r.norm_sqr()) - self.mu * self.beta.re * self.t.norm_sqr()).abs())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FresnelRun {
    pub n: usize,
    pub max_rel_error: f64,
    /// Largest change of the probe fields relative to the previous `N`.
    pub self_difference: Option<f64>,
    pub residual: f64,
    pub condition_estimate: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FresnelReport {
    pub runs: Vec<FresnelRun>,
    /// Least-squares slope of `−log(self difference)` against `log N`.
    pub order: Option<f64>,
    pub energy_residual: Option<f64>,
    pub continuity_residual: f64,
    pub flux_matching_residual: f64,
}

/// Probe set inside the taper core: nine abscissae over
/// `[−A_core/2, A_core/2]` at heights `±{0.25, 0.5, 1, 2}`.
pub fn fresnel_probe_points(a_core: f64) -> Vec<Point2> {
    let mut pts = vec![];
    let half = 0.5 * a_core;
    for i in 0..=8 {
        let x1 = -half + 2.0 * half * i as f64 / 8.0;
        for h in [0.25, 0.5, 1.0, 2.0] {
            pts.push(Point2::new(x1, h));
            pts.push(Point2::new(x1, -h));
        }
    }
    pts
}

/// Solve the flat problem and return the fields at `probes`.
pub fn flat_plane_wave_fields(params: &MediumParams, d: Point2, n: usize, a: f64, a_core: f64, probes: &[Point2]) -> Result<(Vec<C>, f64, Option<f64>)> {
    let profile = make_profile(&ProfileSpec::Flat { c: 0.0 })?;
    let mesh = make_mesh(&profile, &MeshSpec { a, a_core, n, rule: QuadRule::Trapezoid, grading: None })?;
    let sol = solve_scattering(&mesh, params, &IncidentField::PlaneWave { d }, Quadrature::default(), LinearSolver::Lu)?;
    let opts = NearOptions::default();
    let u = probes.iter().map(|&x| evaluate_field_with(&sol, x, &opts).map(|v| v.0)).collect::<Result<Vec<_>>>()?;
    Ok((u, sol.diagnostics.residual, sol.diagnostics.condition_estimate))
}

/// Least-squares convergence order from `(N, err)` pairs.
pub fn convergence_order(ns: &[usize], errs: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ns.iter().zip(errs).filter(|(_, e)| **e > 0.0).map(|(n, e)| ((*n as f64).ln(), -e.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(num / den)
}

/// Full-pipeline Fresnel comparison over an `N` sweep. The convergence
/// order is measured by self-convergence of the probe fields, which
/// removes the truncation error common to all `N`.
pub fn run_fresnel_acceptance(params: &MediumParams, d: Point2, ns: &[usize], a: f64, a_core: f64) -> Result<FresnelReport> {
    let oracle = fresnel_flat(params.k_plus, params.k_minus, params.mu, d)?;
    let probes = fresnel_probe_points(a_core);
    let exact: Vec<C> = probes.iter().map(|&x| oracle.field(x).0).collect();
    let scale = exact.iter().map(|e| e.norm()).fold(0.0, f64::max);
    let mut runs: Vec<FresnelRun> = vec![];
    let mut prev: Option<Vec<C>> = None;
    for &n in ns {
        let (u, residual, cond) = flat_plane_wave_fields(params, d, n, a, a_core, &probes)?;
        let err = u.iter().zip(&exact).map(|(u, e)| (u - e).norm() / e.norm()).fold(0.0, f64::max);
        let self_difference = prev.as_ref().map(|p| p.iter().zip(&u).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale);
        runs.push(FresnelRun { n, max_rel_error: err, self_difference, residual, condition_estimate: cond });
        prev = Some(u);
    }
    let (sn, sd): (Vec<usize>, Vec<f64>) = runs.iter().filter_map(|r| r.self_difference.map(|s| (r.n, s))).unzip();
    Ok(FresnelReport {
        order: convergence_order(&sn, &sd),
        runs,
        energy_residual: oracle.energy_residual(),
        continuity_residual: oracle.continuity_residual(),
        flux_matching_residual: oracle.flux_matching_residual(),
    })
}

/// Tolerances of the Fresnel acceptance run.
pub const FRESNEL_FIELD_TOL: f64 = 1e-3;
pub const FRESNEL_ORDER_MIN: f64 = 2.0;
pub const FRESNEL_ENERGY_TOL: f64 = 1e-12;

/// The `fresnel` suite: oracle algebra plus the pipeline comparison.
pub fn fresnel_suite(params: &MediumParams, d: Point2, ns: &[usize], a: f64, a_core: f64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("fresnel");
    let r = run_fresnel_acceptance(params, d, ns, a, a_core)?;
    let last = r.runs.last().ok_or_else(|| Error::InvalidParameter("empty N sweep".into()))?;
    rep.checks.push(Check::le(format!("field_error_N{}", last.n), last.max_rel_error, FRESNEL_FIELD_TOL));
    if ns.len() >= 3 {
        rep.checks.push(Check::ge("convergence_order", r.order.unwrap_or(f64::NAN), FRESNEL_ORDER_MIN));
    }
    rep.checks.push(Check::le("oracle_continuity", r.continuity_residual, FRESNEL_ENERGY_TOL));
    rep.checks.push(Check::le("oracle_flux_matching", r.flux_matching_residual, FRESNEL_ENERGY_TOL));
    if let Some(e) = r.energy_residual {
        rep.checks.push(Check::le("oracle_energy", e, FRESNEL_ENERGY_TOL));
    }
    for run in &r.runs {
        rep.checks.push(Check::le(format!("residual_N{}", run.n), run.residual, 1e-10));
    }
    let mut t = Table::new("fresnel_sweep", &["n", "max_rel_error", "self_difference", "residual", "condition_estimate"]);
    for run in &r.runs {
        t.push(vec![run.n as f64, run.max_rel_error, run.self_difference.unwrap_or(f64::NAN), run.residual, run.condition_estimate.unwrap_or(f64::NAN)]);
    }
    rep.tables.push(t);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_amplitudes() {
        let s = fresnel_flat(3.0, 1.0, 2.0, Point2::new(0.0, -1.0)).unwrap();
        assert!((s.r - 0.2).norm() < 1e-15 && (s.t - 1.2).norm() < 1e-15);
        assert!(s.energy_residual().unwrap() < 1e-12);
    }

    #[test]
    fn matched_media_do_not_reflect() {
        let d = Point2::new(0.6, -0.8);
        let s = fresnel_flat(2.0, 2.0, 1.0, d).unwrap();
        assert!(s.r.norm() < 1e-15 && (s.t - 1.0).norm() < 1e-15);
    }

    #[test]
    fn evanescent_transmission_decays() {
        let d = Point2::new(0.8, -0.6);
        let s = fresnel_flat(3.0, 1.0, 2.0, d).unwrap();
        assert!(s.evanescent && s.beta.im > 0.0);
        let a: Vec<f64> = [-0.5, -1.0, -2.0].iter().map(|&x2| s.transmitted(Point2::new(0.3, x2)).norm()).collect();
        assert!(a[0] > a[1] && a[1] > a[2]);
        assert!(s.flux_matching_residual() < 1e-12 && s.continuity_residual() < 1e-15);
    }

    #[test]
    fn grazing_incidence_rejected() {
        let d = Point2::new(1.0, -1e-14);
        let d = Point2::new(d.x1 / d.norm(), d.x2 / d.norm());
        assert!(matches!(fresnel_flat(1.0, 1.0, 1.0, d), Err(Error::GrazingIncidence { .. })));
    }
}
