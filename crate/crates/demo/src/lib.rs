//! Browser bindings: admissibility, the flat-interface Fresnel pair, and a
//! small rough-surface solve rendered as a field map.

use roughwave::bie::Quadrature;
use roughwave::solve::{
    admissibility_check, evaluate_field_grid, solve_scattering, Admissibility, GridSpec, IncidentField, LinearSolver, MediumParams, Region,
};
use roughwave::surface::{default_margin, make_mesh, make_profile, strip_heights, MeshSpec, ProfileSpec, QuadRule};
use roughwave::verify::fresnel_flat;
use roughwave::Point2;
use wasm_bindgen::prelude::*;

// truncation window (A, A_core); a shorter one leaves a visible ripple
// in the transmitted amplitude
const WINDOW: (f64, f64) = (40.0, 20.0);

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn direction(theta_deg: f64) -> Point2 {
    // angle from the downward vertical
    let t = theta_deg.to_radians();
    Point2::new(t.sin(), -t.cos())
}

/// `""` when admissible, otherwise the reason.
#[wasm_bindgen]
pub fn admissibility(k_plus: f64, k_minus: f64, mu: f64) -> String {
    match admissibility_check(k_plus, k_minus, mu) {
        Admissibility::Admissible => String::new(),
        Admissibility::Inadmissible(r) => r,
    }
}

/// `[|R|, arg R, |T|, arg T, evanescent]` for a flat interface.
#[wasm_bindgen]
pub fn fresnel(k_plus: f64, k_minus: f64, mu: f64, theta_deg: f64) -> Result<Vec<f64>, JsValue> {
    let s = fresnel_flat(k_plus, k_minus, mu, direction(theta_deg)).map_err(js_err)?;
    Ok(vec![s.r.norm(), s.r.arg(), s.t.norm(), s.t.arg(), if s.evanescent { 1.0 } else { 0.0 }])
}

/// Total field over a grid: `u^i + u_+` above the surface, `u_-` below.
#[wasm_bindgen]
pub struct FieldMap {
    n1: usize,
    n2: usize,
    re: Vec<f64>,
    im: Vec<f64>,
    surface: Vec<f64>,
    residual: f64,
}

#[wasm_bindgen]
impl FieldMap {
    pub fn n1(&self) -> usize {
        self.n1
    }
    pub fn n2(&self) -> usize {
        self.n2
    }
    /// Real parts, row-major with `x1` fastest; masked points are NaN.
    pub fn re(&self) -> Vec<f64> {
        self.re.clone()
    }
    pub fn im(&self) -> Vec<f64> {
        self.im.clone()
    }
    /// `f(x1)` at the grid columns.
    pub fn surface(&self) -> Vec<f64> {
        self.surface.clone()
    }
    pub fn residual(&self) -> f64 {
        self.residual
    }
}

/// Solve plane-wave scattering by a Gaussian bump of height `h` (0 gives
/// the flat interface) and sample the total field on `[-4, 4] × [-3, 3]`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn field_map(h: f64, k_plus: f64, k_minus: f64, mu: f64, theta_deg: f64, n: usize, n1: usize, n2: usize) -> Result<FieldMap, JsValue> {
    if let Admissibility::Inadmissible(r) = admissibility_check(k_plus, k_minus, mu) {
        return Err(JsValue::from_str(&r));
    }
    let spec = if h == 0.0 { ProfileSpec::Flat { c: 0.0 } } else { ProfileSpec::GaussianBump { h, sigma: 1.0, center: 0.0 } };
    let profile = make_profile(&spec).map_err(js_err)?;
    let (hm, hp) = strip_heights(&profile, default_margin(&profile)).map_err(js_err)?;
    let params = MediumParams::new(k_plus, k_minus, mu, hm, hp).map_err(js_err)?;
    let mesh = make_mesh(&profile, &MeshSpec { a: WINDOW.0, a_core: WINDOW.1, n, rule: QuadRule::Trapezoid, grading: None }).map_err(js_err)?;
    let inc = IncidentField::PlaneWave { d: direction(theta_deg) };
    let sol = solve_scattering(&mesh, &params, &inc, Quadrature::default(), LinearSolver::Lu).map_err(js_err)?;
    let grid = GridSpec { x1_min: -4.0, x1_max: 4.0, x2_min: -3.0, x2_max: 3.0, n1, n2, mask_spacings: 2.0 };
    let samples = evaluate_field_grid(&sol, &grid).map_err(js_err)?;
    let (mut re, mut im) = (Vec::with_capacity(samples.len()), Vec::with_capacity(samples.len()));
    for s in &samples {
        if s.masked {
            re.push(f64::NAN);
            im.push(f64::NAN);
            continue;
        }
        let u = match s.region {
            Region::Plus => s.u + inc.value(s.x, k_plus).map_err(js_err)?,
            Region::Minus => s.u,
        };
        re.push(u.re);
        im.push(u.im);
    }
    let surface = (0..n1).map(|i| profile.f(samples[i].x.x1)).collect();
    Ok(FieldMap { n1, n2, re, im, surface, residual: sol.diagnostics.residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_map_matches_fresnel_below() {
        let m = field_map(0.0, 3.0, 1.0, 2.0, 0.0, 400, 9, 7).unwrap();
        let r = fresnel(3.0, 1.0, 2.0, 0.0).unwrap();
        // transmitted amplitude at a point below the interface, x2 = -3
        let below = m.re[4].hypot(m.im[4]);
        assert!((below - r[2]).abs() < 1e-3, "{below} vs {}", r[2]);
        assert!(m.residual < 1e-10);
    }

    #[test]
    fn admissibility_strings() {
        assert!(admissibility(3.0, 1.0, 2.0).is_empty());
        assert!(!admissibility(2.0, 2.0, 1.0).is_empty());
    }
}
