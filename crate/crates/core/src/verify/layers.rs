//! Layer-potential jump relations, operator oracles and convergence studies.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fresnel::{flat_plane_wave_fields, fresnel_probe_points, fresnel_suite};
use super::{Check, SuiteReport, Table};
use crate::bie::{
    assemble_block, assemble_t_difference, assemble_t_pair, kernel_split, kernel_split_t_difference, layer_rows, matvec, NearOptions,
    OpTag, OperatorKind, Quadrature, SurfacePoint,
};
use crate::error::Result;
use crate::quadrature::integrate_adaptive;
use crate::solve::MediumParams;
use crate::specfun::Point2;
use crate::surface::{default_margin, make_mesh, make_profile, strip_heights, MeshSpec, ProfileSpec, QuadRule, SurfaceMesh};

type C = Complex64;

/// Settings for the jump-relation extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpOptions {
    pub k_plus: f64,
    pub k_minus: f64,
    pub n: usize,
    pub a: f64,
    pub eps: Vec<f64>,
    /// `x1` values; the nearest mesh node is used as the target.
    pub targets: Vec<f64>,
    pub tolerance: f64,
}

impl Default for JumpOptions {
    fn default() -> Self {
        Self {
            k_plus: 3.0,
            k_minus: 1.0,
            n: 800,
            a: 10.0,
            eps: vec![1e-2, 1e-3, 1e-4],
            targets: vec![-1.5, -0.5, 0.0, 0.7, 1.5],
            tolerance: 1e-3,
        }
    }
}

fn bump_profile() -> Result<crate::surface::SurfaceProfile> {
    make_profile(&ProfileSpec::GaussianBump { h: 0.3, sigma: 1.0, center: 0.0 })
}

fn test_params(profile: &crate::surface::SurfaceProfile, k_plus: f64, k_minus: f64, mu: f64) -> Result<MediumParams> {
    let (hm, hp) = strip_heights(profile, default_margin(profile))?;
    MediumParams::new(k_plus, k_minus, mu, hm, hp)
}

/// Smooth compact bump `exp(1 − 1/(1 − (x/3)²))` on `|x| < 3`.
fn cutoff(x: f64) -> f64 {
    let s = x / 3.0;
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

/// Value at `ε = 0` of the quadratic through three `(ε, v)` samples.
fn extrapolate(eps: &[f64], v: &[C]) -> C {
    let mut out = C::new(0.0, 0.0);
    for i in 0..eps.len() {
        let mut l = 1.0;
        for j in 0..eps.len() {
            if i != j {
                l *= (0.0 - eps[j]) / (eps[i] - eps[j]);
            }
        }
        out += v[i] * l;
    }
    out
}

/// Discrete jump relations: for each kernel `W = Dφ + Sψ` evaluated at
/// `x ± εν` (ν the normal into `D^+`) and extrapolated to `ε → 0`,
/// `W⁺ − W⁻ = φ` and `∂_νW⁺ − ∂_νW⁻ = −ψ`.
pub fn jumps_suite(opts: &JumpOptions) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("jumps");
    let profile = bump_profile()?;
    let mesh = make_mesh(&profile, &MeshSpec { a: opts.a, a_core: 0.5 * opts.a, n: opts.n, rule: QuadRule::Trapezoid, grading: None })?;
    let params = test_params(&profile, opts.k_plus, opts.k_minus, 1.0)?;
    let (sp, sm) = params.half_planes();
    let phi: Vec<C> = mesh.params.iter().map(|&x| C::new(1.0, 0.5 * x) * cutoff(x)).collect();
    let psi: Vec<C> = mesh.params.iter().map(|&x| C::new(0.5, -0.3 * x) * cutoff(x)).collect();
    let phi_max = phi.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let psi_max = psi.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let near = NearOptions { min_factor: 0.0, ..NearOptions::default() };
    let mut table = Table::new("jump_extrapolation", &["kernel", "x1", "err_value_jump", "err_flux_jump"]);
    let mut worst_v: f64 = 0.0;
    let mut worst_d: f64 = 0.0;
    for (ki, spec) in [sp, sm].iter().enumerate() {
        for &t in &opts.targets {
            let i = mesh.nearest_index(mesh.u_of_param(t));
            let (x, nu) = (mesh.nodes[i], -mesh.normals[i]);
            let mut jv = vec![];
            let mut jd = vec![];
            for &e in &opts.eps {
                let up = layer_rows(&mesh, spec, x + nu * e, Some(nu), &near)?;
                let dn = layer_rows(&mesh, spec, x - nu * e, Some(nu), &near)?;
                jv.push(up.apply(&phi, &psi) - dn.apply(&phi, &psi));
                jd.push(up.apply_derivative(&phi, &psi).unwrap() - dn.apply_derivative(&phi, &psi).unwrap());
            }
            let ev = (extrapolate(&opts.eps, &jv) - phi[i]).norm() / phi_max;
            let ed = (extrapolate(&opts.eps, &jd) + psi[i]).norm() / psi_max;
            worst_v = worst_v.max(ev);
            worst_d = worst_d.max(ed);
            table.push(vec![ki as f64, mesh.params[i], ev, ed]);
        }
    }
    rep.checks.push(Check::le("value_jump", worst_v, opts.tolerance));
    rep.checks.push(Check::le("flux_jump", worst_d, opts.tolerance));
    rep.tables.push(table);
    Ok(rep)
}

const ORACLE_TOL: f64 = 1e-5;

/// `∫_{Γ(A)} kernel(x_i, y) ds(y)` by adaptive quadrature in `x1`, split at
/// the target.
fn oracle_row<F: Fn(&SurfacePoint, &SurfacePoint) -> Result<C>>(mesh: &SurfaceMesh, i: usize, kernel: F) -> Result<C> {
    let p = SurfacePoint::from_mesh(mesh, i);
    let (a, b) = (mesh.params[0], mesh.params[mesh.len() - 1]);
    let xi = mesh.params[i];
    let mut err = None;
    let mut f = |x1: f64| {
        let q = SurfacePoint::from_profile(&mesh.profile, x1);
        let jac = (1.0 + q.df * q.df).sqrt();
        match kernel(&p, &q) {
            Ok(v) => v * jac,
            Err(e) => {
                err.get_or_insert(e);
                C::new(0.0, 0.0)
            }
        }
    };
    let mut total = C::new(0.0, 0.0);
    for (lo, hi) in [(a, xi), (xi, b)] {
        // geometric panels toward the logarithmic endpoint, one fixed
        // Gauss-Kronrod pass each: the double-layer kernels lose digits to
        // cancellation as |x − y| → 0, and adaptivity would chase that noise
        let mut cuts = vec![xi];
        let mut w = 1e-6;
        while w < (hi - lo).abs().min(0.5) {
            cuts.push(if lo < xi { xi - w } else { xi + w });
            w *= 4.0;
        }
        cuts.push(if lo < xi { lo } else { hi });
        let last = cuts.len() - 2;
        for (m, c) in cuts.windows(2).enumerate() {
            let (l, r) = (c[0].min(c[1]), c[0].max(c[1]));
            let (tol, budget) = if m == last { (1e-11, 400_000) } else { (f64::INFINITY, 15) };
            total += integrate_adaptive(&mut f, l, r, tol, 1e-11, budget)?.value;
        }
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok(total)
}

fn full_kernel(split: crate::bie::KernelSplit, p: &SurfacePoint, q: &SurfacePoint) -> C {
    let d = (p.x - q.x).norm();
    if d == 0.0 {
        // deep bisection can round a node onto the target; a null set
        return C::new(0.0, 0.0);
    }
    split.log_coefficient * d.ln() + split.smooth_remainder
}

/// Every assembled block applied to the constant density against the
/// adaptive oracle at seeded random core targets, and exact cancellation of
/// `T_a − T_a`.
pub fn operator_suite(n: usize, a: f64, targets: usize, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("operators");
    let profile = bump_profile()?;
    let mesh = make_mesh(&profile, &MeshSpec { a, a_core: 0.5 * a, n, rule: QuadRule::Trapezoid, grading: None })?;
    let params = test_params(&profile, 3.0, 1.0, 2.0)?;
    let quad = Quadrature::default();
    let ones = vec![C::new(1.0, 0.0); n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx: Vec<usize> = (0..targets).map(|_| mesh.nearest_index(mesh.u_of_param(rng.gen_range(-0.5 * a..0.5 * a)))).collect();
    let mut table = Table::new("operator_oracle", &["block", "x1", "assembled_re", "assembled_im", "oracle_re", "oracle_im", "rel_err"]);
    let mut blocks: Vec<(String, Vec<C>, Box<dyn Fn(&SurfacePoint, &SurfacePoint) -> Result<C>>)> = vec![];
    for tag in [OpTag::S, OpTag::K, OpTag::Kprime] {
        let (kp, km) = params.operator_kinds(tag);
        for (label, kind) in [("plus", kp), ("minus", km)] {
            let m = assemble_block(&kind, &mesh, quad)?;
            let kind2: OperatorKind = kind;
            blocks.push((
                format!("{tag:?}_{label}"),
                matvec(m.as_ref(), &ones),
                Box::new(move |p, q| Ok(full_kernel(kernel_split(&kind2, p, q)?, p, q))),
            ));
        }
    }
    let t = assemble_t_difference(&mesh, &params, quad)?;
    blocks.push((
        "T_difference".into(),
        matvec(t.as_ref(), &ones),
        Box::new(move |p, q| Ok(full_kernel(kernel_split_t_difference(&params, p, q)?, p, q))),
    ));
    for (bi, (name, applied, kernel)) in blocks.iter().enumerate() {
        let mut wb: f64 = 0.0;
        for &i in &idx {
            let oracle = oracle_row(&mesh, i, kernel)?;
            let e = (applied[i] - oracle).norm() / oracle.norm();
            wb = wb.max(e);
            table.push(vec![bi as f64, mesh.params[i], applied[i].re, applied[i].im, oracle.re, oracle.im, e]);
        }
        rep.checks.push(Check::le(format!("oracle_{name}"), wb, ORACLE_TOL));
    }
    rep.tables.push(table);
    let (kp, _) = params.operator_kinds(OpTag::T);
    let z = assemble_t_pair(&mesh, &kp, &kp, quad)?;
    let mut zmax: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            zmax = zmax.max(z[(i, j)].norm());
        }
    }
    rep.checks.push(Check::le("t_difference_equal_kernels_zero", zmax, 1e-12));
    Ok(rep)
}

/// Max relative change of the core probe fields when the window doubles at
/// fixed node density: `(N, A, A_core)` against `(2N − 1, 2A, 2A_core)`.
pub fn window_nesting(params: &MediumParams, d: Point2, n: usize, a: f64, a_core: f64) -> Result<f64> {
    let probes = fresnel_probe_points(a_core);
    let (u1, _, _) = flat_plane_wave_fields(params, d, n, a, a_core, &probes)?;
    let (u2, _, _) = flat_plane_wave_fields(params, d, 2 * n - 1, 2.0 * a, 2.0 * a_core, &probes)?;
    Ok(u1.iter().zip(&u2).map(|(a, b)| (a - b).norm() / b.norm()).fold(0.0, f64::max))
}

/// Fresnel sweep plus the window-nesting truncation probe.
pub fn convergence_suite(params: &MediumParams, d: Point2, ns: &[usize], a: f64, a_core: f64, nesting_n: usize) -> Result<SuiteReport> {
    let mut rep = fresnel_suite(params, d, ns, a, a_core)?;
    rep.suite = "convergence".into();
    let w = window_nesting(params, d, nesting_n, a, a_core)?;
    rep.checks.push(Check::le("window_nesting", w, 5e-4));
    Ok(rep)
}
