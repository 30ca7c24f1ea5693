//! Boundary integral operators on the impedance kernels and their Nyström
//! discretization.
//!
//! Normal convention: the mesh stores the normal `n` pointing out of `D^+`
//! (downward). The layer operators differentiate along `ν = −n`, the normal
//! pointing into `D^+`; with that choice the block system below holds with
//! the data `g1 = −u^i`, `g2 = −∂_n u^i`:
//!
//! ```text
//! M = [ K⁺ − μ⁻¹K⁻ + (1+μ)/(2μ) I    S⁺ − μ⁻¹S⁻          ]
//!     [ T⁻ − T⁺                       K'⁻ − K'⁺ + I       ]
//! ```
//!
//! where `S φ = ∫ G φ`, `K φ = ∫ ∂_{ν(y)} G φ`, `K' φ = ∫ ∂_{ν(x)} G φ`,
//! `T φ = ∂_{ν(x)} ∫ ∂_{ν(y)} G φ`, the `+` operators use
//! `G_{k+}^{+(I)}(·,·;h_-)` and the `−` operators `G_{k-}^{-(I)}(·,·;h_+)`.
//!
//! Every kernel is written as `L(x, y) ln|x − y| + smooth`. In the
//! computational variable `u` the logarithm becomes `ln|u − v|` plus a
//! smooth term, and the row integral is done by the locally corrected
//! trapezoid rule of [`crate::quadrature::log_correction_weights`].

use std::f64::consts::PI;
use std::io::Write;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfplane_green::{image_terms, HalfPlaneSpec, KernelDerivs, Side};
use crate::quadrature::{gauss_legendre, log_correction_weights, log_diagonal, LOG_STENCIL};
use crate::specfun::{radial_kernel, regular_radial, ComplexVal, Point2, COINCIDENT_TOL, EULER_GAMMA};
use crate::surface::{QuadRule, SurfaceMesh};

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);

/// Below this separation the `T` difference uses the cancellation-safe
/// regular-part forms.
const T_REGULAR_SWITCH: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpTag {
    S,
    K,
    Kprime,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MediumSide {
    Plus,
    Minus,
}

/// One boundary operator: its type, the medium it belongs to, wavenumber
/// and strip height of its impedance kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorKind {
    pub tag: OpTag,
    pub side: MediumSide,
    pub k: f64,
    pub strip_height: f64,
}

impl OperatorKind {
    pub fn new(tag: OpTag, side: MediumSide, k: f64, strip_height: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) || !strip_height.is_finite() {
            return Err(Error::InvalidParameter(format!("operator needs k > 0 and finite strip height (k={k})")));
        }
        Ok(Self { tag, side, k, strip_height })
    }

    pub fn half_plane(&self) -> HalfPlaneSpec {
        let side = match self.side {
            MediumSide::Plus => Side::Upper,
            MediumSide::Minus => Side::Lower,
        };
        HalfPlaneSpec { side, a: self.strip_height, k: self.k }
    }

    fn check_mesh(&self, mesh: &SurfaceMesh) -> Result<()> {
        let ok = match self.side {
            MediumSide::Plus => self.strip_height < mesh.profile.f_minus,
            MediumSide::Minus => self.strip_height > mesh.profile.f_plus,
        };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "strip height {} does not separate the image points from the surface [{}, {}]",
                self.strip_height, mesh.profile.f_minus, mesh.profile.f_plus
            )));
        }
        Ok(())
    }
}

/// Log-singular quadrature used for the diagonal of each row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Quadrature {
    /// Locally corrected trapezoid with a `2·stencil + 1` node stencil.
    CorrectedTrapezoid { stencil: usize },
    /// Subtract `L(x)·ln|u − v|` and integrate the logarithm exactly.
    SingularitySubtraction,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature::CorrectedTrapezoid { stencil: LOG_STENCIL }
    }
}

/// A point on the surface with the local data the kernel limits need.
#[derive(Debug, Clone, Copy)]
pub struct SurfacePoint {
    pub x: Point2,
    /// normal out of `D^+`
    pub normal: Point2,
    /// `f'` and `f''` at the point
    pub df: f64,
    pub d2f: f64,
}

impl SurfacePoint {
    pub fn from_mesh(mesh: &SurfaceMesh, i: usize) -> Self {
        let x1 = mesh.params[i];
        Self { x: mesh.nodes[i], normal: mesh.normals[i], df: mesh.profile.df(x1), d2f: mesh.curv[i] }
    }

    pub fn from_profile(profile: &crate::surface::SurfaceProfile, x1: f64) -> Self {
        let (_, d1, d2) = profile.eval(x1);
        Self { x: profile.point(x1), normal: profile.normal(x1), df: d1, d2f: d2 }
    }

    fn nu(&self) -> Point2 {
        -self.normal
    }

    /// `f''/(4π(1 + f'²)^{3/2})`: the common diagonal limit of the free
    /// `K` and `K'` kernels.
    fn curvature_limit(&self) -> f64 {
        let j = (1.0 + self.df * self.df).sqrt();
        self.d2f / (4.0 * PI * j * j * j)
    }
}

/// `kernel = log_coefficient·ln|x − y| + smooth_remainder`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSplit {
    pub log_coefficient: ComplexVal,
    pub smooth_remainder: ComplexVal,
}

/// Kernel values of one medium's operators at a pair of surface points.
#[derive(Debug, Clone, Copy, Default)]
struct SideTerms {
    s: C,
    k: C,
    kp: C,
    s_log: f64,
    k_log: f64,
    kp_log: f64,
    /// `ν_x · ∂x∂y(image + P) · ν_y`
    t_img: C,
}

fn dot2(a: [C; 2], v: Point2) -> C {
    a[0] * v.x1 + a[1] * v.x2
}

fn bilinear(m: [[C; 2]; 2], a: Point2, b: Point2) -> C {
    let a = [a.x1, a.x2];
    let b = [b.x1, b.x2];
    let mut s = ZERO;
    for i in 0..2 {
        for j in 0..2 {
            s += m[i][j] * (a[i] * b[j]);
        }
    }
    s
}

fn side_offdiag(spec: &HalfPlaneSpec, p: &SurfacePoint, q: &SurfacePoint, r: Point2, d: f64) -> Result<SideTerms> {
    let rk = radial_kernel(spec.k, d)?;
    let img = image_terms(spec, p.x, q.x)?;
    let (nx, ny) = (p.nu(), q.nu());
    let cx = r.dot(nx) / d;
    let cy = r.dot(ny) / d;
    let k = spec.k;
    Ok(SideTerms {
        s: rk.value + img.value,
        k: -rk.d1 * cy + dot2(img.grad_y, ny),
        kp: rk.d1 * cx + dot2(img.grad_x, nx),
        s_log: -rk.j0 / (2.0 * PI),
        k_log: -k * rk.j1 * cy / (2.0 * PI),
        kp_log: k * rk.j1 * cx / (2.0 * PI),
        t_img: bilinear(img.mixed, nx, ny),
    })
}

/// Diagonal: `s`, `k`, `kp` hold the finite parts in the geometric
/// `ln|x − y|` form.
fn side_diag(spec: &HalfPlaneSpec, p: &SurfacePoint) -> Result<SideTerms> {
    let img = image_terms(spec, p.x, p.x)?;
    let nu = p.nu();
    let c = p.curvature_limit();
    let k = spec.k;
    Ok(SideTerms {
        s: C::new(-((0.5 * k).ln() + EULER_GAMMA) / (2.0 * PI), 0.25) + img.value,
        k: C::new(c, 0.0) + dot2(img.grad_y, nu),
        kp: C::new(c, 0.0) + dot2(img.grad_x, nu),
        s_log: -1.0 / (2.0 * PI),
        k_log: 0.0,
        kp_log: 0.0,
        t_img: bilinear(img.mixed, nu, nu),
    })
}

/// Free-space part of `T_{k_a} − T_{k_b}` off the diagonal, with its log
/// coefficient.
fn t_free_difference(ka: f64, kb: f64, p: &SurfacePoint, q: &SurfacePoint, r: Point2, d: f64) -> Result<(C, f64)> {
    let (nx, ny) = (p.nu(), q.nu());
    let cx = r.dot(nx) / d;
    let cy = r.dot(ny) / d;
    let nn = nx.dot(ny);
    let (g1, g2, ja, jb) = if d < T_REGULAR_SWITCH {
        let (_, a1, a2) = regular_radial(ka, d)?;
        let (_, b1, b2) = regular_radial(kb, d)?;
        let za = crate::specfun::bessel_jy01(ka * d)?;
        let zb = crate::specfun::bessel_jy01(kb * d)?;
        (a1 - b1, a2.unwrap_or(ZERO) - b2.unwrap_or(ZERO), (za[0], za[1]), (zb[0], zb[1]))
    } else {
        let a = radial_kernel(ka, d)?;
        let b = radial_kernel(kb, d)?;
        (a.d1 - b.d1, a.d2 - b.d2, (a.j0, a.j1), (b.j0, b.j1))
    };
    let value = -(g2 * (cx * cy) + g1 / d * (nn - cx * cy));
    let lc = |k: f64, (j0, j1): (f64, f64)| {
        (k * k * j0 / (2.0 * PI) - k * j1 / (2.0 * PI * d)) * cx * cy + k * j1 / (2.0 * PI * d) * (nn - cx * cy)
    };
    let log = -(lc(ka, ja) - lc(kb, jb));
    Ok((value, log))
}

/// `C_k` in the diagonal limit `−(g'/R) → −C_k − (k²/4π) ln R` of the
/// free `T` kernel's regular part.
fn t_diag_constant(k: f64) -> C {
    let k2 = k * k;
    C::new(k2 / (4.0 * PI) * ((0.5 * k).ln() + EULER_GAMMA) - k2 / (8.0 * PI), -k2 / 8.0)
}

/// Log coefficient and smooth remainder of a single (non-hypersingular)
/// operator kernel at two surface points; `p == q` returns the analytic
/// diagonal limit.
pub fn kernel_split(kind: &OperatorKind, p: &SurfacePoint, q: &SurfacePoint) -> Result<KernelSplit> {
    let spec = kind.half_plane();
    let r = p.x - q.x;
    let d = r.norm();
    let pick = |t: &SideTerms| match kind.tag {
        OpTag::S => Ok((t.s, t.s_log)),
        OpTag::K => Ok((t.k, t.k_log)),
        OpTag::Kprime => Ok((t.kp, t.kp_log)),
        OpTag::T => Err(Error::UnsupportedOperator("T alone is hypersingular; use the T difference".into())),
    };
    if d < COINCIDENT_TOL {
        let (v, l) = pick(&side_diag(&spec, p)?)?;
        return Ok(KernelSplit { log_coefficient: C::new(l, 0.0), smooth_remainder: v });
    }
    let (v, l) = pick(&side_offdiag(&spec, p, q, r, d)?)?;
    Ok(KernelSplit { log_coefficient: C::new(l, 0.0), smooth_remainder: v - l * d.ln() })
}

/// Split of the `T_{k_-,h_+}^- − T_{k_+,h_-}^+` kernel.
pub fn kernel_split_t_difference(params: &crate::solve::MediumParams, p: &SurfacePoint, q: &SurfacePoint) -> Result<KernelSplit> {
    let (sp, sm) = params.half_planes();
    let r = p.x - q.x;
    let d = r.norm();
    if d < COINCIDENT_TOL {
        let tp = side_diag(&sp, p)?;
        let tm = side_diag(&sm, p)?;
        let rem = -(t_diag_constant(params.k_minus) - t_diag_constant(params.k_plus)) + tm.t_img - tp.t_img;
        let log = -(params.k_minus.powi(2) - params.k_plus.powi(2)) / (4.0 * PI);
        return Ok(KernelSplit { log_coefficient: C::new(log, 0.0), smooth_remainder: rem });
    }
    let (free, log) = t_free_difference(params.k_minus, params.k_plus, p, q, r, d)?;
    let tp = image_terms(&sp, p.x, q.x)?;
    let tm = image_terms(&sm, p.x, q.x)?;
    let v = free + bilinear(tm.mixed, p.nu(), q.nu()) - bilinear(tp.mixed, p.nu(), q.nu());
    Ok(KernelSplit { log_coefficient: C::new(log, 0.0), smooth_remainder: v - log * d.ln() })
}

// ---------------------------------------------------------------------------
// generic row assembly

/// Per-row quadrature data shared by all assemblies.
struct RowRule {
    h: f64,
    beta: Vec<f64>,
    quad: Quadrature,
    /// `∫_{u_0}^{u_N} ln|u_i − v| dv − Σ_{j≠i} w_j ln|u_i − u_j|` (subtraction only)
    log_defect: Vec<f64>,
}

impl RowRule {
    fn new(mesh: &SurfaceMesh, quad: Quadrature) -> Result<Self> {
        if mesh.spec.rule != QuadRule::Trapezoid {
            return Err(Error::DegenerateMesh("Nyström assembly requires the trapezoid rule".into()));
        }
        let beta = match quad {
            Quadrature::CorrectedTrapezoid { stencil } => {
                if !(1..=4).contains(&stencil) {
                    return Err(Error::InvalidParameter(format!("stencil must be 1..=4, got {stencil}")));
                }
                log_correction_weights(stencil)
            }
            Quadrature::SingularitySubtraction => vec![],
        };
        let n = mesh.len();
        let h = mesh.h;
        let log_defect = if quad == Quadrature::SingularitySubtraction {
            let (a, b) = (mesh.u[0], mesh.u[n - 1]);
            // unit-Jacobian trapezoid weights with end corrections
            let w: Vec<f64> = (0..n).map(|j| mesh.weights[j] / mesh.jac[j]).collect();
            (0..n)
                .map(|i| {
                    let u = mesh.u[i];
                    let xlx = |t: f64| if t > 0.0 { t * t.ln() - t } else { 0.0 };
                    let exact = xlx(b - u) + xlx(u - a);
                    let s: f64 = (0..n).filter(|&j| j != i).map(|j| w[j] * (u - mesh.u[j]).abs().ln()).sum();
                    exact - s
                })
                .collect()
        } else {
            vec![]
        };
        Ok(Self { h, beta, quad, log_defect })
    }

    /// Turn kernel values `val[j]`, log coefficients `log[j]` and the
    /// diagonal finite part `diag_rem` (geometric form) into matrix row
    /// entries.
    fn finish<const B: usize>(
        &self,
        mesh: &SurfaceMesh,
        i: usize,
        val: &[[C; B]],
        log: &[[f64; B]],
        diag_rem: [C; B],
        out: &mut [[C; B]],
    ) {
        let n = mesh.len();
        for j in 0..n {
            if j != i {
                for b in 0..B {
                    out[j][b] = val[j][b] * mesh.weights[j];
                }
            }
        }
        let ji = mesh.jac[i];
        let lnj = ji.ln();
        match self.quad {
            Quadrature::CorrectedTrapezoid { .. } => {
                let ld = log_diagonal(self.h);
                for b in 0..B {
                    out[i][b] = (diag_rem[b] + log[i][b] * (lnj + ld)) * (self.h * ji);
                }
                for (mi, beta) in self.beta.iter().enumerate() {
                    let m = mi + 1;
                    for b in 0..B {
                        out[i][b] -= 2.0 * self.h * beta * log[i][b] * ji;
                    }
                    for j in [i.wrapping_sub(m), i + m] {
                        if j < n {
                            for b in 0..B {
                                out[j][b] += self.h * beta * log[j][b] * mesh.jac[j];
                            }
                        }
                    }
                }
            }
            Quadrature::SingularitySubtraction => {
                let wi = mesh.weights[i];
                for b in 0..B {
                    out[i][b] = (diag_rem[b] + log[i][b] * lnj) * wi + log[i][b] * ji * self.log_defect[i];
                }
            }
        }
    }
}

/// Rows are computed in parallel in chunks of this size and then handed to
/// the sink in order.
const ROW_CHUNK: usize = 32;

fn assemble_rows<const B: usize, F, D, S>(mesh: &SurfaceMesh, quad: Quadrature, pair: F, diag: D, mut sink: S) -> Result<()>
where
    F: Fn(usize, usize) -> Result<([C; B], [f64; B])> + Sync,
    D: Fn(usize) -> Result<([C; B], [f64; B])> + Sync,
    S: FnMut(usize, &[[C; B]]),
{
    let rule = RowRule::new(mesh, quad)?;
    let n = mesh.len();
    let row = |i: usize| -> Result<Vec<[C; B]>> {
        let mut val = vec![[ZERO; B]; n];
        let mut log = vec![[0.0; B]; n];
        for j in 0..n {
            if j != i {
                let (v, l) = pair(i, j)?;
                val[j] = v;
                log[j] = l;
            }
        }
        let (rem, l) = diag(i)?;
        log[i] = l;
        let mut out = vec![[ZERO; B]; n];
        rule.finish(mesh, i, &val, &log, rem, &mut out);
        Ok(out)
    };
    let mut start = 0;
    while start < n {
        let end = (start + ROW_CHUNK).min(n);
        let rows: Vec<Result<Vec<[C; B]>>> = crate::par::map_range(start, end, &row);
        for (off, r) in rows.into_iter().enumerate() {
            sink(start + off, &r?);
        }
        start = end;
    }
    Ok(())
}

/// Nyström matrix of one of `S`, `K`, `K'` for a single medium.
pub fn assemble_block(kind: &OperatorKind, mesh: &SurfaceMesh, quad: Quadrature) -> Result<Mat<C>> {
    if kind.tag == OpTag::T {
        return Err(Error::UnsupportedOperator("T is only assembled as the difference T⁻ − T⁺".into()));
    }
    kind.check_mesh(mesh)?;
    let spec = kind.half_plane();
    let pts: Vec<SurfacePoint> = (0..mesh.len()).map(|i| SurfacePoint::from_mesh(mesh, i)).collect();
    let pick = |t: SideTerms| match kind.tag {
        OpTag::S => ([t.s], [t.s_log]),
        OpTag::K => ([t.k], [t.k_log]),
        _ => ([t.kp], [t.kp_log]),
    };
    let n = mesh.len();
    let mut m = Mat::<C>::zeros(n, n);
    assemble_rows::<1, _, _, _>(
        mesh,
        quad,
        |i, j| {
            let r = pts[i].x - pts[j].x;
            Ok(pick(side_offdiag(&spec, &pts[i], &pts[j], r, r.norm())?))
        },
        |i| Ok(pick(side_diag(&spec, &pts[i])?)),
        |i, row| {
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = v[0];
            }
        },
    )?;
    Ok(m)
}

/// `T_{k_a}^{(a)} − T_{k_b}^{(b)}` as a single weakly singular kernel.
pub fn assemble_t_pair(mesh: &SurfaceMesh, a: &OperatorKind, b: &OperatorKind, quad: Quadrature) -> Result<Mat<C>> {
    a.check_mesh(mesh)?;
    b.check_mesh(mesh)?;
    let (sa, sb) = (a.half_plane(), b.half_plane());
    let pts: Vec<SurfacePoint> = (0..mesh.len()).map(|i| SurfacePoint::from_mesh(mesh, i)).collect();
    let n = mesh.len();
    let mut m = Mat::<C>::zeros(n, n);
    assemble_rows::<1, _, _, _>(
        mesh,
        quad,
        |i, j| {
            let (p, q) = (&pts[i], &pts[j]);
            let r = p.x - q.x;
            let d = r.norm();
            let (free, log) = t_free_difference(a.k, b.k, p, q, r, d)?;
            let ia = image_terms(&sa, p.x, q.x)?;
            let ib = image_terms(&sb, p.x, q.x)?;
            Ok(([free + bilinear(ia.mixed, p.nu(), q.nu()) - bilinear(ib.mixed, p.nu(), q.nu())], [log]))
        },
        |i| {
            let p = &pts[i];
            let ta = side_diag(&sa, p)?;
            let tb = side_diag(&sb, p)?;
            let rem = -(t_diag_constant(a.k) - t_diag_constant(b.k)) + ta.t_img - tb.t_img;
            Ok(([rem], [-(a.k * a.k - b.k * b.k) / (4.0 * PI)]))
        },
        |i, row| {
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = v[0];
            }
        },
    )?;
    Ok(m)
}

/// `T_{k_-,h_+}^- − T_{k_+,h_-}^+`.
pub fn assemble_t_difference(mesh: &SurfaceMesh, params: &crate::solve::MediumParams, quad: Quadrature) -> Result<Mat<C>> {
    if params.k_plus == params.k_minus {
        return Err(Error::DegeneratePair(format!(
            "k+ = k- = {}: the free-space parts of the T difference vanish",
            params.k_plus
        )));
    }
    let (kp, km) = params.operator_kinds(OpTag::T);
    assemble_t_pair(mesh, &km, &kp, quad)
}

/// The assembled `2N × 2N` system `M`.
#[derive(Debug, Clone)]
pub struct SystemMatrix {
    pub n: usize,
    pub mat: Mat<C>,
    pub k_plus: f64,
    pub k_minus: f64,
    pub mu: f64,
}

impl SystemMatrix {
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Block `(r, c)` with `r, c ∈ {0, 1}`.
    pub fn block(&self, r: usize, c: usize) -> faer::MatRef<'_, C> {
        self.mat.as_ref().submatrix(r * self.n, c * self.n, self.n, self.n)
    }

    pub fn is_finite(&self) -> bool {
        let d = self.dim();
        (0..d).all(|j| (0..d).all(|i| self.mat[(i, j)].re.is_finite() && self.mat[(i, j)].im.is_finite()))
    }

    /// Binary dump: 32-byte header (`BIEM`, u32 dim, f64 k+, f64 k−, f64 μ)
    /// followed by the row-major entries as little-endian `f32` pairs.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let d = self.dim();
        w.write_all(b"BIEM")?;
        w.write_all(&(d as u32).to_le_bytes())?;
        w.write_all(&self.k_plus.to_le_bytes())?;
        w.write_all(&self.k_minus.to_le_bytes())?;
        w.write_all(&self.mu.to_le_bytes())?;
        let mut buf = Vec::with_capacity(8 * d);
        for i in 0..d {
            buf.clear();
            for j in 0..d {
                let v = self.mat[(i, j)];
                buf.extend_from_slice(&(v.re as f32).to_le_bytes());
                buf.extend_from_slice(&(v.im as f32).to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }
}

/// Assemble `M` in one pass over the surface pairs.
pub fn assemble_m(mesh: &SurfaceMesh, params: &crate::solve::MediumParams, quad: Quadrature) -> Result<SystemMatrix> {
    let (kp, km) = params.operator_kinds(OpTag::S);
    kp.check_mesh(mesh)?;
    km.check_mesh(mesh)?;
    let (sp, sm) = params.half_planes();
    let mu = params.mu;
    let inv_mu = 1.0 / mu;
    let pts: Vec<SurfacePoint> = (0..mesh.len()).map(|i| SurfacePoint::from_mesh(mesh, i)).collect();
    let n = mesh.len();
    let mut m = Mat::<C>::zeros(2 * n, 2 * n);
    let combine = |tp: &SideTerms, tm: &SideTerms, t: C, tl: f64| -> ([C; 4], [f64; 4]) {
        (
            [tp.k - tm.k * inv_mu, tp.s - tm.s * inv_mu, t, tm.kp - tp.kp],
            [tp.k_log - tm.k_log * inv_mu, tp.s_log - tm.s_log * inv_mu, tl, tm.kp_log - tp.kp_log],
        )
    };
    assemble_rows::<4, _, _, _>(
        mesh,
        quad,
        |i, j| {
            let (p, q) = (&pts[i], &pts[j]);
            let r = p.x - q.x;
            let d = r.norm();
            let tp = side_offdiag(&sp, p, q, r, d)?;
            let tm = side_offdiag(&sm, p, q, r, d)?;
            let (free, tl) = t_free_difference(params.k_minus, params.k_plus, p, q, r, d)?;
            Ok(combine(&tp, &tm, free + tm.t_img - tp.t_img, tl))
        },
        |i| {
            let p = &pts[i];
            let tp = side_diag(&sp, p)?;
            let tm = side_diag(&sm, p)?;
            let t = -(t_diag_constant(params.k_minus) - t_diag_constant(params.k_plus)) + tm.t_img - tp.t_img;
            let tl = -(params.k_minus.powi(2) - params.k_plus.powi(2)) / (4.0 * PI);
            Ok(combine(&tp, &tm, t, tl))
        },
        |i, row| {
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = v[0];
                m[(i, n + j)] = v[1];
                m[(n + i, j)] = v[2];
                m[(n + i, n + j)] = v[3];
            }
        },
    )?;
    let shift = (1.0 + mu) / (2.0 * mu);
    for i in 0..n {
        m[(i, i)] += shift;
        m[(n + i, n + i)] += 1.0;
    }
    Ok(SystemMatrix { n, mat: m, k_plus: params.k_plus, k_minus: params.k_minus, mu })
}

// ---------------------------------------------------------------------------
// layer potentials off the surface

/// Options for off-surface layer-potential evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NearOptions {
    /// Targets closer than this many local spacings use the refined rule.
    pub near_factor: f64,
    /// Targets closer than this many local spacings are rejected.
    pub min_factor: f64,
    /// Half-width of the refined window, in grid steps.
    pub window: f64,
}

impl Default for NearOptions {
    fn default() -> Self {
        Self { near_factor: 6.0, min_factor: 0.1, window: 32.0 }
    }
}

/// Row vectors mapping nodal densities to layer-potential values at one
/// target: `D φ + S ψ` is `Σ_j d[j] φ_j + s[j] ψ_j`, and likewise for the
/// derivative along `dir` when requested.
#[derive(Debug, Clone)]
pub struct LayerRows {
    pub d: Vec<C>,
    pub s: Vec<C>,
    pub dd: Option<Vec<C>>,
    pub ds: Option<Vec<C>>,
}

impl LayerRows {
    pub fn apply(&self, phi: &[C], psi: &[C]) -> C {
        self.d.iter().zip(phi).map(|(a, b)| a * b).sum::<C>() + self.s.iter().zip(psi).map(|(a, b)| a * b).sum::<C>()
    }

    pub fn apply_derivative(&self, phi: &[C], psi: &[C]) -> Option<C> {
        let dd = self.dd.as_ref()?;
        let ds = self.ds.as_ref()?;
        Some(dd.iter().zip(phi).map(|(a, b)| a * b).sum::<C>() + ds.iter().zip(psi).map(|(a, b)| a * b).sum::<C>())
    }
}

/// Double-layer, single-layer kernels and their derivatives along `dir`
/// at target `x` for a source at `y` with upward normal `ny`.
fn layer_kernels(spec: &HalfPlaneSpec, x: Point2, y: Point2, ny: Point2, dir: Option<Point2>) -> Result<[C; 4]> {
    let r = x - y;
    let d = r.norm();
    let rk = radial_kernel(spec.k, d)?;
    let img: KernelDerivs = image_terms(spec, x, y)?;
    let cy = r.dot(ny) / d;
    let dl = -rk.d1 * cy + dot2(img.grad_y, ny);
    let sl = rk.value + img.value;
    let (ddl, dsl) = match dir {
        Some(e) => {
            let ce = r.dot(e) / d;
            let free = -(rk.d2 * (ce * cy) + rk.d1 / d * (e.dot(ny) - ce * cy));
            (free + bilinear(img.mixed, e, ny), rk.d1 * ce + dot2(img.grad_x, e))
        }
        None => (ZERO, ZERO),
    };
    Ok([dl, sl, ddl, dsl])
}

fn erfc_window(t: f64, half: f64, width: f64) -> f64 {
    0.5 * libm::erfc((t.abs() - half) / width)
}

const INTERP_POINTS: usize = 10;

/// Layer-potential rows at an off-surface target for the medium `spec`.
/// `dir` requests the directional-derivative rows as well.
pub fn layer_rows(mesh: &SurfaceMesh, spec: &HalfPlaneSpec, x: Point2, dir: Option<Point2>, opts: &NearOptions) -> Result<LayerRows> {
    let n = mesh.len();
    if mesh.spec.rule != QuadRule::Trapezoid {
        return Err(Error::DegenerateMesh("layer potentials require the trapezoid rule".into()));
    }
    let (dist, foot) = mesh.profile.distance(x);
    let u_star = mesh.u_of_param(foot);
    let i_star = mesh.nearest_index(u_star);
    let spacing = mesh.spacing(i_star);
    if dist < opts.min_factor * spacing {
        return Err(Error::TooClose { distance: dist, minimum: opts.min_factor * spacing });
    }
    let want = dir.is_some();
    let mut rows = LayerRows {
        d: vec![ZERO; n],
        s: vec![ZERO; n],
        dd: want.then(|| vec![ZERO; n]),
        ds: want.then(|| vec![ZERO; n]),
    };
    let near = dist < opts.near_factor * spacing;
    let h = mesh.h;
    let half = 0.5 * opts.window * h;
    let width = 3.0 * h;
    let reach = opts.window * h;
    for j in 0..n {
        let omega = if near { erfc_window(mesh.u[j] - u_star, half, width) } else { 0.0 };
        let w = mesh.weights[j] * (1.0 - omega);
        if w == 0.0 {
            continue;
        }
        let k = layer_kernels(spec, x, mesh.nodes[j], -mesh.normals[j], dir)?;
        rows.d[j] += k[0] * w;
        rows.s[j] += k[1] * w;
        if let (Some(dd), Some(ds)) = (rows.dd.as_mut(), rows.ds.as_mut()) {
            dd[j] += k[2] * w;
            ds[j] += k[3] * w;
        }
    }
    if !near {
        return Ok(rows);
    }
    // refined integral of ω·kernel·(interpolated density) over the window
    let lo = (u_star - reach).max(mesh.u[0]);
    let hi = (u_star + reach).min(mesh.u[n - 1]);
    let du = (dist / mesh.jac[i_star]).max(1e-3 * h);
    let (gx, gw) = gauss_legendre(16);
    let mut edges = vec![u_star];
    let mut t = du;
    while u_star + t < hi || u_star - t > lo {
        edges.push(u_star + t);
        edges.insert(0, u_star - t);
        t *= 2.0;
    }
    let mut panels: Vec<(f64, f64)> = vec![];
    for win in edges.windows(2) {
        let (a, b) = (win[0].max(lo), win[1].min(hi));
        if b > a {
            panels.push((a, b));
        }
    }
    if lo < edges[0] {
        panels.insert(0, (lo, edges[0].max(lo)));
    }
    if hi > *edges.last().unwrap() {
        panels.push((edges.last().unwrap().min(hi), hi));
    }
    for (a, b) in panels {
        if b <= a {
            continue;
        }
        for (g, wg) in gx.iter().zip(&gw) {
            let v = 0.5 * (a + b) + 0.5 * (b - a) * g;
            let wq = 0.5 * (b - a) * wg;
            let omega = erfc_window(v - u_star, half, width);
            let (y, nrm, jac) = mesh.geometry_at(v);
            let weight = wq * omega * jac;
            if weight == 0.0 {
                continue;
            }
            let k = layer_kernels(spec, x, y, -nrm, dir)?;
            // Lagrange interpolation from the nearest nodes
            let base = (((v - mesh.u[0]) / h).floor() as isize - (INTERP_POINTS as isize / 2 - 1))
                .clamp(0, (n - INTERP_POINTS) as isize) as usize;
            let nodes: Vec<f64> = (0..INTERP_POINTS).map(|m| (base + m) as f64).collect();
            let lw = crate::quadrature::lagrange_weights(&nodes, (v - mesh.u[0]) / h);
            for (m, l) in lw.iter().enumerate() {
                let j = base + m;
                let c = weight * l;
                rows.d[j] += k[0] * c;
                rows.s[j] += k[1] * c;
                if let (Some(dd), Some(ds)) = (rows.dd.as_mut(), rows.ds.as_mut()) {
                    dd[j] += k[2] * c;
                    ds[j] += k[3] * c;
                }
            }
        }
    }
    Ok(rows)
}

/// Apply a complex matrix to a vector.
pub fn matvec(m: faer::MatRef<'_, C>, x: &[C]) -> Vec<C> {
    let mut y = vec![ZERO; m.nrows()];
    for j in 0..m.ncols() {
        let xj = x[j];
        if xj == ZERO {
            continue;
        }
        let col = m.col(j);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += col[i] * xj;
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{make_mesh, make_profile, MeshSpec, ProfileSpec};

    #[test]
    fn curvature_limit_of_k_kernel() {
        let prof = make_profile(&ProfileSpec::GaussianBump { h: 0.3, sigma: 1.0, center: 0.0 }).unwrap();
        let kind = OperatorKind::new(OpTag::K, MediumSide::Plus, 1.0, -0.5).unwrap();
        let p = SurfacePoint::from_profile(&prof, 0.0);
        let q = SurfacePoint::from_profile(&prof, 1e-5);
        let free_near = kernel_split(&kind, &p, &q).unwrap().smooth_remainder;
        let diag = kernel_split(&kind, &p, &p).unwrap().smooth_remainder;
        assert!((free_near - diag).norm() < 1e-6, "{free_near} vs {diag}");
        let kappa = 0.3;
        let img = image_terms(&kind.half_plane(), p.x, p.x).unwrap();
        let free_diag = diag - dot2(img.grad_y, p.nu());
        assert!((free_diag.re + kappa / (4.0 * PI)).abs() < 1e-3 * kappa / (4.0 * PI));
    }

    #[test]
    fn t_alone_is_rejected() {
        let prof = make_profile(&ProfileSpec::Flat { c: 0.0 }).unwrap();
        let mesh = make_mesh(&prof, &MeshSpec { a: 4.0, a_core: 2.0, n: 32, rule: QuadRule::Trapezoid, grading: None }).unwrap();
        let kind = OperatorKind::new(OpTag::T, MediumSide::Plus, 1.0, -0.5).unwrap();
        assert!(matches!(assemble_block(&kind, &mesh, Quadrature::default()), Err(Error::UnsupportedOperator(_))));
    }

    #[test]
    fn strip_height_must_clear_surface() {
        let prof = make_profile(&ProfileSpec::Flat { c: 0.0 }).unwrap();
        let mesh = make_mesh(&prof, &MeshSpec { a: 4.0, a_core: 2.0, n: 32, rule: QuadRule::Trapezoid, grading: None }).unwrap();
        let kind = OperatorKind::new(OpTag::S, MediumSide::Plus, 1.0, 0.5).unwrap();
        assert!(assemble_block(&kind, &mesh, Quadrature::default()).is_err());
    }
}
