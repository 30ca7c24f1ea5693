//! Piecewise-linear norms on a graded half-disk below the surface.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::specfun::Point2;
use crate::surface::SurfaceProfile;

type C = Complex64;

/// Triangulation of `D_0 = {x0 + s·e(s) + t·n(s) : t ≥ h_min, s² + t² ≤ R²}`
/// in normal coordinates about the foot `x01` (with `n` the downward unit
/// normal), graded polar-geometrically around `(s, t) = (0, h_min)`.
#[derive(Debug, Clone)]
pub struct D0Mesh {
    pub nodes: Vec<Point2>,
    /// normal coordinates `(s, t)` of each node
    pub st: Vec<(f64, f64)>,
    pub tris: Vec<[usize; 3]>,
    pub radius: f64,
    pub h_min: f64,
    /// per-triangle area and P1 gradient coefficients
    geom: Vec<TriGeom>,
}

#[derive(Debug, Clone, Copy)]
struct TriGeom {
    area: f64,
    /// `∇λ_a` for the three barycentric functions
    grad: [[f64; 2]; 3],
}

impl D0Mesh {
    /// `n_angle` uniform angular intervals over `[0, π]`; radial levels
    /// `τ ∈ {0, τ_0, τ_0·q, …, 1}` along each ray to the outer circle.
    pub fn new(profile: &SurfaceProfile, x01: f64, radius: f64, h_min: f64, n_angle: usize, tau0: f64, ratio: f64) -> Result<Self> {
        if !(radius > 0.0 && h_min >= 0.0 && h_min < 0.5 * radius) {
            return Err(Error::InvalidParameter(format!("D0 needs 0 <= h_min < R/2 (R={radius}, h_min={h_min})")));
        }
        if n_angle < 4 || !(tau0 > 0.0 && tau0 < 1.0) || ratio <= 1.0 {
            return Err(Error::InvalidParameter("D0 mesh needs n_angle >= 4, 0 < tau0 < 1, ratio > 1".into()));
        }
        let mut taus = vec![tau0];
        while *taus.last().unwrap() * ratio < 1.0 - 0.25 * (ratio - 1.0) {
            let t = taus.last().unwrap() * ratio;
            taus.push(t);
        }
        taus.push(1.0);
        let (h, r) = (h_min, radius);
        let rho_max = |phi: f64| {
            let s = phi.sin();
            -h * s + (h * h * s * s + r * r - h * h).sqrt()
        };
        let mut st = vec![(0.0, h)];
        for &tau in &taus {
            for a in 0..=n_angle {
                let phi = PI * a as f64 / n_angle as f64;
                let rho = rho_max(phi) * tau;
                st.push((rho * phi.cos(), h + rho * phi.sin()));
            }
        }
        let ring = |l: usize, a: usize| 1 + l * (n_angle + 1) + a;
        let mut tris = Vec::new();
        for a in 0..n_angle {
            // (s, t) → physical reverses orientation, so list clockwise in (s, t)
            tris.push([0, ring(0, a + 1), ring(0, a)]);
        }
        for l in 0..taus.len() - 1 {
            for a in 0..n_angle {
                let (p, q, rr, s) = (ring(l, a), ring(l, a + 1), ring(l + 1, a + 1), ring(l + 1, a));
                tris.push([p, q, rr]);
                tris.push([p, rr, s]);
            }
        }
        let nodes: Vec<Point2> = st
            .iter()
            .map(|&(s, t)| {
                let x1 = x01 + s;
                profile.point(x1) + profile.normal(x1) * t
            })
            .collect();
        let mut geom = Vec::with_capacity(tris.len());
        for t in &tris {
            let g = tri_geom(nodes[t[0]], nodes[t[1]], nodes[t[2]]);
            if !(g.area > 0.0) {
                return Err(Error::DegenerateMesh("D0 triangulation folded over (surface too curved for R)".into()));
            }
            geom.push(g);
        }
        Ok(Self { nodes, st, tris, radius, h_min, geom })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.geom.iter().map(|g| g.area).sum()
    }
}

fn tri_geom(a: Point2, b: Point2, c: Point2) -> TriGeom {
    let det = (b.x1 - a.x1) * (c.x2 - a.x2) - (c.x1 - a.x1) * (b.x2 - a.x2);
    let p = [a, b, c];
    let mut grad = [[0.0; 2]; 3];
    for i in 0..3 {
        let (q, r) = (p[(i + 1) % 3], p[(i + 2) % 3]);
        grad[i] = [(q.x2 - r.x2) / det, (r.x1 - q.x1) / det];
    }
    TriGeom { area: 0.5 * det, grad }
}

/// P1 `H¹(D_0)` inner product `∫ ∇u·∇v̄ + u v̄` of nodal fields.
pub fn h1_inner(mesh: &D0Mesh, u: &[C], v: &[C]) -> C {
    assert_eq!(u.len(), mesh.len());
    assert_eq!(v.len(), mesh.len());
    let mut acc = C::new(0.0, 0.0);
    for (t, g) in mesh.tris.iter().zip(&mesh.geom) {
        let mut gu = [C::new(0.0, 0.0); 2];
        let mut gv = gu;
        for a in 0..3 {
            for d in 0..2 {
                gu[d] += u[t[a]] * g.grad[a][d];
                gv[d] += v[t[a]] * g.grad[a][d];
            }
        }
        acc += (gu[0] * gv[0].conj() + gu[1] * gv[1].conj()) * g.area;
        acc += mass(t, g.area, u, v);
    }
    acc
}

fn mass(t: &[usize; 3], area: f64, u: &[C], v: &[C]) -> C {
    let mut m = C::new(0.0, 0.0);
    for a in 0..3 {
        for b in 0..3 {
            let w = if a == b { 2.0 } else { 1.0 };
            m += u[t[a]] * v[t[b]].conj() * w;
        }
    }
    m * (area / 12.0)
}

pub fn h1_norm(mesh: &D0Mesh, u: &[C]) -> f64 {
    h1_inner(mesh, u, u).re.max(0.0).sqrt()
}

/// P1 `L²(D_0)` norm.
pub fn l2_norm(mesh: &D0Mesh, u: &[C]) -> f64 {
    let s: f64 = mesh.tris.iter().zip(&mesh.geom).map(|(t, g)| mass(t, g.area, u, u).re).sum();
    s.max(0.0).sqrt()
}

/// P1 `H¹` seminorm squared, `∫|∇u_h|²`.
pub fn p1_seminorm2(mesh: &D0Mesh, u: &[C]) -> f64 {
    let mut s = 0.0;
    for (t, g) in mesh.tris.iter().zip(&mesh.geom) {
        let mut gu = [C::new(0.0, 0.0); 2];
        for a in 0..3 {
            for d in 0..2 {
                gu[d] += u[t[a]] * g.grad[a][d];
            }
        }
        s += (gu[0].norm_sqr() + gu[1].norm_sqr()) * g.area;
    }
    s
}

/// `∫_{D_h} |grad|²` over the triangulated domain by an 8×8 collapsed
/// Gauss rule per triangle.
pub fn seminorm_exact<F: Fn(Point2) -> [f64; 2]>(mesh: &D0Mesh, grad: F) -> f64 {
    let (x, w) = gauss_legendre(8);
    let mut total = 0.0;
    for (t, g) in mesh.tris.iter().zip(&mesh.geom) {
        let (a, b, c) = (mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]);
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            let u = 0.5 * (xi + 1.0);
            for (eta, wj) in x.iter().zip(&w) {
                let v = 0.5 * (eta + 1.0) * (1.0 - u);
                let p = a + (b - a) * u + (c - a) * v;
                let gr = grad(p);
                s += 0.25 * wi * wj * (1.0 - u) * (gr[0] * gr[0] + gr[1] * gr[1]);
            }
        }
        total += s * 2.0 * g.area;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{make_profile, ProfileSpec};

    fn flat_mesh() -> D0Mesh {
        let p = make_profile(&ProfileSpec::Flat { c: 0.0 }).unwrap();
        D0Mesh::new(&p, 0.0, 0.4, 0.01, 64, 1e-3, 1.1).unwrap()
    }

    #[test]
    fn area_matches_circular_segment() {
        let m = flat_mesh();
        let (r, h) = (0.4f64, 0.01f64);
        let exact = r * r * (h / r).acos() - h * (r * r - h * h).sqrt();
        assert!((m.area() - exact).abs() / exact < 2e-3, "{} vs {}", m.area(), exact);
        assert!(m.st.iter().all(|&(_, t)| t >= h - 1e-15));
        assert!(m.nodes.iter().all(|p| p.x2 <= -h + 1e-15));
    }

    #[test]
    fn linear_fields_are_exact() {
        let m = flat_mesh();
        let u: Vec<C> = m.nodes.iter().map(|p| C::new(2.0 * p.x1 - p.x2, 0.5)).collect();
        let a = m.area();
        let semi = 5.0 * a;
        assert!((p1_seminorm2(&m, &u) - semi).abs() < 1e-12 * semi);
        let one = vec![C::new(1.0, 0.0); m.len()];
        assert!((l2_norm(&m, &one).powi(2) - a).abs() < 1e-13);
        assert!((seminorm_exact(&m, |_| [2.0, -1.0]) - semi).abs() < 1e-12);
    }

    #[test]
    fn inner_product_is_hermitian() {
        let m = flat_mesh();
        let u: Vec<C> = m.nodes.iter().map(|p| C::new(p.x1.sin(), p.x2)).collect();
        let v: Vec<C> = m.nodes.iter().map(|p| C::new(p.x2 * p.x1, (3.0 * p.x1).cos())).collect();
        let a = h1_inner(&m, &u, &v);
        let b = h1_inner(&m, &v, &u);
        assert!((a - b.conj()).norm() < 1e-14);
        assert!((h1_norm(&m, &u).powi(2) - h1_inner(&m, &u, &u).re).abs() < 1e-14);
    }
}
