//! The Schwarz-Christoffel disk-to-polygon parameter problem, map and
//! derivative evaluation, and polygon quadrature by transplanting disk rules.

use super::disk::DiskRule;
use super::gauss::{gauss_jacobi, gauss_legendre, GaussRule};
use crate::geometry::Polygon;
use crate::{Error, Result, Vec2};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

const GQ_NODES: usize = 8;
const MIN_PREVERTEX_GAP: f64 = 1e-10;

fn c(v: Vec2) -> Complex64 {
    Complex64::new(v.x, v.y)
}

/// Exterior-angle parameters beta_k = alpha_k/pi - 1 from the turn angles of
/// a CCW polygon; their sum is exactly -2 for a closed simple polygon.
fn exterior_params(verts: &[Complex64]) -> Result<Vec<f64>> {
    let n = verts.len();
    let mut beta = Vec::with_capacity(n);
    for k in 0..n {
        let prev = verts[(k + n - 1) % n];
        let next = verts[(k + 1) % n];
        let e_in = verts[k] - prev;
        let e_out = next - verts[k];
        let turn = (e_out / e_in).arg();
        let b = -turn / PI;
        if b <= -1.0 + 1e-9 || b >= 1.0 - 1e-9 {
            return Err(Error::DegenerateGeometry(format!(
                "interior angle at vertex {k} out of (0, 2pi)"
            )));
        }
        beta.push(b);
    }
    // Enforce the closed-polygon condition exactly by absorbing rounding
    // into the last entry.
    let sum: f64 = beta.iter().sum();
    if (sum + 2.0).abs() > 1e-10 {
        return Err(Error::DegenerateGeometry(format!(
            "exterior angle sum {sum:.3e} != -2; polygon not simple CCW?"
        )));
    }
    let nlast = beta.len() - 1;
    beta[nlast] -= sum + 2.0;
    Ok(beta)
}

/// Integration engine for the SC integrand with fixed angle parameters.
struct Integrator {
    beta: Vec<f64>,
    prevertices: Vec<Complex64>,
    /// Per-vertex 8-node Gauss-Jacobi rule absorbing (1+t)^beta_k.
    gj: Vec<GaussRule>,
    gl: GaussRule,
}

impl Integrator {
    fn new(beta: Vec<f64>) -> Self {
        let gj = beta
            .iter()
            .map(|&b| gauss_jacobi(GQ_NODES, 0.0, b))
            .collect();
        Self {
            beta,
            prevertices: Vec::new(),
            gj,
            gl: gauss_legendre(GQ_NODES),
        }
    }

    fn set_prevertices(&mut self, z: Vec<Complex64>) {
        self.prevertices = z;
    }

    /// Product over prevertices (optionally skipping one factored-out
    /// singular term) of (1 - z/z_k)^beta_k, principal branch.
    fn integrand(&self, z: Complex64, skip: Option<usize>) -> Complex64 {
        let mut p = Complex64::new(1.0, 0.0);
        for (k, (&zk, &bk)) in self.prevertices.iter().zip(&self.beta).enumerate() {
            if Some(k) == skip || bk == 0.0 {
                continue;
            }
            p *= (Complex64::new(1.0, 0.0) - z / zk).powf(bk);
        }
        p
    }

    /// Integral of the SC integrand along the straight segment a -> b.
    /// `sing_a` / `sing_b` name the prevertex coinciding with an endpoint.
    fn integrate(
        &self,
        a: Complex64,
        b: Complex64,
        sing_a: Option<usize>,
        sing_b: Option<usize>,
    ) -> Complex64 {
        if (b - a).norm() < 1e-15 {
            return Complex64::new(0.0, 0.0);
        }
        match (sing_a, sing_b) {
            (Some(_), Some(_)) => {
                let m = 0.5 * (a + b);
                self.integrate(a, m, sing_a, None) + self.integrate(m, b, None, sing_b)
            }
            (None, Some(_)) => -self.integrate(b, a, sing_b, None),
            _ => self.integrate_from(a, b, sing_a, 0),
        }
    }

    fn nearest_other_prevertex(&self, p: Complex64, skip: Option<usize>) -> f64 {
        self.prevertices
            .iter()
            .enumerate()
            .filter(|(k, _)| Some(*k) != skip)
            .map(|(_, &z)| (z - p).norm())
            .fold(f64::INFINITY, f64::min)
    }

    fn integrate_from(
        &self,
        a: Complex64,
        b: Complex64,
        sing_a: Option<usize>,
        depth: usize,
    ) -> Complex64 {
        let len = (b - a).norm();
        if len < 1e-15 {
            return Complex64::new(0.0, 0.0);
        }
        if !len.is_finite() {
            // A non-finite iterate would defeat every subdivision test and
            // recurse to the depth cap on both halves; surface the NaN.
            return Complex64::new(f64::NAN, f64::NAN);
        }
        if let Some(k) = sing_a {
            // Compound one-half rule: a Gauss-Jacobi panel starting at the
            // singular endpoint may reach no farther than half the distance
            // to the nearest other prevertex.
            let reach = 0.5 * self.nearest_other_prevertex(a, Some(k));
            if len <= reach || depth > 48 {
                self.gj_panel(a, b, k)
            } else {
                let m = a + (b - a) * (reach / len);
                self.gj_panel(a, m, k) + self.integrate_from(m, b, None, depth + 1)
            }
        } else {
            // Regular panel: keep the panel no longer than its distance to
            // the nearest prevertex, bisecting otherwise.
            let mid = 0.5 * (a + b);
            let d = self
                .nearest_other_prevertex(a, None)
                .min(self.nearest_other_prevertex(b, None))
                .min(self.nearest_other_prevertex(mid, None));
            if len <= d || depth > 48 {
                self.gl_panel(a, b)
            } else {
                self.integrate_from(a, mid, None, depth + 1)
                    + self.integrate_from(mid, b, None, depth + 1)
            }
        }
    }

    /// Gauss-Jacobi panel with the endpoint singularity at `a` (prevertex k)
    /// absorbed into the weight: 1 - z/z_k = c (1+t) with c = -(b-a)/(2 z_k).
    fn gj_panel(&self, a: Complex64, b: Complex64, k: usize) -> Complex64 {
        let h = 0.5 * (b - a);
        let cfac = -h / self.prevertices[k];
        let rule = &self.gj[k];
        let mut s = Complex64::new(0.0, 0.0);
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let z = a + h * (1.0 + t);
            s += w * self.integrand(z, Some(k));
        }
        h * cfac.powf(self.beta[k]) * s
    }

    fn gl_panel(&self, a: Complex64, b: Complex64) -> Complex64 {
        let h = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut s = Complex64::new(0.0, 0.0);
        for (&t, &w) in self.gl.nodes.iter().zip(&self.gl.weights) {
            s += w * self.integrand(mid + h * t, None);
        }
        h * s
    }
}

/// A solved Schwarz-Christoffel map from the unit disk onto a polygon.
///
/// Normalization: the last prevertex is fixed at 1 and the conformal center
/// f(0) sits at the polygon's area centroid.
pub struct ConformalMap {
    verts: Vec<Complex64>,
    prevertex_args: Vec<f64>,
    scale: Complex64,
    offset: Complex64,
    residual: f64,
    integ: Integrator,
}

impl ConformalMap {
    /// Solves the SC parameter problem for a simple CCW polygon.
    ///
    /// Unknowns are the n-1 free prevertex gaps (log-ratio parameterized so
    /// ordering and positivity hold by construction), driven by a damped
    /// Newton iteration on side-length ratios plus the centroid-centering
    /// condition.
    pub fn solve(poly: &Polygon, tol: f64) -> Result<ConformalMap> {
        let n = poly.len();
        let centroid = c(poly.centroid());
        let scale0 = poly
            .vertices()
            .iter()
            .map(|v| (c(*v) - centroid).norm())
            .fold(0.0f64, f64::max);
        let verts: Vec<Complex64> = poly.vertices().iter().map(|v| c(*v)).collect();
        let vhat: Vec<Complex64> = verts.iter().map(|&w| (w - centroid) / scale0).collect();
        let beta = exterior_params(&verts)?;
        let mut integ = Integrator::new(beta);

        let side_ref: Vec<f64> = (0..n)
            .map(|k| (vhat[(k + 1) % n] - vhat[k]).norm())
            .collect();

        // x -> residual vector (n-1 entries).
        let eval = |x: &DVector<f64>, integ: &mut Integrator| -> DVector<f64> {
            let args = gaps_to_args(x);
            integ.set_prevertices(args.iter().map(|&a| Complex64::from_polar(1.0, a)).collect());
            let mut sides = Vec::with_capacity(n - 1);
            for k in 0..n - 1 {
                sides.push(integ.integrate(
                    integ.prevertices[k],
                    integ.prevertices[k + 1],
                    Some(k),
                    Some(k + 1),
                ));
            }
            let scale = (vhat[1] - vhat[0]) / sides[0];
            let mut r = DVector::zeros(n - 1);
            for k in 1..n.saturating_sub(2) {
                r[k - 1] = sides[k].norm() / sides[0].norm() - side_ref[k] / side_ref[0];
            }
            let ic = integ.integrate(Complex64::new(0.0, 0.0), integ.prevertices[0], None, Some(0));
            let rc = scale * ic - vhat[0];
            r[n - 3] = rc.re;
            r[n - 2] = rc.im;
            r
        };

        let m = n - 1;
        let mut x = DVector::zeros(m);
        let mut r = eval(&x, &mut integ);
        let mut rn = r.norm();
        let mut converged = r.amax() < tol;
        let fd = 1e-7;
        for _ in 0..100 {
            if converged {
                break;
            }
            let mut jac = DMatrix::zeros(m, m);
            for j in 0..m {
                let mut xp = x.clone();
                xp[j] += fd;
                let rp = eval(&xp, &mut integ);
                for i in 0..m {
                    jac[(i, j)] = (rp[i] - r[i]) / fd;
                }
            }
            let lu = jac.lu();
            let step = match lu.solve(&(-&r)) {
                Some(s) if s.iter().all(|v| v.is_finite()) => s,
                _ => {
                    return Err(Error::ScSolverFailure { residual: rn });
                }
            };
            // Damped update: halve until the residual norm drops.
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..10 {
                let xt = &x + &step * lambda;
                let rt = eval(&xt, &mut integ);
                let rtn = rt.norm();
                if rtn.is_finite() && rtn < rn {
                    x = xt;
                    r = rt;
                    rn = rtn;
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
            converged = r.amax() < tol;
        }
        if !converged {
            return Err(Error::ScSolverFailure { residual: rn });
        }

        let args = gaps_to_args(&x);
        let min_gap = args
            .iter()
            .zip(args.iter().cycle().skip(1))
            .take(n)
            .map(|(&a, &b)| (b - a).rem_euclid(2.0 * PI))
            .fold(f64::INFINITY, f64::min);
        if min_gap < MIN_PREVERTEX_GAP {
            return Err(Error::Crowding { gap: min_gap });
        }

        integ.set_prevertices(args.iter().map(|&a| Complex64::from_polar(1.0, a)).collect());
        let i0 = integ.integrate(
            integ.prevertices[0],
            integ.prevertices[1],
            Some(0),
            Some(1),
        );
        let scale = scale0 * (vhat[1] - vhat[0]) / i0;
        let map = ConformalMap {
            verts,
            prevertex_args: args,
            scale,
            offset: centroid,
            residual: rn,
            integ,
        };
        Ok(map)
    }

    pub fn n_vertices(&self) -> usize {
        self.verts.len()
    }

    pub fn prevertex_args(&self) -> &[f64] {
        &self.prevertex_args
    }

    pub fn prevertices(&self) -> &[Complex64] {
        &self.integ.prevertices
    }

    pub fn scale(&self) -> Complex64 {
        self.scale
    }

    pub fn offset(&self) -> Complex64 {
        self.offset
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn betas(&self) -> &[f64] {
        &self.integ.beta
    }

    /// Map evaluation for |zeta| <= 1.
    pub fn eval(&self, zeta: Complex64) -> Result<Complex64> {
        if zeta.norm() > 1.0 + 1e-10 {
            return Err(Error::Domain(format!("|zeta| = {} > 1", zeta.norm())));
        }
        let origin = Complex64::new(0.0, 0.0);
        // Endpoint singularity handling when zeta sits on a prevertex.
        let sing = self
            .integ
            .prevertices
            .iter()
            .position(|&z| (z - zeta).norm() < 1e-12);
        let i = self.integ.integrate(origin, zeta, None, sing);
        Ok(self.offset + self.scale * i)
    }

    /// Closed-form derivative f'(zeta) = C prod_k (1 - zeta/z_k)^beta_k,
    /// valid strictly inside the disk.
    pub fn derivative(&self, zeta: Complex64) -> Result<Complex64> {
        if zeta.norm() >= 1.0 {
            return Err(Error::Domain(format!(
                "derivative requires |zeta| < 1, got {}",
                zeta.norm()
            )));
        }
        Ok(self.scale * self.integ.integrand(zeta, None))
    }

    /// Max vertex reproduction error over all prevertices.
    pub fn vertex_error(&self) -> f64 {
        let mut e = 0.0f64;
        for (k, &w) in self.verts.iter().enumerate() {
            if let Ok(f) = self.eval(self.integ.prevertices[k]) {
                e = e.max((f - w).norm());
            }
        }
        e
    }

    /// Debug dump of the solved map for regression fixtures.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "vertices": self.verts.iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
            "prevertex_args": self.prevertex_args,
            "scale": [self.scale.re, self.scale.im],
            "offset": [self.offset.re, self.offset.im],
            "residual": self.residual,
        })
    }
}

/// Gap parameterization: n-1 unconstrained values, softmax-normalized to
/// positive gaps summing to 2 pi; returns the n cumulative prevertex angles
/// with the last fixed at 2 pi.
fn gaps_to_args(x: &DVector<f64>) -> Vec<f64> {
    let n = x.len() + 1;
    let mut e: Vec<f64> = x.iter().map(|&v| v.exp()).collect();
    e.push(1.0);
    let total: f64 = e.iter().sum();
    let mut args = Vec::with_capacity(n);
    let mut acc = 0.0;
    for v in e {
        acc += 2.0 * PI * v / total;
        args.push(acc);
    }
    args
}

/// Transplants a disk rule onto a polygon through its SC map: points f(z_j),
/// weights w_j |f'(z_j)|^2.
pub fn polygon_quadrature(
    poly: &Polygon,
    rule: &DiskRule,
    tol: f64,
) -> Result<Vec<(Vec2, f64)>> {
    let map = ConformalMap::solve(poly, tol)?;
    map_quadrature(&map, rule)
}

/// Same as [`polygon_quadrature`] but reusing an already solved map.
pub fn map_quadrature(map: &ConformalMap, rule: &DiskRule) -> Result<Vec<(Vec2, f64)>> {
    let mut out = Vec::with_capacity(rule.len());
    for (&p, &w) in rule.points.iter().zip(&rule.weights) {
        let zeta = Complex64::new(p.x, p.y);
        let f = map.eval(zeta)?;
        let fp = map.derivative(zeta)?;
        out.push((Vec2::new(f.re, f.im), w * fp.norm_sqr()));
    }
    Ok(out)
}
