//! Support values and widths of lenses and caps.

use crate::bodies::Body;
use crate::error::{check_dim, GeomError, Result};
use crate::linalg::{complement_basis, dot, norm, normalized, sub};
use crate::planar::{intersect_placed, PlanarSandwich, Placed};

use super::TranslateProblem;

/// `sup <d, y>` over `K ∩ (x + tau K)`.
pub fn lens_support(p: &TranslateProblem, d: &[f64]) -> Result<f64> {
    check_dim(p.body.dim(), d.len())?;
    if p.outside_support() {
        return Err(GeomError::Empty);
    }
    let body = &p.body;
    if body.is_polytope() {
        return Ok(lens_vertices(p).iter().map(|v| dot(v, d)).fold(f64::NEG_INFINITY, f64::max));
    }
    let y1 = body.boundary_point(d);
    let z: Vec<f64> = y1.iter().zip(&p.x).map(|(a, b)| (a - b) / p.tau).collect();
    if body.gauge(&z) <= 1.0 {
        return Ok(body.support(d));
    }
    let y2: Vec<f64> = p.x.iter().zip(&y1).map(|(a, b)| a + p.tau * b).collect();
    if body.gauge(&y2) <= 1.0 {
        return Ok(dot(d, &p.x) + p.tau * body.support(d));
    }
    dual_minimum(p, d)
}

fn lens_vertices(p: &TranslateProblem) -> Vec<Vec<f64>> {
    if p.body.dim() == 2 {
        let sw = PlanarSandwich::full(&p.body, 16);
        let pieces = [
            Placed { poly: &sw.outer, s: 1.0, t: [0.0, 0.0] },
            Placed { poly: &sw.outer, s: p.tau, t: [p.x[0], p.x[1]] },
        ];
        let clip = intersect_placed(&pieces, &[]).0;
        if clip.vertices.is_empty() {
            // degenerate (zero-area) lens: fall back to the planar vertex enumeration
            let h = p.body.as_hpolytope().unwrap();
            return h.intersect(&h.scaled_translated(p.tau, &p.x)).vertices();
        }
        return clip.vertices.iter().map(|v| v.to_vec()).collect();
    }
    let h = p.body.as_hpolytope().unwrap();
    h.intersect(&h.scaled_translated(p.tau, &p.x)).vertices()
}

/// Minimize `h_K(d - w) + <w, x> + tau h_K(w)` by BFGS. At the minimizer the two
/// boundary points `y(d - w)` and `x + tau y(w)` coincide.
fn dual_minimum(p: &TranslateProblem, d: &[f64]) -> Result<f64> {
    let body = &p.body;
    let n = d.len();
    let phi = |w: &[f64]| body.support(&sub(d, w)) + dot(w, &p.x) + p.tau * body.support(w);
    let grad = |w: &[f64]| -> Vec<f64> {
        let a = body.boundary_point(&sub(d, w));
        let b = body.boundary_point(w);
        (0..n).map(|i| -a[i] + p.x[i] + p.tau * b[i]).collect()
    };
    let scale = body.bounding_half_widths().iter().fold(0.0f64, |m, v| m.max(*v)) * (1.0 + p.tau)
        + norm(&p.x);
    let target = 1e-13 * scale;
    let mut w: Vec<f64> = d.iter().map(|v| 0.5 * v).collect();
    let mut f = phi(&w);
    let mut g = grad(&w);
    let mut hinv = nalgebra::DMatrix::<f64>::identity(n, n) * (norm(d) / scale.max(1e-300));
    for _ in 0..400 {
        if norm(&g) <= target {
            break;
        }
        let gv = nalgebra::DVector::from_column_slice(&g);
        let mut dir: Vec<f64> = (-&hinv * &gv).iter().copied().collect();
        let mut slope = dot(&dir, &g);
        if slope >= 0.0 {
            hinv = nalgebra::DMatrix::identity(n, n) * (norm(d) / scale.max(1e-300));
            dir = g.iter().map(|v| -v * norm(d) / scale.max(1e-300)).collect();
            slope = dot(&dir, &g);
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..80 {
            let wn: Vec<f64> = w.iter().zip(&dir).map(|(a, b)| a + t * b).collect();
            let fnew = phi(&wn);
            if fnew <= f + 1e-4 * t * slope {
                accepted = Some((wn, fnew));
                break;
            }
            t *= 0.5;
        }
        let Some((wn, fnew)) = accepted else { break };
        let gn = grad(&wn);
        let s: Vec<f64> = wn.iter().zip(&w).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            let sv = nalgebra::DVector::from_column_slice(&s);
            let yv = nalgebra::DVector::from_column_slice(&y);
            let rho = 1.0 / sy;
            let i = nalgebra::DMatrix::<f64>::identity(n, n);
            let a = &i - rho * &sv * yv.transpose();
            let b = &i - rho * &yv * sv.transpose();
            hinv = &a * &hinv * &b + rho * &sv * sv.transpose();
        }
        w = wn;
        f = fnew;
        g = gn;
    }
    if !(norm(&g) <= 1e-7 * scale) || !f.is_finite() {
        return Err(GeomError::Numerical(format!(
            "lens support did not converge (residual {:.3e})",
            norm(&g)
        )));
    }
    Ok(f)
}

/// Width of `K ∩ (x + tau K)` along `dir`.
pub fn width_of_intersection(p: &TranslateProblem, dir: &[f64]) -> Result<f64> {
    let d = normalized(dir);
    let up = lens_support(p, &d)?;
    let down: Vec<f64> = d.iter().map(|v| -v).collect();
    let lo = lens_support(p, &down)?;
    Ok((up + lo).max(0.0))
}

/// An orthonormal frame with a coordinate box, for sampling small regions.
#[derive(Clone, Debug)]
pub struct Frame {
    pub axes: Vec<Vec<f64>>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Frame {
    pub fn to_world(&self, z: &[f64]) -> Vec<f64> {
        let n = self.axes.len();
        let mut y = vec![0.0; n];
        for (zi, a) in z.iter().zip(&self.axes) {
            for k in 0..n {
                y[k] += zi * a[k];
            }
        }
        y
    }

    fn with_axes(n: &[f64], mut extent: impl FnMut(&[f64]) -> f64) -> Frame {
        let mut axes = vec![n.to_vec()];
        axes.extend(complement_basis(n));
        let mut lo = Vec::with_capacity(axes.len());
        let mut hi = Vec::with_capacity(axes.len());
        for a in &axes {
            let neg: Vec<f64> = a.iter().map(|v| -v).collect();
            let (l, h) = (-extent(&neg), extent(a));
            let pad = 1e-9 * (h - l).abs().max(1e-12);
            lo.push(l - pad);
            hi.push(h + pad);
        }
        Frame { axes, lo, hi }
    }
}

/// Tight frame around the lens, aligned with the unit vector `n`.
pub fn lens_frame(p: &TranslateProblem, n: &[f64]) -> Result<Frame> {
    let mut err = None;
    let f = Frame::with_axes(n, |a| match lens_support(p, a) {
        Ok(v) => v,
        Err(e) => {
            err = Some(e);
            0.0
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(f),
    }
}

/// `sup <b, y>` over `K ∩ { <n, y> >= level }`, as `min_{s >= 0} h_K(b + s n) - s level`.
fn cap_support(body: &Body, n: &[f64], level: f64, b: &[f64]) -> f64 {
    let f = |s: f64| {
        let v: Vec<f64> = b.iter().zip(n).map(|(bi, ni)| bi + s * ni).collect();
        body.support(&v) - s * level
    };
    let mut hi = 1.0;
    while f(2.0 * hi) < f(hi) && hi < 1e12 {
        hi *= 2.0;
    }
    let (mut a, mut c) = (0.0, 2.0 * hi);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = c - r * (c - a);
    let mut x2 = a + r * (c - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if c - a <= 1e-14 * (1.0 + c) {
            break;
        }
        if f1 <= f2 {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - r * (c - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (c - a);
            f2 = f(x2);
        }
    }
    f(0.0).min(f1.min(f2))
}

/// Tight frame around the cap `K ∩ { <n, y> >= level }`.
pub fn cap_frame(body: &Body, n: &[f64], level: f64) -> Frame {
    Frame::with_axes(n, |a| cap_support(body, n, level, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_examples() {
        let disk = Body::ball(2, 1.0).unwrap();
        let p = TranslateProblem::new(disk.clone(), 1.0, vec![0.0, 0.0]).unwrap();
        assert!((width_of_intersection(&p, &[0.6, 0.8]).unwrap() - 2.0).abs() < 1e-12);
        let p = p.at(vec![1.0, 0.0]);
        assert!((width_of_intersection(&p, &[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        // across the lens: chord through the crossing points (1/2, ±sqrt3/2)
        assert!((width_of_intersection(&p, &[0.0, 1.0]).unwrap() - 3f64.sqrt()).abs() < 1e-9);
        let sq = TranslateProblem::new(Body::square(1.0).unwrap(), 1.0, vec![1.0, 1.0]).unwrap();
        assert!((width_of_intersection(&sq, &[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        let far = p.at(vec![2.5, 0.0]);
        assert!(matches!(width_of_intersection(&far, &[1.0, 0.0]), Err(GeomError::Empty)));
    }

    #[test]
    fn dual_path_on_ellipse_matches_crossing_chord() {
        // ellipse (2,1) and its translate by (2,0): crossings at y1 = 1, y2 = ±sqrt(3)/2
        let ell = Body::ellipsoid_semiaxes(&[2.0, 1.0]).unwrap();
        let p = TranslateProblem::new(ell, 1.0, vec![2.0, 0.0]).unwrap();
        let w = width_of_intersection(&p, &[0.0, 1.0]).unwrap();
        assert!((w - 3f64.sqrt()).abs() < 1e-9, "{w}");
        // 3D cube vs sphere pair of same kinds
        let ball = Body::ball(3, 1.0).unwrap();
        let p = TranslateProblem::new(ball, 1.0, vec![1.0, 0.0, 0.0]).unwrap();
        let w = width_of_intersection(&p, &[0.0, 0.0, 1.0]).unwrap();
        assert!((w - 3f64.sqrt()).abs() < 1e-9, "{w}");
    }

    #[test]
    fn cap_frame_bounds_the_cap() {
        let disk = Body::ball(2, 1.0).unwrap();
        let f = cap_frame(&disk, &[1.0, 0.0], 0.9);
        assert!((f.lo[0] - 0.9).abs() < 1e-8 && (f.hi[0] - 1.0).abs() < 1e-8);
        let half = (1.0f64 - 0.81).sqrt();
        assert!((f.hi[1] - half).abs() < 1e-8 && (f.lo[1] + half).abs() < 1e-8);
    }
}
