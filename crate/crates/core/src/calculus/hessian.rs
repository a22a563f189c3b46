//! Second derivatives of `F` as an integral over `S = ∂K ∩ ∂(x + tau K)`.

use serde::{Deserialize, Serialize};

use super::crossing::{boundary_intersection, require_smooth, BoundaryIntersectionCurve};
use crate::error::{GeomError, Result};
use crate::linalg::{compensated_sum, dot, norm};
use crate::volume::TranslateProblem;

/// Crossings with `|<M, N>| > 1 - EPS_TANG` are rejected.
pub const EPS_TANG: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianReport {
    pub matrix: Vec<Vec<f64>>,
    /// Number of samples of `S` (crossing points in 2D).
    pub samples: usize,
    /// Measure of `S` (counting measure in 2D, length in 3D).
    pub measure: f64,
    pub max_cos: f64,
}

/// `H_ij = -1/2 ∫_S (M_j N_i + M_i N_j) / sqrt(1 - <M,N>^2) dσ`.
pub fn hessian_from_curve(curve: &BoundaryIntersectionCurve) -> Result<Vec<Vec<f64>>> {
    let n = curve.dim;
    let mut terms: Vec<Vec<Vec<f64>>> = vec![vec![Vec::with_capacity(curve.points.len()); n]; n];
    for q in &curve.points {
        let c = dot(&q.m, &q.n);
        if c.abs() > 1.0 - EPS_TANG {
            return Err(GeomError::IllConditionedCrossing { cos: c.abs(), eps: EPS_TANG });
        }
        let w = q.weight / (1.0 - c * c).sqrt();
        for i in 0..n {
            for j in i..n {
                terms[i][j].push(-0.5 * w * (q.m[j] * q.n[i] + q.m[i] * q.n[j]));
            }
        }
    }
    let mut h = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = compensated_sum(terms[i][j].iter().copied());
            h[i][j] = v;
            h[j][i] = v;
        }
    }
    Ok(h)
}

/// Hessian of `F` at `x`. `resolution` is the angular sweep in 2D and the number of curve
/// samples in 3D.
pub fn hessian_f(p: &TranslateProblem, resolution: usize) -> Result<HessianReport> {
    require_smooth(&p.body)?;
    if norm(&p.x) == 0.0 {
        return Err(GeomError::Precondition("the Hessian formula needs x != 0".into()));
    }
    if p.outside_support() {
        return Err(GeomError::Precondition("F(x) = 0 outside the support".into()));
    }
    let curve = boundary_intersection(p, resolution)?;
    let matrix = hessian_from_curve(&curve)?;
    Ok(HessianReport {
        matrix,
        samples: curve.points.len(),
        measure: curve.measure,
        max_cos: curve.max_cos(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::Body;
    use crate::calculus::grad_f;

    #[test]
    fn disk_hessian() {
        let p = TranslateProblem::new(Body::ball(2, 1.0).unwrap(), 1.0, vec![1.0, 0.0]).unwrap();
        let h = hessian_f(&p, 4096).unwrap();
        assert_eq!(h.samples, 2);
        assert!((h.matrix[0][0] - 1.0 / 3f64.sqrt()).abs() < 1e-11, "{h:?}");
        assert!((h.matrix[1][1] + 3f64.sqrt()).abs() < 1e-11);
        assert!(h.matrix[0][1].abs() < 1e-12);
        assert_eq!(h.matrix[0][1], h.matrix[1][0]);
    }

    #[test]
    fn nested_is_flat_and_tangency_errors() {
        let p = TranslateProblem::new(Body::ball(2, 1.0).unwrap(), 0.5, vec![0.1, 0.0]).unwrap();
        let h = hessian_f(&p, 1024).unwrap();
        assert_eq!(h.matrix, vec![vec![0.0; 2]; 2]);
        // nearly internally tangent disks
        let p = TranslateProblem::new(Body::ball(2, 1.0).unwrap(), 0.5, vec![0.5 + 1e-12, 0.0]).unwrap();
        assert!(matches!(
            hessian_f(&p, 4096),
            Err(GeomError::IllConditionedCrossing { .. })
        ));
    }

    #[test]
    fn ellipse_hessian_matches_gradient_differences() {
        let body = Body::ellipsoid(vec![vec![1.5, -0.2], vec![-0.2, 0.8]]).unwrap();
        let p = TranslateProblem::new(body, 0.9, vec![0.7, 0.3]).unwrap();
        let h = hessian_f(&p, 4096).unwrap();
        let step = 1e-4;
        for j in 0..2 {
            let mut xp = p.x.clone();
            let mut xm = p.x.clone();
            xp[j] += step;
            xm[j] -= step;
            let gp = grad_f(&p.at(xp), 4096).unwrap().gradient;
            let gm = grad_f(&p.at(xm), 4096).unwrap().gradient;
            for i in 0..2 {
                let fd = (gp[i] - gm[i]) / (2.0 * step);
                assert!((fd - h.matrix[i][j]).abs() < 1e-6, "{i}{j}: {fd} vs {}", h.matrix[i][j]);
            }
        }
    }

    #[test]
    fn sphere_hessian() {
        let p = TranslateProblem::new(Body::ball(3, 1.0).unwrap(), 1.0, vec![1.0, 0.0, 0.0]).unwrap();
        let h = hessian_f(&p, 2000).unwrap();
        let pi = std::f64::consts::PI;
        let want = [0.5 * pi, -0.75 * pi, -0.75 * pi];
        for i in 0..3 {
            assert!((h.matrix[i][i] - want[i]).abs() < 1e-5, "{h:?}");
            for j in 0..3 {
                if i != j {
                    assert!(h.matrix[i][j].abs() < 1e-6);
                }
            }
        }
    }
}
