//! Gradient of `F(x) = |K ∩ (x + tau K)|` as the flux of the outer normal of `x + tau K`
//! through the part of its boundary inside `K`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::crossing::{body_arcs, radial2, require_smooth, translate_arcs};
use crate::bodies::{Body, DirectionGrid};
use crate::error::{GeomError, Result};
use crate::linalg::{compensated_sum, cross3, norm, normalized};
use crate::quadrature::integrate;
use crate::volume::TranslateProblem;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientReport {
    pub gradient: Vec<f64>,
    /// The same gradient as minus the normal flux of `K` through `∂K ∩ (x + tau K)`.
    pub reverse: Vec<f64>,
    /// `∫ N dν` over `∂K ∩ (x + tau K)`: points along the outer normal of the level set.
    pub normal_integral: Vec<f64>,
    /// Largest componentwise difference between the two forms.
    pub agreement: f64,
    pub outside_support: bool,
}

fn zero_report(n: usize, outside: bool) -> GradientReport {
    GradientReport {
        gradient: vec![0.0; n],
        reverse: vec![0.0; n],
        normal_integral: vec![0.0; n],
        agreement: 0.0,
        outside_support: outside,
    }
}

/// `∫ w(phi) |z'(phi)| normal(phi) dphi` over the arcs.
fn arc_flux(body: &Body, arcs: &[(f64, f64)], weight: f64, tol: f64) -> Result<Vec<f64>> {
    let mut parts = Vec::new();
    for &(a, b) in arcs {
        radial2(body, a)?;
        let f = |phi: f64| {
            let r = radial2(body, phi).expect("smoothness checked");
            let speed = (r.dz[0] * r.dz[0] + r.dz[1] * r.dz[1]).sqrt();
            vec![weight * speed * r.normal[0], weight * speed * r.normal[1]]
        };
        let res = integrate(f, a, b, tol, 4000);
        if !(res.error <= 100.0 * tol) {
            return Err(GeomError::Numerical(format!(
                "arc quadrature did not converge (error {:.3e})",
                res.error
            )));
        }
        parts.push(res.value);
    }
    Ok((0..2).map(|i| compensated_sum(parts.iter().map(|v| v[i]))).collect())
}

fn gradient_2d(p: &TranslateProblem, sweep: usize) -> Result<GradientReport> {
    let scale = p.body.bounding_half_widths().iter().fold(0.0f64, |a, b| a.max(*b));
    let tol = 1e-13 * scale * p.tau.max(1.0);
    let grad = arc_flux(&p.body, &translate_arcs(p, sweep), p.tau, tol)?;
    let rev = arc_flux(&p.body, &body_arcs(p, sweep), -1.0, tol)?;
    finish(grad, rev, 1e-8 * scale.max(1.0) * p.tau.max(1.0))
}

fn finish(grad: Vec<f64>, rev: Vec<f64>, tol: f64) -> Result<GradientReport> {
    let agreement = grad.iter().zip(&rev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if !(agreement <= tol) {
        return Err(GeomError::Numerical(format!(
            "the two flux forms of the gradient differ by {agreement:.3e}"
        )));
    }
    Ok(GradientReport {
        normal_integral: rev.iter().map(|v| -v).collect(),
        gradient: grad,
        reverse: rev,
        agreement,
        outside_support: false,
    })
}

/// Vector area `∫ n dA` of the part of the surface `center + s ∂K` where `level <= 0`,
/// from the radially projected icosphere clipped at the level set. Edge crossings are
/// shared between neighbouring triangles so interior edges cancel exactly.
fn patch_vector_area<L>(body: &Body, grid: &DirectionGrid, s: f64, level: &L) -> [f64; 3]
where
    L: Fn(&[f64]) -> f64 + Sync,
{
    // surface points relative to the center
    let point = |dir: &[f64]| -> Vec<f64> { body.radial_point(dir).iter().map(|v| v * s).collect() };
    let verts: Vec<Vec<f64>> = grid.units.par_iter().map(|u| point(u)).collect();
    let inside: Vec<bool> = verts.par_iter().map(|v| level(v) <= 0.0).collect();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for t in &grid.triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if inside[a] != inside[b] {
                edges.push((a.min(b), a.max(b)));
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let crossing_points: Vec<Vec<f64>> = edges
        .par_iter()
        .map(|&(a, b)| {
            let (ua, ub) = (&grid.units[a], &grid.units[b]);
            let at = |t: f64| -> Vec<f64> {
                let d: Vec<f64> = ua.iter().zip(ub).map(|(p, q)| (1.0 - t) * p + t * q).collect();
                point(&normalized(&d))
            };
            let (mut lo, mut hi) = (0.0, 1.0);
            let lo_inside = inside[a];
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if (level(&at(mid)) <= 0.0) == lo_inside {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            at(0.5 * (lo + hi))
        })
        .collect();
    let crossing: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let areas: Vec<[f64; 3]> = grid
        .triangles
        .par_iter()
        .map(|t| {
            let mut poly: Vec<&[f64]> = Vec::with_capacity(4);
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if inside[a] {
                    poly.push(&verts[a]);
                }
                if inside[a] != inside[b] {
                    poly.push(&crossing_points[crossing[&(a.min(b), a.max(b))]]);
                }
            }
            let mut acc = [0.0; 3];
            if poly.len() >= 3 {
                for i in 0..poly.len() {
                    let c = cross3(poly[i], poly[(i + 1) % poly.len()]);
                    for k in 0..3 {
                        acc[k] += 0.5 * c[k];
                    }
                }
            }
            acc
        })
        .collect();
    [0, 1, 2].map(|k| compensated_sum(areas.iter().map(|a| a[k])))
}

fn flux_3d(p: &TranslateProblem, level: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let grid = DirectionGrid::icosphere(level)?;
    let x = p.x.clone();
    let tau = p.tau;
    let body = &p.body;
    // ∂(x + tau K) inside K, in coordinates relative to x
    let g = patch_vector_area(body, &grid, tau, &|v: &[f64]| {
        let y: Vec<f64> = v.iter().zip(&x).map(|(a, b)| a + b).collect();
        body.gauge(&y) - 1.0
    });
    // ∂K inside x + tau K
    let r = patch_vector_area(body, &grid, 1.0, &|v: &[f64]| {
        let z: Vec<f64> = v.iter().zip(&x).map(|(a, b)| (a - b) / tau).collect();
        body.gauge(&z) - 1.0
    });
    Ok((g.to_vec(), r.iter().map(|v| -v).collect()))
}

fn gradient_3d(p: &TranslateProblem, level: usize) -> Result<GradientReport> {
    let level = level.clamp(2, 7);
    let (g1, r1) = flux_3d(p, level)?;
    let (g0, r0) = flux_3d(p, level - 1)?;
    // second-order mesh error: extrapolate from the two finest levels
    let ex = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(f, c)| (4.0 * f - c) / 3.0).collect() };
    let grad = ex(&g1, &g0);
    let rev = ex(&r1, &r0);
    let scale = p.body.bounding_half_widths().iter().fold(0.0f64, |a, b| a.max(*b));
    let size = scale * scale * p.tau.max(1.0);
    finish(grad, rev, 50.0 * size / 4f64.powi(level as i32))
}

/// `∇F(x)`. `resolution` is the angular sweep in 2D and the icosphere level in 3D.
pub fn grad_f(p: &TranslateProblem, resolution: usize) -> Result<GradientReport> {
    require_smooth(&p.body)?;
    let n = p.body.dim();
    if p.outside_support() {
        return Ok(zero_report(n, true));
    }
    if norm(&p.x) == 0.0 {
        return Ok(zero_report(n, false));
    }
    match n {
        2 => gradient_2d(p, resolution.max(16)),
        3 => gradient_3d(p, resolution),
        d => Err(GeomError::Unsupported(format!("gradients in dimension {d}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::{intersection_volume, VolumeOptions};

    fn disk_at(x: Vec<f64>) -> TranslateProblem {
        TranslateProblem::new(Body::ball(2, 1.0).unwrap(), 1.0, x).unwrap()
    }

    #[test]
    fn disk_gradient() {
        let g = grad_f(&disk_at(vec![1.0, 0.0]), 4096).unwrap();
        assert!((g.gradient[0] + 3f64.sqrt()).abs() < 1e-12, "{g:?}");
        assert!(g.gradient[1].abs() < 1e-12);
        assert!(g.agreement < 1e-12);
    }

    #[test]
    fn flux_equals_rotated_chord() {
        // ∫ M ds over an arc of a closed curve is the chord rotated by -90 degrees
        let body = Body::pball(3.0, vec![1.0, 0.7]).unwrap();
        let p = TranslateProblem::new(body.clone(), 0.8, vec![0.6, -0.4]).unwrap();
        let g = grad_f(&p, 4096).unwrap();
        let arcs = translate_arcs(&p, 4096);
        let mut expect = [0.0; 2];
        for (a, b) in arcs {
            let za = radial2(&body, a).unwrap().z;
            let zb = radial2(&body, b).unwrap().z;
            expect[0] += p.tau * (zb[1] - za[1]);
            expect[1] -= p.tau * (zb[0] - za[0]);
        }
        for i in 0..2 {
            assert!((g.gradient[i] - expect[i]).abs() < 1e-11, "{g:?} {expect:?}");
        }
    }

    #[test]
    fn trivial_cases() {
        let g = grad_f(&disk_at(vec![0.0, 0.0]), 256).unwrap();
        assert_eq!(g.gradient, vec![0.0, 0.0]);
        let g = grad_f(&disk_at(vec![2.5, 0.0]), 256).unwrap();
        assert!(g.outside_support);
        let sq = TranslateProblem::new(Body::square(1.0).unwrap(), 1.0, vec![0.5, 0.0]).unwrap();
        assert!(matches!(grad_f(&sq, 256), Err(GeomError::NotSmooth(_))));
    }

    #[test]
    fn matches_finite_differences_on_an_ellipse() {
        let body = Body::ellipsoid(vec![vec![1.0, 0.3], vec![0.3, 2.0]]).unwrap();
        let p = TranslateProblem::new(body, 1.3, vec![0.4, 0.5]).unwrap();
        let g = grad_f(&p, 4096).unwrap();
        let opts = VolumeOptions::default();
        let f = |x: Vec<f64>| intersection_volume(&p.at(x), &opts).unwrap().value;
        let h = 1e-3;
        for i in 0..2 {
            let mut e = vec![0.0; 2];
            e[i] = h;
            let at = |s: f64| f(p.x.iter().zip(&e).map(|(a, b)| a + s * b).collect());
            let fd = (-at(2.0) + 8.0 * at(1.0) - 8.0 * at(-1.0) + at(-2.0)) / (12.0 * h);
            assert!((fd - g.gradient[i]).abs() < 1e-6, "{i}: {fd} vs {}", g.gradient[i]);
        }
    }

    #[test]
    fn sphere_gradient() {
        // F(d) = π (4 + d)(2 - d)^2 / 12, F'(1) = -3π/4
        let p = TranslateProblem::new(Body::ball(3, 1.0).unwrap(), 1.0, vec![1.0, 0.0, 0.0]).unwrap();
        let g = grad_f(&p, 5).unwrap();
        let exact = -0.75 * std::f64::consts::PI;
        assert!((g.gradient[0] - exact).abs() < 1e-4 * exact.abs(), "{g:?}");
        assert!(g.gradient[1].abs() < 1e-4 && g.gradient[2].abs() < 1e-4);
        assert!((g.reverse[0] - exact).abs() < 1e-4 * exact.abs(), "{g:?}");
    }
}
