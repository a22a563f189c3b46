//! The boundary intersection `S = ∂K ∩ ∂(x + tau K)`: angular root finding in the plane,
//! predictor-corrector marching in space.

use std::f64::consts::TAU as TWO_PI;

use serde::{Deserialize, Serialize};

use crate::bodies::Body;
use crate::error::{GeomError, Result};
use crate::linalg::{complement_basis, cross3, dot, norm, normalized, solve_dense, sub};
use crate::volume::TranslateProblem;

/// A sample of `S` with the outer normals `N` of `K` and `M` of `x + tau K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub y: Vec<f64>,
    pub n: Vec<f64>,
    pub m: Vec<f64>,
    /// Counting weight in the plane, arclength weight in space.
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryIntersectionCurve {
    pub dim: usize,
    pub points: Vec<CurvePoint>,
    /// Total weight (number of crossings in 2D, length in 3D).
    pub measure: f64,
}

impl BoundaryIntersectionCurve {
    /// Largest `|<M, N>|` over the samples.
    pub fn max_cos(&self) -> f64 {
        self.points
            .iter()
            .map(|p| dot(&p.m, &p.n).abs())
            .fold(0.0, f64::max)
    }
}

/// Root of `f` in `[a, b]` given a sign change, by bisection to machine resolution.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let fa_neg = f(a) <= 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) || (b - a).abs() < 1e-15 {
            break;
        }
        if (f(m) <= 0.0) == fa_neg {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Minimizer of a unimodal `f` on `[a, b]`.
pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..120 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Angular arcs where the periodic function `f` is `<= 0`. Each arc is `(a, b)` with
/// `a < b`, `b` possibly past `2π`. A full circle is returned as `(0, 2π)`.
pub(crate) fn nonpositive_arcs<F: Fn(f64) -> f64>(f: &F, sweep: usize) -> Vec<(f64, f64)> {
    let h = TWO_PI / sweep as f64;
    let vals: Vec<f64> = (0..sweep).map(|k| f(k as f64 * h)).collect();
    let neg = |k: usize| vals[k % sweep] <= 0.0;
    let count = (0..sweep).filter(|&k| neg(k)).count();
    if count == sweep {
        // a short positive excursion may hide near the sampled maximum
        let k = (0..sweep)
            .max_by(|&i, &j| vals[i].total_cmp(&vals[j]))
            .expect("sweep is non-empty");
        let c = k as f64 * h;
        let (t, ft) = golden_min(&|s: f64| -f(s), c - h, c + h);
        if -ft <= 0.0 {
            return vec![(0.0, TWO_PI)];
        }
        let leave = bisect(f, c - h, t);
        let enter = bisect(f, t, c + h);
        let shift = (enter / TWO_PI).floor() * TWO_PI;
        return vec![(enter - shift, leave + TWO_PI - shift)];
    }
    if count == 0 {
        // an arc shorter than the sweep step hides near the sampled minimum
        let k = (0..sweep)
            .min_by(|&i, &j| vals[i].total_cmp(&vals[j]))
            .expect("sweep is non-empty");
        let c = k as f64 * h;
        let (t, ft) = golden_min(f, c - h, c + h);
        if ft > 0.0 {
            return Vec::new();
        }
        return vec![(bisect(f, c - h, t), bisect(f, t, c + h))];
    }
    // start scanning from a positive sample so that arcs never straddle the scan origin
    let k0 = (0..sweep).find(|&k| !neg(k)).expect("some sample is positive");
    let mut arcs = Vec::new();
    let mut start = None;
    for j in 0..sweep {
        let k = k0 + j;
        let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
        match (neg(k), neg(k + 1)) {
            (false, true) => start = Some(bisect(f, a, b)),
            (true, false) => {
                let s = start.take().expect("entering crossing precedes leaving crossing");
                arcs.push((s, bisect(f, a, b)));
            }
            _ => {}
        }
    }
    arcs.iter()
        .map(|&(a, b)| {
            let shift = (a / TWO_PI).floor() * TWO_PI;
            (a - shift, b - shift)
        })
        .collect()
}

/// Radial parametrization of a planar boundary: the point, its angular derivative and the
/// outer unit normal at angle `phi`.
pub(crate) struct Radial2 {
    pub z: [f64; 2],
    pub dz: [f64; 2],
    pub normal: [f64; 2],
}

pub(crate) fn radial2(body: &Body, phi: f64) -> Result<Radial2> {
    let (s, c) = phi.sin_cos();
    let e = [c, s];
    let ep = [-s, c];
    let g = body.gauge(&e);
    let grad = body
        .gauge_gradient(&e)
        .ok_or_else(|| GeomError::NotSmooth("gauge gradient unavailable".into()))?;
    let gd = grad[0] * ep[0] + grad[1] * ep[1];
    let z = [e[0] / g, e[1] / g];
    let dz = [ep[0] / g - e[0] * gd / (g * g), ep[1] / g - e[1] * gd / (g * g)];
    let gn = (grad[0] * grad[0] + grad[1] * grad[1]).sqrt();
    Ok(Radial2 {
        z,
        dz,
        normal: [grad[0] / gn, grad[1] / gn],
    })
}

/// Level function of `x + tau K` at `y`, negative inside.
fn level_translate(p: &TranslateProblem, y: &[f64]) -> f64 {
    let z: Vec<f64> = y.iter().zip(&p.x).map(|(a, b)| (a - b) / p.tau).collect();
    p.body.gauge(&z) - 1.0
}

fn smooth_normal(body: &Body, y: &[f64]) -> Result<Vec<f64>> {
    body.gauge_gradient(y)
        .map(|g| normalized(&g))
        .ok_or_else(|| GeomError::NotSmooth("gauge gradient unavailable".into()))
}

pub(crate) fn require_smooth(body: &Body) -> Result<()> {
    if body.is_smooth() {
        Ok(())
    } else {
        Err(GeomError::NotSmooth(
            "polytopes only have one-sided derivatives; use the chord-order derivatives".into(),
        ))
    }
}

/// Arcs of the angle of `∂(x + tau K)` (radial angle of `K`) that lie inside `K`.
pub(crate) fn translate_arcs(p: &TranslateProblem, sweep: usize) -> Vec<(f64, f64)> {
    let f = |phi: f64| {
        let (s, c) = phi.sin_cos();
        let z = p.body.radial_point(&[c, s]);
        p.body.gauge(&[p.x[0] + p.tau * z[0], p.x[1] + p.tau * z[1]]) - 1.0
    };
    nonpositive_arcs(&f, sweep)
}

/// Arcs of the radial angle of `∂K` that lie inside `x + tau K`.
pub(crate) fn body_arcs(p: &TranslateProblem, sweep: usize) -> Vec<(f64, f64)> {
    let f = |phi: f64| {
        let (s, c) = phi.sin_cos();
        let z = p.body.radial_point(&[c, s]);
        level_translate(p, &z)
    };
    nonpositive_arcs(&f, sweep)
}

fn crossings_2d(p: &TranslateProblem, sweep: usize) -> Result<BoundaryIntersectionCurve> {
    let arcs = translate_arcs(p, sweep);
    let mut points = Vec::new();
    let full = arcs.len() == 1 && arcs[0] == (0.0, TWO_PI);
    if !full {
        for &(a, b) in &arcs {
            for phi in [a, b] {
                let r = radial2(&p.body, phi)?;
                let y = vec![p.x[0] + p.tau * r.z[0], p.x[1] + p.tau * r.z[1]];
                let n = smooth_normal(&p.body, &y)?;
                points.push(CurvePoint {
                    y,
                    n,
                    m: r.normal.to_vec(),
                    weight: 1.0,
                });
            }
        }
    }
    let measure = points.len() as f64;
    Ok(BoundaryIntersectionCurve {
        dim: 2,
        points,
        measure,
    })
}

struct Marcher<'a> {
    p: &'a TranslateProblem,
    tol: f64,
}

impl Marcher<'_> {
    fn grads(&self, y: &[f64]) -> Result<([f64; 2], Vec<f64>, Vec<f64>)> {
        let p = self.p;
        let z: Vec<f64> = y.iter().zip(&p.x).map(|(a, b)| (a - b) / p.tau).collect();
        let g1 = p.body.gauge(y);
        let g2 = p.body.gauge(&z);
        let d1 = p
            .body
            .gauge_gradient(y)
            .ok_or_else(|| GeomError::NotSmooth("gauge gradient unavailable".into()))?;
        let d2: Vec<f64> = p
            .body
            .gauge_gradient(&z)
            .ok_or_else(|| GeomError::NotSmooth("gauge gradient unavailable".into()))?
            .iter()
            .map(|v| v / p.tau)
            .collect();
        Ok(([g1 - 1.0, g2 - 1.0], d1, d2))
    }

    /// Newton projection onto `S` along the span of the two gradients.
    fn correct(&self, mut y: Vec<f64>) -> Option<Vec<f64>> {
        for _ in 0..40 {
            let (c, d1, d2) = self.grads(&y).ok()?;
            if c[0].abs().max(c[1].abs()) <= self.tol {
                return Some(y);
            }
            let gram = vec![vec![dot(&d1, &d1), dot(&d1, &d2)], vec![dot(&d2, &d1), dot(&d2, &d2)]];
            let lam = solve_dense(gram, c.to_vec())?;
            for k in 0..3 {
                y[k] -= lam[0] * d1[k] + lam[1] * d2[k];
            }
            if y.iter().any(|v| !v.is_finite()) {
                return None;
            }
        }
        None
    }

    fn tangent(&self, y: &[f64]) -> Result<Vec<f64>> {
        let (_, d1, d2) = self.grads(y)?;
        Ok(normalized(&cross3(&d1, &d2)))
    }

    /// March once around `S` from `y0`. With `adaptive` the step grows and shrinks with
    /// the turning angle; otherwise it starts at `step` and only shrinks on failure.
    fn march(&self, y0: &[f64], step: f64, adaptive: bool, cap: usize) -> Result<Vec<Vec<f64>>> {
        let max_turn: f64 = 0.05;
        let cos_max = max_turn.cos();
        let cos_grow = (0.25 * max_turn).cos();
        let s_max = step * if adaptive { 16.0 } else { 1.0 };
        let s_min = step * 1e-6;
        let mut s = step;
        let mut pts = vec![y0.to_vec()];
        let mut y = y0.to_vec();
        let mut t = self.tangent(&y)?;
        let mut travelled = 0.0;
        loop {
            if travelled > 3.0 * s && norm(&sub(&y, y0)) < s {
                return Ok(pts);
            }
            if pts.len() > cap {
                return Err(GeomError::Numerical("intersection curve did not close".into()));
            }
            let pred: Vec<f64> = y.iter().zip(&t).map(|(a, b)| a + s * b).collect();
            let next = self.correct(pred);
            let accepted = match next {
                Some(yn) => {
                    let tn = self.tangent(&yn)?;
                    let c = dot(&t, &tn);
                    if c >= cos_max {
                        Some((yn, tn, c))
                    } else {
                        None
                    }
                }
                None => None,
            };
            match accepted {
                Some((yn, tn, c)) => {
                    travelled += norm(&sub(&yn, &y));
                    y = yn;
                    t = tn;
                    pts.push(y.clone());
                    if adaptive && c > cos_grow {
                        s = (s * 1.5).min(s_max);
                    }
                }
                None => {
                    s *= 0.5;
                    if s < s_min {
                        return Err(GeomError::Numerical("curve marching step underflow".into()));
                    }
                }
            }
        }
    }
}

/// A point of `S` from a planar slice through the origin and `x`, or `None` when no slice
/// meets `S`.
fn seed_3d(p: &TranslateProblem, m: &Marcher) -> Option<Vec<f64>> {
    let xn = norm(&p.x);
    let xh: Vec<f64> = if xn > 0.0 {
        p.x.iter().map(|v| v / xn).collect()
    } else {
        vec![1.0, 0.0, 0.0]
    };
    let basis = complement_basis(&xh);
    for k in 0..8 {
        let a = std::f64::consts::PI * k as f64 / 8.0;
        let b: Vec<f64> = (0..3).map(|i| a.cos() * basis[0][i] + a.sin() * basis[1][i]).collect();
        let dir = |phi: f64| -> Vec<f64> { (0..3).map(|i| phi.cos() * xh[i] + phi.sin() * b[i]).collect() };
        let f = |phi: f64| {
            let z = p.body.radial_point(&dir(phi));
            let y: Vec<f64> = (0..3).map(|i| p.x[i] + p.tau * z[i]).collect();
            p.body.gauge(&y) - 1.0
        };
        let arcs = nonpositive_arcs(&f, 1024);
        if arcs.is_empty() || arcs[0] == (0.0, TWO_PI) {
            continue;
        }
        let z = p.body.radial_point(&dir(arcs[0].0));
        let y: Vec<f64> = (0..3).map(|i| p.x[i] + p.tau * z[i]).collect();
        if let Some(y) = m.correct(y) {
            return Some(y);
        }
    }
    None
}

fn curve_3d(p: &TranslateProblem, resolution: usize) -> Result<BoundaryIntersectionCurve> {
    let scale = p.body.bounding_half_widths().iter().fold(f64::INFINITY, |a, b| a.min(*b));
    let m = Marcher {
        p,
        tol: 1e-14,
    };
    let Some(y0) = seed_3d(p, &m) else {
        return Ok(BoundaryIntersectionCurve {
            dim: 3,
            points: Vec::new(),
            measure: 0.0,
        });
    };
    let coarse = m.march(&y0, 0.01 * scale * p.tau.min(1.0), true, 1 << 20)?;
    let length: f64 = closed_lengths(&coarse).iter().sum();
    let step = length / resolution.max(16) as f64;
    let pts = m.march(&y0, step, false, 64 * resolution.max(16) + 4096)?;
    let seg = closed_lengths(&pts);
    let k = pts.len();
    let mut points = Vec::with_capacity(k);
    for (i, y) in pts.into_iter().enumerate() {
        let weight = 0.5 * (seg[(i + k - 1) % k] + seg[i]);
        let n = smooth_normal(&p.body, &y)?;
        let z: Vec<f64> = y.iter().zip(&p.x).map(|(a, b)| (a - b) / p.tau).collect();
        let mm = smooth_normal(&p.body, &z)?;
        points.push(CurvePoint { y, n, m: mm, weight });
    }
    let measure = seg.iter().sum();
    Ok(BoundaryIntersectionCurve {
        dim: 3,
        points,
        measure,
    })
}

/// Segment lengths of a closed polyline, the last one closing back to the start.
fn closed_lengths(pts: &[Vec<f64>]) -> Vec<f64> {
    let k = pts.len();
    (0..k).map(|i| norm(&sub(&pts[(i + 1) % k], &pts[i]))).collect()
}

/// Samples of `S`. `resolution` is the angular sweep in 2D and the target number of
/// curve points in 3D.
pub fn boundary_intersection(p: &TranslateProblem, resolution: usize) -> Result<BoundaryIntersectionCurve> {
    require_smooth(&p.body)?;
    match p.body.dim() {
        2 => crossings_2d(p, resolution.max(16)),
        3 => curve_3d(p, resolution),
        d => Err(GeomError::Unsupported(format!("boundary intersection in dimension {d}"))),
    }
}
