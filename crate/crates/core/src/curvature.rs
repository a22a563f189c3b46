//! Gauss-Kronecker curvature of `∂K` from the volumes of small translate intersections
//! and of small hyperplane caps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{ball_volume, Body};
use crate::error::{GeomError, Result};
use crate::linalg::dot;
use crate::volume::{
    cap_frame, cap_volume, intersection_volume, lens_frame, mc, width_of_intersection, Frame, Method,
    MethodUsed, TranslateProblem, VolumeEstimate, VolumeOptions,
};

/// `c_n = 2 (ω_{n-1} / (n + 1))^{2/(n+1)}`.
pub fn cn_constant(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(GeomError::Precondition(format!("c_n needs n >= 2, got {n}")));
    }
    let e = 2.0 / (n as f64 + 1.0);
    Ok(2.0 * (ball_volume(n - 1) / (n as f64 + 1.0)).powf(e))
}

/// Step sizes `h_k = h0 2^{-k}` for `k = 0..=levels`. `h0` defaults to `0.2 <x, N(x)>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub h0: Option<f64>,
    pub levels: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Self { h0: None, levels: 6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Translate intersections `K ∩ (x_h + tau K)`.
    Volumic,
    /// Caps of `K` cut orthogonally to `N(x)`.
    Cap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub estimator: Estimator,
    pub x: Vec<f64>,
    pub normal: Vec<f64>,
    /// Zero for cap estimates.
    pub tau: f64,
    pub h_sequence: Vec<f64>,
    pub volumes: Vec<f64>,
    pub volume_errors: Vec<f64>,
    pub raw_estimates: Vec<f64>,
    /// Extrapolated curvature; `None` in the divergent regime.
    pub kappa: Option<f64>,
    /// Raw estimates fall towards zero: the point has zero curvature.
    pub divergent: bool,
    /// Exponent `p` in `kappa(h) = kappa + a h^p`, when the differences allow a fit.
    pub fit_exponent: Option<f64>,
    pub fit_residual: f64,
    /// Least-squares slope of `log V` against `log h` over the last four steps.
    pub volume_exponent: f64,
    pub method: MethodUsed,
}

/// The translate `x_h = λ x` for which `K ∩ (x_h + tau K)` has width `h` along `N(x)`.
pub fn locate_xh(body: &Body, x: &[f64], tau: f64, h: f64) -> Result<Vec<f64>> {
    let n = check_boundary_point(body, x)?;
    locate_with_normal(body, x, &n, tau, h)
}

fn check_boundary_point(body: &Body, x: &[f64]) -> Result<Vec<f64>> {
    if body.dim() != x.len() {
        return Err(GeomError::DimensionMismatch { expected: body.dim(), got: x.len() });
    }
    let g = body.gauge(x);
    if (g - 1.0).abs() > 1e-9 {
        return Err(GeomError::Precondition(format!("x must lie on the boundary (gauge {g})")));
    }
    Ok(body.outer_normal(x).vector)
}

fn locate_with_normal(body: &Body, x: &[f64], n: &[f64], tau: f64, h: f64) -> Result<Vec<f64>> {
    let xn = dot(x, n);
    let cap = (1.0 + tau - (1.0 - tau).abs()) * xn;
    if !(h > 0.0 && h < cap) {
        return Err(GeomError::Precondition(format!("h must lie in (0, {cap}), got {h}")));
    }
    let width_at = |lam: f64| -> Result<f64> {
        let p = TranslateProblem::new(body.clone(), tau, x.iter().map(|v| v * lam).collect())?;
        width_of_intersection(&p, n)
    };
    let lam = 1.0 + tau - h / xn;
    if lam >= (1.0 - tau).max(tau - 1.0) && lam <= 1.0 + tau {
        let w = width_at(lam)?;
        if (w - h).abs() <= 1e-9 * xn.max(1.0) {
            return Ok(x.iter().map(|v| v * lam).collect());
        }
    }
    // width decreases as the translate moves out along x
    let (mut lo, mut hi) = ((1.0 - tau).abs(), 1.0 + tau);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-15 {
            break;
        }
        if width_at(mid)? > h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lam = 0.5 * (lo + hi);
    Ok(x.iter().map(|v| v * lam).collect())
}

/// Monte Carlo volume in a frame, with the sample count chosen after a pilot run so that
/// the 95% half-width is at most `rel` of the value.
fn relative_mc<F>(frame: &Frame, rel: f64, opts: &VolumeOptions, inside: &F) -> Result<VolumeEstimate>
where
    F: Fn(&[f64]) -> bool + Sync,
{
    let world = |z: &[f64]| inside(&frame.to_world(z));
    let box_vol: f64 = frame.lo.iter().zip(&frame.hi).map(|(a, b)| b - a).product();
    let pilot = 4 * mc::BATCH;
    let mut hits = mc::count_hits(&frame.lo, &frame.hi, pilot, opts.seed, 0, &world);
    let mut n = pilot;
    if hits > 0 {
        let q = hits as f64 / n as f64;
        let need = ((1.96 / rel).powi(2) * (1.0 - q) / q).ceil() as u64;
        let need = need.div_ceil(mc::BATCH) * mc::BATCH;
        if need > opts.max_mc_samples {
            return Err(GeomError::HTooSmall(format!(
                "{need} samples needed for relative error {rel}"
            )));
        }
        if need > n {
            hits += mc::count_hits(&frame.lo, &frame.hi, need - n, opts.seed, n / mc::BATCH, &world);
            n = need;
        }
    }
    let (value, abs_error) = mc::wald(hits, n, box_vol);
    Ok(VolumeEstimate {
        value,
        abs_error,
        method: MethodUsed::Mc,
        samples: n,
    })
}

/// Relative volume accuracy demanded at every schedule step.
const REL_VOLUME: f64 = 5e-3;

/// Run a planar or polytope volume twice: a coarse pilot, then to a tolerance relative to it.
fn relative_exact(run: impl Fn(&VolumeOptions) -> Result<VolumeEstimate>, body: &Body, opts: &VolumeOptions) -> Result<VolumeEstimate> {
    let scale: f64 = body.bounding_half_widths().iter().product();
    let pilot = run(&VolumeOptions { tol: 1e-6 * scale, ..opts.clone() })?;
    if pilot.abs_error <= 1e-8 * pilot.value {
        return Ok(pilot);
    }
    run(&VolumeOptions {
        tol: (1e-8 * pilot.value).max(1e-15 * scale),
        ..opts.clone()
    })
}

fn use_mc(body: &Body, opts: &VolumeOptions) -> bool {
    opts.method == Method::Mc || (body.dim() > 2 && !body.is_polytope())
}

fn lens_volume(body: &Body, xh: &[f64], n: &[f64], tau: f64, opts: &VolumeOptions) -> Result<VolumeEstimate> {
    let p = TranslateProblem::new(body.clone(), tau, xh.to_vec())?;
    if use_mc(body, opts) {
        let frame = lens_frame(&p, n)?;
        return relative_mc(&frame, REL_VOLUME, opts, &|y: &[f64]| p.lens_contains(y));
    }
    relative_exact(|o| intersection_volume(&p, o), body, opts)
}

fn cap_vol(body: &Body, n: &[f64], h: f64, opts: &VolumeOptions) -> Result<VolumeEstimate> {
    if use_mc(body, opts) {
        let level = body.support(n) - h;
        let frame = cap_frame(body, n, level);
        return relative_mc(&frame, REL_VOLUME, opts, &|y: &[f64]| {
            dot(y, n) >= level && body.gauge(y) <= 1.0
        });
    }
    relative_exact(|o| cap_volume(body, n, h, o), body, opts)
}

fn schedule_steps(x: &[f64], n: &[f64], s: &Schedule) -> Result<Vec<f64>> {
    let h0 = s.h0.unwrap_or(0.2 * dot(x, n));
    if !(h0 > 0.0 && h0.is_finite()) {
        return Err(GeomError::Precondition(format!("h0 must be positive, got {h0}")));
    }
    if s.levels < 3 {
        return Err(GeomError::Precondition("the schedule needs at least 4 steps".into()));
    }
    Ok((0..=s.levels).map(|k| h0 * 0.5f64.powi(k as i32)).collect())
}

/// Curvature at `x` from `c_n^{n+1} h^{n+1} / (((1+tau)/tau)^{n-1} |K ∩ (x_h + tau K)|^2)`.
pub fn volumic_curvature(
    body: &Body,
    x: &[f64],
    tau: f64,
    schedule: &Schedule,
    opts: &VolumeOptions,
) -> Result<CurvatureReport> {
    require_smooth(body)?;
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(GeomError::Precondition(format!("tau must be positive, got {tau}")));
    }
    let n = check_boundary_point(body, x)?;
    let hs = schedule_steps(x, &n, schedule)?;
    let dim = body.dim() as i32;
    let c = cn_constant(body.dim())?.powi(dim + 1);
    let factor = ((1.0 + tau) / tau).powi(dim - 1);
    let vols: Vec<Result<VolumeEstimate>> = hs
        .par_iter()
        .map(|&h| {
            let xh = locate_with_normal(body, x, &n, tau, h)?;
            lens_volume(body, &xh, &n, tau, opts)
        })
        .collect();
    let vols = collect_volumes(vols)?;
    let raw = hs
        .iter()
        .zip(&vols)
        .map(|(h, v)| c * h.powi(dim + 1) / (factor * v.value * v.value))
        .collect();
    Ok(assemble(Estimator::Volumic, x, n, tau, hs, vols, raw))
}

/// Curvature at `x` from `c_n^{n+1} h^{n+1} / |K ∩ H_h^+|^2` with caps of depth `h`.
pub fn cap_curvature(body: &Body, x: &[f64], schedule: &Schedule, opts: &VolumeOptions) -> Result<CurvatureReport> {
    require_smooth(body)?;
    let n = check_boundary_point(body, x)?;
    let hs = schedule_steps(x, &n, schedule)?;
    let dim = body.dim() as i32;
    let c = cn_constant(body.dim())?.powi(dim + 1);
    let vols: Vec<Result<VolumeEstimate>> = hs.par_iter().map(|&h| cap_vol(body, &n, h, opts)).collect();
    let vols = collect_volumes(vols)?;
    let raw = hs
        .iter()
        .zip(&vols)
        .map(|(h, v)| c * h.powi(dim + 1) / (v.value * v.value))
        .collect();
    Ok(assemble(Estimator::Cap, x, n, 0.0, hs, vols, raw))
}

fn require_smooth(body: &Body) -> Result<()> {
    if body.is_smooth() {
        Ok(())
    } else {
        Err(GeomError::NotSmooth("curvature needs a well-defined normal".into()))
    }
}

fn collect_volumes(vols: Vec<Result<VolumeEstimate>>) -> Result<Vec<VolumeEstimate>> {
    let vols: Vec<VolumeEstimate> = vols.into_iter().collect::<Result<_>>()?;
    for v in &vols {
        if !(v.value > 0.0) || v.abs_error > 0.01 * v.value {
            return Err(GeomError::HTooSmall(format!(
                "volume {:.3e} ± {:.3e} is below the noise floor",
                v.value, v.abs_error
            )));
        }
    }
    Ok(vols)
}

/// Fit `kappa(h) = kappa_inf + a h^p` on the last four estimates of a halving schedule.
/// Returns `(kappa_inf, p, residual)`; `p` is `None` when the differences carry no trend.
fn extrapolate(hs: &[f64], raw: &[f64]) -> (f64, Option<f64>, f64) {
    let k = raw.len();
    let last = raw[k - 1];
    let d: Vec<f64> = (k - 4..k - 1).map(|i| raw[i] - raw[i + 1]).collect();
    let same_sign = d.iter().all(|v| *v > 0.0) || d.iter().all(|v| *v < 0.0);
    let noise = 1e-9 * last.abs().max(1e-300);
    if !same_sign || d.iter().any(|v| v.abs() <= noise) {
        let spread = raw[k - 4..].iter().map(|v| (v - last).abs()).fold(0.0, f64::max);
        return (last, None, spread);
    }
    // log |d_i| = log(|a| (1 - 2^-p)) + p log h_i
    let xs: Vec<f64> = (k - 4..k - 1).map(|i| hs[i].ln()).collect();
    let ys: Vec<f64> = d.iter().map(|v| v.abs().ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    let residual_log = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    let p = slope;
    if !(p > 0.05) {
        let spread = raw[k - 4..].iter().map(|v| (v - last).abs()).fold(0.0, f64::max);
        return (last, None, spread);
    }
    // the tail past the last step is d_last / (2^p - 1)
    let tail = d[2] / (2f64.powf(p) - 1.0);
    let kappa = last - tail;
    let residual = (tail.abs() * residual_log).max(1e-15 * last.abs());
    (kappa, Some(p), residual)
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn assemble(
    estimator: Estimator,
    x: &[f64],
    normal: Vec<f64>,
    tau: f64,
    hs: Vec<f64>,
    vols: Vec<VolumeEstimate>,
    raw: Vec<f64>,
) -> CurvatureReport {
    let (kappa, p, residual) = extrapolate(&hs, &raw);
    let k = raw.len();
    // zero curvature: the ratio keeps falling, roughly like a positive power of h
    let drop = raw[0] / raw[k - 1];
    let divergent = drop > 4.0 && kappa < 0.25 * raw[k - 1];
    let xs: Vec<f64> = hs[k - 4..].iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = vols[k - 4..].iter().map(|v| v.value.ln()).collect();
    let (volume_exponent, _) = least_squares(&xs, &ys);
    CurvatureReport {
        estimator,
        x: x.to_vec(),
        normal,
        tau,
        method: vols[0].method,
        volumes: vols.iter().map(|v| v.value).collect(),
        volume_errors: vols.iter().map(|v| v.abs_error).collect(),
        h_sequence: hs,
        raw_estimates: raw,
        kappa: if divergent { None } else { Some(kappa.max(0.0)) },
        divergent,
        fit_exponent: p,
        fit_residual: residual,
        volume_exponent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert!((cn_constant(2).unwrap() - 2.0 * (2.0f64 / 3.0).powf(2.0 / 3.0)).abs() < 1e-15);
        assert!((cn_constant(3).unwrap() - 2.0 * (std::f64::consts::PI / 4.0).sqrt()).abs() < 1e-15);
        assert!(cn_constant(1).is_err());
    }

    #[test]
    fn xh_examples() {
        let disk = Body::ball(2, 1.0).unwrap();
        let xh = locate_xh(&disk, &[1.0, 0.0], 1.0, 0.5).unwrap();
        assert!((xh[0] - 1.5).abs() < 1e-12 && xh[1] == 0.0);
        let e = Body::ellipsoid_semiaxes(&[2.0, 1.0]).unwrap();
        let xh = locate_xh(&e, &[2.0, 0.0], 0.5, 0.1).unwrap();
        assert!((xh[0] / 2.0 - 1.45).abs() < 1e-12);
        assert!(locate_xh(&disk, &[0.5, 0.0], 1.0, 0.1).is_err());
    }

    #[test]
    fn disk_curvature() {
        let disk = Body::ball(2, 1.0).unwrap();
        let r = volumic_curvature(&disk, &[1.0, 0.0], 1.0, &Schedule::default(), &VolumeOptions::default()).unwrap();
        let k = r.kappa.unwrap();
        assert!((k - 1.0).abs() < 1e-3, "{r:?}");
        assert!((r.volume_exponent - 1.5).abs() < 0.02);
        let c = cap_curvature(&disk, &[1.0, 0.0], &Schedule::default(), &VolumeOptions::default()).unwrap();
        assert!((c.kappa.unwrap() - 1.0).abs() < 1e-3, "{c:?}");
    }

    #[test]
    fn quartic_ball_axis_is_divergent() {
        let b = Body::pball(4.0, vec![1.0, 1.0]).unwrap();
        let r = volumic_curvature(&b, &[1.0, 0.0], 1.0, &Schedule::default(), &VolumeOptions::default()).unwrap();
        assert!(r.divergent, "{r:?}");
        assert!(r.kappa.is_none());
    }

    #[test]
    fn sphere_by_monte_carlo() {
        let s = Body::ball(3, 1.0).unwrap();
        let sched = Schedule { h0: Some(0.2), levels: 3 };
        let c = cap_curvature(&s, &[0.0, 0.0, 1.0], &sched, &VolumeOptions::default()).unwrap();
        assert_eq!(c.method, MethodUsed::Mc);
        // relative CI of 0.5% per volume gives about 1% per ratio
        let last = *c.raw_estimates.last().unwrap();
        assert!((last - 1.0).abs() < 0.05, "{c:?}");
    }
}
