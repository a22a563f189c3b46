//! Probes of whether `F` depends on `||x||_K` alone: shell spreads, the homothety
//! construction for a second gauge, and the curvature-function law.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{Body, DirectionGrid};
use crate::curvature::{volumic_curvature, Schedule};
use crate::error::{check_dim, GeomError, Result};
use crate::linalg::{compensated_sum, normalized};
use crate::volume::{Field, VolumeOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellSpreadReport {
    pub alpha: f64,
    pub tau: f64,
    pub samples: usize,
    pub f_min: f64,
    pub f_max: f64,
    pub spread: f64,
    pub rel_spread: f64,
    pub argmin: Vec<f64>,
    pub argmax: Vec<f64>,
    /// Largest volume error bound among the samples.
    pub max_volume_error: f64,
    /// `alpha >= 1 + tau`: the shell lies outside the support and `F` vanishes there.
    pub degenerate: bool,
}

/// Half of the directions on a regular grid, the rest seeded random.
fn shell_directions(dim: usize, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_grid = n / 2;
    let mut dirs = match dim {
        2 => {
            let m = (n_grid.max(4) + 1) & !1;
            DirectionGrid::circle(m)?.units
        }
        3 => {
            let mut level = 0;
            while 10 * 4usize.pow(level as u32 + 1) + 2 <= n_grid {
                level += 1;
            }
            DirectionGrid::icosphere(level)?.units
        }
        d => return Err(GeomError::Unsupported(format!("shell sampling in dimension {d}"))),
    };
    while dirs.len() < n {
        let u = match dim {
            2 => {
                let t = std::f64::consts::TAU * rng.random::<f64>();
                vec![t.cos(), t.sin()]
            }
            _ => {
                let z = 2.0 * rng.random::<f64>() - 1.0;
                let t = std::f64::consts::TAU * rng.random::<f64>();
                let s = (1.0 - z * z).max(0.0).sqrt();
                vec![s * t.cos(), s * t.sin(), z]
            }
        };
        dirs.push(u);
    }
    Ok(dirs)
}

/// Extremes of `F` over `n_samples` points with `||x||_K = alpha`.
pub fn shell_spread(
    body: &Body,
    tau: f64,
    alpha: f64,
    n_samples: usize,
    seed: u64,
    opts: &VolumeOptions,
) -> Result<ShellSpreadReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(GeomError::Precondition(format!("alpha must be positive, got {alpha}")));
    }
    if n_samples < 2 {
        return Err(GeomError::Precondition("at least two shell samples are needed".into()));
    }
    let field = Field::new(body, tau, opts)?;
    let dirs = shell_directions(body.dim(), n_samples, seed)?;
    let degenerate = alpha >= 1.0 + tau;
    let values: Vec<Result<(f64, f64)>> = dirs
        .par_iter()
        .map(|u| {
            let x: Vec<f64> = body.radial_point(u).iter().map(|v| v * alpha).collect();
            let e = field.at(&x)?;
            Ok((e.value, e.abs_error))
        })
        .collect();
    let values: Vec<(f64, f64)> = values.into_iter().collect::<Result<_>>()?;
    let (mut imin, mut imax) = (0, 0);
    for (i, v) in values.iter().enumerate() {
        if v.0 < values[imin].0 {
            imin = i;
        }
        if v.0 > values[imax].0 {
            imax = i;
        }
    }
    let (f_min, f_max) = (values[imin].0, values[imax].0);
    let spread = f_max - f_min;
    let point = |i: usize| -> Vec<f64> { body.radial_point(&dirs[i]).iter().map(|v| v * alpha).collect() };
    Ok(ShellSpreadReport {
        alpha,
        tau,
        samples: dirs.len(),
        f_min,
        f_max,
        spread,
        rel_spread: if f_max > 0.0 { spread / f_max } else { 0.0 },
        argmin: point(imin),
        argmax: point(imax),
        max_volume_error: values.iter().map(|v| v.1).fold(0.0, f64::max),
        degenerate,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomothetyNecessity {
    /// `||.||_L / ||.||_K` is constant over the grid.
    pub consistent: bool,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// A point on the shell `||x||_K = 1 + tau` where `F` vanishes although a point with the
    /// same `L`-gauge (`partner`) has `F > 0`.
    pub witness: Option<Vec<f64>>,
    pub partner: Option<Vec<f64>>,
    pub f_witness: Option<f64>,
    pub f_partner: Option<f64>,
}

/// Search for two points with equal `L`-gauge on which `F` differs, as happens whenever
/// `L` is not a homothet of `K`.
pub fn homothety_necessity(
    k: &Body,
    l: &Body,
    tau: f64,
    grid: &DirectionGrid,
    opts: &VolumeOptions,
) -> Result<HomothetyNecessity> {
    check_dim(k.dim(), l.dim())?;
    check_dim(k.dim(), grid.dim)?;
    let ratios: Vec<f64> = grid.units.iter().map(|u| l.gauge(u) / k.gauge(u)).collect();
    let (mut imin, mut imax) = (0, 0);
    for (i, r) in ratios.iter().enumerate() {
        if *r < ratios[imin] {
            imin = i;
        }
        if *r > ratios[imax] {
            imax = i;
        }
    }
    let (rmin, rmax) = (ratios[imin], ratios[imax]);
    let mut out = HomothetyNecessity {
        consistent: rmax / rmin - 1.0 <= 1e-8,
        ratio_min: rmin,
        ratio_max: rmax,
        witness: None,
        partner: None,
        f_witness: None,
        f_partner: None,
    };
    if out.consistent {
        return Ok(out);
    }
    // unit L-gauge points: x has the larger K-gauge
    let on_l = |i: usize| -> Vec<f64> {
        let u = &grid.units[i];
        let g = l.gauge(u);
        u.iter().map(|v| v / g).collect()
    };
    let (x, y) = (on_l(imin), on_l(imax));
    let s = (1.0 + tau) / k.gauge(&x);
    let xs: Vec<f64> = x.iter().map(|v| v * s).collect();
    let ys: Vec<f64> = y.iter().map(|v| v * s).collect();
    let field = Field::new(k, tau, opts)?;
    let fx = field.at(&xs)?.value;
    let fy = field.at(&ys)?.value;
    if fx < fy {
        out.witness = Some(xs);
        out.partner = Some(ys);
        out.f_witness = Some(fx);
        out.f_partner = Some(fy);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureSource {
    /// Analytic curvature where available, volumic estimates otherwise.
    Oracle,
    /// Volumic estimates everywhere.
    Volumic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureLawReport {
    pub source: CurvatureSource,
    pub directions: Vec<Vec<f64>>,
    /// `h_K(u)^{n+1} / kappa(u)` per direction; `None` where the curvature vanishes.
    pub values: Vec<Option<f64>>,
    pub mean: Option<f64>,
    pub max_rel_dev: Option<f64>,
    /// Some direction has zero curvature, so no constant can satisfy the law.
    pub violated: bool,
    pub zero_curvature_directions: Vec<usize>,
}

/// The curvature function `1/kappa` at the point with outer normal `u`, times
/// `h_K(u)^{n+1}`, over the grid.
pub fn curvature_law(
    body: &Body,
    tau: f64,
    grid: &DirectionGrid,
    schedule: &Schedule,
    source: CurvatureSource,
    opts: &VolumeOptions,
) -> Result<CurvatureLawReport> {
    check_dim(body.dim(), grid.dim)?;
    if !body.is_smooth() {
        return Err(GeomError::NotSmooth("the curvature law needs a smooth body".into()));
    }
    let n = body.dim() as i32;
    let kappas: Vec<Result<Option<f64>>> = grid
        .units
        .par_iter()
        .map(|u| {
            let x = body.boundary_point(u);
            let analytic = match source {
                CurvatureSource::Oracle => body.analytic_curvature(&x),
                CurvatureSource::Volumic => None,
            };
            match analytic {
                Some(k) => Ok((k > 0.0 && k.is_finite()).then_some(k)),
                None => {
                    let r = volumic_curvature(body, &x, tau, schedule, opts)?;
                    Ok(r.kappa.filter(|k| *k > 0.0))
                }
            }
        })
        .collect();
    let kappas: Vec<Option<f64>> = kappas.into_iter().collect::<Result<_>>()?;
    let values: Vec<Option<f64>> = grid
        .units
        .iter()
        .zip(&kappas)
        .map(|(u, k)| k.map(|k| body.support(&normalized(u)).powi(n + 1) / k))
        .collect();
    let zero: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_none()).collect();
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let (mean, dev) = if present.is_empty() {
        (None, None)
    } else {
        let m = compensated_sum(present.iter().copied()) / present.len() as f64;
        let d = present.iter().map(|v| (v - m).abs() / m).fold(0.0, f64::max);
        (Some(m), Some(d))
    };
    Ok(CurvatureLawReport {
        source,
        directions: grid.units.clone(),
        values,
        mean,
        max_rel_dev: dev,
        violated: !zero.is_empty(),
        zero_curvature_directions: zero,
    })
}
