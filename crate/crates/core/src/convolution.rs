//! Convolution bodies `K(δ, τ) = {x : |K ∩ (x + τK)| >= δ}` as radial profiles, and
//! numerical probes of their shape.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{Body, DirectionGrid};
use crate::error::{check_dim, GeomError, Result};
use crate::linalg::{cross2, norm};
use crate::volume::{Field, VolumeOptions};

/// A star-shaped body given by its radius along each grid direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub grid: DirectionGrid,
    pub radii: Vec<f64>,
    /// Zero for the radial function of a body itself.
    pub delta: f64,
    pub tau: f64,
    /// Largest half-width of the final radius brackets.
    pub achieved_tol: f64,
}

impl RadialProfile {
    /// Boundary points `r(u) u`.
    pub fn points(&self) -> Vec<Vec<f64>> {
        self.grid
            .units
            .iter()
            .zip(&self.radii)
            .map(|(u, r)| u.iter().map(|v| v * r).collect())
            .collect()
    }

    /// Largest `|r(u) - r(-u)|`.
    pub fn evenness_defect(&self) -> f64 {
        (0..self.radii.len())
            .map(|i| (self.radii[i] - self.radii[self.grid.antipode(i)]).abs())
            .fold(0.0, f64::max)
    }
}

/// The radial function of `body` on `grid`.
pub fn body_profile(body: &Body, grid: &DirectionGrid) -> Result<RadialProfile> {
    check_dim(body.dim(), grid.dim)?;
    Ok(RadialProfile {
        grid: grid.clone(),
        radii: grid.units.iter().map(|u| 1.0 / body.gauge(u)).collect(),
        delta: 0.0,
        tau: 0.0,
        achieved_tol: 0.0,
    })
}

/// `K(δ, τ)` on `grid`, each radius bisected to `tol` on `[0, (1 + τ) / gauge(u)]`.
/// Planar bodies use the prepared polygon sandwich, 3D polytopes exact volumes, other
/// bodies Monte Carlo with the sample count and seed of `opts` (fixed per direction).
pub fn convolution_body(
    body: &Body,
    delta: f64,
    tau: f64,
    grid: &DirectionGrid,
    tol: f64,
    opts: &VolumeOptions,
) -> Result<RadialProfile> {
    check_dim(body.dim(), grid.dim)?;
    if !(tol > 0.0) {
        return Err(GeomError::Precondition(format!("radius tolerance must be positive, got {tol}")));
    }
    let mut opts = opts.clone();
    if body.dim() == 3 && !body.is_polytope() && opts.mc_samples.is_none() {
        opts.mc_samples = Some(4 * crate::volume::mc::BATCH);
    }
    let field = Field::new(body, tau, &opts)?;
    let upper = field.max_value()?;
    if !(delta > 0.0 && delta < upper) {
        return Err(GeomError::DeltaOutOfRange { delta, upper });
    }
    // radii are even, so each antipodal pair is bisected once
    let reps: Vec<usize> = (0..grid.len()).filter(|&i| i <= grid.antipode(i)).collect();
    let solved: Vec<Result<(f64, f64)>> = reps
        .par_iter()
        .map(|&i| radius_along(&field, &grid.units[i], delta, tol))
        .collect();
    let mut radii = vec![0.0; grid.len()];
    let mut achieved: f64 = 0.0;
    for (&i, r) in reps.iter().zip(solved) {
        let (r, half) = r?;
        radii[i] = r;
        radii[grid.antipode(i)] = r;
        achieved = achieved.max(half);
    }
    Ok(RadialProfile {
        grid: grid.clone(),
        radii,
        delta,
        tau,
        achieved_tol: achieved,
    })
}

/// Largest `t` with `F(t u) >= δ`, using that `F` does not increase along rays.
fn radius_along(field: &Field, u: &[f64], delta: f64, tol: f64) -> Result<(f64, f64)> {
    let mut lo = 0.0;
    let mut hi = (1.0 + field.tau) / field.body.gauge(u);
    for _ in 0..60 {
        if hi - lo <= 2.0 * tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let x: Vec<f64> = u.iter().map(|v| v * mid).collect();
        if field.quick(&x)?.value >= delta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), 0.5 * (hi - lo)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    StrictlyConvex,
    FlatSegmentFound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatnessReport {
    /// Signed turning angle at each boundary sample.
    pub turning_angles: Vec<f64>,
    /// Longest run of consecutive samples on a common line (0 when there is none).
    pub max_collinear_run: usize,
    pub verdict: Verdict,
    /// Largest normal-direction jump between adjacent boundary edges.
    pub max_normal_jump: f64,
    /// A jump far above the grid spacing, as at a corner.
    pub corner_like: bool,
    /// All turning angles nonnegative up to the collinearity tolerance.
    pub convex: bool,
}

const COLLINEAR: f64 = 1e-9;

/// Turning angles, collinear runs and normal jumps of a planar profile.
pub fn flatness_probe(profile: &RadialProfile) -> Result<FlatnessReport> {
    if profile.grid.dim != 2 {
        return Err(GeomError::Unsupported("flatness probe needs a planar profile".into()));
    }
    let m = profile.radii.len();
    if m < 512 {
        return Err(GeomError::Precondition(format!("flatness probe needs >= 512 directions, got {m}")));
    }
    let pts = profile.points();
    let edge = |k: usize| {
        let a = &pts[k % m];
        let b = &pts[(k + 1) % m];
        [b[0] - a[0], b[1] - a[1]]
    };
    let mut turning = Vec::with_capacity(m);
    let mut collinear = Vec::with_capacity(m);
    for k in 0..m {
        let e1 = edge(k + m - 1);
        let e2 = edge(k);
        let s = cross2(e1, e2);
        let c = e1[0] * e2[0] + e1[1] * e2[1];
        turning.push(s.atan2(c));
        collinear.push(s.abs() / (norm(&e1) * norm(&e2)) <= COLLINEAR);
    }
    // a collinear flag at k means samples k-1, k, k+1 share a line
    let mut best = 0;
    if collinear.iter().all(|&c| c) {
        best = m;
    } else {
        let start = collinear.iter().position(|&c| !c).expect("some sample turns");
        let mut run = 0;
        for j in 1..=m {
            if collinear[(start + j) % m] {
                run += 1;
                best = best.max(run + 2);
            } else {
                run = 0;
            }
        }
    }
    let max_jump = turning.iter().map(|t| t.abs()).fold(0.0, f64::max);
    let spacing = std::f64::consts::TAU / m as f64;
    Ok(FlatnessReport {
        max_collinear_run: best,
        verdict: if best >= 3 { Verdict::FlatSegmentFound } else { Verdict::StrictlyConvex },
        max_normal_jump: max_jump,
        corner_like: max_jump > 20.0 * spacing,
        convex: turning.iter().all(|&t| t >= -COLLINEAR),
        turning_angles: turning,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomothetyCheck {
    pub is_homothet: bool,
    pub scale: f64,
    pub max_rel_dev: f64,
}

/// Compare a profile with the scaled radial function of `body`.
pub fn homothety_check(profile: &RadialProfile, body: &Body, tol: f64) -> Result<HomothetyCheck> {
    check_dim(body.dim(), profile.grid.dim)?;
    let prods: Vec<f64> = profile
        .grid
        .units
        .iter()
        .zip(&profile.radii)
        .map(|(u, r)| r * body.gauge(u))
        .collect();
    let scale = crate::linalg::compensated_sum(prods.iter().copied()) / prods.len() as f64;
    let max_rel_dev = prods.iter().map(|p| (p - scale).abs() / scale).fold(0.0, f64::max);
    Ok(HomothetyCheck {
        is_homothet: max_rel_dev <= tol,
        scale,
        max_rel_dev,
    })
}

/// Smallest signed three-point (circumradius) curvature along a planar profile.
pub fn curvature_positivity_probe(profile: &RadialProfile) -> Result<f64> {
    if profile.grid.dim != 2 {
        return Err(GeomError::Unsupported("curvature probe needs a planar profile".into()));
    }
    let m = profile.radii.len();
    if m < 2048 {
        return Err(GeomError::Precondition(format!("curvature probe needs >= 2048 directions, got {m}")));
    }
    let pts = profile.points();
    Ok((0..m)
        .map(|k| {
            let a = &pts[(k + m - 1) % m];
            let b = &pts[k];
            let c = &pts[(k + 1) % m];
            let ab = [b[0] - a[0], b[1] - a[1]];
            let bc = [c[0] - b[0], c[1] - b[1]];
            let ca = [a[0] - c[0], a[1] - c[1]];
            2.0 * cross2(ab, bc) / (norm(&ab) * norm(&bc) * norm(&ca))
        })
        .fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lens(d: f64) -> f64 {
        2.0 * (d / 2.0).acos() - 0.5 * d * (4.0 - d * d).sqrt()
    }

    #[test]
    fn disk_profile_is_a_circle() {
        let disk = Body::ball(2, 1.0).unwrap();
        let delta = lens(1.0);
        let grid = DirectionGrid::circle(64).unwrap();
        let p = convolution_body(&disk, delta, 1.0, &grid, 1e-10, &VolumeOptions::default()).unwrap();
        for r in &p.radii {
            assert!((r - 1.0).abs() < 1e-8, "{r}");
        }
        assert_eq!(p.evenness_defect(), 0.0);
    }

    #[test]
    fn square_profile_matches_product_formula() {
        let sq = Body::square(1.0).unwrap();
        let grid = DirectionGrid::circle(8).unwrap();
        let p = convolution_body(&sq, 2.0, 1.0, &grid, 1e-10, &VolumeOptions::default()).unwrap();
        assert!((p.radii[0] - 1.0).abs() < 1e-9);
        assert!((p.radii[1] - 2f64.sqrt() * (2.0 - 2f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn delta_range_is_checked() {
        let sq = Body::square(1.0).unwrap();
        let grid = DirectionGrid::circle(8).unwrap();
        let opts = VolumeOptions::default();
        assert!(matches!(
            convolution_body(&sq, 4.0, 1.0, &grid, 1e-6, &opts),
            Err(GeomError::DeltaOutOfRange { .. })
        ));
        // with tau = 0.5 the cap is tau^2 |K| = 1
        assert!(convolution_body(&sq, 1.2, 0.5, &grid, 1e-6, &opts).is_err());
        assert!(convolution_body(&sq, 0.0, 1.0, &grid, 1e-6, &opts).is_err());
    }

    #[test]
    fn flatness_separates_square_from_its_convolution_body() {
        let sq = Body::square(1.0).unwrap();
        let grid = DirectionGrid::circle(512).unwrap();
        let own = flatness_probe(&body_profile(&sq, &grid).unwrap()).unwrap();
        assert_eq!(own.verdict, Verdict::FlatSegmentFound);
        assert!(own.corner_like);
        let p = convolution_body(&sq, 2.0, 1.0, &grid, 1e-12, &VolumeOptions::default()).unwrap();
        let rep = flatness_probe(&p).unwrap();
        assert_eq!(rep.verdict, Verdict::StrictlyConvex, "{}", rep.max_collinear_run);
        assert!(rep.convex);
    }

    #[test]
    fn homothety_and_curvature_probes() {
        let disk = Body::ball(2, 1.0).unwrap();
        let grid = DirectionGrid::circle(2048).unwrap();
        let p = convolution_body(&disk, lens(0.8), 1.0, &grid, 1e-12, &VolumeOptions::default()).unwrap();
        let h = homothety_check(&p, &disk, 1e-6).unwrap();
        assert!(h.is_homothet);
        assert!((h.scale - 0.8).abs() < 1e-8);
        let k = curvature_positivity_probe(&p).unwrap();
        assert!((k - 1.0 / 0.8).abs() < 1e-4, "{k}");
    }
}
