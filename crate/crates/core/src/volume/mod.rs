//! Translate-intersection volumes `F(x) = |K ∩ (x + tau K)|`.
//!
//! Planar bodies go through certified polygon sandwiches, 3D polytopes through vertex
//! enumeration, and everything else through seeded Monte Carlo.

pub mod mc;
mod planar2d;
mod width;

use serde::{Deserialize, Serialize};

use crate::bodies::Body;
use crate::error::{check_dim, GeomError, Result};
use crate::linalg::{dot, Coords};
use crate::polytope::HPolytope;

pub use planar2d::PreparedPlanar;
pub use width::{cap_frame, lens_frame, lens_support, width_of_intersection, Frame};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodUsed {
    #[serde(rename = "exact_poly_2d")]
    ExactPoly2d,
    #[serde(rename = "exact_poly_3d")]
    ExactPoly3d,
    Mc,
    /// Closed form (ellipsoid body volumes).
    Analytic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub method: MethodUsed,
    pub samples: u64,
}

impl VolumeEstimate {
    pub fn lo(&self) -> f64 {
        (self.value - self.abs_error).max(0.0)
    }

    pub fn hi(&self) -> f64 {
        self.value + self.abs_error
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Auto,
    Exact,
    Mc,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(Method::Auto),
            "exact" => Ok(Method::Exact),
            "mc" => Ok(Method::Mc),
            other => Err(format!("unknown method {other:?} (auto, exact, mc)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeOptions {
    pub method: Method,
    /// Target absolute error.
    pub tol: f64,
    pub seed: u64,
    /// Initial boundary sample count for planar smooth bodies.
    pub polygon_m: usize,
    pub max_polygon_m: usize,
    /// Fixed Monte Carlo sample count; when `None`, samples are added until `tol` is met.
    pub mc_samples: Option<u64>,
    pub max_mc_samples: u64,
}

impl Default for VolumeOptions {
    fn default() -> Self {
        Self {
            method: Method::Auto,
            tol: 1e-5,
            seed: 0,
            polygon_m: 4096,
            max_polygon_m: 1 << 17,
            mc_samples: None,
            max_mc_samples: 1 << 26,
        }
    }
}

impl VolumeOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(GeomError::Precondition(format!("tol must be positive, got {}", self.tol)));
        }
        if self.polygon_m < 16 {
            return Err(GeomError::Precondition("polygon_m must be at least 16".into()));
        }
        if self.mc_samples == Some(0) {
            return Err(GeomError::Precondition("mc sample count must be positive".into()));
        }
        Ok(())
    }

    pub fn mc(samples: u64, seed: u64) -> Self {
        Self {
            method: Method::Mc,
            mc_samples: Some(samples),
            seed,
            ..Self::default()
        }
    }
}

/// `K`, `tau` and `x` for the field `F(x) = |K ∩ (x + tau K)|`.
#[derive(Clone, Debug)]
pub struct TranslateProblem {
    pub body: Body,
    pub tau: f64,
    pub x: Vec<f64>,
}

impl TranslateProblem {
    pub fn new(body: Body, tau: f64, x: Vec<f64>) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(GeomError::Precondition(format!("tau must be positive, got {tau}")));
        }
        check_dim(body.dim(), x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::Precondition("x must be finite".into()));
        }
        Ok(Self { body, tau, x })
    }

    pub fn at(&self, x: Vec<f64>) -> Self {
        Self { x, ..self.clone() }
    }

    /// True when `x + tau K` misses the interior of `K`.
    pub fn outside_support(&self) -> bool {
        self.body.gauge(&self.x) >= 1.0 + self.tau
    }

    /// Membership in the lens, with `y` in `K` and `(y - x) / tau` in `K`.
    pub fn lens_contains(&self, y: &[f64]) -> bool {
        let mut z = [0.0; 8];
        let d = y.len().min(8);
        for i in 0..d {
            z[i] = (y[i] - self.x[i]) / self.tau;
        }
        // both tests run unconditionally: the outcome is a coin flip for the branch predictor
        self.body.contains(y) & self.body.contains(&z[..d])
    }
}

fn exact_method(body: &Body) -> Option<MethodUsed> {
    match body.dim() {
        2 => Some(MethodUsed::ExactPoly2d),
        3 if body.is_polytope() => Some(MethodUsed::ExactPoly3d),
        _ => None,
    }
}

fn zero(method: MethodUsed) -> VolumeEstimate {
    VolumeEstimate {
        value: 0.0,
        abs_error: 0.0,
        method,
        samples: 0,
    }
}

/// `|K ∩ (x + tau K)|`.
pub fn intersection_volume(p: &TranslateProblem, opts: &VolumeOptions) -> Result<VolumeEstimate> {
    opts.validate()?;
    let exact = exact_method(&p.body);
    let method = match (opts.method, exact) {
        (Method::Mc, _) => MethodUsed::Mc,
        (Method::Exact, None) => {
            return Err(GeomError::Unsupported(format!(
                "no exact path for this body in dimension {}",
                p.body.dim()
            )))
        }
        (_, Some(m)) => m,
        (Method::Auto, None) => MethodUsed::Mc,
    };
    if p.outside_support() {
        return Ok(zero(method));
    }
    match method {
        MethodUsed::ExactPoly2d => PreparedPlanar::new(&p.body, opts).lens(&p.x, p.tau),
        MethodUsed::ExactPoly3d => {
            let h = p.body.as_hpolytope().expect("polytope kind");
            let lens = h.intersect(&h.scaled_translated(p.tau, &p.x));
            Ok(exact_3d(&lens))
        }
        _ => {
            let (lo, hi) = lens_box(p);
            mc_volume(&lo, &hi, opts, &|y| p.lens_contains(y))
        }
    }
}

fn exact_3d(h: &HPolytope) -> VolumeEstimate {
    let v = h.volume().unwrap_or(0.0);
    VolumeEstimate {
        value: v,
        abs_error: 64.0 * f64::EPSILON * v.max(1e-300),
        method: MethodUsed::ExactPoly3d,
        samples: 0,
    }
}

/// Intersection of the bounding boxes of `K` and `x + tau K`.
pub fn lens_box(p: &TranslateProblem) -> (Vec<f64>, Vec<f64>) {
    let w = p.body.bounding_half_widths();
    let lo = (0..w.len()).map(|i| (-w[i]).max(p.x[i] - p.tau * w[i])).collect();
    let hi = (0..w.len()).map(|i| w[i].min(p.x[i] + p.tau * w[i])).collect();
    (lo, hi)
}

/// Monte Carlo volume of `{inside}` within the box `[lo, hi]`.
pub fn mc_volume<F>(lo: &[f64], hi: &[f64], opts: &VolumeOptions, inside: &F) -> Result<VolumeEstimate>
where
    F: Fn(&[f64]) -> bool + Sync,
{
    let box_vol: f64 = lo.iter().zip(hi).map(|(a, b)| (b - a).max(0.0)).product();
    if box_vol == 0.0 {
        return Ok(zero(MethodUsed::Mc));
    }
    let est = |hits: u64, n: u64| {
        let (value, abs_error) = mc::wald(hits, n, box_vol);
        VolumeEstimate {
            value,
            abs_error,
            method: MethodUsed::Mc,
            samples: n,
        }
    };
    if let Some(n) = opts.mc_samples {
        let hits = mc::count_hits(lo, hi, n, opts.seed, 0, inside);
        return Ok(est(hits, n));
    }
    // grow in whole batches until the half-width meets tol
    let mut n = 4 * mc::BATCH;
    let mut hits = mc::count_hits(lo, hi, n, opts.seed, 0, inside);
    loop {
        let e = est(hits, n);
        if e.abs_error <= opts.tol {
            return Ok(e);
        }
        if n >= opts.max_mc_samples {
            return Err(GeomError::BudgetExceeded { best: e });
        }
        let add = n.min(opts.max_mc_samples - n);
        hits += mc::count_hits(lo, hi, add, opts.seed, n / mc::BATCH, inside);
        n += add;
    }
}

/// `F(x) = |K ∩ (x + tau K)|` for a fixed body and `tau`, with the planar sandwich built
/// once for repeated queries.
#[derive(Clone, Debug)]
pub struct Field {
    pub body: Body,
    pub tau: f64,
    pub opts: VolumeOptions,
    planar: Option<PreparedPlanar>,
}

impl Field {
    pub fn new(body: &Body, tau: f64, opts: &VolumeOptions) -> Result<Self> {
        opts.validate()?;
        TranslateProblem::new(body.clone(), tau, vec![0.0; body.dim()])?;
        let planar = (body.dim() == 2 && opts.method != Method::Mc).then(|| PreparedPlanar::new(body, opts));
        Ok(Self {
            body: body.clone(),
            tau,
            opts: opts.clone(),
            planar,
        })
    }

    pub fn problem(&self, x: &[f64]) -> TranslateProblem {
        TranslateProblem {
            body: self.body.clone(),
            tau: self.tau,
            x: x.to_vec(),
        }
    }

    /// `F(x)` to the configured tolerance.
    pub fn at(&self, x: &[f64]) -> Result<VolumeEstimate> {
        check_dim(self.body.dim(), x.len())?;
        match &self.planar {
            Some(pp) => pp.lens(x, self.tau),
            None => intersection_volume(&self.problem(x), &self.opts),
        }
    }

    /// `F(x)` without adaptive refinement of the planar sandwich (other paths as `at`).
    pub fn quick(&self, x: &[f64]) -> Result<VolumeEstimate> {
        check_dim(self.body.dim(), x.len())?;
        match &self.planar {
            Some(pp) if self.body.gauge(x) < 1.0 + self.tau => Ok(pp.lens_unrefined(x, self.tau)),
            Some(_) => Ok(zero(MethodUsed::ExactPoly2d)),
            None => intersection_volume(&self.problem(x), &self.opts),
        }
    }

    /// `F(0) = min(1, tau^n) |K|`.
    pub fn max_value(&self) -> Result<f64> {
        let v = body_volume(&self.body, &self.opts)?.value;
        Ok(self.tau.powi(self.body.dim() as i32).min(1.0) * v)
    }
}

/// `|K|`.
pub fn body_volume(body: &Body, opts: &VolumeOptions) -> Result<VolumeEstimate> {
    opts.validate()?;
    if opts.method != Method::Mc && body.is_smooth() {
        if let Some(v) = body.closed_form_volume() {
            return Ok(VolumeEstimate {
                value: v,
                abs_error: 16.0 * f64::EPSILON * v,
                method: MethodUsed::Analytic,
                samples: 0,
            });
        }
    }
    let p = TranslateProblem::new(body.clone(), 1.0, vec![0.0; body.dim()])?;
    intersection_volume(&p, opts)
}

/// `|K1 ∩ (x + K2)|` for two bodies of the same dimension (planar or polytope pairs are
/// exact, the rest Monte Carlo).
pub fn pair_intersection_volume(
    k1: &Body,
    k2: &Body,
    x: &[f64],
    opts: &VolumeOptions,
) -> Result<VolumeEstimate> {
    opts.validate()?;
    check_dim(k1.dim(), k2.dim())?;
    check_dim(k1.dim(), x.len())?;
    let d = k1.dim();
    if opts.method != Method::Mc {
        if d == 2 {
            return planar2d::pair(k1, k2, x, opts);
        }
        if d == 3 && k1.is_polytope() && k2.is_polytope() {
            let h1 = k1.as_hpolytope().unwrap();
            let h2 = k2.as_hpolytope().unwrap().scaled_translated(1.0, x);
            return Ok(exact_3d(&h1.intersect(&h2)));
        }
        if opts.method == Method::Exact {
            return Err(GeomError::Unsupported("no exact path for this pair".into()));
        }
    }
    let w1 = k1.bounding_half_widths();
    let w2 = k2.bounding_half_widths();
    let lo: Vec<f64> = (0..d).map(|i| (-w1[i]).max(x[i] - w2[i])).collect();
    let hi: Vec<f64> = (0..d).map(|i| w1[i].min(x[i] + w2[i])).collect();
    if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
        return Ok(zero(MethodUsed::Mc));
    }
    mc_volume(&lo, &hi, opts, &|y: &[f64]| {
        k1.gauge(y) <= 1.0 && {
            let z: Coords = y.iter().zip(x).map(|(a, b)| a - b).collect();
            k2.gauge(&z) <= 1.0
        }
    })
}

/// Volume of the cap `K ∩ { <n, y> >= h_K(n) - depth }` for a unit vector `n`.
pub fn cap_volume(body: &Body, n: &[f64], depth: f64, opts: &VolumeOptions) -> Result<VolumeEstimate> {
    opts.validate()?;
    check_dim(body.dim(), n.len())?;
    let level = body.support(n) - depth;
    match body.dim() {
        2 if opts.method != Method::Mc => planar2d::cap(body, n, level, opts),
        3 if body.is_polytope() && opts.method != Method::Mc => {
            let mut h = body.as_hpolytope().unwrap();
            h.normals.push(n.iter().map(|v| -v).collect());
            h.offsets.push(-level);
            Ok(exact_3d(&h))
        }
        _ => {
            if opts.method == Method::Exact {
                return Err(GeomError::Unsupported("no exact path for this cap".into()));
            }
            let frame = width::cap_frame(body, n, level);
            let inside = |z: &[f64]| {
                let y = frame.to_world(z);
                dot(&y, n) >= level && body.gauge(&y) <= 1.0
            };
            mc_volume(&frame.lo, &frame.hi, opts, &inside)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lens(d: f64) -> f64 {
        2.0 * (d / 2.0).acos() - (d / 2.0) * (4.0 - d * d).sqrt()
    }

    fn disk_problem(x: Vec<f64>) -> TranslateProblem {
        TranslateProblem::new(Body::ball(2, 1.0).unwrap(), 1.0, x).unwrap()
    }

    #[test]
    fn disk_examples() {
        let o = VolumeOptions::default();
        let v = intersection_volume(&disk_problem(vec![0.0, 0.0]), &o).unwrap();
        assert!((v.value - PI).abs() < 1e-9);
        assert_eq!(v.method, MethodUsed::ExactPoly2d);
        let v = intersection_volume(&disk_problem(vec![1.0, 0.0]), &o).unwrap();
        assert!((v.value - (2.0 * PI / 3.0 - 3f64.sqrt() / 2.0)).abs() < 1e-9);
        assert!(v.abs_error <= o.tol);
        let v = intersection_volume(&disk_problem(vec![2.5, 0.0]), &o).unwrap();
        assert_eq!((v.value, v.abs_error), (0.0, 0.0));
    }

    #[test]
    fn lens_values_are_bracketed() {
        for d in [0.2, 1.0, 1.9, 1.999] {
            let v = intersection_volume(&disk_problem(vec![d, 0.0]), &VolumeOptions::default()).unwrap();
            let t = lens(d);
            assert!(v.lo() <= t && t <= v.hi(), "d={d}: {v:?} vs {t}");
            assert!((v.value - t).abs() < 1e-9, "d={d}");
        }
    }

    #[test]
    fn square_product_formula() {
        let p = TranslateProblem::new(Body::square(1.0).unwrap(), 1.0, vec![0.5, 0.5]).unwrap();
        let v = intersection_volume(&p, &VolumeOptions::default()).unwrap();
        assert!((v.value - 2.25).abs() < 1e-13);
    }

    #[test]
    fn cube_lens_exact_3d() {
        let p = TranslateProblem::new(Body::cube(3, 1.0).unwrap(), 1.0, vec![0.5, -0.5, 1.0]).unwrap();
        let v = intersection_volume(&p, &VolumeOptions::default()).unwrap();
        assert_eq!(v.method, MethodUsed::ExactPoly3d);
        assert!((v.value - 1.5 * 1.5 * 1.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_lens_mc_within_ci() {
        // lens of two unit balls at distance d: pi (4 + d)(2 - d)^2 / 12
        let d: f64 = 1.0;
        let truth = PI * (4.0 + d) * (2.0 - d).powi(2) / 12.0;
        let p = TranslateProblem::new(Body::ball(3, 1.0).unwrap(), 1.0, vec![d, 0.0, 0.0]).unwrap();
        let v = intersection_volume(&p, &VolumeOptions::mc(1 << 20, 3)).unwrap();
        assert!((v.value - truth).abs() <= v.abs_error * 1.5, "{v:?} vs {truth}");
    }

    #[test]
    fn mc_tol_mode_meets_tol() {
        let p = disk_problem(vec![1.0, 0.0]);
        let o = VolumeOptions {
            method: Method::Mc,
            tol: 2e-3,
            ..VolumeOptions::default()
        };
        let v = intersection_volume(&p, &o).unwrap();
        assert!(v.abs_error <= 2e-3);
        let tight = VolumeOptions { tol: 1e-7, max_mc_samples: 1 << 18, ..o };
        assert!(matches!(intersection_volume(&p, &tight), Err(GeomError::BudgetExceeded { .. })));
    }

    #[test]
    fn body_volume_examples() {
        let o = VolumeOptions::default();
        assert!((body_volume(&Body::square(1.0).unwrap(), &o).unwrap().value - 4.0).abs() < 1e-13);
        let disk = body_volume(&Body::ball(2, 1.0).unwrap(), &o).unwrap();
        assert_eq!(disk.method, MethodUsed::Analytic);
        assert!((disk.value - PI).abs() < 1e-14);
        let ell = body_volume(&Body::ellipsoid_semiaxes(&[2.0, 1.0]).unwrap(), &o).unwrap();
        assert!((ell.value - 2.0 * PI).abs() < 1e-13);
        // p = 4 unit ball: Gamma(1 + 1/4)^2 / Gamma(1 + 1/2) * 4
        let p4 = body_volume(&Body::pball(4.0, vec![1.0, 1.0]).unwrap(), &o).unwrap();
        assert!((p4.value - 3.708_149_354_602_743).abs() < 1e-8, "{p4:?}");
    }

    #[test]
    fn caps() {
        let disk = Body::ball(2, 1.0).unwrap();
        let h: f64 = 0.1;
        // circular segment of height h: acos(1-h) - (1-h) sqrt(2h - h^2)
        let t = (1.0 - h).acos() - (1.0 - h) * (2.0 * h - h * h).sqrt();
        let v = cap_volume(&disk, &[1.0, 0.0], h, &VolumeOptions::default()).unwrap();
        assert!((v.value - t).abs() < 1e-11 * t.max(1.0), "{v:?} {t}");
        let ball = Body::ball(3, 1.0).unwrap();
        let t3 = PI * h * h * (3.0 - h) / 3.0;
        let v = cap_volume(&ball, &[0.0, 0.0, 1.0], h, &VolumeOptions::mc(1 << 20, 0)).unwrap();
        assert!((v.value - t3).abs() < 1.5 * v.abs_error, "{v:?} {t3}");
        let cube = Body::cube(3, 1.0).unwrap();
        let v = cap_volume(&cube, &[1.0, 0.0, 0.0], 0.25, &VolumeOptions::default()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pair_volume() {
        let disk = Body::ball(2, 1.0).unwrap();
        let half = Body::ball(2, 0.5).unwrap();
        let v = pair_intersection_volume(&disk, &half, &[0.2, 0.0], &VolumeOptions::default()).unwrap();
        assert!((v.value - PI * 0.25).abs() < 1e-9);
        let sq = Body::square(1.0).unwrap();
        let v = pair_intersection_volume(&sq, &disk, &[0.0, 0.0], &VolumeOptions::default()).unwrap();
        assert!((v.value - PI).abs() < 1e-9);
    }
}
