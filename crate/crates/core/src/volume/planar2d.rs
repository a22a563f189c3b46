//! Certified planar volumes from polygon sandwiches, refined by normal-angle windows
//! around the part of the boundary that actually bounds the region.

use std::f64::consts::PI;

use crate::bodies::Body;
use crate::error::{GeomError, Result};
use crate::planar::{
    covering_arc, intersect_placed, normalize_windows, sandwich_value, Line, PlanarSandwich, Placed,
};

use super::{MethodUsed, VolumeEstimate, VolumeOptions};

/// One copy `t + s * bodies[body]` in an intersection.
#[derive(Clone, Copy, Debug)]
struct Placement {
    body: usize,
    s: f64,
    t: [f64; 2],
}

struct Bounds {
    lo: f64,
    hi: f64,
    /// Normal angles of the outer-polygon lines that bound the result, per placement.
    active: Vec<Vec<f64>>,
    exact: bool,
}

fn bounds(sws: &[&PlanarSandwich], places: &[Placement], extra: &[Line]) -> Bounds {
    let outer: Vec<Placed> = places
        .iter()
        .map(|p| Placed { poly: &sws[p.body].outer, s: p.s, t: p.t })
        .collect();
    let (clip, tags) = intersect_placed(&outer, extra);
    let mut active = vec![Vec::new(); places.len()];
    for &i in &clip.active {
        let (who, angle) = tags[i];
        if who != usize::MAX {
            active[who].push(angle);
        }
    }
    let hi = clip.area;
    let exact = sws.iter().all(|s| s.exact);
    if exact || hi == 0.0 {
        return Bounds { lo: hi, hi, active, exact };
    }
    let inner: Vec<Placed> = places
        .iter()
        .map(|p| Placed { poly: &sws[p.body].inner, s: p.s, t: p.t })
        .collect();
    let lo = intersect_placed(&inner, extra).0.area.min(hi);
    Bounds { lo, hi, active, exact }
}

fn estimate(b: &Bounds, scale: f64, samples: usize) -> VolumeEstimate {
    let rounding = 1e-13 * scale;
    if b.exact {
        return VolumeEstimate {
            value: b.hi,
            abs_error: if b.hi == 0.0 { 0.0 } else { rounding },
            method: MethodUsed::ExactPoly2d,
            samples: 0,
        };
    }
    VolumeEstimate {
        value: sandwich_value(b.lo, b.hi),
        abs_error: b.hi - b.lo + if b.hi == 0.0 { 0.0 } else { rounding },
        method: MethodUsed::ExactPoly2d,
        samples: samples as u64,
    }
}

fn area_scale(b: &Body) -> f64 {
    let w = b.bounding_half_widths();
    4.0 * w[0] * w[1]
}

/// Windows of normal angles, per body, covering the active lines with a margin.
fn windows_for(nbodies: usize, places: &[Placement], active: &[Vec<f64>], m: usize) -> Vec<Vec<(f64, f64)>> {
    let mut out = vec![Vec::new(); nbodies];
    for (p, angles) in places.iter().zip(active) {
        if angles.is_empty() {
            continue;
        }
        let mut a = angles.clone();
        let (a0, a1) = covering_arc(&mut a);
        let margin = 0.25 * (a1 - a0) + 8.0 * PI / m as f64;
        out[p.body].push((a0 - margin, a1 + margin));
    }
    out
}

fn adaptive(
    bodies: &[&Body],
    places: &[Placement],
    extra: &[Line],
    opts: &VolumeOptions,
    base: Option<&[PlanarSandwich]>,
) -> Result<VolumeEstimate> {
    let scale = area_scale(bodies[0]);
    let owned: Vec<PlanarSandwich>;
    let base: &[PlanarSandwich] = match base {
        Some(b) => b,
        None => {
            owned = bodies.iter().map(|b| PlanarSandwich::full(b, opts.polygon_m)).collect();
            &owned
        }
    };
    let refs: Vec<&PlanarSandwich> = base.iter().collect();
    let mut b = bounds(&refs, places, extra);
    let samples = |s: &[&PlanarSandwich]| s.iter().map(|x| x.samples).sum::<usize>();
    let mut best = estimate(&b, scale, samples(&refs));
    if b.exact || best.abs_error <= opts.tol || b.hi == 0.0 {
        return Ok(best);
    }
    let mut m = opts.polygon_m;
    loop {
        let wins = windows_for(bodies.len(), places, &b.active, m);
        let sws: Vec<PlanarSandwich> = bodies
            .iter()
            .zip(&wins)
            .map(|(body, w)| {
                if w.is_empty() {
                    PlanarSandwich::full(body, 64)
                } else {
                    PlanarSandwich::build(body, m, Some(&normalize_windows(w)))
                }
            })
            .collect();
        let refs: Vec<&PlanarSandwich> = sws.iter().collect();
        let nb = bounds(&refs, places, extra);
        let e = estimate(&nb, scale, samples(&refs));
        if e.abs_error < best.abs_error {
            best = e;
        }
        if best.abs_error <= opts.tol {
            return Ok(best);
        }
        if nb.hi == 0.0 {
            return Ok(e);
        }
        b = nb;
        m *= 2;
        if m > opts.max_polygon_m {
            return Err(GeomError::BudgetExceeded { best });
        }
    }
}

/// A planar body with its full-circle sandwich built once, for repeated lens queries.
#[derive(Clone, Debug)]
pub struct PreparedPlanar {
    body: Body,
    base: [PlanarSandwich; 1],
    opts: VolumeOptions,
}

impl PreparedPlanar {
    pub fn new(body: &Body, opts: &VolumeOptions) -> Self {
        assert_eq!(body.dim(), 2);
        Self {
            body: body.clone(),
            base: [PlanarSandwich::full(body, opts.polygon_m)],
            opts: opts.clone(),
        }
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    fn places(x: &[f64], tau: f64) -> [Placement; 2] {
        [
            Placement { body: 0, s: 1.0, t: [0.0, 0.0] },
            Placement { body: 0, s: tau, t: [x[0], x[1]] },
        ]
    }

    /// `|K ∩ (x + tau K)|` refined until the sandwich width meets the tolerance.
    pub fn lens(&self, x: &[f64], tau: f64) -> Result<VolumeEstimate> {
        if self.body.gauge(x) >= 1.0 + tau {
            return Ok(estimate(&Bounds { lo: 0.0, hi: 0.0, active: vec![], exact: true }, 0.0, 0));
        }
        adaptive(&[&self.body], &Self::places(x, tau), &[], &self.opts, Some(&self.base))
    }

    /// Same, from the prepared sandwich only.
    pub fn lens_unrefined(&self, x: &[f64], tau: f64) -> VolumeEstimate {
        let refs = [&self.base[0]];
        let b = bounds(&refs, &Self::places(x, tau), &[]);
        estimate(&b, area_scale(&self.body), self.base[0].samples)
    }
}

pub(super) fn pair(k1: &Body, k2: &Body, x: &[f64], opts: &VolumeOptions) -> Result<VolumeEstimate> {
    let places = [
        Placement { body: 0, s: 1.0, t: [0.0, 0.0] },
        Placement { body: 1, s: 1.0, t: [x[0], x[1]] },
    ];
    adaptive(&[k1, k2], &places, &[], opts, None)
}

pub(super) fn cap(body: &Body, n: &[f64], level: f64, opts: &VolumeOptions) -> Result<VolumeEstimate> {
    let places = [Placement { body: 0, s: 1.0, t: [0.0, 0.0] }];
    let cut = Line::new([-n[0], -n[1]], -level);
    adaptive(&[body], &places, &[cut], opts, None)
}
