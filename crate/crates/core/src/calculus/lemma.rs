//! One-sided directional derivatives of `r -> |K1 ∩ (r u + K2)|` from chord comparisons
//! over the projection of `K1 ∩ K2` onto `u^⊥`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::Body;
use crate::error::{check_dim, GeomError, Result};
use crate::linalg::{complement_basis, compensated_sum, normalized};

/// Measures of the four chord-order sets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SetMeasures {
    pub c_plus_12: f64,
    pub c_minus_12: f64,
    pub c_plus_21: f64,
    pub c_minus_21: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneSidedDerivatives {
    pub forward: f64,
    pub backward: f64,
    pub direction: Vec<f64>,
    pub set_measures: SetMeasures,
    /// Measure of the projection of `K1 ∩ K2` (chords overlapping).
    pub overlap_measure: f64,
    pub cells: usize,
}

const NONE: u8 = 0;
const OVERLAP: u8 = 1;
const CP12: u8 = 2;
const CM12: u8 = 4;
const CP21: u8 = 8;
const CM21: u8 = 16;

struct Classifier<'a> {
    k1: &'a Body,
    k2: &'a Body,
    u: Vec<f64>,
    basis: Vec<Vec<f64>>,
    eps: f64,
}

impl Classifier<'_> {
    fn point(&self, s: &[f64]) -> Vec<f64> {
        let n = self.u.len();
        let mut y = vec![0.0; n];
        for (si, b) in s.iter().zip(&self.basis) {
            for k in 0..n {
                y[k] += si * b[k];
            }
        }
        y
    }

    fn class(&self, s: &[f64]) -> u8 {
        let y = self.point(s);
        let (Some((m1, p1)), Some((m2, p2))) = (self.k1.chord(&y, &self.u), self.k2.chord(&y, &self.u))
        else {
            return NONE;
        };
        let e = self.eps;
        let gt = |a: f64, b: f64| a - b > e;
        let ge = |a: f64, b: f64| a - b >= -e;
        let mut c = NONE;
        if ge(p1.min(p2), m1.max(m2)) {
            c |= OVERLAP;
        }
        if gt(p1, p2) && ge(p2, m1) && gt(m1, m2) {
            c |= CP12;
        }
        if ge(p1, p2) && gt(p2, m1) && ge(m1, m2) {
            c |= CM12;
        }
        if gt(p2, p1) && ge(p1, m2) && gt(m2, m1) {
            c |= CP21;
        }
        if ge(p2, p1) && gt(p1, m2) && ge(m2, m1) {
            c |= CM21;
        }
        c
    }
}

/// Per-class measures of a box, refined where its corner and center classes disagree.
fn cell_measure(cl: &Classifier, lo: &[f64], hi: &[f64], corners: Option<&[u8]>, depth: usize, out: &mut [f64; 5]) {
    let d = lo.len();
    let center: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let cc = cl.class(&center);
    let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let uniform = match corners {
        Some(cs) => cs.iter().all(|&c| c == cc),
        None => (0..1usize << d).all(|mask| {
            let p: Vec<f64> = (0..d).map(|k| if mask >> k & 1 == 1 { hi[k] } else { lo[k] }).collect();
            cl.class(&p) == cc
        }),
    };
    if uniform || depth == 0 {
        for (bit, slot) in [OVERLAP, CP12, CM12, CP21, CM21].iter().zip(out.iter_mut()) {
            if cc & bit != 0 {
                *slot += vol;
            }
        }
        return;
    }
    let parts = 4usize;
    let total = parts.pow(d as u32);
    for idx in 0..total {
        let mut sub_lo = vec![0.0; d];
        let mut sub_hi = vec![0.0; d];
        let mut r = idx;
        for k in 0..d {
            let j = r % parts;
            r /= parts;
            let w = (hi[k] - lo[k]) / parts as f64;
            sub_lo[k] = lo[k] + j as f64 * w;
            sub_hi[k] = if j + 1 == parts { hi[k] } else { lo[k] + (j + 1) as f64 * w };
        }
        cell_measure(cl, &sub_lo, &sub_hi, None, depth - 1, out);
    }
}

/// One-sided derivatives at `r = 0` of `f(r) = |K1 ∩ (r u + K2)|` on a grid with
/// `resolution` cells per axis of `u^⊥` (refined twice, 4x per axis, at set boundaries).
pub fn one_sided_derivatives(k1: &Body, k2: &Body, u: &[f64], resolution: usize) -> Result<OneSidedDerivatives> {
    check_dim(k1.dim(), k2.dim())?;
    check_dim(k1.dim(), u.len())?;
    if resolution < 2 {
        return Err(GeomError::Precondition("resolution must be at least 2".into()));
    }
    let n = k1.dim();
    if n > 3 {
        return Err(GeomError::Unsupported(format!("projection grids in dimension {n}")));
    }
    let u = normalized(u);
    let basis = complement_basis(&u);
    let scale = k1
        .bounding_half_widths()
        .iter()
        .chain(k2.bounding_half_widths().iter())
        .fold(0.0f64, |m, v| m.max(*v));
    let cl = Classifier {
        k1,
        k2,
        u: u.clone(),
        basis: basis.clone(),
        eps: 1e-12 * scale,
    };
    let d = n - 1;
    let mut lo = Vec::with_capacity(d);
    let mut hi = Vec::with_capacity(d);
    for b in &basis {
        let nb: Vec<f64> = b.iter().map(|v| -v).collect();
        lo.push((-k1.support(&nb)).max(-k2.support(&nb)));
        hi.push(k1.support(b).min(k2.support(b)));
    }
    if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
        return Err(GeomError::Empty);
    }
    let r = resolution;
    let step: Vec<f64> = (0..d).map(|k| (hi[k] - lo[k]) / r as f64).collect();
    let coord = |k: usize, i: usize| if i == r { hi[k] } else { lo[k] + i as f64 * step[k] };
    // corner classes on the (r+1)^d lattice
    let ncorner = (r + 1).pow(d as u32);
    let corner_class: Vec<u8> = (0..ncorner)
        .into_par_iter()
        .map(|idx| {
            let mut rem = idx;
            let s: Vec<f64> = (0..d)
                .map(|k| {
                    let i = rem % (r + 1);
                    rem /= r + 1;
                    coord(k, i)
                })
                .collect();
            cl.class(&s)
        })
        .collect();
    let ncell = r.pow(d as u32);
    let per_cell: Vec<[f64; 5]> = (0..ncell)
        .into_par_iter()
        .map(|idx| {
            let mut rem = idx;
            let ij: Vec<usize> = (0..d)
                .map(|_| {
                    let i = rem % r;
                    rem /= r;
                    i
                })
                .collect();
            let clo: Vec<f64> = (0..d).map(|k| coord(k, ij[k])).collect();
            let chi: Vec<f64> = (0..d).map(|k| coord(k, ij[k] + 1)).collect();
            let corners: Vec<u8> = (0..1usize << d)
                .map(|mask| {
                    let mut lin = 0;
                    let mut mul = 1;
                    for k in 0..d {
                        lin += (ij[k] + (mask >> k & 1)) * mul;
                        mul *= r + 1;
                    }
                    corner_class[lin]
                })
                .collect();
            let mut out = [0.0; 5];
            cell_measure(&cl, &clo, &chi, Some(&corners), 2, &mut out);
            out
        })
        .collect();
    let sum = |k: usize| compensated_sum(per_cell.iter().map(|c| c[k]));
    let overlap = sum(0);
    if overlap <= 0.0 {
        return Err(GeomError::Empty);
    }
    let sets = SetMeasures {
        c_plus_12: sum(1),
        c_minus_12: sum(2),
        c_plus_21: sum(3),
        c_minus_21: sum(4),
    };
    Ok(OneSidedDerivatives {
        forward: sets.c_plus_12 - sets.c_minus_21,
        backward: sets.c_minus_12 - sets.c_plus_21,
        direction: u,
        set_measures: sets,
        overlap_measure: overlap,
        cells: ncell,
    })
}
