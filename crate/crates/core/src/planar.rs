//! Planar convex polygons as angle-sorted halfplane lists, their intersection in linear
//! time, and inscribed/circumscribed polygonizations of smooth bodies.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::bodies::Body;
use crate::linalg::compensated_sum;

/// The halfplane `<n, y> <= b`, with `n` a unit vector at polar angle `angle`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    pub n: [f64; 2],
    pub b: f64,
    pub angle: f64,
}

impl Line {
    pub fn new(n: [f64; 2], b: f64) -> Line {
        let len = n[0].hypot(n[1]);
        let n = [n[0] / len, n[1] / len];
        Line {
            n,
            b: b / len,
            angle: n[1].atan2(n[0]),
        }
    }

    fn moved(&self, s: f64, t: [f64; 2]) -> Line {
        Line {
            b: s * self.b + self.n[0] * t[0] + self.n[1] * t[1],
            ..*self
        }
    }

    #[inline]
    fn excess(&self, p: [f64; 2]) -> f64 {
        self.n[0] * p[0] + self.n[1] * p[1] - self.b
    }
}

#[inline]
fn meet(a: &Line, b: &Line) -> [f64; 2] {
    let det = a.n[0] * b.n[1] - a.n[1] * b.n[0];
    [
        (a.b * b.n[1] - b.b * a.n[1]) / det,
        (a.n[0] * b.b - b.n[0] * a.b) / det,
    ]
}

/// A convex polygon as an angle-sorted list of halfplanes.
#[derive(Clone, Debug, PartialEq)]
pub struct HPolygon {
    pub lines: Vec<Line>,
}

impl HPolygon {
    pub fn from_lines(mut lines: Vec<Line>) -> HPolygon {
        lines.sort_by(|a, b| a.angle.total_cmp(&b.angle));
        HPolygon { lines }
    }

    /// From counterclockwise vertices.
    pub fn from_vertices(v: &[[f64; 2]]) -> HPolygon {
        let k = v.len();
        let lines = (0..k)
            .filter_map(|i| {
                let p = v[i];
                let q = v[(i + 1) % k];
                let d = [q[0] - p[0], q[1] - p[1]];
                if d[0].hypot(d[1]) <= 1e-300 {
                    return None;
                }
                let n = [d[1], -d[0]];
                Some(Line::new(n, n[0] * p[0] + n[1] * p[1]))
            })
            .collect();
        Self::from_lines(lines)
    }

    pub fn area(&self) -> f64 {
        intersect(&self.lines).area
    }
}

/// Result of a halfplane intersection: the vertex cycle and, per vertex, the index (into
/// the input) of the line leaving it.
#[derive(Clone, Debug, Default)]
pub struct Clipped {
    pub vertices: Vec<[f64; 2]>,
    pub active: Vec<usize>,
    pub area: f64,
}

/// Intersect a bounded, angle-sorted list of halfplanes.
pub fn intersect(lines: &[Line]) -> Clipped {
    let n = lines.len();
    if n < 3 {
        return Clipped::default();
    }
    let scale = lines.iter().map(|l| l.b.abs()).fold(1e-300, f64::max);
    let eps = 1e-13 * scale;
    let mut dq: Vec<usize> = Vec::with_capacity(n);
    let mut head = 0usize;
    for i in 0..n {
        let li = &lines[i];
        while dq.len() - head >= 2 {
            let k = dq.len();
            if li.excess(meet(&lines[dq[k - 1]], &lines[dq[k - 2]])) > eps {
                dq.pop();
            } else {
                break;
            }
        }
        while dq.len() - head >= 2 {
            if li.excess(meet(&lines[dq[head]], &lines[dq[head + 1]])) > eps {
                head += 1;
            } else {
                break;
            }
        }
        if dq.len() > head {
            let last = &lines[*dq.last().unwrap()];
            let cr = last.n[0] * li.n[1] - last.n[1] * li.n[0];
            let dt = last.n[0] * li.n[0] + last.n[1] * li.n[1];
            if cr.abs() <= 1e-15 {
                if dt < 0.0 {
                    // antiparallel and consecutive: only possible when empty or unbounded
                    if li.b + last.b < 0.0 {
                        return Clipped::default();
                    }
                } else {
                    if li.b < last.b {
                        dq.pop();
                        dq.push(i);
                    }
                    continue;
                }
            }
        }
        dq.push(i);
    }
    loop {
        let k = dq.len();
        if k - head >= 3 && lines[dq[head]].excess(meet(&lines[dq[k - 1]], &lines[dq[k - 2]])) > eps
        {
            dq.pop();
            continue;
        }
        if k - head >= 3
            && lines[dq[k - 1]].excess(meet(&lines[dq[head]], &lines[dq[head + 1]])) > eps
        {
            head += 1;
            continue;
        }
        break;
    }
    let ring = &dq[head..];
    let k = ring.len();
    if k < 3 {
        return Clipped::default();
    }
    let vertices: Vec<[f64; 2]> = (0..k)
        .map(|i| meet(&lines[ring[i]], &lines[ring[(i + 1) % k]]))
        .collect();
    let o = vertices[0];
    let area = 0.5
        * compensated_sum((1..k - 1).map(|i| {
            let a = [vertices[i][0] - o[0], vertices[i][1] - o[1]];
            let b = [vertices[i + 1][0] - o[0], vertices[i + 1][1] - o[1]];
            a[0] * b[1] - a[1] * b[0]
        }));
    if !(area > 0.0) || !area.is_finite() {
        return Clipped::default();
    }
    // every consecutive edge must turn left, otherwise the input was infeasible
    for i in 0..k {
        let a = &lines[ring[i]];
        let b = &lines[ring[(i + 1) % k]];
        if a.n[0] * b.n[1] - a.n[1] * b.n[0] < -1e-15 {
            return Clipped::default();
        }
    }
    let active = (0..k).map(|i| ring[(i + 1) % k]).collect();
    Clipped {
        vertices,
        active,
        area,
    }
}

/// A placed copy `t + s * P` of a polygon.
#[derive(Clone, Copy, Debug)]
pub struct Placed<'a> {
    pub poly: &'a HPolygon,
    pub s: f64,
    pub t: [f64; 2],
}

/// Intersection of placed polygons plus extra halfplanes. Also returns, per input line of
/// the merged list, which piece it came from (`usize::MAX` for extras).
pub fn intersect_placed(pieces: &[Placed], extra: &[Line]) -> (Clipped, Vec<(usize, f64)>) {
    let same = pieces.len() >= 2
        && pieces
            .iter()
            .all(|p| std::ptr::eq(p.poly, pieces[0].poly));
    if same && extra.is_empty() {
        // identical normal lists: the intersection is a pointwise minimum of offsets
        let base = &pieces[0].poly.lines;
        let mut lines = Vec::with_capacity(base.len());
        let mut tags = Vec::with_capacity(base.len());
        for l in base {
            let mut best = l.moved(pieces[0].s, pieces[0].t);
            let mut who = 0;
            for (j, p) in pieces.iter().enumerate().skip(1) {
                let c = l.moved(p.s, p.t);
                if c.b < best.b {
                    best = c;
                    who = j;
                }
            }
            lines.push(best);
            tags.push((who, l.angle));
        }
        return (intersect(&lines), tags);
    }
    let mut all: Vec<(Line, usize)> = Vec::new();
    for (j, p) in pieces.iter().enumerate() {
        all.extend(p.poly.lines.iter().map(|l| (l.moved(p.s, p.t), j)));
    }
    all.extend(extra.iter().map(|l| (*l, usize::MAX)));
    all.sort_by(|a, b| a.0.angle.total_cmp(&b.0.angle));
    let lines: Vec<Line> = all.iter().map(|a| a.0).collect();
    let tags = all.iter().map(|a| (a.1, a.0.angle)).collect();
    (intersect(&lines), tags)
}

/// Normal-angle windows for targeted sampling; `None` samples the whole circle.
#[derive(Clone, Debug, PartialEq)]
pub struct Windows(pub Vec<(f64, f64)>);

/// Inscribed and circumscribed polygons of a body built from the same boundary samples,
/// so that `inner` is contained in the body and the body in `outer`.
#[derive(Clone, Debug)]
pub struct PlanarSandwich {
    pub outer: Arc<HPolygon>,
    pub inner: Arc<HPolygon>,
    pub samples: usize,
    pub exact: bool,
}

/// Even coarse directions added to every sample set so partial windows stay bounded.
const COARSE: usize = 16;

impl PlanarSandwich {
    pub fn full(body: &Body, m: usize) -> PlanarSandwich {
        Self::build(body, m, None)
    }

    /// Samples `m` boundary points: half uniform in normal angle, half uniform in polar
    /// angle, optionally restricted to normal-angle windows.
    pub fn build(body: &Body, m: usize, windows: Option<&Windows>) -> PlanarSandwich {
        assert_eq!(body.dim(), 2, "planar sandwich needs a 2D body");
        if let Some(h) = body.as_hpolytope() {
            let lines = h
                .normals
                .iter()
                .zip(&h.offsets)
                .map(|(a, b)| Line::new([a[0], a[1]], *b))
                .collect();
            let poly = Arc::new(HPolygon::from_lines(lines));
            return PlanarSandwich {
                outer: poly.clone(),
                inner: poly,
                samples: 0,
                exact: true,
            };
        }
        let full = vec![(-PI, PI)];
        let wins: &[(f64, f64)] = match windows {
            Some(w) => &w.0,
            None => &full,
        };
        let total_len: f64 = wins.iter().map(|w| w.1 - w.0).sum();
        let mut pts: Vec<([f64; 2], [f64; 2])> = Vec::with_capacity(m + COARSE + 4);
        let push_normal = |theta: f64, pts: &mut Vec<([f64; 2], [f64; 2])>| {
            let u = [theta.cos(), theta.sin()];
            let y = body.boundary_point(&u);
            pts.push(([y[0], y[1]], u));
        };
        for k in 0..COARSE {
            push_normal(-PI + 2.0 * PI * (k as f64 + 0.5) / COARSE as f64, &mut pts);
        }
        for &(a0, a1) in wins {
            let share = ((m as f64) * (a1 - a0) / total_len).round().max(4.0) as usize;
            let half = share / 2;
            for k in 0..half {
                let t = if windows.is_none() {
                    a0 + (a1 - a0) * k as f64 / half as f64
                } else {
                    a0 + (a1 - a0) * k as f64 / (half - 1).max(1) as f64
                };
                push_normal(t, &mut pts);
            }
            if windows.is_some() {
                // geometrically graded tails keep the chords next to the window short
                let mut step = (a1 - a0) / half.max(1) as f64;
                while step < 2.0 * PI / COARSE as f64 {
                    push_normal(a1 + step, &mut pts);
                    push_normal(a0 - step, &mut pts);
                    step *= 2.0;
                }
            }
            // polar-angle samples between the window end points, offset by half a step
            let p0 = body.boundary_point(&[a0.cos(), a0.sin()]);
            let p1 = body.boundary_point(&[a1.cos(), a1.sin()]);
            let f0 = p0[1].atan2(p0[0]);
            let mut f1 = p1[1].atan2(p1[0]);
            if windows.is_none() {
                f1 = f0 + 2.0 * PI;
            } else {
                while f1 <= f0 {
                    f1 += 2.0 * PI;
                }
            }
            let rest = share - half;
            for k in 0..rest {
                let phi = f0 + (f1 - f0) * (k as f64 + 0.5) / rest as f64;
                let y = body.radial_point(&[phi.cos(), phi.sin()]);
                let nv = body.outer_normal(&y).vector;
                pts.push(([y[0], y[1]], [nv[0], nv[1]]));
            }
        }
        let mut keyed: Vec<(f64, [f64; 2], [f64; 2])> = pts
            .into_iter()
            .map(|(y, u)| (u[1].atan2(u[0]), y, u))
            .collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        keyed.dedup_by(|b, a| (b.0 - a.0).abs() < 1e-9);
        if keyed.len() > 1 && (keyed[0].0 + 2.0 * PI - keyed[keyed.len() - 1].0) < 1e-9 {
            keyed.pop();
        }
        let outer: Vec<Line> = keyed
            .iter()
            .map(|(ang, y, u)| Line {
                n: *u,
                b: u[0] * y[0] + u[1] * y[1],
                angle: *ang,
            })
            .collect();
        let verts: Vec<[f64; 2]> = keyed.iter().map(|k| k.1).collect();
        PlanarSandwich {
            samples: keyed.len(),
            outer: Arc::new(HPolygon { lines: outer }),
            inner: Arc::new(HPolygon::from_vertices(&verts)),
            exact: false,
        }
    }

    /// `(inner, outer)` area bounds of `K ∩ (x + tau K)`.
    pub fn lens_bounds(&self, x: [f64; 2], tau: f64) -> (f64, f64) {
        let o = [
            Placed { poly: &self.outer, s: 1.0, t: [0.0, 0.0] },
            Placed { poly: &self.outer, s: tau, t: x },
        ];
        let hi = intersect_placed(&o, &[]).0.area;
        if self.exact {
            return (hi, hi);
        }
        let i = [
            Placed { poly: &self.inner, s: 1.0, t: [0.0, 0.0] },
            Placed { poly: &self.inner, s: tau, t: x },
        ];
        let lo = intersect_placed(&i, &[]).0.area;
        (lo.min(hi), hi)
    }
}

/// Point estimate inside a sandwich: inscribed chords lose twice what tangent polygons
/// gain, so this weighting cancels the leading error term.
pub fn sandwich_value(lo: f64, hi: f64) -> f64 {
    (lo + 2.0 * hi) / 3.0
}

/// Smallest arc (start, end) with `end - start <= 2 pi` covering all the given angles.
pub fn covering_arc(angles: &mut [f64]) -> (f64, f64) {
    angles.sort_by(|a, b| a.total_cmp(b));
    let k = angles.len();
    if k == 1 {
        return (angles[0], angles[0]);
    }
    let mut best_gap = angles[0] + 2.0 * PI - angles[k - 1];
    let mut start = 0;
    for i in 1..k {
        let gap = angles[i] - angles[i - 1];
        if gap > best_gap {
            best_gap = gap;
            start = i;
        }
    }
    let a0 = angles[start];
    let a1 = if start == 0 { angles[k - 1] } else { angles[start - 1] + 2.0 * PI };
    (a0, a1)
}

/// Merge normal-angle windows (each with `end - start < 2 pi`) into disjoint ones in
/// `[-pi, pi)` coordinates, wrapping as needed.
pub fn normalize_windows(raw: &[(f64, f64)]) -> Windows {
    let mut parts: Vec<(f64, f64)> = Vec::new();
    for &(a0, a1) in raw {
        if a1 - a0 >= 2.0 * PI - 1e-12 {
            return Windows(vec![(-PI, PI)]);
        }
        let shift = ((a0 + PI) / (2.0 * PI)).floor() * 2.0 * PI;
        let (s0, s1) = (a0 - shift, a1 - shift);
        if s1 > PI {
            parts.push((s0, PI));
            parts.push((-PI, s1 - 2.0 * PI));
        } else {
            parts.push((s0, s1));
        }
    }
    parts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for p in parts {
        match out.last_mut() {
            Some(last) if p.0 <= last.1 => last.1 = last.1.max(p.1),
            _ => out.push(p),
        }
    }
    Windows(out)
}
