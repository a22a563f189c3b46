//! Halfspace-listed polytopes: vertex enumeration by plane intersection and exact
//! volume in two and three dimensions.

use crate::linalg::{complement_basis, compensated_sum, dot, norm, solve_dense, sub};

/// `{ y : <a_i, y> <= b_i }`, normals stored unnormalized as supplied.
#[derive(Clone, Debug, PartialEq)]
pub struct HPolytope {
    pub dim: usize,
    pub normals: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
}

impl HPolytope {
    pub fn new(normals: Vec<Vec<f64>>, offsets: Vec<f64>) -> Self {
        let dim = normals.first().map_or(0, Vec::len);
        Self {
            dim,
            normals,
            offsets,
        }
    }

    /// Concatenate the constraint lists of two polytopes.
    pub fn intersect(&self, other: &HPolytope) -> HPolytope {
        let mut normals = self.normals.clone();
        normals.extend(other.normals.iter().cloned());
        let mut offsets = self.offsets.clone();
        offsets.extend(other.offsets.iter().copied());
        HPolytope::new(normals, offsets)
    }

    /// Image under `y -> t + s*y` with `s > 0`.
    pub fn scaled_translated(&self, s: f64, t: &[f64]) -> HPolytope {
        let offsets = self
            .normals
            .iter()
            .zip(&self.offsets)
            .map(|(a, b)| s * b + dot(a, t))
            .collect();
        HPolytope::new(self.normals.clone(), offsets)
    }

    fn scale(&self) -> f64 {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(a, b)| (b / norm(a)).abs())
            .fold(1e-300, f64::max)
    }

    /// Unit-normal constraints with exact and near-duplicates merged.
    fn normalized(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let mut out_a: Vec<Vec<f64>> = Vec::new();
        let mut out_b: Vec<f64> = Vec::new();
        for (a, b) in self.normals.iter().zip(&self.offsets) {
            let na = norm(a);
            let ua: Vec<f64> = a.iter().map(|v| v / na).collect();
            let ub = b / na;
            match out_a.iter().position(|c| norm(&sub(c, &ua)) < 1e-12) {
                Some(k) => out_b[k] = out_b[k].min(ub),
                None => {
                    out_a.push(ua);
                    out_b.push(ub);
                }
            }
        }
        (out_a, out_b)
    }

    pub fn contains(&self, y: &[f64], tol: f64) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(a, b)| dot(a, y) <= b + tol * norm(a))
    }

    /// All vertices, found by intersecting every `dim`-subset of constraint planes and
    /// keeping the feasible, distinct solutions.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let n = self.dim;
        let (a, b) = self.normalized();
        let m = a.len();
        if m < n {
            return Vec::new();
        }
        let scale = self.scale();
        let feas_tol = 1e-10 * scale;
        let dedup_tol = 1e-9 * scale;
        let mut verts: Vec<Vec<f64>> = Vec::new();
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            let rows: Vec<Vec<f64>> = idx.iter().map(|&i| a[i].clone()).collect();
            let rhs: Vec<f64> = idx.iter().map(|&i| b[i]).collect();
            if let Some(v) = solve_dense(rows, rhs) {
                let feasible = a.iter().zip(&b).all(|(ai, bi)| dot(ai, &v) <= bi + feas_tol);
                if feasible && !verts.iter().any(|w| norm(&sub(w, &v)) <= dedup_tol) {
                    verts.push(v);
                }
            }
            // next combination
            let mut k = n;
            loop {
                if k == 0 {
                    return verts;
                }
                k -= 1;
                if idx[k] < m - n + k {
                    idx[k] += 1;
                    for j in k + 1..n {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// Lebesgue measure in dimension 2 or 3; other dimensions return `None`.
    pub fn volume(&self) -> Option<f64> {
        match self.dim {
            2 => Some(polygon_area_from_points(&self.vertices())),
            3 => Some(self.volume_3d()),
            _ => None,
        }
    }

    fn volume_3d(&self) -> f64 {
        let verts = self.vertices();
        if verts.len() < 4 {
            return 0.0;
        }
        let (a, b) = self.normalized();
        let scale = self.scale();
        let on_tol = 1e-9 * scale;
        let c: Vec<f64> = (0..3)
            .map(|k| verts.iter().map(|v| v[k]).sum::<f64>() / verts.len() as f64)
            .collect();
        let terms = a.iter().zip(&b).map(|(ai, bi)| {
            let facet: Vec<&Vec<f64>> = verts
                .iter()
                .filter(|v| (dot(ai, v) - bi).abs() <= on_tol)
                .collect();
            if facet.len() < 3 {
                return 0.0;
            }
            let basis = complement_basis(ai);
            let pts: Vec<Vec<f64>> = facet
                .iter()
                .map(|v| vec![dot(v, &basis[0]), dot(v, &basis[1])])
                .collect();
            let area = polygon_area_from_points(&pts);
            let height = bi - dot(ai, &c);
            area * height / 3.0
        });
        compensated_sum(terms).max(0.0)
    }
}

/// Area of the convex hull of planar points that are already in convex position
/// (vertices of a convex polygon in any order).
pub fn polygon_area_from_points(points: &[Vec<f64>]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let cx = points.iter().map(|p| p[0]).sum::<f64>() / points.len() as f64;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() / points.len() as f64;
    let mut sorted: Vec<&Vec<f64>> = points.iter().collect();
    sorted.sort_by(|p, q| {
        let ap = (p[1] - cy).atan2(p[0] - cx);
        let aq = (q[1] - cy).atan2(q[0] - cx);
        ap.total_cmp(&aq)
    });
    let n = sorted.len();
    let terms = (0..n).map(|i| {
        let p = sorted[i];
        let q = sorted[(i + 1) % n];
        0.5 * ((p[0] - cx) * (q[1] - cy) - (q[0] - cx) * (p[1] - cy))
    });
    compensated_sum(terms).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(h: f64) -> HPolytope {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for k in 0..3 {
            for s in [1.0, -1.0] {
                let mut n = vec![0.0; 3];
                n[k] = s;
                a.push(n);
                b.push(h);
            }
        }
        HPolytope::new(a, b)
    }

    #[test]
    fn cube_vertices_and_volume() {
        let c = cube(1.0);
        assert_eq!(c.vertices().len(), 8);
        assert!((c.volume().unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn translated_cube_intersection_matches_product_formula() {
        let c = cube(1.0);
        let x = [0.5, -0.25, 1.5];
        let lens = c.intersect(&c.scaled_translated(1.0, &x));
        let expect: f64 = x.iter().map(|t| 2.0 - t.abs()).product();
        assert!((lens.volume().unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn coincident_planes_are_not_double_counted() {
        let c = cube(1.0);
        let lens = c.intersect(&c.scaled_translated(1.0, &[0.0, 0.0, 0.0]));
        assert!((lens.volume().unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn octahedron_volume() {
        let mut a = Vec::new();
        for s0 in [1.0, -1.0] {
            for s1 in [1.0, -1.0] {
                for s2 in [1.0, -1.0] {
                    a.push(vec![s0, s1, s2]);
                }
            }
        }
        let oct = HPolytope::new(a, vec![1.0; 8]);
        assert_eq!(oct.vertices().len(), 6);
        assert!((oct.volume().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_is_empty() {
        let c = cube(1.0);
        let far = c.intersect(&c.scaled_translated(1.0, &[3.0, 0.0, 0.0]));
        assert!(far.vertices().is_empty());
        assert_eq!(far.volume().unwrap(), 0.0);
    }
}
