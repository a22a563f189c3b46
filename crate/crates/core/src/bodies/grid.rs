use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::linalg::normalized;

/// Unit directions covering the sphere: equally spaced angles in 2D, subdivided
/// icosahedron vertices in 3D. Always contains `-u` with `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionGrid {
    pub dim: usize,
    /// Angle count in 2D, subdivision level in 3D.
    pub resolution: usize,
    pub units: Vec<Vec<f64>>,
    /// Triangles of the icosphere (3D only), counterclockwise seen from outside.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub triangles: Vec<[usize; 3]>,
}

impl DirectionGrid {
    /// `m` equally spaced directions, starting at `e1`. `m` must be even and >= 4.
    pub fn circle(m: usize) -> Result<Self> {
        if m < 4 || m % 2 != 0 {
            return Err(GeomError::Precondition(format!(
                "circle grid needs an even count >= 4, got {m}"
            )));
        }
        let units = (0..m)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
        Ok(Self {
            dim: 2,
            resolution: m,
            units,
            triangles: Vec::new(),
        })
    }

    /// Icosphere at the given subdivision level (`10 * 4^level + 2` vertices).
    pub fn icosphere(level: usize) -> Result<Self> {
        if level > 7 {
            return Err(GeomError::Precondition(format!("icosphere level {level} too large")));
        }
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let mut verts: Vec<Vec<f64>> = [
            [-1.0, phi, 0.0],
            [1.0, phi, 0.0],
            [-1.0, -phi, 0.0],
            [1.0, -phi, 0.0],
            [0.0, -1.0, phi],
            [0.0, 1.0, phi],
            [0.0, -1.0, -phi],
            [0.0, 1.0, -phi],
            [phi, 0.0, -1.0],
            [phi, 0.0, 1.0],
            [-phi, 0.0, -1.0],
            [-phi, 0.0, 1.0],
        ]
        .iter()
        .map(|v| normalized(v))
        .collect();
        let mut tris: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..level {
            let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
            let mut next = Vec::with_capacity(tris.len() * 4);
            let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Vec<f64>>| -> usize {
                let key = (a.min(b), a.max(b));
                *mid.entry(key).or_insert_with(|| {
                    let m: Vec<f64> = (0..3).map(|k| verts[a][k] + verts[b][k]).collect();
                    verts.push(normalized(&m));
                    verts.len() - 1
                })
            };
            for t in &tris {
                let ab = midpoint(t[0], t[1], &mut verts);
                let bc = midpoint(t[1], t[2], &mut verts);
                let ca = midpoint(t[2], t[0], &mut verts);
                next.push([t[0], ab, ca]);
                next.push([t[1], bc, ab]);
                next.push([t[2], ca, bc]);
                next.push([ab, bc, ca]);
            }
            tris = next;
        }
        Ok(Self {
            dim: 3,
            resolution: level,
            units: verts,
            triangles: tris,
        })
    }

    /// Default grid for the dimension: `m` angles in 2D, icosphere level `m` in 3D.
    pub fn for_dim(dim: usize, m: usize) -> Result<Self> {
        match dim {
            2 => Self::circle(m),
            3 => Self::icosphere(m),
            _ => Err(GeomError::Unsupported(format!("direction grids in dimension {dim}"))),
        }
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Index of `-units[i]`.
    pub fn antipode(&self, i: usize) -> usize {
        if self.dim == 2 {
            let m = self.units.len();
            return (i + m / 2) % m;
        }
        let u = &self.units[i];
        (0..self.units.len())
            .min_by(|&a, &b| {
                let da: f64 = self.units[a].iter().zip(u).map(|(x, y)| (x + y).powi(2)).sum();
                let db: f64 = self.units[b].iter().zip(u).map(|(x, y)| (x + y).powi(2)).sum();
                da.total_cmp(&db)
            })
            .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm;

    fn is_symmetric(g: &DirectionGrid) -> bool {
        g.units.iter().all(|u| {
            g.units
                .iter()
                .any(|w| u.iter().zip(w).all(|(a, b)| (a + b).abs() < 1e-12))
        })
    }

    #[test]
    fn circle_grid_is_unit_and_symmetric() {
        let g = DirectionGrid::circle(64).unwrap();
        assert_eq!(g.len(), 64);
        assert!(g.units.iter().all(|u| (norm(u) - 1.0).abs() < 1e-12));
        assert!(is_symmetric(&g));
        assert!(DirectionGrid::circle(7).is_err());
    }

    #[test]
    fn icosphere_counts() {
        for (level, count) in [(0, 12), (1, 42), (2, 162), (4, 2562)] {
            let g = DirectionGrid::icosphere(level).unwrap();
            assert_eq!(g.len(), count);
            assert_eq!(g.triangles.len(), 20 * 4usize.pow(level as u32));
            assert!(g.units.iter().all(|u| (norm(u) - 1.0).abs() < 1e-12));
        }
        assert!(is_symmetric(&DirectionGrid::icosphere(2).unwrap()));
    }

    #[test]
    fn antipode_index() {
        let g = DirectionGrid::icosphere(1).unwrap();
        for i in 0..g.len() {
            let j = g.antipode(i);
            assert!(g.units[i].iter().zip(&g.units[j]).all(|(a, b)| (a + b).abs() < 1e-12));
        }
    }
}
