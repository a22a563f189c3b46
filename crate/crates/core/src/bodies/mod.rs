//! Symmetric convex bodies with closed-form gauge, support, boundary and normal maps.
//!
//! Every body is centrally symmetric about the origin. Construction rejects inputs that
//! are not exactly symmetric; after that a [`Body`] is immutable and all queries are pure.

mod grid;
mod spec;

pub use grid::DirectionGrid;
pub use spec::BodySpec;

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::linalg::{dot, norm, normalized, Coords};
use crate::polytope::HPolytope;

/// Outer unit normal at a boundary point. `unique` is false at polytope vertices, where
/// the lowest-index active face is reported.
#[derive(Clone, Debug, PartialEq)]
pub struct Normal {
    pub vector: Vec<f64>,
    pub unique: bool,
}

#[derive(Clone, Debug)]
pub struct Body {
    dim: usize,
    kind: Kind,
    spec: BodySpec,
}

#[derive(Clone, Debug)]
enum Kind {
    /// `||x||^2 = <x, Q x>`
    Ellipsoid { q: DMatrix<f64>, q_inv: DMatrix<f64> },
    PBall { p: f64, scale: Vec<f64> },
    Polytope(Box<PolytopeData>),
    Linear(Box<LinearData>),
}

#[derive(Clone, Debug)]
struct PolytopeData {
    h: HPolytope,
    vertices: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
struct LinearData {
    m: DMatrix<f64>,
    m_inv: DMatrix<f64>,
    det_abs: f64,
    inner: Body,
}

impl PartialEq for Body {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

/// Volume of the k-dimensional Euclidean unit ball, via `w_k = 2 pi / k * w_{k-2}`.
pub fn ball_volume(k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / k as f64 * ball_volume(k - 2),
    }
}

fn mat_from_rows(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(GeomError::InvalidBody(format!("{what} must be a square matrix")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(GeomError::InvalidBody(format!("{what} has non-finite entries")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Coords {
    let n = m.nrows();
    (0..n)
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum())
        .collect()
}

fn mat_t_vec(m: &DMatrix<f64>, x: &[f64]) -> Coords {
    let n = m.ncols();
    (0..n)
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)] * x[i]).sum())
        .collect()
}

impl Body {
    pub fn from_spec(spec: &BodySpec) -> Result<Body> {
        let (dim, kind) = match spec {
            BodySpec::Ellipsoid { q } => {
                let q = mat_from_rows(q, "q")?;
                let n = q.nrows();
                let asym = (&q - q.transpose()).amax();
                if asym > 1e-12 * q.amax() {
                    return Err(GeomError::InvalidBody("q must be symmetric".into()));
                }
                let q = (&q + q.transpose()) * 0.5;
                let chol = q.clone().cholesky().ok_or_else(|| {
                    GeomError::InvalidBody("q must be positive definite".into())
                })?;
                (n, Kind::Ellipsoid { q_inv: chol.inverse(), q })
            }
            BodySpec::Pball { p, scale } => {
                if !(p.is_finite() && *p >= 1.0) {
                    return Err(GeomError::InvalidBody(format!("p must be finite and >= 1, got {p}")));
                }
                if scale.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
                    return Err(GeomError::InvalidBody("scales must be positive".into()));
                }
                let n = scale.len();
                if *p == 1.0 {
                    (n, Kind::Polytope(Box::new(cross_polytope(scale))))
                } else {
                    (n, Kind::PBall { p: *p, scale: scale.clone() })
                }
            }
            BodySpec::Polygon { vertices } => (2, Kind::Polytope(Box::new(polygon_data(vertices)?))),
            BodySpec::Halfspaces { a, b } => {
                let data = halfspace_data(a, b)?;
                (data.h.dim, Kind::Polytope(Box::new(data)))
            }
            BodySpec::Linear { m, inner } => {
                let inner = Body::from_spec(inner)?;
                let m = mat_from_rows(m, "m")?;
                if m.nrows() != inner.dim {
                    return Err(GeomError::InvalidBody(format!(
                        "m is {}x{} but the inner body has dimension {}",
                        m.nrows(),
                        m.nrows(),
                        inner.dim
                    )));
                }
                let det = m.determinant();
                if !(det.abs() > 1e-14 * m.amax().powi(m.nrows() as i32)) {
                    return Err(GeomError::InvalidBody("m must be invertible".into()));
                }
                let m_inv = m
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| GeomError::InvalidBody("m must be invertible".into()))?;
                let n = m.nrows();
                (
                    n,
                    Kind::Linear(Box::new(LinearData {
                        m,
                        m_inv,
                        det_abs: det.abs(),
                        inner,
                    })),
                )
            }
        };
        if dim < 2 {
            return Err(GeomError::InvalidBody(format!("dimension must be >= 2, got {dim}")));
        }
        Ok(Body {
            dim,
            kind,
            spec: spec.clone(),
        })
    }

    /// Euclidean ball of radius `r`.
    pub fn ball(dim: usize, r: f64) -> Result<Body> {
        Self::ellipsoid_semiaxes(&vec![r; dim])
    }

    /// Axis-aligned ellipsoid with the given semi-axes.
    pub fn ellipsoid_semiaxes(semiaxes: &[f64]) -> Result<Body> {
        let n = semiaxes.len();
        let q = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 1.0 / (semiaxes[i] * semiaxes[i]) } else { 0.0 })
                    .collect()
            })
            .collect();
        Self::ellipsoid(q)
    }

    pub fn ellipsoid(q: Vec<Vec<f64>>) -> Result<Body> {
        Self::from_spec(&BodySpec::Ellipsoid { q })
    }

    pub fn pball(p: f64, scale: Vec<f64>) -> Result<Body> {
        Self::from_spec(&BodySpec::Pball { p, scale })
    }

    /// Convex polygon given by counterclockwise vertices in antipodal pairs
    /// (`v[i + n/2] == -v[i]`).
    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Body> {
        Self::from_spec(&BodySpec::Polygon { vertices })
    }

    /// Closed square `[-h, h]^2` as a polygon.
    pub fn square(h: f64) -> Result<Body> {
        Self::polygon(vec![[h, -h], [h, h], [-h, h], [-h, -h]])
    }

    pub fn halfspaces(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Body> {
        Self::from_spec(&BodySpec::Halfspaces { a, b })
    }

    /// Cube `[-h, h]^dim` as a halfspace list.
    pub fn cube(dim: usize, h: f64) -> Result<Body> {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for k in 0..dim {
            for s in [1.0, -1.0] {
                let mut n = vec![0.0; dim];
                n[k] = s;
                a.push(n);
                b.push(h);
            }
        }
        Self::halfspaces(a, b)
    }

    /// The image `M K`.
    pub fn linear(m: Vec<Vec<f64>>, inner: &Body) -> Result<Body> {
        Self::from_spec(&BodySpec::Linear {
            m,
            inner: Box::new(inner.spec.clone()),
        })
    }

    /// `t K` for `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Body> {
        let n = self.dim;
        let m = (0..n)
            .map(|i| (0..n).map(|j| if i == j { t } else { 0.0 }).collect())
            .collect();
        Self::linear(m, self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spec(&self) -> &BodySpec {
        &self.spec
    }

    /// True for kinds whose boundary is C^1 and strictly convex.
    pub fn is_smooth(&self) -> bool {
        match &self.kind {
            Kind::Ellipsoid { .. } | Kind::PBall { .. } => true,
            Kind::Polytope(_) => false,
            Kind::Linear(l) => l.inner.is_smooth(),
        }
    }

    pub fn is_polytope(&self) -> bool {
        match &self.kind {
            Kind::Polytope(_) => true,
            Kind::Linear(l) => l.inner.is_polytope(),
            _ => false,
        }
    }

    /// Halfspace description, for polytope kinds (linear images are pushed through).
    pub fn as_hpolytope(&self) -> Option<HPolytope> {
        match &self.kind {
            Kind::Polytope(p) => Some(p.h.clone()),
            Kind::Linear(l) => {
                let inner = l.inner.as_hpolytope()?;
                let normals = inner
                    .normals
                    .iter()
                    .map(|a| mat_t_vec(&l.m_inv, a).to_vec())
                    .collect();
                Some(HPolytope::new(normals, inner.offsets))
            }
            _ => None,
        }
    }

    /// Vertices, for polytope kinds.
    pub fn polytope_vertices(&self) -> Option<Vec<Vec<f64>>> {
        match &self.kind {
            Kind::Polytope(p) => Some(p.vertices.clone()),
            Kind::Linear(l) => Some(
                l.inner
                    .polytope_vertices()?
                    .iter()
                    .map(|v| mat_vec(&l.m, v).to_vec())
                    .collect(),
            ),
            _ => None,
        }
    }

    /// The Minkowski functional `||x||_K`.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        match &self.kind {
            Kind::Ellipsoid { q, .. } => {
                let s: f64 = q
                    .as_slice()
                    .chunks_exact(self.dim)
                    .zip(x)
                    .map(|(col, xj)| xj * col.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
                    .sum();
                s.max(0.0).sqrt()
            }
            Kind::PBall { p, scale } => {
                let m = x
                    .iter()
                    .zip(scale)
                    .map(|(xi, s)| (xi / s).abs())
                    .fold(0.0, f64::max);
                if m == 0.0 {
                    return 0.0;
                }
                let s: f64 = x
                    .iter()
                    .zip(scale)
                    .map(|(xi, si)| ((xi / si).abs() / m).powf(*p))
                    .sum();
                m * s.powf(1.0 / p)
            }
            Kind::Polytope(poly) => poly
                .h
                .normals
                .iter()
                .zip(&poly.h.offsets)
                .map(|(a, b)| dot(a, x) / b)
                .fold(0.0, f64::max),
            Kind::Linear(l) => l.inner.gauge(&mat_vec(&l.m_inv, x)),
        }
    }

    /// `||x||_K <= 1`, without the square root for ellipsoids.
    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.kind {
            Kind::Ellipsoid { q, .. } if self.dim == 2 => {
                let q = q.as_slice();
                x[0] * (q[0] * x[0] + 2.0 * q[1] * x[1]) + q[3] * x[1] * x[1] <= 1.0
            }
            Kind::Ellipsoid { q, .. } => {
                let s: f64 = q
                    .as_slice()
                    .chunks_exact(self.dim)
                    .zip(x)
                    .map(|(col, xj)| xj * col.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
                    .sum();
                s <= 1.0
            }
            _ => self.gauge(x) <= 1.0,
        }
    }

    /// Support function `h_K(u) = sup <y, u>` over `K`.
    pub fn support(&self, u: &[f64]) -> f64 {
        match &self.kind {
            Kind::Ellipsoid { q_inv, .. } => {
                let n = self.dim;
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += u[i] * q_inv[(i, j)] * u[j];
                    }
                }
                s.max(0.0).sqrt()
            }
            Kind::PBall { p, scale } => {
                let qexp = p / (p - 1.0);
                let v: Coords = u.iter().zip(scale).map(|(ui, si)| (ui * si).abs()).collect();
                let m = v.iter().copied().fold(0.0, f64::max);
                if m == 0.0 {
                    return 0.0;
                }
                m * v.iter().map(|vi| (vi / m).powf(qexp)).sum::<f64>().powf(1.0 / qexp)
            }
            Kind::Polytope(poly) => poly
                .vertices
                .iter()
                .map(|v| dot(v, u))
                .fold(f64::NEG_INFINITY, f64::max),
            Kind::Linear(l) => l.inner.support(&mat_t_vec(&l.m, u)),
        }
    }

    /// The point of the boundary where `u` is an outer normal. For polytopes the
    /// maximizing vertex with the lowest index is returned.
    pub fn boundary_point(&self, u: &[f64]) -> Vec<f64> {
        match &self.kind {
            Kind::Ellipsoid { q_inv, .. } => {
                let y = mat_vec(q_inv, u);
                let h = dot(&y, u).sqrt();
                y.iter().map(|v| v / h).collect()
            }
            Kind::PBall { p, scale } => {
                let qexp = p / (p - 1.0);
                let h = self.support(u);
                u.iter()
                    .zip(scale)
                    .map(|(ui, si)| {
                        let v = ui * si;
                        si * v.signum() * (v.abs() / h).powf(qexp - 1.0)
                    })
                    .collect()
            }
            Kind::Polytope(poly) => {
                let mut best = 0;
                let mut best_val = f64::NEG_INFINITY;
                let scale = norm(u) * poly.vertices.iter().map(|v| norm(v)).fold(0.0, f64::max);
                for (i, v) in poly.vertices.iter().enumerate() {
                    let d = dot(v, u);
                    if d > best_val + 1e-13 * scale {
                        best = i;
                        best_val = d;
                    }
                }
                poly.vertices[best].clone()
            }
            Kind::Linear(l) => {
                let y = l.inner.boundary_point(&mat_t_vec(&l.m, u));
                mat_vec(&l.m, &y).to_vec()
            }
        }
    }

    /// Point of the boundary on the ray through `dir`.
    pub fn radial_point(&self, dir: &[f64]) -> Vec<f64> {
        let g = self.gauge(dir);
        dir.iter().map(|v| v / g).collect()
    }

    /// Outer unit normal at the boundary point `y`.
    pub fn outer_normal(&self, y: &[f64]) -> Normal {
        if let Some(g) = self.gauge_gradient(y) {
            return Normal {
                vector: normalized(&g),
                unique: true,
            };
        }
        // polytope: active faces; ties go to the lowest face index
        let h = self.as_hpolytope().expect("non-smooth bodies are polytopes");
        let g = self.gauge(y);
        let ratios: Vec<f64> = h
            .normals
            .iter()
            .zip(&h.offsets)
            .map(|(a, b)| dot(a, y) / b)
            .collect();
        let tol = 1e-9 * g.max(1e-300);
        let active: Vec<usize> = (0..ratios.len()).filter(|&i| ratios[i] >= g - tol).collect();
        let first = active[0];
        let vector = normalized(&h.normals[first]);
        let unique = active
            .iter()
            .all(|&i| norm(&crate::linalg::sub(&normalized(&h.normals[i]), &vector)) < 1e-12);
        Normal { vector, unique }
    }

    /// Gradient of the gauge at `x != 0`; `None` for polytope kinds.
    pub fn gauge_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        match &self.kind {
            Kind::Ellipsoid { q, .. } => {
                let qx = mat_vec(q, x);
                let g = dot(x, &qx).sqrt();
                Some(qx.iter().map(|v| v / g).collect())
            }
            Kind::PBall { p, scale } => {
                let g = self.gauge(x);
                Some(
                    x.iter()
                        .zip(scale)
                        .map(|(xi, si)| {
                            let w = (xi / si).abs() / g;
                            xi.signum() * w.powf(p - 1.0) / si
                        })
                        .collect(),
                )
            }
            Kind::Polytope(_) => None,
            Kind::Linear(l) => {
                let gi = l.inner.gauge_gradient(&mat_vec(&l.m_inv, x))?;
                Some(mat_t_vec(&l.m_inv, &gi).to_vec())
            }
        }
    }

    /// Hessian of the gauge at `x != 0`; `None` for polytope kinds.
    pub fn gauge_hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let n = self.dim;
        match &self.kind {
            Kind::Ellipsoid { q, .. } => {
                let qx = mat_vec(q, x);
                let g = dot(x, &qx).sqrt();
                Some(DMatrix::from_fn(n, n, |i, j| {
                    q[(i, j)] / g - qx[i] * qx[j] / (g * g * g)
                }))
            }
            Kind::PBall { p, scale } => {
                let g = self.gauge(x);
                let grad = self.gauge_gradient(x)?;
                Some(DMatrix::from_fn(n, n, |i, j| {
                    let diag = if i == j {
                        let w = (x[i] / scale[i]).abs() / g;
                        w.powf(p - 2.0) / (g * scale[i] * scale[i])
                    } else {
                        0.0
                    };
                    (p - 1.0) * (diag - grad[i] * grad[j] / g)
                }))
            }
            Kind::Polytope(_) => None,
            Kind::Linear(l) => {
                let hi = l.inner.gauge_hessian(&mat_vec(&l.m_inv, x))?;
                Some(l.m_inv.transpose() * hi * &l.m_inv)
            }
        }
    }

    /// Gauss-Kronecker curvature at the boundary point `y` from the bordered Hessian of
    /// the gauge. `None` ("unavailable") for polytope kinds; `+inf` where a p-ball with
    /// `p < 2` has a curvature singularity.
    pub fn analytic_curvature(&self, y: &[f64]) -> Option<f64> {
        let grad = self.gauge_gradient(y)?;
        let hess = self.gauge_hessian(y)?;
        let n = self.dim;
        if hess.iter().any(|v| v.is_infinite()) {
            return Some(f64::INFINITY);
        }
        let mut border = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                border[(i, j)] = hess[(i, j)];
            }
            border[(i, n)] = grad[i];
            border[(n, i)] = grad[i];
        }
        let k = -border.determinant() / norm(&grad).powi(n as i32 + 1);
        Some(k.max(0.0))
    }

    /// The interval `{t : y + t u ∈ K}`, or `None` when the line misses `K`.
    pub fn chord(&self, y: &[f64], u: &[f64]) -> Option<(f64, f64)> {
        match &self.kind {
            Kind::Ellipsoid { q, .. } => {
                let qu = mat_vec(q, u);
                let a = dot(u, &qu);
                let b = dot(y, &qu);
                let c = dot(y, &mat_vec(q, y)) - 1.0;
                let disc = b * b - a * c;
                if disc < 0.0 {
                    return None;
                }
                let s = disc.sqrt();
                let qq = -(b + if b >= 0.0 { s } else { -s });
                if qq == 0.0 {
                    return Some((0.0, 0.0));
                }
                let (t1, t2) = (qq / a, c / qq);
                Some((t1.min(t2), t1.max(t2)))
            }
            Kind::Polytope(p) => {
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for (a, b) in p.h.normals.iter().zip(&p.h.offsets) {
                    let au = dot(a, u);
                    let r = b - dot(a, y);
                    if au.abs() <= 1e-300 {
                        if r < 0.0 {
                            return None;
                        }
                    } else if au > 0.0 {
                        hi = hi.min(r / au);
                    } else {
                        lo = lo.max(r / au);
                    }
                }
                (lo <= hi).then_some((lo, hi))
            }
            Kind::Linear(l) => l.inner.chord(&mat_vec(&l.m_inv, y), &mat_vec(&l.m_inv, u)),
            Kind::PBall { .. } => self.chord_numeric(y, u),
        }
    }

    fn chord_numeric(&self, y: &[f64], u: &[f64]) -> Option<(f64, f64)> {
        let uu = dot(u, u);
        let r = norm(&self.bounding_half_widths());
        let t0 = -dot(y, u) / uu;
        let half = r / uu.sqrt() * 1.01 + 1e-12;
        let g = |t: f64| {
            let p: Coords = y.iter().zip(u).map(|(a, b)| a + t * b).collect();
            self.gauge(&p)
        };
        let (mut a, mut c) = (t0 - half, t0 + half);
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = c - ratio * (c - a);
        let mut x2 = a + ratio * (c - a);
        let (mut f1, mut f2) = (g(x1), g(x2));
        for _ in 0..120 {
            if f1 <= f2 {
                c = x2;
                x2 = x1;
                f2 = f1;
                x1 = c - ratio * (c - a);
                f1 = g(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + ratio * (c - a);
                f2 = g(x2);
            }
            if c - a <= 1e-15 * (1.0 + c.abs()) {
                break;
            }
        }
        let tmin = 0.5 * (a + c);
        if g(tmin) > 1.0 {
            return None;
        }
        let root = |mut inside: f64, mut outside: f64| {
            for _ in 0..200 {
                let mid = 0.5 * (inside + outside);
                if mid == inside || mid == outside {
                    break;
                }
                if g(mid) <= 1.0 {
                    inside = mid;
                } else {
                    outside = mid;
                }
            }
            inside
        };
        Some((root(tmin, t0 - half), root(tmin, t0 + half)))
    }

    /// Half-widths of the axis-aligned bounding box, `h_K(e_i)`.
    pub fn bounding_half_widths(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.support(&crate::linalg::unit(self.dim, i)))
            .collect()
    }

    /// Volume when a closed form is available (ellipsoids, 2D/3D polytopes, and their
    /// linear images).
    pub fn closed_form_volume(&self) -> Option<f64> {
        match &self.kind {
            Kind::Ellipsoid { q, .. } => Some(ball_volume(self.dim) / q.determinant().sqrt()),
            Kind::PBall { .. } => None,
            Kind::Polytope(p) => p.h.volume(),
            Kind::Linear(l) => Some(l.det_abs * l.inner.closed_form_volume()?),
        }
    }

    /// `|det M|` accumulated over nested linear images (1 for plain kinds).
    pub fn linear_det(&self) -> f64 {
        match &self.kind {
            Kind::Linear(l) => l.det_abs * l.inner.linear_det(),
            _ => 1.0,
        }
    }
}

fn cross_polytope(scale: &[f64]) -> PolytopeData {
    let n = scale.len();
    let mut a = Vec::with_capacity(1 << n);
    for mask in 0..(1usize << n) {
        a.push(
            (0..n)
                .map(|i| if mask & (1 << i) != 0 { -1.0 / scale[i] } else { 1.0 / scale[i] })
                .collect(),
        );
    }
    let h = HPolytope::new(a, vec![1.0; 1 << n]);
    let mut vertices = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; n];
            v[i] = s * scale[i];
            vertices.push(v);
        }
    }
    PolytopeData { h, vertices }
}

fn polygon_data(vertices: &[[f64; 2]]) -> Result<PolytopeData> {
    let n = vertices.len();
    if n < 4 || n % 2 != 0 {
        return Err(GeomError::InvalidBody(format!(
            "a symmetric polygon needs an even number (>= 4) of vertices, got {n}"
        )));
    }
    if vertices.iter().flatten().any(|v| !v.is_finite()) {
        return Err(GeomError::InvalidBody("non-finite vertex".into()));
    }
    for i in 0..n / 2 {
        let (v, w) = (vertices[i], vertices[i + n / 2]);
        if w[0] != -v[0] || w[1] != -v[1] {
            return Err(GeomError::InvalidBody(format!(
                "vertex {} must be the exact negation of vertex {i}",
                i + n / 2
            )));
        }
    }
    let mut turning = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let c = vertices[(i + 2) % n];
        let e1 = [b[0] - a[0], b[1] - a[1]];
        let e2 = [c[0] - b[0], c[1] - b[1]];
        let cr = crate::linalg::cross2(e1, e2);
        if !(cr > 0.0) {
            return Err(GeomError::InvalidBody(format!(
                "vertices must be strictly convex and counterclockwise (turn at vertex {})",
                (i + 1) % n
            )));
        }
        turning += cr.atan2(e1[0] * e2[0] + e1[1] * e2[1]);
    }
    if (turning - 2.0 * std::f64::consts::PI).abs() > 1e-6 {
        return Err(GeomError::InvalidBody("vertex list winds more than once".into()));
    }
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        let normal = vec![q[1] - p[1], p[0] - q[0]];
        b.push(normal[0] * p[0] + normal[1] * p[1]);
        a.push(normal);
    }
    Ok(PolytopeData {
        h: HPolytope::new(a, b),
        vertices: vertices.iter().map(|v| v.to_vec()).collect(),
    })
}

fn halfspace_data(a: &[Vec<f64>], b: &[f64]) -> Result<PolytopeData> {
    if a.is_empty() || a.len() != b.len() {
        return Err(GeomError::InvalidBody("a and b must be non-empty and of equal length".into()));
    }
    let n = a[0].len();
    if a.iter().any(|r| r.len() != n) {
        return Err(GeomError::InvalidBody("all normals must have the same dimension".into()));
    }
    if a.iter().flatten().chain(b).any(|v| !v.is_finite()) {
        return Err(GeomError::InvalidBody("non-finite halfspace data".into()));
    }
    if b.iter().any(|v| !(*v > 0.0)) {
        return Err(GeomError::InvalidBody("offsets must be positive (origin interior)".into()));
    }
    if a.iter().any(|r| r.iter().all(|v| *v == 0.0)) {
        return Err(GeomError::InvalidBody("zero normal".into()));
    }
    // exact +/- pairing as a multiset
    let mut used = vec![false; a.len()];
    for i in 0..a.len() {
        if used[i] {
            continue;
        }
        let partner = (0..a.len()).find(|&j| {
            !used[j] && j != i && b[j] == b[i] && a[j].iter().zip(&a[i]).all(|(x, y)| *x == -*y)
        });
        match partner {
            Some(j) => {
                used[i] = true;
                used[j] = true;
            }
            None => {
                return Err(GeomError::InvalidBody(format!(
                    "halfspace {i} has no exact antipodal partner (-a, b)"
                )))
            }
        }
    }
    let rank = DMatrix::from_fn(a.len(), n, |i, j| a[i][j]).rank(1e-12);
    if rank < n {
        return Err(GeomError::InvalidBody("halfspace list is unbounded".into()));
    }
    let h = HPolytope::new(a.to_vec(), b.to_vec());
    let vertices = h.vertices();
    Ok(PolytopeData { h, vertices })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn gauge_examples() {
        let disk = Body::ball(2, 1.0).unwrap();
        assert!(close(disk.gauge(&[3.0, 4.0]), 5.0, 1e-14));
        let sq = Body::square(1.0).unwrap();
        assert!(close(sq.gauge(&[0.5, 1.0]), 1.0, 1e-14));
        let ell = Body::ellipsoid_semiaxes(&[2.0, 1.0]).unwrap();
        assert!(close(ell.gauge(&[2.0, 0.0]), 1.0, 1e-14));
    }

    #[test]
    fn support_examples() {
        let disk = Body::ball(2, 1.0).unwrap();
        assert!(close(disk.support(&[0.0, 2.0]), 2.0, 1e-14));
        let sq = Body::square(1.0).unwrap();
        assert!(close(sq.support(&[1.0, 1.0]), 2.0, 1e-14));
        let ell = Body::ellipsoid_semiaxes(&[2.0, 1.0]).unwrap();
        assert!(close(ell.support(&[1.0, 0.0]), 2.0, 1e-14));
    }

    #[test]
    fn boundary_and_normal_examples() {
        let disk = Body::ball(2, 1.0).unwrap();
        let y = disk.boundary_point(&[0.0, 1.0]);
        assert!(close(y[0], 0.0, 1e-14) && close(y[1], 1.0, 1e-14));
        let n = disk.outer_normal(&y);
        assert!(n.unique && close(n.vector[1], 1.0, 1e-14));
        let ell = Body::ellipsoid_semiaxes(&[2.0, 1.0]).unwrap();
        let y = ell.boundary_point(&[1.0, 0.0]);
        assert!(close(y[0], 2.0, 1e-14) && close(y[1], 0.0, 1e-14));
        let p4 = Body::pball(4.0, vec![1.0, 1.0]).unwrap();
        let n = p4.outer_normal(&[1.0, 0.0]);
        assert!(close(n.vector[0], 1.0, 1e-14) && close(n.vector[1], 0.0, 1e-14));
    }

    #[test]
    fn polytope_vertex_normal_is_flagged() {
        let sq = Body::square(1.0).unwrap();
        let n = sq.outer_normal(&[1.0, 1.0]);
        assert!(!n.unique);
        // lowest face index: edge from (1,-1) to (1,1), normal +e1
        assert!(close(n.vector[0], 1.0, 1e-14));
        let n = sq.outer_normal(&[1.0, 0.3]);
        assert!(n.unique);
    }

    #[test]
    fn analytic_curvature_examples() {
        let disk = Body::ball(2, 1.0).unwrap();
        let y = disk.radial_point(&[0.6, 0.8]);
        assert!(close(disk.analytic_curvature(&y).unwrap(), 1.0, 1e-12));
        let ell = Body::ellipsoid_semiaxes(&[2.0, 1.0]).unwrap();
        assert!(close(ell.analytic_curvature(&[2.0, 0.0]).unwrap(), 2.0, 1e-12));
        assert!(close(ell.analytic_curvature(&[0.0, 1.0]).unwrap(), 0.25, 1e-12));
        let sphere = Body::ball(3, 2.0).unwrap();
        let y = sphere.radial_point(&[1.0, 2.0, -0.5]);
        assert!(close(sphere.analytic_curvature(&y).unwrap(), 0.25, 1e-12));
        let p4 = Body::pball(4.0, vec![1.0, 1.0]).unwrap();
        assert!(close(p4.analytic_curvature(&[1.0, 0.0]).unwrap(), 0.0, 1e-14));
        assert!(Body::square(1.0).unwrap().analytic_curvature(&[1.0, 0.0]).is_none());
    }

    #[test]
    fn ellipse_curvature_off_axis_matches_parametric_formula() {
        // kappa = ab / (a^2 sin^2 t + b^2 cos^2 t)^{3/2} at (a cos t, b sin t)
        let (a, b) = (2.0, 1.0);
        let ell = Body::ellipsoid_semiaxes(&[a, b]).unwrap();
        for t in [0.3f64, 1.1, 2.5] {
            let y = [a * t.cos(), b * t.sin()];
            let expect = a * b / (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).powf(1.5);
            assert!(close(ell.analytic_curvature(&y).unwrap(), expect, 1e-12));
        }
    }

    #[test]
    fn linear_image_matches_ellipsoid() {
        let disk = Body::ball(2, 1.0).unwrap();
        let img = Body::linear(vec![vec![2.0, 0.0], vec![0.0, 1.0]], &disk).unwrap();
        let ell = Body::ellipsoid_semiaxes(&[2.0, 1.0]).unwrap();
        for x in [[0.3, 0.7], [-1.5, 0.2], [2.0, -1.0]] {
            assert!(close(img.gauge(&x), ell.gauge(&x), 1e-14));
            assert!(close(img.support(&x), ell.support(&x), 1e-14));
            let yi = img.boundary_point(&x);
            let ye = ell.boundary_point(&x);
            assert!(close(yi[0], ye[0], 1e-13) && close(yi[1], ye[1], 1e-13));
            assert!(close(
                img.analytic_curvature(&yi).unwrap(),
                ell.analytic_curvature(&ye).unwrap(),
                1e-12
            ));
        }
        assert!(close(img.closed_form_volume().unwrap(), 2.0 * std::f64::consts::PI, 1e-12));
    }

    #[test]
    fn rejects_asymmetric_inputs() {
        assert!(Body::polygon(vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.1]]).is_err());
        assert!(Body::halfspaces(vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]], vec![1.0, 1.0, 1.0]).is_err());
        assert!(Body::halfspaces(
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            vec![1.0, 1.0, 1.0, 2.0]
        )
        .is_err());
        assert!(Body::ellipsoid(vec![vec![1.0, 0.0], vec![0.0, -1.0]]).is_err());
        assert!(Body::linear(vec![vec![1.0, 2.0], vec![2.0, 4.0]], &Body::ball(2, 1.0).unwrap()).is_err());
        // clockwise order
        assert!(Body::polygon(vec![[1.0, 1.0], [1.0, -1.0], [-1.0, -1.0], [-1.0, 1.0]]).is_err());
    }

    #[test]
    fn pball_p1_is_cross_polytope() {
        let b = Body::pball(1.0, vec![1.0, 2.0]).unwrap();
        assert!(b.is_polytope());
        assert!(close(b.gauge(&[0.5, 1.0]), 1.0, 1e-14));
        assert!(close(b.closed_form_volume().unwrap(), 4.0, 1e-12));
    }

    #[test]
    fn chords() {
        let disk = Body::ball(2, 1.0).unwrap();
        let (a, b) = disk.chord(&[0.0, 0.6], &[1.0, 0.0]).unwrap();
        assert!(close(a, -0.8, 1e-14) && close(b, 0.8, 1e-14));
        assert!(disk.chord(&[0.0, 1.5], &[1.0, 0.0]).is_none());
        let sq = Body::square(1.0).unwrap();
        let (a, b) = sq.chord(&[0.3, 0.5], &[1.0, 0.0]).unwrap();
        assert!(close(a, -1.3, 1e-14) && close(b, 0.7, 1e-14));
        let p4 = Body::pball(4.0, vec![1.0, 1.0]).unwrap();
        let (a, b) = p4.chord(&[0.0, 0.5], &[1.0, 0.0]).unwrap();
        let x = (1.0f64 - 0.0625).powf(0.25);
        assert!(close(a, -x, 1e-13) && close(b, x, 1e-13));
        let ell = Body::linear(vec![vec![2.0, 0.0], vec![0.0, 1.0]], &disk).unwrap();
        let (a, b) = ell.chord(&[0.0, 0.6], &[1.0, 0.0]).unwrap();
        assert!(close(a, -1.6, 1e-14) && close(b, 1.6, 1e-14));
    }

    #[test]
    fn ball_volumes() {
        assert!(close(ball_volume(2), std::f64::consts::PI, 1e-15));
        assert!(close(ball_volume(3), 4.0 / 3.0 * std::f64::consts::PI, 1e-15));
        assert!(close(ball_volume(4), std::f64::consts::PI.powi(2) / 2.0, 1e-15));
    }
}
