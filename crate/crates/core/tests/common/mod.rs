#![allow(dead_code)]

use convgeom::Body;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rotation(t: f64) -> Vec<Vec<f64>> {
    vec![vec![t.cos(), -t.sin()], vec![t.sin(), t.cos()]]
}

/// A random smooth planar body: a rotated and stretched disk or p-ball with `2 <= p <= 5`.
pub fn smooth_planar(r: &mut ChaCha8Rng) -> Body {
    let a = r.random_range(0.6..1.6);
    let b = r.random_range(0.6..1.6);
    let t = r.random_range(0.0..std::f64::consts::PI);
    let rot = rotation(t);
    let m: Vec<Vec<f64>> = (0..2).map(|i| vec![rot[i][0] * a, rot[i][1] * b]).collect();
    let inner = if r.random_bool(0.5) {
        Body::ball(2, 1.0).unwrap()
    } else {
        Body::pball(r.random_range(2.0..5.0), vec![1.0, 1.0]).unwrap()
    };
    Body::linear(m, &inner).unwrap()
}

/// A random `x` with `||x||_K` strictly inside `(0, 1 + tau)`.
pub fn interior_translate(r: &mut ChaCha8Rng, body: &Body, tau: f64) -> Vec<f64> {
    let t = r.random_range(0.0..std::f64::consts::TAU);
    let g = r.random_range(0.15..0.85) * (1.0 + tau);
    let u = [t.cos(), t.sin()];
    let s = g / body.gauge(&u);
    vec![s * u[0], s * u[1]]
}

/// A random centrally symmetric convex hexagon, counterclockwise.
pub fn symmetric_hexagon(r: &mut ChaCha8Rng) -> Body {
    loop {
        let half: Vec<[f64; 2]> = (0..3)
            .map(|k| {
                let t = k as f64 + r.random_range(0.0..0.9);
                let s = r.random_range(0.7..1.3);
                [s * t.cos(), s * t.sin()]
            })
            .collect();
        let mut v = half.clone();
        v.extend(half.iter().map(|p| [-p[0], -p[1]]));
        if let Ok(b) = Body::polygon(v) {
            return b;
        }
    }
}

pub fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}
