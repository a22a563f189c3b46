mod common;

use convgeom::calculus::{grad_f, hessian_f};
use convgeom::volume::{body_volume, intersection_volume, Field, Method};
use convgeom::{Body, BodySpec, TranslateProblem, VolumeOptions};
use proptest::prelude::*;

fn exact() -> VolumeOptions {
    VolumeOptions {
        method: Method::Exact,
        tol: 1e-7,
        ..VolumeOptions::default()
    }
}

fn planar_body() -> impl Strategy<Value = Body> {
    (any::<u64>(), 0..3u8).prop_map(|(seed, kind)| {
        let mut r = common::rng(seed);
        match kind {
            0 => common::symmetric_hexagon(&mut r),
            _ => common::smooth_planar(&mut r),
        }
    })
}

fn translate() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0..std::f64::consts::TAU, 0.05..0.95f64, 0.4..2.5f64)
}

/// `x` at gauge fraction `g` of the support radius `1 + tau`, in direction `t`.
fn point(body: &Body, t: f64, g: f64, tau: f64) -> Vec<f64> {
    let u = [t.cos(), t.sin()];
    let s = g * (1.0 + tau) / body.gauge(&u);
    vec![s * u[0], s * u[1]]
}

fn value(body: &Body, tau: f64, x: Vec<f64>) -> (f64, f64) {
    let e = intersection_volume(&TranslateProblem::new(body.clone(), tau, x).unwrap(), &exact()).unwrap();
    (e.value, e.abs_error)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn field_is_even(body in planar_body(), (t, g, tau) in translate()) {
        let x = point(&body, t, g, tau);
        let (a, ea) = value(&body, tau, x.clone());
        let (b, eb) = value(&body, tau, vec![-x[0], -x[1]]);
        prop_assert!((a - b).abs() <= ea + eb);
    }

    #[test]
    fn field_decreases_along_rays(body in planar_body(), (t, g, tau) in translate(), shrink in 0.1..0.9f64) {
        let far = point(&body, t, g, tau);
        let near = vec![shrink * far[0], shrink * far[1]];
        let (a, ea) = value(&body, tau, near);
        let (b, eb) = value(&body, tau, far);
        prop_assert!(a + ea + eb >= b);
    }

    #[test]
    fn field_is_bounded_by_the_smaller_body(body in planar_body(), (t, g, tau) in translate()) {
        let (v, e) = value(&body, tau, point(&body, t, g, tau));
        let k = body_volume(&body, &exact()).unwrap().value;
        prop_assert!(v <= tau.min(1.0).powi(2) * k + e + 1e-9);
    }

    #[test]
    fn exchanging_the_bodies_rescales(body in planar_body(), (t, g, tau) in translate()) {
        // |K ∩ (x + tau K)| = tau^n |K ∩ (x / tau + K / tau)|
        let x = point(&body, t, g, tau);
        let (a, ea) = value(&body, tau, x.clone());
        let (b, eb) = value(&body, 1.0 / tau, vec![x[0] / tau, x[1] / tau]);
        prop_assert!((a - tau * tau * b).abs() <= ea + tau * tau * eb);
    }

    #[test]
    fn linear_maps_scale_the_field(body in planar_body(), (t, g, tau) in translate(), m in prop::array::uniform4(-2.0..2.0f64)) {
        let det = m[0] * m[3] - m[1] * m[2];
        prop_assume!(det.abs() > 0.3);
        let rows = vec![vec![m[0], m[1]], vec![m[2], m[3]]];
        let image = Body::linear(rows, &body).unwrap();
        let x = point(&body, t, g, tau);
        let mx = vec![m[0] * x[0] + m[1] * x[1], m[2] * x[0] + m[3] * x[1]];
        let (a, ea) = value(&body, tau, x);
        let (b, eb) = value(&image, tau, mx);
        prop_assert!((b - det.abs() * a).abs() <= eb + det.abs() * ea + 1e-9);
    }

    #[test]
    fn gauge_and_support_are_dual(body in planar_body(), t in 0.0..std::f64::consts::TAU, s in 0.0..std::f64::consts::TAU) {
        let x = [t.cos(), t.sin()];
        let u = [s.cos(), s.sin()];
        let lhs = x[0] * u[0] + x[1] * u[1];
        prop_assert!(lhs <= body.gauge(&x) * body.support(&u) * (1.0 + 1e-12) + 1e-12);
        let b = body.boundary_point(&u);
        prop_assert!((b[0] * u[0] + b[1] * u[1] - body.support(&u)).abs() <= 1e-9 * body.support(&u));
    }

    #[test]
    fn body_specs_round_trip(body in planar_body()) {
        let spec = body.spec().clone();
        let text = spec.to_json();
        let back = BodySpec::from_json(&text).unwrap();
        prop_assert_eq!(&back, &spec);
        let rebuilt = Body::from_spec(&back).unwrap();
        prop_assert_eq!(rebuilt.spec(), &spec);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn gradient_forms_agree_and_are_odd(seed in any::<u64>(), (t, g, tau) in translate()) {
        let body = common::smooth_planar(&mut common::rng(seed));
        let x = point(&body, t, g.clamp(0.1, 0.9), tau);
        let p = TranslateProblem::new(body.clone(), tau, x.clone()).unwrap();
        let r = grad_f(&p, 2048).unwrap();
        let scale = r.gradient.iter().map(|v| v.abs()).fold(1e-3, f64::max);
        prop_assert!(r.agreement <= 1e-6 * scale);
        let back = grad_f(&p.at(vec![-x[0], -x[1]]), 2048).unwrap();
        for i in 0..2 {
            prop_assert!((r.gradient[i] + back.gradient[i]).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn hessian_is_symmetric_and_field_is_log_concave_along_x(seed in any::<u64>(), (t, g, tau) in translate()) {
        let body = common::smooth_planar(&mut common::rng(seed));
        let x = point(&body, t, g.clamp(0.1, 0.9), tau);
        let p = TranslateProblem::new(body.clone(), tau, x.clone()).unwrap();
        let h = hessian_f(&p, 2048).unwrap().matrix;
        prop_assert_eq!(h[0][1], h[1][0]);
        // (log F)'' <= 0 along x: F F'' <= (F')^2
        let field = Field::new(&body, tau, &exact()).unwrap();
        let f = field.at(&x).unwrap().value;
        let gx = grad_f(&p, 2048).unwrap().gradient;
        let n = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let u = [x[0] / n, x[1] / n];
        let d1 = gx[0] * u[0] + gx[1] * u[1];
        let d2 = u[0] * (h[0][0] * u[0] + h[0][1] * u[1]) + u[1] * (h[1][0] * u[0] + h[1][1] * u[1]);
        prop_assert!(f * d2 <= d1 * d1 * (1.0 + 1e-6) + 1e-9);
    }
}
