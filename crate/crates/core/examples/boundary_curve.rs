//! The boundary intersection `∂K ∩ ∂(x + tau K)` for a pair of balls and an ellipsoid.
use convgeom::calculus::boundary_intersection;
use convgeom::{Body, TranslateProblem};

fn main() -> convgeom::Result<()> {
    let ball = Body::ball(3, 1.0)?;
    let p = TranslateProblem::new(ball, 1.0, vec![1.0, 0.0, 0.0])?;
    let c = boundary_intersection(&p, 400)?;
    println!("balls: {} points, length {:.8} (circle of radius sqrt(3)/2: {:.8}), max <M,N> {:.6}", c.points.len(), c.measure, 3f64.sqrt() * std::f64::consts::PI, c.max_cos());

    let e = Body::ellipsoid_semiaxes(&[1.5, 1.0, 0.7])?;
    let p = TranslateProblem::new(e, 0.8, vec![0.6, 0.5, 0.2])?;
    let c = boundary_intersection(&p, 400)?;
    println!("ellipsoid: {} points, length {:.8}", c.points.len(), c.measure);
    for q in c.points.iter().step_by(100) {
        println!("  y = {:?}", q.y);
    }
    Ok(())
}
