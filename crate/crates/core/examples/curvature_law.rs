//! `h_K(u)^{n+1} / kappa(u)` over the normals: constant for the ellipse, not for the 4-ball.
use convgeom::characterize::{curvature_law, CurvatureSource};
use convgeom::curvature::Schedule;
use convgeom::{Body, DirectionGrid, VolumeOptions};

fn main() -> convgeom::Result<()> {
    let o = VolumeOptions::default();
    let s = Schedule::default();
    let g = DirectionGrid::circle(16)?;
    let ellipse = Body::ellipsoid_semiaxes(&[2.0, 1.0])?;
    for source in [CurvatureSource::Oracle, CurvatureSource::Volumic] {
        let r = curvature_law(&ellipse, 1.0, &g, &s, source, &o)?;
        println!("ellipse, {source:?}: mean {:?}, max rel dev {:?}", r.mean, r.max_rel_dev);
    }
    let p4 = Body::pball(4.0, vec![1.0, 1.0])?;
    let r = curvature_law(&p4, 1.0, &DirectionGrid::circle(12)?, &s, CurvatureSource::Oracle, &o)?;
    println!("4-ball: violated {}, zero-curvature directions {:?}", r.violated, r.zero_curvature_directions);
    Ok(())
}
