//! Curvature from translate and cap volumes, with the zero-curvature regime of the 4-ball.
use convgeom::curvature::{cap_curvature, volumic_curvature, Schedule};
use convgeom::{Body, VolumeOptions};

fn main() -> convgeom::Result<()> {
    let o = VolumeOptions::default();
    let s = Schedule::default();
    let ellipse = Body::ellipsoid_semiaxes(&[2.0, 1.0])?;
    for x in [[2.0, 0.0], [0.0, 1.0], [1.2, 0.8]] {
        let v = volumic_curvature(&ellipse, &x, 1.0, &s, &o)?;
        let c = cap_curvature(&ellipse, &x, &s, &o)?;
        println!(
            "ellipse at {x:?}: volumic {:?}, cap {:?}, analytic {:?}, fitted exponent {:?}",
            v.kappa,
            c.kappa,
            ellipse.analytic_curvature(&x),
            v.fit_exponent
        );
    }
    let p4 = Body::pball(4.0, vec![1.0, 1.0])?;
    let r = volumic_curvature(&p4, &[1.0, 0.0], 1.0, &s, &o)?;
    println!("4-ball at (1,0): divergent {}, raw estimates {:?}", r.divergent, r.raw_estimates);

    let ball = Body::ball(3, 1.0)?;
    let r = volumic_curvature(&ball, &[0.0, 0.0, 1.0], 1.0, &Schedule { h0: None, levels: 4 }, &o)?;
    println!("unit ball (Monte Carlo lenses): {:?} +- volume errors {:?}", r.kappa, r.volume_errors);
    Ok(())
}
