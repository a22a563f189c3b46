//! One-sided derivatives of `r -> |K1 ∩ (r u + K2)|` at `r = 0`.
use convgeom::calculus::one_sided_derivatives;
use convgeom::Body;

fn main() -> convgeom::Result<()> {
    let sq = Body::square(1.0)?;
    let disk = Body::ball(2, 1.0)?;
    let cases = [
        ("square / square, e1", &sq, &sq, vec![1.0, 0.0]),
        ("square / square, diagonal", &sq, &sq, vec![1.0, 1.0]),
        ("disk / disk", &disk, &disk, vec![1.0, 0.0]),
        ("disk / half disk", &disk, &disk.scaled(0.5)?, vec![1.0, 0.0]),
    ];
    for (name, k1, k2, u) in cases {
        let r = one_sided_derivatives(k1, k2, &u, 1024)?;
        println!("{name:>26}: forward {:+.6} backward {:+.6} {:?}", r.forward, r.backward, r.set_measures);
    }
    let cube = Body::cube(3, 1.0)?;
    let r = one_sided_derivatives(&cube, &cube, &[1.0, 0.0, 0.0], 96)?;
    println!("{:>26}: forward {:+.6} backward {:+.6}", "cube / cube, e1", r.forward, r.backward);
    Ok(())
}
