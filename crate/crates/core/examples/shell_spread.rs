//! Spread of `F` on gauge shells: zero for ellipses, positive otherwise.
use convgeom::characterize::shell_spread;
use convgeom::{Body, VolumeOptions};

fn regular_hexagon() -> convgeom::Result<Body> {
    let half: Vec<[f64; 2]> = (0..3)
        .map(|k| {
            let t = std::f64::consts::PI * k as f64 / 3.0;
            [t.cos(), t.sin()]
        })
        .collect();
    let mut v = half.clone();
    v.extend(half.iter().map(|p| [-p[0], -p[1]]));
    Body::polygon(v)
}

fn main() -> convgeom::Result<()> {
    let o = VolumeOptions::default();
    let bodies = [
        ("ellipse (2,1)", Body::ellipsoid_semiaxes(&[2.0, 1.0])?),
        ("square", Body::square(1.0)?),
        ("4-ball", Body::pball(4.0, vec![1.0, 1.0])?),
        ("regular hexagon", regular_hexagon()?),
    ];
    for (name, b) in &bodies {
        let spreads = [0.25, 0.5, 1.0, 1.5]
            .iter()
            .map(|&a| shell_spread(b, 1.0, a, 256, 0, &o).map(|r| format!("{:.3e}", r.rel_spread)))
            .collect::<convgeom::Result<Vec<_>>>()?;
        println!("{name:>16}: relative spread at alpha 0.25, 0.5, 1, 1.5 = {}", spreads.join(", "));
    }
    Ok(())
}
