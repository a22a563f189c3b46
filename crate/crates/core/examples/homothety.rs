//! Can a second gauge `L` index `F`? Only when `L` is a homothet of `K`.
use convgeom::characterize::homothety_necessity;
use convgeom::{Body, DirectionGrid, VolumeOptions};

fn main() -> convgeom::Result<()> {
    let g = DirectionGrid::circle(256)?;
    let o = VolumeOptions::default();
    let disk = Body::ball(2, 1.0)?;
    let ellipse = Body::ellipsoid_semiaxes(&[2.0, 1.0])?;
    let pairs = [("disk, 2 disk", &disk, disk.scaled(2.0)?), ("ellipse, disk", &ellipse, disk.clone())];
    for (name, k, l) in pairs {
        let r = homothety_necessity(k, &l, 1.0, &g, &o)?;
        println!(
            "{name}: consistent {}, ratio in [{:.4}, {:.4}], witness {:?} (F = {:?}), partner {:?} (F = {:?})",
            r.consistent, r.ratio_min, r.ratio_max, r.witness, r.f_witness, r.partner, r.f_partner
        );
    }
    Ok(())
}
