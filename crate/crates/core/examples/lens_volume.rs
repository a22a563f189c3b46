//! `|K ∩ (x + K)|` for the unit disk: certified polygon sandwich, Monte Carlo and the lens formula.
use convgeom::volume::intersection_volume;
use convgeom::{Body, TranslateProblem, VolumeOptions};

fn main() -> convgeom::Result<()> {
    let disk = Body::ball(2, 1.0)?;
    println!("{:>5} {:>14} {:>12} {:>14} {:>12} {:>14}", "d", "exact", "bound", "mc", "ci", "formula");
    for d in [0.2, 0.5, 1.0, 1.5, 1.9] {
        let p = TranslateProblem::new(disk.clone(), 1.0, vec![d, 0.0])?;
        let exact = intersection_volume(&p, &VolumeOptions::default())?;
        let mc = intersection_volume(&p, &VolumeOptions::mc(1_000_000, 0))?;
        let formula = 2.0 * (d / 2.0f64).acos() - d / 2.0 * (4.0 - d * d).sqrt();
        println!(
            "{d:>5} {:>14.10} {:>12.2e} {:>14.6} {:>12.2e} {formula:>14.10}",
            exact.value, exact.abs_error, mc.value, mc.abs_error
        );
    }
    let cube = Body::cube(3, 1.0)?;
    let p = TranslateProblem::new(cube, 0.5, vec![0.8, 0.3, 0.0])?;
    println!("cube, tau 0.5, x (0.8, 0.3, 0): {:?}", intersection_volume(&p, &VolumeOptions::default())?);
    Ok(())
}
