//! Convolution bodies `K(delta, tau)` of the square, with the flatness probe and an SVG outline.
use convgeom::convolution::{body_profile, convolution_body, flatness_probe, homothety_check};
use convgeom::{Body, DirectionGrid, VolumeOptions};

fn main() -> convgeom::Result<()> {
    let sq = Body::square(1.0)?;
    let grid = DirectionGrid::circle(512)?;
    let o = VolumeOptions::default();
    for delta in [0.5, 2.0, 3.5] {
        let p = convolution_body(&sq, delta, 1.0, &grid, 1e-9, &o)?;
        let f = flatness_probe(&p)?;
        let h = homothety_check(&p, &sq, 1e-6)?;
        println!(
            "delta {delta}: axis radius {:.9}, diagonal radius {:.9}, {:?}, homothet of K: {} (dev {:.3})",
            p.radii[0], p.radii[64], f.verdict, h.is_homothet, h.max_rel_dev
        );
    }
    let flat = flatness_probe(&body_profile(&sq, &grid)?)?;
    println!("the square itself: {:?}, longest collinear run {}", flat.verdict, flat.max_collinear_run);
    for delta in [0.25, 0.5, 0.75] {
        let f = flatness_probe(&convolution_body(&sq, delta, 0.5, &grid, 1e-10, &o)?)?;
        println!("tau 0.5, delta {delta}: {:?}, longest collinear run {}", f.verdict, f.max_collinear_run);
    }
    let p = convolution_body(&sq, 2.0, 1.0, &DirectionGrid::circle(128)?, 1e-9, &o)?;
    let path = std::env::temp_dir().join("square_k2.svg");
    std::fs::write(&path, convgeom::cli::profile_svg(&p)).expect("temp dir is writable");
    println!("outline of K(2, 1) written to {}", path.display());
    Ok(())
}
