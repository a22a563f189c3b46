//! Gradient and Hessian of `F` from the boundary crossings, against finite differences.
use convgeom::calculus::{grad_f, hessian_f};
use convgeom::volume::Field;
use convgeom::{Body, TranslateProblem, VolumeOptions};

fn main() -> convgeom::Result<()> {
    let disk = Body::ball(2, 1.0)?;
    let p = TranslateProblem::new(disk, 1.0, vec![1.0, 0.0])?;
    println!("disk at (1,0): grad {:?}", grad_f(&p, 4096)?.gradient);
    println!("               hess {:?}", hessian_f(&p, 4096)?.matrix);
    println!("expected grad (-sqrt 3, 0), hess diag(1/sqrt 3, -sqrt 3)");

    let ellipse = Body::ellipsoid_semiaxes(&[2.0, 1.0])?;
    let x = vec![0.9, 0.6];
    let p = TranslateProblem::new(ellipse.clone(), 0.8, x.clone())?;
    let g = grad_f(&p, 4096)?;
    let field = Field::new(&ellipse, 0.8, &VolumeOptions { tol: 1e-8, ..VolumeOptions::default() })?;
    let h = 1e-3;
    let fd: Vec<f64> = (0..2)
        .map(|i| {
            let mut a = x.clone();
            let mut b = x.clone();
            a[i] += h;
            b[i] -= h;
            Ok((field.at(&a)?.value - field.at(&b)?.value) / (2.0 * h))
        })
        .collect::<convgeom::Result<_>>()?;
    println!("ellipse: flux grad {:?}, reverse form {:?}, central FD {fd:?}", g.gradient, g.reverse);

    let ball = Body::ball(3, 1.0)?;
    let p = TranslateProblem::new(ball, 1.0, vec![1.0, 0.0, 0.0])?;
    println!("ball at (1,0,0): grad {:?}", grad_f(&p, 5)?.gradient);
    println!("                 hess diagonal {:?}", hessian_f(&p, 2000)?.matrix.iter().enumerate().map(|(i, r)| r[i]).collect::<Vec<_>>());
    Ok(())
}
