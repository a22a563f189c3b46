//! Numerical geometry of symmetric convex bodies: translate-intersection volumes, their
//! derivatives, convolution bodies and volumic curvature estimates.

pub mod bodies;
pub mod calculus;
pub mod characterize;
pub mod cli;
pub mod convolution;
pub mod curvature;
pub mod error;
pub mod linalg;
pub mod planar;
pub mod polytope;
pub mod quadrature;
pub mod volume;

pub use bodies::{Body, BodySpec, DirectionGrid};
pub use error::{GeomError, Result};
pub use volume::{TranslateProblem, VolumeEstimate, VolumeOptions};
