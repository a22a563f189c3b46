//! Derivatives of the translate-intersection volume `F(x) = |K ∩ (x + tau K)|`.

mod crossing;
mod gradient;
mod hessian;
mod lemma;

pub use crossing::{boundary_intersection, BoundaryIntersectionCurve, CurvePoint};
pub use gradient::{grad_f, GradientReport};
pub use hessian::{hessian_f, hessian_from_curve, HessianReport, EPS_TANG};
pub use lemma::{one_sided_derivatives, OneSidedDerivatives, SetMeasures};

