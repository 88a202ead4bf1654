//! Curvature energies of one-dimensional sets.
//!
//! This crate computes the geometric curvature energies of finite unions of
//! line segments in Euclidean space: thickness, the global-radius energy
//! `U_p`, the intermediate-radius energy `I_p` and the integral Menger
//! curvature `M_p`, together with Hausdorff-density profiles and
//! approximate-tangent classification at a base point.
//!
//! The building blocks live in separate modules:
//!
//! * [`geom`] — circumradius, Menger curvature `kappa`, angles and
//!   point-line distances, generic over the scalar type.
//! * [`scaled`] — mantissa/exponent arithmetic for dyadic scales far below
//!   floating-point underflow.
//! * [`segset`] — segment sets with exact length measure and exact
//!   ball/cone/annulus clipping, plus the built-in example sets.
//! * [`energy`] — adaptive-quadrature and Monte-Carlo energy estimators,
//!   the triple functional `F_p` and closed-form bound evaluation.
//! * [`tangent`] — density ladders and strong/weak tangent detection.
//! * [`appendix`] — independent 1-d quadrature oracles for the closed-form
//!   integrals used by the energy bounds.
//! * [`verify`] — the claim suite driven by the CLI and the acceptance
//!   tests.

pub mod appendix;
pub mod energy;
pub mod geom;
pub mod quad;
pub mod report;
pub mod scaled;
pub mod segset;
pub mod tangent;
pub mod verify;

/// Default scalar for the heavy numerical machinery.
pub type Real = f64;
/// Point over the default scalar.
pub type Pt = geom::Point<f64>;

pub use energy::{EnergyEstimate, EnergyFamily, EnergyParams, QuadratureConfig};
pub use geom::{DegeneracyClass, Point, Scalar, TriangleSides};
pub use scaled::ScaledReal;
pub use segset::{Cone, DyadicLadder, Segment, SegmentSet};
pub use tangent::{DensityProfile, RadiusLadder, TangentReport, TangentVerdict};
