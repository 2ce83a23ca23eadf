//! Exact arithmetic: rationals, vectors, polynomials, root counting and
//! resultant elimination.

pub mod curve;
pub mod mpoly;
pub mod rational;
pub mod resultant;
pub mod upoly;

pub use curve::{restrict_to_affine_curve, restrict_to_curve, RatFn, RationalCurve};
pub use mpoly::{Exponent, Poly, TriPoly};
pub use rational::{det3, format_rational, int, parse_rational, rat, to_f64, Rational, Vec2, Vec3, Q};
pub use resultant::{resultant, resultant_uni};
pub use upoly::{coprime_basis, isolate_union, Endpoint, Interval, UniPoly};
