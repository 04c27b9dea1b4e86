//! Exact computer algebra for pseudodifferential symbols on the superline.
//!
//! The crate works entirely over the fixed number field Q(i, √3) (with an
//! optional formal √33 extension), and provides:
//!
//! * the polynomial superalgebra Q(i)[x, ξ] with ξ² = 0 and its contact
//!   derivations ([`superpoly`]),
//! * truncated pseudodifferential symbols, normal-ordered composition and the
//!   contact-algebra action ([`psido`]),
//! * the projective quantization on weight spaces and brute-force extraction
//!   of the lowering coefficients b ([`quantization`]),
//! * closed forms for every named invariant (B, C, b, SVC factors, I, Ĩ, J,
//!   J̃, M, M̃, the conic pencils, …) ([`invariants`]),
//! * equivalence deciders for subquotient modules, both in closed form and via
//!   the generic coefficient-matching oracle ([`decision`]),
//! * the length-15 elimination that pins (γ', δ') = (γ, δ) ([`elimination`]).
//!
//! Everything is exact: no floating point anywhere.

pub mod decision;
pub mod elimination;
pub mod field;
pub mod invariants;
pub mod linalg;
pub mod modspec;
pub mod psido;
pub mod quantization;
pub mod rational;
pub mod sample;
pub mod superpoly;
pub mod verify;

pub use field::{Field, FieldValue, Quad33};
pub use modspec::ModuleSpec;
pub use psido::PsiSymbol;
pub use rational::Rational;
pub use superpoly::SuperPoly;
