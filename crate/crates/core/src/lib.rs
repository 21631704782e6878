//! Finite frames, pointed and filtered frames, concrete truncated ℓ-groups
//! and their frame-valued representations, all with exact rational
//! arithmetic.

pub mod check;
pub mod kernel_frame;
pub mod lattice;
pub mod pointed;
pub mod represent;
pub mod scalar;
pub mod suite;
pub mod trunc;

pub use scalar::Scalar;

/// The default scalar: arbitrary-precision rationals.
pub type Q = num_rational::BigRational;
pub type Element = trunc::TruncElement<Q>;
pub type Kernel = trunc::Kernel<Q>;
pub type Carrier = trunc::Carrier<Q>;
