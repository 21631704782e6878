//! Seeded generators for carriers and elements. Denominators stay ≤ 12.

use std::sync::Arc;

use rand::Rng;

use super::{Carrier, TruncElement};
use crate::scalar::Scalar;

pub const MAX_DENOM: i64 = 12;
pub const MAX_PREFIX: usize = 6;

/// `p/q` with `q ∈ 1..=12` and `|p/q| ≤ bound`.
pub fn rational<S: Scalar, R: Rng>(rng: &mut R, bound: i64, nonneg: bool) -> S {
    let d = rng.gen_range(1..=MAX_DENOM);
    let lo = if nonneg { 0 } else { -bound * d };
    S::ratio(rng.gen_range(lo..=bound * d), d)
}

/// Strictly positive `p/q ≤ bound`.
pub fn positive<S: Scalar, R: Rng>(rng: &mut R, bound: i64) -> S {
    let d = rng.gen_range(1..=MAX_DENOM);
    S::ratio(rng.gen_range(1..=bound * d), d)
}

pub fn fin_vec<S: Scalar, R: Rng>(rng: &mut R, max_dim: usize) -> Arc<Carrier<S>> {
    let n = rng.gen_range(1..=max_dim.max(1));
    Carrier::fin_vec((0..n).map(|_| positive(rng, 3)).collect()).expect("positive unit")
}

/// A coordinate value, zero a quarter of the time.
fn coordinate<S: Scalar, R: Rng>(rng: &mut R, nonneg: bool) -> S {
    if rng.gen_ratio(1, 4) {
        S::zero()
    } else {
        rational(rng, 4, nonneg)
    }
}

/// A random element of the trunc (tail 0 for sequences).
pub fn element<S: Scalar, R: Rng>(rng: &mut R, carrier: &Arc<Carrier<S>>, nonneg: bool) -> TruncElement<S> {
    match carrier.dim() {
        Some(n) => TruncElement::tuple(carrier, (0..n).map(|_| coordinate(rng, nonneg)).collect()).expect("shape"),
        None => {
            let len = rng.gen_range(0..=MAX_PREFIX);
            TruncElement::seq(carrier, (0..len).map(|_| coordinate(rng, nonneg)).collect()).expect("shape")
        }
    }
}

pub fn nonneg<S: Scalar, R: Rng>(rng: &mut R, carrier: &Arc<Carrier<S>>) -> TruncElement<S> {
    element(rng, carrier, true)
}

pub fn truncated<S: Scalar, R: Rng>(rng: &mut R, carrier: &Arc<Carrier<S>>) -> TruncElement<S> {
    nonneg(rng, carrier).truncate().expect("nonnegative")
}
