//! Concrete truncs: finite rational tuples with a unit, and eventually-zero
//! rational sequences truncated at 1.

pub mod axioms;
pub mod io;
pub mod kernel;
pub mod lemmas;
pub mod random;
pub mod support;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::scalar::Scalar;
pub use kernel::{Kernel, LadderTrace};
pub use support::Support;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TruncError {
    #[error("elements belong to different carriers")]
    CarrierMismatch,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid carrier: {0}")]
    InvalidCarrier(String),
    #[error("coordinate count {got} does not match carrier dimension {expected}")]
    Shape { expected: usize, got: usize },
}

/// Which concrete trunc an element lives in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Carrier<S> {
    /// `ℚ^X` with truncation `a ↦ a ∧ unit`.
    FinVec { unit: Vec<S> },
    /// Eventually-zero sequences with truncation `a ↦ a ∧ 1`.
    EvSeq,
}

impl<S: Scalar> Carrier<S> {
    pub fn fin_vec(unit: Vec<S>) -> Result<Arc<Self>, TruncError> {
        if unit.is_empty() {
            return Err(TruncError::InvalidCarrier("index set is empty".into()));
        }
        if unit.len() > crate::lattice::poset::MAX_POINTS {
            return Err(TruncError::InvalidCarrier(format!("{} coordinates is too many", unit.len())));
        }
        if let Some((i, u)) = unit.iter().enumerate().find(|(_, u)| !u.is_positive()) {
            return Err(TruncError::InvalidCarrier(format!("unit coordinate {} is {u}, must be > 0", i + 1)));
        }
        Ok(Arc::new(Carrier::FinVec { unit }))
    }

    /// `ℚ^n` with the all-ones unit.
    pub fn standard(n: usize) -> Result<Arc<Self>, TruncError> {
        Self::fin_vec(vec![S::one(); n])
    }

    pub fn ev_seq() -> Arc<Self> {
        Arc::new(Carrier::EvSeq)
    }

    pub fn is_fin_vec(&self) -> bool {
        matches!(self, Carrier::FinVec { .. })
    }

    /// Number of coordinates for `FinVec`.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Carrier::FinVec { unit } => Some(unit.len()),
            Carrier::EvSeq => None,
        }
    }

    /// Value of the truncation bound at coordinate `i`.
    pub fn unit_at(&self, i: usize) -> S {
        match self {
            Carrier::FinVec { unit } => unit[i].clone(),
            Carrier::EvSeq => S::one(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Carrier::FinVec { unit } => format!(
                "FinVec(u=({}))",
                unit.iter().map(|u| u.to_string()).collect::<Vec<_>>().join(",")
            ),
            Carrier::EvSeq => "EvSeq".into(),
        }
    }
}

/// Raw coordinates of an element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Coords<S> {
    Tuple(Vec<S>),
    /// `prefix` followed by `tail` forever; normalized so the last prefix
    /// entry differs from `tail`.
    Seq { prefix: Vec<S>, tail: S },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncElement<S> {
    carrier: Arc<Carrier<S>>,
    coords: Coords<S>,
}

impl<S: Scalar> TruncElement<S> {
    pub fn new(carrier: &Arc<Carrier<S>>, coords: Coords<S>) -> Result<Self, TruncError> {
        match (&**carrier, coords) {
            (Carrier::FinVec { unit }, Coords::Tuple(v)) => {
                if v.len() != unit.len() {
                    return Err(TruncError::Shape { expected: unit.len(), got: v.len() });
                }
                Ok(TruncElement { carrier: carrier.clone(), coords: Coords::Tuple(v) })
            }
            (Carrier::EvSeq, Coords::Seq { prefix, tail }) => Ok(Self::normalized(carrier, prefix, tail)),
            _ => Err(TruncError::CarrierMismatch),
        }
    }

    pub fn tuple(carrier: &Arc<Carrier<S>>, v: Vec<S>) -> Result<Self, TruncError> {
        Self::new(carrier, Coords::Tuple(v))
    }

    /// An eventually-zero sequence.
    pub fn seq(carrier: &Arc<Carrier<S>>, prefix: Vec<S>) -> Result<Self, TruncError> {
        Self::new(carrier, Coords::Seq { prefix, tail: S::zero() })
    }

    /// An eventually-constant sequence; lies in the trunc only when `tail = 0`.
    pub fn eventually(carrier: &Arc<Carrier<S>>, prefix: Vec<S>, tail: S) -> Result<Self, TruncError> {
        Self::new(carrier, Coords::Seq { prefix, tail })
    }

    fn normalized(carrier: &Arc<Carrier<S>>, mut prefix: Vec<S>, tail: S) -> Self {
        while prefix.last() == Some(&tail) {
            prefix.pop();
        }
        TruncElement { carrier: carrier.clone(), coords: Coords::Seq { prefix, tail } }
    }

    pub fn zero(carrier: &Arc<Carrier<S>>) -> Self {
        match &**carrier {
            Carrier::FinVec { unit } => {
                TruncElement { carrier: carrier.clone(), coords: Coords::Tuple(vec![S::zero(); unit.len()]) }
            }
            Carrier::EvSeq => Self::normalized(carrier, vec![], S::zero()),
        }
    }

    /// The truncation bound: `u` for `FinVec`, the constant 1 (outside the
    /// trunc) for `EvSeq`.
    pub fn unit(carrier: &Arc<Carrier<S>>) -> Self {
        match &**carrier {
            Carrier::FinVec { unit } => {
                TruncElement { carrier: carrier.clone(), coords: Coords::Tuple(unit.clone()) }
            }
            Carrier::EvSeq => Self::normalized(carrier, vec![], S::one()),
        }
    }

    /// `u(i)·e_i`, the truncated indicator of coordinate `i`.
    pub fn indicator(carrier: &Arc<Carrier<S>>, i: usize) -> Self {
        match &**carrier {
            Carrier::FinVec { unit } => {
                let mut v = vec![S::zero(); unit.len()];
                v[i] = unit[i].clone();
                TruncElement { carrier: carrier.clone(), coords: Coords::Tuple(v) }
            }
            Carrier::EvSeq => {
                let mut v = vec![S::zero(); i + 1];
                v[i] = S::one();
                Self::normalized(carrier, v, S::zero())
            }
        }
    }

    /// Sum of the indicators of `coords`.
    pub fn indicator_of<I: IntoIterator<Item = usize>>(carrier: &Arc<Carrier<S>>, coords: I) -> Self {
        let mut acc = Self::zero(carrier);
        for i in coords {
            acc = acc.add(&Self::indicator(carrier, i)).expect("same carrier");
        }
        acc
    }

    pub fn carrier(&self) -> &Arc<Carrier<S>> {
        &self.carrier
    }

    pub fn coords(&self) -> &Coords<S> {
        &self.coords
    }

    /// Coordinate `i` (0-based).
    pub fn at(&self, i: usize) -> S {
        match &self.coords {
            Coords::Tuple(v) => v[i].clone(),
            Coords::Seq { prefix, tail } => prefix.get(i).cloned().unwrap_or_else(|| tail.clone()),
        }
    }

    /// Number of explicitly stored coordinates.
    pub fn explicit_len(&self) -> usize {
        match &self.coords {
            Coords::Tuple(v) => v.len(),
            Coords::Seq { prefix, .. } => prefix.len(),
        }
    }

    /// Constant value beyond the stored prefix (`EvSeq` only).
    pub fn tail(&self) -> Option<&S> {
        match &self.coords {
            Coords::Tuple(_) => None,
            Coords::Seq { tail, .. } => Some(tail),
        }
    }

    /// Whether the element lies in the trunc (always for `FinVec`; tail 0 for `EvSeq`).
    pub fn in_trunc(&self) -> bool {
        self.tail().map_or(true, |t| t.is_zero())
    }

    fn same_carrier(&self, other: &Self) -> Result<(), TruncError> {
        if Arc::ptr_eq(&self.carrier, &other.carrier) || self.carrier == other.carrier {
            Ok(())
        } else {
            Err(TruncError::CarrierMismatch)
        }
    }

    pub fn map<F: Fn(usize, &S) -> S>(&self, f: F) -> Self {
        match &self.coords {
            Coords::Tuple(v) => TruncElement {
                carrier: self.carrier.clone(),
                coords: Coords::Tuple(v.iter().enumerate().map(|(i, x)| f(i, x)).collect()),
            },
            Coords::Seq { prefix, tail } => {
                let p = prefix.iter().enumerate().map(|(i, x)| f(i, x)).collect();
                // The tail transforms like any coordinate beyond the prefix.
                let t = f(prefix.len(), tail);
                Self::normalized(&self.carrier, p, t)
            }
        }
    }

    pub fn zip<F: Fn(&S, &S) -> S>(&self, other: &Self, f: F) -> Result<Self, TruncError> {
        self.same_carrier(other)?;
        Ok(match (&self.coords, &other.coords) {
            (Coords::Tuple(a), Coords::Tuple(b)) => TruncElement {
                carrier: self.carrier.clone(),
                coords: Coords::Tuple(a.iter().zip(b).map(|(x, y)| f(x, y)).collect()),
            },
            (Coords::Seq { prefix: pa, tail: ta }, Coords::Seq { prefix: pb, tail: tb }) => {
                let n = pa.len().max(pb.len());
                let p = (0..n).map(|i| f(&self.at(i), &other.at(i))).collect();
                let _ = (pa, pb);
                Self::normalized(&self.carrier, p, f(ta, tb))
            }
            _ => return Err(TruncError::CarrierMismatch),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, TruncError> {
        self.zip(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, TruncError> {
        self.zip(other, |a, b| a.clone() - b.clone())
    }

    pub fn join(&self, other: &Self) -> Result<Self, TruncError> {
        self.zip(other, |a, b| a.max_of(b))
    }

    pub fn meet(&self, other: &Self) -> Result<Self, TruncError> {
        self.zip(other, |a, b| a.min_of(b))
    }

    pub fn neg(&self) -> Self {
        self.map(|_, x| -x.clone())
    }

    pub fn abs(&self) -> Self {
        self.map(|_, x| x.abs())
    }

    /// `a⁺ = a ∨ 0`.
    pub fn pos_part(&self) -> Self {
        self.map(|_, x| x.pos())
    }

    /// `a⁻ = (−a) ∨ 0`.
    pub fn neg_part(&self) -> Self {
        self.map(|_, x| (-x.clone()).pos())
    }

    pub fn scale(&self, r: &S) -> Self {
        self.map(|_, x| x.clone() * r.clone())
    }

    pub fn is_zero(&self) -> bool {
        match &self.coords {
            Coords::Tuple(v) => v.iter().all(|x| x.is_zero()),
            Coords::Seq { prefix, tail } => prefix.is_empty() && tail.is_zero(),
        }
    }

    pub fn is_nonneg(&self) -> bool {
        match &self.coords {
            Coords::Tuple(v) => v.iter().all(|x| !x.is_negative()),
            Coords::Seq { prefix, tail } => prefix.iter().all(|x| !x.is_negative()) && !tail.is_negative(),
        }
    }

    pub fn leq(&self, other: &Self) -> Result<bool, TruncError> {
        Ok(other.sub(self)?.is_nonneg())
    }

    fn require_nonneg(&self, what: &str) -> Result<(), TruncError> {
        if self.is_nonneg() {
            Ok(())
        } else {
            Err(TruncError::Domain(format!("{what} needs a nonnegative argument, got {self}")))
        }
    }

    /// `ā`: `a ∧ u` for `FinVec`, `a ∧ 1` for `EvSeq`.
    pub fn truncate(&self) -> Result<Self, TruncError> {
        self.require_nonneg("truncation")?;
        let c = self.carrier.clone();
        Ok(self.map(|i, x| x.min_of(&c.unit_at(i))))
    }

    /// `a ⊖ r = a − r·(a/r)‾`, with `a ⊖ 0 = a`.
    pub fn diminish(&self, r: &S) -> Result<Self, TruncError> {
        self.require_nonneg("diminution")?;
        if r.is_negative() {
            return Err(TruncError::Domain(format!("diminution by negative {r}")));
        }
        if r.is_zero() {
            return Ok(self.clone());
        }
        let inner = self.scale(&(S::one() / r.clone())).truncate()?;
        self.sub(&inner.scale(r))
    }

    /// `a = ā`.
    pub fn is_truncated(&self) -> bool {
        self.is_nonneg() && self.truncate().map(|t| t == *self).unwrap_or(false)
    }

    pub fn support(&self) -> Support {
        match &self.coords {
            Coords::Tuple(v) => Support::finite((0..v.len()).filter(|&i| !v[i].is_zero())),
            Coords::Seq { prefix, tail } => {
                if tail.is_zero() {
                    Support::finite((0..prefix.len()).filter(|&i| !prefix[i].is_zero()))
                } else {
                    Support::cofinite((0..prefix.len()).filter(|&i| prefix[i].is_zero()))
                }
            }
        }
    }

    /// Largest ratio `a(x)/u(x)` over explicit coordinates and the tail.
    pub fn max_ratio(&self) -> S {
        let mut m = S::zero();
        for i in 0..self.explicit_len() {
            m = m.max_of(&(self.at(i).abs() / self.carrier.unit_at(i)));
        }
        if let Some(t) = self.tail() {
            m = m.max_of(&t.abs());
        }
        m
    }
}

impl<S: Scalar> fmt::Display for TruncElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.coords {
            Coords::Tuple(v) => {
                write!(f, "({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
            }
            Coords::Seq { prefix, tail } => {
                let p: Vec<String> = prefix.iter().map(|x| x.to_string()).collect();
                if p.is_empty() {
                    write!(f, "({tail}, ...)")
                } else {
                    write!(f, "({}, {tail}, ...)", p.join(", "))
                }
            }
        }
    }
}
