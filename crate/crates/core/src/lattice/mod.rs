//! Finite frames as downset lattices of a poset.

pub mod frame;
pub mod io;
pub mod map;
pub mod poset;

pub use frame::{Elem, FiniteFrame, SubFrame};
pub use map::{enumerate_frame_maps, points, FrameMap, MapReport, Point};
pub use poset::Poset;

use serde::Serialize;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrderLaw {
    Reflexivity,
    Antisymmetry,
    Transitivity,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("relation is not a partial order: {law:?} fails at {witness:?}")]
    NotPartialOrder { law: OrderLaw, witness: Vec<String> },
    #[error("poset has {points} points, at most {max} are supported")]
    TooLarge { points: usize, max: usize },
    #[error("frame would exceed {max} elements")]
    TooManyElements { max: usize },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("bitmask {0:#x} is not an element of the frame")]
    NotAnElement(u64),
    #[error("lattice is not distributive: {0}")]
    NotDistributive(String),
    #[error("frame map table has {got} entries, source has {expected} elements")]
    TableLength { expected: usize, got: usize },
    #[error("not a frame map: {0}")]
    NotFrameMap(String),
    #[error("{0} is not a prime element")]
    NotPrime(String),
    #[error("not a filter: {0}")]
    NotFilter(String),
}
