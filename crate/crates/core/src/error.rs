//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("space too large: {0}")]
    SpaceTooLarge(String),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("coordinate {value} out of range [0, {max}] on axis {axis}")]
    CoordOutOfRange { axis: usize, value: i64, max: u64 },

    #[error("topology word {topology:#b} does not fit a {dim}-dimensional space")]
    InvalidTopology { topology: u64, dim: usize },

    #[error("axis {axis} out of range for a {dim}-dimensional space")]
    InvalidAxis { axis: usize, dim: usize },

    #[error("axis {axis} has the wrong parity for this boundary operator")]
    WrongParity { axis: usize },

    #[error("cell {0:#x} is not a surfel")]
    NotASurfel(u64),

    #[error("cell {0:#x} is not a bel of the object")]
    NotABel(u64),

    #[error("cell {0:#x} is already present with the same orientation")]
    DuplicateOrientation(u64),

    #[error("object touches the image border")]
    ObjectTouchesBorder,

    #[error("spel {0:#x} is not in the object")]
    NotInObject(u64),

    #[error("object is empty")]
    EmptyObject,

    #[error("cell {0:#x} does not belong to the set family")]
    NotInFamily(u64),

    #[error("cell sets differ in space or family")]
    FamilyMismatch,

    #[error("box out of bounds: {0}")]
    BoxOutOfBounds(String),

    #[error("ball of radius {radius} does not fit with a one-spel margin")]
    BallTouchesBorder { radius: u64 },

    #[error("bad magic: expected {expected}")]
    BadMagic { expected: &'static str },

    #[error("header mismatch: {0}")]
    HeaderMismatch(String),

    #[error("truncated payload: expected {expected} bytes, got {got}")]
    TruncatedPayload { expected: usize, got: usize },

    #[error("size mismatch: expected {expected} samples, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("wrong dimension: expected {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },

    #[error("invalid bel adjacency specification: {0}")]
    BadAdjacencySpec(String),
}
