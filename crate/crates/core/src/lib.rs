//! Bit-packed cell codes for finite `n`-dimensional cubical complexes.
//!
//! Every cell of the image (spel, surfel, pointel, any `k`-cell) is one
//! `u64` word holding its topology and its digital coordinates. On top of
//! this coding the crate provides signed cells and boundary operators,
//! characteristic bit-array sets of cells, and boundary extraction of
//! objects by scanning or surface tracking, all independent of the
//! dimension.

pub mod bench;
pub mod cellset;
pub mod error;
pub mod oriented;
pub mod shapes;
pub mod space;
pub mod tracking;

pub use cellset::{CellFamily, CellSet, CharSet, LutCharSet, MinCharSet, OrderedCellSet};
pub use error::{Error, Result};
pub use oriented::{interior_exterior, object_boundary, SCell, Sign, SignedCellSet};
pub use space::{Cell, CellVector, Incidence, Side, SpaceLayout};
