//! Finite cellular space and unsigned cell codes.
//!
//! A cell of the cubical complex over a finite parallelepiped image is
//! stored in a single `u64`:
//!
//! ```text
//!   | topology (n bits) | x_{n-1} | ... | x_1 | x_0 |
//!                        <------ coord_width ------->
//! ```
//!
//! Bit `i` of the topology word is the parity of the `i`-th Khalimsky
//! coordinate (1 = open along axis `i`). The `i`-th digital coordinate
//! `x_i` is the Khalimsky coordinate shifted right by one. Axis 0 sits in
//! the least-significant bits.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Number of bits in a cell word.
pub const WORD_BITS: u32 = u64::BITS;

/// Unsigned code of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell(pub u64);

impl From<Cell> for u64 {
    fn from(c: Cell) -> u64 {
        c.0
    }
}

/// Which of the two 1-incident cells along an axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

/// Kind of 1-incidence available along an axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Incidence {
    /// Topology bit is 1: the cell has two low 1-incident cells.
    Low,
    /// Topology bit is 0: the cell has two up 1-incident cells.
    Up,
}

/// Per-axis displacement in digital coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellVector(pub Vec<i64>);

impl CellVector {
    pub fn zero(n: usize) -> Self {
        CellVector(vec![0; n])
    }

    pub fn norm1(&self) -> u64 {
        self.0.iter().map(|d| d.unsigned_abs()).sum()
    }

    pub fn norm_inf(&self) -> u64 {
        self.0.iter().map(|d| d.unsigned_abs()).max().unwrap_or(0)
    }
}

/// Immutable description of a finite `n`-dimensional image and of the
/// bit layout of its cell codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceLayout {
    coordmax: Vec<u64>,
    nbits: Vec<u32>,
    shift: Vec<u32>,
    // coordinate mask of each axis, already shifted into place
    axis_mask: Vec<u64>,
    coord_width: u32,
}

impl SpaceLayout {
    /// Builds the layout of an image whose spel coordinates on axis `i`
    /// range over `[0, coordmax[i]]`.
    pub fn new(coordmax: &[u64]) -> Result<Self> {
        if coordmax.is_empty() {
            return Err(Error::InvalidSpace("at least one axis is required".into()));
        }
        if let Some(i) = coordmax.iter().position(|&m| m == 0) {
            return Err(Error::InvalidSpace(format!(
                "upper bound of axis {i} must be at least 1"
            )));
        }
        let n = coordmax.len() as u64;
        let nbits: Vec<u32> = coordmax
            .iter()
            .map(|&m| WORD_BITS - m.leading_zeros())
            .collect();
        let width: u64 = nbits.iter().map(|&b| b as u64).sum();
        let needed = n + 1 + width;
        if needed > WORD_BITS as u64 {
            return Err(Error::SpaceTooLarge(format!(
                "{n} topology bits + 1 sign bit + {width} coordinate bits exceed {WORD_BITS}-bit cell words"
            )));
        }
        let mut shift = Vec::with_capacity(nbits.len());
        let mut axis_mask = Vec::with_capacity(nbits.len());
        let mut acc = 0;
        for &b in &nbits {
            shift.push(acc);
            axis_mask.push(((1u64 << b) - 1) << acc);
            acc += b;
        }
        Ok(SpaceLayout {
            coordmax: coordmax.to_vec(),
            nbits,
            shift,
            axis_mask,
            coord_width: acc,
        })
    }

    /// Layout of an image with `sizes[i]` spels along axis `i`.
    pub fn from_sizes(sizes: &[u64]) -> Result<Self> {
        if let Some(i) = sizes.iter().position(|&s| s < 2) {
            return Err(Error::InvalidSpace(format!(
                "axis {i} needs at least 2 spels"
            )));
        }
        let coordmax: Vec<u64> = sizes.iter().map(|s| s - 1).collect();
        Self::new(&coordmax)
    }

    /// Number of axes.
    #[inline]
    pub fn dimension(&self) -> usize {
        self.coordmax.len()
    }

    #[inline]
    pub fn coordmax(&self, axis: usize) -> u64 {
        self.coordmax[axis]
    }

    pub fn coordmaxes(&self) -> &[u64] {
        &self.coordmax
    }

    /// Number of spels along each axis.
    pub fn sizes(&self) -> Vec<u64> {
        self.coordmax.iter().map(|m| m + 1).collect()
    }

    #[inline]
    pub fn nbits(&self, axis: usize) -> u32 {
        self.nbits[axis]
    }

    #[inline]
    pub fn shift(&self, axis: usize) -> u32 {
        self.shift[axis]
    }

    /// Sum of the per-axis bit widths.
    #[inline]
    pub fn coord_width(&self) -> u32 {
        self.coord_width
    }

    #[inline]
    pub fn coord_mask(&self) -> u64 {
        (1u64 << self.coord_width) - 1
    }

    /// Bits used by an unsigned code.
    pub fn unsigned_code_bits(&self) -> u32 {
        self.dimension() as u32 + self.coord_width
    }

    /// Bits used by a signed code.
    pub fn signed_code_bits(&self) -> u32 {
        self.unsigned_code_bits() + 1
    }

    /// Topology word of spels (all ones).
    #[inline]
    pub fn full_topology(&self) -> u32 {
        ((1u64 << self.dimension()) - 1) as u32
    }

    /// True when every axis uses all the values its bit field can hold.
    pub fn is_dense(&self) -> bool {
        self.coordmax
            .iter()
            .zip(&self.nbits)
            .all(|(&m, &b)| m == (1u64 << b) - 1)
    }

    /// Number of spels in the image.
    pub fn spel_count(&self) -> u64 {
        self.coordmax.iter().map(|m| m + 1).product()
    }

    pub(crate) fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dimension() {
            return Err(Error::InvalidAxis {
                axis,
                dim: self.dimension(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_topology(&self, topology: u32) -> Result<()> {
        if (topology as u64) >> self.dimension() != 0 {
            return Err(Error::InvalidTopology {
                topology: topology as u64,
                dim: self.dimension(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_coord(&self, axis: usize, value: i64) -> Result<u64> {
        let max = self.coordmax[axis];
        if value < 0 || value as u64 > max {
            return Err(Error::CoordOutOfRange { axis, value, max });
        }
        Ok(value as u64)
    }

    /// Packs digital coordinates into the low bits of a code.
    pub(crate) fn pack_coords(&self, coords: &[u64]) -> Result<u64> {
        if coords.len() != self.dimension() {
            return Err(Error::WrongDimension {
                expected: self.dimension(),
                got: coords.len(),
            });
        }
        let mut packed = 0;
        for (i, &x) in coords.iter().enumerate() {
            if x > self.coordmax[i] {
                return Err(Error::CoordOutOfRange {
                    axis: i,
                    value: x as i64,
                    max: self.coordmax[i],
                });
            }
            packed |= x << self.shift[i];
        }
        Ok(packed)
    }

    // Raw word helpers. The coordinate field is laid out identically in
    // signed and unsigned codes, so these work on both.

    #[inline]
    pub(crate) fn raw_coord(&self, code: u64, axis: usize) -> u64 {
        (code & self.axis_mask[axis]) >> self.shift[axis]
    }

    #[inline]
    pub(crate) fn raw_unit(&self, axis: usize) -> u64 {
        1u64 << self.shift[axis]
    }

    #[inline]
    pub(crate) fn raw_with_coord(&self, code: u64, axis: usize, value: u64) -> u64 {
        (code & !self.axis_mask[axis]) | (value << self.shift[axis])
    }

    /// Moves the coordinate field of `code` by `delta` along `axis`.
    #[inline]
    pub(crate) fn raw_translate(&self, code: u64, axis: usize, delta: i64) -> Result<u64> {
        let x = self.raw_coord(code, axis) as i64 + delta;
        let x = self.check_coord(axis, x)?;
        Ok(self.raw_with_coord(code, axis, x))
    }

    pub(crate) fn raw_coords(&self, code: u64) -> Vec<u64> {
        (0..self.dimension())
            .map(|i| self.raw_coord(code, i))
            .collect()
    }

    /// Unsigned code of the cell with the given topology word and digital
    /// coordinates.
    pub fn ucode(&self, topology: u32, coords: &[u64]) -> Result<Cell> {
        self.check_topology(topology)?;
        let packed = self.pack_coords(coords)?;
        Ok(Cell(((topology as u64) << self.coord_width) | packed))
    }

    pub fn spel(&self, coords: &[u64]) -> Result<Cell> {
        self.ucode(self.full_topology(), coords)
    }

    pub fn pointel(&self, coords: &[u64]) -> Result<Cell> {
        self.ucode(0, coords)
    }

    #[inline]
    pub fn topology(&self, c: Cell) -> u32 {
        (c.0 >> self.coord_width) as u32
    }

    /// Dimension of the cell, i.e. the number of axes it is open along.
    #[inline]
    pub fn dim(&self, c: Cell) -> u32 {
        self.topology(c).count_ones()
    }

    #[inline]
    pub fn coord(&self, c: Cell, axis: usize) -> u64 {
        self.raw_coord(c.0, axis)
    }

    pub fn coords(&self, c: Cell) -> Vec<u64> {
        self.raw_coords(c.0)
    }

    pub fn set_coord(&self, c: Cell, axis: usize, value: u64) -> Result<Cell> {
        self.check_axis(axis)?;
        let v = self.check_coord(axis, value.min(i64::MAX as u64) as i64)?;
        Ok(Cell(self.raw_with_coord(c.0, axis, v)))
    }

    /// Khalimsky coordinate `2 x_i + bit_i(topology)`.
    #[inline]
    pub fn khalimsky_coord(&self, c: Cell, axis: usize) -> u64 {
        2 * self.coord(c, axis) + ((self.topology(c) >> axis) & 1) as u64
    }

    pub fn khalimsky_coords(&self, c: Cell) -> Vec<u64> {
        (0..self.dimension())
            .map(|i| self.khalimsky_coord(c, i))
            .collect()
    }

    /// Cell with the given Khalimsky coordinates.
    pub fn from_khalimsky(&self, kcoords: &[u64]) -> Result<Cell> {
        let topology = kcoords
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, k)| acc | (((k & 1) as u32) << i));
        let coords: Vec<u64> = kcoords.iter().map(|k| k >> 1).collect();
        self.ucode(topology, &coords)
    }

    #[inline]
    pub fn is_spel(&self, c: Cell) -> bool {
        self.topology(c) == self.full_topology()
    }

    #[inline]
    pub fn is_surfel(&self, c: Cell) -> bool {
        self.dim(c) as usize + 1 == self.dimension()
    }

    /// The axis orthogonal to a surfel, i.e. its single closed axis.
    pub fn orth_dir(&self, c: Cell) -> Result<usize> {
        if !self.is_surfel(c) {
            return Err(Error::NotASurfel(c.0));
        }
        let closed = !self.topology(c) & self.full_topology();
        Ok(closed.trailing_zeros() as usize)
    }

    /// Same-topology neighbour shifted by `delta` along `axis`.
    pub fn translate(&self, c: Cell, axis: usize, delta: i64) -> Result<Cell> {
        self.check_axis(axis)?;
        self.raw_translate(c.0, axis, delta).map(Cell)
    }

    pub fn translate_by(&self, c: Cell, v: &CellVector) -> Result<Cell> {
        if v.0.len() != self.dimension() {
            return Err(Error::WrongDimension {
                expected: self.dimension(),
                got: v.0.len(),
            });
        }
        let mut code = c.0;
        for (i, &d) in v.0.iter().enumerate() {
            if d != 0 {
                code = self.raw_translate(code, i, d)?;
            }
        }
        Ok(Cell(code))
    }

    /// Displacement `q - p` in digital coordinates.
    pub fn difference(&self, p: Cell, q: Cell) -> CellVector {
        CellVector(
            (0..self.dimension())
                .map(|i| self.coord(q, i) as i64 - self.coord(p, i) as i64)
                .collect(),
        )
    }

    /// `l`-adjacency: same topology, distinct, every coordinate differs by
    /// at most one and the 1-norm of the difference is at most `l`.
    pub fn l_adjacent(&self, p: Cell, q: Cell, l: u32) -> bool {
        if p == q || self.topology(p) != self.topology(q) {
            return false;
        }
        let mut norm = 0u64;
        for i in 0..self.dimension() {
            let d = self.coord(p, i).abs_diff(self.coord(q, i));
            if d > 1 {
                return false;
            }
            norm += d;
        }
        norm <= l as u64
    }

    pub fn incident_kind(&self, c: Cell, axis: usize) -> Result<Incidence> {
        self.check_axis(axis)?;
        Ok(if (self.topology(c) >> axis) & 1 == 1 {
            Incidence::Low
        } else {
            Incidence::Up
        })
    }

    /// One of the two 1-incident cells along `axis`: low 1-incident cells if
    /// the cell is open along `axis`, up 1-incident cells otherwise.
    pub fn incident_1(&self, c: Cell, axis: usize, which: Side) -> Result<Cell> {
        let kind = self.incident_kind(c, axis)?;
        let flipped = c.0 ^ (1u64 << (self.coord_width as usize + axis));
        let delta = match (kind, which) {
            (Incidence::Low, Side::First) | (Incidence::Up, Side::Second) => 0,
            (Incidence::Low, Side::Second) => 1,
            (Incidence::Up, Side::First) => -1,
        };
        if delta == 0 {
            Ok(Cell(flipped))
        } else {
            self.raw_translate(flipped, axis, delta).map(Cell)
        }
    }

    pub fn incident_pair(&self, c: Cell, axis: usize) -> Result<[Cell; 2]> {
        Ok([
            self.incident_1(c, axis, Side::First)?,
            self.incident_1(c, axis, Side::Second)?,
        ])
    }

    /// Closure of `c`: the cell plus every cell low incident to it, in
    /// increasing code order.
    pub fn closure(&self, c: Cell) -> Result<Vec<Cell>> {
        self.incidence_closure(c, Incidence::Low)
    }

    /// Open star of `c`: the cell plus every cell up incident to it, in
    /// increasing code order.
    pub fn star(&self, c: Cell) -> Result<Vec<Cell>> {
        self.incidence_closure(c, Incidence::Up)
    }

    fn incidence_closure(&self, c: Cell, kind: Incidence) -> Result<Vec<Cell>> {
        let mut seen = BTreeSet::new();
        let mut pending = vec![c];
        seen.insert(c);
        while let Some(d) = pending.pop() {
            for axis in 0..self.dimension() {
                if self.incident_kind(d, axis)? != kind {
                    continue;
                }
                for e in self.incident_pair(d, axis)? {
                    if seen.insert(e) {
                        pending.push(e);
                    }
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// Debug rendering `(topology-bits; x_{n-1},...,x_0)`.
    pub fn display(&self, c: Cell) -> CellDisplay<'_> {
        CellDisplay {
            space: self,
            code: c.0,
            sign: None,
        }
    }

    pub(crate) fn display_raw(&self, code: u64, sign: Option<bool>) -> CellDisplay<'_> {
        CellDisplay {
            space: self,
            code,
            sign,
        }
    }
}

pub struct CellDisplay<'a> {
    space: &'a SpaceLayout,
    code: u64,
    // Some(negative) for signed codes
    sign: Option<bool>,
}

impl fmt::Display for CellDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.space.dimension();
        let cw = self.space.coord_width();
        let topology = match self.sign {
            Some(_) => self.code >> (cw + 1),
            None => self.code >> cw,
        };
        if let Some(neg) = self.sign {
            write!(f, "{}", if neg { '-' } else { '+' })?;
        }
        write!(f, "({:0width$b}; ", topology, width = n)?;
        for i in (0..n).rev() {
            write!(f, "{}", self.space.raw_coord(self.code, i))?;
            if i > 0 {
                write!(f, ",")?;
            }
        }
        write!(f, ")")
    }
}
