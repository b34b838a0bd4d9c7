//! Signed cells, boundary operators and the boundary of an object.
//!
//! A signed code inserts the orientation bit between the topology word and
//! the coordinates:
//!
//! ```text
//!   | topology (n bits) | s | x_{n-1} | ... | x_0 |
//! ```
//!
//! with `s = 0` for positive cells. Keeping the sign bit just above the
//! coordinates makes every signed family exactly twice as large as its
//! unsigned counterpart in a [`CharSet`](crate::cellset::CharSet).

use std::fmt;
use std::ops::{Mul, Neg};

use crate::cellset::{CellFamily, CellSet, LutCharSet};
use crate::error::{Error, Result};
use crate::space::{Cell, SpaceLayout};

/// Signed code of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SCell(pub u64);

impl From<SCell> for u64 {
    fn from(c: SCell) -> u64 {
        c.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    #[inline]
    pub fn from_bit(bit: u64) -> Sign {
        if bit == 0 {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    #[inline]
    pub fn bit(self) -> u64 {
        match self {
            Sign::Pos => 0,
            Sign::Neg => 1,
        }
    }

    /// `(-1)^k`.
    #[inline]
    pub fn parity(k: u32) -> Sign {
        Sign::from_bit((k & 1) as u64)
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Pos => "+",
            Sign::Neg => "-",
        })
    }
}

impl SpaceLayout {
    #[inline]
    fn sign_bit(&self) -> u64 {
        1u64 << self.coord_width()
    }

    #[inline]
    fn stopology_bit(&self, axis: usize) -> u64 {
        1u64 << (self.coord_width() as usize + 1 + axis)
    }

    pub fn scode(&self, topology: u32, sign: Sign, coords: &[u64]) -> Result<SCell> {
        self.check_topology(topology)?;
        let packed = self.pack_coords(coords)?;
        let cw = self.coord_width();
        Ok(SCell(
            ((topology as u64) << (cw + 1)) | (sign.bit() << cw) | packed,
        ))
    }

    #[inline]
    pub fn stopology(&self, c: SCell) -> u32 {
        (c.0 >> (self.coord_width() + 1)) as u32
    }

    #[inline]
    pub fn sdim(&self, c: SCell) -> u32 {
        self.stopology(c).count_ones()
    }

    #[inline]
    pub fn sign_of(&self, c: SCell) -> Sign {
        Sign::from_bit((c.0 >> self.coord_width()) & 1)
    }

    /// Same cell with the opposite orientation.
    #[inline]
    pub fn opposite(&self, c: SCell) -> SCell {
        SCell(c.0 ^ self.sign_bit())
    }

    #[inline]
    pub fn unsign(&self, c: SCell) -> Cell {
        let cw = self.coord_width();
        Cell(((c.0 >> (cw + 1)) << cw) | (c.0 & self.coord_mask()))
    }

    #[inline]
    pub fn with_sign(&self, c: Cell, sign: Sign) -> SCell {
        let cw = self.coord_width();
        SCell(((c.0 >> cw) << (cw + 1)) | (sign.bit() << cw) | (c.0 & self.coord_mask()))
    }

    #[inline]
    pub fn scoord(&self, c: SCell, axis: usize) -> u64 {
        self.raw_coord(c.0, axis)
    }

    pub fn scoords(&self, c: SCell) -> Vec<u64> {
        self.raw_coords(c.0)
    }

    pub fn stranslate(&self, c: SCell, axis: usize, delta: i64) -> Result<SCell> {
        self.check_axis(axis)?;
        self.raw_translate(c.0, axis, delta).map(SCell)
    }

    pub fn sorth_dir(&self, c: SCell) -> Result<usize> {
        self.orth_dir(self.unsign(c))
            .map_err(|_| Error::NotASurfel(c.0))
    }

    /// Multiplies the orientation of `c` by `s`.
    #[inline]
    pub fn signed_by(&self, c: SCell, s: Sign) -> SCell {
        SCell(c.0 ^ (s.bit() << self.coord_width()))
    }

    /// `(-1)^k` where `k` counts the open axes of `c` above `axis`.
    #[inline]
    pub(crate) fn axis_parity(&self, topology: u32, axis: usize) -> Sign {
        Sign::parity((topology as u64 >> (axis + 1)).count_ones())
    }

    /// Lower boundary of `c` along an open axis: the two cells obtained by
    /// closing `axis` at `x` and at `x + 1`, with orientations `s tau` and
    /// `-s tau`.
    pub fn lower_boundary_along(&self, c: SCell, axis: usize) -> Result<[SCell; 2]> {
        self.check_axis(axis)?;
        let topology = self.stopology(c);
        if (topology >> axis) & 1 == 0 {
            return Err(Error::WrongParity { axis });
        }
        let tau = self.axis_parity(topology, axis);
        let closed = self.signed_by(SCell(c.0 & !self.stopology_bit(axis)), tau);
        let far = self.raw_translate(closed.0, axis, 1)?;
        Ok([closed, self.opposite(SCell(far))])
    }

    /// Upper boundary of `c` along a closed axis, the transpose of the lower
    /// boundary: the two cells obtained by opening `axis` at `x` and at
    /// `x - 1`, with orientations `s tau` and `-s tau`.
    pub fn upper_boundary_along(&self, c: SCell, axis: usize) -> Result<[SCell; 2]> {
        self.check_axis(axis)?;
        let topology = self.stopology(c);
        if (topology >> axis) & 1 == 1 {
            return Err(Error::WrongParity { axis });
        }
        let tau = self.axis_parity(topology, axis);
        let opened = self.signed_by(SCell(c.0 | self.stopology_bit(axis)), tau);
        let near = self.raw_translate(opened.0, axis, -1)?;
        Ok([opened, self.opposite(SCell(near))])
    }

    /// Union of the lower boundaries along every open axis.
    pub fn lower_boundary(&self, c: SCell) -> Result<Vec<SCell>> {
        let topology = self.stopology(c);
        let mut out = Vec::with_capacity(2 * topology.count_ones() as usize);
        for axis in (0..self.dimension()).filter(|&i| (topology >> i) & 1 == 1) {
            out.extend(self.lower_boundary_along(c, axis)?);
        }
        Ok(out)
    }

    /// Union of the upper boundaries along every closed axis.
    pub fn upper_boundary(&self, c: SCell) -> Result<Vec<SCell>> {
        let topology = self.stopology(c);
        let mut out = Vec::new();
        for axis in (0..self.dimension()).filter(|&i| (topology >> i) & 1 == 0) {
            out.extend(self.upper_boundary_along(c, axis)?);
        }
        Ok(out)
    }

    pub fn sdisplay(&self, c: SCell) -> impl fmt::Display + '_ {
        self.display_raw(c.0, Some(self.sign_of(c) == Sign::Neg))
    }
}

/// Set of signed `r`-cells merged with cancellation of opposite cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedCellSet {
    cells: LutCharSet,
}

impl SignedCellSet {
    pub fn new(space: &SpaceLayout, dim: u32) -> Result<Self> {
        Ok(SignedCellSet {
            cells: LutCharSet::new(space, CellFamily::oriented(dim))?,
        })
    }

    pub fn space(&self) -> &SpaceLayout {
        self.cells.space()
    }

    /// Merges `cells` one by one: an incoming cell cancels its opposite if
    /// present, and is inserted otherwise. Receiving a cell that is
    /// already present with the same orientation is reported as
    /// [`Error::DuplicateOrientation`].
    pub fn merge_cancel(&mut self, cells: impl IntoIterator<Item = SCell>) -> Result<()> {
        let sign_bit = 1u64 << self.cells.space().coord_width();
        for c in cells {
            if self.cells.remove(c.0 ^ sign_bit)? {
                continue;
            }
            if !self.cells.add(c)? {
                return Err(Error::DuplicateOrientation(c.0));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn contains(&self, c: SCell) -> bool {
        self.cells.has(c.0)
    }

    pub fn len(&self) -> u64 {
        self.cells.cardinality()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Members in increasing code order.
    pub fn iter(&self) -> impl Iterator<Item = SCell> + '_ {
        self.cells.iter().map(SCell)
    }

    pub fn as_charset(&self) -> &LutCharSet {
        &self.cells
    }

    pub fn into_charset(self) -> LutCharSet {
        self.cells
    }

    /// Unsigned shadow of the set, as sorted codes.
    pub fn unsigned_codes(&self) -> Vec<u64> {
        let space = self.cells.space();
        let mut v: Vec<u64> = self.iter().map(|c| space.unsign(c).0).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

pub(crate) fn check_spel_set(object: &LutCharSet) -> Result<()> {
    if object.family() != CellFamily::spels(object.space()) {
        return Err(Error::FamilyMismatch);
    }
    Ok(())
}

/// True when the spel lies at least one spel away from every image border.
#[inline]
pub(crate) fn is_inner_spel(space: &SpaceLayout, code: u64) -> bool {
    (0..space.dimension()).all(|i| {
        let x = space.raw_coord(code, i);
        x >= 1 && x < space.coordmax(i)
    })
}

/// Boundary of an object: the lower boundaries of all its (positively
/// oriented) spels merged with cancellation. Linear in the number of spels.
pub fn object_boundary(object: &LutCharSet) -> Result<SignedCellSet> {
    check_spel_set(object)?;
    let space = object.space();
    let n = space.dimension();
    let mut boundary = SignedCellSet::new(space, n as u32 - 1)?;
    for code in object.iter() {
        if !is_inner_spel(space, code) {
            return Err(Error::ObjectTouchesBorder);
        }
        let p = space.with_sign(Cell(code), Sign::Pos);
        for axis in 0..n {
            boundary.merge_cancel(space.lower_boundary_along(p, axis)?)?;
        }
    }
    Ok(boundary)
}

/// Interior and exterior spels of a bel: reads `upper_boundary(b) = {+p, -q}`
/// and checks `p` in the object and `q` outside.
pub fn interior_exterior(object: &LutCharSet, b: SCell) -> Result<(Cell, Cell)> {
    check_spel_set(object)?;
    let space = object.space();
    let k = space.sorth_dir(b)?;
    let [first, second] = space.upper_boundary_along(b, k)?;
    let (p, q) = if space.sign_of(first) == Sign::Pos {
        (first, second)
    } else {
        (second, first)
    };
    let (p, q) = (space.unsign(p), space.unsign(q));
    if object.has(p.0) && !object.has(q.0) {
        Ok((p, q))
    } else {
        Err(Error::NotABel(b.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2() -> SpaceLayout {
        SpaceLayout::new(&[15, 15]).unwrap()
    }

    #[test]
    fn signed_packing() {
        let s = s2();
        let c = s.scode(0b11, Sign::Pos, &[2, 3]).unwrap();
        assert_eq!(c, SCell(0x632));
        assert_eq!(s.opposite(c), SCell(0x732));
        assert_eq!(s.opposite(s.opposite(c)), c);
        assert_eq!(s.unsign(SCell(0x732)), Cell(0x332));
        assert_eq!(s.with_sign(Cell(0x332), Sign::Neg), SCell(0x732));
        assert_eq!(s.sign_of(SCell(0x732)), Sign::Neg);
        assert_eq!(s.stopology(SCell(0x732)), 0b11);
        assert_eq!(s.sdisplay(SCell(0x732)).to_string(), "-(11; 3,2)");
    }

    #[test]
    fn lower_boundary_examples() {
        let s = s2();
        let p = s.scode(0b11, Sign::Pos, &[2, 3]).unwrap();
        let sc = |a, sg, x: &[u64]| s.scode(a, sg, x).unwrap();
        assert_eq!(
            s.lower_boundary_along(p, 1).unwrap(),
            [sc(0b01, Sign::Pos, &[2, 3]), sc(0b01, Sign::Neg, &[2, 4])]
        );
        assert_eq!(
            s.lower_boundary_along(p, 0).unwrap(),
            [sc(0b10, Sign::Neg, &[2, 3]), sc(0b10, Sign::Pos, &[3, 3])]
        );
        let np = s.opposite(p);
        assert_eq!(
            s.lower_boundary_along(np, 0).unwrap(),
            [sc(0b10, Sign::Pos, &[2, 3]), sc(0b10, Sign::Neg, &[3, 3])]
        );
        assert!(s
            .lower_boundary(sc(0, Sign::Pos, &[1, 1]))
            .unwrap()
            .is_empty());
        assert!(matches!(
            s.lower_boundary_along(sc(0b01, Sign::Pos, &[1, 1]), 1),
            Err(Error::WrongParity { axis: 1 })
        ));
    }

    #[test]
    fn upper_boundary_examples() {
        let s = s2();
        let sc = |a, sg, x: &[u64]| s.scode(a, sg, x).unwrap();
        let b = sc(0b01, Sign::Pos, &[2, 3]);
        assert_eq!(
            s.upper_boundary_along(b, 1).unwrap(),
            [sc(0b11, Sign::Pos, &[2, 3]), sc(0b11, Sign::Neg, &[2, 2])]
        );
        assert!(s
            .upper_boundary(sc(0b11, Sign::Pos, &[2, 3]))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn merge_cancel_rules() {
        let s = s2();
        let a = s.scode(0b01, Sign::Pos, &[2, 3]).unwrap();
        let mut set = SignedCellSet::new(&s, 1).unwrap();
        set.merge_cancel([a]).unwrap();
        set.merge_cancel([s.opposite(a)]).unwrap();
        assert!(set.is_empty());
        set.merge_cancel([a]).unwrap();
        assert_eq!(set.merge_cancel([a]), Err(Error::DuplicateOrientation(a.0)));

        let mut set = SignedCellSet::new(&s, 1).unwrap();
        for x in [2, 3] {
            let p = s.scode(0b11, Sign::Pos, &[x, 3]).unwrap();
            set.merge_cancel(s.lower_boundary(p).unwrap()).unwrap();
        }
        assert_eq!(set.len(), 6);
    }

    #[test]
    fn boundary_of_small_objects() {
        for dims in [&[7u64, 7][..], &[7, 7, 7]] {
            let s = SpaceLayout::new(dims).unwrap();
            let mut o = LutCharSet::new(&s, CellFamily::spels(&s)).unwrap();
            let center = vec![3; dims.len()];
            o.add(s.spel(&center).unwrap()).unwrap();
            let b = object_boundary(&o).unwrap();
            assert_eq!(b.len() as usize, 2 * dims.len());
            for bel in b.iter() {
                let (p, q) = interior_exterior(&o, bel).unwrap();
                assert_eq!(s.coords(p), center);
                assert_eq!(s.difference(p, q).norm1(), 1);
                assert!(matches!(
                    interior_exterior(&o, s.opposite(bel)),
                    Err(Error::NotABel(_))
                ));
            }
        }
    }

    #[test]
    fn exterior_of_plus_x_bel() {
        let s = SpaceLayout::new(&[7, 7, 7]).unwrap();
        let mut o = LutCharSet::new(&s, CellFamily::spels(&s)).unwrap();
        let p = s.spel(&[3, 3, 3]).unwrap();
        o.add(p).unwrap();
        let [_, far] = s
            .lower_boundary_along(s.with_sign(p, Sign::Pos), 0)
            .unwrap();
        let (inside, outside) = interior_exterior(&o, far).unwrap();
        assert_eq!(inside, p);
        assert_eq!(outside, s.spel(&[4, 3, 3]).unwrap());
    }

    #[test]
    fn border_objects_rejected() {
        let s = SpaceLayout::new(&[7, 7]).unwrap();
        let mut o = LutCharSet::new(&s, CellFamily::spels(&s)).unwrap();
        o.add(s.spel(&[0, 3]).unwrap()).unwrap();
        assert_eq!(object_boundary(&o).unwrap_err(), Error::ObjectTouchesBorder);
        let mut o = LutCharSet::new(&s, CellFamily::spels(&s)).unwrap();
        o.add(s.spel(&[7, 3]).unwrap()).unwrap();
        assert_eq!(object_boundary(&o).unwrap_err(), Error::ObjectTouchesBorder);
    }
}
