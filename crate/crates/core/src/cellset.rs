//! Characteristic-function sets of cells.
//!
//! A [`CharSet`] assigns one bit to every cell of a family (all spels,
//! all unoriented surfels, all oriented `r`-cells, ...). Its size depends
//! only on the image, never on the number of stored cells, and every
//! atomic operation is a single word access. Global set algebra runs as
//! word-wise boolean operations over the bit arrays.
//!
//! Two indexing schemes are provided:
//!
//! * [`MinCharSet`] indexes a cell by `code - min`, where `min`/`max` are
//!   the smallest and largest codes the family can produce.
//! * [`LutCharSet`] indexes a cell by `lut[topology] + sign_coords`, where
//!   `lut` maps each admissible topology word to the start of its block.
//!
//! [`OrderedCellSet`] is a plain ordered set used as a reference
//! implementation in tests.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::space::SpaceLayout;

/// Default upper bound on the memory of a single set (4 GiB).
pub const DEFAULT_ALLOCATION_CAP: u64 = 4 << 30;

const NO_BLOCK: u64 = u64::MAX;
const UNKNOWN: u64 = u64::MAX;

/// A family of cells sharing a dimension and a signedness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CellFamily {
    dim: u32,
    signed: bool,
}

impl CellFamily {
    /// Unsigned `r`-cells, or signed ones when `signed` is set.
    pub fn cells(dim: u32, signed: bool) -> Self {
        CellFamily { dim, signed }
    }

    pub fn spels(space: &SpaceLayout) -> Self {
        Self::cells(space.dimension() as u32, false)
    }

    pub fn unoriented_surfels(space: &SpaceLayout) -> Self {
        Self::cells(space.dimension() as u32 - 1, false)
    }

    pub fn oriented_surfels(space: &SpaceLayout) -> Self {
        Self::cells(space.dimension() as u32 - 1, true)
    }

    pub fn oriented(dim: u32) -> Self {
        Self::cells(dim, true)
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim
    }

    #[inline]
    pub fn is_signed(&self) -> bool {
        self.signed
    }

    /// The same family with the other signedness.
    pub fn with_signed(&self, signed: bool) -> Self {
        CellFamily { signed, ..*self }
    }

    /// Admissible topology words, increasing.
    pub fn topologies(&self, n: usize) -> Vec<u32> {
        (0u32..(1u32 << n))
            .filter(|a| a.count_ones() == self.dim)
            .collect()
    }

    #[inline]
    pub fn admits(&self, topology: u64, n: usize) -> bool {
        topology >> n == 0 && topology.count_ones() == self.dim
    }

    /// Bits below the topology word: coordinates plus the sign bit if any.
    #[inline]
    pub fn block_shift(&self, space: &SpaceLayout) -> u32 {
        space.coord_width() + self.signed as u32
    }

    /// Number of cells of the family in the image.
    pub fn capacity(&self, space: &SpaceLayout) -> u64 {
        let kinds = self.topologies(space.dimension()).len() as u64;
        kinds * space.spel_count() * if self.signed { 2 } else { 1 }
    }

    /// Short textual tag, `u<r>` or `s<r>`.
    pub fn tag(&self) -> String {
        format!("{}{}", if self.signed { 's' } else { 'u' }, self.dim)
    }

    pub fn parse_tag(tag: &str) -> Option<Self> {
        let signed = match tag.as_bytes().first()? {
            b'u' => false,
            b's' => true,
            _ => return None,
        };
        let dim = tag[1..].parse().ok()?;
        Some(CellFamily { dim, signed })
    }

    fn validate(&self, space: &SpaceLayout) -> Result<()> {
        if self.dim as usize > space.dimension() {
            return Err(Error::InvalidSpace(format!(
                "no {}-cells in a {}-dimensional space",
                self.dim,
                space.dimension()
            )));
        }
        Ok(())
    }
}

/// Fixed-size array of bits stored in `u64` words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BitTable {
    words: Vec<u64>,
    len: u64,
}

impl BitTable {
    pub(crate) fn new(len: u64) -> Self {
        BitTable {
            words: vec![0; len.div_ceil(64) as usize],
            len,
        }
    }

    #[inline]
    fn locate(i: u64) -> (usize, u64) {
        ((i >> 6) as usize, 1u64 << (i & 0x3f))
    }

    #[inline]
    pub(crate) fn get(&self, i: u64) -> bool {
        let (w, m) = Self::locate(i);
        self.words[w] & m != 0
    }

    #[inline]
    pub(crate) fn set(&mut self, i: u64) -> bool {
        let (w, m) = Self::locate(i);
        let old = self.words[w];
        self.words[w] = old | m;
        old & m != 0
    }

    #[inline]
    pub(crate) fn clear(&mut self, i: u64) -> bool {
        let (w, m) = Self::locate(i);
        let old = self.words[w];
        self.words[w] = old & !m;
        old & m != 0
    }

    #[inline]
    pub(crate) fn flip(&mut self, i: u64) -> bool {
        let (w, m) = Self::locate(i);
        let old = self.words[w];
        self.words[w] = old ^ m;
        old & m != 0
    }

    /// Sets every bit of `[start, end)`.
    pub(crate) fn fill_range(&mut self, start: u64, end: u64) {
        if start >= end {
            return;
        }
        let (first, last) = ((start >> 6) as usize, ((end - 1) >> 6) as usize);
        let head = u64::MAX << (start & 0x3f);
        let tail = u64::MAX >> (63 - ((end - 1) & 0x3f));
        if first == last {
            self.words[first] |= head & tail;
            return;
        }
        self.words[first] |= head;
        for w in &mut self.words[first + 1..last] {
            *w = u64::MAX;
        }
        self.words[last] |= tail;
    }

    pub(crate) fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Clears the padding bits past `len` in the last word.
    fn trim(&mut self) {
        let rem = self.len & 0x3f;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub(crate) fn iter_ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let base = (wi as u64) << 6;
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as u64;
                rest &= rest - 1;
                Some(base + b)
            })
        })
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

/// Mapping between cell codes and bit positions.
pub trait Indexing: Clone + Send + Sync + Sized {
    /// Name used in snapshot headers.
    const SCHEME: &'static str;

    fn build(space: &SpaceLayout, family: CellFamily) -> Self;

    /// Number of bits of the table.
    fn len(&self) -> u64;

    /// Bit position of `code`, or `None` if its topology is outside the
    /// family.
    fn index(&self, code: u64) -> Option<u64>;

    fn code(&self, index: u64) -> u64;
}

/// `index = code - min`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinIndex {
    min: u64,
    len: u64,
    block_shift: u32,
    dim: u32,
}

impl MinIndex {
    pub fn min_code(&self) -> u64 {
        self.min
    }

    pub fn max_code(&self) -> u64 {
        self.min + self.len - 1
    }
}

impl Indexing for MinIndex {
    const SCHEME: &'static str = "min";

    fn build(space: &SpaceLayout, family: CellFamily) -> Self {
        let topologies = family.topologies(space.dimension());
        let block_shift = family.block_shift(space);
        let lowest = *topologies
            .first()
            .expect("family has at least one topology") as u64;
        let highest = *topologies.last().unwrap() as u64;
        let min = lowest << block_shift;
        let max = (highest << block_shift) | ((1u64 << block_shift) - 1);
        MinIndex {
            min,
            len: max - min + 1,
            block_shift,
            dim: family.dim,
        }
    }

    fn len(&self) -> u64 {
        self.len
    }

    #[inline]
    fn index(&self, code: u64) -> Option<u64> {
        let i = code.wrapping_sub(self.min);
        if i >= self.len || (code >> self.block_shift).count_ones() != self.dim {
            return None;
        }
        Some(i)
    }

    #[inline]
    fn code(&self, index: u64) -> u64 {
        self.min + index
    }
}

/// `index = lut[topology] + sign_coords`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LutIndex {
    lut: Vec<u64>,
    topologies: Vec<u32>,
    block_shift: u32,
}

impl LutIndex {
    /// Start of the block of `topology`, if admissible.
    pub fn block_offset(&self, topology: u32) -> Option<u64> {
        self.lut
            .get(topology as usize)
            .copied()
            .filter(|&o| o != NO_BLOCK)
    }
}

impl Indexing for LutIndex {
    const SCHEME: &'static str = "lut";

    fn build(space: &SpaceLayout, family: CellFamily) -> Self {
        let n = space.dimension();
        let topologies = family.topologies(n);
        let block_shift = family.block_shift(space);
        let mut lut = vec![NO_BLOCK; 1 << n];
        for (k, &a) in topologies.iter().enumerate() {
            lut[a as usize] = (k as u64) << block_shift;
        }
        LutIndex {
            lut,
            topologies,
            block_shift,
        }
    }

    fn len(&self) -> u64 {
        (self.topologies.len() as u64) << self.block_shift
    }

    #[inline]
    fn index(&self, code: u64) -> Option<u64> {
        let base = *self.lut.get((code >> self.block_shift) as usize)?;
        if base == NO_BLOCK {
            return None;
        }
        Some(base | (code & ((1u64 << self.block_shift) - 1)))
    }

    #[inline]
    fn code(&self, index: u64) -> u64 {
        let block = (index >> self.block_shift) as usize;
        ((self.topologies[block] as u64) << self.block_shift)
            | (index & ((1u64 << self.block_shift) - 1))
    }
}

/// Common interface of the cell set containers.
pub trait CellSet {
    fn space(&self) -> &SpaceLayout;
    fn family(&self) -> CellFamily;
    fn contains(&self, code: impl Into<u64>) -> Result<bool>;
    /// Returns `true` if the cell was not already present.
    fn add(&mut self, code: impl Into<u64>) -> Result<bool>;
    /// Returns `true` if the cell was present.
    fn remove(&mut self, code: impl Into<u64>) -> Result<bool>;
    /// Flips membership and returns the previous state.
    fn toggle(&mut self, code: impl Into<u64>) -> Result<bool>;
    fn cardinality(&self) -> u64;
    /// Member codes in increasing order.
    fn codes(&self) -> Vec<u64>;
}

/// Bit-array characteristic set over a cell family.
pub struct CharSet<I: Indexing> {
    space: SpaceLayout,
    family: CellFamily,
    indexing: I,
    bits: BitTable,
    // members of the family inside the bit range; None when every bit is one
    valid: OnceLock<Option<Arc<BitTable>>>,
    card: AtomicU64,
}

pub type MinCharSet = CharSet<MinIndex>;
pub type LutCharSet = CharSet<LutIndex>;

impl<I: Indexing> Clone for CharSet<I> {
    fn clone(&self) -> Self {
        CharSet {
            space: self.space.clone(),
            family: self.family,
            indexing: self.indexing.clone(),
            bits: self.bits.clone(),
            valid: self.valid.clone(),
            card: AtomicU64::new(self.card.load(Ordering::Relaxed)),
        }
    }
}

impl<I: Indexing> std::fmt::Debug for CharSet<I> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CharSet")
            .field("scheme", &I::SCHEME)
            .field("family", &self.family)
            .field("space", &self.space.coordmaxes())
            .field("bits", &self.bits.len)
            .finish()
    }
}

impl<I: Indexing> PartialEq for CharSet<I> {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.family == other.family && self.bits == other.bits
    }
}

impl<I: Indexing> Eq for CharSet<I> {}

impl<I: Indexing> CharSet<I> {
    /// Empty set over `family`, limited to [`DEFAULT_ALLOCATION_CAP`] bytes.
    pub fn new(space: &SpaceLayout, family: CellFamily) -> Result<Self> {
        Self::with_cap(space, family, DEFAULT_ALLOCATION_CAP)
    }

    pub fn with_cap(space: &SpaceLayout, family: CellFamily, max_bytes: u64) -> Result<Self> {
        family.validate(space)?;
        let indexing = I::build(space, family);
        let len = indexing.len();
        let bytes = len.div_ceil(64) * 8;
        if bytes > max_bytes {
            return Err(Error::SpaceTooLarge(format!(
                "{} set needs {bytes} bytes, cap is {max_bytes}",
                I::SCHEME
            )));
        }
        Ok(CharSet {
            space: space.clone(),
            family,
            indexing,
            bits: BitTable::new(len),
            valid: OnceLock::new(),
            card: AtomicU64::new(0),
        })
    }

    pub fn indexing(&self) -> &I {
        &self.indexing
    }

    /// Number of bits of the table (`s`).
    pub fn size_bits(&self) -> u64 {
        self.bits.len
    }

    /// Memory of the bit table, rounded up to whole words.
    pub fn allocated_bytes(&self) -> u64 {
        self.bits.words.len() as u64 * 8
    }

    /// Number of cells of the family that fit in the image.
    pub fn capacity(&self) -> u64 {
        self.family.capacity(&self.space)
    }

    pub fn words(&self) -> &[u64] {
        self.bits.words()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.words.iter().all(|&w| w == 0)
    }

    pub fn clear(&mut self) {
        self.bits.words.iter_mut().for_each(|w| *w = 0);
        *self.card.get_mut() = 0;
    }

    #[inline]
    fn slot(&self, code: u64) -> Result<u64> {
        self.indexing.index(code).ok_or(Error::NotInFamily(code))
    }

    /// Membership test for a code already known to be in the family.
    #[inline]
    pub fn has(&self, code: u64) -> bool {
        match self.indexing.index(code) {
            Some(i) => self.bits.get(i),
            None => false,
        }
    }

    /// Raw bit at table position `index`.
    #[inline]
    pub(crate) fn bit_at(&self, index: u64) -> bool {
        self.bits.get(index)
    }

    /// Sets the bits of table positions `[start, end)`.
    pub(crate) fn fill_index_range(&mut self, start: u64, end: u64) {
        self.bits.fill_range(start, end);
        self.invalidate();
    }

    /// Insertion for a code already known to be in the family.
    #[inline]
    pub(crate) fn insert_unchecked(&mut self, code: u64) -> bool {
        let i = self.indexing.index(code).expect("code in family");
        *self.card.get_mut() = UNKNOWN;
        !self.bits.set(i)
    }

    #[inline]
    fn invalidate(&mut self) {
        *self.card.get_mut() = UNKNOWN;
    }

    /// Members in increasing code order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter_ones().map(|i| self.indexing.code(i))
    }

    fn valid_mask(&self) -> Option<&BitTable> {
        self.valid
            .get_or_init(|| self.compute_valid_mask().map(Arc::new))
            .as_deref()
    }

    fn compute_valid_mask(&self) -> Option<BitTable> {
        let space = &self.space;
        let n = space.dimension();
        let topologies = self.family.topologies(n);
        let contiguous = topologies.windows(2).all(|w| w[1] == w[0] + 1);
        if space.is_dense() && (I::SCHEME == LutIndex::SCHEME || contiguous) {
            return None;
        }
        let mut mask = BitTable::new(self.bits.len);
        let cw = space.coord_width();
        let signs: u64 = if self.family.signed { 2 } else { 1 };
        let block_shift = self.family.block_shift(space);
        for &a in &topologies {
            for s in 0..signs {
                let base = ((a as u64) << block_shift) | (s << cw);
                let start = self.indexing.index(base).expect("family topology");
                if space.is_dense() {
                    mask.fill_range(start, start + (1u64 << cw));
                    continue;
                }
                // odometer over valid coordinates, axis 0 fastest
                let mut coords = vec![0u64; n];
                'outer: loop {
                    let row = start + space.pack_coords(&coords).expect("valid coordinates");
                    mask.fill_range(row, row + space.coordmax(0) + 1);
                    for i in 1..n {
                        if coords[i] < space.coordmax(i) {
                            coords[i] += 1;
                            continue 'outer;
                        }
                        coords[i] = 0;
                    }
                    break;
                }
            }
        }
        Some(mask)
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.space != other.space || self.family != other.family {
            return Err(Error::FamilyMismatch);
        }
        Ok(())
    }

    fn combine_with(&mut self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Result<()> {
        self.check_compatible(other)?;
        for (a, &b) in self.bits.words.iter_mut().zip(&other.bits.words) {
            *a = op(*a, b);
        }
        self.invalidate();
        Ok(())
    }

    pub fn union_with(&mut self, other: &Self) -> Result<()> {
        self.combine_with(other, |a, b| a | b)
    }

    pub fn intersect_with(&mut self, other: &Self) -> Result<()> {
        self.combine_with(other, |a, b| a & b)
    }

    pub fn difference_with(&mut self, other: &Self) -> Result<()> {
        self.combine_with(other, |a, b| a & !b)
    }

    pub fn symmetric_difference_with(&mut self, other: &Self) -> Result<()> {
        self.combine_with(other, |a, b| a ^ b)
    }

    /// Complement relative to the cells of the family.
    pub fn complement_in_place(&mut self) {
        // the mask lives behind an Arc, clone the handle to release self
        let mask = self
            .valid
            .get_or_init(|| self.compute_valid_mask().map(Arc::new))
            .clone();
        match mask {
            Some(m) => {
                for (a, &v) in self.bits.words.iter_mut().zip(&m.words) {
                    *a = !*a & v;
                }
            }
            None => {
                for a in &mut self.bits.words {
                    *a = !*a;
                }
                self.bits.trim();
            }
        }
        self.invalidate();
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        let mut r = self.clone();
        r.union_with(other)?;
        Ok(r)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        let mut r = self.clone();
        r.intersect_with(other)?;
        Ok(r)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        let mut r = self.clone();
        r.difference_with(other)?;
        Ok(r)
    }

    pub fn complement(&self) -> Self {
        let mut r = self.clone();
        r.complement_in_place();
        r
    }

    /// True if every member is a valid cell of the image.
    pub fn is_within_family(&self) -> bool {
        match self.valid_mask() {
            None => true,
            Some(m) => self
                .bits
                .words
                .iter()
                .zip(&m.words)
                .all(|(&a, &v)| a & !v == 0),
        }
    }

    fn header(&self) -> String {
        let mut h = format!(
            "CSET1 {}-{} {}",
            I::SCHEME,
            self.family.tag(),
            self.space.dimension()
        );
        for m in self.space.coordmaxes() {
            h.push_str(&format!(" {m}"));
        }
        h.push('\n');
        h
    }

    /// Binary snapshot: ASCII header line followed by the little-endian
    /// word array.
    pub fn to_snapshot(&self) -> Vec<u8> {
        let header = self.header();
        let mut out = Vec::with_capacity(header.len() + self.bits.words.len() * 8);
        out.extend_from_slice(header.as_bytes());
        for w in &self.bits.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn from_snapshot(bytes: &[u8]) -> Result<Self> {
        const MAGIC: &str = "CSET1";
        let (fields, payload) = split_header(bytes, MAGIC)?;
        if fields.len() < 2 {
            return Err(Error::HeaderMismatch("missing family or dimension".into()));
        }
        let (scheme, tag) = fields[0]
            .split_once('-')
            .ok_or_else(|| Error::HeaderMismatch(format!("bad family tag {}", fields[0])))?;
        if scheme != I::SCHEME {
            return Err(Error::HeaderMismatch(format!(
                "snapshot uses {scheme} indexing, expected {}",
                I::SCHEME
            )));
        }
        let family = CellFamily::parse_tag(tag)
            .ok_or_else(|| Error::HeaderMismatch(format!("bad family tag {tag}")))?;
        let coordmax = parse_dims(&fields[1..])?;
        let space = SpaceLayout::new(&coordmax)?;
        let mut set = Self::new(&space, family)?;
        let expected = set.bits.words.len() * 8;
        if payload.len() != expected {
            return Err(Error::TruncatedPayload {
                expected,
                got: payload.len(),
            });
        }
        for (w, chunk) in set.bits.words.iter_mut().zip(payload.chunks_exact(8)) {
            *w = u64::from_le_bytes(chunk.try_into().unwrap());
        }
        set.invalidate();
        Ok(set)
    }
}

/// Splits `MAGIC field...\n payload`, checking the magic word.
pub(crate) fn split_header<'a>(
    bytes: &'a [u8],
    magic: &'static str,
) -> Result<(Vec<&'a str>, &'a [u8])> {
    if !bytes.starts_with(magic.as_bytes()) {
        return Err(Error::BadMagic { expected: magic });
    }
    let end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::HeaderMismatch("unterminated header".into()))?;
    let line = std::str::from_utf8(&bytes[..end])
        .map_err(|_| Error::HeaderMismatch("header is not ASCII".into()))?;
    let mut fields = line.split_ascii_whitespace();
    if fields.next() != Some(magic) {
        return Err(Error::BadMagic { expected: magic });
    }
    Ok((fields.collect(), &bytes[end + 1..]))
}

/// Parses `<n> <v_0> ... <v_{n-1}>`.
pub(crate) fn parse_dims(fields: &[&str]) -> Result<Vec<u64>> {
    let n: usize = fields
        .first()
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| Error::HeaderMismatch("bad dimension".into()))?;
    if fields.len() != n + 1 {
        return Err(Error::HeaderMismatch(format!(
            "dimension {n} but {} extents",
            fields.len() - 1
        )));
    }
    fields[1..]
        .iter()
        .map(|f| {
            f.parse()
                .map_err(|_| Error::HeaderMismatch(format!("bad extent {f}")))
        })
        .collect()
}

impl<I: Indexing> CellSet for CharSet<I> {
    fn space(&self) -> &SpaceLayout {
        &self.space
    }

    fn family(&self) -> CellFamily {
        self.family
    }

    #[inline]
    fn contains(&self, code: impl Into<u64>) -> Result<bool> {
        let i = self.slot(code.into())?;
        Ok(self.bits.get(i))
    }

    #[inline]
    fn add(&mut self, code: impl Into<u64>) -> Result<bool> {
        let i = self.slot(code.into())?;
        self.invalidate();
        Ok(!self.bits.set(i))
    }

    #[inline]
    fn remove(&mut self, code: impl Into<u64>) -> Result<bool> {
        let i = self.slot(code.into())?;
        self.invalidate();
        Ok(self.bits.clear(i))
    }

    #[inline]
    fn toggle(&mut self, code: impl Into<u64>) -> Result<bool> {
        let i = self.slot(code.into())?;
        self.invalidate();
        Ok(self.bits.flip(i))
    }

    fn cardinality(&self) -> u64 {
        let cached = self.card.load(Ordering::Relaxed);
        if cached != UNKNOWN {
            return cached;
        }
        let c = self.bits.count_ones();
        self.card.store(c, Ordering::Relaxed);
        c
    }

    fn codes(&self) -> Vec<u64> {
        self.iter().collect()
    }
}

/// Ordered-set reference container with the same semantics as
/// [`CharSet`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedCellSet {
    space: SpaceLayout,
    family: CellFamily,
    cells: BTreeSet<u64>,
}

impl OrderedCellSet {
    pub fn new(space: &SpaceLayout, family: CellFamily) -> Result<Self> {
        family.validate(space)?;
        Ok(OrderedCellSet {
            space: space.clone(),
            family,
            cells: BTreeSet::new(),
        })
    }

    fn check(&self, code: u64) -> Result<u64> {
        let shift = self.family.block_shift(&self.space);
        if !self.family.admits(code >> shift, self.space.dimension()) {
            return Err(Error::NotInFamily(code));
        }
        Ok(code)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.space != other.space || self.family != other.family {
            return Err(Error::FamilyMismatch);
        }
        Ok(())
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            cells: self.cells.union(&other.cells).copied().collect(),
            ..self.clone()
        })
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            cells: self.cells.intersection(&other.cells).copied().collect(),
            ..self.clone()
        })
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            cells: self.cells.difference(&other.cells).copied().collect(),
            ..self.clone()
        })
    }

    /// Complement relative to the family; enumerates every family cell.
    pub fn complement(&self) -> Self {
        let all = all_family_codes(&self.space, self.family);
        Self {
            cells: all
                .into_iter()
                .filter(|c| !self.cells.contains(c))
                .collect(),
            ..self.clone()
        }
    }
}

impl CellSet for OrderedCellSet {
    fn space(&self) -> &SpaceLayout {
        &self.space
    }

    fn family(&self) -> CellFamily {
        self.family
    }

    fn contains(&self, code: impl Into<u64>) -> Result<bool> {
        let c = self.check(code.into())?;
        Ok(self.cells.contains(&c))
    }

    fn add(&mut self, code: impl Into<u64>) -> Result<bool> {
        let c = self.check(code.into())?;
        Ok(self.cells.insert(c))
    }

    fn remove(&mut self, code: impl Into<u64>) -> Result<bool> {
        let c = self.check(code.into())?;
        Ok(self.cells.remove(&c))
    }

    fn toggle(&mut self, code: impl Into<u64>) -> Result<bool> {
        let c = self.check(code.into())?;
        if self.cells.remove(&c) {
            Ok(true)
        } else {
            self.cells.insert(c);
            Ok(false)
        }
    }

    fn cardinality(&self) -> u64 {
        self.cells.len() as u64
    }

    fn codes(&self) -> Vec<u64> {
        self.cells.iter().copied().collect()
    }
}

/// Every code of `family` in `space`, increasing. Intended for small spaces.
pub fn all_family_codes(space: &SpaceLayout, family: CellFamily) -> Vec<u64> {
    let n = space.dimension();
    let cw = space.coord_width();
    let shift = family.block_shift(space);
    let mut out = Vec::new();
    for a in family.topologies(n) {
        for s in 0..(1 + family.is_signed() as u64) {
            let base = ((a as u64) << shift) | (s << cw);
            let mut coords = vec![0u64; n];
            'outer: loop {
                out.push(base | space.pack_coords(&coords).unwrap());
                for (i, c) in coords.iter_mut().enumerate() {
                    if *c < space.coordmax(i) {
                        *c += 1;
                        continue 'outer;
                    }
                    *c = 0;
                }
                break;
            }
        }
    }
    out.sort_unstable();
    out
}
