//! Followers, bel adjacencies and boundary extraction.
//!
//! For a bel `b` with `upper_boundary(b) = {+p, -q}` and a tracking axis
//! `j != orth(b)`, the three direct followers of `b` along `j` are, in
//! order: the face of `p` orthogonal to `j`, the translate of `b` along
//! `j`, and the face of `q` orthogonal to `j`, all taken on the side of the
//! direct link (the positive cell of the lower boundary of `b` along `j`).
//! With `p' = p + delta e_j` and `q' = q + delta e_j`, the first is a bel iff
//! `p'` is outside the object, the second iff `p'` is inside and `q'` is
//! outside, the third iff `q'` is inside. Interior adjacency keeps the first
//! follower that is a bel, exterior adjacency the last.

use std::collections::{HashMap, VecDeque};

use crate::cellset::{CellFamily, CellSet, LutCharSet};
use crate::error::{Error, Result};
use crate::oriented::{check_spel_set, interior_exterior, SCell, Sign};
use crate::space::{Cell, SpaceLayout};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AdjacencyMode {
    Interior,
    Exterior,
}

impl AdjacencyMode {
    pub fn flipped(self) -> Self {
        match self {
            AdjacencyMode::Interior => AdjacencyMode::Exterior,
            AdjacencyMode::Exterior => AdjacencyMode::Interior,
        }
    }
}

/// Interior or exterior bel adjacency chosen per pair of axes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BelAdjacency {
    n: usize,
    table: Vec<AdjacencyMode>,
}

impl BelAdjacency {
    pub fn uniform(n: usize, mode: AdjacencyMode) -> Self {
        BelAdjacency {
            n,
            table: vec![mode; n * n],
        }
    }

    pub fn interior(n: usize) -> Self {
        Self::uniform(n, AdjacencyMode::Interior)
    }

    pub fn exterior(n: usize) -> Self {
        Self::uniform(n, AdjacencyMode::Exterior)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, i: usize, j: usize, mode: AdjacencyMode) {
        self.table[i * self.n + j] = mode;
        self.table[j * self.n + i] = mode;
    }

    #[inline]
    pub fn mode(&self, i: usize, j: usize) -> AdjacencyMode {
        self.table[i * self.n + j]
    }

    /// Every combination of modes over the unordered axis pairs.
    pub fn all_configs(n: usize) -> Vec<Self> {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        (0u32..(1 << pairs.len()))
            .map(|mask| {
                let mut a = Self::interior(n);
                for (k, &(i, j)) in pairs.iter().enumerate() {
                    if (mask >> k) & 1 == 1 {
                        a.set(i, j, AdjacencyMode::Exterior);
                    }
                }
                a
            })
            .collect()
    }

    /// Parses `interior`, `exterior`, or a list such as
    /// `0,1=interior;1,2=exterior` where unlisted pairs are interior.
    pub fn parse(n: usize, spec: &str) -> Result<Self> {
        let mode = |s: &str| match s.trim() {
            "interior" | "int" => Ok(AdjacencyMode::Interior),
            "exterior" | "ext" => Ok(AdjacencyMode::Exterior),
            other => Err(Error::BadAdjacencySpec(format!("unknown mode {other:?}"))),
        };
        let spec = spec.trim();
        if !spec.contains('=') {
            return Ok(Self::uniform(n, mode(spec)?));
        }
        let mut a = Self::interior(n);
        for item in spec.split(';').filter(|s| !s.trim().is_empty()) {
            let (pair, m) = item
                .split_once('=')
                .ok_or_else(|| Error::BadAdjacencySpec(item.to_string()))?;
            let (i, j) = pair
                .split_once(',')
                .ok_or_else(|| Error::BadAdjacencySpec(item.to_string()))?;
            let parse_axis = |s: &str| -> Result<usize> {
                let v: usize = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::BadAdjacencySpec(format!("bad axis {s:?}")))?;
                if v >= n {
                    return Err(Error::BadAdjacencySpec(format!("axis {v} >= {n}")));
                }
                Ok(v)
            };
            let (i, j) = (parse_axis(i)?, parse_axis(j)?);
            if i == j {
                return Err(Error::BadAdjacencySpec(format!(
                    "pair {i},{j} is degenerate"
                )));
            }
            a.set(i, j, mode(m)?);
        }
        Ok(a)
    }
}

/// Local geometry of a bel with respect to a tracking axis.
#[derive(Clone, Copy, Debug)]
struct BelFrame {
    /// interior spel (unsigned code)
    p: u64,
    /// exterior spel (unsigned code)
    q: u64,
    orth: usize,
    axis: usize,
    /// side of the direct link along `axis`
    delta: i64,
}

impl BelFrame {
    fn new(space: &SpaceLayout, b: SCell, axis: usize) -> Result<Self> {
        let orth = space.sorth_dir(b)?;
        space.check_axis(axis)?;
        if axis == orth {
            return Err(Error::WrongParity { axis });
        }
        let s = space.sign_of(b);
        let topology = space.stopology(b);
        let x = space.unsign(b).0 | (1u64 << (space.coord_width() as usize + orth));
        // upper boundary along orth: s tau at x, -s tau at x - e_orth
        let below = space.raw_translate(x, orth, -1)?;
        let (p, q) = if s * space.axis_parity(topology, orth) == Sign::Pos {
            (x, below)
        } else {
            (below, x)
        };
        // lower boundary along axis: s tau' at x_axis, -s tau' at x_axis + 1
        let delta = if s * space.axis_parity(topology, axis) == Sign::Pos {
            -1
        } else {
            1
        };
        Ok(BelFrame {
            p,
            q,
            orth,
            axis,
            delta,
        })
    }

    /// Face of spel `spel`, oriented `sign`, orthogonal to `axis` on the
    /// `delta` side, with the orientation it receives in the lower
    /// boundary of `sign * spel`.
    fn face(&self, space: &SpaceLayout, spel: u64, sign: Sign) -> Result<SCell> {
        let full = space.with_sign(Cell(spel), sign);
        let [low, high] = space.lower_boundary_along(full, self.axis)?;
        Ok(if self.delta < 0 { low } else { high })
    }

    fn followers(&self, space: &SpaceLayout, b: SCell) -> Result<[SCell; 3]> {
        Ok([
            self.face(space, self.p, Sign::Pos)?,
            space.stranslate(b, self.axis, self.delta)?,
            self.face(space, self.q, Sign::Neg)?,
        ])
    }

    fn p_next(&self, space: &SpaceLayout) -> Result<u64> {
        space.raw_translate(self.p, self.axis, self.delta)
    }

    fn q_next(&self, space: &SpaceLayout) -> Result<u64> {
        space.raw_translate(self.q, self.axis, self.delta)
    }

    /// Position (0, 1 or 2) of the adjacent bel among the followers,
    /// from at most two membership queries.
    fn pick(
        &self,
        space: &SpaceLayout,
        inside: impl Fn(u64) -> bool,
        mode: AdjacencyMode,
    ) -> Result<usize> {
        let p_in = inside(self.p_next(space)?);
        Ok(match mode {
            AdjacencyMode::Interior => {
                if !p_in {
                    0
                } else if !inside(self.q_next(space)?) {
                    1
                } else {
                    2
                }
            }
            AdjacencyMode::Exterior => {
                if inside(self.q_next(space)?) {
                    2
                } else if p_in {
                    1
                } else {
                    0
                }
            }
        })
    }

    fn follower(&self, space: &SpaceLayout, b: SCell, k: usize) -> Result<SCell> {
        match k {
            0 => self.face(space, self.p, Sign::Pos),
            1 => space.stranslate(b, self.axis, self.delta),
            _ => self.face(space, self.q, Sign::Neg),
        }
    }
}

/// Ordered direct followers of a surfel along `axis`.
pub fn direct_followers(space: &SpaceLayout, b: SCell, axis: usize) -> Result<[SCell; 3]> {
    BelFrame::new(space, b, axis)?.followers(space, b)
}

/// Ordered indirect followers: the negated direct followers of `-b`.
pub fn indirect_followers(space: &SpaceLayout, b: SCell, axis: usize) -> Result<[SCell; 3]> {
    let f = direct_followers(space, space.opposite(b), axis)?;
    Ok(f.map(|c| space.opposite(c)))
}

/// Interior spel and the direct-direction spel data of a bel, checked
/// against the object.
fn checked_frame(object: &LutCharSet, b: SCell, axis: usize) -> Result<BelFrame> {
    let space = object.space();
    let frame = BelFrame::new(space, b, axis)?;
    if !object.has(frame.p) || object.has(frame.q) {
        return Err(Error::NotABel(b.0));
    }
    Ok(frame)
}

/// Direct adjacent bel of `b` along `axis` in the given mode.
pub fn direct_adjacent_bel(
    object: &LutCharSet,
    b: SCell,
    axis: usize,
    mode: AdjacencyMode,
) -> Result<SCell> {
    check_spel_set(object)?;
    let frame = checked_frame(object, b, axis)?;
    let space = object.space();
    let k = frame.pick(space, |c| object.has(c), mode)?;
    frame.follower(space, b, k)
}

/// The bel whose direct adjacent bel (in the same plane and mode) is `b`.
pub fn indirect_adjacent_bel(
    object: &LutCharSet,
    b: SCell,
    axis: usize,
    mode: AdjacencyMode,
) -> Result<SCell> {
    check_spel_set(object)?;
    let space = object.space();
    checked_frame(object, b, axis)?;
    // -b is a bel of the complement; its direct adjacency in the flipped
    // mode, negated, inverts the direct adjacency of the object
    let nb = space.opposite(b);
    let frame = BelFrame::new(space, nb, axis)?;
    let k = frame.pick(space, |c| !object.has(c), mode.flipped())?;
    Ok(space.opposite(frame.follower(space, nb, k)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SurfelStorage {
    Signed,
    Unsigned,
}

impl SurfelStorage {
    pub fn family(self, space: &SpaceLayout) -> CellFamily {
        match self {
            SurfelStorage::Signed => CellFamily::oriented_surfels(space),
            SurfelStorage::Unsigned => CellFamily::unoriented_surfels(space),
        }
    }

    #[inline]
    fn encode(self, space: &SpaceLayout, b: SCell) -> u64 {
        match self {
            SurfelStorage::Signed => b.0,
            SurfelStorage::Unsigned => space.unsign(b).0,
        }
    }
}

/// Boundary extraction algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Sweep of the whole image.
    ScanA,
    /// Sweep of the bounding box of the object.
    ScanB,
    /// Tracking along direct and indirect adjacencies.
    TrackA,
    /// Tracking along direct adjacencies with a visited set.
    TrackB,
    /// Tracking along direct adjacencies with a tail multiset.
    TrackC,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::ScanA,
        Method::ScanB,
        Method::TrackA,
        Method::TrackB,
        Method::TrackC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::ScanA => "scan-a",
            Method::ScanB => "scan-b",
            Method::TrackA => "track-a",
            Method::TrackB => "track-b",
            Method::TrackC => "track-c",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == s)
    }

    pub fn is_tracking(self) -> bool {
        matches!(self, Method::TrackA | Method::TrackB | Method::TrackC)
    }
}

#[derive(Clone, Debug)]
pub struct TrackResult {
    pub surfels: LutCharSet,
    /// Bels taken out of the queue.
    pub visited: u64,
    /// Adjacency computations performed.
    pub moves: u64,
    /// Occurrences left in the tail multiset (Track C only, 0 otherwise).
    pub tail_left: u64,
}

fn start_checks(object: &LutCharSet, start: SCell, adjacency: &BelAdjacency) -> Result<()> {
    check_spel_set(object)?;
    if adjacency.dimension() != object.space().dimension() {
        return Err(Error::WrongDimension {
            expected: object.space().dimension(),
            got: adjacency.dimension(),
        });
    }
    interior_exterior(object, start)?;
    Ok(())
}

#[inline]
fn next_bel(
    object: &LutCharSet,
    adjacency: &BelAdjacency,
    b: SCell,
    axis: usize,
) -> Result<(SCell, usize)> {
    let space = object.space();
    let frame = BelFrame::new(space, b, axis)?;
    let mode = adjacency.mode(frame.orth, axis);
    let k = frame.pick(space, |c| object.has(c), mode)?;
    Ok((frame.follower(space, b, k)?, frame.orth))
}

/// Track (B): breadth-first traversal of the direct bel adjacency with a
/// visited surfel set. The component of `start` must be closed.
pub fn track_closed(
    object: &LutCharSet,
    start: SCell,
    adjacency: &BelAdjacency,
    storage: SurfelStorage,
) -> Result<TrackResult> {
    start_checks(object, start, adjacency)?;
    let space = object.space();
    let n = space.dimension();
    let mut surfels = LutCharSet::new(space, storage.family(space))?;
    let mut queue = VecDeque::new();
    surfels.insert_unchecked(storage.encode(space, start));
    queue.push_back(start);
    let (mut visited, mut moves) = (0, 0);
    while let Some(b) = queue.pop_front() {
        visited += 1;
        let orth = space.sorth_dir(b)?;
        for axis in (0..n).filter(|&j| j != orth) {
            let (q, _) = next_bel(object, adjacency, b, axis)?;
            moves += 1;
            if surfels.insert_unchecked(storage.encode(space, q)) {
                queue.push_back(q);
            }
        }
    }
    Ok(TrackResult {
        surfels,
        visited,
        moves,
        tail_left: 0,
    })
}

/// Track (C): same traversal as [`track_closed`], but repeated hits are
/// detected with a tail multiset instead of the output set. Every bel is
/// reached by exactly `n - 1` direct adjacencies, so the start bel enters
/// the tail `n - 1` times and every discovered bel `n - 2` times.
pub fn track_closed_tail(
    object: &LutCharSet,
    start: SCell,
    adjacency: &BelAdjacency,
    storage: SurfelStorage,
) -> Result<TrackResult> {
    start_checks(object, start, adjacency)?;
    let space = object.space();
    let n = space.dimension();
    let mut surfels = LutCharSet::new(space, storage.family(space))?;
    let mut queue = VecDeque::new();
    let mut tail: HashMap<u64, u32> = HashMap::new();
    surfels.insert_unchecked(storage.encode(space, start));
    queue.push_back(start);
    if n > 1 {
        tail.insert(start.0, n as u32 - 1);
    }
    let (mut visited, mut moves) = (0, 0);
    while let Some(b) = queue.pop_front() {
        visited += 1;
        let orth = space.sorth_dir(b)?;
        for axis in (0..n).filter(|&j| j != orth) {
            let (q, _) = next_bel(object, adjacency, b, axis)?;
            moves += 1;
            if let Some(count) = tail.get_mut(&q.0) {
                *count -= 1;
                if *count == 0 {
                    tail.remove(&q.0);
                }
            } else {
                let fresh = surfels.insert_unchecked(storage.encode(space, q));
                debug_assert!(fresh, "bel reached more than n - 1 times");
                queue.push_back(q);
                if n > 2 {
                    tail.insert(q.0, n as u32 - 2);
                }
            }
        }
    }
    Ok(TrackResult {
        surfels,
        visited,
        moves,
        tail_left: tail.values().map(|&c| c as u64).sum(),
    })
}

/// Track (A): breadth-first traversal of both direct and indirect bel
/// adjacencies with a visited surfel set.
pub fn track_any(
    object: &LutCharSet,
    start: SCell,
    adjacency: &BelAdjacency,
    storage: SurfelStorage,
) -> Result<TrackResult> {
    start_checks(object, start, adjacency)?;
    let space = object.space();
    let n = space.dimension();
    let mut surfels = LutCharSet::new(space, storage.family(space))?;
    let mut queue = VecDeque::new();
    surfels.insert_unchecked(storage.encode(space, start));
    queue.push_back(start);
    let (mut visited, mut moves) = (0, 0);
    while let Some(b) = queue.pop_front() {
        visited += 1;
        let orth = space.sorth_dir(b)?;
        for axis in (0..n).filter(|&j| j != orth) {
            let mode = adjacency.mode(orth, axis);
            let (direct, _) = next_bel(object, adjacency, b, axis)?;
            let nb = space.opposite(b);
            let frame = BelFrame::new(space, nb, axis)?;
            let k = frame.pick(space, |c| !object.has(c), mode.flipped())?;
            let indirect = space.opposite(frame.follower(space, nb, k)?);
            moves += 2;
            for q in [direct, indirect] {
                if surfels.insert_unchecked(storage.encode(space, q)) {
                    queue.push_back(q);
                }
            }
        }
    }
    Ok(TrackResult {
        surfels,
        visited,
        moves,
        tail_left: 0,
    })
}

/// Runs one of the tracking algorithms.
pub fn track(
    method: Method,
    object: &LutCharSet,
    start: SCell,
    adjacency: &BelAdjacency,
    storage: SurfelStorage,
) -> Result<TrackResult> {
    match method {
        Method::TrackA => track_any(object, start, adjacency, storage),
        Method::TrackB => track_closed(object, start, adjacency, storage),
        Method::TrackC => track_closed_tail(object, start, adjacency, storage),
        _ => Err(Error::InvalidSpace(format!(
            "{} is not a tracking method",
            method.name()
        ))),
    }
}

/// Walks along `+x_0` from an object spel to the first spel outside and
/// returns the bel between them.
pub fn find_start_bel(object: &LutCharSet, inside: Cell) -> Result<SCell> {
    check_spel_set(object)?;
    let space = object.space();
    if !object.has(inside.0) {
        return Err(Error::NotInObject(inside.0));
    }
    let mut x = inside.0;
    loop {
        let next = space
            .raw_translate(x, 0, 1)
            .map_err(|_| Error::ObjectTouchesBorder)?;
        if !object.has(next) {
            let [_, far] = space.lower_boundary_along(space.with_sign(Cell(x), Sign::Pos), 0)?;
            return Ok(far);
        }
        x = next;
    }
}

/// First spel of the object in code order.
pub fn first_spel(object: &LutCharSet) -> Option<Cell> {
    object.iter().next().map(Cell)
}

/// Smallest box `[lo, hi]` containing the object.
pub fn bounding_box(object: &LutCharSet) -> Option<(Vec<u64>, Vec<u64>)> {
    let space = object.space();
    let n = space.dimension();
    let mut lo = vec![u64::MAX; n];
    let mut hi = vec![0u64; n];
    let mut any = false;
    for code in object.iter() {
        any = true;
        for i in 0..n {
            let x = space.raw_coord(code, i);
            lo[i] = lo[i].min(x);
            hi[i] = hi[i].max(x);
        }
    }
    any.then_some((lo, hi))
}

/// Scan (A): every surfel of the image whose two incident spels have
/// different membership.
pub fn scan_full(object: &LutCharSet, storage: SurfelStorage) -> Result<LutCharSet> {
    let space = object.space();
    let lo = vec![0; space.dimension()];
    let hi = space.coordmaxes().to_vec();
    scan_box(object, &lo, &hi, storage)
}

/// Scan (B): like [`scan_full`] restricted to the pairs of axis-adjacent
/// spels with at least one spel in the box `[lo, hi]`.
pub fn scan_box(
    object: &LutCharSet,
    lo: &[u64],
    hi: &[u64],
    storage: SurfelStorage,
) -> Result<LutCharSet> {
    check_spel_set(object)?;
    let space = object.space();
    let n = space.dimension();
    if lo.len() != n || hi.len() != n {
        return Err(Error::BoxOutOfBounds(format!(
            "box corners must have {n} coordinates"
        )));
    }
    for i in 0..n {
        if lo[i] > hi[i] || hi[i] > space.coordmax(i) {
            return Err(Error::BoxOutOfBounds(format!(
                "axis {i}: [{}, {}] not within [0, {}]",
                lo[i],
                hi[i],
                space.coordmax(i)
            )));
        }
    }
    let mut out = LutCharSet::new(space, storage.family(space))?;
    let cw = space.coord_width();
    let full = space.full_topology() as u64;
    let signed = storage == SurfelStorage::Signed;
    for axis in 0..n {
        // pairs (x, x + e_axis) with x in [start, end] along axis
        let start = lo[axis].saturating_sub(1);
        let end = hi[axis].min(space.coordmax(axis) - 1);
        if start > end {
            continue;
        }
        let unit = space.raw_unit(axis);
        let topology = full ^ (1 << axis);
        let tau = Sign::parity((n - 1 - axis) as u32);
        let surfel_base = if signed {
            topology << (cw + 1)
        } else {
            topology << cw
        };
        let mut from = lo.to_vec();
        let mut to = hi.to_vec();
        from[axis] = start;
        to[axis] = end;
        let mut coords = from.clone();
        'rows: loop {
            let row = space.pack_coords(&coords)?;
            for x0 in from[0]..=to[0] {
                // for axis 0, x0 is the paired coordinate itself
                let packed = space.raw_with_coord(row, 0, x0);
                let a = object.bit_at(packed);
                let b = object.bit_at(packed + unit);
                if a != b {
                    let sign = if a { -tau } else { tau };
                    let code = if signed {
                        surfel_base | (sign.bit() << cw) | (packed + unit)
                    } else {
                        surfel_base | (packed + unit)
                    };
                    out.insert_unchecked(code);
                }
            }
            for i in 1..n {
                if coords[i] < to[i] {
                    coords[i] += 1;
                    continue 'rows;
                }
                coords[i] = from[i];
            }
            break;
        }
    }
    Ok(out)
}

/// Extracts the boundary with `method`. Tracking methods start from the
/// object's first spel in code order, so they return only the boundary
/// component reached from it.
pub fn extract_boundary(
    method: Method,
    object: &LutCharSet,
    adjacency: &BelAdjacency,
    storage: SurfelStorage,
) -> Result<LutCharSet> {
    match method {
        Method::ScanA => scan_full(object, storage),
        Method::ScanB => {
            let (lo, hi) = bounding_box(object).ok_or(Error::EmptyObject)?;
            scan_box(object, &lo, &hi, storage)
        }
        _ => {
            let seed = first_spel(object).ok_or(Error::EmptyObject)?;
            let start = find_start_bel(object, seed)?;
            Ok(track(method, object, start, adjacency, storage)?.surfels)
        }
    }
}

/// All boundary components found by tracking from every bel of a signed
/// surfel set (as returned by the scanners) not yet covered.
pub fn track_components(
    method: Method,
    object: &LutCharSet,
    bels: &LutCharSet,
    adjacency: &BelAdjacency,
) -> Result<Vec<LutCharSet>> {
    let space = object.space();
    if bels.family() != CellFamily::oriented_surfels(space) {
        return Err(Error::FamilyMismatch);
    }
    let mut covered = LutCharSet::new(space, bels.family())?;
    let mut components = Vec::new();
    for code in bels.iter() {
        if covered.has(code) {
            continue;
        }
        let comp = track(
            method,
            object,
            SCell(code),
            adjacency,
            SurfelStorage::Signed,
        )?
        .surfels;
        covered.union_with(&comp)?;
        components.push(comp);
    }
    Ok(components)
}
