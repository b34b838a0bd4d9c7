#![allow(dead_code)]

use std::collections::BTreeSet;

use cellcode::cellset::{all_family_codes, CellFamily};
use cellcode::{Cell, CellSet, Error, LutCharSet, MinCharSet, OrderedCellSet, SpaceLayout};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random object with a one-spel margin: seeds a few spels, then grows
/// blobs by random axis steps. Components and cavities happen.
pub fn random_object<R: Rng>(rng: &mut R, n: usize, max_side: u64) -> LutCharSet {
    let coordmax: Vec<u64> = (0..n).map(|_| rng.gen_range(3..=max_side - 1)).collect();
    let space = SpaceLayout::new(&coordmax).unwrap();
    let mut object = LutCharSet::new(&space, CellFamily::spels(&space)).unwrap();
    let seeds = rng.gen_range(1..=3);
    for _ in 0..seeds {
        let mut x: Vec<u64> = coordmax.iter().map(|&m| rng.gen_range(1..m)).collect();
        let steps = rng.gen_range(0..12 * n);
        object.add(space.spel(&x).unwrap()).unwrap();
        for _ in 0..steps {
            let axis = rng.gen_range(0..n);
            let up = rng.gen_bool(0.5);
            if up && x[axis] + 1 < coordmax[axis] {
                x[axis] += 1;
            } else if !up && x[axis] > 1 {
                x[axis] -= 1;
            }
            object.add(space.spel(&x).unwrap()).unwrap();
        }
    }
    // sprinkle, leaving holes possible
    for _ in 0..rng.gen_range(0..4) {
        let x: Vec<u64> = coordmax.iter().map(|&m| rng.gen_range(1..m)).collect();
        object.toggle(space.spel(&x).unwrap()).unwrap();
    }
    if object.is_empty() {
        let x: Vec<u64> = coordmax.iter().map(|&m| m / 2).collect();
        object.add(space.spel(&x).unwrap()).unwrap();
    }
    object
}

/// Every coordinate tuple of a box `[0, max]`.
pub fn all_coords(coordmax: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for &m in coordmax {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=m).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// Spaces used by the exhaustive checks.
pub fn small_spaces() -> Vec<SpaceLayout> {
    let shapes: &[&[u64]] = &[
        &[1],
        &[3],
        &[3, 3],
        &[2, 3],
        &[3, 1, 2],
        &[3, 3, 3],
        &[2, 2, 2, 2],
        &[3, 3, 3, 3],
    ];
    shapes
        .iter()
        .map(|m| SpaceLayout::new(m).unwrap())
        .collect()
}

/// Per-axis piece of a cell: the open unit interval `(x, x + 1)` or the
/// point `{x}`, coordinates allowed one step outside the space.
#[derive(Clone, Copy)]
struct Piece {
    x: i64,
    open: bool,
}

/// Does the closure of `outer` contain `inner`, axis by axis?
fn piece_in_closure(inner: Piece, outer: Piece) -> bool {
    match (inner.open, outer.open) {
        (true, true) => inner.x == outer.x,
        (true, false) => false,
        (false, true) => inner.x == outer.x || inner.x == outer.x + 1,
        (false, false) => inner.x == outer.x,
    }
}

fn pieces(s: &SpaceLayout, c: Cell) -> Vec<Piece> {
    (0..s.dimension())
        .map(|i| Piece {
            x: s.coord(c, i) as i64,
            open: (s.topology(c) >> i) & 1 == 1,
        })
        .collect()
}

/// Interval-product oracle: every product of pieces within one step of
/// `c` on each axis that relates to `c`. Returns the representable cells and
/// whether some related cell falls outside the space.
pub fn product_oracle(s: &SpaceLayout, c: Cell, star: bool) -> (BTreeSet<Cell>, bool) {
    let n = s.dimension();
    let pc = pieces(s, c);
    let mut inside = BTreeSet::new();
    let mut outside = false;
    for shifted in all_coords(&vec![2; n]) {
        for topology in 0..(1u32 << n) {
            let pd: Vec<Piece> = (0..n)
                .map(|i| Piece {
                    x: pc[i].x + shifted[i] as i64 - 1,
                    open: (topology >> i) & 1 == 1,
                })
                .collect();
            let related = (0..n).all(|i| {
                if star {
                    piece_in_closure(pc[i], pd[i])
                } else {
                    piece_in_closure(pd[i], pc[i])
                }
            });
            if !related {
                continue;
            }
            let fits = (0..n).all(|i| pd[i].x >= 0 && pd[i].x as u64 <= s.coordmax(i));
            if fits {
                let coords: Vec<u64> = pd.iter().map(|p| p.x as u64).collect();
                inside.insert(s.ucode(topology, &coords).unwrap());
            } else {
                outside = true;
            }
        }
    }
    (inside, outside)
}

pub fn every_cell(s: &SpaceLayout) -> Vec<Cell> {
    let n = s.dimension();
    let mut out = Vec::new();
    for coords in all_coords(s.coordmaxes()) {
        for topology in 0..(1u32 << n) {
            out.push(s.ucode(topology, &coords).unwrap());
        }
    }
    out
}

/// Random code: usually in the family, sometimes with a foreign topology,
/// sometimes with a coordinate past `coordmax` but inside its bit field.
fn random_code<R: Rng>(rng: &mut R, s: &SpaceLayout, family: CellFamily, pool: &[u64]) -> u64 {
    let cw = s.coord_width();
    let shift = family.block_shift(s);
    match rng.gen_range(0..20) {
        0 => {
            let topology = rng.gen_range(0..(1u64 << s.dimension()));
            let low = rng.gen_range(0..(1u64 << shift));
            (topology << shift) | low
        }
        1 => {
            let base = pool[rng.gen_range(0..pool.len())];
            base | (rng.gen_range(0..(1u64 << cw)))
        }
        _ => pool[rng.gen_range(0..pool.len())],
    }
}

struct Trio {
    min: MinCharSet,
    lut: LutCharSet,
    oracle: OrderedCellSet,
}

impl Trio {
    fn new(s: &SpaceLayout, family: CellFamily) -> Self {
        Trio {
            min: MinCharSet::new(s, family).unwrap(),
            lut: LutCharSet::new(s, family).unwrap(),
            oracle: OrderedCellSet::new(s, family).unwrap(),
        }
    }

    fn check(&self) {
        assert_eq!(self.min.cardinality(), self.oracle.cardinality());
        assert_eq!(self.lut.cardinality(), self.oracle.cardinality());
        let codes = self.oracle.codes();
        assert_eq!(self.min.codes(), codes);
        assert_eq!(self.lut.codes(), codes);
    }
}

pub fn run_trace(s: &SpaceLayout, family: CellFamily, steps: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = all_family_codes(s, family);
    let mut a = Trio::new(s, family);
    let mut b = Trio::new(s, family);
    for step in 0..steps {
        let code = random_code(&mut rng, s, family, &pool);
        let t = if rng.gen_bool(0.5) { &mut a } else { &mut b };
        match rng.gen_range(0..100) {
            0..=34 => {
                let r = t.oracle.add(code);
                assert_eq!(t.min.add(code), r);
                assert_eq!(t.lut.add(code), r);
                if r.is_err() {
                    assert_eq!(r, Err(Error::NotInFamily(code)));
                }
            }
            35..=54 => {
                let r = t.oracle.remove(code);
                assert_eq!(t.min.remove(code), r);
                assert_eq!(t.lut.remove(code), r);
            }
            55..=69 => {
                let r = t.oracle.toggle(code);
                assert_eq!(t.min.toggle(code), r);
                assert_eq!(t.lut.toggle(code), r);
            }
            70..=93 => {
                let r = t.oracle.contains(code);
                assert_eq!(t.min.contains(code), r);
                assert_eq!(t.lut.contains(code), r);
            }
            94 => {
                a.oracle = a.oracle.union(&b.oracle).unwrap();
                a.min.union_with(&b.min).unwrap();
                a.lut = a.lut.union(&b.lut).unwrap();
            }
            95 => {
                a.oracle = a.oracle.intersection(&b.oracle).unwrap();
                a.min = a.min.intersection(&b.min).unwrap();
                a.lut.intersect_with(&b.lut).unwrap();
            }
            96 => {
                b.oracle = b.oracle.difference(&a.oracle).unwrap();
                b.min.difference_with(&a.min).unwrap();
                b.lut = b.lut.difference(&a.lut).unwrap();
            }
            97 => {
                t.oracle = t.oracle.complement();
                t.min.complement_in_place();
                t.lut = t.lut.complement();
            }
            98 => {
                let sym: OrderedCellSet = a
                    .oracle
                    .difference(&b.oracle)
                    .unwrap()
                    .union(&b.oracle.difference(&a.oracle).unwrap())
                    .unwrap();
                a.oracle = sym;
                a.min.symmetric_difference_with(&b.min).unwrap();
                a.lut.symmetric_difference_with(&b.lut).unwrap();
            }
            _ => {
                a.min = MinCharSet::from_snapshot(&a.min.to_snapshot()).unwrap();
                a.lut = LutCharSet::from_snapshot(&a.lut.to_snapshot()).unwrap();
            }
        }
        if step % 97 == 0 {
            a.check();
            b.check();
        }
    }
    a.check();
    b.check();
}
