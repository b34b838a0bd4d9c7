mod common;

use std::collections::BTreeMap;

use cellcode::cellset::CellFamily;
use cellcode::{
    interior_exterior, object_boundary, CellSet, Error, LutCharSet, SCell, Sign, SpaceLayout,
};
use common::{all_coords, random_object, small_spaces};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn every_scell(s: &SpaceLayout, sign: Sign) -> Vec<SCell> {
    let n = s.dimension();
    let mut out = Vec::new();
    for coords in all_coords(s.coordmaxes()) {
        for topology in 0..(1u32 << n) {
            out.push(s.scode(topology, sign, &coords).unwrap());
        }
    }
    out
}

/// Signed chain as unsigned cell -> coefficient, zeros dropped.
fn chain(s: &SpaceLayout, cells: impl IntoIterator<Item = SCell>) -> BTreeMap<u64, i32> {
    let mut out = BTreeMap::new();
    for c in cells {
        let w = if s.sign_of(c) == Sign::Pos { 1 } else { -1 };
        *out.entry(s.unsign(c).0).or_insert(0) += w;
    }
    out.retain(|_, v| *v != 0);
    out
}

fn interior(s: &SpaceLayout, c: SCell) -> bool {
    (0..s.dimension()).all(|i| {
        let x = s.scoord(c, i);
        x >= 2 && x + 2 <= s.coordmax(i)
    })
}

#[test]
fn boundary_of_boundary_vanishes() {
    let spaces = [
        SpaceLayout::new(&[4]).unwrap(),
        SpaceLayout::new(&[4, 4]).unwrap(),
        SpaceLayout::new(&[4, 4, 4]).unwrap(),
        SpaceLayout::new(&[4, 4, 4, 4]).unwrap(),
    ];
    for s in &spaces {
        let mut checked = 0;
        for c in every_scell(s, Sign::Pos)
            .into_iter()
            .filter(|&c| interior(s, c))
        {
            let low: Vec<SCell> = s
                .lower_boundary(c)
                .unwrap()
                .into_iter()
                .flat_map(|d| s.lower_boundary(d).unwrap())
                .collect();
            assert!(chain(s, low).is_empty(), "lower {}", s.sdisplay(c));
            let up: Vec<SCell> = s
                .upper_boundary(c)
                .unwrap()
                .into_iter()
                .flat_map(|d| s.upper_boundary(d).unwrap())
                .collect();
            assert!(chain(s, up).is_empty(), "upper {}", s.sdisplay(c));
            checked += 1;
        }
        // every topology appears at an interior position
        assert!(checked >= 1 << s.dimension());
    }
}

#[test]
fn upper_boundary_is_the_transpose() {
    for s in small_spaces() {
        let n = s.dimension();
        let cells = every_scell(&s, Sign::Pos);
        for &c in &cells {
            for axis in 0..n {
                let Ok(pair) = s.lower_boundary_along(c, axis) else {
                    continue;
                };
                for d in pair {
                    let face = s.with_sign(s.unsign(d), Sign::Pos);
                    let Ok(back) = s.upper_boundary_along(face, axis) else {
                        continue;
                    };
                    let hit: Vec<SCell> = back
                        .into_iter()
                        .filter(|&e| s.unsign(e) == s.unsign(c))
                        .collect();
                    assert_eq!(hit.len(), 1);
                    assert_eq!(
                        s.sign_of(hit[0]),
                        s.sign_of(d),
                        "{} / {}",
                        s.sdisplay(c),
                        s.sdisplay(d)
                    );
                }
            }
            for axis in 0..n {
                let Ok(pair) = s.upper_boundary_along(c, axis) else {
                    continue;
                };
                for d in pair {
                    let coface = s.with_sign(s.unsign(d), Sign::Pos);
                    let Ok(back) = s.lower_boundary_along(coface, axis) else {
                        continue;
                    };
                    let hit: Vec<SCell> = back
                        .into_iter()
                        .filter(|&e| s.unsign(e) == s.unsign(c))
                        .collect();
                    assert_eq!(hit.len(), 1);
                    assert_eq!(s.sign_of(hit[0]), s.sign_of(d));
                }
            }
        }
        // and both are odd in the orientation of their argument
        for &c in &cells {
            let neg = s.opposite(c);
            if let (Ok(a), Ok(b)) = (s.lower_boundary(c), s.lower_boundary(neg)) {
                let flipped: Vec<SCell> = a.iter().map(|&d| s.opposite(d)).collect();
                assert_eq!(flipped, b);
            }
        }
    }
}

#[test]
fn wrong_parity_is_rejected() {
    let s = SpaceLayout::new(&[7, 7, 7]).unwrap();
    let surfel = s.scode(0b101, Sign::Pos, &[3, 3, 3]).unwrap();
    assert_eq!(
        s.lower_boundary_along(surfel, 1),
        Err(Error::WrongParity { axis: 1 })
    );
    assert_eq!(
        s.upper_boundary_along(surfel, 0),
        Err(Error::WrongParity { axis: 0 })
    );
}

#[test]
fn every_bel_separates_inside_from_outside() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 2..=4 {
        for _ in 0..60 {
            let object = random_object(&mut rng, n, 9);
            let s = object.space().clone();
            let boundary = object_boundary(&object).unwrap();
            let mut per_spel = 0u64;
            for b in boundary.iter() {
                let (p, q) = interior_exterior(&object, b).unwrap();
                assert!(object.has(p.0) && !object.has(q.0));
                assert!(s.l_adjacent(p, q, 1));
                // the opposite orientation is not a bel of this object
                assert!(interior_exterior(&object, s.opposite(b)).is_err());
                per_spel += 1;
            }
            // brute force: count axis pairs with one spel in and one out
            let mut pairs = 0u64;
            for x in all_coords(s.coordmaxes()) {
                for axis in 0..n {
                    if x[axis] == s.coordmax(axis) {
                        continue;
                    }
                    let mut y = x.clone();
                    y[axis] += 1;
                    let a = object.has(s.spel(&x).unwrap().0);
                    let b = object.has(s.spel(&y).unwrap().0);
                    pairs += (a != b) as u64;
                }
            }
            assert_eq!(per_spel, pairs);
            assert_eq!(boundary.len(), pairs);
            // the boundary of a boundary cancels
            let edges: Vec<SCell> = boundary
                .iter()
                .flat_map(|b| s.lower_boundary(b).unwrap())
                .collect();
            assert!(chain(&s, edges).is_empty());
        }
    }
}

#[test]
fn border_objects_are_rejected() {
    let s = SpaceLayout::new(&[5, 5]).unwrap();
    let mut object = LutCharSet::new(&s, CellFamily::spels(&s)).unwrap();
    object.add(s.spel(&[0, 2]).unwrap()).unwrap();
    assert_eq!(
        object_boundary(&object).unwrap_err(),
        Error::ObjectTouchesBorder
    );
    object.clear();
    object.add(s.spel(&[2, 5]).unwrap()).unwrap();
    assert_eq!(
        object_boundary(&object).unwrap_err(),
        Error::ObjectTouchesBorder
    );
}

#[test]
fn merge_cancel_rejects_same_sign() {
    let s = SpaceLayout::new(&[5, 5]).unwrap();
    let b = s.scode(0b01, Sign::Neg, &[2, 2]).unwrap();
    let mut set = cellcode::SignedCellSet::new(&s, 1).unwrap();
    set.merge_cancel([b]).unwrap();
    assert_eq!(set.merge_cancel([b]), Err(Error::DuplicateOrientation(b.0)));
    set.merge_cancel([s.opposite(b)]).unwrap();
    assert!(set.is_empty());
}
