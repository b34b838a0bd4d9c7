mod common;

use std::collections::BTreeSet;

use cellcode::{Error, Side, SpaceLayout};
use common::{all_coords, every_cell, product_oracle, small_spaces};
use proptest::prelude::*;

#[test]
fn closure_and_star_match_interval_products() {
    for s in small_spaces() {
        for c in every_cell(&s) {
            for star in [false, true] {
                let (oracle, clipped) = product_oracle(&s, c, star);
                let got = if star { s.star(c) } else { s.closure(c) };
                match got {
                    Ok(cells) => {
                        assert!(!clipped, "{} star={star}", s.display(c));
                        assert_eq!(cells.iter().copied().collect::<BTreeSet<_>>(), oracle);
                        assert!(cells.windows(2).all(|w| w[0] < w[1]));
                        let n = s.dimension() as u32;
                        let free = if star { n - s.dim(c) } else { s.dim(c) };
                        assert_eq!(cells.len(), 3usize.pow(free));
                    }
                    Err(e) => {
                        assert!(clipped, "{} star={star}: {e}", s.display(c));
                        assert!(matches!(e, Error::CoordOutOfRange { .. }));
                    }
                }
            }
        }
    }
}

#[test]
fn star_closure_duality() {
    for s in small_spaces().into_iter().filter(|s| s.dimension() <= 3) {
        let cells = every_cell(&s);
        for &p in &cells {
            let Ok(cl) = s.closure(p) else { continue };
            for &q in &cells {
                if let Ok(st) = s.star(q) {
                    assert_eq!(st.contains(&p), cl.contains(&q));
                }
            }
        }
    }
}

#[test]
fn interior_neighbour_counts() {
    for (sizes, l, want) in [
        (&[7u64, 7][..], 1, 4),
        (&[7, 7], 2, 8),
        (&[7, 7, 7], 1, 6),
        (&[7, 7, 7], 2, 18),
        (&[5, 5, 5, 5], 1, 8),
    ] {
        let s = SpaceLayout::new(sizes).unwrap();
        let centre: Vec<u64> = sizes.iter().map(|m| m / 2).collect();
        let p = s.spel(&centre).unwrap();
        let count = all_coords(sizes)
            .iter()
            .filter(|x| s.l_adjacent(p, s.spel(x).unwrap(), l))
            .count();
        assert_eq!(count, want, "{sizes:?} l={l}");
    }
}

#[test]
fn incidence_flips_one_bit() {
    let s = SpaceLayout::new(&[3, 3, 3]).unwrap();
    for c in every_cell(&s) {
        for axis in 0..3 {
            for side in [Side::First, Side::Second] {
                if let Ok(d) = s.incident_1(c, axis, side) {
                    assert_eq!(s.topology(c) ^ s.topology(d), 1 << axis);
                    for other in (0..3).filter(|&i| i != axis) {
                        assert_eq!(s.coord(c, other), s.coord(d, other));
                    }
                    assert!(s.coord(c, axis).abs_diff(s.coord(d, axis)) <= 1);
                }
            }
        }
    }
}

fn space_and_cell() -> impl Strategy<Value = (Vec<u64>, u32, Vec<u64>)> {
    prop::collection::vec(1u64..1500, 1..=5).prop_flat_map(|m| {
        let n = m.len();
        let coords: Vec<_> = m.iter().map(|&x| 0..=x).collect();
        (Just(m), 0u32..(1 << n), coords)
    })
}

proptest! {
    #[test]
    fn code_round_trip((m, topology, coords) in space_and_cell()) {
        let s = SpaceLayout::new(&m).unwrap();
        let c = s.ucode(topology, &coords).unwrap();
        prop_assert_eq!(s.topology(c), topology);
        prop_assert_eq!(s.coords(c), coords.clone());
        prop_assert_eq!(s.dim(c), topology.count_ones());
        let k = s.khalimsky_coords(c);
        prop_assert_eq!(s.from_khalimsky(&k).unwrap(), c);
        for i in 0..m.len() {
            prop_assert_eq!(k[i], 2 * coords[i] + ((topology >> i) & 1) as u64);
            let moved = s.set_coord(c, i, m[i] - coords[i]).unwrap();
            prop_assert_eq!(s.coord(moved, i), m[i] - coords[i]);
            prop_assert_eq!(s.topology(moved), topology);
        }
    }

    #[test]
    fn out_of_range_is_rejected((m, topology, coords) in space_and_cell(), axis in 0usize..5) {
        let s = SpaceLayout::new(&m).unwrap();
        let axis = axis % m.len();
        let mut bad = coords.clone();
        bad[axis] = m[axis] + 1;
        let coord_out_of_range = matches!(s.ucode(topology, &bad), Err(Error::CoordOutOfRange { .. }));
        prop_assert!(coord_out_of_range);
    }
}
