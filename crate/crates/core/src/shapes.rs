//! Test objects, volume files and surfel export.
//!
//! Volume files (`CUBV1`) are an ASCII header line
//! `CUBV1 <n> <size_0> ... <size_{n-1}>` followed by one occupancy bit per
//! spel, packed least-significant bit first, `x_0` varying fastest.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::cellset::{parse_dims, split_header, CellFamily, CellSet, LutCharSet};
use crate::error::{Error, Result};
use crate::oriented::{SCell, Sign};
use crate::space::{Cell, SpaceLayout};

const VOLUME_MAGIC: &str = "CUBV1";

/// Binary image: a set of spels over a finite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumeImage {
    occupancy: LutCharSet,
}

impl VolumeImage {
    pub fn empty(space: &SpaceLayout) -> Result<Self> {
        Ok(VolumeImage {
            occupancy: LutCharSet::new(space, CellFamily::spels(space))?,
        })
    }

    pub fn from_occupancy(occupancy: LutCharSet) -> Result<Self> {
        if occupancy.family() != CellFamily::spels(occupancy.space()) {
            return Err(Error::FamilyMismatch);
        }
        Ok(VolumeImage { occupancy })
    }

    pub fn space(&self) -> &SpaceLayout {
        self.occupancy.space()
    }

    pub fn occupancy(&self) -> &LutCharSet {
        &self.occupancy
    }

    pub fn occupancy_mut(&mut self) -> &mut LutCharSet {
        &mut self.occupancy
    }

    pub fn into_occupancy(self) -> LutCharSet {
        self.occupancy
    }

    pub fn spel_count(&self) -> u64 {
        self.occupancy.cardinality()
    }

    pub fn insert(&mut self, coords: &[u64]) -> Result<bool> {
        let c = self.space().spel(coords)?;
        self.occupancy.add(c)
    }

    pub fn contains(&self, coords: &[u64]) -> Result<bool> {
        let c = self.space().spel(coords)?;
        self.occupancy.contains(c)
    }
}

/// Membership rule of a digital ball of radius `r`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BallPredicate {
    /// `sum (x_i - c_i)^2 < r^2`
    Strict,
    /// `sum (x_i - c_i)^2 <= r^2`, which reproduces the reference spel counts
    #[default]
    NonStrict,
}

/// Digital ball with the default predicate. A radius of 0 gives the empty
/// object.
pub fn digital_ball(space: &SpaceLayout, center: &[u64], radius: u64) -> Result<VolumeImage> {
    digital_ball_with(space, center, radius, BallPredicate::default())
}

pub fn digital_ball_with(
    space: &SpaceLayout,
    center: &[u64],
    radius: u64,
    predicate: BallPredicate,
) -> Result<VolumeImage> {
    let n = space.dimension();
    if center.len() != n {
        return Err(Error::WrongDimension {
            expected: n,
            got: center.len(),
        });
    }
    let mut image = VolumeImage::empty(space)?;
    if radius == 0 {
        return Ok(image);
    }
    for (i, &c) in center.iter().enumerate() {
        if c < radius + 1 || c + radius + 1 > space.coordmax(i) {
            return Err(Error::BallTouchesBorder { radius });
        }
    }
    let r2 = (radius as i128).pow(2);
    let lo: Vec<u64> = center.iter().map(|c| c - radius).collect();
    let hi: Vec<u64> = center.iter().map(|c| c + radius).collect();
    let mut coords = lo.clone();
    coords[0] = center[0];
    let occupancy = &mut image.occupancy;
    'rows: loop {
        let used: i128 = (1..n)
            .map(|i| (coords[i] as i128 - center[i] as i128).pow(2))
            .sum();
        let rest = r2 - used;
        // half width w of the run along axis 0
        let half = match predicate {
            BallPredicate::NonStrict if rest >= 0 => Some((rest as u64).isqrt()),
            BallPredicate::Strict if rest > 0 => Some(((rest - 1) as u64).isqrt()),
            _ => None,
        };
        if let Some(w) = half {
            coords[0] = center[0] - w;
            let start = space.pack_coords(&coords)?;
            occupancy.fill_index_range(start, start + 2 * w + 1);
        }
        for i in 1..n {
            if coords[i] < hi[i] {
                coords[i] += 1;
                continue 'rows;
            }
            coords[i] = lo[i];
        }
        break;
    }
    Ok(image)
}

/// Calls `f(row_index, packed_row_start)` for every row along axis 0, in
/// file order.
fn for_each_row(space: &SpaceLayout, mut f: impl FnMut(u64, u64)) {
    let n = space.dimension();
    let mut coords = vec![0u64; n];
    let mut row = 0u64;
    'rows: loop {
        let packed = space.pack_coords(&coords).expect("valid coordinates");
        f(row, packed);
        row += 1;
        for i in 1..n {
            if coords[i] < space.coordmax(i) {
                coords[i] += 1;
                continue 'rows;
            }
            coords[i] = 0;
        }
        break;
    }
}

pub fn write_volume(image: &VolumeImage) -> Vec<u8> {
    let space = image.space();
    let mut out = format!("{VOLUME_MAGIC} {}", space.dimension());
    for s in space.sizes() {
        write!(out, " {s}").unwrap();
    }
    out.push('\n');
    let mut out = out.into_bytes();
    let total = space.spel_count();
    let nbytes = total.div_ceil(8) as usize;
    let header_len = out.len();
    if space.is_dense() {
        // table index and file order coincide
        out.extend(
            image
                .occupancy
                .words()
                .iter()
                .flat_map(|w| w.to_le_bytes())
                .take(nbytes),
        );
        return out;
    }
    out.resize(header_len + nbytes, 0);
    let width = space.coordmax(0) + 1;
    let payload = &mut out[header_len..];
    for_each_row(space, |row, packed| {
        for x in 0..width {
            if image.occupancy.bit_at(packed + x) {
                let bit = row * width + x;
                payload[(bit >> 3) as usize] |= 1 << (bit & 7);
            }
        }
    });
    out
}

pub fn read_volume(bytes: &[u8]) -> Result<VolumeImage> {
    let (fields, payload) = split_header(bytes, VOLUME_MAGIC)?;
    let sizes = parse_dims(&fields)?;
    let space =
        SpaceLayout::from_sizes(&sizes).map_err(|e| Error::HeaderMismatch(e.to_string()))?;
    let total = space.spel_count();
    let expected = total.div_ceil(8) as usize;
    if payload.len() < expected {
        return Err(Error::TruncatedPayload {
            expected,
            got: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(Error::HeaderMismatch(format!(
            "{} payload bytes for {total} spels",
            payload.len()
        )));
    }
    let mut image = VolumeImage::empty(&space)?;
    let width = space.coordmax(0) + 1;
    let bit = |i: u64| payload[(i >> 3) as usize] >> (i & 7) & 1 == 1;
    let occupancy = &mut image.occupancy;
    for_each_row(&space, |row, packed| {
        for x in 0..width {
            if bit(row * width + x) {
                occupancy.insert_unchecked(space_spel(&space, packed + x));
            }
        }
    });
    Ok(image)
}

#[inline]
fn space_spel(space: &SpaceLayout, packed: u64) -> u64 {
    ((space.full_topology() as u64) << space.coord_width()) | packed
}

/// Binary image from 8-bit samples (`x_0` fastest): a spel belongs to the
/// object iff its sample is at least `threshold`.
pub fn threshold_import(samples: &[u8], sizes: &[u64], threshold: u8) -> Result<VolumeImage> {
    let space = SpaceLayout::from_sizes(sizes)?;
    let expected = space.spel_count() as usize;
    if samples.len() != expected {
        return Err(Error::SizeMismatch {
            expected,
            got: samples.len(),
        });
    }
    let mut image = VolumeImage::empty(&space)?;
    let width = space.coordmax(0) + 1;
    let occupancy = &mut image.occupancy;
    for_each_row(&space, |row, packed| {
        for x in 0..width {
            if samples[(row * width + x) as usize] >= threshold {
                occupancy.insert_unchecked(space_spel(&space, packed + x));
            }
        }
    });
    Ok(image)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    /// OFF text with one quad per surfel (3D).
    Off,
    /// SVG 1.1 with one path segment per surfel (2D).
    Svg,
    /// `sign,xk_0,...,xk_{n-1}` per cell with Khalimsky coordinates (any
    /// dimension); sign is 1/-1, or 0 for unsigned cells.
    Csv,
}

impl MeshFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "off" => Some(MeshFormat::Off),
            "svg" => Some(MeshFormat::Svg),
            "csv" => Some(MeshFormat::Csv),
            _ => None,
        }
    }
}

/// A surfel decoded for export.
struct ExportSurfel {
    coords: Vec<u64>,
    orth: usize,
    /// +1 / -1 when the interior-to-exterior direction along `orth` is known
    outward: Option<i64>,
}

fn decode_surfel(space: &SpaceLayout, code: u64, signed: bool) -> Result<ExportSurfel> {
    let (cell, outward) = if signed {
        let b = SCell(code);
        let k = space.sorth_dir(b)?;
        let [first, _] = space.upper_boundary_along(b, k)?;
        // first element lies at x, second at x - e_k
        let out = if space.sign_of(first) == Sign::Pos {
            -1
        } else {
            1
        };
        (space.unsign(b), Some(out))
    } else {
        (Cell(code), None)
    };
    Ok(ExportSurfel {
        coords: space.coords(cell),
        orth: space.orth_dir(cell)?,
        outward,
    })
}

fn check_surfel_family(space: &SpaceLayout, family: CellFamily, n: usize) -> Result<()> {
    if space.dimension() != n {
        return Err(Error::WrongDimension {
            expected: n,
            got: space.dimension(),
        });
    }
    if family.dim() as usize != n - 1 {
        return Err(Error::WrongDimension {
            expected: n - 1,
            got: family.dim() as usize,
        });
    }
    Ok(())
}

/// Serializes a set of surfels (or of any cells for CSV).
pub fn export_mesh<S: CellSet>(cells: &S, format: MeshFormat) -> Result<Vec<u8>> {
    let space = cells.space();
    let family = cells.family();
    let signed = family.is_signed();
    let text = match format {
        MeshFormat::Csv => {
            let mut out = String::new();
            for code in cells.codes() {
                let (sign, cell) = if signed {
                    let sign = match space.sign_of(SCell(code)) {
                        Sign::Pos => 1,
                        Sign::Neg => -1,
                    };
                    (sign, space.unsign(SCell(code)))
                } else {
                    (0, Cell(code))
                };
                write!(out, "{sign}").unwrap();
                for k in space.khalimsky_coords(cell) {
                    write!(out, ",{k}").unwrap();
                }
                out.push('\n');
            }
            out
        }
        MeshFormat::Off => {
            check_surfel_family(space, family, 3)?;
            let mut vertices: BTreeMap<[u64; 3], usize> = BTreeMap::new();
            let mut faces = Vec::new();
            for code in cells.codes() {
                let s = decode_surfel(space, code, signed)?;
                let (a, b) = match s.orth {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                let corner = |da: u64, db: u64| {
                    let mut v = [s.coords[0], s.coords[1], s.coords[2]];
                    v[a] += da;
                    v[b] += db;
                    v
                };
                let mut quad = [corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)];
                // e_a x e_b is +e_orth unless orth is the middle axis
                let loop_normal = if s.orth == 1 { -1 } else { 1 };
                if let Some(out) = s.outward {
                    if out != loop_normal {
                        quad.reverse();
                    }
                }
                let mut face = [0usize; 4];
                for (f, v) in face.iter_mut().zip(quad) {
                    let next = vertices.len();
                    *f = *vertices.entry(v).or_insert(next);
                }
                faces.push(face);
            }
            let mut ordered = vec![[0u64; 3]; vertices.len()];
            for (v, &i) in &vertices {
                ordered[i] = *v;
            }
            let mut out = format!("OFF\n{} {} 0\n", ordered.len(), faces.len());
            for v in &ordered {
                writeln!(out, "{} {} {}", v[0], v[1], v[2]).unwrap();
            }
            for f in &faces {
                writeln!(out, "4 {} {} {} {}", f[0], f[1], f[2], f[3]).unwrap();
            }
            out
        }
        MeshFormat::Svg => {
            check_surfel_family(space, family, 2)?;
            let (w, h) = (space.coordmax(0) + 2, space.coordmax(1) + 2);
            let mut out = String::new();
            writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
            writeln!(
                out,
                r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
            )
            .unwrap();
            for code in cells.codes() {
                let s = decode_surfel(space, code, signed)?;
                let a = 1 - s.orth;
                let start = (s.coords[0], s.coords[1]);
                let mut end = start;
                if a == 0 {
                    end.0 += 1;
                } else {
                    end.1 += 1;
                }
                // interior on the left of the segment in the (x_0, x_1) frame
                let keep = match (a, s.outward) {
                    (0, Some(d)) => d < 0,
                    (_, Some(d)) => d > 0,
                    (_, None) => true,
                };
                let (from, to) = if keep { (start, end) } else { (end, start) };
                writeln!(
                    out,
                    r#"<path d="M {} {} L {} {}" stroke="black" stroke-width="0.1" fill="none"/>"#,
                    from.0, from.1, to.0, to.1
                )
                .unwrap();
            }
            out.push_str("</svg>\n");
            out
        }
    };
    Ok(text.into_bytes())
}
