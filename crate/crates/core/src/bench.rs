//! Benchmark harness: digital balls, boundary extraction timings and set
//! operation throughput.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::cellset::{CellSet, LutCharSet};
use crate::error::Result;
use crate::shapes::digital_ball;
use crate::space::SpaceLayout;
use crate::tracking::{extract_boundary, BelAdjacency, Method, SurfelStorage};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    /// Cases up to 128^3, with the 4D case shrunk to radius 10.
    Small,
    Full,
}

impl Scale {
    pub fn parse(s: &str) -> Option<Scale> {
        match s {
            "small" => Some(Scale::Small),
            "full" => Some(Scale::Full),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchCase {
    pub sizes: Vec<u64>,
    pub radius: u64,
    /// Reference (spels, surfels), when known.
    pub expected: Option<(u64, u64)>,
}

impl BenchCase {
    pub fn new(sizes: &[u64], radius: u64, expected: Option<(u64, u64)>) -> Self {
        BenchCase {
            sizes: sizes.to_vec(),
            radius,
            expected,
        }
    }

    pub fn center(&self) -> Vec<u64> {
        self.sizes.iter().map(|s| s / 2).collect()
    }

    pub fn label(&self) -> String {
        let dims: Vec<String> = self.sizes.iter().map(u64::to_string).collect();
        format!("{}/r{}", dims.join("x"), self.radius)
    }
}

/// Ball cases with their reference spel and surfel counts.
pub fn reference_cases(scale: Scale) -> Vec<BenchCase> {
    let full = vec![
        BenchCase::new(&[4096, 4096], 2000, Some((12_566_345, 16_004))),
        BenchCase::new(&[128, 128, 128], 30, Some((113_081, 16_926))),
        BenchCase::new(&[128, 128, 128], 60, Some((904_089, 67_734))),
        BenchCase::new(&[256, 256, 256], 120, Some((7_236_577, 271_350))),
        BenchCase::new(&[512, 512, 512], 240, Some((57_902_533, 1_085_502))),
        BenchCase::new(&[64, 64, 64, 64], 30, Some((4_000_425, 904_648))),
    ];
    match scale {
        Scale::Full => full,
        Scale::Small => {
            let mut small: Vec<BenchCase> = full
                .into_iter()
                .filter(|c| c.sizes.len() == 3 && c.sizes[0] <= 128)
                .collect();
            small.push(BenchCase::new(&[64, 64, 64, 64], 10, None));
            small
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub sizes: Vec<u64>,
    pub radius: u64,
    pub spels: u64,
    pub surfels: u64,
    pub method: Method,
    pub time: Duration,
    pub expected: Option<(u64, u64)>,
}

impl BenchRow {
    pub fn per_bel_ns(&self) -> f64 {
        if self.surfels == 0 {
            return 0.0;
        }
        self.time.as_nanos() as f64 / self.surfels as f64
    }

    /// `None` when there is no reference to compare with.
    pub fn matches(&self) -> Option<bool> {
        self.expected.map(|e| e == (self.spels, self.surfels))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches() != Some(false))
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<18} {:>6} {:>10} {:>9} {:<8} {:>10} {:>10} {:>6}\n",
            "space", "radius", "spels", "surfels", "method", "time_ms", "ns/bel", "ref"
        );
        for r in &self.rows {
            let dims: Vec<String> = r.sizes.iter().map(u64::to_string).collect();
            let check = match r.matches() {
                Some(true) => "ok",
                Some(false) => "DIFF",
                None => "-",
            };
            writeln!(
                out,
                "{:<18} {:>6} {:>10} {:>9} {:<8} {:>10.2} {:>10.1} {:>6}",
                dims.join("x"),
                r.radius,
                r.spels,
                r.surfels,
                r.method.name(),
                r.time.as_secs_f64() * 1e3,
                r.per_bel_ns(),
                check
            )
            .unwrap();
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "sizes,radius,spels,surfels,method,time_s,ns_per_bel,expected_spels,expected_surfels\n",
        );
        for r in &self.rows {
            let dims: Vec<String> = r.sizes.iter().map(u64::to_string).collect();
            let (es, eb) = match r.expected {
                Some((s, b)) => (s.to_string(), b.to_string()),
                None => (String::new(), String::new()),
            };
            writeln!(
                out,
                "{},{},{},{},{},{:.6},{:.2},{},{}",
                dims.join("x"),
                r.radius,
                r.spels,
                r.surfels,
                r.method.name(),
                r.time.as_secs_f64(),
                r.per_bel_ns(),
                es,
                eb
            )
            .unwrap();
        }
        out
    }
}

/// Builds the ball of `case` and times each method on it. Bels are stored
/// unsigned and tracked with interior adjacency.
pub fn run_case(case: &BenchCase, methods: &[Method]) -> Result<Vec<BenchRow>> {
    let space = SpaceLayout::from_sizes(&case.sizes)?;
    let ball = digital_ball(&space, &case.center(), case.radius)?;
    let spels = ball.spel_count();
    let adjacency = BelAdjacency::interior(space.dimension());
    let mut rows = Vec::with_capacity(methods.len());
    for &method in methods {
        let t = Instant::now();
        let surfels = extract_boundary(
            method,
            ball.occupancy(),
            &adjacency,
            SurfelStorage::Unsigned,
        )?;
        let time = t.elapsed();
        rows.push(BenchRow {
            sizes: case.sizes.clone(),
            radius: case.radius,
            spels,
            surfels: surfels.cardinality(),
            method,
            time,
            expected: case.expected,
        });
    }
    Ok(rows)
}

pub fn run_suite(cases: &[BenchCase], methods: &[Method]) -> Result<BenchReport> {
    let mut report = BenchReport::default();
    for case in cases {
        report.rows.extend(run_case(case, methods)?);
    }
    Ok(report)
}

/// Times `op` once and returns its result with the elapsed time.
pub fn timed<T>(op: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = op();
    (out, t.elapsed())
}

/// Complements a spel set in place and returns the elapsed time.
pub fn time_complement(set: &mut LutCharSet) -> Duration {
    timed(|| set.complement_in_place()).1
}
