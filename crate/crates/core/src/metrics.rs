//! Hypervolume of bi-objective fronts and run reports.
//!
//! Both estimators measure the fraction of the box `[0, r1] x [0, r2]`
//! dominated by the archive, as a percentage. Points with any coordinate at
//! or beyond the reference point dominate nothing inside the box and are
//! excluded; [`clipped_count`] reports how many there were.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::objective::{nondominated_filter, ObjectiveVector};
use crate::rng::RngSeed;

/// Default Monte-Carlo sample count.
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;

/// Upper corner of the hypervolume box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferencePoint {
    pub r1: f64,
    pub r2: f64,
}

impl ReferencePoint {
    pub fn new(r1: f64, r2: f64) -> Result<Self> {
        if !(r1 > 0.0 && r2 > 0.0 && r1.is_finite() && r2.is_finite()) {
            return invalid(format!("reference point ({r1}, {r2}) must be positive and finite"));
        }
        Ok(Self { r1, r2 })
    }

    fn contains(&self, p: &ObjectiveVector) -> bool {
        p.f1 < self.r1 && p.f2 < self.r2
    }
}

/// `(n, n)`: the reference point used for `n`-city instances.
pub fn reference_point(n: usize) -> ReferencePoint {
    let r = n.max(1) as f64;
    ReferencePoint { r1: r, r2: r }
}

/// Number of points lying outside the reference box.
pub fn clipped_count(points: &[ObjectiveVector], r: &ReferencePoint) -> usize {
    points.iter().filter(|p| !r.contains(p)).count()
}

/// Nondominated in-box points sorted by increasing `f1`, decreasing `f2`.
fn staircase(points: &[ObjectiveVector], r: &ReferencePoint) -> Vec<ObjectiveVector> {
    let inside: Vec<ObjectiveVector> = points.iter().filter(|p| r.contains(p)).copied().collect();
    nondominated_filter(&inside)
}

/// Exact dominated-area percentage by sweeping the staircase.
pub fn hv_exact_2d(points: &[ObjectiveVector], r: &ReferencePoint) -> f64 {
    let stairs = staircase(points, r);
    let mut area = 0.0;
    for (i, p) in stairs.iter().enumerate() {
        let next_f1 = stairs.get(i + 1).map_or(r.r1, |q| q.f1);
        area += (next_f1 - p.f1) * (r.r2 - p.f2.max(0.0));
    }
    100.0 * area / (r.r1 * r.r2)
}

/// Monte-Carlo estimate with a single worker.
pub fn hv_monte_carlo(points: &[ObjectiveVector], r: &ReferencePoint, samples: usize, seed: RngSeed) -> Result<f64> {
    hv_monte_carlo_workers(points, r, samples, seed, 1)
}

/// Monte-Carlo estimate: share of uniform samples in the box dominated by
/// at least one point. The budget is split across `workers` sub-streams;
/// the result depends only on `(points, r, samples, seed, workers)`.
pub fn hv_monte_carlo_workers(
    points: &[ObjectiveVector],
    r: &ReferencePoint,
    samples: usize,
    seed: RngSeed,
    workers: usize,
) -> Result<f64> {
    if samples == 0 {
        return invalid("need at least one sample");
    }
    if workers == 0 {
        return invalid("need at least one worker");
    }
    let stairs = staircase(points, r);
    if stairs.is_empty() {
        return Ok(0.0);
    }
    let chunk = |w: usize| -> u64 {
        let share = samples / workers + usize::from(w < samples % workers);
        let mut rng = seed.stream(w as u64);
        let mut hits = 0u64;
        for _ in 0..share {
            let u1 = rng.gen::<f64>() * r.r1;
            let u2 = rng.gen::<f64>() * r.r2;
            // Last stair with f1 <= u1 has the lowest f2 among those.
            let idx = stairs.partition_point(|p| p.f1 <= u1);
            if idx > 0 && stairs[idx - 1].f2 <= u2 {
                hits += 1;
            }
        }
        hits
    };
    #[cfg(feature = "parallel")]
    let hits: u64 = {
        use rayon::prelude::*;
        (0..workers).into_par_iter().map(chunk).sum()
    };
    #[cfg(not(feature = "parallel"))]
    let hits: u64 = (0..workers).map(chunk).sum();
    Ok(100.0 * hits as f64 / samples as f64)
}

/// One row of an experiment report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algo: String,
    pub instance: String,
    pub seed: u64,
    pub hv_pct: f64,
    pub archive_size: usize,
    pub wall_s: f64,
    #[serde(default)]
    pub hv_exact_pct: Option<f64>,
    #[serde(default)]
    pub reference: Option<ReferencePoint>,
    #[serde(default)]
    pub clipped: usize,
    #[serde(default)]
    pub mc_workers: usize,
    #[serde(default)]
    pub config: serde_json::Value,
}

impl RunReport {
    pub const CSV_HEADER: [&'static str; 6] = ["algo", "instance", "seed", "hv_pct", "archive_size", "wall_s"];

    fn csv_record(&self) -> [String; 6] {
        [
            self.algo.clone(),
            self.instance.clone(),
            self.seed.to_string(),
            format!("{:.4}", self.hv_pct),
            self.archive_size.to_string(),
            format!("{:.3}", self.wall_s),
        ]
    }

    /// Appends CSV rows, writing the header first when `header` is set.
    pub fn write_csv<W: Write>(rows: &[RunReport], out: W, header: bool) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        let io = |e: csv::Error| crate::Error::Io(std::io::Error::other(e));
        if header {
            w.write_record(Self::CSV_HEADER).map_err(io)?;
        }
        for r in rows {
            w.write_record(r.csv_record()).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    /// One JSON object per line.
    pub fn write_jsonl<W: Write>(rows: &[RunReport], mut out: W) -> Result<()> {
        for r in rows {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}
