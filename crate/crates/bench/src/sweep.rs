use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use staeb_core::io::{generate_instance, GenConfig};
use staeb_core::model::{BoundingBox, Point};
use staeb_core::Algorithm;

use crate::run::{run_instance, RunOptions};
use crate::{BenchError, RowWriter, RunRow};

/// The generator parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Tasks,
    Workers,
    Skills,
    FixedRadius,
    /// Values are `min:max` budget ranges.
    ExtraBudget,
}

impl Axis {
    pub const ALL: [Axis; 5] = [Axis::Tasks, Axis::Workers, Axis::Skills, Axis::FixedRadius, Axis::ExtraBudget];

    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Tasks => "tasks",
            Axis::Workers => "workers",
            Axis::Skills => "skills",
            Axis::FixedRadius => "fixed_radius",
            Axis::ExtraBudget => "extra_budget",
        }
    }

    /// Sets this axis to `value` in `cfg`.
    pub fn apply(self, cfg: &mut GenConfig, value: &str) -> Result<(), BenchError> {
        let bad = || BenchError::Usage(format!("bad value `{value}` for axis {self}"));
        match self {
            Axis::Tasks => cfg.num_tasks = value.parse().map_err(|_| bad())?,
            Axis::Workers => cfg.num_workers = value.parse().map_err(|_| bad())?,
            Axis::Skills => cfg.num_skills = value.parse().map_err(|_| bad())?,
            Axis::FixedRadius => cfg.fixed_radius = value.parse().map_err(|_| bad())?,
            Axis::ExtraBudget => {
                let (lo, hi) = value.split_once(':').ok_or_else(bad)?;
                cfg.budget_range = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
            }
        }
        Ok(())
    }

    /// Full-scale value list.
    pub fn full_values(self) -> Vec<String> {
        let v: &[&str] = match self {
            Axis::Tasks => &["800", "900", "1000", "1100", "1200"],
            Axis::Workers => &["2400", "2700", "3000", "3300", "3600"],
            Axis::Skills => &["10", "11", "12", "13", "14"],
            Axis::FixedRadius => &["600", "800", "1000", "1200", "1400"],
            Axis::ExtraBudget => &["400:600", "600:800", "800:1000", "1000:1200", "1200:1400"],
        };
        v.iter().map(|s| s.to_string()).collect()
    }

    /// Desk-scale value list: counts shrink, distances and skills stay.
    pub fn desk_values(self) -> Vec<String> {
        match self {
            Axis::Tasks => vec!["8".into(), "16".into(), "24".into()],
            Axis::Workers => vec!["24".into(), "48".into(), "72".into()],
            other => other.full_values(),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tasks" | "T" => Ok(Axis::Tasks),
            "workers" | "W" => Ok(Axis::Workers),
            "skills" | "S" => Ok(Axis::Skills),
            "fixed_radius" | "radius" | "r" => Ok(Axis::FixedRadius),
            "extra_budget" | "budget" | "b" => Ok(Axis::ExtraBudget),
            other => Err(format!("unknown axis `{other}`")),
        }
    }
}

/// Generator defaults for desk-scale sweeps.
pub fn desk_config() -> GenConfig {
    GenConfig {
        num_tasks: 16,
        num_workers: 48,
        bounding_box: BoundingBox::new(Point::new(0.0, 0.0), Point::new(DESK_SIDE, DESK_SIDE)),
        ..GenConfig::default()
    }
}

/// Side of the desk-scale square, in meters.
pub const DESK_SIDE: f64 = 6000.0;

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<String>,
    pub base: GenConfig,
    pub seeds: Vec<u64>,
    pub algorithms: Vec<Algorithm>,
    pub options: RunOptions,
}

impl SweepSpec {
    /// Desk preset: small counts, 30 seeds, the three heuristic solvers.
    pub fn desk(axis: Axis) -> Self {
        SweepSpec {
            axis,
            values: axis.desk_values(),
            base: desk_config(),
            seeds: (0..30).collect(),
            algorithms: vec![Algorithm::Random, Algorithm::Greedy, Algorithm::Ebgt],
            options: RunOptions {
                certify_nash: true,
                ..RunOptions::default()
            },
        }
    }

    /// Full-scale preset with a handful of seeds.
    pub fn full(axis: Axis) -> Self {
        SweepSpec {
            axis,
            values: axis.full_values(),
            base: GenConfig::default(),
            seeds: (0..3).collect(),
            algorithms: vec![Algorithm::Random, Algorithm::Greedy, Algorithm::Ebgt],
            options: RunOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.values.is_empty() {
            return Err(BenchError::Usage("sweep has no axis values".into()));
        }
        if self.algorithms.is_empty() {
            return Err(BenchError::Usage("sweep has no algorithms".into()));
        }
        if self.seeds.is_empty() {
            return Err(BenchError::Usage("sweep has no seeds".into()));
        }
        for v in &self.values {
            self.config(v, 0)?.validate()?;
        }
        Ok(())
    }

    fn config(&self, value: &str, seed: u64) -> Result<GenConfig, BenchError> {
        let mut cfg = self.base.clone();
        self.axis.apply(&mut cfg, value)?;
        cfg.seed = seed;
        Ok(cfg)
    }

    pub fn row_count(&self) -> usize {
        self.values.len() * self.seeds.len() * self.algorithms.len()
    }
}

/// Per (axis value, algorithm) aggregate over seeds, ok rows only.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub axis_value: String,
    pub algorithm: String,
    pub runs: usize,
    pub failures: usize,
    pub mean_revenue: f64,
    pub mean_wall_millis: f64,
}

fn cell_rows(spec: &SweepSpec, value: &str, seed: u64) -> Vec<RunRow> {
    let axis = spec.axis.as_str();
    let failed = |algo: Algorithm, status: String| RunRow {
        axis: axis.into(),
        axis_value: value.into(),
        algorithm: algo.as_str().into(),
        seed,
        revenue: "0".into(),
        revenue_scaled: 0,
        matched_tasks: 0,
        total_tasks: 0,
        rounds: 0,
        moves: 0,
        nash_certified: None,
        wall_millis: 0.0,
        mean_extra_cost_subsidy: 0.0,
        served_task_ratio: 0.0,
        worker_revenue_spread: 0.0,
        status,
    };
    let instance = match spec.config(value, seed).and_then(|c| Ok(generate_instance(&c)?)) {
        Ok(i) => i,
        Err(e) => return spec.algorithms.iter().map(|&a| failed(a, format!("error: {e}"))).collect(),
    };
    spec.algorithms
        .iter()
        .map(|&algo| match run_instance(&instance, algo, seed, &spec.options, axis, value) {
            Ok((row, _)) => row,
            Err(e) => failed(algo, format!("error: {e}")),
        })
        .collect()
}

/// Runs every (value, seed) cell on up to `jobs` threads (0 picks the
/// default) and writes rows in value, seed, algorithm order. Each instance is
/// shared by all algorithms of its cell. A failing run is recorded in its
/// row's status and the sweep goes on.
pub fn run_sweep<W: Write>(
    spec: &SweepSpec,
    out: &mut RowWriter<W>,
    jobs: usize,
) -> Result<Vec<CellSummary>, BenchError> {
    spec.validate()?;
    let cells: Vec<(&str, u64)> = spec
        .values
        .iter()
        .flat_map(|v| spec.seeds.iter().map(move |&s| (v.as_str(), s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| BenchError::Usage(format!("cannot start {jobs} threads: {e}")))?;
    let results: Vec<Vec<RunRow>> =
        pool.install(|| cells.par_iter().map(|&(v, s)| cell_rows(spec, v, s)).collect());

    let mut summary = Vec::new();
    for (value, chunk) in spec.values.iter().zip(results.chunks(spec.seeds.len())) {
        for (k, algo) in spec.algorithms.iter().enumerate() {
            let rows: Vec<&RunRow> = chunk.iter().map(|c| &c[k]).collect();
            let ok: Vec<&&RunRow> = rows.iter().filter(|r| r.is_ok()).collect();
            let mean = |f: fn(&RunRow) -> f64| {
                if ok.is_empty() {
                    f64::NAN
                } else {
                    ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64
                }
            };
            summary.push(CellSummary {
                axis_value: value.clone(),
                algorithm: algo.as_str().into(),
                runs: ok.len(),
                failures: rows.len() - ok.len(),
                mean_revenue: mean(|r| r.revenue_scaled as f64),
                mean_wall_millis: mean(|r| r.wall_millis),
            });
        }
    }
    for rows in &results {
        for row in rows {
            out.write(row)?;
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_tasks_row_count() {
        assert_eq!(SweepSpec::desk(Axis::Tasks).row_count(), 270);
    }

    #[test]
    fn axis_apply() {
        let mut cfg = GenConfig::default();
        Axis::ExtraBudget.apply(&mut cfg, "400:600").unwrap();
        assert_eq!(cfg.budget_range, (400.0, 600.0));
        Axis::Workers.apply(&mut cfg, "24").unwrap();
        assert_eq!(cfg.num_workers, 24);
        assert!(Axis::ExtraBudget.apply(&mut cfg, "400").is_err());
        assert_eq!("radius".parse::<Axis>(), Ok(Axis::FixedRadius));
    }

    #[test]
    fn spec_validation() {
        let mut spec = SweepSpec::desk(Axis::Tasks);
        spec.algorithms.clear();
        assert!(spec.validate().is_err());
        let mut spec = SweepSpec::desk(Axis::Tasks);
        spec.values = vec!["x".into()];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn small_sweep_writes_in_order() {
        let mut spec = SweepSpec::desk(Axis::Tasks);
        spec.seeds = vec![0, 1];
        let mut w = RowWriter::new(Vec::new()).unwrap();
        let summary = run_sweep(&spec, &mut w, 2).unwrap();
        assert_eq!(summary.len(), 9);
        assert!(summary.iter().all(|c| c.runs == 2 && c.failures == 0));
    }

    #[test]
    fn exact_overflow_leaves_other_rows() {
        let mut spec = SweepSpec::desk(Axis::Tasks);
        spec.seeds = vec![0];
        spec.algorithms = vec![Algorithm::Greedy, Algorithm::Exact];
        let mut w = RowWriter::new(Vec::new()).unwrap();
        let summary = run_sweep(&spec, &mut w, 1).unwrap();
        for c in summary {
            if c.algorithm == "exact" {
                assert_eq!(c.failures, 1);
            } else {
                assert_eq!(c.runs, 1);
            }
        }
    }
}
