use std::path::PathBuf;
use std::time::{Duration, Instant};

use staeb_core::batch::split_by_window;
use staeb_core::io::{generate_instance, load_instance, GenConfig};
use staeb_core::{
    matching_revenue, solve_exact, solve_greedy, solve_random, Algorithm, Ebgt, GameConfig, GreedyConfig, Instance,
    Matching, Money, OracleError, OracleLimits,
};

use crate::{BenchError, RunRow};

/// Where the instance of a run comes from.
#[derive(Debug, Clone)]
pub enum Source {
    File(PathBuf),
    Gen(GenConfig),
}

impl Source {
    pub fn load(&self) -> Result<Instance, BenchError> {
        Ok(match self {
            Source::File(path) => load_instance(path)?.value,
            Source::Gen(cfg) => generate_instance(cfg)?,
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Solve each arrival window of this many seconds on its own.
    pub batch_window: Option<f64>,
    /// Re-check the game solver's output with an exhaustive best-response scan.
    pub certify_nash: bool,
    pub oracle_limits: OracleLimits,
    pub game: GameConfig,
    pub greedy: GreedyConfig,
}

/// Solver output before revenue is re-derived.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub matching: Matching,
    pub rounds: u64,
    pub moves: u64,
    pub nash: Option<bool>,
    pub cap_hit: bool,
    pub wall: Duration,
}

fn solve_one(instance: &Instance, algo: Algorithm, seed: u64, opts: &RunOptions) -> Result<Outcome, OracleError> {
    let plain = |(matching, report): (Matching, staeb_core::SolveReport)| Outcome {
        matching,
        rounds: report.rounds,
        moves: report.moves,
        nash: report.nash_certified,
        cap_hit: report.round_cap_hit,
        wall: report.wall,
    };
    Ok(match algo {
        Algorithm::Random => plain(solve_random(instance, seed)),
        Algorithm::Greedy => plain(solve_greedy(instance, &opts.greedy)),
        Algorithm::Exact => plain(solve_exact(instance, &opts.oracle_limits)?),
        Algorithm::Ebgt => {
            let game = Ebgt::new(instance);
            let (state, report) = game
                .run(&opts.game)
                .unwrap_or_else(|e| panic!("game solver invariant violated: {e}"));
            let nash = if opts.certify_nash {
                report.nash_certified.map(|claimed| claimed && game.is_nash(&state))
            } else {
                report.nash_certified
            };
            Outcome {
                nash,
                ..plain((state.into_matching(), report))
            }
        }
    })
}

/// Runs `algo`, window by window when batching is on. Counters and wall
/// time add up over windows; the Nash flag holds only if it holds in each.
pub fn solve(instance: &Instance, algo: Algorithm, seed: u64, opts: &RunOptions) -> Result<Outcome, OracleError> {
    let Some(window) = opts.batch_window else {
        return solve_one(instance, algo, seed, opts);
    };
    let mut total = Outcome {
        matching: Matching::new(),
        rounds: 0,
        moves: 0,
        nash: (algo == Algorithm::Ebgt).then_some(true),
        cap_hit: false,
        wall: Duration::ZERO,
    };
    for batch in split_by_window(instance, window) {
        let out = solve_one(&batch.instance, algo, seed, opts)?;
        for pair in batch.lift(&out.matching).pairs() {
            total.matching.insert(pair.clone());
        }
        total.rounds += out.rounds;
        total.moves += out.moves;
        total.nash = total.nash.zip(out.nash).map(|(a, b)| a && b);
        total.cap_hit |= out.cap_hit;
        total.wall += out.wall;
    }
    Ok(total)
}

fn units(m: Money, instance: &Instance) -> f64 {
    m.to_units(instance.params().money_scale())
}

/// Solves once and builds the row. Revenue is recomputed from the matching
/// with full validation; an infeasible matching is an invariant error.
/// Oracle overflow is not an error: the row carries the status instead.
pub fn run_instance(
    instance: &Instance,
    algo: Algorithm,
    seed: u64,
    opts: &RunOptions,
    axis: &str,
    axis_value: &str,
) -> Result<(RunRow, Matching), BenchError> {
    let started = Instant::now();
    let total_tasks = instance.tasks().len();
    let mut row = RunRow {
        axis: axis.to_string(),
        axis_value: axis_value.to_string(),
        algorithm: algo.as_str().to_string(),
        seed,
        revenue: Money::ZERO.format_units(instance.params().money_scale()),
        revenue_scaled: 0,
        matched_tasks: 0,
        total_tasks,
        rounds: 0,
        moves: 0,
        nash_certified: None,
        wall_millis: 0.0,
        mean_extra_cost_subsidy: 0.0,
        served_task_ratio: 0.0,
        worker_revenue_spread: 0.0,
        status: "ok".into(),
    };
    let out = match solve(instance, algo, seed, opts) {
        Ok(out) => out,
        Err(e) => {
            row.status = match e {
                OracleError::TimeBudgetExceeded(_) => "oracle_timeout".into(),
                OracleError::InvalidLimits => return Err(BenchError::Usage(e.to_string())),
                _ => "oracle_overflow".into(),
            };
            row.wall_millis = millis(started.elapsed());
            return Ok((row, Matching::new()));
        }
    };

    let revenue = matching_revenue(&out.matching, instance).map_err(|e| BenchError::Invariant(e.to_string()))?;
    let params = instance.params();
    let mut subsidy = Money::ZERO;
    let mut workers = 0usize;
    let (mut lo, mut hi) = (Money(i64::MAX), Money(i64::MIN));
    for pair in out.matching.pairs() {
        for m in &pair.members {
            subsidy += params.subsidy(m.extra_cost);
            workers += 1;
            let r = instance.member_revenue(m);
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }

    row.revenue = revenue.format_units(params.money_scale());
    row.revenue_scaled = revenue.scaled();
    row.matched_tasks = out.matching.len();
    row.rounds = out.rounds;
    row.moves = out.moves;
    row.nash_certified = out.nash;
    row.wall_millis = millis(out.wall);
    if workers > 0 {
        row.mean_extra_cost_subsidy = units(subsidy, instance) / workers as f64;
        row.worker_revenue_spread = units(hi - lo, instance);
    }
    if total_tasks > 0 {
        row.served_task_ratio = out.matching.len() as f64 / total_tasks as f64;
    }
    if out.cap_hit {
        row.status = "round_cap".into();
    }
    Ok((row, out.matching))
}

fn millis(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

#[cfg(test)]
mod tests {
    use super::*;
    use staeb_core::fixtures::canonical_instance;

    #[test]
    fn canonical_rows() {
        let i0 = canonical_instance();
        let opts = RunOptions {
            certify_nash: true,
            ..RunOptions::default()
        };
        for algo in [Algorithm::Greedy, Algorithm::Ebgt, Algorithm::Exact] {
            let (row, m) = run_instance(&i0, algo, 0, &opts, "instance", "i0").unwrap();
            assert_eq!(row.revenue, "30");
            assert_eq!(row.revenue_scaled, 30_000);
            assert_eq!(row.matched_tasks, 2);
            assert_eq!(row.served_task_ratio, 1.0);
            assert_eq!(m.len(), 2);
            assert!(row.is_ok());
        }
        let (row, _) = run_instance(&i0, Algorithm::Ebgt, 0, &opts, "", "").unwrap();
        assert_eq!(row.nash_certified, Some(true));
        // w1 earns 15, w3 earns 15
        assert_eq!(row.worker_revenue_spread, 0.0);
    }

    #[test]
    fn no_tasks_gives_zero_ratio() {
        let cfg = GenConfig {
            num_tasks: 0,
            num_workers: 10,
            ..GenConfig::default()
        };
        let inst = Source::Gen(cfg).load().unwrap();
        let (row, _) = run_instance(&inst, Algorithm::Greedy, 0, &RunOptions::default(), "", "").unwrap();
        assert_eq!(row.revenue_scaled, 0);
        assert_eq!(row.served_task_ratio, 0.0);
    }

    #[test]
    fn oracle_overflow_is_a_status() {
        let inst = generate_instance(&GenConfig {
            num_tasks: 20,
            num_workers: 40,
            ..GenConfig::default()
        })
        .unwrap();
        let (row, m) = run_instance(&inst, Algorithm::Exact, 0, &RunOptions::default(), "", "").unwrap();
        assert_eq!(row.status, "oracle_overflow");
        assert!(m.is_empty());
    }

    #[test]
    fn batching_one_window_equals_plain() {
        let i0 = canonical_instance();
        let batched = RunOptions {
            batch_window: Some(1e9),
            ..RunOptions::default()
        };
        for algo in [Algorithm::Random, Algorithm::Greedy, Algorithm::Ebgt] {
            let a = solve(&i0, algo, 3, &RunOptions::default()).unwrap();
            let b = solve(&i0, algo, 3, &batched).unwrap();
            assert_eq!(a.matching, b.matching);
        }
    }
}
