use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use staeb_bench::sweep::desk_config;
use staeb_bench::{run_instance, run_sweep, Axis, BenchError, RowWriter, RunOptions, Source, SweepSpec};
use staeb_core::io::{ingest_trips, load_instance, matching_from_json, matching_to_json, save_instance, GenConfig, IngestConfig};
use staeb_core::{validate_matching, Algorithm, GameConfig, Instance, OracleLimits, Params, TieBreak};

#[derive(Parser)]
#[command(name = "staeb", version, about = "Skilled task assignment solvers and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver on one instance and print or append its result row.
    Solve(SolveArgs),
    /// Sweep one generator axis across seeds and algorithms.
    Sweep(SweepArgs),
    /// Write a generated instance.
    Gen(GenArgs),
    /// Build an instance from a trip log.
    Ingest(IngestArgs),
    /// Check a matching file against an instance.
    Validate(ValidateArgs),
}

#[derive(Args, Clone, Default)]
struct GenFlags {
    #[arg(long)]
    tasks: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    skills: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    budget_min: Option<f64>,
    #[arg(long)]
    budget_max: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    money_scale: Option<u32>,
    /// Generator override `key=value`; repeatable.
    #[arg(long = "gen", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Start from the desk-scale defaults instead of the full-scale ones.
    #[arg(long)]
    desk: bool,
}

impl GenFlags {
    fn touches_generator(&self) -> bool {
        self.tasks.is_some()
            || self.workers.is_some()
            || self.skills.is_some()
            || self.radius.is_some()
            || self.budget_min.is_some()
            || self.budget_max.is_some()
            || !self.overrides.is_empty()
            || self.desk
    }

    fn config(&self, seed: Option<u64>) -> Result<GenConfig, BenchError> {
        let mut cfg = if self.desk { desk_config() } else { GenConfig::default() };
        if let Some(s) = seed {
            cfg.seed = s;
        }
        for kv in &self.overrides {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| BenchError::Usage(format!("--gen expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k, v).map_err(|e| BenchError::Usage(e.to_string()))?;
        }
        macro_rules! put {
            ($flag:ident => $($field:tt)+) => {
                if let Some(v) = self.$flag {
                    cfg.$($field)+ = v;
                }
            };
        }
        put!(tasks => num_tasks);
        put!(workers => num_workers);
        put!(skills => num_skills);
        put!(radius => fixed_radius);
        put!(budget_min => budget_range.0);
        put!(budget_max => budget_range.1);
        put!(alpha => alpha);
        put!(beta => beta);
        put!(money_scale => money_scale);
        cfg.validate().map_err(|e| BenchError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    /// Price flags applied to an instance read from disk.
    fn reprice(&self, instance: Instance) -> Result<Instance, BenchError> {
        if self.alpha.is_none() && self.beta.is_none() && self.money_scale.is_none() {
            return Ok(instance);
        }
        let p = instance.params();
        let params = Params::new(
            self.alpha.unwrap_or(p.alpha()),
            self.beta.unwrap_or(p.beta()),
            self.money_scale.unwrap_or(p.money_scale()),
        )
        .map_err(|e| BenchError::Usage(e.to_string()))?;
        Instance::new(
            instance.catalog().clone(),
            instance.tasks().to_vec(),
            instance.workers().to_vec(),
            params,
            instance.bounding_box(),
        )
        .map_err(|e| BenchError::Usage(e.to_string()))
    }
}

#[derive(Args, Clone)]
struct SolverFlags {
    /// Arrival window in seconds, or `off`.
    #[arg(long, default_value = "off", value_parser = parse_window)]
    batch_window: Window,
    /// Re-check the game solver's result with an exhaustive scan.
    #[arg(long)]
    certify_nash: bool,
    /// Exact solver limits, e.g. `tasks=8,workers=16,sets=20000,secs=10`.
    #[arg(long, value_parser = parse_limits)]
    oracle_limits: Option<OracleLimits>,
    /// Best-response sweep cap for the game solver.
    #[arg(long)]
    round_cap: Option<u64>,
    #[arg(long, default_value = "least-extra-cost")]
    tie_break: TieBreak,
}

impl SolverFlags {
    fn options(&self) -> RunOptions {
        RunOptions {
            batch_window: self.batch_window.0,
            certify_nash: self.certify_nash,
            oracle_limits: self.oracle_limits.unwrap_or_default(),
            game: GameConfig {
                round_cap: self.round_cap,
                ..GameConfig::default()
            },
            greedy: staeb_core::GreedyConfig {
                tie_break: self.tie_break,
            },
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Window(Option<f64>);

fn parse_window(s: &str) -> Result<Window, String> {
    if s == "off" {
        return Ok(Window(None));
    }
    match s.parse::<f64>() {
        Ok(w) if w.is_finite() && w > 0.0 => Ok(Window(Some(w))),
        _ => Err(format!("expected positive seconds or `off`, got `{s}`")),
    }
}

fn parse_limits(s: &str) -> Result<OracleLimits, String> {
    let mut l = OracleLimits::default();
    for part in s.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got `{part}`"))?;
        let n: u64 = v.parse().map_err(|_| format!("bad number `{v}`"))?;
        match k {
            "tasks" => l.max_tasks = n as usize,
            "workers" => l.max_workers = n as usize,
            "sets" => l.max_valid_sets_per_task = n as usize,
            "secs" => l.time_budget = Duration::from_secs(n),
            other => return Err(format!("unknown limit `{other}`")),
        }
    }
    l.validate().map_err(|e| e.to_string())?;
    Ok(l)
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file; without it an instance is generated.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, default_value = "ebgt")]
    algo: Algorithm,
    /// Seeds both the generator and the random baseline.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    gen: GenFlags,
    #[command(flatten)]
    solver: SolverFlags,
    /// Append the row to this CSV instead of printing it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the matching as JSON.
    #[arg(long)]
    dump_matching: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value = "tasks")]
    axis: Axis,
    /// Comma-separated axis values; defaults to the preset's list.
    #[arg(long, value_delimiter = ',')]
    values: Vec<String>,
    /// Number of seeds, starting at `--first-seed`.
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long, default_value_t = 0)]
    first_seed: u64,
    /// Comma-separated algorithms; defaults to random, greedy and ebgt.
    #[arg(long, value_delimiter = ',')]
    algos: Vec<Algorithm>,
    /// Worker threads; 0 picks one per core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    gen: GenFlags,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    gen: GenFlags,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct IngestArgs {
    /// Trip CSV with pickup_* and dropoff_* columns, coordinates in meters.
    #[arg(long)]
    trips: PathBuf,
    /// Seed for the synthesized skills and budgets.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    gen: GenFlags,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    matching: PathBuf,
}

fn read(path: &Path) -> Result<String, BenchError> {
    fs::read_to_string(path).map_err(|source| BenchError::File {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), BenchError> {
    fs::write(path, text).map_err(|source| BenchError::File {
        path: path.to_path_buf(),
        source,
    })
}

fn solve(args: SolveArgs) -> Result<(), BenchError> {
    let instance = match &args.instance {
        Some(path) => {
            if args.gen.touches_generator() {
                return Err(BenchError::Usage("generator flags cannot be combined with --instance".into()));
            }
            args.gen.reprice(Source::File(path.clone()).load()?)?
        }
        None => Source::Gen(args.gen.config(Some(args.seed))?).load()?,
    };
    let (axis, value) = match &args.instance {
        Some(p) => ("instance", p.display().to_string()),
        None => ("none", String::new()),
    };
    let (row, matching) = run_instance(&instance, args.algo, args.seed, &args.solver.options(), axis, &value)?;
    if let Some(path) = &args.dump_matching {
        write(path, &matching_to_json(&matching, &instance))?;
    }
    match &args.out {
        Some(path) => RowWriter::append(path)?.write(&row)?,
        None => RowWriter::new(io::stdout().lock())?.write(&row)?,
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<(), BenchError> {
    let mut spec = if args.gen.desk {
        SweepSpec::desk(args.axis)
    } else {
        SweepSpec::full(args.axis)
    };
    spec.base = args.gen.config(None)?;
    if !args.values.is_empty() {
        spec.values = args.values;
    }
    if let Some(n) = args.seeds {
        spec.seeds = (args.first_seed..args.first_seed + n).collect();
    } else {
        spec.seeds = spec.seeds.iter().map(|s| s + args.first_seed).collect();
    }
    if !args.algos.is_empty() {
        spec.algorithms = args.algos;
    }
    let mut opts = args.solver.options();
    opts.certify_nash |= spec.options.certify_nash;
    spec.options = opts;
    log::info!("sweep over {} with {} rows", spec.axis, spec.row_count());

    let mut out = RowWriter::append(&args.out)?;
    let summary = run_sweep(&spec, &mut out, args.jobs)?;
    let stdout = io::stdout();
    let mut so = stdout.lock();
    let _ = writeln!(so, "{:>12} {:>8} {:>6} {:>6} {:>14} {:>12}", spec.axis, "algo", "runs", "failed", "mean_revenue", "mean_ms");
    for c in &summary {
        let _ = writeln!(
            so,
            "{:>12} {:>8} {:>6} {:>6} {:>14.3} {:>12.3}",
            c.axis_value,
            c.algorithm,
            c.runs,
            c.failures,
            c.mean_revenue / f64::from(spec.base.money_scale),
            c.mean_wall_millis
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::Solve(args) => solve(args),
        Command::Sweep(args) => sweep(args),
        Command::Gen(args) => {
            let inst = Source::Gen(args.gen.config(Some(args.seed))?).load()?;
            save_instance(&args.out, &inst)?;
            Ok(())
        }
        Command::Ingest(args) => {
            let cfg = IngestConfig {
                synth: args.gen.config(Some(args.seed))?,
                ..IngestConfig::default()
            };
            let file = fs::File::open(&args.trips).map_err(|source| BenchError::File {
                path: args.trips.clone(),
                source,
            })?;
            let got = ingest_trips(io::BufReader::new(file), &cfg)?;
            if got.skipped > 0 {
                log::warn!("skipped {} malformed trip records", got.skipped);
            }
            save_instance(&args.out, &got.instance)?;
            eprintln!(
                "{} tasks, {} workers, {} records skipped",
                got.instance.tasks().len(),
                got.instance.workers().len(),
                got.skipped
            );
            Ok(())
        }
        Command::Validate(args) => {
            let instance = load_instance(&args.instance)?.value;
            let matching = matching_from_json(&read(&args.matching)?, &instance)?.value;
            let report = validate_matching(&matching, &instance);
            if report.is_ok() {
                println!("ok: {} pairs, revenue {}", matching.len(), {
                    let r = instance.matching_revenue_unchecked(&matching);
                    r.format_units(instance.params().money_scale())
                });
                Ok(())
            } else {
                Err(BenchError::Rejected(report.to_string()))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from([
            "staeb", "solve", "--algo", "greedy", "--gen", "tasks=0", "--batch-window", "3600",
            "--oracle-limits", "tasks=4,workers=8",
        ])
        .unwrap();
        let Command::Solve(args) = cli.command else { panic!() };
        assert_eq!(args.solver.batch_window.0, Some(3600.0));
        assert_eq!(args.solver.oracle_limits.unwrap().max_workers, 8);
        assert_eq!(args.gen.config(Some(1)).unwrap().num_tasks, 0);
        assert!(Cli::try_parse_from(["staeb", "solve", "--batch-window", "-1"]).is_err());
    }
}
