use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::IoError;
use crate::model::{BoundingBox, Instance, Params, Point, SkillCatalog, SkillSet, Task, Worker, MAX_SKILLS};

const DAY_SECONDS: f64 = 86_400.0;

/// Synthetic instance parameters. Distances are meters, fees are money units.
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub num_tasks: usize,
    pub num_workers: usize,
    pub num_skills: usize,
    pub fixed_radius: f64,
    /// Inclusive range for each task's extra budget.
    pub budget_range: (f64, f64),
    pub bounding_box: BoundingBox,
    /// Inclusive range of integer skill fees.
    pub fee_range: (u32, u32),
    /// Upper ends larger than `num_skills` are clamped to it.
    pub skills_per_task: (usize, usize),
    pub skills_per_worker: (usize, usize),
    pub alpha: f64,
    pub beta: f64,
    pub money_scale: u32,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            num_tasks: 1000,
            num_workers: 3000,
            num_skills: 12,
            fixed_radius: 1000.0,
            budget_range: (800.0, 1000.0),
            bounding_box: BoundingBox::new(Point::new(0.0, 0.0), Point::new(10_000.0, 10_000.0)),
            fee_range: (10, 50),
            skills_per_task: (1, 4),
            skills_per_worker: (1, 3),
            alpha: 0.5,
            beta: 0.01,
            money_scale: 1000,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), IoError> {
        let bad = |msg: String| Err(IoError::Config(msg));
        if self.num_skills == 0 || self.num_skills > MAX_SKILLS {
            return bad(format!("skills must lie in 1..={MAX_SKILLS}, got {}", self.num_skills));
        }
        if !(self.fixed_radius.is_finite() && self.fixed_radius >= 0.0) {
            return bad(format!("radius must be finite and >= 0, got {}", self.fixed_radius));
        }
        let (b0, b1) = self.budget_range;
        if !(b0.is_finite() && b1.is_finite() && 0.0 <= b0 && b0 <= b1) {
            return bad(format!("budget range ({b0}, {b1}) must satisfy 0 <= min <= max"));
        }
        let bb = self.bounding_box;
        if !bb.is_nondegenerate() || !(bb.max.x - bb.min.x).is_finite() || !(bb.max.y - bb.min.y).is_finite() {
            return bad("bounding box is degenerate".into());
        }
        let (f0, f1) = self.fee_range;
        if f0 == 0 || f0 > f1 {
            return bad(format!("fee range ({f0}, {f1}) must satisfy 1 <= min <= max"));
        }
        for (name, (lo, hi)) in [("task", self.skills_per_task), ("worker", self.skills_per_worker)] {
            if lo == 0 || lo > hi || lo > self.num_skills {
                return bad(format!(
                    "skills per {name} ({lo}, {hi}) must satisfy 1 <= min <= max and min <= skills"
                ));
            }
        }
        Params::new(self.alpha, self.beta, self.money_scale)?;
        Ok(())
    }

    /// Applies one `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), IoError> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, IoError> {
            value
                .trim()
                .parse()
                .map_err(|_| IoError::Config(format!("cannot parse `{value}` for `{key}`")))
        }
        match key.trim() {
            "tasks" => self.num_tasks = num(key, value)?,
            "workers" => self.num_workers = num(key, value)?,
            "skills" => self.num_skills = num(key, value)?,
            "radius" | "r" => self.fixed_radius = num(key, value)?,
            "budget_min" => self.budget_range.0 = num(key, value)?,
            "budget_max" => self.budget_range.1 = num(key, value)?,
            "fee_min" => self.fee_range.0 = num(key, value)?,
            "fee_max" => self.fee_range.1 = num(key, value)?,
            "task_skills_min" => self.skills_per_task.0 = num(key, value)?,
            "task_skills_max" => self.skills_per_task.1 = num(key, value)?,
            "worker_skills_min" => self.skills_per_worker.0 = num(key, value)?,
            "worker_skills_max" => self.skills_per_worker.1 = num(key, value)?,
            "width" => self.bounding_box.max.x = self.bounding_box.min.x + num::<f64>(key, value)?,
            "height" => self.bounding_box.max.y = self.bounding_box.min.y + num::<f64>(key, value)?,
            "alpha" => self.alpha = num(key, value)?,
            "beta" => self.beta = num(key, value)?,
            "money_scale" => self.money_scale = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            other => return Err(IoError::Config(format!("unknown generator key `{other}`"))),
        }
        Ok(())
    }

    pub(crate) fn params(&self) -> Result<Params, IoError> {
        Ok(Params::new(self.alpha, self.beta, self.money_scale)?)
    }
}

pub(crate) fn padded_id(prefix: char, i: usize, count: usize) -> String {
    let width = count.to_string().len().max(2);
    format!("{prefix}{:0width$}", i + 1)
}

pub(crate) fn draw_catalog(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> Result<SkillCatalog, IoError> {
    let entries: Vec<(String, f64)> = (0..cfg.num_skills)
        .map(|i| {
            let fee = rng.gen_range(cfg.fee_range.0..=cfg.fee_range.1);
            (padded_id('s', i, cfg.num_skills), f64::from(fee))
        })
        .collect();
    Ok(SkillCatalog::new(entries)?)
}

/// Uniform size from `range` (clamped to the catalog), then a uniform subset of that size.
pub(crate) fn draw_skills(rng: &mut ChaCha8Rng, num_skills: usize, range: (usize, usize)) -> SkillSet {
    let k = rng.gen_range(range.0..=range.1.min(num_skills));
    sample(rng, num_skills, k).into_iter().collect()
}

pub(crate) fn draw_budget(rng: &mut ChaCha8Rng, cfg: &GenConfig) -> f64 {
    rng.gen_range(cfg.budget_range.0..=cfg.budget_range.1)
}

/// Draws fees, then tasks, then workers from one ChaCha8 stream seeded by `cfg.seed`.
pub fn generate_instance(cfg: &GenConfig) -> Result<Instance, IoError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let catalog = draw_catalog(&mut rng, cfg)?;
    let bb = cfg.bounding_box;
    let point = |rng: &mut ChaCha8Rng| {
        Point::new(rng.gen_range(bb.min.x..bb.max.x), rng.gen_range(bb.min.y..bb.max.y))
    };

    let mut tasks = Vec::with_capacity(cfg.num_tasks);
    for i in 0..cfg.num_tasks {
        let location = point(&mut rng);
        let arrival_time = rng.gen_range(0.0..DAY_SECONDS);
        let extra_budget = draw_budget(&mut rng, cfg);
        let required_skills = draw_skills(&mut rng, cfg.num_skills, cfg.skills_per_task);
        tasks.push(Task {
            id: padded_id('t', i, cfg.num_tasks),
            location,
            arrival_time,
            fixed_radius: cfg.fixed_radius,
            extra_budget,
            required_skills,
        });
    }

    let mut workers = Vec::with_capacity(cfg.num_workers);
    for i in 0..cfg.num_workers {
        let location = point(&mut rng);
        let arrival_time = rng.gen_range(0.0..DAY_SECONDS);
        let skills = draw_skills(&mut rng, cfg.num_skills, cfg.skills_per_worker);
        workers.push(Worker {
            id: padded_id('w', i, cfg.num_workers),
            location,
            arrival_time,
            skills,
        });
    }

    Ok(Instance::new(catalog, tasks, workers, cfg.params()?, Some(bb))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::instance_to_json;

    fn small(seed: u64) -> GenConfig {
        GenConfig {
            num_tasks: 20,
            num_workers: 60,
            seed,
            ..GenConfig::default()
        }
    }

    #[test]
    fn no_tasks() {
        let inst = generate_instance(&GenConfig { num_tasks: 0, ..small(1) }).unwrap();
        assert!(inst.tasks().is_empty());
        assert_eq!(inst.workers().len(), 60);
    }

    #[test]
    fn default_cardinalities() {
        let cfg = GenConfig::default();
        let inst = generate_instance(&cfg).unwrap();
        assert_eq!(inst.tasks().len(), 1000);
        assert_eq!(inst.workers().len(), 3000);
        assert_eq!(inst.catalog().len(), 12);
        assert!(inst.tasks().iter().all(|t| t.fixed_radius == 1000.0));
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = instance_to_json(&generate_instance(&small(7)).unwrap());
        let b = instance_to_json(&generate_instance(&small(7)).unwrap());
        let c = instance_to_json(&generate_instance(&small(8)).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn draws_respect_ranges() {
        let cfg = small(3);
        let inst = generate_instance(&cfg).unwrap();
        let bb = cfg.bounding_box;
        let inside = |p: Point| bb.min.x <= p.x && p.x < bb.max.x && bb.min.y <= p.y && p.y < bb.max.y;
        for (_, fee) in inst.catalog().entries() {
            assert!((10.0..=50.0).contains(&fee) && fee.fract() == 0.0);
        }
        for t in inst.tasks() {
            assert!(inside(t.location));
            assert!((0.0..DAY_SECONDS).contains(&t.arrival_time));
            assert!((800.0..=1000.0).contains(&t.extra_budget));
            assert!((1..=4).contains(&t.required_skills.len()));
        }
        for w in inst.workers() {
            assert!(inside(w.location));
            assert!((1..=3).contains(&w.skills.len()));
        }
    }

    #[test]
    fn skill_range_clamped_to_catalog() {
        let cfg = GenConfig { num_skills: 2, ..small(4) };
        let inst = generate_instance(&cfg).unwrap();
        assert!(inst.tasks().iter().all(|t| t.required_skills.len() <= 2));
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            GenConfig { num_skills: 0, ..small(0) },
            GenConfig { budget_range: (5.0, 1.0), ..small(0) },
            GenConfig { fee_range: (0, 3), ..small(0) },
            GenConfig { skills_per_task: (3, 2), ..small(0) },
            GenConfig { beta: 1.5, ..small(0) },
            GenConfig {
                bounding_box: BoundingBox::new(Point::new(0.0, 0.0), Point::new(0.0, 5.0)),
                ..small(0)
            },
        ];
        for cfg in bad {
            assert!(generate_instance(&cfg).is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn overrides() {
        let mut cfg = GenConfig::default();
        cfg.set("tasks", "0").unwrap();
        cfg.set("budget_min", "10").unwrap();
        cfg.set("width", "500").unwrap();
        assert_eq!(cfg.num_tasks, 0);
        assert_eq!(cfg.budget_range.0, 10.0);
        assert_eq!(cfg.bounding_box.max.x, 500.0);
        assert!(cfg.set("colour", "1").is_err());
        assert!(cfg.set("tasks", "many").is_err());
    }
}
