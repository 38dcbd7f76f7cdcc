//! Candidate filtering, pair/matching validation and the uniform grid index.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::model::{
    travel_cost, Instance, Matching, PairAssignment, Point, SkillSet, TaskIdx, WorkerIdx,
    DISTANCE_TOLERANCE,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeasibilityError {
    #[error("grid cell size must be positive and finite, got {0}")]
    InvalidCellSize(f64),
}

/// Which workers are still free to be assigned during a solver run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Availability {
    free: Vec<bool>,
}

impl Availability {
    pub fn all(workers: usize) -> Self {
        Availability {
            free: vec![true; workers],
        }
    }

    pub fn none(workers: usize) -> Self {
        Availability {
            free: vec![false; workers],
        }
    }

    pub fn from_workers(workers: usize, free: impl IntoIterator<Item = WorkerIdx>) -> Self {
        let mut a = Self::none(workers);
        for w in free {
            a.release(w);
        }
        a
    }

    pub fn is_free(&self, worker: WorkerIdx) -> bool {
        self.free[worker]
    }

    pub fn take(&mut self, worker: WorkerIdx) {
        self.free[worker] = false;
    }

    pub fn release(&mut self, worker: WorkerIdx) {
        self.free[worker] = true;
    }

    pub fn count(&self) -> usize {
        self.free.iter().filter(|f| **f).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = WorkerIdx> + '_ {
        self.free.iter().enumerate().filter(|(_, f)| **f).map(|(w, _)| w)
    }
}

/// Uniform grid over worker locations, stored row-major with each cell's
/// members contiguous so that one row of a query is one slice.
#[derive(Debug, Clone)]
pub struct GridIndex {
    cell_size: f64,
    origin: (i64, i64),
    cols: usize,
    rows: usize,
    /// `starts[c]..starts[c + 1]` are the entries of cell `c`.
    starts: Vec<usize>,
    entries: Vec<(usize, Point)>,
}

/// Caps the number of cells at a small multiple of the point count; outliers
/// would otherwise blow up the dense layout.
const MAX_CELLS_PER_POINT: usize = 4;

pub fn build_index(workers: &[crate::model::Worker], cell_size: f64) -> Result<GridIndex, FeasibilityError> {
    GridIndex::from_points(workers.iter().map(|w| w.location), cell_size)
}

/// Half the largest task reach, so a query touches about a 5x5 block of cells.
pub fn default_cell_size(instance: &Instance) -> f64 {
    let max_r = instance.tasks().iter().map(|t| t.fixed_radius).fold(0.0, f64::max);
    let max_b = instance.tasks().iter().map(|t| t.extra_budget).fold(0.0, f64::max);
    let size = (max_r + max_b) / 2.0;
    if size > 0.0 {
        size
    } else {
        1.0
    }
}

impl GridIndex {
    /// `cell_size` is a lower bound; it grows if the points are spread so
    /// thinly that the grid would have far more cells than points.
    pub fn from_points(points: impl IntoIterator<Item = Point>, cell_size: f64) -> Result<Self, FeasibilityError> {
        if !(cell_size.is_finite() && cell_size > 0.0) {
            return Err(FeasibilityError::InvalidCellSize(cell_size));
        }
        let points: Vec<Point> = points.into_iter().collect();
        let mut cell_size = cell_size;
        let budget = (points.len() * MAX_CELLS_PER_POINT).max(1024) as f64;
        let (origin, cols, rows) = loop {
            let cells: Vec<(i64, i64)> = points.iter().map(|&p| Self::cell_of(p, cell_size)).collect();
            let (mut x0, mut y0, mut x1, mut y1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
            for &(cx, cy) in &cells {
                x0 = x0.min(cx);
                y0 = y0.min(cy);
                x1 = x1.max(cx);
                y1 = y1.max(cy);
            }
            if cells.is_empty() {
                break ((0, 0), 0, 0);
            }
            let (cols, rows) = ((x1 - x0) as f64 + 1.0, (y1 - y0) as f64 + 1.0);
            if cols * rows <= budget {
                break ((x0, y0), cols as usize, rows as usize);
            }
            cell_size *= ((cols * rows) / budget).sqrt().max(2.0);
        };

        let slot = |p: Point| {
            let (cx, cy) = Self::cell_of(p, cell_size);
            (cy - origin.1) as usize * cols + (cx - origin.0) as usize
        };
        let mut starts = vec![0usize; cols * rows + 1];
        for &p in &points {
            starts[slot(p) + 1] += 1;
        }
        for c in 1..starts.len() {
            starts[c] += starts[c - 1];
        }
        let mut fill = starts.clone();
        let mut entries = vec![(0, Point::default()); points.len()];
        for (i, &p) in points.iter().enumerate() {
            let s = slot(p);
            entries[fill[s]] = (i, p);
            fill[s] += 1;
        }
        Ok(GridIndex {
            cell_size,
            origin,
            cols,
            rows,
            starts,
            entries,
        })
    }

    fn cell_of(p: Point, cell_size: f64) -> (i64, i64) {
        ((p.x / cell_size).floor() as i64, (p.y / cell_size).floor() as i64)
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    /// Number of non-empty cells.
    pub fn bucket_count(&self) -> usize {
        self.starts.windows(2).filter(|w| w[1] > w[0]).count()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Indexed items within `radius` of `center` (inclusive), ascending.
    pub fn query(&self, center: Point, radius: f64) -> Vec<usize> {
        self.query_with(center, radius, |_| true).into_iter().map(|(i, _)| i).collect()
    }

    /// Items accepted by `keep` and within `radius` of `center`, with their
    /// distance, ascending by index. `keep` runs before the distance test.
    pub fn query_with(&self, center: Point, radius: f64, mut keep: impl FnMut(usize) -> bool) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        if !(radius >= 0.0) || self.entries.is_empty() {
            return out;
        }
        // pad by a hair so float rounding at cell borders never drops a point
        let pad = radius * 1e-9 + 1e-9;
        let lo = Self::cell_of(Point::new(center.x - radius - pad, center.y - radius - pad), self.cell_size);
        let hi = Self::cell_of(Point::new(center.x + radius + pad, center.y + radius + pad), self.cell_size);
        let (lo, hi) = ((lo.0 - self.origin.0, lo.1 - self.origin.1), (hi.0 - self.origin.0, hi.1 - self.origin.1));
        if hi.0 < 0 || hi.1 < 0 || lo.0 >= self.cols as i64 || lo.1 >= self.rows as i64 {
            return out;
        }
        let (x0, x1) = (lo.0.max(0) as usize, (hi.0 as usize).min(self.cols - 1));
        let (y0, y1) = (lo.1.max(0) as usize, (hi.1 as usize).min(self.rows - 1));
        for row in y0..=y1 {
            let base = row * self.cols;
            for &(i, p) in &self.entries[self.starts[base + x0]..self.starts[base + x1 + 1]] {
                if keep(i) {
                    let d = travel_cost(center, p);
                    if d <= radius {
                        out.push((i, d));
                    }
                }
            }
        }
        out.sort_unstable_by_key(|&(i, _)| i);
        out
    }
}

/// Available workers that hold at least one of `remaining_skills` and lie
/// within `fixed_radius + remaining_budget` of the task, in ascending worker
/// order.
pub fn candidate_workers(
    index: &GridIndex,
    instance: &Instance,
    task: TaskIdx,
    remaining_skills: SkillSet,
    remaining_budget: f64,
    available: &Availability,
) -> Vec<WorkerIdx> {
    let t = instance.task(task);
    let radius = t.fixed_radius + remaining_budget.max(0.0);
    index
        .query(t.location, radius)
        .into_iter()
        .filter(|&w| {
            let worker = instance.worker(w);
            available.is_free(w) && !worker.skills.is_disjoint(remaining_skills)
        })
        .collect()
}

/// A worker within a task's full reach, with its precomputed costs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reach {
    pub worker: WorkerIdx,
    pub cost: f64,
    pub extra_cost: f64,
}

/// Static per-task neighbourhoods: every worker that shares a skill with the
/// task and lies within `fixed_radius + extra_budget`. Built once per solve
/// from a [`GridIndex`]; solvers filter it by availability and the current
/// remaining budget instead of re-querying the grid.
#[derive(Debug, Clone)]
pub struct ReachTable {
    by_task: Vec<Vec<Reach>>,
    by_worker: Vec<Vec<TaskIdx>>,
}

impl ReachTable {
    pub fn build(instance: &Instance) -> Self {
        let index = build_index(instance.workers(), default_cell_size(instance))
            .expect("default cell size is positive");
        Self::with_index(instance, &index)
    }

    pub fn with_index(instance: &Instance, index: &GridIndex) -> Self {
        let mut by_worker = vec![Vec::new(); instance.workers().len()];
        let by_task = instance
            .tasks()
            .iter()
            .enumerate()
            .map(|(ti, t)| {
                let shares = |w: usize| !instance.worker(w).skills.is_disjoint(t.required_skills);
                index
                    .query_with(t.location, t.reach(), shares)
                    .into_iter()
                    .map(|(w, cost)| {
                        by_worker[w].push(ti);
                        Reach {
                            worker: w,
                            cost,
                            extra_cost: (cost - t.fixed_radius).max(0.0),
                        }
                    })
                    .collect()
            })
            .collect();
        ReachTable { by_task, by_worker }
    }

    pub fn task_reach(&self, task: TaskIdx) -> &[Reach] {
        &self.by_task[task]
    }

    /// Tasks reachable by `worker` with at least one shared skill, ascending.
    pub fn tasks_of(&self, worker: WorkerIdx) -> &[TaskIdx] {
        &self.by_worker[worker]
    }

    pub fn reaches(&self, task: TaskIdx, worker: WorkerIdx) -> Option<&Reach> {
        self.by_task[task]
            .binary_search_by_key(&worker, |r| r.worker)
            .ok()
            .map(|i| &self.by_task[task][i])
    }

    /// Same contract as [`candidate_workers`], served from the table.
    pub fn candidates<'a>(
        &'a self,
        instance: &'a Instance,
        task: TaskIdx,
        remaining_skills: SkillSet,
        remaining_budget: f64,
        available: &'a Availability,
    ) -> impl Iterator<Item = &'a Reach> + 'a {
        let radius = instance.task(task).fixed_radius + remaining_budget.max(0.0);
        self.by_task[task].iter().filter(move |r| {
            r.cost <= radius
                && available.is_free(r.worker)
                && !instance.worker(r.worker).skills.is_disjoint(remaining_skills)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationCode {
    UncoveredSkill,
    BudgetExceeded,
    RedundantWorker,
    DuplicateWorker,
    RangeExceeded,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::UncoveredSkill => "UNCOVERED_SKILL",
            ViolationCode::BudgetExceeded => "BUDGET_EXCEEDED",
            ViolationCode::RedundantWorker => "REDUNDANT_WORKER",
            ViolationCode::DuplicateWorker => "DUPLICATE_WORKER",
            ViolationCode::RangeExceeded => "RANGE_EXCEEDED",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

/// All invariant violations found; empty means valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    fn push(&mut self, code: ViolationCode, message: String) {
        self.violations.push(Violation { code, message });
    }

    fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {}", v.code, v.message)?;
        }
        Ok(())
    }
}

/// Checks coverage, crediting, budget and reach for one pair, reporting every
/// violation found.
pub fn validate_pair(pair: &PairAssignment, instance: &Instance) -> ValidationReport {
    use ViolationCode::*;

    let mut report = ValidationReport::default();
    let Some(task) = instance.tasks().get(pair.task) else {
        report.push(UncoveredSkill, format!("unknown task index {}", pair.task));
        return report;
    };
    let catalog = instance.catalog();
    let names = |set: SkillSet| catalog.names(set).join(",");

    let mut seen: Vec<WorkerIdx> = Vec::with_capacity(pair.members.len());
    let mut credited_so_far = SkillSet::EMPTY;
    let mut spent = 0.0;
    for m in &pair.members {
        let Some(worker) = instance.workers().get(m.worker) else {
            report.push(UncoveredSkill, format!("{}: unknown worker index {}", task.id, m.worker));
            continue;
        };
        if seen.contains(&m.worker) {
            report.push(DuplicateWorker, format!("{}: {} listed twice", task.id, worker.id));
            continue;
        }
        seen.push(m.worker);

        if m.credited.is_empty() {
            report.push(RedundantWorker, format!("{}: {} is credited with no skill", task.id, worker.id));
        }
        let not_held = m.credited.difference(worker.skills);
        if !not_held.is_empty() {
            report.push(
                UncoveredSkill,
                format!("{}: {} is credited with skills it lacks [{}]", task.id, worker.id, names(not_held)),
            );
        }
        let not_needed = m.credited.difference(task.required_skills);
        if !not_needed.is_empty() {
            report.push(
                RedundantWorker,
                format!("{}: {} is credited with unrequired skills [{}]", task.id, worker.id, names(not_needed)),
            );
        }
        let twice = m.credited.intersection(credited_so_far);
        if !twice.is_empty() {
            report.push(
                RedundantWorker,
                format!("{}: skills [{}] credited to more than one worker", task.id, names(twice)),
            );
        }
        credited_so_far = credited_so_far.union(m.credited);

        let cost = travel_cost(task.location, worker.location);
        let expected = (cost - task.fixed_radius).max(0.0);
        if (m.extra_cost - expected).abs() > DISTANCE_TOLERANCE || !m.extra_cost.is_finite() {
            report.push(
                BudgetExceeded,
                format!(
                    "{}: {} records extra cost {} but travels {} beyond the fixed range",
                    task.id, worker.id, m.extra_cost, expected
                ),
            );
        }
        if cost > task.reach() + DISTANCE_TOLERANCE {
            report.push(
                RangeExceeded,
                format!("{}: {} is {} away, reach is {}", task.id, worker.id, cost, task.reach()),
            );
        }
        spent += expected;
    }

    let uncovered = task.required_skills.difference(credited_so_far);
    if !uncovered.is_empty() {
        report.push(UncoveredSkill, format!("{}: skills [{}] not covered", task.id, names(uncovered)));
    }
    if spent > task.extra_budget + DISTANCE_TOLERANCE {
        report.push(
            BudgetExceeded,
            format!("{}: extra cost {} exceeds budget {}", task.id, spent, task.extra_budget),
        );
    }
    report
}

/// Validates every pair and cross-pair worker disjointness.
pub fn validate_matching(matching: &Matching, instance: &Instance) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut owner: HashMap<WorkerIdx, TaskIdx> = HashMap::new();
    for pair in matching.pairs() {
        report.extend(validate_pair(pair, instance));
        for w in pair.workers() {
            if let Some(prev) = owner.insert(w, pair.task) {
                if prev != pair.task {
                    let name = instance.workers().get(w).map_or("?", |x| x.id.as_str());
                    report.push(
                        ViolationCode::DuplicateWorker,
                        format!(
                            "{} assigned to both {} and {}",
                            name,
                            instance.task(prev).id,
                            instance.task(pair.task).id
                        ),
                    );
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::canonical_instance;
    use crate::model::{Member, Params, SkillCatalog, Task, Worker};
    use proptest::prelude::*;

    fn ids(instance: &Instance, ws: &[WorkerIdx]) -> Vec<String> {
        ws.iter().map(|&w| instance.worker(w).id.clone()).collect()
    }

    fn linear_candidates(
        instance: &Instance,
        task: TaskIdx,
        remaining: SkillSet,
        budget: f64,
        available: &Availability,
    ) -> Vec<WorkerIdx> {
        let t = instance.task(task);
        (0..instance.workers().len())
            .filter(|&w| {
                let wk = instance.worker(w);
                available.is_free(w)
                    && !wk.skills.is_disjoint(remaining)
                    && travel_cost(t.location, wk.location) <= t.fixed_radius + budget
            })
            .collect()
    }

    #[test]
    fn empty_index_has_no_buckets() {
        let idx = build_index(&[], 10.0).unwrap();
        assert_eq!(idx.bucket_count(), 0);
        assert!(idx.query(Point::new(0.0, 0.0), 100.0).is_empty());
    }

    #[test]
    fn far_outliers_grow_the_cells() {
        let pts = [Point::new(0.0, 0.0), Point::new(1e9, 1e9), Point::new(0.5, 0.5)];
        let idx = GridIndex::from_points(pts, 1.0).unwrap();
        assert!(idx.cell_size() > 1.0);
        assert_eq!(idx.query(Point::new(0.0, 0.0), 1.0), vec![0, 2]);
        assert_eq!(idx.query(Point::new(1e9, 1e9), 0.0), vec![1]);
        assert!(idx.query(Point::new(-5e9, 0.0), 10.0).is_empty());
    }

    #[test]
    fn rejects_bad_cell_size() {
        assert_eq!(build_index(&[], 0.0).unwrap_err(), FeasibilityError::InvalidCellSize(0.0));
        assert!(build_index(&[], f64::NAN).is_err());
    }

    #[test]
    fn range_query_on_canonical_instance() {
        let i0 = canonical_instance();
        let idx = build_index(i0.workers(), 10.0).unwrap();
        let hits = idx.query(Point::new(0.0, 0.0), 9.0);
        assert_eq!(ids(&i0, &hits), ["w1", "w2", "w4"]);
    }

    #[test]
    fn boundary_point_is_found_from_both_sides() {
        let p = Point::new(10.0, 5.0);
        let idx = GridIndex::from_points([p], 10.0).unwrap();
        assert_eq!(idx.query(Point::new(9.5, 5.0), 0.5), vec![0]);
        assert_eq!(idx.query(Point::new(10.5, 5.0), 0.5), vec![0]);
        assert!(idx.query(Point::new(8.0, 5.0), 1.9).is_empty());
    }

    #[test]
    fn candidates_on_canonical_instance() {
        let i0 = canonical_instance();
        let idx = build_index(i0.workers(), default_cell_size(&i0)).unwrap();
        let all = Availability::all(4);
        let t1 = i0.task_index("t1").unwrap();
        let t2 = i0.task_index("t2").unwrap();
        let s12 = i0.catalog().resolve(&["s1", "s2"]).unwrap();
        let s3 = i0.catalog().resolve(&["s3"]).unwrap();
        assert_eq!(ids(&i0, &candidate_workers(&idx, &i0, t1, s12, 4.0, &all)), ["w1", "w2", "w4"]);
        assert_eq!(ids(&i0, &candidate_workers(&idx, &i0, t2, s3, 0.0, &all)), ["w3"]);
        let without_w3 = Availability::from_workers(4, [0, 1, 3]);
        assert!(candidate_workers(&idx, &i0, t2, s3, 0.0, &without_w3).is_empty());
    }

    fn member(i0: &Instance, task: TaskIdx, w: &str, skills: &[&str]) -> Member {
        i0.member(task, i0.worker_index(w).unwrap(), i0.catalog().resolve(skills).unwrap())
    }

    #[test]
    fn validate_pair_examples() {
        let i0 = canonical_instance();
        let t1 = i0.task_index("t1").unwrap();
        let ok = PairAssignment {
            task: t1,
            members: vec![member(&i0, t1, "w1", &["s1", "s2"])],
        };
        assert!(validate_pair(&ok, &i0).is_ok());

        let uncovered = PairAssignment {
            task: t1,
            members: vec![member(&i0, t1, "w2", &["s2"])],
        };
        let r = validate_pair(&uncovered, &i0);
        assert!(r.has(ViolationCode::UncoveredSkill));
        assert!(r.violations[0].message.contains("s1"));

        // same instance with t1's budget cut to 1
        let mut tasks = i0.tasks().to_vec();
        tasks[t1].extra_budget = 1.0;
        let tight = Instance::new(i0.catalog().clone(), tasks, i0.workers().to_vec(), *i0.params(), None).unwrap();
        let pair = PairAssignment {
            task: t1,
            members: vec![member(&tight, t1, "w2", &["s2"]), member(&tight, t1, "w4", &["s1"])],
        };
        let r = validate_pair(&pair, &tight);
        assert!(r.has(ViolationCode::BudgetExceeded));
        // w2 is 7 away; reach is now 6
        assert!(r.has(ViolationCode::RangeExceeded));
    }

    #[test]
    fn validate_pair_reports_all_violations() {
        let i0 = canonical_instance();
        let t1 = i0.task_index("t1").unwrap();
        let w1 = i0.worker_index("w1").unwrap();
        let s3 = i0.catalog().resolve(&["s3"]).unwrap();
        let pair = PairAssignment {
            task: t1,
            members: vec![
                Member {
                    worker: w1,
                    credited: s3,
                    extra_cost: 3.0,
                },
                Member {
                    worker: w1,
                    credited: SkillSet::EMPTY,
                    extra_cost: 0.0,
                },
            ],
        };
        let r = validate_pair(&pair, &i0);
        for code in [
            ViolationCode::UncoveredSkill,
            ViolationCode::RedundantWorker,
            ViolationCode::DuplicateWorker,
            ViolationCode::BudgetExceeded,
        ] {
            assert!(r.has(code), "missing {code}: {r}");
        }

        let empty = PairAssignment::new(t1);
        assert!(validate_pair(&empty, &i0).has(ViolationCode::UncoveredSkill));

        let overlap = PairAssignment {
            task: t1,
            members: vec![member(&i0, t1, "w1", &["s1", "s2"]), member(&i0, t1, "w4", &["s1"])],
        };
        assert!(validate_pair(&overlap, &i0).has(ViolationCode::RedundantWorker));
    }

    #[test]
    fn validate_matching_examples() {
        let i0 = canonical_instance();
        assert!(validate_matching(&Matching::new(), &i0).is_ok());

        let t1 = i0.task_index("t1").unwrap();
        let t2 = i0.task_index("t2").unwrap();
        let mut m = Matching::new();
        m.insert(PairAssignment {
            task: t1,
            members: vec![member(&i0, t1, "w1", &["s1", "s2"])],
        });
        m.insert(PairAssignment {
            task: t2,
            members: vec![member(&i0, t2, "w3", &["s3"])],
        });
        assert!(validate_matching(&m, &i0).is_ok());

        m.insert(PairAssignment {
            task: t2,
            members: vec![member(&i0, t2, "w1", &["s1"])],
        });
        let r = validate_matching(&m, &i0);
        assert!(r.has(ViolationCode::DuplicateWorker), "{r}");
    }

    fn random_instance(seed: u64, workers: usize, tasks: usize) -> Instance {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let catalog = SkillCatalog::new((0..6).map(|i| (format!("s{i}"), 10.0 + i as f64))).unwrap();
        let mut skills = || -> SkillSet {
            let bits = rng.gen_range(1u128..64);
            SkillSet::from_bits(bits)
        };
        let mut pts = Vec::new();
        let mut rng2 = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        for _ in 0..workers + tasks {
            pts.push(Point::new(rng2.gen_range(-500.0..500.0), rng2.gen_range(-500.0..500.0)));
        }
        let ws = (0..workers)
            .map(|i| Worker {
                id: format!("w{i:04}"),
                location: pts[i],
                arrival_time: 0.0,
                skills: skills(),
            })
            .collect();
        let ts = (0..tasks)
            .map(|i| Task {
                id: format!("t{i:04}"),
                location: pts[workers + i],
                arrival_time: 0.0,
                fixed_radius: rng2.gen_range(0.0..150.0),
                extra_budget: rng2.gen_range(0.0..150.0),
                required_skills: skills(),
            })
            .collect();
        Instance::new(catalog, ts, ws, Params::new(0.5, 0.5, 1000).unwrap(), None).unwrap()
    }

    #[test]
    fn grid_and_reach_table_match_linear_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut queries = 0;
        for seed in 0..20 {
            let inst = random_instance(seed, 200, 30);
            let cell = [default_cell_size(&inst), 37.0, 1000.0][seed as usize % 3];
            let idx = build_index(inst.workers(), cell).unwrap();
            let reach = ReachTable::with_index(&inst, &idx);
            for t in 0..inst.tasks().len() {
                for _ in 0..3 {
                    let avail = Availability::from_workers(200, (0..200).filter(|_| rng.gen_bool(0.7)));
                    let remaining = SkillSet::from_bits(rng.gen_range(1u128..64))
                        .intersection(inst.task(t).required_skills);
                    if remaining.is_empty() {
                        continue;
                    }
                    let budget = rng.gen_range(0.0..=inst.task(t).extra_budget);
                    let expected = linear_candidates(&inst, t, remaining, budget, &avail);
                    assert_eq!(candidate_workers(&idx, &inst, t, remaining, budget, &avail), expected);
                    let from_table: Vec<_> =
                        reach.candidates(&inst, t, remaining, budget, &avail).map(|r| r.worker).collect();
                    assert_eq!(from_table, expected);
                    queries += 1;
                }
            }
        }
        assert!(queries >= 1000, "only {queries} queries ran");
    }

    proptest! {
        #[test]
        fn travel_cost_is_a_metric(
            ax in -1e4f64..1e4, ay in -1e4f64..1e4,
            bx in -1e4f64..1e4, by in -1e4f64..1e4,
            cx in -1e4f64..1e4, cy in -1e4f64..1e4,
        ) {
            let (a, b, c) = (Point::new(ax, ay), Point::new(bx, by), Point::new(cx, cy));
            prop_assert_eq!(travel_cost(a, b), travel_cost(b, a));
            prop_assert!(travel_cost(a, b) >= 0.0);
            prop_assert!(travel_cost(a, c) <= travel_cost(a, b) + travel_cost(b, c) + 1e-9);
        }

        #[test]
        fn extra_cost_zero_iff_inside_fixed_range(
            x in -100f64..100.0, y in -100f64..100.0, r in 0f64..100.0,
        ) {
            let t = Task {
                id: "t".into(),
                location: Point::new(0.0, 0.0),
                arrival_time: 0.0,
                fixed_radius: r,
                extra_budget: 0.0,
                required_skills: SkillSet::single(0),
            };
            let w = Worker { id: "w".into(), location: Point::new(x, y), arrival_time: 0.0, skills: SkillSet::single(0) };
            let inside = travel_cost(t.location, w.location) <= r;
            prop_assert_eq!(crate::model::extra_cost(&t, &w) == 0.0, inside);
        }
    }
}
