//! Domain types and the revenue formulas.
//!
//! Money is held on an integer grid: every fee-derived income and every
//! travel subsidy is multiplied by the instance's `money_scale` and rounded
//! once per worker, so revenues add up exactly no matter the summation order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use thiserror::Error;

use crate::feasibility::{self, ValidationReport};

/// Largest catalog a [`SkillSet`] can address.
pub const MAX_SKILLS: usize = 128;

/// Slack (meters) allowed when comparing accumulated extra costs against a
/// budget or a reach radius. Distances are floating point; the slack absorbs
/// summation-order differences between solvers and the validator.
pub const DISTANCE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("skill catalog is empty")]
    EmptyCatalog,
    #[error("skill catalog has {0} entries, at most {MAX_SKILLS} are supported")]
    TooManySkills(usize),
    #[error("duplicate skill id `{0}`")]
    DuplicateSkill(String),
    #[error("skill `{id}` has non-positive or non-finite fee {fee}")]
    InvalidFee { id: String, fee: f64 },
    #[error("unknown skill id `{0}`")]
    UnknownSkill(String),
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("beta must lie in (0, 1), got {0}")]
    InvalidBeta(f64),
    #[error("money scale must be at least 1")]
    InvalidMoneyScale,
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("{kind} `{id}`: {reason}")]
    InvalidEntity {
        kind: &'static str,
        id: String,
        reason: String,
    },
    #[error("credited fee sum must be positive, got {0}")]
    NonPositiveFeeSum(f64),
    #[error("extra cost must be finite and non-negative, got {0}")]
    InvalidExtraCost(f64),
}

/// Index of a skill inside its [`SkillCatalog`].
pub type SkillIdx = usize;

/// A set of catalog skills, stored as a bitmask over catalog indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkillSet(u128);

impl SkillSet {
    pub const EMPTY: SkillSet = SkillSet(0);

    pub fn single(skill: SkillIdx) -> Self {
        debug_assert!(skill < MAX_SKILLS);
        SkillSet(1u128 << skill)
    }

    pub fn from_bits(bits: u128) -> Self {
        SkillSet(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn insert(&mut self, skill: SkillIdx) {
        self.0 |= 1u128 << skill;
    }

    pub fn remove(&mut self, skill: SkillIdx) {
        self.0 &= !(1u128 << skill);
    }

    pub fn contains(self, skill: SkillIdx) -> bool {
        skill < MAX_SKILLS && self.0 & (1u128 << skill) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn intersection(self, other: SkillSet) -> SkillSet {
        SkillSet(self.0 & other.0)
    }

    pub fn union(self, other: SkillSet) -> SkillSet {
        SkillSet(self.0 | other.0)
    }

    pub fn difference(self, other: SkillSet) -> SkillSet {
        SkillSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: SkillSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: SkillSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Skill indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = SkillIdx> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let idx = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(idx)
        })
    }
}

impl FromIterator<SkillIdx> for SkillSet {
    fn from_iter<I: IntoIterator<Item = SkillIdx>>(iter: I) -> Self {
        let mut set = SkillSet::EMPTY;
        for s in iter {
            set.insert(s);
        }
        set
    }
}

impl fmt::Debug for SkillSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Skill identifiers with their per-skill fee. Entries are kept sorted by id,
/// which fixes the skill index order used by every solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SkillCatalog {
    ids: Vec<String>,
    fees: Vec<f64>,
    lookup: HashMap<String, SkillIdx>,
}

impl SkillCatalog {
    pub fn new<I, S>(entries: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut sorted = BTreeMap::new();
        for (id, fee) in entries {
            let id = id.into();
            if !(fee.is_finite() && fee > 0.0) {
                return Err(ModelError::InvalidFee { id, fee });
            }
            if sorted.insert(id.clone(), fee).is_some() {
                return Err(ModelError::DuplicateSkill(id));
            }
        }
        if sorted.is_empty() {
            return Err(ModelError::EmptyCatalog);
        }
        if sorted.len() > MAX_SKILLS {
            return Err(ModelError::TooManySkills(sorted.len()));
        }
        let (ids, fees): (Vec<_>, Vec<_>) = sorted.into_iter().unzip();
        let lookup = ids.iter().cloned().enumerate().map(|(i, id)| (id, i)).collect();
        Ok(SkillCatalog { ids, fees, lookup })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, skill: SkillIdx) -> &str {
        &self.ids[skill]
    }

    pub fn fee(&self, skill: SkillIdx) -> f64 {
        self.fees[skill]
    }

    pub fn index_of(&self, id: &str) -> Option<SkillIdx> {
        self.lookup.get(id).copied()
    }

    /// `(id, fee)` pairs in index order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> {
        self.ids.iter().map(String::as_str).zip(self.fees.iter().copied())
    }

    /// Sum of fees over `set`, accumulated in index order.
    pub fn fee_sum(&self, set: SkillSet) -> f64 {
        set.iter().map(|s| self.fees[s]).sum()
    }

    pub fn resolve<S: AsRef<str>>(&self, ids: &[S]) -> Result<SkillSet, ModelError> {
        ids.iter()
            .map(|id| {
                self.index_of(id.as_ref())
                    .ok_or_else(|| ModelError::UnknownSkill(id.as_ref().to_string()))
            })
            .collect()
    }

    pub fn names(&self, set: SkillSet) -> Vec<String> {
        set.iter().map(|s| self.ids[s].clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Axis-aligned rectangle used by the generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn new(min: Point, max: Point) -> Self {
        BoundingBox { min, max }
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.min.is_finite() && self.max.is_finite() && self.max.x > self.min.x && self.max.y > self.min.y
    }
}

/// Euclidean distance, used directly as travel cost.
///
/// Computed as `sqrt(dx² + dy²)` rather than `hypot`: both operations are
/// correctly rounded in IEEE 754, so the result is identical on every platform.
pub fn travel_cost(a: Point, b: Point) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (dx * dx + dy * dy).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub id: String,
    pub location: Point,
    /// Seconds.
    pub arrival_time: f64,
    /// Radius inside which travel is not subsidised (meters).
    pub fixed_radius: f64,
    /// Subsidy allowance in meters; also extends the reach to `fixed_radius + extra_budget`.
    pub extra_budget: f64,
    pub required_skills: SkillSet,
}

impl Task {
    pub fn reach(&self) -> f64 {
        self.fixed_radius + self.extra_budget
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Worker {
    pub id: String,
    pub location: Point,
    pub arrival_time: f64,
    pub skills: SkillSet,
}

/// Travel beyond the task's fixed radius, clamped at zero inside it.
pub fn extra_cost(task: &Task, worker: &Worker) -> f64 {
    (travel_cost(task.location, worker.location) - task.fixed_radius).max(0.0)
}

/// A signed amount on the scaled integer money grid (`units × money_scale`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Money(pub i64);

impl Money {
    pub const ZERO: Money = Money(0);

    pub fn scaled(self) -> i64 {
        self.0
    }

    pub fn to_units(self, money_scale: u32) -> f64 {
        self.0 as f64 / f64::from(money_scale)
    }

    /// Exact decimal rendering in money units, e.g. `Money(29500)` at scale
    /// 1000 renders as `29.5`.
    pub fn format_units(self, money_scale: u32) -> String {
        let scale = i64::from(money_scale);
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let whole = abs / scale as u64;
        let frac = abs % scale as u64;
        if frac == 0 {
            return format!("{sign}{whole}");
        }
        let width = (scale - 1).to_string().len();
        let digits = format!("{frac:0width$}");
        format!("{sign}{whole}.{}", digits.trim_end_matches('0'))
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl SubAssign for Money {
    fn sub_assign(&mut self, rhs: Money) {
        self.0 -= rhs.0;
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, Add::add)
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Revenue parameters: `alpha` weights skill income, `beta` weights the
/// extra-travel subsidy, `money_scale` sets the integer money grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    alpha: f64,
    beta: f64,
    money_scale: u32,
}

impl Params {
    pub fn new(alpha: f64, beta: f64, money_scale: u32) -> Result<Self, ModelError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ModelError::InvalidAlpha(alpha));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(ModelError::InvalidBeta(beta));
        }
        if money_scale == 0 {
            return Err(ModelError::InvalidMoneyScale);
        }
        Ok(Params {
            alpha,
            beta,
            money_scale,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn money_scale(&self) -> u32 {
        self.money_scale
    }

    /// `alpha · fee_sum` on the money grid.
    pub fn skill_income(&self, fee_sum: f64) -> Money {
        Money((self.alpha * fee_sum * f64::from(self.money_scale)).round() as i64)
    }

    /// `beta · extra_cost` on the money grid.
    pub fn subsidy(&self, extra_cost: f64) -> Money {
        Money((self.beta * extra_cost * f64::from(self.money_scale)).round() as i64)
    }

    /// Platform revenue of one worker: `alpha · F − beta · e`. May be negative.
    pub fn worker_revenue(&self, fee_sum: f64, extra_cost: f64) -> Result<Money, ModelError> {
        if !(fee_sum.is_finite() && fee_sum > 0.0) {
            return Err(ModelError::NonPositiveFeeSum(fee_sum));
        }
        if !(extra_cost.is_finite() && extra_cost >= 0.0) {
            return Err(ModelError::InvalidExtraCost(extra_cost));
        }
        Ok(self.revenue_unchecked(fee_sum, extra_cost))
    }

    #[inline]
    pub(crate) fn revenue_unchecked(&self, fee_sum: f64, extra_cost: f64) -> Money {
        self.skill_income(fee_sum) - self.subsidy(extra_cost)
    }
}

pub type TaskIdx = usize;
pub type WorkerIdx = usize;

/// One worker of a pair together with the skills it is paid for.
#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub worker: WorkerIdx,
    pub credited: SkillSet,
    pub extra_cost: f64,
}

/// A task and the valid worker set assigned to it.
#[derive(Debug, Clone, PartialEq)]
pub struct PairAssignment {
    pub task: TaskIdx,
    pub members: Vec<Member>,
}

impl PairAssignment {
    pub fn new(task: TaskIdx) -> Self {
        PairAssignment {
            task,
            members: Vec::new(),
        }
    }

    pub fn workers(&self) -> impl Iterator<Item = WorkerIdx> + '_ {
        self.members.iter().map(|m| m.worker)
    }

    pub fn contains(&self, worker: WorkerIdx) -> bool {
        self.members.iter().any(|m| m.worker == worker)
    }

    pub fn member(&self, worker: WorkerIdx) -> Option<&Member> {
        self.members.iter().find(|m| m.worker == worker)
    }

    /// Extra cost accumulated over members, summed in member order.
    pub fn spent_budget(&self) -> f64 {
        self.members.iter().map(|m| m.extra_cost).sum()
    }

    pub fn credited_union(&self) -> SkillSet {
        self.members.iter().fold(SkillSet::EMPTY, |acc, m| acc.union(m.credited))
    }
}

/// A set of pairs keyed by task; at most one pair per task.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Matching {
    pairs: BTreeMap<TaskIdx, PairAssignment>,
}

impl Matching {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `pair`, returning the pair it replaced, if any.
    pub fn insert(&mut self, pair: PairAssignment) -> Option<PairAssignment> {
        self.pairs.insert(pair.task, pair)
    }

    pub fn remove(&mut self, task: TaskIdx) -> Option<PairAssignment> {
        self.pairs.remove(&task)
    }

    pub fn get(&self, task: TaskIdx) -> Option<&PairAssignment> {
        self.pairs.get(&task)
    }

    /// Pairs in ascending task index order.
    pub fn pairs(&self) -> impl Iterator<Item = &PairAssignment> {
        self.pairs.values()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn assigned_workers(&self) -> impl Iterator<Item = WorkerIdx> + '_ {
        self.pairs.values().flat_map(|p| p.workers())
    }

    /// Workers not in any pair (those on the null task), ascending.
    pub fn unassigned(&self, instance: &Instance) -> Vec<WorkerIdx> {
        let mut busy = vec![false; instance.workers().len()];
        for w in self.assigned_workers() {
            if let Some(slot) = busy.get_mut(w) {
                *slot = true;
            }
        }
        (0..busy.len()).filter(|&w| !busy[w]).collect()
    }
}

/// A complete problem: catalog, tasks, workers and revenue parameters.
///
/// Workers are stored in ascending id order; this is the fixed worker order
/// used for candidate lists and best-response rounds. Tasks keep their input
/// order.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    catalog: SkillCatalog,
    tasks: Vec<Task>,
    workers: Vec<Worker>,
    params: Params,
    bounding_box: Option<BoundingBox>,
    task_lookup: HashMap<String, TaskIdx>,
    worker_lookup: HashMap<String, WorkerIdx>,
}

impl Instance {
    pub fn new(
        catalog: SkillCatalog,
        tasks: Vec<Task>,
        mut workers: Vec<Worker>,
        params: Params,
        bounding_box: Option<BoundingBox>,
    ) -> Result<Self, ModelError> {
        let skill_mask = if catalog.len() == MAX_SKILLS {
            u128::MAX
        } else {
            (1u128 << catalog.len()) - 1
        };
        let invalid = |kind: &'static str, id: &str, reason: &str| ModelError::InvalidEntity {
            kind,
            id: id.to_string(),
            reason: reason.to_string(),
        };

        let mut task_lookup = HashMap::with_capacity(tasks.len());
        for (i, t) in tasks.iter().enumerate() {
            if !t.location.is_finite() || !t.arrival_time.is_finite() {
                return Err(invalid("task", &t.id, "non-finite location or arrival time"));
            }
            if !(t.fixed_radius.is_finite() && t.fixed_radius >= 0.0) {
                return Err(invalid("task", &t.id, "fixed radius must be finite and >= 0"));
            }
            if !(t.extra_budget.is_finite() && t.extra_budget >= 0.0) {
                return Err(invalid("task", &t.id, "extra budget must be finite and >= 0"));
            }
            if t.required_skills.is_empty() {
                return Err(invalid("task", &t.id, "required skills are empty"));
            }
            if t.required_skills.bits() & !skill_mask != 0 {
                return Err(invalid("task", &t.id, "required skill outside the catalog"));
            }
            if task_lookup.insert(t.id.clone(), i).is_some() {
                return Err(ModelError::DuplicateId {
                    kind: "task",
                    id: t.id.clone(),
                });
            }
        }

        workers.sort_by(|a, b| a.id.cmp(&b.id));
        let mut worker_lookup = HashMap::with_capacity(workers.len());
        for (i, w) in workers.iter().enumerate() {
            if !w.location.is_finite() || !w.arrival_time.is_finite() {
                return Err(invalid("worker", &w.id, "non-finite location or arrival time"));
            }
            if w.skills.is_empty() {
                return Err(invalid("worker", &w.id, "skills are empty"));
            }
            if w.skills.bits() & !skill_mask != 0 {
                return Err(invalid("worker", &w.id, "skill outside the catalog"));
            }
            if worker_lookup.insert(w.id.clone(), i).is_some() {
                return Err(ModelError::DuplicateId {
                    kind: "worker",
                    id: w.id.clone(),
                });
            }
        }

        Ok(Instance {
            catalog,
            tasks,
            workers,
            params,
            bounding_box,
            task_lookup,
            worker_lookup,
        })
    }

    pub fn catalog(&self) -> &SkillCatalog {
        &self.catalog
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn workers(&self) -> &[Worker] {
        &self.workers
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        self.bounding_box
    }

    pub fn task(&self, idx: TaskIdx) -> &Task {
        &self.tasks[idx]
    }

    pub fn worker(&self, idx: WorkerIdx) -> &Worker {
        &self.workers[idx]
    }

    pub fn task_index(&self, id: &str) -> Option<TaskIdx> {
        self.task_lookup.get(id).copied()
    }

    pub fn worker_index(&self, id: &str) -> Option<WorkerIdx> {
        self.worker_lookup.get(id).copied()
    }

    pub fn extra_cost(&self, task: TaskIdx, worker: WorkerIdx) -> f64 {
        extra_cost(&self.tasks[task], &self.workers[worker])
    }

    /// Builds a member crediting `credited` to `worker` for `task`.
    pub fn member(&self, task: TaskIdx, worker: WorkerIdx, credited: SkillSet) -> Member {
        Member {
            worker,
            credited,
            extra_cost: self.extra_cost(task, worker),
        }
    }

    /// Revenue of a single member, without validating its credited set.
    pub fn member_revenue(&self, member: &Member) -> Money {
        self.params
            .revenue_unchecked(self.catalog.fee_sum(member.credited), member.extra_cost)
    }

    /// Sum of member revenues, without validation.
    pub fn pair_revenue_unchecked(&self, pair: &PairAssignment) -> Money {
        pair.members.iter().map(|m| self.member_revenue(m)).sum()
    }

    pub fn matching_revenue_unchecked(&self, matching: &Matching) -> Money {
        matching.pairs().map(|p| self.pair_revenue_unchecked(p)).sum()
    }

    /// Sum over tasks of `alpha · fees(S_t)`: no feasible matching earns more.
    pub fn revenue_upper_bound(&self) -> Money {
        self.tasks
            .iter()
            .map(|t| self.params.skill_income(self.catalog.fee_sum(t.required_skills)))
            .sum()
    }
}

/// Structured rejection of a pair or matching that breaks an invariant.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid assignment: {report}")]
pub struct InvalidAssignment {
    pub report: ValidationReport,
}

/// Revenue of a validated pair.
pub fn pair_revenue(pair: &PairAssignment, instance: &Instance) -> Result<Money, InvalidAssignment> {
    let report = feasibility::validate_pair(pair, instance);
    if !report.is_ok() {
        return Err(InvalidAssignment { report });
    }
    Ok(instance.pair_revenue_unchecked(pair))
}

/// Total platform revenue of a validated matching.
pub fn matching_revenue(matching: &Matching, instance: &Instance) -> Result<Money, InvalidAssignment> {
    let report = feasibility::validate_matching(matching, instance);
    if !report.is_ok() {
        return Err(InvalidAssignment { report });
    }
    Ok(instance.matching_revenue_unchecked(matching))
}
