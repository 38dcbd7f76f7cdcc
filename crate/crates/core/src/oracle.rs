//! Baselines: a seeded random assignment and an exact solver.
//!
//! The exact solver enumerates every valid worker set of every task, builds
//! the conflict graph (sets of the same task, or sets sharing a worker, are
//! adjacent) and finds a maximum-weight independent set by branch and bound.

use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::feasibility::{Availability, Reach, ReachTable};
use crate::model::{Instance, Matching, Member, Money, PairAssignment, SkillSet, TaskIdx, WorkerIdx, DISTANCE_TOLERANCE};
use crate::report::{Algorithm, SolveReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{count} tasks exceed the oracle limit of {limit}")]
    TooManyTasks { count: usize, limit: usize },
    #[error("{count} workers exceed the oracle limit of {limit}")]
    TooManyWorkers { count: usize, limit: usize },
    #[error("task `{task}` has more than {limit} valid worker sets")]
    TooManyValidSets { task: String, limit: usize },
    #[error("exact search exceeded its time budget of {0:?}")]
    TimeBudgetExceeded(Duration),
    #[error("oracle limits must all be positive")]
    InvalidLimits,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleLimits {
    pub max_tasks: usize,
    pub max_workers: usize,
    pub max_valid_sets_per_task: usize,
    pub time_budget: Duration,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_tasks: 8,
            max_workers: 16,
            max_valid_sets_per_task: 20_000,
            time_budget: Duration::from_secs(10),
        }
    }
}

impl OracleLimits {
    pub fn validate(&self) -> Result<(), OracleError> {
        if self.max_tasks == 0 || self.max_workers == 0 || self.max_valid_sets_per_task == 0 || self.time_budget.is_zero() {
            return Err(OracleError::InvalidLimits);
        }
        Ok(())
    }
}

/// Random baseline: tasks in a seeded random order, each remaining skill
/// covered by a uniformly chosen free reachable worker holding it (credited
/// with every still-uncovered skill it has). A task fails, releasing its
/// workers, as soon as one skill has no candidate.
pub fn solve_random(instance: &Instance, seed: u64) -> (Matching, SolveReport) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reach = ReachTable::build(instance);
    let mut available = Availability::all(instance.workers().len());
    let mut order: Vec<TaskIdx> = (0..instance.tasks().len()).collect();
    order.shuffle(&mut rng);

    let mut matching = Matching::new();
    let mut pool: Vec<Reach> = Vec::new();
    let mut candidates: Vec<(WorkerIdx, f64)> = Vec::new();
    'tasks: for task in order {
        let t = instance.task(task);
        let mut pair = PairAssignment::new(task);
        let mut remaining = t.required_skills;
        let mut spent = 0.0;
        // one pass over the reach list; per-skill filtering below only narrows it
        pool.clear();
        pool.extend(reach.candidates(instance, task, t.required_skills, t.extra_budget, &available));
        for skill in t.required_skills.iter() {
            if !remaining.contains(skill) {
                continue;
            }
            let radius = t.fixed_radius + (t.extra_budget - spent).max(0.0);
            candidates.clear();
            candidates.extend(
                pool.iter()
                    .filter(|r| {
                        r.cost <= radius && available.is_free(r.worker) && instance.worker(r.worker).skills.contains(skill)
                    })
                    .map(|r| (r.worker, r.extra_cost)),
            );
            if candidates.is_empty() {
                for w in pair.workers() {
                    available.release(w);
                }
                continue 'tasks;
            }
            let (worker, extra_cost) = candidates[rng.gen_range(0..candidates.len())];
            let credited = instance.worker(worker).skills.intersection(remaining);
            remaining = remaining.difference(credited);
            spent += extra_cost;
            available.take(worker);
            pair.members.push(Member {
                worker,
                credited,
                extra_cost,
            });
        }
        matching.insert(pair);
    }
    let report = SolveReport::finish(Algorithm::Random, &matching, instance, start.elapsed());
    (matching, report)
}

/// Best crediting of `skills` among `members` (each member receives at least
/// one skill it holds), by total revenue. Members' extra costs are fixed, so
/// only the per-member rounding of skill income can differ; ties keep the
/// first crediting found.
fn best_crediting(instance: &Instance, members: &[Member], skills: &[usize]) -> Option<(Money, Vec<SkillSet>)> {
    fn go(
        instance: &Instance,
        members: &[Member],
        skills: &[usize],
        at: usize,
        credit: &mut Vec<SkillSet>,
        best: &mut Option<(Money, Vec<SkillSet>)>,
    ) {
        if at == skills.len() {
            if credit.iter().any(|c| c.is_empty()) {
                return;
            }
            let revenue: Money = members
                .iter()
                .zip(credit.iter())
                .map(|(m, c)| {
                    instance
                        .params()
                        .revenue_unchecked(instance.catalog().fee_sum(*c), m.extra_cost)
                })
                .sum();
            if best.as_ref().is_none_or(|(b, _)| revenue > *b) {
                *best = Some((revenue, credit.clone()));
            }
            return;
        }
        // a member still lacking a skill needs one of the skills left
        let empties = credit.iter().filter(|c| c.is_empty()).count();
        if empties > skills.len() - at {
            return;
        }
        let skill = skills[at];
        for i in 0..members.len() {
            if instance.worker(members[i].worker).skills.contains(skill) {
                credit[i].insert(skill);
                go(instance, members, skills, at + 1, credit, best);
                credit[i].remove(skill);
            }
        }
    }
    let mut best = None;
    let mut credit = vec![SkillSet::EMPTY; members.len()];
    go(instance, members, skills, 0, &mut credit, &mut best);
    best
}

/// Every valid worker set of `task`: member sets within reach and budget that
/// cover the required skills under some crediting in which each member is
/// paid for at least one skill. Each set carries its best crediting. Sets are
/// listed by size, then lexicographically by worker id.
pub fn enumerate_valid_sets(instance: &Instance, task: TaskIdx, limits: &OracleLimits) -> Result<Vec<PairAssignment>, OracleError> {
    let t = instance.task(task);
    let required: Vec<usize> = t.required_skills.iter().collect();
    let reachable: Vec<Member> = (0..instance.workers().len())
        .filter(|&w| !instance.worker(w).skills.is_disjoint(t.required_skills))
        .filter(|&w| {
            crate::model::travel_cost(t.location, instance.worker(w).location) <= t.reach() + DISTANCE_TOLERANCE
        })
        .map(|w| instance.member(task, w, SkillSet::EMPTY))
        .collect();

    let mut out = Vec::new();
    for size in 1..=required.len().min(reachable.len()) {
        for combo in reachable.iter().combinations(size) {
            let cover = combo
                .iter()
                .fold(SkillSet::EMPTY, |acc, m| acc.union(instance.worker(m.worker).skills));
            if !t.required_skills.is_subset(cover) {
                continue;
            }
            let spent: f64 = combo.iter().map(|m| m.extra_cost).sum();
            if spent > t.extra_budget + DISTANCE_TOLERANCE {
                continue;
            }
            let members: Vec<Member> = combo.into_iter().cloned().collect();
            let Some((_, credit)) = best_crediting(instance, &members, &required) else {
                continue;
            };
            if out.len() == limits.max_valid_sets_per_task {
                return Err(OracleError::TooManyValidSets {
                    task: t.id.clone(),
                    limit: limits.max_valid_sets_per_task,
                });
            }
            out.push(PairAssignment {
                task,
                members: members
                    .into_iter()
                    .zip(credit)
                    .map(|(m, c)| Member { credited: c, ..m })
                    .collect(),
            });
        }
    }
    Ok(out)
}

/// Fixed-width bitset over conflict-graph vertices.
#[derive(Clone, PartialEq, Eq)]
struct VertexSet(Vec<u64>);

impl VertexSet {
    fn new(n: usize) -> Self {
        VertexSet(vec![0; n.div_ceil(64)])
    }

    fn insert(&mut self, v: usize) {
        self.0[v / 64] |= 1 << (v % 64);
    }

    fn contains(&self, v: usize) -> bool {
        self.0[v / 64] & (1 << (v % 64)) != 0
    }

    fn minus(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }
}

/// Vertex-weighted conflict graph with a clique cover given by the tasks.
struct ConflictGraph {
    weights: Vec<Money>,
    /// Closed neighbourhoods.
    neighbours: Vec<VertexSet>,
    /// Vertices of each task, heaviest first.
    cliques: Vec<Vec<usize>>,
}

impl ConflictGraph {
    fn build(sets: &[PairAssignment], weights: Vec<Money>, tasks: usize) -> Self {
        let n = sets.len();
        let workers: Vec<Vec<WorkerIdx>> = sets.iter().map(|p| p.workers().collect()).collect();
        let mut neighbours = vec![VertexSet::new(n); n];
        for a in 0..n {
            neighbours[a].insert(a);
            for b in a + 1..n {
                let conflict = sets[a].task == sets[b].task || workers[a].iter().any(|w| workers[b].contains(w));
                if conflict {
                    neighbours[a].insert(b);
                    neighbours[b].insert(a);
                }
            }
        }
        let mut cliques = vec![Vec::new(); tasks];
        for (v, s) in sets.iter().enumerate() {
            cliques[s.task].push(v);
        }
        for c in &mut cliques {
            c.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
        }
        cliques.retain(|c| !c.is_empty());
        ConflictGraph {
            weights,
            neighbours,
            cliques,
        }
    }

    fn degree(&self, v: usize) -> u32 {
        self.neighbours[v].0.iter().map(|w| w.count_ones()).sum::<u32>() - 1
    }

    /// Incumbent from picking vertices by weight / (degree + 1).
    fn greedy(&self) -> (Money, Vec<usize>) {
        let n = self.weights.len();
        let mut order: Vec<usize> = (0..n).collect();
        let ratio = |v: usize| self.weights[v].scaled() as f64 / f64::from(self.degree(v) + 1);
        order.sort_by(|&a, &b| ratio(b).total_cmp(&ratio(a)).then(a.cmp(&b)));
        let mut blocked = VertexSet::new(n);
        let mut chosen = Vec::new();
        let mut total = Money::ZERO;
        for v in order {
            if !blocked.contains(v) {
                chosen.push(v);
                total += self.weights[v];
                for (word, nb) in blocked.0.iter_mut().zip(&self.neighbours[v].0) {
                    *word |= nb;
                }
            }
        }
        (total, chosen)
    }
}

struct Search<'g> {
    graph: &'g ConflictGraph,
    best: Money,
    best_set: Vec<usize>,
    current: Vec<usize>,
    deadline: Instant,
    budget: Duration,
    nodes: u64,
}

impl Search<'_> {
    /// Branches on clique `at`: take one of its live vertices, or none.
    fn branch(&mut self, at: usize, live: &VertexSet, weight: Money) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes % 4096 == 0 && Instant::now() > self.deadline {
            return Err(OracleError::TimeBudgetExceeded(self.budget));
        }
        let g = self.graph;
        // each clique contributes at most its heaviest live vertex
        let bound: Money = g.cliques[at..]
            .iter()
            .filter_map(|c| c.iter().find(|&&v| live.contains(v)).map(|&v| g.weights[v]))
            .sum();
        if weight + bound <= self.best {
            return Ok(());
        }
        if at == g.cliques.len() {
            self.best = weight;
            self.best_set = self.current.clone();
            return Ok(());
        }
        for &v in &g.cliques[at] {
            if !live.contains(v) {
                continue;
            }
            self.current.push(v);
            let next = live.minus(&g.neighbours[v]);
            self.branch(at + 1, &next, weight + g.weights[v])?;
            self.current.pop();
        }
        self.branch(at + 1, live, weight)
    }
}

/// Revenue-maximal feasible matching, or an overflow error when the instance
/// is beyond `limits`.
pub fn solve_exact(instance: &Instance, limits: &OracleLimits) -> Result<(Matching, SolveReport), OracleError> {
    let start = Instant::now();
    limits.validate()?;
    if instance.tasks().len() > limits.max_tasks {
        return Err(OracleError::TooManyTasks {
            count: instance.tasks().len(),
            limit: limits.max_tasks,
        });
    }
    if instance.workers().len() > limits.max_workers {
        return Err(OracleError::TooManyWorkers {
            count: instance.workers().len(),
            limit: limits.max_workers,
        });
    }

    let mut sets = Vec::new();
    for task in 0..instance.tasks().len() {
        sets.extend(enumerate_valid_sets(instance, task, limits)?);
    }
    // sets that lose money never belong to an optimum
    let weighted: Vec<(PairAssignment, Money)> = sets
        .into_iter()
        .map(|p| {
            let w = instance.pair_revenue_unchecked(&p);
            (p, w)
        })
        .filter(|(_, w)| *w > Money::ZERO)
        .collect();
    let (sets, weights): (Vec<_>, Vec<_>) = weighted.into_iter().unzip();

    let graph = ConflictGraph::build(&sets, weights, instance.tasks().len());
    let (greedy_value, greedy_set) = graph.greedy();
    let mut search = Search {
        graph: &graph,
        best: greedy_value,
        best_set: greedy_set,
        current: Vec::new(),
        deadline: start + limits.time_budget,
        budget: limits.time_budget,
        nodes: 0,
    };
    let all = {
        let mut s = VertexSet::new(sets.len());
        (0..sets.len()).for_each(|v| s.insert(v));
        s
    };
    search.branch(0, &all, Money::ZERO)?;

    let mut matching = Matching::new();
    for v in search.best_set {
        matching.insert(sets[v].clone());
    }
    let report = SolveReport::finish(Algorithm::Exact, &matching, instance, start.elapsed());
    Ok((matching, report))
}
