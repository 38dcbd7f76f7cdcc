//! Greedy assignment: tasks in descending average skill fee, each covered by
//! repeatedly taking the reachable worker that covers the most remaining skills.

use std::cmp::Ordering;
use std::str::FromStr;
use std::time::Instant;

use crate::feasibility::{Availability, ReachTable};
use crate::model::{Instance, Matching, Member, PairAssignment, SkillCatalog, SkillSet, Task, TaskIdx};
use crate::report::{Algorithm, SolveReport};

/// How ties on "most remaining skills covered" are broken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Smaller extra cost first, then smaller worker id.
    #[default]
    LeastExtraCost,
    /// Smaller worker id only.
    LowestId,
}

impl FromStr for TieBreak {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "least-extra-cost" => Ok(TieBreak::LeastExtraCost),
            "lowest-id" => Ok(TieBreak::LowestId),
            other => Err(format!("unknown tie-break rule `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GreedyConfig {
    pub tie_break: TieBreak,
}

/// Task indices by descending average fee of required skills; equal averages
/// fall back to ascending task id.
pub fn rank_tasks(tasks: &[Task], catalog: &SkillCatalog) -> Vec<TaskIdx> {
    let keys: Vec<(f64, f64)> = tasks
        .iter()
        .map(|t| (catalog.fee_sum(t.required_skills), t.required_skills.len() as f64))
        .collect();
    let mut order: Vec<TaskIdx> = (0..tasks.len()).collect();
    order.sort_by(|&a, &b| {
        // compare sum_a/len_a with sum_b/len_b without dividing
        let (sa, la) = keys[a];
        let (sb, lb) = keys[b];
        (sb * la)
            .partial_cmp(&(sa * lb))
            .unwrap_or(Ordering::Equal)
            .then_with(|| tasks[a].id.cmp(&tasks[b].id))
    });
    order
}

/// Tries to cover `task`; on failure every worker taken along the way is put
/// back into `available` and `None` is returned.
pub fn assign_task_greedy(
    instance: &Instance,
    reach: &ReachTable,
    task: TaskIdx,
    available: &mut Availability,
    cfg: &GreedyConfig,
) -> Option<PairAssignment> {
    let t = instance.task(task);
    let mut pair = PairAssignment::new(task);
    let mut remaining = t.required_skills;
    let mut spent = 0.0;

    while !remaining.is_empty() {
        let best = reach
            .candidates(instance, task, remaining, t.extra_budget - spent, available)
            .map(|r| (r, instance.worker(r.worker).skills.intersection(remaining)))
            .min_by(|(ra, ca), (rb, cb)| {
                let by_cover = cb.len().cmp(&ca.len());
                let by_cost = match cfg.tie_break {
                    TieBreak::LeastExtraCost => ra.extra_cost.partial_cmp(&rb.extra_cost).unwrap_or(Ordering::Equal),
                    TieBreak::LowestId => Ordering::Equal,
                };
                by_cover.then(by_cost).then(ra.worker.cmp(&rb.worker))
            });
        let Some((r, covered)) = best else {
            for w in pair.workers() {
                available.release(w);
            }
            return None;
        };
        pair.members.push(Member {
            worker: r.worker,
            credited: covered,
            extra_cost: r.extra_cost,
        });
        spent += r.extra_cost;
        remaining = remaining.difference(covered);
        available.take(r.worker);
    }
    debug_assert_eq!(remaining, SkillSet::EMPTY);
    Some(pair)
}

pub fn solve_greedy(instance: &Instance, cfg: &GreedyConfig) -> (Matching, SolveReport) {
    let start = Instant::now();
    let reach = ReachTable::build(instance);
    let mut available = Availability::all(instance.workers().len());
    let mut matching = Matching::new();
    for task in rank_tasks(instance.tasks(), instance.catalog()) {
        if let Some(pair) = assign_task_greedy(instance, &reach, task, &mut available, cfg) {
            matching.insert(pair);
        }
    }
    let report = SolveReport::finish(Algorithm::Greedy, &matching, instance, start.elapsed());
    (matching, report)
}
