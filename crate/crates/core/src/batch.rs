//! Optional time-window batching: tasks and workers are grouped by arrival
//! window and each window is solved as an independent instance.

use std::collections::BTreeMap;

use crate::model::{Instance, Matching, Member, PairAssignment, TaskIdx, WorkerIdx};

/// One window's sub-instance plus the maps back to the parent's indices.
#[derive(Debug, Clone)]
pub struct Batch {
    /// Window number, `floor(arrival / window)`.
    pub window: i64,
    pub instance: Instance,
    pub tasks: Vec<TaskIdx>,
    pub workers: Vec<WorkerIdx>,
}

impl Batch {
    /// Rewrites a matching on the sub-instance in terms of the parent instance.
    pub fn lift(&self, matching: &Matching) -> Matching {
        let mut out = Matching::new();
        for p in matching.pairs() {
            out.insert(PairAssignment {
                task: self.tasks[p.task],
                members: p
                    .members
                    .iter()
                    .map(|m| Member {
                        worker: self.workers[m.worker],
                        ..m.clone()
                    })
                    .collect(),
            });
        }
        out
    }
}

/// Splits `instance` by arrival window of `window` seconds. Windows without
/// tasks are dropped since nothing can be matched there. Windows partition
/// the workers, so lifted matchings from different batches never conflict.
///
/// # Panics
/// If `window` is not a positive finite number.
pub fn split_by_window(instance: &Instance, window: f64) -> Vec<Batch> {
    assert!(window.is_finite() && window > 0.0, "window must be positive, got {window}");
    let key = |t: f64| (t / window).floor() as i64;
    let mut groups: BTreeMap<i64, (Vec<TaskIdx>, Vec<WorkerIdx>)> = BTreeMap::new();
    for (i, t) in instance.tasks().iter().enumerate() {
        groups.entry(key(t.arrival_time)).or_default().0.push(i);
    }
    for (i, w) in instance.workers().iter().enumerate() {
        if let Some(g) = groups.get_mut(&key(w.arrival_time)) {
            g.1.push(i);
        }
    }
    groups
        .into_iter()
        .map(|(window, (tasks, workers))| {
            let sub = Instance::new(
                instance.catalog().clone(),
                tasks.iter().map(|&t| instance.task(t).clone()).collect(),
                workers.iter().map(|&w| instance.worker(w).clone()).collect(),
                *instance.params(),
                instance.bounding_box(),
            )
            .expect("a subset of a valid instance is valid");
            Batch {
                window,
                instance: sub,
                tasks,
                workers,
            }
        })
        .collect()
}

/// Solves every window with `solve` and merges the lifted matchings.
pub fn solve_batched<F>(instance: &Instance, window: f64, mut solve: F) -> Matching
where
    F: FnMut(&Instance) -> Matching,
{
    let mut merged = Matching::new();
    for batch in split_by_window(instance, window) {
        for pair in batch.lift(&solve(&batch.instance)).pairs() {
            merged.insert(pair.clone());
        }
    }
    merged
}
