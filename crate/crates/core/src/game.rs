//! Best-response dynamics over the worker game.
//!
//! Every worker is a player whose strategy is a task or the null task (idle).
//! The potential is the total platform revenue of the current matching. A move
//! re-forms the target's worker set around the mover and repairs (or
//! dissolves) the pair the mover leaves; its utility is the resulting change
//! in potential, so applying only strictly positive moves increases the
//! integer-valued potential by at least one scaled unit each time and the
//! dynamics stop at a pure Nash equilibrium.

use std::time::Instant;

use thiserror::Error;

use crate::feasibility::{validate_matching, Availability, ReachTable, ValidationReport};
use crate::model::{Instance, Matching, Member, Money, PairAssignment, SkillSet, TaskIdx, WorkerIdx};
use crate::report::{Algorithm, SolveReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("worker index {0} out of range")]
    UnknownWorker(WorkerIdx),
    #[error("worker {worker} cannot take strategy {strategy:?}: no feasible worker set")]
    Infeasible { worker: WorkerIdx, strategy: Strategy },
    #[error("move of worker {worker} to {strategy:?} is not a strict improvement (utility {utility})")]
    NotImproving {
        worker: WorkerIdx,
        strategy: Strategy,
        utility: Money,
    },
    #[error("matching became infeasible after a move: {0}")]
    InfeasibleState(ValidationReport),
}

/// A worker's strategy: the null task or one concrete task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Idle,
    Join(TaskIdx),
}

impl From<Option<TaskIdx>> for Strategy {
    fn from(t: Option<TaskIdx>) -> Self {
        t.map_or(Strategy::Idle, Strategy::Join)
    }
}

/// Joint strategy, its matching and the running potential.
#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    matching: Matching,
    strategy: Vec<Option<TaskIdx>>,
    free: Availability,
    potential: Money,
    rounds: u64,
    moves: u64,
}

impl GameState {
    fn empty(workers: usize) -> Self {
        GameState {
            matching: Matching::new(),
            strategy: vec![None; workers],
            free: Availability::all(workers),
            potential: Money::ZERO,
            rounds: 0,
            moves: 0,
        }
    }

    /// Builds a state from an arbitrary matching; the caller vouches for its
    /// feasibility.
    pub fn from_matching(instance: &Instance, matching: Matching) -> Self {
        let mut state = GameState::empty(instance.workers().len());
        for pair in matching.pairs() {
            for w in pair.workers() {
                state.strategy[w] = Some(pair.task);
                state.free.take(w);
            }
        }
        state.potential = instance.matching_revenue_unchecked(&matching);
        state.matching = matching;
        state
    }

    pub fn matching(&self) -> &Matching {
        &self.matching
    }

    pub fn into_matching(self) -> Matching {
        self.matching
    }

    pub fn strategy(&self, worker: WorkerIdx) -> Strategy {
        self.strategy[worker].into()
    }

    /// Incrementally maintained potential.
    pub fn potential(&self) -> Money {
        self.potential
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn moves(&self) -> u64 {
        self.moves
    }

    pub fn idle_workers(&self) -> &Availability {
        &self.free
    }
}

/// Potential of a state: total platform revenue of its matching.
pub fn potential(state: &GameState) -> Money {
    state.potential()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameConfig {
    /// Maximum number of best-response sweeps; `None` uses [`default_round_cap`].
    pub round_cap: Option<u64>,
    /// Validate the whole matching after every applied move.
    pub check_each_move: bool,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            round_cap: None,
            check_each_move: false,
        }
    }
}

/// Ten times the scaled revenue upper bound of the instance. Every improving
/// move raises the scaled potential by at least one, so this is a generous
/// over-estimate of the sweeps needed.
pub fn default_round_cap(instance: &Instance) -> u64 {
    let bound = instance.revenue_upper_bound().scaled().max(1) as u64;
    bound.saturating_mul(10)
}

/// A fully evaluated unilateral deviation, ready to be committed.
#[derive(Debug, Clone, PartialEq)]
pub struct MovePlan {
    pub worker: WorkerIdx,
    pub from: Strategy,
    pub to: Strategy,
    /// Change in potential if committed.
    pub utility: Money,
    target: Option<PairAssignment>,
    /// The pair the mover leaves: repaired, or `None` if it dissolves.
    source: Option<(TaskIdx, Option<PairAssignment>)>,
}

impl MovePlan {
    pub fn target_pair(&self) -> Option<&PairAssignment> {
        self.target.as_ref()
    }

    pub fn source_pair(&self) -> Option<(TaskIdx, Option<&PairAssignment>)> {
        self.source.as_ref().map(|(t, p)| (*t, p.as_ref()))
    }
}

/// Availability with an undo log, so a hypothetical move can be evaluated on
/// the live pool and rolled back.
struct Scratch<'p> {
    pool: &'p mut Availability,
    log: Vec<(WorkerIdx, bool)>,
}

impl<'p> Scratch<'p> {
    fn new(pool: &'p mut Availability) -> Self {
        Scratch { pool, log: Vec::new() }
    }

    fn take(&mut self, w: WorkerIdx) {
        self.log.push((w, self.pool.is_free(w)));
        self.pool.take(w);
    }

    fn release(&mut self, w: WorkerIdx) {
        self.log.push((w, self.pool.is_free(w)));
        self.pool.release(w);
    }

    fn rollback(&mut self) {
        while let Some((w, was_free)) = self.log.pop() {
            if was_free {
                self.pool.release(w);
            } else {
                self.pool.take(w);
            }
        }
    }

    fn commit(&mut self) {
        self.log.clear();
    }
}

/// Game solver bound to one instance.
pub struct Ebgt<'a> {
    instance: &'a Instance,
    reach: ReachTable,
}

impl<'a> Ebgt<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        Ebgt {
            instance,
            reach: ReachTable::build(instance),
        }
    }

    pub fn instance(&self) -> &Instance {
        self.instance
    }

    /// Completes `members` so that `remaining` is covered, one skill at a
    /// time in catalog order: for each uncovered skill take the reachable free
    /// worker holding it whose revenue on the still-uncovered skills is
    /// largest (ties to the lowest worker id), and credit it with all of them.
    /// Returns `false` as soon as some skill has no candidate.
    fn fill(&self, task: TaskIdx, members: &mut Vec<Member>, mut remaining: SkillSet, pool: &mut Scratch<'_>) -> bool {
        let inst = self.instance;
        let t = inst.task(task);
        let params = inst.params();
        for skill in t.required_skills.iter() {
            if !remaining.contains(skill) {
                continue;
            }
            let spent: f64 = members.iter().map(|m| m.extra_cost).sum();
            let mut best: Option<(Money, Member)> = None;
            for r in self
                .reach
                .candidates(inst, task, SkillSet::single(skill), t.extra_budget - spent, pool.pool)
            {
                let credit = inst.worker(r.worker).skills.intersection(remaining);
                let revenue = params.revenue_unchecked(inst.catalog().fee_sum(credit), r.extra_cost);
                if best.as_ref().is_none_or(|(b, _)| revenue > *b) {
                    best = Some((
                        revenue,
                        Member {
                            worker: r.worker,
                            credited: credit,
                            extra_cost: r.extra_cost,
                        },
                    ));
                }
            }
            let Some((_, member)) = best else {
                return false;
            };
            remaining = remaining.difference(member.credited);
            pool.take(member.worker);
            members.push(member);
        }
        debug_assert!(remaining.is_empty());
        true
    }

    /// Initial joint strategy: tasks in input order, each covered skill by
    /// skill with the highest-revenue reachable worker. A task that cannot be
    /// covered, or whose pair would lose money, gives its workers back.
    pub fn init_matching(&self) -> GameState {
        let inst = self.instance;
        let mut state = GameState::empty(inst.workers().len());
        for task in 0..inst.tasks().len() {
            let mut members = Vec::new();
            let mut scratch = Scratch::new(&mut state.free);
            let covered = self.fill(task, &mut members, inst.task(task).required_skills, &mut scratch);
            let pair = PairAssignment { task, members };
            let revenue = inst.pair_revenue_unchecked(&pair);
            if !covered || revenue < Money::ZERO {
                scratch.rollback();
                continue;
            }
            scratch.commit();
            for w in pair.workers() {
                state.strategy[w] = Some(task);
            }
            state.potential += revenue;
            state.matching.insert(pair);
        }
        state
    }

    /// Revenue the worker contributes to `task` as currently credited; zero
    /// if it is not a member.
    pub fn marginal_contribution(&self, state: &GameState, task: TaskIdx, worker: WorkerIdx) -> Money {
        state
            .matching
            .get(task)
            .and_then(|p| p.member(worker))
            .map_or(Money::ZERO, |m| self.instance.member_revenue(m))
    }

    /// Evaluates `worker` switching to `to`, or `None` if that strategy is
    /// unavailable (same as current, out of reach, or no feasible worker set).
    pub fn plan_move(&self, state: &GameState, worker: WorkerIdx, to: Strategy) -> Option<MovePlan> {
        let mut pool = state.free.clone();
        self.plan_move_in(state, worker, to, &mut pool)
    }

    fn plan_move_in(&self, state: &GameState, worker: WorkerIdx, to: Strategy, pool: &mut Availability) -> Option<MovePlan> {
        let inst = self.instance;
        let from = state.strategy(worker);
        if from == to {
            return None;
        }
        let mut scratch = Scratch::new(pool);
        let mut utility = Money::ZERO;

        let mut target = None;
        if let Strategy::Join(t) = to {
            let Some(r) = self.reach.reaches(t, worker) else {
                return None;
            };
            if let Some(old) = state.matching.get(t) {
                for w in old.workers() {
                    scratch.release(w);
                }
                utility -= inst.pair_revenue_unchecked(old);
            }
            let task = inst.task(t);
            let credit = inst.worker(worker).skills.intersection(task.required_skills);
            let mut members = vec![Member {
                worker,
                credited: credit,
                extra_cost: r.extra_cost,
            }];
            if !self.fill(t, &mut members, task.required_skills.difference(credit), &mut scratch) {
                scratch.rollback();
                return None;
            }
            let pair = PairAssignment { task: t, members };
            utility += inst.pair_revenue_unchecked(&pair);
            target = Some(pair);
        }

        let mut source = None;
        if let Strategy::Join(c) = from {
            let old = state.matching.get(c).expect("strategy points at a matched task");
            utility -= inst.pair_revenue_unchecked(old);
            let vacated = old.member(worker).expect("worker is a member of its task").credited;
            let mut members: Vec<Member> = old.members.iter().filter(|m| m.worker != worker).cloned().collect();
            let repaired = if self.fill(c, &mut members, vacated, &mut scratch) {
                let pair = PairAssignment { task: c, members };
                utility += inst.pair_revenue_unchecked(&pair);
                Some(pair)
            } else {
                None
            };
            source = Some((c, repaired));
        }

        scratch.rollback();
        Some(MovePlan {
            worker,
            from,
            to,
            utility,
            target,
            source,
        })
    }

    /// The strictly improving deviation with the largest utility, if any.
    /// Candidate tasks are scanned in index order and idling comes last, so
    /// ties resolve to the lowest task index.
    pub fn best_response(&self, state: &GameState, worker: WorkerIdx) -> Option<MovePlan> {
        let mut pool = state.free.clone();
        let mut best: Option<MovePlan> = None;
        let options = self
            .reach
            .tasks_of(worker)
            .iter()
            .map(|&t| Strategy::Join(t))
            .chain(std::iter::once(Strategy::Idle));
        for to in options {
            if let Some(plan) = self.plan_move_in(state, worker, to, &mut pool) {
                if plan.utility > Money::ZERO && best.as_ref().is_none_or(|b| plan.utility > b.utility) {
                    best = Some(plan);
                }
            }
        }
        best
    }

    /// Commits any evaluated plan, improving or not. Returns the potential
    /// change.
    pub fn commit(&self, state: &mut GameState, plan: MovePlan) -> Money {
        let mut released: Vec<PairAssignment> = Vec::new();
        if let Some((c, _)) = &plan.source {
            released.extend(state.matching.remove(*c));
        }
        if let Some(t) = plan.target.as_ref().map(|p| p.task) {
            released.extend(state.matching.remove(t));
        }
        for w in released.iter().flat_map(|p| p.workers()) {
            state.strategy[w] = None;
            state.free.release(w);
        }
        let new_pairs = plan.target.into_iter().chain(plan.source.and_then(|(_, p)| p));
        for pair in new_pairs {
            for w in pair.workers() {
                state.strategy[w] = Some(pair.task);
                state.free.take(w);
            }
            state.matching.insert(pair);
        }
        state.potential += plan.utility;
        state.moves += 1;
        plan.utility
    }

    /// Moves `worker` to `to` if that is a strictly improving deviation.
    pub fn apply_move(&self, state: &mut GameState, worker: WorkerIdx, to: Strategy) -> Result<Money, GameError> {
        if worker >= state.strategy.len() {
            return Err(GameError::UnknownWorker(worker));
        }
        let plan = self
            .plan_move(state, worker, to)
            .ok_or(GameError::Infeasible { worker, strategy: to })?;
        if plan.utility <= Money::ZERO {
            return Err(GameError::NotImproving {
                worker,
                strategy: to,
                utility: plan.utility,
            });
        }
        Ok(self.commit(state, plan))
    }

    /// True iff no worker has a strictly improving deviation.
    pub fn is_nash(&self, state: &GameState) -> bool {
        (0..self.instance.workers().len()).all(|w| self.best_response(state, w).is_none())
    }

    /// Initialisation followed by sweeps over workers in ascending id order
    /// until a sweep makes no move or the round cap is reached.
    pub fn run(&self, cfg: &GameConfig) -> Result<(GameState, SolveReport), GameError> {
        let start = Instant::now();
        let inst = self.instance;
        let cap = cfg.round_cap.unwrap_or_else(|| default_round_cap(inst));
        let mut state = self.init_matching();
        let mut certified = inst.tasks().is_empty() || inst.workers().is_empty();
        let mut cap_hit = false;
        while !certified {
            if state.rounds >= cap {
                cap_hit = true;
                break;
            }
            state.rounds += 1;
            let mut changed = false;
            for w in 0..inst.workers().len() {
                if let Some(plan) = self.best_response(&state, w) {
                    self.commit(&mut state, plan);
                    changed = true;
                    if cfg.check_each_move {
                        let report = validate_matching(&state.matching, inst);
                        if !report.is_ok() {
                            return Err(GameError::InfeasibleState(report));
                        }
                    }
                }
            }
            certified = !changed;
        }
        let mut report = SolveReport::finish(Algorithm::Ebgt, &state.matching, inst, start.elapsed());
        report.rounds = state.rounds;
        report.moves = state.moves;
        report.nash_certified = Some(certified);
        report.round_cap_hit = cap_hit;
        Ok((state, report))
    }
}

/// Runs the game solver.
///
/// # Panics
///
/// Only when `cfg.check_each_move` is set and a move leaves the matching
/// infeasible, which would be a solver bug.
pub fn solve_ebgt(instance: &Instance, cfg: &GameConfig) -> (Matching, SolveReport) {
    let (state, report) = Ebgt::new(instance)
        .run(cfg)
        .unwrap_or_else(|e| panic!("game solver invariant violated: {e}"));
    (state.into_matching(), report)
}
