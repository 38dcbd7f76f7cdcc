//! Skilled task assignment with extra budget.
//!
//! Tasks need a set of skills and sit at a location with a fixed service
//! radius plus an extra travel budget. Workers hold skills and a location.
//! Solvers pick disjoint worker groups per task so that the platform's
//! revenue (fee income minus subsidised extra travel) is as large as possible.
//!
//! Solvers: [`solve_random`], [`solve_greedy`], [`solve_ebgt`] (best-response
//! dynamics in a potential game) and [`solve_exact`] for small instances.

pub mod batch;
pub mod feasibility;
pub mod fixtures;
pub mod game;
pub mod greedy;
pub mod io;
pub mod model;
pub mod oracle;
pub mod report;

pub use feasibility::{validate_matching, validate_pair, ReachTable, ValidationReport, ViolationCode};
pub use game::{solve_ebgt, Ebgt, GameConfig, GameState, Strategy};
pub use greedy::{solve_greedy, GreedyConfig, TieBreak};
pub use model::{
    matching_revenue, pair_revenue, Instance, Matching, Member, Money, PairAssignment, Params, SkillCatalog, SkillSet,
    Task, TaskIdx, Worker, WorkerIdx,
};
pub use oracle::{solve_exact, solve_random, OracleError, OracleLimits};
pub use report::{Algorithm, SolveReport};
