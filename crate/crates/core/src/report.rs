use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::feasibility::validate_matching;
use crate::model::{Instance, Matching, Money};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Random,
    Greedy,
    Ebgt,
    Exact,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Random, Algorithm::Greedy, Algorithm::Ebgt, Algorithm::Exact];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Random => "random",
            Algorithm::Greedy => "greedy",
            Algorithm::Ebgt => "ebgt",
            Algorithm::Exact => "exact",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "random" | "ran" => Ok(Algorithm::Random),
            "greedy" | "gry" => Ok(Algorithm::Greedy),
            "ebgt" | "game" => Ok(Algorithm::Ebgt),
            "exact" | "oracle" => Ok(Algorithm::Exact),
            other => Err(format!("unknown algorithm `{other}` (expected random, greedy, ebgt or exact)")),
        }
    }
}

/// Outcome summary of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub revenue: Money,
    pub matched_tasks: usize,
    /// Best-response sweeps (game solver only).
    pub rounds: u64,
    /// Improving moves applied (game solver only).
    pub moves: u64,
    /// `Some(true)` once a sweep without moves completed; `None` for solvers
    /// that do not play the game.
    pub nash_certified: Option<bool>,
    pub round_cap_hit: bool,
    pub feasible: bool,
    pub wall: Duration,
}

impl SolveReport {
    pub(crate) fn finish(algorithm: Algorithm, matching: &Matching, instance: &Instance, wall: Duration) -> Self {
        SolveReport {
            algorithm,
            revenue: instance.matching_revenue_unchecked(matching),
            matched_tasks: matching.len(),
            rounds: 0,
            moves: 0,
            nash_certified: None,
            round_cap_hit: false,
            feasible: validate_matching(matching, instance).is_ok(),
            wall,
        }
    }
}
