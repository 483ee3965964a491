// Copyright 2026 The fvcontrol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Fallback voting (FV) toolkit.
//!
//! The crate covers four layers:
//!
//! * [`election`]: ballots, level scores and FV winner determination;
//! * [`control`]: the 22 electoral control problems and the evaluation of a
//!   chair's action, including two-stage partition elections;
//! * [`exact`] and [`poly`]: an exhaustive solver for every control problem
//!   and the polynomial-time certifying algorithms for destructive control by
//!   adding and by deleting voters;
//! * [`reductions`]: Hitting Set and X3C sources, the hardness constructions
//!   and a harness checking each construction against brute force.
//!
//! [`format`], [`report`] and [`cli`] provide the ballot file format, the
//! JSON run reports and the `fvcontrol` command-line tool.

pub mod cli;
pub mod control;
pub mod election;
pub mod error;
pub mod exact;
pub mod format;
pub mod poly;
pub mod reductions;
pub mod report;
mod tally;
#[cfg(test)]
mod test_util;

pub use control::{
    apply_witness, evaluate_partition_candidates, evaluate_partition_voters, goal_met, Action,
    ControlInstance, ControlType, ControlWitness, Mode, TieRule, VoterSelection,
};
pub use election::{majority_threshold, Ballot, CandidateId, Election, Resolution, WinnerResult};
pub use error::{Error, Result};
pub use exact::{solve_exact, SearchLimits, SolveReport};
