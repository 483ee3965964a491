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

//! Error type shared by every module of the crate.

/// Errors produced by election evaluation, control solving, constructions
/// and file handling.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unknown candidate `{0}`")]
    UnknownCandidate(String),
    #[error("invalid candidate name `{0}`")]
    InvalidCandidateName(String),
    #[error("duplicate candidate `{0}`")]
    DuplicateCandidate(String),
    #[error("invalid ballot: {0}")]
    InvalidBallot(String),
    #[error("levels are numbered from 1")]
    InvalidLevel,
    #[error("election has no candidates")]
    EmptyCandidateSet,
    #[error("malformed query: {0}")]
    MalformedQuery(String),
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("budget exceeded: action uses {used} but the budget is {budget}")]
    BudgetExceeded { used: u64, budget: u64 },
    #[error("instance too large: {what} requires {required} evaluations, limit is {limit}")]
    InstanceTooLarge {
        what: &'static str,
        required: u128,
        limit: u64,
    },
    #[error("construction precondition violated: {0}")]
    ConstructionDomain(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
