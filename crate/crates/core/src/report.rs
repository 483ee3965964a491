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

//! Machine-readable result documents printed by the command-line tool.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::control::{ControlWitness, VoterSelection};
use crate::election::{Election, Resolution, WinnerResult};

/// Result of one command. Identical inputs give byte-identical reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 over the command line and the bytes of every input file.
    pub inputs_digest: String,
    /// Answer of a decision command; absent for `winner` and `reduce`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winners: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<ResolutionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explored: Option<u64>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl RunReport {
    pub fn new(command: &str, inputs_digest: String) -> Self {
        RunReport {
            command: command.to_string(),
            inputs_digest,
            decision: None,
            winners: None,
            resolution: None,
            witness: None,
            explored: None,
            details: serde_json::Value::Null,
        }
    }

    pub fn with_winners(mut self, e: &Election, result: &WinnerResult) -> Self {
        self.winners = Some(e.names_of(&result.winners));
        self.resolution = Some(ResolutionReport::from(result.resolution));
        self
    }

    /// Pretty JSON followed by a newline.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ResolutionReport {
    MajorityLevel { level: usize },
    ApprovalFallback,
}

impl From<Resolution> for ResolutionReport {
    fn from(r: Resolution) -> Self {
        match r {
            Resolution::MajorityLevel(level) => ResolutionReport::MajorityLevel { level },
            Resolution::ApprovalFallback => ResolutionReport::ApprovalFallback,
        }
    }
}

/// Voters taken from one ballot line (0-based, in file order).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoterCount {
    pub ballot: usize,
    pub count: u32,
}

/// A control witness with candidates given by name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum WitnessReport {
    AddedCandidates { candidates: Vec<String> },
    DeletedCandidates { candidates: Vec<String> },
    /// Ballots of the pool file.
    AddedVoters { voters: Vec<VoterCount> },
    DeletedVoters { voters: Vec<VoterCount> },
    CandidatePartition { first: Vec<String>, second: Vec<String> },
    VoterPartition {
        first: Vec<VoterCount>,
        second: Vec<VoterCount>,
    },
}

impl WitnessReport {
    pub fn new(e: &Election, witness: &ControlWitness) -> Self {
        match witness {
            ControlWitness::AddedCandidates(c) => WitnessReport::AddedCandidates {
                candidates: e.names_of(c),
            },
            ControlWitness::DeletedCandidates(c) => WitnessReport::DeletedCandidates {
                candidates: e.names_of(c),
            },
            ControlWitness::AddedVoters(s) => WitnessReport::AddedVoters { voters: counts(s) },
            ControlWitness::DeletedVoters(s) => WitnessReport::DeletedVoters { voters: counts(s) },
            ControlWitness::CandidatePartition { first, second } => {
                WitnessReport::CandidatePartition {
                    first: e.names_of(first),
                    second: e.names_of(second),
                }
            }
            ControlWitness::VoterPartition { first, second } => WitnessReport::VoterPartition {
                first: counts(first),
                second: counts(second),
            },
        }
    }
}

fn counts(sel: &VoterSelection) -> Vec<VoterCount> {
    sel.iter()
        .filter(|&(_, count)| count > 0)
        .map(|(ballot, count)| VoterCount { ballot, count })
        .collect()
}

/// Hex SHA-256 of length-prefixed parts, so part boundaries matter.
pub fn inputs_digest<'a>(parts: impl IntoIterator<Item = &'a [u8]>) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part);
    }
    hex::encode(hasher.finalize())
}
