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

//! Hitting Set and X3C sources, brute-force oracles for both, the election
//! constructions that reduce them to FV control problems, and a harness that
//! checks each reduction against the exhaustive control solver.

mod build;
mod verify;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::control::ControlInstance;
use crate::election::Election;
use crate::error::{Error, Result};
use crate::exact::enumerate_bounded_subsets;

pub use build::{
    build, build_adding_voters, build_candidate_control, build_deleting_candidates,
    build_deleting_voters, build_destructive_partition_tp, build_partition_voters_te,
    build_partition_voters_tp,
};
pub use verify::{
    small_hitting_set_suite, small_x3c_suite, verify_reduction, verify_suite, ClaimCheck,
    InstanceCheck, SuiteEntry, SuiteOutcome, VerificationReport,
};

/// Largest ground set the Hitting Set oracle enumerates.
pub const HS_ORACLE_MAX_ELEMENTS: usize = 20;
/// Largest collection the X3C oracle searches.
pub const X3C_ORACLE_MAX_SETS: usize = 20;

/// Ground set `{b_1, ..., b_m}` (indices `0..m`), a collection of nonempty
/// subsets and a size bound `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HittingSetInstance {
    pub m: usize,
    pub k: usize,
    pub sets: Vec<Vec<usize>>,
}

impl HittingSetInstance {
    /// Builds and validates an instance; each set is sorted.
    pub fn new(m: usize, k: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut h = HittingSetInstance { m, k, sets };
        for set in &mut h.sets {
            set.sort_unstable();
        }
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.m {
            return Err(Error::ConstructionDomain(format!(
                "hitting set bound k={} must lie in 1..={}",
                self.k, self.m
            )));
        }
        for (i, set) in self.sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::ConstructionDomain(format!("set {i} is empty")));
            }
            check_elements(set, self.m, i)?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    pub fn is_hitting_set(&self, chosen: &[usize]) -> bool {
        self.sets
            .iter()
            .all(|set| set.iter().any(|b| chosen.contains(b)))
    }

    /// Pads a hitting set with the lowest unused elements up to size `k`.
    pub fn pad_to_k(&self, chosen: &[usize]) -> Vec<usize> {
        let mut out = chosen.to_vec();
        for b in 0..self.m {
            if out.len() >= self.k {
                break;
            }
            if !out.contains(&b) {
                out.push(b);
            }
        }
        out.sort_unstable();
        out
    }
}

/// Ground set `{b_1, ..., b_3m}` (indices `0..3m`) and a collection of
/// 3-element subsets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct X3cInstance {
    pub m: usize,
    pub sets: Vec<Vec<usize>>,
}

impl X3cInstance {
    pub fn new(m: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut x = X3cInstance { m, sets };
        for set in &mut x.sets {
            set.sort_unstable();
        }
        x.validate()?;
        Ok(x)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::ConstructionDomain("X3C needs m >= 1".into()));
        }
        for (i, set) in self.sets.iter().enumerate() {
            if set.len() != 3 {
                return Err(Error::ConstructionDomain(format!(
                    "set {i} has {} elements, expected 3",
                    set.len()
                )));
            }
            check_elements(set, 3 * self.m, i)?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    /// `ell[j]`: number of sets containing `b_j`.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut ell = vec![0; 3 * self.m];
        for set in &self.sets {
            for &b in set {
                ell[b] += 1;
            }
        }
        ell
    }

    pub fn is_exact_cover(&self, chosen: &[usize]) -> bool {
        let mut seen = vec![0u32; 3 * self.m];
        for &i in chosen {
            for &b in &self.sets[i] {
                seen[b] += 1;
            }
        }
        seen.iter().all(|&s| s == 1)
    }
}

fn check_elements(set: &[usize], size: usize, i: usize) -> Result<()> {
    if set.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::ConstructionDomain(format!("set {i} repeats an element")));
    }
    if set.iter().any(|&b| b >= size) {
        return Err(Error::ConstructionDomain(format!(
            "set {i} has an element outside 0..{size}"
        )));
    }
    Ok(())
}

/// A smallest hitting set of size at most `k`, if one exists.
pub fn hs_oracle(h: &HittingSetInstance) -> Result<Option<Vec<usize>>> {
    if h.m > HS_ORACLE_MAX_ELEMENTS {
        return Err(Error::InstanceTooLarge {
            what: "hitting set ground set",
            required: h.m as u128,
            limit: HS_ORACLE_MAX_ELEMENTS as u64,
        });
    }
    Ok(enumerate_bounded_subsets(h.m, h.k).find(|s| h.is_hitting_set(s)))
}

/// Indices of `m` pairwise disjoint sets covering the ground set, if any.
pub fn x3c_oracle(x: &X3cInstance) -> Result<Option<Vec<usize>>> {
    if x.n() > X3C_ORACLE_MAX_SETS {
        return Err(Error::InstanceTooLarge {
            what: "X3C collection",
            required: x.n() as u128,
            limit: X3C_ORACLE_MAX_SETS as u64,
        });
    }
    let mut covered = vec![false; 3 * x.m];
    let mut chosen = Vec::new();
    Ok(cover_from(x, &mut covered, &mut chosen).then(|| {
        chosen.sort_unstable();
        chosen
    }))
}

fn cover_from(x: &X3cInstance, covered: &mut [bool], chosen: &mut Vec<usize>) -> bool {
    let Some(first) = covered.iter().position(|&c| !c) else {
        return true;
    };
    for (i, set) in x.sets.iter().enumerate() {
        if set.contains(&first) && set.iter().all(|&b| !covered[b]) {
            set.iter().for_each(|&b| covered[b] = true);
            chosen.push(i);
            if cover_from(x, covered, chosen) {
                return true;
            }
            chosen.pop();
            set.iter().for_each(|&b| covered[b] = false);
        }
    }
    false
}

/// A source instance of either problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Source {
    HittingSet(HittingSetInstance),
    X3c(X3cInstance),
}

impl Source {
    /// Parses JSON; objects with a `k` field are Hitting Set instances.
    pub fn from_json(value: serde_json::Value) -> Result<Source> {
        let source = if value.get("k").is_some() {
            let h: HittingSetInstance = serde_json::from_value(value)
                .map_err(|e| Error::MalformedQuery(format!("hitting set source: {e}")))?;
            Source::HittingSet(HittingSetInstance::new(h.m, h.k, h.sets)?)
        } else {
            let x: X3cInstance = serde_json::from_value(value)
                .map_err(|e| Error::MalformedQuery(format!("X3C source: {e}")))?;
            Source::X3c(X3cInstance::new(x.m, x.sets)?)
        };
        Ok(source)
    }

    /// Decides the source problem; the witness lists chosen elements or sets.
    pub fn solve(&self) -> Result<Option<Vec<usize>>> {
        match self {
            Source::HittingSet(h) => hs_oracle(h),
            Source::X3c(x) => x3c_oracle(x),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    /// All thirteen candidate-control instances over `B ∪ {c, d, w}`.
    CandidateControl,
    CandidateControlAdding,
    CandidateControlDeleting,
    CandidateControlPartition,
    DeletingCandidates,
    AddingVoters,
    DeletingVoters,
    PartitionVotersTe,
    PartitionVotersTp,
    DestructivePartitionVotersTp,
}

impl Construction {
    pub const ALL: [Construction; 10] = [
        Construction::CandidateControl,
        Construction::CandidateControlAdding,
        Construction::CandidateControlDeleting,
        Construction::CandidateControlPartition,
        Construction::DeletingCandidates,
        Construction::AddingVoters,
        Construction::DeletingVoters,
        Construction::PartitionVotersTe,
        Construction::PartitionVotersTp,
        Construction::DestructivePartitionVotersTp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Construction::CandidateControl => "candidate-control",
            Construction::CandidateControlAdding => "candidate-control-adding",
            Construction::CandidateControlDeleting => "candidate-control-deleting",
            Construction::CandidateControlPartition => "candidate-control-partition",
            Construction::DeletingCandidates => "deleting-candidates",
            Construction::AddingVoters => "adding-voters",
            Construction::DeletingVoters => "deleting-voters",
            Construction::PartitionVotersTe => "partition-voters-te",
            Construction::PartitionVotersTp => "partition-voters-tp",
            Construction::DestructivePartitionVotersTp => "destructive-partition-voters-tp",
        }
    }

    /// Whether the construction reduces from Hitting Set (otherwise X3C).
    pub fn from_hitting_set(self) -> bool {
        matches!(
            self,
            Construction::CandidateControl
                | Construction::CandidateControlAdding
                | Construction::CandidateControlDeleting
                | Construction::CandidateControlPartition
                | Construction::DeletingCandidates
                | Construction::DestructivePartitionVotersTp
        )
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Construction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Construction::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::MalformedQuery(format!("unknown construction `{s}`")))
    }
}

/// Where the source's elements and sets ended up in the election.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Bookkeeping {
    /// Candidate index of each ground element.
    pub elements: Vec<usize>,
    /// For each source set, the ballot indices built from it (pool indices
    /// when the ballots are unregistered voters).
    pub set_ballots: Vec<Vec<usize>>,
    /// For each ground element, ballot indices built from it.
    pub element_ballots: Vec<Vec<usize>>,
    /// Named special candidates such as `c`, `d` and `w`.
    pub specials: Vec<(String, usize)>,
    /// Registered ballot indices of each voter group, in construction order.
    pub groups: Vec<(String, Vec<usize>)>,
}

impl Bookkeeping {
    pub fn special(&self, name: &str) -> usize {
        self.specials
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, c)| c)
            .unwrap_or_else(|| panic!("construction has no candidate `{name}`"))
    }

    /// Ballot indices of the named voter group.
    pub fn group(&self, name: &str) -> &[usize] {
        self.groups
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g.as_slice())
            .unwrap_or(&[])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledInstance {
    pub label: String,
    pub instance: ControlInstance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionOutput {
    /// The constructed election; unregistered voters live in the instances.
    pub election: Election,
    /// The control problems the source reduces to; they all share the
    /// source's answer.
    pub instances: Vec<LabeledInstance>,
    pub bookkeeping: Bookkeeping,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hitting_set_oracle() {
        let h = HittingSetInstance::new(3, 1, vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(hs_oracle(&h).unwrap(), Some(vec![1]));
        let h = HittingSetInstance::new(3, 3, vec![vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(hs_oracle(&h).unwrap(), Some(vec![0, 1, 2]));
        let h = HittingSetInstance::new(1, 1, vec![vec![0]]).unwrap();
        assert_eq!(hs_oracle(&h).unwrap(), Some(vec![0]));
        let h = HittingSetInstance::new(3, 1, vec![vec![0], vec![2]]).unwrap();
        assert_eq!(hs_oracle(&h).unwrap(), None);
        assert_eq!(h.pad_to_k(&[]), vec![0]);
    }

    #[test]
    fn hitting_set_validation() {
        assert!(HittingSetInstance::new(3, 0, vec![vec![0]]).is_err());
        assert!(HittingSetInstance::new(3, 4, vec![vec![0]]).is_err());
        assert!(HittingSetInstance::new(3, 1, vec![vec![]]).is_err());
        assert!(HittingSetInstance::new(3, 1, vec![vec![3]]).is_err());
        assert!(HittingSetInstance::new(3, 1, vec![vec![1, 1]]).is_err());
    }

    #[test]
    fn x3c_oracle_examples() {
        let x = X3cInstance::new(1, vec![vec![0, 1, 2]]).unwrap();
        assert_eq!(x3c_oracle(&x).unwrap(), Some(vec![0]));
        let x = X3cInstance::new(2, vec![vec![0, 1, 2], vec![0, 1, 3], vec![3, 4, 5]]).unwrap();
        assert_eq!(x3c_oracle(&x).unwrap(), Some(vec![0, 2]));
        let x = X3cInstance::new(2, vec![vec![0, 1, 2], vec![0, 3, 4]]).unwrap();
        assert_eq!(x3c_oracle(&x).unwrap(), None);
        assert!(X3cInstance::new(2, vec![vec![0, 1]]).is_err());
        assert!(X3cInstance::new(1, vec![vec![0, 1, 3]]).is_err());
    }

    #[test]
    fn x3c_oracle_matches_subset_enumeration() {
        for x in small_x3c_suite() {
            let brute = (0u32..1 << x.n()).find_map(|mask| {
                let chosen: Vec<usize> = (0..x.n()).filter(|i| mask >> i & 1 == 1).collect();
                x.is_exact_cover(&chosen).then_some(chosen)
            });
            assert_eq!(x3c_oracle(&x).unwrap().is_some(), brute.is_some(), "{x:?}");
        }
    }

    #[test]
    fn sources_from_json() {
        let hs = Source::from_json(serde_json::json!({"m": 3, "k": 1, "sets": [[1, 0], [2]]})).unwrap();
        assert_eq!(
            hs,
            Source::HittingSet(HittingSetInstance::new(3, 1, vec![vec![0, 1], vec![2]]).unwrap())
        );
        let x = Source::from_json(serde_json::json!({"m": 1, "sets": [[0, 1, 2]]})).unwrap();
        assert!(matches!(x, Source::X3c(_)));
        assert!(Source::from_json(serde_json::json!({"m": 1, "sets": [[0, 1]]})).is_err());
    }

    #[test]
    fn construction_names_round_trip() {
        for c in Construction::ALL {
            assert_eq!(c.name().parse::<Construction>().unwrap(), c);
        }
    }
}
