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

//! Fallback-voting elections: ballots, level scores and winner determination.
//!
//! A ballot lists the candidates a voter approves of, most preferred first;
//! every candidate not listed is disapproved. The level-`i` score of a
//! candidate counts the voters ranking it within their first `i` approved
//! positions. Winners are found level by level: at the first level where some
//! candidate is approved by a strict majority, the candidates with the highest
//! score on that level win. If no level produces a strict majority, the
//! candidates with the highest approval score win.
//!
//! Candidates are referred to by their index in [`Election::candidates`].

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tally::{self, LevelHistogram};

/// Name of a candidate: a nonempty token of ASCII letters, digits and `_`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CandidateId(String);

impl CandidateId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        let valid = !name.is_empty()
            && name
                .chars()
                .all(|ch| ch.is_ascii_alphanumeric() || ch == '_');
        if valid {
            Ok(CandidateId(name))
        } else {
            Err(Error::InvalidCandidateName(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for CandidateId {
    type Error = Error;

    fn try_from(value: String) -> Result<Self> {
        CandidateId::new(value)
    }
}

impl From<CandidateId> for String {
    fn from(id: CandidateId) -> String {
        id.0
    }
}

/// A group of identical voters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ballot {
    /// Approved candidates, most preferred first.
    ranking: Vec<usize>,
    /// Number of voters casting this ballot.
    multiplicity: u32,
}

impl Ballot {
    pub fn new(ranking: Vec<usize>, multiplicity: u32) -> Self {
        Ballot {
            ranking,
            multiplicity,
        }
    }

    pub fn single(ranking: Vec<usize>) -> Self {
        Ballot::new(ranking, 1)
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    /// Zero-based position of `candidate` in the ranking, if approved.
    pub fn position_of(&self, candidate: usize) -> Option<usize> {
        self.ranking.iter().position(|&c| c == candidate)
    }

    /// Whether `candidate` is ranked within the first `level` positions.
    pub fn approves_within(&self, candidate: usize, level: usize) -> bool {
        self.ranking.iter().take(level).any(|&c| c == candidate)
    }

    pub fn approves(&self, candidate: usize) -> bool {
        self.ranking.contains(&candidate)
    }

    pub(crate) fn with_multiplicity(&self, multiplicity: u32) -> Ballot {
        Ballot::new(self.ranking.clone(), multiplicity)
    }
}

/// How the winners of an election were determined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resolution {
    /// Some candidate holds a strict majority on this level (1-based) and no
    /// candidate does on an earlier one.
    MajorityLevel(usize),
    /// No level yields a strict majority; approval scores decide.
    ApprovalFallback,
}

/// The FV winners of an election, as ascending candidate indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WinnerResult {
    pub winners: Vec<usize>,
    pub resolution: Resolution,
}

impl WinnerResult {
    pub fn new(winners: Vec<usize>, resolution: Resolution) -> Self {
        WinnerResult {
            winners,
            resolution,
        }
    }

    pub fn is_unique_winner(&self, candidate: usize) -> bool {
        self.winners.len() == 1 && self.winners[0] == candidate
    }

    pub fn unique_winner(&self) -> Option<usize> {
        match self.winners.as_slice() {
            [single] => Some(*single),
            _ => None,
        }
    }

    pub fn level(&self) -> Option<usize> {
        match self.resolution {
            Resolution::MajorityLevel(level) => Some(level),
            Resolution::ApprovalFallback => None,
        }
    }
}

/// Smallest score that is a strict majority of `voter_count` voters.
pub fn majority_threshold(voter_count: u64) -> u64 {
    voter_count / 2 + 1
}

/// A candidate set together with a list of ballot groups over it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Election {
    candidates: Vec<CandidateId>,
    lookup: HashMap<CandidateId, usize>,
    ballots: Vec<Ballot>,
}

impl Election {
    pub fn new(candidates: Vec<CandidateId>, ballots: Vec<Ballot>) -> Result<Self> {
        let mut lookup = HashMap::with_capacity(candidates.len());
        for (index, id) in candidates.iter().enumerate() {
            if lookup.insert(id.clone(), index).is_some() {
                return Err(Error::DuplicateCandidate(id.to_string()));
            }
        }
        let election = Election {
            candidates,
            lookup,
            ballots: Vec::new(),
        };
        for ballot in &ballots {
            election.check_ballot(ballot)?;
        }
        Ok(Election {
            ballots,
            ..election
        })
    }

    /// Builds an election from candidate names and `(multiplicity, ranking)`
    /// pairs given by name.
    pub fn from_names(candidates: &[&str], ballots: &[(u32, &[&str])]) -> Result<Self> {
        let ids = candidates
            .iter()
            .map(|name| CandidateId::new(*name))
            .collect::<Result<Vec<_>>>()?;
        let shell = Election::new(ids, Vec::new())?;
        let ballots = ballots
            .iter()
            .map(|(multiplicity, names)| shell.ballot_from_names(names, *multiplicity))
            .collect::<Result<Vec<_>>>()?;
        Election::new(shell.candidates, ballots)
    }

    /// Resolves names against this election's candidates into a ballot.
    pub fn ballot_from_names(&self, names: &[&str], multiplicity: u32) -> Result<Ballot> {
        let ranking = names
            .iter()
            .map(|name| self.index_of(name))
            .collect::<Result<Vec<_>>>()?;
        let ballot = Ballot::new(ranking, multiplicity);
        self.check_ballot(&ballot)?;
        Ok(ballot)
    }

    /// Checks that a ballot only ranks distinct candidates of this election
    /// and stands for at least one voter.
    pub fn check_ballot(&self, ballot: &Ballot) -> Result<()> {
        if ballot.multiplicity == 0 {
            return Err(Error::InvalidBallot("multiplicity must be positive".into()));
        }
        let mut seen = vec![false; self.candidates.len()];
        for &c in &ballot.ranking {
            match seen.get_mut(c) {
                None => {
                    return Err(Error::InvalidBallot(format!(
                        "candidate index {c} out of range"
                    )))
                }
                Some(true) => {
                    return Err(Error::InvalidBallot(format!(
                        "candidate `{}` ranked twice",
                        self.candidates[c]
                    )))
                }
                Some(flag) => *flag = true,
            }
        }
        Ok(())
    }

    pub fn candidates(&self) -> &[CandidateId] {
        &self.candidates
    }

    pub fn ballots(&self) -> &[Ballot] {
        &self.ballots
    }

    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }

    /// Total number of voters, counting multiplicities.
    pub fn voter_count(&self) -> u64 {
        self.ballots.iter().map(|b| u64::from(b.multiplicity)).sum()
    }

    pub fn name(&self, candidate: usize) -> &str {
        self.candidates[candidate].as_str()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        CandidateId::new(name)
            .ok()
            .and_then(|id| self.lookup.get(&id).copied())
            .ok_or_else(|| Error::UnknownCandidate(name.to_string()))
    }

    fn check_candidate(&self, candidate: usize) -> Result<()> {
        if candidate < self.candidates.len() {
            Ok(())
        } else {
            Err(Error::UnknownCandidate(format!("#{candidate}")))
        }
    }

    /// Number of voters ranking `candidate` within their first `level`
    /// approved positions.
    pub fn level_score(&self, candidate: usize, level: usize) -> Result<u64> {
        self.check_candidate(candidate)?;
        if level == 0 {
            return Err(Error::InvalidLevel);
        }
        Ok(self
            .ballots
            .iter()
            .filter(|b| b.approves_within(candidate, level))
            .map(|b| u64::from(b.multiplicity))
            .sum())
    }

    /// Number of voters approving `candidate`.
    pub fn approval_score(&self, candidate: usize) -> Result<u64> {
        self.check_candidate(candidate)?;
        Ok(self
            .ballots
            .iter()
            .filter(|b| b.approves(candidate))
            .map(|b| u64::from(b.multiplicity))
            .sum())
    }

    /// FV winners of the whole election.
    pub fn fallback_winners(&self) -> Result<WinnerResult> {
        if self.candidates.is_empty() {
            return Err(Error::EmptyCandidateSet);
        }
        let n = self.candidates.len();
        let mut hist = LevelHistogram::new(n, n);
        for b in &self.ballots {
            hist.add(b.ranking.iter().copied(), u64::from(b.multiplicity));
        }
        let members: Vec<usize> = (0..n).collect();
        Ok(hist.decide(&members))
    }

    /// FV winners of the subelection restricted to `members`, reported with
    /// this election's candidate indices. Equivalent to
    /// `self.restrict(members)?.fallback_winners()` up to renumbering, except
    /// that an empty member set yields no winners instead of an error.
    pub fn winners_among(&self, members: &[usize]) -> Result<WinnerResult> {
        let (sorted, allowed) = self.member_mask(members)?;
        Ok(tally::winners_among(
            self.candidates.len(),
            &sorted,
            &allowed,
            self.ballots
                .iter()
                .map(|b| (b.ranking.as_slice(), u64::from(b.multiplicity))),
        ))
    }

    pub(crate) fn member_mask(&self, members: &[usize]) -> Result<(Vec<usize>, Vec<bool>)> {
        let mut allowed = vec![false; self.candidates.len()];
        for &c in members {
            let slot = allowed.get_mut(c).ok_or_else(|| {
                Error::MalformedQuery(format!("candidate index {c} is not in the election"))
            })?;
            *slot = true;
        }
        let sorted = (0..self.candidates.len()).filter(|&c| allowed[c]).collect();
        Ok((sorted, allowed))
    }

    /// The subelection over `keep`: candidates keep their relative order,
    /// rankings are filtered, and the voter list is unchanged.
    pub fn restrict(&self, keep: &[usize]) -> Result<Election> {
        let (sorted, _) = self.member_mask(keep)?;
        let mut renumber = vec![usize::MAX; self.candidates.len()];
        for (new, &old) in sorted.iter().enumerate() {
            renumber[old] = new;
        }
        let candidates = sorted.iter().map(|&c| self.candidates[c].clone()).collect();
        let ballots = self
            .ballots
            .iter()
            .map(|b| {
                let ranking = b
                    .ranking
                    .iter()
                    .filter_map(|&c| (renumber[c] != usize::MAX).then_some(renumber[c]))
                    .collect();
                Ballot::new(ranking, b.multiplicity)
            })
            .collect();
        Election::new(candidates, ballots)
    }

    /// Same as [`Election::restrict`] with candidates given by name.
    pub fn restrict_names(&self, keep: &[&str]) -> Result<Election> {
        let indices = keep
            .iter()
            .map(|name| self.index_of(name))
            .collect::<Result<Vec<_>>>()?;
        self.restrict(&indices)
    }

    /// A copy with different ballots over the same candidates.
    pub fn with_ballots(&self, ballots: Vec<Ballot>) -> Result<Election> {
        Election::new(self.candidates.clone(), ballots)
    }

    /// Names of the given candidate indices.
    pub fn names_of(&self, candidates: &[usize]) -> Vec<String> {
        candidates
            .iter()
            .map(|&c| self.candidates[c].to_string())
            .collect()
    }
}
