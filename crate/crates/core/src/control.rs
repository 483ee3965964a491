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

//! The 22 electoral control problems and the evaluation of a chair's action.
//!
//! A [`ControlInstance`] fixes the control type, the election, the target
//! candidate and whatever the chair may use (spoiler candidates, a pool of
//! unregistered voters, a budget). A [`ControlWitness`] is one concrete
//! action; [`apply_witness`] computes the FV winners of the election that the
//! action produces, and [`goal_met`] decides whether the chair succeeded.
//!
//! Voters are identified by the index of their ballot group plus a count, so
//! a group of identical voters may be split between the two sides of a voter
//! partition or only partly added or deleted.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::election::{Ballot, Election, Resolution, WinnerResult};
use crate::error::{Error, Result};

/// Tie handling in the first round of a partition election.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TieRule {
    /// Ties eliminate: only a unique subelection winner advances.
    #[serde(rename = "te")]
    TiesEliminate,
    /// Ties promote: every subelection winner advances.
    #[serde(rename = "tp")]
    TiesPromote,
}

impl TieRule {
    pub fn code(self) -> &'static str {
        match self {
            TieRule::TiesEliminate => "te",
            TieRule::TiesPromote => "tp",
        }
    }

    /// Subelection winners that advance to the final round.
    pub fn promoted(self, winners: Vec<usize>) -> Vec<usize> {
        match self {
            TieRule::TiesPromote => winners,
            TieRule::TiesEliminate if winners.len() == 1 => winners,
            TieRule::TiesEliminate => Vec::new(),
        }
    }
}

impl FromStr for TieRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "te" | "TE" => Ok(TieRule::TiesEliminate),
            "tp" | "TP" => Ok(TieRule::TiesPromote),
            _ => Err(Error::MalformedQuery(format!("unknown tie rule `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Make the target the unique winner.
    Constructive,
    /// Keep the target from being the unique winner.
    Destructive,
}

impl Mode {
    pub fn code(self) -> &'static str {
        match self {
            Mode::Constructive => "constructive",
            Mode::Destructive => "destructive",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constructive" => Ok(Mode::Constructive),
            "destructive" => Ok(Mode::Destructive),
            _ => Err(Error::MalformedQuery(format!("unknown mode `{s}`"))),
        }
    }
}

/// What the chair is allowed to do.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    AddCandidatesUnlimited,
    AddCandidatesLimited,
    DeleteCandidates,
    PartitionCandidates,
    RunoffPartitionCandidates,
    AddVoters,
    DeleteVoters,
    PartitionVoters,
}

impl Action {
    pub const ALL: [Action; 8] = [
        Action::AddCandidatesUnlimited,
        Action::AddCandidatesLimited,
        Action::DeleteCandidates,
        Action::PartitionCandidates,
        Action::RunoffPartitionCandidates,
        Action::AddVoters,
        Action::DeleteVoters,
        Action::PartitionVoters,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Action::AddCandidatesUnlimited => "add-candidates-unlimited",
            Action::AddCandidatesLimited => "add-candidates-limited",
            Action::DeleteCandidates => "delete-candidates",
            Action::PartitionCandidates => "partition-candidates",
            Action::RunoffPartitionCandidates => "runoff-partition-candidates",
            Action::AddVoters => "add-voters",
            Action::DeleteVoters => "delete-voters",
            Action::PartitionVoters => "partition-voters",
        }
    }

    pub fn is_partition(self) -> bool {
        matches!(
            self,
            Action::PartitionCandidates | Action::RunoffPartitionCandidates | Action::PartitionVoters
        )
    }

    pub fn adds_candidates(self) -> bool {
        matches!(
            self,
            Action::AddCandidatesUnlimited | Action::AddCandidatesLimited
        )
    }

    pub fn needs_budget(self) -> bool {
        matches!(
            self,
            Action::AddCandidatesLimited
                | Action::DeleteCandidates
                | Action::AddVoters
                | Action::DeleteVoters
        )
    }
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Action::ALL
            .into_iter()
            .find(|a| a.code() == s)
            .ok_or_else(|| Error::MalformedQuery(format!("unknown control type `{s}`")))
    }
}

/// One of the 22 legal combinations of action, mode and tie rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ControlType {
    action: Action,
    mode: Mode,
    tie: Option<TieRule>,
}

impl ControlType {
    /// Validates the combination: partition actions need a tie rule, all
    /// other actions must not have one.
    pub fn new(action: Action, mode: Mode, tie: Option<TieRule>) -> Result<Self> {
        if action.is_partition() != tie.is_some() {
            return Err(Error::MalformedQuery(if action.is_partition() {
                format!("{} requires a tie rule", action.code())
            } else {
                format!("{} takes no tie rule", action.code())
            }));
        }
        Ok(ControlType { action, mode, tie })
    }

    /// All 22 control types in a fixed order.
    pub fn all() -> Vec<ControlType> {
        let mut out = Vec::with_capacity(22);
        for action in Action::ALL {
            for mode in [Mode::Constructive, Mode::Destructive] {
                if action.is_partition() {
                    for tie in [TieRule::TiesEliminate, TieRule::TiesPromote] {
                        out.push(ControlType {
                            action,
                            mode,
                            tie: Some(tie),
                        });
                    }
                } else {
                    out.push(ControlType {
                        action,
                        mode,
                        tie: None,
                    });
                }
            }
        }
        out
    }

    pub fn action(self) -> Action {
        self.action
    }

    pub fn mode(self) -> Mode {
        self.mode
    }

    pub fn tie(self) -> Option<TieRule> {
        self.tie
    }
}

impl fmt::Display for ControlType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.action.code(), self.mode.code())?;
        if let Some(tie) = self.tie {
            write!(f, "/{}", tie.code())?;
        }
        Ok(())
    }
}

/// A multiset of voters: ballot-group index to number of voters taken from
/// that group. Zero counts are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VoterSelection(BTreeMap<usize, u32>);

impl VoterSelection {
    pub fn new() -> Self {
        VoterSelection::default()
    }

    pub fn from_counts<I: IntoIterator<Item = (usize, u32)>>(counts: I) -> Self {
        let mut sel = VoterSelection::new();
        for (index, count) in counts {
            sel.add(index, count);
        }
        sel
    }

    pub fn add(&mut self, index: usize, count: u32) {
        if count > 0 {
            *self.0.entry(index).or_insert(0) += count;
        }
    }

    pub fn count(&self, index: usize) -> u32 {
        self.0.get(&index).copied().unwrap_or(0)
    }

    /// Number of voters selected.
    pub fn size(&self) -> u64 {
        self.0.values().map(|&c| u64::from(c)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|(&i, &c)| (i, c))
    }

    /// Checks every count against the multiplicities of `groups`.
    fn check_within(&self, groups: &[Ballot], what: &str) -> Result<()> {
        for (index, count) in self.iter() {
            let available = groups.get(index).map(|b| b.multiplicity()).ok_or_else(|| {
                Error::ContractViolation(format!("{what} index {index} out of range"))
            })?;
            if count > available {
                return Err(Error::ContractViolation(format!(
                    "{what} group {index} has {available} voters, {count} selected"
                )));
            }
        }
        Ok(())
    }
}

/// A concrete chair action. Candidate sets hold candidate indices; voter
/// selections index the registered ballots, or the pool for added voters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ControlWitness {
    AddedCandidates(Vec<usize>),
    DeletedCandidates(Vec<usize>),
    AddedVoters(VoterSelection),
    DeletedVoters(VoterSelection),
    CandidatePartition { first: Vec<usize>, second: Vec<usize> },
    VoterPartition {
        first: VoterSelection,
        second: VoterSelection,
    },
}

/// A control problem instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlInstance {
    ctype: ControlType,
    /// For candidate addition this election ranges over the qualified and
    /// the spoiler candidates together.
    election: Election,
    spoilers: Vec<usize>,
    pool: Vec<Ballot>,
    budget: Option<u64>,
    target: usize,
}

impl ControlInstance {
    pub fn new(ctype: ControlType, election: Election, target: usize) -> Self {
        ControlInstance {
            ctype,
            election,
            spoilers: Vec::new(),
            pool: Vec::new(),
            budget: None,
            target,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn with_spoilers(mut self, mut spoilers: Vec<usize>) -> Self {
        spoilers.sort_unstable();
        self.spoilers = spoilers;
        self
    }

    pub fn with_pool(mut self, pool: Vec<Ballot>) -> Self {
        self.pool = pool;
        self
    }

    pub fn ctype(&self) -> ControlType {
        self.ctype
    }

    pub fn election(&self) -> &Election {
        &self.election
    }

    pub fn spoilers(&self) -> &[usize] {
        &self.spoilers
    }

    pub fn pool(&self) -> &[Ballot] {
        &self.pool
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Candidates taking part before any candidate is added.
    pub fn qualified(&self) -> Vec<usize> {
        (0..self.election.num_candidates())
            .filter(|c| self.spoilers.binary_search(c).is_err())
            .collect()
    }

    /// Checks the instance invariants for its control type.
    pub fn validate(&self) -> Result<()> {
        let n = self.election.num_candidates();
        let action = self.ctype.action();
        if self.target >= n {
            return Err(Error::UnknownCandidate(format!("#{}", self.target)));
        }
        if action.needs_budget() != self.budget.is_some() {
            return Err(Error::ContractViolation(if action.needs_budget() {
                format!("{} requires a budget", action.code())
            } else {
                format!("{} takes no budget", action.code())
            }));
        }
        if action.adds_candidates() {
            if self.spoilers.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::ContractViolation("duplicate spoiler".into()));
            }
            if self.spoilers.iter().any(|&s| s >= n) {
                return Err(Error::ContractViolation("spoiler out of range".into()));
            }
            if self.spoilers.contains(&self.target) {
                return Err(Error::ContractViolation(
                    "the target must be a qualified candidate".into(),
                ));
            }
        } else if !self.spoilers.is_empty() {
            return Err(Error::ContractViolation(format!(
                "{} takes no spoiler candidates",
                action.code()
            )));
        }
        if action == Action::AddVoters {
            for ballot in &self.pool {
                self.election.check_ballot(ballot)?;
            }
        } else if !self.pool.is_empty() {
            return Err(Error::ContractViolation(format!(
                "{} takes no unregistered voters",
                action.code()
            )));
        }
        Ok(())
    }

    /// The election before the chair acts.
    pub fn base_winners(&self) -> Result<WinnerResult> {
        reference_winners(&self.election, &self.qualified())
    }

    fn check_budget(&self, used: u64) -> Result<()> {
        match self.budget {
            Some(budget) if used > budget => Err(Error::BudgetExceeded { used, budget }),
            _ => Ok(()),
        }
    }
}

/// Winners of `restrict(e, members)` mapped back to `e`'s indices; an empty
/// member set has no winners.
fn reference_winners(e: &Election, members: &[usize]) -> Result<WinnerResult> {
    if members.is_empty() {
        return Ok(WinnerResult::new(Vec::new(), Resolution::ApprovalFallback));
    }
    let (sorted, _) = e.member_mask(members)?;
    let sub = e.restrict(&sorted)?.fallback_winners()?;
    Ok(WinnerResult::new(
        sub.winners.iter().map(|&w| sorted[w]).collect(),
        sub.resolution,
    ))
}

fn distinct_sorted(set: &[usize], n: usize, what: &str) -> Result<Vec<usize>> {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::ContractViolation(format!("{what} lists a candidate twice")));
    }
    if sorted.last().is_some_and(|&c| c >= n) {
        return Err(Error::ContractViolation(format!("{what} candidate out of range")));
    }
    Ok(sorted)
}

/// Computes the FV winners of the election resulting from `witness`.
pub fn apply_witness(inst: &ControlInstance, witness: &ControlWitness) -> Result<WinnerResult> {
    inst.validate()?;
    let e = &inst.election;
    let n = e.num_candidates();
    let ctype = inst.ctype;
    match (ctype.action(), witness) {
        (Action::AddCandidatesUnlimited | Action::AddCandidatesLimited, ControlWitness::AddedCandidates(added)) => {
            let added = distinct_sorted(added, n, "added set")?;
            if added.iter().any(|c| inst.spoilers.binary_search(c).is_err()) {
                return Err(Error::ContractViolation(
                    "only spoiler candidates can be added".into(),
                ));
            }
            inst.check_budget(added.len() as u64)?;
            let mut members = inst.qualified();
            members.extend(added);
            reference_winners(e, &members)
        }
        (Action::DeleteCandidates, ControlWitness::DeletedCandidates(deleted)) => {
            let deleted = distinct_sorted(deleted, n, "deleted set")?;
            if deleted.contains(&inst.target) {
                return Err(Error::ContractViolation(
                    "the target candidate cannot be deleted".into(),
                ));
            }
            inst.check_budget(deleted.len() as u64)?;
            let members: Vec<usize> = (0..n).filter(|c| deleted.binary_search(c).is_err()).collect();
            reference_winners(e, &members)
        }
        (Action::PartitionCandidates, ControlWitness::CandidatePartition { first, second }) => {
            evaluate_partition_candidates(e, first, second, false, tie_of(ctype))
        }
        (Action::RunoffPartitionCandidates, ControlWitness::CandidatePartition { first, second }) => {
            evaluate_partition_candidates(e, first, second, true, tie_of(ctype))
        }
        (Action::AddVoters, ControlWitness::AddedVoters(added)) => {
            added.check_within(&inst.pool, "pool")?;
            inst.check_budget(added.size())?;
            let mut ballots = e.ballots().to_vec();
            ballots.extend(
                added
                    .iter()
                    .map(|(index, count)| inst.pool[index].with_multiplicity(count)),
            );
            e.with_ballots(ballots)?.fallback_winners()
        }
        (Action::DeleteVoters, ControlWitness::DeletedVoters(deleted)) => {
            deleted.check_within(e.ballots(), "ballot")?;
            inst.check_budget(deleted.size())?;
            let ballots = e
                .ballots()
                .iter()
                .enumerate()
                .filter_map(|(index, b)| {
                    let left = b.multiplicity() - deleted.count(index);
                    (left > 0).then(|| b.with_multiplicity(left))
                })
                .collect();
            e.with_ballots(ballots)?.fallback_winners()
        }
        (Action::PartitionVoters, ControlWitness::VoterPartition { first, second }) => {
            evaluate_partition_voters(e, first, second, tie_of(ctype))
        }
        (action, _) => Err(Error::ContractViolation(format!(
            "witness does not match control type {}",
            action.code()
        ))),
    }
}

fn tie_of(ctype: ControlType) -> TieRule {
    ctype.tie().expect("partition types carry a tie rule")
}

/// Two-stage election after partitioning the candidates into `first` and
/// `second`. With `runoff` the winners of both subelections meet in the
/// final round; without it the winners of `first` face all of `second`.
pub fn evaluate_partition_candidates(
    e: &Election,
    first: &[usize],
    second: &[usize],
    runoff: bool,
    rule: TieRule,
) -> Result<WinnerResult> {
    let n = e.num_candidates();
    let first = distinct_sorted(first, n, "first part")?;
    let second = distinct_sorted(second, n, "second part")?;
    let mut covered = vec![0u8; n];
    for &c in first.iter().chain(&second) {
        covered[c] += 1;
    }
    if covered.iter().any(|&k| k != 1) {
        return Err(Error::ContractViolation(
            "candidate parts must partition the candidate set".into(),
        ));
    }
    let mut finalists = rule.promoted(reference_winners(e, &first)?.winners);
    if runoff {
        finalists.extend(rule.promoted(reference_winners(e, &second)?.winners));
    } else {
        finalists.extend(second);
    }
    reference_winners(e, &finalists)
}

/// Two-stage election after partitioning the voters. The finalists are
/// evaluated with every voter of `e`.
pub fn evaluate_partition_voters(
    e: &Election,
    first: &VoterSelection,
    second: &VoterSelection,
    rule: TieRule,
) -> Result<WinnerResult> {
    first.check_within(e.ballots(), "ballot")?;
    second.check_within(e.ballots(), "ballot")?;
    for (index, ballot) in e.ballots().iter().enumerate() {
        if first.count(index) + second.count(index) != ballot.multiplicity() {
            return Err(Error::ContractViolation(format!(
                "voter parts do not cover ballot group {index} exactly"
            )));
        }
    }
    if e.num_candidates() == 0 {
        return Ok(WinnerResult::new(Vec::new(), Resolution::ApprovalFallback));
    }
    let side = |sel: &VoterSelection| -> Result<Vec<usize>> {
        let ballots = sel
            .iter()
            .map(|(index, count)| e.ballots()[index].with_multiplicity(count))
            .collect();
        Ok(e.with_ballots(ballots)?.fallback_winners()?.winners)
    };
    let mut finalists = rule.promoted(side(first)?);
    finalists.extend(rule.promoted(side(second)?));
    finalists.sort_unstable();
    finalists.dedup();
    reference_winners(e, &finalists)
}

/// Whether the chair reached its goal given the final winners.
pub fn goal_met(result: &WinnerResult, target: usize, mode: Mode) -> bool {
    match mode {
        Mode::Constructive => result.is_unique_winner(target),
        Mode::Destructive => !result.is_unique_winner(target),
    }
}
