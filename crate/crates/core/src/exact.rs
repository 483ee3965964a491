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

//! Exhaustive decision procedure for all 22 control problems.
//!
//! The solver walks every legal action in a fixed canonical order and returns
//! the first one that reaches the chair's goal. Identical ballots are merged
//! into groups and voter actions enumerate how many voters of each group are
//! used, which is equivalent to enumerating voter sets since identical voters
//! are interchangeable. Every reported witness is replayed through
//! [`apply_witness`] before it is returned.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use crate::control::{
    apply_witness, goal_met, Action, ControlInstance, ControlWitness, TieRule, VoterSelection,
};
use crate::election::{Ballot, Election, WinnerResult};
use crate::error::{Error, Result};
use crate::tally::{self, LevelHistogram};

/// Largest candidate set the solver accepts; finalist sets are bitmasks.
pub const MAX_CANDIDATES: usize = 128;

/// Upper bounds on the size of the search space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// Maximum number of unordered 2-partitions to evaluate.
    pub max_partitions: u64,
    /// Maximum number of candidate or voter subsets to evaluate.
    pub max_subsets: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_partitions: 1 << 22,
            max_subsets: 1 << 24,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub decision: bool,
    pub witness: Option<ControlWitness>,
    /// Number of actions evaluated.
    pub explored: u64,
    pub elapsed: Duration,
}

/// Decides `inst` with the default limits.
pub fn solve_exact(inst: &ControlInstance) -> Result<SolveReport> {
    solve_exact_with(inst, &SearchLimits::default())
}

/// Decides `inst`, refusing to start when the search space exceeds `limits`.
pub fn solve_exact_with(inst: &ControlInstance, limits: &SearchLimits) -> Result<SolveReport> {
    inst.validate()?;
    let start = Instant::now();
    let n = inst.election().num_candidates();
    if n > MAX_CANDIDATES {
        return Err(Error::InstanceTooLarge {
            what: "candidates",
            required: n as u128,
            limit: MAX_CANDIDATES as u64,
        });
    }
    let mut solver = Solver {
        inst,
        explored: 0,
    };
    let witness = match inst.ctype().action() {
        Action::AddCandidatesUnlimited | Action::AddCandidatesLimited => {
            solver.add_candidates(limits)?
        }
        Action::DeleteCandidates => solver.delete_candidates(limits)?,
        Action::PartitionCandidates => solver.partition_candidates(false, limits)?,
        Action::RunoffPartitionCandidates => solver.partition_candidates(true, limits)?,
        Action::AddVoters => solver.add_voters(limits)?,
        Action::DeleteVoters => solver.delete_voters(limits)?,
        Action::PartitionVoters => solver.partition_voters(limits)?,
    };
    if let Some(witness) = &witness {
        let replay = apply_witness(inst, witness)?;
        if !goal_met(&replay, inst.target(), inst.ctype().mode()) {
            return Err(Error::Internal(format!(
                "exhaustive search produced a witness that fails on replay: {witness:?}"
            )));
        }
    }
    Ok(SolveReport {
        decision: witness.is_some(),
        witness,
        explored: solver.explored,
        elapsed: start.elapsed(),
    })
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(u128::from(n - i)) {
            Some(v) => v / u128::from(i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of subsets of an `n`-set with at most `k` elements.
pub fn bounded_subset_count(n: usize, k: usize) -> u128 {
    (0..=k.min(n)).fold(0u128, |acc, j| {
        acc.saturating_add(binomial(n as u64, j as u64))
    })
}

/// Every subset of `0..n` with at most `k` elements, by size and then
/// lexicographically.
pub fn enumerate_bounded_subsets(n: usize, k: usize) -> BoundedSubsets {
    BoundedSubsets {
        n,
        k: k.min(n),
        current: None,
    }
}

pub struct BoundedSubsets {
    n: usize,
    k: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for BoundedSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let next = match self.current.take() {
            None => Vec::new(),
            Some(mut comb) => {
                let s = comb.len();
                match (0..s).rev().find(|&i| comb[i] < self.n - s + i) {
                    Some(i) => {
                        comb[i] += 1;
                        for j in i + 1..s {
                            comb[j] = comb[j - 1] + 1;
                        }
                        comb
                    }
                    None if s < self.k => (0..s + 1).collect(),
                    None => {
                        self.current = Some(comb);
                        return None;
                    }
                }
            }
        };
        self.current = Some(next.clone());
        Some(next)
    }
}

/// Every unordered 2-partition of `0..n` as a side indicator (`true` for the
/// second part). Element 0 always stays in the first part.
pub fn enumerate_bipartitions(n: usize, limit: u64) -> Result<Bipartitions> {
    Bipartitions::new(n, n.saturating_sub(1), limit)
}

/// Every ordered 2-partition of `0..n`, for problems where the two parts
/// play different roles.
pub fn enumerate_ordered_bipartitions(n: usize, limit: u64) -> Result<Bipartitions> {
    Bipartitions::new(n, n, limit)
}

pub struct Bipartitions {
    n: usize,
    shift: usize,
    next: u64,
    end: u64,
}

impl Bipartitions {
    fn new(n: usize, free: usize, limit: u64) -> Result<Self> {
        let total = if free >= 127 { u128::MAX } else { 1u128 << free };
        if total > u128::from(limit) {
            return Err(Error::InstanceTooLarge {
                what: "candidate partitions",
                required: total,
                limit,
            });
        }
        Ok(Bipartitions {
            n,
            shift: n - free,
            next: 0,
            end: total as u64,
        })
    }
}

impl Iterator for Bipartitions {
    type Item = Vec<bool>;

    fn next(&mut self) -> Option<Vec<bool>> {
        if self.next >= self.end {
            return None;
        }
        let mask = self.next;
        self.next += 1;
        Some(
            (0..self.n)
                .map(|i| i >= self.shift && mask >> (i - self.shift) & 1 == 1)
                .collect(),
        )
    }
}

/// Interchangeable voters merged into groups that keep first-occurrence
/// order and remember which original ballots they came from. Voters with
/// identical rankings are always merged. With symmetry enabled, single
/// voters whose rankings agree except on candidates nobody else ranks are
/// merged as well, since relabeling those candidates maps any selection to
/// an equally effective one.
struct VoterGroups<'b> {
    ballots: &'b [Ballot],
    sources: Vec<Vec<(usize, u32)>>,
    caps: Vec<u32>,
}

impl<'b> VoterGroups<'b> {
    fn new(ballots: &'b [Ballot]) -> Self {
        Self::build(ballots, None)
    }

    /// `context` lists every ballot that can take part in an election,
    /// `target` is the candidate whose status is being decided.
    fn with_symmetry(ballots: &'b [Ballot], context: &[&[Ballot]], target: usize, n: usize) -> Self {
        let mut voters = vec![0u64; n];
        for b in context.iter().flat_map(|set| set.iter()) {
            for &c in b.ranking() {
                voters[c] += u64::from(b.multiplicity());
            }
        }
        let private: Vec<bool> = (0..n).map(|c| c != target && voters[c] == 1).collect();
        Self::build(ballots, Some(&private))
    }

    fn build(ballots: &'b [Ballot], private: Option<&[bool]>) -> Self {
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut groups = VoterGroups {
            ballots,
            sources: Vec::new(),
            caps: Vec::new(),
        };
        for (i, b) in ballots.iter().enumerate() {
            let key: Vec<usize> = match private {
                Some(private) => b
                    .ranking()
                    .iter()
                    .map(|&c| if private[c] { usize::MAX } else { c })
                    .collect(),
                None => b.ranking().to_vec(),
            };
            let g = *index.entry(key).or_insert_with(|| {
                groups.sources.push(Vec::new());
                groups.caps.push(0);
                groups.caps.len() - 1
            });
            groups.sources[g].push((i, b.multiplicity()));
            groups.caps[g] += b.multiplicity();
        }
        groups
    }

    fn len(&self) -> usize {
        self.caps.len()
    }

    /// Passes the rankings of voters `from..to` of group `g`, in fill
    /// order, with their weights.
    fn units(&self, g: usize, from: u32, to: u32, mut f: impl FnMut(&[usize], u64)) {
        let mut offset = 0;
        for &(i, mult) in &self.sources[g] {
            let lo = from.max(offset);
            let hi = to.min(offset + mult);
            if lo < hi {
                f(self.ballots[i].ranking(), u64::from(hi - lo));
            }
            offset += mult;
            if offset >= to {
                break;
            }
        }
    }

    /// Maps per-group counts back to original ballots, filling lower ballot
    /// indices first.
    fn expand(&self, counts: &[u32]) -> VoterSelection {
        let mut sel = VoterSelection::new();
        for (g, &count) in counts.iter().enumerate() {
            let mut left = count;
            for &(i, mult) in &self.sources[g] {
                let take = left.min(mult);
                sel.add(i, take);
                left -= take;
            }
        }
        sel
    }

    fn complement(&self, ballots: &[Ballot], sel: &VoterSelection) -> VoterSelection {
        VoterSelection::from_counts(
            ballots
                .iter()
                .enumerate()
                .map(|(i, b)| (i, b.multiplicity() - sel.count(i))),
        )
    }

    /// Number of count vectors with total at most `k`.
    fn bounded_count(&self, k: u64) -> u128 {
        let k = k as usize;
        let mut ways = vec![0u128; k + 1];
        ways[0] = 1;
        for &cap in &self.caps {
            let mut next = vec![0u128; k + 1];
            for (total, &w) in ways.iter().enumerate() {
                if w == 0 {
                    continue;
                }
                for c in 0..=(cap as usize).min(k - total) {
                    next[total + c] = next[total + c].saturating_add(w);
                }
            }
            ways = next;
        }
        ways.iter().fold(0u128, |a, &w| a.saturating_add(w))
    }

    /// Visits count vectors of total at most `k`, by total and then in
    /// lexicographic order of the selected voters' group indices.
    fn for_each_bounded<F>(&self, k: u64, mut f: F) -> Option<Vec<u32>>
    where
        F: FnMut(&[u32]) -> bool,
    {
        let total_cap: u64 = self.caps.iter().map(|&c| u64::from(c)).sum();
        let mut suffix = vec![0u64; self.len() + 1];
        for g in (0..self.len()).rev() {
            suffix[g] = suffix[g + 1] + u64::from(self.caps[g]);
        }
        let mut counts = vec![0u32; self.len()];
        for size in 0..=k.min(total_cap) {
            if let ControlFlow::Break(()) =
                self.fill(0, size, &suffix, &mut counts, &mut f)
            {
                return Some(counts);
            }
        }
        None
    }

    fn fill<F>(
        &self,
        g: usize,
        left: u64,
        suffix: &[u64],
        counts: &mut [u32],
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[u32]) -> bool,
    {
        if g == self.len() {
            return if f(counts) {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            };
        }
        let hi = left.min(u64::from(self.caps[g]));
        let lo = left.saturating_sub(suffix[g + 1]);
        for c in (lo..=hi).rev() {
            counts[g] = c as u32;
            self.fill(g + 1, left - c, suffix, counts, f)?;
        }
        counts[g] = 0;
        ControlFlow::Continue(())
    }
}

struct Solver<'a> {
    inst: &'a ControlInstance,
    explored: u64,
}

impl<'a> Solver<'a> {
    fn n(&self) -> usize {
        self.inst.election().num_candidates()
    }

    fn met(&self, result: &WinnerResult) -> bool {
        goal_met(result, self.inst.target(), self.inst.ctype().mode())
    }

    fn rankings(&self) -> Vec<(&'a [usize], u64)> {
        self.inst
            .election()
            .ballots()
            .iter()
            .map(|b| (b.ranking(), u64::from(b.multiplicity())))
            .collect()
    }

    fn check_subsets(&self, what: &'static str, required: u128, limits: &SearchLimits) -> Result<()> {
        if required > u128::from(limits.max_subsets) {
            return Err(Error::InstanceTooLarge {
                what,
                required,
                limit: limits.max_subsets,
            });
        }
        Ok(())
    }

    /// Winners among `members`, which must be sorted.
    fn winners(&self, members: &[usize], rankings: &[(&[usize], u64)]) -> WinnerResult {
        let mut allowed = vec![false; self.n()];
        for &c in members {
            allowed[c] = true;
        }
        tally::winners_among(self.n(), members, &allowed, rankings.iter().copied())
    }

    fn add_candidates(&mut self, limits: &SearchLimits) -> Result<Option<ControlWitness>> {
        let spoilers = self.inst.spoilers().to_vec();
        let k = match self.inst.budget() {
            Some(b) => (b as usize).min(spoilers.len()),
            None => spoilers.len(),
        };
        self.check_subsets("candidate subsets", bounded_subset_count(spoilers.len(), k), limits)?;
        let qualified = self.inst.qualified();
        let rankings = self.rankings();
        for pick in enumerate_bounded_subsets(spoilers.len(), k) {
            self.explored += 1;
            let added: Vec<usize> = pick.iter().map(|&i| spoilers[i]).collect();
            let mut members = qualified.clone();
            members.extend(&added);
            members.sort_unstable();
            if self.met(&self.winners(&members, &rankings)) {
                return Ok(Some(ControlWitness::AddedCandidates(added)));
            }
        }
        Ok(None)
    }

    fn delete_candidates(&mut self, limits: &SearchLimits) -> Result<Option<ControlWitness>> {
        let n = self.n();
        let target = self.inst.target();
        let deletable: Vec<usize> = (0..n).filter(|&c| c != target).collect();
        let k = (self.inst.budget().unwrap_or(0) as usize).min(deletable.len());
        self.check_subsets("candidate subsets", bounded_subset_count(deletable.len(), k), limits)?;
        let rankings = self.rankings();
        for pick in enumerate_bounded_subsets(deletable.len(), k) {
            self.explored += 1;
            let deleted: Vec<usize> = pick.iter().map(|&i| deletable[i]).collect();
            let members: Vec<usize> = (0..n).filter(|c| deleted.binary_search(c).is_err()).collect();
            if self.met(&self.winners(&members, &rankings)) {
                return Ok(Some(ControlWitness::DeletedCandidates(deleted)));
            }
        }
        Ok(None)
    }

    fn partition_candidates(
        &mut self,
        runoff: bool,
        limits: &SearchLimits,
    ) -> Result<Option<ControlWitness>> {
        let rule = self.inst.ctype().tie().unwrap_or(TieRule::TiesPromote);
        let rankings = self.rankings();
        // without a run-off the parts are not interchangeable
        let partitions = if runoff {
            enumerate_bipartitions(self.n(), limits.max_partitions)?
        } else {
            enumerate_ordered_bipartitions(self.n(), limits.max_partitions)?
        };
        for sides in partitions {
            self.explored += 1;
            let first: Vec<usize> = (0..sides.len()).filter(|&c| !sides[c]).collect();
            let second: Vec<usize> = (0..sides.len()).filter(|&c| sides[c]).collect();
            let mut finalists = rule.promoted(self.winners(&first, &rankings).winners);
            if runoff {
                finalists.extend(rule.promoted(self.winners(&second, &rankings).winners));
            } else {
                finalists.extend(&second);
            }
            finalists.sort_unstable();
            if self.met(&self.winners(&finalists, &rankings)) {
                return Ok(Some(ControlWitness::CandidatePartition { first, second }));
            }
        }
        Ok(None)
    }

    fn base_histogram(&self) -> LevelHistogram {
        let mut hist = LevelHistogram::new(self.n(), self.n());
        for b in self.inst.election().ballots() {
            hist.add(b.ranking().iter().copied(), u64::from(b.multiplicity()));
        }
        hist
    }

    fn add_voters(&mut self, limits: &SearchLimits) -> Result<Option<ControlWitness>> {
        let inst = self.inst;
        let groups = VoterGroups::with_symmetry(
            inst.pool(),
            &[inst.election().ballots(), inst.pool()],
            inst.target(),
            self.n(),
        );
        let k = self.inst.budget().unwrap_or(0);
        self.check_subsets("voter subsets", groups.bounded_count(k), limits)?;
        let base = self.base_histogram();
        let all: Vec<usize> = (0..self.n()).collect();
        let mut explored = 0;
        let hit = groups.for_each_bounded(k, |counts| {
            explored += 1;
            let mut hist = base.clone();
            for (g, &c) in counts.iter().enumerate() {
                groups.units(g, 0, c, |r, w| hist.add(r.iter().copied(), w));
            }
            self.met(&hist.decide(&all))
        });
        self.explored += explored;
        Ok(hit.map(|counts| ControlWitness::AddedVoters(groups.expand(&counts))))
    }

    fn delete_voters(&mut self, limits: &SearchLimits) -> Result<Option<ControlWitness>> {
        let ballots = self.inst.election().ballots();
        let groups = VoterGroups::with_symmetry(ballots, &[ballots], self.inst.target(), self.n());
        let k = self.inst.budget().unwrap_or(0);
        self.check_subsets("voter subsets", groups.bounded_count(k), limits)?;
        let base = self.base_histogram();
        let all: Vec<usize> = (0..self.n()).collect();
        let mut explored = 0;
        let hit = groups.for_each_bounded(k, |counts| {
            explored += 1;
            let mut hist = base.clone();
            for (g, &c) in counts.iter().enumerate() {
                groups.units(g, 0, c, |r, w| hist.remove(r.iter().copied(), w));
            }
            self.met(&hist.decide(&all))
        });
        self.explored += explored;
        Ok(hit.map(|counts| ControlWitness::DeletedVoters(groups.expand(&counts))))
    }

    fn partition_voters(&mut self, limits: &SearchLimits) -> Result<Option<ControlWitness>> {
        let e = self.inst.election();
        let n = self.n();
        let rule = self.inst.ctype().tie().unwrap_or(TieRule::TiesPromote);
        let rankings = self.rankings();
        let mut finals: HashMap<u128, bool> = HashMap::new();
        let target = Some(self.inst.target());
        let search = for_each_voter_split(e, target, limits.max_partitions, |w1, w2| {
            let mut finalists = rule.promoted(w1.winners.clone());
            finalists.extend(rule.promoted(w2.winners.clone()));
            let mask = finalists.iter().fold(0u128, |m, &c| m | 1u128 << c);
            *finals.entry(mask).or_insert_with(|| {
                let members: Vec<usize> = (0..n).filter(|&c| mask >> c & 1 == 1).collect();
                self.met(&self.winners(&members, &rankings))
            })
        })?;
        self.explored += search.explored;
        Ok(search
            .hit
            .map(|(first, second)| ControlWitness::VoterPartition { first, second }))
    }
}

/// Outcome of [`for_each_voter_split`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitSearch {
    /// The split on which the visitor stopped.
    pub hit: Option<(VoterSelection, VoterSelection)>,
    /// Number of splits visited.
    pub explored: u64,
}

fn split_groups(e: &Election, target: Option<usize>) -> VoterGroups<'_> {
    let ballots = e.ballots();
    match target {
        Some(t) => VoterGroups::with_symmetry(ballots, &[ballots], t, e.num_candidates()),
        None => VoterGroups::new(ballots),
    }
}

/// Number of unordered voter splits [`for_each_voter_split`] visits.
pub fn voter_split_count(e: &Election, target: Option<usize>) -> u128 {
    let groups = split_groups(e, target);
    let product = groups
        .caps
        .iter()
        .fold(1u128, |acc, &c| acc.saturating_mul(u128::from(c) + 1));
    let all_even = groups.caps.iter().all(|c| c % 2 == 0);
    product.saturating_add(u128::from(all_even)) / 2
}

/// Visits every unordered split of the voters of `e` into two parts and
/// passes the FV winners of both parts to `visit`, stopping as soon as it
/// returns `true`. Identical voters are interchangeable, so splits are
/// enumerated as per-group counts. With a `target`, voters that differ only
/// in candidates nobody else ranks are merged too; `visit` must then depend
/// on the winners only up to relabeling candidates other than the target.
pub fn for_each_voter_split<F>(
    e: &Election,
    target: Option<usize>,
    limit: u64,
    mut visit: F,
) -> Result<SplitSearch>
where
    F: FnMut(&WinnerResult, &WinnerResult) -> bool,
{
    let required = voter_split_count(e, target);
    if required > u128::from(limit) {
        return Err(Error::InstanceTooLarge {
            what: "voter partitions",
            required,
            limit,
        });
    }
    let ballots = e.ballots();
    let groups = split_groups(e, target);
    let n = e.num_candidates();
    let all: Vec<usize> = (0..n).collect();
    let mut first = LevelHistogram::new(n, n);
    let mut second = LevelHistogram::new(n, n);
    for b in ballots {
        second.add(b.ranking().iter().copied(), u64::from(b.multiplicity()));
    }
    let mut counts = vec![0u32; groups.len()];
    let mut explored = 0;
    loop {
        if is_canonical(&counts, &groups.caps) {
            explored += 1;
            if visit(&first.decide(&all), &second.decide(&all)) {
                let first = groups.expand(&counts);
                let second = groups.complement(ballots, &first);
                return Ok(SplitSearch {
                    hit: Some((first, second)),
                    explored,
                });
            }
        }
        // odometer step, last group fastest
        let mut g = groups.len();
        loop {
            if g == 0 {
                return Ok(SplitSearch { hit: None, explored });
            }
            g -= 1;
            if counts[g] < groups.caps[g] {
                groups.units(g, counts[g], counts[g] + 1, |r, w| {
                    first.add(r.iter().copied(), w);
                    second.remove(r.iter().copied(), w);
                });
                counts[g] += 1;
                break;
            }
            groups.units(g, 0, counts[g], |r, w| {
                first.remove(r.iter().copied(), w);
                second.add(r.iter().copied(), w);
            });
            counts[g] = 0;
        }
    }
}

/// A split is kept when it is lexicographically at least its mirror image.
fn is_canonical(counts: &[u32], caps: &[u32]) -> bool {
    for (&s, &m) in counts.iter().zip(caps) {
        let mirror = m - s;
        if s != mirror {
            return s > mirror;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{ControlType, Mode};
    use crate::test_util::{random_instance, ElectionShape};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e1() -> Election {
        Election::from_names(
            &["a", "b", "c", "d"],
            &[(3, &["a", "c"]), (2, &["b", "d", "c"]), (1, &["d", "a", "c"])],
        )
        .unwrap()
    }

    fn e2() -> Election {
        Election::from_names(
            &["a", "b", "c", "d"],
            &[
                (1, &["a", "c"]),
                (1, &["d", "c"]),
                (1, &["b", "a", "c"]),
                (1, &["b", "a"]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn subset_enumeration() {
        let subsets: Vec<_> = enumerate_bounded_subsets(3, 1).collect();
        assert_eq!(subsets, vec![vec![], vec![0], vec![1], vec![2]]);
        assert_eq!(enumerate_bounded_subsets(4, 4).count(), 16);
        assert_eq!(enumerate_bounded_subsets(20, 2).count(), 211);
        assert_eq!(bounded_subset_count(20, 2), 211);
        assert_eq!(enumerate_bounded_subsets(0, 3).count(), 1);
        let all: Vec<_> = enumerate_bounded_subsets(5, 3).collect();
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), all.len());
        assert_eq!(all.len() as u128, bounded_subset_count(5, 3));
    }

    #[test]
    fn bipartition_enumeration() {
        assert_eq!(enumerate_bipartitions(1, 100).unwrap().count(), 1);
        assert_eq!(enumerate_bipartitions(3, 100).unwrap().count(), 4);
        assert_eq!(enumerate_bipartitions(16, 1 << 22).unwrap().count(), 32768);
        assert!(enumerate_bipartitions(3, 100).unwrap().all(|s| !s[0]));
        assert_eq!(enumerate_ordered_bipartitions(3, 100).unwrap().count(), 8);
        assert_eq!(enumerate_ordered_bipartitions(0, 100).unwrap().count(), 1);
        assert!(matches!(
            enumerate_bipartitions(30, 1 << 22),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn bounded_vector_count_matches_enumeration() {
        let ballots = vec![
            Ballot::new(vec![0], 2),
            Ballot::new(vec![1], 1),
            Ballot::new(vec![0], 1),
            Ballot::new(vec![2, 1], 3),
        ];
        let groups = VoterGroups::new(&ballots);
        assert_eq!(groups.caps, vec![3, 1, 3]);
        for k in 0..9 {
            let mut seen = 0u128;
            groups.for_each_bounded(k, |_| {
                seen += 1;
                false
            });
            assert_eq!(seen, groups.bounded_count(k), "k={k}");
        }
        let sel = groups.expand(&[2, 0, 1]);
        assert_eq!(sel.iter().collect::<Vec<_>>(), vec![(0, 2), (3, 1)]);
    }

    #[test]
    fn voter_partition_keeps_a_out_of_final() {
        let ct = ControlType::new(
            Action::PartitionVoters,
            Mode::Destructive,
            Some(TieRule::TiesEliminate),
        )
        .unwrap();
        let report = solve_exact(&ControlInstance::new(ct, e2(), 0)).unwrap();
        assert!(report.decision);
    }

    #[test]
    fn deleting_b_from_e1() {
        let ct = ControlType::new(Action::DeleteCandidates, Mode::Constructive, None).unwrap();
        let inst = ControlInstance::new(ct, e1(), 2).with_budget(1);
        let report = solve_exact(&inst).unwrap();
        // deleting a also works and comes first
        assert_eq!(report.witness, Some(ControlWitness::DeletedCandidates(vec![0])));
        let delete_b = apply_witness(&inst, &ControlWitness::DeletedCandidates(vec![1])).unwrap();
        assert!(delete_b.is_unique_winner(2));
    }

    #[test]
    fn nothing_to_do() {
        let ct = ControlType::new(Action::DeleteVoters, Mode::Constructive, None).unwrap();
        let report = solve_exact(&ControlInstance::new(ct, e1(), 0).with_budget(0)).unwrap();
        assert_eq!(
            report.witness,
            Some(ControlWitness::DeletedVoters(VoterSelection::new()))
        );
        assert_eq!(report.explored, 1);
    }

    #[test]
    fn limits_are_enforced() {
        let ct = ControlType::new(Action::RunoffPartitionCandidates, Mode::Constructive, Some(TieRule::TiesPromote)).unwrap();
        let limits = SearchLimits {
            max_partitions: 4,
            max_subsets: 4,
        };
        let err = solve_exact_with(&ControlInstance::new(ct, e1(), 2), &limits).unwrap_err();
        assert_eq!(
            err,
            Error::InstanceTooLarge {
                what: "candidate partitions",
                required: 8,
                limit: 4
            }
        );
    }

    /// Second enumerator: raw ballots, no group merging, reverse order,
    /// evaluated with the reference implementation.
    fn reverse_oracle(inst: &ControlInstance) -> bool {
        let e = inst.election();
        let n = e.num_candidates();
        let met = |w: &ControlWitness| goal_met(&apply_witness(inst, w).unwrap(), inst.target(), inst.ctype().mode());
        let budget = inst.budget().unwrap_or(u64::MAX);
        let subsets_rev = |items: &[usize], k: u64| -> Vec<Vec<usize>> {
            let mut out: Vec<Vec<usize>> = (0u32..1 << items.len())
                .rev()
                .filter(|m| u64::from(m.count_ones()) <= k)
                .map(|m| (0..items.len()).filter(|i| m >> i & 1 == 1).map(|i| items[i]).collect())
                .collect();
            out.dedup();
            out
        };
        let voters = |ballots: &[Ballot]| -> Vec<usize> {
            ballots
                .iter()
                .enumerate()
                .flat_map(|(i, b)| std::iter::repeat_n(i, b.multiplicity() as usize))
                .collect()
        };
        let select = |picked: &[usize]| VoterSelection::from_counts(picked.iter().map(|&i| (i, 1)));
        match inst.ctype().action() {
            Action::AddCandidatesUnlimited | Action::AddCandidatesLimited => {
                subsets_rev(inst.spoilers(), budget).into_iter().any(|s| met(&ControlWitness::AddedCandidates(s)))
            }
            Action::DeleteCandidates => {
                let deletable: Vec<usize> = (0..n).filter(|&c| c != inst.target()).collect();
                subsets_rev(&deletable, budget).into_iter().any(|s| met(&ControlWitness::DeletedCandidates(s)))
            }
            Action::PartitionCandidates | Action::RunoffPartitionCandidates => {
                let all: Vec<usize> = (0..n).collect();
                subsets_rev(&all, u64::MAX).into_iter().any(|first| {
                    let second = (0..n).filter(|c| !first.contains(c)).collect();
                    met(&ControlWitness::CandidatePartition { first, second })
                })
            }
            Action::AddVoters => subsets_rev(&voters(inst.pool()), budget)
                .into_iter()
                .any(|s| met(&ControlWitness::AddedVoters(select(&s)))),
            Action::DeleteVoters => subsets_rev(&voters(e.ballots()), budget)
                .into_iter()
                .any(|s| met(&ControlWitness::DeletedVoters(select(&s)))),
            Action::PartitionVoters => {
                let all = voters(e.ballots());
                (0u32..1 << all.len()).rev().any(|m| {
                    let (a, b): (Vec<usize>, Vec<usize>) =
                        (0..all.len()).partition(|&i| m >> i & 1 == 1);
                    let a: Vec<usize> = a.iter().map(|&i| all[i]).collect();
                    let b: Vec<usize> = b.iter().map(|&i| all[i]).collect();
                    met(&ControlWitness::VoterPartition {
                        first: select(&a),
                        second: select(&b),
                    })
                })
            }
        }
    }

    #[test]
    fn agrees_with_reverse_enumerator_on_small_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let shape = ElectionShape {
            max_candidates: 4,
            max_voters: 5,
            max_pool: 4,
            max_budget: 3,
        };
        for ctype in ControlType::all() {
            for _ in 0..40 {
                let inst = random_instance(&mut rng, ctype, &shape);
                let report = solve_exact(&inst).unwrap();
                assert_eq!(report.decision, reverse_oracle(&inst), "{ctype} {inst:?}");
            }
        }
    }

    #[test]
    fn merging_private_voters_keeps_split_answers() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xd1ce);
        let mut merged_any = false;
        for _ in 0..300 {
            let n = rng.gen_range(2..=6);
            let voters = rng.gen_range(1..=7);
            let e = crate::test_util::random_election(&mut rng, n, voters);
            for t in 0..n {
                let plain = for_each_voter_split(&e, None, u64::MAX, |a, b| {
                    !a.winners.contains(&t) && !b.winners.contains(&t)
                })
                .unwrap();
                let merged = for_each_voter_split(&e, Some(t), u64::MAX, |a, b| {
                    !a.winners.contains(&t) && !b.winners.contains(&t)
                })
                .unwrap();
                assert_eq!(plain.hit.is_some(), merged.hit.is_some(), "{e:?} target {t}");
                merged_any |= merged.explored < plain.explored;
            }
        }
        assert!(merged_any);
    }

    #[test]
    fn adding_voters_is_monotone_in_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let shape = ElectionShape {
            max_candidates: 5,
            max_voters: 6,
            max_pool: 6,
            max_budget: 4,
        };
        let ctype = ControlType::new(Action::AddVoters, Mode::Constructive, None).unwrap();
        for _ in 0..200 {
            let inst = random_instance(&mut rng, ctype, &shape);
            if solve_exact(&inst).unwrap().decision {
                let k = inst.budget().unwrap();
                let wider = inst.clone().with_budget(k + 1);
                assert!(solve_exact(&wider).unwrap().decision);
            }
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let shape = ElectionShape {
            max_candidates: 5,
            max_voters: 6,
            max_pool: 4,
            max_budget: 3,
        };
        for ctype in ControlType::all() {
            let inst = random_instance(&mut rng, ctype, &shape);
            let a = solve_exact(&inst).unwrap();
            let b = solve_exact(&inst).unwrap();
            assert_eq!((a.decision, a.witness, a.explored), (b.decision, b.witness, b.explored));
        }
    }
}
