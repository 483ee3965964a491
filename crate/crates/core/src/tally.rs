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

//! Level-score histograms and the FV decision procedure on top of them.
//!
//! A histogram records, for every candidate and every ranking position, the
//! number of voters placing that candidate at that position. Level scores are
//! prefix sums over positions. Histograms support weighted insertion and
//! removal so the exhaustive solver can update them incrementally.

use crate::election::{majority_threshold, Resolution, WinnerResult};

#[derive(Clone, Debug)]
pub(crate) struct LevelHistogram {
    num_candidates: usize,
    levels: usize,
    counts: Vec<u64>,
    voters: u64,
}

impl LevelHistogram {
    pub(crate) fn new(num_candidates: usize, levels: usize) -> Self {
        Self {
            num_candidates,
            levels,
            counts: vec![0; num_candidates * levels],
            voters: 0,
        }
    }

    /// Adds `weight` voters casting `ranking`; positions beyond the histogram
    /// depth are ignored.
    pub(crate) fn add<I>(&mut self, ranking: I, weight: u64)
    where
        I: IntoIterator<Item = usize>,
    {
        self.voters += weight;
        for (pos, c) in ranking.into_iter().enumerate().take(self.levels) {
            self.counts[c * self.levels + pos] += weight;
        }
    }

    pub(crate) fn remove<I>(&mut self, ranking: I, weight: u64)
    where
        I: IntoIterator<Item = usize>,
    {
        self.voters -= weight;
        for (pos, c) in ranking.into_iter().enumerate().take(self.levels) {
            self.counts[c * self.levels + pos] -= weight;
        }
    }

    /// Applies FV winner determination to the candidates listed in
    /// `members` (ascending indices). An empty member list yields no winners.
    pub(crate) fn decide(&self, members: &[usize]) -> WinnerResult {
        if members.is_empty() {
            return WinnerResult::new(Vec::new(), Resolution::ApprovalFallback);
        }
        let threshold = majority_threshold(self.voters);
        let mut cumulative = vec![0u64; self.num_candidates];
        debug_assert!(self.levels >= members.len());
        let depth = members.len();
        for level in 0..depth {
            let mut best = 0;
            for &c in members {
                cumulative[c] += self.counts[c * self.levels + level];
                best = best.max(cumulative[c]);
            }
            if best >= threshold {
                return WinnerResult::new(
                    argmax(members, &cumulative, best),
                    Resolution::MajorityLevel(level + 1),
                );
            }
        }
        // Positions past `depth` cannot hold a member, so the cumulative
        // counts already equal approval scores.
        let best = members.iter().map(|&c| cumulative[c]).max().unwrap_or(0);
        WinnerResult::new(
            argmax(members, &cumulative, best),
            Resolution::ApprovalFallback,
        )
    }
}

fn argmax(members: &[usize], scores: &[u64], best: u64) -> Vec<usize> {
    members
        .iter()
        .copied()
        .filter(|&c| scores[c] == best)
        .collect()
}

/// Tallies weighted rankings restricted to `members` and decides the winners.
/// `members` must be sorted; `allowed` is its indicator vector.
pub(crate) fn winners_among<'a, I>(
    num_candidates: usize,
    members: &[usize],
    allowed: &[bool],
    rankings: I,
) -> WinnerResult
where
    I: IntoIterator<Item = (&'a [usize], u64)>,
{
    let mut hist = LevelHistogram::new(num_candidates, members.len());
    for (ranking, weight) in rankings {
        if weight == 0 {
            continue;
        }
        hist.add(ranking.iter().copied().filter(|&c| allowed[c]), weight);
    }
    hist.decide(members)
}
