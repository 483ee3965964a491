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

//! Polynomial-time destructive control by adding or deleting voters.
//!
//! Both algorithms run one majority stage per level and then an approval
//! stage. In majority stage `i` a rival `d` tries to reach a strict majority
//! on level `i` with at least the target's level-`i` score while the target
//! has no majority on level `i - 1`; in the approval stage `d` tries to catch
//! up with the target's approval score while the target has no majority at
//! all. The target is not the unique winner exactly when one of these
//! succeeds for some rival.
//!
//! With [`StageSearch::Exhaustive`] every stage sorts the voters into
//! classes by whom they approve within the level and tries every useful
//! number of voters from the ambiguous classes, which makes the decision
//! exact. [`StageSearch::Literal`] follows the greedy stage checks step by
//! step; it can miss successful actions and is kept for comparison.

use std::cmp::Reverse;

use serde::Serialize;

use crate::control::{
    apply_witness, goal_met, Action, ControlInstance, ControlType, ControlWitness, Mode,
    VoterSelection,
};
use crate::election::{majority_threshold, Ballot, Election};
use crate::error::{Error, Result};

/// Missing votes for a strict majority: `maj(V) - score^level(candidate)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Deficit {
    pub candidate: usize,
    pub level: usize,
    pub value: i64,
}

impl Deficit {
    pub fn of(e: &Election, candidate: usize, level: usize) -> Result<Deficit> {
        let score = e.level_score(candidate, level)?;
        Ok(Deficit {
            candidate,
            level,
            value: majority_threshold(e.voter_count()) as i64 - score as i64,
        })
    }

    /// The candidate already holds a strict majority on this level.
    pub fn is_met(&self) -> bool {
        self.value <= 0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StageSearch {
    #[default]
    Exhaustive,
    Literal,
}

/// Where the algorithm stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Stage {
    /// The target was not the unique winner to begin with.
    AlreadyDethroned,
    Majority { level: usize, rival: usize },
    Approval { rival: usize },
    /// No stage succeeded.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyReport {
    /// The voters to add (pool indices) or delete (ballot indices); `None`
    /// when control is impossible.
    pub witness: Option<VoterSelection>,
    pub stage: Stage,
    /// Number of score comparisons performed.
    pub evaluations: u64,
}

/// Destructive control by adding at most `limit` voters from `pool`.
pub fn destructive_add_voters(
    e: &Election,
    pool: &[Ballot],
    target: usize,
    limit: u64,
) -> Result<PolyReport> {
    destructive_add_voters_with(e, pool, target, limit, StageSearch::Exhaustive)
}

/// Destructive control by deleting at most `limit` voters.
pub fn destructive_delete_voters(e: &Election, target: usize, limit: u64) -> Result<PolyReport> {
    destructive_delete_voters_with(e, target, limit, StageSearch::Exhaustive)
}

pub fn destructive_add_voters_with(
    e: &Election,
    pool: &[Ballot],
    target: usize,
    limit: u64,
    search: StageSearch,
) -> Result<PolyReport> {
    let ctype = ControlType::new(Action::AddVoters, Mode::Destructive, None)?;
    let inst = ControlInstance::new(ctype, e.clone(), target)
        .with_budget(limit)
        .with_pool(pool.to_vec());
    inst.validate()?;
    let mut run = Run::new(e, pool, target, limit);
    let found = if !e.fallback_winners()?.is_unique_winner(target) {
        Some((VoterSelection::new(), Stage::AlreadyDethroned))
    } else {
        match search {
            StageSearch::Exhaustive => run.add_exhaustive(),
            StageSearch::Literal => run.add_literal(),
        }
    };
    run.finish(&inst, found, ControlWitness::AddedVoters)
}

pub fn destructive_delete_voters_with(
    e: &Election,
    target: usize,
    limit: u64,
    search: StageSearch,
) -> Result<PolyReport> {
    let ctype = ControlType::new(Action::DeleteVoters, Mode::Destructive, None)?;
    let inst = ControlInstance::new(ctype, e.clone(), target).with_budget(limit);
    inst.validate()?;
    let mut run = Run::new(e, e.ballots(), target, limit);
    let found = if !e.fallback_winners()?.is_unique_winner(target) {
        Some((VoterSelection::new(), Stage::AlreadyDethroned))
    } else {
        match search {
            StageSearch::Exhaustive => run.delete_exhaustive(),
            StageSearch::Literal => run.delete_literal(),
        }
    };
    run.finish(&inst, found, ControlWitness::DeletedVoters)
}

/// A class of voters in the order they are picked from.
#[derive(Default)]
struct Class {
    members: Vec<(usize, u32)>,
    size: u64,
}

impl Class {
    fn push(&mut self, index: usize, count: u32) {
        self.members.push((index, count));
        self.size += u64::from(count);
    }

    fn sorted_by_key<K: Ord>(mut self, key: impl Fn(usize) -> K) -> Class {
        self.members.sort_by_key(|&(i, _)| (key(i), i));
        self
    }

    /// Adds the first `count` voters of the class to `sel`.
    fn take_into(&self, mut count: u64, sel: &mut VoterSelection) {
        for &(i, mult) in &self.members {
            if count == 0 {
                break;
            }
            let take = count.min(u64::from(mult));
            sel.add(i, take as u32);
            count -= take;
        }
    }
}

/// Voters grouped by approval of the rival within `i`, the target within
/// `i` and the target within `i - 1`.
struct Classes {
    rival_only: Class,
    both_late: Class,
    both_early: Class,
    target_late: Class,
    target_early: Class,
    neither: Class,
}

struct Run<'a> {
    e: &'a Election,
    /// Pool when adding, registered ballots when deleting.
    voters: &'a [Ballot],
    target: usize,
    limit: u64,
    levels: usize,
    evaluations: u64,
}

impl<'a> Run<'a> {
    fn new(e: &'a Election, voters: &'a [Ballot], target: usize, limit: u64) -> Self {
        let available: u64 = voters.iter().map(|b| u64::from(b.multiplicity())).sum();
        let levels = e
            .ballots()
            .iter()
            .chain(voters)
            .map(|b| b.ranking().len())
            .max()
            .unwrap_or(0);
        Run {
            e,
            voters,
            target,
            limit: limit.min(available),
            levels,
            evaluations: 0,
        }
    }

    fn finish(
        self,
        inst: &ControlInstance,
        found: Option<(VoterSelection, Stage)>,
        wrap: fn(VoterSelection) -> ControlWitness,
    ) -> Result<PolyReport> {
        match found {
            Some((sel, stage)) => {
                let witness = wrap(sel.clone());
                let result = apply_witness(inst, &witness)?;
                if !goal_met(&result, self.target, Mode::Destructive) {
                    return Err(Error::Internal(format!(
                        "stage {stage:?} produced {witness:?}, which leaves the target the unique winner of {inst:?}"
                    )));
                }
                Ok(PolyReport {
                    witness: Some(sel),
                    stage,
                    evaluations: self.evaluations,
                })
            }
            None => Ok(PolyReport {
                witness: None,
                stage: Stage::Exhausted,
                evaluations: self.evaluations,
            }),
        }
    }

    fn score(&self, c: usize, level: usize) -> u64 {
        if level == 0 {
            0
        } else {
            self.e.level_score(c, level).expect("valid candidate and level")
        }
    }

    fn approval(&self, c: usize) -> u64 {
        self.e.approval_score(c).expect("valid candidate")
    }

    fn rivals(&self) -> impl Iterator<Item = usize> {
        let target = self.target;
        (0..self.e.num_candidates()).filter(move |&d| d != target)
    }

    fn classify(&self, d: usize, i: usize) -> Classes {
        let c = self.target;
        let mut classes = Classes {
            rival_only: Class::default(),
            both_late: Class::default(),
            both_early: Class::default(),
            target_late: Class::default(),
            target_early: Class::default(),
            neither: Class::default(),
        };
        for (index, b) in self.voters.iter().enumerate() {
            let m = b.multiplicity();
            let rival = b.approves_within(d, i);
            let late = b.approves_within(c, i);
            let early = b.approves_within(c, i - 1);
            match (rival, late, early) {
                (true, false, _) => classes.rival_only.push(index, m),
                (true, true, false) => classes.both_late.push(index, m),
                (true, true, true) => classes.both_early.push(index, m),
                (false, true, false) => classes.target_late.push(index, m),
                (false, true, true) => classes.target_early.push(index, m),
                (false, false, _) => classes.neither.push(index, m),
            }
        }
        classes
    }

    fn position(&self, index: usize) -> usize {
        self.voters[index]
            .position_of(self.target)
            .unwrap_or(usize::MAX)
    }

    // ----- adding voters -----

    fn add_exhaustive(&mut self) -> Option<(VoterSelection, Stage)> {
        let c = self.target;
        let n = self.e.voter_count();
        for i in 1..=self.levels {
            let sc = self.score(c, i);
            let pc = self.score(c, i - 1);
            for d in self.rivals() {
                let sd = self.score(d, i);
                let k = self.classify(d, i);
                let x = self.limit.min(k.rival_only.size);
                let rest = self.limit - x;
                // voters approving both: those ranking the target later first
                let both = k.both_late.size + k.both_early.size;
                let neutral = k.neither.size + k.target_late.size;
                for alpha in 0..=rest.min(both) {
                    let early = alpha.saturating_sub(k.both_late.size);
                    for beta in 0..=(rest - alpha).min(neutral) {
                        self.evaluations += 1;
                        let raised = beta.saturating_sub(k.neither.size);
                        let maj = majority_threshold(n + x + alpha + beta);
                        let dv = sd + x + alpha;
                        let cv = sc + alpha + raised;
                        let pv = pc + early;
                        if dv >= maj && dv >= cv && pv < maj {
                            let mut sel = VoterSelection::new();
                            k.rival_only.take_into(x, &mut sel);
                            let late = alpha.min(k.both_late.size);
                            k.both_late
                                .sorted_by_key(|v| Reverse(self.position(v)))
                                .take_into(late, &mut sel);
                            k.both_early
                                .sorted_by_key(|v| Reverse(self.position(v)))
                                .take_into(early, &mut sel);
                            k.neither.take_into(beta - raised, &mut sel);
                            k.target_late.take_into(raised, &mut sel);
                            return Some((sel, Stage::Majority { level: i, rival: d }));
                        }
                    }
                }
            }
        }
        let sc = self.approval(c);
        for d in self.rivals() {
            self.evaluations += 1;
            let (gain, neither) = self.approval_classes_add(d);
            let x = self.limit.min(gain.size);
            let y = (self.limit - x).min(neither.size);
            let maj = majority_threshold(n + x + y);
            if sc < maj && self.approval(d) + x >= sc {
                let mut sel = VoterSelection::new();
                gain.take_into(x, &mut sel);
                neither.take_into(y, &mut sel);
                return Some((sel, Stage::Approval { rival: d }));
            }
        }
        None
    }

    /// Voters approving `d` but not the target, and voters approving
    /// neither.
    fn approval_classes_add(&self, d: usize) -> (Class, Class) {
        let mut gain = Class::default();
        let mut neither = Class::default();
        for (index, b) in self.voters.iter().enumerate() {
            match (b.approves(d), b.approves(self.target)) {
                (true, false) => gain.push(index, b.multiplicity()),
                (false, false) => neither.push(index, b.multiplicity()),
                _ => {}
            }
        }
        (gain, neither)
    }

    fn add_literal(&mut self) -> Option<(VoterSelection, Stage)> {
        let c = self.target;
        let n = self.e.voter_count();
        let l = self.limit;
        let maj_v = majority_threshold(n);
        for i in 1..=self.levels {
            for d in self.rivals() {
                self.evaluations += 1;
                let sd = self.score(d, i);
                let sc = self.score(c, i);
                let deficit = maj_v as i64 - sd as i64;
                if 2 * deficit > l as i64 || sd + l < sc {
                    continue;
                }
                let k = self.classify(d, i);
                let x = l.min(k.rival_only.size);
                let dv = sd + x;
                if dv < sc {
                    continue;
                }
                let maj = majority_threshold(n + x);
                let mut sel = VoterSelection::new();
                k.rival_only.take_into(x, &mut sel);
                let has_majority = dv >= maj;
                if i == 1 {
                    if has_majority {
                        return Some((sel, Stage::Majority { level: i, rival: d }));
                    }
                    continue;
                }
                let pc = self.score(c, i - 1);
                if has_majority && pc < maj {
                    return Some((sel, Stage::Majority { level: i, rival: d }));
                }
                let both = k
                    .both_late
                    .sorted_by_key(|v| Reverse(self.position(v)));
                let both_early = k
                    .both_early
                    .sorted_by_key(|v| Reverse(self.position(v)));
                let y = (l - x).min(both.size + both_early.size);
                let early = y.saturating_sub(both.size);
                if pc + early >= majority_threshold(n + x + y) {
                    continue;
                }
                if y as i64 >= maj as i64 - dv as i64 {
                    both.take_into(y.min(both.size), &mut sel);
                    both_early.take_into(early, &mut sel);
                    return Some((sel, Stage::Majority { level: i, rival: d }));
                }
            }
        }
        let sc = self.approval(c);
        if sc >= majority_threshold(n + l) {
            return None;
        }
        for d in self.rivals() {
            self.evaluations += 1;
            let (gain, neither) = self.approval_classes_add(d);
            let need = sc.saturating_sub(self.approval(d));
            if need > l || gain.size < need {
                continue;
            }
            let mut sel = VoterSelection::new();
            gain.take_into(need, &mut sel);
            let size = n + need;
            if sc < majority_threshold(size) {
                return Some((sel, Stage::Approval { rival: d }));
            }
            let pad = 2 * sc - size;
            if l - need >= pad && neither.size >= pad {
                neither.take_into(pad, &mut sel);
                return Some((sel, Stage::Approval { rival: d }));
            }
        }
        None
    }

    // ----- deleting voters -----

    fn delete_exhaustive(&mut self) -> Option<(VoterSelection, Stage)> {
        let c = self.target;
        let n = self.e.voter_count();
        for i in 1..=self.levels {
            let sc = self.score(c, i);
            let pc = self.score(c, i - 1);
            for d in self.rivals() {
                let sd = self.score(d, i);
                let k = self.classify(d, i);
                let x = self.limit.min(k.target_early.size);
                let rest = self.limit - x;
                let both = k.both_early.size;
                let neutral = k.target_late.size + k.neither.size;
                for alpha in 0..=rest.min(both) {
                    for beta in 0..=(rest - alpha).min(neutral) {
                        self.evaluations += 1;
                        let lowered = beta.min(k.target_late.size);
                        let maj = majority_threshold(n - x - alpha - beta);
                        let dv = sd - alpha;
                        let cv = sc - x - alpha - lowered;
                        let pv = pc - x - alpha;
                        if dv >= maj && dv >= cv && pv < maj {
                            let mut sel = VoterSelection::new();
                            k.target_early.take_into(x, &mut sel);
                            k.both_early
                                .sorted_by_key(|v| self.position(v))
                                .take_into(alpha, &mut sel);
                            k.target_late.take_into(lowered, &mut sel);
                            k.neither.take_into(beta - lowered, &mut sel);
                            return Some((sel, Stage::Majority { level: i, rival: d }));
                        }
                    }
                }
            }
        }
        let sc = self.approval(c);
        for d in self.rivals() {
            self.evaluations += 1;
            let (loss, both) = self.approval_classes_delete(d);
            let x = self.limit.min(loss.size);
            let y = (self.limit - x).min(both.size);
            let maj = majority_threshold(n - x - y);
            let cv = sc - x - y;
            if cv < maj && self.approval(d) - y >= cv {
                let mut sel = VoterSelection::new();
                loss.take_into(x, &mut sel);
                both.take_into(y, &mut sel);
                return Some((sel, Stage::Approval { rival: d }));
            }
        }
        None
    }

    /// Voters approving the target but not `d`, and voters approving both.
    fn approval_classes_delete(&self, d: usize) -> (Class, Class) {
        let mut loss = Class::default();
        let mut both = Class::default();
        for (index, b) in self.voters.iter().enumerate() {
            match (b.approves(self.target), b.approves(d)) {
                (true, false) => loss.push(index, b.multiplicity()),
                (true, true) => both.push(index, b.multiplicity()),
                _ => {}
            }
        }
        (loss, both)
    }

    fn delete_literal(&mut self) -> Option<(VoterSelection, Stage)> {
        let c = self.target;
        let n = self.e.voter_count();
        let l = self.limit;
        let maj_v = majority_threshold(n);
        for i in 1..=self.levels {
            for d in self.rivals() {
                self.evaluations += 1;
                let sd = self.score(d, i);
                let sc = self.score(c, i);
                let deficit = maj_v as i64 - sd as i64;
                if 2 * deficit > l as i64 || sd + l < sc {
                    continue;
                }
                let k = self.classify(d, i);
                // voters approving the target but not d, earliest target first
                let mut loss = Class::default();
                for (index, m) in k.target_early.members.iter().chain(&k.target_late.members) {
                    loss.push(*index, *m);
                }
                let loss = loss.sorted_by_key(|v| self.position(v));
                let x = l.min(loss.size);
                let cv = sc - x;
                if sd < cv {
                    continue;
                }
                let mut sel = VoterSelection::new();
                loss.take_into(x, &mut sel);
                let early_removed = x.min(k.target_early.size);
                let mut size = n - x;
                let mut pc = self.score(c, i - 1) - early_removed;
                let mut dv = sd;
                if dv < majority_threshold(size) {
                    continue;
                }
                if i == 1 || pc < majority_threshold(size) {
                    return Some((sel, Stage::Majority { level: i, rival: d }));
                }
                let both = k.both_early.sorted_by_key(|v| self.position(v));
                let mut used = 0;
                while used < both.size && x + used < l && pc >= majority_threshold(size) {
                    used += 1;
                    size -= 1;
                    pc -= 1;
                    dv -= 1;
                }
                let maj = majority_threshold(size);
                if pc < maj && dv >= maj {
                    both.take_into(used, &mut sel);
                    return Some((sel, Stage::Majority { level: i, rival: d }));
                }
            }
        }
        let sc = self.approval(c);
        for d in self.rivals() {
            self.evaluations += 1;
            let (loss, both) = self.approval_classes_delete(d);
            let need = sc.saturating_sub(self.approval(d));
            if need > l || loss.size < need {
                continue;
            }
            let mut sel = VoterSelection::new();
            loss.take_into(need, &mut sel);
            let mut size = n - need;
            let mut cv = sc - need;
            let mut used = 0;
            while cv >= majority_threshold(size) && used < both.size && need + used < l {
                used += 1;
                size -= 1;
                cv -= 1;
            }
            if cv < majority_threshold(size) {
                both.take_into(used, &mut sel);
                return Some((sel, Stage::Approval { rival: d }));
            }
        }
        None
    }
}
