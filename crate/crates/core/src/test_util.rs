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

//! Random instance generators shared by unit tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::control::{Action, ControlInstance, ControlType};
use crate::election::{Ballot, CandidateId, Election};

pub(crate) struct ElectionShape {
    pub max_candidates: usize,
    pub max_voters: usize,
    pub max_pool: usize,
    pub max_budget: u64,
}

pub(crate) fn random_ranking<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let len = rng.gen_range(0..=n);
    order.truncate(len);
    order
}

/// Ballot groups with `voters` voters in total; about a third of the groups
/// hold two voters.
pub(crate) fn random_ballots<R: Rng>(rng: &mut R, n: usize, voters: usize) -> Vec<Ballot> {
    let mut out = Vec::new();
    let mut left = voters;
    while left > 0 {
        let mult = if left >= 2 && rng.gen_bool(0.3) { 2 } else { 1 };
        out.push(Ballot::new(random_ranking(rng, n), mult as u32));
        left -= mult;
    }
    out
}

pub(crate) fn random_election<R: Rng>(rng: &mut R, n: usize, voters: usize) -> Election {
    let names = (0..n)
        .map(|i| CandidateId::new(format!("c{i}")).unwrap())
        .collect();
    Election::new(names, random_ballots(rng, n, voters)).unwrap()
}

pub(crate) fn random_instance<R: Rng>(
    rng: &mut R,
    ctype: ControlType,
    shape: &ElectionShape,
) -> ControlInstance {
    let n = rng.gen_range(1..=shape.max_candidates);
    let voters = rng.gen_range(0..=shape.max_voters);
    let e = random_election(rng, n, voters);
    let target = rng.gen_range(0..n);
    let mut inst = ControlInstance::new(ctype, e, target);
    let action = ctype.action();
    if action.adds_candidates() {
        let spoilers = (0..n).filter(|&c| c != target && rng.gen_bool(0.5)).collect();
        inst = inst.with_spoilers(spoilers);
    }
    if action == Action::AddVoters {
        let size = rng.gen_range(0..=shape.max_pool);
        inst = inst.with_pool(random_ballots(rng, n, size));
    }
    if action.needs_budget() {
        inst = inst.with_budget(rng.gen_range(0..=shape.max_budget));
    }
    inst
}
