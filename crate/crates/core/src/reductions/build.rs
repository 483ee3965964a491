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

//! Election constructions. Candidates are declared in a fixed order and a
//! set inside a ballot is ranked in that order.

use crate::control::{Action, ControlInstance, ControlType, Mode, TieRule};
use crate::election::{Ballot, CandidateId, Election};
use crate::error::{Error, Result};

use super::{
    Bookkeeping, Construction, ConstructionOutput, HittingSetInstance, LabeledInstance, Source,
    X3cInstance,
};

struct Builder {
    names: Vec<String>,
    ballots: Vec<Ballot>,
    pool: Vec<Ballot>,
    groups: Vec<(String, Vec<usize>)>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            names: Vec::new(),
            ballots: Vec::new(),
            pool: Vec::new(),
            groups: Vec::new(),
        }
    }

    /// Starts a new voter group; registered ballots are recorded under it.
    fn group(&mut self, name: &str) {
        self.groups.push((name.to_string(), Vec::new()));
    }

    fn candidate(&mut self, name: &str) -> usize {
        self.names.push(name.to_string());
        self.names.len() - 1
    }

    /// Declares `prefix1`, ..., `prefix{count}`.
    fn candidates(&mut self, prefix: &str, count: usize) -> Vec<usize> {
        (1..=count)
            .map(|i| self.candidate(&format!("{prefix}{i}")))
            .collect()
    }

    /// Registers `count` voters casting `ranking`; returns the ballot index,
    /// or `None` for an empty group.
    fn vote(&mut self, count: usize, ranking: Vec<usize>) -> Result<Option<usize>> {
        let idx = push(&mut self.ballots, count, ranking)?;
        if let (Some(i), Some((_, group))) = (idx, self.groups.last_mut()) {
            group.push(i);
        }
        Ok(idx)
    }

    fn unregistered(&mut self, count: usize, ranking: Vec<usize>) -> Result<Option<usize>> {
        push(&mut self.pool, count, ranking)
    }

    fn finish(self, book: &mut Bookkeeping) -> Result<(Election, Vec<Ballot>)> {
        book.groups = self.groups;
        let names = self
            .names
            .into_iter()
            .map(CandidateId::new)
            .collect::<Result<Vec<_>>>()?;
        let election = Election::new(names, self.ballots)?;
        for b in &self.pool {
            election.check_ballot(b)?;
        }
        Ok((election, self.pool))
    }
}

fn push(ballots: &mut Vec<Ballot>, count: usize, ranking: Vec<usize>) -> Result<Option<usize>> {
    if count == 0 {
        return Ok(None);
    }
    let mult = u32::try_from(count)
        .map_err(|_| Error::ConstructionDomain(format!("group of {count} voters is too large")))?;
    ballots.push(Ballot::new(ranking, mult));
    Ok(Some(ballots.len() - 1))
}

fn cat(parts: &[&[usize]]) -> Vec<usize> {
    parts.concat()
}

fn pick(ids: &[usize], indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|&i| ids[i]).collect()
}

fn without(ids: &[usize], skip: usize) -> Vec<usize> {
    ids.iter().copied().filter(|&c| c != skip).collect()
}

fn ctype(action: Action, mode: Mode, tie: Option<TieRule>) -> ControlType {
    ControlType::new(action, mode, tie).expect("legal control type")
}

fn labeled(label: String, instance: ControlInstance) -> LabeledInstance {
    LabeledInstance { label, instance }
}

fn domain(condition: bool, message: &str) -> Result<()> {
    if condition {
        Ok(())
    } else {
        Err(Error::ConstructionDomain(message.into()))
    }
}

/// Builds `construction` from a matching source.
pub fn build(construction: Construction, source: &Source) -> Result<ConstructionOutput> {
    match (construction, source) {
        (Construction::CandidateControl, Source::HittingSet(h)) => build_candidate_control(h),
        (Construction::CandidateControlAdding, Source::HittingSet(h)) => {
            keep(build_candidate_control(h)?, "add-")
        }
        (Construction::CandidateControlDeleting, Source::HittingSet(h)) => {
            keep(build_candidate_control(h)?, "delete-")
        }
        (Construction::CandidateControlPartition, Source::HittingSet(h)) => {
            keep(build_candidate_control(h)?, "partition-")
        }
        (Construction::DeletingCandidates, Source::HittingSet(h)) => build_deleting_candidates(h),
        (Construction::DestructivePartitionVotersTp, Source::HittingSet(h)) => {
            build_destructive_partition_tp(h)
        }
        (Construction::AddingVoters, Source::X3c(x)) => build_adding_voters(x),
        (Construction::DeletingVoters, Source::X3c(x)) => build_deleting_voters(x),
        (Construction::PartitionVotersTe, Source::X3c(x)) => build_partition_voters_te(x),
        (Construction::PartitionVotersTp, Source::X3c(x)) => build_partition_voters_tp(x),
        (construction, _) => Err(Error::ConstructionDomain(format!(
            "{construction} reduces from {}",
            if construction.from_hitting_set() {
                "Hitting Set"
            } else {
                "X3C"
            }
        ))),
    }
}

fn keep(mut out: ConstructionOutput, prefix: &str) -> Result<ConstructionOutput> {
    out.instances.retain(|i| i.label.starts_with(prefix));
    Ok(out)
}

/// Candidates `B ∪ {c, d, w}`; `c` is the unique level-2 winner among
/// `{c, d, w}` and adding a hitting set of size `k` makes `w` win.
pub fn build_candidate_control(h: &HittingSetInstance) -> Result<ConstructionOutput> {
    h.validate()?;
    domain(h.n() > 1, "candidate-control construction needs more than one set")?;
    domain(h.k < h.m, "candidate-control construction needs k < m")?;
    let (m, n, k) = (h.m, h.n(), h.k);
    let mut b = Builder::new();
    let elements = b.candidates("b", m);
    let c = b.candidate("c");
    let d = b.candidate("d");
    let w = b.candidate("w");
    let mut book = Bookkeeping {
        elements: elements.clone(),
        specials: vec![("c".into(), c), ("d".into(), d), ("w".into(), w)],
        ..Bookkeeping::default()
    };
    b.group("c");
    b.vote(2 * m + 1, vec![c])?;
    b.group("c w");
    b.vote(2 * n + 2 * k * (n - 1) + 3, vec![c, w])?;
    b.group("w c");
    b.vote(2 * n * (k + 1) + 5, vec![w, c])?;
    b.group("d S c");
    for set in &h.sets {
        let idx = b.vote(2 * (k + 1), cat(&[&[d], &pick(&elements, set), &[c]]))?;
        book.set_ballots.push(idx.into_iter().collect());
    }
    b.group("d b w");
    for &bj in &elements {
        let idx = b.vote(2, vec![d, bj, w])?;
        book.element_ballots.push(idx.into_iter().collect());
    }
    b.group("d w c");
    b.vote(2 * (k + 1), vec![d, w, c])?;
    let (election, _) = b.finish(&mut book)?;

    let mut instances = Vec::new();
    for (action, budget) in [
        (Action::AddCandidatesLimited, Some(k as u64)),
        (Action::AddCandidatesUnlimited, None),
    ] {
        for (mode, target) in [(Mode::Constructive, w), (Mode::Destructive, c)] {
            let ct = ctype(action, mode, None);
            let mut inst =
                ControlInstance::new(ct, election.clone(), target).with_spoilers(elements.clone());
            if let Some(budget) = budget {
                inst = inst.with_budget(budget);
            }
            instances.push(labeled(format!("add-{}", ct), inst));
        }
    }
    let ct = ctype(Action::DeleteCandidates, Mode::Destructive, None);
    instances.push(labeled(
        format!("delete-{ct}"),
        ControlInstance::new(ct, election.clone(), c).with_budget((m - k) as u64),
    ));
    for action in [Action::PartitionCandidates, Action::RunoffPartitionCandidates] {
        for tie in [TieRule::TiesEliminate, TieRule::TiesPromote] {
            for (mode, target) in [(Mode::Constructive, w), (Mode::Destructive, c)] {
                let ct = ctype(action, mode, Some(tie));
                instances.push(labeled(
                    format!("partition-{ct}"),
                    ControlInstance::new(ct, election.clone(), target),
                ));
            }
        }
    }
    Ok(ConstructionOutput {
        election,
        instances,
        bookkeeping: book,
    })
}

/// Candidates `B ∪ C' ∪ D ∪ E ∪ {w}` with `|C'| = k+1`, `|E| = n` and
/// `n + k - |S_i|` padding candidates per set. Deleting a hitting set of
/// size `k` makes `w` the unique winner.
pub fn build_deleting_candidates(h: &HittingSetInstance) -> Result<ConstructionOutput> {
    h.validate()?;
    domain(h.n() > 1, "deleting-candidates construction needs more than one set")?;
    deleting_candidates_unchecked(h)
}

fn deleting_candidates_unchecked(h: &HittingSetInstance) -> Result<ConstructionOutput> {
    let (m, n, k) = (h.m, h.n(), h.k);
    let pads: Vec<usize> = h
        .sets
        .iter()
        .map(|s| {
            (n + k).checked_sub(s.len()).ok_or_else(|| {
                Error::ConstructionDomain(format!(
                    "a set of size {} exceeds n + k = {}",
                    s.len(),
                    n + k
                ))
            })
        })
        .collect::<Result<_>>()?;
    let mut b = Builder::new();
    let elements = b.candidates("b", m);
    let cprime = b.candidates("c", k + 1);
    let dpad = b.candidates("d", pads.iter().sum());
    let e = b.candidates("e", n);
    let w = b.candidate("w");
    let mut book = Bookkeeping {
        elements: elements.clone(),
        specials: vec![("w".into(), w)],
        ..Bookkeeping::default()
    };
    b.group("S D w");
    let mut offset = 0;
    for (set, &pad) in h.sets.iter().zip(&pads) {
        let block = &dpad[offset..offset + pad];
        offset += pad;
        let idx = b.vote(1, cat(&[&pick(&elements, set), block, &[w]]))?;
        book.set_ballots.push(idx.into_iter().collect());
    }
    assert_eq!(offset, dpad.len(), "padding blocks partition D");
    b.group("E C' c");
    for &cj in &cprime {
        b.vote(1, cat(&[&e, &without(&cprime, cj), &[cj]]))?;
    }
    b.group("w");
    b.vote(k + 1, vec![w])?;
    b.group("C'");
    b.vote(n, cprime.clone())?;
    b.group("C' w");
    b.vote(1, cat(&[&cprime, &[w]]))?;
    let (election, _) = b.finish(&mut book)?;
    let ct = ctype(Action::DeleteCandidates, Mode::Constructive, None);
    let instances = vec![labeled(
        ct.to_string(),
        ControlInstance::new(ct, election.clone(), w).with_budget(k as u64),
    )];
    Ok(ConstructionOutput {
        election,
        instances,
        bookkeeping: book,
    })
}

/// Candidates `B ∪ {w} ∪ D` with `|D| = n(3m-4)`; `m-2` registered voters
/// approve `B` and each set becomes one unregistered voter.
pub fn build_adding_voters(x: &X3cInstance) -> Result<ConstructionOutput> {
    x.validate()?;
    domain(x.m > 1, "adding-voters construction needs m > 1")?;
    let (m, n) = (x.m, x.n());
    let mut b = Builder::new();
    let elements = b.candidates("b", 3 * m);
    let w = b.candidate("w");
    let dpad = b.candidates("d", n * (3 * m - 4));
    let mut book = Bookkeeping {
        elements: elements.clone(),
        specials: vec![("w".into(), w)],
        ..Bookkeeping::default()
    };
    b.group("B");
    b.vote(m - 2, elements.clone())?;
    for (i, set) in x.sets.iter().enumerate() {
        let block = &dpad[i * (3 * m - 4)..(i + 1) * (3 * m - 4)];
        let idx = b.unregistered(1, cat(&[block, &pick(&elements, set), &[w]]))?;
        book.set_ballots.push(idx.into_iter().collect());
    }
    let (election, pool) = b.finish(&mut book)?;
    let ct = ctype(Action::AddVoters, Mode::Constructive, None);
    let instances = vec![labeled(
        ct.to_string(),
        ControlInstance::new(ct, election.clone(), w)
            .with_budget(m as u64)
            .with_pool(pool),
    )];
    Ok(ConstructionOutput {
        election,
        instances,
        bookkeeping: book,
    })
}

/// `B_i = { b_j : i <= n - ell_j }` for 1-based `i`.
fn filler_elements(x: &X3cInstance, elements: &[usize], i: usize) -> Vec<usize> {
    let n = x.n();
    x.occurrences()
        .iter()
        .enumerate()
        .filter(|&(_, &ell)| i + ell <= n)
        .map(|(j, _)| elements[j])
        .collect()
}

/// Candidates `B ∪ {c, w} ∪ D` with `|D| = 3nm`; `c` wins and deleting the
/// voters of an exact cover makes `w` the unique winner.
pub fn build_deleting_voters(x: &X3cInstance) -> Result<ConstructionOutput> {
    x.validate()?;
    domain(x.n() > 1, "deleting-voters construction needs more than one set")?;
    deleting_voters_unchecked(x)
}

fn deleting_voters_unchecked(x: &X3cInstance) -> Result<ConstructionOutput> {
    let (m, n) = (x.m, x.n());
    let mut b = Builder::new();
    let elements = b.candidates("b", 3 * m);
    let c = b.candidate("c");
    let w = b.candidate("w");
    let dpad = b.candidates("d", 3 * n * m);
    let mut book = Bookkeeping {
        elements: elements.clone(),
        specials: vec![("c".into(), c), ("w".into(), w)],
        ..Bookkeeping::default()
    };
    b.group("S c");
    for set in &x.sets {
        let idx = b.vote(1, cat(&[&pick(&elements, set), &[c]]))?;
        book.set_ballots.push(idx.into_iter().collect());
    }
    b.group("B D w");
    for i in 1..=n {
        let fill = filler_elements(x, &elements, i);
        // d_{(i-1)3m+1} .. d_{3im-|B_i|}
        let block = &dpad[(i - 1) * 3 * m..3 * i * m - fill.len()];
        b.vote(1, cat(&[&fill, block, &[w]]))?;
    }
    b.group("c");
    b.vote(m - 1, vec![c])?;
    let (election, _) = b.finish(&mut book)?;
    let ct = ctype(Action::DeleteVoters, Mode::Constructive, None);
    let instances = vec![labeled(
        ct.to_string(),
        ControlInstance::new(ct, election.clone(), w).with_budget(m as u64),
    )];
    Ok(ConstructionOutput {
        election,
        instances,
        bookkeeping: book,
    })
}

/// Candidates `B ∪ {c, x, y, w} ∪ Z` with `|Z| = n`, for partition of
/// voters under ties-eliminate.
pub fn build_partition_voters_te(x: &X3cInstance) -> Result<ConstructionOutput> {
    x.validate()?;
    domain(x.n() >= 1, "partition-voters construction needs at least one set")?;
    let (m, n) = (x.m, x.n());
    let mut b = Builder::new();
    let elements = b.candidates("b", 3 * m);
    let c = b.candidate("c");
    let xs = b.candidate("x");
    let y = b.candidate("y");
    let w = b.candidate("w");
    let z = b.candidates("z", n);
    let mut book = Bookkeeping {
        elements: elements.clone(),
        specials: vec![
            ("c".into(), c),
            ("x".into(), xs),
            ("y".into(), y),
            ("w".into(), w),
        ],
        ..Bookkeeping::default()
    };
    b.group("c S");
    for set in &x.sets {
        let idx = b.vote(1, cat(&[&[c], &pick(&elements, set)]))?;
        book.set_ballots.push(idx.into_iter().collect());
    }
    b.group("Z B w");
    for i in 1..=n {
        let fill = filler_elements(x, &elements, i);
        b.vote(1, cat(&[&without(&z, z[i - 1]), &fill, &[w]]))?;
    }
    b.group("c z");
    for &zi in &z {
        b.vote(1, vec![c, zi])?;
    }
    b.group("x");
    b.vote(n + m, vec![xs])?;
    b.group("y");
    b.vote(m - 1, vec![y])?;
    let (election, _) = b.finish(&mut book)?;
    let ct = ctype(Action::PartitionVoters, Mode::Constructive, Some(TieRule::TiesEliminate));
    let instances = vec![labeled(ct.to_string(), ControlInstance::new(ct, election.clone(), w))];
    Ok(ConstructionOutput {
        election,
        instances,
        bookkeeping: book,
    })
}

/// Candidates `B ∪ F ∪ Z ∪ {w, x, y}` with `|F| = n+m+1`, `|Z| = n`, for
/// partition of voters under ties-promote. Needs `n > m + 1`.
pub fn build_partition_voters_tp(x: &X3cInstance) -> Result<ConstructionOutput> {
    x.validate()?;
    let (m, n) = (x.m, x.n());
    domain(n > m + 1, "partition-voters-tp construction needs n > m + 1")?;
    let mut b = Builder::new();
    let elements = b.candidates("b", 3 * m);
    let f = b.candidates("f", n + m + 1);
    let z = b.candidates("z", n);
    let w = b.candidate("w");
    let xs = b.candidate("x");
    let y = b.candidate("y");
    let mut book = Bookkeeping {
        elements: elements.clone(),
        specials: vec![("w".into(), w), ("x".into(), xs), ("y".into(), y)],
        ..Bookkeeping::default()
    };
    b.group("y S");
    for set in &x.sets {
        let idx = b.vote(1, cat(&[&[y], &pick(&elements, set)]))?;
        book.set_ballots.push(idx.into_iter().collect());
    }
    b.group("y z");
    for &zi in &z {
        b.vote(1, vec![y, zi])?;
    }
    b.group("Z B w");
    for i in 1..=n {
        let fill = filler_elements(x, &elements, i);
        b.vote(1, cat(&[&without(&z, z[i - 1]), &fill, &[w]]))?;
    }
    b.group("Z all B w");
    b.vote(n, cat(&[&z, &elements, &[w]]))?;
    b.group("x");
    b.vote(n + m + 1, vec![xs])?;
    b.group("f");
    for &fk in &f {
        b.vote(1, vec![fk])?;
    }
    let (election, _) = b.finish(&mut book)?;
    let ct = ctype(Action::PartitionVoters, Mode::Constructive, Some(TieRule::TiesPromote));
    let instances = vec![labeled(ct.to_string(), ControlInstance::new(ct, election.clone(), w))];
    Ok(ConstructionOutput {
        election,
        instances,
        bookkeeping: book,
    })
}

/// Candidates `B ∪ D ∪ E ∪ {c, w}` with `|D| = 2(m+1)` and `|E| = 2(m-1)`;
/// `c` wins on level 2 and can be kept from winning by a voter partition
/// under ties-promote exactly when a hitting set of size `k` exists.
pub fn build_destructive_partition_tp(h: &HittingSetInstance) -> Result<ConstructionOutput> {
    h.validate()?;
    domain(h.k < h.m, "destructive partition construction needs k < m")?;
    let (m, n, k) = (h.m, h.n(), h.k);
    let mut b = Builder::new();
    let elements = b.candidates("b", m);
    let dpad = b.candidates("d", 2 * (m + 1));
    let e = b.candidates("e", 2 * (m - 1));
    let c = b.candidate("c");
    let w = b.candidate("w");
    let mut book = Bookkeeping {
        elements: elements.clone(),
        specials: vec![("c".into(), c), ("w".into(), w)],
        element_ballots: vec![Vec::new(); m],
        ..Bookkeeping::default()
    };
    b.group("w S c");
    for set in &h.sets {
        let idx = b.vote(k + 1, cat(&[&[w], &pick(&elements, set), &[c]]))?;
        book.set_ballots.push(idx.into_iter().collect());
    }
    b.group("c b w");
    for (j, &bj) in elements.iter().enumerate() {
        book.element_ballots[j].extend(b.vote(1, vec![c, bj, w])?);
    }
    b.group("b");
    for (j, &bj) in elements.iter().enumerate() {
        book.element_ballots[j].extend(b.vote(k - 1, vec![bj])?);
    }
    b.group("d d w");
    for pair in dpad.chunks(2) {
        b.vote(1, vec![pair[0], pair[1], w])?;
    }
    b.group("e");
    for &er in &e {
        b.vote(1, vec![er])?;
    }
    b.group("c");
    b.vote(n * (k + 1) + m - k + 1, vec![c])?;
    b.group("c w");
    b.vote(m * k + k - 1, vec![c, w])?;
    b.group("w c");
    b.vote(1, vec![w, c])?;
    let (election, _) = b.finish(&mut book)?;
    let ct = ctype(Action::PartitionVoters, Mode::Destructive, Some(TieRule::TiesPromote));
    let instances = vec![labeled(ct.to_string(), ControlInstance::new(ct, election.clone(), c))];
    Ok(ConstructionOutput {
        election,
        instances,
        bookkeeping: book,
    })
}
