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

//! Checks that a construction maps yes-instances to yes-instances and
//! no-instances to no-instances, plus the intermediate facts each
//! correctness argument relies on.

use serde::Serialize;

use crate::control::{evaluate_partition_voters, TieRule, VoterSelection};
use crate::election::{majority_threshold, Election, Resolution};
use crate::error::{Error, Result};
use crate::exact::{for_each_voter_split, solve_exact_with, SearchLimits};

use super::build::build;
use super::{Construction, ConstructionOutput, HittingSetInstance, Source, X3cInstance};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceCheck {
    pub label: String,
    pub decision: bool,
    pub agrees: bool,
    pub explored: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimCheck {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub construction: Construction,
    pub source: Source,
    pub source_answer: bool,
    pub source_witness: Option<Vec<usize>>,
    pub instances: Vec<InstanceCheck>,
    pub claims: Vec<ClaimCheck>,
}

impl VerificationReport {
    /// Every control instance has the source's answer.
    pub fn agreement(&self) -> bool {
        self.instances.iter().all(|i| i.agrees)
    }

    pub fn claims_hold(&self) -> bool {
        self.claims.iter().all(|c| c.holds)
    }
}

/// Solves the source with its oracle and every constructed control
/// instance with the exhaustive solver, and compares the answers.
pub fn verify_reduction(
    construction: Construction,
    source: &Source,
    limits: &SearchLimits,
) -> Result<VerificationReport> {
    let out = build(construction, source)?;
    let witness = source.solve()?;
    let answer = witness.is_some();
    let mut instances = Vec::new();
    for labeled in &out.instances {
        let report = solve_exact_with(&labeled.instance, limits)?;
        instances.push(InstanceCheck {
            label: labeled.label.clone(),
            decision: report.decision,
            agrees: report.decision == answer,
            explored: report.explored,
        });
    }
    let mut claims = Claims::default();
    match source {
        Source::HittingSet(h) => match construction {
            Construction::DeletingCandidates => deleting_candidates_claims(&mut claims, h, &out, &witness)?,
            Construction::DestructivePartitionVotersTp => {
                destructive_partition_claims(&mut claims, h, &out, &witness, limits)?
            }
            _ => candidate_control_claims(&mut claims, h, &out, &witness)?,
        },
        Source::X3c(x) => match construction {
            Construction::AddingVoters => adding_voters_claims(&mut claims, x, &out, &witness)?,
            Construction::DeletingVoters => deleting_voters_claims(&mut claims, x, &out, &witness)?,
            Construction::PartitionVotersTe => partition_te_claims(&mut claims, x, &out, &witness)?,
            _ => partition_tp_claims(&mut claims, x, &out, &witness)?,
        },
    }
    Ok(VerificationReport {
        construction,
        source: source.clone(),
        source_answer: answer,
        source_witness: witness,
        instances,
        claims: claims.0,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum SuiteOutcome {
    Verified(VerificationReport),
    /// The source violates the construction's preconditions.
    NotApplicable(String),
    /// The control instance exceeds the search limits.
    TooLarge(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteEntry {
    pub source: Source,
    pub outcome: SuiteOutcome,
}

/// Runs [`verify_reduction`] on every source of the matching kind.
pub fn verify_suite(
    construction: Construction,
    sources: &[Source],
    limits: &SearchLimits,
) -> Result<Vec<SuiteEntry>> {
    let mut entries = Vec::new();
    for source in sources {
        let kind_matches = matches!(source, Source::HittingSet(_)) == construction.from_hitting_set();
        if !kind_matches {
            continue;
        }
        let outcome = match verify_reduction(construction, source, limits) {
            Ok(report) => SuiteOutcome::Verified(report),
            Err(Error::ConstructionDomain(why)) => SuiteOutcome::NotApplicable(why),
            Err(e @ Error::InstanceTooLarge { .. }) => SuiteOutcome::TooLarge(e.to_string()),
            Err(e) => return Err(e),
        };
        entries.push(SuiteEntry {
            source: source.clone(),
            outcome,
        });
    }
    Ok(entries)
}

/// Fixed Hitting Set sources with `m <= 4`, `n <= 3`, `k <= 2`.
pub fn small_hitting_set_suite() -> Vec<HittingSetInstance> {
    let raw: &[(usize, usize, &[&[usize]])] = &[
        (2, 1, &[&[0], &[1]]),
        (2, 1, &[&[0, 1], &[1]]),
        (2, 1, &[&[0], &[0, 1]]),
        (2, 1, &[&[0], &[1], &[0, 1]]),
        (2, 1, &[&[0, 1]]),
        (3, 1, &[&[0, 1], &[1, 2]]),
        (3, 1, &[&[0], &[1, 2]]),
        (3, 1, &[&[0, 1], &[1, 2], &[0, 2]]),
        (3, 2, &[&[0, 1], &[1, 2], &[0, 2]]),
        (3, 1, &[&[0, 1, 2], &[2]]),
        (3, 2, &[&[0], &[1], &[2]]),
        (3, 2, &[&[0], &[1]]),
        (3, 1, &[&[1], &[1, 2], &[0, 1]]),
        (3, 1, &[&[0, 1]]),
        (4, 1, &[&[0, 1], &[2, 3]]),
        (4, 2, &[&[0, 1], &[2, 3]]),
        (4, 1, &[&[0, 1, 2], &[1, 3], &[1]]),
        (4, 2, &[&[0], &[1], &[2]]),
        (4, 2, &[&[0, 3], &[1, 3], &[2, 3]]),
        (4, 1, &[&[0, 3], &[1, 3], &[2]]),
        (4, 2, &[&[0, 1, 2, 3], &[0], &[3]]),
        (4, 1, &[&[0, 1], &[1, 2], &[2, 3]]),
        (4, 2, &[&[0, 1], &[1, 2], &[2, 3]]),
        (4, 2, &[&[3], &[2], &[0, 1]]),
    ];
    raw.iter()
        .map(|&(m, k, sets)| {
            HittingSetInstance::new(m, k, sets.iter().map(|s| s.to_vec()).collect())
                .expect("suite instances are valid")
        })
        .collect()
}

/// Fixed X3C sources with `m <= 2`, `n <= 4`.
pub fn small_x3c_suite() -> Vec<X3cInstance> {
    let raw: &[(usize, &[[usize; 3]])] = &[
        (1, &[[0, 1, 2]]),
        (1, &[[0, 1, 2], [0, 1, 2]]),
        (1, &[[0, 1, 2], [0, 1, 2], [0, 1, 2]]),
        (1, &[[0, 1, 2], [0, 1, 2], [0, 1, 2], [0, 1, 2]]),
        (2, &[[0, 1, 2], [3, 4, 5]]),
        (2, &[[0, 1, 2], [0, 1, 3], [3, 4, 5]]),
        (2, &[[0, 1, 2], [0, 3, 4]]),
        (2, &[[0, 1, 2], [0, 1, 3]]),
        (2, &[[0, 1, 3], [2, 4, 5], [0, 1, 2]]),
        (2, &[[0, 1, 2], [2, 3, 4], [3, 4, 5]]),
        (2, &[[0, 1, 2], [1, 3, 4], [2, 4, 5], [0, 3, 5]]),
        (2, &[[0, 1, 5], [2, 3, 4], [0, 2, 4], [1, 3, 5]]),
        (2, &[[0, 1, 2], [0, 1, 2], [3, 4, 5], [0, 4, 5]]),
        (2, &[[0, 2, 4], [1, 3, 5]]),
        (2, &[[0, 2, 4], [1, 3, 4]]),
    ];
    raw.iter()
        .map(|&(m, sets)| {
            X3cInstance::new(m, sets.iter().map(|s| s.to_vec()).collect())
                .expect("suite instances are valid")
        })
        .collect()
}

#[derive(Default)]
struct Claims(Vec<ClaimCheck>);

impl Claims {
    fn check(&mut self, name: &str, holds: bool) {
        self.0.push(ClaimCheck {
            name: name.to_string(),
            holds,
        });
    }
}

fn approvals(e: &Election, candidates: &[usize]) -> Result<Vec<u64>> {
    candidates.iter().map(|&c| e.approval_score(c)).collect()
}

fn all_equal(scores: &[u64], value: u64) -> bool {
    scores.iter().all(|&s| s == value)
}

fn select(indices: &[usize], e: &Election) -> VoterSelection {
    VoterSelection::from_counts(indices.iter().map(|&i| (i, e.ballots()[i].multiplicity())))
}

fn complement(e: &Election, sel: &VoterSelection) -> VoterSelection {
    VoterSelection::from_counts(
        e.ballots()
            .iter()
            .enumerate()
            .map(|(i, b)| (i, b.multiplicity() - sel.count(i))),
    )
}

fn sub_election(e: &Election, sel: &VoterSelection) -> Result<Election> {
    e.with_ballots(
        sel.iter()
            .map(|(i, count)| {
                crate::election::Ballot::new(e.ballots()[i].ranking().to_vec(), count)
            })
            .collect(),
    )
}

fn candidate_control_claims(
    claims: &mut Claims,
    h: &HittingSetInstance,
    out: &ConstructionOutput,
    witness: &Option<Vec<usize>>,
) -> Result<()> {
    let e = &out.election;
    let book = &out.bookkeeping;
    let (c, d, w) = (book.special("c"), book.special("d"), book.special("w"));
    let (m, n, k) = (h.m as u64, h.n() as u64, h.k as u64);
    let core = e.winners_among(&[c, d, w])?;
    let restricted = e.restrict(&[c, d, w])?;
    let scores = [
        restricted.level_score(0, 2)?,
        restricted.level_score(1, 2)?,
        restricted.level_score(2, 2)?,
    ];
    claims.check(
        "level-2 scores of c, d, w",
        scores
            == [
                2 * (m - k) + 6 * n * (k + 1) + 9,
                2 * n * (k + 1) + 2 * (m + k + 1),
                4 * n * (k + 1) + 2 * m + 10,
            ],
    );
    claims.check(
        "c is the unique level-2 winner among c, d, w",
        core.is_unique_winner(c) && core.resolution == Resolution::MajorityLevel(2),
    );
    if let Some(hit) = witness {
        let mut members: Vec<usize> = h.pad_to_k(hit).iter().map(|&j| book.elements[j]).collect();
        members.extend([c, d, w]);
        members.sort_unstable();
        claims.check(
            "a hitting set of size k makes w the unique winner",
            e.winners_among(&members)?.is_unique_winner(w),
        );
    }
    // every candidate set that dethrones c consists of d, w and a hitting
    // set of size at most k, and w wins it on level 2
    let others: Vec<usize> = book.elements.iter().copied().chain([d, w]).collect();
    let mut holds = true;
    for mask in 0u64..1 << others.len() {
        let mut members: Vec<usize> = (0..others.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| others[i])
            .collect();
        members.push(c);
        members.sort_unstable();
        let result = e.winners_among(&members)?;
        if result.is_unique_winner(c) {
            continue;
        }
        let chosen: Vec<usize> = (0..h.m)
            .filter(|&j| members.contains(&book.elements[j]))
            .collect();
        holds &= members.contains(&d)
            && members.contains(&w)
            && result.is_unique_winner(w)
            && result.resolution == Resolution::MajorityLevel(2)
            && chosen.len() <= h.k
            && h.is_hitting_set(&chosen);
    }
    claims.check("every c-dethroning candidate set is d, w and a hitting set", holds);
    Ok(())
}

fn deleting_candidates_claims(
    claims: &mut Claims,
    h: &HittingSetInstance,
    out: &ConstructionOutput,
    witness: &Option<Vec<usize>>,
) -> Result<()> {
    let e = &out.election;
    let w = out.bookkeeping.special("w");
    let (n, k) = (h.n(), h.k);
    claims.check("voter count", e.voter_count() == (2 * (n + k + 1) + 1) as u64);
    let cprime: Vec<usize> = (0..e.num_candidates())
        .filter(|&i| e.name(i).starts_with('c'))
        .collect();
    let mut expected = cprime.clone();
    expected.push(w);
    expected.sort_unstable();
    let base = e.fallback_winners()?;
    claims.check(
        "C' and w are the level n+k+1 winners",
        base.winners == expected && base.resolution == Resolution::MajorityLevel(n + k + 1),
    );
    if let Some(hit) = witness {
        let deleted: Vec<usize> = h
            .pad_to_k(hit)
            .iter()
            .map(|&j| out.bookkeeping.elements[j])
            .collect();
        let members: Vec<usize> = (0..e.num_candidates())
            .filter(|c| !deleted.contains(c))
            .collect();
        let result = e.winners_among(&members)?;
        claims.check(
            "deleting a hitting set makes w the unique level n+k winner",
            result.is_unique_winner(w) && result.resolution == Resolution::MajorityLevel(n + k),
        );
    }
    Ok(())
}

fn adding_voters_claims(
    claims: &mut Claims,
    x: &X3cInstance,
    out: &ConstructionOutput,
    witness: &Option<Vec<usize>>,
) -> Result<()> {
    let e = &out.election;
    let book = &out.bookkeeping;
    let w = book.special("w");
    claims.check(
        "w is not the unique winner before adding voters",
        !e.fallback_winners()?.is_unique_winner(w),
    );
    if let Some(cover) = witness {
        let pool = out.instances[0].instance.pool();
        let mut ballots = e.ballots().to_vec();
        for &i in cover {
            ballots.extend(book.set_ballots[i].iter().map(|&p| pool[p].clone()));
        }
        let after = e.with_ballots(ballots)?;
        let m = x.m as u64;
        let padding: Vec<usize> = (0..e.num_candidates())
            .filter(|&i| e.name(i).starts_with('d'))
            .collect();
        claims.check(
            "adding a cover gives w m approvals, each b m-1, each d at most 1",
            after.approval_score(w)? == m
                && all_equal(&approvals(&after, &book.elements)?, m - 1)
                && approvals(&after, &padding)?.iter().all(|&s| s <= 1)
                && after.fallback_winners()?.is_unique_winner(w),
        );
    }
    Ok(())
}

fn deleting_voters_claims(
    claims: &mut Claims,
    x: &X3cInstance,
    out: &ConstructionOutput,
    witness: &Option<Vec<usize>>,
) -> Result<()> {
    let e = &out.election;
    let book = &out.bookkeeping;
    let (c, w) = (book.special("c"), book.special("w"));
    let (m, n) = (x.m as u64, x.n() as u64);
    claims.check(
        "base approvals: w and each b have n, c has n+m-1",
        e.approval_score(w)? == n
            && all_equal(&approvals(e, &book.elements)?, n)
            && e.approval_score(c)? == n + m - 1,
    );
    claims.check(
        "w is ranked at position 3m+1 by the filler voters",
        book.group("B D w")
            .iter()
            .all(|&i| e.ballots()[i].position_of(w) == Some(3 * x.m)),
    );
    let base = e.fallback_winners()?;
    claims.check(
        "c is the unique level-4 winner",
        base.is_unique_winner(c) && base.resolution == Resolution::MajorityLevel(4),
    );
    if let Some(cover) = witness {
        let deleted: Vec<usize> = cover.iter().flat_map(|&i| book.set_ballots[i].clone()).collect();
        let after = sub_election(e, &complement(e, &select(&deleted, e)))?;
        claims.check(
            "deleting a cover's voters leaves c and each b with n-1 and w wins",
            after.approval_score(c)? + 1 == n
                && all_equal(&approvals(&after, &book.elements)?, n - 1)
                && after.fallback_winners()?.is_unique_winner(w),
        );
    }
    Ok(())
}

fn partition_te_claims(
    claims: &mut Claims,
    x: &X3cInstance,
    out: &ConstructionOutput,
    witness: &Option<Vec<usize>>,
) -> Result<()> {
    let e = &out.election;
    let book = &out.bookkeeping;
    let (c, xs, y, w) = (book.special("c"), book.special("x"), book.special("y"), book.special("w"));
    let (m, n) = (x.m as u64, x.n() as u64);
    let z: Vec<usize> = (0..e.num_candidates())
        .filter(|&i| e.name(i).starts_with('z'))
        .collect();
    claims.check(
        "base approvals: b, z, w have n; c 2n; x n+m; y m-1",
        all_equal(&approvals(e, &book.elements)?, n)
            && all_equal(&approvals(e, &z)?, n)
            && e.approval_score(w)? == n
            && e.approval_score(c)? == 2 * n
            && e.approval_score(xs)? == n + m
            && e.approval_score(y)? == m - 1,
    );
    let maj = majority_threshold(e.voter_count());
    let best = (0..e.num_candidates())
        .map(|i| e.approval_score(i))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    claims.check("no strict majority on any level", best < maj);
    if let Some(cover) = witness {
        let mut first: Vec<usize> = cover.iter().flat_map(|&i| book.set_ballots[i].clone()).collect();
        first.extend(book.group("c z"));
        first.extend(book.group("x"));
        let v1 = select(&first, e);
        let v2 = complement(e, &v1);
        let w1 = sub_election(e, &v1)?.fallback_winners()?;
        let w2 = sub_election(e, &v2)?.fallback_winners()?;
        claims.check(
            "the cover partition ties c and x in the first part",
            w1.winners.contains(&c) && w1.winners.contains(&xs) && w1.winners.len() == 2,
        );
        claims.check("the cover partition's second part elects w alone", w2.is_unique_winner(w));
        claims.check(
            "the cover partition makes w the unique winner",
            evaluate_partition_voters(e, &v1, &v2, TieRule::TiesEliminate)?.is_unique_winner(w),
        );
    }
    Ok(())
}

/// Approvals of `w`, `x`, `y` and of every `b`, `f` and `z`.
type ScoreRow = (u64, u64, u64, Vec<u64>, Vec<u64>, Vec<u64>);

fn partition_tp_claims(
    claims: &mut Claims,
    x: &X3cInstance,
    out: &ConstructionOutput,
    witness: &Option<Vec<usize>>,
) -> Result<()> {
    let e = &out.election;
    let book = &out.bookkeeping;
    let (w, xs, y) = (book.special("w"), book.special("x"), book.special("y"));
    let (m, n) = (x.m as u64, x.n() as u64);
    let named = |prefix: char| -> Vec<usize> {
        (0..e.num_candidates())
            .filter(|&i| e.name(i).starts_with(prefix))
            .collect()
    };
    let (f, z) = (named('f'), named('z'));
    let row = |el: &Election| -> Result<ScoreRow> {
        Ok((
            el.approval_score(w)?,
            el.approval_score(xs)?,
            el.approval_score(y)?,
            approvals(el, &book.elements)?,
            approvals(el, &f)?,
            approvals(el, &z)?,
        ))
    };
    let (sw, sx, sy, sb, sf, sz) = row(e)?;
    claims.check(
        "base approvals: w 2n, x n+m+1, y 2n, b 2n, f 1, z 2n",
        sw == 2 * n
            && sx == n + m + 1
            && sy == 2 * n
            && all_equal(&sb, 2 * n)
            && all_equal(&sf, 1)
            && all_equal(&sz, 2 * n),
    );
    if let Some(cover) = witness {
        let mut first: Vec<usize> = cover.iter().flat_map(|&i| book.set_ballots[i].clone()).collect();
        first.extend(book.group("y z"));
        first.extend(book.group("x"));
        let v1 = select(&first, e);
        let v2 = complement(e, &v1);
        let part = sub_election(e, &v1)?;
        let (pw, px, py, pb, pf, pz) = row(&part)?;
        claims.check(
            "the cover partition's first part scores w 0, x n+m+1, y n+m, b 1, f 0, z 1",
            pw == 0
                && px == n + m + 1
                && py == n + m
                && all_equal(&pb, 1)
                && all_equal(&pf, 0)
                && all_equal(&pz, 1),
        );
        let w1 = part.fallback_winners()?;
        claims.check(
            "x wins the cover partition's first part by a majority",
            w1.is_unique_winner(xs) && w1.resolution != Resolution::ApprovalFallback,
        );
        let duel = e.winners_among(&[w.min(xs), w.max(xs)])?;
        claims.check("w beats x over all voters", duel.is_unique_winner(w));
        claims.check(
            "the cover partition makes w the unique winner",
            evaluate_partition_voters(e, &v1, &v2, TieRule::TiesPromote)?.is_unique_winner(w),
        );
    }
    Ok(())
}

fn destructive_partition_claims(
    claims: &mut Claims,
    h: &HittingSetInstance,
    out: &ConstructionOutput,
    witness: &Option<Vec<usize>>,
    limits: &SearchLimits,
) -> Result<()> {
    let e = &out.election;
    let book = &out.bookkeeping;
    let (c, w) = (book.special("c"), book.special("w"));
    let (m, n, k) = (h.m as u64, h.n() as u64, h.k as u64);
    let nk = n * (k + 1);
    let level = |cand: usize, i: usize| e.level_score(cand, i);
    let named = |prefix: char| -> Vec<usize> {
        (0..e.num_candidates())
            .filter(|&i| e.name(i).starts_with(prefix))
            .collect()
    };
    let mut table = level(c, 1)? == nk + 2 * m + m * k
        && level(c, 2)? == nk + 2 * m + m * k + 1
        && level(w, 1)? == nk + 1
        && level(w, 2)? == nk + m * k + k
        && level(w, 3)? == nk + m * k + k + 2 * m + 1;
    for &b in &book.elements {
        table &= level(b, 1)? == k - 1;
    }
    for dp in named('d') {
        table &= level(dp, 2)? == 1 && level(dp, 3)? == 1;
    }
    for er in named('e') {
        table &= (1..=3).all(|i| level(er, i) == Ok(1));
    }
    claims.check("exact score table entries", table);
    claims.check(
        "majority threshold n(k+1)+2m+mk+1",
        majority_threshold(e.voter_count()) == nk + 2 * m + m * k + 1,
    );
    let base = e.fallback_winners()?;
    claims.check(
        "c is the unique level-2 winner",
        base.is_unique_winner(c) && base.resolution == Resolution::MajorityLevel(2),
    );
    let split = for_each_voter_split(e, Some(c), limits.max_partitions, |w1, w2| {
        !w1.winners.contains(&c) && !w2.winners.contains(&c)
    })?;
    claims.check("c wins a side of every voter partition", split.hit.is_none());
    if let Some(hit) = witness {
        let chosen = h.pad_to_k(hit);
        let first: Vec<usize> = chosen
            .iter()
            .flat_map(|&j| book.element_ballots[j].clone())
            .collect();
        let v1 = select(&first, e);
        let w1 = sub_election(e, &v1)?.fallback_winners()?;
        let mut expected: Vec<usize> = chosen.iter().map(|&j| book.elements[j]).collect();
        expected.extend([c, w]);
        expected.sort_unstable();
        claims.check(
            "the hitting-set partition's first part ties c, w and B' by approval",
            w1.winners == expected && w1.resolution == Resolution::ApprovalFallback,
        );
        let final_round = e.restrict(&expected)?;
        let pos = |cand: usize| expected.binary_search(&cand).expect("finalist");
        let tie = nk + 2 * m + m * k + 1;
        claims.check(
            "c and w tie on level 2 of the final round",
            final_round.level_score(pos(c), 2)? == tie && final_round.level_score(pos(w), 2)? == tie,
        );
    }
    Ok(())
}
