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

#![allow(dead_code)]

//! Generators, fixtures and a naive reference winner rule shared by the
//! integration tests and the acceptance gate.

use fvcontrol::reductions::{
    build_candidate_control, build_destructive_partition_tp, build_partition_voters_tp,
    HittingSetInstance, X3cInstance,
};
use fvcontrol::{
    evaluate_partition_candidates, evaluate_partition_voters, Ballot, CandidateId, Election,
    TieRule, VoterSelection,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn e1() -> Election {
    Election::from_names(
        &["a", "b", "c", "d"],
        &[(3, &["a", "c"]), (2, &["b", "d", "c"]), (1, &["d", "a", "c"])],
    )
    .unwrap()
}

pub fn e2() -> Election {
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

pub fn random_ballot<R: Rng>(rng: &mut R, n: usize, max_mult: u32) -> Ballot {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let len = rng.gen_range(0..=n);
    order.truncate(len);
    Ballot::new(order, rng.gen_range(1..=max_mult))
}

/// Candidates `c0, c1, ...` and `lines` ballot lines.
pub fn random_election<R: Rng>(rng: &mut R, n: usize, lines: usize, max_mult: u32) -> Election {
    let ids = (0..n)
        .map(|i| CandidateId::new(format!("c{i}")).unwrap())
        .collect();
    let ballots = (0..lines).map(|_| random_ballot(rng, n, max_mult)).collect();
    Election::new(ids, ballots).unwrap()
}

/// Fallback winners straight from the definition over explicit rankings:
/// the first level with a strict majority decides by that level's score,
/// otherwise approvals decide. Returns the winners and the deciding level.
pub fn naive_winners(n: usize, voters: &[&[usize]]) -> (Vec<usize>, Option<usize>) {
    let majority = voters.len() / 2 + 1;
    let score = |c: usize, level: usize| {
        voters
            .iter()
            .filter(|v| v.iter().take(level).any(|&x| x == c))
            .count()
    };
    let best = |level: usize| {
        let top = (0..n).map(|c| score(c, level)).max().unwrap_or(0);
        (top, (0..n).filter(|&c| score(c, level) == top).collect::<Vec<_>>())
    };
    for level in 1..=n {
        let (top, winners) = best(level);
        if top >= majority {
            return (winners, Some(level));
        }
    }
    (best(n).1, None)
}

/// One ranking per voter, multiplicities expanded.
pub fn voters_of(e: &Election) -> Vec<&[usize]> {
    e.ballots()
        .iter()
        .flat_map(|b| std::iter::repeat_n(b.ranking(), b.multiplicity() as usize))
        .collect()
}

fn random_sets<R: Rng>(rng: &mut R, m: usize, n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|_| {
            let mut set: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.4)).collect();
            if set.is_empty() {
                set.push(rng.gen_range(0..m));
            }
            set
        })
        .collect()
}

fn random_triples<R: Rng>(rng: &mut R, m: usize, n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|_| {
            let mut all: Vec<usize> = (0..3 * m).collect();
            all.shuffle(rng);
            all.truncate(3);
            all.sort_unstable();
            all
        })
        .collect()
}

fn members(e: &Election, prefix: char) -> Vec<usize> {
    (0..e.num_candidates())
        .filter(|&i| e.name(i).starts_with(prefix))
        .collect()
}

/// The three closed-form level-2 scores of `c`, `d` and `w` hold for a
/// random legal source with `m <= 6`, `n <= 5`.
pub fn candidate_control_scores<R: Rng>(rng: &mut R) -> Result<(), String> {
    let m = rng.gen_range(2..=6);
    let n = rng.gen_range(2..=5);
    let k = rng.gen_range(1..m);
    let h = HittingSetInstance::new(m, k, random_sets(rng, m, n)).unwrap();
    let out = build_candidate_control(&h).map_err(|e| e.to_string())?;
    let core = out.election.restrict_names(&["c", "d", "w"]).unwrap();
    let got: Vec<u64> = (0..3).map(|i| core.level_score(i, 2).unwrap()).collect();
    let (m, n, k) = (m as u64, n as u64, k as u64);
    let want = vec![
        2 * (m - k) + 6 * n * (k + 1) + 9,
        2 * n * (k + 1) + 2 * (m + k + 1),
        4 * n * (k + 1) + 2 * m + 10,
    ];
    check(got == want, || format!("{h:?}: level-2 scores {got:?}, expected {want:?}"))
}

/// Overall approval scores of the voter-partition (ties promote) election.
pub fn partition_tp_scores<R: Rng>(rng: &mut R) -> Result<(), String> {
    let m = rng.gen_range(1..=3);
    let n = rng.gen_range(m + 2..=5);
    let x = X3cInstance::new(m, random_triples(rng, m, n)).unwrap();
    let out = build_partition_voters_tp(&x).map_err(|e| e.to_string())?;
    let e = &out.election;
    let app = |c: usize| e.approval_score(c).unwrap();
    let (m, n) = (m as u64, n as u64);
    let special = |name: &str| e.index_of(name).unwrap();
    let mut ok = app(special("w")) == 2 * n
        && app(special("x")) == n + m + 1
        && app(special("y")) == 2 * n;
    ok &= members(e, 'b').into_iter().all(|c| app(c) == 2 * n);
    ok &= members(e, 'f').into_iter().all(|c| app(c) == 1);
    ok &= members(e, 'z').into_iter().all(|c| app(c) == 2 * n);
    check(ok, || format!("{x:?}: overall scores differ from the table"))
}

/// Exact level-1/2/3 entries of the destructive voter-partition table.
pub fn destructive_partition_scores<R: Rng>(rng: &mut R) -> Result<(), String> {
    let m = rng.gen_range(2..=6);
    let n = rng.gen_range(1..=5);
    let k = rng.gen_range(1..m);
    let h = HittingSetInstance::new(m, k, random_sets(rng, m, n)).unwrap();
    let out = build_destructive_partition_tp(&h).map_err(|e| e.to_string())?;
    let e = &out.election;
    let s = |c: usize, level: usize| e.level_score(c, level).unwrap();
    let (c, w) = (e.index_of("c").unwrap(), e.index_of("w").unwrap());
    let (m, n, k) = (m as u64, n as u64, k as u64);
    let nk = n * (k + 1);
    let mut ok = s(c, 1) == nk + 2 * m + m * k
        && s(c, 2) == nk + 2 * m + m * k + 1
        && s(w, 1) == nk + 1
        && s(w, 2) == nk + m * k + k
        && s(w, 3) == nk + m * k + k + 2 * m + 1
        && e.voter_count() == 2 * nk + 4 * m + 2 * m * k
        && fvcontrol::majority_threshold(e.voter_count()) == nk + 2 * m + m * k + 1;
    ok &= members(e, 'b').into_iter().all(|b| s(b, 1) == k - 1);
    ok &= members(e, 'd').into_iter().all(|d| s(d, 2) == 1 && s(d, 3) == 1);
    ok &= members(e, 'e')
        .into_iter()
        .all(|r| (1..=3).all(|level| s(r, level) == 1));
    check(ok, || format!("{h:?}: scores differ from the table"))
}

fn check(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

/// Structural properties of the winner rule and the partition stages on
/// `count` random elections.
pub fn check_properties(seed: u64, count: usize) -> Result<(), String> {
    let mut rng = rng(seed);
    for round in 0..count {
        let n = rng.gen_range(1..=6);
        let lines = rng.gen_range(0..=8);
        let e = random_election(&mut rng, n, lines, 3);
        let ctx = |what: &str| format!("election {round} ({what}): {e:?}");
        let result = e.fallback_winners().map_err(|x| x.to_string())?;

        let (naive, level) = naive_winners(n, &voters_of(&e));
        check(result.winners == naive && result.level() == level, || ctx("reference rule"))?;

        for c in 0..n {
            let scores: Vec<u64> = (1..=n).map(|i| e.level_score(c, i).unwrap()).collect();
            check(scores.windows(2).all(|w| w[0] <= w[1]), || ctx("level monotonicity"))?;
            check(scores[n - 1] == e.approval_score(c).unwrap(), || ctx("last level"))?;
        }

        let solo = rng.gen_range(0..n);
        let single = e.restrict(&[solo]).unwrap().fallback_winners().unwrap();
        check(single.winners == vec![0], || ctx("voicedness"))?;

        let all: Vec<usize> = (0..n).collect();
        check(
            e.restrict(&all).unwrap().fallback_winners().unwrap() == result,
            || ctx("restriction to all candidates"),
        )?;
        let keep: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.6)).collect();
        if !keep.is_empty() {
            let restricted = e.restrict(&keep).unwrap().fallback_winners().unwrap();
            let among = e.winners_among(&keep).unwrap();
            let mapped: Vec<usize> = restricted.winners.iter().map(|&i| keep[i]).collect();
            check(mapped == among.winners, || ctx("restriction identity"))?;
        }

        let mask: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        let first: Vec<usize> = (0..n).filter(|&c| mask[c]).collect();
        let second: Vec<usize> = (0..n).filter(|&c| !mask[c]).collect();
        for rule in [TieRule::TiesEliminate, TieRule::TiesPromote] {
            let ab = evaluate_partition_candidates(&e, &first, &second, true, rule).unwrap();
            let ba = evaluate_partition_candidates(&e, &second, &first, true, rule).unwrap();
            check(ab == ba, || ctx("run-off partition symmetry"))?;
        }
        let side = |members: &[usize]| {
            if members.is_empty() {
                Vec::new()
            } else {
                e.winners_among(members).unwrap().winners
            }
        };
        let mut finalists = TieRule::TiesEliminate.promoted(side(&first));
        finalists.extend(TieRule::TiesEliminate.promoted(side(&second)));
        check(finalists.len() <= 2, || ctx("ties-eliminate finalist bound"))?;
        let te = evaluate_partition_candidates(&e, &first, &second, true, TieRule::TiesEliminate)
            .unwrap();
        check(te.winners.iter().all(|w| finalists.contains(w)), || ctx("final among finalists"))?;

        let split: Vec<u32> = e
            .ballots()
            .iter()
            .map(|b| rng.gen_range(0..=b.multiplicity()))
            .collect();
        let v1 = VoterSelection::from_counts(split.iter().enumerate().map(|(i, &s)| (i, s)));
        let v2 = VoterSelection::from_counts(
            e.ballots()
                .iter()
                .enumerate()
                .map(|(i, b)| (i, b.multiplicity() - split[i])),
        );
        for rule in [TieRule::TiesEliminate, TieRule::TiesPromote] {
            let ab = evaluate_partition_voters(&e, &v1, &v2, rule).unwrap();
            let ba = evaluate_partition_voters(&e, &v2, &v1, rule).unwrap();
            check(ab == ba, || ctx("voter partition symmetry"))?;
            if rule == TieRule::TiesEliminate {
                let part = |sel: &VoterSelection| {
                    let ballots = sel
                        .iter()
                        .filter(|&(_, k)| k > 0)
                        .map(|(i, k)| Ballot::new(e.ballots()[i].ranking().to_vec(), k))
                        .collect();
                    e.with_ballots(ballots).unwrap().fallback_winners().unwrap().winners
                };
                let mut finalists = rule.promoted(part(&v1));
                finalists.extend(rule.promoted(part(&v2)));
                check(finalists.len() <= 2, || ctx("ties-eliminate finalist bound"))?;
                check(ab.winners.iter().all(|w| finalists.contains(w)), || {
                    ctx("final among finalists")
                })?;
            }
        }
    }
    Ok(())
}
