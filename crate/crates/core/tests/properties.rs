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

mod common;

use fvcontrol::format::{parse_election, write_election};
use fvcontrol::{Ballot, CandidateId, Election};
use proptest::prelude::*;

fn election_strategy() -> impl Strategy<Value = Election> {
    (1usize..=6).prop_flat_map(|n| {
        let ballot = (Just(n), proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=n))
            .prop_flat_map(|(_, chosen)| (Just(chosen.clone()).prop_shuffle(), 1u32..=4))
            .prop_map(|(ranking, mult)| Ballot::new(ranking, mult));
        proptest::collection::vec(ballot, 0..8).prop_map(move |ballots| {
            let ids = (0..n)
                .map(|i| CandidateId::new(format!("c{i}")).unwrap())
                .collect();
            Election::new(ids, ballots).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn winners_match_reference_rule(e in election_strategy()) {
        let result = e.fallback_winners().unwrap();
        let (winners, level) = common::naive_winners(e.num_candidates(), &common::voters_of(&e));
        prop_assert_eq!(&result.winners, &winners);
        prop_assert_eq!(result.level(), level);
    }

    #[test]
    fn canonical_text_round_trips(e in election_strategy()) {
        let text = write_election(&e);
        let back = parse_election(&text).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(write_election(&back), text);
    }

    #[test]
    fn winners_are_nonempty_and_scores_bounded(e in election_strategy()) {
        let result = e.fallback_winners().unwrap();
        prop_assert!(!result.winners.is_empty());
        for c in 0..e.num_candidates() {
            prop_assert!(e.approval_score(c).unwrap() <= e.voter_count());
        }
        if let Some(level) = result.level() {
            let top = e.level_score(result.winners[0], level).unwrap();
            prop_assert!(top >= fvcontrol::majority_threshold(e.voter_count()));
        }
    }

    #[test]
    fn restricting_preserves_relative_order(e in election_strategy(), keep_mask in any::<u8>()) {
        let keep: Vec<usize> = (0..e.num_candidates()).filter(|i| keep_mask >> i & 1 == 1).collect();
        prop_assume!(!keep.is_empty());
        let r = e.restrict(&keep).unwrap();
        prop_assert_eq!(r.voter_count(), e.voter_count());
        for (orig, small) in e.ballots().iter().zip(r.ballots()) {
            let expected: Vec<usize> = orig
                .ranking()
                .iter()
                .filter_map(|c| keep.iter().position(|k| k == c))
                .collect();
            prop_assert_eq!(small.ranking(), expected.as_slice());
        }
    }
}

#[test]
fn structural_properties_on_random_elections() {
    common::check_properties(0xfa11_bac4, 1000).unwrap();
}
