"""Ballot-completion models, loser ranking, and counterfactual diffs."""

from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_profile
from stvflow import (
    ElectionConfig,
    NoLosers,
    PAPER_PRECISION,
    SeatsMismatch,
    StoppingRule,
    complete_l1,
    complete_l1_l2,
    complete_proportional,
    diff_winners,
    largest_remainder,
    quota_failure_analysis,
    rank_losers,
    run_completion,
    tabulate,
)

D = Decimal


def ballots_as_dict(profile):
    return {b.ranking: b.multiplicity for b in profile.ballots}


class TestRankLosers:
    def test_ward_order_mixes_eliminated_and_standing(self, ward_record):
        # Davidson survives on 181; the others fall at 166 / 123.38 / 95
        assert rank_losers(ward_record) == (5, 6, 7, 8)

    def test_single_loser(self, alaska, paper_config):
        assert rank_losers(tabulate(alaska(2), paper_config)) == (2,)

    def test_no_losers_when_everyone_wins(self):
        record = tabulate(make_profile((((1,), 5), ((2,), 1)), 2, ("A", "B")))
        with pytest.raises(NoLosers):
            rank_losers(record)


class TestL1:
    def test_alaska_append(self, alaska, paper_config):
        profile = alaska(2)
        record = tabulate(profile, paper_config)
        completed = complete_l1(profile, record)
        after = ballots_as_dict(completed)
        assert after[(3, 2)] == 23733  # bullet Peltola gains Palin
        assert after[(1, 2)] == 11262
        assert after[(1, 2, 3)] == 27070  # already ranked her: untouched
        assert completed.total_voters == profile.total_voters

    def test_alaska_flips_the_second_seat(self, alaska, paper_config):
        _, outcome = run_completion(alaska(2), paper_config, "l1")
        assert outcome.model == "l1"
        assert outcome.seed is None
        assert outcome.baseline_winners == (3, 1)
        assert outcome.gained == (2,)
        assert outcome.lost == (1,)
        assert outcome.seats_changed == 1
        assert outcome.party_swap_only  # Republican seat moves within party

    def test_full_ballots_cannot_extend(self, alaska, paper_config):
        profile = alaska(2)
        completed = complete_l1(profile, tabulate(profile, paper_config))
        for ballot in completed.ballots:
            assert len(ballot.ranking) <= profile.n


class TestL1L2:
    def test_single_missing_loser_appended(self, ward_profile, ward_record):
        completed = complete_l1_l2(ward_profile, ward_record, seed=3)
        after = ballots_as_dict(completed)
        assert after[(5, 6)] == 181  # Davidson bullets gain McCutcheon
        assert after[(6, 5)] == 166  # and vice versa
        assert completed.total_voters == ward_profile.total_voters

    def test_pairs_split_by_coin_flip(self, ward_profile, ward_record):
        completed = complete_l1_l2(ward_profile, ward_record, seed=3)
        after = ballots_as_dict(completed)
        heads = after.get((1, 5, 6), 0)
        tails = after.get((1, 6, 5), 0)
        assert heads + tails == 1925
        assert 0 < heads < 1925  # a 1925-flip run is effectively never one-sided

    def test_deterministic_per_seed(self, ward_profile, ward_record):
        one = complete_l1_l2(ward_profile, ward_record, seed=11)
        two = complete_l1_l2(ward_profile, ward_record, seed=11)
        other = complete_l1_l2(ward_profile, ward_record, seed=12)
        assert ballots_as_dict(one) == ballots_as_dict(two)
        assert ballots_as_dict(one) != ballots_as_dict(other)

    def test_degrades_to_l1_with_single_loser(self, alaska, paper_config):
        profile = alaska(2)
        record = tabulate(profile, paper_config)
        assert ballots_as_dict(complete_l1_l2(profile, record, seed=5)) == ballots_as_dict(
            complete_l1(profile, record)
        )


class TestLargestRemainder:
    def test_seven_split_two_ways(self):
        assert largest_remainder(7, {1: 1, 2: 1}) == {1: 4, 2: 3}

    def test_published_proportions(self):
        assert largest_remainder(55, {2: 10, 3: 20, 4: 25}) == {2: 10, 3: 20, 4: 25}
        assert largest_remainder(11, {2: 10, 3: 20, 4: 25}) == {2: 2, 3: 4, 4: 5}

    def test_rejects_empty_weights(self):
        with pytest.raises(ValueError):
            largest_remainder(5, {})
        with pytest.raises(ValueError):
            largest_remainder(-1, {1: 1})

    @settings(max_examples=500, deadline=None)
    @given(
        st.integers(min_value=0, max_value=10_000),
        st.dictionaries(
            st.integers(min_value=1, max_value=9),
            st.integers(min_value=0, max_value=500),
            min_size=1,
            max_size=9,
        ),
    )
    def test_shares_sum_and_stay_within_one_of_quota(self, count, weights):
        if sum(weights.values()) == 0:
            return
        shares = largest_remainder(count, weights)
        assert sum(shares.values()) == count
        total = sum(weights.values())
        for key, share in shares.items():
            exact = count * weights[key] / total
            assert exact - 1 < share < exact + 1


class TestProportional:
    def test_published_ratio_example(self):
        profile = make_profile(
            (((1,), 11), ((1, 2), 10), ((1, 3), 20), ((1, 4), 25)),
            1,
            ("A", "B", "C", "D"),
        )
        completed = complete_proportional(profile)
        assert ballots_as_dict(completed) == {(1, 2): 12, (1, 3): 24, (1, 4): 30}
        assert completed.total_voters == 66

    def test_unobserved_prefix_stays(self):
        profile = make_profile((((1,), 4), ((2, 3), 2)), 1, ("A", "B", "C"))
        completed = complete_proportional(profile)
        after = ballots_as_dict(completed)
        assert after[(1,)] == 4  # nobody ever continued from A

    def test_extended_ballots_reenter_later_passes(self):
        profile = make_profile(
            (((1,), 6), ((1, 2), 2), ((1, 2, 3), 4)), 1, ("A", "B", "C")
        )
        completed = complete_proportional(profile)
        assert ballots_as_dict(completed) == {(1, 2, 3): 12}


class TestDiff:
    def test_seats_mismatch(self, alaska, paper_config):
        with pytest.raises(SeatsMismatch):
            diff_winners(tabulate(alaska(1), paper_config), tabulate(alaska(2), paper_config))

    def test_no_change_is_not_a_swap(self, alaska, paper_config):
        record = tabulate(alaska(2), paper_config)
        outcome = diff_winners(record, record)
        assert outcome.seats_changed == 0
        assert not outcome.party_swap_only

    def test_independents_never_swap_as_a_party(self):
        types_a = (((1,), 5), ((3,), 4), ((2,), 1))
        types_b = (((2,), 5), ((3,), 4), ((1,), 1))
        names = ("Alba", "Brodie", "Cameron")
        parties = ("Independent", "Independent", "SNP")
        baseline = tabulate(make_profile(types_a, 2, names, parties))
        flipped = tabulate(make_profile(types_b, 2, names, parties))
        outcome = diff_winners(baseline, flipped)
        assert outcome.seats_changed == 1
        assert not outcome.party_swap_only  # Independent is not one party

    def test_same_party_swap(self):
        types_a = (((1,), 5), ((3,), 4), ((2,), 1))
        types_b = (((2,), 5), ((3,), 4), ((1,), 1))
        names = ("Alba", "Brodie", "Cameron")
        parties = ("SNP", "SNP", "Independent")
        outcome = diff_winners(
            tabulate(make_profile(types_a, 2, names, parties)),
            tabulate(make_profile(types_b, 2, names, parties)),
        )
        assert outcome.seats_changed == 1
        assert outcome.party_swap_only


class TestQuotaFailure:
    def test_ward_two_seats_below_quota_under_every_rule(self, ward_profile, paper_config):
        failures = quota_failure_analysis(ward_profile, paper_config)
        assert set(failures) == set(StoppingRule)
        for rule in StoppingRule:
            assert failures[rule].seats == 4
            assert failures[rule].winners_below_quota == 2

    def test_alaska_depends_on_rule(self, alaska, paper_config):
        failures = quota_failure_analysis(alaska(2), paper_config)
        assert failures[StoppingRule.EARLY_MATHEMATICAL].winners_below_quota == 1
        assert failures[StoppingRule.UNTIL_EXACT].winners_below_quota == 0
