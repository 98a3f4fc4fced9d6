# -*- coding: utf-8 -*-
"""
領域型別測試
"""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from app.core import (Aggregation, CostKind, CostSpec, Job, PreferenceProfile, Schedule,
                      completion_times, position, precedes)
from app.exceptions import InvalidInstanceError, InvalidSpecError, UnsupportedCombinationError


def jobs_of(*lengths):
    return [Job(i, p) for i, p in enumerate(lengths)]


class TestCompletionTimes:

    def test_prefix_sums_follow_the_schedule(self):
        times = completion_times(Schedule((0, 2, 1)), jobs_of(20, 5, 1))
        assert times == {0: 20, 2: 21, 1: 26}

    def test_single_job(self):
        assert completion_times(Schedule((0,)), jobs_of(7)) == {0: 7}

    def test_two_jobs_reversed(self):
        assert Schedule((1, 0)).completion_times(jobs_of(2, 3)) == {1: 3, 0: 5}

    def test_mismatched_job_set(self):
        with pytest.raises(InvalidInstanceError):
            completion_times(Schedule((0, 1)), jobs_of(1, 2, 3))

    @given(st.lists(st.integers(1, 50), min_size=1, max_size=8), st.randoms())
    def test_no_gaps(self, lengths, rnd):
        order = list(range(len(lengths)))
        rnd.shuffle(order)
        times = completion_times(Schedule(tuple(order)), jobs_of(*lengths))
        start = 0
        for job in order:
            assert times[job] == start + lengths[job]
            start = times[job]
        assert start == sum(lengths)


class TestPositions:

    def test_position_counts_predecessors(self):
        schedule = Schedule((0, 2, 1))
        assert position(2, schedule) == 1
        assert position(0, Schedule((0,))) == 0
        assert position(0, Schedule((1, 0))) == 1

    def test_precedes(self):
        schedule = Schedule((0, 2, 1))
        assert precedes(0, 1, schedule)
        assert not precedes(1, 0, schedule)
        assert precedes(2, 1, schedule)

    def test_unknown_job(self):
        with pytest.raises(InvalidInstanceError):
            position(5, Schedule((0, 1)))
        with pytest.raises(InvalidInstanceError):
            precedes(0, 9, Schedule((0, 1)))

    def test_repeated_job_rejected(self):
        with pytest.raises(InvalidInstanceError):
            Schedule((0, 1, 1))

    @given(st.permutations(list(range(7))))
    def test_position_is_a_bijection(self, order):
        schedule = Schedule(tuple(order))
        assert sorted(schedule.position(j) for j in range(7)) == list(range(7))


class TestJob:

    def test_processing_time_must_be_positive(self):
        with pytest.raises(InvalidInstanceError):
            Job(0, 0)


class TestPreferenceProfile:

    def test_identical_orders_are_merged(self):
        profile = PreferenceProfile.from_orders([(0, 1), (1, 0), (0, 1)])
        assert profile.n == 3
        assert dict(zip((s.order for s in profile.preferred), profile.multiplicities)) == {
            (0, 1): 2, (1, 0): 1}

    def test_orders_must_share_the_job_set(self):
        with pytest.raises(InvalidInstanceError):
            PreferenceProfile.from_orders([(0, 1, 2), (0, 1)])

    def test_non_positive_weight(self):
        with pytest.raises(InvalidInstanceError):
            PreferenceProfile.from_orders([(0, 1)], weights=[0])

    def test_due_matrix_and_support(self, two_agents):
        assert two_agents.due_matrix.tolist() == [[20, 26, 21], [25, 5, 26]]
        assert two_agents.support_matrix[0, 2] == 2
        assert two_agents.support_matrix[2, 0] == 0
        assert two_agents.support_matrix[1, 0] == 1

    def test_merge_adds_multiplicities(self, five_agents):
        merged = five_agents.merge(five_agents)
        assert merged.n == 10
        assert len(merged.preferred) == 3

    def test_merge_requires_equal_lengths(self, five_agents, two_agents):
        with pytest.raises(InvalidInstanceError):
            five_agents.merge(two_agents)

    def test_unit_copy_keeps_preferences(self, two_agents):
        unit = two_agents.unit_copy()
        assert unit.lengths == (1, 1, 1)
        assert unit.preferred == two_agents.preferred

    def test_labels_in_formatted_schedule(self, two_agents):
        assert two_agents.format_schedule(Schedule((1, 2, 0))) == "J2,J3,J1"


class TestCostSpec:

    def test_names(self):
        assert CostSpec(CostKind.T).name == 'sum-T'
        assert CostSpec.parse('sd', 'max').name == 'max-SD'
        assert CostSpec.parse('T', 'lp', 3).name == 'lp3-T'

    def test_lp_defaults_to_two(self):
        assert CostSpec.parse('T', 'lp').p == 2

    def test_lp_needs_p_at_least_two(self):
        with pytest.raises(InvalidSpecError):
            CostSpec(CostKind.T, Aggregation.LP, 1)

    def test_lateness_is_sum_only(self):
        with pytest.raises(UnsupportedCombinationError):
            CostSpec.parse('L', 'lp')
        with pytest.raises(UnsupportedCombinationError):
            CostSpec.parse('L', 'max')

    def test_unknown_names(self):
        with pytest.raises(InvalidSpecError):
            CostSpec.parse('X')
        with pytest.raises(InvalidSpecError):
            CostSpec.parse('T', 'median')
