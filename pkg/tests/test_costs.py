# -*- coding: utf-8 -*-
"""
成本函數與聚合測試
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.core import Aggregation, CostKind, CostSpec, Job, Schedule
from app.exceptions import InvalidInstanceError
from app.services.cost_service import (agent_cost, aggregate, combine, cost_vector, delay_cost,
                                       kendall, spearman)
from tests.conftest import instances


def schedules(m):
    return st.permutations(list(range(m))).map(lambda order: Schedule(tuple(order)))


class TestSwapCosts:

    def test_full_reversal(self):
        assert kendall(Schedule((0, 1, 2)), Schedule((2, 1, 0))) == 3

    def test_identity(self):
        schedule = Schedule((2, 0, 1))
        assert kendall(schedule, schedule) == 0
        assert spearman(schedule, schedule) == 0

    def test_kendall_counts_pairs(self):
        assert kendall(Schedule((0, 2, 1)), Schedule((1, 0, 2))) == 2

    def test_spearman_swap(self):
        assert spearman(Schedule((0, 1)), Schedule((1, 0))) == 2

    def test_job_set_mismatch(self):
        with pytest.raises(InvalidInstanceError):
            kendall(Schedule((0, 1)), Schedule((0, 2)))

    @given(st.integers(2, 7).flatmap(lambda m: st.tuples(schedules(m), schedules(m))))
    def test_symmetric_and_bounded(self, pair):
        tau, sigma = pair
        m = len(tau)
        assert kendall(tau, sigma) == kendall(sigma, tau)
        assert spearman(tau, sigma) == spearman(sigma, tau)
        assert 0 <= kendall(tau, sigma) <= m * (m - 1) // 2
        # Diaconis–Graham
        assert kendall(tau, sigma) <= spearman(tau, sigma) <= 2 * kendall(tau, sigma)

    @given(st.integers(2, 7).flatmap(lambda m: st.tuples(schedules(m), schedules(m), schedules(m))))
    def test_triangle_inequality(self, triple):
        a, b, c = triple
        assert kendall(a, c) <= kendall(a, b) + kendall(b, c)
        assert spearman(a, c) <= spearman(a, b) + spearman(b, c)

    @given(st.integers(1, 7).flatmap(lambda m: st.tuples(schedules(m), schedules(m))))
    def test_spearman_is_absolute_deviation_for_unit_jobs(self, pair):
        tau, sigma = pair
        jobs = [Job(job, 1) for job in range(len(tau))]
        assert spearman(tau, sigma) == agent_cost(CostKind.D, tau, sigma, jobs)


class TestDelayCosts:

    @pytest.mark.parametrize('kind, expected', [
        (CostKind.T, 3), (CostKind.U, 1), (CostKind.L, 3),
        (CostKind.E, 0), (CostKind.D, 3), (CostKind.SD, 9),
    ])
    def test_late_job(self, kind, expected):
        assert delay_cost(kind, 8, 5) == expected

    @pytest.mark.parametrize('kind, expected', [
        (CostKind.T, 0), (CostKind.U, 0), (CostKind.L, -2),
        (CostKind.E, 2), (CostKind.D, 2), (CostKind.SD, 4),
    ])
    def test_early_job(self, kind, expected):
        assert delay_cost(kind, 3, 5) == expected

    def test_agent_tardiness(self, two_agents):
        tau = Schedule((0, 2, 1))
        costs = [agent_cost(CostKind.T, tau, sigma, two_agents.jobs) for sigma in two_agents.preferred]
        assert costs == [0, 21]


class TestAggregation:

    @pytest.mark.parametrize('order, expected', [
        ((0, 2, 1), 21), ((0, 1, 2), 25), ((1, 0, 2), 10), ((1, 2, 0), 7),
    ])
    def test_tardiness_of_sample_schedules(self, two_agents, order, expected):
        assert aggregate(CostSpec(CostKind.T), two_agents, Schedule(order)) == expected

    def test_max_and_lp(self, two_agents):
        tau = Schedule((1, 2, 0))
        assert aggregate(CostSpec(CostKind.T, Aggregation.MAX), two_agents, tau) == 6
        assert aggregate(CostSpec(CostKind.T, Aggregation.LP, 2), two_agents, tau) == 6 ** 2 + 1 ** 2

    def test_weights_multiply(self, five_agents):
        vector = cost_vector(CostKind.T, five_agents, Schedule((0, 2, 1)))
        assert vector.n == 5
        assert sorted(vector.per_agent) == [0, 0, 1, 2, 2]
        assert vector.total == 5
        assert vector.worst == 2

    def test_combine_rejects_negative_costs_for_max(self):
        with pytest.raises(ValueError):
            combine(CostSpec(CostKind.T, Aggregation.MAX), [-1, 2], [1, 1])

    def test_lateness_may_be_negative(self, two_agents):
        assert aggregate(CostSpec(CostKind.L), two_agents, Schedule((2, 1, 0))) < 0


class TestUnitSizeIdentity:

    @settings(max_examples=100, deadline=None)
    @given(st.data())
    def test_spearman_is_twice_tardiness(self, data):
        profile = data.draw(instances(max_jobs=7, unit=True))
        tau = data.draw(schedules(profile.m))
        for sigma in profile.preferred:
            spearman_cost = agent_cost(CostKind.S, tau, sigma, profile.jobs)
            tardiness = agent_cost(CostKind.T, tau, sigma, profile.jobs)
            assert spearman_cost == 2 * tardiness

    @settings(max_examples=50, deadline=None)
    @given(instances(max_jobs=6))
    def test_equal_total_completion_means_equal_lateness(self, profile):
        forward = Schedule(tuple(range(profile.m)))
        reverse = Schedule(tuple(reversed(range(profile.m))))
        total_completion = {
            schedule: sum(schedule.completion_times(profile.jobs).values())
            for schedule in (forward, reverse)
        }
        spec = CostSpec(CostKind.L)
        difference = aggregate(spec, profile, forward) - aggregate(spec, profile, reverse)
        assert difference == profile.n * (total_completion[forward] - total_completion[reverse])
