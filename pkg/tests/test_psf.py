# -*- coding: utf-8 -*-
"""
h-psf 規則測試
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.core import CostKind, CostSpec, PreferenceProfile
from app.exceptions import InvalidSpecError
from app.services.psf_service import NAMED_TRANSFORMS, PsfSpec, h_score, h_scores, psf_rule
from app.services.solver_service import solve


class TestScores:

    def test_long_jobs_outscore_the_short_one(self, short_job):
        identity = PsfSpec('identity')
        assert h_score(0, short_job, identity) == 2302
        assert h_score(1, short_job, identity) == 2302
        assert h_score(2, short_job, identity) == 1960

    def test_short_job_is_scheduled_last(self, short_job):
        assert psf_rule(short_job, PsfSpec('identity')).order == (0, 1, 2)

    def test_tardiness_rule_starts_with_the_short_job(self, short_job):
        assert solve(short_job, CostSpec(CostKind.T)).schedule.order == (2, 0, 1)

    def test_unit_lengths_give_borda(self):
        profile = PreferenceProfile.from_orders([(0, 1, 2), (1, 0, 2), (0, 2, 1)])
        assert h_scores(profile, PsfSpec('identity')) == [5, 3, 1]

    def test_square_transform(self, short_job):
        scores = h_scores(short_job, PsfSpec('square'))
        assert scores[2] == 98 * 20 ** 2
        assert scores[0] == 151 * 11 ** 2 + 151 * 1 + 49 * 10 ** 2

    def test_custom_table(self):
        profile = PreferenceProfile.from_orders([(0, 1)], lengths=(2, 3))
        h = PsfSpec.custom([0, 1, 5, 10])
        assert h_scores(profile, h) == [10, 0]
        assert h(2) == 5

    def test_custom_table_too_short(self):
        profile = PreferenceProfile.from_orders([(0, 1)], lengths=(2, 3))
        with pytest.raises(InvalidSpecError):
            h_scores(profile, PsfSpec.custom([0, 1]))

    def test_custom_table_must_increase(self):
        with pytest.raises(InvalidSpecError):
            PsfSpec.custom([0, 2, 2])

    def test_unknown_job(self, short_job):
        with pytest.raises(InvalidSpecError):
            h_score(7, short_job, PsfSpec())


class TestTieBreak:

    def test_equal_scores_prefer_the_shorter_job(self):
        profile = PreferenceProfile.from_orders([(0, 1, 2), (1, 2, 0), (0, 2, 1)], lengths=(2, 1, 1))
        assert h_scores(profile, PsfSpec()) == [4, 4, 3]
        assert psf_rule(profile, PsfSpec()).order == (1, 0, 2)

    def test_equal_scores_and_lengths_fall_back_to_ids(self):
        profile = PreferenceProfile.from_orders([(0, 1), (1, 0)], lengths=(3, 3))
        assert psf_rule(profile, PsfSpec()).order == (0, 1)


class TestProperties:

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.permutations(list(range(5))), min_size=20, max_size=20))
    def test_unit_identity_matches_borda_tally(self, orders):
        profile = PreferenceProfile.from_orders(orders)
        tally = [0] * 5
        for order in orders:
            for place, job in enumerate(order):
                tally[job] += 4 - place
        expected = tuple(sorted(range(5), key=lambda job: (-tally[job], job)))
        assert psf_rule(profile, PsfSpec('identity')).order == expected

    @pytest.mark.parametrize('transform', NAMED_TRANSFORMS)
    @settings(max_examples=50, deadline=None)
    @given(data=st.data())
    def test_single_agent_schedule_is_reproduced(self, transform, data):
        m = data.draw(st.integers(2, 7))
        order = tuple(data.draw(st.permutations(list(range(m)))))
        lengths = data.draw(st.lists(st.integers(1, 10), min_size=m, max_size=m))
        profile = PreferenceProfile.from_orders([order], lengths=lengths)
        assert psf_rule(profile, PsfSpec(transform)).order == order
