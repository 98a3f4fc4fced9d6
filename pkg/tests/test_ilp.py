# -*- coding: utf-8 -*-
"""
ILP 先後順序模型匯出測試
"""

import itertools

import numpy as np
import pytest

from app.core import Aggregation, CostKind, CostSpec, Schedule
from app.exceptions import UnsupportedCombinationError
from app.services.cost_service import aggregate
from app.services.ilp_service import LINEAR_KINDS, build_model, export_ilp, prec
from tests.conftest import random_instance


@pytest.mark.parametrize('kind', LINEAR_KINDS)
def test_model_objective_matches_every_schedule(kind):
    rng = np.random.default_rng(17)
    spec = CostSpec(kind)
    for _ in range(5):
        profile = random_instance(rng, int(rng.integers(2, 5, endpoint=True)), 4, 6)
        model = build_model(profile, spec)
        for order in itertools.permutations(range(profile.m)):
            schedule = Schedule(order)
            assert model.evaluate(schedule) == aggregate(spec, profile, schedule)


def test_ordering_constraints(two_agents):
    model = build_model(two_agents, CostSpec(CostKind.T))
    assert len(model.constraints_named('asym_')) == 3
    assert len(model.constraints_named('trans_')) == 6
    assert prec(0, 1) in model.binaries
    assert 't_0_0' in model.auxiliaries


def test_cyclic_precedences_are_infeasible(two_agents):
    model = build_model(two_agents, CostSpec(CostKind.K))
    cyclic = {prec(0, 1): 1, prec(1, 2): 1, prec(2, 0): 1,
              prec(1, 0): 0, prec(2, 1): 0, prec(0, 2): 0}
    assert not model.is_feasible(cyclic)


def test_lp_text_sections(two_agents):
    text = export_ilp(two_agents, CostSpec(CostKind.T))
    lines = text.splitlines()
    assert lines[0].startswith('\\*')
    for section in ('Minimize', 'Subject To', 'Bounds', 'Binary', 'End'):
        assert section in lines
    assert ' asym_0_1: prec_0_1 + prec_1_0 = 1' in lines
    assert ' 0 <= t_0_0' in lines


def test_unit_penalty_uses_binary_indicators(two_agents):
    model = build_model(two_agents, CostSpec(CostKind.U))
    assert 'u_1_0' in model.binaries
    assert not model.auxiliaries


def test_lateness_has_only_a_constant_offset(two_agents):
    model = build_model(two_agents, CostSpec(CostKind.L))
    assert model.objective_constant != 0
    assert model.constraints_named('tard_') == []


@pytest.mark.parametrize('spec', [
    CostSpec(CostKind.SD),
    CostSpec(CostKind.T, Aggregation.MAX),
    CostSpec(CostKind.T, Aggregation.LP, 2),
])
def test_nonlinear_objectives_are_rejected(two_agents, spec):
    with pytest.raises(UnsupportedCombinationError):
        export_ilp(two_agents, spec)
