# -*- coding: utf-8 -*-
"""
規則註冊表 - 以文字識別碼選擇排程規則

    sum-<f>, max-<f>, lp<p>-<f>     精確的成本最小化規則
    brute-<agg>-<f>                 以暴力列舉求解的同一規則
    psf-identity, psf-square        h-psf 規則
    pta-copeland, pta-minimax       PTA Condorcet 規則
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

from app.core import CostSpec, PreferenceProfile, Schedule
from app.exceptions import InvalidSpecError
from app.services.condorcet_service import pta_copeland, pta_iterative_minimax
from app.services.cost_service import CostVector, cost_vector
from app.services.psf_service import PsfSpec, psf_rule
from app.services.solver_service import SolveReport, brute_force, solve

logger = logging.getLogger(__name__)

_COST_RULE = re.compile(r'^(brute-)?(sum|max|lp(\d+))-([a-z]+)$', re.IGNORECASE)

POSITIONAL_RULES: Dict[str, Callable[[PreferenceProfile], Schedule]] = {
    'psf-identity': lambda profile: psf_rule(profile, PsfSpec('identity')),
    'psf-square': lambda profile: psf_rule(profile, PsfSpec('square')),
    'pta-copeland': pta_copeland,
    'pta-minimax': pta_iterative_minimax,
}


@dataclass(frozen=True)
class RuleResult:
    """規則輸出：排程、(成本規則的) 成本向量與診斷資訊"""
    rule: str
    schedule: Schedule
    costs: Optional[CostVector] = None
    report: Optional[SolveReport] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def objective(self) -> Optional[int]:
        return self.report.objective if self.report else None


@dataclass(frozen=True)
class Rule:
    """可呼叫的排程規則"""
    name: str
    cost_spec: Optional[CostSpec] = None
    brute: bool = False

    @property
    def is_cost_rule(self) -> bool:
        return self.cost_spec is not None

    def run(self, profile: PreferenceProfile) -> RuleResult:
        if self.cost_spec is None:
            schedule = POSITIONAL_RULES[self.name](profile)
            return RuleResult(self.name, schedule)
        report = brute_force(profile, self.cost_spec) if self.brute else solve(profile, self.cost_spec)
        diagnostics = {'method': report.method.value, 'nodes': report.nodes_explored,
                       'elapsed': report.elapsed}
        if report.optimum_count is not None:
            diagnostics['optimum_count'] = report.optimum_count
        return RuleResult(self.name, report.schedule,
                          cost_vector(self.cost_spec, profile, report.schedule), report, diagnostics)

    def __call__(self, profile: PreferenceProfile) -> Schedule:
        return self.run(profile).schedule


def resolve_rule(name: str) -> Rule:
    """
    解析規則識別碼

    Args:
        name: 例如 'sum-T'、'lp2-SD'、'brute-max-U'、'pta-copeland'

    Returns:
        Rule
    """
    key = name.strip()
    if key.lower() in POSITIONAL_RULES:
        return Rule(key.lower())

    match = _COST_RULE.match(key)
    if not match:
        raise InvalidSpecError(f"unknown rule: {name}")
    brute, aggregation, p, cost = match.groups()
    spec = CostSpec.parse(cost, 'lp' if p else aggregation, int(p) if p else None)
    return Rule(f"{'brute-' if brute else ''}{spec.name}", spec, brute=bool(brute))


def rule_for_spec(cost_spec: CostSpec) -> Rule:
    return Rule(cost_spec.name, cost_spec)


def available_rules() -> str:
    return "sum-<f>, max-<f>, lp<p>-<f>, brute-<agg>-<f>, " + ", ".join(POSITIONAL_RULES)
