# -*- coding: utf-8 -*-
"""
公理檢查服務 - Pareto 效率、PTA Condorcet 悖論比例與 reinforcement 隨機測試
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any, Dict, List, Optional, Union

from app.core import Axiom, PreferenceProfile, Schedule
from app.exceptions import PreconditionError
from app.services.condorcet_service import build_tournament, is_pta_condorcet_consistent
from app.services.profile_service import generate_mallows
from app.services.rule_service import Rule, resolve_rule
from app.services.solver_service import brute_force
from app.utils.helpers import derive_seed, make_rng
from config.settings import Config

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AxiomReport:
    """公理檢查結果；witnesses 非空若且唯若 holds 為否"""
    axiom: Axiom
    witnesses: List[Any] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return not self.witnesses

    def format(self, profile: Optional[PreferenceProfile] = None) -> str:
        status = "holds" if self.holds else f"violated ({len(self.witnesses)} witnesses)"
        lines = [f"{self.axiom.value}: {status}"]
        for key, value in self.details.items():
            lines.append(f"  {key}: {value}")
        for witness in self.witnesses:
            if isinstance(witness, tuple) and profile is not None:
                witness = tuple(profile.label(j) for j in witness)
            lines.append(f"  witness: {witness}")
        return "\n".join(lines)


def unanimous_pairs(profile: PreferenceProfile) -> List[tuple]:
    """所有代理人都把 k 排在 l 之前的 (k, l)"""
    support = profile.support_matrix
    n = profile.n
    return [(k, l) for k in range(profile.m) for l in range(profile.m) if k != l and support[k, l] == n]


def check_pareto(schedule: Schedule, profile: PreferenceProfile) -> AxiomReport:
    """
    Pareto 效率：列出所有被一致偏好、但排程順序相反的工作對

    Args:
        schedule: 排程
        profile: 實例

    Returns:
        AxiomReport，witness 為 (k, l)：所有人偏好 k 在 l 之前
    """
    witnesses = [(k, l) for k, l in unanimous_pairs(profile) if schedule.precedes(l, k)]
    return AxiomReport(Axiom.PARETO, witnesses)


def check_pta_condorcet(schedule: Schedule, profile: PreferenceProfile) -> AxiomReport:
    """PTA Condorcet 一致性；mutual pair 也列為 witness"""
    report = is_pta_condorcet_consistent(schedule, profile)
    details = {'mutual_pairs': len(report.mutual_pairs)} if report.mutual_pairs else {}
    return AxiomReport(Axiom.PTA_CONDORCET, report.violations + report.mutual_pairs, details)


def paradox_rate(schedule: Schedule, profile: PreferenceProfile) -> Fraction:
    """
    違反單方向 PTA 擊敗關係的工作對比例

    Args:
        schedule: 排程
        profile: 至少兩個工作的實例

    Returns:
        violations / C(m, 2)
    """
    if profile.m < 2:
        raise PreconditionError("paradox rate needs at least two jobs")
    tournament = build_tournament(profile)
    violated = sum(1 for k, l in tournament.decided_pairs() if schedule.precedes(l, k))
    return Fraction(violated, comb(profile.m, 2))


def _unique_optimum(rule: Rule, profile: PreferenceProfile) -> bool:
    return brute_force(profile, rule.cost_spec).optimum_count == 1


def check_reinforcement(rule: Rule, first: PreferenceProfile,
                        second: PreferenceProfile) -> Optional[Dict[str, Any]]:
    """
    兩組代理人選出相同排程時，聯集也必須選出它

    Returns:
        反例 (dict)；成立或兩組結果不同時為 None
    """
    schedule = rule(first)
    if rule(second) != schedule:
        return None
    union = first.merge(second)
    joint = rule(union)
    if joint == schedule:
        return None
    return {
        'lengths': first.lengths,
        'first': [(s.order, w) for s, w in first.agents()],
        'second': [(s.order, w) for s, w in second.agents()],
        'common': schedule.order,
        'union': joint.order,
    }


def test_reinforcement(rule: Union[str, Rule], m: int, trials: int, seed: int,
                       p_max: int = Config.DEFAULT_P_MAX, max_agents: int = 7) -> AxiomReport:
    """
    Reinforcement 隨機測試

    每次試驗在共同的隨機參考排列附近，以隨機 φ 的 Mallows 模型抽出兩組代理人
    (工作數 2..m、長度 1..p_max)。成本規則只在三份資料的最佳解都唯一時檢查，
    最佳解不唯一的試驗計入 skipped。

    Args:
        rule: 規則識別碼或 Rule
        m: 最大工作數
        trials: 試驗次數
        seed: 亂數種子
        p_max: 最大工作長度
        max_agents: 每組最多代理人數

    Returns:
        AxiomReport
    """
    rule = resolve_rule(rule) if isinstance(rule, str) else rule
    if m < 2:
        raise PreconditionError("reinforcement trials need at least two jobs")

    witnesses = []
    skipped = 0
    agreements = 0
    for trial in range(trials):
        rng = make_rng(seed, trial)
        jobs = int(rng.integers(2, m, endpoint=True))
        lengths = rng.integers(1, p_max, size=jobs, endpoint=True).tolist()
        reference = rng.permutation(jobs).tolist()
        groups = []
        for part in (0, 1):
            phi = float(rng.uniform(0.2, 1.0))
            agents = int(rng.integers(1, max_agents, endpoint=True))
            profile = generate_mallows(jobs, agents, phi, reference, derive_seed(seed, trial, part))
            groups.append(profile.with_lengths(lengths))
        first, second = groups

        if rule.is_cost_rule and not (_unique_optimum(rule, first) and _unique_optimum(rule, second)):
            skipped += 1
            continue
        if rule(first) != rule(second):
            continue
        agreements += 1
        if rule.is_cost_rule and not _unique_optimum(rule, first.merge(second)):
            skipped += 1
            continue

        witness = check_reinforcement(rule, first, second)
        if witness is not None:
            witness['trial'] = trial
            witnesses.append(witness)
            logger.debug(f"reinforcement 反例 (trial {trial}): {witness}")

    if skipped:
        logger.warning(f"{rule.name}: {skipped} 次試驗因最佳解不唯一而略過")
    logger.info(f"reinforcement {rule.name}: {trials} trials, {agreements} agreements, "
                f"{len(witnesses)} witnesses")
    return AxiomReport(Axiom.REINFORCEMENT, witnesses,
                       {'rule': rule.name, 'trials': trials, 'agreements': agreements, 'skipped': skipped})


# pytest 不應把 test_reinforcement 當成測試函數收集
test_reinforcement.__test__ = False
