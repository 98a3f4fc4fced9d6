# -*- coding: utf-8 -*-
"""
成本服務 - 交換成本 (K, S)、延遲成本 (T, U, L, E, D, SD) 與聚合方式
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from app.core import (Aggregation, CostKind, CostSpec, Job, PreferenceProfile, Schedule,
                      completion_times, check_same_jobs)
from app.exceptions import InvalidInstanceError, UnsupportedCombinationError

logger = logging.getLogger(__name__)


def _check_same_order_set(tau: Schedule, sigma: Schedule) -> None:
    if sorted(tau.order) != sorted(sigma.order):
        raise InvalidInstanceError(f"schedules {tau.order} and {sigma.order} have different jobs")


def kendall(tau: Schedule, sigma: Schedule) -> int:
    """順序與 sigma 相反的工作對數 (Kendall tau 距離)"""
    _check_same_order_set(tau, sigma)
    ranks = np.array([sigma.position(job) for job in tau.order], dtype=np.int64)
    return int(np.triu(ranks[:, None] > ranks[None, :], 1).sum())


def spearman(tau: Schedule, sigma: Schedule) -> int:
    """位置差的絕對值總和 (Spearman footrule)"""
    _check_same_order_set(tau, sigma)
    return sum(abs(tau.position(job) - sigma.position(job)) for job in tau.order)


def delay_cost(kind: CostKind, c: int, d: int) -> int:
    """
    單一工作的延遲成本

    Args:
        kind: T, U, L, E, D 或 SD
        c: 候選排程中的完成時間
        d: 代理人偏好排程中的完成時間 (到期時間)

    Returns:
        整數成本 (只有 L 可能為負)
    """
    kind = CostKind(kind)
    if kind == CostKind.T:
        return max(0, c - d)
    if kind == CostKind.U:
        return 1 if c > d else 0
    if kind == CostKind.L:
        return c - d
    if kind == CostKind.E:
        return max(0, d - c)
    if kind == CostKind.D:
        return abs(c - d)
    if kind == CostKind.SD:
        return (c - d) ** 2
    raise UnsupportedCombinationError(f"{kind.value} is a swap cost, not a delay cost")


def delay_array(kind: CostKind, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """delay_cost 的陣列版本 (支援 broadcasting，回傳 int64)"""
    diff = np.asarray(c, dtype=np.int64) - np.asarray(d, dtype=np.int64)
    if kind == CostKind.T:
        return np.maximum(diff, 0)
    if kind == CostKind.U:
        return (diff > 0).astype(np.int64)
    if kind == CostKind.L:
        return diff
    if kind == CostKind.E:
        return np.maximum(-diff, 0)
    if kind == CostKind.D:
        return np.abs(diff)
    if kind == CostKind.SD:
        return diff * diff
    raise UnsupportedCombinationError(f"{CostKind(kind).value} is a swap cost, not a delay cost")


def agent_cost(kind: CostKind, tau: Schedule, sigma_a: Schedule, jobs: Sequence[Job]) -> int:
    """
    單一代理人對候選排程的成本

    Args:
        kind: 成本函數
        tau: 候選排程
        sigma_a: 代理人的偏好排程
        jobs: 工作清單

    Returns:
        整數成本
    """
    kind = CostKind(kind)
    check_same_jobs(tau, jobs)
    check_same_jobs(sigma_a, jobs)
    if kind == CostKind.K:
        return kendall(tau, sigma_a)
    if kind == CostKind.S:
        return spearman(tau, sigma_a)
    c = completion_times(tau, jobs)
    d = completion_times(sigma_a, jobs)
    return sum(delay_cost(kind, c[job.id], d[job.id]) for job in jobs)


def distinct_costs(kind: CostKind, profile: PreferenceProfile, tau: Schedule) -> np.ndarray:
    """每種不同偏好排程的成本 (長度為 distinct 數的 int64 陣列)"""
    kind = CostKind(kind)
    check_same_jobs(tau, profile.jobs)
    order = np.array(tau.order, dtype=np.int64)
    if kind == CostKind.K:
        ranks = profile.position_matrix[:, order]
        return np.triu(ranks[:, :, None] > ranks[:, None, :], 1).sum(axis=(1, 2)).astype(np.int64)
    if kind == CostKind.S:
        own = np.empty(profile.m, dtype=np.int64)
        own[order] = np.arange(profile.m)
        return np.abs(profile.position_matrix - own[None, :]).sum(axis=1)

    lengths = np.array(profile.lengths, dtype=np.int64)
    completion = np.empty(profile.m, dtype=np.int64)
    completion[order] = np.cumsum(lengths[order])
    return delay_array(kind, completion[None, :], profile.due_matrix).sum(axis=1)


def combine(spec: CostSpec, costs: Sequence[int], weights: Sequence[int]) -> int:
    """
    依聚合方式合併 (成本, 人數) 對

    L_p 回傳 Σ w·c^p (範數的 p 次方)，比較排程時與範數等價且維持整數運算。
    """
    costs = [int(c) for c in costs]
    weights = [int(w) for w in weights]
    if spec.aggregation == Aggregation.SUM:
        return sum(w * c for c, w in zip(costs, weights))
    if any(c < 0 for c in costs):
        raise UnsupportedCombinationError(
            f"{spec.aggregation.value} aggregation needs nonnegative per-agent costs")
    if spec.aggregation == Aggregation.MAX:
        return max(c for c, w in zip(costs, weights) if w > 0)
    return sum(w * c ** spec.p for c, w in zip(costs, weights))


@dataclass(frozen=True)
class CostVector:
    """
    候選排程對每位代理人的成本，以 (不同偏好排程, 人數) 的形式保存
    """
    costs: Tuple[int, ...]
    weights: Tuple[int, ...]
    cost_spec: CostSpec

    @property
    def n(self) -> int:
        return sum(self.weights)

    @property
    def per_agent(self) -> List[int]:
        """依人數展開的成本列表 (長度為 n)"""
        return [c for c, w in zip(self.costs, self.weights) for _ in range(w)]

    @property
    def value(self) -> int:
        return combine(self.cost_spec, self.costs, self.weights)

    @property
    def total(self) -> int:
        return sum(c * w for c, w in zip(self.costs, self.weights))

    @property
    def worst(self) -> int:
        return max(self.costs)


def cost_vector(spec: Union[CostSpec, CostKind], profile: PreferenceProfile, tau: Schedule) -> CostVector:
    """
    計算候選排程對整份偏好資料的成本向量

    Args:
        spec: 成本規格 (單獨給 CostKind 時視為總和)
        profile: 偏好資料
        tau: 候選排程

    Returns:
        CostVector
    """
    if not isinstance(spec, CostSpec):
        spec = CostSpec(CostKind(spec))
    costs = distinct_costs(spec.cost, profile, tau)
    return CostVector(tuple(int(c) for c in costs), profile.multiplicities, spec)


def aggregate(cost_spec: CostSpec, profile: PreferenceProfile, tau: Schedule) -> int:
    """
    候選排程的目標值

    Args:
        cost_spec: 成本規格
        profile: 偏好資料
        tau: 候選排程

    Returns:
        Sum: Σ_a f；Max: max_a f；L_p: Σ_a f^p
    """
    return cost_vector(cost_spec, profile, tau).value
