# -*- coding: utf-8 -*-
"""
PTA Condorcet 服務 - 考慮處理時間的成對多數關係、PTA Copeland 與 Iterative PTA Minimax

J_k PTA-beats J_l ⇔ support[k][l] · (p_k + p_l) ≥ n · p_k (全部以整數交叉相乘比較)。
恰好等號且兩個方向都成立時稱為 mutual pair。
"""

import heapq
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np

from app.core import PreferenceProfile, Schedule

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class PtaTournament:
    """成對支持數與工作長度"""
    support: np.ndarray
    lengths: Tuple[int, ...]
    n: int

    @property
    def m(self) -> int:
        return len(self.lengths)

    def beats(self, k: int, l: int) -> bool:
        if k == l:
            return False
        return int(self.support[k, l]) * (self.lengths[k] + self.lengths[l]) >= self.n * self.lengths[k]

    def mutual(self, k: int, l: int) -> bool:
        return self.beats(k, l) and self.beats(l, k)

    def decided(self, k: int, l: int) -> bool:
        """k 擊敗 l 且 l 沒有擊敗 k"""
        return self.beats(k, l) and not self.beats(l, k)

    @cached_property
    def beat_matrix(self) -> np.ndarray:
        lengths = np.array(self.lengths, dtype=np.int64)
        pair_sums = lengths[:, None] + lengths[None, :]
        matrix = self.support * pair_sums >= self.n * lengths[:, None]
        np.fill_diagonal(matrix, False)
        return matrix

    def decided_pairs(self) -> List[Pair]:
        matrix = self.beat_matrix
        return [(k, l) for k in range(self.m) for l in range(self.m)
                if matrix[k, l] and not matrix[l, k]]

    def mutual_pairs(self) -> List[Pair]:
        matrix = self.beat_matrix
        return [(k, l) for k in range(self.m) for l in range(k + 1, self.m)
                if matrix[k, l] and matrix[l, k]]

    def copeland_scores(self) -> List[int]:
        return [int(v) for v in self.beat_matrix.sum(axis=1)]

    def defeat(self, k: int, l: int) -> Fraction:
        """k 要擊敗 l 還差多少票：max(0, n·p_k/(p_k+p_l) − support[k][l])"""
        total = self.lengths[k] + self.lengths[l]
        shortfall = self.n * self.lengths[k] - int(self.support[k, l]) * total
        return Fraction(max(0, shortfall), total)


def build_tournament(profile: PreferenceProfile) -> PtaTournament:
    """
    由偏好資料建立 PTA 錦標賽 (依人數加權的精確計數)

    Args:
        profile: 實例

    Returns:
        PtaTournament
    """
    return PtaTournament(profile.support_matrix, profile.lengths, profile.n)


def _tie_key(profile: PreferenceProfile, job: int) -> Tuple[int, int]:
    return profile.lengths[job], job


def pta_copeland(profile: PreferenceProfile) -> Schedule:
    """
    PTA Copeland：依 PTA 擊敗的工作數遞減排序，同分依長度再依編號

    Args:
        profile: 實例

    Returns:
        Schedule
    """
    scores = build_tournament(profile).copeland_scores()
    order = sorted(range(profile.m), key=lambda j: (-scores[j],) + _tie_key(profile, j))
    logger.debug(f"PTA Copeland 分數: {scores}")
    return Schedule(tuple(order))


def pta_iterative_minimax(profile: PreferenceProfile) -> Schedule:
    """
    Iterative PTA Minimax：每輪排入最大 defeat 最小的工作，再從偏好中移除它

    移除工作不影響其餘工作之間的支持數，因此每輪只需在剩餘工作中重新取最大值。

    Args:
        profile: 實例

    Returns:
        Schedule
    """
    tournament = build_tournament(profile)
    m = profile.m
    defeats = [[tournament.defeat(k, l) if k != l else Fraction(0) for l in range(m)] for k in range(m)]
    remaining = list(range(m))
    order = []
    while remaining:
        def worst(k: int) -> Fraction:
            return max((defeats[k][l] for l in remaining if l != k), default=Fraction(0))

        chosen = min(remaining, key=lambda k: (worst(k),) + _tie_key(profile, k))
        order.append(chosen)
        remaining.remove(chosen)
    return Schedule(tuple(order))


@dataclass(frozen=True)
class ConsistencyReport:
    """PTA Condorcet 一致性檢查結果"""
    consistent: bool
    violations: List[Pair] = field(default_factory=list)
    mutual_pairs: List[Pair] = field(default_factory=list)

    @property
    def respects_decided_pairs(self) -> bool:
        return not self.violations

    def __iter__(self):
        return iter((self.consistent, self.violations))


def is_pta_condorcet_consistent(schedule: Schedule, profile: PreferenceProfile) -> ConsistencyReport:
    """
    檢查排程是否 PTA Condorcet 一致

    violations 列出 (k, l)：k 擊敗 l (單方向) 但 l 排在 k 之前。
    mutual pair 無法同時滿足兩個方向，另外列出且使結果為否。

    Args:
        schedule: 排程
        profile: 實例

    Returns:
        ConsistencyReport
    """
    tournament = build_tournament(profile)
    violations = [(k, l) for k, l in tournament.decided_pairs() if schedule.precedes(l, k)]
    mutual = tournament.mutual_pairs()
    return ConsistencyReport(not violations and not mutual, violations, mutual)


def pta_consistent_schedule_exists(profile: PreferenceProfile) -> Optional[Schedule]:
    """
    對單方向的擊敗關係做拓撲排序；有循環時回傳 None

    Args:
        profile: 實例

    Returns:
        一致的排程，或 None
    """
    tournament = build_tournament(profile)
    m = profile.m
    indegree = [0] * m
    successors: List[List[int]] = [[] for _ in range(m)]
    for k, l in tournament.decided_pairs():
        successors[k].append(l)
        indegree[l] += 1

    ready = [_tie_key(profile, j) for j in range(m) if indegree[j] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        _, job = heapq.heappop(ready)
        order.append(job)
        for nxt in successors[job]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                heapq.heappush(ready, _tie_key(profile, nxt))

    if len(order) < m:
        logger.debug("PTA 擊敗關係有循環，不存在一致的排程")
        return None
    return Schedule(tuple(order))
