# -*- coding: utf-8 -*-
"""
領域型別定義 - 工作、排程、偏好資料與成本規格

所有型別在建構後皆不可變，可安全地在多個工作行程之間共用。
工作編號為 [0, m) 的連續整數；外部名稱 (PrefLib 候選人名稱) 另存於 labels。
"""

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from app.exceptions import InvalidInstanceError, InvalidSpecError, UnsupportedCombinationError


class CostKind(str, Enum):
    """成本函數枚舉"""
    K = "K"      # Kendall tau 交換距離
    S = "S"      # Spearman footrule
    T = "T"      # 延遲 (tardiness)
    U = "U"      # 延遲工作數
    L = "L"      # 遲延量 (可為負)
    E = "E"      # 提早量
    D = "D"      # 絕對偏差
    SD = "SD"    # 平方偏差

    @property
    def is_swap(self) -> bool:
        return self in (CostKind.K, CostKind.S)

    @property
    def is_delay(self) -> bool:
        return not self.is_swap


class Aggregation(str, Enum):
    """代理人成本的聚合方式"""
    SUM = "sum"
    MAX = "max"
    LP = "lp"


class SolveMethod(str, Enum):
    """求解方法"""
    BRUTE_FORCE = "BruteForce"
    SUBSET_DP = "SubsetDP"
    ASSIGNMENT = "Assignment"
    CLOSED_FORM = "ClosedForm"
    BRANCH_AND_BOUND = "BranchAndBound"


class LengthKind(str, Enum):
    """工作長度的指定方式"""
    UNIT = "unit"
    UNIFORM = "uniform"
    EXPLICIT = "explicit"


class SourceKind(str, Enum):
    """偏好資料來源"""
    PREFLIB = "preflib"
    MALLOWS = "mallows"
    IMPARTIAL = "impartial"


class Axiom(str, Enum):
    """可檢查的公理"""
    PARETO = "pareto"
    REINFORCEMENT = "reinforcement"
    PTA_CONDORCET = "pta"


@dataclass(frozen=True)
class Job:
    """單一工作，processing_time 為正整數"""
    id: int
    processing_time: int

    def __post_init__(self):
        if self.id < 0:
            raise InvalidInstanceError(f"job id must be nonnegative, got {self.id}")
        if self.processing_time < 1:
            raise InvalidInstanceError(
                f"job {self.id}: processing time must be >= 1, got {self.processing_time}")


@dataclass(frozen=True)
class Schedule:
    """工作的排列；位置 0 最先執行，排程中沒有空檔"""
    order: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'order', tuple(int(j) for j in self.order))
        if len(set(self.order)) != len(self.order):
            raise InvalidInstanceError(f"schedule repeats a job: {self.order}")

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self) -> Iterator[int]:
        return iter(self.order)

    @cached_property
    def positions(self) -> Dict[int, int]:
        return {job: pos for pos, job in enumerate(self.order)}

    def position(self, job: int) -> int:
        try:
            return self.positions[job]
        except KeyError:
            raise InvalidInstanceError(f"job {job} is not in schedule {self.order}") from None

    def precedes(self, a: int, b: int) -> bool:
        return self.position(a) < self.position(b)

    def completion_times(self, jobs: Sequence[Job]) -> Dict[int, int]:
        return completion_times(self, jobs)

    def format(self, labels: Optional[Sequence[str]] = None) -> str:
        if labels:
            return ",".join(labels[j] for j in self.order)
        return ",".join(str(j) for j in self.order)


def check_same_jobs(schedule: Schedule, jobs: Sequence[Job]) -> None:
    if sorted(schedule.order) != sorted(job.id for job in jobs):
        raise InvalidInstanceError(
            f"schedule {schedule.order} does not match job set {[job.id for job in jobs]}")


def completion_times(schedule: Schedule, jobs: Sequence[Job]) -> Dict[int, int]:
    """
    計算排程中每個工作的完成時間

    Args:
        schedule: 排程
        jobs: 工作清單

    Returns:
        工作編號 → 完成時間 (處理時間的前綴和)
    """
    check_same_jobs(schedule, jobs)
    lengths = {job.id: job.processing_time for job in jobs}
    result = {}
    clock = 0
    for job in schedule.order:
        clock += lengths[job]
        result[job] = clock
    return result


def position(job: int, schedule: Schedule) -> int:
    """排在 job 之前的工作數"""
    return schedule.position(job)


def precedes(a: int, b: int, schedule: Schedule) -> bool:
    """a 是否在 b 之前執行"""
    return schedule.precedes(a, b)


@dataclass(frozen=True)
class PreferenceProfile:
    """
    偏好資料：每種不同的偏好排程只存一次，附帶其權重 (人數)

    同時也是一個完整的實例 (Instance)：jobs 帶有處理時間。
    """
    jobs: Tuple[Job, ...]
    preferred: Tuple[Schedule, ...]
    multiplicities: Tuple[int, ...] = ()
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'jobs', tuple(self.jobs))
        object.__setattr__(self, 'preferred', tuple(
            s if isinstance(s, Schedule) else Schedule(tuple(s)) for s in self.preferred))
        multiplicities = tuple(int(w) for w in self.multiplicities) or (1,) * len(self.preferred)
        object.__setattr__(self, 'multiplicities', multiplicities)
        object.__setattr__(self, 'labels', tuple(self.labels))

        if [job.id for job in self.jobs] != list(range(len(self.jobs))):
            raise InvalidInstanceError("job ids must be dense and sorted: 0..m-1")
        if not self.jobs:
            raise InvalidInstanceError("an instance needs at least one job")
        if len(self.multiplicities) != len(self.preferred):
            raise InvalidInstanceError("one multiplicity per preferred schedule is required")
        if any(w < 1 for w in self.multiplicities):
            raise InvalidInstanceError("multiplicities must be positive integers")
        if not self.preferred:
            raise InvalidInstanceError("a profile needs at least one agent")
        for schedule in self.preferred:
            check_same_jobs(schedule, self.jobs)
        if self.labels and len(self.labels) != len(self.jobs):
            raise InvalidInstanceError("one label per job is required")

    # === 建構輔助 ===

    @classmethod
    def from_orders(cls,
                    orders: Iterable[Sequence[int]],
                    lengths: Optional[Sequence[int]] = None,
                    labels: Optional[Sequence[str]] = None,
                    weights: Optional[Iterable[int]] = None) -> 'PreferenceProfile':
        """
        由代理人的偏好排列建立資料，相同的排列合併並累加權重

        Args:
            orders: 每位代理人 (或每組) 的偏好排列
            lengths: 處理時間，預設全部為 1
            labels: 工作名稱
            weights: 每個排列的人數，預設皆為 1

        Returns:
            PreferenceProfile
        """
        orders = [tuple(int(j) for j in order) for order in orders]
        if not orders:
            raise InvalidInstanceError("a profile needs at least one agent")
        weights = list(weights) if weights is not None else [1] * len(orders)
        if len(weights) != len(orders):
            raise InvalidInstanceError("one weight per order is required")

        merged: Dict[Tuple[int, ...], int] = {}
        for order, weight in zip(orders, weights):
            if weight < 1:
                raise InvalidInstanceError(f"non-positive count {weight}")
            merged[order] = merged.get(order, 0) + weight

        m = len(orders[0])
        lengths = list(lengths) if lengths is not None else [1] * m
        if len(lengths) != m:
            raise InvalidInstanceError(f"expected {m} lengths, got {len(lengths)}")
        jobs = tuple(Job(i, int(p)) for i, p in enumerate(lengths))
        return cls(jobs=jobs,
                   preferred=tuple(Schedule(order) for order in merged),
                   multiplicities=tuple(merged.values()),
                   labels=tuple(labels) if labels else ())

    def with_lengths(self, lengths: Sequence[int]) -> 'PreferenceProfile':
        if len(lengths) != self.m:
            raise InvalidInstanceError(f"expected {self.m} lengths, got {len(lengths)}")
        jobs = tuple(Job(i, int(p)) for i, p in enumerate(lengths))
        return PreferenceProfile(jobs, self.preferred, self.multiplicities, self.labels)

    def unit_copy(self) -> 'PreferenceProfile':
        return self.with_lengths([1] * self.m)

    def merge(self, other: 'PreferenceProfile') -> 'PreferenceProfile':
        """兩組代理人的聯集 (工作集合與長度必須相同)"""
        if self.lengths != other.lengths:
            raise InvalidInstanceError("profiles to merge must share jobs and lengths")
        return PreferenceProfile.from_orders(
            [s.order for s in self.preferred] + [s.order for s in other.preferred],
            lengths=self.lengths,
            labels=self.labels or None,
            weights=list(self.multiplicities) + list(other.multiplicities))

    # === 基本屬性 ===

    @property
    def m(self) -> int:
        return len(self.jobs)

    @property
    def n(self) -> int:
        return sum(self.multiplicities)

    @cached_property
    def lengths(self) -> Tuple[int, ...]:
        return tuple(job.processing_time for job in self.jobs)

    @property
    def total_length(self) -> int:
        return sum(self.lengths)

    @property
    def has_equal_lengths(self) -> bool:
        return len(set(self.lengths)) == 1

    def label(self, job: int) -> str:
        return self.labels[job] if self.labels else str(job)

    def agents(self) -> Iterator[Tuple[Schedule, int]]:
        """(偏好排程, 人數) 的迭代器"""
        return zip(self.preferred, self.multiplicities)

    def expanded_orders(self) -> List[Tuple[int, ...]]:
        return [s.order for s, w in self.agents() for _ in range(w)]

    def format_schedule(self, schedule: Schedule) -> str:
        return schedule.format(self.labels or None)

    # === 陣列化的快取 (內層迴圈使用) ===

    @cached_property
    def weight_array(self) -> np.ndarray:
        weights = np.array(self.multiplicities, dtype=np.int64)
        weights.flags.writeable = False
        return weights

    @cached_property
    def due_matrix(self) -> np.ndarray:
        """due[d, j] = 第 d 種偏好排程中工作 j 的完成時間"""
        lengths = np.array(self.lengths, dtype=np.int64)
        due = np.zeros((len(self.preferred), self.m), dtype=np.int64)
        for d, schedule in enumerate(self.preferred):
            order = np.array(schedule.order, dtype=np.int64)
            due[d, order] = np.cumsum(lengths[order])
        due.flags.writeable = False
        return due

    @cached_property
    def position_matrix(self) -> np.ndarray:
        """pos[d, j] = 第 d 種偏好排程中工作 j 的位置"""
        pos = np.zeros((len(self.preferred), self.m), dtype=np.int64)
        for d, schedule in enumerate(self.preferred):
            pos[d, list(schedule.order)] = np.arange(self.m)
        pos.flags.writeable = False
        return pos

    @cached_property
    def support_matrix(self) -> np.ndarray:
        """support[k, l] = 把 k 排在 l 之前的代理人數 (依人數加權)"""
        pos = self.position_matrix
        before = (pos[:, :, None] < pos[:, None, :]).astype(np.int64)
        support = np.tensordot(self.weight_array, before, axes=1)
        support.flags.writeable = False
        return support


# 實例 = 帶有處理時間的偏好資料
Instance = PreferenceProfile


@dataclass(frozen=True)
class CostSpec:
    """(成本函數, 聚合方式, L_p 參數) 的組合"""
    cost: CostKind
    aggregation: Aggregation = Aggregation.SUM
    p: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'cost', CostKind(self.cost))
        object.__setattr__(self, 'aggregation', Aggregation(self.aggregation))
        if self.aggregation == Aggregation.LP and self.p < 2:
            raise InvalidSpecError("L_p aggregation needs p >= 2 (p = 1 is the sum)")
        if self.cost == CostKind.L and self.aggregation != Aggregation.SUM:
            raise UnsupportedCombinationError(
                f"cost L supports only the sum aggregation, got {self.aggregation.value}")

    @classmethod
    def parse(cls, cost: str, aggregation: str = 'sum', p: Optional[int] = None) -> 'CostSpec':
        try:
            kind = CostKind(cost.upper())
        except ValueError:
            raise InvalidSpecError(f"unknown cost function: {cost}") from None
        try:
            agg = Aggregation(aggregation.lower())
        except ValueError:
            raise InvalidSpecError(f"unknown aggregation: {aggregation}") from None
        if agg == Aggregation.LP:
            return cls(kind, agg, 2 if p is None else int(p))
        return cls(kind, agg)

    @property
    def name(self) -> str:
        if self.aggregation == Aggregation.LP:
            return f"lp{self.p}-{self.cost.value}"
        return f"{self.aggregation.value}-{self.cost.value}"

    def __str__(self) -> str:
        return self.name
