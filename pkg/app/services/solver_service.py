# -*- coding: utf-8 -*-
"""
精確求解服務 - α-f 規則的最佳排程

- brute_force: 列舉全部 m! 個排程 (其他求解器的基準)
- solve_sum_delay_dp / solve_kemeny_dp: 子集合動態規劃
- solve_sum_lateness: 依長度遞增排序 (封閉解)
- solve_equal_size_assignment: 等長工作的指派問題 (匈牙利法)
- solve_minmax_bb: max / L_p 聚合的分支界限法

所有求解器在最佳排程之間選擇字典序最小的工作編號序列，
並以 aggregate() 獨立重算目標值。
"""

import itertools
import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from app.core import Aggregation, CostKind, CostSpec, PreferenceProfile, Schedule, SolveMethod
from app.exceptions import (CapacityError, InvalidSpecError, PreconditionError, SolverError,
                            UnsupportedCombinationError)
from app.services.cost_service import aggregate, delay_array
from app.utils.helpers import format_elapsed
from config.settings import Config

logger = logging.getLogger(__name__)

DP_KINDS = (CostKind.T, CostKind.U, CostKind.L, CostKind.E, CostKind.D, CostKind.SD, CostKind.S)
BB_KINDS = (CostKind.T, CostKind.U, CostKind.E, CostKind.D, CostKind.SD, CostKind.K, CostKind.S)

# 暴力列舉每批處理的 (排列 × 偏好 × 工作) 元素上限
_BATCH_ELEMENTS = 4_000_000
# 子集合 DP 每批處理的子集合數
_DP_CHUNK = 1 << 18


@dataclass(frozen=True)
class SolveReport:
    """求解結果"""
    schedule: Schedule
    objective: int
    method: SolveMethod
    nodes_explored: int
    elapsed: float
    cost_spec: CostSpec
    optimum_count: Optional[int] = None

    def summary(self) -> str:
        return (f"{self.cost_spec.name}: {self.schedule.format()} objective={self.objective} "
                f"method={self.method.value} nodes={self.nodes_explored} "
                f"elapsed={format_elapsed(self.elapsed)}")


def _guard(profile: PreferenceProfile, limit: int, solver: str) -> None:
    if profile.m > limit:
        raise CapacityError(f"{solver} handles at most {limit} jobs, instance has {profile.m}")


def _finish(profile: PreferenceProfile, spec: CostSpec, order: Sequence[int], objective: int,
            method: SolveMethod, nodes: int, started: float,
            optimum_count: Optional[int] = None) -> SolveReport:
    """以獨立計算驗證目標值並組成 SolveReport"""
    schedule = Schedule(tuple(int(j) for j in order))
    recomputed = aggregate(spec, profile, schedule)
    if recomputed != int(objective):
        logger.error(f"{method.value} 目標值不一致: solver={objective}, recomputed={recomputed}")
        raise SolverError(
            f"{method.value} reported objective {objective} but the schedule evaluates to {recomputed}")
    report = SolveReport(schedule, recomputed, method, int(nodes),
                         time.perf_counter() - started, spec, optimum_count)
    logger.debug(report.summary())
    return report


# === 暴力列舉 ===

def _batch_costs(kind: CostKind, profile: PreferenceProfile, perms: np.ndarray) -> np.ndarray:
    """perms (B×m) 中每個排列對每種偏好排程的成本 (B×D)"""
    rows = np.arange(perms.shape[0])[:, None]
    if kind == CostKind.K:
        ranks = profile.position_matrix[:, perms]          # D×B×m，依候選排程的順序
        upper = np.triu(np.ones((profile.m, profile.m), dtype=bool), 1)
        inversions = (ranks[..., :, None] > ranks[..., None, :]) & upper
        return inversions.sum(axis=(2, 3)).T.astype(np.int64)
    if kind == CostKind.S:
        own = np.empty_like(perms)
        own[rows, perms] = np.arange(profile.m)
        return np.abs(own[:, None, :] - profile.position_matrix[None, :, :]).sum(axis=2)

    lengths = np.array(profile.lengths, dtype=np.int64)
    completion = np.empty_like(perms)
    completion[rows, perms] = np.cumsum(lengths[perms], axis=1)
    return delay_array(kind, completion[:, None, :], profile.due_matrix[None, :, :]).sum(axis=2)


def _batch_values(spec: CostSpec, costs: np.ndarray, weights: np.ndarray) -> np.ndarray:
    if spec.aggregation == Aggregation.SUM:
        return costs @ weights
    if spec.aggregation == Aggregation.MAX:
        return costs.max(axis=1)
    return (costs.astype(object) ** spec.p).dot(weights.astype(object))


def brute_force(profile: PreferenceProfile, cost_spec: CostSpec) -> SolveReport:
    """
    列舉所有排程，回傳字典序最小的最佳排程

    Args:
        profile: 實例
        cost_spec: 成本規格

    Returns:
        SolveReport (optimum_count 為最佳排程的個數)
    """
    _guard(profile, Config.BRUTE_FORCE_MAX_JOBS, "brute force")
    started = time.perf_counter()
    m = profile.m
    per_perm = len(profile.preferred) * m * (m if cost_spec.cost == CostKind.K else 1)
    batch = max(1, _BATCH_ELEMENTS // per_perm)

    best_value = None
    best_order: Tuple[int, ...] = ()
    count = 0
    # itertools.permutations 依字典序產生，argmin 取第一個即為字典序最小
    permutations = itertools.permutations(range(m))
    while True:
        chunk = list(itertools.islice(permutations, batch))
        if not chunk:
            break
        perms = np.array(chunk, dtype=np.int64)
        values = _batch_values(cost_spec, _batch_costs(cost_spec.cost, profile, perms),
                               profile.weight_array)
        index = int(np.argmin(values))
        chunk_best = values[index]
        if best_value is None or chunk_best < best_value:
            best_value, best_order = int(chunk_best), chunk[index]
            count = int((values == chunk_best).sum())
        elif chunk_best == best_value:
            count += int((values == chunk_best).sum())

    return _finish(profile, cost_spec, best_order, best_value, SolveMethod.BRUTE_FORCE,
                   math.factorial(m), started, optimum_count=count)


# === 子集合動態規劃 ===

def _subset_sums(values: Sequence[int]) -> np.ndarray:
    """sums[mask] = Σ_{j ∈ mask} values[j]"""
    sums = np.zeros(1 << len(values), dtype=np.int64)
    for j, value in enumerate(values):
        sums[1 << j: 1 << (j + 1)] = sums[: 1 << j] + value
    return sums


def _layered_subset_dp(m: int, step: Callable[[np.ndarray, int], np.ndarray]) -> Tuple[int, List[int]]:
    """
    g(S) = min_{j ∉ S} step(S, j) + g(S ∪ {j})，g(全集合) = 0

    step(S, j) 為把 j 接在前綴 S 之後的成本 (對 S 陣列向量化)。
    依元素個數由大到小處理各層；重建時從空集合開始取最小編號的 j，得到字典序最小的最佳排程。

    Returns:
        (最佳值, 排程)
    """
    full = (1 << m) - 1
    popcount = _subset_sums([1] * m)
    by_size = np.argsort(popcount, kind='stable')
    boundaries = np.searchsorted(popcount[by_size], np.arange(m + 2))

    g = np.zeros(1 << m, dtype=np.int64)
    for size in range(m - 1, -1, -1):
        layer = by_size[boundaries[size]:boundaries[size + 1]]
        for start in range(0, len(layer), _DP_CHUNK):
            masks = layer[start:start + _DP_CHUNK]
            best = np.full(len(masks), np.iinfo(np.int64).max, dtype=np.int64)
            for j in range(m):
                free = ((masks >> j) & 1) == 0
                if not free.any():
                    continue
                subset = masks[free]
                candidate = step(subset, j) + g[subset | (1 << j)]
                best[free] = np.minimum(best[free], candidate)
            g[masks] = best

    order = []
    mask = 0
    while mask != full:
        for j in range(m):
            if mask >> j & 1:
                continue
            here = np.array([mask], dtype=np.int64)
            if int(step(here, j)[0]) + int(g[mask | (1 << j)]) == int(g[mask]):
                order.append(j)
                mask |= 1 << j
                break
        else:
            raise SolverError("subset DP reconstruction failed")
    return int(g[0]), order


def _job_cost_table(kind: CostKind, profile: PreferenceProfile) -> np.ndarray:
    """
    table[j, x] = Σ_a w_a · f(x, C_j(σ_a))；S 的 x 為位置，其餘為完成時間
    """
    weights = profile.weight_array
    if kind == CostKind.S:
        slots = np.arange(profile.m, dtype=np.int64)
        return np.stack([weights @ np.abs(slots[None, :] - profile.position_matrix[:, j][:, None])
                         for j in range(profile.m)])
    times = np.arange(profile.total_length + 1, dtype=np.int64)
    return np.stack([weights @ delay_array(kind, times[None, :], profile.due_matrix[:, j][:, None])
                     for j in range(profile.m)])


def solve_sum_delay_dp(profile: PreferenceProfile, kind: CostKind) -> SolveReport:
    """
    Σ-f 的子集合動態規劃 (f ∈ T, U, E, D, SD, L 以及 S)

    每個工作的貢獻只取決於它自己的完成時間 (S 則取決於位置)，
    而完成時間等於前綴長度加上自身長度。

    Args:
        profile: 實例
        kind: 成本函數

    Returns:
        SolveReport
    """
    kind = CostKind(kind)
    if kind not in DP_KINDS:
        raise UnsupportedCombinationError(f"subset DP does not decompose sum-{kind.value}")
    _guard(profile, Config.SUBSET_DP_MAX_JOBS, "subset DP")
    started = time.perf_counter()
    table = _job_cost_table(kind, profile)

    if kind == CostKind.S:
        popcount = _subset_sums([1] * profile.m)

        def step(subset: np.ndarray, j: int) -> np.ndarray:
            return table[j, popcount[subset]]
    else:
        prefix = _subset_sums(profile.lengths)
        lengths = profile.lengths

        def step(subset: np.ndarray, j: int) -> np.ndarray:
            return table[j, prefix[subset] + lengths[j]]

    value, order = _layered_subset_dp(profile.m, step)
    return _finish(profile, CostSpec(kind), order, value, SolveMethod.SUBSET_DP,
                   1 << profile.m, started)


def solve_kemeny_dp(profile: PreferenceProfile) -> SolveReport:
    """
    Σ-K (Kemeny) 的子集合動態規劃

    把 j 接在前綴 S 之後，會與所有尚未排入、且代理人偏好排在 j 之前的工作形成逆序。
    """
    _guard(profile, Config.SUBSET_DP_MAX_JOBS, "Kemeny DP")
    started = time.perf_counter()
    support = profile.support_matrix
    column_totals = support.sum(axis=0)

    def step(subset: np.ndarray, j: int) -> np.ndarray:
        placed = np.zeros(len(subset), dtype=np.int64)
        for k in range(profile.m):
            if k != j and support[k, j]:
                placed += ((subset >> k) & 1) * support[k, j]
        return column_totals[j] - placed

    value, order = _layered_subset_dp(profile.m, step)
    return _finish(profile, CostSpec(CostKind.K), order, value, SolveMethod.SUBSET_DP,
                   1 << profile.m, started)


def solve_sum_lateness(profile: PreferenceProfile) -> SolveReport:
    """Σ-L 只取決於 Σ C_i，最佳解為依長度遞增 (同長依編號)"""
    started = time.perf_counter()
    order = sorted(range(profile.m), key=lambda j: (profile.lengths[j], j))
    spec = CostSpec(CostKind.L)
    return _finish(profile, spec, order, aggregate(spec, profile, Schedule(tuple(order))),
                   SolveMethod.CLOSED_FORM, 1, started)


# === 指派問題 ===

def _hungarian(cost: List[List[int]]) -> Tuple[List[int], int]:
    """
    最小成本完美配對 (整數版匈牙利法，位勢 + 增廣路徑)

    Args:
        cost: n×n 成本矩陣

    Returns:
        (assignment[row] = column, 最小成本)
    """
    n = len(cost)
    if n == 0:
        return [], 0
    infinity = float('inf')
    u = [0] * (n + 1)
    v = [0] * (n + 1)
    owner = [0] * (n + 1)       # owner[col] = 指派到該欄的列 (1 起算)
    way = [0] * (n + 1)

    for row in range(1, n + 1):
        owner[0] = row
        col0 = 0
        min_slack = [infinity] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[col0] = True
            row0 = owner[col0]
            delta = infinity
            col1 = 0
            for col in range(1, n + 1):
                if used[col]:
                    continue
                slack = cost[row0 - 1][col - 1] - u[row0] - v[col]
                if slack < min_slack[col]:
                    min_slack[col] = slack
                    way[col] = col0
                if min_slack[col] < delta:
                    delta = min_slack[col]
                    col1 = col
            for col in range(n + 1):
                if used[col]:
                    u[owner[col]] += delta
                    v[col] -= delta
                else:
                    min_slack[col] -= delta
            col0 = col1
            if owner[col0] == 0:
                break
        while col0:
            col1 = way[col0]
            owner[col0] = owner[col1]
            col0 = col1

    assignment = [0] * n
    for col in range(1, n + 1):
        assignment[owner[col] - 1] = col - 1
    return assignment, sum(cost[r][assignment[r]] for r in range(n))


def _assignment_matrix(kind: CostKind, profile: PreferenceProfile) -> List[List[int]]:
    """entry[J][ℓ] = Σ_a w_a · f(ℓp + p, C_J(σ_a))；S 則以位置 ℓ 計算"""
    weights = profile.weight_array
    if kind == CostKind.S:
        slots = np.arange(profile.m, dtype=np.int64)
        terms = np.abs(slots[None, None, :] - profile.position_matrix[:, :, None])
    else:
        p = profile.lengths[0]
        completion = (np.arange(profile.m, dtype=np.int64) + 1) * p
        terms = delay_array(kind, completion[None, None, :], profile.due_matrix[:, :, None])
    return np.tensordot(weights, terms, axes=1).tolist()


def solve_equal_size_assignment(profile: PreferenceProfile, kind: CostKind) -> SolveReport:
    """
    等長工作的 Σ-f：工作 J 放在第 ℓ 格的成本與其他工作無關，化為指派問題

    先以匈牙利法求最佳值，再逐格固定最小可行的工作編號，得到字典序最小的最佳排程。

    Args:
        profile: 所有工作長度相同的實例
        kind: 延遲成本或 S

    Returns:
        SolveReport
    """
    kind = CostKind(kind)
    if not profile.has_equal_lengths:
        raise PreconditionError(f"the assignment solver needs equal lengths, got {profile.lengths}")
    if kind not in DP_KINDS:
        raise UnsupportedCombinationError(f"sum-{kind.value} is not an assignment problem")
    started = time.perf_counter()
    matrix = _assignment_matrix(kind, profile)
    m = profile.m
    _, optimum = _hungarian(matrix)
    solves = 1

    order: List[int] = []
    fixed = 0
    remaining = list(range(m))
    for slot in range(m):
        free_slots = list(range(slot + 1, m))
        for job in remaining:
            rest = [r for r in remaining if r != job]
            sub = [[matrix[r][s] for s in free_slots] for r in rest]
            _, rest_cost = _hungarian(sub)
            solves += 1
            if fixed + matrix[job][slot] + rest_cost == optimum:
                order.append(job)
                fixed += matrix[job][slot]
                remaining = rest
                break
        else:
            raise SolverError("assignment refinement lost the optimum")

    return _finish(profile, CostSpec(kind), order, optimum, SolveMethod.ASSIGNMENT, solves, started)


# === 分支界限法 ===

class _BranchAndBound:
    """max / L_p 聚合的深度優先分支界限搜尋 (依工作編號展開子節點)"""

    def __init__(self, profile: PreferenceProfile, spec: CostSpec):
        self.profile = profile
        self.spec = spec
        self.kind = spec.cost
        self.weights = [int(w) for w in profile.multiplicities]
        self.lengths = profile.lengths
        self.due = profile.due_matrix
        self.pos = profile.position_matrix
        self.nodes = 0
        self.best_value: Optional[int] = None
        self.best_order: Tuple[int, ...] = ()

    def value(self, per_agent: np.ndarray) -> int:
        if self.spec.aggregation == Aggregation.MAX:
            return int(per_agent.max())
        p = self.spec.p
        return sum(w * int(c) ** p for w, c in zip(self.weights, per_agent))

    def accrue(self, prefix: Sequence[int], remaining: Sequence[int], job: int, clock: int) -> np.ndarray:
        """把 job 接在 prefix 之後 (完成時間 clock) 所確定的每位代理人成本"""
        if self.kind == CostKind.K:
            # job 排在所有剩餘工作之前；代理人偏好排在 job 之前的剩餘工作形成逆序
            others = [r for r in remaining if r != job]
            if not others:
                return np.zeros(self.pos.shape[0], dtype=np.int64)
            return (self.pos[:, others] < self.pos[:, [job]]).sum(axis=1)
        if self.kind == CostKind.S:
            return np.abs(len(prefix) - self.pos[:, job])
        return delay_array(self.kind, clock, self.due[:, job])

    def remaining_bound(self, depth: int, remaining: Sequence[int], clock: int) -> np.ndarray:
        """剩餘工作的下界：每個工作最早在 clock + p_j 完成、最早排在第 depth 位"""
        if not remaining or self.kind in (CostKind.K, CostKind.E):
            return 0
        rest = list(remaining)
        if self.kind == CostKind.S:
            return np.maximum(depth - self.pos[:, rest], 0).sum(axis=1)
        earliest = clock + np.array([self.lengths[j] for j in rest], dtype=np.int64)
        late = np.maximum(earliest[None, :] - self.due[:, rest], 0)
        if self.kind == CostKind.U:
            return (late > 0).sum(axis=1)
        if self.kind == CostKind.SD:
            return (late * late).sum(axis=1)
        return late.sum(axis=1)

    def search(self, prefix: List[int], remaining: List[int], clock: int, accrued: np.ndarray) -> None:
        self.nodes += 1
        if not remaining:
            value = self.value(accrued)
            order = tuple(prefix)
            if value < self.best_value or (value == self.best_value and order < self.best_order):
                self.best_value, self.best_order = value, order
            return

        depth = len(prefix) + 1
        for job in remaining:
            finish = clock + self.lengths[job]
            rest = [r for r in remaining if r != job]
            child = accrued + self.accrue(prefix, remaining, job, finish)
            bound = self.value(child + self.remaining_bound(depth, rest, finish))
            if bound > self.best_value:
                continue
            candidate = tuple(prefix) + (job,)
            if bound == self.best_value and candidate > self.best_order[:depth]:
                continue
            prefix.append(job)
            self.search(prefix, rest, finish, child)
            prefix.pop()

    def run(self, incumbent: Schedule) -> Tuple[int, Tuple[int, ...]]:
        self.best_value = aggregate(self.spec, self.profile, incumbent)
        self.best_order = incumbent.order
        start = np.zeros(self.pos.shape[0], dtype=np.int64)
        self.search([], list(range(self.profile.m)), 0, start)
        return self.best_value, self.best_order


def solve_minmax_bb(profile: PreferenceProfile, cost_spec: CostSpec) -> SolveReport:
    """
    max / L_p 聚合的分支界限法

    節點下界 = 前綴已確定的每位代理人成本 + 剩餘工作的最小可能成本，再依聚合方式合併；
    起始上界來自對應 Σ 求解器的排程。

    Args:
        profile: 實例
        cost_spec: aggregation 為 max 或 lp，成本為 T, U, E, D, SD, K, S

    Returns:
        SolveReport
    """
    if cost_spec.aggregation == Aggregation.SUM:
        raise UnsupportedCombinationError("branch and bound handles the max and lp aggregations only")
    if cost_spec.cost not in BB_KINDS:
        raise UnsupportedCombinationError(
            f"{cost_spec.aggregation.value} aggregation is not supported for cost {cost_spec.cost.value}")
    _guard(profile, Config.BRANCH_AND_BOUND_MAX_JOBS, "branch and bound")
    started = time.perf_counter()

    if cost_spec.cost == CostKind.K:
        incumbent = solve_kemeny_dp(profile).schedule
    else:
        incumbent = solve_sum_delay_dp(profile, cost_spec.cost).schedule

    search = _BranchAndBound(profile, cost_spec)
    value, order = search.run(incumbent)
    logger.debug(f"branch and bound {cost_spec.name}: {search.nodes} nodes, incumbent {incumbent.order}")
    return _finish(profile, cost_spec, order, value, SolveMethod.BRANCH_AND_BOUND,
                   search.nodes, started)


# === 後處理與分派 ===

def pareto_swap_pass(schedule: Schedule, profile: PreferenceProfile) -> Schedule:
    """
    只要有一對工作被所有代理人一致地偏好成相反順序，就交換兩者的位置

    每次交換都使 Σ-K 嚴格下降，因此必定終止；單位長度下不會增加 Σ-T。
    """
    support = profile.support_matrix
    n = profile.n
    order = list(schedule.order)
    swapped = True
    while swapped:
        swapped = False
        for i, j in itertools.combinations(range(len(order)), 2):
            earlier, later = order[i], order[j]
            if support[later, earlier] == n:
                order[i], order[j] = later, earlier
                swapped = True
                break
    return Schedule(tuple(order))


def solve(profile: PreferenceProfile, cost_spec: CostSpec) -> SolveReport:
    """
    依成本規格選擇精確求解器

    Args:
        profile: 實例
        cost_spec: 成本規格

    Returns:
        SolveReport
    """
    if cost_spec.aggregation != Aggregation.SUM:
        report = solve_minmax_bb(profile, cost_spec)
    elif cost_spec.cost == CostKind.L:
        report = solve_sum_lateness(profile)
    elif cost_spec.cost == CostKind.K:
        report = solve_kemeny_dp(profile)
    elif profile.has_equal_lengths:
        report = solve_equal_size_assignment(profile, cost_spec.cost)
    else:
        report = solve_sum_delay_dp(profile, cost_spec.cost)

    if cost_spec == CostSpec(CostKind.T) and profile.has_equal_lengths:
        adjusted = pareto_swap_pass(report.schedule, profile)
        if adjusted != report.schedule:
            objective = aggregate(cost_spec, profile, adjusted)
            if objective != report.objective:
                raise SolverError(f"Pareto swap pass changed sum-T from {report.objective} to {objective}")
            report = SolveReport(adjusted, objective, report.method, report.nodes_explored,
                                 report.elapsed, cost_spec)

    logger.info(f"求解完成 {report.summary()}")
    return report
