# -*- coding: utf-8 -*-
"""
ILP 匯出服務 - 以先後順序二元變數 prec_i_j 描述 Σ-f 問題，輸出 CPLEX LP 文字格式

prec_i_j = 1 表示工作 i 排在 j 之前；完成時間 C_j = p_j + Σ_i p_i · prec_i_j。
求解在本套件內以 DP / 分支界限完成，這裡只供外部求解器交叉驗證。
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import ceil
from typing import Dict, List, Tuple

from app.core import Aggregation, CostKind, CostSpec, PreferenceProfile, Schedule
from app.exceptions import InvalidSpecError, UnsupportedCombinationError

logger = logging.getLogger(__name__)

LINEAR_KINDS = (CostKind.T, CostKind.U, CostKind.L, CostKind.E, CostKind.D, CostKind.K, CostKind.S)

Terms = Dict[str, int]


def prec(i: int, j: int) -> str:
    return f"prec_{i}_{j}"


@dataclass
class LpConstraint:
    """線性限制式 Σ coef·var (sense) rhs"""
    name: str
    terms: Terms
    sense: str
    rhs: int

    def __post_init__(self):
        if self.sense not in ('<=', '>=', '='):
            raise InvalidSpecError(f"unknown constraint sense {self.sense}")

    def lhs(self, values: Dict[str, int]) -> int:
        return sum(coef * values[var] for var, coef in self.terms.items())

    def holds(self, values: Dict[str, int]) -> bool:
        lhs = self.lhs(values)
        if self.sense == '<=':
            return lhs <= self.rhs
        if self.sense == '>=':
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass
class LpModel:
    """最小化模型：目標、限制式、二元變數與非負輔助變數"""
    name: str
    objective: Terms = field(default_factory=dict)
    objective_constant: int = 0
    constraints: List[LpConstraint] = field(default_factory=list)
    binaries: List[str] = field(default_factory=list)
    auxiliaries: List[str] = field(default_factory=list)

    def add_objective(self, var: str, coef: int) -> None:
        self.objective[var] = self.objective.get(var, 0) + coef

    def add_constraint(self, name: str, terms: Terms, sense: str, rhs: int) -> None:
        self.constraints.append(LpConstraint(name, {v: c for v, c in terms.items() if c}, sense, rhs))

    @property
    def variables(self) -> List[str]:
        return self.binaries + self.auxiliaries

    def constraints_named(self, prefix: str) -> List[LpConstraint]:
        return [c for c in self.constraints if c.name.startswith(prefix)]

    # === 評估 ===

    def prec_values(self, schedule: Schedule) -> Dict[str, int]:
        """排程對應的 prec 變數值"""
        values = {}
        for i, j in permutations(schedule.order, 2):
            values[prec(i, j)] = 1 if schedule.precedes(i, j) else 0
        return values

    def complete(self, fixed: Dict[str, int]) -> Dict[str, int]:
        """
        固定 prec 變數後，把每個輔助變數設為滿足限制式的最小值

        每個輔助變數只出現在只含 prec 變數與它自己的限制式中。
        """
        values = dict(fixed)
        for aux in (v for v in self.variables if v not in fixed):
            lowest = Fraction(0)
            for constraint in self.constraints:
                coef = constraint.terms.get(aux)
                if not coef:
                    continue
                rest = sum(c * values[v] for v, c in constraint.terms.items() if v != aux)
                bound = Fraction(constraint.rhs - rest, coef)
                # coef·aux ≥ rhs - rest 的下界方向由 sense 與係數正負決定
                if (constraint.sense == '>=') == (coef > 0):
                    lowest = max(lowest, bound)
            values[aux] = int(ceil(lowest))
        return values

    def is_feasible(self, values: Dict[str, int]) -> bool:
        if any(values[v] not in (0, 1) for v in self.binaries):
            return False
        if any(values[v] < 0 for v in self.auxiliaries):
            return False
        return all(c.holds(values) for c in self.constraints)

    def objective_value(self, values: Dict[str, int]) -> int:
        return self.objective_constant + sum(c * values[v] for v, c in self.objective.items())

    def evaluate(self, schedule: Schedule) -> int:
        """排程在模型中的最佳目標值 (輔助變數取最小值)"""
        values = self.complete(self.prec_values(schedule))
        if not self.is_feasible(values):
            raise InvalidSpecError(f"schedule {schedule.order} is infeasible in {self.name}")
        return self.objective_value(values)

    # === LP 文字輸出 ===

    @staticmethod
    def _expression(terms: Terms) -> str:
        if not terms:
            return "0"
        parts = []
        for index, (var, coef) in enumerate(terms.items()):
            sign = "-" if coef < 0 else "+"
            magnitude = abs(coef)
            text = var if magnitude == 1 else f"{magnitude} {var}"
            if index == 0:
                parts.append(f"-{text}" if coef < 0 else text)
            else:
                parts.append(f"{sign} {text}")
        return " ".join(parts)

    def to_lp(self) -> str:
        lines = [f"\\* {self.name} *\\"]
        if self.objective_constant:
            lines.append(f"\\* objective constant {self.objective_constant} omitted below *\\")
        lines.append("Minimize")
        lines.append(f" obj: {self._expression(self.objective)}")
        lines.append("Subject To")
        for c in self.constraints:
            lines.append(f" {c.name}: {self._expression(c.terms)} {c.sense} {c.rhs}")
        if self.auxiliaries:
            lines.append("Bounds")
            for var in self.auxiliaries:
                lines.append(f" 0 <= {var}")
        if self.binaries:
            lines.append("Binary")
            for var in self.binaries:
                lines.append(f" {var}")
        lines.append("End")
        return "\n".join(lines) + "\n"


def _completion_terms(profile: PreferenceProfile, j: int) -> Tuple[Terms, int]:
    """C_j = 常數 + Σ p_i prec_i_j"""
    terms = {prec(i, j): profile.lengths[i] for i in range(profile.m) if i != j}
    return terms, profile.lengths[j]


def _position_terms(profile: PreferenceProfile, j: int) -> Tuple[Terms, int]:
    """pos_j = Σ prec_i_j"""
    return {prec(i, j): 1 for i in range(profile.m) if i != j}, 0


def build_model(profile: PreferenceProfile, cost_spec: CostSpec) -> LpModel:
    """
    建立先後順序模型

    Args:
        profile: 實例
        cost_spec: 只支援 Σ 聚合與 T, U, L, E, D, K, S

    Returns:
        LpModel
    """
    if cost_spec.aggregation != Aggregation.SUM:
        raise UnsupportedCombinationError(
            f"the precedence model is linear only for the sum aggregation, got {cost_spec.name}")
    if cost_spec.cost not in LINEAR_KINDS:
        raise UnsupportedCombinationError(f"sum-{cost_spec.cost.value} is not linearizable")

    m = profile.m
    model = LpModel(name=f"collective scheduling {cost_spec.name}, m={m}, n={profile.n}")
    model.binaries = [prec(i, j) for i, j in permutations(range(m), 2)]

    for i in range(m):
        for j in range(i + 1, m):
            model.add_constraint(f"asym_{i}_{j}", {prec(i, j): 1, prec(j, i): 1}, '=', 1)
    for i, j, k in permutations(range(m), 3):
        model.add_constraint(f"trans_{i}_{j}_{k}",
                             {prec(i, j): 1, prec(j, k): 1, prec(i, k): -1}, '<=', 1)

    kind = cost_spec.cost
    if kind == CostKind.K:
        support = profile.support_matrix
        for i, j in permutations(range(m), 2):
            # i 在 j 之前，而代理人把 j 排在 i 之前
            if support[j, i]:
                model.add_objective(prec(i, j), int(support[j, i]))
        return model

    if kind == CostKind.L:
        n = profile.n
        for j in range(m):
            terms, constant = _completion_terms(profile, j)
            for var, coef in terms.items():
                model.add_objective(var, n * coef)
            model.objective_constant += n * constant
        model.objective_constant -= int(profile.weight_array @ profile.due_matrix.sum(axis=1))
        model.objective = {v: c for v, c in model.objective.items() if c}
        return model

    expression = _position_terms if kind == CostKind.S else _completion_terms
    target = profile.position_matrix if kind == CostKind.S else profile.due_matrix
    big_m = profile.total_length

    for d, weight in enumerate(profile.multiplicities):
        for j in range(m):
            terms, constant = expression(profile, j)
            due = int(target[d, j])
            rhs = due - constant
            if kind == CostKind.T:
                aux = f"t_{d}_{j}"
                model.add_constraint(f"tard_{d}_{j}", {**terms, aux: -1}, '<=', rhs)
            elif kind == CostKind.E:
                aux = f"e_{d}_{j}"
                model.add_constraint(f"early_{d}_{j}", {**terms, aux: 1}, '>=', rhs)
            elif kind == CostKind.U:
                aux = f"u_{d}_{j}"
                model.add_constraint(f"late_{d}_{j}", {**terms, aux: -big_m}, '<=', rhs)
            else:
                aux = f"{'s' if kind == CostKind.S else 'dev'}_{d}_{j}"
                model.add_constraint(f"over_{d}_{j}", {**terms, aux: -1}, '<=', rhs)
                model.add_constraint(f"under_{d}_{j}", {**terms, aux: 1}, '>=', rhs)

            if kind == CostKind.U:
                model.binaries.append(aux)
            else:
                model.auxiliaries.append(aux)
            model.add_objective(aux, weight)
    return model


def export_ilp(profile: PreferenceProfile, cost_spec: CostSpec) -> str:
    """
    匯出 CPLEX LP 格式的先後順序模型

    Args:
        profile: 實例
        cost_spec: 成本規格 (SD、max、L_p 無法線性化)

    Returns:
        LP 檔案內容
    """
    model = build_model(profile, cost_spec)
    logger.info(f"ILP 匯出 {cost_spec.name}: {len(model.variables)} 個變數, "
                f"{len(model.constraints)} 條限制式")
    return model.to_lp()
