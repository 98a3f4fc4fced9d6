# -*- coding: utf-8 -*-
"""
實驗服務 - 悖論頻率、PTA Copeland 與最佳解的比值、Gini 差距與依長度的位置變化

每個實例一律計算 Σ-T 最佳解、max-T 最佳解與 PTA Copeland 排程作為參考，
再評估設定中的每個規則。輸出 results.csv、summary.csv、positions.csv 與 metadata.txt。
"""

import csv
import logging
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from app import __version__
from app.core import CostKind, CostSpec, Instance, Schedule, SourceKind
from app.exceptions import CapacityError, InvalidSpecError, SolverError
from app.services.axiom_service import paradox_rate
from app.services.cost_service import cost_vector
from app.services.profile_service import LengthSpec, ProfileSource
from app.services.rule_service import Rule, RuleResult, resolve_rule
from app.utils.helpers import format_decimal, format_elapsed, mean_and_std
from config.settings import Config

logger = logging.getLogger(__name__)

TARDINESS = CostSpec(CostKind.T)
SUM_T, MAX_T, COPELAND = 'sum-T', 'max-T', 'pta-copeland'

RESULT_COLUMNS = ('instance', 'rule', 'status', 'schedule', 'objective', 'sum_t', 'max_t',
                  'paradox_rate', 'gini', 'ratio_sum_t', 'ratio_max_t', 'position_deltas', 'error')
SUMMARY_COLUMNS = ('instances', 'failed', 'paradox_sum_t', 'paradox_max_t',
                   'copeland_sum_t_ratio', 'copeland_max_t_ratio', 'delta_gini',
                   'ratio_sum_t_infinite', 'ratio_max_t_infinite')
POSITION_COLUMNS = ('rule', 'length', 'mean_delta', 'std', 'count')


# === 統計量 ===

def gini(values: Sequence[int], weights: Optional[Sequence[int]] = None) -> Fraction:
    """
    Gini 係數 Σ_a Σ_b |x_a − x_b| / (2 n Σ x)，總和為 0 時定義為 0

    Args:
        values: 非負整數
        weights: 每個值的人數 (預設皆為 1)

    Returns:
        [0, 1] 之間的有理數
    """
    if not len(values):
        raise InvalidSpecError("gini needs at least one value")
    weights = [1] * len(values) if weights is None else [int(w) for w in weights]
    pairs = sorted((int(x), w) for x, w in zip(values, weights))
    if pairs[0][0] < 0:
        raise InvalidSpecError(f"gini needs nonnegative values, got {pairs[0][0]}")
    total = sum(x * w for x, w in pairs)
    if total == 0:
        return Fraction(0)

    # 排序後 Σ_{i<j} w_i w_j (x_j − x_i) = Σ_j w_j (x_j · W_{<j} − S_{<j})
    count_before = [0] + list(accumulate(w for _, w in pairs))[:-1]
    sum_before = [0] + list(accumulate(x * w for x, w in pairs))[:-1]
    spread = sum(w * (x * c - s) for (x, w), c, s in zip(pairs, count_before, sum_before))
    return Fraction(spread, sum(weights) * total)


def _ratio(value: int, optimum: int) -> Optional[Fraction]:
    """value / optimum；最佳值為 0 時，value 也為 0 則為 1，否則為無限大 (None)"""
    if optimum == 0:
        return Fraction(1) if value == 0 else None
    return Fraction(value, optimum)


def _mean(values: Sequence[Optional[Fraction]]) -> Optional[Fraction]:
    finite = [v for v in values if v is not None]
    return mean_and_std(finite)[0] if finite else None


def position_deltas(instance: Instance, rule: Rule, schedule: Optional[Schedule] = None,
                    reference_rule: Optional[Rule] = None) -> Dict[int, List[int]]:
    """
    每個工作在規則排程中的位置，減去參考規則 (預設為同一規則) 在單位長度副本上的位置，依長度分組

    Returns:
        長度 → 位置差列表 (負值表示被提前)
    """
    if schedule is None:
        schedule = rule(instance)
    reference = (reference_rule or rule)(instance.unit_copy())
    deltas: Dict[int, List[int]] = defaultdict(list)
    for job in range(instance.m):
        deltas[instance.lengths[job]].append(schedule.position(job) - reference.position(job))
    return dict(deltas)


def position_change_profile(instance: Instance, rule: Union[str, Rule],
                            reference_rule: Optional[Union[str, Rule]] = None) -> Dict[int, Fraction]:
    """
    依長度的平均位置變化

    Args:
        instance: 實例
        rule: 規則
        reference_rule: 在單位長度副本上計算參考排程的規則 (預設為 rule)

    Returns:
        長度 → 平均位置差
    """
    rule = resolve_rule(rule) if isinstance(rule, str) else rule
    if isinstance(reference_rule, str):
        reference_rule = resolve_rule(reference_rule)
    deltas = position_deltas(instance, rule, reference_rule=reference_rule)
    return {length: Fraction(sum(values), len(values)) for length, values in sorted(deltas.items())}


# === 實驗設定 ===

@dataclass(frozen=True)
class ExperimentSpec:
    """實驗設定"""
    source: ProfileSource
    instances: int = Config.DEFAULT_INSTANCES
    rules: Tuple[str, ...] = Config.DEFAULT_RULES
    name: str = 'experiment'
    workers: int = Config.DEFAULT_WORKERS
    positions: bool = True
    database_url: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'rules', tuple(self.rules))
        if self.instances < 1:
            raise InvalidSpecError(f"instances must be >= 1, got {self.instances}")
        if self.workers < 1:
            raise InvalidSpecError(f"workers must be >= 1, got {self.workers}")
        if not self.rules:
            raise InvalidSpecError("an experiment needs at least one rule")
        for rule in self.rules:
            resolve_rule(rule)

    @property
    def seed(self) -> int:
        return self.source.seed

    @property
    def p_max(self) -> int:
        return self.source.length_spec.p_max

    def describe(self) -> Dict[str, str]:
        info = {'name': self.name, 'version': __version__}
        info.update(self.source.describe())
        info.update({'instances': str(self.instances), 'rules': ",".join(self.rules),
                     'workers': str(self.workers), 'positions': str(self.positions).lower()})
        return info


_SPEC_KEYS = ('name', 'source', 'm', 'n', 'phi', 'reference', 'path', 'lengths', 'p_max',
              'instances', 'rules', 'seed', 'workers', 'positions', 'database_url')


def parse_experiment_spec(text: str, base_dir: Optional[Path] = None) -> ExperimentSpec:
    """
    解析 key=value 形式的實驗設定；未提供的鍵使用預設值

    Args:
        text: 設定內容 ('#' 開頭為註解)
        base_dir: PrefLib 相對路徑的基準目錄

    Returns:
        ExperimentSpec
    """
    values: Dict[str, str] = {}
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        key, sep, value = line.partition('=')
        key = key.strip().lower()
        if not sep:
            raise InvalidSpecError(f"line {line_number}: expected key=value, got {line!r}")
        if key not in _SPEC_KEYS:
            raise InvalidSpecError(f"line {line_number}: unknown key {key!r}")
        values[key] = value.strip()

    try:
        if 'lengths' in values:
            length_spec = LengthSpec.parse(values['lengths'])
        else:
            length_spec = LengthSpec.uniform(int(values.get('p_max', Config.DEFAULT_P_MAX)))

        path = values.get('path')
        if path and base_dir is not None and not Path(path).is_absolute():
            path = str(base_dir / path)
        reference = tuple(int(j) for j in values['reference'].split(',')) if values.get('reference') else ()

        source = ProfileSource(
            kind=SourceKind(values.get('source', SourceKind.IMPARTIAL.value).lower()),
            m=int(values.get('m', 10)),
            n=int(values.get('n', 500)),
            phi=float(values.get('phi', Config.DEFAULT_MALLOWS_PHI)),
            reference=reference,
            path=path,
            length_spec=length_spec,
            seed=int(values.get('seed', Config.DEFAULT_SEED)),
        )
        rules = tuple(r.strip() for r in values['rules'].split(',') if r.strip()) \
            if 'rules' in values else Config.DEFAULT_RULES
        return ExperimentSpec(
            source=source,
            instances=int(values.get('instances', Config.DEFAULT_INSTANCES)),
            rules=rules,
            name=values.get('name', 'experiment'),
            workers=int(values.get('workers', Config.DEFAULT_WORKERS)),
            positions=values.get('positions', 'true').lower() in ('1', 'true', 'yes'),
            database_url=values.get('database_url') or None,
        )
    except ValueError as e:
        if isinstance(e, InvalidSpecError):
            raise
        raise InvalidSpecError(f"malformed experiment spec: {e}") from e


def load_experiment_spec(path: Union[str, Path]) -> ExperimentSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise InvalidSpecError(f"cannot read {path}: {e.strerror or e}") from e
    return parse_experiment_spec(text, base_dir=path.parent)


# === 執行 ===

@dataclass
class ExperimentRow:
    """單一實例、單一規則的結果"""
    instance_id: int
    rule: str
    status: str = 'ok'
    schedule: str = ''
    objective: Optional[int] = None
    sum_t: Optional[int] = None
    max_t: Optional[int] = None
    paradox_rate: Optional[Fraction] = None
    gini: Optional[Fraction] = None
    ratio_sum_t: Optional[Fraction] = None
    ratio_max_t: Optional[Fraction] = None
    position_deltas: Dict[int, List[int]] = field(default_factory=dict)
    error: str = ''

    @property
    def ok(self) -> bool:
        return self.status == 'ok'

    def mean_deltas(self) -> Dict[int, Fraction]:
        return {length: Fraction(sum(v), len(v)) for length, v in sorted(self.position_deltas.items())}

    def csv_row(self, digits: int = Config.CSV_DIGITS) -> List[str]:
        def number(value):
            return '' if value is None and not self.ok else format_decimal(value, digits)

        def integer(value):
            return '' if value is None else str(value)

        deltas = ";".join(f"{length}:{format_decimal(delta, digits)}"
                          for length, delta in self.mean_deltas().items())
        return [str(self.instance_id), self.rule, self.status, self.schedule,
                integer(self.objective), integer(self.sum_t), integer(self.max_t),
                number(self.paradox_rate), number(self.gini),
                number(self.ratio_sum_t), number(self.ratio_max_t), deltas, self.error]


@dataclass
class InstanceOutcome:
    """單一實例的全部結果與參考值"""
    instance_id: int
    rows: List[ExperimentRow]
    reference: Dict[str, Any] = field(default_factory=dict)
    error: str = ''


def evaluate_instance(spec: ExperimentSpec, instance_id: int) -> InstanceOutcome:
    """
    計算一個實例的參考最佳解與各規則的結果；任何錯誤都記錄在結果中而不往外拋
    """
    try:
        instance = spec.source.build(instance_id)
        if instance.m > Config.EXPERIMENT_MAX_JOBS:
            raise CapacityError(
                f"experiments handle at most {Config.EXPERIMENT_MAX_JOBS} jobs, instance has {instance.m}")

        results: Dict[str, RuleResult] = {}

        def run(name: str) -> RuleResult:
            if name not in results:
                results[name] = resolve_rule(name).run(instance)
            return results[name]

        best_sum = cost_vector(TARDINESS, instance, run(SUM_T).schedule)
        best_max = cost_vector(TARDINESS, instance, run(MAX_T).schedule)
        copeland = cost_vector(TARDINESS, instance, run(COPELAND).schedule)

        rows = []
        for name in spec.rules:
            rule = resolve_rule(name)
            result = run(name)
            vector = cost_vector(TARDINESS, instance, result.schedule)
            row = ExperimentRow(
                instance_id=instance_id,
                rule=name,
                schedule=result.schedule.format(),
                objective=result.objective,
                sum_t=vector.total,
                max_t=vector.worst,
                paradox_rate=paradox_rate(result.schedule, instance),
                gini=gini(vector.costs, vector.weights),
                ratio_sum_t=_ratio(vector.total, best_sum.total),
                ratio_max_t=_ratio(vector.worst, best_max.worst),
            )
            for ratio in (row.ratio_sum_t, row.ratio_max_t):
                if ratio is not None and ratio < 1:
                    raise SolverError(f"{name} beats an exact optimum on instance {instance_id}")
            if spec.positions:
                row.position_deltas = position_deltas(instance, rule, result.schedule)
            rows.append(row)

        reference = {
            'paradox_sum_t': paradox_rate(results[SUM_T].schedule, instance),
            'paradox_max_t': paradox_rate(results[MAX_T].schedule, instance),
            'copeland_sum_t_ratio': _ratio(copeland.total, best_sum.total),
            'copeland_max_t_ratio': _ratio(copeland.worst, best_max.worst),
            'delta_gini': (gini(best_max.costs, best_max.weights)
                           - gini(best_sum.costs, best_sum.weights)),
        }
        logger.debug(f"實例 {instance_id} 完成: Σ-T={best_sum.total}, max-T={best_max.worst}")
        return InstanceOutcome(instance_id, rows, reference)
    except Exception as e:
        message = str(e) or type(e).__name__
        logger.warning(f"實例 {instance_id} 失敗: {message}")
        rows = [ExperimentRow(instance_id, name, status='error', error=message) for name in spec.rules]
        return InstanceOutcome(instance_id, rows, error=message)


def _evaluate_job(args: Tuple[ExperimentSpec, int]) -> InstanceOutcome:
    return evaluate_instance(*args)


@dataclass
class ExperimentResult:
    """整批實驗的結果"""
    spec: ExperimentSpec
    outcomes: List[InstanceOutcome]
    elapsed: float = 0.0

    @property
    def rows(self) -> List[ExperimentRow]:
        return [row for outcome in self.outcomes for row in outcome.rows]

    @property
    def failed(self) -> int:
        return sum(1 for outcome in self.outcomes if outcome.error)

    def summary(self) -> Dict[str, Any]:
        """各實例參考值的平均 (只用成功的實例)"""
        references = [o.reference for o in self.outcomes if not o.error]

        def collect(key: str) -> List[Optional[Fraction]]:
            return [r[key] for r in references]

        return {
            'instances': len(self.outcomes),
            'failed': self.failed,
            'paradox_sum_t': _mean(collect('paradox_sum_t')),
            'paradox_max_t': _mean(collect('paradox_max_t')),
            'copeland_sum_t_ratio': _mean(collect('copeland_sum_t_ratio')),
            'copeland_max_t_ratio': _mean(collect('copeland_max_t_ratio')),
            'delta_gini': _mean(collect('delta_gini')),
            'ratio_sum_t_infinite': sum(1 for v in collect('copeland_sum_t_ratio') if v is None),
            'ratio_max_t_infinite': sum(1 for v in collect('copeland_max_t_ratio') if v is None),
        }

    def positions(self) -> List[Tuple[str, int, Fraction, float, int]]:
        """(規則, 長度, 平均位置差, 標準差, 工作數)，彙整所有實例"""
        pooled: Dict[Tuple[str, int], List[Fraction]] = defaultdict(list)
        for row in self.rows:
            for length, deltas in row.position_deltas.items():
                pooled[(row.rule, length)].extend(Fraction(d) for d in deltas)
        table = []
        for rule in self.spec.rules:
            for (name, length) in sorted(k for k in pooled if k[0] == rule):
                mean, std = mean_and_std(pooled[(name, length)])
                table.append((name, length, mean, std, len(pooled[(name, length)])))
        return table

    def metadata(self) -> Dict[str, str]:
        info = self.spec.describe()
        info['failed'] = str(self.failed)
        return info


def run_experiment(spec: ExperimentSpec, output_dir: Optional[Union[str, Path]] = None) -> ExperimentResult:
    """
    執行實驗並 (可選地) 寫出 CSV 與 metadata、存入資料庫

    Args:
        spec: 實驗設定
        output_dir: 輸出目錄；None 時不寫檔

    Returns:
        ExperimentResult (結果依實例編號排序)
    """
    started = time.perf_counter()
    logger.info(f"開始實驗 {spec.name}: {spec.instances} 個實例, 規則 {', '.join(spec.rules)}")
    jobs = [(spec, instance_id) for instance_id in range(spec.instances)]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            outcomes = list(pool.map(_evaluate_job, jobs))
    else:
        outcomes = [_evaluate_job(job) for job in jobs]
    outcomes.sort(key=lambda outcome: outcome.instance_id)

    result = ExperimentResult(spec, outcomes, time.perf_counter() - started)
    logger.info(f"實驗 {spec.name} 完成: {result.failed} 個實例失敗, 耗時 {format_elapsed(result.elapsed)}")

    if output_dir is not None:
        write_outputs(result, output_dir)
    if spec.database_url:
        save_to_database(result, spec.database_url)
    return result


# === 輸出 ===

def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[str]]) -> Path:
    with path.open('w', encoding='utf-8', newline='') as handle:
        writer = csv.writer(handle, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_outputs(result: ExperimentResult, output_dir: Union[str, Path],
                  digits: int = Config.CSV_DIGITS) -> Dict[str, Path]:
    """
    寫出 results.csv、summary.csv、positions.csv 與 metadata.txt

    Returns:
        檔名 → 路徑
    """
    directory = Path(output_dir)
    directory.mkdir(parents=True, exist_ok=True)

    summary = result.summary()
    summary_row = [str(summary[c]) if isinstance(summary[c], int) else format_decimal(summary[c], digits)
                   for c in SUMMARY_COLUMNS]
    positions = [[rule, str(length), format_decimal(mean, digits), f"{std:.{digits}f}", str(count)]
                 for rule, length, mean, std, count in result.positions()]

    paths = {
        'results': _write_csv(directory / 'results.csv', RESULT_COLUMNS,
                              [row.csv_row(digits) for row in result.rows]),
        'summary': _write_csv(directory / 'summary.csv', SUMMARY_COLUMNS, [summary_row]),
        'positions': _write_csv(directory / 'positions.csv', POSITION_COLUMNS, positions),
    }
    metadata = directory / 'metadata.txt'
    metadata.write_text("".join(f"{k}={v}\n" for k, v in result.metadata().items()), encoding='utf-8')
    paths['metadata'] = metadata
    logger.info(f"實驗輸出已寫入 {directory}")
    return paths


def save_to_database(result: ExperimentResult, url: Optional[str] = None) -> int:
    """
    把整批實驗寫入結果資料庫

    Returns:
        ExperimentRun 的 id
    """
    from app.database import get_db_session, init_database
    from app.models import ExperimentRecord, ExperimentRun

    def as_float(value: Optional[Fraction]) -> Optional[float]:
        return None if value is None else float(value)

    init_database(url)
    summary = result.summary()
    spec = result.spec
    with get_db_session(url) as session:
        run = ExperimentRun(
            name=spec.name,
            source=spec.source.kind.value,
            parameters="\n".join(f"{k}={v}" for k, v in spec.describe().items()),
            seed=str(spec.seed),
            instances=spec.instances,
            rules=",".join(spec.rules),
            software_version=__version__,
            paradox_sum_t=as_float(summary['paradox_sum_t']),
            paradox_max_t=as_float(summary['paradox_max_t']),
            copeland_sum_t_ratio=as_float(summary['copeland_sum_t_ratio']),
            copeland_max_t_ratio=as_float(summary['copeland_max_t_ratio']),
            delta_gini=as_float(summary['delta_gini']),
        )
        for row in result.rows:
            run.records.append(ExperimentRecord(
                instance_id=row.instance_id,
                rule=row.rule,
                status=row.status,
                schedule=row.schedule,
                objective=None if row.objective is None else str(row.objective),
                sum_t=row.sum_t,
                max_t=row.max_t,
                paradox_rate=as_float(row.paradox_rate),
                gini=as_float(row.gini),
                ratio_sum_t=as_float(row.ratio_sum_t),
                ratio_max_t=as_float(row.ratio_max_t),
                error=row.error or None,
            ))
        session.add(run)
        session.flush()
        run_id = run.id
    logger.info(f"實驗 {spec.name} 已存入資料庫 (run id {run_id})")
    return run_id
