# -*- coding: utf-8 -*-
"""
偏好資料服務 - PrefLib 解析、實例檔案讀寫、工作長度指定與合成資料產生
"""

import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core import LengthKind, PreferenceProfile, SourceKind, Instance
from app.exceptions import InvalidInstanceError, InvalidSpecError, ParseError
from app.utils.helpers import derive_seed, make_rng
from config.settings import Config

logger = logging.getLogger(__name__)

_NAME_LINE = re.compile(r'^#\s*ALTERNATIVE NAME\s+(\d+)\s*:\s?(.*)$', re.IGNORECASE)
_META_LINE = re.compile(r'^#\s*([A-Za-z ]+?)\s*:\s*(.*)$')


def _parse_int(token: str, line_number: int, what: str) -> int:
    try:
        return int(token.strip())
    except ValueError:
        raise ParseError(f"{what} is not an integer: {token.strip()!r}", line_number) from None


def _is_int(token: str) -> bool:
    return token.strip().lstrip('-').isdigit()


def _parse_ranking(body: str, m: Optional[int], line_number: int, offset: int) -> Tuple[int, ...]:
    """
    解析逗號分隔的排名並轉為 0 起算的工作編號

    Args:
        body: 排名字串
        m: 預期的候選數 (未知時為 None)
        line_number: 行號 (錯誤訊息用)
        offset: 檔案中的第一個編號 (PrefLib 為 1，原生格式為 0)
    """
    if '{' in body or '}' in body:
        raise ParseError("ties are not supported (strict complete orders only)", line_number)
    ranking = []
    seen = set()
    for token in body.split(','):
        if not token.strip():
            raise ParseError("empty candidate in ranking", line_number)
        job = _parse_int(token, line_number, "candidate") - offset
        if job in seen:
            raise ParseError(f"duplicate candidate {job + offset}", line_number)
        if job < 0 or (m is not None and job >= m):
            raise ParseError(f"unknown candidate {job + offset}", line_number)
        seen.add(job)
        ranking.append(job)
    if m is not None and len(ranking) != m:
        raise ParseError(f"incomplete ranking: expected {m} candidates, got {len(ranking)}", line_number)
    return tuple(ranking)


def _split_count(line: str, line_number: int, legacy: bool) -> Tuple[int, str]:
    if ':' in line:
        head, body = line.split(':', 1)
    elif legacy:
        head, _, body = line.partition(',')
    else:
        raise ParseError(f"expected 'count: c1,...,cm', got {line!r}", line_number)
    count = _parse_int(head, line_number, "count")
    if count < 1:
        raise ParseError(f"non-positive count {count}", line_number)
    return count, body


def parse_preflib(text: str) -> PreferenceProfile:
    """
    解析 PrefLib 嚴格完全排序 (soc) 資料

    支援現行格式 (`# KEY: value` 中繼資料與 `count: c1,...,cm`)，
    也接受舊版前言 (候選數、`i,name` 名稱列、`n,sum,unique` 統計列)。

    Args:
        text: 檔案內容

    Returns:
        單位長度的 PreferenceProfile，候選人名稱存於 labels
    """
    names: Dict[int, str] = {}
    m: Optional[int] = None
    declared_n: Optional[int] = None
    declared_line = 0
    legacy = False
    legacy_names_left = 0
    legacy_counts_pending = False
    orders: List[Tuple[int, ...]] = []
    weights: List[int] = []
    last_line = 0

    for line_number, raw in enumerate(text.splitlines(), start=1):
        last_line = line_number
        line = raw.strip()
        if not line:
            continue

        if line.startswith('#'):
            match = _NAME_LINE.match(line)
            if match:
                names[int(match.group(1))] = match.group(2).strip()
                continue
            match = _META_LINE.match(line)
            if match:
                key, value = match.group(1).strip().upper(), match.group(2).strip()
                if key == 'DATA TYPE' and value.lower() != 'soc':
                    raise ParseError(f"only strict complete orders (soc) are supported, got {value}",
                                     line_number)
                if key == 'NUMBER ALTERNATIVES':
                    m = _parse_int(value, line_number, "number of alternatives")
                elif key == 'NUMBER VOTERS':
                    declared_n = _parse_int(value, line_number, "number of voters")
                    declared_line = line_number
            continue

        # 舊版前言
        if not orders and m is None and _is_int(line):
            m = _parse_int(line, line_number, "number of alternatives")
            legacy = True
            legacy_names_left = m
            legacy_counts_pending = True
            continue
        if legacy_names_left:
            index, _, name = line.partition(',')
            names[_parse_int(index, line_number, "alternative index")] = name.strip()
            legacy_names_left -= 1
            continue
        if legacy_counts_pending:
            parts = line.split(',')
            if len(parts) != 3:
                raise ParseError(f"expected 'voters,sum,unique' line, got {line!r}", line_number)
            declared_n = _parse_int(parts[0], line_number, "number of voters")
            declared_line = line_number
            legacy_counts_pending = False
            continue

        count, body = _split_count(line, line_number, legacy)
        ranking = _parse_ranking(body, m, line_number, offset=1)
        if m is None:
            m = len(ranking)
        orders.append(ranking)
        weights.append(count)

    if not orders:
        raise ParseError("empty ranking section", last_line or None)
    if declared_n is not None and declared_n != sum(weights):
        raise ParseError(f"header declares {declared_n} voters, rankings sum to {sum(weights)}",
                         declared_line)
    if any(not 1 <= index <= m for index in names):
        raise ParseError(f"alternative name index out of range 1..{m}", None)

    labels = tuple(names.get(i + 1, str(i + 1)) for i in range(m)) if names else None
    profile = PreferenceProfile.from_orders(orders, labels=labels, weights=weights)
    logger.debug(f"PrefLib 解析完成: m={profile.m}, n={profile.n}, distinct={len(profile.preferred)}")
    return profile


def write_preflib(profile: PreferenceProfile, title: str = "collective scheduling profile") -> str:
    """
    將偏好資料寫成 PrefLib soc 格式 (處理時間不會保留)

    Args:
        profile: 偏好資料
        title: FILE NAME 中繼資料

    Returns:
        檔案內容
    """
    lines = [
        f"# FILE NAME: {title}",
        "# DATA TYPE: soc",
        f"# NUMBER ALTERNATIVES: {profile.m}",
        f"# NUMBER VOTERS: {profile.n}",
        f"# NUMBER UNIQUE ORDERS: {len(profile.preferred)}",
    ]
    for job, label in enumerate(profile.labels):
        lines.append(f"# ALTERNATIVE NAME {job + 1}: {label}")
    for schedule, weight in profile.agents():
        lines.append(f"{weight}: " + ",".join(str(job + 1) for job in schedule.order))
    return "\n".join(lines) + "\n"


def read_instance(text: str) -> Instance:
    """
    解析原生實例格式

    格式:
        # 註解
        jobs
        <id> <length> [label]
        prefs
        <count>: id,id,...

    Args:
        text: 檔案內容

    Returns:
        Instance
    """
    section = None
    job_lengths: Dict[int, int] = {}
    job_labels: Dict[int, str] = {}
    orders: List[Tuple[int, ...]] = []
    weights: List[int] = []
    last_line = 0

    for line_number, raw in enumerate(text.splitlines(), start=1):
        last_line = line_number
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        keyword = line.lower()
        if keyword in ('jobs', 'prefs'):
            if keyword == 'prefs' and not job_lengths:
                raise ParseError("prefs section before any job", line_number)
            section = keyword
            continue

        if section == 'jobs':
            parts = line.split(None, 2)
            if len(parts) < 2:
                raise ParseError(f"expected '<id> <length> [label]', got {line!r}", line_number)
            job = _parse_int(parts[0], line_number, "job id")
            length = _parse_int(parts[1], line_number, "job length")
            if job in job_lengths:
                raise ParseError(f"duplicate job id {job}", line_number)
            if length < 1:
                raise ParseError(f"job {job}: length must be >= 1, got {length}", line_number)
            job_lengths[job] = length
            if len(parts) == 3:
                job_labels[job] = parts[2].strip()
        elif section == 'prefs':
            if sorted(job_lengths) != list(range(len(job_lengths))):
                raise ParseError("job ids must be 0..m-1", line_number)
            count, body = _split_count(line, line_number, legacy=False)
            orders.append(_parse_ranking(body, len(job_lengths), line_number, offset=0))
            weights.append(count)
        else:
            raise ParseError(f"line outside of a 'jobs' or 'prefs' section: {line!r}", line_number)

    if not job_lengths:
        raise ParseError("no jobs section", last_line or None)
    if not orders:
        raise ParseError("empty ranking section", last_line or None)

    m = len(job_lengths)
    labels = tuple(job_labels.get(j, str(j)) for j in range(m)) if job_labels else None
    return PreferenceProfile.from_orders(orders,
                                         lengths=[job_lengths[j] for j in range(m)],
                                         labels=labels,
                                         weights=weights)


def write_instance(profile: Instance, comments: Sequence[str] = ()) -> str:
    """
    將實例寫成原生格式

    Args:
        profile: 實例
        comments: 檔頭註解 (每行前面會加上 '# ')

    Returns:
        檔案內容
    """
    lines = [f"# {comment}" for comment in comments]
    lines.append("jobs")
    for job in profile.jobs:
        label = f" {profile.labels[job.id]}" if profile.labels else ""
        lines.append(f"{job.id} {job.processing_time}{label}")
    lines.append("prefs")
    for schedule, weight in profile.agents():
        lines.append(f"{weight}: " + ",".join(str(job) for job in schedule.order))
    return "\n".join(lines) + "\n"


def load_instance(path: Union[str, Path]) -> Instance:
    """
    讀取實例檔案；含有 `jobs` 區段者視為原生格式，否則視為 PrefLib (單位長度)
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise InvalidInstanceError(f"cannot read {path}: {e.strerror or e}") from e

    is_native = any(line.strip().lower() == 'jobs' for line in text.splitlines())
    profile = read_instance(text) if is_native else parse_preflib(text)
    logger.info(f"載入實例 {path.name}: m={profile.m}, n={profile.n}")
    return profile


def save_instance(path: Union[str, Path], profile: Instance, comments: Sequence[str] = ()) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(write_instance(profile, comments), encoding='utf-8')
    return path


@dataclass(frozen=True)
class LengthSpec:
    """工作長度指定方式：單位、均勻隨機 {1..p_max}、或明確列表"""
    kind: LengthKind = LengthKind.UNIT
    p_max: int = 1
    values: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'kind', LengthKind(self.kind))
        object.__setattr__(self, 'values', tuple(int(v) for v in self.values))
        if self.p_max < 1:
            raise InvalidSpecError(f"p_max must be >= 1, got {self.p_max}")
        if self.kind == LengthKind.EXPLICIT and not self.values:
            raise InvalidSpecError("explicit lengths need at least one value")
        if any(v < 1 for v in self.values):
            raise InvalidSpecError(f"explicit lengths must be positive: {self.values}")

    @classmethod
    def uniform(cls, p_max: int) -> 'LengthSpec':
        return cls(LengthKind.UNIFORM, p_max=p_max)

    @classmethod
    def explicit(cls, values: Sequence[int]) -> 'LengthSpec':
        return cls(LengthKind.EXPLICIT, values=tuple(values))

    @classmethod
    def parse(cls, text: str) -> 'LengthSpec':
        """解析 'unit'、'uniform:10' 或 'explicit:3,1,2'"""
        kind, _, arg = text.strip().partition(':')
        try:
            kind = LengthKind(kind.strip().lower())
        except ValueError:
            raise InvalidSpecError(f"unknown length spec: {text}") from None
        try:
            if kind == LengthKind.UNIFORM:
                return cls.uniform(int(arg))
            if kind == LengthKind.EXPLICIT:
                return cls.explicit([int(v) for v in arg.split(',')])
        except ValueError:
            raise InvalidSpecError(f"malformed length spec: {text}") from None
        return cls()

    def __str__(self) -> str:
        if self.kind == LengthKind.UNIFORM:
            return f"uniform:{self.p_max}"
        if self.kind == LengthKind.EXPLICIT:
            return "explicit:" + ",".join(str(v) for v in self.values)
        return "unit"


def assign_lengths(profile: PreferenceProfile, length_spec: LengthSpec, seed: int) -> Instance:
    """
    為偏好資料指定處理時間

    Args:
        profile: 偏好資料
        length_spec: 長度指定方式
        seed: 亂數種子 (僅 UNIFORM 使用)

    Returns:
        Instance
    """
    if length_spec.kind == LengthKind.UNIT:
        return profile.unit_copy()
    if length_spec.kind == LengthKind.EXPLICIT:
        if len(length_spec.values) != profile.m:
            raise InvalidSpecError(
                f"explicit lengths: expected {profile.m} values, got {len(length_spec.values)}")
        return profile.with_lengths(length_spec.values)

    rng = make_rng(seed)
    lengths = rng.integers(1, length_spec.p_max, size=profile.m, endpoint=True)
    return profile.with_lengths(lengths.tolist())


def _check_sizes(m: int, n: int) -> None:
    if m < 1:
        raise InvalidSpecError(f"m must be >= 1, got {m}")
    if n < 1:
        raise InvalidSpecError(f"n must be >= 1, got {n}")


def generate_impartial(m: int, n: int, seed: int) -> PreferenceProfile:
    """
    Impartial culture：n 個互相獨立的均勻隨機排列

    Args:
        m: 工作數
        n: 代理人數
        seed: 亂數種子

    Returns:
        單位長度的 PreferenceProfile
    """
    _check_sizes(m, n)
    rng = make_rng(seed)
    orders = rng.permuted(np.tile(np.arange(m), (n, 1)), axis=1)
    return PreferenceProfile.from_orders(orders.tolist())


def generate_mallows(m: int, n: int, phi: float,
                     reference: Optional[Sequence[int]] = None,
                     seed: int = Config.DEFAULT_SEED) -> PreferenceProfile:
    """
    Mallows 模型抽樣 (repeated insertion)

    參考排列中的第 i 個工作 (0 起算) 插入目前長度為 i 的排列，
    插在位置 pos 的機率正比於 φ^(i - pos)，因此整體機率正比於 φ^(Kendall 距離)。

    Args:
        m: 工作數
        n: 代理人數
        phi: 離散度 φ ∈ (0, 1]，φ = 1 即 impartial culture
        reference: 參考排列，預設為 0..m-1
        seed: 亂數種子

    Returns:
        單位長度的 PreferenceProfile
    """
    _check_sizes(m, n)
    if not 0 < phi <= 1:
        raise InvalidSpecError(f"Mallows dispersion must be in (0, 1], got {phi}")
    reference = tuple(range(m)) if reference is None else tuple(int(j) for j in reference)
    if sorted(reference) != list(range(m)):
        raise InvalidSpecError(f"reference order must be a permutation of 0..{m - 1}: {reference}")

    rng = make_rng(seed)
    rankings = [[reference[0]] for _ in range(n)]
    for i in range(1, m):
        weights = phi ** np.arange(i, -1, -1, dtype=float)
        slots = rng.choice(i + 1, size=n, p=weights / weights.sum())
        item = reference[i]
        for ranking, slot in zip(rankings, slots.tolist()):
            ranking.insert(slot, item)
    return PreferenceProfile.from_orders(rankings)


@dataclass(frozen=True)
class ProfileSource:
    """
    實驗用的實例來源

    合成來源每個實例重新抽樣偏好；PrefLib 來源固定偏好、每個實例重新抽長度。
    """
    kind: SourceKind
    m: int = 10
    n: int = 500
    phi: float = Config.DEFAULT_MALLOWS_PHI
    reference: Tuple[int, ...] = ()
    path: Optional[str] = None
    length_spec: LengthSpec = field(default_factory=lambda: LengthSpec.uniform(Config.DEFAULT_P_MAX))
    seed: int = Config.DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, 'kind', SourceKind(self.kind))
        object.__setattr__(self, 'reference', tuple(int(j) for j in self.reference))
        if self.kind == SourceKind.PREFLIB:
            if not self.path:
                raise InvalidSpecError("a PrefLib source needs a file path")
        else:
            _check_sizes(self.m, self.n)
        if self.kind == SourceKind.MALLOWS and not 0 < self.phi <= 1:
            raise InvalidSpecError(f"Mallows dispersion must be in (0, 1], got {self.phi}")
        if self.reference and sorted(self.reference) != list(range(self.m)):
            raise InvalidSpecError(f"reference order must be a permutation of 0..{self.m - 1}")

    @cached_property
    def _preflib_profile(self) -> PreferenceProfile:
        return load_instance(self.path).unit_copy()

    @property
    def job_count(self) -> int:
        return self._preflib_profile.m if self.kind == SourceKind.PREFLIB else self.m

    def build(self, instance_id: int) -> Instance:
        """
        產生第 instance_id 個實例 (對同一個 seed 完全可重現)
        """
        profile_seed = derive_seed(self.seed, instance_id, 0)
        if self.kind == SourceKind.PREFLIB:
            profile = self._preflib_profile
        elif self.kind == SourceKind.MALLOWS:
            profile = generate_mallows(self.m, self.n, self.phi, self.reference or None, profile_seed)
        else:
            profile = generate_impartial(self.m, self.n, profile_seed)
        return assign_lengths(profile, self.length_spec, derive_seed(self.seed, instance_id, 1))

    def describe(self) -> Dict[str, str]:
        """記錄到實驗輸出的參數"""
        info = {'source': self.kind.value, 'lengths': str(self.length_spec), 'seed': str(self.seed)}
        if self.kind == SourceKind.PREFLIB:
            info['path'] = str(self.path)
        else:
            info['m'] = str(self.m)
            info['n'] = str(self.n)
        if self.kind == SourceKind.MALLOWS:
            info['phi'] = repr(self.phi)
            info['reference'] = ",".join(str(j) for j in (self.reference or range(self.m)))
        return info
