# -*- coding: utf-8 -*-
"""
位置計分規則 (h-psf) - 依照「排在後面的工作總長度」計分
"""

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from app.core import PreferenceProfile, Schedule
from app.exceptions import InvalidSpecError

logger = logging.getLogger(__name__)

NAMED_TRANSFORMS = ('identity', 'square')


@dataclass(frozen=True)
class PsfSpec:
    """
    遞增的整數轉換 h

    name 為 'identity'、'square' 或 'custom'；custom 時 h(x) = table[x]。
    """
    name: str = 'identity'
    table: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'table', tuple(int(v) for v in self.table))
        if self.name not in NAMED_TRANSFORMS + ('custom',):
            raise InvalidSpecError(f"unknown psf transform: {self.name}")
        if self.name == 'custom':
            if not self.table:
                raise InvalidSpecError("a custom psf transform needs a table")
            if any(a >= b for a, b in zip(self.table, self.table[1:])):
                raise InvalidSpecError("a custom psf table must be strictly increasing")

    @classmethod
    def custom(cls, table: Sequence[int]) -> 'PsfSpec':
        return cls('custom', tuple(table))

    def apply(self, values: np.ndarray) -> np.ndarray:
        """對非負整數陣列套用 h"""
        values = np.asarray(values, dtype=np.int64)
        if self.name == 'identity':
            return values
        if self.name == 'square':
            return values * values
        if values.size and values.max() >= len(self.table):
            raise InvalidSpecError(
                f"custom psf table covers 0..{len(self.table) - 1}, needs {int(values.max())}")
        return np.array(self.table, dtype=object)[values]

    def __call__(self, value: int) -> int:
        return int(self.apply(np.array([value]))[0])


def h_scores(profile: PreferenceProfile, h: PsfSpec) -> List[int]:
    """
    所有工作的 h 分數

    Returns:
        score[j] = Σ_a h(在 σ_a 中排在 j 之後的工作總長度)，依人數加權
    """
    after = profile.total_length - profile.due_matrix
    contributions = h.apply(after)
    weights = np.array(profile.multiplicities, dtype=object)
    return [int(v) for v in weights.dot(contributions.astype(object))]


def h_score(job: int, profile: PreferenceProfile, h: PsfSpec) -> int:
    """
    單一工作的 h 分數

    Args:
        job: 工作編號
        profile: 偏好資料
        h: 轉換函數

    Returns:
        整數分數
    """
    if not 0 <= job < profile.m:
        raise InvalidSpecError(f"unknown job {job}")
    return h_scores(profile, h)[job]


def psf_rule(profile: PreferenceProfile, h: PsfSpec) -> Schedule:
    """
    依 h 分數遞減排序；同分時較短的工作優先，再依編號

    Args:
        profile: 偏好資料
        h: 轉換函數

    Returns:
        Schedule
    """
    scores = h_scores(profile, h)
    lengths = profile.lengths
    order = sorted(range(profile.m), key=lambda j: (-scores[j], lengths[j], j))
    logger.debug(f"h-psf ({h.name}) 分數: {scores}")
    return Schedule(tuple(order))
