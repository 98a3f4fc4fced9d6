# -*- coding: utf-8 -*-
"""
共用測試資料
"""

from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from app.core import PreferenceProfile
from app.database import get_engine

FIXTURES = Path(__file__).parent / 'fixtures'


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def short_job() -> PreferenceProfile:
    """兩個長工作、一個短工作；短工作被約四分之一的代理人排在最前面"""
    return PreferenceProfile.from_orders(
        [(0, 1, 2), (1, 0, 2), (2, 0, 1), (2, 1, 0)],
        lengths=(10, 10, 1),
        weights=(151, 151, 49, 49))


@pytest.fixture
def two_agents() -> PreferenceProfile:
    """長度 20、5、1，兩位代理人"""
    return PreferenceProfile.from_orders(
        [(0, 2, 1), (1, 0, 2)], lengths=(20, 5, 1), labels=('J1', 'J2', 'J3'))


@pytest.fixture
def five_agents() -> PreferenceProfile:
    """單位長度、五位代理人；Σ-T 最佳解違反 PTA Condorcet"""
    return PreferenceProfile.from_orders(
        [(0, 1, 2), (0, 2, 1), (1, 2, 0)], weights=(1, 2, 2), labels=('J1', 'J2', 'J3'))


def random_instance(rng: np.random.Generator, m: int, n: int, p_max: int) -> PreferenceProfile:
    orders = [rng.permutation(m).tolist() for _ in range(n)]
    lengths = rng.integers(1, p_max, size=m, endpoint=True).tolist()
    return PreferenceProfile.from_orders(orders, lengths=lengths)


@pytest.fixture
def instance_factory():
    """random_instance(seed, m, n, p_max)"""
    def build(seed: int, m: int, n: int, p_max: int) -> PreferenceProfile:
        return random_instance(np.random.default_rng(seed), m, n, p_max)
    return build


@st.composite
def instances(draw, min_jobs=2, max_jobs=6, max_agents=6, p_max=10, unit=False):
    """hypothesis 策略：隨機偏好與長度的小型實例"""
    m = draw(st.integers(min_jobs, max_jobs))
    orders = draw(st.lists(st.permutations(list(range(m))), min_size=1, max_size=max_agents))
    if unit:
        lengths = [1] * m
    else:
        lengths = draw(st.lists(st.integers(1, p_max), min_size=m, max_size=m))
    return PreferenceProfile.from_orders(orders, lengths=lengths)


@pytest.fixture
def db_url(tmp_path):
    """暫存 SQLite 檔案 (每個測試獨立)"""
    url = f"sqlite:///{tmp_path / 'results.db'}"
    yield url
    get_engine(url).dispose()
