# -*- coding: utf-8 -*-
"""
工具函式 - 日誌、亂數種子、數值格式化
"""

import logging
import logging.config
from datetime import timedelta
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from config.settings import Config

logger = logging.getLogger(__name__)

Number = Union[int, Fraction, float, None]


def setup_logging(level: Optional[str] = None) -> None:
    """
    依照 Config.get_logging_config() 設定日誌

    Args:
        level: 覆寫的日誌等級 (例如 'DEBUG')
    """
    logging.config.dictConfig(Config.get_logging_config(level))


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """
    建立可重現的亂數產生器 (PCG64)

    Args:
        seed: 64 位元主種子
        keys: 衍生子串流的鍵 (例如實例編號)

    Returns:
        numpy Generator
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, *[int(k) for k in keys]]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def format_decimal(value: Number, digits: int = Config.CSV_DIGITS) -> str:
    """
    將有理數格式化為固定小數位數

    Args:
        value: 整數、Fraction 或 float；None 代表無限大
        digits: 小數位數

    Returns:
        格式化後的字串
    """
    if value is None:
        return "inf"
    if isinstance(value, Fraction):
        # 四捨五入到指定位數，不經過浮點數
        scaled = value * 10 ** digits
        rounded = (scaled.numerator * 2 + scaled.denominator) // (2 * scaled.denominator)
        sign = "-" if rounded < 0 else ""
        whole, frac = divmod(abs(rounded), 10 ** digits)
        return f"{sign}{whole}.{frac:0{digits}d}"
    return f"{value:.{digits}f}"


def format_elapsed(seconds: float) -> str:
    """
    計算時間差並格式化顯示

    Args:
        seconds: 經過的秒數

    Returns:
        格式化的時間字串
    """
    diff = timedelta(seconds=seconds)
    minutes, secs = divmod(diff.total_seconds(), 60)
    if minutes >= 1:
        return f"{int(minutes)}m {secs:.1f}s"
    if secs >= 1:
        return f"{secs:.2f}s"
    return f"{secs * 1000:.1f}ms"


def mean_and_std(values: Sequence[Fraction]):
    """樣本平均與母體標準差 (平均為精確有理數，標準差為浮點數)"""
    if not values:
        return None, None
    mean = sum(values, Fraction(0)) / len(values)
    variance = sum(((v - mean) ** 2 for v in values), Fraction(0)) / len(values)
    return mean, float(variance) ** 0.5


def derive_seed(seed: int, *keys: int) -> int:
    """由主種子與鍵衍生出新的 64 位元整數種子"""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, *[int(k) for k in keys]]
    state = np.random.SeedSequence(entropy).generate_state(2, np.uint32)
    return (int(state[0]) << 32) | int(state[1])
