# -*- coding: utf-8 -*-
"""
錯誤類別 - 每個錯誤帶有 CLI 結束碼
"""

from typing import Optional


class CollectiveScheduleError(Exception):
    """所有領域錯誤的基底類別"""

    exit_code = 1


class InvalidInstanceError(CollectiveScheduleError, ValueError):
    """排程與工作集合不一致、未知的工作編號、長度不合法"""


class ParseError(InvalidInstanceError):
    """檔案解析失敗，附帶行號"""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class InvalidSpecError(CollectiveScheduleError, ValueError):
    """參數、規則名稱或實驗設定不合法"""


class UnsupportedCombinationError(InvalidSpecError):
    """成本函數與聚合方式的組合不受支援"""


class PreconditionError(CollectiveScheduleError):
    """演算法前置條件不成立 (例如工作長度不相等)"""


class CapacityError(CollectiveScheduleError):
    """超過求解器容量上限"""

    exit_code = 2


class SolverError(CollectiveScheduleError):
    """求解結果與獨立重算的目標值不一致"""
