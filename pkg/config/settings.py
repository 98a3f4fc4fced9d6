# -*- coding: utf-8 -*-
"""
應用程式設定檔案
"""

import logging
import os

from dotenv import load_dotenv

# 載入環境變數
load_dotenv()

logger = logging.getLogger(__name__)


class Config:
    """應用程式配置類別"""

    # === 基本設定 ===
    DEBUG = os.getenv('DEBUG', 'False').lower() == 'true'

    # === 輸出設定 (唯一的功能性環境變數) ===
    OUTPUT_DIR = os.getenv('COLLECTIVE_OUTPUT_DIR', './results')

    # === 結果資料庫設定 ===
    DATABASE_URL = f"sqlite:///{os.path.join(OUTPUT_DIR, 'results.db')}"

    # === 日誌設定 ===
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_FILE = os.getenv('LOG_FILE', '')

    # === 求解器容量上限 ===
    BRUTE_FORCE_MAX_JOBS = 10
    SUBSET_DP_MAX_JOBS = 24
    BRANCH_AND_BOUND_MAX_JOBS = 20
    EXPERIMENT_MAX_JOBS = 20

    # === 實驗預設值 ===
    DEFAULT_MALLOWS_PHI = 0.8  # 一律記錄於輸出
    DEFAULT_INSTANCES = 100
    DEFAULT_SEED = 20180709
    DEFAULT_P_MAX = 10
    DEFAULT_WORKERS = 1
    DEFAULT_RULES = ('sum-T', 'max-T', 'pta-copeland')

    # === 輸出格式 ===
    CSV_DIGITS = 6

    @classmethod
    def validate_config(cls) -> bool:
        """
        驗證配置是否一致

        Returns:
            配置是否有效
        """
        problems = []
        if not cls.BRANCH_AND_BOUND_MAX_JOBS <= cls.SUBSET_DP_MAX_JOBS:
            problems.append('BRANCH_AND_BOUND_MAX_JOBS > SUBSET_DP_MAX_JOBS')
        if not cls.BRUTE_FORCE_MAX_JOBS <= cls.BRANCH_AND_BOUND_MAX_JOBS:
            problems.append('BRUTE_FORCE_MAX_JOBS > BRANCH_AND_BOUND_MAX_JOBS')
        if not 0 < cls.DEFAULT_MALLOWS_PHI <= 1:
            problems.append('DEFAULT_MALLOWS_PHI not in (0, 1]')
        if cls.DEFAULT_INSTANCES < 1 or cls.DEFAULT_P_MAX < 1 or cls.DEFAULT_WORKERS < 1:
            problems.append('non-positive experiment default')

        if problems:
            logger.error(f"配置不一致: {', '.join(problems)}")
            return False

        return True

    @classmethod
    def get_database_config(cls, url: str = None) -> dict:
        """
        取得資料庫配置

        Args:
            url: 資料庫連線字串，未提供時使用預設結果資料庫

        Returns:
            資料庫配置字典
        """
        return {
            'url': url or cls.DATABASE_URL,
            'echo': cls.DEBUG,
            'pool_pre_ping': True,
        }

    @classmethod
    def get_logging_config(cls, level: str = None) -> dict:
        """
        取得日誌配置

        Args:
            level: 覆寫的日誌等級

        Returns:
            日誌配置字典
        """
        level = level or cls.LOG_LEVEL
        handlers = {
            'console': {
                'class': 'logging.StreamHandler',
                'formatter': 'default',
                'level': level,
                'stream': 'ext://sys.stderr',
            }
        }
        if cls.LOG_FILE:
            handlers['file'] = {
                'class': 'logging.FileHandler',
                'filename': cls.LOG_FILE,
                'formatter': 'detailed',
                'level': level,
                'encoding': 'utf-8'
            }

        return {
            'version': 1,
            'disable_existing_loggers': False,
            'formatters': {
                'default': {
                    'format': '[%(asctime)s] %(levelname)s in %(module)s: %(message)s',
                },
                'detailed': {
                    'format': '[%(asctime)s] %(levelname)s [%(name)s.%(funcName)s:%(lineno)d] %(message)s',
                }
            },
            'handlers': handlers,
            'root': {
                'level': level,
                'handlers': list(handlers)
            }
        }
