#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
資料庫初始化腳本 - 建立實驗結果資料表

    python init_db.py                      # 使用 Config.DATABASE_URL
    python init_db.py sqlite:///out.db     # 指定資料庫
    python init_db.py --reset              # 先刪除所有資料表
"""

import argparse
import logging
import os
import sys
from pathlib import Path

# 添加專案根目錄到 Python 路徑
project_root = Path(__file__).parent.absolute()
sys.path.insert(0, str(project_root))

from app.database import drop_all_tables, get_db_session, init_database  # noqa: E402
from app.models import ExperimentRecord, ExperimentRun  # noqa: E402
from app.utils.helpers import setup_logging  # noqa: E402
from config.settings import Config  # noqa: E402

logger = logging.getLogger(__name__)


def create_directories():
    """建立必要的目錄"""
    for directory in (Config.OUTPUT_DIR, os.path.dirname(Config.LOG_FILE)):
        if directory:
            os.makedirs(directory, exist_ok=True)
            logger.info(f"建立目錄: {directory}")


def verify_database(url=None) -> bool:
    """驗證資料表是否可查詢"""
    try:
        with get_db_session(url) as db:
            for model_class in (ExperimentRun, ExperimentRecord):
                count = db.query(model_class).count()
                logger.info(f"資料表 {model_class.__tablename__}: {count} 筆記錄")
        return True
    except Exception as e:
        logger.error(f"資料庫驗證失敗: {str(e)}")
        return False


def main(argv=None) -> int:
    """主要初始化函數"""
    parser = argparse.ArgumentParser(description='建立實驗結果資料庫')
    parser.add_argument('url', nargs='?', default=None, help='資料庫連線字串')
    parser.add_argument('--reset', action='store_true', help='先刪除所有資料表')
    args = parser.parse_args(argv)

    setup_logging()
    create_directories()
    if not Config.validate_config():
        logger.warning("配置驗證失敗，但繼續初始化資料庫...")

    try:
        if args.reset:
            drop_all_tables(args.url)
        init_database(args.url)
    except Exception as e:
        logger.error(f"資料庫初始化失敗: {str(e)}")
        return 1

    if not verify_database(args.url):
        return 1
    print(f"資料庫已就緒: {args.url or Config.DATABASE_URL}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
