# -*- coding: utf-8 -*-
"""
資料庫連線與會話管理 (實驗結果儲存)
"""

import logging
from contextlib import contextmanager
from functools import lru_cache
from pathlib import Path
from typing import Optional

from sqlalchemy import create_engine, make_url
from sqlalchemy.engine import Engine
from sqlalchemy.orm import sessionmaker

from config.settings import Config

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def get_engine(url: Optional[str] = None) -> Engine:
    """
    取得 (並快取) 資料庫引擎

    Args:
        url: 資料庫連線字串，未提供時使用 Config.DATABASE_URL
    """
    options = Config.get_database_config(url)
    url = options.pop('url')
    database = make_url(url).database
    if url.startswith('sqlite') and database and database != ':memory:':
        Path(database).parent.mkdir(parents=True, exist_ok=True)
    return create_engine(url, **options)


@contextmanager
def get_db_session(url: Optional[str] = None):
    """
    取得資料庫會話 (離開時 commit，發生錯誤時 rollback)
    """
    session = sessionmaker(autocommit=False, autoflush=False, bind=get_engine(url))()
    try:
        yield session
        session.commit()
    except Exception as e:
        session.rollback()
        logger.error(f"資料庫操作失敗: {str(e)}")
        raise
    finally:
        session.close()


def init_database(url: Optional[str] = None) -> None:
    """
    初始化資料庫 - 建立所有資料表
    """
    try:
        from app.models import Base
        Base.metadata.create_all(bind=get_engine(url))
        logger.info("資料庫初始化完成")
    except Exception as e:
        logger.error(f"資料庫初始化失敗: {str(e)}")
        raise


def drop_all_tables(url: Optional[str] = None) -> None:
    """
    刪除所有資料表 (僅用於開發/測試)
    """
    try:
        from app.models import Base
        Base.metadata.drop_all(bind=get_engine(url))
        logger.warning("已刪除所有資料表")
    except Exception as e:
        logger.error(f"刪除資料表失敗: {str(e)}")
        raise
