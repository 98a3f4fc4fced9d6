#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
啟動腳本 - 從專案根目錄執行命令列介面

    python run.py solve tests/fixtures/two_agents.txt --cost T --agg sum
"""

import sys
from pathlib import Path

# 添加專案根目錄到 Python 路徑
project_root = Path(__file__).resolve().parent
sys.path.insert(0, str(project_root))

from app.main import main  # noqa: E402

if __name__ == '__main__':
    sys.exit(main())
