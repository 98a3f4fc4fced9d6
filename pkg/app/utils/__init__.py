# -*- coding: utf-8 -*-
"""
工具函式模組 - 日誌設定、亂數種子與數值格式化
"""
