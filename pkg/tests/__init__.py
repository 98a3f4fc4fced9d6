# -*- coding: utf-8 -*-
"""
測試模組 - pytest 測試案例 (共用資料見 conftest.py)
"""
