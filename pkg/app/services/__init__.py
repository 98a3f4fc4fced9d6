# -*- coding: utf-8 -*-
"""
服務層模組 - 規則、求解器、公理檢查與實驗
"""
