# -*- coding: utf-8 -*-
"""
設定模組 - Config 與各環境設定
"""
