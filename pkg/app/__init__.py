# -*- coding: utf-8 -*-
"""
集體排程 (collective scheduling) - 主要套件
"""

__version__ = "1.0.0"
__author__ = "collective-scheduling maintainers"
