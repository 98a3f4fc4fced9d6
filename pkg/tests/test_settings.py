# -*- coding: utf-8 -*-
"""
設定與工具函式測試
"""

import logging
from fractions import Fraction

from app.utils.helpers import derive_seed, format_decimal, format_elapsed, make_rng, mean_and_std
from config import settings
from config.settings import Config


class TestConfig:

    def test_defaults_are_consistent(self):
        assert Config.validate_config()

    def test_inconsistent_guards(self, monkeypatch, caplog):
        monkeypatch.setattr(Config, 'BRANCH_AND_BOUND_MAX_JOBS', 30)
        with caplog.at_level(logging.ERROR, logger='config.settings'):
            assert not Config.validate_config()
        assert 'BRANCH_AND_BOUND_MAX_JOBS' in caplog.text

    def test_single_configuration_class(self):
        subclasses = [value for value in vars(settings).values()
                      if isinstance(value, type) and issubclass(value, Config)]
        assert subclasses == [Config]
        assert not hasattr(settings, 'config')

    def test_database_config(self, monkeypatch):
        options = Config.get_database_config('sqlite:///x.db')
        assert options['url'] == 'sqlite:///x.db'
        assert Config.get_database_config()['url'] == Config.DATABASE_URL
        monkeypatch.setattr(Config, 'DEBUG', True)
        assert Config.get_database_config()['echo'] is True

    def test_logging_config(self, monkeypatch, tmp_path):
        assert set(Config.get_logging_config('DEBUG')['handlers']) == {'console'}
        monkeypatch.setattr(Config, 'LOG_FILE', str(tmp_path / 'run.log'))
        logging_config = Config.get_logging_config()
        assert logging_config['handlers']['file']['formatter'] == 'detailed'
        assert logging_config['root']['handlers'] == ['console', 'file']


class TestHelpers:

    def test_format_decimal_rounds_exactly(self):
        assert format_decimal(Fraction(1, 3)) == '0.333333'
        assert format_decimal(Fraction(2, 3)) == '0.666667'
        assert format_decimal(Fraction(-1, 3), digits=2) == '-0.33'
        assert format_decimal(None) == 'inf'
        assert format_decimal(2, digits=1) == '2.0'

    def test_format_elapsed(self):
        assert format_elapsed(0.0123) == '12.3ms'
        assert format_elapsed(2.5) == '2.50s'
        assert format_elapsed(75) == '1m 15.0s'

    def test_mean_and_std(self):
        mean, std = mean_and_std([Fraction(1), Fraction(3)])
        assert mean == 2
        assert std == 1.0
        assert mean_and_std([]) == (None, None)

    def test_streams_are_reproducible(self):
        assert make_rng(5, 1).integers(0, 10 ** 9) == make_rng(5, 1).integers(0, 10 ** 9)
        assert derive_seed(5, 1) == derive_seed(5, 1)
        assert derive_seed(5, 1) != derive_seed(5, 2)
        assert 0 <= derive_seed(2 ** 70, 3) < 2 ** 64
