# -*- coding: utf-8 -*-
"""
結果資料庫測試
"""

import pytest
from sqlalchemy import inspect

import init_db
from app.database import drop_all_tables, get_db_session, get_engine, init_database
from app.models import ExperimentRecord, ExperimentRun, RecordStatus
from config.settings import Config


def test_init_creates_tables(db_url):
    init_database(db_url)
    tables = set(inspect(get_engine(db_url)).get_table_names())
    assert {'experiment_runs', 'experiment_records'} <= tables


def test_drop_all_tables(db_url):
    init_database(db_url)
    drop_all_tables(db_url)
    assert inspect(get_engine(db_url)).get_table_names() == []


def test_records_cascade(db_url):
    init_database(db_url)
    with get_db_session(db_url) as session:
        run = ExperimentRun(name='manual', source='impartial', seed='1', instances=1, rules='sum-T')
        run.records.append(ExperimentRecord(instance_id=0, rule='sum-T', schedule='1,2,0', sum_t=7))
        session.add(run)

    with get_db_session(db_url) as session:
        stored = session.query(ExperimentRun).one()
        assert stored.records[0].status == RecordStatus.OK.value
        assert stored.records[0].sum_t == 7
        session.delete(stored)

    with get_db_session(db_url) as session:
        assert session.query(ExperimentRecord).count() == 0


def test_session_rolls_back_on_error(db_url):
    init_database(db_url)
    with pytest.raises(RuntimeError):
        with get_db_session(db_url) as session:
            session.add(ExperimentRun(name='lost', source='impartial', seed='1', instances=1, rules='sum-T'))
            session.flush()
            raise RuntimeError('boom')

    with get_db_session(db_url) as session:
        assert session.query(ExperimentRun).count() == 0


def test_init_db_script(db_url, tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(Config, 'OUTPUT_DIR', str(tmp_path / 'results'))
    assert init_db.main([db_url, '--reset']) == 0
    assert init_db.verify_database(db_url)
    assert db_url in capsys.readouterr().out
