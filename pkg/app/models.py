# -*- coding: utf-8 -*-
"""
資料庫模型定義 - 實驗執行與每一列結果
"""

from enum import Enum

from sqlalchemy import Column, DateTime, Float, ForeignKey, Index, Integer, String, Text
from sqlalchemy.orm import declarative_base, relationship
from sqlalchemy.sql import func

Base = declarative_base()


class RecordStatus(str, Enum):
    """單一實例的執行狀態"""
    OK = "ok"
    ERROR = "error"


class ExperimentRun(Base):
    """實驗執行資料表"""
    __tablename__ = 'experiment_runs'

    id = Column(Integer, primary_key=True, autoincrement=True)
    name = Column(String(255), nullable=False, comment='實驗名稱')
    source = Column(String(50), nullable=False, comment='偏好資料來源')
    parameters = Column(Text, comment='key=value 形式的完整設定')
    seed = Column(String(32), nullable=False, comment='64 位元種子 (字串保存)')
    instances = Column(Integer, nullable=False, comment='實例數')
    rules = Column(String(500), nullable=False, comment='規則清單 (逗號分隔)')
    software_version = Column(String(50), comment='軟體版本')
    paradox_sum_t = Column(Float, comment='Σ-T 最佳解的平均悖論比例')
    paradox_max_t = Column(Float, comment='max-T 最佳解的平均悖論比例')
    copeland_sum_t_ratio = Column(Float, comment='PTA Copeland / Σ-T 平均比值')
    copeland_max_t_ratio = Column(Float, comment='PTA Copeland / max-T 平均比值')
    delta_gini = Column(Float, comment='Gini(max-T) - Gini(Σ-T) 平均值')
    created_at = Column(DateTime, default=func.now(), comment='寫入時間')

    # 關聯關係
    records = relationship("ExperimentRecord", back_populates="run", cascade="all, delete-orphan")

    def __repr__(self):
        return f"<ExperimentRun(name='{self.name}', source='{self.source}', instances={self.instances})>"


class ExperimentRecord(Base):
    """實驗結果資料表 (每個實例、每個規則一列)"""
    __tablename__ = 'experiment_records'

    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(Integer, ForeignKey('experiment_runs.id'), nullable=False, comment='實驗執行ID')
    instance_id = Column(Integer, nullable=False, comment='實例編號')
    rule = Column(String(50), nullable=False, comment='規則識別碼')
    status = Column(String(20), default=RecordStatus.OK.value, comment='執行狀態')
    schedule = Column(Text, comment='排程 (逗號分隔的工作編號)')
    objective = Column(String(64), comment='規則自身的目標值 (整數字串)')
    sum_t = Column(Integer, comment='總延遲')
    max_t = Column(Integer, comment='最大代理人延遲')
    paradox_rate = Column(Float, comment='PTA Condorcet 悖論比例')
    gini = Column(Float, comment='代理人延遲的 Gini 係數')
    ratio_sum_t = Column(Float, comment='相對 Σ-T 最佳值的比值')
    ratio_max_t = Column(Float, comment='相對 max-T 最佳值的比值')
    error = Column(Text, comment='錯誤訊息')

    # 關聯關係
    run = relationship("ExperimentRun", back_populates="records")

    # 依實驗與實例查詢
    __table_args__ = (
        Index('idx_record_run_instance', 'run_id', 'instance_id'),
    )

    def __repr__(self):
        return f"<ExperimentRecord(instance_id={self.instance_id}, rule='{self.rule}', status='{self.status}')>"
