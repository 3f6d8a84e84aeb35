from sqlalchemy import Boolean, Column, DateTime, Float, ForeignKey, Integer, String, Text
from sqlalchemy.orm import declarative_base, relationship
import datetime

Base = declarative_base()


class ReportRun(Base):
    __tablename__ = 'report_runs'

    id = Column(Integer, primary_key=True)
    created_at = Column(DateTime, default=datetime.datetime.now, nullable=False)
    label = Column(String(100), nullable=True)
    exact_mode = Column(Boolean, default=False, nullable=False)
    passed = Column(Boolean, default=False, nullable=False)  # all criteria passed

    results = relationship("CriterionResult", back_populates="run", cascade="all, delete-orphan")


class CriterionResult(Base):
    __tablename__ = 'criterion_results'

    id = Column(Integer, primary_key=True)
    run_id = Column(Integer, ForeignKey('report_runs.id'), nullable=False)
    criterion = Column(Integer, nullable=False)
    name = Column(String(100), nullable=True)
    passed = Column(Boolean, nullable=False)
    value = Column(Float, nullable=True)  # NULL when the check raised
    detail = Column(Text, nullable=True)
    runtime = Column(Float, nullable=True)  # seconds

    run = relationship("ReportRun", back_populates="results")
