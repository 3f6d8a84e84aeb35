import logging
import math

import pandas as pd
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker

from models import Base, CriterionResult, ReportRun

logger = logging.getLogger('outer_space.db_handler')
logger.addHandler(logging.NullHandler())


class DatabaseHandler:
    def __init__(self, db_path='sqlite:///outer_space.db'):
        """Initialize the database handler with the specified database path.

        For in-memory database, use 'sqlite:///:memory:'
        For file-based database, use 'sqlite:///filename.db'
        """
        # Normalize in-memory database path for SQLAlchemy
        if db_path == ':memory:':
            db_path = 'sqlite:///:memory:'

        self.ReportRun = ReportRun
        self.CriterionResult = CriterionResult

        if 'sqlite' in db_path:
            self.engine = create_engine(
                db_path,
                connect_args={'timeout': 30},  # SQLite timeout in seconds
                pool_pre_ping=True
            )
        else:
            self.engine = create_engine(
                db_path,
                pool_recycle=3600,
                pool_pre_ping=True,
                pool_size=5,
                max_overflow=10
            )

        try:
            Base.metadata.create_all(self.engine)
        except Exception as e:
            logger.error(f"Error creating database schema: {e}")
            raise

        self.Session = sessionmaker(bind=self.engine)

    def get_session(self):
        """Get a new session for database operations."""
        try:
            return self.Session()
        except Exception as e:
            logger.error(f"Error creating database session: {e}")
            raise

    def save_report(self, frame: pd.DataFrame, label=None, exact_mode=False):
        """Store an acceptance report table as one run with one row per criterion.

        Returns:
            The new run id, or None if the report could not be stored
        """
        session = self.get_session()
        try:
            run = ReportRun(label=label, exact_mode=bool(exact_mode),
                            passed=bool(len(frame)) and bool(frame['passed'].all()))
            for row in frame.to_dict('records'):
                value = row.get('value')
                run.results.append(CriterionResult(
                    criterion=int(row['criterion']),
                    name=row.get('name'),
                    passed=bool(row['passed']),
                    value=None if value is None or math.isnan(value) else float(value),
                    detail=row.get('detail'),
                    runtime=row.get('runtime'),
                ))
            session.add(run)
            session.commit()
            run_id = run.id
            logger.info(f"Stored report run {run_id} with {len(frame)} criteria")
            return run_id
        except Exception as e:
            session.rollback()
            logger.error(f"Error storing report: {e}")
            return None
        finally:
            session.close()

    def get_report_runs(self):
        """All stored runs, newest first."""
        session = self.get_session()
        runs = session.query(ReportRun).order_by(ReportRun.created_at.desc(), ReportRun.id.desc()).all()
        session.close()
        return runs

    def get_report_run(self, run_id):
        session = self.get_session()
        run = session.query(ReportRun).filter_by(id=run_id).first()
        session.close()
        return run

    def get_criterion_results(self, run_id):
        """Criterion rows of one run, ordered by criterion number."""
        session = self.get_session()
        results = (session.query(CriterionResult)
                   .filter_by(run_id=run_id)
                   .order_by(CriterionResult.criterion)
                   .all())
        session.close()
        return results

    def delete_report_run(self, run_id):
        """Delete a run and its criterion rows. Returns True on success."""
        session = self.get_session()
        try:
            run = session.query(ReportRun).filter_by(id=run_id).first()
            if run is None:
                return False
            session.delete(run)
            session.commit()
            return True
        except Exception as e:
            session.rollback()
            logger.error(f"Error deleting report run {run_id}: {e}")
            return False
        finally:
            session.close()
