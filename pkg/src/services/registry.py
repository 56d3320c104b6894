import logging
from typing import Any, Dict, List, Optional

from src.models.run import ExperimentRun, db

logger = logging.getLogger(__name__)


def record_run(summary: Dict[str, Any], run_dir: str) -> ExperimentRun:
    """Store a finished scenario run; needs an application context."""
    run = ExperimentRun(
        digest=summary['digest'],
        scenario=summary['scenario'],
        passed=bool(summary['pass']),
        run_dir=run_dir,
        summary=summary,
    )
    db.session.add(run)
    db.session.commit()
    logger.info(f"Recorded run {run.id} ({run.scenario}, pass={run.passed})")
    return run


def list_runs(scenario: Optional[str] = None, passed: Optional[bool] = None) -> List[ExperimentRun]:
    query = ExperimentRun.query
    if scenario:
        query = query.filter(ExperimentRun.scenario == scenario)
    if passed is not None:
        query = query.filter(ExperimentRun.passed == passed)
    return query.order_by(ExperimentRun.created_at.desc(), ExperimentRun.id.desc()).all()


def get_run(run_id: int) -> Optional[ExperimentRun]:
    return db.session.get(ExperimentRun, run_id)
