"""
Activity Logger: records suite runs, checks, normalizations and oracle runs.
"""

import json
import logging
import os
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional

from heis_defaults import normalize_log_dir

logger = logging.getLogger("heiscat.activity")

# residuals and expressions are clipped to this many characters
CLIP = 200


class ActivityType(Enum):
    SUITE_STARTED = "suite_started"
    CHECK_PASSED = "check_passed"
    CHECK_FAILED = "check_failed"
    SUITE_FINISHED = "suite_finished"
    NORMALIZED = "normalized"
    ORACLE_RUN = "oracle_run"
    CONFIG_LOADED = "config_loaded"
    ERROR_OCCURRED = "error_occurred"


@dataclass
class Activity:
    kind: ActivityType
    run_id: str
    suite: Optional[str] = None
    check_id: Optional[str] = None
    details: Dict[str, Any] = field(default_factory=dict)
    timestamp: str = field(default_factory=lambda: datetime.now().isoformat())

    def to_dict(self) -> Dict:
        return {
            "event_type": self.kind.value,
            "timestamp": self.timestamp,
            "run_id": self.run_id,
            "suite": self.suite,
            "check_id": self.check_id,
            "details": self.details,
        }


class ActivityLogger:
    """
    Per-run event history, kept in memory and, with persist on, appended to
    {log_dir}/{run_id}_activity.jsonl.
    """

    def __init__(self, log_dir: Optional[str] = None, persist: bool = False):
        self.log_dir = log_dir or normalize_log_dir()
        self.persist = persist
        self.runs: Dict[str, List[Activity]] = {}

    def record(self, kind: ActivityType, run_id: str, **fields) -> Activity:
        activity = Activity(kind, run_id, **fields)
        self.runs.setdefault(run_id, []).append(activity)
        if self.persist:
            self._append(activity)
        return activity

    # --- suites ---

    def log_suite_started(self, run_id: str, suite: str, params: Dict):
        self.record(ActivityType.SUITE_STARTED, run_id, suite=suite, details={"params": params})

    def log_check(self, run_id: str, suite: str, check_id: str, passed: bool, seconds: float,
                  residual: str = ""):
        details: Dict[str, Any] = {"seconds": round(seconds, 6)}
        if residual:
            details["residual"] = residual[:CLIP]
        kind = ActivityType.CHECK_PASSED if passed else ActivityType.CHECK_FAILED
        self.record(kind, run_id, suite=suite, check_id=check_id, details=details)

    def log_suite_finished(self, run_id: str, suite: str, passed: int, failed: int):
        self.record(ActivityType.SUITE_FINISHED, run_id, suite=suite,
                    details={"passed": passed, "failed": failed})

    # --- single commands ---

    def log_normalized(self, run_id: str, k: int, expr: str, terms: int):
        self.record(ActivityType.NORMALIZED, run_id, details={"k": k, "expr": expr[:CLIP], "terms": terms})

    def log_oracle_run(self, run_id: str, k: int, trials: int, failures: int):
        self.record(ActivityType.ORACLE_RUN, run_id, details={"k": k, "trials": trials, "failures": failures})

    def log_config_loaded(self, run_id: str, source: str):
        self.record(ActivityType.CONFIG_LOADED, run_id, details={"source": source})

    def log_error(self, run_id: str, error_id: str, message: str):
        self.record(ActivityType.ERROR_OCCURRED, run_id, details={"error_id": error_id, "message": message[:CLIP]})

    def _append(self, activity: Activity):
        path = os.path.join(self.log_dir, f"{activity.run_id}_activity.jsonl")
        try:
            os.makedirs(self.log_dir, exist_ok=True)
            with open(path, "a", encoding="utf-8") as f:
                f.write(json.dumps(activity.to_dict(), ensure_ascii=False, default=str) + "\n")
        except OSError as e:
            logger.warning("⚠️ cannot write %s: %s", path, e)

    # --- queries ---

    def get_run_activities(self, run_id: str) -> List[Dict]:
        return [a.to_dict() for a in self.runs.get(run_id, [])]

    def get_failed_checks(self, run_id: str) -> List[Dict]:
        return [a.to_dict() for a in self.runs.get(run_id, []) if a.kind is ActivityType.CHECK_FAILED]

    def get_run_stats(self, run_id: str) -> Dict:
        counts = Counter(a.kind.value for a in self.runs.get(run_id, []))
        return {"run_id": run_id, "total": sum(counts.values()), "by_type": dict(counts)}


activity_logger = ActivityLogger()
