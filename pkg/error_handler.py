"""
Error Handler: exception hierarchy, unified exception handling and logging.
"""

import json
import logging
import os
import traceback
import uuid
from collections import Counter
from dataclasses import asdict, dataclass, field
from datetime import datetime
from enum import Enum
from typing import Dict, List, Optional

from heis_defaults import normalize_log_dir


# --- Exceptions ---


class HeisError(Exception):
    """Base class of every error raised by heiscat."""


class NotAUnit(HeisError):
    """A scalar that is not ±z^a t^b was asked for its inverse."""


class ZeroSubstitution(HeisError):
    """A variable was specialised to zero."""


class WindowMismatch(HeisError):
    """Two truncated series cannot be multiplied."""


class TypeMismatch(HeisError):
    """Boundary words do not agree."""

    def __init__(self, message: str, expected=None, found=None):
        super().__init__(message)
        self.expected = expected
        self.found = found


class DiagramSyntaxError(HeisError, SyntaxError):
    """Malformed diagram, scalar or Hecke element text."""

    def __init__(self, message: str, position: int = -1):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class NonTermination(HeisError):
    """The rewrite budget was exhausted."""

    def __init__(self, message: str, budget: int = 0):
        super().__init__(message)
        self.budget = budget


class ParameterMismatch(HeisError):
    """Parameters violate a documented constraint."""


class NotAScalar(HeisError):
    """A morphism with nonempty boundary was evaluated as a scalar."""


class LevelUnderflow(HeisError):
    """Restriction below level 0."""


class NoHighestWeightVector(HeisError):
    """No highest-weight vector of the requested weight exists."""


class FormulaMismatch(HeisError):
    """Two formulas that must agree do not."""


class UnknownSuite(HeisError):
    """The requested suite name is not registered."""


# --- Logging ---


class ErrorSeverity(Enum):
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"
    CRITICAL = "critical"


# bad input from the command line or a config file
WARNING_TYPES = (
    TypeMismatch,
    DiagramSyntaxError,
    ParameterMismatch,
    UnknownSuite,
    KeyError,
    ValueError,
    TypeError,
)
# the engine disagrees with itself
CRITICAL_TYPES = (NonTermination, FormulaMismatch)

# attributes some HeisError subclasses carry
_DETAIL_ATTRS = ("expected", "found", "position", "budget")


@dataclass
class ErrorRecord:
    """One handled error, as written to errors.jsonl."""

    error_id: str
    context: str
    severity: str
    error_type: str
    message: str
    details: Dict[str, str] = field(default_factory=dict)
    traceback: str = ""
    timestamp: str = field(default_factory=lambda: datetime.now().isoformat())

    @classmethod
    def from_exception(cls, error_id: str, error: Exception, context: str,
                       severity: "ErrorSeverity") -> "ErrorRecord":
        details = {
            name: str(getattr(error, name))
            for name in _DETAIL_ATTRS
            if getattr(error, name, None) is not None
        }
        return cls(
            error_id=error_id,
            context=context,
            severity=severity.value,
            error_type=type(error).__name__,
            message=str(error),
            details=details,
            traceback=traceback.format_exc(),
        )

    def to_dict(self) -> Dict:
        return asdict(self)


class ErrorHandler:
    """
    Records every error the command line or a suite runner hands over: an
    err_xxxxxxxx id, a log line, a JSONL entry and running counts.
    """

    def __init__(self, log_dir: Optional[str] = None):
        self.log_dir = log_dir or normalize_log_dir()
        self.records: Dict[str, ErrorRecord] = {}
        self.by_severity: Counter = Counter()
        self.by_type: Counter = Counter()
        self.logger = logging.getLogger("heiscat.errors")
        self._configured = False

    def _setup_logging(self):
        if self._configured:
            return
        os.makedirs(self.log_dir, exist_ok=True)
        logging.basicConfig(
            level=logging.INFO,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
            handlers=[
                logging.FileHandler(os.path.join(self.log_dir, "heiscat.log")),
                logging.StreamHandler(),
            ],
        )
        self._configured = True

    def handle_error(
        self,
        error: Exception,
        context: str = "unknown",
        severity: ErrorSeverity = ErrorSeverity.ERROR,
    ) -> str:
        """
        Args:
            error: the exception being handled
            context: where it happened, e.g. "normalize" or "suite braid: braid.k0"
            severity: log level to record it at

        Returns:
            the error id printed next to the CLI message
        """
        self._setup_logging()
        error_id = f"err_{uuid.uuid4().hex[:8]}"
        record = ErrorRecord.from_exception(error_id, error, context, severity)
        self.records[error_id] = record
        self.by_severity[record.severity] += 1
        self.by_type[record.error_type] += 1
        self.logger.log(
            _LEVELS[severity],
            "[%s] %s: %s: %s", error_id, context, record.error_type, record.message,
        )
        self._append(record)
        return error_id

    def handle_exception(self, exception: Exception, context: str = "unknown") -> str:
        return self.handle_error(exception, context, self.classify(exception))

    @staticmethod
    def classify(exception: Exception) -> ErrorSeverity:
        if isinstance(exception, CRITICAL_TYPES):
            return ErrorSeverity.CRITICAL
        if isinstance(exception, WARNING_TYPES):
            return ErrorSeverity.WARNING
        return ErrorSeverity.ERROR

    def _append(self, record: ErrorRecord):
        path = os.path.join(self.log_dir, "errors.jsonl")
        try:
            with open(path, "a", encoding="utf-8") as f:
                f.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")
        except OSError as e:
            self.logger.error("cannot write %s: %s", path, e)

    # --- queries ---

    def get_error_log(self, error_id: str) -> Optional[Dict]:
        record = self.records.get(error_id)
        return record.to_dict() if record else None

    def get_errors_by_context(self, context: str) -> List[Dict]:
        """Records whose context contains the given text (e.g. "suite braid")."""
        return [r.to_dict() for r in self.records.values() if context in r.context]

    def get_error_stats(self) -> Dict:
        return {
            "total_errors": len(self.records),
            "by_severity": dict(self.by_severity),
            "by_type": dict(self.by_type),
            "by_context": dict(Counter(r.context for r in self.records.values())),
        }


_LEVELS = {
    ErrorSeverity.INFO: logging.INFO,
    ErrorSeverity.WARNING: logging.WARNING,
    ErrorSeverity.ERROR: logging.ERROR,
    ErrorSeverity.CRITICAL: logging.CRITICAL,
}

error_handler = ErrorHandler()
