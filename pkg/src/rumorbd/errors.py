"""Exception hierarchy for the rumor birth-death toolkit.

Three semantic classes, mapped to CLI exit codes by ``rumorbd.cli``:

* :class:`DomainError`   -- a request outside the model's domain (bad parameters,
  preconditions violated).  CLI exit code 2.
* :class:`NumericsError` -- a computation that cannot be completed to tolerance
  (truncation leak too large, root bracketing failed, overflow without a
  log-scaled escape hatch).  CLI exit code 3.
* :class:`DataError`     -- malformed user-supplied data (CSV schema, grids,
  observation sequences).  CLI exit code 4.
"""

from __future__ import annotations


class RumorBDError(Exception):
    """Base class for all toolkit errors."""


class DomainError(RumorBDError, ValueError):
    """Parameters or arguments outside the model's domain."""


class NumericsError(RumorBDError, ArithmeticError):
    """A numerical procedure failed to reach its guaranteed tolerance."""


class DataError(RumorBDError, ValueError):
    """User-supplied data is malformed or inconsistent."""
