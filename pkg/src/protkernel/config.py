"""Resource limits.

Every exhaustive search in the package consults these caps. The step budget
can be scaled from the environment with ``PROTKERNEL_BUDGET`` (a positive
integer number of elementary search steps).
"""

import os

from .errors import ConfigError

BUDGET_ENV = "PROTKERNEL_BUDGET"

TREEWIDTH_CAP = 20
TABLE_CAP = 14
MINOR_PATTERN_CAP = 6
MINOR_HOST_CAP = 24
ORACLE_CAP = 24
CANON_CAP = 16
MAX_RADIUS = 3
MAX_FAMILY_VERTICES = 5
DEFAULT_BUDGET = 50_000_000
# (h+1)^n ceiling for partial-model enumeration
TRACE_CAP = 30_000_000


def step_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None or raw == "":
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{BUDGET_ENV} must be a positive integer, got {raw!r}") from None
    if value <= 0:
        raise ConfigError(f"{BUDGET_ENV} must be a positive integer, got {raw!r}")
    return value
