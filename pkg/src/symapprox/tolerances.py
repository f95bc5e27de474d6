"""Numerical tolerances.

Relative tolerances are scaled by ``max(1, s_max)`` (rank, grouping) or
``||F||_2 + 1`` (commutation).  Defaults can be overridden for
experimentation through the ``FRAME_TOL_OVERRIDE`` environment variable, a
JSON object mapping tolerance names to numbers, e.g.
``FRAME_TOL_OVERRIDE='{"tol_unitary": 1e-6}'``.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from functools import lru_cache

ENV_VAR = "FRAME_TOL_OVERRIDE"


@dataclasses.dataclass(frozen=True)
class Tolerances:
    tol_rank: float = 1e-10      # relative to max(1, s_max)
    tol_group: float = 1e-8      # relative to max(1, s_max)
    tol_unitary: float = 1e-8
    tol_recon: float = 1e-8
    tol_commute: float = 1e-8    # relative to ||F||_2 + 1
    tol_half: float = 1e-9       # snapping window around 1/2
    tol_tie: float = 1e-12       # relative to max(1, d^2)

    def rank_tol(self, s_max: float) -> float:
        return self.tol_rank * max(1.0, s_max)

    def group_tol(self, s_max: float) -> float:
        return self.tol_group * max(1.0, s_max)

    def commute_tol(self, f_norm: float) -> float:
        return self.tol_commute * (f_norm + 1.0)


NAMES = tuple(f.name for f in dataclasses.fields(Tolerances))


def parse_override(text: str) -> dict:
    """Parse an override map, raising ``ValueError`` on bad input."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{ENV_VAR} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ValueError(f"{ENV_VAR} must be a JSON object")
    out = {}
    for key, value in data.items():
        if key not in NAMES:
            raise ValueError(f"unknown tolerance {key!r}; expected one of {NAMES}")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"tolerance {key!r} must be a number")
        if not (math.isfinite(value) and value > 0):
            raise ValueError(f"tolerance {key!r} must be positive and finite")
        out[key] = float(value)
    return out


@lru_cache(maxsize=8)
def _from_text(text: str) -> Tolerances:
    return Tolerances(**parse_override(text)) if text else Tolerances()


def current() -> Tolerances:
    """Tolerances in effect: defaults merged with the environment override."""
    return _from_text(os.environ.get(ENV_VAR, "").strip())
