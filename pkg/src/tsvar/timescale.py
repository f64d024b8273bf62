"""Finite time scales and their jump geometry.

A time scale here is a strictly increasing finite sequence of real points
t_0 < t_1 < ... < t_{n-1}.  Every point is isolated, so the forward and
backward jump operators, the graininess functions, and the truncated index
sets below describe the grid completely.  All difference calculus built on
top of this module is exact on such grids, which is what lets the identity
checks downstream run at rounding tolerance instead of discretization
tolerance.

Indices, not point values, are the canonical handles everywhere in this
package.  Operators take and return integer indices; the float coordinates
live only in ``TimeScale.points``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

__all__ = [
    "DUPLICATE_TOLERANCE",
    "KappaKind",
    "KappaSet",
    "TimeScale",
    "TimeScaleError",
    "kappa_set",
    "make_timescale",
    "mu",
    "nu",
    "rho",
    "sigma",
    "uniform_scale",
]

# Two points closer than this (absolute) are rejected as duplicates.
DUPLICATE_TOLERANCE = 1e-12


class TimeScaleError(ValueError):
    """The given point sequence does not form a valid time scale."""


class KappaKind(Enum):
    """The six index-set truncations used by the difference calculus."""

    FULL = "full"
    UPPER = "upper-kappa"
    LOWER = "lower-kappa"
    UPPER_SQUARED = "upper-kappa-squared"
    LOWER_SQUARED = "lower-kappa-squared"
    BOTH = "both-kappa"


@dataclass(frozen=True)
class KappaSet:
    """A contiguous range of point indices, tagged by which truncation it is.

    ``start`` is inclusive, ``stop`` exclusive, as with Python ranges.
    """

    kind: KappaKind
    start: int
    stop: int

    @property
    def indices(self) -> range:
        return range(self.start, self.stop)

    def __len__(self) -> int:
        return self.stop - self.start

    def __contains__(self, index: object) -> bool:
        return isinstance(index, int) and self.start <= index < self.stop


@dataclass(frozen=True, eq=False)
class TimeScale:
    """An immutable, validated, strictly increasing point sequence."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim != 1:
            raise TimeScaleError("points must form a one-dimensional sequence")
        if pts.size < 3:
            raise TimeScaleError(f"need at least 3 points, got {pts.size}")
        bad = np.flatnonzero(~np.isfinite(pts))
        if bad.size:
            raise TimeScaleError(f"non-finite point at index {int(bad[0])}")
        diffs = np.diff(pts)
        bad = np.flatnonzero(diffs <= DUPLICATE_TOLERANCE)
        if bad.size:
            i = int(bad[0])
            if abs(float(diffs[i])) <= DUPLICATE_TOLERANCE:
                raise TimeScaleError(f"duplicate point at index {i + 1}")
            raise TimeScaleError(f"points not increasing at index {i + 1}")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.size)

    @property
    def a(self) -> float:
        """Left endpoint t_0."""
        return float(self.points[0])

    @property
    def b(self) -> float:
        """Right endpoint t_{n-1}."""
        return float(self.points[-1])

    def to_json(self) -> str:
        """Serialize as a JSON array; floats round-trip bit-exactly."""
        return json.dumps([float(p) for p in self.points])

    @staticmethod
    def from_json(text: str) -> "TimeScale":
        data = json.loads(text)
        if not isinstance(data, list):
            raise TimeScaleError("expected a JSON array of numbers")
        return make_timescale(data)


def make_timescale(points: Sequence[float]) -> TimeScale:
    """Validate and freeze a point sequence.

    Rejects sequences with fewer than 3 points, non-finite entries, and
    non-increasing or duplicate pairs (absolute tolerance 1e-12), naming the
    offending index.  Nothing is silently repaired.
    """
    return TimeScale(np.asarray(points, dtype=float))


def uniform_scale(a: float, b: float, n_points: int) -> TimeScale:
    """Evenly spaced scale from ``a`` to ``b`` with exact endpoints."""
    if not (np.isfinite(a) and np.isfinite(b)):
        raise TimeScaleError("endpoints must be finite")
    if not a < b:
        raise TimeScaleError(f"need a < b, got a={a!r}, b={b!r}")
    if n_points < 3:
        raise TimeScaleError(f"need at least 3 points, got {n_points}")
    return TimeScale(np.linspace(a, b, n_points))


def _check_index(ts: TimeScale, i: int) -> None:
    n = len(ts)
    if not 0 <= i < n:
        raise IndexError(f"point index {i} out of range for scale of {n} points")


def sigma(ts: TimeScale, i: int) -> int:
    """Forward jump: index of the next point, clamped at the right endpoint."""
    _check_index(ts, i)
    return min(i + 1, len(ts) - 1)


def rho(ts: TimeScale, i: int) -> int:
    """Backward jump: index of the previous point, clamped at the left endpoint."""
    _check_index(ts, i)
    return max(i - 1, 0)


def mu(ts: TimeScale, i: int) -> float:
    """Forward graininess t_{i+1} - t_i; undefined at the last point."""
    _check_index(ts, i)
    if i == len(ts) - 1:
        raise ValueError("forward graininess undefined at the last point")
    return float(ts.points[i + 1] - ts.points[i])


def nu(ts: TimeScale, i: int) -> float:
    """Backward graininess t_i - t_{i-1}; undefined at the first point."""
    _check_index(ts, i)
    if i == 0:
        raise ValueError("backward graininess undefined at the first point")
    return float(ts.points[i] - ts.points[i - 1])


def kappa_set(ts: TimeScale, kind: KappaKind | str) -> KappaSet:
    """The index range for a truncation of the scale.

    The squared truncations drop two points from one end and require a scale
    of at least 4 points; the plain ones are always nonempty on a valid
    scale.
    """
    if isinstance(kind, str):
        try:
            kind = KappaKind(kind)
        except ValueError:
            names = ", ".join(k.value for k in KappaKind)
            raise ValueError(f"unknown kappa set kind {kind!r}; expected one of: {names}") from None
    n = len(ts)
    if kind in (KappaKind.UPPER_SQUARED, KappaKind.LOWER_SQUARED) and n < 4:
        raise TimeScaleError(f"scale too short for {kind.value}: need at least 4 points, got {n}")
    ranges = {
        KappaKind.FULL: (0, n),
        KappaKind.UPPER: (0, n - 1),
        KappaKind.LOWER: (1, n),
        KappaKind.UPPER_SQUARED: (0, n - 2),
        KappaKind.LOWER_SQUARED: (2, n),
        KappaKind.BOTH: (1, n - 1),
    }
    start, stop = ranges[kind]
    return KappaSet(kind, start, stop)
