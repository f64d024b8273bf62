"""Product functionals of delta and nabla type, and their stationarity tests.

The objective is J(y) = Jd(y) * Jn(y) where

    Jd(y) = sum over upper-kappa of mu(i)  * Ld(t_i, y(sigma(i)), delta-derivative(i))
    Jn(y) = sum over lower-kappa of nu(i)  * Ln(t_i, y(rho(i)),   nabla-derivative(i))

with fixed boundary values y(a) = alpha, y(b) = beta.  Both factors are
exact weighted sums, so the first variation of J with respect to each
interior value is available in closed form: substituting the hat function
at interior index k (1 at k, 0 elsewhere) for the variation and expanding
the two sums leaves at most two surviving terms per sum.
``first_variation_gradient`` returns that expansion; it is the exact
partial derivative of J in each interior value.

Stationarity is certified through integral-form Euler-Lagrange residuals.
With the running integrals

    A(t) = sum of mu * d2Ld up to t,      B(t) = sum of nu * d2Ln up to t,

set f = d3Ld - A on upper-kappa and g = d3Ln - B on lower-kappa.  The two
equivalent conditions state that

    Jn * f(rho(t)) + Jd * g(t)        is one constant over lower-kappa, and
    Jn * f(t)      + Jd * g(sigma(t)) is one constant over upper-kappa.

``el_residual_1`` and ``el_residual_2`` report those traces with their mean
and the worst deviation from it.  When one factor is the normalized
constant density, the product objective degenerates to the other factor
alone and the trace collapses (exactly) to the single-calculus condition
reported by ``el_residual_cor1`` / ``el_residual_cor2``.  Differencing
those single-calculus traces once recovers the pointwise Euler-Lagrange
equations, which ``classic_el_residuals`` evaluates directly on the
doubly-truncated index sets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .calculus import GridFunction, PartialGridFunction
from .lagrangian import Lagrangian
from .timescale import KappaKind, KappaSet, TimeScale, kappa_set

__all__ = [
    "ELReport",
    "VariationalProblem",
    "classic_el_residuals",
    "el_residual_1",
    "el_residual_2",
    "el_residual_cor1",
    "el_residual_cor2",
    "first_variation_gradient",
    "j_delta",
    "j_nabla",
    "j_product",
]


@dataclass(frozen=True)
class VariationalProblem:
    """A scale, the two densities, and the fixed boundary values."""

    scale: TimeScale
    l_delta: Lagrangian
    l_nabla: Lagrangian
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.alpha) and np.isfinite(self.beta)):
            raise ValueError("boundary values must be finite")


@dataclass(frozen=True, eq=False)
class ELReport:
    """A residual trace, the constant it should equal, and the worst deviation.

    ``which`` names the condition: "EL1" and "EL2" are the two equivalent
    integral forms for the product objective; "corollary-EL1" and
    "corollary-EL2" are the single-calculus forms the product conditions
    collapse to when the other factor is constant.  ``passes`` applies the
    relative criterion deviation <= tol * (1 + |c|).
    """

    which: str
    scale: TimeScale
    domain: KappaSet
    residual_trace: np.ndarray
    constant_c: float
    deviation: float
    j_delta: float
    j_nabla: float

    @property
    def times(self) -> np.ndarray:
        return self.scale.points[self.domain.start : self.domain.stop]

    def passes(self, tol: float = 1e-6) -> bool:
        return self.deviation <= tol * (1.0 + abs(self.constant_c))

    def to_dict(self) -> dict:
        return {
            "which": self.which,
            "domain": {
                "kind": self.domain.kind.value,
                "start": self.domain.start,
                "stop": self.domain.stop,
            },
            "t": [float(x) for x in self.times],
            "residual_trace": [float(x) for x in self.residual_trace],
            "constant_c": float(self.constant_c),
            "deviation": float(self.deviation),
            "j_delta": float(self.j_delta),
            "j_nabla": float(self.j_nabla),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        lines = ["t,trace,c,trace_minus_c"]
        c = self.constant_c
        for t, r in zip(self.times, self.residual_trace):
            lines.append(
                f"{t:.17g},{r:.17g},{c:.17g},{r - c:.17g}"
            )
        return "\n".join(lines) + "\n"


def _check_alignment(p: VariationalProblem, y: GridFunction) -> None:
    if y.scale is not p.scale and not np.array_equal(y.scale.points, p.scale.points):
        raise ValueError("grid function does not live on the problem's scale")


def _check_boundary(p: VariationalProblem, y: GridFunction) -> None:
    _check_alignment(p, y)
    if float(y.values[0]) != p.alpha or float(y.values[-1]) != p.beta:
        raise ValueError(
            f"boundary mismatch: expected y(a)={p.alpha!r}, y(b)={p.beta!r}, "
            f"got {float(y.values[0])!r}, {float(y.values[-1])!r}"
        )


def _functionals(p: VariationalProblem, vals: np.ndarray) -> tuple[float, float]:
    """Both factor values from a raw value array (no allocation ceremony)."""
    pts = p.scale.points
    gaps = np.diff(pts)
    quot = (vals[1:] - vals[:-1]) / gaps
    ld = p.l_delta.eval
    ln = p.l_nabla.eval
    # Delta slot: density at (t_i, y(i+1), quot_i) for i over upper-kappa.
    jd = float(
        np.dot(gaps, [ld(float(t), float(u), float(v)) for t, u, v in zip(pts[:-1], vals[1:], quot)])
    )
    # Nabla slot: density at (t_i, y(i-1), quot_{i-1}) for i over lower-kappa.
    jn = float(
        np.dot(gaps, [ln(float(t), float(u), float(v)) for t, u, v in zip(pts[1:], vals[:-1], quot)])
    )
    return jd, jn


class _Partials:
    """Per-point first partials of both densities along a fixed y."""

    __slots__ = ("gaps", "d2d", "d3d", "d2n", "d3n", "jd", "jn")

    def __init__(self, p: VariationalProblem, vals: np.ndarray):
        pts = p.scale.points
        gaps = np.diff(pts)
        quot = (vals[1:] - vals[:-1]) / gaps
        delta_args = [
            (float(t), float(u), float(v)) for t, u, v in zip(pts[:-1], vals[1:], quot)
        ]
        nabla_args = [
            (float(t), float(u), float(v)) for t, u, v in zip(pts[1:], vals[:-1], quot)
        ]
        ld, ln = p.l_delta, p.l_nabla
        self.gaps = gaps
        self.d2d = np.array([ld.d2(*a) for a in delta_args])
        self.d3d = np.array([ld.d3(*a) for a in delta_args])
        self.d2n = np.array([ln.d2(*a) for a in nabla_args])
        self.d3n = np.array([ln.d3(*a) for a in nabla_args])
        self.jd = float(np.dot(gaps, [ld.eval(*a) for a in delta_args]))
        self.jn = float(np.dot(gaps, [ln.eval(*a) for a in nabla_args]))

    # Entry i of d2d/d3d belongs to point index i (upper-kappa); entry j of
    # d2n/d3n belongs to point index j+1 (lower-kappa).


def j_delta(p: VariationalProblem, y: GridFunction) -> float:
    """The delta-type factor of the objective."""
    _check_alignment(p, y)
    return _functionals(p, y.values)[0]


def j_nabla(p: VariationalProblem, y: GridFunction) -> float:
    """The nabla-type factor of the objective."""
    _check_alignment(p, y)
    return _functionals(p, y.values)[1]


def j_product(p: VariationalProblem, y: GridFunction) -> float:
    """The product objective J = Jd * Jn."""
    _check_alignment(p, y)
    jd, jn = _functionals(p, y.values)
    return jd * jn


def _gradient_raw(p: VariationalProblem, vals: np.ndarray) -> np.ndarray:
    parts = _Partials(p, vals)
    gaps = parts.gaps
    # Hat variation at interior k survives in the delta sum only through the
    # terms at i = k-1 (both slots) and i = k (derivative slot):
    grad_d = gaps[:-1] * parts.d2d[:-1] + parts.d3d[:-1] - parts.d3d[1:]
    # and in the nabla sum through i = k+1 (both slots) and i = k:
    grad_n = gaps[1:] * parts.d2n[1:] - parts.d3n[1:] + parts.d3n[:-1]
    return parts.jn * grad_d + parts.jd * grad_n


def first_variation_gradient(p: VariationalProblem, y: GridFunction) -> np.ndarray:
    """Exact partials of the product objective in the interior values.

    Component k-1 of the returned vector (k = 1 .. n-2) is the derivative of
    J with respect to y(t_k); it equals the first variation of J along the
    hat function at k and obeys the product rule
    Jn * grad(Jd) + Jd * grad(Jn) exactly.
    """
    _check_boundary(p, y)
    return _gradient_raw(p, y.values)


def _el_ingredients(p: VariationalProblem, vals: np.ndarray):
    parts = _Partials(p, vals)
    gaps = parts.gaps
    # Running integrals of the state partials; entry k covers points < k
    # (delta side) respectively points <= k (nabla side).
    run_a = np.concatenate(([0.0], np.cumsum(gaps * parts.d2d)))
    run_b = np.concatenate(([0.0], np.cumsum(gaps * parts.d2n)))
    f = parts.d3d - run_a[:-1]  # entry k: point index k over upper-kappa
    g = parts.d3n - run_b[1:]  # entry j: point index j+1 over lower-kappa
    return parts, f, g


def _report(p, which, domain, trace, jd, jn) -> ELReport:
    c = float(np.mean(trace))
    deviation = float(np.max(np.abs(trace - c)))
    return ELReport(
        which=which,
        scale=p.scale,
        domain=domain,
        residual_trace=trace,
        constant_c=c,
        deviation=deviation,
        j_delta=jd,
        j_nabla=jn,
    )


def el_residual_1(p: VariationalProblem, y: GridFunction) -> ELReport:
    """Backward-attached integral Euler-Lagrange trace over lower-kappa.

    At point index i in lower-kappa the trace reads
    Jn * f(rho(i)) + Jd * g(i); at a stationary y it is a single constant.
    """
    _check_boundary(p, y)
    parts, f, g = _el_ingredients(p, y.values)
    trace = parts.jn * f + parts.jd * g
    return _report(p, "EL1", kappa_set(p.scale, KappaKind.LOWER), trace, parts.jd, parts.jn)


def el_residual_2(p: VariationalProblem, y: GridFunction) -> ELReport:
    """Forward-attached integral Euler-Lagrange trace over upper-kappa.

    At point index i in upper-kappa the trace reads
    Jn * f(i) + Jd * g(sigma(i)); it carries the same constant as the
    backward form.
    """
    _check_boundary(p, y)
    parts, f, g = _el_ingredients(p, y.values)
    trace = parts.jn * f + parts.jd * g
    return _report(p, "EL2", kappa_set(p.scale, KappaKind.UPPER), trace, parts.jd, parts.jn)


def el_residual_cor1(p: VariationalProblem, y: GridFunction) -> ELReport:
    """Single-calculus nabla condition: g alone, over lower-kappa."""
    _check_boundary(p, y)
    parts, _, g = _el_ingredients(p, y.values)
    return _report(
        p, "corollary-EL1", kappa_set(p.scale, KappaKind.LOWER), g, parts.jd, parts.jn
    )


def el_residual_cor2(p: VariationalProblem, y: GridFunction) -> ELReport:
    """Single-calculus delta condition: f alone, over upper-kappa."""
    _check_boundary(p, y)
    parts, f, _ = _el_ingredients(p, y.values)
    return _report(
        p, "corollary-EL2", kappa_set(p.scale, KappaKind.UPPER), f, parts.jd, parts.jn
    )


def classic_el_residuals(
    p: VariationalProblem, y: GridFunction
) -> tuple[PartialGridFunction, PartialGridFunction]:
    """Pointwise Euler-Lagrange residuals of each factor separately.

    Delta side: the delta derivative of d3Ld along y minus d2Ld, on the
    doubly upper-truncated set.  Nabla side: the nabla derivative of d3Ln
    minus d2Ln, on the doubly lower-truncated set.  Needs at least 4 points.
    """
    _check_boundary(p, y)
    if len(p.scale) < 4:
        raise ValueError(f"need at least 4 points for the pointwise residuals, got {len(p.scale)}")
    parts = _Partials(p, y.values)
    gaps = parts.gaps
    delta_res = (parts.d3d[1:] - parts.d3d[:-1]) / gaps[:-1] - parts.d2d[:-1]
    nabla_res = (parts.d3n[1:] - parts.d3n[:-1]) / gaps[1:] - parts.d2n[1:]
    return (
        PartialGridFunction(p.scale, kappa_set(p.scale, KappaKind.UPPER_SQUARED), delta_res),
        PartialGridFunction(p.scale, kappa_set(p.scale, KappaKind.LOWER_SQUARED), nabla_res),
    )
