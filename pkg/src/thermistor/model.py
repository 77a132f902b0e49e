"""Nonlocal thermistor problem data and its right-hand side.

The model couples a pointwise source ``f(t, u)`` to the square of its own
integral over the full time window:

    u^(alpha)(t) = lambda * f(t, u(t)) / (integral_a^T f(x, u(x)) dx)**2

Everything here assumes the positivity hypothesis: ``f`` must stay
strictly positive on the trajectory, otherwise the denominator loses its
lower bound and the quotient is meaningless.  Violations are reported as
"H1 violated" errors naming the offending node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .conformable import Alpha, Grid, GridFunction

__all__ = [
    "SOURCE_REGISTRY",
    "SourceBounds",
    "SourcePositivityError",
    "ThermistorProblem",
    "bounds_estimate",
    "evaluate_g",
    "nonlocal_denominator",
    "resolve_source",
    "sample_source",
    "source_integral",
]

SourceFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


class SourcePositivityError(ValueError):
    """The source ``f`` was sampled at or below zero somewhere."""

    def __init__(self, message: str, node: int | None = None, iteration: int | None = None):
        super().__init__(message)
        self.node = node
        self.iteration = iteration


@dataclass(frozen=True)
class ThermistorProblem:
    """One instance of the nonlocal problem on [a, T].

    Attributes:
        a: left endpoint, strictly positive.
        T: right endpoint, strictly greater than ``a``.
        lam: coupling constant, strictly positive.
        alpha: conformable derivative order in (0, 1].
        u_a: initial value at ``t = a``.
        f: source term; called with (t, u) arrays of equal shape and
            expected to broadcast (expression trees and the registry
            entries below both qualify).
    """

    a: float
    T: float
    lam: float
    alpha: Alpha
    u_a: float
    f: SourceFn

    def __post_init__(self) -> None:
        if not isinstance(self.alpha, Alpha):
            object.__setattr__(self, "alpha", Alpha(self.alpha))
        if not (math.isfinite(self.a) and self.a > 0.0):
            raise ValueError(f"problem needs a > 0, got a={self.a!r}")
        if not (math.isfinite(self.T) and self.T > self.a):
            raise ValueError(f"problem needs T > a, got T={self.T!r}")
        if not (math.isfinite(self.lam) and self.lam > 0.0):
            raise ValueError(f"problem needs lambda > 0, got {self.lam!r}")
        if not math.isfinite(self.u_a):
            raise ValueError(f"initial value must be finite, got {self.u_a!r}")

    def grid(self, n: int) -> Grid:
        return Grid(self.a, self.T, n)


def sample_source(problem: ThermistorProblem, u: GridFunction) -> np.ndarray:
    """Evaluate ``f`` along the trajectory and enforce strict positivity."""
    t = u.grid.nodes
    fv = np.asarray(problem.f(t, u.values), dtype=float) * np.ones(u.grid.n)
    bad = np.flatnonzero(~(fv > 0.0) | ~np.isfinite(fv))
    if bad.size:
        j = int(bad[0])
        raise SourcePositivityError(
            f"H1 violated: f(t, u) must be strictly positive, got "
            f"f({float(t[j])!r}, {float(u.values[j])!r}) = {float(fv[j])!r} at node {j}",
            node=j,
        )
    return fv


def _plain_trapezoid(values: np.ndarray, h: float) -> float:
    return float(h * (values.sum() - 0.5 * (values[0] + values[-1])))


def source_integral(problem: ThermistorProblem, u: GridFunction) -> float:
    """Trapezoidal integral of ``f(x, u(x))`` over [a, T] (unsquared)."""
    return _plain_trapezoid(sample_source(problem, u), u.grid.h)


def nonlocal_denominator(problem: ThermistorProblem, u: GridFunction) -> float:
    """Square of the trapezoidal integral of ``f(x, u(x))`` over [a, T].

    The quadrature carries no conformable weight; it is the plain integral
    from the model.  Raises SourcePositivityError ("H1 violated") if any
    sampled value of ``f`` is nonpositive or non-finite.
    """
    integral = source_integral(problem, u)
    return integral * integral


def evaluate_g(problem: ThermistorProblem, u: GridFunction) -> GridFunction:
    """Right-hand side ``lambda * f(t, u) / denominator`` along ``u``.

    Scaling ``f`` by a constant ``c`` scales the output by ``1/c``: the
    numerator gains ``c`` and the squared integral gains ``c**2``.
    """
    fv = sample_source(problem, u)
    integral = _plain_trapezoid(fv, u.grid.h)
    return GridFunction(u.grid, problem.lam * fv / (integral * integral))


class SourceBounds(NamedTuple):
    """Lattice bounds on ``f`` and the induced sup bound on ``g``."""

    f_min: float  # A: smallest sampled f
    f_max: float  # B: largest sampled f
    g_sup: float  # G = lambda * B / (A**2 * (T - a)**2)


def bounds_estimate(problem: ThermistorProblem, radius: float, samples: int = 64) -> SourceBounds:
    """Bounds of ``f`` on the lattice [a, T] x [-radius, radius].

    Returns (A, B, G) with ``G = lambda * B / (A**2 * (T - a)**2)``, the
    crude sup bound on the right-hand side for trajectories inside the
    radius.  Diagnostics only; nothing in the solver consumes it.
    """
    if not (math.isfinite(radius) and radius > 0.0):
        raise ValueError(f"bounds_estimate needs radius > 0, got {radius!r}")
    if samples < 2:
        raise ValueError(f"bounds_estimate needs at least 2 samples per axis, got {samples!r}")
    ts = np.linspace(problem.a, problem.T, samples)
    us = np.linspace(-radius, radius, samples)
    tt, uu = np.meshgrid(ts, us)
    fv = np.asarray(problem.f(tt, uu), dtype=float) * np.ones_like(tt)
    flat = fv.ravel()
    bad = np.flatnonzero(~(flat > 0.0) | ~np.isfinite(flat))
    if bad.size:
        j = int(bad[0])
        raise SourcePositivityError(
            f"H1 violated on the sampling lattice: f = {float(flat[j])!r} at "
            f"(t={float(tt.ravel()[j])!r}, u={float(uu.ravel()[j])!r})",
            node=j,
        )
    f_min = float(flat.min())
    f_max = float(flat.max())
    g_sup = problem.lam * f_max / (f_min * f_min * (problem.T - problem.a) ** 2)
    return SourceBounds(f_min, f_max, g_sup)


def _ones_source(t: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.ones_like(np.asarray(t, dtype=float) + np.asarray(u, dtype=float))


SOURCE_REGISTRY: dict[str, SourceFn] = {
    # u-independent sources keep the problem explicitly integrable
    "one": _ones_source,
    "ramp": lambda t, u: np.asarray(t, dtype=float) + 0.0 * np.asarray(u, dtype=float),
    # bounded u-dependent source, positive for every real u
    "sin_offset": lambda t, u: 2.0 + np.sin(np.asarray(u, dtype=float)) + 0.0 * np.asarray(t, dtype=float),
}


def resolve_source(text: str) -> SourceFn:
    """Look up a registry source by name, else parse ``text`` as an expression."""
    key = text.strip()
    if key in SOURCE_REGISTRY:
        return SOURCE_REGISTRY[key]
    from .expressions import parse_expr

    return parse_expr(text)
