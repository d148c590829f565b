"""Stream decompositions of scalar ODEs.

Covers the quadratic family ``y' = a y + b y^2`` (logistic: ``a = gamma,
b = -gamma``; pure square: ``a = 0, b = alpha``), the time-dependent linear
equation ``q' = (1 - 2t) q``, and the closed-form log series for
``y' = alpha y^2``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .chebstream import DEFAULT_DEGREE, ChebSpace
from .exppoly import ExpPoly, solve_stream_step

__all__ = [
    "QuadOdeSpec",
    "StreamList",
    "decompose_quadratic",
    "decompose_linear_time_coeff",
    "quadratic_residual",
    "log_series_eval",
    "log_series_stream",
    "LogDomainError",
]


class LogDomainError(ValueError):
    """``1 - alpha y0 t <= 0``: the solution has already blown up."""


@dataclass(frozen=True)
class QuadOdeSpec:
    a: float
    b: float
    beta: float
    y0: float

    def __post_init__(self):
        for name in ("a", "b", "beta", "y0"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")

    @classmethod
    def logistic(cls, gamma, c1, beta):
        return cls(a=gamma, b=-gamma, beta=beta, y0=c1)

    @classmethod
    def square(cls, alpha, y0, beta):
        return cls(a=0.0, b=alpha, beta=beta, y0=y0)


class StreamList:
    """Ordered streams ``y^0, y^1, ...`` whose sum approximates the solution."""

    def __init__(self, streams, horizon=None):
        self.streams = list(streams)
        self.horizon = horizon

    def __len__(self):
        return len(self.streams)

    def __getitem__(self, n):
        return self.streams[n]

    def __iter__(self):
        return iter(self.streams)

    @property
    def n_max(self):
        return len(self.streams) - 1

    def _check_t(self, t):
        if self.horizon is not None:
            t = np.asarray(t, dtype=float)
            if np.any(t < 0) or np.any(t > self.horizon * (1 + 1e-12)):
                raise ValueError(f"streams are only valid on [0, {self.horizon}]")

    def total(self, n_max=None):
        """Sum of streams ``0..n_max`` (an ExpPoly or a Chebyshev series)."""
        upto = self.streams if n_max is None else self.streams[: n_max + 1]
        out = upto[0]
        for s in upto[1:]:
            out = out + s
        return out

    def __call__(self, t, n_max=None):
        self._check_t(t)
        upto = self.streams if n_max is None else self.streams[: n_max + 1]
        v = upto[0](t) + sum(s(t) for s in upto[1:])
        # streams n >= 1 vanish at t = 0 by construction; summing their
        # rounded coefficients there would perturb the initial value
        v = np.where(np.asarray(t) == 0, upto[0](t), v)
        return float(v) if np.ndim(v) == 0 else v


def _ddt(p):
    return p.derivative() if isinstance(p, ExpPoly) else p.deriv()


def decompose_quadratic(spec, n_max, horizon=None, degree=DEFAULT_DEGREE):
    """Stream cascade for ``y' = a y + b y^2``.

    ``y^0 = y0 e^{-beta t}`` and for n >= 1

        y^n' = -beta y^n + (beta + a) y^{n-1}
               + b y^{n-1} y^{n-1} + 2 b y^{n-1} sum_{i<=n-2} y^i

    so that summing every stream equation multiplies each stream with every
    other one exactly once.

    Without ``horizon`` the streams are exact :class:`ExpPoly` values; their
    support doubles per level, so this is limited to roughly ten streams.
    Their evaluation also cancels heavily once the power of ``t`` grows and
    ``beta`` is small (see :meth:`ExpPoly.magnitude`); keep the exact path to
    about five streams unless ``beta`` is large.
    With ``horizon`` every stream is a degree-``degree`` Chebyshev series on
    ``[0, horizon]`` (see :mod:`powerstreams.chebstream`).
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    beta = spec.beta
    seed = ExpPoly.term(beta, 0, 1, spec.y0)
    if horizon is None:
        mul, step = (lambda u, v: u * v), solve_stream_step
        streams, earlier = [seed], ExpPoly(beta)
    else:
        space = ChebSpace(horizon, beta, degree)
        mul, step = space.mul, space.step
        streams, earlier = [space.from_exppoly(seed)], space.zero()
    for n in range(1, n_max + 1):
        prev = streams[-1]
        f = (beta + spec.a) * prev + spec.b * mul(prev, prev) + 2.0 * spec.b * mul(prev, earlier)
        streams.append(step(f))
        earlier = earlier + prev
    return StreamList(streams, horizon)


def decompose_linear_time_coeff(c2, beta, n_max):
    """Stream cascade for ``q' = (1 - 2t) q`` with ``q(0) = c2``."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    streams = [ExpPoly.term(beta, 0, 1, c2)]
    coeff = ExpPoly.polynomial(beta, [beta + 1.0, -2.0])
    for _ in range(n_max):
        streams.append(solve_stream_step(coeff * streams[-1]))
    return StreamList(streams)


def quadratic_residual(spec, streams, t, n_max=None):
    """``Y' - a Y - b Y^2`` for the truncated sum ``Y``, evaluated at ``t``."""
    streams._check_t(t)
    Y = streams.total(n_max)
    dY = _ddt(Y)
    y = Y(t)
    return dY(t) - spec.a * y - spec.b * np.square(y)


def _log_arg(y0, alpha, t):
    arg = 1.0 - alpha * y0 * np.asarray(t, dtype=float)
    if np.any(arg <= 0):
        raise LogDomainError(
            "1 - alpha*y0*t must be positive (the solution blows up at t = 1/(alpha*y0))"
        )
    return arg


def log_series_stream(y0, alpha, n, t):
    """n-th stream ``(-1)^n y0 log^n(1 - alpha y0 t) / n!``."""
    z = -np.log(_log_arg(y0, alpha, t))
    v = y0 * z**n / math.factorial(n)
    return float(v) if np.ndim(v) == 0 else v


def log_series_eval(y0, alpha, t, n_max):
    """Partial log series for ``y' = alpha y^2``.

    Returns ``(value, last_term)`` where ``last_term`` is the magnitude of the
    ``n_max``-th term, a remainder indicator.
    """
    z = -np.log(_log_arg(y0, alpha, t))
    total = np.zeros_like(z)
    term = y0 * np.ones_like(z)
    total = total + term
    for n in range(1, n_max + 1):
        term = term * z / n
        total = total + term
    last = np.abs(term)
    if np.ndim(total) == 0:
        return float(total), float(last)
    return total, last
