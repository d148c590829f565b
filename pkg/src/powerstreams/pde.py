"""Stream solutions for linear and quasilinear PDEs.

Linear equations (``u_t = c u_x``, ``u_t = D u_xx`` and the 2-D diffusion
equation) have closed-form streams

    u^n(x, t) = t^n e^{-beta t} / n! * sum_j C(n, j) beta^(n-j) L^j A(x)

with ``L = c d/dx`` or ``D d^2/dx^2``.  The inviscid Burgers equation
``u_t = alpha u u_x`` is solved by a stream cascade over :class:`Field`
values, i.e. trig harmonics in ``x`` with exponential-polynomial
coefficients in ``t``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .exppoly import ExpPoly, solve_stream_step
from .spatial import DEFAULT_HARMONIC_CAP, HarmonicCapError, TrigPoly, product_to_sum

__all__ = [
    "LinearPdeSpec",
    "DirichletSpec",
    "Field",
    "linear_stream_eval",
    "linear_solution_eval",
    "dirichlet_solution_eval",
    "burgers_cascade",
    "burgers_sum",
    "burgers_residual",
    "burgers_partition_terms",
]

_KINDS = ("wave", "diffusion", "diffusion2d")


def _log_envelope(n, t, beta):
    """log of t^n e^{-beta t} / n!, with the n = 0 case defined at t = 0."""
    t = np.asarray(t, dtype=float)
    if n == 0:
        return -beta * t
    with np.errstate(divide="ignore"):
        return n * np.log(t) - beta * t - gammaln(n + 1)


@dataclass(frozen=True)
class LinearPdeSpec:
    """``kind`` is wave (``coef = c``), diffusion or diffusion2d (``coef = D``).

    ``A`` is a :class:`~powerstreams.spatial.DerivOracle` for the initial
    profile; for diffusion2d the profile is ``A(x) B(y)``.
    """

    kind: str
    coef: float
    beta: float
    A: object
    B: object = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, got {self.kind!r}")
        if not math.isfinite(self.coef):
            raise ValueError("coefficient must be finite")
        if self.kind != "wave" and self.coef < 0:
            raise ValueError("diffusion coefficient must be non-negative")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if self.kind == "diffusion2d" and self.B is None:
            raise ValueError("diffusion2d needs a y-axis oracle B")


def _derivative_table(spec, x, y, n_max):
    order = n_max if spec.kind == "wave" else 2 * n_max
    dA = [np.asarray(spec.A(j, x), dtype=float) for j in range(order + 1)]
    dB = None
    if spec.kind == "diffusion2d":
        dB = [np.asarray(spec.B(j, y), dtype=float) for j in range(order + 1)]
    return dA, dB


def _operator_power(spec, j, dA, dB):
    """``L^j A`` from cached derivative values."""
    if spec.kind == "wave":
        return spec.coef**j * dA[j]
    if spec.kind == "diffusion":
        return spec.coef**j * dA[2 * j]
    # Laplacian^j of A(x)B(y) = sum_i C(j, i) A^(2(j-i)) B^(2i)
    lap = sum(math.comb(j, i) * dA[2 * (j - i)] * dB[2 * i] for i in range(j + 1))
    return spec.coef**j * lap


def _stream(spec, n, t, dA, dB):
    spatial = sum(
        math.comb(n, j) * spec.beta ** (n - j) * _operator_power(spec, j, dA, dB)
        for j in range(n + 1)
    )
    return np.exp(_log_envelope(n, t, spec.beta)) * spatial


def linear_stream_eval(spec, n, x, t, y=None):
    """Value of the n-th stream at ``(x, t)`` (or ``(x, y, t)`` in 2-D)."""
    if n < 0:
        raise ValueError("stream index must be >= 0")
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be non-negative")
    dA, dB = _derivative_table(spec, x, y, n)
    return _stream(spec, n, t, dA, dB)


def linear_solution_eval(spec, x, t, n_max, y=None):
    """Truncated stream sum; returns ``(value, last_stream_magnitude)``."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be non-negative")
    dA, dB = _derivative_table(spec, x, y, n_max)
    total = 0.0
    last = 0.0
    for n in range(n_max + 1):
        last = _stream(spec, n, t, dA, dB)
        total = total + last
    return total, float(np.max(np.abs(last)))


# -- Dirichlet problem with a linear initial profile ---------------------------

@dataclass(frozen=True)
class DirichletSpec:
    """Diffusion on ``[0, L]`` from ``A(x) = gamma + lam x`` with fixed ends."""

    gamma: float
    lam: float
    L: float
    D: float
    beta: float

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be positive")
        if not self.D > 0:
            raise ValueError("D must be positive")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")


def dirichlet_solution_eval(spec, x, t, n_max):
    """Closed-form boundary-corrected diffusion solution, summed to ``n_max``.

    Per stream the time factor is ``e^{-beta t}(n t^{n-1}/n! - beta t^n/n!)``
    with the ``n = 0`` first term taken as zero, multiplying

        [beta^n P(x) + n beta^(n-1) D Q(x)]
        - (x/L) [beta^n P(L) + n beta^(n-1) D Q(L)]
        + (x/L - 1) n beta^(n-1) D gamma

    where ``P(x) = gamma x^2/2 + lam x^3/6`` and ``Q(x) = gamma + lam x``.  The
    sum is divided by ``D`` and ``gamma + lam x`` is added.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > spec.L):
        raise ValueError(f"x must lie in [0, {spec.L}]")
    if t < 0:
        raise ValueError("t must be non-negative")
    g, lam, L, D, b = spec.gamma, spec.lam, spec.L, spec.D, spec.beta
    P = lambda z: g * z**2 / 2 + lam * z**3 / 6
    Q = lambda z: g + lam * z
    frac = x / L
    if t == 0:
        # every bracket combination cancels identically at t = 0
        out = g + lam * x
        return float(out) if out.ndim == 0 else out
    total = np.zeros_like(x)
    for n in range(n_max + 1):
        # e^{-beta t} n t^{n-1}/n! is the (n-1)-th Poisson-type weight
        first = 0.0 if n == 0 else math.exp(_log_envelope(n - 1, t, b))
        second = b * math.exp(_log_envelope(n, t, b))
        factor = first - second
        if factor == 0.0:
            continue
        bn = b**n
        nb = n * b ** (n - 1) if n > 0 else 0.0
        bracket = (
            (bn * P(x) + nb * D * Q(x))
            - frac * (bn * P(L) + nb * D * Q(L))
            + (frac - 1) * nb * D * g
        )
        total = total + factor * bracket
    out = total / D + lam * x + g
    return float(out) if out.ndim == 0 else out


# -- Burgers cascade -----------------------------------------------------------

class Field:
    """``u(x, t) = sum_j cos(j w x) C_j(t) + sin(j w x) S_j(t)``.

    ``C_j``, ``S_j`` are :class:`ExpPoly` values sharing one beta.
    """

    __slots__ = ("omega", "beta", "cos", "sin")

    def __init__(self, omega, beta, cos=None, sin=None):
        self.omega = float(omega)
        self.beta = float(beta)
        self.cos = {j: p for j, p in (cos or {}).items() if not p.is_zero()}
        self.sin = {j: p for j, p in (sin or {}).items() if not p.is_zero() and j != 0}

    @classmethod
    def from_trigpoly(cls, A, envelope):
        return cls(
            A.omega,
            envelope.beta,
            {j: envelope * a for j, a in A.cos_coeffs.items()},
            {j: envelope * b for j, b in A.sin_coeffs.items()},
        )

    @classmethod
    def zero(cls, omega, beta):
        return cls(omega, beta)

    @property
    def max_harmonic(self):
        return max([*self.cos, *self.sin], default=0)

    def is_zero(self):
        return not self.cos and not self.sin

    def _map(self, fn):
        return Field(
            self.omega,
            self.beta,
            {j: fn(p) for j, p in self.cos.items()},
            {j: fn(p) for j, p in self.sin.items()},
        )

    def __add__(self, other):
        cos, sin = dict(self.cos), dict(self.sin)
        for j, p in other.cos.items():
            cos[j] = cos[j] + p if j in cos else p
        for j, p in other.sin.items():
            sin[j] = sin[j] + p if j in sin else p
        return Field(self.omega, self.beta, cos, sin)

    def scale(self, s):
        return self._map(lambda p: p * s)

    def dx(self):
        w = self.omega
        cos = {j: p * (j * w) for j, p in self.sin.items()}
        sin = {j: p * (-j * w) for j, p in self.cos.items() if j != 0}
        return Field(self.omega, self.beta, cos, sin)

    def dt(self):
        return self._map(lambda p: p.derivative())

    def step(self):
        """Apply the stream step ``p' = -beta p + f`` to every harmonic."""
        return self._map(solve_stream_step)

    def mul(self, other, cap=DEFAULT_HARMONIC_CAP):
        if other.omega != self.omega:
            raise ValueError("omega mismatch")
        top = self.max_harmonic + other.max_harmonic
        if top > cap:
            raise HarmonicCapError(f"field product reaches harmonic {top} > cap {cap}")
        acc = {"cos": {}, "sin": {}}
        for kp, dp in (("cos", self.cos), ("sin", self.sin)):
            for kq, dq in (("cos", other.cos), ("sin", other.sin)):
                for j, a in dp.items():
                    for k, b in dq.items():
                        ab = a * b
                        for kind, h, wgt in product_to_sum(kp, j, kq, k):
                            term = ab * wgt
                            slot = acc[kind]
                            slot[h] = slot[h] + term if h in slot else term
        return Field(self.omega, self.beta, acc["cos"], acc["sin"])

    def eval(self, x, t):
        x = np.asarray(x, dtype=float)
        w = self.omega
        out = np.zeros(np.broadcast(x, np.asarray(t, dtype=float)).shape)
        for j, p in self.cos.items():
            out = out + np.cos(j * w * x) * p(t)
        for j, p in self.sin.items():
            out = out + np.sin(j * w * x) * p(t)
        return out

    __call__ = eval

    def at_time(self, t):
        """Spatial profile at fixed ``t`` as a :class:`TrigPoly`."""
        return TrigPoly(
            {j: p(t) for j, p in self.cos.items()},
            {j: p(t) for j, p in self.sin.items()},
            self.omega,
        )

    def allclose(self, other, rtol=1e-12, atol=0.0):
        """Coefficient comparison relative to the largest coefficient of either field."""
        z = ExpPoly(self.beta)
        polys = [*self.cos.values(), *self.sin.values(), *other.cos.values(), *other.sin.values()]
        scale = max((np.abs(p.array).max() for p in polys), default=0.0)
        tol = atol + rtol * scale
        for mine, theirs in ((self.cos, other.cos), (self.sin, other.sin)):
            for j in set(mine) | set(theirs):
                if not mine.get(j, z).allclose(theirs.get(j, z), rtol=0.0, atol=tol):
                    return False
        return True


def burgers_cascade(alpha, beta, A, n_max, cap=DEFAULT_HARMONIC_CAP):
    """Streams ``u^0..u^n_max`` for ``u_t = alpha u u_x``, ``u(x, 0) = A(x)``.

    ``u^0 = A(x) e^{-beta t}`` and for n >= 1

        u^n_t = -beta u^n + beta u^{n-1}
                + alpha u^{n-1} sum_{j<=n-1} u^j_x + alpha u^{n-1}_x sum_{k<=n-2} u^k

    Each product pair lands in stream ``max(i, j) + 1``, so the top harmonic
    doubles per level: stream n reaches harmonic ``2^n`` times that of A.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    streams = [Field.from_trigpoly(A, ExpPoly.term(beta, 0, 1, 1.0))]
    sum_dx = Field.zero(A.omega, beta)  # sum_{j <= n-1} u^j_x
    sum_before = Field.zero(A.omega, beta)  # sum_{k <= n-2} u^k
    for n in range(1, n_max + 1):
        prev = streams[-1]
        prev_dx = prev.dx()
        sum_dx = sum_dx + prev_dx
        f = prev.scale(beta) + prev.mul(sum_dx, cap).scale(alpha)
        if not sum_before.is_zero():
            f = f + prev_dx.mul(sum_before, cap).scale(alpha)
        streams.append(f.step())
        sum_before = sum_before + prev
    return streams


def burgers_sum(streams, n_max=None):
    upto = streams if n_max is None else streams[: n_max + 1]
    total = upto[0]
    for u in upto[1:]:
        total = total + u
    return total


def burgers_residual(alpha, streams, x, t, n_max=None):
    """``U_t - alpha U U_x`` of the truncated sum, evaluated pointwise."""
    U = burgers_sum(streams, n_max)
    return U.dt().eval(x, t) - alpha * U.eval(x, t) * U.dx().eval(x, t)


def burgers_partition_terms(streams, n_top, cap=DEFAULT_HARMONIC_CAP):
    """``sum_{n=1}^{n_top}`` of the nonlinear forcing pieces (without alpha).

    Equals ``U U_x`` with ``U = sum_{k < n_top} u^k`` when the diagonal and
    cross terms partition the square correctly.
    """
    omega, beta = streams[0].omega, streams[0].beta
    total = Field.zero(omega, beta)
    for n in range(1, n_top + 1):
        prev = streams[n - 1]
        sum_dx = burgers_sum([u.dx() for u in streams[:n]])
        total = total + prev.mul(sum_dx, cap)
        if n >= 2:
            total = total + prev.dx().mul(burgers_sum(streams[: n - 1]), cap)
    return total
