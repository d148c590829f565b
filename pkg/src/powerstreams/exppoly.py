"""Exact-coefficient algebra for exponential polynomials.

An :class:`ExpPoly` represents a finite sum

    f(t) = sum_{k,m} c[k, m] * t**k * exp(-m * beta * t)

for a fixed numeric shape parameter ``beta >= 0``.  The set is closed under
addition, multiplication, differentiation in ``t`` and the integrating-factor
step ``p' = -beta p + f, p(0) = 0`` used by every stream cascade, so stream
solutions are carried in closed form instead of being integrated numerically.

Coefficients are stored densely in a 2-D array indexed ``[k, m]``; the sparse
``coeffs`` view never contains zeros.
"""

import math

import numpy as np
from scipy.signal import convolve2d

__all__ = [
    "BetaMismatchError",
    "SupportExplosionError",
    "ExpPoly",
    "solve_stream_step",
    "log_factorial",
    "factorial_ratio",
]

PRUNE_THRESHOLD = 1e-300
MAX_MUL_OPS = 100_000_000
_EXACT_FACTORIAL_MAX = 20


class BetaMismatchError(ValueError):
    """Raised when combining exponential polynomials with different beta."""


class SupportExplosionError(MemoryError):
    """A product would need more than ``MAX_MUL_OPS`` multiply-adds."""


def log_factorial(n):
    return math.lgamma(n + 1)


def factorial_ratio(k, j):
    """Return k!/j! for 0 <= j <= k, exact integers while k <= 20."""
    if k <= _EXACT_FACTORIAL_MAX:
        return float(math.factorial(k) // math.factorial(j))
    return math.exp(log_factorial(k) - log_factorial(j))


def _normalize(c, beta):
    c = np.array(c, dtype=float, copy=True)
    if c.ndim != 2:
        raise ValueError("coefficient array must be 2-D (k, m)")
    if beta == 0.0 and c.shape[1] > 1:
        # exp(-m*0*t) == 1: every exponential index collapses onto m = 0
        c = c.sum(axis=1, keepdims=True)
    c[np.abs(c) < PRUNE_THRESHOLD] = 0.0
    nz = np.nonzero(c)
    if len(nz[0]) == 0:
        return np.zeros((0, 0))
    return c[: nz[0].max() + 1, : nz[1].max() + 1]


class ExpPoly:
    """Immutable exponential polynomial with a fixed shape parameter."""

    __slots__ = ("_beta", "_c")
    __array_ufunc__ = None

    def __init__(self, beta, coeffs=None):
        beta = float(beta)
        if not beta >= 0.0 or not math.isfinite(beta):
            raise ValueError(f"beta must be a finite non-negative real, got {beta}")
        if coeffs is None:
            arr = np.zeros((0, 0))
        elif isinstance(coeffs, dict):
            for (k, m) in coeffs:
                if k < 0 or m < 0:
                    raise ValueError(f"negative index ({k}, {m}) in ExpPoly term")
            if coeffs:
                kmax = max(k for k, _ in coeffs)
                mmax = max(m for _, m in coeffs)
                arr = np.zeros((kmax + 1, mmax + 1))
                for (k, m), v in coeffs.items():
                    arr[k, m] += v
            else:
                arr = np.zeros((0, 0))
        else:
            arr = coeffs
        c = _normalize(arr, beta)
        if not np.all(np.isfinite(c)):
            raise ValueError("ExpPoly coefficients must be finite")
        c.flags.writeable = False
        self._beta = beta
        self._c = c

    # -- construction helpers ---------------------------------------------

    @classmethod
    def zero(cls, beta):
        return cls(beta)

    @classmethod
    def term(cls, beta, k=0, m=0, c=1.0):
        """Single term ``c * t**k * exp(-m*beta*t)``."""
        return cls(beta, {(k, m): c})

    @classmethod
    def constant(cls, beta, c):
        return cls(beta, {(0, 0): c})

    @classmethod
    def polynomial(cls, beta, poly_coeffs):
        """Plain polynomial in t, ``poly_coeffs[k]`` multiplying ``t**k``."""
        arr = np.asarray(poly_coeffs, dtype=float).reshape(-1, 1)
        return cls(beta, arr)

    # -- accessors ----------------------------------------------------------

    @property
    def beta(self):
        return self._beta

    @property
    def array(self):
        """Read-only dense coefficient array indexed ``[k, m]``."""
        return self._c

    @property
    def coeffs(self):
        """Sparse ``{(k, m): c}`` view without zeros."""
        ks, ms = np.nonzero(self._c)
        return {(int(k), int(m)): float(self._c[k, m]) for k, m in zip(ks, ms)}

    def is_zero(self):
        return self._c.size == 0

    def __len__(self):
        return int(np.count_nonzero(self._c))

    def __repr__(self):
        terms = " + ".join(
            f"{c:.6g}*t^{k}*e^(-{m}bt)" for (k, m), c in sorted(self.coeffs.items())
        )
        return f"ExpPoly(beta={self._beta:g}, {terms or '0'})"

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, ExpPoly):
            return NotImplemented
        if other._beta != self._beta:
            raise BetaMismatchError(
                f"cannot combine ExpPoly with beta={self._beta} and beta={other._beta}"
            )
        return other

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = ExpPoly.constant(self._beta, other)
        if self._check(other) is NotImplemented:
            return NotImplemented
        a, b = self._c, other._c
        if a.size == 0:
            return other
        if b.size == 0:
            return self
        shape = (max(a.shape[0], b.shape[0]), max(a.shape[1], b.shape[1]))
        out = np.zeros(shape)
        out[: a.shape[0], : a.shape[1]] += a
        out[: b.shape[0], : b.shape[1]] += b
        return ExpPoly(self._beta, out)

    __radd__ = __add__

    def __neg__(self):
        return ExpPoly(self._beta, -self._c)

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = ExpPoly.constant(self._beta, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return ExpPoly(self._beta, self._c * float(other))
        if self._check(other) is NotImplemented:
            return NotImplemented
        if self._c.size == 0 or other._c.size == 0:
            return ExpPoly(self._beta)
        ops = self._c.size * other._c.size
        if ops > MAX_MUL_OPS:
            raise SupportExplosionError(
                f"product of {self._c.shape} and {other._c.shape} coefficient arrays "
                f"exceeds {MAX_MUL_OPS} operations; use a finite-horizon backend"
            )
        # (k1, m1) x (k2, m2) -> (k1 + k2, m1 + m2): a full 2-D convolution
        return ExpPoly(self._beta, convolve2d(self._c, other._c, mode="full"))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return ExpPoly(self._beta, self._c / float(scalar))

    def __eq__(self, other):
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return (
            self._beta == other._beta
            and self._c.shape == other._c.shape
            and bool(np.all(self._c == other._c))
        )

    __hash__ = None

    def allclose(self, other, rtol=1e-12, atol=0.0):
        """Coefficient-level comparison, relative to the largest coefficient."""
        self._check(other)
        a, b = self._c, other._c
        shape = (max(a.shape[0], b.shape[0]), max(a.shape[1], b.shape[1]))
        pa = np.zeros(shape)
        pb = np.zeros(shape)
        pa[: a.shape[0], : a.shape[1]] = a
        pb[: b.shape[0], : b.shape[1]] = b
        scale = max(np.abs(pa).max(initial=0.0), np.abs(pb).max(initial=0.0))
        return bool(np.all(np.abs(pa - pb) <= atol + rtol * scale))

    def derivative(self):
        """d/dt, mapping t^k e^{-m b t} to k t^(k-1) e^{-m b t} - m b t^k e^{-m b t}."""
        c = self._c
        if c.size == 0:
            return self
        K, M = c.shape
        out = np.zeros((K, M))
        ks = np.arange(K, dtype=float)[:, None]
        ms = np.arange(M, dtype=float)[None, :]
        out[:-1, :] += (ks[1:] * c[1:, :])
        out -= ms * self._beta * c
        return ExpPoly(self._beta, out)

    def shift_envelope(self, m=1):
        """Multiply by ``exp(-m*beta*t)``."""
        if self._c.size == 0:
            return self
        K, M = self._c.shape
        out = np.zeros((K, M + m))
        out[:, m:] = self._c
        return ExpPoly(self._beta, out)

    def times_t(self, power=1):
        """Multiply by ``t**power``."""
        if self._c.size == 0:
            return self
        K, M = self._c.shape
        out = np.zeros((K + power, M))
        out[power:, :] = self._c
        return ExpPoly(self._beta, out)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        """Evaluate at ``t >= 0`` (scalar or array) in log space.

        Each term is formed as ``sign(c) * exp(log|c| + k log t - m beta t)``
        so large powers of ``t`` never overflow before being damped.
        """
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0):
            raise ValueError("ExpPoly is evaluated on t >= 0 only")
        scalar = t_arr.ndim == 0
        t_flat = np.atleast_1d(t_arr).ravel()
        out = np.zeros_like(t_flat)
        if self._c.size:
            ks, ms = np.nonzero(self._c)
            vals = self._c[ks, ms]
            at_zero = t_flat == 0.0
            if np.any(at_zero):
                out[at_zero] = vals[ks == 0].sum()
            pos = ~at_zero
            if np.any(pos):
                tp = t_flat[pos]
                logt = np.log(tp)
                expo = (
                    np.log(np.abs(vals))[:, None]
                    + ks[:, None] * logt[None, :]
                    - (ms * self._beta)[:, None] * tp[None, :]
                )
                out[pos] = (np.sign(vals)[:, None] * np.exp(expo)).sum(axis=0)
        out = out.reshape(t_arr.shape) if not scalar else out
        return float(out[0]) if scalar else out

    def magnitude(self, t):
        """Sum of term magnitudes ``|c| t^k e^{-m beta t}``.

        The ratio ``magnitude(t) / |eval(t)|`` estimates how many digits the
        evaluation loses to cancellation between terms.
        """
        return ExpPoly(self._beta, np.abs(self._c)).eval(t)

    def eval_naive(self, t):
        """Direct evaluation of ``c * t**k * exp(-m beta t)``; may overflow."""
        t_arr = np.asarray(t, dtype=float)
        total = np.zeros_like(t_arr)
        for (k, m), c in self.coeffs.items():
            total = total + c * t_arr**k * np.exp(-m * self._beta * t_arr)
        return float(total) if t_arr.ndim == 0 else total


def _incgamma_weight(k, j, mu):
    """(k!/j!) / mu^(k+1-j); mu may be negative (the m = 0 case)."""
    p = k + 1 - j
    if k <= _EXACT_FACTORIAL_MAX:
        try:
            w = factorial_ratio(k, j) / mu**p
        except OverflowError:
            w = math.inf
        if math.isfinite(w):
            return w
    logw = log_factorial(k) - log_factorial(j) - p * math.log(abs(mu))
    if logw > 709.0:
        raise OverflowError(
            f"stream-step coefficient for t^{k} overflows (mu={mu:g}); "
            "use a finite-horizon backend for this cascade"
        )
    return math.copysign(math.exp(logw), mu if p % 2 else 1.0)


def solve_stream_step(f):
    """Closed-form solution of ``p' = -beta p + f`` with ``p(0) = 0``.

    Uses ``p(t) = exp(-beta t) * int_0^t exp(beta s) f(s) ds`` term by term.
    A term ``s^k e^{-m beta s}`` of ``f`` leaves the integrand
    ``s^k e^{-mu s}`` with ``mu = (m - 1) beta``; when ``mu == 0`` it
    integrates to ``t^(k+1)/(k+1)``, otherwise

        int_0^t s^k e^{-mu s} ds = k!/mu^(k+1) (1 - e^{-mu t} sum_{j<=k} (mu t)^j / j!).

    The result stays inside the ring.
    """
    beta = f.beta
    c = f.array
    if c.size == 0:
        return ExpPoly(beta)
    K, M = c.shape
    out = np.zeros((K + 1, max(M, 2)))
    for k, m in zip(*np.nonzero(c)):
        k, m = int(k), int(m)
        coef = c[k, m]
        if beta == 0.0 or m == 1:
            # the final exp(-beta t) factor lands this term at m = 1
            out[k + 1, 0 if beta == 0.0 else 1] += coef / (k + 1)
            continue
        mu = (m - 1) * beta
        out[0, 1] += coef * _incgamma_weight(k, 0, mu)
        for j in range(k + 1):
            out[j, m] -= coef * _incgamma_weight(k, j, mu)
    return ExpPoly(beta, out)
