"""Stream solutions of the lattice master equation for an excluding walker.

The occupancy probabilities obey

    dp_i/dt = (Pm/2) (p_{i-1} - 2 p_i + p_{i+1})

on a ring (periodic) or a segment with reflecting ends (no-flux).  Each stream
has the form ``p_i^n(t) = S[n, i] * t^n exp(-beta t) / n!`` where the table
``S`` follows a one-step recurrence in ``n``.  Sites are 0-based here.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

__all__ = [
    "Boundary",
    "LatticeConfig",
    "LatticeStreamTable",
    "UnsupportedBoundaryError",
    "indicator",
    "build_stream_table",
    "closed_form_coeff",
    "stream_weights",
    "evaluate_solution",
    "evaluate_time_derivative",
    "stream_values",
    "master_rhs",
    "poisson_tail_bound",
    "truncation_bound",
    "truncation_for",
]


class Boundary(str, enum.Enum):
    PERIODIC = "periodic"
    NOFLUX = "noflux"


class UnsupportedBoundaryError(ValueError):
    pass


def indicator(n_sites, sites):
    """Length-``n_sites`` 0/1 vector with ones at the given 0-based sites."""
    a = np.zeros(n_sites)
    a[list(sites)] = 1.0
    return a


@dataclass(frozen=True)
class LatticeConfig:
    N: int
    Pm: float
    beta: float
    bc: Boundary
    A: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "bc", Boundary(self.bc))
        A = np.array(self.A, dtype=float)
        A.flags.writeable = False
        object.__setattr__(self, "A", A)
        if int(self.N) != self.N or self.N < 3:
            raise ValueError(f"N must be an integer >= 3, got {self.N}")
        if not self.Pm > 0:
            raise ValueError(f"Pm must be positive, got {self.Pm}")
        if not self.beta >= 0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")
        if A.shape != (self.N,):
            raise ValueError(f"A must have length N={self.N}, got shape {A.shape}")
        if np.any(A < 0) or np.any(A > 1):
            raise ValueError("initial site values must lie in [0, 1]")

    def with_beta(self, beta):
        return LatticeConfig(self.N, self.Pm, beta, self.bc, self.A)


@dataclass(frozen=True)
class LatticeStreamTable:
    """Stream coefficients; ``p_i^n(t) = S[n, i] t^n e^{-beta t} / n!``."""

    S: np.ndarray
    beta: float

    @property
    def n_max(self):
        return self.S.shape[0] - 1


def _step(prev, cfg):
    b, pm = cfg.beta, cfg.Pm
    left = np.roll(prev, 1)  # left[i] = prev[i-1]
    right = np.roll(prev, -1)  # right[i] = prev[i+1]
    nxt = (b - pm) * prev + 0.5 * pm * (left + right)
    if cfg.bc is Boundary.NOFLUX:
        nxt[0] = (b - 0.5 * pm) * prev[0] + 0.5 * pm * prev[1]
        nxt[-1] = (b - 0.5 * pm) * prev[-1] + 0.5 * pm * prev[-2]
    return nxt


def build_stream_table(cfg, n_max):
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    S = np.empty((n_max + 1, cfg.N))
    S[0] = cfg.A
    for n in range(1, n_max + 1):
        S[n] = _step(S[n - 1], cfg)
    S.flags.writeable = False
    return LatticeStreamTable(S, cfg.beta)


def closed_form_coeff(cfg, i, n):
    """Nested binomial sum for ``S[n, i]`` on a periodic ring.

    sum_j (beta - Pm)^(n-j) Pm^j 2^-j C(n, j) sum_{k=-j, step 2}^{j} C(j, (k+j)/2) A_{i+k}
    with indices taken modulo N.
    """
    if cfg.bc is not Boundary.PERIODIC:
        raise UnsupportedBoundaryError("the closed form is only valid for periodic lattices")
    A, N = cfg.A, cfg.N
    d = cfg.beta - cfg.Pm
    total = 0.0
    for j in range(n + 1):
        inner = 0.0
        for k in range(-j, j + 1, 2):
            inner += math.comb(j, (k + j) // 2) * A[(i + k) % N]
        # 0**0 == 1 in Python, matching the j == n term when beta == Pm
        total += d ** (n - j) * cfg.Pm**j * 0.5**j * math.comb(n, j) * inner
    return total


def stream_weights(n_max, t, beta):
    """``w_n(t) = t^n e^{-beta t} / n!`` for n = 0..n_max, formed in log space.

    Returns shape ``(n_max + 1,) + shape(t)``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    n = np.arange(n_max + 1, dtype=float).reshape((-1,) + (1,) * t.ndim)
    with np.errstate(divide="ignore", invalid="ignore"):
        expo = n * np.log(t) - beta * t - gammaln(n + 1)
    # n * log(0) is nan for n == 0; the n = 0 weight is exp(-beta t) everywhere
    expo = np.where(n == 0, -beta * t, expo)
    return np.exp(expo)


def evaluate_solution(table, cfg, t):
    """Truncated stream sum ``p_i(t)``; shape ``(N,)`` or ``shape(t) + (N,)``."""
    w = stream_weights(table.n_max, t, table.beta)
    return np.tensordot(w, table.S, axes=([0], [0]))


def evaluate_time_derivative(table, cfg, t):
    """d/dt of the truncated sum, using ``w_n' = w_{n-1} - beta w_n``."""
    w = stream_weights(table.n_max, t, table.beta)
    dw = -table.beta * w
    dw[1:] += w[:-1]
    return np.tensordot(dw, table.S, axes=([0], [0]))


def stream_values(table, cfg, i, t_grid, n_range):
    """Matrix of ``p_i^n(t)``: rows follow ``n_range``, columns ``t_grid``."""
    if not 0 <= i < cfg.N:
        raise IndexError(f"site {i} outside 0..{cfg.N - 1}")
    ns = list(n_range)
    if ns and (min(ns) < 0 or max(ns) > table.n_max):
        raise ValueError(f"n range must lie in 0..{table.n_max}")
    w = stream_weights(table.n_max, np.asarray(t_grid, dtype=float), table.beta)
    return table.S[ns, i][:, None] * w[ns]


def master_rhs(cfg, p):
    """Right side of the master equation for occupancy vector ``p``."""
    p = np.asarray(p, dtype=float)
    lap = np.roll(p, 1) - 2 * p + np.roll(p, -1)
    if cfg.bc is Boundary.NOFLUX:
        lap[0] = p[1] - p[0]
        lap[-1] = p[-2] - p[-1]
    return 0.5 * cfg.Pm * lap


def poisson_tail_bound(cfg, t, n_max):
    """Total initial mass times ``P[Poisson(beta t) > n_max]``.

    This is exactly the mass missing from the truncated sum; it bounds the
    pointwise error when every stream coefficient is non-negative
    (``beta >= Pm``).
    """
    mass = float(np.sum(cfg.A))
    return mass * float(poisson.sf(n_max, cfg.beta * np.asarray(t, dtype=float)))


def truncation_bound(cfg, t, n_max):
    """Rigorous sup-norm bound on the truncation error for any beta.

    Each recurrence step has infinity-norm at most ``rho = |beta - Pm| + Pm``,
    so ``|S[n, i]| <= rho^n max A`` and the dropped tail is bounded by
    ``max A * e^{(rho - beta) t} P[Poisson(rho t) > n_max]``.
    """
    rho = abs(cfg.beta - cfg.Pm) + cfg.Pm
    t = float(t)
    amax = float(np.max(cfg.A)) if cfg.N else 0.0
    if t == 0.0 or amax == 0.0:
        return 0.0
    log_tail = poisson.logsf(n_max, rho * t)
    return amax * math.exp((rho - cfg.beta) * t + log_tail)


def truncation_for(cfg, t, tol, n_cap=2000):
    """Smallest n_max with ``truncation_bound(cfg, t, n_max) < tol``."""
    lo = int(math.ceil((abs(cfg.beta - cfg.Pm) + cfg.Pm) * t))
    for n in range(max(lo, 0), n_cap + 1):
        if truncation_bound(cfg, t, n) < tol:
            return n
    raise ValueError(f"no truncation below {n_cap} reaches tolerance {tol}")
