"""Independent reference solutions used to validate the stream solvers.

Nothing in here touches the stream recurrences or the exponential-polynomial
algebra: the lattice oracle is a plain fixed-step RK4 on its own copy of the
master-equation matrix, the Burgers oracle solves the implicit
characteristic relation ``u = A(x + alpha u t)`` directly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "OracleReport",
    "DomainError",
    "MultivaluedSolutionError",
    "compare",
    "lattice_matrix",
    "rk4_lattice",
    "analytic",
    "ANALYTIC_SOLUTIONS",
    "burgers_breakdown_time",
    "burgers_characteristics",
]


class DomainError(ValueError):
    """Closed-form solution requested at or past a singularity."""


class MultivaluedSolutionError(ValueError):
    """Characteristics have crossed; the classical solution is not unique."""


@dataclass
class OracleReport:
    grid: np.ndarray
    reference: np.ndarray
    target: np.ndarray
    method: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid)
        self.reference = np.asarray(self.reference, dtype=float)
        self.target = np.asarray(self.target, dtype=float)
        if self.reference.shape != self.target.shape:
            raise ValueError(
                f"reference {self.reference.shape} and target {self.target.shape} grids differ"
            )

    @property
    def errors(self):
        return np.abs(self.target - self.reference)

    @property
    def sup_error(self):
        return float(self.errors.max(initial=0.0))

    @property
    def l2_error(self):
        e = self.errors
        return float(np.sqrt(np.mean(e**2))) if e.size else 0.0


def compare(grid, reference, target, method, **metadata):
    return OracleReport(grid, reference, target, method, dict(metadata))


# -- lattice ------------------------------------------------------------------

def lattice_matrix(n_sites, pm, bc):
    """Dense generator matrix of the master equation, built entry by entry."""
    M = np.zeros((n_sites, n_sites))
    half = 0.5 * pm
    for i in range(n_sites):
        for nb in (i - 1, i + 1):
            if bc == "periodic":
                nb %= n_sites
            elif nb < 0 or nb >= n_sites:
                continue
            M[i, nb] += half
            M[i, i] -= half
    return M


def _rk4(M, y0, t_end, dt):
    n_steps = int(round(t_end / dt))
    if n_steps == 0:
        return y0.copy()
    h = t_end / n_steps
    y = y0.copy()
    for _ in range(n_steps):
        k1 = M @ y
        k2 = M @ (y + 0.5 * h * k1)
        k3 = M @ (y + 0.5 * h * k2)
        k4 = M @ (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def rk4_lattice(cfg, t_end, dt, self_check=True):
    """Integrate the master equation to ``t_end`` with classical RK4.

    Returns ``(p, err_estimate)``; the error estimate is the step-halving
    difference ``|y_h - y_{h/2}| / 15`` (sup norm) or ``None`` when
    ``self_check`` is false.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    bc = getattr(cfg.bc, "value", cfg.bc)
    M = lattice_matrix(cfg.N, cfg.Pm, bc)
    y0 = np.array(cfg.A, dtype=float)
    y = _rk4(M, y0, t_end, dt)
    if not self_check:
        return y, None
    y_half = _rk4(M, y0, t_end, dt / 2)
    return y_half, float(np.max(np.abs(y - y_half)) / 15.0)


# -- closed forms -------------------------------------------------------------

def _logistic(p, t):
    c1, g = p["C1"], p["gamma"]
    e = math.exp(g * t)
    den = 1 - c1 + c1 * e
    if den == 0:
        raise DomainError("logistic solution is singular here")
    return c1 * e / den


def _reciprocal(p, t):
    a, alpha = p["A"], p["alpha"]
    den = 1.0 / a - alpha * t
    if den == 0 or (a > 0 and den < 0) or (a < 0 and den > 0):
        raise DomainError(f"y = 1/(1/A - alpha t) has blown up by t={t}")
    return 1.0 / den


def _linear_time(p, t):
    return p["C2"] * math.exp(t - t * t)


def _wave(p, x, t):
    return np.sin(p.get("omega", 1.0) * (x + p["c"] * t))


def _diffusion(p, x, t):
    w = p.get("omega", 1.0)
    return np.exp(-p["D"] * w * w * t) * np.sin(w * x)


def _diffusion2d(p, x, y, t):
    return np.exp(-2 * p["D"] * t) * np.sin(x) * np.sin(y)


def _dirichlet_linear(p, x, t):
    return p["gamma"] + p["lam"] * np.asarray(x, dtype=float)


ANALYTIC_SOLUTIONS = {
    "logistic": _logistic,
    "reciprocal": _reciprocal,
    "linear-time": _linear_time,
    "wave-sine": _wave,
    "diffusion-sine": _diffusion,
    "diffusion2d-sine": _diffusion2d,
    "dirichlet-linear": _dirichlet_linear,
}


def analytic(name, params, *args):
    """Evaluate a named closed-form solution.

    ODE solutions take ``t``; 1-D PDE solutions ``(x, t)``; the 2-D mode
    ``(x, y, t)``.
    """
    try:
        fn = ANALYTIC_SOLUTIONS[name]
    except KeyError:
        raise KeyError(f"unknown analytic solution {name!r}") from None
    return fn(params, *args)


# -- Burgers ------------------------------------------------------------------

def _trig_parts(A):
    w = A.omega
    cj = np.array(list(A.cos_coeffs.keys()), dtype=float)
    ca = np.array(list(A.cos_coeffs.values()), dtype=float)
    sj = np.array(list(A.sin_coeffs.keys()), dtype=float)
    sb = np.array(list(A.sin_coeffs.values()), dtype=float)

    def value(z):
        return float(np.sum(ca * np.cos(cj * w * z)) + np.sum(sb * np.sin(sj * w * z)))

    def slope(z):
        return float(np.sum(-ca * cj * w * np.sin(cj * w * z)) + np.sum(sb * sj * w * np.cos(sj * w * z)))

    bound = float(np.sum(np.abs(ca)) + np.sum(np.abs(sb)))
    slope_bound = float(np.sum(np.abs(ca) * cj * w) + np.sum(np.abs(sb) * sj * w))
    return value, slope, bound, slope_bound


def burgers_breakdown_time(A, alpha):
    """Conservative breakdown time ``1 / (|alpha| max|A'|)`` from coefficients."""
    _, _, _, slope_bound = _trig_parts(A)
    if alpha == 0 or slope_bound == 0:
        return math.inf
    return 1.0 / (abs(alpha) * slope_bound)


def burgers_characteristics(A, alpha, x, t, tol=1e-14, max_iter=100):
    """Solve ``u = A(x + alpha u t)`` for ``u_t = alpha u u_x`` with ``u(x, 0) = A``.

    Safeguarded Newton: iterates start at ``A(x)`` and stay in a bracket
    ``[-M, M]`` (``M`` bounds ``|A|``) that is tightened by the sign of the
    residual; a bisection step replaces any Newton step that leaves it.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    value, slope, bound, slope_bound = _trig_parts(A)
    if t > 0 and abs(alpha) * t * slope_bound >= 1:
        raise MultivaluedSolutionError(
            f"t={t} is at or past the characteristic crossing time "
            f"{burgers_breakdown_time(A, alpha):.6g}"
        )
    x = float(x)
    u = value(x)
    if t == 0 or alpha == 0:
        return u
    lo, hi = -bound, bound
    for _ in range(max_iter):
        z = x + alpha * u * t
        g = u - value(z)
        if abs(g) <= tol:
            return u
        # g is strictly increasing in u below the breakdown time
        if g > 0:
            hi = u
        else:
            lo = u
        dg = 1.0 - alpha * t * slope(z)
        step = u - g / dg
        u = step if lo < step < hi else 0.5 * (lo + hi)
        if hi - lo < tol:
            break
    return u
