"""Chebyshev-series backend for deep nonlinear stream cascades.

Quadratic cascades give the product of streams ``i`` and ``j`` to stream
``max(i, j) + 1``, so the exact exponential-polynomial support of stream
``n`` roughly doubles with ``n`` in both the power of ``t`` and the
exponential index.  Past about ten streams the exact form is no longer
storable.  This backend carries every stream as a Chebyshev series of fixed
degree on ``[0, horizon]`` instead, and solves the same stream step
``p' = -beta p + f, p(0) = 0`` as the Volterra equation
``(I + beta J) p = J f`` with ``J`` the Chebyshev integration operator.
"""

import numpy as np
import scipy.linalg as sla
from numpy.polynomial import Chebyshev

__all__ = ["ChebSpace"]

DEFAULT_DEGREE = 128


class ChebSpace:
    """Fixed-degree Chebyshev series on ``[0, horizon]`` with stream algebra."""

    def __init__(self, horizon, beta, degree=DEFAULT_DEGREE):
        if not horizon > 0:
            raise ValueError("horizon must be positive")
        if beta < 0:
            raise ValueError("beta must be non-negative")
        self.horizon = float(horizon)
        self.beta = float(beta)
        self.degree = int(degree)
        self.domain = [0.0, self.horizon]
        D = self.degree
        J = np.zeros((D + 1, D + 1))
        for i in range(D + 1):
            e = np.zeros(D + 1)
            e[i] = 1.0
            # integ() raises the degree by one; the dropped top coefficient
            # is the tau truncation of the Volterra operator
            J[:, i] = Chebyshev(e, domain=self.domain).integ(lbnd=0).coef[: D + 1]
        self._J = J
        self._lu = sla.lu_factor(np.eye(D + 1) + self.beta * J)

    def _fit(self, coef):
        coef = np.asarray(coef, dtype=float)
        n = self.degree + 1
        if len(coef) > n:
            coef = coef[:n]
        elif len(coef) < n:
            coef = np.pad(coef, (0, n - len(coef)))
        return Chebyshev(coef, domain=self.domain)

    def zero(self):
        return self._fit([0.0])

    def from_function(self, func):
        """Interpolate ``func`` (vectorized in t) at Chebyshev points."""
        return self._fit(Chebyshev.interpolate(func, self.degree, domain=self.domain).coef)

    def from_exppoly(self, p):
        if p.beta != self.beta:
            raise ValueError("ExpPoly beta differs from the backend beta")
        q = self.from_function(p.eval)
        q.coef[0] += p(0.0) - q(0.0)
        return q

    def mul(self, a, b):
        return self._fit((a * b).coef)

    def step(self, f):
        """Solve ``p' = -beta p + f`` with ``p(0) = 0``."""
        p = self._fit(sla.lu_solve(self._lu, self._J @ f.coef))
        # the tau truncation leaves p(0) at the level of the dropped
        # coefficient; pin the initial value exactly
        p.coef[0] -= p(0.0)
        return p

    def tail(self, p, k=8):
        """Magnitude of the top ``k`` coefficients, a resolution indicator."""
        return float(np.abs(p.coef[-k:]).max())

    def check(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.horizon * (1 + 1e-12)):
            raise ValueError(f"t outside the backend horizon [0, {self.horizon}]")
