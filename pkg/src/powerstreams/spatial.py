"""Spatial function algebra for the PDE stream solvers.

Trig polynomials ``sum a_j cos(j w x) + b_j sin(j w x)`` are closed under
``d/dx`` and multiplication, which is all the Burgers cascade needs.  Plain
polynomials in ``x`` cover linear initial profiles.  A :class:`DerivOracle`
hands the closed-form linear PDE streams the ``j``-th derivative of the
initial condition at a point.
"""

import numpy as np
from numpy.polynomial import polynomial as npoly

__all__ = [
    "DEFAULT_HARMONIC_CAP",
    "HarmonicCapError",
    "OmegaMismatchError",
    "TrigPoly",
    "SpacePoly",
    "DerivOracle",
    "trig_derivative",
    "trig_mul",
]

DEFAULT_HARMONIC_CAP = 256


class OmegaMismatchError(ValueError):
    pass


class HarmonicCapError(OverflowError):
    """A product produced a harmonic above the configured cap."""


def _clean(d):
    return {int(j): float(v) for j, v in d.items() if v != 0.0}


class TrigPoly:
    """Immutable finite trigonometric series with fundamental frequency omega."""

    __slots__ = ("omega", "cos_coeffs", "sin_coeffs")

    def __init__(self, cos_coeffs=None, sin_coeffs=None, omega=1.0):
        if not omega > 0:
            raise ValueError("omega must be positive")
        cos_coeffs = _clean(cos_coeffs or {})
        sin_coeffs = _clean(sin_coeffs or {})
        if any(j < 0 for j in cos_coeffs) or any(j < 0 for j in sin_coeffs):
            raise ValueError("harmonic indices must be non-negative")
        if 0 in sin_coeffs:
            raise ValueError("sin harmonic 0 is identically zero and not allowed")
        object.__setattr__(self, "omega", float(omega))
        object.__setattr__(self, "cos_coeffs", cos_coeffs)
        object.__setattr__(self, "sin_coeffs", sin_coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("TrigPoly is immutable")

    @classmethod
    def sin(cls, j=1, amplitude=1.0, omega=1.0):
        return cls(sin_coeffs={j: amplitude}, omega=omega)

    @classmethod
    def cos(cls, j=1, amplitude=1.0, omega=1.0):
        return cls(cos_coeffs={j: amplitude}, omega=omega)

    @classmethod
    def constant(cls, value, omega=1.0):
        return cls(cos_coeffs={0: value}, omega=omega)

    @property
    def max_harmonic(self):
        return max([*self.cos_coeffs, *self.sin_coeffs], default=0)

    def is_zero(self):
        return not self.cos_coeffs and not self.sin_coeffs

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        w = self.omega
        for j, a in self.cos_coeffs.items():
            out = out + a * np.cos(j * w * x)
        for j, b in self.sin_coeffs.items():
            out = out + b * np.sin(j * w * x)
        return float(out) if out.ndim == 0 else out

    def __add__(self, other):
        _check_omega(self, other)
        cos = dict(self.cos_coeffs)
        sin = dict(self.sin_coeffs)
        for j, a in other.cos_coeffs.items():
            cos[j] = cos.get(j, 0.0) + a
        for j, b in other.sin_coeffs.items():
            sin[j] = sin.get(j, 0.0) + b
        return TrigPoly(cos, sin, self.omega)

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            return trig_mul(self, other)
        s = float(other)
        return TrigPoly(
            {j: s * a for j, a in self.cos_coeffs.items()},
            {j: s * b for j, b in self.sin_coeffs.items()},
            self.omega,
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return (
            self.omega == other.omega
            and self.cos_coeffs == other.cos_coeffs
            and self.sin_coeffs == other.sin_coeffs
        )

    __hash__ = None

    def __repr__(self):
        parts = [f"{a:g}cos({j}wx)" for j, a in sorted(self.cos_coeffs.items())]
        parts += [f"{b:g}sin({j}wx)" for j, b in sorted(self.sin_coeffs.items())]
        return f"TrigPoly(w={self.omega:g}: {' + '.join(parts) or '0'})"

    def derivative(self, order=1):
        p = self
        for _ in range(order):
            p = trig_derivative(p)
        return p

    def sup_bound(self):
        """Upper bound on ``max_x |p(x)|`` from the coefficients."""
        return sum(abs(a) for a in self.cos_coeffs.values()) + sum(
            abs(b) for b in self.sin_coeffs.values()
        )


def _check_omega(p, q):
    if p.omega != q.omega:
        raise OmegaMismatchError(f"omega mismatch: {p.omega} vs {q.omega}")


def trig_derivative(p):
    """d/dx cos(jwx) = -jw sin(jwx); d/dx sin(jwx) = jw cos(jwx)."""
    w = p.omega
    cos = {j: j * w * b for j, b in p.sin_coeffs.items()}
    sin = {j: -j * w * a for j, a in p.cos_coeffs.items() if j != 0}
    return TrigPoly(cos, sin, w)


def product_to_sum(kind_p, j, kind_q, k):
    """Expand ``kind_p(j wx) * kind_q(k wx)`` into ``[(kind, harmonic, weight)]``.

    Negative harmonics are folded by parity, so every harmonic returned is
    non-negative; sin(0) contributions are dropped.
    """
    if kind_p == "cos" and kind_q == "cos":
        raw = [("cos", j - k, 0.5), ("cos", j + k, 0.5)]
    elif kind_p == "sin" and kind_q == "sin":
        raw = [("cos", j - k, 0.5), ("cos", j + k, -0.5)]
    elif kind_p == "sin":
        raw = [("sin", j + k, 0.5), ("sin", j - k, 0.5)]
    else:
        raw = [("sin", j + k, 0.5), ("sin", k - j, 0.5)]
    out = []
    for kind, h, wgt in raw:
        if h < 0:
            h = -h
            if kind == "sin":
                wgt = -wgt
        if kind == "sin" and h == 0:
            continue
        out.append((kind, h, wgt))
    return out


def trig_mul(p, q, cap=DEFAULT_HARMONIC_CAP):
    _check_omega(p, q)
    if p.max_harmonic + q.max_harmonic > cap:
        raise HarmonicCapError(
            f"product harmonic {p.max_harmonic + q.max_harmonic} exceeds cap {cap}"
        )
    acc = {"cos": {}, "sin": {}}
    for kp, dp in (("cos", p.cos_coeffs), ("sin", p.sin_coeffs)):
        for kq, dq in (("cos", q.cos_coeffs), ("sin", q.sin_coeffs)):
            for j, a in dp.items():
                for k, b in dq.items():
                    for kind, h, wgt in product_to_sum(kp, j, kq, k):
                        acc[kind][h] = acc[kind].get(h, 0.0) + wgt * a * b
    return TrigPoly(acc["cos"], acc["sin"], p.omega)


class SpacePoly:
    """Polynomial in x; ``coeffs[i]`` multiplies ``x**i``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.trim_zeros(np.array(coeffs, dtype=float), "b").copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("SpacePoly is immutable")

    @property
    def degree(self):
        return max(len(self.coeffs) - 1, 0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        v = npoly.polyval(x, self.coeffs) if len(self.coeffs) else 0.0 * x
        return float(v) if np.ndim(v) == 0 else v

    def derivative(self, order=1):
        if len(self.coeffs) == 0:
            return self
        return SpacePoly(npoly.polyder(self.coeffs, order))

    def __repr__(self):
        return f"SpacePoly({list(self.coeffs)})"


class DerivOracle:
    """Callable ``(j, x) -> d^j A / dx^j (x)`` for a fixed initial profile.

    ``max_order`` (None for unlimited) bounds the derivative order the oracle
    can supply.
    """

    def __init__(self, func, name="custom", max_order=None):
        self._func = func
        self.name = name
        self.max_order = max_order

    def __call__(self, j, x):
        if j < 0:
            raise ValueError("derivative order must be non-negative")
        if self.max_order is not None and j > self.max_order:
            raise ValueError(
                f"oracle {self.name!r} supports derivatives up to order {self.max_order}, got {j}"
            )
        return self._func(j, x)

    def __repr__(self):
        return f"DerivOracle({self.name})"

    @classmethod
    def sine(cls, omega=1.0, amplitude=1.0):
        """A(x) = amplitude * sin(omega x); derivatives cycle with period 4."""
        def f(j, x):
            x = np.asarray(x, dtype=float)
            scale = amplitude * omega**j
            r = j % 4
            if r == 0:
                v = np.sin(omega * x)
            elif r == 1:
                v = np.cos(omega * x)
            elif r == 2:
                v = -np.sin(omega * x)
            else:
                v = -np.cos(omega * x)
            return scale * v
        return cls(f, name=f"sine(w={omega:g})")

    @classmethod
    def from_spacepoly(cls, p):
        derivs = [p]
        for _ in range(p.degree + 1):
            derivs.append(derivs[-1].derivative())

        def f(j, x):
            if j >= len(derivs):
                return 0.0 * np.asarray(x, dtype=float)
            return derivs[j](x)
        return cls(f, name=repr(p))

    @classmethod
    def from_trigpoly(cls, p):
        cache = {0: p}

        def f(j, x):
            if j not in cache:
                top = max(cache)
                q = cache[top]
                for i in range(top + 1, j + 1):
                    q = trig_derivative(q)
                    cache[i] = q
            return cache[j](x)
        return cls(f, name=repr(p))

