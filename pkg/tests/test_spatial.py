import numpy as np
import pytest
from hypothesis import given, settings

from powerstreams.spatial import (
    DerivOracle,
    HarmonicCapError,
    OmegaMismatchError,
    SpacePoly,
    TrigPoly,
    trig_derivative,
    trig_mul,
)
from tests.strategies import trigpolys

X = np.linspace(0, 2 * np.pi, 128, endpoint=False)


def test_derivative_examples():
    assert trig_derivative(TrigPoly.sin()) == TrigPoly.cos()
    assert trig_derivative(TrigPoly.constant(3.0)).is_zero()
    p = TrigPoly.sin()
    for _ in range(4):
        p = trig_derivative(p)
    assert p == TrigPoly.sin()


def test_derivative_finite_difference():
    p = TrigPoly({0: 0.3, 2: -1.0}, {1: 0.5, 3: 0.25})
    x = np.linspace(0, 2 * np.pi, 64)
    for h in (1e-3, 5e-4):
        fd = (p(x + h) - p(x - h)) / (2 * h)
        err = np.abs(fd - trig_derivative(p)(x)).max()
        assert err < 3 * h * h * 27  # |p'''| <= sum |c| j^3


def test_mul_identities():
    assert trig_mul(TrigPoly.sin(), TrigPoly.cos()) == TrigPoly(sin_coeffs={2: 0.5})
    assert trig_mul(TrigPoly.sin(), TrigPoly.sin()) == TrigPoly({0: 0.5, 2: -0.5})


def test_mul_omega_and_cap():
    with pytest.raises(OmegaMismatchError):
        trig_mul(TrigPoly.sin(omega=1.0), TrigPoly.sin(omega=2.0))
    with pytest.raises(HarmonicCapError):
        trig_mul(TrigPoly.sin(5), TrigPoly.sin(6), cap=10)


def test_invalid_trigpoly():
    with pytest.raises(ValueError):
        TrigPoly(sin_coeffs={0: 1.0})
    with pytest.raises(ValueError):
        TrigPoly(omega=0.0)
    with pytest.raises(AttributeError):
        TrigPoly.sin().omega = 2.0


@settings(max_examples=100, deadline=None)
@given(trigpolys(), trigpolys())
def test_mul_fold_pointwise(p, q):
    assert np.allclose((p * q)(X), p(X) * q(X), rtol=1e-12, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(trigpolys(), trigpolys())
def test_derivative_linear(p, q):
    lhs = trig_derivative(p + q)(X)
    rhs = trig_derivative(p)(X) + trig_derivative(q)(X)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_spacepoly():
    p = SpacePoly([1.0, 0.5, 0.0])
    assert p.degree == 1
    assert p(2.0) == 2.0
    assert p.derivative()(7.0) == 0.5
    assert p.derivative(2)(1.0) == 0.0


@pytest.mark.parametrize(
    "oracle",
    [
        DerivOracle.sine(omega=1.5, amplitude=2.0),
        DerivOracle.from_spacepoly(SpacePoly([1.0, -2.0, 0.5, 0.25])),
        DerivOracle.from_trigpoly(TrigPoly({1: 0.5}, {2: 1.0})),
    ],
    ids=["sine", "spacepoly", "trigpoly"],
)
def test_oracle_consistency(oracle):
    x = np.linspace(0.1, 3.0, 17)
    for j in range(6):
        errs = []
        for h in (1e-3, 5e-4):
            fd = (oracle(j, x + h) - oracle(j, x - h)) / (2 * h)
            errs.append(np.abs(fd - oracle(j + 1, x)).max())
        # O(h^2): halving h cuts the error about four times (or it is at roundoff)
        assert errs[1] < 1e-7 or errs[0] / errs[1] > 3.5


def test_oracle_order_limit():
    o = DerivOracle(lambda j, x: x, max_order=2)
    with pytest.raises(ValueError):
        o(3, 0.0)
    with pytest.raises(ValueError):
        o(-1, 0.0)
