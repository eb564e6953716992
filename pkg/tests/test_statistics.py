import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lfsm import (
    DegenerateInputError,
    DomainError,
    Frequency,
    IncrementSpec,
    SamplePath,
    ShapeError,
    ecf_high,
    ecf_low,
    increments,
    power_variation,
    ratio_statistic,
)


def path_from(values, freq="low"):
    v = np.asarray(values, float)
    return SamplePath(v - v[0], freq)


def test_increments_definition():
    x = np.array([0.0, 1.0, 4.0, 9.0, 16.0, 25.0])
    p = path_from(x)
    inc1 = increments(p, IncrementSpec(1, 1)).values
    assert inc1.tolist() == [1, 3, 5, 7, 9]
    inc2 = increments(p, IncrementSpec(2, 1)).values
    assert inc2.tolist() == [2, 2, 2, 2]
    inc22 = increments(p, IncrementSpec(2, 2)).values  # x_i - 2x_{i-2} + x_{i-4}
    assert inc22.tolist() == [8, 8]
    with pytest.raises(ShapeError):
        increments(path_from([0.0, 1.0]), IncrementSpec(2, 1))


@settings(max_examples=30, deadline=None)
@given(k=st.integers(1, 4), n=st.integers(10, 60))
def test_polynomial_annihilation(k, n):
    # k-th differences kill polynomials of degree < k
    i = np.arange(n + 1, dtype=float)
    x = sum(c * i**d for d, c in enumerate([0.0, 0.5, -0.25, 0.125][:k]))
    inc = increments(path_from(x), IncrementSpec(k, 1)).values
    assert np.allclose(inc, 0.0, atol=1e-8 * max(1.0, n**k))


def test_power_variation_low_and_high():
    rng = np.random.default_rng(0)
    x = np.concatenate([[0.0], np.cumsum(rng.normal(size=100))])
    low = path_from(x)
    inc = increments(low, IncrementSpec(1, 1))
    assert power_variation(inc, 0.4) == pytest.approx(np.mean(np.abs(np.diff(x)) ** 0.4))
    high = path_from(x * 100.0**-0.5, "high")
    inc_h = increments(high, IncrementSpec(1, 1))
    assert power_variation(inc_h, 0.4, 0.5) == pytest.approx(power_variation(inc, 0.4), rel=1e-12)
    with pytest.raises(DomainError):
        power_variation(inc_h, 0.4)
    with pytest.raises(DomainError):
        power_variation(inc, 0.0)


def test_negative_power_on_constant_path():
    p = path_from(np.zeros(20))
    with pytest.raises(DegenerateInputError):
        power_variation(increments(p, IncrementSpec(1, 1)), -0.4)
    with pytest.raises(DegenerateInputError):
        ratio_statistic(p, -0.4, 2)


def test_ecf():
    x = np.array([0.0, 1.0, 0.0, 2.0])
    p = path_from(x)
    assert ecf_low(p, 1.0, 1) == pytest.approx(np.mean(np.cos([1.0, -1.0, 2.0])))
    h = path_from(x, "high")
    assert ecf_high(h, 1.0, 0.5, 1) == pytest.approx(np.mean(np.cos(np.sqrt(3) * np.array([1.0, -1.0, 2.0]))))
    with pytest.raises(DomainError):
        ecf_low(h, 1.0, 1)
    with pytest.raises(DomainError):
        ecf_high(p, 1.0, 0.5, 1)
    with pytest.raises(DomainError):
        ecf_low(p, 0.0, 1)


def test_ratio_statistic_brownian_scaling():
    # for Brownian motion (H = 1/2) the k = 2 ratio gives H close to 1/2
    rng = np.random.default_rng(3)
    x = np.concatenate([[0.0], np.cumsum(rng.normal(size=200_000))])
    r = ratio_statistic(path_from(x), 0.4, 2)
    assert math.log2(r) / 0.4 == pytest.approx(0.5, abs=0.01)


@settings(max_examples=20, deadline=None)
@given(c=st.floats(1e-3, 1e3))
def test_ratio_scale_invariant(c):
    rng = np.random.default_rng(1)
    x = np.concatenate([[0.0], np.cumsum(rng.standard_cauchy(size=300))])
    assert ratio_statistic(path_from(c * x), -0.3, 2) == pytest.approx(ratio_statistic(path_from(x), -0.3, 2), rel=1e-9)
