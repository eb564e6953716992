import math

import numpy as np
import pytest

from lfsm import (
    DomainError,
    Frequency,
    IncrementSpec,
    LfsmParams,
    ResourceError,
    SamplePath,
    SeedSpec,
    SimConfig,
    kernel_cell_weights,
    phi_theoretical,
    read_path_csv,
    simulate_high,
    simulate_low,
    to_high,
    truncation_tail_fraction,
    write_path_csv,
)
from lfsm.kernel import h_norm_alpha
from lfsm.statistics import _diff

P_CONT = LfsmParams(0.3, 1.8, 0.8)
P_DISC = LfsmParams(0.3, 0.8, 0.8)
FAST = SimConfig(mesh_m=32, truncation_M=100, seed=SeedSpec(1, 0))


def test_path_basics():
    path = simulate_low(P_CONT, 500, FAST)
    assert path.n == 500 and path.values[0] == 0.0
    assert path.frequency is Frequency.LOW
    assert not path.values.flags.writeable
    assert np.all(np.isfinite(path.values))


def test_determinism_and_streams():
    a = simulate_low(P_CONT, 300, FAST)
    b = simulate_low(P_CONT, 300, FAST)
    c = simulate_low(P_CONT, 300, SimConfig(mesh_m=32, truncation_M=100, seed=SeedSpec(1, 1)))
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_high_is_rescaled_low():
    low = simulate_low(P_CONT, 400, FAST)
    high = simulate_high(P_CONT, 400, FAST)
    assert high.frequency is Frequency.HIGH
    assert np.allclose(high.values, low.values * 400.0**-0.8, rtol=0, atol=0)
    with pytest.raises(DomainError):
        to_high(high, 0.8)


@pytest.mark.parametrize("P", [P_CONT, P_DISC])
@pytest.mark.parametrize("k", [2, 3])
def test_discrete_increment_scale_is_exact(P, k):
    # the weights of the k-th increment are the k-fold differences of the cell
    # weights; their alpha-sum must reproduce ||h_{k,1}||^alpha closely
    m, M = 256, 600
    c = kernel_cell_weights(P, m, M)
    d = np.zeros(c.size + (k - 1) * m)
    for j in range(k):
        d[j * m:j * m + c.size] += (-1) ** j * math.comb(k - 1, j) * c
    disc = np.sum(np.abs(d) ** P.alpha)
    exact = h_norm_alpha(IncrementSpec(k), P) ** P.alpha
    assert disc == pytest.approx(exact, rel=1e-3)


def test_truncation_tail_fraction():
    f_cont = truncation_tail_fraction(P_CONT, 256, 600)
    f_disc = truncation_tail_fraction(P_DISC, 256, 600)
    assert 0.0 < f_cont < 0.05
    assert 0.1 < f_disc < 0.3
    assert truncation_tail_fraction(P_CONT, 256, 2000) < f_cont


def test_ecf_of_second_increments():
    n = 50_000
    path = simulate_low(P_CONT, n, SimConfig(seed=SeedSpec(8, 0)))
    d = _diff(path.values, 2, 1)
    for t in (1.0, 2.0):
        assert abs(np.mean(np.cos(t * d)) - phi_theoretical(t, IncrementSpec(2), P_CONT)) <= 3 / math.sqrt(n) + 0.01


def test_resource_cap():
    with pytest.raises(ResourceError):
        simulate_low(P_CONT, 10_000, SimConfig(max_noise=1000))


def test_config_validation():
    with pytest.raises(DomainError):
        SimConfig(mesh_m=4)
    with pytest.raises(DomainError):
        SimConfig(truncation_M=10)
    with pytest.raises(DomainError):
        simulate_low(P_CONT, 1, FAST)


def test_csv_round_trip(tmp_path):
    path = simulate_low(P_DISC, 200, FAST)
    f = write_path_csv(path, tmp_path / "p.csv")
    lines = f.read_text().splitlines()
    assert lines[0] == "index,value" and len(lines) == 202
    back = read_path_csv(f, "low")
    assert np.array_equal(back.values, path.values)


def test_csv_shifts_and_validates(tmp_path):
    f = tmp_path / "q.csv"
    f.write_text("index,value\n0,5.0\n1,6.0\n2,4.5\n")
    p = read_path_csv(f, Frequency.HIGH)
    assert p.values.tolist() == [0.0, 1.0, -0.5]
    f.write_text("index,value\n0,5.0\n2,6.0\n")
    with pytest.raises(DomainError):
        read_path_csv(f, "low")


def test_sample_path_validation():
    with pytest.raises(DomainError):
        SamplePath(np.array([1.0, 2.0]), "low")
    with pytest.raises(DomainError):
        SamplePath(np.array([0.0]), "low")
