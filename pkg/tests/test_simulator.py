import math

import numpy as np
import pytest

from conftest import single
from udncov import coverage as cv
from udncov import simulator as sim
from udncov import (FixedDistance, MmWave, NetworkModel, StrongestBS, ThreeD, Tier, Unbounded,
                    make_model)
from udncov.errors import BadParameter, EmptyRealization


def test_poisson_point_count():
    net = single(lam=0.05)
    R = 20.0
    counts = [sim.sample_network(net, s, radius=R).x.size for s in range(400)]
    mean = 0.05 * math.pi * R * R
    assert abs(np.mean(counts) - mean) < 4 * math.sqrt(mean / 400)
    assert np.var(counts) == pytest.approx(mean, rel=0.2)


def test_points_uniform_in_disk():
    real = sim.sample_network(single(lam=1.0), 1, radius=30.0)
    r = real.r
    assert r.max() <= 30.0
    # P(r < R/2) = 1/4
    assert np.mean(r < 15.0) == pytest.approx(0.25, abs=0.02)


def test_gamma_gain_mean():
    net = single(lam=1.0, m=2.5)
    real = sim.sample_network(net, 5, radius=40.0)
    assert real.gain.mean() == pytest.approx(1.0, abs=0.02)


def test_compute_sinr_trivial():
    net = single(lam=1.0)
    real = sim.Realization(np.array([1.0, 2.0]), np.array([0.0, 0.0]), np.array([0, 0]),
                           np.array([1.0, 1.0]), np.array([1.0, 1.0]),
                           np.ones(2, bool), np.zeros(2), 5.0)
    assert sim.compute_sinr(real, net) == pytest.approx(16.0)
    empty = sim.Realization(*(np.array([]),) * 3, np.array([]), np.array([]),
                            np.array([], bool), np.array([]), 5.0)
    with pytest.raises(EmptyRealization):
        sim.compute_sinr(empty, net)


def test_compute_sinr_adhoc():
    net = single(lam=1.0, assoc=FixedDistance(2.0))
    real = sim.Realization(np.array([1.0]), np.array([0.0]), np.array([0]), np.array([1.0]),
                           np.array([1.0]), np.ones(1, bool), np.zeros(1), 5.0,
                           link_gain=np.array([1.0]))
    assert sim.compute_sinr(real, net) == pytest.approx(2.0 ** -4)


def test_beam_gain():
    pl = MmWave(2.5, 4.0, 0.1)
    assert float(sim.beam_gain(0.0, 4, pl)) == pytest.approx(1.0)
    # first null at d theta / lambda = 1/N_t
    assert float(sim.beam_gain(2.0 / 4, 4, pl)) == pytest.approx(0.0, abs=1e-15)
    assert float(sim.beam_gain(0.9, 4, pl)) == 0.0


def test_determinism_and_thread_invariance():
    net = single(lam=1e-3)
    a = sim.estimate_coverage(net, 5000, seed=11)
    b = sim.estimate_coverage(net, 5000, seed=11, threads=4)
    c = sim.estimate_coverage(net, 5000, seed=12)
    assert a.value == b.value
    assert a.value != c.value


def test_trials_floor():
    with pytest.raises(BadParameter):
        sim.estimate_coverage(single(), 10)


def test_rayleigh_closest_agrees():
    net = single(lam=1e-3)
    est = sim.estimate_coverage(net, 40_000, seed=3)
    assert abs(est.value - 0.5600991535) < est.half_width * 1.5 + 0.002


def test_tail_correction_reduces_edge_bias():
    # a small disk inflates coverage unless the far interference is added back
    net = single(lam=1e-3)
    R = math.sqrt(30 / (math.pi * 1e-3))
    raw = sim.estimate_coverage(net, 20_000, seed=4, radius=R, tail_correction=False)
    fix = sim.estimate_coverage(net, 20_000, seed=4, radius=R)
    exact = 0.5600991535
    assert raw.value > fix.value
    assert abs(fix.value - exact) < abs(raw.value - exact)


def test_strongest_dominates_closest():
    tiers = [Tier(1e-3, 10.0, 1.0, make_model("gamma", m=1.0)),
             Tier(3e-3, 1.0, 1.0, make_model("gamma", m=2.0))]
    net = NetworkModel(tiers, Unbounded(4.0))
    close = sim.estimate_coverage(net, 20_000, seed=5).value
    strong = sim.estimate_coverage(NetworkModel(tiers, Unbounded(4.0), 0.0, StrongestBS()),
                                   20_000, seed=5).value
    assert strong >= close


def test_adhoc_simulation(rayleigh_adhoc):
    est = sim.estimate_coverage(rayleigh_adhoc, 40_000, seed=6)
    assert abs(est.value - math.exp(-math.pi ** 2 / 20)) < est.half_width * 1.5 + 0.002


def test_threed_and_mmwave_run():
    t = Tier(0.1, 1.0, 1.0, make_model("gamma", m=1.0), antennas=4)
    e3 = sim.estimate_coverage(NetworkModel([t], ThreeD(4.0, 1.0)), 2000, seed=1)
    em = sim.estimate_coverage(NetworkModel([t], MmWave(2.5, 4.0, 0.1)), 2000, seed=1)
    assert 0 <= e3.value <= 1 and 0 <= em.value <= 1
    assert sim.tail_interference(NetworkModel([t], ThreeD(4.0, 1.0)), 10.0) > 0


def test_region_radius():
    net = single(lam=1e-3, assoc=FixedDistance(500.0))
    assert sim.region_radius(net) == 5000.0
    assert sim.region_radius(single(lam=1.0)) == pytest.approx(math.sqrt(500 / math.pi))
