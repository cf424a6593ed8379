import math

import numpy as np
import pytest
from scipy import special
from scipy.integrate import quad

from conftest import fig1_net, single
from udncov import coverage as cv
from udncov import (Bounded, FixedDistance, GammaGain, MmWave, NetworkModel, StrongestBS,
                    ThreeD, Tier, Unbounded, make_model)
from udncov.errors import (BadParameter, InvalidAssociation, NotApplicable,
                           ParameterSingularity)


def rho(beta, alpha=4.0):
    d = 2 / alpha
    return beta ** d * quad(lambda u: 1 / (1 + u ** (alpha / 2)), beta ** -d, np.inf)[0]


@pytest.mark.parametrize("beta,frozen", [(0.1, 0.9116988583), (1.0, 0.5600991535),
                                         (10.0, 0.2000496103)])
@pytest.mark.parametrize("method", ["parseval", "series"])
def test_closest_rayleigh_interference_limited(beta, frozen, method):
    est = cv.coverage_closest(single(beta=beta), tol=1e-9, method=method)
    assert est.value == pytest.approx(1 / (1 + rho(beta)), abs=1e-8)
    assert est.value == pytest.approx(frozen, abs=1e-9)


def test_closest_rayleigh_with_noise():
    # single-integral oracle over the nearest distance
    lam, s2, a = 0.3, 0.1, 4.0
    r0 = rho(1.0, a)
    ref = quad(lambda r: 2 * math.pi * lam * r * math.exp(-math.pi * lam * r * r * (1 + r0)
                                                         - s2 * r ** a), 0, np.inf)[0]
    assert ref == pytest.approx(0.5268823767373814, abs=1e-12)
    for method in ("parseval", "series"):
        est = cv.coverage_closest(single(noise=s2), tol=1e-8, method=method)
        assert est.value == pytest.approx(ref, abs=1e-7)


@pytest.mark.parametrize("m,frozen", [(2, 0.7617209648), (5, 0.9548034482),
                                      (8, 0.9909096293), (16, 0.9998680531)])
def test_closest_mrt_series(m, frozen):
    t = Tier(0.3, 1.0, 1.0, make_model("gamma", m=1.0), antennas=m, miso_gain=GammaGain(m))
    net = NetworkModel([t], Unbounded(4.0))
    est = cv.coverage_closest(net, tol=1e-9)
    assert est.value == pytest.approx(frozen, abs=1e-9)
    if m <= 8:
        par = cv.coverage_closest(net, tol=1e-8, method="parseval")
        assert abs(par.value - est.value) <= max(par.residual, 1e-7)


@pytest.mark.parametrize("lam,noise,frozen", [
    (0.01, 0.0, 0.4896001900941009), (0.01, 1e-3, 0.2948112405745669),
    (1.0, 0.0, 0.07455291237733469), (1.0, 1e-3, 0.07434106926976182)])
def test_closest_bounded_rayleigh(lam, noise, frozen):
    est = cv.coverage_closest(single(lam=lam, noise=noise, bounded=True), tol=1e-7)
    assert est.value == pytest.approx(frozen, abs=2e-6)


def test_closest_common_scaling_invariance():
    net = fig1_net(noise_w=0.0)
    a = cv.coverage_closest(net, tol=1e-9).value
    b = cv.coverage_closest(net.scale_density(1e3), tol=1e-9).value
    assert abs(a - b) < 1e-12
    assert a == pytest.approx(0.388694, abs=1e-6)


def test_fig1_noise_invariance():
    for bdb in (0.0, 5.0):
        v = [cv.coverage_closest(fig1_net(lam, bdb)).value for lam in (1e-4, 1e-3)]
        assert abs(v[0] - v[1]) / v[1] < 1e-3


def test_dense_limit():
    assert cv.dense_limit(single(noise=0.5)) == pytest.approx(0.5600991535, abs=1e-8)
    assert cv.dense_limit(single(bounded=True), lambda_common=1e3) < 1e-6
    with pytest.raises(BadParameter):
        cv.dense_limit(single(bounded=True))


def test_closest_rejects_wrong_models():
    with pytest.raises(InvalidAssociation):
        cv.coverage_closest(single(assoc=StrongestBS()))
    with pytest.raises(NotApplicable):
        cv.coverage_closest(single(bounded=True), method="series")
    with pytest.raises(BadParameter):
        cv.coverage_closest(single(), method="magic")


def test_one_plus_phi_against_quadrature():
    model = make_model("gamma", m=2.0)
    nu = 0.5
    for xi in (0.3, 2.0):
        # 1 + xi^nu int_{xi^-nu}^inf (1 - E exp(-g u^{-1/nu})) du, g ~ Gamma(2, 1/2)
        lap = lambda u: (1 + u ** (-1 / nu) / 2) ** -2
        ref = 1 + xi ** nu * quad(lambda u: 1 - lap(u), xi ** -nu, np.inf)[0]
        assert float(cv.one_plus_phi(model, nu, xi)) == pytest.approx(ref, rel=1e-9)


def test_strongest_two_over_pi(rayleigh_strongest):
    est = cv.coverage_strongest(rayleigh_strongest)
    assert est.value == pytest.approx(2 / math.pi, abs=1e-12)
    gen = cv.coverage_strongest(rayleigh_strongest, closed_form=False)
    assert gen.value == pytest.approx(est.value, abs=1e-10)


def test_strongest_common_beta_fading_free():
    vals = []
    for m in (1.0, 2.5):
        tiers = [Tier(1e-3, 10.0, 2.0, make_model("gamma", m=m)),
                 Tier(4e-3, 1.0, 2.0, make_model("rice", k=3.0))]
        vals.append(cv.coverage_strongest(NetworkModel(tiers, Unbounded(4.0), 0.0,
                                                       StrongestBS())).value)
    assert vals[0] == pytest.approx(vals[1], abs=1e-12)
    assert vals[0] == pytest.approx(2 / math.pi / 2 ** 0.5, abs=1e-12)


def test_adhoc_rayleigh(rayleigh_adhoc):
    ref = math.exp(-math.pi ** 2 / 20)
    assert ref == pytest.approx(0.6104980252657972, abs=1e-15)
    assert cv.coverage_adhoc(rayleigh_adhoc).value == pytest.approx(ref, abs=1e-10)
    assert cv.adhoc_asymptote(rayleigh_adhoc) == pytest.approx(ref, abs=1e-10)


def test_adhoc_gamma_closed_form():
    # Gamma(2) signal: exp(-Z)(1 + delta Z) with Z = pi r^2 lam Gamma(1-d) L 2^d
    net = single(lam=1e-3, assoc=FixedDistance(10.0), m=2.0)
    Z = math.pi * 100 * 1e-3 * math.gamma(0.5) * math.gamma(2.5) / math.gamma(2) * 2 ** -0.5
    Z *= 2 ** 0.5
    assert cv.coverage_adhoc(net).value == pytest.approx(math.exp(-Z) * (1 + Z / 2), abs=1e-10)


def test_adhoc_large_shape_series():
    t = Tier(1e-3, 1.0, 1.0, make_model("gamma", m=1.0), antennas=100, miso_gain=GammaGain(100))
    big = NetworkModel([t], Unbounded(4.0), 0.0, FixedDistance(10.0))
    t2 = Tier(1e-3, 1.0, 1.0, make_model("gamma", m=1.0), antennas=60, miso_gain=GammaGain(60))
    mid = NetworkModel([t2], Unbounded(4.0), 0.0, FixedDistance(10.0))
    a = cv.coverage_adhoc(big).value
    b = cv.coverage_adhoc(mid).value
    assert 0 < b < a <= 1
    Z = math.pi ** 2 / 20
    assert cv._adhoc_series(Z, 0.5, 1) == pytest.approx(math.exp(-Z), abs=1e-15)
    assert cv._adhoc_series(Z, 0.5, 2) == pytest.approx(math.exp(-Z) * (1 + Z / 2), abs=1e-14)


def test_adhoc_lognormal_wright_kernel():
    # point mass at 1 reduces to the Rayleigh-free stable CDF at the threshold
    d = 0.5
    z = 0.7
    # H^{1,0}_{1,1}[z | (1, d); (0, 1)] at d = 1/2 equals erfc(z/2)
    assert float(cv.foxh.eval(cv.wright_kernel(d), z)) == pytest.approx(
        special.erfc(z / 2), abs=1e-10)


def test_adhoc_asymptote_ratio():
    net = single(assoc=FixedDistance(10.0), m=2.0)
    lam = 0.2
    r = cv.adhoc_asymptote(net, lam) / cv.coverage_adhoc(net.with_density(lam)).value
    assert abs(r - 1) < 0.02
    heavy = single(assoc=FixedDistance(10.0), fading="fisherf", m=2.0, ms=3.0)
    with pytest.raises(NotApplicable):
        cv.adhoc_asymptote(heavy)


def test_adhoc_asymptote_without_constant():
    # Gamma m=2 with kernel argument 5 reduces to 5 exp(-5)
    net = single(lam=1e-3, assoc=FixedDistance(10.0), m=2.0)
    A, _ = cv._adhoc_args(net, 0)
    lam = 5.0 / (A / 1e-3 * 2 ** 0.5)
    val = cv.adhoc_asymptote(net, lam, leading_constant=False)
    assert val == pytest.approx(5 * math.exp(-5), abs=1e-12)
    assert val == pytest.approx(0.0336897, abs=1e-7)


def test_miso_bounded_approx():
    assert cv.miso_bounded_approx(0.1, 3, 1.0, 3.0) == pytest.approx(
        special.gammaincc(3, 2 * math.pi * 0.1 / 2), abs=1e-14)
    assert cv._q(3, 1.2) == pytest.approx(0.8794870988, abs=1e-10)
    assert cv.miso_bounded_approx(0.1, 3, 1.0, 3.0, method="foxh") == pytest.approx(
        cv.miso_bounded_approx(0.1, 3, 1.0, 3.0), abs=1e-9)
    with pytest.raises(BadParameter):
        cv.miso_bounded_approx(1.0, 0, 1.0, 3.0)


@pytest.mark.parametrize("nu,x,ref", [(1.5, 0.7, 0.2910762951), (3.0, 0.7, 0.1660611622),
                                      (-0.5, 0.7, 1.0676189608)])
def test_expn_real(nu, x, ref):
    assert cv.expn_real(nu, x) == pytest.approx(ref, abs=1e-9)


def test_expn_real_singular():
    assert cv.expn_real(3.0, 0.0) == pytest.approx(0.5)
    with pytest.raises(ParameterSingularity):
        cv.expn_real(0.5, 0.0)


def test_mmwave_terms():
    P, J = cv.mmwave_terms(2.5, 4.0, 0.0)
    assert P == pytest.approx(-1 / 6, abs=1e-14)
    assert J == pytest.approx(1.5, abs=1e-12)
    with pytest.raises(ParameterSingularity):
        cv.mmwave_terms(2.0, 4.0, 0.0)


def test_mmwave_and_threed_approx():
    pl = MmWave(2.5, 4.0, 0.1)
    net = NetworkModel([Tier(1.0, 1.0, 1.0, make_model("gamma", m=1.0))], pl)
    c = cv.optimal_scaling("mmwave", alpha_l=2.5, alpha_n=4.0, tau=0.1, d=0.5, beta=1.0)
    lam = 50.0
    lo = cv.mmwave_approx(lam, math.ceil(0.8 * c * lam), net)
    hi = cv.mmwave_approx(lam, math.ceil(1.2 * c * lam), net)
    assert lo < 0.5 < hi
    net3 = NetworkModel([Tier(1.0, 1.0, 1.0, make_model("gamma", m=1.0))], ThreeD(4.0, 0.0))
    assert cv.threed_approx(10.0, 1, net3) == 1.0
    with pytest.raises(InvalidAssociation):
        cv.threed_approx(1.0, 1, net)


def test_scaling_limit_trichotomy():
    T = cv.adhoc_scaling_constant(10.0, 3.0, 1.0, 1.0)
    assert cv.scaling_limit("adhoc", 0.0, T=T, alpha=3.0) == 0.0
    assert cv.scaling_limit("adhoc", math.inf, T=T, alpha=3.0) == 1.0
    mid = cv.scaling_limit("adhoc", 1e5, T=T, alpha=3.0)
    assert 0 < mid < 1
    same = cv.scaling_limit("adhoc", 1e5, r=10.0, beta=1.0, lam_moment=1.0, alpha=3.0)
    assert same == pytest.approx(mid, abs=1e-12)
    z = 2 * math.pi / 2
    assert cv.scaling_limit("cellular", 1.5 * z, alpha=3.0, beta=1.0) == 1.0
    assert cv.scaling_limit("cellular", 0.5 * z, alpha=3.0, beta=1.0) == 0.0
    with pytest.raises(BadParameter):
        cv.scaling_limit("nope", 1.0)


@pytest.mark.parametrize("g,frozen", [(0.5, 0.7923741337304582), (1.5, 0.9068612277639271)])
def test_adhoc_scaling_limit_matches_finite_network(g, frozen):
    # linear scaling N_t = g (lam/lam0)^(1/delta) with Rayleigh interferers
    r, alpha, lam0 = 10.0, 3.0, 4e-4
    d = 2 / alpha
    T = cv.adhoc_scaling_constant(r, alpha, 1.0, math.gamma(1 + d))
    lim = cv.scaling_limit("adhoc", g / lam0 ** (1 / d), T=T, alpha=alpha)
    assert lim == pytest.approx(frozen, abs=1e-9)
    lam = 0.1
    n = math.ceil(g * (lam / lam0) ** (1 / d))
    t = Tier(lam, 1.0, 1.0, make_model("gamma", m=1.0), antennas=n, miso_gain=GammaGain(n))
    val = cv.coverage_adhoc(NetworkModel([t], Unbounded(alpha), 0.0, FixedDistance(r))).value
    assert abs(val - lim) < 1e-4


def test_adhoc_scaling_limit_gain_scale():
    # a serving gain Gamma(N, theta) shrinks the effective threshold by theta
    r, alpha, lam0, th = 10.0, 3.0, 4e-4, 2.0
    d = 2 / alpha
    T = cv.adhoc_scaling_constant(r, alpha, 1.0, math.gamma(1 + d), th)
    lim = cv.scaling_limit("adhoc", 1.0 / lam0 ** (1 / d), T=T, alpha=alpha)
    lam = 0.1
    n = math.ceil((lam / lam0) ** (1 / d))
    t = Tier(lam, 1.0, 1.0, make_model("gamma", m=1.0), antennas=n, miso_gain=GammaGain(n, th))
    val = cv.coverage_adhoc(NetworkModel([t], Unbounded(alpha), 0.0, FixedDistance(r))).value
    assert abs(val - lim) < 1e-3


def test_optimal_scaling_threed():
    assert cv.optimal_scaling("threed", beta=1.0, h=2.0, alpha=4.0) == pytest.approx(4 * math.pi)
    with pytest.raises(BadParameter):
        cv.optimal_scaling("x")
