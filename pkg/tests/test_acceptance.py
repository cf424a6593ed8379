"""Acceptance suite: one pass/fail line per criterion.

Each criterion prints ``criterion N: PASS|FAIL <detail>``; the lines are also
collected into the pytest terminal summary.  Run directly with
``python3 tests/test_acceptance.py`` for the lines alone.
"""
import math
import time

import numpy as np
from scipy.integrate import quad

import conftest
from udncov import coverage as cv
from udncov import fading as fd
from udncov.cli import selftest_rows
from udncov.config import load
from udncov.figures import LN_MU, recipe_text
from udncov.simulator import estimate_coverage
from udncov import (FixedDistance, MmWave, NetworkModel, ThreeD, Tier, Unbounded, make_model)

TRIALS = 200_000


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    conftest.ACCEPTANCE.append(line)
    assert ok, line


def test_criterion_1_identities():
    t = time.perf_counter()
    rows = selftest_rows()
    dt = time.perf_counter() - t
    ok = all(r[2] for r in rows) and dt < 10
    errs = ", ".join(f"{n} {e:.1e}" for n, e, _ in rows)
    report(1, ok, f"identity errors [{errs}] in {dt:.1f}s")


def test_criterion_2_strongest_two_over_pi():
    t = time.perf_counter()
    net = conftest.single(lam=1e-3, assoc=cv.StrongestBS())
    a = cv.coverage_strongest(net).value
    mc = estimate_coverage(net, TRIALS)
    dt = time.perf_counter() - t
    ok = abs(a - 2 / math.pi) < 1e-10 and abs(mc.value - a) <= mc.half_width and dt < 60
    report(2, ok, f"analytic {a:.12f}, MC {mc.value:.5f} +/- {mc.half_width:.5f}, {dt:.1f}s")


def test_criterion_3_adhoc_closed_form():
    net = conftest.single(lam=1e-3, assoc=FixedDistance(10.0))
    a = cv.coverage_adhoc(net).value
    target = math.exp(-0.49348)
    asym = cv.adhoc_asymptote(net)
    mc = estimate_coverage(net, TRIALS)
    ok = (abs(a - target) < 1e-6 and abs(asym - a) < 1e-8
          and abs(mc.value - a) <= mc.half_width)
    report(3, ok, f"analytic {a:.7f} vs exp(-0.49348) {target:.7f}, asymptote diff "
                  f"{abs(asym - a):.1e}, MC {mc.value:.5f} +/- {mc.half_width:.5f}")


def test_criterion_4_closest_vs_simulation():
    t = time.perf_counter()
    base = load(recipe_text(1)).net
    worst = 0.0
    for bdb in (0.0, 5.0):
        for lam in (1e-5, 1e-4, 1e-3):
            net = base.with_density(lam).with_threshold(10 ** (bdb / 10))
            a = cv.coverage_closest(net).value
            mc = estimate_coverage(net, TRIALS)
            worst = max(worst, abs(a - mc.value))
    dt = time.perf_counter() - t
    report(4, worst < 0.02 and dt < 600, f"max |analytic - MC| = {100 * worst:.2f} pp "
                                         f"over 6 points, {dt:.0f}s")


def test_criterion_5_invariance():
    base = load(recipe_text(1)).net
    quiet = NetworkModel(base.tiers, base.path_loss, 0.0)
    a = cv.coverage_closest(quiet, tol=1e-9).value
    b = cv.coverage_closest(quiet.scale_density(1e3), tol=1e-9).value
    e9 = abs(a - b)
    d1, d2 = cv.dense_limit(base), cv.dense_limit(base.scale_density(100.0))
    e15 = abs(d1 - d2)
    e1 = 0.0
    for lam in (1e-5, 1e-4):
        lo = cv.coverage_closest(quiet.with_density(lam)).value
        hi = cv.coverage_closest(quiet.with_density(10 * lam)).value
        e1 = max(e1, abs(lo - hi) / hi)
    ok = e9 < 1e-12 and e15 < 1e-12 and e1 < 1e-3
    report(5, ok, f"common scaling {e9:.1e}, dense limit {e15:.1e}, lambda vs 10 lambda {e1:.1e}")


def _monotone_to(vals, target):
    inc = all(b >= a for a, b in zip(vals, vals[1:]))
    dec = all(b <= a for a, b in zip(vals, vals[1:]))
    if target == 1:
        return inc and vals[-1] > 0.999
    return dec and vals[-1] < 1e-3


def test_criterion_6_scaling_trichotomy():
    lams = (1e2, 1e3, 1e4)
    res = {}
    z = 2 * math.pi / ((3 - 1) * (3 - 2))       # cellular threshold for alpha=3, beta=1
    for f, tgt in ((1.5, 1), (0.5, 0)):
        v = [cv.miso_bounded_approx(l, math.ceil(f * z * l), 1.0, 3.0) for l in lams]
        res[f"cellular x{f}"] = _monotone_to(v, tgt)
    mm = NetworkModel([Tier(1.0, 1.0, 1.0, make_model("gamma", m=1.0))], MmWave(2.5, 4.0, 0.1))
    rho = cv.optimal_scaling("mmwave", alpha_l=2.5, alpha_n=4.0, tau=0.1, d=0.5, beta=1.0)
    th = NetworkModel([Tier(1.0, 1.0, 1.0, make_model("gamma", m=1.0))], ThreeD(4.0, 1.0))
    z3 = cv.optimal_scaling("threed", beta=1.0, h=1.0, alpha=4.0)
    for f, tgt in ((1.1, 1), (0.9, 0)):
        v = [cv.mmwave_approx(l, math.ceil(f * rho * l), mm) for l in lams]
        res[f"mmwave x{f}"] = _monotone_to(v, tgt)
        v = [cv.threed_approx(l, math.ceil(f * z3 * l), th) for l in lams]
        res[f"3d x{f}"] = _monotone_to(v, tgt)
    ok = abs(z - math.pi) < 1e-15 and all(res.values())
    report(6, ok, ", ".join(f"{k} {'ok' if v else 'bad'}" for k, v in res.items()))


def test_criterion_7_densification_trends():
    spec = load(recipe_text(2))
    bounded = spec.net
    vals, res = [], []
    for lam in np.logspace(-4, 2, 13):
        e = cv.coverage_closest(bounded.with_density(lam), tol=1e-9)
        vals.append(e.value)
        res.append(e.residual)
    peak = int(np.argmax(vals))
    resolved = [i for i in range(peak, len(vals)) if vals[i] > 10 * res[i]]
    dec = all(vals[j] < vals[i] for i, j in zip(resolved, resolved[1:]))
    tail_zero = all(vals[i] <= 10 * res[i] for i in range(resolved[-1] + 1, len(vals)))
    ok_b = dec and tail_zero and len(resolved) >= 3
    unb = load(recipe_text(2), overrides=["network.path_loss=unbounded"]).net
    u = cv.coverage_closest(unb.with_density(1e3)).value
    lim = cv.dense_limit(unb)
    ok_u = abs(u - lim) / lim < 0.01
    ratios, ok_a = [], True
    for spec_ in ("gamma(m=2)", "gengamma(m=1, eta=2)"):
        net = NetworkModel([Tier(1e-4, 1.0, 1.0, fd.parse_fading(spec_))], Unbounded(4.0),
                           0.0, FixedDistance(10.0))
        grid = np.logspace(-4, -0.5, 8)
        a = [cv.coverage_adhoc(net.with_density(l)).value for l in grid]
        r = cv.adhoc_asymptote(net, grid[-1]) / a[-1]
        ratios.append(r)
        ok_a &= all(y < x for x, y in zip(a, a[1:])) and abs(r - 1) < 0.05
    report(7, ok_b and ok_u and ok_a,
           f"bounded decreasing from lambda={np.logspace(-4, 2, 13)[peak]:.0e} "
           f"({'ok' if ok_b else 'bad'}), unbounded {u:.5f} vs limit {lim:.5f}, "
           f"ad hoc asymptote ratios {', '.join(f'{r:.3f}' for r in ratios)}")


CATALOG = {
    "nakagami": make_model("gamma", m=2.5),
    "weibull": make_model("gengamma", m=1.0, eta=2.0),
    "rice": make_model("rice", k=3.0),
    "lognormal": make_model("lognormal", mu=LN_MU, sigma=0.5),
    "fisherf": make_model("fisherf", m=2.0, ms=3.0),
}


def test_criterion_8_cross_consistency():
    worst, norm_err, mean_err = 0.0, 0.0, 0.0
    for name, m in CATALOG.items():
        for d in (0.5, 2 / 3, 0.8):
            g, c = fd.lambda_moment(m, d), fd.closed_form_lambda(m, d)
            worst = max(worst, abs(g - c) / c)
        if m.atoms:
            f = lambda y: float(fd.pdf(m, 10 ** y)) * 10 ** y * math.log(10)
            tot = quad(f, -6, 6, limit=200)[0]
            mean = math.exp(LN_MU * math.log(10) + 0.5 * (0.5 * math.log(10)) ** 2)
        else:
            f = lambda x: float(fd.pdf(m, x))
            tot = sum(quad(f, a, b, limit=200)[0] for a, b in ((0, 1), (1, 10), (10, np.inf)))
            mean = 1.5 if name == "fisherf" else 1.0
        norm_err = max(norm_err, abs(tot - 1))
        mean_err = max(mean_err, abs(m.mean - mean) / mean)
    ok = worst < 1e-8 and norm_err < 1e-7 and mean_err < 1e-5
    report(8, ok, f"generic vs closed moment {worst:.1e}, pdf mass {norm_err:.1e}, "
                  f"mean {mean_err:.1e}")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn()
            except AssertionError:
                pass
