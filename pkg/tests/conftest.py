import pytest

from udncov import (Bounded, ClosestBS, FixedDistance, NetworkModel, StrongestBS, Tier,
                    Unbounded, make_model)


def single(lam=0.3, beta=1.0, alpha=4.0, noise=0.0, fading="gamma", assoc=None,
           bounded=False, **fkw):
    fk = fkw or {"m": 1.0}
    t = Tier(lam, 1.0, beta, make_model(fading, **fk))
    pl = Bounded(alpha) if bounded else Unbounded(alpha)
    return NetworkModel([t], pl, noise, assoc or ClosestBS())


def fig1_net(lam=1e-4, beta_db=0.0, noise_w=1e-10):
    b = 10 ** (beta_db / 10)
    tiers = [Tier(lam, 50.0, b, make_model("gamma", m=1.5)),
             Tier(lam, 1.0, b, make_model("gamma", m=2.5))]
    return NetworkModel(tiers, Unbounded(3.0), noise_w, ClosestBS())


@pytest.fixture
def rayleigh_adhoc():
    return single(lam=1e-3, assoc=FixedDistance(10.0))


@pytest.fixture
def rayleigh_strongest():
    return single(lam=1e-3, assoc=StrongestBS())


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
