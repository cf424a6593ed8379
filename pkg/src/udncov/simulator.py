"""Monte Carlo oracle for the coverage engines.

Base stations are drawn as independent PPPs on a disk of radius ``R`` around
the typical user.  The mean interference from outside the disk is added as a
deterministic correction, so ``R`` only has to control fluctuations.
Trials run in chunks with independent seed substreams, which makes results
identical for any number of worker threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import fading as fd
from ._backend import trial_reduce
from .errors import BadParameter, EmptyRealization
from .network import (Bounded, ClosestBS, FixedDistance, MmWave, NetworkModel, StrongestBS,
                      ThreeD, Unbounded)

MIN_POINTS = 500
CHUNK_TRIALS = 10_000
MAX_CHUNK_POINTS = 2_000_000


@dataclass
class Realization:
    """One deployment seen from the origin.

    ``gain`` holds interferer-link draws, ``signal_gain`` serving-link draws
    (for the association rules that need them).  ``los`` and ``beam`` are only
    meaningful for mmWave path loss.
    """

    x: np.ndarray
    y: np.ndarray
    tier: np.ndarray
    gain: np.ndarray
    signal_gain: np.ndarray
    los: np.ndarray
    beam: np.ndarray
    region_radius: float
    link_gain: np.ndarray | None = None

    @property
    def r(self):
        return np.hypot(self.x, self.y)


@dataclass
class McEstimate:
    """Monte Carlo coverage with a 95% normal-approximation interval."""

    value: float
    half_width: float
    trials: int
    seed: int
    diagnostics: dict | None = None


# ---------------------------------------------------------------------------
# geometry helpers


def _path_loss(pl, r, los=None):
    if isinstance(pl, Unbounded):
        with np.errstate(divide="ignore"):
            return r ** (-pl.alpha)
    if isinstance(pl, Bounded):
        return (1.0 + r) ** (-pl.alpha)
    if isinstance(pl, ThreeD):
        with np.errstate(divide="ignore"):
            return (pl.h * pl.h + r * r) ** (-0.5 * pl.alpha)
    if isinstance(pl, MmWave):
        lo = (1.0 + r) ** (-pl.alpha_l)
        if los is None:
            return lo
        return np.where(los, lo, (1.0 + r) ** (-pl.alpha_n))
    raise BadParameter(f"unknown path loss {pl!r}")


def beam_gain(theta, n_t: int, pl: MmWave):
    """Cosine pattern ``G(d theta / lambda_t)``; zero outside the main lobe."""
    x = pl.d * np.asarray(theta) / pl.wavelength
    return np.where(np.abs(x) <= 1.0 / n_t, np.cos(0.5 * math.pi * n_t * x) ** 2, 0.0)


def _mean_beam(n_t, pl):
    f = lambda t: float(beam_gain(t, n_t, pl))
    edge = min(1.0, pl.wavelength / (pl.d * n_t))
    return integrate.quad(f, -edge, edge, limit=200)[0] / 2.0


def _tail_kernel(pl, R):
    """``int_R^inf L(t) 2 pi t dt`` (LOS/NLOS mixture for mmWave)."""
    if isinstance(pl, Unbounded):
        return 2.0 * math.pi * R ** (2.0 - pl.alpha) / (pl.alpha - 2.0)
    if isinstance(pl, ThreeD):
        return 2.0 * math.pi * (pl.h ** 2 + R ** 2) ** (1.0 - 0.5 * pl.alpha) / (pl.alpha - 2.0)
    if isinstance(pl, Bounded):
        a = pl.alpha
        x = 1.0 + R
        return 2.0 * math.pi * (x ** (2.0 - a) / (a - 2.0) - x ** (1.0 - a) / (a - 1.0))
    if isinstance(pl, MmWave):
        f = lambda t: 2 * math.pi * t * (math.exp(-pl.tau * t) * (1 + t) ** (-pl.alpha_l)
                                         + (1 - math.exp(-pl.tau * t)) * (1 + t) ** (-pl.alpha_n))
        return integrate.quad(f, R, np.inf, limit=200)[0]
    raise BadParameter(f"unknown path loss {pl!r}")


def region_radius(net: NetworkModel) -> float:
    """Disk radius holding at least ``MIN_POINTS`` expected BSs (and 10 link distances)."""
    lam = sum(t.density for t in net.tiers)
    R = math.sqrt(MIN_POINTS / (math.pi * lam))
    if isinstance(net.association, FixedDistance):
        R = max(R, 10.0 * net.association.r)
    if isinstance(net.path_loss, ThreeD):
        R = max(R, 10.0 * net.path_loss.h)
    return R


def tail_interference(net: NetworkModel, R: float) -> float:
    """Mean interference from BSs beyond ``R``."""
    out = 0.0
    pl = net.path_loss
    kern = _tail_kernel(pl, R)
    for t in net.tiers:
        m = t.interferer_fading.mean
        if isinstance(pl, MmWave):
            m *= _mean_beam(t.antennas, pl)
        out += t.density * t.power * m * kern
    return out


# ---------------------------------------------------------------------------
# single realizations


def sample_network(net: NetworkModel, rng_seed=None, radius: float | None = None) -> Realization:
    """Draw one deployment on a disk around the origin."""
    rng = np.random.default_rng(rng_seed)
    R = region_radius(net) if radius is None else radius
    xs, ys, ks, gs, ss, ls, bs = [], [], [], [], [], [], []
    pl = net.path_loss
    for k, t in enumerate(net.tiers):
        n = rng.poisson(t.density * math.pi * R * R)
        r = R * np.sqrt(rng.random(n))
        phi = 2.0 * math.pi * rng.random(n)
        xs.append(r * np.cos(phi))
        ys.append(r * np.sin(phi))
        ks.append(np.full(n, k, dtype=np.int64))
        gs.append(fd.sample(t.interferer_fading, rng, n))
        ss.append(fd.sample(t.signal_model, rng, n))
        if isinstance(pl, MmWave):
            ls.append(rng.random(n) < np.exp(-pl.tau * r))
            bs.append(rng.uniform(-1.0, 1.0, n))
        else:
            ls.append(np.ones(n, dtype=bool))
            bs.append(np.zeros(n))
    link = None
    if isinstance(net.association, FixedDistance):
        link = np.array([fd.sample(t.signal_model, rng, 1)[0] for t in net.tiers])
    cat = np.concatenate
    return Realization(cat(xs), cat(ys), cat(ks), cat(gs), cat(ss), cat(ls), cat(bs), R, link)


def compute_sinr(real: Realization, net: NetworkModel, tier: int | None = None) -> float:
    """SINR of the typical user in one realization.

    Under ``FixedDistance`` the dedicated transmitter of ``tier`` (default 0)
    serves the user; every PPP point interferes.  No tail correction is
    applied here.
    """
    pl = net.path_loss
    P = np.array([t.power for t in net.tiers])
    r = real.r
    tr = real.tier
    if isinstance(net.association, FixedDistance):
        k = 0 if tier is None else tier
        inst = P[tr] * _path_loss(pl, r, real.los) * real.gain * _beam(real, net)
        sig = P[k] * _path_loss(pl, np.array(net.association.r)) * real.link_gain[k]
        return float(sig / (inst.sum() + net.noise))
    if r.size == 0:
        raise EmptyRealization("no base station in the region")
    if isinstance(net.association, StrongestBS):
        inst = P[tr] * _path_loss(pl, r, real.los) * real.signal_gain
        tot = inst.sum()
        sinr = inst / (tot - inst + net.noise)
        beta = np.array([t.threshold for t in net.tiers])[tr]
        return float(sinr[np.argmax(sinr / beta)])
    inst = P[tr] * _path_loss(pl, r, real.los) * real.gain * _beam(real, net)
    i = int(np.argmax(P[tr] * _path_loss(pl, r)))
    sig = P[tr[i]] * _path_loss(pl, r[i]) * real.signal_gain[i]
    return float(sig / (inst.sum() - inst[i] + net.noise))


def _beam(real, net):
    if not isinstance(net.path_loss, MmWave):
        return 1.0
    nt = np.array([t.antennas for t in net.tiers])[real.tier]
    out = np.empty(real.tier.size)
    for n in np.unique(nt):
        sel = nt == n
        out[sel] = beam_gain(real.beam[sel], int(n), net.path_loss)
    return out


# ---------------------------------------------------------------------------
# batched estimation


def _chunk(net: NetworkModel, R: float, tail: float, n: int, rng) -> tuple[float, int]:
    """Simulate ``n`` trials; return (sum of coverage indicators, trials)."""
    pl = net.path_loss
    tiers = net.tiers
    K = len(tiers)
    cnt = np.stack([rng.poisson(t.density * math.pi * R * R, n) for t in tiers], axis=1)
    tid, kid, r, g, los, beam = [], [], [], [], [], []
    for k, t in enumerate(tiers):
        m = int(cnt[:, k].sum())
        tid.append(np.repeat(np.arange(n), cnt[:, k]))
        kid.append(np.full(m, k, dtype=np.int64))
        rk = R * np.sqrt(rng.random(m))
        r.append(rk)
        strongest = isinstance(net.association, StrongestBS)
        g.append(fd.sample(t.signal_model if strongest else t.interferer_fading, rng, m))
        if isinstance(pl, MmWave):
            los.append(rng.random(m) < np.exp(-pl.tau * rk))
            beam.append(beam_gain(rng.uniform(-1.0, 1.0, m), t.antennas, pl))
    order = np.argsort(np.concatenate(tid), kind="stable")
    kid = np.concatenate(kid)[order]
    r = np.concatenate(r)[order]
    g = np.concatenate(g)[order]
    counts = cnt.sum(axis=1)
    P = np.array([t.power for t in tiers])
    beta = np.array([t.threshold for t in tiers])
    if isinstance(pl, MmWave):
        los = np.concatenate(los)[order]
        inst = P[kid] * _path_loss(pl, r, los) * g * np.concatenate(beam)[order]
    else:
        inst = P[kid] * _path_loss(pl, r) * g
    floor = tail + net.noise

    assoc = net.association
    if isinstance(assoc, FixedDistance):
        lam = np.array([t.density for t in tiers])
        w = lam / lam.sum()
        total = trial_reduce(counts, inst, inst)[0]
        L = float(_path_loss(pl if not isinstance(pl, MmWave) else pl, np.array(assoc.r)))
        acc = 0.0
        for k, t in enumerate(tiers):
            sig = P[k] * L * fd.sample(t.signal_model, rng, n)
            acc += w[k] * np.count_nonzero(sig > beta[k] * (total + floor))
        return float(acc), n

    if isinstance(assoc, StrongestBS):
        key = inst * (1.0 + beta[kid]) / beta[kid]
        total, i_best, _ = trial_reduce(counts, key, inst)
        ok = i_best >= 0
        return float(np.count_nonzero(key[i_best[ok]] > total[ok] + floor)), n

    avg = P[kid] * _path_loss(pl, r)
    total, i_srv, _ = trial_reduce(counts, avg, inst)
    ok = np.flatnonzero(i_srv >= 0)
    srv = i_srv[ok]
    ks = kid[srv]
    sig = np.empty(srv.size)
    for k, t in enumerate(tiers):
        sel = ks == k
        sig[sel] = avg[srv[sel]] * fd.sample(t.signal_model, rng, int(sel.sum()))
    interf = total[ok] - inst[srv]
    return float(np.count_nonzero(sig > beta[ks] * (interf + floor))), n


def estimate_coverage(net: NetworkModel, trials: int = 200_000, seed: int = 0xC0FFEE,
                      threads: int = 1, radius: float | None = None,
                      tail_correction: bool = True) -> McEstimate:
    """Fraction of independent deployments in coverage.

    Parameters
    ----------
    net : NetworkModel
    trials : int
        At least 1000.
    seed : int
        Master seed; chunk ``i`` uses the substream ``SeedSequence(seed, spawn_key=(i,))``.
    threads : int
        Worker threads.  The estimate does not depend on this value.
    radius : float, optional
        Override of the simulation disk radius.
    tail_correction : bool
        Add the mean interference from beyond the disk.
    """
    if trials < 1000:
        raise BadParameter("trials must be >= 1000")
    R = region_radius(net) if radius is None else radius
    tail = tail_interference(net, R) if tail_correction else 0.0
    pts = sum(t.density for t in net.tiers) * math.pi * R * R
    per = int(max(100, min(CHUNK_TRIALS, MAX_CHUNK_POINTS // max(pts, 1.0))))
    sizes = [per] * (trials // per)
    if trials % per:
        sizes.append(trials % per)

    def run(i):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        return _chunk(net, R, tail, sizes[i], rng)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    hits = math.fsum(p[0] for p in parts)
    p = hits / trials
    hw = 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / trials)
    return McEstimate(p, hw, trials, seed, {"radius": R, "tail": tail, "chunk": per})
