"""Analytic coverage engines.

Closest-BS coverage is computed as a Mellin-Parseval pairing of the serving
gain with the association-weighted Laplace functional of the normalized
interference-plus-noise,

    C_k = (1/2 pi i) int beta^{-s} E[g^s] / Gamma(1+s) * M[G_k](s) ds,
    G_k(xi) = E[exp(-xi X_k); tier k serves],

where ``X_k = L(r)^{-1} (I + sigma^2) / P_k``.  ``G_k`` is built from Fox H
interference kernels; both the contour integral and the Mellin transform of
``G_k`` are discretized with trapezoidal rules whose errors are estimated by
step halving.
"""
from __future__ import annotations

import math
from dataclasses import replace
from functools import lru_cache

import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from . import fading as fd
from . import foxh
from ._backend import loggamma
from .errors import (BadParameter, DeltaOutOfRange, InvalidAssociation, NotApplicable,
                     ParameterSingularity, QuadratureFailure)
from .fading import FadingModel
from .foxh import FoxHParams
from .network import (Bounded, ClosestBS, CoverageEstimate, FixedDistance, MmWave,
                      NetworkModel, StrongestBS, ThreeD, Unbounded)

_LATTICE = 1.0 / 32.0      # step of the log-argument lattice of interference tables


# ---------------------------------------------------------------------------
# interference kernels


def interference_dual(term: FoxHParams, nu: float) -> FoxHParams:
    """Kernel ``Hd`` whose Mellin transform is ``Gamma(s) Gamma(s+nu)/Gamma(1+s+nu) Theta(1-s)``."""
    u, v = term.u, term.v
    lower = [(0.0, 1.0), (nu, 1.0)]
    lower += [(1.0 - a - A, A) for a, A in term.upper]
    upper = [(1.0 - b - B, B) for b, B in term.lower[:u]]
    upper += [(1.0 + nu, 1.0)]
    upper += [(1.0 - b - B, B) for b, B in term.lower[u:]]
    return FoxHParams(2 + v, u, upper, lower)


def _one_plus_psi(theta, nu):
    # 1 + theta^nu gamma(1-nu, theta) - (1 - e^-theta), lower incomplete gamma
    theta = np.asarray(theta, dtype=float)
    with np.errstate(over="ignore"):
        return (np.exp(nu * np.log(theta) + special.gammaln(1 - nu))
                * special.gammainc(1 - nu, theta) + np.exp(-theta))


def one_plus_phi(model: FadingModel, nu: float, xi, tol: float = 1e-11):
    """``1 + E_g[psi_nu(xi g)]`` with ``psi_nu(t) = t^nu gamma(1-nu, t) - (1 - e^-t)``.

    For ``nu = delta`` this is ``1 + 2 int_1^inf (1 - E exp(-xi g y^-alpha)) y dy``,
    the interference exponent of a PPP outside a guard disk.
    """
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape)
    lam = 0.0
    for w, t in model.terms:
        hd = interference_dual(t, nu)
        out += w * nu * (t.kappa / t.c) * foxh.eval(hd, xi / t.c, tol)
        lam += w * foxh.mellin_moment(t, nu)
    if model.terms:
        with np.errstate(over="ignore"):
            out += math.gamma(1.0 - nu) * lam * xi ** nu
    for w, loc in model.atoms:
        out += w * _one_plus_psi(xi * loc, nu)
    return out


class PhiTable:
    """Cached ``1 + Phi_nu`` on the lattice ``u = k/32`` of ``log xi``.

    Tables grow on demand and are shared between networks that use the same
    interferer model, which makes parameter sweeps cheap.
    """

    def __init__(self, model: FadingModel, nu: float, tol: float = 1e-11):
        self.model = model
        self.nu = nu
        self.tol = tol
        self.k0 = 0
        self.vals = np.zeros(0)
        self._spline = None

    def ensure(self, k_lo: int, k_hi: int):
        if self.vals.size == 0:
            ks = np.arange(k_lo, k_hi + 1)
            self.vals = one_plus_phi(self.model, self.nu, np.exp(ks * _LATTICE), self.tol)
            self.k0 = k_lo
            self._spline = None
            return
        k1 = self.k0 + self.vals.size - 1
        if k_lo < self.k0:
            ks = np.arange(k_lo, self.k0)
            new = one_plus_phi(self.model, self.nu, np.exp(ks * _LATTICE), self.tol)
            self.vals = np.concatenate((new, self.vals))
            self.k0 = k_lo
            self._spline = None
        if k_hi > k1:
            ks = np.arange(k1 + 1, k_hi + 1)
            new = one_plus_phi(self.model, self.nu, np.exp(ks * _LATTICE), self.tol)
            self.vals = np.concatenate((self.vals, new))
            self._spline = None

    def lattice(self, k_lo: int, k_hi: int, step: int = 1):
        self.ensure(k_lo, k_hi)
        return self.vals[k_lo - self.k0:k_hi - self.k0 + 1:step]

    def phi(self, u):
        """``Phi_nu(e^u)`` by cubic interpolation of ``log Phi`` (``u`` inside the table)."""
        if self._spline is None:
            ks = (self.k0 + np.arange(self.vals.size)) * _LATTICE
            ph = np.maximum(self.vals - 1.0, 1e-300)
            self._spline = CubicSpline(ks, np.log(ph))
        return np.exp(self._spline(u))


@lru_cache(maxsize=64)
def phi_table(model: FadingModel, nu: float) -> PhiTable:
    return PhiTable(model, nu)


# ---------------------------------------------------------------------------
# signal side


def _log_phi_sig(model: FadingModel, beta: float, s):
    return -s * math.log(beta) + fd.log_moment(model, s) - loggamma(1.0 + s)


def _log_moment_bound(model: FadingModel, c: float, t):
    """``log |E[g^s]/s|`` along ``s = c + i t``; bounds the Parseval integrand."""
    s = c + 1j * np.asarray(t)
    return (fd.log_moment(model, s)).real - np.log(np.abs(s))


def _contour_length(signal: FadingModel, beta: float, delta: float, tol: float,
                    log_mg: float = 0.0):
    """Truncation point ``T`` of the Parseval contour and the log tail bound.

    ``|M[G](s)| <= |Gamma(s)| E[X^-c]`` turns the integrand into the bound
    ``|E g^s / s| beta^-c E[X^-c]``; ``log_mg`` is ``log E[X^-c]``.
    """
    c = 0.5 * delta
    dt = 0.125
    tt = np.arange(1, 4801) * dt
    lb = (_log_moment_bound(signal, c, tt) - c * math.log(beta) + log_mg
          + math.log(dt / math.pi))
    thr = math.log(tol) - 3.0
    above = np.flatnonzero(lb > thr)
    if above.size and above[-1] == tt.size - 1:
        raise NotApplicable("serving-gain Mellin transform does not decay; "
                            "the closest-BS engine needs a Fox H serving gain")
    T = max(tt[above[-1] + 1] if above.size else tt[0], 4.0)
    return T, tt, lb


def _parseval(signal: FadingModel, beta: float, u, G, delta: float, tol: float,
              g_rel: float = 1e-11):
    """Pair the signal CCDF with ``G(e^u)`` on a uniform ``u`` grid.

    ``g_rel`` is the relative accuracy of ``G``; like roundoff it is amplified
    by the growth of the signal transform along the contour.  Returns the
    coverage, a residual estimate and diagnostics.
    """
    c = 0.5 * delta
    hu = u[1] - u[0]
    Gc = G * np.exp(c * u)
    mg_c = hu * np.sum(Gc)                     # M[G](c) = Gamma(c) E[X^-c]
    if mg_c <= 0:
        return 0.0, 0.0, {"t_max": 0.0, "t_nodes": 0}
    T, tt, lb = _contour_length(signal, beta, delta, tol, math.log(mg_c) - math.lgamma(c))
    if 2.0 * math.pi / hu < T + 20.0:
        raise QuadratureFailure("u grid too coarse for the contour length")
    # aliasing of the t rule decays like exp(-2 pi c / h_t)
    ht = 2.0 * math.pi * c / (math.log(1.0 / tol) + 4.0)
    nt = 2 * int(math.ceil(T / ht / 2))
    ht = T / nt
    t = np.arange(nt + 1) * ht
    wt = np.full(t.size, ht / math.pi)
    wt[0] *= 0.5
    ph = np.exp(_log_phi_sig(signal, beta, c + 1j * t))
    val_t = np.empty(t.size)
    blk = max(1, (1 << 22) // u.size)
    for i0 in range(0, t.size, blk):
        tu = np.outer(t[i0:i0 + blk], u)
        re = np.cos(tu) @ Gc
        im = np.sin(tu) @ Gc
        val_t[i0:i0 + blk] = hu * (ph[i0:i0 + blk].real * re - ph[i0:i0 + blk].imag * im)
    C = float(np.sum(wt * val_t))
    w2 = np.full(t[::2].size, 2 * ht / math.pi)
    w2[0] *= 0.5
    d_t = abs(C - float(np.sum(w2 * val_t[::2])))
    # halving doubles the exponent: fine error ~ d_t exp(-pi c / h_t)
    e_t = d_t * math.exp(-math.pi * c / ht)
    tail = float(np.sum(np.exp(lb[tt > T])))
    alias_u = float(np.sum(np.exp(lb[tt > 2 * math.pi / hu - T]))) if 2 * math.pi / hu - T < tt[-1] else 0.0
    eps = max(np.finfo(float).eps * math.sqrt(u.size), g_rel)
    e_round = 4 * eps * mg_c * float(np.sum(wt * np.abs(ph)))
    resid = e_t + tail + alias_u + e_round
    return C, resid, {"t_max": float(T), "t_nodes": int(t.size), "roundoff": e_round,
                      "truncation": tail}


# ---------------------------------------------------------------------------
# closest-BS association


def _u_grid(delta, tol, u_center, u_hi_cap=None, t_len=60.0):
    c = 0.5 * delta
    L = (math.log(1.0 / tol) + 6.0) / min(c, delta - c)
    lo = u_center[0] - L
    hi = u_center[1] + L
    if u_hi_cap is not None:
        hi = min(hi, u_hi_cap)
    hu = 2.0 * math.pi / (t_len + 40.0)
    step = max(1, int(hu / _LATTICE))
    k_lo = int(math.floor(lo / _LATTICE / step)) * step
    k_hi = int(math.ceil(hi / _LATTICE / step)) * step
    return k_lo, k_hi, step


def _check_delta(net):
    d = net.delta
    if not 0 < d < 1:
        raise DeltaOutOfRange("need alpha > 2")
    return d


def _ptilde(net, k):
    pk = net.tiers[k].power
    return np.array([t.power / pk for t in net.tiers])


def _unbounded_G(net, k, ks, step, delta, tol):
    tier = net.tiers[k]
    xi = np.exp(np.arange(ks[0], ks[1] + 1, step) * _LATTICE)
    b = np.zeros(xi.size)
    for j, tj in enumerate(net.tiers):
        tab = phi_table(tj.interferer_fading, delta)
        b += math.pi * tj.density * (tj.power / tier.power) ** delta * tab.lattice(ks[0], ks[1], step)
    if net.noise == 0:
        return math.pi * tier.density / b
    a = xi * net.noise / tier.power
    x = b * a ** (-delta)
    H = foxh.eval(foxh.power_kernel(delta), x, min(1e-9, tol))
    return math.pi * tier.density * delta * a ** (-delta) * H


# integer-shape Gamma serving gains: Taylor route
#
# With g ~ Gamma(m, theta) and integer m,
#     P(g > beta X) = sum_{n<m} coefficients of h^n in E[exp(-xi0 (1-h) X)],
# xi0 = beta / theta.  Expanding the interference exponent in h gives
# coefficients of one sign, so the reciprocal / exponential recursions are
# free of cancellation for any m.


@lru_cache(maxsize=32)
def _log_grid_pdf(model: FadingModel):
    """Nodes ``g = e^y`` and trapezoid weights ``g pdf(g) dy`` for expectations."""
    if not model.terms:
        return np.zeros(0), np.zeros(0)
    dy = 1.0 / 32.0
    y = np.arange(-60.0, 14.0 + dy, dy)
    g = np.exp(y)
    f = fd.pdf(model, g)
    f = np.where(np.isfinite(f), f, 0.0)
    return g, g * f * dy


def series_coefficients(model: FadingModel, nu: float, x: float, n_max: int) -> np.ndarray:
    """``a_n = (-x)^n / n! * d^n/dx^n [1 + Phi_nu(x)]`` for ``n = 0..n_max``.

    ``a_0 = 1 + Phi_nu(x)`` and ``a_n = -nu/n! E[(x g)^nu gamma(n - nu, x g)]``
    (lower incomplete gamma) for ``n >= 1``.
    """
    out = np.empty(n_max + 1)
    out[0] = float(one_plus_phi(model, nu, np.array([x]))[0])
    if n_max == 0:
        return out
    n = np.arange(1, n_max + 1)[:, None]
    lnorm = special.gammaln(n - nu) - special.gammaln(n + 1.0)

    def expect(g, w):
        y = x * g[None, :]
        with np.errstate(divide="ignore", under="ignore"):
            vals = np.exp(nu * np.log(y) + lnorm) * special.gammainc(n - nu, y)
        return vals @ w

    acc = np.zeros(n_max)
    if model.terms:
        g, w = _log_grid_pdf(model)
        acc += expect(g, w)
    if model.atoms:
        locs = np.array([loc for _, loc in model.atoms])
        ws = np.array([w for w, _ in model.atoms])
        acc += expect(locs, ws)
    out[1:] = -nu * acc
    return out


def _integer_gamma_shape(model: FadingModel):
    """``(m, theta)`` when the model is a Gamma law with integer shape, else None."""
    if model.kind not in ("gamma", "gammagain"):
        return None
    m = model.p["m"]
    if m != int(m) or m < 1:
        return None
    theta = model.p.get("theta", 1.0 / m) if model.kind == "gammagain" else 1.0 / m
    return int(m), theta


def _exp_series(p: np.ndarray) -> np.ndarray:
    """Taylor coefficients of ``exp(P(h))`` with ``P(0) = 0`` (``p[0]`` ignored); rows are batched."""
    n = p.shape[-1]
    e = np.zeros_like(p)
    e[..., 0] = 1.0
    k = np.arange(1, n)
    for i in range(1, n):
        e[..., i] = np.sum(k[:i] * p[..., 1:i + 1] * e[..., i - 1::-1][..., :i], axis=-1) / i
    return e


def _closest_series(net: NetworkModel, k: int, m: int, theta: float, tol: float):
    tier = net.tiers[k]
    delta = net.delta
    xi0 = tier.threshold / theta
    B = np.zeros(m)
    for tj in net.tiers:
        B += (math.pi * tj.density * (tj.power / tier.power) ** delta
              * series_coefficients(tj.interferer_fading, delta, xi0, m - 1))
    if net.noise == 0:
        R = np.zeros(m)
        R[0] = 1.0 / B[0]
        for i in range(1, m):
            R[i] = -np.dot(B[1:i + 1], R[i - 1::-1][:i]) / B[0]
        val = math.pi * tier.density * float(np.sum(R))
        return val, 1e-11 * m * val, {"route": "series", "terms": m}
    # G = pi lam int exp(-xi s v^(1/delta) - v b(xi)) dv, v = e^y
    s = net.noise / tier.power
    v_pk = min(1.0 / B[0], (xi0 * s) ** (-delta))
    y_lo = math.log(v_pk) - (math.log(1.0 / tol) + 10.0)
    y_hi = math.log((m + 45.0 + 6.0 * math.sqrt(m)) / B[0])

    def integrate(dy):
        y = np.arange(y_lo, y_hi + dy, dy)
        v = np.exp(y)
        a = xi0 * s * v ** (1.0 / delta)
        p = np.zeros((v.size, max(m, 2)))
        p[:, :m] = -v[:, None] * B[None, :]
        p[:, 1] += a
        e = _exp_series(p)[:, :m]
        with np.errstate(under="ignore"):
            w = np.exp(y - a - v * B[0]) * dy
        return math.pi * tier.density * float(w @ e.sum(axis=1))

    fine = integrate(1.0 / 64.0)
    coarse = integrate(1.0 / 32.0)
    err = abs(fine - coarse) ** 2 / max(abs(fine), 1e-300) + 1e-11 * m
    return fine, err, {
        "route": "series", "terms": m}


def _radial_nodes(net, k, n_gl=48, pieces=24):
    """Gauss-Legendre nodes in the serving distance with the association density."""
    alpha = net.alpha
    pt = _ptilde(net, k)
    lam = np.array([t.density for t in net.tiers])
    D = lambda r: pt[:, None] ** (1.0 / alpha) * (1.0 + np.atleast_1d(r))[None, :]

    def expo(r):
        rho = np.maximum(0.0, D(r) - 1.0)
        return np.sum(math.pi * lam[:, None] * rho ** 2, axis=0)

    if expo(0.0)[0] >= 45.0:        # tier k essentially never serves
        return np.zeros(0), np.zeros(0), np.zeros((len(pt), 0))
    rmax = 1.0
    while expo(rmax)[0] < 45.0:
        rmax *= 2.0
    rmax = brentq(lambda r: expo(r)[0] - 45.0, 0.0, rmax)
    kinks = [pt[j] ** (-1.0 / alpha) - 1.0 for j in range(len(pt))]
    brk = sorted({0.0, rmax} | {x for x in kinks if 0 < x < rmax})
    edges = []
    for a, b in zip(brk[:-1], brk[1:]):
        edges.extend(np.linspace(a, b, max(2, int(pieces * (b - a) / rmax) + 2))[:-1])
    edges.append(rmax)
    x, w = np.polynomial.legendre.leggauss(n_gl)
    rs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        rs.append(0.5 * (b - a) * x + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * w)
    r = np.concatenate(rs)
    wr = np.concatenate(ws)
    f = 2.0 * math.pi * lam[k] * r * np.exp(-expo(r))
    return r, wr * f, D(r)


def _bounded_G(net, k, ks, step, delta, tol, diag):
    tier = net.tiers[k]
    alpha = net.alpha
    u = np.arange(ks[0], ks[1] + 1, step) * _LATTICE
    xi = np.exp(u)
    r, w, D = _radial_nodes(net, k)
    if r.size == 0:
        return np.zeros(xi.size)
    expo = np.zeros((xi.size, r.size))
    if net.noise > 0:
        expo -= xi[:, None] * (net.noise / tier.power) * (1.0 + r[None, :]) ** alpha
    viol = 0
    for j, tj in enumerate(net.tiers):
        Dj = D[j]
        v0 = np.maximum(1.0, 1.0 / Dj)
        shift = alpha * np.log(v0)                  # Phi argument xi v0^-alpha
        k_lo = ks[0] - int(math.ceil(shift.max() / _LATTICE)) - 2
        t1 = phi_table(tj.interferer_fading, delta)
        t2 = phi_table(tj.interferer_fading, 0.5 * delta)
        t1.ensure(k_lo, ks[1])
        t2.ensure(k_lo, ks[1])
        same = shift == 0
        S = np.empty((xi.size, r.size))
        if np.any(same):
            p1 = t1.lattice(ks[0], ks[1], step) - 1.0
            p2 = t2.lattice(ks[0], ks[1], step) - 1.0
            dd = Dj[same]
            S[:, same] = dd[None, :] ** 2 * p1[:, None] - 2.0 * dd[None, :] * p2[:, None]
        if np.any(~same):
            uu = u[:, None] - shift[None, ~same]
            dv = (Dj * v0)[~same]
            S[:, ~same] = dv[None, :] ** 2 * t1.phi(uu) - 2.0 * dv[None, :] * t2.phi(uu)
        scale = np.maximum(1.0, (Dj * v0) ** 2)[None, :]
        viol += int(np.sum(S < -1e-7 * scale))
        expo -= math.pi * tj.density * np.maximum(S, 0.0)
    diag["positivity_violations"] = diag.get("positivity_violations", 0) + viol
    return np.exp(expo) @ w


def coverage_closest(net: NetworkModel, tol: float = 1e-6,
                     method: str = "auto") -> CoverageEstimate:
    """Coverage under closest-BS (max average power) association.

    Parameters
    ----------
    net : NetworkModel
        ``Unbounded`` or ``Bounded`` path loss and ``ClosestBS`` association.
    tol : float
        Accuracy target of the nested quadratures.
    method : {"auto", "parseval", "series"}
        ``series`` needs integer-shape Gamma serving gains and unbounded path
        loss; ``auto`` uses it whenever it applies.  The contour route loses
        digits to cancellation for large shapes (reflected in the residual).

    Returns
    -------
    CoverageEstimate
    """
    if not isinstance(net.association, ClosestBS):
        raise InvalidAssociation("coverage_closest needs ClosestBS association")
    if not isinstance(net.path_loss, (Unbounded, Bounded)):
        raise InvalidAssociation("coverage_closest supports Unbounded or Bounded path loss")
    delta = _check_delta(net)
    bounded = isinstance(net.path_loss, Bounded)
    total, resid = 0.0, 0.0
    diag = {"tiers": []}
    if method not in ("auto", "parseval", "series"):
        raise BadParameter(f"unknown method {method!r}")
    for k, tier in enumerate(net.tiers):
        gs = _integer_gamma_shape(tier.signal_model)
        use_series = (not bounded and gs is not None
                      and method in ("series", "auto"))
        if method == "series" and not use_series:
            raise NotApplicable("series route needs unbounded path loss and an "
                                "integer-shape Gamma serving gain")
        if use_series:
            C, r, d = _closest_series(net, k, gs[0], gs[1], tol)
            diag["tiers"].append(d)
            total += C
            resid += r
            continue
        if bounded:
            lam_tot = sum(t.density for t in net.tiers)
            uc = -math.log(math.pi * lam_tot) / delta
            center = (min(0.0, uc), max(0.0, uc))
            cap = None
            if net.noise > 0:
                cap = math.log(tier.power / net.noise) + math.log(math.log(1.0 / tol) + 10.0) + 2.0
                cap = max(cap, center[0] + 10.0)
        else:
            center, cap = (0.0, 0.0), None
        T = _contour_length(tier.signal_model, tier.threshold, delta, tol, 3.0)[0]
        k_lo, k_hi, step = _u_grid(delta, tol, center, cap, T)
        u = np.arange(k_lo, k_hi + 1, step) * _LATTICE
        if bounded:
            G = _bounded_G(net, k, (k_lo, k_hi), step, delta, tol, diag)
        else:
            G = _unbounded_G(net, k, (k_lo, k_hi), step, delta, tol)
        g_rel = 1e-11 if net.noise == 0 else min(1e-9, tol)
        C, r, d = _parseval(tier.signal_model, tier.threshold, u, G, delta, tol, g_rel)
        d["u_nodes"] = int(u.size)
        diag["tiers"].append(d)
        total += C
        resid += r
    return CoverageEstimate.make(total, resid, **diag)


def dense_limit(net: NetworkModel, lambda_common: float | None = None,
                tol: float = 1e-6) -> float:
    """Interference-limited limit of closest-BS coverage.

    Unbounded path loss gives a density-free constant (the noise is dropped and
    only density ratios matter).  Bounded path loss needs ``lambda_common``,
    the common density at which the noiseless coverage is evaluated.
    """
    n0 = replace(net, noise=0.0, association=ClosestBS())
    if isinstance(net.path_loss, Unbounded):
        return coverage_closest(n0, tol).value
    if isinstance(net.path_loss, Bounded):
        if lambda_common is None:
            raise BadParameter("bounded dense limit needs lambda_common")
        return coverage_closest(n0.with_density(lambda_common), tol).value
    raise InvalidAssociation("dense_limit supports Unbounded or Bounded path loss")


# ---------------------------------------------------------------------------
# strongest-BS association


def coverage_strongest(net: NetworkModel, closed_form: bool = True) -> CoverageEstimate:
    """Coverage under strongest-BS (max instantaneous power) association.

    Uses ``sin(pi d)/(pi d) sum_k lam_k beta_k^-d L_k / sum_j lam_j (P_j/P_k)^d L_j``
    with ``L = E[g^d]``.  The expression is exact when every ``beta_k >= 1``
    (at most one BS can then exceed the threshold); below 1 it is the mean
    number of covering BSs, an upper bound, flagged in the diagnostics.
    Noise is ignored.
    """
    delta = _check_delta(net)
    lam_fn = fd.closed_form_lambda if closed_form else fd.lambda_moment
    L = [lam_fn(t.signal_model, delta) for t in net.tiers]
    lam = np.array([t.density for t in net.tiers])
    P = np.array([t.power for t in net.tiers])
    out = 0.0
    for k, t in enumerate(net.tiers):
        den = np.sum(lam * (P / t.power) ** delta * np.array(L))
        out += t.density * t.threshold ** (-delta) * L[k] / den
    out *= math.sin(math.pi * delta) / (math.pi * delta)
    exact = all(t.threshold >= 1.0 for t in net.tiers)
    return CoverageEstimate.make(out, 0.0, exact=exact,
                                 path="closed_form" if closed_form else "mellin")


# ---------------------------------------------------------------------------
# ad hoc (fixed-distance) networks


def wright_kernel(delta: float) -> FoxHParams:
    """``H^{1,0}_{1,1}[x | (1, delta); (0, 1)]``: coverage under a deterministic serving gain.

    Equals ``P(S^-delta > x)`` for a one-sided stable ``S`` with
    ``E exp(-s S) = exp(-s^delta)``.
    """
    return FoxHParams(1, 0, [(1.0, float(delta))], [(0.0, 1.0)])


def _adhoc_args(net: NetworkModel, k: int):
    delta = _check_delta(net)
    if not isinstance(net.association, FixedDistance):
        raise InvalidAssociation("ad hoc engines need FixedDistance association")
    if not isinstance(net.path_loss, Unbounded):
        raise InvalidAssociation("ad hoc engines need Unbounded path loss")
    r = net.association.r
    tk = net.tiers[k]
    A = 0.0
    for tj in net.tiers:
        A += (math.pi * r * r * tj.density * math.gamma(1.0 - delta)
              * fd.closed_form_lambda(tj.interferer_fading, delta)
              * (tj.power / tk.power) ** delta)
    return A * tk.threshold ** delta, delta


def _tier_weights(net):
    lam = np.array([t.density for t in net.tiers])
    return lam / lam.sum()


def coverage_adhoc(net: NetworkModel, tol: float = 1e-9) -> CoverageEstimate:
    """Coverage of a Poisson dipole network with link distance ``r``.

    Each tier contributes ``(kappa/c) Y(A c^delta)`` where ``Y`` is the
    coverage kernel of its serving-gain density and ``A`` the interference
    scale; tiers are weighted by their share of the total density.
    """
    w = _tier_weights(net)
    total, resid = 0.0, 0.0
    for k, tier in enumerate(net.tiers):
        A, delta = _adhoc_args(net, k)
        model = tier.signal_model
        gs = _integer_gamma_shape(model)
        if gs is not None and gs[0] > 64:
            total += w[k] * _adhoc_series(A / gs[1] ** delta, delta, gs[0])
            resid += w[k] * 1e-13 * gs[0]
            continue
        for wt, loc in model.atoms:
            v, r = foxh.eval(wright_kernel(delta), A / loc ** delta, tol, return_residual=True)
            total += w[k] * wt * v
            resid += w[k] * wt * r
        for wt, t in model.terms:
            y = foxh.coverage_kernel(t, delta)
            v, r = foxh.eval(y, A * t.c ** delta, tol, return_residual=True)
            total += w[k] * wt * (t.kappa / t.c) * v
            resid += w[k] * wt * (t.kappa / t.c) * r
    return CoverageEstimate.make(total, resid)


def _adhoc_series(Z: float, delta: float, m: int) -> float:
    """``sum_{n<m} [h^n] exp(-Z (1-h)^delta)`` (Gamma(m) gain, integer ``m``)."""
    p = np.zeros(max(m, 2))
    n = np.arange(1, p.size)
    # -(1-h)^delta = -1 + sum_n delta Gamma(n-delta) / (Gamma(1-delta) n!) h^n
    p[1:] = Z * delta * np.exp(special.gammaln(n - delta) - special.gammaln(1.0 - delta)
                               - special.gammaln(n + 1.0))
    e = _exp_series(p[None, :])[0, :m]
    return math.exp(-Z) * float(np.sum(e))


def adhoc_asymptote(net: NetworkModel, lam: float | None = None,
                    leading_constant: bool = True) -> float:
    """Large-density expansion of the ad hoc coverage.

    Parameters
    ----------
    net : NetworkModel
    lam : float, optional
        Common density; the network's own densities are used when omitted.
    leading_constant : bool
        Include the constant factor of the expansion.  With ``False`` Gamma
        tiers reduce to ``(lam A)^(m-1) exp(-lam A) / Gamma(m)``.
    """
    if lam is not None:
        net = net.with_density(lam)
    w = _tier_weights(net)
    out = 0.0
    for k, tier in enumerate(net.tiers):
        A, delta = _adhoc_args(net, k)
        if not tier.signal_model.terms and not tier.signal_model.atoms:
            raise NotApplicable("serving-gain shape too large for the expansion")
        for wt, t in tier.signal_model.terms:
            y = foxh.coverage_kernel(t, delta)
            if y.v != 0 or y.u != y.q:
                raise NotApplicable("serving gain is outside the exponential-decay class")
            out += w[k] * wt * (t.kappa / t.c) * foxh.asymptotic_eval(
                y, A * t.c ** delta, "at_infinity", leading_constant)
        for wt, loc in tier.signal_model.atoms:
            out += w[k] * wt * foxh.asymptotic_eval(
                wright_kernel(delta), A / loc ** delta, "at_infinity", leading_constant)
    return out


# ---------------------------------------------------------------------------
# multi-antenna approximations and scaling laws


def _q(n, x):
    return float(special.gammaincc(n, x))


def miso_bounded_approx(lam: float, n_t: int, beta: float, alpha: float,
                        method: str = "gamma") -> float:
    """Dense bounded-path-loss MISO coverage ``Q(N_t, 2 pi lam beta / eta)``.

    ``eta = (alpha - 1)(alpha - 2)``.  ``method="foxh"`` evaluates the same
    quantity through ``H^{2,0}_{1,2}`` for cross-checking.
    """
    if not alpha > 2:
        raise DeltaOutOfRange("need alpha > 2")
    if n_t < 1:
        raise BadParameter("n_t must be >= 1")
    eta = (alpha - 1.0) * (alpha - 2.0)
    x = 2.0 * math.pi * lam * beta / eta
    if method == "foxh":
        return foxh.eval(foxh.upper_gamma_kernel(n_t), x) / math.gamma(n_t)
    return _q(n_t, x)


def expn_real(nu: float, x: float) -> float:
    """Generalized exponential integral ``E_nu(x) = int_1^inf e^{-xt} t^-nu dt``."""
    if x == 0:
        if nu <= 1:
            raise ParameterSingularity("E_nu(0) diverges for nu <= 1")
        return 1.0 / (nu - 1.0)
    if nu <= 0 or nu != int(nu):
        # E_nu(x) = x^(nu-1) Gamma(1-nu, x)
        a = 1.0 - nu
        if a > 0:
            return x ** (nu - 1.0) * special.gamma(a) * special.gammaincc(a, x)
        # upward recurrence from a positive-order base: E_nu = (e^-x - x E_{nu-1})/(nu-1)
        base = nu - math.ceil(nu - 1.0)
        e = expn_real(base, x) if base > 0 else x ** (base - 1.0) * special.gamma(1 - base) * special.gammaincc(1 - base, x)
        n = base
        while n < nu - 1e-12:
            n += 1.0
            e = (math.exp(-x) - x * e) / (n - 1.0)
        return e
    return float(special.expn(int(nu), x))


def mmwave_terms(alpha_l: float, alpha_n: float, tau: float):
    """``(P, J(tau))`` constants of the dense mmWave approximation."""
    if abs(alpha_l - 2.0) < 1e-12 or abs(alpha_n - 2.0) < 1e-12 or abs(alpha_l - 1.0) < 1e-12:
        raise ParameterSingularity("path-loss exponents of 1 or 2 are singular")
    P = (alpha_n - alpha_l - 1.0) / ((1.0 - alpha_l) * (alpha_n - 2.0))
    J = ((alpha_l - 1.0 + tau) * expn_real(alpha_l - 1.0, tau) / (alpha_l - 1.0)
         - (alpha_n - 1.0 + tau) * expn_real(alpha_n - 1.0, tau) / (alpha_n - 1.0))
    return P, J


def _mmwave_cfg(net):
    pl = net.path_loss
    if not isinstance(pl, MmWave):
        raise InvalidAssociation("mmWave approximation needs MmWave path loss")
    return pl, net.tiers[0].threshold


def mmwave_approx(lam: float, n_t: int, net: NetworkModel) -> float:
    """Dense mmWave MISO coverage ``Q(N_t, pi lam lambda_t e^tau beta (P + J) / d)``."""
    pl, beta = _mmwave_cfg(net)
    P, J = mmwave_terms(pl.alpha_l, pl.alpha_n, pl.tau)
    x = math.pi * lam * pl.wavelength * math.exp(pl.tau) * beta * (P + J) / pl.d
    return _q(n_t, x)


def threed_approx(lam: float, n_t: int, net: NetworkModel) -> float:
    """Dense 3D MISO coverage ``Q(N_t, 2 pi lam h^2 beta / (alpha - 2))``."""
    pl = net.path_loss
    if not isinstance(pl, ThreeD):
        raise InvalidAssociation("3D approximation needs ThreeD path loss")
    beta = net.tiers[0].threshold
    x = 2.0 * math.pi * lam * pl.h ** 2 * beta / (pl.alpha - 2.0)
    return _q(n_t, x)


def adhoc_scaling_constant(r: float, alpha: float, beta: float, lam_moment: float,
                           theta: float = 1.0) -> float:
    """``T = pi r^2 Gamma(1-delta) (beta/theta)^delta Lambda`` of the ad hoc scaling law.

    ``theta`` is the scale of the Gamma serving gain.
    """
    d = 2.0 / alpha
    return math.pi * r * r * math.gamma(1.0 - d) * (beta / theta) ** d * lam_moment


def scaling_limit(regime: str, ratio: float, **cfg) -> float:
    """Limiting coverage under antenna scaling.

    Parameters
    ----------
    regime : {"adhoc", "cellular", "mmwave"}
    ratio : float
        Limit of ``N_t / lam^(1/delta)`` (ad hoc), ``N_t / lam`` (cellular)
        or ``N_t / (lambda_t lam)`` (mmWave); ``inf`` allowed.
    cfg
        ad hoc: ``T`` (or ``r``, ``beta``, ``lam_moment``, ``theta``) and ``alpha``;
        cellular: ``alpha``, ``beta``; mmWave: ``alpha_l``, ``alpha_n``, ``tau``,
        ``d``, ``beta``.
    """
    regime = regime.lower()
    if ratio < 0:
        raise BadParameter("ratio must be >= 0")
    if ratio == 0:
        return 0.0
    if math.isinf(ratio):
        return 1.0
    if regime == "adhoc":
        alpha = cfg["alpha"]
        d = 2.0 / alpha
        T = cfg.get("T")
        if T is None:
            T = adhoc_scaling_constant(cfg["r"], alpha, cfg["beta"], cfg["lam_moment"],
                                       cfg.get("theta", 1.0))
        return foxh.eval(wright_kernel(d), T / ratio ** d)
    if regime == "cellular":
        alpha = cfg["alpha"]
        eta = (alpha - 1.0) * (alpha - 2.0)
        x = 2.0 * math.pi * cfg["beta"] / (eta * ratio)
    elif regime == "mmwave":
        P, J = mmwave_terms(cfg["alpha_l"], cfg["alpha_n"], cfg.get("tau", 0.0))
        x = math.pi * cfg["beta"] * math.exp(cfg.get("tau", 0.0)) * (P + J) / (cfg["d"] * ratio)
    else:
        raise BadParameter(f"unknown regime {regime!r}")
    if abs(x - 1.0) < 1e-12:
        return 1.0
    return foxh.eval(foxh.heaviside_kernel(), x)


def optimal_scaling(kind: str, **cfg) -> float:
    """Critical scaling factor separating coverage 0 and 1.

    ``mmwave``: ``pi beta e^tau (P + J(tau)) / d``;
    ``threed``: ``2 pi beta h^2 / (alpha - 2)``.
    """
    kind = kind.lower()
    if kind == "mmwave":
        tau = cfg.get("tau", 0.0)
        P, J = mmwave_terms(cfg["alpha_l"], cfg["alpha_n"], tau)
        return math.pi * cfg["beta"] * math.exp(tau) * (P + J) / cfg["d"]
    if kind == "threed":
        return 2.0 * math.pi * cfg["beta"] * cfg["h"] ** 2 / (cfg["alpha"] - 2.0)
    raise BadParameter(f"unknown kind {kind!r}")
