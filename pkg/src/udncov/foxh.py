"""Fox H-function: parameters, evaluation, Mellin moments and asymptotics.

The H-function is defined by the Mellin-Barnes integral

    H(z) = (1/2 pi i) int Theta(s) z^{-s} ds,

    Theta(s) = prod_{j<u} G(b_j + B_j s) prod_{i<v} G(1 - a_i - A_i s)
               / (prod_{j>=u} G(1 - b_j - B_j s) prod_{i>=v} G(a_i + A_i s)),

with ``G`` the gamma function.  A density of "Fox H type" is ``kappa * H(c x)``.
All gamma products are evaluated in log space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import special

from ._backend import loggamma
from .errors import (BadParameter, Divergent, NoConvergence, NotApplicable,
                     PoleCollision, StripViolation)

_EPS = np.finfo(float).eps
_MAX_NODES = 2 ** 20
_MATCH = 1e-9
_SERIES_DECAY = 0.1       # contour decay rate below which residue series are preferred
_SERIES_TERMS = 4000
_CHUNK = 1 << 22


def _pairs(seq):
    out = []
    for item in seq:
        x, y = item
        out.append((float(x), float(y)))
    return tuple(out)


@dataclass(frozen=True)
class FoxHParams:
    """One Fox H parameter sequence.

    Parameters
    ----------
    u, v : int
        Numbers of numerator lower and numerator upper pairs.
    upper : sequence of (a, A)
        Upper pairs; the first ``v`` enter the numerator.
    lower : sequence of (b, B)
        Lower pairs; the first ``u`` enter the numerator.
    kappa, c : float
        Density constant and argument scale, used when the function is read
        as the density ``kappa * H(c x)``.
    """

    u: int
    v: int
    upper: tuple = ()
    lower: tuple = ()
    kappa: float = 1.0
    c: float = 1.0
    _cache: dict = field(default_factory=dict, init=False, repr=False,
                         compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "upper", _pairs(self.upper))
        object.__setattr__(self, "lower", _pairs(self.lower))
        object.__setattr__(self, "u", int(self.u))
        object.__setattr__(self, "v", int(self.v))
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "c", float(self.c))
        if not 0 <= self.u <= self.q:
            raise BadParameter(f"u={self.u} must lie in [0, q={self.q}]")
        if not 0 <= self.v <= self.p:
            raise BadParameter(f"v={self.v} must lie in [0, p={self.p}]")
        for a, A in self.upper:
            if not (A > 0 and math.isfinite(a) and math.isfinite(A)):
                raise BadParameter(f"upper pair ({a}, {A}) needs finite a and A > 0")
        for b, B in self.lower:
            if not (B > 0 and math.isfinite(b) and math.isfinite(B)):
                raise BadParameter(f"lower pair ({b}, {B}) needs finite b and B > 0")
        if not (self.kappa > 0 and self.c > 0):
            raise BadParameter("kappa and c must be positive")

    @property
    def p(self) -> int:
        return len(self.upper)

    @property
    def q(self) -> int:
        return len(self.lower)

    def __hash__(self):
        return hash((self.u, self.v, self.upper, self.lower, self.kappa, self.c))

    def __eq__(self, other):
        if not isinstance(other, FoxHParams):
            return NotImplemented
        return ((self.u, self.v, self.upper, self.lower, self.kappa, self.c)
                == (other.u, other.v, other.upper, other.lower, other.kappa, other.c))

    # -- Mellin kernel ---------------------------------------------------
    def log_theta(self, s):
        """Complex ``log Theta(s)`` (imaginary part defined modulo 2 pi)."""
        s = np.asarray(s, dtype=complex)
        out = np.zeros(s.shape, dtype=complex)
        with np.errstate(invalid="ignore"):
            for j, (b, B) in enumerate(self.lower):
                if j < self.u:
                    out += loggamma(b + B * s)
                else:
                    out -= loggamma(1.0 - b - B * s)
            for i, (a, A) in enumerate(self.upper):
                if i < self.v:
                    out += loggamma(1.0 - a - A * s)
                else:
                    out -= loggamma(a + A * s)
        return out

    def log_abs_theta_real(self, s):
        """``log|Theta(s)|`` and its sign for real ``s``."""
        s = np.asarray(s, dtype=float)
        lg = np.zeros(s.shape)
        sg = np.ones(s.shape)

        def acc(x, num):
            nonlocal lg, sg
            if num:
                lg = lg + special.gammaln(x)
            else:
                lg = lg - special.gammaln(x)
            sg = sg * special.gammasgn(x)

        with np.errstate(invalid="ignore", divide="ignore"):
            for j, (b, B) in enumerate(self.lower):
                if j < self.u:
                    acc(b + B * s, True)
                else:
                    acc(1.0 - b - B * s, False)
            for i, (a, A) in enumerate(self.upper):
                if i < self.v:
                    acc(1.0 - a - A * s, True)
                else:
                    acc(a + A * s, False)
        return lg, sg

    # -- transformations -------------------------------------------------
    def scaled(self, k: float) -> "FoxHParams":
        """Multiply every A and B by ``k``; ``H_k(z) = H(z^{1/k}) / k``."""
        return FoxHParams(self.u, self.v, [(a, A * k) for a, A in self.upper],
                          [(b, B * k) for b, B in self.lower], self.kappa, self.c)

    def reduce(self) -> "FoxHParams":
        """Cancel gamma factors that appear identically in numerator and denominator."""
        upper = list(self.upper)
        lower = list(self.lower)
        u, v = self.u, self.v
        changed = True
        while changed:
            changed = False
            # G(b + B s) / G(a + A s) with (a, A) == (b, B)
            for j in range(u):
                for i in range(v, len(upper)):
                    if _same(lower[j], upper[i]):
                        del lower[j]
                        del upper[i]
                        u -= 1
                        changed = True
                        break
                if changed:
                    break
            if changed:
                continue
            # G(1 - a - A s) / G(1 - b - B s)
            for i in range(v):
                for j in range(u, len(lower)):
                    if _same(lower[j], upper[i]):
                        del upper[i]
                        del lower[j]
                        v -= 1
                        changed = True
                        break
                if changed:
                    break
        return FoxHParams(u, v, upper, lower, self.kappa, self.c)

    # -- pole bookkeeping ---------------------------------------------------
    @cached_property
    def gap(self):
        """Open interval separating ascending from descending poles."""
        lo = max((-b / B for b, B in self.lower[:self.u]), default=-math.inf)
        hi = min(((1.0 - a) / A for a, A in self.upper[:self.v]), default=math.inf)
        return lo, hi

    def _zero_count(self, s):
        # number of denominator gamma factors with a pole (so 1/G = 0) at s
        n = 0
        for j, (b, B) in enumerate(self.lower):
            if j >= self.u:
                n += _is_nonpos_int(1.0 - b - B * s)
        for i, (a, A) in enumerate(self.upper):
            if i >= self.v:
                n += _is_nonpos_int(a + A * s)
        return n

    def poles(self, side: str, count: int):
        """Distinct poles on one side of the gap, nearest first.

        Returns
        -------
        list of tuple
            ``(position, order, log_abs_coef, sign)``; the coefficient is the
            residue-series weight of ``z^{-position}`` and is ``nan`` for
            poles that are not simple.
        """
        key = ("poles", side, count)
        if key in self._cache:
            return self._cache[key]
        cand = []
        if side == "left":
            for j, (b, B) in enumerate(self.lower[:self.u]):
                for ell in range(count):
                    cand.append((-(b + ell) / B, j, ell))
        else:
            for i, (a, A) in enumerate(self.upper[:self.v]):
                for ell in range(count):
                    cand.append(((1.0 - a + ell) / A, i, ell))
        cand.sort(key=lambda x: -x[0] if side == "left" else x[0])
        groups = []
        for pos, f, ell in cand:
            if groups and abs(groups[-1][0] - pos) <= _MATCH * max(1.0, abs(pos)):
                groups[-1][1].append((f, ell))
            else:
                groups.append([pos, [(f, ell)]])
        out = []
        for pos, members in groups:
            nz = self._zero_count(pos)
            order = len(members) - nz
            if order <= 0:
                continue
            if len(members) == 1 and nz == 0:
                f, ell = members[0]
                lc, sg = self._residue_coef(side, f, ell, pos)
            else:
                lc, sg = math.nan, 0.0
            out.append((pos, order, lc, sg))
        # keep only poles nearer than the first truncated factor sequence
        self._cache[key] = out
        return out

    def _residue_coef(self, side, f, ell, pos):
        lg, sg = 0.0, 1.0
        for j, (b, B) in enumerate(self.lower):
            if side == "left" and j == f:
                continue
            x = b + B * pos if j < self.u else 1.0 - b - B * pos
            g = float(special.gammaln(x))
            lg += g if j < self.u else -g
            sg *= float(special.gammasgn(x))
        for i, (a, A) in enumerate(self.upper):
            if side == "right" and i == f:
                continue
            x = 1.0 - a - A * pos if i < self.v else a + A * pos
            g = float(special.gammaln(x))
            lg += g if i < self.v else -g
            sg *= float(special.gammasgn(x))
        scale = self.lower[f][1] if side == "left" else self.upper[f][1]
        lg += -math.lgamma(ell + 1) - math.log(scale)
        sg *= (-1.0) ** ell
        return lg, sg


def _same(x, y):
    return abs(x[0] - y[0]) <= 1e-14 * max(1.0, abs(x[0])) and abs(x[1] - y[1]) <= 1e-14 * x[1]


def _is_nonpos_int(x):
    r = round(x)
    return int(r <= 0 and abs(x - r) <= _MATCH * max(1.0, abs(x)))


@dataclass(frozen=True)
class ConvergenceInfo:
    """Contour and asymptotic constants of an H-function.

    ``Delta``, ``rho``, ``nu`` are only set when the stability exponent is
    supplied; ``rho`` follows the closed product
    ``delta^delta prod (delta A)^(-delta A) prod (delta B)^(-delta B)`` while
    ``rho_kernel`` is the scale constant of the coverage kernel built from the
    same parameters, which is what the large-argument expansion uses.
    """

    delta_star: float
    a_star: float
    mu: float
    contour_abscissa: float
    gap: tuple
    scale: float
    Delta: float | None = None
    rho: float | None = None
    nu: float | None = None
    rho_kernel: float | None = None


def convergence_params(params: FoxHParams, delta: float | None = None) -> ConvergenceInfo:
    """Compute the contour/asymptotic constants.

    Parameters
    ----------
    params : FoxHParams
    delta : float, optional
        Stability exponent in (0, 1); adds the kernel triplet.

    Raises
    ------
    PoleCollision
        When no vertical line separates the two pole families.
    """
    pr = params.reduce()
    lo, hi = pr.gap
    if not lo < hi:
        raise PoleCollision(f"ascending pole {lo:g} is not left of descending pole {hi:g}")
    A = np.array([x[1] for x in pr.upper])
    a = np.array([x[0] for x in pr.upper])
    B = np.array([x[1] for x in pr.lower])
    b = np.array([x[0] for x in pr.lower])
    u, v = pr.u, pr.v
    delta_star = B.sum() - A.sum()
    a_star = B[:u].sum() - B[u:].sum() + A[:v].sum() - A[v:].sum()
    mu = b.sum() - a.sum() + (pr.p - pr.q) / 2.0
    scale = float(np.prod(A ** -A) * np.prod(B ** B))
    if math.isfinite(lo) and math.isfinite(hi):
        c0 = 0.5 * (lo + hi)
    elif math.isfinite(lo):
        c0 = lo + 0.5
    elif math.isfinite(hi):
        c0 = hi - 0.5
    else:
        c0 = 0.0
    extra = {}
    if delta is not None:
        d = float(delta)
        if not 0 < d < 1:
            raise BadParameter("delta must lie in (0, 1)")
        # constants of the original (unreduced) sequence
        A0 = np.array([x[1] for x in params.upper])
        a0 = np.array([x[0] for x in params.upper])
        B0 = np.array([x[1] for x in params.lower])
        b0 = np.array([x[0] for x in params.lower])
        extra["Delta"] = float(1.0 + d * (B0.sum() - A0.sum() - 1.0))
        extra["rho"] = float(d ** d * np.prod((d * A0) ** (-d * A0)) * np.prod((d * B0) ** (-d * B0)))
        extra["nu"] = float(b0.sum() - a0.sum() + B0.sum() - A0.sum()
                            + (params.p - params.q) / 2.0 - 1.0)
        extra["rho_kernel"] = float(d ** (-d) * np.prod((d * A0) ** (-d * A0))
                                    * np.prod((d * B0) ** (d * B0)))
    return ConvergenceInfo(float(delta_star), float(a_star), float(mu), float(c0),
                           (lo, hi), scale, **extra)


# ---------------------------------------------------------------------------
# evaluation


def eval(params: FoxHParams, z, tol: float = 1e-9, return_residual: bool = False):
    """Evaluate the bare H-function at ``z`` (no ``c`` or ``kappa`` applied).

    Parameters
    ----------
    params : FoxHParams
    z : float or array_like
        Non-negative arguments.
    tol : float
        Target relative accuracy of the contour quadrature.
    return_residual : bool
        Also return the estimated absolute error per point.

    Returns
    -------
    float or ndarray
        ``H(z)``, and the residual estimate when requested.

    Raises
    ------
    Divergent
        If neither the contour integral nor a residue series converges.
    NoConvergence
        If refinement hits the node cap.
    """
    if not 1e-15 <= tol < 1e-1:
        raise BadParameter("tol must lie in [1e-15, 1e-1)")
    pr = params.reduce()
    info = convergence_params(pr)
    zarr = np.asarray(z, dtype=float)
    scalar = zarr.ndim == 0
    zf = np.atleast_1d(zarr).ravel()
    if np.any(~(zf >= 0)):
        raise BadParameter("H-function argument must be non-negative")
    val = np.zeros(zf.shape)
    res = np.zeros(zf.shape)
    zero = zf == 0
    if np.any(zero):
        val[zero] = _value_at_zero(pr)
    pos = ~zero
    if np.any(pos):
        v, r = _eval_positive(pr, info, zf[pos], tol)
        val[pos] = v
        res[pos] = r
    val = val.reshape(np.atleast_1d(zarr).shape)
    res = res.reshape(val.shape)
    if scalar:
        val, res = float(val[0]), float(res[0])
    return (val, res) if return_residual else val


def _value_at_zero(pr: FoxHParams) -> float:
    if pr.u == 0:
        return 0.0
    poles = pr.poles("left", 2)
    if not poles:
        return 0.0
    pos, order, lc, sg = poles[0]
    if pos < 0:
        return 0.0
    if pos == 0 and order == 1 and math.isfinite(lc):
        return float(sg * math.exp(lc))
    raise Divergent("H-function is unbounded at zero argument")


def _eval_positive(pr, info, z, tol):
    rate = 0.5 * math.pi * info.a_star
    if rate < _SERIES_DECAY:
        return _series(pr, info, z, tol)
    try:
        return _contour(pr, info, z, tol)
    except NoConvergence:
        try:
            return _series(pr, info, z, tol)
        except (Divergent, NoConvergence):
            pass
        raise


def _series(pr, info, z, tol):
    """Residue-series summation, choosing the convergent side per point."""
    ds = info.delta_star
    lnz = np.log(z)
    side = np.empty(z.shape, dtype=object)
    if ds > 0:
        side[:] = "left"
    elif ds < 0:
        side[:] = "right"
    else:
        lnr = math.log(info.scale)
        if np.any(np.abs(lnz - lnr) < 1e-12):
            raise Divergent("residue series do not converge on the boundary |z| = scale")
        side[:] = np.where(lnz < lnr, "left", "right")
    val = np.zeros(z.shape)
    res = np.zeros(z.shape)
    for sd in ("left", "right"):
        m = side == sd
        if not np.any(m):
            continue
        if (sd == "left" and pr.u == 0) or (sd == "right" and pr.v == 0):
            continue  # no poles: series is identically zero
        poles = pr.poles(sd, _SERIES_TERMS)
        if any(not math.isfinite(lc) for _, _, lc, _ in poles):
            raise NoConvergence("residue series needs simple poles")
        if not poles:
            continue
        pos = np.array([p[0] for p in poles])
        lc = np.array([p[2] for p in poles])
        sg = np.array([p[3] for p in poles])
        for k in np.flatnonzero(m):
            lt = lc - pos * lnz[k]
            terms = sg * np.exp(lt)
            if len(poles) > 1:
                tail = np.max(np.abs(terms[-10:]))
            else:
                tail = 0.0
            s = terms.sum()
            if len(poles) >= 10 and tail > tol * max(abs(s), 1e-300):
                raise NoConvergence("residue series did not converge within the term cap")
            val[k] = s
            res[k] = tail + 64 * _EPS * np.abs(terms).sum()
    return val, res


def _sample_abscissae(pr, info, lnz_max):
    """Candidate contour abscissae and, for each, the crossed poles."""
    lo, hi = info.gap
    span = 20.0
    if info.delta_star > 0:
        span = max(span, 3.0 * math.exp(min(lnz_max, 700.0) / info.delta_star) + 5.0)
    span = min(span, 1e5)
    fr = np.linspace(0.05, 0.95, 19)
    geo = np.geomspace(1e-2, span, 120)
    cands = []  # (c array, crossed list)
    if math.isfinite(lo) and math.isfinite(hi):
        cands.append((lo + (hi - lo) * fr, []))
    elif math.isfinite(lo):
        cands.append((lo + geo, []))
    elif math.isfinite(hi):
        cands.append((hi - geo, []))
    else:
        cands.append((np.linspace(-span, span, 121), []))
    for sd in ("right", "left"):
        if (sd == "right" and pr.v == 0) or (sd == "left" and pr.u == 0):
            continue
        poles = pr.poles(sd, 12)[:10]
        crossed = []
        for k in range(len(poles) - 1):
            p0 = poles[k]
            if not math.isfinite(p0[2]):
                break
            crossed = crossed + [p0]
            x0, x1 = p0[0], poles[k + 1][0]
            cands.append((x0 + (x1 - x0) * fr, crossed))
    return cands


def _contour(pr, info, z, tol):
    lnz = np.log(z)
    cands = _sample_abscissae(pr, info, float(np.max(np.abs(lnz))))
    cs, labels = [], []
    for k, (c, _) in enumerate(cands):
        cs.append(c)
        labels.append(np.full(c.size, k))
    cs = np.concatenate(cs)
    labels = np.concatenate(labels)
    f, _ = pr.log_abs_theta_real(cs)
    f = np.where(np.isfinite(f) & ~_near_singular(pr, cs), f, np.inf)
    obj = f[:, None] - cs[:, None] * lnz[None, :]
    for k, (_, crossed) in enumerate(cands):
        if crossed:
            pos = np.array([p[0] for p in crossed])
            lc = np.array([p[2] for p in crossed])
            rmax = np.max(lc[:, None] - pos[:, None] * lnz[None, :], axis=0)
            rows = labels == k
            obj[rows] = np.maximum(obj[rows], rmax[None, :])
    best = np.argmin(obj, axis=0)
    val = np.zeros(z.shape)
    res = np.zeros(z.shape)
    for idx in np.unique(best):
        m = best == idx
        c = cs[idx]
        crossed = cands[labels[idx]][1]
        v, r = _line_integral(pr, c, lnz[m], tol, crossed)
        val[m] = v
        res[m] = r
    return val, res


def _near_singular(pr, c, eps=0.02):
    # True where some gamma argument (numerator or denominator) is close to a
    # non-positive integer; such lines suffer cancellation near t = 0
    bad = np.zeros(c.shape, dtype=bool)
    args = [b + B * c for b, B in pr.lower[:pr.u]]
    args += [1.0 - b - B * c for b, B in pr.lower[pr.u:]]
    args += [1.0 - a - A * c for a, A in pr.upper[:pr.v]]
    args += [a + A * c for a, A in pr.upper[pr.v:]]
    for x in args:
        bad |= (x < eps) & (np.abs(x - np.round(x)) < eps)
    return bad


def _pole_distance(pr, c):
    d = math.inf
    for sd in ("left", "right"):
        if (sd == "left" and pr.u == 0) or (sd == "right" and pr.v == 0):
            continue
        for p in pr.poles(sd, 12):
            d = min(d, abs(p[0] - c))
    return d


def _truncation(pr, c, tol):
    """Half-length of the contour beyond which the kernel is negligible."""
    t = np.concatenate(([0.0], np.geomspace(0.125, 1e5, 200)))
    la = pr.log_theta(c + 1j * t).real
    peak = np.max(la[np.isfinite(la)])
    thr = peak + math.log(tol) - 12.0
    below = la < thr
    # last index that is still above the threshold
    above = np.flatnonzero(~below)
    if above.size == 0:
        return t[1], peak
    last = above[-1]
    if last >= t.size - 1:
        raise NoConvergence("contour integrand does not decay")
    return t[last + 1], peak


def _line_integral(pr, c, lnz, tol, crossed):
    T, peak = _truncation(pr, c, tol)
    d = _pole_distance(pr, c)
    lzm = float(np.max(np.abs(lnz)))
    h = 2.0 * math.pi / (lzm + (math.log(1.0 / tol) + 3.0) / max(min(d, 5.0), 1e-3))
    h = min(h, T / 8.0, 0.5)
    n = int(math.ceil(T / h))
    h = T / n
    if n > _MAX_NODES:
        raise NoConvergence("contour node cap exceeded")
    lz = lnz[None, :]

    def block_sum(t):
        # sum of Re[Theta(c+it) z^{-c-it}] and of its modulus over nodes t
        tot = np.zeros(lnz.size)
        mag = np.zeros(lnz.size)
        step = max(1, _CHUNK // max(lnz.size, 1))
        for i0 in range(0, t.size, step):
            tt = t[i0:i0 + step]
            lt = pr.log_theta(c + 1j * tt)
            e = lt[:, None] - (c + 1j * tt[:, None]) * lz
            with np.errstate(under="ignore"):
                w = np.exp(e.real)
                tot += np.sum(w * np.cos(e.imag), axis=0)
                mag += np.sum(w, axis=0)
        return tot, mag

    # level 0 (spacing h)
    t0 = np.arange(n + 1) * h
    S, M = block_sum(t0[1:])
    f0, m0 = block_sum(np.array([0.0]))
    S = S + 0.5 * f0
    M = M + 0.5 * m0
    resid_sum = np.zeros(lnz.size)
    for k, p in enumerate(crossed):
        resid_sum += p[3] * np.exp(p[2] - p[0] * lnz)
    I_prev = h / math.pi * S
    while True:
        # refine: add midpoints
        tm = (np.arange(n) + 0.5) * h
        Sm, Mm = block_sum(tm)
        S = S + Sm
        M = M + Mm
        n *= 2
        h *= 0.5
        I = h / math.pi * S
        H = I + resid_sum
        err = np.abs(I - I_prev)
        floor = 256 * _EPS * (h / math.pi * M + np.abs(resid_sum))
        ok = (err <= tol * np.abs(H)) | (err <= floor)
        if np.all(ok):
            return H, err + floor
        if 2 * n > _MAX_NODES:
            raise NoConvergence(f"contour refinement stalled, residual {float(np.max(err)):.3g}")
        I_prev = I


# ---------------------------------------------------------------------------
# moments and asymptotics


def mellin_moment(params: FoxHParams, s: float) -> float:
    """``E[g^s]`` for the density ``kappa * H(c x)``.

    Raises
    ------
    StripViolation
        If a numerator gamma argument is not positive.
    """
    s1 = float(s) + 1.0
    for j, (b, B) in enumerate(params.lower[:params.u]):
        if b + B * s1 <= 0:
            raise StripViolation(f"moment order {s} outside the strip (lower pair {j})")
    for i, (a, A) in enumerate(params.upper[:params.v]):
        if 1.0 - a - A * s1 <= 0:
            raise StripViolation(f"moment order {s} outside the strip (upper pair {i})")
    lg, sg = params.log_abs_theta_real(np.array(s1))
    return float(sg * params.kappa * math.exp(float(lg) - s1 * math.log(params.c)))


def log_moment_complex(params: FoxHParams, s):
    """Complex ``log E[g^s]`` for the density ``kappa * H(c x)``."""
    s = np.asarray(s, dtype=complex)
    return math.log(params.kappa) - (s + 1.0) * math.log(params.c) + params.log_theta(s + 1.0)


def _exp_class_constant(pr: FoxHParams):
    A = np.array([x[1] for x in pr.upper])
    a = np.array([x[0] for x in pr.upper])
    B = np.array([x[1] for x in pr.lower])
    b = np.array([x[0] for x in pr.lower])
    Dl = B.sum() - A.sum()
    mu = b.sum() - a.sum() + (pr.p - pr.q) / 2.0
    lscale = float(np.sum(-A * np.log(A)) + np.sum(B * np.log(B))) if (A.size or B.size) else 0.0
    c0 = (np.sum((b - 0.5) * np.log(B)) - np.sum((a - 0.5) * np.log(A))
          + 0.5 * (pr.q - pr.p) * math.log(2 * math.pi))
    lA = c0 - 0.5 * math.log(2 * math.pi * Dl) - (mu + 0.5) / Dl * lscale
    return float(Dl), float(mu), lscale, float(lA)


def asymptotic_eval(params: FoxHParams, z: float, regime: str = "at_infinity",
                    leading_constant: bool = True) -> float:
    """Leading term of the expansion of ``H(z)``.

    Parameters
    ----------
    params : FoxHParams
    z : float
    regime : {"near_zero", "at_infinity"}
    leading_constant : bool
        For the exponential-decay class, include the constant factor of the
        expansion.  With ``False`` only ``z^((mu+1/2)/Delta) exp(-Delta (z/s)^(1/Delta))``
        is returned.

    Raises
    ------
    NotApplicable
        When the class admits no implemented expansion.
    """
    pr = params.reduce()
    z = float(z)
    if regime == "near_zero":
        if pr.u == 0:
            raise NotApplicable("no ascending poles")
        pos, order, lc, sg = pr.poles("left", 4)[0]
        if order != 1 or not math.isfinite(lc):
            raise NotApplicable("leading ascending pole is not simple")
        if z == 0:
            return 0.0 if pos < 0 else float(sg * math.exp(lc)) if pos == 0 else math.inf
        return float(sg * math.exp(lc - pos * math.log(z)))
    if regime != "at_infinity":
        raise BadParameter(f"unknown regime {regime!r}")
    if pr.v > 0:
        pos, order, lc, sg = pr.poles("right", 4)[0]
        if order != 1 or not math.isfinite(lc):
            raise NotApplicable("leading descending pole is not simple")
        return float(sg * math.exp(lc - pos * math.log(z)))
    if pr.u == pr.q and pr.q > 0:
        Dl, mu, lscale, lA = _exp_class_constant(pr)
        if Dl <= 0:
            raise NotApplicable("exponential class needs a positive slope constant")
        if z == 0:
            return 0.0 if (mu + 0.5) > 0 else math.inf
        lz = math.log(z)
        e = (mu + 0.5) / Dl * lz - Dl * math.exp((lz - lscale) / Dl)
        if leading_constant:
            e += lA
        return float(math.exp(e))
    raise NotApplicable("parameter class has no implemented expansion")


# ---------------------------------------------------------------------------
# kernels built from a density


def ccdf_params(params: FoxHParams) -> FoxHParams:
    """Parameters ``Q`` with ``P(g > x) = (kappa/c) H_Q(c x)``."""
    upper = [(a + A, A) for a, A in params.upper[:params.v]] + \
            [(a + A, A) for a, A in params.upper[params.v:]] + [(1.0, 1.0)]
    lower = [(0.0, 1.0)] + [(b + B, B) for b, B in params.lower]
    return FoxHParams(params.u + 1, params.v, upper, lower, params.kappa, params.c)


def cdf_params(params: FoxHParams) -> FoxHParams:
    """Parameters ``Q`` with ``P(g <= x) = (kappa/c) H_Q(c x)``."""
    upper = [(1.0, 1.0)] + [(a + A, A) for a, A in params.upper]
    lower = [(b + B, B) for b, B in params.lower] + [(0.0, 1.0)]
    return FoxHParams(params.u, params.v + 1, upper, lower, params.kappa, params.c)


def coverage_kernel(params: FoxHParams, delta: float) -> FoxHParams:
    """Kernel ``Y`` with ``E[exp(-x g^delta)]``-type ad hoc coverage ``(kappa/c) Y``.

    ``Y(x) = H^{u+1,v}_{p+1,q+1}[x | (a+A, dA), (1, d); (0, 1), (b+B, dB)]``.
    """
    d = float(delta)
    upper = [(a + A, d * A) for a, A in params.upper] + [(1.0, d)]
    lower = [(0.0, 1.0)] + [(b + B, d * B) for b, B in params.lower]
    return FoxHParams(params.u + 1, params.v, upper, lower, params.kappa, params.c)


# common kernels
def exp_kernel() -> FoxHParams:
    """``H(x) = exp(-x)``."""
    return FoxHParams(1, 0, [], [(0.0, 1.0)])


def heaviside_kernel() -> FoxHParams:
    """``H(x) = U(1 - x)``."""
    return FoxHParams(1, 0, [(1.0, 1.0)], [(0.0, 1.0)])


def upper_gamma_kernel(n: float) -> FoxHParams:
    """``H(x) = Gamma(n) Q(n, x)``."""
    return FoxHParams(2, 0, [(1.0, 1.0)], [(0.0, 1.0), (float(n), 1.0)])


def power_kernel(delta: float) -> FoxHParams:
    """``delta * H(x) = int_0^inf exp(-y^(1/delta) - x y) dy``; ``H(x) ~ 1/(delta x)``."""
    return FoxHParams(1, 1, [(1.0 - delta, delta)], [(0.0, 1.0)])
