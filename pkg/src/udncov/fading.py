"""Fading models as finite mixtures of Fox H densities and point masses.

Every channel power gain is represented as

    f(x) = sum_k w_k kappa_k H_k(c_k x)  (+ point masses),

so moments, Laplace-type kernels and coverage formulas can be written once for
the Fox H family.  Lognormal gains are represented by a Gauss-Hermite point
mass mixture in the dB-style parametrization ``g = 10^Y``, ``Y ~ N(mu, sigma^2)``.
"""
from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy import special, stats
from scipy.interpolate import PchipInterpolator

from . import foxh
from .errors import BadParameter, TruncationOverflow
from .foxh import FoxHParams

LN10 = math.log(10.0)
RICE_TAIL = 1e-12


@dataclass(frozen=True)
class FadingModel:
    """A fading power-gain distribution.

    Attributes
    ----------
    kind : str
        One of ``gamma``, ``gengamma``, ``rice``, ``lognormal``, ``fisherf``,
        ``gammagain`` or ``foxh``.
    params : tuple of (str, value)
        Constructor parameters, for display and sampling.
    terms : tuple of (float, FoxHParams)
        Weighted Fox H densities.
    atoms : tuple of (float, float)
        Weighted point masses ``(weight, location)``.
    """

    kind: str
    params: tuple
    terms: tuple = ()
    atoms: tuple = ()
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __hash__(self):
        return hash((self.kind, self.params, self.terms, self.atoms))

    def __eq__(self, other):
        if not isinstance(other, FadingModel):
            return NotImplemented
        return (self.kind, self.params, self.terms, self.atoms) == \
            (other.kind, other.params, other.terms, other.atoms)

    @property
    def p(self) -> dict:
        return dict(self.params)

    @property
    def mean(self) -> float:
        return lambda_moment(self, 1.0)

    def __str__(self):
        if self.kind == "foxh":
            return "foxh(...)"
        args = ",".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}"
                        for k, v in self.params)
        return f"{self.kind}({args})"


def _positive(kind, name, x, strict=True):
    try:
        x = float(x)
    except (TypeError, ValueError):
        raise BadParameter(f"{kind}: {name} must be a number (got {x!r})") from None
    if not math.isfinite(x) or (x <= 0 if strict else x < 0):
        rel = ">" if strict else ">="
        raise BadParameter(f"{kind}: {name} must be {rel} 0 (got {x:g})")
    return x


def gamma_params(m: float, theta: float = None) -> FoxHParams:
    """Gamma density with shape ``m`` and scale ``theta`` (unit mean by default)."""
    if theta is None:
        theta = 1.0 / m
    if math.lgamma(m) + math.log(theta) > 700.0:
        raise BadParameter(f"gamma shape {m:g} too large for a double-precision density")
    return FoxHParams(1, 0, [], [(m - 1.0, 1.0)], kappa=math.exp(-math.lgamma(m)) / theta,
                      c=1.0 / theta)


def _gamma_terms(m, theta):
    # very large shapes keep no H term; moments and densities fall back to gamma forms
    try:
        return ((1.0, gamma_params(m, theta)),)
    except BadParameter:
        return ()


def _gamma_scale(model):
    p = model.p
    return p["m"], p.get("theta", 1.0 / p["m"])


def make_model(kind: str, **kw) -> FadingModel:
    """Build a fading model.

    Parameters
    ----------
    kind : str
        ``gamma(m)``, ``gengamma(m, eta)``, ``rice(k, max_terms=64)``,
        ``lognormal(mu, sigma, n=24)``, ``fisherf(m, ms)``,
        ``gammagain(m, theta)`` or ``foxh(params=FoxHParams)``
        (alternatively ``foxh(kappa, c, a, A, b, B, u, v)``).

    Returns
    -------
    FadingModel

    Raises
    ------
    BadParameter
        For out-of-range or unknown parameters.
    TruncationOverflow
        If the Rice series needs more than ``max_terms`` terms.
    """
    kind = kind.lower()
    allowed = {
        "gamma": {"m"}, "gengamma": {"m", "eta"}, "rice": {"k", "max_terms"},
        "lognormal": {"mu", "sigma", "n"}, "fisherf": {"m", "ms"},
        "gammagain": {"m", "theta"},
        "foxh": {"params", "kappa", "c", "a", "A", "b", "B", "u", "v"},
    }
    if kind not in allowed:
        raise BadParameter(f"unknown fading kind {kind!r}")
    extra = set(kw) - allowed[kind]
    if extra:
        raise BadParameter(f"{kind}: unknown parameter(s) {sorted(extra)}")

    if kind == "gamma":
        m = _positive(kind, "m", kw.get("m", 1.0))
        return FadingModel(kind, (("m", m),), _gamma_terms(m, 1.0 / m))
    if kind == "gammagain":
        m = _positive(kind, "m", kw.get("m", 1.0))
        th = _positive(kind, "theta", kw.get("theta", 1.0))
        return FadingModel(kind, (("m", m), ("theta", th)), _gamma_terms(m, th))
    if kind == "gengamma":
        m = _positive(kind, "m", kw.get("m", 1.0))
        eta = _positive(kind, "eta", kw.get("eta", 1.0))
        mu = math.exp(special.gammaln(m + 1.0 / eta) - special.gammaln(m))
        t = FoxHParams(1, 0, [], [(m - 1.0 / eta, 1.0 / eta)], kappa=mu / math.gamma(m), c=mu)
        return FadingModel(kind, (("m", m), ("eta", eta)), ((1.0, t),))
    if kind == "rice":
        k = _positive(kind, "k", kw.get("k", 0.0), strict=False)
        cap = int(kw.get("max_terms", 64))
        if cap < 1:
            raise BadParameter("rice: max_terms must be >= 1")
        psi = rice_weights(k, cap)
        terms = tuple((float(w), gamma_params(t + 1.0, 1.0 / (1.0 + k)))
                      for t, w in enumerate(psi))
        return FadingModel(kind, (("k", k), ("max_terms", cap)), terms)
    if kind == "lognormal":
        mu = float(kw.get("mu", 0.0))
        sigma = _positive(kind, "sigma", kw.get("sigma", 1.0))
        n = int(kw.get("n", 24))
        if n < 1:
            raise BadParameter("lognormal: n must be >= 1")
        u, w = hermgauss(n)
        w = w / math.sqrt(math.pi)
        w = w / w.sum()
        loc = 10.0 ** (math.sqrt(2.0) * sigma * u + mu)
        atoms = tuple((float(a), float(b)) for a, b in zip(w, loc))
        return FadingModel(kind, (("mu", mu), ("sigma", sigma), ("n", n)), (), atoms)
    if kind == "fisherf":
        m = _positive(kind, "m", kw.get("m", 1.0))
        ms = _positive(kind, "ms", kw.get("ms", 2.0))
        if ms <= 1:
            raise BadParameter(f"fisherf: ms must be > 1 (got {ms:g})")
        t = FoxHParams(1, 1, [(-ms, 1.0)], [(m - 1.0, 1.0)],
                       kappa=m / (ms * math.gamma(ms) * math.gamma(m)), c=m / ms)
        return FadingModel(kind, (("m", m), ("ms", ms)), ((1.0, t),))
    # foxh
    if "params" in kw:
        t = kw["params"]
        if not isinstance(t, FoxHParams):
            raise BadParameter("foxh: params must be a FoxHParams")
    else:
        a = list(kw.get("a", []))
        A = list(kw.get("A", []))
        b = list(kw.get("b", []))
        B = list(kw.get("B", []))
        if len(a) != len(A) or len(b) != len(B):
            raise BadParameter("foxh: a/A and b/B must have equal lengths")
        t = FoxHParams(int(kw.get("u", len(b))), int(kw.get("v", 0)), list(zip(a, A)),
                       list(zip(b, B)), float(kw.get("kappa", 1.0)), float(kw.get("c", 1.0)))
    mass = (t.kappa / t.c) * math.exp(float(t.log_abs_theta_real(np.array(1.0))[0]))
    if not abs(mass - 1.0) < 1e-6:
        raise BadParameter(f"foxh: density integrates to {mass:.8g}, not 1")
    return FadingModel("foxh", (("params", t),), ((1.0, t),))


def rice_weights(k: float, max_terms: int = 64) -> np.ndarray:
    """Poisson weights of the Gamma-mixture form of the Rician power gain.

    The series is truncated at the first index whose discarded tail mass is
    below ``1e-12``; the kept weights are renormalized.
    """
    if k == 0:
        return np.array([1.0])
    t = 0
    while stats.poisson.sf(t, k) >= RICE_TAIL:
        t += 1
        if t + 1 > max_terms:
            raise TruncationOverflow(f"rice: k={k:g} needs more than {max_terms} terms")
    idx = np.arange(t + 1)
    w = stats.poisson.pmf(idx, k)
    return w / w.sum()


_TOKEN = re.compile(r"^\s*([A-Za-z_]\w*)\s*\((.*)\)\s*$", re.S)


def _split_args(s):
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur)
    return out


def parse_fading(text: str) -> FadingModel:
    """Parse a model spec such as ``gamma(m=2.5)`` or ``rice(k=5)``."""
    mt = _TOKEN.match(text)
    if not mt:
        raise BadParameter(f"malformed fading spec {text!r}")
    kind = mt.group(1).lower()
    kw = {}
    for item in _split_args(mt.group(2)):
        if "=" not in item:
            raise BadParameter(f"{kind}: argument {item.strip()!r} is not key=value")
        key, val = item.split("=", 1)
        key = key.strip()
        if kind != "foxh":
            key = key.lower()
        try:
            kw[key] = ast.literal_eval(val.strip())
        except (ValueError, SyntaxError):
            raise BadParameter(f"{kind}: cannot parse value of {key!r}: {val.strip()!r}") from None
    return make_model(kind, **kw)


# ---------------------------------------------------------------------------
# densities and moments


def pdf(model: FadingModel, x, tol: float = 1e-9, diagnostics: dict | None = None):
    """Density of the power gain.

    Point-mass mixtures (lognormal) return the analytic lognormal density,
    which is recorded in ``diagnostics["analytic_lognormal"]``.
    """
    x = np.asarray(x, dtype=float)
    if model.atoms:
        if model.kind != "lognormal":
            raise BadParameter("density undefined for point-mass mixtures")
        p = model.p
        if diagnostics is not None:
            diagnostics["analytic_lognormal"] = True
        with np.errstate(divide="ignore"):
            y = np.log10(x)
        out = np.exp(-0.5 * ((y - p["mu"]) / p["sigma"]) ** 2) / (
            x * LN10 * p["sigma"] * math.sqrt(2 * math.pi))
        return np.where(x > 0, out, 0.0)
    if not model.terms:
        m, th = _gamma_scale(model)
        return stats.gamma.pdf(x, m, scale=th)
    out = np.zeros(x.shape)
    for w, t in model.terms:
        out = out + w * t.kappa * foxh.eval(t, t.c * x, tol)
    return out if out.ndim else float(out)


def lambda_moment(model: FadingModel, delta: float) -> float:
    """``E[g^delta]`` from the Mellin moments of the mixture terms."""
    s = float(delta)
    if not model.terms and not model.atoms:
        m, th = _gamma_scale(model)
        return math.exp(special.gammaln(m + s) - special.gammaln(m) + s * math.log(th))
    out = 0.0
    for w, t in model.terms:
        out += w * foxh.mellin_moment(t, s)
    for w, loc in model.atoms:
        out += w * loc ** s
    return out


def closed_form_lambda(model: FadingModel, delta: float) -> float:
    """Closed gamma-ratio forms of ``E[g^delta]`` for catalog models."""
    d = float(delta)
    p = model.p
    lg = special.gammaln
    if model.kind == "gamma":
        m = p["m"]
        return math.exp(lg(m + d) - lg(m) - d * math.log(m))
    if model.kind == "gammagain":
        m, th = p["m"], p["theta"]
        return math.exp(lg(m + d) - lg(m) + d * math.log(th))
    if model.kind == "gengamma":
        m, eta = p["m"], p["eta"]
        return math.exp((d - 1) * lg(m) + lg(m + d / eta) - d * lg(m + 1 / eta))
    if model.kind == "rice":
        k = p["k"]
        psi = rice_weights(k, p["max_terms"])
        t = np.arange(psi.size)
        return float(np.sum(psi * (1.0 + k) ** (-d) * np.exp(lg(t + 1 + d) - lg(t + 1))))
    if model.kind == "lognormal":
        u, w = hermgauss(p["n"])
        w = w / math.sqrt(math.pi)
        w = w / w.sum()
        return float(np.sum(w * 10.0 ** (d * (math.sqrt(2.0) * p["sigma"] * u + p["mu"]))))
    if model.kind == "fisherf":
        m, ms = p["m"], p["ms"]
        if d >= ms:
            from .errors import StripViolation
            raise StripViolation(f"fisherf moment of order {d:g} needs ms > {d:g}")
        return math.exp(d * math.log(ms / m) + lg(m + d) + lg(ms - d) - lg(m) - lg(ms))
    return lambda_moment(model, d)


def log_moment(model: FadingModel, s):
    """Complex ``log E[g^s]`` on an array of complex orders."""
    s = np.asarray(s, dtype=complex)
    if not model.terms and not model.atoms:
        m, th = _gamma_scale(model)
        return special.loggamma(m + s) - special.gammaln(m) + s * math.log(th)
    parts = [math.log(w) + foxh.log_moment_complex(t, s) for w, t in model.terms]
    parts += [math.log(w) + s * math.log(loc) for w, loc in model.atoms]
    return _logsumexp_complex(parts)


def _logsumexp_complex(parts):
    if len(parts) == 1:
        return parts[0]
    st = np.stack(parts)
    mx = np.max(st.real, axis=0)
    mx = np.where(np.isfinite(mx), mx, 0.0)
    return mx + np.log(np.sum(np.exp(st - mx), axis=0))


def lognormal_moment(mu: float, sigma: float, delta: float) -> float:
    """Exact ``E[g^delta]`` for ``g = 10^Y``, ``Y ~ N(mu, sigma^2)``."""
    m, s = mu * LN10, sigma * LN10
    return math.exp(delta * m + 0.5 * (delta * s) ** 2)


# ---------------------------------------------------------------------------
# sampling


def sample(model: FadingModel, rng: np.random.Generator, size) -> np.ndarray:
    """Draw power gains with exact native samplers where available."""
    p = model.p
    k = model.kind
    if k == "gamma":
        return rng.gamma(p["m"], 1.0 / p["m"], size)
    if k == "gammagain":
        return rng.gamma(p["m"], p["theta"], size)
    if k == "gengamma":
        t = model.terms[0][1]
        return rng.gamma(p["m"], 1.0, size) ** (1.0 / p["eta"]) / t.c
    if k == "rice":
        kr = p["k"]
        s = math.sqrt(0.5 / (1.0 + kr))
        re_ = math.sqrt(kr / (1.0 + kr)) + s * rng.standard_normal(size)
        im = s * rng.standard_normal(size)
        return re_ * re_ + im * im
    if k == "lognormal":
        return 10.0 ** rng.normal(p["mu"], p["sigma"], size)
    if k == "fisherf":
        return rng.gamma(p["m"], 1.0 / p["m"], size) / rng.gamma(p["ms"], 1.0 / p["ms"], size)
    inv = _inverse_cdf(model)
    return np.exp(inv(rng.random(size)))


@lru_cache(maxsize=32)
def _inverse_cdf(model: FadingModel):
    """Monotone interpolant of ``log x`` against the CDF on 4096 log nodes."""
    mean = lambda_moment(model, 1.0) if _has_mean(model) else 1.0
    lo, hi = math.log(mean) - 40.0, math.log(mean) + 40.0
    x = np.exp(np.linspace(lo, hi, 4096))
    F = np.zeros_like(x)
    for w, t in model.terms:
        cp = foxh.cdf_params(t)
        F += w * (t.kappa / t.c) * foxh.eval(cp, t.c * x, 1e-8)
    F = np.clip(F, 0.0, 1.0)
    F = np.maximum.accumulate(F)
    keep = np.concatenate(([True], np.diff(F) > 1e-15))
    return PchipInterpolator(F[keep], np.log(x[keep]), extrapolate=True)


def _has_mean(model):
    try:
        lambda_moment(model, 1.0)
        return True
    except Exception:
        return False
