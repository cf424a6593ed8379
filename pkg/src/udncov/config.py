"""INI configuration for networks, sweeps and run settings.

Example::

    [network]
    association = closest        ; closest | strongest | adhoc
    path_loss = unbounded        ; unbounded | bounded | threed | mmwave
    alpha = 3
    noise_dbm = -70

    [tier.1]
    density = 1e-4
    power = 50
    threshold_db = 0
    fading = gamma(m=1.5)

    [sweep]
    variable = lambda
    grid = logspace(-5, -3, 5)
    engines = closest, simulate

    [run]
    seed = 12648430
    trials = 200000

Fading values use the grammar of :func:`udncov.fading.parse_fading`.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, UdnError
from .fading import parse_fading
from .network import (Bounded, ClosestBS, FixedDistance, GammaGain, MmWave, NetworkModel,
                      StrongestBS, ThreeD, Tier, Unbounded, db_to_linear, dbm_to_watt)

VARIABLES = ("lambda", "beta", "beta_db", "n_t", "h", "k_factor", "tau")
ENGINES = ("closest", "strongest", "adhoc", "miso_bounded", "mmwave", "threed", "simulate",
           "dense_limit", "adhoc_asymptote", "scaling_limit")


@dataclass
class SweepSpec:
    """A one-dimensional parameter sweep over a base network."""

    variable: str
    grid: list
    engines: list
    net: NetworkModel
    n_t_scale: tuple | None = None     # (gamma, exponent, lambda0): N_t = ceil(gamma (lam/lam0)^e)
    k_tiers: tuple | None = None
    miso_mrt: tuple = ()
    label: str = ""
    run: dict = field(default_factory=dict)


def _line_of(text: str, section: str, key: str | None) -> int | None:
    cur = None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"\[(.+)\]", s)
        if m:
            cur = m.group(1).strip()
            if key is None and cur == section:
                return i
            continue
        if cur == section and key is not None and re.match(rf"{re.escape(key)}\s*[=:]", s):
            return i
    return None


class _Reader:
    def __init__(self, text: str, source: str = "<config>"):
        self.text = text
        self.source = source
        self.cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        try:
            self.cp.read_string(text, source)
        except configparser.Error as e:
            raise ConfigError(f"{source}: {e}") from None

    def fail(self, section, key, msg):
        ln = _line_of(self.text, section, key)
        where = f"{self.source}:{ln}" if ln else self.source
        name = f"{section}.{key}" if key else f"[{section}]"
        raise ConfigError(f"{where}: {name}: {msg}")

    def get(self, section, key, default=None):
        if self.cp.has_option(section, key):
            return self.cp.get(section, key).strip()
        return default

    def num(self, section, key, default=None, cast=float):
        v = self.get(section, key)
        if v is None:
            if default is None:
                self.fail(section, key, "missing value")
            return default
        try:
            x = cast(float(v)) if cast is int else cast(v)
        except ValueError:
            self.fail(section, key, f"not a number: {v!r}")
        return x

    def fading(self, section, key, default=None):
        v = self.get(section, key, default)
        if v is None:
            self.fail(section, key, "missing fading spec")
        try:
            return parse_fading(v)
        except UdnError as e:
            self.fail(section, key, str(e))


def parse_grid(spec: str) -> list:
    """``logspace(a, b, n)``, ``linspace(a, b, n)``, ``range(a, b[, step])`` or a comma list."""
    s = spec.strip()
    m = re.fullmatch(r"(logspace|linspace|range)\s*\((.*)\)", s)
    if m:
        args = [float(a) for a in m.group(2).split(",")]
        if m.group(1) == "logspace":
            return list(np.logspace(args[0], args[1], int(args[2])))
        if m.group(1) == "linspace":
            return list(np.linspace(args[0], args[1], int(args[2])))
        return list(np.arange(*args))
    return [float(x) for x in s.split(",") if x.strip()]


def _tier_sections(rd: _Reader):
    secs = [s for s in rd.cp.sections() if re.fullmatch(r"tier\.\d+", s)]
    return sorted(secs, key=lambda s: int(s.split(".")[1]))


def parse_network(rd: _Reader) -> tuple[NetworkModel, tuple]:
    sec = "network"
    if not rd.cp.has_section(sec):
        rd.fail(sec, None, "section missing")
    assoc = rd.get(sec, "association", "closest").lower()
    kind = rd.get(sec, "path_loss", "unbounded").lower()
    alpha = rd.num(sec, "alpha", 4.0)
    if kind == "unbounded":
        pl = Unbounded(alpha)
    elif kind == "bounded":
        pl = Bounded(alpha)
    elif kind == "threed":
        pl = ThreeD(alpha, rd.num(sec, "h", 0.0))
    elif kind == "mmwave":
        pl = MmWave(alpha, rd.num(sec, "alpha_n", 4.0), rd.num(sec, "tau", 0.0),
                    rd.num(sec, "d", 0.5), rd.num(sec, "wavelength", 1.0), rd.num(sec, "fc", 1.0))
    else:
        rd.fail(sec, "path_loss", f"unknown path loss {kind!r}")
    if assoc == "closest":
        a = ClosestBS()
    elif assoc == "strongest":
        a = StrongestBS()
    elif assoc == "adhoc":
        a = FixedDistance(rd.num(sec, "r", 10.0))
    else:
        rd.fail(sec, "association", f"unknown association {assoc!r}")
    if rd.get(sec, "noise_dbm") is not None:
        noise = dbm_to_watt(rd.num(sec, "noise_dbm"))
    else:
        noise = rd.num(sec, "noise", 0.0)
    tiers, mrt = [], []
    secs = _tier_sections(rd)
    if not secs:
        rd.fail("tier.1", None, "at least one [tier.N] section is required")
    for i, ts in enumerate(secs):
        f = rd.fading(ts, "fading", "gamma(m=1)")
        fi = rd.fading(ts, "interferer_fading") if rd.get(ts, "interferer_fading") else None
        if rd.get(ts, "threshold_db") is not None:
            beta = db_to_linear(rd.num(ts, "threshold_db"))
        else:
            beta = rd.num(ts, "threshold", 1.0)
        nt = rd.num(ts, "antennas", 1, int)
        mg = rd.get(ts, "miso_gain", "none").lower()
        if mg in ("none", ""):
            gain = None
        elif mg == "mrt":
            gain = GammaGain(nt, 1.0)
            mrt.append(i)
        else:
            m = re.fullmatch(r"gammagain\s*\((.*)\)", mg)
            if not m:
                rd.fail(ts, "miso_gain", "expected none, mrt or gammagain(m=..., theta=...)")
            kw = dict(kv.split("=") for kv in m.group(1).replace(" ", "").split(",") if kv)
            gain = GammaGain(float(kw.get("m", nt)), float(kw.get("theta", 1.0)))
        try:
            tiers.append(Tier(rd.num(ts, "density"), rd.num(ts, "power", 1.0), beta, f, fi,
                              nt, gain))
        except UdnError as e:
            rd.fail(ts, None, str(e))
    try:
        net = NetworkModel(tiers, pl, noise, a)
    except UdnError as e:
        rd.fail(sec, None, str(e))
    return net, tuple(mrt)


def apply_overrides(text: str, overrides) -> str:
    """Apply ``section.key=value`` overrides to INI text."""
    if not overrides:
        return text
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(str(e)) from None
    for ov in overrides:
        if "=" not in ov:
            raise ConfigError(f"--set expects section.key=value, got {ov!r}")
        lhs, val = ov.split("=", 1)
        if "." not in lhs:
            raise ConfigError(f"--set expects section.key=value, got {ov!r}")
        sec, key = lhs.strip().rsplit(".", 1)
        if not cp.has_section(sec):
            cp.add_section(sec)
        cp.set(sec, key, val.strip())
    import io
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def load(text: str, source: str = "<config>", overrides=None, need_sweep: bool = True) -> SweepSpec:
    """Parse INI text into a :class:`SweepSpec`."""
    if overrides:
        text = apply_overrides(text, overrides)
        source += " (after --set)"
    rd = _Reader(text, source)
    net, mrt = parse_network(rd)
    run = {"seed": rd.num("run", "seed", 0xC0FFEE, int),
           "trials": rd.num("run", "trials", 200_000, int),
           "tol": rd.num("run", "tol", 1e-6),
           "threads": rd.num("run", "threads", 1, int)}
    sec = "sweep"
    if not rd.cp.has_section(sec):
        if need_sweep:
            rd.fail(sec, None, "section missing")
        return SweepSpec("", [], [], net, miso_mrt=mrt, run=run)
    var = rd.get(sec, "variable", "lambda").lower()
    if var not in VARIABLES:
        rd.fail(sec, "variable", f"must be one of {', '.join(VARIABLES)}")
    try:
        grid = parse_grid(rd.get(sec, "grid", ""))
    except ValueError as e:
        rd.fail(sec, "grid", str(e))
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        rd.fail(sec, "grid", "grid must be non-empty and strictly increasing")
    engines = [e.strip().lower() for e in rd.get(sec, "engines", "").split(",") if e.strip()]
    if not engines:
        rd.fail(sec, "engines", "at least one engine is required")
    for e in engines:
        if e not in ENGINES:
            rd.fail(sec, "engines", f"unknown engine {e!r}")
    scale = None
    if rd.get(sec, "n_t_scale") is not None:
        scale = (rd.num(sec, "n_t_scale"), rd.num(sec, "n_t_exponent", 1.0),
                 rd.num(sec, "n_t_lambda0", 1.0))
    kt = None
    if rd.get(sec, "k_tiers") is not None:
        kt = tuple(int(x) - 1 for x in rd.get(sec, "k_tiers").split(","))
    return SweepSpec(var, grid, engines, net, scale, kt, mrt, rd.get(sec, "label", ""), run)
