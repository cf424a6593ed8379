"""Command-line front end.

Every command writes UTF-8 CSV with the header
``variable,value,engine,coverage,residual_or_ci,trials,seconds,error``
(``eval-foxh`` and ``selftest`` use their own small tables).  Numbers are
printed with 17 significant digits.  The exit status is 0 iff no row
carries an error.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import coverage as cv
from . import fading as fd
from . import foxh, simulator
from .config import SweepSpec, load
from .errors import ConfigError, UdnError
from .network import (Bounded, ClosestBS, FixedDistance, GammaGain, MmWave, StrongestBS, ThreeD,
                      Unbounded, db_to_linear)

HEADER = ["variable", "value", "engine", "coverage", "residual_or_ci", "trials", "seconds",
          "error"]


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return "%.17g" % x


# ---------------------------------------------------------------------------
# sweep execution


def _set_antennas(net, spec: SweepSpec, n_t: int):
    tiers = []
    for i, t in enumerate(net.tiers):
        t = replace(t, antennas=n_t)
        if i in spec.miso_mrt:
            t = replace(t, miso_gain=GammaGain(n_t, 1.0))
        tiers.append(t)
    return replace(net, tiers=tuple(tiers))


def network_at(spec: SweepSpec, x: float):
    """Base network with the swept variable set to ``x``."""
    net = spec.net
    v = spec.variable
    if v == "lambda":
        net = net.with_density(x)
        if spec.n_t_scale is not None:
            g, e, lam0 = spec.n_t_scale
            net = _set_antennas(net, spec, max(1, math.ceil(g * (x / lam0) ** e - 1e-9)))
    elif v == "beta":
        net = net.with_threshold(x)
    elif v == "beta_db":
        net = net.with_threshold(db_to_linear(x))
    elif v == "n_t":
        net = _set_antennas(net, spec, int(round(x)))
    elif v == "h":
        if not isinstance(net.path_loss, ThreeD):
            raise ConfigError("variable h needs path_loss = threed")
        net = replace(net, path_loss=replace(net.path_loss, h=x))
    elif v == "tau":
        if not isinstance(net.path_loss, MmWave):
            raise ConfigError("variable tau needs path_loss = mmwave")
        net = replace(net, path_loss=replace(net.path_loss, tau=x))
    elif v == "k_factor":
        idx = spec.k_tiers if spec.k_tiers is not None else range(len(net.tiers))
        tiers = list(net.tiers)
        for i in idx:
            m = fd.make_model("rice", k=x)
            tiers[i] = replace(tiers[i], fading=m, interferer_fading=m)
        net = replace(net, tiers=tuple(tiers))
    return net


def _scaling_limit(net):
    t = net.tiers[0]
    lam, n_t = t.density, t.antennas
    pl = net.path_loss
    beta = t.threshold
    if isinstance(net.association, FixedDistance):
        theta = t.miso_gain.theta if t.miso_gain is not None else 1.0
        d = net.delta
        T = cv.adhoc_scaling_constant(net.association.r, net.alpha, beta,
                                      fd.closed_form_lambda(t.interferer_fading, d), theta)
        return cv.scaling_limit("adhoc", n_t / lam ** (1.0 / d), T=T, alpha=net.alpha)
    if isinstance(pl, MmWave):
        return cv.scaling_limit("mmwave", n_t / (lam * pl.wavelength), alpha_l=pl.alpha_l,
                                alpha_n=pl.alpha_n, tau=pl.tau, d=pl.d, beta=beta)
    if isinstance(pl, ThreeD):
        z = cv.optimal_scaling("threed", beta=beta, h=pl.h, alpha=pl.alpha)
        r = n_t / lam
        return 1.0 if r > z else (0.0 if r < z else 0.5)
    return cv.scaling_limit("cellular", n_t / lam, alpha=net.alpha, beta=beta)


def run_engine(engine: str, net, run: dict):
    """Evaluate one engine; returns ``(coverage, residual_or_ci, trials)``."""
    tol = run.get("tol", 1e-6)
    t0 = net.tiers[0]
    if engine == "closest":
        e = cv.coverage_closest(replace(net, association=ClosestBS()), tol)
        return e.value, e.residual, 0
    if engine == "strongest":
        e = cv.coverage_strongest(replace(net, association=StrongestBS()))
        return e.value, e.residual, 0
    if engine == "adhoc":
        e = cv.coverage_adhoc(net)
        return e.value, e.residual, 0
    if engine == "miso_bounded":
        return cv.miso_bounded_approx(t0.density, t0.antennas, t0.threshold, net.alpha), 0.0, 0
    if engine == "mmwave":
        return cv.mmwave_approx(t0.density, t0.antennas, net), 0.0, 0
    if engine == "threed":
        return cv.threed_approx(t0.density, t0.antennas, net), 0.0, 0
    if engine == "dense_limit":
        lam = t0.density if isinstance(net.path_loss, Bounded) else None
        return cv.dense_limit(net, lam, tol), 0.0, 0
    if engine == "adhoc_asymptote":
        return cv.adhoc_asymptote(net), 0.0, 0
    if engine == "scaling_limit":
        return _scaling_limit(net), 0.0, 0
    if engine == "simulate":
        e = simulator.estimate_coverage(net, run.get("trials", 200_000),
                                        run.get("seed", 0xC0FFEE))
        return e.value, e.half_width, e.trials
    raise ConfigError(f"unknown engine {engine!r}")


def run_sweep(spec: SweepSpec, threads: int = 1) -> list[list[str]]:
    """Evaluate every (grid point, engine) pair; rows come back in grid order."""
    tasks = [(x, e) for x in spec.grid for e in spec.engines]

    def one(task):
        x, eng = task
        name = f"{eng}:{spec.label}" if spec.label else eng
        t = time.perf_counter()
        try:
            val, res, n = run_engine(eng, network_at(spec, x), spec.run)
            err = ""
        except (UdnError, ValueError, ArithmeticError) as ex:
            val, res, n, err = math.nan, math.nan, 0, f"{type(ex).__name__}: {ex}"
        dt = time.perf_counter() - t
        return [spec.variable, fmt(x), name, fmt(val), fmt(res), fmt(n), "%.3f" % dt, err]

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(one, tasks))
    return [one(t) for t in tasks]


def write_csv(rows, out=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    w.writerows(rows)
    text = buf.getvalue()
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    return text


# ---------------------------------------------------------------------------
# commands


def _run_settings(args, spec):
    run = dict(spec.run)
    for k in ("seed", "trials", "tol", "threads"):
        v = getattr(args, k, None)
        if v is not None:
            run[k] = v
    spec.run = run
    return run


def _read_config(path, args, need_sweep=True):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"{path}: {e.strerror}") from None
    spec = load(text, str(path), args.set, need_sweep)
    _run_settings(args, spec)
    return spec


def cmd_sweep(args):
    spec = _read_config(args.config, args)
    rows = run_sweep(spec, spec.run["threads"])
    write_csv(rows, args.out)
    return int(any(r[-1] for r in rows))


def _single(args, engines):
    spec = _read_config(args.config, args, need_sweep=False)
    spec.variable, spec.grid = "lambda", [spec.net.tiers[0].density]
    spec.engines = engines
    rows = []
    for eng in engines:
        t = time.perf_counter()
        try:
            val, res, n = run_engine(eng, spec.net, spec.run)
            err = ""
        except (UdnError, ValueError, ArithmeticError) as ex:
            val, res, n, err = math.nan, math.nan, 0, f"{type(ex).__name__}: {ex}"
        rows.append(["lambda", fmt(spec.net.tiers[0].density), eng, fmt(val), fmt(res), fmt(n),
                     "%.3f" % (time.perf_counter() - t), err])
    write_csv(rows, args.out)
    return int(any(r[-1] for r in rows))


def _default_engine(net):
    if isinstance(net.association, FixedDistance):
        return "adhoc"
    if isinstance(net.association, StrongestBS):
        return "strongest"
    if isinstance(net.path_loss, ThreeD):
        return "threed"
    if isinstance(net.path_loss, MmWave):
        return "mmwave"
    return "closest"


def cmd_coverage(args):
    if args.engine:
        engines = [e.strip() for e in args.engine.split(",")]
    else:
        spec = _read_config(args.config, args, need_sweep=False)
        engines = [_default_engine(spec.net)]
    return _single(args, engines)


def cmd_simulate(args):
    return _single(args, ["simulate"])


def _parse_pairs(text):
    if not text:
        return []
    out = []
    for item in text.split(";"):
        a, A = item.split(",")
        out.append((float(a), float(A)))
    return out


def _named_kernel(name):
    name = name.strip().lower()
    if name == "exp":
        return foxh.exp_kernel()
    if name == "heaviside":
        return foxh.heaviside_kernel()
    if name.startswith("upper_gamma:"):
        return foxh.upper_gamma_kernel(float(name.split(":")[1]))
    if name.startswith("power:"):
        return foxh.power_kernel(float(name.split(":")[1]))
    if name.startswith("wright:"):
        return cv.wright_kernel(float(name.split(":")[1]))
    raise ConfigError(f"unknown kernel {name!r}")


def cmd_eval_foxh(args):
    if args.kernel:
        params = _named_kernel(args.kernel)
    else:
        try:
            params = foxh.FoxHParams(args.u, args.v, _parse_pairs(args.upper),
                                     _parse_pairs(args.lower), args.kappa, args.c)
        except ValueError as e:
            raise ConfigError(f"bad kernel parameters: {e}") from None
    tol = args.tol if args.tol is not None else 1e-9
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["z", "value", "residual", "error"])
    bad = 0
    for z in args.z:
        try:
            v, r = foxh.eval(params, z, tol, return_residual=True)
            w.writerow([fmt(z), fmt(v), fmt(r), ""])
        except UdnError as e:
            bad += 1
            w.writerow([fmt(z), "nan", "nan", f"{type(e).__name__}: {e}"])
    sys.stdout.write(out.getvalue())
    return int(bad > 0)


def selftest_rows():
    """Identity suite: exp, Heaviside and incomplete-gamma kernels."""
    from scipy import special
    rows = []
    x = np.linspace(0.0, 20.0, 50)
    err = float(np.max(np.abs(foxh.eval(foxh.exp_kernel(), x) - np.exp(-x))))
    rows.append(("exp", err, err < 1e-10))
    xs = np.concatenate((np.linspace(0.0, 0.999, 40), np.linspace(1.001, 5.0, 40)))
    hv = foxh.eval(foxh.heaviside_kernel(), xs)
    err = float(np.max(np.abs(hv - (xs < 1.0))))
    rows.append(("heaviside", err, err < 1e-8))
    xq = np.linspace(0.0, 20.0, 41)
    errs = []
    for n in (1, 2, 3, 5):
        v = foxh.eval(foxh.upper_gamma_kernel(n), xq) / math.gamma(n)
        errs.append(float(np.max(np.abs(v - special.gammaincc(n, xq)))))
    rows.append(("upper_gamma", max(errs), max(errs) < 1e-8))
    return rows


def cmd_selftest(args):
    rows = selftest_rows()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["identity", "max_abs_error", "pass"])
    for name, err, ok in rows:
        w.writerow([name, fmt(err), "pass" if ok else "FAIL"])
    return int(not all(r[2] for r in rows))


def cmd_figure(args):
    from .figures import reproduce_figure
    paths, bad = reproduce_figure(args.n, args.out, args)
    for p in paths:
        print(p)
    return int(bad)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=lambda s: int(s, 0), help="master RNG seed")
    common.add_argument("--trials", type=int, help="Monte Carlo trials")
    common.add_argument("--tol", type=float, help="numerical tolerance")
    common.add_argument("--threads", type=int, help="worker threads")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override a config entry (repeatable)")

    p = argparse.ArgumentParser(prog="udncov", description="Coverage of dense wireless networks")
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("eval-foxh", parents=[common], help="evaluate a Fox H kernel")
    s.add_argument("z", type=float, nargs="+")
    s.add_argument("--kernel", help="exp | heaviside | upper_gamma:N | power:D | wright:D")
    s.add_argument("--u", type=int, default=1)
    s.add_argument("--v", type=int, default=0)
    s.add_argument("--upper", default="", help="a,A;a,A;...")
    s.add_argument("--lower", default="0,1", help="b,B;b,B;...")
    s.add_argument("--kappa", type=float, default=1.0)
    s.add_argument("--c", type=float, default=1.0)
    s.set_defaults(func=cmd_eval_foxh)

    for name, fn, hlp in (("coverage", cmd_coverage, "analytic coverage of one network"),
                          ("simulate", cmd_simulate, "Monte Carlo coverage of one network")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("config")
        s.add_argument("--out")
        if name == "coverage":
            s.add_argument("--engine", help="comma-separated engines")
        s.set_defaults(func=fn)

    s = sub.add_parser("sweep", parents=[common], help="run a parameter sweep")
    s.add_argument("config")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("figure", parents=[common], help="reproduce a figure's data")
    s.add_argument("n", type=int, choices=range(1, 8))
    s.add_argument("--out", default=".")
    s.set_defaults(func=cmd_figure)

    s = sub.add_parser("selftest", parents=[common], help="run the identity suite")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"udncov: config error: {e}", file=sys.stderr)
        return 2
    except UdnError as e:
        print(f"udncov: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
