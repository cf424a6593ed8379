"""Figure recipes: base configs in ``recipes/`` plus per-curve overrides.

Each figure becomes one CSV whose ``engine`` column carries ``engine:curve``
labels, so analytic and simulated columns of a curve sit side by side.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path

from .cli import run_sweep, write_csv
from .config import load

LN_MU = -0.287823   # unit-mean lognormal with sigma = 0.5 (decades)

CURVES = {
    1: [("closest,beta=0dB", []),
        ("closest,beta=5dB", ["tier.1.threshold_db=5", "tier.2.threshold_db=5"]),
        ("strongest,beta=0dB", ["network.association=strongest",
                                "sweep.engines=strongest,simulate"]),
        ("strongest,beta=5dB", ["network.association=strongest",
                                "sweep.engines=strongest,simulate",
                                "tier.1.threshold_db=5", "tier.2.threshold_db=5"])],
    2: [("bounded", []),
        ("unbounded", ["network.path_loss=unbounded"])],
    3: [(name, [f"tier.1.fading={spec}"]) for name, spec in (
        ("rayleigh", "gamma(m=1)"),
        ("nakagami2", "gamma(m=2)"),
        ("rice3", "rice(k=3)"),
        ("weibull", "gengamma(m=1, eta=2)"),
        ("lognormal", f"lognormal(mu={LN_MU}, sigma=0.5)"))]
       # heavy-tailed: no exponential-class asymptote
       + [("fisherf", ["tier.1.fading=fisherf(m=2, ms=3)", "sweep.engines=adhoc,simulate"])],
    4: [("chi=1", []),
        ("chi=2", ["tier.1.interferer_fading=gammagain(m=2, theta=1)"])],
    5: [("K1=K2=K", ["sweep.k_tiers=1,2"]),
        ("K1=K,K2=0", ["sweep.k_tiers=1", "tier.2.fading=gamma(m=1)"])],
    6: [("constant", ["sweep.n_t_scale=0"]),
        ("sublinear", ["sweep.n_t_exponent=0.75"]),
        ("linear", ["sweep.n_t_exponent=1.5", "sweep.engines=adhoc,scaling_limit,simulate"]),
        ("superlinear", ["sweep.n_t_exponent=2.25"])],
    7: [(f"N_t={n}", [f"tier.1.antennas={n}"]) for n in (1, 4, 16)],
}


def recipe_text(n: int) -> str:
    return resources.files("udncov").joinpath("recipes", f"fig{n}.ini").read_text("utf-8")


def figure_rows(n: int, extra=None, run=None, engines=None):
    """Rows of figure ``n``; ``engines`` optionally restricts the engine set."""
    if n not in CURVES:
        raise ValueError("figure number must be 1..7")
    base = recipe_text(n)
    rows = []
    for label, ov in CURVES[n]:
        spec = load(base, f"fig{n}.ini", list(ov) + list(extra or []))
        spec.label = label
        if run:
            spec.run.update({k: v for k, v in run.items() if v is not None})
        if engines is not None:
            spec.engines = [e for e in spec.engines if e in engines]
        rows.extend(run_sweep(spec, spec.run.get("threads", 1)))
    return rows


def reproduce_figure(n: int, out_dir=".", args=None):
    """Write ``fig<n>.csv`` into ``out_dir``; returns ``([path], any_error)``."""
    run = {}
    extra = []
    if args is not None:
        run = {k: getattr(args, k, None) for k in ("seed", "trials", "tol", "threads")}
        extra = getattr(args, "set", []) or []
    rows = figure_rows(n, extra, run)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"fig{n}.csv"
    write_csv(rows, path)
    return [str(path)], any(r[-1] for r in rows)
