import csv
import io
import math

import pytest

from udncov import cli
from udncov.config import load, parse_grid
from udncov.errors import ConfigError
from udncov.figures import figure_rows

BASE = """\
[network]
association = strongest
path_loss = unbounded
alpha = 4

[tier.1]
density = 1e-3
power = 1
threshold = 1
fading = gamma(m=1)

[sweep]
variable = lambda
grid = logspace(-4, -2, 10)
engines = strongest, simulate

[run]
seed = 7
trials = 20000
"""


def run_cli(capsys, *argv):
    rc = cli.main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def write(tmp_path, text, name="net.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_sweep_rows_and_values(tmp_path, capsys):
    rc, out, _ = run_cli(capsys, "sweep", write(tmp_path, BASE))
    assert rc == 0
    assert out.splitlines()[0] == ",".join(cli.HEADER)
    rows = rows_of(out)
    assert len(rows) == 20
    for r in rows:
        if r["engine"] == "strongest":
            assert float(r["coverage"]) == pytest.approx(2 / math.pi, abs=1e-12)
        else:
            ci = float(r["residual_or_ci"])
            assert abs(float(r["coverage"]) - 2 / math.pi) < 2 * ci
            assert int(r["trials"]) == 20000


def test_sweep_is_deterministic(tmp_path, capsys):
    path = write(tmp_path, BASE.replace("logspace(-4, -2, 10)", "1e-3, 2e-3"))
    _, a, _ = run_cli(capsys, "sweep", path)
    _, b, _ = run_cli(capsys, "sweep", path, "--threads", "3")
    strip = lambda t: [r[:6] for r in csv.reader(io.StringIO(t))]
    assert strip(a) == strip(b)


def test_numbers_round_trip():
    x = 0.1 + 0.2
    assert float(cli.fmt(x)) == x


def test_malformed_fading_names_field(tmp_path, capsys):
    rc, out, err = run_cli(capsys, "sweep",
                           write(tmp_path, BASE.replace("gamma(m=1)", "gamma(m=-1)")))
    assert rc == 2
    assert "tier.1.fading" in err and ":10:" in err
    assert out == ""


def test_unknown_engine_and_grid_errors(tmp_path):
    with pytest.raises(ConfigError, match="engines"):
        load(BASE.replace("strongest, simulate", "strongest, nope"))
    with pytest.raises(ConfigError, match="grid"):
        load(BASE.replace("logspace(-4, -2, 10)", "3, 2"))
    with pytest.raises(ConfigError, match="after --set"):
        load(BASE, overrides=["tier.1.fading=rice(k=-1)"])


def test_set_override(tmp_path, capsys):
    rc, out, _ = run_cli(capsys, "sweep", write(tmp_path, BASE), "--set",
                         "sweep.engines=strongest", "--set", "sweep.grid=1e-3")
    assert rc == 0
    assert len(rows_of(out)) == 1


def test_engine_errors_go_to_rows(tmp_path, capsys):
    text = BASE.replace("strongest, simulate", "strongest, mmwave")
    rc, out, _ = run_cli(capsys, "sweep", write(tmp_path, text))
    rows = rows_of(out)
    assert rc == 1
    assert len(rows) == 20
    assert all(r["error"].startswith("InvalidAssociation") for r in rows if "mmwave" in r["engine"])
    assert all(r["error"] == "" for r in rows if r["engine"] == "strongest")


def test_coverage_and_simulate_commands(tmp_path, capsys):
    text = BASE.replace("association = strongest", "association = adhoc\nr = 10")
    path = write(tmp_path, text)
    rc, out, _ = run_cli(capsys, "coverage", path)
    assert rc == 0
    assert float(rows_of(out)[0]["coverage"]) == pytest.approx(math.exp(-math.pi ** 2 / 20))
    rc, out, _ = run_cli(capsys, "simulate", path, "--trials", "2000")
    assert rc == 0 and rows_of(out)[0]["trials"] == "2000"


def test_eval_foxh(capsys):
    rc, out, _ = run_cli(capsys, "eval-foxh", "--kernel", "exp", "0.5", "2")
    assert rc == 0
    vals = [float(r["value"]) for r in rows_of(out)]
    assert vals == pytest.approx([math.exp(-0.5), math.exp(-2)], abs=1e-12)
    rc, out, _ = run_cli(capsys, "eval-foxh", "--lower", "0,1;2,1", "--u", "2", "1.0")
    assert rc == 0
    rc, out, _ = run_cli(capsys, "eval-foxh", "--kernel", "exp", "-1")
    assert rc == 1 and "BadParameter" in out


def test_selftest(capsys):
    rc, out, _ = run_cli(capsys, "selftest")
    assert rc == 0
    assert "FAIL" not in out


def test_parse_grid():
    assert parse_grid("1, 2,4") == [1.0, 2.0, 4.0]
    assert parse_grid("range(0, 3)") == [0.0, 1.0, 2.0]
    assert parse_grid("logspace(0, 2, 3)") == pytest.approx([1, 10, 100])


def test_figure1_layout():
    rows = figure_rows(1, engines=["closest", "strongest"])
    labels = {r[2].split(":", 1)[1] for r in rows}
    assert len(labels) == 4
    assert all(r[-1] == "" for r in rows)


def _curves(rows, engine):
    out = {}
    for r in rows:
        eng, label = r[2].split(":", 1)
        if eng == engine:
            out.setdefault(label, []).append(float(r[3]))
    return out


def test_figure6_ordering():
    c = _curves(figure_rows(6, engines=["adhoc"]), "adhoc")
    last = {k: v[-1] for k, v in c.items()}
    assert last["superlinear"] > last["linear"] > last["sublinear"] > last["constant"]


def test_figure7_non_increasing():
    c = _curves(figure_rows(7, engines=["threed"]), "threed")
    assert len(c) == 3
    for v in c.values():
        assert all(b <= a + 1e-12 for a, b in zip(v, v[1:]))


def test_figure_command_writes_csv(tmp_path, capsys):
    rc, out, _ = run_cli(capsys, "figure", "5", "--out", str(tmp_path), "--trials", "1000",
                         "--set", "sweep.grid=0,10")
    assert rc == 0
    text = (tmp_path / "fig5.csv").read_text()
    assert text.startswith("variable,value,engine")
    assert "\r" not in text
