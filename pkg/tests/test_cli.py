import io
import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from folium import Involution, OneForm, Series1, involution_from_conjugator
from folium.cli import EXIT_DOMAIN, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, load_schema, run
from folium.rational import RationalMap

MODEL = OneForm.from_terms({(0, 2): 1.0, (3, 0): 0.5}, {(1, 1): -1.0})


def call(*argv, env_seed=None, monkeypatch=None):
    if monkeypatch is not None:
        if env_seed is None:
            monkeypatch.delenv("FOLIUM_SEED", raising=False)
        else:
            monkeypatch.setenv("FOLIUM_SEED", str(env_seed))
    buf = io.StringIO()
    code = run([str(a) for a in argv], out=buf)
    text = buf.getvalue()
    report = json.loads(text) if text else None
    if report is not None:
        jsonschema.validate(report, load_schema())
    return code, report, text


@pytest.fixture
def files(tmp_path):
    def write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return path

    inv = involution_from_conjugator(Series1([0, 1, 0.3, -0.1, 0.05], 12))
    return {
        "model": write("model.json", MODEL.to_json()),
        "minus_t": write("minus_t.json", (-Series1.identity(8)).to_json()),
        "inv": write("inv.json", inv.to_json()),
        "cubic": write("cubic.json", RationalMap.polynomial([0, -3, 0, 1]).to_json()),
        "bad": write("bad.json", {"frame": "xy", "p": {"coeffs": [[[0, 0]]]}, "q": {"coeffs": [[[0, 0]]]}}),
        "tmp": tmp_path,
    }


def test_t1_example(files, monkeypatch):
    code, rep, _ = call("t1", "--form", files["model"], monkeypatch=monkeypatch)
    assert code == EXIT_OK and rep["result"]["beta"] == [0.5, 0.0]
    assert rep["schema"] == "folium.report/v1" and rep["config"]["N"] == 24


def test_blowup_and_involution(files, monkeypatch):
    code, rep, _ = call("blowup", "--form", files["model"], monkeypatch=monkeypatch)
    assert code == EXIT_OK and rep["result"]["k"] == 3
    code, rep, _ = call("involution", "--form", files["model"], "--order", 10, monkeypatch=monkeypatch)
    inv = Involution.from_json(rep["result"]["involution"])
    assert inv.series.max_abs_diff(-Series1.identity(10)) <= 1e-12


def test_check_inv_minus_t(files, monkeypatch):
    code, rep, _ = call("check-inv", "--series", files["minus_t"], "--k", 5, monkeypatch=monkeypatch)
    assert code == EXIT_OK and rep["result"]["verified_order"] >= 5 and rep["result"]["passed"]


def test_gtpath_slopes(files, monkeypatch):
    code, rep, _ = call("gtpath", "--inv", files["inv"], "--m", 4, "--u", 0.1, monkeypatch=monkeypatch)
    assert code == EXIT_OK and rep["result"]["slope"] == pytest.approx([-2.0, 0.0], abs=1e-12)
    # for odd m the two u t^m contributions cancel
    code, rep, _ = call("gtpath", "--inv", files["inv"], "--m", 3, "--u", 0.1, monkeypatch=monkeypatch)
    assert code == EXIT_OK and rep["result"]["slope"] == pytest.approx([0.0, 0.0], abs=1e-12)


def test_orbit_norms_critical_monodromy(files, monkeypatch):
    code, rep, _ = call("orbit", "--inv1", files["inv"], "--inv2", files["inv"], monkeypatch=monkeypatch)
    assert code == EXIT_OK and rep["result"]["equivalent"]
    code, rep, _ = call("norms", "--series", files["minus_t"], "--lambda", 0.5, monkeypatch=monkeypatch)
    assert code == EXIT_OK and rep["result"]["norm_d"] == 1.0
    code, rep, _ = call("critical", "--map", files["cubic"], monkeypatch=monkeypatch)
    assert rep["result"]["riemann_hurwitz"] == {"sum": 4, "expected": 4}
    code, rep, _ = call("monodromy", "--map", files["cubic"], monkeypatch=monkeypatch)
    assert code == EXIT_OK and rep["result"]["order"] == 6
    code, rep, _ = call("monodromy", "--map", files["cubic"], "--around", 2, monkeypatch=monkeypatch)
    assert code == EXIT_OK and rep["result"]["cycle_type"] == [2, 1]
    code, rep, _ = call("monodromy", "--map", files["cubic"], "--around", 5, monkeypatch=monkeypatch)
    assert code == EXIT_DOMAIN


def test_classify(files, monkeypatch):
    from folium.rational import RationalFamily
    num = np.zeros((4, 4), dtype=complex)
    # 3 + (t - x)^3 truncated at x^3
    for i in range(4):
        num[3 - i, i] = [-1, 3, -3, 1][i]
    num[0, 0] += 3
    fam = RationalFamily.from_tables(num, np.eye(4, 1))
    path = files["tmp"] / "fam.json"
    path.write_text(json.dumps(fam.to_json()))
    code, rep, _ = call("classify", "--family", path, monkeypatch=monkeypatch)
    (b,) = rep["result"]["branches"]
    assert code == EXIT_OK and b["kind"] == "level" and b["dR_factor"]["exponent"] == 2


def test_quintic_search_and_verify(files, monkeypatch):
    code, rep, text = call("quintic", "--seed", 7, "--budget", 100000, monkeypatch=monkeypatch)
    assert code == EXIT_OK and rep["result"]["verdict"]["passed"]
    assert rep["config"]["seed"] == 7
    path = files["tmp"] / "q.json"
    path.write_text(json.dumps(rep["result"]["certificate"]))
    code, rep, _ = call("quintic", "--verify", path, monkeypatch=monkeypatch)
    assert code == EXIT_OK and rep["result"]["passed"]


def test_exit_codes(files, monkeypatch):
    code, rep, _ = call("t1", "--form", files["tmp"] / "missing.json", monkeypatch=monkeypatch)
    assert code == EXIT_DOMAIN and "cannot read" in rep["error"]["message"]
    code, rep, _ = call("involution", "--form", files["bad"], monkeypatch=monkeypatch)
    assert code == EXIT_DOMAIN
    code, rep, _ = call("quintic", "--budget", 1, "--seed", 3, monkeypatch=monkeypatch)
    assert code == EXIT_NUMERICAL and "budget 1 (seed 3)" in rep["error"]["message"]
    code, rep, text = call("frobnicate", monkeypatch=monkeypatch)
    assert code == EXIT_USAGE and text == ""
    code, _, _ = call(monkeypatch=monkeypatch)
    assert code == EXIT_USAGE
    code, rep, _ = call("check-inv", "--series", files["minus_t"], "--N", 2, monkeypatch=monkeypatch)
    assert code == EXIT_DOMAIN and "N must be >= 4" in rep["error"]["message"]


def test_numerical_exit_code(monkeypatch, files):
    import folium.cli as cli

    def boom(seed, budget):
        from folium import NumericalError
        raise NumericalError("no certificate")

    monkeypatch.setattr(cli, "quintic_search", boom)
    code, rep, _ = call("quintic", monkeypatch=monkeypatch)
    assert code == EXIT_NUMERICAL and rep["error"]["type"] == "NumericalError"


def test_deterministic_output(files, monkeypatch):
    a = call("orbit", "--inv1", files["inv"], "--inv2", files["inv"], "--seed", 4, monkeypatch=monkeypatch)
    b = call("orbit", "--inv1", files["inv"], "--inv2", files["inv"], "--seed", 4, monkeypatch=monkeypatch)
    assert a[2] == b[2]
    a = call("quintic", "--seed", 11, monkeypatch=monkeypatch)
    b = call("quintic", "--seed", 11, monkeypatch=monkeypatch)
    assert a[2] == b[2]


def test_config_precedence(files, monkeypatch):
    cfg = files["tmp"] / "folium.toml"
    cfg.write_text("seed = 5\nN = 12\n")
    _, rep, _ = call("check-inv", "--series", files["minus_t"], "--config", cfg, monkeypatch=monkeypatch)
    assert rep["config"]["seed"] == 5 and rep["config"]["N"] == 12
    _, rep, _ = call("check-inv", "--series", files["minus_t"], "--config", cfg, env_seed=8,
                     monkeypatch=monkeypatch)
    assert rep["config"]["seed"] == 8
    _, rep, _ = call("check-inv", "--series", files["minus_t"], "--config", cfg, "--seed", 9, env_seed=8,
                     monkeypatch=monkeypatch)
    assert rep["config"]["seed"] == 9
    cfg.write_text("colour = 1\n")
    code, rep, _ = call("check-inv", "--series", files["minus_t"], "--config", cfg, monkeypatch=monkeypatch)
    assert code == EXIT_DOMAIN and "unknown configuration key" in rep["error"]["message"]
    code, rep, _ = call("check-inv", "--series", files["minus_t"], env_seed="abc", monkeypatch=monkeypatch)
    assert code == EXIT_DOMAIN


def test_float_format(files, monkeypatch):
    _, _, text = call("norms", "--series", files["minus_t"], "--lambda", 0.1, monkeypatch=monkeypatch)
    assert '"norm_d": 1.0' in text
    _, rep, _ = call("norms", "--series", files["inv"], monkeypatch=monkeypatch)
    # 17 significant digits round-trip a double exactly
    from folium.series import norm_l1
    inv = Involution.from_json(json.loads(files["inv"].read_text()))
    assert rep["result"]["norm_l1"] == norm_l1(inv.series)


def test_console_script(files):
    proc = subprocess.run([sys.executable, "-m", "folium.cli", "t1", "--form", str(files["model"])],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["beta"] == [0.5, 0.0]
