import json
import math
import os
import subprocess
import sys

import pytest

from herzlab.cli import (CSV_HEADER, KINDS, NUMERICS_DEFAULTS, emit_report, main, parse_config,
                         report_json, run)
from herzlab.errors import ConfigError

MINIMAL = """
experiments:
  - id: chi01
    kind: trace_ratio
    params: {gamma: 0.25, p1: 2, p2: 3, q1: 1, q2: 2, measure: {kind: matched_power}}
    function: {indicator: [0, 1]}
"""

QUICK = """
experiments:
  - id: chi01
    kind: trace_ratio
    params: {gamma: 0.25, p1: 2, p2: 3, q1: 1, q2: 2, measure: {kind: matched_power}}
    function: {indicator: [0, 1]}
  - id: div
    kind: trace_ratio
    params: {gamma: 0.25, p1: 2, p2: 3, q1: 2, q2: 2, lambda: 0.6, measure: {kind: matched_power}}
    function: {annulus: 1}
  - id: balls
    kind: necessity
    params: {gamma: 0.25, p1: 2, p2: 3, q1: 2, q2: 2, measure: {kind: matched_power}}
    family: {radii: [0.5, 1, 2], centers: [0, 1]}
  - id: probe
    kind: limiting_probe
    params: {gamma: 0.25, p1: 2, p2: 2, q1: 1, q2: 2, measure: {kind: power_weight, beta: 0.5}}
    function: {indicator: [0, 1]}
    r_explore: 1.5
"""

FK = """
experiments:
  - id: fk
    kind: optimality_fk
    params: {gamma: 0.25, p1: 2, p2: 3, q1: 3, q2: 2, measure: {kind: matched_power}}
    family: {k_min: 4, k_max: 6}
"""


def errors_of(text):
    with pytest.raises(ConfigError) as ei:
        parse_config(text)
    return ei.value.errors


# -- parsing -----------------------------------------------------------------------


def test_minimal_spec_defaults():
    (spec,) = parse_config(MINIMAL)
    assert spec.id == "chi01" and spec.kind == "trace_ratio"
    assert spec.numerics == NUMERICS_DEFAULTS
    assert spec.numerics["quad_tol"] == 1e-8
    assert (spec.numerics["t_min"], spec.numerics["t_max"]) == (-60, 60)
    assert spec.params["measure"] == {"kind": "power_weight", "beta": 0.75, "n": 1}


def test_bare_list_and_empty():
    assert parse_config("") == []
    assert parse_config("experiments: []") == []
    body = MINIMAL.split("experiments:\n", 1)[1]
    assert len(parse_config(body)) == 1


def test_duplicate_id():
    errs = errors_of(MINIMAL + MINIMAL.split("experiments:\n", 1)[1])
    assert any("duplicate id 'chi01'" in e for e in errs)


def test_fk_missing_k_max():
    errs = errors_of(FK.replace(", k_max: 6", ""))
    assert any("family.k_max" in e for e in errs)


def test_unknown_kind():
    errs = errors_of(MINIMAL.replace("trace_ratio", "teleport"))
    assert any("kind" in e and "teleport" in e for e in errs)


def test_non_numeric_value_names_key():
    errs = errors_of(MINIMAL.replace("gamma: 0.25", "gamma: quarter"))
    assert any("params.gamma" in e for e in errs)
    errs = errors_of(MINIMAL.replace("function:", "numerics: {quad_tol: tight}\n    function:"))
    assert any("numerics.quad_tol" in e for e in errs)


def test_errors_carry_line_context():
    text = MINIMAL + """  - id: second
    kind: optimality_fk
    params: {gamma: 0.25, p1: 2, p2: 3, q1: 3, q2: 2, measure: {kind: matched_power}}
    family: {k_min: 4}
"""
    (err,) = errors_of(text)
    assert err.startswith("experiments[1] (line 7)")


def test_all_errors_reported_together():
    text = """
- {id: a, kind: nope}
- {id: b, kind: trace_ratio, params: {gamma: x, p1: 2, p2: 3, q1: 1, q2: 2}, function: {indicator: [0, 1]}}
"""
    errs = errors_of(text)
    assert len(errs) == 2


def test_yaml_syntax_error():
    errs = errors_of("experiments: [\n")
    assert errs[0].startswith("YAML syntax error")


def test_tol_override():
    (spec,) = parse_config(MINIMAL, tol=1e-6)
    assert spec.numerics["quad_tol"] == 1e-6
    assert spec.policy().tail_tolerance == 1e-6


def test_kinds_listed():
    assert set(KINDS) == {"trace_ratio", "necessity", "optimality_fk", "annulus_divergence", "hls",
                          "sobolev", "gns", "limiting_probe", "semigroup", "fourier_symbol"}


# -- running and reports -------------------------------------------------------------


def test_empty_run_header_only(tmp_path):
    cfg = tmp_path / "empty.yaml"
    cfg.write_text("experiments: []\n")
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "report.csv").read_text() == ",".join(CSV_HEADER) + "\n"


def test_fk_layout(tmp_path):
    cfg = tmp_path / "fk.yaml"
    cfg.write_text(FK)
    assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 0
    names = sorted(p.name for p in (tmp_path / "o").iterdir())
    assert names == ["fk_source.dat", "fk_target.dat", "report.csv", "timings.json"]
    rows = [l.split() for l in (tmp_path / "o" / "fk_source.dat").read_text().splitlines()]
    assert [float(r[0]) for r in rows] == [4.0, 5.0, 6.0]
    src = [float(r[1]) for r in rows]
    assert src[0] == pytest.approx(math.sqrt(2 * math.log(2)) * 4 ** (1 / 3), rel=1e-12)


def test_json_round_trip_bit_exact(tmp_path):
    records, _ = run(parse_config(QUICK))
    emit_report(records, tmp_path, "json")
    back = json.loads((tmp_path / "report.json").read_text())["records"]
    assert back == json.loads(json.dumps(records))
    for a, b in zip(records, back):
        for k, v in a["outputs"].items():
            if isinstance(v, float):
                assert b["outputs"][k] == v or (math.isnan(v) and math.isnan(b["outputs"][k]))
    assert report_json(back) == report_json(records)


def test_flags_survive_verbatim(tmp_path):
    records, _ = run(parse_config(QUICK))
    by_id = {r["id"]: r for r in records}
    assert "diverged" in by_id["div"]["flags"]
    assert "exploratory: open question" in by_id["probe"]["flags"]
    emit_report(records, tmp_path, "csv")
    text = (tmp_path / "report.csv").read_text()
    assert ",diverged\n" in text
    assert "exploratory: open question" in text


def test_spec_echo_in_record():
    (rec,), _ = run(parse_config(MINIMAL))
    assert rec["spec"]["params"]["gamma"] == 0.25
    assert rec["spec"]["numerics"] == NUMERICS_DEFAULTS
    assert rec["outputs"]["ratio"] == pytest.approx(3.918090532632118, rel=1e-9)


def test_exit_codes(tmp_path):
    good = tmp_path / "good.yaml"
    good.write_text(MINIMAL)
    assert main(["run", str(good), "--out", str(tmp_path / "a")]) == 0
    bad_cfg = tmp_path / "bad.yaml"
    bad_cfg.write_text(MINIMAL.replace("trace_ratio", "teleport"))
    assert main(["run", str(bad_cfg), "--out", str(tmp_path / "b")]) == 2
    hard = tmp_path / "hard.yaml"
    hard.write_text("""experiments:
  - id: hls-bad
    kind: hls
    params: {gamma: 0.3, p1: 2, p2: 4, q1: 1, q2: 2, r1: 1, r2: 2}
    function: {indicator: [0, 1]}
""" + MINIMAL.split("experiments:\n", 1)[1])
    assert main(["run", str(hard), "--out", str(tmp_path / "c")]) == 1
    text = (tmp_path / "c" / "report.csv").read_text()
    assert "hls-bad,hls,error," in text and "chi01,trace_ratio,ratio," in text
    assert main(["run", "no-such-experiment", "--out", str(tmp_path / "d")]) == 2


def test_divergence_is_not_an_error(tmp_path):
    cfg = tmp_path / "div.yaml"
    cfg.write_text(QUICK)
    assert main(["run", str(cfg), "--out", str(tmp_path / "o"), "--format", "json"]) == 0


def test_jobs_byte_identical(tmp_path):
    cfg = tmp_path / "q.yaml"
    cfg.write_text(QUICK)
    for j in ("1", "2"):
        assert main(["run", str(cfg), "--out", str(tmp_path / j), "--format", "json", "--jobs", j]) == 0
    assert (tmp_path / "1" / "report.json").read_bytes() == (tmp_path / "2" / "report.json").read_bytes()


def test_env_jobs(monkeypatch):
    from herzlab.cli import default_jobs
    monkeypatch.setenv("HERZLAB_JOBS", "3")
    assert default_jobs() == 3
    monkeypatch.setenv("HERZLAB_JOBS", "zero")
    assert default_jobs() == 1
    monkeypatch.delenv("HERZLAB_JOBS")
    assert default_jobs() == 1


def test_per_spec_output(tmp_path):
    cfg = tmp_path / "o.yaml"
    target = tmp_path / "mine"
    cfg.write_text(MINIMAL + f"    output: {{path: {target}, format: json}}\n")
    assert main(["run", str(cfg), "--out", str(tmp_path / "all")]) == 0
    data = json.loads((target / "report.json").read_text())
    assert data["records"][0]["id"] == "chi01"


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in ("example-3.1", "example-3.2", "prop-2.2", "thm-2.1-sweep", "cor-4.1", "thm-4.6",
                 "thm-2.4-probe"):
        assert name in out


def test_named_run(tmp_path):
    assert main(["run", "thm-2.4-probe", "--out", str(tmp_path), "--format", "json"]) == 0
    (rec,) = json.loads((tmp_path / "report.json").read_text())["records"]
    assert rec["outputs"]["ratio_r1"] == pytest.approx(1.8383261851682506, rel=1e-9)
    assert rec["flags"] == ["exploratory: open question"]


def test_verify_subset(capsys, tmp_path):
    out = tmp_path / "v.json"
    assert main(["verify", "--criteria", "5,6", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert [c["number"] for c in rep["criteria"]] == [5, 6] and rep["all_passed"]
    err = capsys.readouterr().err
    assert "criterion 5: PASS" in err and "criterion 6: PASS" in err
    assert main(["verify", "--criteria", "x"]) == 2


def test_module_entry_point(tmp_path):
    env = dict(os.environ, HERZLAB_JOBS="1")
    r = subprocess.run([sys.executable, "-m", "herzlab", "list"], capture_output=True, text=True,
                       env=env, timeout=120)
    assert r.returncode == 0 and "cor-4.1" in r.stdout
