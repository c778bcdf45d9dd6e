"""Command-line runner: parse experiment configs, run them, write reports.

Config files are YAML with a top-level ``experiments`` list::

    experiments:
      - id: fk
        kind: optimality_fk
        params: {gamma: 0.25, p1: 2, p2: 3, q1: 3, q2: 2, lambda: 0,
                 measure: {kind: matched_power}}
        family: {k_min: 4, k_max: 14}
        numerics: {quad_tol: 1.0e-8, t_min: -60, t_max: 60}

See the README for the keys each kind accepts.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import copy
import csv
import io
import json
import math
import os
import re
from pathlib import Path
import sys
import time

import yaml

from .errors import ConfigError, HerzlabError
from .measure import Measure
from .norms import TruncationPolicy
from .piecewise import PiecewisePowerFunction

__all__ = ["ExperimentSpec", "KINDS", "NUMERICS_DEFAULTS", "parse_config", "parse_records",
           "run", "run_spec", "emit_report", "verify", "main"]

KINDS = ("trace_ratio", "necessity", "optimality_fk", "annulus_divergence", "hls", "sobolev",
         "gns", "limiting_probe", "semigroup", "fourier_symbol")

NUMERICS_DEFAULTS = {"quad_tol": 1e-8, "t_min": -60, "t_max": 60, "grid_points": 2048}

# kinds that need the full trace parameter tuple
_TRACE_KINDS = ("trace_ratio", "necessity", "optimality_fk", "annulus_divergence", "hls",
                "sobolev", "gns", "limiting_probe")
_NEEDS_FUNCTION = ("hls", "sobolev", "gns", "limiting_probe")
_REQUIRED_FAMILY = {"optimality_fk": ("k_min", "k_max"), "necessity": ("radii",),
                    "annulus_divergence": ("lambda_grid",)}
_TOP_KEYS = {"id", "kind", "params", "family", "function", "numerics", "output", "order",
             "r_explore", "norm_families"}

CSV_HEADER = ("spec_id", "kind", "key", "value", "flag")


@dataclass(frozen=True)
class ExperimentSpec:
    """A validated experiment; ``record`` is the normalized config echo."""

    id: str
    kind: str
    params: dict
    family: dict = field(default_factory=dict)
    function: dict = None
    numerics: dict = field(default_factory=lambda: dict(NUMERICS_DEFAULTS))
    output: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    def echo(self):
        d = {"id": self.id, "kind": self.kind, "params": self.params, "family": self.family,
             "numerics": self.numerics}
        if self.function is not None:
            d["function"] = self.function
        if self.output:
            d["output"] = self.output
        d.update(self.options)
        return copy.deepcopy(d)

    def policy(self):
        n = self.numerics
        return TruncationPolicy(int(n["t_min"]), int(n["t_max"]), tail_tolerance=float(n["quad_tol"]))


# ---------------------------------------------------------------------------
# parsing


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _as_number(v):
    """YAML numbers, plus the strings 'inf' / '-inf'."""
    if _is_number(v):
        return float(v)
    if isinstance(v, str) and v.strip().lower() in ("inf", "+inf", "-inf", "infinity"):
        return float(v.strip().lower().replace("infinity", "inf"))
    raise ValueError


def _experiment_lines(text):
    """Start line (1-based) of each item of the ``experiments`` list, when available."""
    try:
        root = yaml.compose(text)
    except yaml.YAMLError:
        return []
    if root is None:
        return []
    node = root
    if isinstance(root, yaml.MappingNode):
        node = next((v for k, v in root.value if getattr(k, "value", None) == "experiments"), None)
    if not isinstance(node, yaml.SequenceNode):
        return []
    return [item.start_mark.line + 1 for item in node.value]


def parse_config(text, tol=None):
    """Parse YAML config text into validated :class:`ExperimentSpec` records.

    Raises :class:`ConfigError` listing every problem found, each naming the
    offending key and the line of its experiment.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"YAML syntax error: {exc}"]) from None
    if doc is None:
        return []
    if isinstance(doc, dict):
        unknown = set(doc) - {"experiments"}
        if unknown:
            raise ConfigError([f"unknown top-level key {k!r}" for k in sorted(unknown)])
        records = doc.get("experiments") or []
    else:
        records = doc
    if not isinstance(records, list):
        raise ConfigError(["experiments: expected a list"])
    return parse_records(records, tol=tol, lines=_experiment_lines(text))


def parse_records(records, tol=None, lines=()):
    """Validate already-loaded config records (see :func:`parse_config`)."""
    errors, specs, seen = [], [], set()
    for i, rec in enumerate(records):
        where = f"experiments[{i}]" + (f" (line {lines[i]})" if i < len(lines) else "")
        errs = []
        spec = _parse_one(rec, errs, tol)
        if spec is not None:
            if spec.id in seen:
                errs.append(f"id: duplicate id {spec.id!r}")
            seen.add(spec.id)
        errors.extend(f"{where}: {e}" for e in errs)
        if not errs:
            specs.append(spec)
    if errors:
        raise ConfigError(errors)
    return specs


def _parse_one(rec, errs, tol):
    if not isinstance(rec, dict):
        errs.append("expected a mapping")
        return None
    for k in sorted(set(rec) - _TOP_KEYS):
        errs.append(f"{k}: unknown key")
    sid = rec.get("id")
    if not isinstance(sid, str) or not sid:
        errs.append("id: missing or not a string")
        sid = None
    kind = rec.get("kind")
    if kind not in KINDS:
        errs.append("kind: missing" if kind is None else f"kind: unknown kind {kind!r}")
        return None

    params = rec.get("params") or {}
    if not isinstance(params, dict):
        errs.append("params: expected a mapping")
        params = {}
    params = _parse_params(kind, params, errs)

    family = rec.get("family") or {}
    if not isinstance(family, dict):
        errs.append("family: expected a mapping")
        family = {}
    family = _parse_family(kind, family, errs)

    function = rec.get("function")
    if kind in _NEEDS_FUNCTION or (kind == "trace_ratio" and family.get("functions") != "standard"):
        if function is None:
            errs.append("function: missing")
        elif not isinstance(function, dict):
            errs.append("function: expected a mapping")
        else:
            _check_function(kind, function, errs)

    numerics = dict(NUMERICS_DEFAULTS)
    raw_num = rec.get("numerics") or {}
    if not isinstance(raw_num, dict):
        errs.append("numerics: expected a mapping")
        raw_num = {}
    for k, v in raw_num.items():
        if k not in NUMERICS_DEFAULTS:
            errs.append(f"numerics.{k}: unknown key")
        elif not _is_number(v):
            errs.append(f"numerics.{k}: expected a number, got {v!r}")
        else:
            numerics[k] = v
    if tol is not None:
        numerics["quad_tol"] = float(tol)
    for k in ("t_min", "t_max", "grid_points"):
        if _is_number(numerics[k]) and numerics[k] != int(numerics[k]):
            errs.append(f"numerics.{k}: expected an integer")
        numerics[k] = int(numerics[k])
    if not numerics["t_min"] < numerics["t_max"]:
        errs.append("numerics.t_min: must be below numerics.t_max")
    if not numerics["quad_tol"] > 0:
        errs.append("numerics.quad_tol: must be positive")
    if numerics["grid_points"] < 16:
        errs.append("numerics.grid_points: must be at least 16")

    output = rec.get("output") or {}
    if not isinstance(output, dict):
        errs.append("output: expected a mapping")
        output = {}
    for k in sorted(set(output) - {"path", "format"}):
        errs.append(f"output.{k}: unknown key")
    if output.get("format", "csv") not in ("csv", "json"):
        errs.append("output.format: expected 'csv' or 'json'")

    options = {}
    if "order" in rec:
        if kind != "sobolev" or not isinstance(rec["order"], int) or rec["order"] < 1:
            errs.append("order: a positive integer, sobolev only")
        options["order"] = rec["order"]
    if "r_explore" in rec:
        try:
            options["r_explore"] = _as_number(rec["r_explore"])
        except ValueError:
            errs.append(f"r_explore: expected a number, got {rec['r_explore']!r}")
    if "norm_families" in rec:
        if rec["norm_families"] not in ("herz", "lorentz_herz"):
            errs.append("norm_families: expected 'herz' or 'lorentz_herz'")
        options["norm_families"] = rec["norm_families"]

    if errs:
        return None
    return ExperimentSpec(sid, kind, params, family, copy.deepcopy(function), numerics,
                          dict(output), options)


def _parse_params(kind, raw, errs):
    out = {}
    if kind in _TRACE_KINDS:
        required = ("gamma", "p1", "p2", "q1", "q2")
        optional = ("lambda", "n", "r1", "r2")
    elif kind == "semigroup":
        required, optional = (), ("alpha", "beta")
    else:
        required, optional = (), ("gamma",)
    for k in required:
        if k not in raw:
            errs.append(f"params.{k}: missing")
    for k, v in raw.items():
        if k == "measure":
            continue
        if k not in required and k not in optional:
            errs.append(f"params.{k}: unknown key")
            continue
        try:
            out[k] = _as_number(v)
        except ValueError:
            errs.append(f"params.{k}: expected a number, got {v!r}")
    if "n" in out:
        if out["n"] not in (1.0, 2.0):
            errs.append("params.n: only n = 1 or 2 is supported")
        out["n"] = int(out["n"])
    if kind in _TRACE_KINDS:
        out.setdefault("lambda", 0.0)
        out.setdefault("n", 1)
        m = raw.get("measure", {"kind": "lebesgue"})
        if not isinstance(m, dict):
            errs.append("params.measure: expected a mapping")
        else:
            mk = m.get("kind", "lebesgue")
            if mk == "matched_power":
                if all(isinstance(out.get(k), float) for k in ("gamma", "p1", "p2")):
                    beta = out["p2"] * (1.0 / out["p1"] - out["gamma"])
                    out["measure"] = {"kind": "power_weight", "n": 1, "beta": beta}
            elif mk == "power_weight":
                if not _is_number(m.get("beta")):
                    errs.append("params.measure.beta: missing or not a number")
                else:
                    out["measure"] = {"kind": "power_weight", "n": int(m.get("n", 1)),
                                      "beta": float(m["beta"])}
            elif mk == "lebesgue":
                out["measure"] = {"kind": "lebesgue", "n": int(m.get("n", out["n"]))}
            else:
                errs.append(f"params.measure.kind: unknown measure kind {mk!r}")
            if "measure" in out and out["measure"]["n"] != out["n"]:
                errs.append("params.measure.n: does not match params.n")
    elif "measure" in raw:
        errs.append("params.measure: not used by this kind")
    return out


def _parse_family(kind, raw, errs):
    out = dict(raw)
    for k in _REQUIRED_FAMILY.get(kind, ()):
        if k not in raw:
            errs.append(f"family.{k}: missing")
    for k in ("k_min", "k_max"):
        if k in raw and not (isinstance(raw[k], int) and not isinstance(raw[k], bool)):
            errs.append(f"family.{k}: expected an integer, got {raw[k]!r}")
    if isinstance(raw.get("k_min"), int) and isinstance(raw.get("k_max"), int) \
            and raw["k_min"] > raw["k_max"]:
        errs.append("family.k_min: exceeds family.k_max")
    for k in ("radii", "centers", "lambda_grid", "scales", "thetas"):
        if k in raw:
            v = raw[k]
            if not isinstance(v, list) or not v:
                errs.append(f"family.{k}: expected a non-empty list of numbers")
                continue
            try:
                out[k] = [_as_number(x) for x in v]
            except ValueError:
                errs.append(f"family.{k}: expected a non-empty list of numbers")
    if "functions" in raw and raw["functions"] != "standard":
        errs.append("family.functions: only 'standard' is built in")
    known = {"k_min", "k_max", "radii", "centers", "lambda_grid", "scales", "thetas", "functions"}
    for k in sorted(set(raw) - known):
        errs.append(f"family.{k}: unknown key")
    return out


def _check_function(kind, cfg, errs):
    if "radial" in cfg:
        if cfg["radial"] not in ("gaussian", "bump", "zero"):
            errs.append(f"function.radial: unknown radial function {cfg['radial']!r}")
        if kind not in ("sobolev", "gns"):
            errs.append("function.radial: only sobolev and gns accept radial functions")
        return
    if kind == "sobolev":
        errs.append("function.radial: sobolev needs a radial test function")
        return
    try:
        PiecewisePowerFunction.from_config(cfg)
    except (HerzlabError, TypeError, ValueError, KeyError) as exc:
        errs.append(f"function: {exc}")


# ---------------------------------------------------------------------------
# execution


def _trace_params(spec):
    from .experiments.params import TraceParams
    p = spec.params
    return TraceParams(p["gamma"], p["p1"], p["p2"], p["q1"], p["q2"], p["lambda"], n=p["n"],
                       measure=Measure.from_config(p["measure"]), r1=p.get("r1"), r2=p.get("r2"))


def _function(cfg, n=1):
    if "radial" in cfg:
        from .experiments.applications import RadialTestFunction
        return RadialTestFunction(cfg["radial"], int(cfg.get("n", n)), int(cfg.get("m", 4)),
                                  float(cfg.get("scale", 1.0)))
    return PiecewisePowerFunction.from_config(cfg)


def _flatten(prefix, obj, out):
    if isinstance(obj, dict):
        for k in obj:
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], out)
    elif isinstance(obj, bool) or obj is None or isinstance(obj, (int, float, str)):
        out[prefix] = obj


def _run_kind(spec):
    """Returns ``(outputs, tables, series, flags)``."""
    from .experiments import applications as app
    from .experiments import trace as tr

    kind, fam, pol = spec.kind, spec.family, spec.policy()
    outputs, tables, series, flags = {}, {}, {}, []
    if kind in _TRACE_KINDS:
        P = _trace_params(spec)
    if kind == "trace_ratio":
        nf = spec.options.get("norm_families", "herz")
        if fam.get("functions") == "standard":
            res = tr.trace_sweep([P], policy=pol)
            outputs["sup_ratio"] = max(res.ratios[0])
            outputs["last_step_change"] = res.last_step_change[0]
            outputs["truncation_growth"] = res.truncation_growth[0]
            outputs["all_converged"] = all(res.converged[0])
            for name, r, c in zip(res.names, res.ratios[0], res.converged[0]):
                outputs[f"ratio[{name}]"] = r
                if not c:
                    flags.append(f"diverged: {name}")
        else:
            r = tr.trace_ratio(_function(spec.function), P, nf, pol)
            d = r.to_dict()
            outputs.update({k: d[k] for k in ("source", "target", "ratio", "diverged")})
            tables["source_ledger"] = d["source_ledger"]
            tables["target_ledger"] = d["target_ledger"]
            flags.extend(r.flags)
    elif kind == "necessity":
        res = tr.necessity_check(P, fam["radii"], fam.get("centers", [0.0]), policy=pol)
        outputs["sup_ratio"] = res.sup_ratio
        outputs["exponent"] = res.exponent
        outputs["argmax_center"] = res.argmax_ball.center[0]
        outputs["argmax_radius"] = res.argmax_ball.radius
        outputs["sup_trace_ratio"] = res.sup_trace_ratio
        tables["balls"] = res.table
        if any(row.get("diverged") for row in res.table):
            flags.append("diverged")
    elif kind == "optimality_fk":
        res = tr.optimality_fk(P, (fam["k_min"], fam["k_max"]), policy=pol)
        s = res.series
        outputs["source_slope"] = res.source_fit.slope
        outputs["target_slope"] = res.target_fit.slope
        outputs["slope_gap"] = res.target_fit.slope - res.source_fit.slope
        outputs["source_max_residual"] = res.source_fit.max_residual
        outputs["target_max_residual"] = res.target_fit.max_residual
        tables["series"] = s.to_dict()
        series["fk_source"] = [[k, v] for k, v in zip(s.index, s.source_norms)]
        series["fk_target"] = [[k, v] for k, v in zip(s.index, s.target_norms)]
        if any(s.diverged_flags):
            flags.append("diverged")
    elif kind == "annulus_divergence":
        recs = tr.annulus_divergence(P, fam["lambda_grid"], f=_function(spec.function)
                                     if spec.function else None)
        tables["lambdas"] = [r.to_dict() for r in recs]
        outputs["window_lo"] = P.gamma - 1.0 / P.p1
        outputs["window_hi"] = 1.0 - 1.0 / P.p1
        for r in recs:
            outputs[f"converged[lambda={r.lam:g}]"] = r.converged
            if not r.converged:
                flags.append(f"diverged: lambda={r.lam:g}")
    elif kind == "hls":
        f = _function(spec.function)
        r = tr.hls_ratio(f, P, pol)
        outputs.update({"source": r.source, "target": r.target, "ratio": r.ratio,
                        "diverged": r.diverged})
        flags.extend(r.flags)
        if "scales" in fam:
            s, drift = tr.hls_dilation_family(f, P, fam["scales"], pol)
            outputs["dilation_drift"] = drift
            tables["dilation"] = s.to_dict()
            series["hls_dilation"] = [[k, v] for k, v in zip(s.index, s.ratios)]
    elif kind == "sobolev":
        f = _function(spec.function, P.n)
        L = 2.0 * f.support_radius if math.isfinite(f.support_radius) else 10.0
        h = 2.0 * L / spec.numerics["grid_points"]
        res = app.sobolev_ratio(f, P, spec.options.get("order", 1), grid_h=h, half_width=L)
        d = res.to_dict()
        flags.extend(d.pop("flags"))
        outputs.update(d)
    elif kind == "gns":
        f = _function(spec.function, P.n)
        rows = []
        for th in fam.get("thetas", [0.0, 0.25, 0.5, 0.75, 1.0]):
            g = app.gns_check(f, P, th, policy=pol).to_dict()
            for fl in g.pop("flags"):
                if fl not in flags:
                    flags.append(fl)
            g["theta"] = th
            rows.append(g)
            if not g["interpolation_holds_exactly"]:
                flags.append(f"interpolation violated: theta={th:g}")
        tables["thetas"] = rows
        outputs["min_slack"] = min(r["slack"] for r in rows)
        outputs["all_hold"] = all(r["interpolation_holds_exactly"] for r in rows)
    elif kind == "limiting_probe":
        r = tr.limiting_case_probe(_function(spec.function), P, spec.options.get("r_explore"), pol)
        d = r.to_dict()
        outputs.update({k: d[k] for k in ("ratio_r1", "ratio_explore", "r_explore")})
        tables["base"], tables["explore"] = d["base"], d["explore"]
        flags.extend(r.flags)
        for side in (r.base, r.explore):
            flags.extend(f for f in side.flags if f not in flags)
    elif kind == "semigroup":
        hw = 16.0
        p = spec.params
        res = app.semigroup_check(p.get("alpha", 0.25), p.get("beta", 0.25), hw,
                                  2.0 * hw / spec.numerics["grid_points"])
        outputs.update(res.to_dict())
    elif kind == "fourier_symbol":
        hw = 16.0
        res = app.fourier_symbol_check(spec.params.get("gamma", 0.5), hw,
                                       2.0 * hw / spec.numerics["grid_points"])
        outputs.update(res.to_dict())
    return outputs, tables, series, flags


def run_spec(spec):
    """Run one spec; returns ``(record, wall_time)``.  Errors become records."""
    t0 = time.perf_counter()
    rec = {"id": spec.id, "kind": spec.kind, "spec": spec.echo(), "outputs": {}, "tables": {},
           "series": {}, "flags": [], "error": None}
    try:
        outputs, tables, series, flags = _run_kind(spec)
        rec.update(outputs=outputs, tables=tables, series=series, flags=list(flags))
    except Exception as exc:  # reported per spec; siblings keep running
        rec["error"] = f"{type(exc).__name__}: {exc}"
    return rec, time.perf_counter() - t0


def default_jobs():
    try:
        return max(1, int(os.environ.get("HERZLAB_JOBS", "1")))
    except ValueError:
        return 1


def _map(func, items, jobs):
    """``[func(x) for x in items]``, possibly in worker processes, in input order."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as ex:
        return list(ex.map(func, items))


def run(specs, jobs=1):
    """Run specs with up to ``jobs`` worker processes.

    Returns ``(records, wall_times)`` in config order.
    """
    out = _map(run_spec, specs, jobs)
    return [r for r, _ in out], [t for _, t in out]


# ---------------------------------------------------------------------------
# reports


def report_json(records):
    return json.dumps({"records": records}, sort_keys=True, indent=2) + "\n"


def report_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rec in records:
        flag = ";".join(rec["flags"])
        flat = {}
        _flatten("", rec["outputs"], flat)
        for k, v in flat.items():
            w.writerow([rec["id"], rec["kind"], k, repr(v) if isinstance(v, float) else v, flag])
        if rec["error"]:
            w.writerow([rec["id"], rec["kind"], "error", rec["error"], "error"])
    return buf.getvalue()


def _series_files(records):
    """``{filename: rows}``; a series name used by one record keeps its plain name."""
    counts = {}
    for rec in records:
        for name in rec["series"]:
            counts[name] = counts.get(name, 0) + 1
    files = {}
    for rec in records:
        for name, rows in rec["series"].items():
            fn = f"{name}.dat" if counts[name] == 1 else f"{rec['id']}.{name}.dat"
            files[re.sub(r"[^A-Za-z0-9._-]", "_", fn)] = rows
    return files


def emit_report(records, out_dir, fmt="csv", wall_times=None):
    """Write ``report.csv`` or ``report.json``, one ``.dat`` file per series and,
    when given, ``timings.json`` (kept apart so reports stay deterministic).
    Returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    path = out / f"report.{fmt}"
    path.write_text(report_json(records) if fmt == "json" else report_csv(records))
    written.append(path)
    for fn, rows in _series_files(records).items():
        p = out / fn
        p.write_text("".join(f"{i!r} {v!r}\n" for i, v in rows))
        written.append(p)
    if wall_times is not None:
        p = out / "timings.json"
        p.write_text(json.dumps({r["id"]: t for r, t in zip(records, wall_times)}, indent=2) + "\n")
        written.append(p)
    return written


def _emit_spec_outputs(records, specs):
    """Per-experiment ``output: {path, format}`` targets."""
    for rec, spec in zip(records, specs):
        if spec.output.get("path"):
            emit_report([rec], spec.output["path"], spec.output.get("format", "csv"))


# ---------------------------------------------------------------------------
# acceptance


def _criterion(number):
    from .experiments.acceptance import run_criterion
    t0 = time.perf_counter()
    res = run_criterion(number)
    return res.to_dict(), time.perf_counter() - t0


def verify(jobs=1, criteria=None):
    """Run the built-in acceptance criteria; returns ``(report_dict, wall_times)``."""
    from .experiments.acceptance import CRITERIA
    nums = sorted(CRITERIA) if criteria is None else [int(c) for c in criteria]
    out = _map(_criterion, nums, jobs)
    results = [r for r, _ in out]
    report = {"criteria": results, "all_passed": all(r["passed"] for r in results)}
    return report, {r["number"]: t for r, (_, t) in zip(results, out)}


# ---------------------------------------------------------------------------
# entry point


def _load_specs(target, tol):
    from .experiments.catalog import NAMED_EXPERIMENTS, named_experiment
    p = Path(target)
    if p.is_file():
        return parse_config(p.read_text(), tol=tol)
    if target in NAMED_EXPERIMENTS:
        return parse_records(named_experiment(target), tol=tol)
    raise ConfigError([f"{target!r} is neither a config file nor a named experiment "
                       "(see 'herzlab list')"])


def _build_parser():
    ap = argparse.ArgumentParser(prog="herzlab",
                                 description="Riesz potential and Herz norm experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a config file or a named experiment")
    r.add_argument("config", help="YAML config path or a name from 'herzlab list'")
    r.add_argument("--out", default="herzlab-out", help="output directory")
    r.add_argument("--format", choices=("csv", "json"), default="csv")
    r.add_argument("--jobs", type=int, default=None, help="worker processes (default HERZLAB_JOBS or 1)")
    r.add_argument("--tol", type=float, default=None, help="override numerics.quad_tol")
    v = sub.add_parser("verify", help="run the built-in acceptance suite")
    v.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    v.add_argument("--jobs", type=int, default=None)
    v.add_argument("--criteria", default=None, help="comma-separated subset, e.g. 1,2,6")
    sub.add_parser("list", help="list the named experiments")
    return ap


def main(argv=None):
    args = _build_parser().parse_args(argv)
    jobs = default_jobs() if getattr(args, "jobs", None) is None else max(1, args.jobs)

    if args.command == "list":
        from .experiments.catalog import NAMED_EXPERIMENTS
        for name, (desc, _) in NAMED_EXPERIMENTS.items():
            print(f"{name:16s} {desc}")
        return 0

    if args.command == "verify":
        crit = None
        if args.criteria:
            try:
                crit = [int(c) for c in args.criteria.split(",")]
            except ValueError:
                print("error: --criteria expects comma-separated integers", file=sys.stderr)
                return 2
        report, times = verify(jobs, crit)
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        for r in report["criteria"]:
            status = "PASS" if r["passed"] else "FAIL"
            print(f"criterion {r['number']}: {status} {r['title']} ({times[r['number']]:.1f} s)",
                  file=sys.stderr)
        return 0 if report["all_passed"] else 1

    try:
        specs = _load_specs(args.config, args.tol)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return 2
    records, times = run(specs, jobs)
    try:
        paths = emit_report(records, args.out, args.format, times)
        _emit_spec_outputs(records, specs)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    failed = [r for r in records if r["error"]]
    for r in failed:
        print(f"error in {r['id']}: {r['error']}", file=sys.stderr)
    print(f"{len(records)} experiments, {len(failed)} errors; wrote {paths[0]}", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
