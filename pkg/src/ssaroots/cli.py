"""``ssa-roots`` command line tool.

Every subcommand accepts ``--config FILE`` (a JSON object whose keys mirror the
long option names, dashes replaced by underscores); explicit flags win.
Exit codes: 0 success, 2 bad input or configuration, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .asymptotics import sweep
from .errors import ConfigInvalid, InputError, NumericalFailure
from .io import (dump_json, load_json, model_from_json, poly_from_json, read_series_csv,
                 roots_to_csv, series_to_csv, table_to_csv)
from .minnorm import backward_extraneous_roots, extraneous_roots
from .polynomial import canonical_order
from .scenarios import ScenarioConfig, estimate_signal_roots, run_scenario
from .separability import check_border_separable, check_left_separable, check_two_sided
from .series import char_poly, generate

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def _merge(args, keys) -> dict:
    cfg = load_json(args.config) if args.config else {}
    if not isinstance(cfg, dict):
        raise ConfigInvalid("config", "must be a JSON object")
    for k in keys:
        v = getattr(args, k, None)
        if v is not None and v is not False:
            cfg[k] = v
    return cfg


def _need(cfg, key, kind=None):
    if cfg.get(key) is None:
        raise ConfigInvalid(key, "is required")
    v = cfg[key]
    if kind is int:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
            raise ConfigInvalid(key, "must be an integer")
        return int(v)
    return v


def _model(cfg, key="model"):
    src = _need(cfg, key)
    data = load_json(src) if isinstance(src, str) else src
    return model_from_json(data)


def _emit(text: str, output):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _sorted(vals):
    vals = np.asarray(vals, dtype=complex)
    return vals[canonical_order(vals)] if vals.size else vals


def cmd_generate(args):
    cfg = _merge(args, ["model", "N", "output"])
    model, real = _model(cfg)
    N = _need(cfg, "N", int)
    if N < 1:
        raise ConfigInvalid("N", "must be >= 1")
    F = generate(model, N)
    if real:
        F = F.real.astype(complex)
    _emit(series_to_csv(F), cfg.get("output"))


def cmd_roots(args):
    cfg = _merge(args, ["model", "series", "d", "L", "backward", "both", "conjugated", "output"])
    L = _need(cfg, "L", int)
    sides = ["forward", "backward"] if cfg.get("both") else (
        ["backward"] if cfg.get("backward") else ["forward"])
    conj = bool(cfg.get("conjugated"))
    rows = []
    if cfg.get("model") is not None:
        model, _ = _model(cfg)
        P = char_poly(model)
        n = L - P.degree - 1
        if n < 0:
            raise ConfigInvalid("L", f"must exceed the difference dimension {P.degree}")
        for side in sides:
            if side == "forward":
                sig, ext = model.roots, extraneous_roots(P, n)
            else:
                sig = [1 / r for r in model.roots]
                sig = np.conj(sig) if conj else sig
                ext = backward_extraneous_roots(P, n, conjugated=conj)
            # each distinct signal root once per unit of multiplicity
            mult = {c.value: c.multiplicity for c in model.clusters}
            sig_rep = [z for z, r in zip(sig, model.roots) for _ in range(mult[r])]
            rows += [(z, "signal", side, L) for z in _sorted(sig_rep)]
            rows += [(z, "extraneous", side, L) for z in _sorted(ext)]
    elif cfg.get("series") is not None:
        F = read_series_csv(cfg["series"])
        d = _need(cfg, "d", int)
        for side in sides:
            G = F if side == "forward" else F[::-1]
            est = estimate_signal_roots(G, L, d)
            sig, ext = est.signal_values, est.extraneous
            if side == "backward" and conj:
                sig, ext = np.conj(sig), np.conj(ext)
            rows += [(z, "signal", side, L) for z in _sorted(sig)]
            rows += [(z, "extraneous", side, L) for z in _sorted(ext)]
    else:
        raise ConfigInvalid("model", "either a model or a series is required")
    _emit(roots_to_csv(rows), cfg.get("output"))


def cmd_separability(args):
    cfg = _merge(args, ["model1", "model2", "series1", "series2", "L", "N", "output"])
    L = _need(cfg, "L", int)
    result = {}
    if cfg.get("series1") is not None or cfg.get("series2") is not None:
        F1 = read_series_csv(_need(cfg, "series1"))
        F2 = read_series_csv(_need(cfg, "series2"))
        result["border"] = check_border_separable(F1, F2, L).to_json()
    else:
        m1, _ = _model(cfg, "model1")
        m2, _ = _model(cfg, "model2")
        result["left"] = check_left_separable(m1, m2, L).to_json()
        if cfg.get("N") is not None:
            result["two_sided"] = check_two_sided(m1, m2, L, _need(cfg, "N", int)).to_json()
    _emit(dump_json(result), cfg.get("output"))


def _parse_n(spec) -> list[int]:
    """``"10,20,40"`` or ``"10:100:10"`` (stop inclusive) or a JSON list."""
    if isinstance(spec, list):
        vals = spec
    elif ":" in str(spec):
        parts = [int(p) for p in str(spec).split(":")]
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        if step <= 0:
            raise ConfigInvalid("n", "step must be positive")
        vals = list(range(start, stop + 1, step))
    else:
        vals = [p for p in str(spec).split(",") if p.strip()]
    try:
        out = [int(v) for v in vals]
    except (TypeError, ValueError):
        raise ConfigInvalid("n", "must be integers") from None
    if not out or min(out) < 1:
        raise ConfigInvalid("n", "must be a non-empty list of positive integers")
    return out


def cmd_sweep(args):
    cfg = _merge(args, ["model", "poly", "n", "delta", "eps", "output"])
    if cfg.get("poly") is not None:
        src = cfg["poly"]
        P = poly_from_json(load_json(src) if isinstance(src, str) else src)
        if P.degree < 1:
            raise ConfigInvalid("poly", "degree must be >= 1")
    else:
        model, _ = _model(cfg)
        P = char_poly(model)
    ns = _parse_n(_need(cfg, "n"))
    delta = cfg.get("delta")
    rows = sweep(P, ns, delta=None if delta is None else float(delta),
                 eps=float(cfg.get("eps", 0.05)))
    text = table_to_csv(["n", "mean_modulus", "max_gap_error", "spurious_count"],
                        [(r.n, r.mean_modulus, r.max_gap_error, r.spurious_count) for r in rows])
    _emit(text, cfg.get("output"))


def cmd_scenario(args):
    cfg = _merge(args, ["scenario", "model", "N", "L", "noise_std", "seed", "runs", "d",
                        "delta", "output_dir"])
    if isinstance(cfg.get("model"), str):
        cfg["model"] = load_json(cfg["model"])
    report = run_scenario(ScenarioConfig.from_dict(cfg))
    sys.stdout.write(dump_json({"output_dir": str(report.output_dir),
                                "files": report.files,
                                "config_sha256": report.manifest["config_sha256"]}))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ssa-roots", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file with option values")
        return sp

    g = common(sub.add_parser("generate", help="sample a signal model as series CSV"))
    g.add_argument("--model", help="model JSON file")
    g.add_argument("--N", type=int)
    g.add_argument("--output", "-o")
    g.set_defaults(func=cmd_generate)

    r = common(sub.add_parser("roots", help="signal and extraneous roots of the SSA LRF"))
    r.add_argument("--model", help="model JSON file (exact roots)")
    r.add_argument("--series", help="series CSV (estimated roots; needs --d)")
    r.add_argument("--d", type=int)
    r.add_argument("--L", type=int)
    r.add_argument("--backward", action="store_true")
    r.add_argument("--both", action="store_true")
    r.add_argument("--conjugated", action="store_true",
                   help="backward LRF with conjugated coefficients")
    r.add_argument("--output", "-o")
    r.set_defaults(func=cmd_roots)

    s = common(sub.add_parser("separability", help="exact separability verdict"))
    s.add_argument("--model1")
    s.add_argument("--model2")
    s.add_argument("--series1", help="series CSV, for the border-series check")
    s.add_argument("--series2")
    s.add_argument("--L", type=int)
    s.add_argument("--N", type=int)
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_separability)

    w = common(sub.add_parser("sweep", help="per-degree asymptotic diagnostics"))
    w.add_argument("--model")
    w.add_argument("--poly", help="JSON file with ascending [re, im] coefficients")
    w.add_argument("--n", help="degrees: '10,20,40' or 'start:stop[:step]'")
    w.add_argument("--delta", type=float)
    w.add_argument("--eps", type=float)
    w.add_argument("--output", "-o")
    w.set_defaults(func=cmd_sweep)

    c = common(sub.add_parser("scenario", help="run a named experiment"))
    c.add_argument("scenario", nargs="?")
    c.add_argument("--model")
    c.add_argument("--N", type=int)
    c.add_argument("--L", type=int, nargs="+")
    c.add_argument("--noise-std", dest="noise_std", type=float)
    c.add_argument("--seed", type=int)
    c.add_argument("--runs", type=int)
    c.add_argument("--d", type=int)
    c.add_argument("--delta", type=float)
    c.add_argument("--output-dir", dest="output_dir")
    c.set_defaults(func=cmd_scenario)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
