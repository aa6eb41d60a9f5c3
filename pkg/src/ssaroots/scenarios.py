"""Reproducible experiments: separable-root families, extraneous-root samples and
noisy root-Min-Norm estimation.

Every scenario writes CSV files plus a ``manifest.json`` into the output
directory. Output depends only on the configuration, so reruns are
byte-identical.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import classify_roots, normalize_weight
from .errors import ConfigInvalid, InvalidModel, WindowOutOfRange
from .io import dump_json, model_from_json, roots_to_csv, table_to_csv
from .polynomial import RootCluster, canonical_order, root_values, roots
from .minnorm import SsaLrf, ssa_lrf
from .separability import separable_family
from .series import SignalModel, char_poly, generate, real_to_complex
from .trajectory import vandermonde_basis

SCENARIOS = ("sep_constant", "sep_exponent", "sep_conjugate", "extsam", "noised", "mult", "custom")
THREADS_ENV = "SSA_ROOTS_THREADS"


class InsideDiskWarning(UserWarning):
    """All estimated signal roots lie inside the unit disk; the largest-modulus
    selection is unreliable there."""


def two_cosines_model() -> SignalModel:
    return real_to_complex([(0.9, 1 / 8, 0.0, [1.0]), (0.9, math.sin(0.25), 0.0, [1.0])])


def growing_model() -> SignalModel:
    return real_to_complex([(1.05, 0.0, 0.0, [1.0]), (1.1, 0.5 / (2 * math.pi), 0.0, [0.1])])


def triple_root_model() -> SignalModel:
    return real_to_complex([(0.8, 0.0, 0.0, [0.0, 0.0, 1.0])])


# defaults per scenario; unstated noise levels and windows are documented guesses
_DEFAULTS = {
    "sep_constant": dict(L=[12], N=24),
    "sep_exponent": dict(L=[12], N=24, root=[0.8 * math.cos(0.6), 0.8 * math.sin(0.6)]),
    "sep_conjugate": dict(L=[12], N=24, m=[3, 4]),
    "extsam": dict(L=[20, 30, 50], N=100),
    "noised": dict(L=[100], N=300, noise_std=50.0, d=3, runs=10),
    "mult": dict(L=[50], N=150, noise_std=0.1, d=3, runs=10),
    "custom": dict(),
}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    N: int
    L: tuple
    model: SignalModel | None = None
    real: bool = True
    noise_std: float = 0.0
    seed: int | None = None
    runs: int = 1
    d: int | None = None
    delta: float = 0.15
    output_dir: str = "out"
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioConfig":
        if not isinstance(raw, dict):
            raise ConfigInvalid("config", "must be a JSON object")
        name = raw.get("scenario")
        if name not in SCENARIOS:
            raise ConfigInvalid("scenario", f"must be one of {', '.join(SCENARIOS)}")
        cfg = dict(_DEFAULTS[name])
        cfg.update({k: v for k, v in raw.items() if v is not None})

        model, real = None, True
        if "model" in cfg:
            try:
                model, real = model_from_json(cfg["model"])
            except InvalidModel as exc:
                raise ConfigInvalid("model", str(exc)) from exc
        elif name == "custom":
            raise ConfigInvalid("model", "required for the custom scenario")

        N = _int(cfg, "N")
        if N < 2:
            raise ConfigInvalid("N", "must be >= 2")
        Ls = cfg.get("L")
        if Ls is None:
            if name == "custom":
                raise ConfigInvalid("L", "required for the custom scenario")
        Ls = Ls if isinstance(Ls, (list, tuple)) else [Ls]
        if not Ls:
            raise ConfigInvalid("L", "must not be empty")
        try:
            Ls = tuple(int(x) for x in Ls)
        except (TypeError, ValueError):
            raise ConfigInvalid("L", "must be an integer or a list of integers") from None
        for L in Ls:
            if not 1 < L < N:
                raise ConfigInvalid("L", f"window {L} must satisfy 1 < L < N = {N}")
            if not name.startswith("sep_") and 2 * L > N:
                raise ConfigInvalid("L", f"window {L} exceeds N/2 = {N / 2}")

        try:
            noise = float(cfg.get("noise_std", 0.0))
        except (TypeError, ValueError):
            raise ConfigInvalid("noise_std", "must be a number") from None
        if not noise >= 0 or not math.isfinite(noise):
            raise ConfigInvalid("noise_std", "must be finite and >= 0")
        seed = cfg.get("seed")
        if seed is not None:
            if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
                raise ConfigInvalid("seed", "must be an integer in [0, 2**64)")
        elif noise > 0:
            raise ConfigInvalid("seed", "required when noise_std > 0")
        runs = _int(cfg, "runs", 1)
        if runs < 1:
            raise ConfigInvalid("runs", "must be >= 1")
        d = cfg.get("d")
        if d is not None:
            d = _int(cfg, "d")
            if d < 1 or any(d >= L for L in Ls):
                raise ConfigInvalid("d", "must satisfy 1 <= d < L")
        try:
            delta = float(cfg.get("delta", 0.15))
        except (TypeError, ValueError):
            raise ConfigInvalid("delta", "must be a number") from None
        if not 0 < delta < 1:
            raise ConfigInvalid("delta", "relative annulus width must lie in (0, 1)")
        out = cfg.get("output_dir", "out")
        if not isinstance(out, str) or not out:
            raise ConfigInvalid("output_dir", "must be a non-empty path")
        known = {"scenario", "model", "N", "L", "noise_std", "seed", "runs", "d", "delta",
                 "output_dir"}
        extra = {k: v for k, v in cfg.items() if k not in known}
        return cls(name, N, Ls, model, real, noise, seed, runs, d, delta, out, extra)

    def echo(self) -> dict:
        """Canonical, JSON-ready view (used for the manifest and its hash)."""
        return {
            "scenario": self.scenario, "N": self.N, "L": list(self.L),
            "model": self.model.to_json() if self.model is not None else None,
            "real": self.real, "noise_std": self.noise_std, "seed": self.seed,
            "runs": self.runs, "d": self.d, "delta": self.delta, "extra": self.extra,
        }

    def digest(self) -> str:
        blob = json.dumps(self.echo(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _int(cfg, key, default=None):
    v = cfg.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise ConfigInvalid(key, "must be an integer")
    return int(v)


@dataclass
class SignalEstimate:
    signal: list
    extraneous: np.ndarray
    lrf: SsaLrf

    @property
    def signal_values(self) -> np.ndarray:
        return np.array([c.value for c in self.signal for _ in range(c.multiplicity)])


def _top_clusters(clusters, d):
    """Largest-modulus clusters up to total multiplicity ``d``; the rest are
    returned expanded."""
    chosen, rest, need = [], [], d
    for c in clusters:
        take = min(need, c.multiplicity)
        if take:
            chosen.append(RootCluster(c.value, take))
            need -= take
        rest.extend([c.value] * (c.multiplicity - take))
    return chosen, np.array(rest, dtype=complex)


def estimate_signal_roots(F, L: int, d: int, margin: float = 0.05) -> SignalEstimate:
    """Root-Min-Norm: the ``d`` largest-modulus roots of the SSA LRF are taken as
    signal roots."""
    F = np.asarray(F, dtype=complex)
    if not d < L <= len(F) / 2:
        raise WindowOutOfRange(f"need d < L <= N/2 (d={d}, L={L}, N={len(F)})")
    s = ssa_lrf(F, L, d)
    cl = roots(s.poly)
    cl = [cl[i] for i in np.lexsort((-np.angle([c.value for c in cl]),
                                     -np.round(np.abs([c.value for c in cl]), 12)))]
    signal, rest = _top_clusters(cl, d)
    if all(abs(c.value) < 1 - margin for c in signal):
        warnings.warn("all estimated signal roots lie inside the unit disk",
                      InsideDiskWarning, stacklevel=2)
    return SignalEstimate(signal, rest, s)


def label_by_model(values, model: SignalModel):
    """Split ``values`` into those nearest the model roots (one per unit of
    multiplicity, greedy by distance) and the rest."""
    vals = np.asarray(values, dtype=complex)
    targets = [c.value for c in model.clusters for _ in range(c.multiplicity)]
    used = np.zeros(len(vals), dtype=bool)
    pairs = sorted((abs(vals[i] - t), i, j) for i in range(len(vals))
                   for j, t in enumerate(targets))
    taken_t = set()
    for _, i, j in pairs:
        if used[i] or j in taken_t:
            continue
        used[i] = True
        taken_t.add(j)
    return vals[used], vals[~used]


def _sorted(vals):
    vals = np.asarray(vals, dtype=complex)
    return vals[canonical_order(vals)] if vals.size else vals


def _noise_rngs(cfg: ScenarioConfig):
    ss = np.random.SeedSequence(cfg.seed if cfg.seed is not None else 0)
    return [np.random.Generator(np.random.PCG64(s)) for s in ss.spawn(cfg.runs)]


def _series(cfg: ScenarioConfig, model: SignalModel, rng=None) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        F = generate(model, cfg.N)
    if cfg.real:
        F = F.real.astype(complex)
    if rng is not None and cfg.noise_std > 0:
        F = F + cfg.noise_std * rng.standard_normal(cfg.N)
    return F


def _threads(n_tasks: int) -> int:
    cap = os.environ.get(THREADS_ENV)
    try:
        cap = int(cap) if cap else (os.cpu_count() or 1)
    except ValueError:
        cap = os.cpu_count() or 1
    return max(1, min(n_tasks, cap))


def _parallel(fn, tasks):
    with ThreadPoolExecutor(max_workers=_threads(len(tasks))) as ex:
        return list(ex.map(fn, tasks))


@dataclass
class ExperimentReport:
    config: ScenarioConfig
    output_dir: Path
    files: list
    tables: dict
    manifest: dict


def _write(out: Path, name: str, text: str, files: list):
    (out / name).write_text(text)
    files.append(name)


def run_scenario(cfg: ScenarioConfig) -> ExperimentReport:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    runner = {
        "sep_constant": _run_sep_constant, "sep_exponent": _run_sep_exponent,
        "sep_conjugate": _run_sep_conjugate, "extsam": _run_extsam,
        "noised": _run_noisy, "mult": _run_noisy, "custom": _run_noisy,
    }[cfg.scenario]
    files: list = []
    tables = runner(cfg, out, files)
    files.sort()
    manifest = {
        "config": cfg.echo(),
        "config_sha256": cfg.digest(),
        "version": f"v{__version__}",
        "files": files,
    }
    (out / "manifest.json").write_text(dump_json(manifest))
    return ExperimentReport(cfg, out, files, tables, manifest)


def _family_rows(source_roots, basis, L):
    fam = separable_family(basis)
    rows = [(z, "signal", "left", L) for z in _sorted(source_roots)]
    rows += [(z, "separable", "left", L) for z in _sorted(fam.values)]
    return rows, fam


def _run_sep_constant(cfg, out, files):
    tables = {}
    for L in cfg.L:
        rows, _ = _family_rows([1.0], [np.ones(L)], L)
        _write(out, f"roots_L{L}.csv", roots_to_csv(rows), files)
        tables[L] = rows
    return tables


def _run_sep_exponent(cfg, out, files):
    lam = complex(*cfg.extra["root"]) if isinstance(cfg.extra.get("root"), list) else complex(
        cfg.extra["root"])
    if cfg.model is not None:
        lam = cfg.model.roots[0]
    tables = {}
    for L in cfg.L:
        rows, _ = _family_rows([lam], [lam ** np.arange(L)], L)
        _write(out, f"roots_L{L}.csv", roots_to_csv(rows), files)
        tables[L] = rows
    return tables


def _run_sep_conjugate(cfg, out, files):
    ms = cfg.extra.get("m", [3, 4])
    rho = float(cfg.extra.get("rho", 1.0))
    tables = {}
    for L in cfg.L:
        for m in ms:
            if not 0 < int(m) < L:
                raise ConfigInvalid("m", f"must lie in (0, L) for L={L}")
            lam = rho * np.exp(2j * math.pi * int(m) / (2 * L))
            src = SignalModel.of(lam, np.conj(lam))
            rows, _ = _family_rows(src.roots, vandermonde_basis(src, L), L)
            _write(out, f"roots_L{L}_m{int(m)}.csv", roots_to_csv(rows), files)
            tables[(L, int(m))] = rows
    return tables


def _run_extsam(cfg, out, files):
    model = cfg.model or two_cosines_model()
    d = cfg.d or model.d
    w = normalize_weight(model)
    F = _series(cfg, model)

    def task(L):
        s = ssa_lrf(F, L, d)
        sig, ext = label_by_model(root_values(s.poly), model)
        diag = classify_roots(ext, w, cfg.delta * w.rho)
        rows = [(z, "signal", "forward", L) for z in _sorted(sig)]
        rows += [(z, "extraneous", "forward", L) for z in _sorted(ext)]
        (out / f"roots_L{L}.csv").write_text(roots_to_csv(rows))
        return L, rows, diag

    results = _parallel(task, list(cfg.L))
    summary = []
    for L, _, diag in results:
        files.append(f"roots_L{L}.csv")
        summary.append((L, diag.spurious_count, w.ell - 1 if w.rho < 1 else w.u - 1,
                        diag.modulus_stats, int(diag.stable)))
    _write(out, "summary.csv", table_to_csv(
        ["L", "spurious_count", "bound", "mean_modulus", "stable"], summary), files)
    return {"summary": summary, "rows": {L: rows for L, rows, _ in results}}


def _run_noisy(cfg, out, files):
    model = cfg.model or (growing_model() if cfg.scenario == "noised" else triple_root_model())
    d = cfg.d or model.d
    truth = [c.value for c in model.clusters for _ in range(c.multiplicity)]
    w = normalize_weight(model)
    rngs = _noise_rngs(cfg)
    tasks = [(run, L) for run in range(cfg.runs + 1) for L in cfg.L]

    def task(item):
        run, L = item
        # run 0 is the noise-free reference; runs 1.. use their own streams
        F = _series(cfg, model, rngs[run - 1] if run else None)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", InsideDiskWarning)
            est = estimate_signal_roots(F, L, d)
        allr = np.concatenate([est.signal_values, est.extraneous])
        sig, ext = label_by_model(allr, model)
        top_err = _match_error(est.signal_values, truth)
        near_err = _match_error(sig, truth)
        diag = classify_roots(ext, w, cfg.delta * w.rho)
        rows = [(z, "signal", "forward", L) for z in _sorted(sig)]
        rows += [(z, "extraneous", "forward", L) for z in _sorted(ext)]
        name = f"roots_run{run:03d}_L{L}.csv"
        (out / name).write_text(roots_to_csv(rows))
        return name, (run, L, top_err, near_err, diag.spurious_count,
                      float(np.max(np.abs(ext))) if ext.size else math.nan)

    results = _parallel(task, tasks)
    for name, _ in results:
        files.append(name)
    summary = [r for _, r in results]
    _write(out, "summary.csv", table_to_csv(
        ["run", "L", "top_d_error", "nearest_error", "spurious_count", "max_extraneous_modulus"],
        summary), files)
    return {"summary": summary}


def _match_error(est, truth) -> float:
    """Largest distance in a greedy nearest matching of estimates to true roots."""
    est = list(np.asarray(est, dtype=complex))
    if len(est) < len(truth):
        return math.inf
    worst = 0.0
    for t in sorted(truth, key=lambda v: (-abs(v), -np.angle(v))):
        j = int(np.argmin([abs(e - t) for e in est]))
        worst = max(worst, abs(est[j] - t))
        est.pop(j)
    return float(worst)
