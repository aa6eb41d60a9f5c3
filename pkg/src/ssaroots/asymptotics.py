"""Critical circle, general vs. spurious extraneous roots, and empirical checks of
their large-degree behaviour."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PoleEvaluation, TooFewRoots
from .polynomial import (DEFAULT_CLUSTER_TOL, ComplexPoly, RootCluster, as_poly, derivative,
                         from_roots, roots, star)
from .series import SignalModel
from .minnorm import extraneous_roots

LEADING_TOL = 1e-9
DEFAULT_DELTA_FRACTION = 0.15


@dataclass(frozen=True)
class NormalizedWeight:
    """Weight polynomial with every root reflected into the closed unit disk.

    ``clusters`` lists the leading roots first (those of multiplicity ``M``
    before the rest), then the inner roots. ``const`` is the positive factor in
    ``|P|**2 = const * |C|**2`` on the unit circle.
    """

    C: ComplexPoly
    clusters: tuple
    rho: float
    u: int
    ell: int
    M: int
    const: float

    @property
    def leading(self) -> list[int]:
        return list(range(self.u))

    @property
    def leading_roots(self) -> list[complex]:
        return [c.value for c in self.clusters[: self.u]]

    @property
    def on_unit_circle(self) -> bool:
        return abs(self.rho - 1.0) < LEADING_TOL


def _clusters_of(P_or_clusters, cluster_tol):
    if isinstance(P_or_clusters, SignalModel):
        return P_or_clusters.clusters, 1.0
    if isinstance(P_or_clusters, (list, tuple)) and P_or_clusters and isinstance(
            P_or_clusters[0], RootCluster):
        return list(P_or_clusters), 1.0
    P = as_poly(P_or_clusters)
    return roots(P, cluster_tol), abs(P.leading)


def normalize_weight(P, cluster_tol: float | None = None) -> NormalizedWeight:
    """Reflect roots outside the unit circle to ``1/conj(root)`` and glue
    coincident images."""
    tol = DEFAULT_CLUSTER_TOL if cluster_tol is None else cluster_tol
    clusters, lead = _clusters_of(P, cluster_tol)
    const = lead ** 2
    merged: list[list] = []
    for cl in clusters:
        v = cl.value
        if abs(v) > 1.0:
            const *= abs(v) ** (2 * cl.multiplicity)
            v = 1.0 / np.conj(v)
        for item in merged:
            if abs(item[0] - v) < tol * max(1.0, abs(v)):
                tot = item[1] + cl.multiplicity
                item[0] = (item[0] * item[1] + v * cl.multiplicity) / tot
                item[1] = tot
                break
        else:
            merged.append([complex(v), cl.multiplicity])
    if not merged:
        raise ValueError("weight polynomial has no roots")
    mods = np.array([abs(v) for v, _ in merged])
    rho = float(mods.max())
    lead_idx = [i for i in range(len(merged)) if abs(mods[i] - rho) < LEADING_TOL]
    M = max(merged[i][1] for i in lead_idx)
    top = [i for i in lead_idx if merged[i][1] == M]
    rest_lead = [i for i in lead_idx if merged[i][1] < M]
    inner = sorted((i for i in range(len(merged)) if i not in lead_idx),
                   key=lambda i: (-mods[i], -np.angle(merged[i][0])))
    top.sort(key=lambda i: -np.angle(merged[i][0]))
    rest_lead.sort(key=lambda i: (-merged[i][1], -np.angle(merged[i][0])))
    order = top + rest_lead + inner
    cl = tuple(RootCluster(merged[i][0], merged[i][1]) for i in order)
    return NormalizedWeight(from_roots(cl), cl, rho, len(lead_idx), len(top), M, float(const))


@dataclass(frozen=True)
class RootDiagnostics:
    general: np.ndarray
    spurious: np.ndarray
    delta: float
    gap_stats: np.ndarray
    modulus_stats: float
    stable: bool

    @property
    def spurious_count(self) -> int:
        return len(self.spurious)


def _sorted_by_arg(z):
    z = np.asarray(z, dtype=complex)
    return z[np.argsort(np.angle(z), kind="stable")]


def angular_gaps(z) -> np.ndarray:
    """Cyclic gaps between consecutive arguments (sums to ``2*pi``)."""
    ang = np.sort(np.angle(np.asarray(z, dtype=complex)))
    if ang.size == 0:
        return ang
    return np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))


def classify_roots(z, w: NormalizedWeight, delta: float | None = None) -> RootDiagnostics:
    """Label roots with ``|z| <= rho - delta`` spurious and the rest general."""
    z = np.asarray(z, dtype=complex)
    delta = DEFAULT_DELTA_FRACTION * w.rho if delta is None else float(delta)
    if not 0 < delta < w.rho:
        raise ValueError(f"delta must lie in (0, rho={w.rho})")
    mod = np.abs(z)
    cut = w.rho - delta
    spur = mod <= cut
    general = _sorted_by_arg(z[~spur])
    band = (mod > w.rho - 1.1 * delta) & (mod <= w.rho - 0.9 * delta)
    return RootDiagnostics(
        general=general,
        spurious=_sorted_by_arg(z[spur]),
        delta=delta,
        gap_stats=angular_gaps(general),
        modulus_stats=float(np.mean(np.abs(general))) if general.size else math.nan,
        stable=not bool(np.any(band)),
    )


def _g_terms(w: NormalizedWeight, n: int):
    """Pole locations, residues and a common scale for the rational function G_n."""
    d = w.C.degree
    Cs = star(w.C)
    poles, res = [], []
    if not w.on_unit_circle:
        p = n - w.M + d + 1
        num = derivative(w.C, w.M)
        for cl in w.clusters[: w.ell]:
            a = cl.value
            # factor rho**p out so the residues stay representable for large n
            res.append((a / w.rho) ** p * Cs(a) / num(a))
            poles.append(a)
        scale = w.rho ** p
    else:
        p = n + d + 1
        for cl in w.clusters[: w.u]:
            a, nu = cl.value, cl.multiplicity
            res.append(a ** p * (-1) ** nu * nu * derivative(Cs, nu)(a) / derivative(w.C, nu)(a))
            poles.append(a)
        scale = 1.0
    return np.array(poles), np.array(res), scale


def g_function(w: NormalizedWeight, n: int, z: complex) -> complex:
    poles, res, scale = _g_terms(w, n)
    z = complex(z)
    if np.any(np.abs(z - poles) < 1e-12):
        raise PoleEvaluation("evaluation point coincides with a leading root")
    return complex(scale * np.sum(res / (z - poles)))


def g_zeros(w: NormalizedWeight, n: int) -> np.ndarray:
    """Zeros of ``G_n``: roots of the numerator after clearing denominators."""
    poles, res, _ = _g_terms(w, n)
    num = ComplexPoly()
    for k in range(len(poles)):
        others = [poles[j] for j in range(len(poles)) if j != k]
        num = num + from_roots(others) * res[k]
    if num.is_zero or num.degree < 1:
        return np.zeros(0, dtype=complex)
    return np.array([c.value for c in roots(num)])


def predicted_modulus(w: NormalizedWeight, n: int) -> float:
    if w.on_unit_circle:
        return 1.0 + math.log(n) / n
    return w.rho * (1.0 + w.M * math.log(n) / n)


def mean_general_modulus(w: NormalizedWeight, n: int, delta: float | None = None) -> float:
    return classify_roots(extraneous_roots(w.C, n), w, delta).modulus_stats


def modulus_law_residual(w: NormalizedWeight, n_values, delta: float | None = None) -> list[float]:
    """Mean general-root modulus minus the asymptotic prediction, per ``n``."""
    out = []
    for n in n_values:
        if n < 4:
            raise ValueError("modulus law needs n >= 4")
        out.append(mean_general_modulus(w, n, delta) - predicted_modulus(w, n))
    return out


def modulus_slope(w: NormalizedWeight, n_values, delta: float | None = None) -> float:
    """Least-squares coefficient of ``log(n)/n`` in ``mean|z|/rho - 1``, fitted
    together with a ``1/n`` term."""
    n = np.asarray(list(n_values), dtype=float)
    y = np.array([mean_general_modulus(w, int(k), delta) / w.rho - 1.0 for k in n])
    X = np.column_stack([np.log(n) / n, 1.0 / n])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return float(coef[0])


def _excluded_args(w: NormalizedWeight):
    k = w.u if w.on_unit_circle else w.ell
    return [np.angle(c.value) for c in w.clusters[:k]]


def angular_equidistribution(z, n: int, weight: NormalizedWeight | None = None,
                             eps: float = 0.05, delta: float | None = None) -> float:
    """Largest deviation of adjacent argument gaps from ``2*pi/n``.

    With a weight, only general roots count, and gaps whose arc passes over a
    leading root (or ends within ``eps`` of one) are skipped.
    """
    z = np.asarray(z, dtype=complex)
    excl_pts = []
    if weight is not None:
        z = classify_roots(z, weight, delta).general
        k = weight.u if weight.on_unit_circle else weight.ell
        excl_pts = [c.value for c in weight.clusters[:k]]
    if len(z) < 3:
        raise TooFewRoots(f"need at least 3 general roots, got {len(z)}")
    z = _sorted_by_arg(z)
    ang = np.angle(z)
    nxt = np.roll(ang, -1)
    gaps = (nxt - ang) % (2 * math.pi)
    keep = np.ones(len(z), dtype=bool)
    for a in excl_pts:
        arg = np.angle(a)
        off = (arg - ang) % (2 * math.pi)
        keep &= ~((off > 0) & (off < gaps))
        near = np.abs(z - a) < eps
        keep &= ~(near | np.roll(near, -1))
    if not np.any(keep):
        raise TooFewRoots("no admissible gaps remain after exclusions")
    return float(np.max(np.abs(gaps[keep] - 2 * math.pi / n)))


@dataclass(frozen=True)
class SweepRow:
    n: int
    mean_modulus: float
    max_gap_error: float
    spurious_count: int


def sweep(P, n_values, delta: float | None = None, eps: float = 0.05) -> list[SweepRow]:
    w = normalize_weight(P)
    rows = []
    for n in n_values:
        z = extraneous_roots(w.C, int(n)) if n > 0 else np.zeros(0, dtype=complex)
        diag = classify_roots(z, w, delta)
        try:
            gap = angular_equidistribution(z, int(n), w, eps, delta)
        except TooFewRoots:
            gap = math.nan
        rows.append(SweepRow(int(n), diag.modulus_stats, gap, diag.spurious_count))
    return rows
