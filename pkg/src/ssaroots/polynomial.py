"""Dense complex polynomials, root extraction and root clustering.

Coefficients are stored in ascending order: ``coeffs[k]`` multiplies ``z**k``.
The identically-zero polynomial has an empty coefficient vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import ConstantPolynomial, ZeroPolynomial

DEFAULT_CLUSTER_TOL = 1e-6

_EPS = np.finfo(float).eps
# Relative backward error assumed for companion eigenvalues; a k-fold root is
# expected to split by roughly _EIG_NOISE**(1/k) times the root scale.
_EIG_NOISE = 1e3 * _EPS
# Largest multiplicity the adaptive clustering pass will assemble.
_MAX_MULTIPLICITY = 12


class ComplexPoly:
    """Immutable dense polynomial with complex coefficients."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[complex] = ()):
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                     dtype=complex).ravel()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1].copy() if nz.size else np.zeros(0, dtype=complex)
        c.flags.writeable = False
        self._c = c

    @classmethod
    def constant(cls, value: complex = 1.0) -> "ComplexPoly":
        return cls([value])

    @classmethod
    def monomial(cls, k: int, value: complex = 1.0) -> "ComplexPoly":
        c = np.zeros(k + 1, dtype=complex)
        c[k] = value
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self._c) - 1

    @property
    def is_zero(self) -> bool:
        return len(self._c) == 0

    @property
    def leading(self) -> complex:
        if self.is_zero:
            raise ZeroPolynomial("zero polynomial has no leading coefficient")
        return complex(self._c[-1])

    def monic(self) -> "ComplexPoly":
        return ComplexPoly(self._c / self.leading)

    def conj(self) -> "ComplexPoly":
        """Polynomial with conjugated coefficients (not conjugated roots)."""
        return ComplexPoly(np.conj(self._c))

    def reversed(self) -> "ComplexPoly":
        """``z**deg * p(1/z)``: coefficients in reverse order."""
        return ComplexPoly(self._c[::-1])

    def __call__(self, z):
        if self.is_zero:
            return np.zeros_like(np.asarray(z, dtype=complex))
        return np.polyval(self._c[::-1], z)

    def __mul__(self, other):
        if isinstance(other, ComplexPoly):
            return mul(self, other)
        return ComplexPoly(self._c * complex(other))

    def __rmul__(self, other):
        return ComplexPoly(self._c * complex(other))

    def __truediv__(self, other):
        return ComplexPoly(self._c / complex(other))

    def __add__(self, other):
        other = as_poly(other)
        n = max(len(self._c), len(other._c))
        out = np.zeros(n, dtype=complex)
        out[: len(self._c)] += self._c
        out[: len(other._c)] += other._c
        return ComplexPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return ComplexPoly(-self._c)

    def __sub__(self, other):
        return self + (-as_poly(other))

    def __rsub__(self, other):
        return as_poly(other) - self

    def __eq__(self, other):
        if not isinstance(other, ComplexPoly):
            return NotImplemented
        return np.array_equal(self._c, other._c)

    def __hash__(self):
        return hash(self._c.tobytes())

    def allclose(self, other, atol=1e-12) -> bool:
        other = as_poly(other)
        n = max(len(self._c), len(other._c))
        a = np.zeros(n, dtype=complex)
        b = np.zeros(n, dtype=complex)
        a[: len(self._c)] = self._c
        b[: len(other._c)] = other._c
        return bool(np.all(np.abs(a - b) <= atol))

    def __repr__(self):
        return f"ComplexPoly({np.array2string(self._c, precision=6, separator=', ')})"

    def to_json(self) -> list:
        return [[float(c.real), float(c.imag)] for c in self._c]

    @classmethod
    def from_json(cls, data) -> "ComplexPoly":
        vals = []
        for item in data:
            if isinstance(item, (list, tuple)):
                re, im = item
                vals.append(complex(re, im))
            else:
                vals.append(complex(item))
        return cls(vals)


def as_poly(p) -> ComplexPoly:
    if isinstance(p, ComplexPoly):
        return p
    if np.isscalar(p):
        return ComplexPoly([p])
    return ComplexPoly(p)


@dataclass(frozen=True)
class RootCluster:
    value: complex
    multiplicity: int = 1

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be >= 1")
        object.__setattr__(self, "value", complex(self.value))


def canonical_order(values) -> np.ndarray:
    """Indices sorting complex values by (modulus, argument), descending."""
    v = np.asarray(values, dtype=complex)
    return np.lexsort((-np.angle(v), -np.abs(v)))


def mul(p, q) -> ComplexPoly:
    p, q = as_poly(p), as_poly(q)
    if p.is_zero or q.is_zero:
        return ComplexPoly()
    return ComplexPoly(np.convolve(p.coeffs, q.coeffs))


def derivative(p, order: int = 1) -> ComplexPoly:
    if order < 0:
        raise ValueError("order must be non-negative")
    c = as_poly(p).coeffs
    if order == 0:
        return as_poly(p)
    if order >= len(c):
        return ComplexPoly()
    k = np.arange(order, len(c), dtype=float)
    fall = np.ones_like(k)
    for j in range(order):
        fall *= k - j
    return ComplexPoly(c[order:] * fall)


def star(p) -> ComplexPoly:
    """``p*(z) = z**r * conj(p(1/conj(z)))``: reversed, conjugated coefficients."""
    p = as_poly(p)
    if p.is_zero:
        raise ZeroPolynomial("star of the zero polynomial")
    return ComplexPoly(np.conj(p.coeffs[::-1]))


def _as_clusters(items) -> list[RootCluster]:
    out = []
    for it in items:
        if isinstance(it, RootCluster):
            out.append(it)
        elif isinstance(it, (tuple, list)):
            out.append(RootCluster(it[0], int(it[1])))
        else:
            out.append(RootCluster(it, 1))
    return out


def from_roots(clusters) -> ComplexPoly:
    """Monic polynomial with the given roots (``RootCluster``, ``(value, mult)``
    pairs or bare values)."""
    c = np.ones(1, dtype=complex)
    for cl in _as_clusters(clusters):
        for _ in range(cl.multiplicity):
            c = np.convolve(c, [-cl.value, 1.0])
    return ComplexPoly(c)


def root_values(p) -> np.ndarray:
    """All roots of ``p`` (with repetition), unclustered.

    Exact zero low-order coefficients are split off as roots at 0. The rest is
    rescaled by ``s = |p0/pn|**(1/n)`` before forming the companion matrix;
    LAPACK's balancing alone does not cope with the geometric grading of
    polynomials whose roots cluster on a circle of radius far from 1.
    """
    p = as_poly(p)
    if p.is_zero:
        raise ZeroPolynomial("roots of the zero polynomial")
    if p.degree == 0:
        raise ConstantPolynomial("roots of a constant polynomial")
    c = p.coeffs
    nz0 = int(np.flatnonzero(c)[0])
    zeros = np.zeros(nz0, dtype=complex)
    q = c[nz0:]
    n = len(q) - 1
    if n == 0:
        return zeros
    s = _root_scale(q)
    qs = q * s ** np.arange(n + 1)
    qs = qs / qs[-1]
    if n == 1:
        r = np.array([-qs[0]])
    else:
        comp = np.zeros((n, n), dtype=complex)
        comp[1:, :-1] = np.eye(n - 1)
        comp[:, -1] = -qs[:-1]
        r = np.linalg.eigvals(comp)
    return np.concatenate([zeros, r * s])


def _root_scale(q) -> float:
    n = len(q) - 1
    # geometric mean of root moduli; log form avoids under/overflow
    return float(np.exp((np.log(abs(q[0])) - np.log(abs(q[-1]))) / n))


def roots(p, cluster_tol: float | None = None, *, adaptive: bool = True) -> list[RootCluster]:
    """Roots of ``p`` grouped into clusters.

    Roots closer than ``cluster_tol * max(1, |z|)`` are linked (single
    linkage). With ``adaptive`` set, groups of up to a dozen roots that look
    like a split multiple root (small spread compared to the eigensolver noise
    raised to ``1/k``, arranged as a near-regular polygon) are merged as well.
    """
    p = as_poly(p)
    vals = root_values(p)
    noise = 0.0
    scale = 1.0
    if adaptive:
        c = p.coeffs[np.flatnonzero(p.coeffs)[0]:]
        if len(c) > 1:
            scale = _root_scale(c)
            cs = c * scale ** np.arange(len(c))
            noise = _EIG_NOISE * float(np.linalg.norm(cs) / abs(cs[-1]))
    return cluster_values(vals, cluster_tol, noise=noise, scale=scale)


def cluster_values(values, cluster_tol: float | None = None, *, noise: float = 0.0,
                   scale: float = 1.0) -> list[RootCluster]:
    """Group complex values into :class:`RootCluster` objects.

    ``noise`` enables the multiplicity-aware pass (0 disables it); ``scale`` is
    the typical root modulus used when a centroid is near the origin.
    """
    z = np.asarray(values, dtype=complex).ravel()
    if z.size == 0:
        return []
    tol = DEFAULT_CLUSTER_TOL if cluster_tol is None else float(cluster_tol)
    thr = tol * np.maximum(1.0, np.abs(z))
    dist = np.abs(z[:, None] - z[None, :])
    adj = dist < np.maximum(thr[:, None], thr[None, :])
    _, labels = connected_components(adj, directed=False)
    groups = [np.flatnonzero(labels == g) for g in np.unique(labels)]
    if noise > 0 and len(groups) > 1:
        groups = _merge_split_multiples(z, groups, tol, noise, scale)
    clusters = [RootCluster(z[g].mean(), len(g)) for g in groups]
    order = canonical_order([c.value for c in clusters])
    return [clusters[i] for i in order]


def _merge_split_multiples(z, groups, tol, noise, scale):
    cents = np.array([z[g].mean() for g in groups])
    order = canonical_order(cents)
    alive = np.ones(len(groups), dtype=bool)
    reach = noise ** (1.0 / _MAX_MULTIPLICITY) * 2.0
    out = []
    for gi in order:
        if not alive[gi]:
            continue
        alive[gi] = False
        base = groups[gi]
        c0 = cents[gi]
        root_scale = max(abs(c0), scale)
        cand = np.flatnonzero(alive & (np.abs(cents - c0) <= reach * root_scale))
        cand = cand[np.argsort(np.abs(cents[cand] - c0), kind="stable")]
        best, best_used = base, []
        members, used = base, []
        for cj in cand:
            members = np.concatenate([members, groups[cj]])
            used = used + [cj]
            k = len(members)
            if k > _MAX_MULTIPLICITY:
                break
            if _looks_like_split_root(z[members], tol, noise, scale):
                best, best_used = members, list(used)
        for cj in best_used:
            alive[cj] = False
        out.append(np.sort(best))
    return out


def _looks_like_split_root(pts, tol, noise, scale) -> bool:
    k = len(pts)
    c = pts.mean()
    dev = pts - c
    spread = float(np.max(np.abs(dev)))
    if spread < tol * max(1.0, abs(c)):
        return True
    allowed = noise ** (1.0 / k) * max(abs(c), scale)
    if spread > allowed:
        return False
    if k == 2:
        return True
    # A perturbed k-fold root spreads into a near-regular k-gon around the
    # centroid; distinct nearby roots (e.g. along an arc) do not.
    radii = np.abs(dev)
    if radii.min() < 0.25 * radii.max():
        return False
    ang = np.sort(np.angle(dev))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))
    ideal = 2 * math.pi / k
    return bool(np.all(gaps > 0.4 * ideal) and np.all(gaps < 1.6 * ideal))


def match_clusters(a: Sequence[RootCluster], b: Sequence[RootCluster],
                   tol: float | None = None) -> list[RootCluster]:
    """Clusters present in both ``a`` and ``b`` with the smaller multiplicity.

    Pairs are matched greedily by distance; a pair matches when its distance is
    below ``tol * max(1, |value|)``.
    """
    tol = DEFAULT_CLUSTER_TOL if tol is None else float(tol)
    if not a or not b:
        return []
    av = np.array([c.value for c in a])
    bv = np.array([c.value for c in b])
    dist = np.abs(av[:, None] - bv[None, :])
    pairs = sorted(
        ((dist[i, j], i, j) for i in range(len(a)) for j in range(len(b))
         if dist[i, j] < tol * max(1.0, abs(av[i]), abs(bv[j]))),
    )
    used_a, used_b, out = set(), set(), []
    for _, i, j in pairs:
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        out.append(RootCluster(0.5 * (av[i] + bv[j]), min(a[i].multiplicity, b[j].multiplicity)))
    order = canonical_order([c.value for c in out])
    return [out[i] for i in order]


def gcd(p, q, tol: float | None = None) -> ComplexPoly:
    """Monic approximate GCD by matching the root clusters of ``p`` and ``q``."""
    p, q = as_poly(p), as_poly(q)
    if p.is_zero and q.is_zero:
        raise ZeroPolynomial("gcd of two zero polynomials")
    if p.is_zero:
        return q.monic()
    if q.is_zero:
        return p.monic()
    if p.degree < 1 or q.degree < 1:
        return ComplexPoly([1.0])
    return from_roots(match_clusters(roots(p, tol), roots(q, tol), tol))


def hausdorff(a, b) -> float:
    """Hausdorff distance between two finite sets of complex numbers."""
    a = np.asarray([c.value if isinstance(c, RootCluster) else c for c in a], dtype=complex)
    b = np.asarray([c.value if isinstance(c, RootCluster) else c for c in b], dtype=complex)
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return math.inf
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
