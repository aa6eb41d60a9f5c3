"""Exact weak separability decisions from signal roots.

Two series with simple roots ``lam_k`` and ``mu_j`` have orthogonal trajectory
spaces at window ``L`` exactly when every product ``lam_k * conj(mu_j)`` is an
``L``-th root of unity other than 1. Equivalently all ``lam_k`` sit on one
lattice ``rho * exp(2j*pi*(m/L + omega))`` and all ``mu_j`` on the mirrored
lattice of radius ``1/rho``, at disjoint lattice slots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyBasis, RealRoot, WindowOutOfRange
from .polynomial import ComplexPoly, RootCluster, canonical_order, match_clusters, roots
from .series import SignalModel
from .trajectory import hankel

ANGLE_TOL = 1e-9 * 2 * math.pi
MODULUS_TOL = 1e-9
FAMILY_TOL = 1e-6

OK = "ok"
ROOT_FORM = "root-form-violation"
MULTIPLE_ROOT = "multiple-root"
BORDER = "border-case"


@dataclass(frozen=True)
class Witness:
    rho: float
    omega: float
    m: tuple
    n: tuple
    real_flag: bool = False

    def to_json(self) -> dict:
        return {"rho": self.rho, "omega": self.omega, "m": list(self.m), "n": list(self.n),
                "real": self.real_flag}


@dataclass(frozen=True)
class SeparabilityVerdict:
    separable: bool
    side: str
    reason: str
    window: int
    witness: Witness | None = None
    notes: tuple = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {"separable": self.separable, "side": self.side, "reason": self.reason,
                "window": self.window,
                "witness": self.witness.to_json() if self.witness else None,
                "notes": list(self.notes)}


@dataclass(frozen=True)
class SeparableFamily:
    """Roots (with maximal multiplicities) a left-separable partner may use."""

    admissible_roots: tuple

    @property
    def values(self) -> list[complex]:
        return [c.value for c in self.admissible_roots]


def separable_family(basis, tol: float = FAMILY_TOL) -> SeparableFamily:
    """Common nonzero roots of the conjugated generating polynomials of ``basis``.

    ``basis`` is a list of length-``L`` vectors or an ``L x r`` matrix whose
    columns are the vectors.
    """
    if isinstance(basis, np.ndarray) and basis.ndim == 2:
        vecs = [basis[:, j] for j in range(basis.shape[1])]
    else:
        vecs = [np.asarray(v, dtype=complex) for v in basis]
    if not vecs:
        raise EmptyBasis("basis must contain at least one vector")
    common = None
    for v in vecs:
        v = np.asarray(v, dtype=complex)
        if not np.any(v):
            raise EmptyBasis("basis vectors must be nonzero")
        p = ComplexPoly(np.conj(v))
        # leading zero coefficients only contribute roots at the origin
        p = ComplexPoly(p.coeffs[np.flatnonzero(np.abs(p.coeffs) > 0)[0]:])
        cl = roots(p, tol) if p.degree >= 1 else []
        common = cl if common is None else match_clusters(common, cl, tol)
        if not common:
            break
    return SeparableFamily(tuple(common or ()))


def _lattice(vals, L, omega):
    """Lattice slots of ``vals`` for offset ``omega``, or ``None`` off-lattice."""
    slots = []
    for v in vals:
        x = (np.angle(v) / (2 * math.pi) - omega) * L
        k = round(x)
        if abs(x - k) * 2 * math.pi / L > ANGLE_TOL:
            return None
        slots.append(int(k) % L)
    return slots


def _simple(m: SignalModel) -> bool:
    return all(t.multiplicity == 1 for t in m.terms)


def check_left_separable(m1: SignalModel, m2: SignalModel, L: int,
                         side: str = "left") -> SeparabilityVerdict:
    if L < 1:
        raise WindowOutOfRange("window length must be positive")
    if m1.is_zero or m2.is_zero:
        return SeparabilityVerdict(True, side, OK, L, notes=("zero series",))
    if not (_simple(m1) and _simple(m2)):
        return SeparabilityVerdict(False, side, MULTIPLE_ROOT, L)
    lam = np.array(m1.roots)
    mu = np.array(m2.roots)
    rho = float(abs(lam[0]))
    if (np.any(np.abs(np.abs(lam) - rho) > MODULUS_TOL * rho)
            or np.any(np.abs(np.abs(mu) * rho - 1) > MODULUS_TOL)):
        return SeparabilityVerdict(False, side, ROOT_FORM, L, notes=("modulus mismatch",))
    omega = (np.angle(lam[0]) / (2 * math.pi)) % (1.0 / L)
    if omega * L > 1 - 1e-9:
        omega = 0.0
    ms = _lattice(lam, L, omega)
    ns = _lattice(mu, L, omega)
    if ms is None or ns is None:
        return SeparabilityVerdict(False, side, ROOT_FORM, L, notes=("off lattice",))
    if len(set(ms) | set(ns)) != len(ms) + len(ns):
        return SeparabilityVerdict(False, side, ROOT_FORM, L, notes=("shared lattice slot",))
    real_flag = bool(min(omega * L, abs(omega * L - 0.5), abs(omega * L - 1)) < 1e-9)
    w = Witness(rho, float(omega), tuple(ms), tuple(ns), real_flag)
    return SeparabilityVerdict(True, side, OK, L, witness=w)


def check_conjugate_pair_constraint(lam: complex, L: int) -> int | None:
    """Index ``m`` in ``(0, L)`` with ``arg(lam) = 2*pi*m/(2L)``, else ``None``."""
    lam = complex(lam)
    if lam.imag == 0:
        raise RealRoot("constraint applies to non-real roots only")
    x = abs(np.angle(lam)) * 2 * L / (2 * math.pi)
    m = round(x)
    if abs(x - m) * 2 * math.pi / (2 * L) > ANGLE_TOL or not 0 < m < L:
        return None
    return int(m)


def numeric_separability(F1, F2, L: int) -> float:
    """Largest normalized inner product between lagged vectors of two series."""
    X = hankel(F1, L).data
    Y = hankel(F2, L).data
    nx = np.linalg.norm(X, axis=0)
    ny = np.linalg.norm(Y, axis=0)
    X, nx = X[:, nx > 0], nx[nx > 0]
    Y, ny = Y[:, ny > 0], ny[ny > 0]
    if X.shape[1] == 0 or Y.shape[1] == 0:
        return 0.0
    # both orders so the value is symmetric bit for bit
    a = np.abs(X.conj().T @ Y) / np.outer(nx, ny)
    b = np.abs(Y.conj().T @ X).T / np.outer(nx, ny)
    return float(max(a.max(), b.max()))


def _support(F, tol):
    a = np.abs(np.asarray(F, dtype=complex))
    nz = np.flatnonzero(a > tol * a.max()) if a.max() > 0 else np.array([], dtype=int)
    return nz


def _border_pattern(tail_series, head_series, L, tol):
    """Tail/head support lengths ``(a, b)`` if the first series vanishes before its
    last ``a`` samples and the second after its first ``b`` with ``a + b <= L``."""
    s1 = _support(tail_series, tol)
    s2 = _support(head_series, tol)
    if s1.size == 0 or s2.size == 0:
        return None
    a = len(tail_series) - int(s1[0])
    b = int(s2[-1]) + 1
    if a + b <= L:
        return a, b
    return None


def check_border_separable(F1, F2, L: int, tol: float = 1e-12,
                           ortho_tol: float = 1e-10) -> SeparabilityVerdict:
    """Separability of two series where one may be a non-continuable border series.

    The zero-pattern rule and a direct orthogonality test are both evaluated;
    the orthogonality test decides and any disagreement is noted.
    """
    F1 = np.asarray(F1, dtype=complex)
    F2 = np.asarray(F2, dtype=complex)
    if not (np.any(F1) and np.any(F2)):
        raise ValueError("both series must be nonzero")
    pattern = _border_pattern(F1, F2, L, tol) or _border_pattern(F2, F1, L, tol)
    ortho = numeric_separability(F1, F2, L) < ortho_tol
    notes = []
    if (pattern is not None) != ortho:
        notes.append("zero-pattern test and orthogonality test disagree")
    if ortho:
        reason = BORDER if pattern is not None else OK
    else:
        reason = ROOT_FORM
    if pattern is not None:
        notes.append(f"border supports: tail {pattern[0]}, head {pattern[1]}")
    return SeparabilityVerdict(ortho, "left", reason, L, notes=tuple(notes))


def check_two_sided(m1: SignalModel, m2: SignalModel, L: int, N: int) -> SeparabilityVerdict:
    dmax = max(m1.d, m2.d)
    if not dmax < L < N - dmax + 1:
        raise WindowOutOfRange(f"need {dmax} < L < {N - dmax + 1}, got L={L}")
    Ls = math.gcd(L, N - L + 1)
    v = check_left_separable(m1, m2, Ls, side="two_sided")
    return SeparabilityVerdict(v.separable, "two_sided", v.reason, Ls, v.witness,
                               v.notes + (f"effective window gcd(L, K) = {Ls}",))


def family_roots_sorted(family: SeparableFamily) -> list[RootCluster]:
    vals = family.values
    return [family.admissible_roots[i] for i in canonical_order(vals)] if vals else []
