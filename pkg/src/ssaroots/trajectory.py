"""Trajectory (Hankel) matrices and the subspaces attached to them."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import RankDeficient, WindowOutOfRange, WindowTooSmall
from .polynomial import as_poly
from .series import BACKWARD, FORWARD, Lrf, SignalModel

CONTINUATION_TOL = 1e-8


@dataclass(frozen=True)
class TrajectoryMatrix:
    data: np.ndarray
    L: int

    @property
    def K(self) -> int:
        return self.data.shape[1]

    @property
    def N(self) -> int:
        return self.L + self.K - 1


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal columns spanning a subspace of C^L."""

    vectors: np.ndarray

    @property
    def L(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def project(self, v) -> np.ndarray:
        U = self.vectors
        return U @ (U.conj().T @ np.asarray(v, dtype=complex))


def hankel(F, L: int) -> TrajectoryMatrix:
    F = np.asarray(F, dtype=complex).ravel()
    N = len(F)
    if not 1 < L < N:
        raise WindowOutOfRange(f"window length must satisfy 1 < L < N (L={L}, N={N})")
    data = sla.hankel(F[:L], F[L - 1:])
    data.flags.writeable = False
    return TrajectoryMatrix(data, L)


def _as_matrix(X) -> np.ndarray:
    return X.data if isinstance(X, TrajectoryMatrix) else np.asarray(X, dtype=complex)


def singular_values(X) -> np.ndarray:
    return np.linalg.svd(_as_matrix(X), compute_uv=False)


def numerical_rank(X, rel_tol: float | None = None) -> int:
    A = _as_matrix(X)
    if rel_tol is None:
        rel_tol = max(A.shape) * 1e-12
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def trajectory_basis(X, d: int, exact: bool = True, rel_tol: float | None = None) -> SubspaceBasis:
    """Leading ``d`` left singular vectors.

    In exact mode a (numerically) vanishing ``d``-th singular value raises
    :class:`RankDeficient`; with ``exact=False`` the basis is returned anyway,
    which is what a noisy signal-subspace estimate needs.
    """
    A = _as_matrix(X)
    if not 0 < d <= min(A.shape):
        raise WindowOutOfRange(f"d={d} must lie in [1, min(L, K)] = [1, {min(A.shape)}]")
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if exact:
        tol = max(A.shape) * 1e-12 if rel_tol is None else rel_tol
        if s[0] == 0 or s[d - 1] <= tol * s[0]:
            raise RankDeficient(f"sigma_{d} is negligible relative to sigma_1")
    return SubspaceBasis(U[:, :d].copy())


def relations_basis(P, L: int) -> np.ndarray:
    """Banded ``L x (L-d)`` matrix whose column ``j`` holds the coefficients of ``z**j * P``."""
    p = as_poly(P).coeffs
    d = len(p) - 1
    if L <= d:
        raise WindowTooSmall(f"window length {L} must exceed deg P = {d}")
    M = np.zeros((L, L - d), dtype=complex)
    for j in range(L - d):
        M[j:j + d + 1, j] = p
    return M


def vandermonde_basis(m: SignalModel, L: int) -> np.ndarray:
    """Columns are the ``k``-th derivatives of ``(1, lam, ..., lam**(L-1))``.

    Entry ``j`` of the ``k``-th derivative is ``j!/(j-k)! * lam**(j-k)``.
    """
    if m.d >= L:
        raise WindowTooSmall(f"window length {L} must exceed d = {m.d}")
    j = np.arange(L)
    cols = []
    for t in m.terms:
        for k in range(t.multiplicity):
            fall = np.ones(L)
            for i in range(k):
                fall *= j - i
            powers = np.zeros(L, dtype=complex)
            powers[k:] = t.root ** (j[k:] - k)
            cols.append(fall * powers)
    return np.column_stack(cols) if cols else np.zeros((L, 0), dtype=complex)


def orthonormal_basis(F, L: int, rel_tol: float | None = None) -> SubspaceBasis:
    """Orthonormal basis of the trajectory space (rank chosen numerically)."""
    X = hankel(F, L)
    U, s, _ = np.linalg.svd(X.data, full_matrices=False)
    tol = max(X.data.shape) * 1e-12 if rel_tol is None else rel_tol
    r = int(np.sum(s > tol * s[0])) if s[0] > 0 else 0
    return SubspaceBasis(U[:, :r].copy())


def relations_space(F, L: int, rel_tol: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the relations space: conjugated complement
    of the trajectory space."""
    X = hankel(F, L)
    U, s, _ = np.linalg.svd(X.data, full_matrices=True)
    tol = max(X.data.shape) * 1e-12 if rel_tol is None else rel_tol
    r = int(np.sum(s > tol * s[0])) if s[0] > 0 else 0
    return U[:, r:].conj()


def is_continuable(F, L: int, direction: str = FORWARD, tol: float = CONTINUATION_TOL) -> bool:
    """Whether the last (forward) or first (backward) unit vector lies outside
    the trajectory space, by projection residual."""
    F = np.asarray(F, dtype=complex)
    N = len(F)
    if not 1 < L <= N / 2:
        raise WindowOutOfRange(f"continuability test needs 1 < L <= N/2 (L={L}, N={N})")
    if direction not in (FORWARD, BACKWARD):
        raise ValueError(f"unknown direction {direction!r}")
    basis = orthonormal_basis(F, L)
    e = np.zeros(L, dtype=complex)
    e[-1 if direction == FORWARD else 0] = 1.0
    return bool(np.linalg.norm(e - basis.project(e)) > tol)


def minimal_relation(F, L: int) -> Lrf:
    """Lowest-order LRF of order < L satisfied by ``F``, read off the relations space.

    A relation of order ``r`` is a relations-space vector supported on the
    first ``r + 1`` coordinates with a nonzero last one.
    """
    R = relations_space(F, L)
    if R.shape[1] == 0:
        raise RankDeficient("relations space is trivial; no LRF of order < L")
    for r in range(L):
        # vectors in span(R) vanishing below coordinate r+1
        tail = R[r + 1:, :]
        if tail.shape[0]:
            _, s, vh = np.linalg.svd(tail)
            rank = int(np.sum(s > 1e-9 * max(1.0, s[0]))) if s.size else 0
            null = vh[rank:].conj().T
        else:
            null = np.eye(R.shape[1], dtype=complex)
        if null.shape[1] == 0:
            continue
        v = (R @ null)[: r + 1]
        # the null space is one-dimensional at the minimal order
        v = v[:, int(np.argmax(np.abs(v[r])))]
        if abs(v[r]) < 1e-9 * np.linalg.norm(v):
            continue
        a = v / v[r]
        return Lrf(-a[:r])
    raise RankDeficient("no LRF found")


def principal_angles(A, B) -> np.ndarray:
    return sla.subspace_angles(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))


def gcd_window(L: int, K: int) -> int:
    return math.gcd(L, K)
