"""The SSA forecasting (Min-Norm) vector and its extraneous polynomial.

The SSA vector ``A`` is a rescaled projection of the last unit vector onto the
relations space. Its polynomial factors as ``A(z)/c = P(z) * H(z)`` where the
extraneous polynomial ``H`` solves a banded Hermitian Toeplitz system built from
``|P|**2`` on the unit circle. The ``H`` for successive degrees are orthogonal
polynomials on the unit circle for that weight, which is why their roots sit
strictly inside the unit disk.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .errors import RootAtZero, SingularSystem, Verticality, WindowTooSmall
from .polynomial import ComplexPoly, as_poly, root_values
from .series import Lrf
from .trajectory import SubspaceBasis, hankel, relations_basis, trajectory_basis

VERTICALITY_TOL = 1e-10


@dataclass(frozen=True)
class SsaLrf:
    R: np.ndarray
    A: np.ndarray
    c: float
    nu2: float

    @property
    def L(self) -> int:
        return len(self.A)

    @property
    def lrf(self) -> Lrf:
        return Lrf(self.R)

    @property
    def poly(self) -> ComplexPoly:
        return ComplexPoly(self.A)


def ssa_lrf_from_subspace(basis) -> SsaLrf:
    U = basis.vectors if isinstance(basis, SubspaceBasis) else np.asarray(basis, dtype=complex)
    if U.ndim == 1:
        U = U[:, None]
    pi = U[-1, :]
    nu2 = float(np.sum(np.abs(pi) ** 2))
    if nu2 >= 1 - VERTICALITY_TOL:
        raise Verticality(f"last unit vector lies in the subspace (nu^2 = {nu2:.3g})")
    c = 1.0 / (1.0 - nu2)
    R = c * (U[:-1, :].conj() @ pi)
    A = np.concatenate([-R, [1.0]]).astype(complex)
    return SsaLrf(R, A, c, nu2)


def ssa_vector_by_projection(P, L: int) -> SsaLrf:
    """SSA vector straight from the characteristic polynomial via the banded
    relations basis (QR projection of the last unit vector)."""
    Pm = relations_basis(P, L)
    Q, _ = np.linalg.qr(Pm)
    proj = Q @ Q[-1, :].conj()
    last = float(proj[-1].real)
    if last <= 0:
        raise Verticality("projection of the last unit vector vanishes")
    c = 1.0 / last
    A = c * proj
    A[-1] = 1.0
    return SsaLrf(-A[:-1].copy(), A, c, 1.0 - last)


def ssa_lrf(F, L: int, d: int) -> SsaLrf:
    """SSA LRF of a (possibly noisy) series from its ``d`` leading singular vectors."""
    return ssa_lrf_from_subspace(trajectory_basis(hankel(F, L), d, exact=False))


@dataclass(frozen=True)
class ToeplitzBand:
    """Hermitian band ``t[0..d]`` of the weight ``|P(z)|**2`` on the unit circle."""

    t: np.ndarray

    @property
    def d(self) -> int:
        return len(self.t) - 1

    def at(self, k: int) -> complex:
        if abs(k) > self.d:
            return 0j
        return complex(self.t[k]) if k >= 0 else complex(np.conj(self.t[-k]))

    def matrix(self, n: int) -> np.ndarray:
        """``(n+1) x (n+1)`` matrix with entries ``t[i-j]``."""
        col = np.zeros(n + 1, dtype=complex)
        m = min(n, self.d)
        col[: m + 1] = self.t[: m + 1]
        return sla.toeplitz(col, col.conj())

    def symbol(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, complex(self.t[0]))
        for k in range(1, self.d + 1):
            out = out + self.t[k] * z ** k + np.conj(self.t[k]) * z ** (-k)
        return out

    def scaled(self, alpha: float) -> "ToeplitzBand":
        return ToeplitzBand(self.t * alpha)


def toeplitz_coeffs(P) -> ToeplitzBand:
    p = as_poly(P).coeffs
    d = len(p) - 1
    t = np.array([np.dot(p[: d - k + 1].conj(), p[k:]) for k in range(d + 1)], dtype=complex)
    return ToeplitzBand(t)


def _band(P_or_band) -> ToeplitzBand:
    return P_or_band if isinstance(P_or_band, ToeplitzBand) else toeplitz_coeffs(P_or_band)


@dataclass(frozen=True)
class ExtraneousPoly:
    H: ComplexPoly
    n: int

    @property
    def leading(self) -> float:
        return float(self.H.leading.real)

    @property
    def monic(self) -> ComplexPoly:
        return self.H.monic()

    @property
    def normalized(self) -> ComplexPoly:
        """Unit norm in the weighted inner product."""
        return self.H / np.sqrt(self.leading)

    @cached_property
    def roots(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros(0, dtype=complex)
        return root_values(self.H)


def _solve_banded(band: ToeplitzBand, n: int) -> np.ndarray:
    d = min(band.d, n)
    ab = np.zeros((2 * d + 1, n + 1), dtype=complex)
    for k in range(-d, d + 1):
        # row u + i - j of ab holds the diagonal T[i, j] with i - j = k
        if k >= 0:
            ab[d + k, : n + 1 - k] = band.at(k)
        else:
            ab[d + k, -k:] = band.at(k)
    rhs = np.zeros(n + 1, dtype=complex)
    rhs[-1] = 1.0
    return sla.solve_banded((d, d), ab, rhs, check_finite=True)


def szego_recursion(band: ToeplitzBand, n_max: int):
    """Monic orthogonal polynomials ``Phi_0..Phi_{n_max}`` and their squared norms.

    ``Phi_{k+1} = z Phi_k - gamma_k Phi_k^*`` with ``Phi_k^*`` the reversed
    conjugate; each step costs ``O(k)``.
    """
    tc = np.conj(band.t)
    phi = np.ones(1, dtype=complex)
    E = float(band.t[0].real)
    phis, norms = [phi], [E]
    for _ in range(n_max):
        m = min(len(phi), band.d)
        beta = np.dot(phi[:m], tc[1: m + 1])
        gamma = beta / E
        nxt = np.zeros(len(phi) + 1, dtype=complex)
        nxt[1:] = phi
        nxt[:-1] -= gamma * np.conj(phi[::-1])
        E = E * (1.0 - abs(gamma) ** 2)
        if not E > 0:
            raise SingularSystem("weight is degenerate: vanishing norm in the recursion")
        phi = nxt
        phis.append(phi)
        norms.append(E)
    return phis, norms


def extraneous_poly(P_or_band, n: int, method: str = "banded") -> ExtraneousPoly:
    """Extraneous polynomial of degree ``n`` for the weight of ``P`` (or a band).

    ``method="banded"`` uses banded LU; ``method="levinson"`` runs the
    orthogonal-polynomial recursion instead.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    band = _band(P_or_band)
    if band.d < 0 or band.t[0].real <= 0:
        raise SingularSystem("weight is identically zero")
    if method == "banded":
        try:
            h = _solve_banded(band, n)
        except (np.linalg.LinAlgError, ValueError) as exc:
            raise SingularSystem(str(exc)) from exc
    elif method == "levinson":
        phis, norms = szego_recursion(band, n)
        h = phis[-1] / norms[-1]
    else:
        raise ValueError(f"unknown method {method!r}")
    if not np.all(np.isfinite(h)) or h[-1] == 0:
        raise SingularSystem("Toeplitz solve failed")
    return ExtraneousPoly(ComplexPoly(h), n)


def orthogonal_family(P_or_band, n_max: int) -> list[ExtraneousPoly]:
    phis, norms = szego_recursion(_band(P_or_band), n_max)
    return [ExtraneousPoly(ComplexPoly(p / e), k) for k, (p, e) in enumerate(zip(phis, norms))]


def weighted_inner_product(p, q, band) -> complex:
    """``<p, q>`` for the weight whose Fourier coefficients are the band.

    Exact bilinear form: ``<z**a, z**b> = t[b - a]``.
    """
    band = _band(band)
    pc = as_poly(p).coeffs
    qc = np.conj(as_poly(q).coeffs)
    total = 0j
    for k in range(-band.d, band.d + 1):
        # pairs (a, b = a + k)
        lo, hi = max(0, -k), min(len(pc), len(qc) - k)
        if hi > lo:
            total += band.at(k) * np.dot(pc[lo:hi], qc[lo + k: hi + k])
    return complex(total)


@dataclass(frozen=True)
class OrthogonalityReport:
    max_violation: float
    max_norm_error: float
    n_max: int
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_violation < self.tol and self.max_norm_error < self.tol


def verify_orthogonality(P_or_band, n_max: int, tol: float = 1e-10,
                         method: str = "banded") -> OrthogonalityReport:
    """Relative cross inner products of ``H_0..H_{n_max}`` and norm identities."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    band = _band(P_or_band)
    Hs = [extraneous_poly(band, k, method) for k in range(n_max + 1)]
    lead = [h.leading for h in Hs]
    worst = 0.0
    norm_err = 0.0
    for i, hi in enumerate(Hs):
        nn = weighted_inner_product(hi.H, hi.H, band)
        norm_err = max(norm_err, abs(nn - lead[i]) / lead[i])
        for j in range(i):
            v = abs(weighted_inner_product(hi.H, Hs[j].H, band))
            worst = max(worst, v / np.sqrt(lead[i] * lead[j]))
    return OrthogonalityReport(worst, norm_err, n_max, tol)


def extraneous_roots(P, n: int, method: str = "banded") -> np.ndarray:
    return extraneous_poly(P, n, method).roots


def reversed_char_poly(P) -> ComplexPoly:
    """Characteristic polynomial of the time-reversed series: ``p0**-1 * reversed(P)``."""
    P = as_poly(P).monic()
    if P.coeffs[0] == 0:
        raise RootAtZero("reversal needs P(0) != 0")
    return ComplexPoly(P.coeffs[::-1] / P.coeffs[0])


def backward_extraneous_roots(P, n: int, conjugated: bool = False) -> np.ndarray:
    """Extraneous roots of the SSA LRF run backwards.

    With the plain reversal these are the conjugates of the forward ones. With
    ``conjugated`` set, the backward LRF also conjugates its coefficients, and
    the roots coincide with the forward ones instead.
    """
    r = extraneous_roots(reversed_char_poly(P), n)
    return np.conj(r) if conjugated else r


def min_norm_check(A, P, trials: int = 100, seed: int = 0, eps: float = 1e-3) -> bool:
    """Randomized check that ``A`` has the smallest head norm among relations-space
    vectors with last coordinate 1.

    Each trial compares ``A`` with ``A +/- eps * w`` for a random ``w`` in the
    relations space with zero last coordinate.
    """
    A = np.asarray(A, dtype=complex)
    L = len(A)
    P = as_poly(P)
    Pm = relations_basis(P, L)
    if abs(A[-1] - 1) > 1e-12:
        return False
    # membership of A itself
    coef, *_ = np.linalg.lstsq(Pm, A, rcond=None)
    if np.linalg.norm(Pm @ coef - A) > 1e-8 * max(1.0, np.linalg.norm(A)):
        return False
    R0 = Pm[:, :-1]
    if R0.shape[1] == 0:
        return True
    rng = np.random.default_rng(seed)
    base = float(np.sum(np.abs(A[:-1]) ** 2))
    slack = 1e-12 * (1.0 + base)
    scale = eps * max(1.0, np.sqrt(base))
    for _ in range(trials):
        x = rng.standard_normal(R0.shape[1]) + 1j * rng.standard_normal(R0.shape[1])
        w = R0 @ x
        w *= scale / np.linalg.norm(w)
        for s in (1.0, -1.0):
            V = A + s * w
            if base > float(np.sum(np.abs(V[:-1]) ** 2)) + slack:
                return False
    return True
