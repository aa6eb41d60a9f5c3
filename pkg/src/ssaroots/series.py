"""Series of finite difference dimension: models, generation and recurrences."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import InvalidFrequency, InvalidModel, RootAtZero, ZeroLeadCoefficient
from .polynomial import ComplexPoly, RootCluster, as_poly, canonical_order, from_roots

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class Term:
    """One summand ``poly(n) * root**n``; ``poly`` is in the monomial basis in ``n``."""

    root: complex
    poly: ComplexPoly

    def __post_init__(self):
        object.__setattr__(self, "root", complex(self.root))
        object.__setattr__(self, "poly", as_poly(self.poly))

    @property
    def multiplicity(self) -> int:
        return self.poly.degree + 1


@dataclass(frozen=True)
class SignalModel:
    """Sum of polynomially modulated exponentials, terms in canonical order.

    An empty model is the identically-zero series.
    """

    terms: tuple = ()

    def __post_init__(self):
        terms = tuple(t if isinstance(t, Term) else Term(*t) for t in self.terms)
        for t in terms:
            if t.root == 0:
                raise InvalidModel("term root must be nonzero")
            if t.poly.is_zero:
                raise InvalidModel("term polynomial must be nonzero")
            if not (np.isfinite(t.root) and np.all(np.isfinite(t.poly.coeffs))):
                raise InvalidModel("non-finite model entries")
        rts = [t.root for t in terms]
        if len(set(rts)) != len(rts):
            raise InvalidModel("term roots must be pairwise distinct")
        order = canonical_order(rts) if rts else []
        object.__setattr__(self, "terms", tuple(terms[i] for i in order))

    @classmethod
    def of(cls, *pairs) -> "SignalModel":
        """``SignalModel.of((root, coeffs), ...)``; bare numbers mean a constant 1."""
        terms = []
        for p in pairs:
            if isinstance(p, Term):
                terms.append(p)
            elif isinstance(p, (tuple, list)):
                root, poly = p
                terms.append(Term(root, as_poly(poly)))
            else:
                terms.append(Term(p, ComplexPoly([1.0])))
        return cls(tuple(terms))

    @property
    def d(self) -> int:
        return sum(t.multiplicity for t in self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def roots(self) -> list[complex]:
        return [t.root for t in self.terms]

    @property
    def clusters(self) -> list[RootCluster]:
        return [RootCluster(t.root, t.multiplicity) for t in self.terms]

    def to_json(self) -> dict:
        return {"terms": [{"root": [t.root.real, t.root.imag], "poly": t.poly.to_json()}
                          for t in self.terms]}

    @classmethod
    def from_json(cls, data) -> "SignalModel":
        if "real_terms" in data:
            return real_to_complex(
                [(t["rho"], t.get("omega", 0.0), t.get("phi", 0.0), t.get("poly", [1.0]))
                 for t in data["real_terms"]])
        terms = []
        for t in data.get("terms", []):
            root = t["root"]
            root = complex(*root) if isinstance(root, (list, tuple)) else complex(root)
            terms.append(Term(root, ComplexPoly.from_json(t.get("poly", [[1.0, 0.0]]))))
        return cls(tuple(terms))


@dataclass(frozen=True)
class Lrf:
    """``f[n+r] = sum(coeffs[k] * f[n+k] for k < r)``."""

    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @property
    def char_poly(self) -> ComplexPoly:
        return ComplexPoly(np.concatenate([-self.coeffs, [1.0]]))

    @classmethod
    def from_poly(cls, p) -> "Lrf":
        """LRF whose characteristic polynomial is ``p`` (made monic)."""
        p = as_poly(p).monic()
        return cls(-p.coeffs[:-1])


def char_poly(m: SignalModel) -> ComplexPoly:
    return from_roots(m.clusters)


def generate(m: SignalModel, N: int, real: bool = False) -> np.ndarray:
    """Samples ``f[n]`` for ``n = 0..N-1``.

    Warns when the difference dimension exceeds ``N / 2``; such a short
    series does not pin down its model. With ``real`` set, returns the real part
    (for models built from real-form terms).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if m.d > N / 2:
        warnings.warn(f"difference dimension {m.d} exceeds N/2 = {N / 2}", stacklevel=2)
    n = np.arange(N, dtype=float)
    f = np.zeros(N, dtype=complex)
    for t in m.terms:
        f += t.poly(n) * t.root ** n
    return f.real.copy() if real else f


def minimal_lrf(P) -> Lrf:
    P = as_poly(P).monic()
    if P.degree >= 1 and P.coeffs[0] == 0:
        raise RootAtZero("characteristic polynomial vanishes at zero")
    return Lrf(-P.coeffs[:-1])


def lrf_residuals(F, lrf: Lrf) -> np.ndarray:
    F = np.asarray(F, dtype=complex)
    r = lrf.order
    if r >= len(F):
        raise ValueError("LRF order must be below the series length")
    if r == 0:
        return F.copy()
    win = sliding_window_view(F, r + 1)
    return win[:, r] - win[:, :r] @ lrf.coeffs


def satisfies_lrf(F, lrf: Lrf, tol: float = 1e-10) -> bool:
    F = np.asarray(F, dtype=complex)
    scale = float(np.max(np.abs(F))) if len(F) else 0.0
    res = lrf_residuals(F, lrf)
    if scale == 0.0:
        return True
    return bool(np.max(np.abs(res), initial=0.0) < tol * scale)


def continue_series(F, lrf: Lrf, steps: int, direction: str = FORWARD) -> np.ndarray:
    F = np.asarray(F, dtype=complex)
    r = lrf.order
    if r > len(F):
        raise ValueError("LRF order exceeds the series length")
    a = lrf.coeffs
    out = list(F)
    if direction == FORWARD:
        for _ in range(steps):
            out.append(np.dot(a, out[len(out) - r:]) if r else 0.0)
        return np.array(out, dtype=complex)
    if direction != BACKWARD:
        raise ValueError(f"unknown direction {direction!r}")
    if r and a[0] == 0:
        raise ZeroLeadCoefficient("backward continuation needs a nonzero a_0")
    out = out[::-1]
    # f[n] = (f[n+r] - sum_{k>=1} a_k f[n+k]) / a_0, written on the reversed list
    for _ in range(steps):
        tail = out[len(out) - r:][::-1]  # f[n+1], ..., f[n+r]
        out.append((tail[-1] - np.dot(a[1:], tail[:-1])) / a[0] if r else 0.0)
    return np.array(out[::-1], dtype=complex)


def real_to_complex(terms) -> SignalModel:
    """Convert ``(rho, omega, phi, poly)`` cosine terms to a complex model.

    Each term reads ``poly(n) * rho**n * cos(2*pi*omega*n + phi)``.
    """
    acc: dict[complex, ComplexPoly] = {}
    for rho, omega, phi, poly in terms:
        if not abs(omega) < 0.5:
            raise InvalidFrequency(f"|omega| must be < 0.5, got {omega}")
        if rho <= 0:
            raise InvalidModel("rho must be positive")
        poly = as_poly(poly)
        if omega == 0:
            parts = [(complex(rho), poly * math.cos(phi))]
        else:
            lam = rho * np.exp(2j * math.pi * omega)
            parts = [(complex(lam), poly * (0.5 * np.exp(1j * phi))),
                     (complex(np.conj(lam)), poly * (0.5 * np.exp(-1j * phi)))]
        for root, p in parts:
            acc[root] = acc[root] + p if root in acc else p
    return SignalModel(tuple(Term(r, p) for r, p in acc.items() if not p.is_zero))
