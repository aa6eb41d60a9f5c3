"""Signal and extraneous roots of linear recurrent formulae used in singular
spectrum analysis."""

__version__ = "0.1.0"

from .errors import InputError, NumericalFailure, SsaRootsError  # noqa: E402
from .polynomial import ComplexPoly, RootCluster, from_roots, gcd, roots, star  # noqa: E402
from .series import Lrf, SignalModel, Term, char_poly, generate, minimal_lrf  # noqa: E402

__all__ = [
    "__version__", "SsaRootsError", "InputError", "NumericalFailure",
    "ComplexPoly", "RootCluster", "roots", "gcd", "star", "from_roots",
    "SignalModel", "Term", "Lrf", "char_poly", "generate", "minimal_lrf",
]
