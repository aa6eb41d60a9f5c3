"""Exception hierarchy.

Input problems derive from :class:`InputError` (a ``ValueError``); failures of
the numerics on otherwise valid input derive from :class:`NumericalFailure`.
The CLI maps the two families to different exit codes.
"""


class SsaRootsError(Exception):
    """Base class for every error raised by this package."""


class InputError(SsaRootsError, ValueError):
    pass


class NumericalFailure(SsaRootsError, ArithmeticError):
    pass


# polynomial
class ZeroPolynomial(InputError):
    pass


class ConstantPolynomial(InputError):
    pass


# series / LRF
class InvalidModel(InputError):
    pass


class RootAtZero(InputError):
    pass


class ZeroLeadCoefficient(InputError):
    pass


class InvalidFrequency(InputError):
    pass


# trajectory
class WindowOutOfRange(InputError):
    pass


class WindowTooSmall(InputError):
    pass


class RankDeficient(NumericalFailure):
    pass


# separability
class EmptyBasis(InputError):
    pass


class RealRoot(InputError):
    pass


# minnorm
class Verticality(NumericalFailure):
    """``e_L`` lies (numerically) in the subspace; no forecasting LRF exists."""


class SingularSystem(NumericalFailure):
    pass


# asymptotics
class PoleEvaluation(NumericalFailure):
    pass


class TooFewRoots(InputError):
    pass


# cli
class ConfigInvalid(InputError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
