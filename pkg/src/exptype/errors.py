"""Exception taxonomy shared across the package.

Verifier functions generally return verdict objects instead of raising;
exceptions are reserved for misuse, unmet preconditions, and construction
failures that carry a witness.
"""


class ExptypeError(Exception):
    """Base class for all package errors."""


class NonSquareMatrix(ExptypeError):
    pass


class DimensionMismatch(ExptypeError):
    pass


class NoSolution(ExptypeError):
    """Inconsistent linear system."""


class CharPolyDoesNotSplit(ExptypeError):
    """The characteristic polynomial has a non-linear factor over the field.

    Carries the offending factor so the caller can extend the field.
    """

    def __init__(self, factor, message=None):
        self.factor = factor
        super().__init__(message or f"characteristic polynomial does not split; factor: {factor}")


class DenominatorDivisibleByP(ExptypeError):
    def __init__(self, denominator, p):
        self.denominator = denominator
        self.p = p
        super().__init__(f"denominator {denominator} is divisible by p={p}")


class EigenvalueDifferenceNotInvertible(ExptypeError):
    pass


class TruncationTooSmall(ExptypeError):
    pass


class SameEigenvalue(ExptypeError):
    """Rigidity is only claimed for distinct leading eigenvalues."""


class LeadingNotSingleEigenvalue(ExptypeError):
    pass


class CharacteristicZero(ExptypeError):
    """p-curvature requests over characteristic-zero fields are rejected."""


class MissingDegree(ExptypeError):
    pass


class CollapseNotFinite(ExptypeError):
    pass


class DegreeMismatch(ExptypeError):
    pass


class NotDegreeTwoGenerated(ExptypeError):
    pass


class RingAxiomFailure(ExptypeError):
    """Base for structure-constant table rejections; carries a witness."""

    def __init__(self, witness, message):
        self.witness = witness
        super().__init__(message)


class AssociativityFailure(RingAxiomFailure):
    def __init__(self, witness):
        super().__init__(witness, f"quantum product not associative; witness triple {witness}")


class GradingFailure(RingAxiomFailure):
    def __init__(self, witness):
        super().__init__(witness, f"structure constant violates the q-grading rule; witness {witness}")


class UnitFailure(RingAxiomFailure):
    def __init__(self, witness):
        super().__init__(witness, f"unit law fails; witness {witness}")


class CyclicSearchFailed(ExptypeError):
    def __init__(self, tries, obstruction):
        self.tries = tries
        self.obstruction = obstruction
        super().__init__(f"no cyclic vector found after {tries} tries ({obstruction})")


class ScaleExceeded(ExptypeError):
    pass


class NoCertificateWithinCap(ExptypeError):
    def __init__(self, cap):
        self.cap = cap
        super().__init__(f"no power of the potential lies in the Jacobian ideal up to exponent {cap}")


class NotIsolated(ExptypeError):
    """The Milnor ring is infinite dimensional."""


class RankUnstable(ExptypeError):
    def __init__(self, caps, message=None):
        self.caps = caps
        super().__init__(message or f"cohomology rank changed when caps increased; caps={caps}")


class NotACoboundary(ExptypeError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__("expected coboundary has no primitive within the truncation window")


class MismatchWitness(ExptypeError):
    def __init__(self, witness, message):
        self.witness = witness
        super().__init__(message)


class IrreducibilityUnverified(ExptypeError):
    """A characteristic-zero minimal polynomial could not be certified irreducible."""


class ManifestError(ExptypeError):
    """Malformed manifest or CLI usage error (exit code 3)."""
