"""Exception hierarchy shared by every layer of the package.

``DataError`` subclasses describe bad input (files, vocabularies, shapes) and
map to CLI exit code 2. ``InvariantViolation`` marks an internal consistency
failure and maps to exit code 3.
"""


class FoodRecError(Exception):
    """Base class for all package errors."""


class DataError(FoodRecError, ValueError):
    """Input data does not satisfy a documented contract."""


class InvariantViolation(FoodRecError, RuntimeError):
    """An internal invariant was broken; indicates a bug, not bad input."""


# schema / encoding
class SchemaError(DataError):
    pass


class UnknownValue(DataError):
    pass


class ArityMismatch(DataError):
    pass


class MalformedVector(DataError):
    pass


class BlockOrderMismatch(DataError):
    pass


class BlockWidthMismatch(DataError):
    pass


class MalformedBlock(DataError):
    pass


class InvalidViableEntry(DataError):
    pass


# dataset loading / splitting
class ParseError(DataError):
    pass


class UnknownFoodLabel(DataError):
    pass


class DuplicateTuple(DataError):
    pass


class EmptyInput(DataError):
    pass


# images
class BadMagic(DataError):
    pass


class BadHeader(DataError):
    pass


class MaxvalUnsupported(DataError):
    pass


class TruncatedPixelData(DataError):
    pass


class EmptyImage(DataError):
    pass


class EmptyPalette(DataError):
    pass


# trees
class EmptyLabelSet(DataError):
    pass


class EmptyTrainingSet(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class DimensionMismatch(DataError):
    pass


# ensemble
class EmptyEnsemble(DataError):
    pass


class InvalidBinCount(DataError):
    pass


class NoNonEmptyBins(DataError):
    pass


class InvalidTarget(DataError):
    pass


class SingleClassInput(DataError):
    pass


# metrics
class LengthMismatch(DataError):
    pass


class UnknownLabel(DataError):
    pass


class EmptyEvaluationSet(DataError):
    pass


class InvalidBeta(DataError):
    pass


# pipeline
class ProviderFailure(DataError):
    def __init__(self, attribute, cause):
        self.attribute = attribute
        self.cause = cause
        super().__init__(f"provider for attribute {attribute!r} failed: {cause}")
