__all__ = [
    "ExemplioError",
    "ParseError",
    "BadDosMagic",
    "TruncatedFile",
    "BadHeaderOffset",
    "BadAlignment",
    "BadSignature",
    "ZeroAlignment",
    "InconsistentSpec",
    "ManipulationError",
    "InvalidInput",
    "SignedBinary",
    "MisalignedAmount",
    "HeaderBudgetExceeded",
    "NoHeaderRoom",
    "OverlapError",
    "LengthMismatch",
    "UnknownManipulation",
    "ModelError",
    "DegenerateDataset",
    "PositionOutOfRange",
    "DimensionMismatch",
    "ModelFormatError",
    "AttackError",
    "NotDifferentiable",
    "NoEditableBytesInWindow",
    "BudgetTooSmall",
    "QueryBudgetExceeded",
    "NoPayloadsFound",
    "ConfigError",
]


class ExemplioError(Exception):
    pass


class ParseError(ExemplioError, ValueError):
    rule = "parse-error"

    def __init__(self, message="", offset=None):
        super().__init__(message)
        self.offset = offset


class BadDosMagic(ParseError):
    rule = "bad-dos-magic"


class TruncatedFile(ParseError):
    rule = "truncated-file"


class BadHeaderOffset(ParseError):
    rule = "bad-header-offset"


class BadAlignment(ParseError):
    rule = "bad-alignment"


class BadSignature(ParseError):
    rule = "bad-signature"


class ZeroAlignment(ExemplioError, ValueError):
    pass


class InconsistentSpec(ExemplioError, ValueError):
    pass


class ManipulationError(ExemplioError):
    pass


class InvalidInput(ManipulationError):
    pass


class SignedBinary(InvalidInput):
    pass


class MisalignedAmount(ManipulationError):
    pass


class HeaderBudgetExceeded(ManipulationError):
    pass


class NoHeaderRoom(ManipulationError):
    pass


class OverlapError(ManipulationError):
    pass


class LengthMismatch(ManipulationError):
    pass


class UnknownManipulation(ManipulationError):
    pass


class ModelError(ExemplioError):
    pass


class DegenerateDataset(ModelError):
    pass


class PositionOutOfRange(ModelError, IndexError):
    pass


class DimensionMismatch(ModelError, ValueError):
    pass


class ModelFormatError(ModelError):
    pass


class AttackError(ExemplioError):
    pass


class NotDifferentiable(AttackError):
    pass


class NoEditableBytesInWindow(AttackError):
    pass


class BudgetTooSmall(AttackError):
    pass


class QueryBudgetExceeded(AttackError):
    pass


class NoPayloadsFound(AttackError):
    pass


class ConfigError(ExemplioError, ValueError):
    pass
