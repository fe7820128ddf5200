"""Exception hierarchy.

Every error raised by the package derives from :class:`ARHypergraphError`
and carries an ``exit_code`` used by the command-line front end
(2 config error, 3 data error, 4 numerical failure).
"""


class ARHypergraphError(Exception):
    exit_code = 2


class ConfigError(ARHypergraphError, ValueError):
    exit_code = 2


class DataError(ARHypergraphError, ValueError):
    exit_code = 3


class NumericalError(ARHypergraphError, ArithmeticError):
    exit_code = 4


# hypercore
class DuplicateNode(DataError):
    pass


class SizeOutOfRange(DataError):
    pass


class NodeOutOfRange(DataError):
    pass


class UniverseMismatch(DataError):
    pass


class EdgeNotInUniverse(DataError):
    pass


# ar1 / estimate
class DegenerateStationary(NumericalError):
    pass


class NonPositiveRates(ConfigError):
    pass


class InvalidParameters(ConfigError):
    pass


class SeriesTooShort(DataError):
    pass


class InvalidLevel(ConfigError):
    pass


# diagnose
class DegenerateResidual(NumericalError):
    pass


class InvalidM(ConfigError):
    pass


# hsbm
class ZeroDegree(NumericalError):
    def __init__(self, node: int, matrix: int):
        super().__init__(f"node {node} has zero degree in similarity matrix {matrix}")
        self.node = node
        self.matrix = matrix


class EigenFailure(NumericalError):
    pass


class EmptyCommunity(DataError):
    pass


class LengthMismatch(DataError):
    pass


# changepoint / modelsel
class EmptyWindow(DataError):
    pass


class WindowTooSmall(ConfigError):
    pass


class EmptyRange(ConfigError):
    pass


# ingest
class ParseError(DataError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EmptyFile(DataError):
    pass


class NonPairInput(DataError):
    pass


class TargetTooLarge(ConfigError):
    pass
