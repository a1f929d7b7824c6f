"""Exception types raised by bvlab operations."""


class BVError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class PreconditionError(BVError, ValueError):
    pass


class ClosureViolation(PreconditionError):
    def __init__(self, vertex, rule):
        self.vertex = vertex
        self.rule = rule
        super().__init__(f"{rule}: violated at vertex {vertex}")


class MaxPathAtDepth(BVError):
    """The path is maximal through its whole depth; its successor is not determined."""


class MinPathAtDepth(BVError):
    """The path is minimal through its whole depth; its predecessor is not determined."""


class NotEssentiallySimple(BVError):
    """Extreme paths are not unique and no bijection between them was configured."""


class OrbitEscapesDepth(BVError):
    def __init__(self, i, reason=""):
        self.i = i
        msg = f"orbit iterate {i} cannot be resolved at this depth"
        if reason:
            msg += f" ({reason})"
        super().__init__(msg)


class ExpansionTooShallow(BVError):
    pass


class PreconditionSymbolMismatch(PreconditionError):
    def __init__(self, row, position):
        self.row = row
        self.position = position
        super().__init__(f"symbols differ at row {row}, position {position}")


class NotACutPosition(PreconditionError):
    pass


class NoUpperLevel(PreconditionError):
    pass


class CertificateFailure(BVError):
    def __init__(self, certificate):
        self.certificate = certificate
        super().__init__(certificate.failure.describe())


class DiagramParseError(BVError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
