"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
2 for rejected input, 3 for a broken numerical contract, 4 for a failed
gate verification.
"""


class QDError(Exception):
    exit_code = 3


class InvalidArgumentError(QDError, ValueError):
    exit_code = 2


class CapacityError(InvalidArgumentError):
    """Requested Hilbert space larger than 2**12."""


class DegenerateDriveError(InvalidArgumentError):
    """A = 0 together with a drive that leaves no preferred cyclic pair."""


class ContractViolationError(QDError):
    """An input failed a structural precondition (Hermiticity, unitarity)."""


class AccuracyError(QDError):
    def __init__(self, message, coarse=None, fine=None):
        super().__init__(message)
        self.coarse = coarse
        self.fine = fine


class NotCyclicError(QDError):
    pass


class CancellationError(QDError):
    def __init__(self, message, loops=None):
        super().__init__(message)
        self.loops = loops or []


class DecompositionMismatchError(QDError):
    exit_code = 4

    def __init__(self, message, fidelities=None, elements=None, composed=None):
        super().__init__(message)
        self.fidelities = fidelities or {}
        self.elements = elements or []
        self.composed = composed
