class OrderSpecError(ValueError):
    def __init__(self, message, errors):
        super().__init__(message)
        self.errors = errors


class ForeignElementError(ValueError):
    def __init__(self, message, errors):
        super().__init__(message)
        self.errors = errors


class BudgetExceededError(Exception):
    def __init__(self, message, errors):
        super().__init__(message)
        self.errors = errors


class CertificationError(Exception):
    def __init__(self, message, errors):
        super().__init__(message)
        self.errors = errors


class EmbeddingError(Exception):
    def __init__(self, message, errors):
        super().__init__(message)
        self.errors = errors


class AmalgamationError(Exception):
    def __init__(self, message, errors):
        super().__init__(message)
        self.errors = errors


class ExtensionError(Exception):
    """Base of the extension lemma diagnoses; ``diagnosis`` names the failed hypothesis"""
    diagnosis = "ExtensionError"

    def __init__(self, message, errors):
        super().__init__(message)
        self.errors = errors


class NotClosedError(ExtensionError):
    diagnosis = "NotClosed"


class NotAtomicEquivError(ExtensionError):
    diagnosis = "NotAtomicEquiv"


class MarginTooSmallError(ExtensionError):
    diagnosis = "MarginTooSmall"


class EpsilonBoundError(ExtensionError):
    diagnosis = "EpsilonBound"


class ParentMissingError(ExtensionError):
    diagnosis = "ParentMissing"


class NotWellFoundedError(ExtensionError):
    diagnosis = "NotWellFounded"


class PreconditionError(Exception):
    def __init__(self, message, errors):
        super().__init__(message)
        self.errors = errors


class GameInvariantError(Exception):
    def __init__(self, message, errors):
        super().__init__(message)
        self.errors = errors


class SnapshotError(Exception):
    def __init__(self, message, errors):
        super().__init__(message)
        self.errors = errors


class SpectrumError(ValueError):
    def __init__(self, message, errors):
        super().__init__(message)
        self.errors = errors
