"""Exception types raised by the gaitindex library."""


class GaitIndexError(Exception):
    """Base class for all gaitindex-specific errors."""


class SkeletonValidationError(GaitIndexError):
    """A skeleton frame violates its structural contract (joint count, finiteness)."""

    def __init__(self, message: str, frame_index: int | None = None):
        if frame_index is not None:
            message = f"frame {frame_index}: {message}"
        super().__init__(message)
        self.frame_index = frame_index


class SequenceFormatError(GaitIndexError):
    """A sequence CSV file is malformed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericError(GaitIndexError):
    """A non-finite value appeared during a network computation."""


class TrainingDivergedError(GaitIndexError):
    """Training produced a non-finite loss; carries the last epoch that was finite."""

    def __init__(self, message: str, last_good_epoch: int):
        super().__init__(f"{message} (last finite epoch: {last_good_epoch})")
        self.last_good_epoch = last_good_epoch


class DegenerateTrainingError(GaitIndexError):
    """A trained model reports zero reconstruction error, so fusion weights are undefined."""


class SingleClassError(GaitIndexError):
    """An evaluation was requested on scores that contain only one class label."""
