"""Exceptions raised by the solvers."""


class InstanceError(ValueError):
    """An instance, coin or plan failed validation."""


class NotRegularError(InstanceError):
    """A continuous coin violates the regularity sign conditions."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class EnumerationCapError(RuntimeError):
    """An exhaustive search would exceed its configured size limit."""

    def __init__(self, size, cap):
        super().__init__(f"enumeration size {size} exceeds cap {cap}")
        self.size = size
        self.cap = cap
