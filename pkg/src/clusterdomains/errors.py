"""Exception types raised across the package.

Index attributes are 0-based; messages print 1-based indices.
"""

from __future__ import annotations


class ModelError(ValueError):
    """Base class for invalid inputs to the model and its tools."""


class NotSquare(ModelError):
    def __init__(self, shape):
        self.shape = tuple(shape)
        super().__init__(f"connection matrix must be square, got shape {self.shape}")


class AsymmetricEntry(ModelError):
    def __init__(self, i: int, j: int, delta: float):
        self.i, self.j, self.delta = i, j, delta
        super().__init__(
            f"matrix is not symmetric at ({i + 1}, {j + 1}): |J_ij - J_ji| = {delta:g}"
        )


class NonzeroDiagonal(ModelError):
    def __init__(self, i: int, value: float = float("nan")):
        self.i, self.value = i, value
        super().__init__(f"diagonal entry ({i + 1}, {i + 1}) is {value:g}, expected 0")


class DimensionMismatch(ModelError):
    def __init__(self, expected: int, got: int, what: str = "configuration"):
        self.expected, self.got = expected, got
        super().__init__(f"{what} has length {got}, expected {expected}")


class IndexOutOfRange(ModelError, IndexError):
    def __init__(self, index: int, upper: int, what: str = "spin"):
        self.index, self.upper = index, upper
        super().__init__(f"{what} index {index + 1} outside [1, {upper}]")


class PartitionMismatch(ModelError):
    pass


class InvalidSpins(ModelError):
    pass


class InvalidSpec(ModelError):
    pass


class SpecMismatch(ModelError):
    pass


class NotDivisible(ModelError):
    def __init__(self, n: int, k: int):
        self.n, self.k = n, k
        super().__init__(f"domain size {k} does not divide N={n}")


class TooLarge(ModelError):
    def __init__(self, size: int, limit: int, what: str = "N"):
        self.size, self.limit = size, limit
        super().__init__(f"{what}={size} exceeds enumeration limit {limit}")


class NoConvergence(RuntimeError):
    def __init__(self, max_sweeps: int):
        self.max_sweeps = max_sweeps
        super().__init__(f"no convergence within {max_sweeps} sweeps")


class InvalidConfig(ModelError):
    pass


class FormatError(ModelError):
    """Malformed input file; carries the 1-based line (and column when known)."""

    def __init__(self, path, line: int, message: str, column: int | None = None):
        self.path, self.line, self.column = str(path), line, column
        where = f"{self.path}:{line}" + (f":{column}" if column is not None else "")
        super().__init__(f"{where}: {message}")
