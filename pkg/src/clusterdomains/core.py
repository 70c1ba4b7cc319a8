"""Connection matrices, spin configurations, domain partitions and energy formulas.

Energy convention: ``E(s) = -sum_{i,j} J_ij s_i s_j`` over ordered pairs, so every
coupling is counted twice. Under this convention flipping spin ``i`` changes the
energy by ``4 * s_i * h_i`` and flipping a whole domain ``m`` by ``4 * F_m``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    AsymmetricEntry,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidSpins,
    NonzeroDiagonal,
    NotSquare,
    PartitionMismatch,
)

SYMMETRY_TOL = 1e-12
# Satisfaction / stability threshold relative to the largest absolute row sum.
# Ties (s_i h_i == 0, F_l == 0) count as satisfied; the slack only absorbs
# accumulated rounding in incrementally maintained fields.
FIELD_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class ConnectionMatrix:
    """Validated symmetric coupling matrix with zero diagonal.

    Build through :func:`validate_matrix`; ``entries`` is read-only.
    """

    entries: np.ndarray

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def tolerance(self) -> float:
        """Absolute slack used when testing ``s_i h_i >= 0`` and ``F_l >= 0``."""
        if self.size == 0:
            return 0.0
        scale = float(np.abs(self.entries).sum(axis=1).max())
        return FIELD_RTOL * max(1.0, scale)

    def __eq__(self, other):
        if not isinstance(other, ConnectionMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    __hash__ = None


def validate_matrix(raw) -> ConnectionMatrix:
    """Check symmetry and zero diagonal; return a frozen copy.

    Raises NotSquare, AsymmetricEntry(i, j, delta) for the first offending pair
    in row-major order (i < j), or NonzeroDiagonal(i).
    """
    if isinstance(raw, ConnectionMatrix):
        return raw
    a = np.array(raw, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSquare(a.shape)
    diag = np.flatnonzero(np.diagonal(a) != 0.0)
    if diag.size:
        i = int(diag[0])
        raise NonzeroDiagonal(i, float(a[i, i]))
    diff = np.abs(a - a.T)
    bad = np.argwhere(np.triu(diff > SYMMETRY_TOL))
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise AsymmetricEntry(i, j, float(diff[i, j]))
    a.setflags(write=False)
    return ConnectionMatrix(a)


def validate_spins(s, n: int | None = None) -> np.ndarray:
    """Return ``s`` as an int8 vector of +-1, checking its length against ``n``."""
    arr = np.asarray(s)
    if arr.ndim != 1:
        raise InvalidSpins(f"configuration must be one-dimensional, got shape {arr.shape}")
    if not np.all((arr == 1) | (arr == -1)):
        raise InvalidSpins("every spin must be exactly -1 or +1")
    if n is not None and arr.shape[0] != n:
        raise DimensionMismatch(n, arr.shape[0])
    return arr.astype(np.int8)


@dataclass(frozen=True, eq=False)
class DomainPartition:
    """Disjoint cover of spin indices by ``n`` non-empty domains.

    ``assignment[i]`` is the 0-based domain of spin ``i``. Domains may be any
    index subsets, not only contiguous ranges.
    """

    assignment: np.ndarray
    n: int = field(init=False)
    sizes: np.ndarray = field(init=False)

    def __post_init__(self):
        a = np.array(self.assignment, dtype=np.int64)
        if a.ndim != 1 or a.size == 0:
            raise PartitionMismatch("assignment must be a non-empty vector")
        if a.min() < 0:
            raise PartitionMismatch("domain labels must be non-negative")
        n = int(a.max()) + 1
        sizes = np.bincount(a, minlength=n)
        empty = np.flatnonzero(sizes == 0)
        if empty.size:
            raise PartitionMismatch(f"domain {int(empty[0]) + 1} is empty")
        a.setflags(write=False)
        sizes.setflags(write=False)
        object.__setattr__(self, "assignment", a)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def from_one_based(cls, labels) -> "DomainPartition":
        return cls(np.asarray(labels, dtype=np.int64) - 1)

    @classmethod
    def singletons(cls, n_spins: int) -> "DomainPartition":
        return cls(np.arange(n_spins))

    @property
    def size(self) -> int:
        return self.assignment.shape[0]

    @cached_property
    def members(self) -> tuple[np.ndarray, ...]:
        order = np.argsort(self.assignment, kind="stable")
        return tuple(np.split(order, np.cumsum(self.sizes)[:-1]))

    @cached_property
    def flat(self) -> tuple[np.ndarray, np.ndarray]:
        """Member indices grouped by domain plus CSR-style offsets."""
        order = np.argsort(self.assignment, kind="stable").astype(np.int64)
        offsets = np.concatenate(([0], np.cumsum(self.sizes))).astype(np.int64)
        return order, offsets

    def canonical(self) -> "DomainPartition":
        """Relabel domains in order of their smallest member."""
        _, first = np.unique(self.assignment, return_index=True)
        rank = np.empty(self.n, dtype=np.int64)
        rank[np.argsort(first)] = np.arange(self.n)
        return DomainPartition(rank[self.assignment])

    def same_sets(self, other: "DomainPartition") -> bool:
        return np.array_equal(self.canonical().assignment, other.canonical().assignment)

    def is_singleton(self) -> bool:
        return self.n == self.size

    def __eq__(self, other):
        if not isinstance(other, DomainPartition):
            return NotImplemented
        return np.array_equal(self.assignment, other.assignment)

    __hash__ = None


@dataclass(frozen=True)
class EnergyBreakdown:
    total: float
    domain_part: float
    intra_parts: tuple[float, ...]


def _as_matrix(J) -> ConnectionMatrix:
    return J if isinstance(J, ConnectionMatrix) else validate_matrix(J)


def _check_partition(p: DomainPartition, n: int) -> None:
    if p.size != n:
        raise PartitionMismatch(f"partition covers {p.size} spins, matrix has {n}")


def _check_index(i: int, upper: int, what: str = "spin") -> int:
    if not 0 <= i < upper:
        raise IndexOutOfRange(i, upper, what)
    return int(i)


def energy(J, s) -> float:
    """``-sum_{i,j} J_ij s_i s_j``."""
    J = _as_matrix(J)
    s = validate_spins(s, J.size).astype(np.float64)
    return float(-(s @ (J.entries @ s)))


def local_fields(J, s) -> np.ndarray:
    J = _as_matrix(J)
    s = validate_spins(s, J.size).astype(np.float64)
    return J.entries @ s


def local_field(J, s, i: int) -> float:
    """Field ``h_i = sum_j J_ij s_j`` acting on spin ``i`` (0-based)."""
    J = _as_matrix(J)
    s = validate_spins(s, J.size)
    i = _check_index(i, J.size)
    return float(J.entries[i] @ s.astype(np.float64))


def is_satisfied(J, s, i: int) -> bool:
    J = _as_matrix(J)
    return int(validate_spins(s, J.size)[i]) * local_field(J, s, i) >= -J.tolerance


def _intra_mask(p: DomainPartition) -> np.ndarray:
    return p.assignment[:, None] == p.assignment[None, :]


def domain_fields(J, s, p: DomainPartition) -> np.ndarray:
    """Local fields with same-domain contributions removed, for every spin."""
    J = _as_matrix(J)
    s = validate_spins(s, J.size).astype(np.float64)
    _check_partition(p, J.size)
    outside = np.where(_intra_mask(p), 0.0, J.entries)
    return outside @ s


def domain_local_field(J, s, p: DomainPartition, i: int) -> float:
    J = _as_matrix(J)
    s = validate_spins(s, J.size)
    _check_partition(p, J.size)
    i = _check_index(i, J.size)
    same = p.members[p.assignment[i]]
    sf = s.astype(np.float64)
    return float(J.entries[i] @ sf - J.entries[i, same] @ sf[same])


def domain_stabilities(J, s, p: DomainPartition) -> np.ndarray:
    """``F_l = sum_{i in l} s_i h_i^(d)`` for every domain."""
    J = _as_matrix(J)
    s = validate_spins(s, J.size)
    hd = domain_fields(J, s, p)
    return np.bincount(p.assignment, weights=s * hd, minlength=p.n)


def domain_stability(J, s, p: DomainPartition, l: int) -> float:
    J = _as_matrix(J)
    s = validate_spins(s, J.size)
    _check_partition(p, J.size)
    l = _check_index(l, p.n, "domain")
    idx = p.members[l]
    return float(sum(int(s[i]) * domain_local_field(J, s, p, int(i)) for i in idx))


def energy_breakdown(J, s, p: DomainPartition) -> EnergyBreakdown:
    J = _as_matrix(J)
    s = validate_spins(s, J.size)
    _check_partition(p, J.size)
    sf = s.astype(np.float64)
    intra = tuple(
        float(-(sf[idx] @ J.entries[np.ix_(idx, idx)] @ sf[idx])) for idx in p.members
    )
    return EnergyBreakdown(
        total=energy(J, s),
        domain_part=float(-domain_stabilities(J, s, p).sum()),
        intra_parts=intra,
    )
