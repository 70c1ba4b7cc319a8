"""Pattern matrices with repeated or distorted column groups, Hebbian couplings,
and partition / start-state builders.

Groups always occupy contiguous index ranges in the order of ``GroupSpec.sizes``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConnectionMatrix, DomainPartition, _as_matrix, validate_matrix
from .errors import InvalidSpec, NotDivisible, SpecMismatch


@dataclass(frozen=True)
class GroupSpec:
    sizes: tuple[int, ...]
    b: float = 0.0

    def __post_init__(self):
        sizes = tuple(int(k) for k in self.sizes)
        if not sizes:
            raise InvalidSpec("at least one group is required")
        if any(k < 1 for k in sizes):
            raise InvalidSpec(f"group sizes must be positive, got {list(sizes)}")
        if not 0.0 <= self.b < 0.5:
            raise InvalidSpec(f"distortion b must lie in [0, 0.5), got {self.b}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def n(self) -> int:
        return len(self.sizes)

    @property
    def total(self) -> int:
        return sum(self.sizes)

    def labels(self) -> np.ndarray:
        return np.repeat(np.arange(self.n), self.sizes)


@dataclass(frozen=True, eq=False)
class PatternMatrix:
    """``M x N`` matrix of +-1 entries; column ``i`` is the pattern of spin ``i``."""

    columns: np.ndarray

    def __post_init__(self):
        x = np.array(self.columns, dtype=np.int8)
        if x.ndim != 2 or not np.all((x == 1) | (x == -1)):
            raise InvalidSpec("pattern matrix must be 2-D with +-1 entries")
        x.setflags(write=False)
        object.__setattr__(self, "columns", x)

    @property
    def M(self) -> int:
        return self.columns.shape[0]

    @property
    def N(self) -> int:
        return self.columns.shape[1]

    def __eq__(self, other):
        if not isinstance(other, PatternMatrix):
            return NotImplemented
        return np.array_equal(self.columns, other.columns)

    __hash__ = None


def _spec(spec) -> GroupSpec:
    return spec if isinstance(spec, GroupSpec) else GroupSpec(tuple(spec))


def generate_pattern_matrix(M: int, spec: GroupSpec, seed) -> PatternMatrix:
    """Draw one uniform +-1 prototype per group and distort it per column.

    Every coordinate of every column is flipped independently with
    probability ``spec.b``; with ``b == 0`` columns of a group are identical.
    The random draws do not depend on ``b``, so the same seed yields nested
    distortions across different ``b``.
    """
    spec = _spec(spec)
    if M < 1:
        raise InvalidSpec(f"pattern dimension M must be >= 1, got {M}")
    rng = np.random.default_rng(seed)
    prototypes = rng.choice(np.array([-1, 1], dtype=np.int8), size=(M, spec.n))
    x = np.repeat(prototypes, spec.sizes, axis=1)
    flip = rng.random((M, spec.total)) < spec.b
    x[flip] *= -1
    return PatternMatrix(x)


def hebbian_matrix(X: PatternMatrix) -> ConnectionMatrix:
    """``J_ij = (x_i, x_j) / M`` off the diagonal, zero on it."""
    if X.N < 2:
        raise InvalidSpec("need at least two columns")
    x = X.columns.astype(np.int64)
    gram = x.T @ x
    np.fill_diagonal(gram, 0)
    return validate_matrix(gram / X.M)


def random_symmetric_matrix(n: int, seed, scale: float | None = None) -> ConnectionMatrix:
    """Gaussian couplings, symmetric with zero diagonal (default sd ``1/sqrt(n)``)."""
    if n < 1:
        raise InvalidSpec(f"N must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    sd = 1.0 / np.sqrt(n) if scale is None else scale
    a = np.triu(rng.normal(0.0, sd, size=(n, n)), k=1)
    return validate_matrix(a + a.T)


def random_group_sizes(
    total: int, n_groups: int, seed, *, min_size: int = 1, max_size: int | None = None
) -> tuple[int, ...]:
    """Uniform draw from all compositions of ``total`` into ``n_groups`` parts
    with every part in ``[min_size, max_size]``.

    Parts are sampled one at a time, weighting each candidate value by the
    number of ways to complete the remaining parts.
    """
    hi = total if max_size is None else max_size
    if n_groups < 1 or min_size < 1 or not n_groups * min_size <= total <= n_groups * hi:
        raise InvalidSpec(
            f"cannot split {total} into {n_groups} groups with sizes in [{min_size}, {hi}]"
        )
    rng = np.random.default_rng(seed)
    spare = total - n_groups * min_size
    width = hi - min_size
    # ways[j][t]: compositions of t into j parts in [0, width] (float; only ratios matter)
    ways = np.zeros((n_groups + 1, spare + 1))
    ways[0, 0] = 1.0
    for j in range(1, n_groups + 1):
        c = np.cumsum(ways[j - 1])
        shifted = np.concatenate((np.zeros(width + 1), c[: max(0, spare - width)]))[: spare + 1]
        ways[j] = c - shifted
        ways[j] /= ways[j].max()
    sizes, left = [], spare
    for j in range(n_groups, 0, -1):
        v = np.arange(min(width, left) + 1)
        w = ways[j - 1, left - v]
        v_pick = int(rng.choice(v, p=w / w.sum()))
        sizes.append(v_pick + min_size)
        left -= v_pick
    return tuple(sizes)


def cluster_partition(spec) -> DomainPartition:
    """One domain per group, covering exactly that group's index range."""
    return DomainPartition(_spec(spec).labels())


def random_partition(n_spins: int, k: int, seed) -> DomainPartition:
    """Chop a uniform random permutation of the spins into domains of size ``k``."""
    if k < 1 or n_spins < 1 or n_spins % k:
        raise NotDivisible(n_spins, k)
    rng = np.random.default_rng(seed)
    labels = np.empty(n_spins, dtype=np.int64)
    labels[rng.permutation(n_spins)] = np.arange(n_spins) // k
    return DomainPartition(labels)


def block_constant_start(p: DomainPartition, seed) -> np.ndarray:
    """Independent uniform sign per domain, copied to all its members."""
    rng = np.random.default_rng(seed)
    signs = rng.choice(np.array([-1, 1], dtype=np.int8), size=p.n)
    return signs[p.assignment]


def random_block_start(spec, seed) -> np.ndarray:
    return block_constant_start(cluster_partition(spec), seed)


def random_start(n_spins: int, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.choice(np.array([-1, 1], dtype=np.int8), size=n_spins)


def mean_intragroup_coupling(J, spec) -> float:
    """Average ``J_ij`` over ordered same-group pairs ``i != j``."""
    J = _as_matrix(J)
    spec = _spec(spec)
    if spec.total != J.size:
        raise SpecMismatch(f"spec covers {spec.total} spins, matrix has {J.size}")
    pairs = sum(k * (k - 1) for k in spec.sizes)
    if pairs == 0:
        raise SpecMismatch("every group is a singleton; no same-group pairs")
    labels = spec.labels()
    same = labels[:, None] == labels[None, :]
    return float(J.entries[same].sum() / pairs)
