"""Deepest-minimum frequency, distortion sweep, r-characteristic and coupling-table runs.

Per matrix the protocol compares three minimizers:

* ``RANDOM``: random dynamics from a uniform random start;
* ``DM-RND``: random domains of size ``k_random`` from the same start, then defrost;
* ``DM-CLS``: one domain per pattern group from a block-constant start, then defrost.

Every random draw comes from ``default_rng([seed, stream, matrix, start])``, so
results do not depend on execution order or on the number of worker processes.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .core import energy
from .dynamics import minimize_two_phase, run_random_dynamics
from .errors import InvalidConfig
from .hebbian import (
    GroupSpec,
    cluster_partition,
    generate_pattern_matrix,
    hebbian_matrix,
    mean_intragroup_coupling,
    random_block_start,
    random_group_sizes,
    random_partition,
)

log = logging.getLogger(__name__)

RANDOM, DM_RND, DM_CLS = "RANDOM", "DM-RND", "DM-CLS"
ALL_DYNAMICS = (RANDOM, DM_RND, DM_CLS)
DOMAIN_DYNAMICS = (DM_CLS, DM_RND)
TIE_RTOL = 1e-6
SIZE_BOUND_FACTOR = 1.8

# random-stream tags
_MATRIX, _START, _RANDOM, _DMRND, _DMCLS = range(5)


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one experiment; defaults are the desk-scale protocol."""

    seed: int
    n_spins: int = 300
    m: int = 30
    n_groups: int = 20
    b: float = 0.0
    k_random: int = 15
    matrices: int = 20
    starts: int = 200
    sizes: tuple[int, ...] | None = None
    min_group: int = 1
    max_group: int | None = None

    def __post_init__(self):
        if self.sizes is not None:
            object.__setattr__(self, "sizes", tuple(int(k) for k in self.sizes))
        self.validate()

    @classmethod
    def full_scale(cls, seed: int, **overrides) -> "ExperimentConfig":
        params = dict(
            n_spins=1000, m=60, n_groups=40, max_group=45, k_random=25, matrices=200, starts=1000
        )
        params.update(overrides)
        return cls(seed=seed, **params)

    def validate(self) -> None:
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise InvalidConfig("seed must be an unsigned 64-bit integer")
        for name in ("n_spins", "m", "n_groups", "k_random", "matrices", "starts", "min_group"):
            if getattr(self, name) < 1:
                raise InvalidConfig(f"{name} must be positive")
        if not 0.0 <= self.b < 0.5:
            raise InvalidConfig(f"b must lie in [0, 0.5), got {self.b}")
        if self.n_spins % self.k_random:
            raise InvalidConfig(f"k_random={self.k_random} does not divide N={self.n_spins}")
        if self.sizes is not None:
            if sum(self.sizes) != self.n_spins or len(self.sizes) != self.n_groups:
                raise InvalidConfig("sizes must have n_groups entries summing to N")
            if min(self.sizes) < 1:
                raise InvalidConfig("group sizes must be positive")
        elif self.n_groups * self.min_group > self.n_spins:
            raise InvalidConfig("too many groups for N at the requested minimum size")
        elif self.size_bound < self.min_group or self.n_groups * self.size_bound < self.n_spins:
            raise InvalidConfig("max_group too small to cover N")

    @property
    def size_bound(self) -> int:
        """Largest random group size; by default 1.8x the mean (45 for N=1000, n=40)."""
        if self.max_group is not None:
            return self.max_group
        return max(self.min_group, math.ceil(SIZE_BOUND_FACTOR * self.n_spins / self.n_groups))

    def group_spec(self, matrix: int) -> GroupSpec:
        sizes = self.sizes
        if sizes is None:
            sizes = random_group_sizes(
                self.n_spins,
                self.n_groups,
                _rng(self.seed, _MATRIX, matrix, 0),
                min_size=self.min_group,
                max_size=self.size_bound,
            )
        return GroupSpec(sizes, self.b)


def _rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), *keys])


@dataclass
class MatrixRecord:
    """Per-start outcomes on one matrix, index-aligned with the starts."""

    matrix: int
    final: dict[str, np.ndarray]
    domain: dict[str, np.ndarray] = field(default_factory=dict)
    r: dict[str, np.ndarray] = field(default_factory=dict)


def run_matrix(config: ExperimentConfig, matrix: int, dynamics=ALL_DYNAMICS) -> MatrixRecord:
    spec = config.group_spec(matrix)
    X = generate_pattern_matrix(config.m, spec, _rng(config.seed, _MATRIX, matrix, 1))
    J = hebbian_matrix(X)
    clusters = cluster_partition(spec)
    n = config.n_spins
    final = {d: np.empty(config.starts) for d in dynamics}
    domain = {d: np.empty(config.starts) for d in dynamics if d != RANDOM}
    r = {d: np.empty(config.starts) for d in dynamics if d != RANDOM}
    for j in range(config.starts):
        s0 = _rng(config.seed, _START, matrix, j).choice(np.array([-1, 1], dtype=np.int8), size=n)
        if RANDOM in dynamics:
            s, _ = run_random_dynamics(J, s0, _rng(config.seed, _RANDOM, matrix, j))
            final[RANDOM][j] = energy(J, s)
        if DM_RND in dynamics:
            rng = _rng(config.seed, _DMRND, matrix, j)
            out = minimize_two_phase(J, s0, random_partition(n, config.k_random, rng), rng)
            _store(out, DM_RND, j, final, domain, r)
        if DM_CLS in dynamics:
            rng = _rng(config.seed, _DMCLS, matrix, j)
            out = minimize_two_phase(J, random_block_start(spec, rng), clusters, rng)
            _store(out, DM_CLS, j, final, domain, r)
    return MatrixRecord(matrix, final, domain, r)


def _store(out, name, j, final, domain, r):
    final[name][j] = out.final_energy
    domain[name][j] = out.domain_minimum_energy
    r[name][j] = np.nan if out.r_share is None else out.r_share


def run_matrices(config: ExperimentConfig, dynamics=ALL_DYNAMICS, threads: int = 1) -> list[MatrixRecord]:
    """Run every matrix; ``threads`` > 1 uses worker processes and changes wall time only."""
    indices = range(config.matrices)
    if threads <= 1 or config.matrices == 1:
        records = []
        for m in indices:
            records.append(run_matrix(config, m, dynamics))
            log.debug("matrix %d/%d done", m + 1, config.matrices)
        return records
    with ProcessPoolExecutor(max_workers=threads) as pool:
        records = list(pool.map(run_matrix, [config] * config.matrices, indices, [dynamics] * config.matrices))
    return sorted(records, key=lambda rec: rec.matrix)


@dataclass(frozen=True)
class FrequencyReport:
    b: float
    dynamics: tuple[str, ...]
    matrices: int
    starts_per_matrix: int
    deepest_energy: tuple[float, ...]
    counts: dict[str, tuple[int, ...]]

    def frequencies(self, name: str) -> tuple[float, ...]:
        return tuple(c / self.starts_per_matrix for c in self.counts[name])

    @property
    def mean_frequency(self) -> dict[str, float]:
        return {d: float(np.mean(self.frequencies(d))) for d in self.dynamics}


def frequency_report(config: ExperimentConfig, records: list[MatrixRecord]) -> FrequencyReport:
    dynamics = tuple(d for d in ALL_DYNAMICS if d in records[0].final)
    deepest, counts = [], {d: [] for d in dynamics}
    for rec in sorted(records, key=lambda x: x.matrix):
        best = float(min(rec.final[d].min() for d in dynamics))
        threshold = best + TIE_RTOL * abs(best)
        deepest.append(best)
        for d in dynamics:
            counts[d].append(int(np.count_nonzero(rec.final[d] <= threshold)))
    return FrequencyReport(
        b=config.b,
        dynamics=dynamics,
        matrices=len(records),
        starts_per_matrix=config.starts,
        deepest_energy=tuple(deepest),
        counts={d: tuple(c) for d, c in counts.items()},
    )


def deepest_frequency_experiment(config: ExperimentConfig, threads: int = 1) -> FrequencyReport:
    """Share of starts reaching the deepest pooled minimum, per dynamics, averaged over matrices."""
    return frequency_report(config, run_matrices(config, ALL_DYNAMICS, threads))


def distortion_sweep(config: ExperimentConfig, b_values, threads: int = 1) -> list[FrequencyReport]:
    """Repeat the frequency experiment for every ``b``, reusing the master seed."""
    return [deepest_frequency_experiment(replace(config, b=float(b)), threads) for b in b_values]


@dataclass(frozen=True)
class RCharacteristicReport:
    b_values: tuple[float, ...]
    dynamics: tuple[str, ...]
    mean_r: dict[str, tuple[float, ...]]
    defined: dict[str, tuple[int, ...]]
    undefined: dict[str, tuple[int, ...]]


def mean_r_share(records: list[MatrixRecord], name: str) -> tuple[float, int, int]:
    """Average defined r over starts, then over matrices; also count (un)defined runs."""
    per_matrix, n_def, n_undef = [], 0, 0
    for rec in sorted(records, key=lambda x: x.matrix):
        vals = rec.r[name]
        ok = ~np.isnan(vals)
        n_def += int(ok.sum())
        n_undef += int((~ok).sum())
        if ok.any():
            per_matrix.append(float(vals[ok].mean()))
    mean = float(np.mean(per_matrix)) if per_matrix else float("nan")
    return mean, n_def, n_undef


def r_characteristic_experiment(
    config: ExperimentConfig, b_values, threads: int = 1
) -> RCharacteristicReport:
    means = {d: [] for d in DOMAIN_DYNAMICS}
    defined = {d: [] for d in DOMAIN_DYNAMICS}
    undefined = {d: [] for d in DOMAIN_DYNAMICS}
    for b in b_values:
        records = run_matrices(replace(config, b=float(b)), DOMAIN_DYNAMICS, threads)
        for d in DOMAIN_DYNAMICS:
            mean, nd, nu = mean_r_share(records, d)
            means[d].append(mean)
            defined[d].append(nd)
            undefined[d].append(nu)
    return RCharacteristicReport(
        b_values=tuple(float(b) for b in b_values),
        dynamics=DOMAIN_DYNAMICS,
        mean_r={d: tuple(v) for d, v in means.items()},
        defined={d: tuple(v) for d, v in defined.items()},
        undefined={d: tuple(v) for d, v in undefined.items()},
    )


@dataclass(frozen=True)
class CouplingRow:
    b: float
    expected: float
    empirical: float
    pairs: int


def coupling_table(
    b_values, *, m: int = 600, n_spins: int = 300, n_groups: int = 20, min_group: int = 10, seed: int
) -> list[CouplingRow]:
    """Mean same-group coupling against ``(1 - 2b)^2`` for each distortion level."""
    sizes = random_group_sizes(n_spins, n_groups, _rng(seed, _MATRIX, 0, 0), min_size=min_group)
    rows = []
    for b in b_values:
        spec = GroupSpec(sizes, float(b))
        J = hebbian_matrix(generate_pattern_matrix(m, spec, _rng(seed, _MATRIX, 0, 1)))
        rows.append(
            CouplingRow(
                b=float(b),
                expected=(1.0 - 2.0 * float(b)) ** 2,
                empirical=mean_intragroup_coupling(J, spec),
                pairs=sum(k * (k - 1) for k in sizes),
            )
        )
    return rows
