"""Exhaustive enumeration of local minima and domain local minima on small instances.

Results are deduplicated up to the global flip ``s -> -s`` by keeping only
configurations whose first spin (or first domain sign) is +1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import DomainPartition, _as_matrix, _check_partition, validate_spins
from .errors import TooLarge

MAX_ENUMERATION = 24
_CHUNK = 1 << 14


@dataclass
class OracleReport:
    local_minima: list[tuple[np.ndarray, float]] = field(default_factory=list)
    domain_local_minima: list[tuple[np.ndarray, float]] = field(default_factory=list)
    # Minimum over the enumerated space: all 2^N states for brute_force_minima,
    # the domain-reachable states for brute_force_domain_minima.
    global_minimum_energy: float = float("nan")

    @staticmethod
    def keys(entries) -> set[bytes]:
        return {canonical_key(s) for s, _ in entries}


def canonical_key(s) -> bytes:
    s = np.asarray(s, dtype=np.int8)
    if s[0] < 0:
        s = -s
    return s.tobytes()


def _sign_rows(start: int, stop: int, width: int) -> np.ndarray:
    # Row r encodes integer r; bit b -> coordinate b + 1, coordinate 0 fixed to +1.
    codes = np.arange(start, stop, dtype=np.int64)[:, None]
    bits = (codes >> np.arange(width - 1, dtype=np.int64)) & 1
    rows = np.ones((stop - start, width), dtype=np.int8)
    rows[:, 1:] = 1 - 2 * bits.astype(np.int8)
    return rows


def brute_force_minima(J) -> OracleReport:
    """Enumerate every configuration; keep those with all spins satisfied."""
    J = _as_matrix(J)
    n = J.size
    if n > MAX_ENUMERATION:
        raise TooLarge(n, MAX_ENUMERATION)
    tol = J.tolerance
    report = OracleReport(global_minimum_energy=float("inf"))
    total = 1 << (n - 1)
    for start in range(0, total, _CHUNK):
        s = _sign_rows(start, min(total, start + _CHUNK), n).astype(np.float64)
        sh = s * (s @ J.entries)
        e = -sh.sum(axis=1)
        report.global_minimum_energy = min(report.global_minimum_energy, float(e.min()))
        for r in np.flatnonzero((sh >= -tol).all(axis=1)):
            report.local_minima.append((s[r].astype(np.int8), float(e[r])))
    return report


def brute_force_domain_minima(J, p: DomainPartition, reference=None) -> OracleReport:
    """Enumerate all domain-sign patterns applied to ``reference``.

    ``reference`` defaults to all +1, so for a cluster partition the enumerated
    set is exactly the block-constant configurations. Keeps states where every
    domain stability ``F_l`` is non-negative.
    """
    J = _as_matrix(J)
    _check_partition(p, J.size)
    if p.n > MAX_ENUMERATION:
        raise TooLarge(p.n, MAX_ENUMERATION, "n")
    ref = np.ones(J.size, dtype=np.int8) if reference is None else validate_spins(reference, J.size)
    tol = J.tolerance
    outside = np.where(p.assignment[:, None] == p.assignment[None, :], 0.0, J.entries)
    indicator = np.zeros((J.size, p.n))
    indicator[np.arange(J.size), p.assignment] = 1.0
    report = OracleReport(global_minimum_energy=float("inf"))
    total = 1 << (p.n - 1)
    for start in range(0, total, _CHUNK):
        sigma = _sign_rows(start, min(total, start + _CHUNK), p.n)
        s = (sigma[:, p.assignment] * ref).astype(np.float64)
        e = -np.einsum("ri,ri->r", s, s @ J.entries)
        f = (s * (s @ outside)) @ indicator
        report.global_minimum_energy = min(report.global_minimum_energy, float(e.min()))
        for r in np.flatnonzero((f >= -tol).all(axis=1)):
            report.domain_local_minima.append((s[r].astype(np.int8), float(e[r])))
    return report
