"""Random, synchronous and domain dynamics, plus the domain-then-defrost minimizer.

Sequential dynamics visit units (spins or domains) in a fresh uniform random
permutation each sweep and stop after the first sweep with no accepted flip.
Local fields are maintained incrementally: O(N) per spin flip, O(N k) per
domain flip of size k.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import DomainPartition, _as_matrix, _check_partition, energy, validate_spins
from .errors import NoConvergence


@njit(cache=True)
def _spin_sweep(J, s, h, order, tol, flips, deltas):
    n = s.shape[0]
    count = 0
    for t in range(order.shape[0]):
        i = order[t]
        sh = s[i] * h[i]
        if sh < -tol:
            si = s[i]
            row = J[i]
            for j in range(n):
                h[j] -= 2.0 * si * row[j]
            s[i] = -si
            flips[count] = i
            deltas[count] = 4.0 * sh
            count += 1
    return count


@njit(cache=True)
def _domain_sweep(J, s, h, members, offsets, intra, order, tol, flips, deltas):
    n = s.shape[0]
    count = 0
    for t in range(order.shape[0]):
        l = order[t]
        a = offsets[l]
        b = offsets[l + 1]
        f = 0.0
        for u in range(a, b):
            i = members[u]
            f += s[i] * h[i]
        f -= intra[l]
        if f < -tol:
            for u in range(a, b):
                i = members[u]
                si = s[i]
                row = J[i]
                for j in range(n):
                    h[j] -= 2.0 * si * row[j]
                s[i] = -si
            flips[count] = l
            deltas[count] = 4.0 * f
            count += 1
    return count


@njit(cache=True)
def _intra_couplings(J, s, members, offsets):
    # sum_{i,j in l} J_ij s_i s_j; unchanged by flipping the whole domain.
    n_dom = offsets.shape[0] - 1
    out = np.zeros(n_dom)
    for l in range(n_dom):
        acc = 0.0
        for u in range(offsets[l], offsets[l + 1]):
            i = members[u]
            for v in range(offsets[l], offsets[l + 1]):
                j = members[v]
                acc += J[i, j] * s[i] * s[j]
        out[l] = acc
    return out


@dataclass(frozen=True)
class Trajectory:
    """Bookkeeping of one sequential descent.

    ``flips`` holds the 0-based unit (spin or domain) flipped at each accepted
    step and ``energy_trace`` the energy after each of them; both are ``None``
    unless tracing was requested.
    """

    steps: int
    sweeps: int
    initial_energy: float
    energy_trace: tuple[float, ...] | None = None
    flips: tuple[int, ...] | None = None

    @property
    def final_energy(self) -> float:
        if self.energy_trace:
            return self.energy_trace[-1]
        return self.initial_energy


class SyncKind(enum.Enum):
    FIXED_POINT = "FixedPoint"
    TWO_CYCLE = "TwoCycle"


@dataclass(frozen=True)
class SynchronousOutcome:
    kind: SyncKind
    states: tuple[np.ndarray, ...]
    sweeps: int


@dataclass(frozen=True)
class RunOutcome:
    """Result of domain descent followed by defrosted random descent.

    ``d_share``/``r_share`` are ``None`` when the domain-phase energy is not
    negative (the ratios are then meaningless).
    """

    domain_minimum_energy: float
    final_energy: float
    final_state: np.ndarray
    d_share: float | None
    r_share: float | None
    domain_state: np.ndarray
    domain_trajectory: Trajectory
    random_trajectory: Trajectory

    @property
    def shares_defined(self) -> bool:
        return self.r_share is not None


def _default_sweeps(n_spins: int, max_sweeps: int | None, factor: int) -> int:
    if max_sweeps is None:
        return factor * max(1, n_spins)
    if max_sweeps < 1:
        raise ValueError("max_sweeps must be >= 1")
    return int(max_sweeps)


def _descend(sweep, n_units, rng, e0, max_sweeps, trace):
    flips = np.empty(n_units, dtype=np.int64)
    deltas = np.empty(n_units)
    steps = 0
    flip_log: list[int] = []
    energies: list[float] = []
    e = e0
    for sweep_no in range(1, max_sweeps + 1):
        order = rng.permutation(n_units)
        count = sweep(order, flips, deltas)
        steps += count
        if trace:
            for t in range(count):
                e += deltas[t]
                energies.append(float(e))
                flip_log.append(int(flips[t]))
        if count == 0:
            return Trajectory(
                steps=steps,
                sweeps=sweep_no,
                initial_energy=e0,
                energy_trace=tuple(energies) if trace else None,
                flips=tuple(flip_log) if trace else None,
            )
    raise NoConvergence(max_sweeps)


def run_random_dynamics(
    J, s0, seed, *, max_sweeps: int | None = None, trace: bool = False
) -> tuple[np.ndarray, Trajectory]:
    """Flip unsatisfied spins one at a time until every spin is satisfied.

    ``seed`` may be an integer or a ``numpy.random.Generator`` (which is then
    advanced in place).
    """
    J = _as_matrix(J)
    s = validate_spins(s0, J.size).copy()
    rng = np.random.default_rng(seed)
    h = J.entries @ s.astype(np.float64)
    tol = J.tolerance
    entries = J.entries

    def sweep(order, flips, deltas):
        return _spin_sweep(entries, s, h, order, tol, flips, deltas)

    traj = _descend(sweep, J.size, rng, energy(J, s), _default_sweeps(J.size, max_sweeps, 10), trace)
    return s, traj


def run_domain_dynamics(
    J, s0, p: DomainPartition, seed, *, max_sweeps: int | None = None, trace: bool = False
) -> tuple[np.ndarray, Trajectory]:
    """Flip whole domains with negative stability until every domain is stable.

    Each accepted flip of domain ``m`` lowers both the domain energy and the
    total energy by ``4 |F_m|``.
    """
    J = _as_matrix(J)
    s = validate_spins(s0, J.size).copy()
    _check_partition(p, J.size)
    rng = np.random.default_rng(seed)
    members, offsets = p.flat
    entries = J.entries
    h = entries @ s.astype(np.float64)
    intra = _intra_couplings(entries, s, members, offsets)
    tol = J.tolerance

    def sweep(order, flips, deltas):
        return _domain_sweep(entries, s, h, members, offsets, intra, order, tol, flips, deltas)

    traj = _descend(sweep, p.n, rng, energy(J, s), _default_sweeps(J.size, max_sweeps, 10), trace)
    return s, traj


def run_synchronous_dynamics(J, s0, max_sweeps: int | None = None) -> SynchronousOutcome:
    """Flip every unsatisfied spin at once until a fixed point or a 2-cycle.

    Only the two previous states are remembered; anything longer surfaces as
    NoConvergence.
    """
    J = _as_matrix(J)
    current = validate_spins(s0, J.size).copy()
    limit = _default_sweeps(J.size, max_sweeps, 2)
    tol = J.tolerance
    previous = None
    for sweep_no in range(1, limit + 1):
        h = J.entries @ current.astype(np.float64)
        unsatisfied = current * h < -tol
        if not unsatisfied.any():
            return SynchronousOutcome(SyncKind.FIXED_POINT, (current,), sweep_no)
        nxt = np.where(unsatisfied, -current, current).astype(np.int8)
        if previous is not None and np.array_equal(nxt, previous):
            return SynchronousOutcome(SyncKind.TWO_CYCLE, (previous, current), sweep_no)
        previous, current = current, nxt
    raise NoConvergence(limit)


def minimize_two_phase(
    J, s0, p: DomainPartition, seed, *, max_sweeps: int | None = None, trace: bool = False
) -> RunOutcome:
    """Domain dynamics to a domain local minimum, then random dynamics from there."""
    J = _as_matrix(J)
    rng = np.random.default_rng(seed)
    s_dom, dom_traj = run_domain_dynamics(J, s0, p, rng, max_sweeps=max_sweeps, trace=trace)
    s_fin, rnd_traj = run_random_dynamics(J, s_dom, rng, max_sweeps=max_sweeps, trace=trace)
    d_energy = energy(J, s_dom)
    e_energy = energy(J, s_fin) if rnd_traj.steps else d_energy
    d_share = r_share = None
    if d_energy < 0 and e_energy != 0:
        d_share = d_energy / e_energy
        # (E - D) / E written with non-negative operands so r == 0 prints as 0.0
        r_share = (d_energy - e_energy) / -e_energy
    return RunOutcome(
        domain_minimum_energy=d_energy,
        final_energy=e_energy,
        final_state=s_fin,
        d_share=d_share,
        r_share=r_share,
        domain_state=s_dom,
        domain_trajectory=dom_traj,
        random_trajectory=rnd_traj,
    )
