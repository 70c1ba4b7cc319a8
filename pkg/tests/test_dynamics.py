import math

import numpy as np
import pytest

from clusterdomains import (
    DomainPartition,
    GroupSpec,
    SyncKind,
    cluster_partition,
    energy,
    generate_pattern_matrix,
    hebbian_matrix,
    minimize_two_phase,
    random_block_start,
    random_partition,
    run_domain_dynamics,
    run_random_dynamics,
    run_synchronous_dynamics,
    validate_matrix,
)
from clusterdomains.core import domain_stabilities, local_fields
from clusterdomains.errors import DimensionMismatch, NoConvergence, PartitionMismatch
from clusterdomains.oracle import brute_force_domain_minima, brute_force_minima, canonical_key
from oracles import canon, naive_domain_minima, naive_energy, naive_local_minima, random_instance

FERRO = [[0, 1], [1, 0]]
ANTI = [[0, -1], [-1, 0]]


def _replay(J, s0, traj, partition=None):
    """Yield (reported delta, recomputed delta, energy after) for each accepted flip."""
    s = np.array(s0)
    prev = traj.initial_energy
    assert prev == pytest.approx(naive_energy(J.entries, s), rel=1e-12, abs=1e-12)
    for unit, e_after in zip(traj.flips, traj.energy_trace):
        before = energy(J, s)
        if partition is None:
            s[unit] = -s[unit]
        else:
            s[partition.members[unit]] *= -1
        yield e_after - prev, energy(J, s) - before, e_after, s.copy()
        prev = e_after


class TestRandomDynamics:
    def test_zero_matrix_unchanged(self):
        s0 = np.array([1, -1, 1], dtype=np.int8)
        s, traj = run_random_dynamics(np.zeros((3, 3)), s0, 0)
        np.testing.assert_array_equal(s, s0)
        assert traj.steps == 0 and traj.sweeps == 1

    def test_two_spin_ferromagnet(self):
        seen = set()
        for seed in range(20):
            s, _ = run_random_dynamics(FERRO, [1, -1], seed)
            assert tuple(s) in {(1, 1), (-1, -1)}
            assert energy(FERRO, s) == -2.0
            seen.add(tuple(s))
        assert seen == {(1, 1), (-1, -1)}

    def test_result_is_oracle_local_minimum(self, rng):
        for _ in range(30):
            J, s0, _ = random_instance(rng, n_max=10)
            s, _ = run_random_dynamics(J, s0, rng)
            assert tuple(int(x) for x in s) in naive_local_minima(J.entries)

    def test_result_in_enumerated_minima_up_to_16(self, rng):
        for _ in range(10):
            J, s0, _ = random_instance(rng, n_max=16, n_min=12)
            s, _ = run_random_dynamics(J, s0, rng)
            assert canonical_key(s) in brute_force_minima(J).keys(brute_force_minima(J).local_minima)

    def test_all_spins_satisfied_and_trace_decreasing(self, rng):
        J, s0, _ = random_instance(rng, n_max=64, n_min=40)
        s, traj = run_random_dynamics(J, s0, rng, trace=True)
        assert np.all(s * local_fields(J, s) >= 0)
        trace = (traj.initial_energy,) + traj.energy_trace
        assert all(b < a for a, b in zip(trace, trace[1:]))
        assert len(traj.flips) == traj.steps

    def test_flip_deltas_match_recomputation(self, rng):
        J, s0, _ = random_instance(rng, n_max=40, n_min=30)
        _, traj = run_random_dynamics(J, s0, 5, trace=True)
        for reported, actual, *_ in _replay(J, s0, traj):
            assert math.isclose(reported, actual, rel_tol=1e-9)

    def test_deterministic(self, rng):
        J, s0, _ = random_instance(rng, n_max=30, n_min=20)
        a = run_random_dynamics(J, s0, 99, trace=True)
        b = run_random_dynamics(J, s0, 99, trace=True)
        np.testing.assert_array_equal(a[0], b[0])
        assert a[1] == b[1]

    def test_does_not_mutate_input(self):
        s0 = np.array([1, -1], dtype=np.int8)
        run_random_dynamics(FERRO, s0, 0)
        assert list(s0) == [1, -1]

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            run_random_dynamics(FERRO, [1, 1, 1], 0)

    def test_sweep_guard(self, rng):
        J, s0, _ = random_instance(rng, n_max=40, n_min=40)
        with pytest.raises(NoConvergence):
            run_random_dynamics(J, s0, 0, max_sweeps=1)


class TestSynchronous:
    def test_zero_matrix_fixed_point_first_sweep(self):
        out = run_synchronous_dynamics(np.zeros((3, 3)), [1, 1, -1])
        assert out.kind is SyncKind.FIXED_POINT
        assert out.sweeps == 1
        assert list(out.states[0]) == [1, 1, -1]

    def test_antiferromagnet_two_cycle(self):
        out = run_synchronous_dynamics(ANTI, [1, 1])
        assert out.kind is SyncKind.TWO_CYCLE
        assert {tuple(x) for x in out.states} == {(1, 1), (-1, -1)}

    def test_two_cycle_states_map_onto_each_other(self):
        out = run_synchronous_dynamics(ANTI, [1, 1])
        a, b = out.states
        for x, y in ((a, b), (b, a)):
            step = run_synchronous_dynamics(ANTI, x, max_sweeps=2)
            assert {tuple(v) for v in step.states} == {tuple(x), tuple(y)}
        assert not np.array_equal(a, b)

    def test_no_convergence(self):
        with pytest.raises(NoConvergence):
            run_synchronous_dynamics(ANTI, [1, 1], max_sweeps=1)

    def test_fixed_points_are_local_minima(self, rng):
        found = 0
        for _ in range(60):
            J, s0, _ = random_instance(rng, n_max=10)
            try:
                out = run_synchronous_dynamics(J, s0)
            except NoConvergence:
                continue
            if out.kind is SyncKind.FIXED_POINT:
                found += 1
                assert tuple(int(x) for x in out.states[0]) in naive_local_minima(J.entries)
        assert found > 0


class TestDomainDynamics:
    def test_singletons_reproduce_random_dynamics(self, rng):
        for _ in range(10):
            J, s0, _ = random_instance(rng, n_max=40)
            p = DomainPartition.singletons(J.size)
            a = run_random_dynamics(J, s0, 17, trace=True)
            b = run_domain_dynamics(J, s0, p, 17, trace=True)
            np.testing.assert_array_equal(a[0], b[0])
            assert a[1] == b[1]

    def test_single_domain_is_frozen(self, rng):
        J, s0, _ = random_instance(rng, n_max=30, n_min=10)
        p = DomainPartition(np.zeros(J.size, dtype=int))
        s, traj = run_domain_dynamics(J, s0, p, 3)
        np.testing.assert_array_equal(s, s0)
        assert traj.steps == 0

    def test_result_is_oracle_domain_minimum(self, rng):
        for _ in range(20):
            J, _, p = random_instance(rng, n_max=10)
            ref = rng.choice(np.array([-1, 1], dtype=np.int8), size=J.size)
            sigma = rng.choice([-1, 1], size=p.n)
            s0 = sigma[p.assignment] * ref
            s, _ = run_domain_dynamics(J, s0, p, rng)
            labels = list(p.assignment)
            assert tuple(int(x) for x in s) in naive_domain_minima(J.entries, labels, ref)

    def test_result_in_enumerated_domain_minima(self, rng):
        for _ in range(10):
            J, s0, _ = random_instance(rng, n_max=16, n_min=12)
            labels = np.arange(J.size) % int(rng.integers(2, 7))
            p = DomainPartition(rng.permutation(labels))
            s, _ = run_domain_dynamics(J, s0, p, rng)
            rep = brute_force_domain_minima(J, p, s0)
            assert canonical_key(s) in rep.keys(rep.domain_local_minima)

    def test_every_domain_stable_and_deltas_exact(self, rng):
        for _ in range(10):
            J, s0, p = random_instance(rng, n_max=64, n_min=30)
            s, traj = run_domain_dynamics(J, s0, p, rng, trace=True)
            assert np.all(domain_stabilities(J, s, p) >= -J.tolerance)
            for reported, actual, *_ in _replay(J, s0, traj, p):
                assert reported < 0
                assert math.isclose(reported, actual, rel_tol=1e-9)

    def test_domain_energy_drops_by_four_abs_f(self, rng):
        from clusterdomains import energy_breakdown

        J, s0, p = random_instance(rng, n_max=30, n_min=20)
        _, traj = run_domain_dynamics(J, s0, p, 8, trace=True)
        s = np.array(s0)
        for unit in traj.flips:
            f = domain_stabilities(J, s, p)[unit]
            before = energy_breakdown(J, s, p)
            s[p.members[unit]] *= -1
            after = energy_breakdown(J, s, p)
            assert after.domain_part - before.domain_part == pytest.approx(-4 * abs(f), rel=1e-9)
            assert after.total - before.total == pytest.approx(-4 * abs(f), rel=1e-9)

    def test_partition_mismatch(self):
        with pytest.raises(PartitionMismatch):
            run_domain_dynamics(FERRO, [1, 1], DomainPartition([0, 1, 2]), 0)


def _block_instance(seed, b=0.0, sizes=(5, 8, 3, 12, 7, 5), m=30):
    spec = GroupSpec(sizes, b)
    return hebbian_matrix(generate_pattern_matrix(m, spec, seed)), spec


class TestTwoPhase:
    def test_undiluted_cluster_run_has_zero_r(self):
        for seed in range(20):
            J, spec = _block_instance(seed)
            out = minimize_two_phase(J, random_block_start(spec, seed), cluster_partition(spec), seed)
            assert out.random_trajectory.steps == 0
            assert out.final_energy == out.domain_minimum_energy
            assert out.r_share == 0.0
            assert out.d_share == 1.0

    def test_singletons_give_equal_energies(self, rng):
        J, s0, _ = random_instance(rng, n_max=30, n_min=20)
        out = minimize_two_phase(J, s0, DomainPartition.singletons(J.size), 4)
        assert out.final_energy == out.domain_minimum_energy
        assert out.r_share == 0.0

    def test_random_domains_r_near_one(self):
        spec = GroupSpec((25,) * 8, 0.0)
        J = hebbian_matrix(generate_pattern_matrix(20, spec, 1))
        rs = []
        for seed in range(40):
            rng = np.random.default_rng(seed)
            s0 = rng.choice(np.array([-1, 1], dtype=np.int8), size=200)
            out = minimize_two_phase(J, s0, random_partition(200, 25, rng), rng)
            assert out.final_energy <= out.domain_minimum_energy
            rs.append(out.r_share)
        assert np.mean(rs) > 0.8

    def test_shares_sum_to_one_and_bounded(self, rng):
        for seed in range(20):
            J, spec = _block_instance(seed, b=0.1)
            s0 = rng.choice(np.array([-1, 1], dtype=np.int8), size=J.size)
            out = minimize_two_phase(J, s0, random_partition(J.size, 5, rng), rng)
            assert out.final_energy <= out.domain_minimum_energy
            if out.shares_defined:
                assert 0.0 <= out.r_share <= 1.0 and 0.0 <= out.d_share <= 1.0
                assert out.d_share + out.r_share == pytest.approx(1.0, abs=1e-12)

    def test_shares_undefined_when_domain_energy_not_negative(self):
        out = minimize_two_phase(np.zeros((4, 4)), [1, -1, 1, 1], DomainPartition([0, 0, 1, 1]), 0)
        assert out.domain_minimum_energy == 0.0
        assert out.r_share is None and out.d_share is None
        assert not out.shares_defined

    def test_defrost_starts_from_domain_state(self, rng):
        J, s0, p = random_instance(rng, n_max=40, n_min=30)
        out = minimize_two_phase(J, s0, p, 12, trace=True)
        s, _ = run_random_dynamics(J, out.domain_state, np.random.default_rng(0))
        assert out.random_trajectory.initial_energy == pytest.approx(energy(J, out.domain_state))

    def test_deterministic(self, rng):
        J, s0, p = random_instance(rng, n_max=40, n_min=30)
        a = minimize_two_phase(J, s0, p, 77, trace=True)
        b = minimize_two_phase(J, s0, p, 77, trace=True)
        assert a.domain_trajectory == b.domain_trajectory
        assert a.random_trajectory == b.random_trajectory
        np.testing.assert_array_equal(a.final_state, b.final_state)
