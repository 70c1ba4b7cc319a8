"""Minimization of binary quadratic functionals with random, synchronous and domain dynamics."""

from .core import (
    ConnectionMatrix,
    DomainPartition,
    EnergyBreakdown,
    domain_local_field,
    domain_stability,
    energy,
    energy_breakdown,
    local_field,
    validate_matrix,
    validate_spins,
)
from .dynamics import (
    RunOutcome,
    SynchronousOutcome,
    SyncKind,
    Trajectory,
    minimize_two_phase,
    run_domain_dynamics,
    run_random_dynamics,
    run_synchronous_dynamics,
)
from .hebbian import (
    GroupSpec,
    PatternMatrix,
    cluster_partition,
    generate_pattern_matrix,
    hebbian_matrix,
    mean_intragroup_coupling,
    random_block_start,
    random_partition,
)
from .oracle import OracleReport, brute_force_domain_minima, brute_force_minima

__version__ = "0.1.0"
