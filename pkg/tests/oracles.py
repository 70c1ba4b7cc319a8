"""Independent reference implementations used as test oracles.

Plain Python loops over floats; nothing here calls the package's energy or
field code.
"""

from __future__ import annotations

import itertools

import numpy as np

from clusterdomains import DomainPartition, validate_matrix
from clusterdomains.hebbian import GroupSpec, generate_pattern_matrix, hebbian_matrix, random_group_sizes


# --- naive oracles: plain loops over Python floats, independent of the package ---


def naive_energy(J, s) -> float:
    n = len(s)
    return -sum(float(J[i][j]) * s[i] * s[j] for i in range(n) for j in range(n))


def naive_field(J, s, i) -> float:
    return sum(float(J[i][j]) * s[j] for j in range(len(s)))


def naive_domain_field(J, s, labels, i) -> float:
    return sum(float(J[i][j]) * s[j] for j in range(len(s)) if labels[j] != labels[i])


def naive_stability(J, s, labels, l) -> float:
    return sum(s[i] * naive_domain_field(J, s, labels, i) for i in range(len(s)) if labels[i] == l)


def naive_local_minima(J, tol=1e-9) -> set[tuple[int, ...]]:
    """Every configuration (both signs kept) with all spins satisfied."""
    n = len(J)
    return {
        s
        for s in itertools.product((-1, 1), repeat=n)
        if all(s[i] * naive_field(J, s, i) >= -tol for i in range(n))
    }


def naive_domain_minima(J, labels, reference=None, tol=1e-9) -> set[tuple[int, ...]]:
    n = len(J)
    ref = [1] * n if reference is None else list(reference)
    n_dom = max(labels) + 1
    out = set()
    for sigma in itertools.product((-1, 1), repeat=n_dom):
        s = tuple(sigma[labels[i]] * ref[i] for i in range(n))
        if all(naive_stability(J, s, labels, l) >= -tol for l in range(n_dom)):
            out.add(s)
    return out


def canon(s) -> tuple[int, ...]:
    s = tuple(int(x) for x in s)
    return s if s[0] > 0 else tuple(-x for x in s)


# --- instance factories ---


def random_instance(rng, n_max=64, n_min=2):
    n = int(rng.integers(n_min, n_max + 1))
    a = np.triu(rng.normal(size=(n, n)), k=1)
    J = validate_matrix(a + a.T)
    s = rng.choice(np.array([-1, 1], dtype=np.int8), size=n)
    n_dom = int(rng.integers(1, n + 1))
    labels = rng.integers(0, n_dom, size=n)
    _, labels = np.unique(labels, return_inverse=True)
    return J, s, DomainPartition(labels)


def block_hebbian(seed, n_max=14, m=20, groups=(3, 5)):
    """b=0 block Hebbian instance with 3-5 groups and N <= n_max."""
    rng = np.random.default_rng(seed)
    n_groups = int(rng.integers(groups[0], groups[1] + 1))
    n = int(rng.integers(n_groups + 2, n_max + 1))
    sizes = random_group_sizes(n, n_groups, rng)
    spec = GroupSpec(sizes, 0.0)
    return hebbian_matrix(generate_pattern_matrix(m, spec, rng)), spec
