"""Command-line entry point: ``clusterdomains {gen,minimize,experiment,oracle}``.

Exit status: 0 on success, 2 on bad arguments or invalid input data,
1 on I/O failures and runs that fail to converge.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .core import energy
from .dynamics import minimize_two_phase, run_domain_dynamics, run_random_dynamics, run_synchronous_dynamics
from .errors import DimensionMismatch, ModelError, NoConvergence
from .experiments import (
    ExperimentConfig,
    coupling_table,
    deepest_frequency_experiment,
    distortion_sweep,
    r_characteristic_experiment,
)
from .hebbian import (
    GroupSpec,
    block_constant_start,
    cluster_partition,
    generate_pattern_matrix,
    hebbian_matrix,
    random_group_sizes,
    random_start,
    random_symmetric_matrix,
)
from .oracle import brute_force_domain_minima, brute_force_minima

log = logging.getLogger("clusterdomains")

FIG2_B = "0.02,0.05,0.1,0.2"
FIG3_B = "0,0.02,0.05,0.1,0.2"


class UsageError(Exception):
    pass


def _u64(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("group sizes must be positive")
    return values


def _b_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    for b in values:
        if not 0.0 <= b < 0.5:
            raise argparse.ArgumentTypeError(f"b must lie in [0, 0.5), got {b}")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clusterdomains",
        description="Minimize -sum J_ij s_i s_j with random, synchronous and domain dynamics.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a connection matrix")
    kind = gen.add_mutually_exclusive_group(required=True)
    kind.add_argument("--hebbian", action="store_true", help="block Hebbian matrix from grouped patterns")
    kind.add_argument("--random-symmetric", action="store_true", help="Gaussian symmetric couplings")
    gen.add_argument("--n", type=_positive, help="number of spins N")
    gen.add_argument("--n-groups", type=_positive, help="number of pattern groups")
    gen.add_argument("--sizes", type=_int_list, help="comma-separated group sizes")
    gen.add_argument("--max-group", type=_positive, help="largest random group size")
    gen.add_argument("--m", type=_positive, default=30, help="pattern dimension M (default 30)")
    gen.add_argument("--b", type=float, default=0.0, help="distortion probability in [0, 0.5)")
    gen.add_argument("--seed", type=_u64, required=True)
    gen.add_argument("--out", type=Path, required=True, help="matrix file to write")
    gen.add_argument("--pattern-out", type=Path, help="also write the pattern matrix")
    gen.add_argument("--partition-out", type=Path, help="also write the cluster partition")

    mini = sub.add_parser("minimize", help="run one minimization")
    mini.add_argument("--matrix", type=Path, required=True)
    mini.add_argument("--dynamics", choices=("random", "synchronous", "domain"), default="random")
    mini.add_argument("--partition", type=Path, help="partition file (domain dynamics)")
    start = mini.add_mutually_exclusive_group()
    start.add_argument("--start", type=Path, help="start configuration file")
    start.add_argument("--block-start", action="store_true", help="random sign per domain of --partition")
    mini.add_argument("--defrost", action="store_true", help="continue with random dynamics after domains")
    mini.add_argument("--seed", type=_u64)
    mini.add_argument("--max-sweeps", type=_positive)
    mini.add_argument("--trace-out", type=Path, help="write 'step kind unit energy' per accepted flip")
    mini.add_argument("--out", type=Path, help="write the final configuration")

    exp = sub.add_parser("experiment", help="run a comparison protocol and write CSV tables")
    exp.add_argument("protocol", choices=("fig1", "fig2", "fig3", "table1"))
    exp.add_argument("--full-scale", action="store_true", help="N=1000, M=60, n=40, k=25, 200x1000 runs")
    exp.add_argument("--n", type=_positive)
    exp.add_argument("--m", type=_positive)
    exp.add_argument("--n-groups", type=_positive)
    exp.add_argument("--max-group", type=_positive)
    exp.add_argument("--min-group", type=_positive)
    exp.add_argument("--b", type=_b_list)
    exp.add_argument("--k-random", type=_positive)
    exp.add_argument("--matrices", type=_positive)
    exp.add_argument("--starts", type=_positive)
    exp.add_argument("--seed", type=_u64, required=True)
    exp.add_argument("--out", type=Path, default=Path("."), help="output directory")
    exp.add_argument("--threads", type=_positive, default=1, help="worker processes (wall time only)")

    orc = sub.add_parser("oracle", help="enumerate (domain) local minima of a small matrix")
    orc.add_argument("--matrix", type=Path, required=True)
    orc.add_argument("--partition", type=Path)
    orc.add_argument("--reference", type=Path, help="within-domain pattern (default all +1)")
    return parser


def _cmd_gen(args) -> None:
    if args.random_symmetric:
        if args.n is None:
            raise UsageError("--random-symmetric needs --n")
        io.write_matrix(args.out, random_symmetric_matrix(args.n, args.seed))
        return
    rng = np.random.default_rng([args.seed, 0])
    if args.sizes is not None:
        sizes = args.sizes
        if args.n_groups is not None and args.n_groups != len(sizes):
            raise UsageError(f"--n-groups {args.n_groups} disagrees with {len(sizes)} --sizes")
        if args.n is not None and args.n != sum(sizes):
            raise UsageError(f"--n {args.n} disagrees with sum of --sizes ({sum(sizes)})")
    elif args.n is not None and args.n_groups is not None:
        sizes = random_group_sizes(args.n, args.n_groups, rng, max_size=args.max_group)
    else:
        raise UsageError("--hebbian needs --sizes or both --n and --n-groups")
    spec = GroupSpec(sizes, args.b)
    X = generate_pattern_matrix(args.m, spec, np.random.default_rng([args.seed, 1]))
    io.write_matrix(args.out, hebbian_matrix(X))
    if args.pattern_out:
        io.write_pattern(args.pattern_out, X)
    if args.partition_out:
        io.write_partition(args.partition_out, cluster_partition(spec))


def _fmt_share(x) -> str:
    return "undefined" if x is None else repr(x)


def _write_trace(path, trajectories) -> None:
    lines, step = [], 0
    for kind, traj in trajectories:
        for unit, e in zip(traj.flips, traj.energy_trace):
            step += 1
            lines.append(f"{step} {kind} {unit + 1} {e!r}")
    Path(path).write_text("".join(line + "\n" for line in lines))


def _cmd_minimize(args) -> None:
    J = io.read_matrix(args.matrix)
    p = io.read_partition(args.partition) if args.partition else None
    if p is not None and p.size != J.size:
        raise DimensionMismatch(J.size, p.size, "partition")
    if args.dynamics == "domain" and p is None:
        raise UsageError("--dynamics domain needs --partition")
    if args.defrost and args.dynamics != "domain":
        raise UsageError("--defrost only applies to --dynamics domain")
    if args.block_start and p is None:
        raise UsageError("--block-start needs --partition")
    stochastic = args.dynamics != "synchronous" or args.start is None
    if stochastic and args.seed is None:
        raise UsageError("--seed is required for this run")
    rng = np.random.default_rng(args.seed) if args.seed is not None else None

    if args.start is not None:
        s0 = io.read_configuration(args.start)
        if s0.shape[0] != J.size:
            raise DimensionMismatch(J.size, s0.shape[0])
    elif args.block_start:
        s0 = block_constant_start(p, rng)
    else:
        s0 = random_start(J.size, rng)
    trace = args.trace_out is not None
    print(f"N: {J.size}")
    print(f"initial energy: {energy(J, s0)!r}")

    if args.dynamics == "synchronous":
        out = run_synchronous_dynamics(J, s0, args.max_sweeps)
        print(f"outcome: {out.kind.value}")
        print(f"sweeps: {out.sweeps}")
        for label, s in zip(("state A", "state B"), out.states):
            print(f"{label} energy: {energy(J, s)!r}")
            print(f"{label}: {io.format_configuration(s)}")
        final = out.states[0]
        if trace:
            Path(args.trace_out).write_text("")
    elif args.dynamics == "random":
        final, traj = run_random_dynamics(J, s0, rng, max_sweeps=args.max_sweeps, trace=trace)
        print(f"spin flips: {traj.steps}")
        print(f"sweeps: {traj.sweeps}")
        print(f"final energy E: {energy(J, final)!r}")
        if trace:
            _write_trace(args.trace_out, [("spin", traj)])
    elif args.defrost:
        out = minimize_two_phase(J, s0, p, rng, max_sweeps=args.max_sweeps, trace=trace)
        final = out.final_state
        print(f"domain flips: {out.domain_trajectory.steps}")
        print(f"domain minimum energy D: {out.domain_minimum_energy!r}")
        print(f"spin flips: {out.random_trajectory.steps}")
        print(f"final energy E: {out.final_energy!r}")
        print(f"d: {_fmt_share(out.d_share)}")
        print(f"r: {_fmt_share(out.r_share)}")
        if trace:
            _write_trace(args.trace_out, [("domain", out.domain_trajectory), ("spin", out.random_trajectory)])
    else:
        final, traj = run_domain_dynamics(J, s0, p, rng, max_sweeps=args.max_sweeps, trace=trace)
        print(f"domain flips: {traj.steps}")
        print(f"sweeps: {traj.sweeps}")
        print(f"domain minimum energy D: {energy(J, final)!r}")
        if trace:
            _write_trace(args.trace_out, [("domain", traj)])
    print(f"final configuration: {io.format_configuration(final)}")
    if args.out:
        io.write_configuration(args.out, final)


def _experiment_config(args, b: float) -> ExperimentConfig:
    base = ExperimentConfig.full_scale(args.seed) if args.full_scale else ExperimentConfig(seed=args.seed)
    flags = {
        "n_spins": args.n,
        "m": args.m,
        "n_groups": args.n_groups,
        "max_group": args.max_group,
        "min_group": args.min_group,
        "k_random": args.k_random,
        "matrices": args.matrices,
        "starts": args.starts,
    }
    return replace(base, b=b, **{k: v for k, v in flags.items() if v is not None})


def _cmd_experiment(args) -> None:
    args.out.mkdir(parents=True, exist_ok=True)
    proto = args.protocol
    if proto == "table1":
        b_values = args.b or _b_list(FIG2_B)
        rows = coupling_table(
            b_values,
            m=args.m or 600,
            n_spins=args.n or 300,
            n_groups=args.n_groups or 20,
            min_group=args.min_group or 10,
            seed=args.seed,
        )
        paths = io.write_table1(args.out, rows)
        print("b        (1-2b)^2   <J_in>")
        for r in rows:
            print(f"{r.b:<8g} {r.expected:<10.4f} {r.empirical:.4f}")
    elif proto == "fig1":
        b_values = args.b or (0.0,)
        if len(b_values) != 1:
            raise UsageError("fig1 takes a single --b value")
        report = deepest_frequency_experiment(_experiment_config(args, b_values[0]), args.threads)
        paths = io.write_fig1(args.out, report)
        print(f"deepest-minimum frequency, b={report.b:g}, {report.matrices} matrices x {report.starts_per_matrix} starts")
        for d, f in report.mean_frequency.items():
            print(f"{d:<8} {f:.4f}")
    elif proto == "fig2":
        b_values = args.b or _b_list(FIG2_B)
        reports = distortion_sweep(_experiment_config(args, 0.0), b_values, args.threads)
        paths = io.write_fig2(args.out, reports)
        print("b        " + " ".join(f"{d:<8}" for d in reports[0].dynamics))
        for rep in reports:
            print(f"{rep.b:<8g} " + " ".join(f"{rep.mean_frequency[d]:<8.4f}" for d in rep.dynamics))
    else:
        b_values = args.b or _b_list(FIG3_B)
        report = r_characteristic_experiment(_experiment_config(args, 0.0), b_values, args.threads)
        paths = io.write_fig3(args.out, report)
        print("b        " + " ".join(f"{d:<8}" for d in report.dynamics))
        for i, b in enumerate(report.b_values):
            print(f"{b:<8g} " + " ".join(f"{report.mean_r[d][i]:<8.4f}" for d in report.dynamics))
    for path in paths:
        print(f"wrote {path}")


def _print_minima(title, entries) -> None:
    print(f"{title}: {len(entries)}")
    for s, e in sorted(entries, key=lambda t: (t[1], t[0].tobytes())):
        print(f"{e!r} {io.format_configuration(s)}")


def _cmd_oracle(args) -> None:
    J = io.read_matrix(args.matrix)
    report = brute_force_minima(J)
    print(f"global minimum energy: {report.global_minimum_energy!r}")
    _print_minima("local minima (up to global flip)", report.local_minima)
    if args.partition is not None:
        p = io.read_partition(args.partition)
        ref = io.read_configuration(args.reference) if args.reference else None
        dom = brute_force_domain_minima(J, p, ref)
        _print_minima("domain local minima (up to global flip)", dom.domain_local_minima)
    elif args.reference is not None:
        raise UsageError("--reference needs --partition")


COMMANDS = {"gen": _cmd_gen, "minimize": _cmd_minimize, "experiment": _cmd_experiment, "oracle": _cmd_oracle}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, NoConvergence) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
