"""Plain-text instance files and CSV result tables.

Matrix file: line 1 holds ``N``, then ``N`` rows of ``N`` space-separated reals
written with 17 significant digits. Partition file: line 1 ``N n``, then one
1-based domain index per line. Configuration file: one line of ``+1``/``-1``.
Pattern file: line 1 ``M N``, then ``M`` rows of ``N`` entries ``+1``/``-1``.

Loaders never repair input; problems raise FormatError with line and column.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .core import SYMMETRY_TOL, ConnectionMatrix, DomainPartition, validate_matrix
from .errors import FormatError
from .experiments import CouplingRow, FrequencyReport, RCharacteristicReport
from .hebbian import PatternMatrix


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _spin(x) -> str:
    return "+1" if x > 0 else "-1"


def _lines(path) -> list[str]:
    lines = Path(path).read_text().splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    return lines


def _header(path, lines, count: int) -> list[int]:
    if not lines:
        raise FormatError(path, 1, "file is empty")
    parts = lines[0].split()
    if len(parts) != count:
        raise FormatError(path, 1, f"header must hold {count} integer(s), got {len(parts)}")
    values = []
    for col, tok in enumerate(parts, start=1):
        try:
            values.append(int(tok))
        except ValueError:
            raise FormatError(path, 1, f"not an integer: {tok!r}", col) from None
        if values[-1] < 1:
            raise FormatError(path, 1, f"header value must be positive, got {tok}", col)
    return values


def _row_count(path, lines, expected: int) -> None:
    if len(lines) - 1 != expected:
        raise FormatError(path, len(lines), f"expected {expected} data lines, found {len(lines) - 1}")


def write_matrix(path, J) -> None:
    a = J.entries if isinstance(J, ConnectionMatrix) else np.asarray(J, dtype=np.float64)
    rows = [str(a.shape[0])] + [" ".join(_fmt(x) for x in row) for row in a]
    Path(path).write_text("\n".join(rows) + "\n")


def read_matrix(path) -> ConnectionMatrix:
    lines = _lines(path)
    (n,) = _header(path, lines, 1)
    _row_count(path, lines, n)
    a = np.empty((n, n))
    for i in range(n):
        lineno = i + 2
        toks = lines[i + 1].split()
        if len(toks) != n:
            raise FormatError(path, lineno, f"expected {n} values, got {len(toks)}")
        for j, tok in enumerate(toks):
            try:
                a[i, j] = float(tok)
            except ValueError:
                raise FormatError(path, lineno, f"not a number: {tok!r}", j + 1) from None
            if not np.isfinite(a[i, j]):
                raise FormatError(path, lineno, f"non-finite value {tok!r}", j + 1)
    for i in range(n):
        if a[i, i] != 0.0:
            raise FormatError(path, i + 2, f"diagonal entry is {a[i, i]:g}, expected 0", i + 1)
    bad = np.argwhere(np.triu(np.abs(a - a.T) > SYMMETRY_TOL))
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise FormatError(
            path, j + 2, f"entry ({j + 1}, {i + 1}) = {float(a[j, i])!r} differs from ({i + 1}, {j + 1}) = {float(a[i, j])!r}", i + 1
        )
    return validate_matrix(a)


def write_partition(path, p: DomainPartition) -> None:
    rows = [f"{p.size} {p.n}"] + [str(int(l) + 1) for l in p.assignment]
    Path(path).write_text("\n".join(rows) + "\n")


def read_partition(path) -> DomainPartition:
    lines = _lines(path)
    n_spins, n_dom = _header(path, lines, 2)
    _row_count(path, lines, n_spins)
    labels = np.empty(n_spins, dtype=np.int64)
    for i in range(n_spins):
        tok = lines[i + 1].strip()
        try:
            labels[i] = int(tok)
        except ValueError:
            raise FormatError(path, i + 2, f"not a domain index: {tok!r}", 1) from None
        if not 1 <= labels[i] <= n_dom:
            raise FormatError(path, i + 2, f"domain index {tok} outside [1, {n_dom}]", 1)
    missing = np.setdiff1d(np.arange(1, n_dom + 1), labels)
    if missing.size:
        raise FormatError(path, 1, f"domain {int(missing[0])} has no members")
    return DomainPartition.from_one_based(labels)


def format_configuration(s) -> str:
    return " ".join(_spin(x) for x in np.asarray(s))


def write_configuration(path, s) -> None:
    Path(path).write_text(format_configuration(s) + "\n")


def _parse_spins(path, toks, lineno) -> np.ndarray:
    out = np.empty(len(toks), dtype=np.int8)
    for j, tok in enumerate(toks):
        if tok in ("+1", "1"):
            out[j] = 1
        elif tok == "-1":
            out[j] = -1
        else:
            raise FormatError(path, lineno, f"spin must be +1 or -1, got {tok!r}", j + 1)
    return out


def read_configuration(path) -> np.ndarray:
    lines = _lines(path)
    if len(lines) != 1:
        raise FormatError(path, max(1, len(lines)), "configuration file must hold exactly one line")
    return _parse_spins(path, lines[0].split(), 1)


def write_pattern(path, X: PatternMatrix) -> None:
    rows = [f"{X.M} {X.N}"] + [" ".join(_spin(x) for x in row) for row in X.columns]
    Path(path).write_text("\n".join(rows) + "\n")


def read_pattern(path) -> PatternMatrix:
    lines = _lines(path)
    m, n = _header(path, lines, 2)
    _row_count(path, lines, m)
    rows = []
    for mu in range(m):
        toks = lines[mu + 1].split()
        if len(toks) != n:
            raise FormatError(path, mu + 2, f"expected {n} values, got {len(toks)}")
        rows.append(_parse_spins(path, toks, mu + 2))
    return PatternMatrix(np.array(rows))


def _write_csv(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def _num(x) -> str:
    return repr(float(x))


def write_fig1(out_dir, report: FrequencyReport) -> list[Path]:
    out_dir = Path(out_dir)
    summary = [
        (d, _num(report.b), report.matrices, report.starts_per_matrix, _num(report.mean_frequency[d]))
        for d in report.dynamics
    ]
    per_matrix = [
        (m + 1, d, _num(report.deepest_energy[m]), report.counts[d][m], _num(report.frequencies(d)[m]))
        for m in range(report.matrices)
        for d in report.dynamics
    ]
    return [
        _write_csv(out_dir / "fig1.csv", ("dynamics", "b", "matrices", "starts", "mean_frequency"), summary),
        _write_csv(
            out_dir / "fig1_matrices.csv",
            ("matrix", "dynamics", "deepest_energy", "hits", "frequency"),
            per_matrix,
        ),
    ]


def write_fig2(out_dir, reports: list[FrequencyReport]) -> list[Path]:
    rows = [
        (_num(r.b), d, r.matrices, r.starts_per_matrix, _num(r.mean_frequency[d]))
        for r in reports
        for d in r.dynamics
    ]
    return [_write_csv(Path(out_dir) / "fig2.csv", ("b", "dynamics", "matrices", "starts", "mean_frequency"), rows)]


def write_fig3(out_dir, report: RCharacteristicReport) -> list[Path]:
    rows = [
        (_num(b), d, _num(report.mean_r[d][i]), report.defined[d][i], report.undefined[d][i])
        for i, b in enumerate(report.b_values)
        for d in report.dynamics
    ]
    return [_write_csv(Path(out_dir) / "fig3.csv", ("b", "dynamics", "mean_r", "defined_runs", "undefined_runs"), rows)]


def write_table1(out_dir, rows: list[CouplingRow]) -> list[Path]:
    body = [
        (_num(r.b), _num(r.expected), _num(r.empirical), _num(abs(r.empirical - r.expected)), r.pairs)
        for r in rows
    ]
    return [
        _write_csv(
            Path(out_dir) / "table1.csv", ("b", "expected_mean_coupling", "mean_coupling", "abs_error", "pairs"), body
        )
    ]


def read_csv(path) -> list[dict[str, str]]:
    with Path(path).open(newline="") as fh:
        return list(csv.DictReader(fh))

