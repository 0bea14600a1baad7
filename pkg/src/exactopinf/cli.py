"""Command-line interface: experiment runner and file-level tool wrappers.

Subcommands
-----------
experiment   Run one bundled benchmark end to end and export CSV metrics.
infer        Recover a reduced operator from single-step data or a builtin
             benchmark, writing an operator CSV.
pod          Compute an orthonormal basis from a snapshot CSV.
diagnose     Structure and accuracy metrics of an operator CSV.

Exit codes: 0 success (all thresholds pass), 1 threshold failure (with a
machine-readable JSON failure list on stdout), 2 file schema violation,
3 rank deficiency / singular system.  Thread count for ensemble generation
comes from --threads, then the EXACTOPINF_THREADS environment variable,
then the available core count; results are independent of it.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .benchmarks import (
    SPECS,
    apply_overrides,
    build_burgers,
    build_chafee_infante,
    build_shallow_ice,
    parse_config,
)
from .diagnostics import (
    block_errors,
    build_report,
    diffusion_spectrum,
    energy_violation,
    relative_operator_error,
    symmetry_violation,
)
from .exact_opinf import (
    SingularDataMatrixError,
    extend_ensemble,
    generate_ensemble,
    infer,
    rank_ensuring_pairs,
    standard_opinf,
)
from .fom import SnapshotMatrix, simulate
from .galerkin import intrusive_reduce
from .pod import RankDeficiencyError, pod_basis
from .serialize import (
    SchemaError,
    _fmt,
    _header_line,
    read_ensemble,
    read_snapshots,
    write_basis,
    write_operator,
    _read_plain_matrix,
)
from .tensor_poly import MonomialBasis
from .exact_opinf import estimate_dt

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_SCHEMA = 2
EXIT_RANK = 3


def _resolve_threads(value):
    if value is not None:
        return value
    env = os.environ.get("EXACTOPINF_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def _write_table(path, kind, header, rows):
    """Versioned CSV: comment header line, column names, formatted rows."""
    with open(path, "w", newline="") as fh:
        fh.write(_header_line(kind) + "\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [_fmt(v) if isinstance(v, float) else str(v) for v in row]
            )


def _canonical_benchmark(name: str) -> str:
    key = name.replace("-", "_")
    if key not in SPECS:
        raise KeyError(name)
    return key


def _build_benchmark(spec, freeze_right=False):
    """Returns (fom, signal, x0) for any of the bundled systems."""
    if spec.name == "chafee_infante":
        return build_chafee_infante(spec, freeze_right=freeze_right)
    if spec.name == "shallow_ice":
        fom, x0 = build_shallow_ice(spec)
        return fom, None, x0
    if spec.name == "burgers":
        fom, x0 = build_burgers(spec)
        return fom, None, x0
    raise KeyError(spec.name)


def cmd_experiment(args) -> int:
    try:
        name = _canonical_benchmark(args.benchmark)
    except KeyError:
        print(f"unknown benchmark {args.benchmark!r}", file=sys.stderr)
        return EXIT_THRESHOLD
    spec = SPECS[name]
    if args.config:
        try:
            spec = apply_overrides(spec, parse_config(args.config))
        except (OSError, ValueError) as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_SCHEMA
    n_max = args.n_max if args.n_max is not None else max(spec.n_sweep)
    if n_max > max(spec.n_sweep) and not args.force:
        print(
            f"n_max {n_max} exceeds the documented range (max "
            f"{max(spec.n_sweep)}); pass --force to run anyway",
            file=sys.stderr,
        )
        return EXIT_THRESHOLD
    threads = _resolve_threads(args.threads)
    out = Path(args.out if args.out else Path("results") / name)
    out.mkdir(parents=True, exist_ok=True)

    fom, signal, x0 = _build_benchmark(spec, freeze_right=args.freeze_right)
    snaps = simulate(fom, x0, signal, spec.dt_pod, spec.K_pod, scheme=spec.scheme)
    try:
        pod = pod_basis(snaps, n_max)
    except RankDeficiencyError as exc:
        print(json.dumps({"error": "rank-deficiency", "numerical_rank": exc.numerical_rank}))
        return EXIT_RANK
    dt_est = estimate_dt(snaps, pod, spec.degree_set, spec.n_u)
    dt_used = args.dt if args.dt is not None else dt_est
    _write_table(
        out / "dt_estimate.csv",
        "dt-estimate",
        ["benchmark", "dt_estimate", "dt_used"],
        [[name, float(dt_est), float(dt_used)]],
    )

    reports = []
    spectra_rows = []
    baseline_rows = []
    quad_fraction = []
    ensemble = None
    for n in range(1, n_max + 1):
        ref = intrusive_reduce(fom, pod, n)
        if ensemble is None:
            pairs = rank_ensuring_pairs(n, spec.degree_set, spec.n_u)
            ensemble = generate_ensemble(fom, pod.matrix(n), pairs, dt_used, threads=threads)
        else:
            ensemble = extend_ensemble(ensemble, fom, pod.matrix(n), threads=threads)
        try:
            result = infer(ensemble)
        except SingularDataMatrixError as exc:
            print(json.dumps({"error": "singular-data-matrix", "n": n, "detail": str(exc)}))
            return EXIT_RANK
        reports.append(build_report(name, n, result.operator, ref, result.cond_P, ensemble.size))
        if name == "chafee_infante":
            quad_fraction.append(
                float(
                    np.linalg.norm(result.operator.degree_block(2))
                    / np.linalg.norm(result.operator.matrix)
                )
            )
        if name == "burgers":
            intrusive_eigs = diffusion_spectrum(ref.degree_block(1))
            inferred_eigs = diffusion_spectrum(result.operator.degree_block(1))
            for k in range(n):
                spectra_rows.append(
                    [n, k + 1, float(intrusive_eigs[k]), float(inferred_eigs[k])]
                )
        if args.baseline:
            reduced = SnapshotMatrix(
                states=pod.matrix(n).T @ snaps.states,
                times=snaps.times,
                inputs=snaps.inputs,
            )
            layout = MonomialBasis(n=n, degree_set=spec.degree_set, n_u=spec.n_u)
            ls = standard_opinf(reduced, layout, regularization=args.regularization)
            baseline_rows.append([n, relative_operator_error(ls.operator, ref)])

    degree_cols = [f"err_deg_{i}" for i in spec.degree_set]
    input_cols = ["err_input"] if spec.n_u else []
    _write_table(
        out / "operator_errors.csv",
        "operator-errors",
        ["n", "relative_error"] + degree_cols + input_cols,
        [
            [rep.n, rep.relative_operator_error]
            + [float(rep.block_errors[i]) for i in spec.degree_set]
            + ([float(rep.block_errors["input"])] if spec.n_u else [])
            for rep in reports
        ],
    )
    _write_table(
        out / "cond_P.csv",
        "cond-p",
        ["n", "cond_P", "ensemble_size"],
        [[rep.n, rep.cond_P, rep.ensemble_size] for rep in reports],
    )
    if name == "burgers":
        _write_table(
            out / "energy_violation.csv",
            "energy-violation",
            ["n", "energy_violation_scaled"],
            [[rep.n, rep.energy_violation] for rep in reports],
        )
        _write_table(
            out / "symmetry_violation.csv",
            "symmetry-violation",
            ["n", "symmetry_violation"],
            [[rep.n, rep.symmetry_violation] for rep in reports],
        )
        _write_table(
            out / "spectra.csv",
            "spectra",
            ["n", "k", "intrusive", "inferred"],
            spectra_rows,
        )
    if args.baseline:
        _write_table(
            out / "baseline_errors.csv",
            "baseline-errors",
            ["n", "relative_error"],
            baseline_rows,
        )

    failures = _check_thresholds(name, reports, quad_fraction)
    if failures:
        print(json.dumps({"benchmark": name, "failures": failures}, indent=2))
        return EXIT_THRESHOLD
    print(json.dumps({"benchmark": name, "failures": [], "n_max": n_max, "out": str(out)}))
    return EXIT_OK


def _check_thresholds(name, reports, quad_fraction=()):
    """Per-benchmark pass/fail checks on the exported metrics."""
    failures = []

    def fail(metric, n, value, threshold):
        failures.append(
            {"metric": metric, "n": n, "value": value, "threshold": threshold}
        )

    if name == "chafee_infante":
        for rep, frac in zip(reports, quad_fraction):
            if not rep.relative_operator_error < 1e-9:
                fail("relative_operator_error", rep.n, rep.relative_operator_error, 1e-9)
            # the quadratic block must vanish: this discretization has no
            # genuine quadratic term
            if not frac < 1e-9:
                fail("quadratic_block_fraction", rep.n, frac, 1e-9)
    elif name == "burgers":
        for rep in reports:
            if not rep.relative_operator_error < 1e-9:
                fail("relative_operator_error", rep.n, rep.relative_operator_error, 1e-9)
            if not rep.energy_violation < 1e-11:
                fail("energy_violation", rep.n, rep.energy_violation, 1e-11)
            if not rep.symmetry_violation < 1e-12:
                fail("symmetry_violation", rep.n, rep.symmetry_violation, 1e-12)
            if rep.diffusion_eigenvalues is not None and not (
                rep.diffusion_eigenvalues.min() >= -1e-10
            ):
                fail(
                    "diffusion_spectrum_min",
                    rep.n,
                    float(rep.diffusion_eigenvalues.min()),
                    -1e-10,
                )
    elif name == "shallow_ice":
        for rep in reports:
            if not rep.relative_operator_error < 1e-6:
                fail("relative_operator_error", rep.n, rep.relative_operator_error, 1e-6)
            expected = math.comb(rep.n + 2, 3) + math.comb(rep.n + 7, 8)
            if rep.ensemble_size != expected:
                fail("ensemble_size", rep.n, rep.ensemble_size, expected)
    return failures


def cmd_infer(args) -> int:
    threads = _resolve_threads(args.threads)
    try:
        if args.ensemble:
            ensemble = read_ensemble(args.ensemble)
        else:
            name = _canonical_benchmark(args.benchmark)
            spec = SPECS[name]
            fom, _, _ = _build_benchmark(spec)
            V = _read_plain_matrix(args.basis, "basis")
            if args.n is not None:
                V = V[:, : args.n]
            if V.shape[0] != fom.dimension:
                print(
                    f"basis has {V.shape[0]} rows, model dimension is {fom.dimension}",
                    file=sys.stderr,
                )
                return EXIT_SCHEMA
            degree_set = (
                tuple(int(d) for d in args.degrees.split(","))
                if args.degrees
                else spec.degree_set
            )
            n_u = args.n_u if args.n_u is not None else spec.n_u
            pairs = rank_ensuring_pairs(V.shape[1], degree_set, n_u)
            ensemble = generate_ensemble(fom, V, pairs, args.dt, threads=threads)
        result = infer(ensemble)
    except SchemaError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_SCHEMA
    except SingularDataMatrixError as exc:
        print(json.dumps({"error": "singular-data-matrix", "detail": str(exc)}))
        return EXIT_RANK
    except KeyError:
        print(f"unknown benchmark {args.benchmark!r}", file=sys.stderr)
        return EXIT_THRESHOLD
    write_operator(result.operator, args.out)
    print(json.dumps({"out": str(args.out), "cond_P": result.cond_P, "residual": result.residual}))
    return EXIT_OK


def cmd_pod(args) -> int:
    try:
        snaps = read_snapshots(args.snapshots)
    except SchemaError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_SCHEMA
    try:
        basis = pod_basis(snaps, args.n)
    except RankDeficiencyError as exc:
        print(json.dumps({"error": "rank-deficiency", "numerical_rank": exc.numerical_rank}))
        return EXIT_RANK
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_THRESHOLD
    write_basis(basis, args.out_basis, args.out_singular_values)
    print(json.dumps({"out_basis": str(args.out_basis), "n": args.n}))
    return EXIT_OK


def cmd_diagnose(args) -> int:
    from .serialize import read_operator

    try:
        op = read_operator(args.operator)
        reference = read_operator(args.reference) if args.reference else None
    except SchemaError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_SCHEMA
    report = {
        "n": op.basis.n,
        "degree_set": list(op.basis.degree_set),
        "n_u": op.basis.n_u,
    }
    if 1 in op.basis.degree_set:
        A1 = op.degree_block(1)
        report["symmetry_violation"] = symmetry_violation(A1)
        report["diffusion_spectrum"] = [float(v) for v in diffusion_spectrum(A1)]
    if 2 in op.basis.degree_set:
        A2 = op.degree_block(2)
        norm = float(np.linalg.norm(A2))
        raw = energy_violation(A2, op.basis.n)
        report["energy_violation_scaled"] = raw / norm if norm > 0 else 0.0
    if reference is not None:
        report["relative_operator_error"] = relative_operator_error(op, reference)
        report["block_errors"] = {
            str(k): v for k, v in block_errors(op, reference).items()
        }
    text = json.dumps(report, indent=2)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exactopinf",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    exp = sub.add_parser("experiment", help="run a bundled benchmark and export CSV metrics")
    exp.add_argument("benchmark", help="chafee-infante | burgers | shallow-ice")
    exp.add_argument("--n-max", type=int, default=None, help="largest reduced dimension")
    exp.add_argument("--out", default=None, help="output directory (default results/<name>)")
    exp.add_argument("--dt", type=float, default=None, help="single-step size (default: estimated)")
    exp.add_argument("--config", default=None, help="key=value override file (N, dt, T, c1, c2)")
    exp.add_argument("--threads", type=int, default=None, help="ensemble parallelism")
    exp.add_argument("--force", action="store_true", help="allow n beyond the documented range")
    exp.add_argument("--baseline", action="store_true", help="also fit the trajectory-data baseline")
    exp.add_argument("--regularization", type=float, default=0.0, help="baseline Tikhonov weight")
    exp.add_argument(
        "--freeze-right",
        action="store_true",
        help="pin the right boundary node (first benchmark only)",
    )
    exp.set_defaults(func=cmd_experiment)

    inf = sub.add_parser("infer", help="recover a reduced operator, writing an operator CSV")
    src = inf.add_mutually_exclusive_group(required=True)
    src.add_argument("--ensemble", default=None, help="single-step data CSV (with JSON sidecar)")
    src.add_argument("--benchmark", default=None, help="builtin system to step directly")
    inf.add_argument("--basis", default=None, help="basis CSV (required with --benchmark)")
    inf.add_argument("--n", type=int, default=None, help="truncate the basis to n columns")
    inf.add_argument("--degrees", default=None, help="comma-separated degree set override")
    inf.add_argument("--n-u", type=int, default=None, help="input dimension override")
    inf.add_argument("--dt", type=float, default=None, help="single-step size (required with --benchmark)")
    inf.add_argument("--threads", type=int, default=None)
    inf.add_argument("--out", required=True, help="operator CSV to write")
    inf.set_defaults(func=cmd_infer)

    pod = sub.add_parser("pod", help="orthonormal basis of a snapshot CSV")
    pod.add_argument("snapshots", help="snapshot CSV")
    pod.add_argument("--n", type=int, required=True, help="number of basis vectors")
    pod.add_argument("--out-basis", default="basis.csv")
    pod.add_argument("--out-singular-values", default="singular_values.csv")
    pod.set_defaults(func=cmd_pod)

    diag = sub.add_parser("diagnose", help="structure metrics of an operator CSV")
    diag.add_argument("operator", help="operator CSV (with JSON sidecar)")
    diag.add_argument("--reference", default=None, help="reference operator CSV for error metrics")
    diag.add_argument("--out", default=None, help="also write the JSON report here")
    diag.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "infer" and args.benchmark is not None:
        if args.basis is None or args.dt is None:
            parser.error("--benchmark requires --basis and --dt")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
