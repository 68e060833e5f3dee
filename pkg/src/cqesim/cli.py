"""Command-line front end for CQE runs, sweeps, and resource reports.

Artifacts are diff-friendly regression files: JSONL iteration traces,
CSV dissociation curves, and plain-text resource tables.  Identical
inputs produce byte-identical outputs; there is no randomness anywhere
in the pipeline.
"""

import os


def _cap_threads():
    """Honor CQESIM_THREADS before any BLAS-backed import settles its pool."""
    cap = os.environ.get("CQESIM_THREADS", "").strip()
    if cap:
        for var in (
            "OMP_NUM_THREADS",
            "OPENBLAS_NUM_THREADS",
            "MKL_NUM_THREADS",
            "NUMEXPR_NUM_THREADS",
        ):
            os.environ.setdefault(var, cap)


_cap_threads()

import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from .acse import CqeConfig, run_cqe
from .fcidump import FcidumpError, load_fcidump
from .hamiltonian import (
    build_reduced_hamiltonian,
    fci_ground_state,
    hartree_fock_reference,
    lowest_energy_determinants,
)
from .rdm import compute_rdm2, rdm2_to_text
from .resources import auxiliary_cost_report, measurement_groups
from .states import CapabilityError

EXIT_SOLVER = 1
EXIT_CONFIG = 2


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_hamiltonian(path):
    try:
        return build_reduced_hamiltonian(load_fcidump(path))
    except (OSError, FcidumpError) as exc:
        _fail(EXIT_CONFIG, f"{path}: {exc}")
    except ValueError as exc:
        _fail(EXIT_CONFIG, f"{path}: {exc}")


def _solver_config(**kwargs) -> CqeConfig:
    try:
        return CqeConfig(**kwargs)
    except ValueError as exc:
        _fail(EXIT_CONFIG, str(exc))


def _trace_lines(trace):
    for row in trace.rows:
        yield json.dumps(
            {
                "iter": row.iteration,
                "energy": row.energy,
                "residual_norm_A": row.residual_norm_a,
                "residual_norm_B": row.residual_norm_b,
                "layers": row.layers,
                "nnz": row.nnz,
                "cnot_estimate": row.cnot_estimate,
            },
            sort_keys=True,
        )


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _point_label(path: Path) -> str:
    return path.parent.name if path.name.upper() == "FCIDUMP" else path.stem


def _sector_fci(ham) -> float:
    energy, _ = fci_ground_state(ham, ham.n_electrons, ham.ms2)
    return energy


def _best_of_starts(ham, config: CqeConfig, multistart: int):
    """Lowest-final-energy trace over the cheapest reference determinants."""
    best = None
    for start in lowest_energy_determinants(ham, multistart):
        trace = run_cqe(ham, start, config)
        if best is None or trace.final_energy < best.final_energy:
            best = trace
    return best


_SOLVER_FLAGS = [
    click.option("--encoding", type=click.Choice(["fermion", "qubit"]), default="fermion",
                 show_default=True, help="Generator encoding."),
    click.option("--sparse-c", type=float, default=0.0, show_default=True,
                 help="Residual pruning fraction in [0, 1]."),
    click.option("--p-depth", type=int, default=0, show_default=True,
                 help="Merge window: trailing layers eligible for updates."),
    click.option("--delta", type=float, default=0.01, show_default=True,
                 help="Auxiliary evolution time for aux residuals."),
    click.option("--residual", type=click.Choice(["exact", "aux-trotter", "aux-cholesky"]),
                 default="exact", show_default=True, help="Residual evaluation method."),
    click.option("--epsilon", default="trust", show_default=True,
                 help="Step strategy: 'trust' or 'fixed:VAL'."),
    click.option("--second-order", type=click.Choice(["none", "lbfgs:2", "lbfgs:3"]),
                 default="none", show_default=True, help="Quasi-Newton correction."),
    click.option("--tol", type=float, default=1e-3, show_default=True,
                 help="Convergence threshold on the residual norm."),
    click.option("--max-iter", type=int, default=200, show_default=True),
]


def solver_flags(func):
    for flag in reversed(_SOLVER_FLAGS):
        func = flag(func)
    return func


@click.group()
def main():
    """Contracted quantum eigensolver experiments on FCIDUMP inputs."""


@main.command("run")
@click.option("--fcidump", "fcidump_path", required=True,
              type=click.Path(exists=False, path_type=Path))
@solver_flags
@click.option("--compare-fci", is_flag=True, help="Record the sector FCI gap.")
@click.option("--out", type=click.Path(path_type=Path), default=Path("."),
              show_default=True, help="Output directory.")
def cmd_run(fcidump_path, encoding, sparse_c, p_depth, delta, residual, epsilon,
            second_order, tol, max_iter, compare_fci, out):
    """Run one CQE optimization and write trace, summary, and 2-RDM."""
    if max_iter < 0:
        _fail(EXIT_CONFIG, "max_iterations must be nonnegative")
    ham = _load_hamiltonian(fcidump_path)
    reference = hartree_fock_reference(ham)
    summary = {
        "fcidump": str(fcidump_path),
        "encoding": encoding,
        "sparse_c": sparse_c,
        "p_depth": p_depth,
        "residual_method": residual,
        "epsilon_strategy": epsilon,
        "second_order": second_order,
        "tol_residual_norm": tol,
    }
    if max_iter == 0:
        # budgetless dry run: report the reference determinant untouched
        final_energy = ham.energy(reference.amplitudes)
        lines = []
        rdm = compute_rdm2(reference)
        summary.update(status="max_iterations", iterations=0, final_energy=final_energy, layers=0)
    else:
        config = _solver_config(
            encoding=encoding, sparse_c=sparse_c, p_depth=p_depth, delta=delta,
            residual_method=residual, epsilon_strategy=epsilon,
            second_order=second_order, tol_residual_norm=tol, max_iterations=max_iter,
        )
        try:
            trace = run_cqe(ham, reference, config)
        except (ValueError, RuntimeError, CapabilityError) as exc:
            _fail(EXIT_SOLVER, str(exc))
        final_energy = trace.final_energy
        lines = list(_trace_lines(trace))
        rdm = trace.rdm2
        summary.update(
            status=trace.status,
            iterations=trace.iterations,
            final_energy=final_energy,
            layers=len(trace.ansatz.layers),
            cnot_estimate=trace.rows[-1].cnot_estimate if trace.rows else 0,
        )
    if compare_fci:
        try:
            fci = _sector_fci(ham)
        except CapabilityError as exc:
            _fail(EXIT_SOLVER, str(exc))
        summary["fci_energy"] = fci
        summary["delta_e_vs_fci"] = final_energy - fci
    _write(out / "trace.jsonl", "".join(line + "\n" for line in lines))
    _write(out / "summary.json", json.dumps(summary, sort_keys=True, indent=2) + "\n")
    _write(out / "rdm2.txt", rdm2_to_text(rdm))
    click.echo(f"{summary['status']}: E = {final_energy:.10f} after {summary['iterations']} iterations")


@main.command("sweep")
@click.argument("fcidumps", nargs=-1, type=click.Path(exists=False, path_type=Path))
@solver_flags
@click.option("--multistart", type=int, default=1, show_default=True,
              help="Reference determinants tried per point (best kept).")
@click.option("--out", type=click.Path(path_type=Path), default=Path("."),
              show_default=True, help="Output directory.")
def cmd_sweep(fcidumps, encoding, sparse_c, p_depth, delta, residual, epsilon,
              second_order, tol, max_iter, multistart, out):
    """Dissociation-curve sweep over several FCIDUMP points."""
    if len(fcidumps) < 2:
        _fail(EXIT_CONFIG, "a sweep needs at least two FCIDUMP points")
    if multistart < 1:
        _fail(EXIT_CONFIG, "multistart must be at least 1")
    config = _solver_config(
        encoding=encoding, sparse_c=sparse_c, p_depth=p_depth, delta=delta,
        residual_method=residual, epsilon_strategy=epsilon,
        second_order=second_order, tol_residual_norm=tol, max_iterations=max_iter,
    )

    def solve(path: Path):
        ham = build_reduced_hamiltonian(load_fcidump(path))
        trace = _best_of_starts(ham, config, multistart)
        fci = _sector_fci(ham)
        return {
            "label": _point_label(path),
            "E_cqe": trace.final_energy,
            "E_fci": fci,
            "delta_E": trace.final_energy - fci,
            "iterations": trace.iterations,
            "status": trace.status,
        }

    workers = int(os.environ.get("CQESIM_THREADS", "0") or 0) or min(4, len(fcidumps))
    rows = []
    failure = None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(solve, path) for path in fcidumps]
        for path, future in zip(fcidumps, futures):
            try:
                rows.append(future.result())
            except (OSError, FcidumpError, ValueError, RuntimeError, CapabilityError) as exc:
                failure = f"{path}: {exc}"
                break

    def fmt(row):
        return "%s,%.12e,%.12e,%.3e,%d" % (
            row["label"], row["E_cqe"], row["E_fci"], row["delta_E"], row["iterations"]
        )

    curve = "label,E_cqe,E_fci,delta_E,iterations\n" + "".join(fmt(r) + "\n" for r in rows)
    _write(out / "curve.csv", curve)
    if failure is not None:
        _fail(EXIT_CONFIG, f"sweep aborted, partial results kept: {failure}")
    deltas = [row["delta_E"] for row in rows]
    summary = {
        "points": [
            {k: row[k] for k in ("label", "E_cqe", "E_fci", "delta_E", "iterations", "status")}
            for row in rows
        ],
        "nonparallelity": max(deltas) - min(deltas),
        "max_abs_delta_e": max(abs(d) for d in deltas),
        "encoding": encoding,
        "multistart": multistart,
    }
    _write(out / "summary.json", json.dumps(summary, sort_keys=True, indent=2) + "\n")
    click.echo(
        f"{len(rows)} points, nonparallelity {summary['nonparallelity']:.3e}, "
        f"max |dE| {summary['max_abs_delta_e']:.3e}"
    )


@main.command("resources")
@click.option("--fcidump", "fcidump_paths", multiple=True,
              type=click.Path(exists=False, path_type=Path),
              help="Evolution cost report per molecule (repeatable).")
@click.option("--grouping", default="", help="Comma-separated qubit counts for tomography grouping.")
@click.option("--threshold", type=float, default=1e-6, show_default=True,
              help="Cholesky truncation threshold.")
@click.option("--out", type=click.Path(path_type=Path), default=Path("."),
              show_default=True, help="Output directory.")
def cmd_resources(fcidump_paths, grouping, threshold, out):
    """Auxiliary-evolution costs and measurement-group tables."""
    if not fcidump_paths and not grouping.strip():
        _fail(EXIT_CONFIG, "nothing to report: pass --fcidump and/or --grouping")
    report = {"evolution": [], "grouping": []}
    text = []
    for path in fcidump_paths:
        ham = _load_hamiltonian(path)
        try:
            cost = auxiliary_cost_report(ham, threshold=threshold)
        except ValueError as exc:
            _fail(EXIT_SOLVER, f"{path}: {exc}")
        entry = {
            "label": _point_label(path),
            "n_qubits": ham.n_qubits,
            "trotter_cnot_bound": cost.trotter_cnot_bound,
            "cholesky_order": cost.cholesky_order,
            "mean_cnot_per_factor": cost.mean_cnot_per_factor,
        }
        report["evolution"].append(entry)
        text.append(
            "%-12s qubits %2d  trotter-bound %8d  order %3d  mean/factor %12.1f"
            % (entry["label"], entry["n_qubits"], entry["trotter_cnot_bound"],
               entry["cholesky_order"], entry["mean_cnot_per_factor"])
        )
    if grouping.strip():
        try:
            sizes = [int(tok) for tok in grouping.split(",") if tok.strip()]
        except ValueError:
            _fail(EXIT_CONFIG, f"bad --grouping list {grouping!r}")
        for n in sizes:
            for target in ("EncodedA", "UnencodedA", "EncodedRdm2"):
                try:
                    groups, mean = measurement_groups(n, target)
                except CapabilityError as exc:
                    _fail(EXIT_SOLVER, str(exc))
                except ValueError as exc:
                    _fail(EXIT_CONFIG, str(exc))
                report["grouping"].append(
                    {"n_qubits": n, "target": target, "groups": groups,
                     "mean_strings_per_group": mean}
                )
                text.append(
                    "%2d qubits  %-12s %6d groups  %8.2f strings/group"
                    % (n, target, groups, mean)
                )
    _write(out / "resources.json", json.dumps(report, sort_keys=True, indent=2) + "\n")
    _write(out / "resources.txt", "".join(line + "\n" for line in text))
    click.echo("\n".join(text))


if __name__ == "__main__":
    main()
