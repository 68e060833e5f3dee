"""Timings for the compiled kernels against the numpy fallback.

Runs each kernel on realistic shapes (best of several repetitions), then
times a full solver run per backend in subprocesses, since the backend is
fixed at import.  Usage: python3 benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from cqesim import kernels_py
from cqesim.paulis import canonical_sz_elements, target_strings

try:
    from cqesim import _kernels
except ImportError:
    _kernels = None

ROOT = Path(__file__).resolve().parent.parent


def best_of(fn, reps):
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_rows():
    rng = np.random.default_rng(11)
    n20 = 1 << 20
    psi = rng.standard_normal(n20) + 1j * rng.standard_normal(n20)
    psi /= np.linalg.norm(psi)
    bra = rng.standard_normal(n20) + 1j * rng.standard_normal(n20)
    bra /= np.linalg.norm(bra)
    src, tgt, signs = kernels_py.excitation_context(20, 0, 11, 4, 15, True)
    didx, _, _ = kernels_py.excitation_context(20, 0, 11, 0, 11, True)
    xs16, zs16 = target_strings(16, "UnencodedA")
    elements12 = list(canonical_sz_elements(12))

    def tabulate(mod):
        for i, j, k, l in elements12:
            mod.excitation_context(12, i, j, k, l, True)

    def accumulate(mod):
        out = np.zeros_like(psi)
        mod.accumulate(out, psi, src, tgt, signs, 0.3 + 0.1j)

    def expectation(mod):
        mod.expectation(bra, psi, src, tgt, signs)

    def givens(mod):
        mod.apply_givens(psi.copy(), src, tgt, signs, 0.02j)

    def phase(mod):
        mod.apply_phase(psi.copy(), didx, 0.05j)

    def degrees(mod):
        mod.qwc_degrees(xs16, zs16)

    return [
        ("excitation_context, 906 elements @ 12 qubits", tabulate, 3),
        ("accumulate @ 20 qubits", accumulate, 7),
        ("expectation @ 20 qubits", expectation, 7),
        ("apply_givens @ 20 qubits", givens, 7),
        ("apply_phase @ 20 qubits", phase, 7),
        ("qwc_degrees, 18144 strings @ 16 qubits", degrees, 3),
    ]


SOLVER_SNIPPET = """
import json, time
from cqesim import CqeConfig, run_cqe, hartree_fock_reference, backend_name
from cqesim.fcidump import load_fcidump
from cqesim.hamiltonian import build_reduced_hamiltonian
ham = build_reduced_hamiltonian(load_fcidump({path!r}))
cfg = CqeConfig(tol_residual_norm=1e-4)
run_cqe(ham, hartree_fock_reference(ham), cfg)   # warm caches
t0 = time.perf_counter()
trace = run_cqe(ham, hartree_fock_reference(ham), cfg)
print(json.dumps({{"backend": backend_name(), "wall": time.perf_counter() - t0,
                   "iterations": trace.iterations}}))
"""


def solver_wall(backend):
    env = dict(os.environ, CQESIM_BACKEND=backend)
    snippet = SOLVER_SNIPPET.format(path=str(ROOT / "fixtures" / "h6" / "FCIDUMP"))
    out = subprocess.run(
        [sys.executable, "-c", snippet], env=env, capture_output=True, text=True,
        check=True, cwd=ROOT,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    if _kernels is None:
        print("compiled extension not built; pass CQESIM_BACKEND=python everywhere")
    print(f"{'kernel':46s} {'numpy':>10s} {'compiled':>10s} {'speedup':>8s}")
    for label, fn, reps in kernel_rows():
        t_py = best_of(lambda: fn(kernels_py), reps)
        if _kernels is None:
            print(f"{label:46s} {t_py * 1e3:9.2f}ms {'-':>10s} {'-':>8s}")
            continue
        t_c = best_of(lambda: fn(_kernels), reps)
        print(f"{label:46s} {t_py * 1e3:9.2f}ms {t_c * 1e3:9.2f}ms {t_py / t_c:7.1f}x")

    backends = ["python"] + (["c"] if _kernels is not None else [])
    walls = {}
    for backend in backends:
        row = solver_wall(backend)
        walls[backend] = row["wall"]
        print(f"run_cqe h6 tol 1e-4 [{row['backend']:8s}] "
              f"{row['wall']:6.2f}s  ({row['iterations']} iterations)")
    if len(walls) == 2:
        print(f"end-to-end speedup: {walls['python'] / walls['c']:.2f}x")


if __name__ == "__main__":
    main()
