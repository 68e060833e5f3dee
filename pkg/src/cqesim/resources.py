"""Gate counting and tomography grouping under a declared cost model.

The compiler behind the paper-style CNOT tables is not public, so the
model here is deliberately simple and fully declared: every exponential
of a pair generator compiles to its Pauli strings, and a string of weight
w >= 2 costs 2(w-1) CNOTs (the usual ladder construction), with
single-qubit strings free.  A real double excitation therefore compiles
to 8 Jordan-Wigner strings when encoded, or 8 tail-free strings of weight
at most 4 in qubit-particle form.

Measurement grouping builds the qubit-wise-commutation graph over the
Pauli strings a target tensor needs and colors it greedily by descending
degree: each new group is seeded with the highest-degree unplaced string
and grown into a complete single-basis assignment by majority vote among
the still-compatible strings, all of which then join the group.  The
whole procedure is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _backend as bk
from .paulis import expand_generator, string_weight, target_strings
from .states import CapabilityError
from .tensors import pair_table

__all__ = [
    "CostModel",
    "DEFAULT_COST_MODEL",
    "count_cnots",
    "measurement_groups",
    "auxiliary_cost_report",
    "CostReport",
]


def _amp_class(amp: complex) -> complex:
    """Collapse an amplitude to a cacheable phase class.

    Which strings survive the generator expansion depends only on whether
    the amplitude is real, imaginary, or genuinely complex.
    """
    mag = abs(amp)
    if mag == 0.0:
        return 0.0
    if abs(amp.imag) <= 1e-12 * mag:
        return 1.0
    if abs(amp.real) <= 1e-12 * mag:
        return 1.0j
    return 0.6 + 0.8j


@dataclass(frozen=True)
class CostModel:
    """2(w-1) CNOTs per weight-w Pauli string, weight-1 strings free."""

    def cnot_per_pauli_string(self, weight: int) -> int:
        return 2 * (weight - 1) if weight >= 2 else 0

    def generator_strings(self, element: tuple, amp: complex, fermionic: bool):
        cls = _amp_class(complex(amp))
        if cls == 0.0:
            return ()
        return tuple(expand_generator(element, cls, fermionic).keys())

    def generator_cnots(self, element: tuple, amp: complex, fermionic: bool) -> int:
        return sum(
            self.cnot_per_pauli_string(string_weight(x, z))
            for (x, z) in self.generator_strings(element, amp, fermionic)
            if (x | z) != 0
        )


DEFAULT_COST_MODEL = CostModel()


def _tensor_exponential_cnots(tensor, fermionic: bool, model: CostModel, phase=None) -> int:
    """Compile cost of one product of element exponentials of a tensor.

    phase multiplies each coefficient before classification; passing -1j
    turns a Hermitian tensor's entries into the rotation amplitudes of
    exp(-i delta T).
    """
    pairs, _ = pair_table(tensor.n_qubits)
    rows, cols = np.nonzero(np.triu(np.abs(tensor.mat)) != 0.0)
    total = 0
    for r, c in zip(rows, cols):
        amp = tensor.mat[r, c] if phase is None else phase * tensor.mat[r, c]
        i, j = pairs[r]
        k, l = pairs[c]
        total += model.generator_cnots(
            (int(i), int(j), int(k), int(l)), amp, fermionic
        )
    return total


def count_cnots(ansatz, model: CostModel = DEFAULT_COST_MODEL) -> int:
    """Total compiled CNOTs over all layers of an ansatz."""
    total = 0
    for layer in ansatz.layers:
        fermionic = layer.tensor.encoding == "fermion"
        total += _tensor_exponential_cnots(layer.tensor.tensor, fermionic, model)
    return total


def _group_labels(xs: np.ndarray, zs: np.ndarray) -> np.ndarray:
    """Greedy descending-degree coloring of the compatibility graph.

    The highest-degree unplaced string seeds each group and fixes the
    measured letter on its own support.  The remaining undecided qubits
    are then settled one at a time by majority vote among the strings
    still consistent with the partial assignment; everything consistent
    with the finished assignment joins the group.  Every member matches
    one shared letter assignment, so membership implies pairwise
    qubit-wise commutation.  Returns the group index of each string.
    """
    n = xs.size
    degrees = bk.qwc_degrees(xs, zs)
    order = np.lexsort((np.arange(n), -degrees))
    xs_o = xs[order]
    zs_o = zs[order]
    ss_o = xs_o | zs_o
    qubit_bits = []
    union = int(np.bitwise_or.reduce(ss_o)) if n else 0
    while union:
        low = union & -union
        qubit_bits.append(np.uint64(low))
        union ^= low
    labels = np.full(n, -1, dtype=np.int64)
    remaining = np.arange(n)
    g = 0
    while remaining.size:
        seed = remaining[0]
        ax = xs_o[seed]
        az = zs_o[seed]
        decided = ax | az
        rest = remaining[1:]
        ov = ss_o[rest] & decided
        ok = ((xs_o[rest] & ov) == (ax & ov)) & ((zs_o[rest] & ov) == (az & ov))
        cand = rest[ok]
        for bit in qubit_bits:
            if decided & bit or cand.size == 0:
                continue
            touch = (ss_o[cand] & bit) != 0
            if not touch.any():
                continue
            cx = (xs_o[cand] & bit) != 0
            cz = (zs_o[cand] & bit) != 0
            votes = (
                int(np.count_nonzero(touch & cx & ~cz)),
                int(np.count_nonzero(touch & cx & cz)),
                int(np.count_nonzero(touch & ~cx & cz)),
            )
            pick = int(np.argmax(votes))  # ties fall to X, then Y, then Z
            if pick != 2:
                ax |= bit
            if pick != 0:
                az |= bit
            decided |= bit
            cand = cand[~touch | (cx == (pick != 2)) & (cz == (pick != 0))]
        labels[seed] = g
        labels[cand] = g
        remaining = remaining[labels[remaining] < 0]
        g += 1
    out = np.empty(n, dtype=np.int64)
    out[order] = labels
    return out


@lru_cache(maxsize=None)
def measurement_groups(n_qubits: int, target: str, coloring: str = "degree"):
    """(groups, mean vertices per group) for a tomography target.

    Vertices are the Pauli strings the target needs (see paulis module);
    edges are qubit-wise compatibility.  "degree" is the only coloring
    strategy implemented; the argument names it so reports stay explicit.
    """
    if coloring != "degree":
        raise ValueError(f"unknown coloring strategy {coloring!r}")
    if n_qubits > 32:
        raise CapabilityError("measurement graphs above 32 qubits are not supported")
    if n_qubits % 2 or n_qubits < 4:
        raise ValueError("n_qubits must be even and at least 4")
    xs, zs = target_strings(n_qubits, target)
    if xs.size == 0:
        return 0, 0.0
    n_groups = int(_group_labels(xs, zs).max()) + 1
    return n_groups, float(xs.size / n_groups)


@dataclass(frozen=True)
class CostReport:
    method: str
    trotter_cnot_bound: int
    cholesky_order: int
    mean_cnot_per_factor: float


def auxiliary_cost_report(ham, method: str = "TrotterFirstOrder", threshold: float = 1e-6,
                          model: CostModel = DEFAULT_COST_MODEL) -> CostReport:
    """Evolution-cost summary for the residual's auxiliary propagator.

    The Trotter bound prices one first-order step of the packed tensor;
    each Cholesky factor (the folded one-body term plus one factor per
    retained vector) is priced through the pair tensor its quadratic form
    folds down to, under the same (N-1) weighting as the main build.
    """
    from .fcidump import IntegralSet
    from .hamiltonian import build_reduced_hamiltonian, hamiltonian_factors

    trotter = _tensor_exponential_cnots(ham.k2, True, model, phase=-1.0j)
    if ham.integrals is None:
        raise ValueError("cost report needs the source integrals")
    ints = ham.integrals
    factors = hamiltonian_factors(ints, threshold)
    zero_eri = np.zeros_like(ints.eri)
    factor_costs = []
    one_body_ints = IntegralSet(
        ints.n_spatial, ints.n_electrons, ints.ms2, 0.0,
        0.5 * (factors.one_body + factors.one_body.T), zero_eri,
    )
    factor_costs.append(
        _tensor_exponential_cnots(
            build_reduced_hamiltonian(one_body_ints).k2, True, model, phase=-1.0j
        )
    )
    for vec in factors.cholesky.vectors:
        sq = IntegralSet(
            ints.n_spatial, ints.n_electrons, ints.ms2, 0.0,
            0.5 * (vec @ vec), np.einsum("ij,kl->ijkl", vec, vec),
        )
        factor_costs.append(
            _tensor_exponential_cnots(
                build_reduced_hamiltonian(sq).k2, True, model, phase=-1.0j
            )
        )
    return CostReport(
        method=str(method),
        trotter_cnot_bound=trotter,
        cholesky_order=factors.order,
        mean_cnot_per_factor=float(np.mean(factor_costs)),
    )
