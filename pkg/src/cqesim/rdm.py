"""Two-fermion reduced density matrices and element counting.

The 2-RDM is always built with fermionic operators, whatever encoding the
ansatz used: D[(ij),(kl)] = <psi| a+_i a+_j a_l a_k |psi> over canonical
spin-orbital pairs.  Its full-tensor trace is N(N-1) and its pair-matrix
eigenvalues are nonnegative up to roundoff.

count_rdm2_elements reproduces the tomography cost of measuring the 2-RDM
on a register of JW-encoded qubits for a real ground state: it counts the
distinct X/Y-sector Pauli strings (even Y parity, Z-only diagonal sector
excluded) that survive particle-number, spin-projection, and reality
symmetry.  The companion count_rdm2_canonical counts stored canonical
index quadruples instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .ops import excitation_expectation
from .states import FockState, sector_dimension
from .tensors import TwoBodyTensor, pair_table, sz_conserving_mask

__all__ = [
    "Rdm2",
    "compute_rdm2",
    "energy_from_rdm2",
    "one_rdm",
    "contract_to_one_rdm",
    "count_rdm2_elements",
    "count_rdm2_canonical",
    "rdm2_to_text",
    "rdm2_from_text",
]


@dataclass(frozen=True, eq=False)
class Rdm2:
    """Canonical-pair matrix of the two-fermion RDM."""

    tensor: TwoBodyTensor
    n_particles: int

    def __post_init__(self):
        if not self.tensor.fermionic:
            raise ValueError("2-RDM tensor must be fermionic")
        if not self.tensor.is_hermitian(1e-10):
            raise ValueError("2-RDM must be Hermitian")
        self.tensor.mat.setflags(write=False)

    @property
    def trace(self) -> float:
        """Full-tensor trace, N(N-1) for an N-particle state."""
        return self.tensor.trace()

    @property
    def n_qubits(self) -> int:
        return self.tensor.n_qubits

    def element(self, i: int, j: int, k: int, l: int) -> complex:
        return self.tensor.element(i, j, k, l)

    def min_eigenvalue(self) -> float:
        """Smallest pair-matrix eigenvalue; reported, never enforced."""
        return float(np.linalg.eigvalsh(self.tensor.mat)[0])


def compute_rdm2(state: FockState) -> Rdm2:
    """<a+_i a+_j a_l a_k> over canonical pairs, exact on the statevector.

    Elements that change Sz vanish identically on a fixed-sector state and
    are skipped.
    """
    psi = state.amplitudes
    n = state.n_qubits
    pairs, _ = pair_table(n)
    mask = sz_conserving_mask(n)
    mat = np.zeros((len(pairs), len(pairs)), dtype=np.complex128)
    for a in range(len(pairs)):
        i, j = (int(v) for v in pairs[a])
        for b in range(a, len(pairs)):
            if not mask[a, b]:
                continue
            k, l = (int(v) for v in pairs[b])
            val = excitation_expectation(psi, psi, (i, j, k, l), True)
            mat[a, b] = val
            if b != a:
                mat[b, a] = np.conj(val)
    rdm = Rdm2(TwoBodyTensor(n, mat, fermionic=True), state.n_particles)
    expected = state.n_particles * (state.n_particles - 1)
    if abs(rdm.trace - expected) > 1e-9:
        raise ValueError(
            f"2-RDM trace {rdm.trace:.12f} differs from N(N-1)={expected}"
        )
    return rdm


def energy_from_rdm2(ham, rdm: Rdm2) -> float:
    """Contraction sum_IJ K2[I,J] D[I,J] plus the core energy."""
    if ham.n_qubits != rdm.n_qubits:
        raise ValueError("Hamiltonian and RDM sizes differ")
    return float(np.sum(ham.k2.mat * rdm.tensor.mat).real) + ham.core_energy


def one_rdm(state: FockState) -> np.ndarray:
    """<a+_p a_q> spin-orbital matrix computed directly from the state."""
    from .hamiltonian import _one_body_context

    n = state.n_qubits
    psi = state.amplitudes
    out = np.zeros((n, n), dtype=np.complex128)
    for p in range(n):
        for q in range(p, n):
            if (p - q) % 2:
                continue  # spin flip, vanishes on fixed-Sz states
            src, tgt, sign = _one_body_context(n, p, q)
            val = np.sum(np.conj(psi[tgt]) * sign * psi[src])
            out[p, q] = val
            out[q, p] = np.conj(val)
    return out


def contract_to_one_rdm(rdm: Rdm2) -> np.ndarray:
    """Partial trace over one pair index; equals (N-1) times the 1-RDM."""
    n = rdm.n_qubits
    _, index = pair_table(n)
    orbs = np.arange(n)
    out = np.zeros((n, n), dtype=np.complex128)
    for p in range(n):
        for s in range(n):
            spect = orbs[(orbs != p) & (orbs != s)]
            sgn = np.where(spect < p, -1.0, 1.0) * np.where(spect < s, -1.0, 1.0)
            out[p, s] = np.sum(sgn * rdm.tensor.mat[index[p, spect], index[s, spect]])
    return out


def count_rdm2_elements(n_qubits: int, n: int, sz_twice: int) -> int:
    """Distinct Pauli strings needed to measure the 2-RDM, JW encoded.

    Counts X/Y-sector strings of even Y parity surviving number, spin, and
    reality projection; the Z-only diagonal sector is excluded.  Four
    distinct spin orbitals contribute the 8 even-Y patterns on their
    support; a same-spin transfer pair contributes XX and YY both bare and
    with a Z spectator on each of the n_qubits-2 remaining qubits.  The
    result depends only on the register size once a valid (N, Sz) sector
    fixes the projection; the sector arguments are validated.
    """
    if n_qubits % 2:
        raise ValueError("spin orbitals come in alpha/beta pairs")
    if sector_dimension(n_qubits, n, sz_twice) == 0:
        raise ValueError("empty (N, Sz) sector")
    h = n_qubits // 2
    four_support = 2 * comb(h, 4) + comb(h, 2) ** 2
    pair_support = 2 * comb(h, 2)
    return 8 * four_support + 2 * (n_qubits - 1) * pair_support


def count_rdm2_canonical(n_qubits: int) -> int:
    """Stored canonical elements (i<j, k<l, (i,j) <= (k,l)) conserving Sz."""
    if n_qubits % 2:
        raise ValueError("spin orbitals come in alpha/beta pairs")
    h = n_qubits // 2
    same = comb(h, 2)

    def upper(m):
        return m * (m + 1) // 2

    return 2 * upper(same) + upper(h * h)


def rdm2_to_text(rdm: Rdm2) -> str:
    """Sparse text form: header then canonical 'i j k l re im' entries."""
    n = rdm.n_qubits
    pairs, _ = pair_table(n)
    lines = [f"RDM2 {n} {rdm.n_particles} {rdm.trace:.12e}"]
    for a in range(len(pairs)):
        for b in range(a, len(pairs)):
            val = rdm.tensor.mat[a, b]
            if val == 0.0:
                continue
            i, j = pairs[a]
            k, l = pairs[b]
            lines.append(f"{i} {j} {k} {l} {val.real:.16e} {val.imag:.16e}")
    return "\n".join(lines) + "\n"


def rdm2_from_text(text: str) -> Rdm2:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if len(head) != 4 or head[0] != "RDM2":
        raise ValueError("missing RDM2 header")
    n, n_particles = int(head[1]), int(head[2])
    pairs, index = pair_table(n)
    mat = np.zeros((len(pairs), len(pairs)), dtype=np.complex128)
    for ln in lines[1:]:
        toks = ln.split()
        i, j, k, l = (int(t) for t in toks[:4])
        val = complex(float(toks[4]), float(toks[5]))
        a, b = index[i, j], index[k, l]
        mat[a, b] = val
        mat[b, a] = np.conj(val)
    return Rdm2(TwoBodyTensor(n, mat, fermionic=True), n_particles)
