"""Occupation-number basis utilities.

Spin orbitals are interleaved: even indices carry alpha spin, odd indices
beta, so spatial orbital p owns the pair (2p, 2p + 1).  A computational
basis index x encodes occupations bitwise, with bit q of x giving the
occupation of spin orbital q.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

__all__ = [
    "CapabilityError",
    "FockState",
    "hartree_fock_index",
    "hartree_fock_state",
    "basis_state",
    "sector_indices",
    "sector_dimension",
    "random_state",
    "num_qubits_of",
]


class CapabilityError(RuntimeError):
    """Requested problem size exceeds what this simulator will attempt."""


def num_qubits_of(psi: np.ndarray) -> int:
    n = int(psi.shape[0]).bit_length() - 1
    if (1 << n) != psi.shape[0]:
        raise ValueError("statevector length is not a power of two")
    return n


def hartree_fock_index(n_qubits: int, n_alpha: int, n_beta: int) -> int:
    """Basis index of the lowest-orbital determinant with the given filling."""
    if 2 * n_alpha > n_qubits or 2 * n_beta > n_qubits:
        raise ValueError("filling exceeds orbital count")
    x = 0
    for a in range(n_alpha):
        x |= 1 << (2 * a)
    for b in range(n_beta):
        x |= 1 << (2 * b + 1)
    return x


def basis_state(n_qubits: int, index: int) -> np.ndarray:
    psi = np.zeros(1 << n_qubits, dtype=np.complex128)
    psi[index] = 1.0
    return psi


def hartree_fock_state(n_qubits: int, n_alpha: int, n_beta: int) -> np.ndarray:
    return basis_state(n_qubits, hartree_fock_index(n_qubits, n_alpha, n_beta))


def sector_indices(n_qubits: int, n_elec: int, sz2: int) -> np.ndarray:
    """Sorted basis indices with n_elec particles and spin projection sz2/2."""
    if (n_elec + sz2) % 2:
        raise ValueError("n_elec and sz2 must have equal parity")
    n_alpha = (n_elec + sz2) // 2
    n_beta = n_elec - n_alpha
    alphas = range(0, n_qubits, 2)
    betas = range(1, n_qubits, 2)
    if not (0 <= n_alpha <= len(alphas) and 0 <= n_beta <= len(betas)):
        raise ValueError("sector is empty for this qubit count")
    out = []
    for occ_a in combinations(alphas, n_alpha):
        xa = sum(1 << q for q in occ_a)
        for occ_b in combinations(betas, n_beta):
            out.append(xa + sum(1 << q for q in occ_b))
    return np.sort(np.asarray(out, dtype=np.int64))


def sector_dimension(n_qubits: int, n_elec: int, sz2: int) -> int:
    from math import comb

    n_alpha = (n_elec + sz2) // 2
    n_beta = n_elec - n_alpha
    half = n_qubits // 2
    return comb(half, n_alpha) * comb(half, n_beta)


@dataclass(frozen=True, eq=False)
class FockState:
    """Normalized statevector pinned to a particle-number and spin sector.

    amplitudes has length 2^n_qubits; bit q of a basis index is the
    occupation of spin orbital q.  The vector is validated, not copied.
    """

    amplitudes: np.ndarray
    n_particles: int
    sz_twice: int

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        object.__setattr__(self, "amplitudes", amps)
        n = num_qubits_of(amps)
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > 1e-12:
            raise ValueError(f"state norm {nrm!r} is not 1")
        support = np.nonzero(np.abs(amps) > 1e-14)[0].astype(np.uint64)
        if support.size:
            pops = np.bitwise_count(support)
            if np.any(pops != self.n_particles):
                raise ValueError("support leaves the particle-number sector")
            alpha = np.bitwise_count(support & np.uint64(_alpha_mask(n)))
            if np.any(2 * alpha.astype(np.int64) - self.n_particles != self.sz_twice):
                raise ValueError("support leaves the S_z sector")

    @property
    def n_qubits(self) -> int:
        return num_qubits_of(self.amplitudes)

    def replace_amplitudes(self, amps: np.ndarray) -> "FockState":
        return FockState(amps, self.n_particles, self.sz_twice)


def _alpha_mask(n_qubits: int) -> int:
    m = 0
    for q in range(0, n_qubits, 2):
        m |= 1 << q
    return m


def random_state(
    n_qubits: int,
    rng: np.random.Generator,
    n_elec: int | None = None,
    sz2: int | None = None,
) -> np.ndarray:
    """Normalized Haar-like random vector, optionally restricted to a sector."""
    psi = np.zeros(1 << n_qubits, dtype=np.complex128)
    if n_elec is None:
        support = np.arange(1 << n_qubits)
    else:
        support = sector_indices(n_qubits, n_elec, 0 if sz2 is None else sz2)
    amps = rng.standard_normal(len(support)) + 1j * rng.standard_normal(len(support))
    psi[support] = amps
    return psi / np.linalg.norm(psi)
