"""Two-body coefficient tensors in canonical pair-matrix form.

A two-body operator is stored as a complex matrix over canonical orbital
pairs (i < j).  The entry at pair-row (i, j) and pair-column (k, l) is
the coefficient of the excitation a+_i a+_j a_l a_k, and the operator it
represents is the sum of coefficient * excitation over all entries.

Hermitian operators have M equal to its conjugate transpose, rotation
generators are anti-Hermitian.  Off-canonical index orders are defined
by the in-pair swap symmetry: a sign flip per swap for fermionic
tensors, no sign for qubit-particle ones.
"""

from functools import lru_cache

import numpy as np

__all__ = ["TwoBodyTensor", "pair_table", "pair_index", "sz_conserving_mask"]


@lru_cache(maxsize=None)
def pair_table(n_qubits: int):
    """(pairs, index): pairs[m] = (i, j) with i < j in lexicographic order,
    index[i, j] = index[j, i] = m."""
    pairs = [(i, j) for i in range(n_qubits) for j in range(i + 1, n_qubits)]
    index = np.full((n_qubits, n_qubits), -1, dtype=np.int64)
    for m, (i, j) in enumerate(pairs):
        index[i, j] = m
        index[j, i] = m
    arr = np.asarray(pairs, dtype=np.int64)
    arr.setflags(write=False)
    index.setflags(write=False)
    return arr, index


def pair_index(n_qubits: int, i: int, j: int) -> int:
    return int(pair_table(n_qubits)[1][i, j])


@lru_cache(maxsize=None)
def sz_conserving_mask(n_qubits: int) -> np.ndarray:
    """Boolean pair-matrix mask of elements that conserve Sz.

    With interleaved spin orbitals the spin projection of pair (i, j) is
    determined by index parities; an excitation block can only be nonzero
    on spin-pure states when row and column projections agree.
    """
    pairs, _ = pair_table(n_qubits)
    sz = (1 - 2 * (pairs[:, 0] % 2)) + (1 - 2 * (pairs[:, 1] % 2))
    mask = sz[:, None] == sz[None, :]
    mask.setflags(write=False)
    return mask


class TwoBodyTensor:
    """Dense pair-matrix container with fermionic or qubit-particle symmetry."""

    __slots__ = ("n_qubits", "mat", "fermionic")

    def __init__(self, n_qubits: int, mat: np.ndarray | None = None, fermionic: bool = True):
        self.n_qubits = n_qubits
        m = n_qubits * (n_qubits - 1) // 2
        if mat is None:
            mat = np.zeros((m, m), dtype=np.complex128)
        else:
            mat = np.asarray(mat, dtype=np.complex128)
            if mat.shape != (m, m):
                raise ValueError("pair matrix has wrong shape")
        self.mat = mat
        self.fermionic = fermionic

    @property
    def n_pairs(self) -> int:
        return self.mat.shape[0]

    def copy(self) -> "TwoBodyTensor":
        return TwoBodyTensor(self.n_qubits, self.mat.copy(), self.fermionic)

    def _sign(self, swapped: bool) -> float:
        if not swapped:
            return 1.0
        return -1.0 if self.fermionic else 1.0

    def element(self, i: int, j: int, k: int, l: int) -> complex:
        """Coefficient of a+_i a+_j a_l a_k for any index order."""
        if i == j or k == l:
            return 0.0
        _, index = pair_table(self.n_qubits)
        s = self._sign(i > j) * self._sign(k > l)
        return s * self.mat[index[i, j], index[k, l]]

    def add_element(self, i: int, j: int, k: int, l: int, val: complex) -> None:
        if i == j or k == l:
            if val != 0.0:
                raise ValueError("in-pair repeated index has no canonical slot")
            return
        _, index = pair_table(self.n_qubits)
        s = self._sign(i > j) * self._sign(k > l)
        self.mat[index[i, j], index[k, l]] += s * val

    def dagger(self) -> "TwoBodyTensor":
        return TwoBodyTensor(self.n_qubits, self.mat.conj().T.copy(), self.fermionic)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.mat - self.mat.conj().T)) <= tol)

    def is_antihermitian(self, tol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.mat + self.mat.conj().T)) <= tol)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.mat))) if self.mat.size else 0.0

    def norm(self) -> float:
        """Frobenius norm of the canonical pair matrix."""
        return float(np.linalg.norm(self.mat))

    def trace(self) -> float:
        """Sum of n_i n_j coefficients over ordered index pairs i != j.

        For a particle-number eigenstate's two-particle density this is
        N (N - 1).
        """
        return float(2.0 * np.sum(self.mat.diagonal()).real)

    def to_dense4(self) -> np.ndarray:
        """Full 4-index tensor T[i, j, k, l] with the symmetry extension."""
        n = self.n_qubits
        pairs, index = pair_table(n)
        out = np.zeros((n, n, n, n), dtype=np.complex128)
        sgn = -1.0 if self.fermionic else 1.0
        for r, (i, j) in enumerate(pairs):
            for c, (k, l) in enumerate(pairs):
                v = self.mat[r, c]
                out[i, j, k, l] = v
                out[j, i, k, l] = sgn * v
                out[i, j, l, k] = sgn * v
                out[j, i, l, k] = v
        return out

    def __add__(self, other: "TwoBodyTensor") -> "TwoBodyTensor":
        self._check(other)
        return TwoBodyTensor(self.n_qubits, self.mat + other.mat, self.fermionic)

    def __sub__(self, other: "TwoBodyTensor") -> "TwoBodyTensor":
        self._check(other)
        return TwoBodyTensor(self.n_qubits, self.mat - other.mat, self.fermionic)

    def __mul__(self, scalar: complex) -> "TwoBodyTensor":
        return TwoBodyTensor(self.n_qubits, self.mat * scalar, self.fermionic)

    __rmul__ = __mul__

    def __neg__(self) -> "TwoBodyTensor":
        return TwoBodyTensor(self.n_qubits, -self.mat, self.fermionic)

    def _check(self, other: "TwoBodyTensor") -> None:
        if self.n_qubits != other.n_qubits or self.fermionic != other.fermionic:
            raise ValueError("tensor layouts do not match")
