"""Dense reference constructions used to pin the statevector kernels.

Everything here is built from explicit Kronecker products so the fast
kernels are checked against an independent formulation.
"""

import numpy as np

I2 = np.eye(2)
PAULI_Z = np.diag([1.0, -1.0])
RAISE = np.array([[0.0, 0.0], [1.0, 0.0]])  # |1><0| in occupation basis
LOWER = RAISE.T.copy()


def qubit_chain(n_qubits, factors):
    """Dense operator with factors[q] acting on qubit q (identity default).

    Qubit 0 is the least significant bit of the basis index.
    """
    out = np.eye(1)
    for q in reversed(range(n_qubits)):
        out = np.kron(out, factors.get(q, I2))
    return out


def ladder_dense(n_qubits, q, create, fermionic):
    factors = {q: RAISE if create else LOWER}
    if fermionic:
        for p in range(q):
            factors[p] = PAULI_Z
    return qubit_chain(n_qubits, factors)


def excitation_dense(n_qubits, i, j, k, l, fermionic):
    """a+_i a+_j a_l a_k as an explicit matrix product."""
    return (
        ladder_dense(n_qubits, i, True, fermionic)
        @ ladder_dense(n_qubits, j, True, fermionic)
        @ ladder_dense(n_qubits, l, False, fermionic)
        @ ladder_dense(n_qubits, k, False, fermionic)
    )


def number_dense(n_qubits, q):
    return qubit_chain(n_qubits, {q: np.diag([0.0, 1.0])})


def hamiltonian_dense(ham):
    """Explicit matrix of a reduced Hamiltonian from its pair tensor."""
    from cqesim.tensors import pair_table

    n = ham.n_qubits
    pairs, _ = pair_table(n)
    out = ham.core_energy * np.eye(1 << n, dtype=complex)
    rows, cols = np.nonzero(ham.k2.mat)
    for r, c in zip(rows, cols):
        i, j = pairs[r]
        k, l = pairs[c]
        out += ham.k2.mat[r, c] * excitation_dense(n, i, j, k, l, True)
    return out


def generator_dense(n_qubits, element, fermionic):
    """g = E - E+ for an off-diagonal pair element, g = E on the diagonal."""
    i, j, k, l = element
    e = excitation_dense(n_qubits, i, j, k, l, fermionic)
    if (i, j) == (k, l):
        return e
    return e - e.conj().T
