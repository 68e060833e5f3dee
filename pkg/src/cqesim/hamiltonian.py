"""Reduced Hamiltonian assembly, exact eigensolvers, and propagators.

The electronic Hamiltonian over 2r interleaved spin orbitals (alpha even,
beta odd) is packed into a single two-body coefficient tensor so that

    E = core + sum_{(ij),(kl)} K2[(ij),(kl)] <a+_i a+_j a_l a_k>.

One-body integrals enter through the standard (N-1)^-1 spectator fold:
on the N-electron sector, a+_A a_B = (N-1)^-1 sum_{C not in {A,B}}
a+_A a+_C a_C a_B, so K2 alone reproduces the full energy.

Also here: the pivoted Cholesky factorization of the two-electron
integrals and the induced factored form of the Hamiltonian,

    H = E_core + h~ + 1/2 sum_P (L_P)^2,   h~_ps = h_ps - 1/2 sum_q (pq|qs),

whose exponential factors drive the per-factor auxiliary-state propagator.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .fcidump import IntegralSet
from .ops import apply_tensor, tensor_expectation, trotter_order, trotter_rotate
from .states import (
    CapabilityError,
    FockState,
    basis_state,
    hartree_fock_state,
    num_qubits_of,
    sector_dimension,
    sector_indices,
)
from .tensors import TwoBodyTensor, pair_table

__all__ = [
    "ReducedHamiltonian",
    "CholeskyFactorization",
    "HamiltonianFactors",
    "build_reduced_hamiltonian",
    "determinant_energy",
    "aufbau_occupation",
    "hartree_fock_reference",
    "lowest_energy_determinants",
    "fci_ground_state",
    "evolve_auxiliary",
    "pivoted_cholesky",
    "hamiltonian_factors",
    "apply_one_body",
]

# dense diagonalization below this sector dimension, Lanczos above
_DENSE_LIMIT = 1200
_SECTOR_LIMIT = 100_000


@dataclass(frozen=True)
class ReducedHamiltonian:
    """Two-body coefficient tensor plus scalar core energy.

    The tensor is Hermitian and fermionic; it already contains the folded
    one-body part, so it is only valid on the N-electron sector it was
    built for.  The source integrals are kept so factored propagators can
    be derived without re-parsing.
    """

    k2: TwoBodyTensor
    core_energy: float
    n_electrons: int
    ms2: int
    integrals: IntegralSet | None = None

    def __post_init__(self):
        if not self.k2.is_hermitian(1e-12):
            raise ValueError("reduced Hamiltonian tensor must be Hermitian")
        self.k2.mat.setflags(write=False)

    @property
    def n_qubits(self) -> int:
        return self.k2.n_qubits

    @property
    def n_spatial(self) -> int:
        return self.k2.n_qubits // 2

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """H |psi> including the core-energy shift."""
        out = apply_tensor(psi, self.k2)
        if self.core_energy != 0.0:
            out += self.core_energy * psi
        return out

    def energy(self, state) -> float:
        psi = state.amplitudes if isinstance(state, FockState) else state
        return float(tensor_expectation(psi, self.k2).real) + self.core_energy

    def norm_bound(self) -> float:
        """Cheap upper bound on the operator norm (each excitation has norm 1)."""
        return float(np.abs(self.k2.mat).sum()) + abs(self.core_energy)


def build_reduced_hamiltonian(ints: IntegralSet) -> ReducedHamiltonian:
    """Pack h1 and the antisymmetrized ERI into one spin-orbital pair matrix."""
    n_elec = ints.n_electrons
    if n_elec < 2:
        raise ValueError("one-body folding needs at least two electrons")
    n = ints.n_spin_orbitals
    pairs, index = pair_table(n)
    orb = np.asarray(pairs[:, 0] // 2), np.asarray(pairs[:, 1] // 2)
    spin = np.asarray(pairs[:, 0] % 2), np.asarray(pairs[:, 1] % 2)

    # <PQ||ST> over canonical pairs: rows are creator pairs (P<Q), columns
    # annihilator pairs (S<T); spin is conserved along each contraction line.
    op, oq = orb[0][:, None], orb[1][:, None]
    os_, ot = orb[0][None, :], orb[1][None, :]
    sp_, sq = spin[0][:, None], spin[1][:, None]
    ss, st = spin[0][None, :], spin[1][None, :]
    direct = ints.eri[op, os_, oq, ot] * ((sp_ == ss) & (sq == st))
    exch = ints.eri[op, ot, oq, os_] * ((sp_ == st) & (sq == ss))
    mat = (direct - exch).astype(np.complex128)

    # (N-1)^-1 one-body fold: h[A,B] spreads over every spectator C.
    weight = 1.0 / (n_elec - 1)
    all_orbs = np.arange(n)
    for a in range(ints.n_spatial):
        for b in range(ints.n_spatial):
            if ints.h1[a, b] == 0.0:
                continue
            for sigma in (0, 1):
                big_a, big_b = 2 * a + sigma, 2 * b + sigma
                spect = all_orbs[(all_orbs != big_a) & (all_orbs != big_b)]
                rows = index[big_a, spect]
                cols = index[big_b, spect]
                sgn = np.where(spect < big_a, -1.0, 1.0) * np.where(
                    spect < big_b, -1.0, 1.0
                )
                np.add.at(mat, (rows, cols), sgn * ints.h1[a, b] * weight)

    k2 = TwoBodyTensor(n, mat, fermionic=True)
    return ReducedHamiltonian(
        k2=k2,
        core_energy=ints.core_energy,
        n_electrons=n_elec,
        ms2=ints.ms2,
        integrals=ints,
    )


def aufbau_occupation(ints: IntegralSet) -> tuple[int, ...]:
    """Lowest-index spin orbitals consistent with (NELEC, MS2)."""
    n_alpha = (ints.n_electrons + ints.ms2) // 2
    n_beta = ints.n_electrons - n_alpha
    if n_alpha < 0 or n_beta < 0 or n_alpha - n_beta != ints.ms2:
        raise ValueError("NELEC and MS2 are inconsistent")
    if max(n_alpha, n_beta) > ints.n_spatial:
        raise ValueError("more electrons of one spin than spatial orbitals")
    occ = [2 * p for p in range(n_alpha)] + [2 * p + 1 for p in range(n_beta)]
    return tuple(sorted(occ))


def determinant_energy(ham: ReducedHamiltonian, occupied) -> float:
    """<D|H|D> for a Slater determinant, from the pair diagonal alone."""
    occ = np.asarray(sorted(occupied), dtype=np.int64)
    if occ.size != ham.n_electrons:
        raise ValueError("occupation does not match the electron count")
    if occ.size != np.unique(occ).size:
        raise ValueError("repeated spin orbital in occupation")
    if occ.size and (occ[0] < 0 or occ[-1] >= ham.n_qubits):
        raise ValueError("spin orbital index out of range")
    _, index = pair_table(ham.n_qubits)
    ii, jj = np.triu_indices(occ.size, k=1)
    diag = index[occ[ii], occ[jj]]
    return float(ham.k2.mat[diag, diag].sum().real) + ham.core_energy


def hartree_fock_reference(ham: ReducedHamiltonian) -> FockState:
    n_alpha = (ham.n_electrons + ham.ms2) // 2
    n_beta = ham.n_electrons - n_alpha
    amps = hartree_fock_state(ham.n_qubits, n_alpha, n_beta)
    return FockState(amps, ham.n_electrons, ham.ms2)


def lowest_energy_determinants(ham: ReducedHamiltonian, k: int):
    """The k sector determinants of lowest diagonal energy, as FockStates.

    Ties break toward smaller basis index so the list is reproducible.
    Useful as a multistart set when the aufbau determinant sits in a
    symmetry class that does not contain the ground state.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    sector = sector_indices(ham.n_qubits, ham.n_electrons, ham.ms2)
    diag = np.array([
        determinant_energy(ham, [q for q in range(ham.n_qubits) if (int(b) >> q) & 1])
        for b in sector
    ])
    order = np.lexsort((sector, diag))[: min(k, len(sector))]
    return [
        FockState(basis_state(ham.n_qubits, int(sector[i])), ham.n_electrons, ham.ms2)
        for i in order
    ]


def _popcount_below(states: np.ndarray, orbital: int) -> np.ndarray:
    mask = np.uint64((1 << orbital) - 1)
    return np.bitwise_count(states & mask)


def _sector_matrix(ham: ReducedHamiltonian, n_elec: int, sz2: int):
    """Sparse H restricted to an (N, Sz) sector of sorted basis states."""
    n = ham.n_qubits
    sector = sector_indices(n, n_elec, sz2).astype(np.uint64)
    dim = sector.size
    if dim == 0:
        raise ValueError("empty (N, Sz) sector")
    rows_acc, cols_acc, data_acc = [], [], []
    pairs, _ = pair_table(n)
    nz_rows, nz_cols = np.nonzero(ham.k2.mat)
    one = np.uint64(1)
    for rp, cp in zip(nz_rows, nz_cols):
        i, j = (int(x) for x in pairs[rp])
        k, l = (int(x) for x in pairs[cp])
        need = (one << np.uint64(k)) | (one << np.uint64(l))
        free = (one << np.uint64(i)) | (one << np.uint64(j))
        hit = (sector & need) == need
        src = sector[hit]
        cleared = src ^ need
        keep = (cleared & free) == 0
        src, cleared = src[keep], cleared[keep]
        if src.size == 0:
            continue
        cols = np.nonzero(hit)[0][keep]
        # Jordan-Wigner parity along a_k, a_l, a+_j, a+_i applied in turn
        par = _popcount_below(src, k)
        s1 = src ^ (one << np.uint64(k))
        par += _popcount_below(s1, l)
        s1 ^= one << np.uint64(l)
        par += _popcount_below(s1, j)
        s1 |= one << np.uint64(j)
        par += _popcount_below(s1, i)
        tgt = s1 | (one << np.uint64(i))
        rows = np.searchsorted(sector, tgt)
        sign = np.where(par & 1, -1.0, 1.0)
        rows_acc.append(rows)
        cols_acc.append(cols)
        data_acc.append(sign * ham.k2.mat[rp, cp])
    mat = sp.coo_matrix(
        (np.concatenate(data_acc), (np.concatenate(rows_acc), np.concatenate(cols_acc))),
        shape=(dim, dim),
    ).tocsr()
    if ham.core_energy != 0.0:
        mat = mat + ham.core_energy * sp.identity(dim, format="csr")
    return mat, sector.astype(np.int64)


def fci_ground_state(ham: ReducedHamiltonian, n: int, sz_twice: int):
    """Lowest eigenpair of H in the (n, sz) sector.

    Dense diagonalization for small sectors, Lanczos with a deterministic
    start vector above _DENSE_LIMIT.  The residual is verified so an
    unconverged iterative solve cannot slip through.
    """
    dim = sector_dimension(ham.n_qubits, n, sz_twice)
    if dim > _SECTOR_LIMIT:
        raise CapabilityError(
            f"sector dimension {dim} exceeds the {_SECTOR_LIMIT} solver limit"
        )
    mat, sector = _sector_matrix(ham, n, sz_twice)
    if dim <= _DENSE_LIMIT:
        dense = mat.toarray()
        vals, vecs = np.linalg.eigh(0.5 * (dense + dense.conj().T))
        energy, vec = float(vals[0]), vecs[:, 0]
    else:
        v0 = np.full(dim, 1.0 / np.sqrt(dim))
        vals, vecs = spla.eigsh(mat, k=1, which="SA", v0=v0, maxiter=max(2000, 40 * dim))
        energy, vec = float(vals[0]), vecs[:, 0]
    resid = np.linalg.norm(mat @ vec - energy * vec)
    if resid >= 1e-9:
        raise RuntimeError(f"eigensolver residual {resid:.2e} above 1e-9")
    # fix the overall phase so repeated solves are bit-identical
    anchor = np.argmax(np.abs(vec))
    vec = vec * (np.conj(vec[anchor]) / abs(vec[anchor]))
    amps = np.zeros(1 << ham.n_qubits, dtype=np.complex128)
    amps[sector] = vec
    amps /= np.linalg.norm(amps)
    return energy, FockState(amps, n, sz_twice)


def _taylor_expm_apply(apply_fn, psi: np.ndarray, norm_bound: float) -> np.ndarray:
    """exp(A)|psi> by scaled Taylor summation; apply_fn computes A|v>.

    The argument is split into ceil(norm_bound) substeps so each Taylor
    series converges factorially with argument norm <= 1.
    """
    steps = max(1, int(np.ceil(norm_bound)))
    out = np.array(psi, dtype=np.complex128, copy=True)
    inv = 1.0 / steps
    for _ in range(steps):
        term = out.copy()
        acc = out.copy()
        for k in range(1, 120):
            term = apply_fn(term) * (inv / k)
            acc += term
            if np.linalg.norm(term) <= 1e-15 * np.linalg.norm(acc):
                break
        else:
            raise RuntimeError("Taylor series for the propagator did not converge")
        out = acc
    return out


@lru_cache(maxsize=None)
def _one_body_context(n_qubits: int, create: int, annihilate: int):
    """(src, tgt, sign) for a+_create a_annihilate over the full space."""
    states = np.arange(1 << n_qubits, dtype=np.uint64)
    one = np.uint64(1)
    occ = (states >> np.uint64(annihilate)) & one == one
    if create == annihilate:
        src = states[occ]
        sign = np.ones(src.size)
        out = (src.astype(np.int64), src.astype(np.int64), sign)
    else:
        free = (states >> np.uint64(create)) & one == 0
        src = states[occ & free]
        par = _popcount_below(src, annihilate)
        s1 = src ^ (one << np.uint64(annihilate))
        par += _popcount_below(s1, create)
        tgt = s1 | (one << np.uint64(create))
        sign = np.where(par & 1, -1.0, 1.0)
        out = (src.astype(np.int64), tgt.astype(np.int64), sign)
    for arr in out:
        arr.setflags(write=False)
    return out


def apply_one_body(psi: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """Spin-summed one-body operator sum_{pq,sigma} mat[p,q] a+_{p,s} a_{q,s}."""
    n = num_qubits_of(psi)
    r = mat.shape[0]
    if 2 * r != n:
        raise ValueError("one-body matrix does not match the qubit count")
    out = np.zeros_like(psi, dtype=np.complex128)
    for p in range(r):
        for q in range(r):
            if mat[p, q] == 0.0:
                continue
            for sigma in (0, 1):
                src, tgt, sign = _one_body_context(n, 2 * p + sigma, 2 * q + sigma)
                out[tgt] += (mat[p, q] * sign) * psi[src]
    return out


@dataclass(frozen=True)
class CholeskyFactorization:
    """Pivoted Cholesky vectors of the two-electron tensor.

    order counts the exponential factors of the induced propagator: one
    per retained two-electron vector plus one for the folded one-body
    term of the Hamiltonian factorization.
    """

    vectors: tuple
    threshold: float

    def __post_init__(self):
        for v in self.vectors:
            v.setflags(write=False)

    @property
    def rank(self) -> int:
        return len(self.vectors)

    @property
    def order(self) -> int:
        return len(self.vectors) + 1

    def reconstruction(self, r: int) -> np.ndarray:
        eri = np.zeros((r, r, r, r))
        for v in self.vectors:
            eri += np.einsum("ij,kl->ijkl", v, v)
        return eri


def pivoted_cholesky(eri: np.ndarray, threshold: float) -> CholeskyFactorization:
    """Greedy diagonal-pivot Cholesky of (ij|kl) viewed as a pair matrix."""
    r = eri.shape[0]
    resid = eri.reshape(r * r, r * r).copy()
    resid = 0.5 * (resid + resid.T)
    vectors = []
    while True:
        diag = np.diagonal(resid)
        if diag.min() < -1e-10:
            raise ValueError(
                f"two-electron tensor is not positive semidefinite "
                f"(diagonal {diag.min():.3e})"
            )
        p = int(np.argmax(diag))
        if diag[p] < threshold:
            break
        v = resid[:, p] / np.sqrt(diag[p])
        resid -= np.outer(v, v)
        vectors.append(v.reshape(r, r).copy())
    return CholeskyFactorization(vectors=tuple(vectors), threshold=threshold)


@dataclass(frozen=True)
class HamiltonianFactors:
    """H = core + one_body~ + 1/2 sum_P (L_P)^2 with h~ absorbing the ERI trace."""

    core_energy: float
    one_body: np.ndarray
    cholesky: CholeskyFactorization

    def __post_init__(self):
        self.one_body.setflags(write=False)

    @property
    def order(self) -> int:
        return self.cholesky.order


def hamiltonian_factors(ints: IntegralSet, threshold: float = 1e-6) -> HamiltonianFactors:
    chol = pivoted_cholesky(ints.eri, threshold)
    h_eff = ints.h1 - 0.5 * np.einsum("pqqs->ps", ints.eri)
    return HamiltonianFactors(
        core_energy=ints.core_energy, one_body=h_eff, cholesky=chol
    )


def _evolve_factored(state: FockState, ham: ReducedHamiltonian, delta: float):
    if ham.integrals is None:
        raise ValueError("factored propagation needs the source integrals")
    factors = hamiltonian_factors(ham.integrals)
    psi = state.amplitudes
    out = []

    def one_body_fn(v):
        return -1j * delta * (
            apply_one_body(v, factors.one_body) + factors.core_energy * v
        )

    bound = abs(delta) * (
        2.0 * np.abs(factors.one_body).sum() + abs(factors.core_energy)
    )
    out.append(state.replace_amplitudes(_taylor_expm_apply(one_body_fn, psi, bound)))
    for vec in factors.cholesky.vectors:

        def squared_fn(v, vec=vec):
            return -0.5j * delta * apply_one_body(apply_one_body(v, vec), vec)

        l_norm = 2.0 * np.abs(vec).sum()
        bound = 0.5 * abs(delta) * l_norm * l_norm
        out.append(state.replace_amplitudes(_taylor_expm_apply(squared_fn, psi, bound)))
    return out


_EVOLVE_METHODS = {
    "exact": "exact",
    "trotterfirstorder": "trotter",
    "trotter": "trotter",
    "choleskyfactored": "cholesky",
    "cholesky": "cholesky",
}


def evolve_auxiliary(state: FockState, ham: ReducedHamiltonian, delta: float, method: str):
    """Auxiliary-state propagation e^{-i delta H}|psi>.

    Exact uses scaled Taylor summation accurate to machine precision;
    TrotterFirstOrder is the product of pair-rotation exponentials in
    descending-magnitude order; CholeskyFactored returns one auxiliary
    state per factor of the Cholesky-factored Hamiltonian, each evolved
    from the same input state.
    """
    key = _EVOLVE_METHODS.get(str(method).lower())
    if key is None:
        raise ValueError(f"unknown propagation method {method!r}")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta == 0.0:
        return [state] if key == "cholesky" else state

    if key == "exact":
        fn = lambda v: -1j * delta * ham.apply(v)
        amps = _taylor_expm_apply(fn, state.amplitudes, delta * ham.norm_bound())
        return state.replace_amplitudes(amps)
    if key == "trotter":
        amps = np.array(state.amplitudes, dtype=np.complex128, copy=True)
        order = trotter_order(ham.k2, by_magnitude=True)
        trotter_rotate(amps, ham.k2, scale=-1j * delta, order=order)
        amps *= np.exp(-1j * delta * ham.core_energy)
        return state.replace_amplitudes(amps)
    return _evolve_factored(state, ham, delta)
