"""Restricted and restricted open-shell Hartree-Fock with DIIS."""

from dataclasses import dataclass

import numpy as np

from .basis import build_basis, nuclear_repulsion
from .integrals import (
    eri_tensor,
    kinetic_matrix,
    normalize_contractions,
    nuclear_matrix,
    overlap_matrix,
)


class SCFError(RuntimeError):
    pass


@dataclass
class SCFResult:
    energy: float
    mo_coeff: np.ndarray  # columns are MOs, ordered by orbital energy
    mo_energy: np.ndarray
    n_alpha: int
    n_beta: int
    hcore: np.ndarray
    eri: np.ndarray  # chemist (ij|kl) in the AO basis
    e_nuc: float


def compute_integrals(geometry):
    basis = build_basis(geometry)
    normalize_contractions(basis)
    S = overlap_matrix(basis)
    h = kinetic_matrix(basis) + nuclear_matrix(basis, geometry)
    eri = eri_tensor(basis)
    return S, h, eri


def _diis_extrapolate(fock_list, err_list):
    m = len(fock_list)
    B = -np.ones((m + 1, m + 1))
    B[m, m] = 0.0
    for a in range(m):
        for b in range(m):
            B[a, b] = np.vdot(err_list[a], err_list[b])
    rhs = np.zeros(m + 1)
    rhs[m] = -1.0
    try:
        c = np.linalg.solve(B, rhs)[:m]
    except np.linalg.LinAlgError:
        return fock_list[-1]
    return sum(ci * fi for ci, fi in zip(c, fock_list))


def _jk(eri, D):
    J = np.einsum("pqrs,rs->pq", eri, D)
    K = np.einsum("prqs,rs->pq", eri, D)
    return J, K


def run_scf(geometry, n_alpha, n_beta, max_cycles=200, conv=1e-10) -> SCFResult:
    """RHF for closed shells, Roothaan effective-Fock ROHF otherwise."""
    S, h, eri = compute_integrals(geometry)
    e_nuc = nuclear_repulsion(geometry)
    n = h.shape[0]
    if n_alpha < n_beta:
        raise ValueError("expected n_alpha >= n_beta")

    # symmetric orthogonalization
    sval, svec = np.linalg.eigh(S)
    if sval.min() < 1e-10:
        raise SCFError("linearly dependent basis")
    X = svec @ np.diag(sval**-0.5) @ svec.T

    # core guess
    e, cprime = np.linalg.eigh(X.T @ h @ X)
    C = X @ cprime

    focks: list[np.ndarray] = []
    errs: list[np.ndarray] = []
    e_old = 0.0
    for cycle in range(max_cycles):
        Ca = C[:, :n_alpha]
        Cb = C[:, :n_beta]
        Da = Ca @ Ca.T
        Db = Cb @ Cb.T
        Jt, _ = _jk(eri, Da + Db)
        _, Ka = _jk(eri, Da)
        _, Kb = _jk(eri, Db)
        Fa = h + Jt - Ka
        Fb = h + Jt - Kb
        energy = e_nuc + 0.5 * (
            np.sum(Da * (h + Fa)) + np.sum(Db * (h + Fb))
        )

        if n_alpha == n_beta:
            F = Fa
        else:
            # Roothaan single-matrix ROHF: couple closed, open and virtual
            # blocks of the spin Focks in the current MO basis
            Fmo_a = C.T @ Fa @ C
            Fmo_b = C.T @ Fb @ C
            Fmo = 0.5 * (Fmo_a + Fmo_b)
            c_sl = slice(0, n_beta)
            o_sl = slice(n_beta, n_alpha)
            v_sl = slice(n_alpha, n)
            R = Fmo.copy()
            R[c_sl, o_sl] = Fmo_b[c_sl, o_sl]
            R[o_sl, c_sl] = Fmo_b[o_sl, c_sl]
            R[o_sl, v_sl] = Fmo_a[o_sl, v_sl]
            R[v_sl, o_sl] = Fmo_a[v_sl, o_sl]
            # back to the AO basis: C^T S C = I so C^-1 = C^T S
            F = (S @ C) @ R @ (S @ C).T
        # DIIS on the orthogonalized commutator
        Dt = Da + Db
        err = X.T @ (F @ Dt @ S - S @ Dt @ F) @ X
        focks.append(F)
        errs.append(err)
        if len(focks) > 8:
            focks.pop(0)
            errs.pop(0)
        Fuse = _diis_extrapolate(focks, errs) if len(focks) > 1 else F

        e, cprime = np.linalg.eigh(X.T @ Fuse @ X)
        C = X @ cprime

        if abs(energy - e_old) < conv and np.max(np.abs(err)) < 1e-7:
            order = np.argsort(e)
            return SCFResult(
                energy=float(energy),
                mo_coeff=C[:, order],
                mo_energy=e[order],
                n_alpha=n_alpha,
                n_beta=n_beta,
                hcore=h,
                eri=eri,
                e_nuc=e_nuc,
            )
        e_old = energy
    raise SCFError(f"SCF did not converge in {max_cycles} cycles")
