"""MO transformation, active-space folding, and orbital selection."""

from dataclasses import dataclass

import numpy as np

from .basis import build_basis
from .scf import SCFResult


@dataclass
class FoldedIntegrals:
    h: np.ndarray  # effective one-body, active MOs
    eri: np.ndarray  # chemist (tu|vw), active MOs
    e_core: float  # nuclear repulsion plus folded core energy
    n_alpha: int  # active alpha electrons
    n_beta: int


def mo_transform(scf: SCFResult):
    C = scf.mo_coeff
    h = C.T @ scf.hcore @ C
    eri = np.einsum("pqrs,pi,qj,rk,sl->ijkl", scf.eri, C, C, C, C, optimize=True)
    return h, eri


def fold_active_space(scf: SCFResult, core=(), active=None) -> FoldedIntegrals:
    """Fold doubly occupied core orbitals into an effective active Hamiltonian.

    core and active are MO index lists; active defaults to every orbital
    not in core, in ascending energy order.
    """
    h, eri = mo_transform(scf)
    norb = h.shape[0]
    core = list(core)
    if active is None:
        active = [m for m in range(norb) if m not in core]
    act = np.asarray(active, dtype=int)

    e_core = scf.e_nuc
    for c in core:
        e_core += 2.0 * h[c, c]
        for d in core:
            e_core += 2.0 * eri[c, c, d, d] - eri[c, d, d, c]

    heff = h[np.ix_(act, act)].copy()
    for c in core:
        heff += 2.0 * eri[np.ix_(act, act, [c], [c])][:, :, 0, 0]
        heff -= eri[np.ix_(act, [c], [c], act)][:, 0, 0, :]

    return FoldedIntegrals(
        h=heff,
        eri=eri[np.ix_(act, act, act, act)].copy(),
        e_core=float(e_core),
        n_alpha=scf.n_alpha - len(core),
        n_beta=scf.n_beta - len(core),
    )


def pi_orbital_indices(scf: SCFResult, geometry, cluster_tol: float = 1e-6):
    """Indices of MOs built from p functions perpendicular to a z-aligned axis.

    Degenerate MO clusters are first rotated to diagonalize the projector
    onto the perpendicular-p AO space, so accidental sigma/pi mixing
    inside a degenerate eigenspace is resolved.  Rotations act only
    within clusters of equal orbital energy and therefore leave the SCF
    state unchanged when occupation classes do not straddle a cluster.
    """
    basis = build_basis(geometry)
    pi_mask = np.array([f.lmn in ((1, 0, 0), (0, 1, 0)) for f in basis])

    # Loewdin-orthonormalized coefficients: columns have unit weight
    S = _overlap_from(scf, geometry)
    w, v = np.linalg.eigh(S)
    s_half = v @ np.diag(np.sqrt(w)) @ v.T
    B = s_half @ scf.mo_coeff

    # rotate within degenerate clusters to purify pi character
    e = scf.mo_energy
    m = 0
    while m < len(e):
        n = m + 1
        while n < len(e) and abs(e[n] - e[m]) < cluster_tol:
            n += 1
        if n - m > 1:
            classes = {
                ("c" if i < scf.n_beta else "o" if i < scf.n_alpha else "v")
                for i in range(m, n)
            }
            if len(classes) > 1:
                raise ValueError("degenerate cluster straddles occupation classes")
            block = B[:, m:n]
            proj = block.T @ np.diag(pi_mask.astype(float)) @ block
            _, rot = np.linalg.eigh(proj)
            scf.mo_coeff[:, m:n] = scf.mo_coeff[:, m:n] @ rot
            B[:, m:n] = block @ rot
        m = n

    weights = np.sum(B[pi_mask, :] ** 2, axis=0)
    ambiguous = np.flatnonzero((weights > 0.05) & (weights < 0.95))
    if ambiguous.size:
        raise ValueError(f"sigma/pi classification ambiguous for MOs {ambiguous}")
    return [int(i) for i in np.flatnonzero(weights > 0.95)]


def _overlap_from(scf: SCFResult, geometry):
    from .integrals import normalize_contractions, overlap_matrix

    basis = build_basis(geometry)
    normalize_contractions(basis)
    return overlap_matrix(basis)
