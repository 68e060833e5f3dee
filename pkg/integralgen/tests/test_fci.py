"""Determinant CI pinned against an explicit Fock-space construction."""

from itertools import combinations

import numpy as np
import pytest

from integralgen.fci import determinant_energy, fci_ground_energy
from integralgen.fold import fold_active_space
from integralgen.scf import run_scf


def dense_spin_hamiltonian(h, eri):
    """Brute-force many-body matrix over all occupations of 2*norb spin
    orbitals (alpha block first), built from explicit ladder matrices."""
    norb = h.shape[0]
    n_so = 2 * norb
    dim = 1 << n_so

    def ladder(q, create):
        m = np.zeros((dim, dim))
        for x in range(dim):
            occ = (x >> q) & 1
            if create and not occ:
                sign = (-1) ** bin(x & ((1 << q) - 1)).count("1")
                m[x | (1 << q), x] = sign
            if not create and occ:
                sign = (-1) ** bin(x & ((1 << q) - 1)).count("1")
                m[x ^ (1 << q), x] = sign
        return m

    cre = [ladder(q, True) for q in range(n_so)]
    ann = [ladder(q, False) for q in range(n_so)]

    H = np.zeros((dim, dim))
    for p in range(norb):
        for q in range(norb):
            if h[p, q] == 0.0:
                continue
            for s in (0, 1):
                H += h[p, q] * cre[p + s * norb] @ ann[q + s * norb]
    for p in range(norb):
        for q in range(norb):
            for r in range(norb):
                for s in range(norb):
                    v = eri[p, q, r, s]
                    if v == 0.0:
                        continue
                    for s1 in (0, 1):
                        for s2 in (0, 1):
                            P, Q = p + s1 * norb, q + s1 * norb
                            Rr, Ss = r + s2 * norb, s + s2 * norb
                            H += 0.5 * v * cre[P] @ cre[Rr] @ ann[Ss] @ ann[Q]
    return H


def sector_ground(H, norb, n_alpha, n_beta):
    n_so = 2 * norb
    idx = []
    for x in range(1 << n_so):
        na = bin(x & ((1 << norb) - 1)).count("1")
        nb = bin(x >> norb).count("1")
        if na == n_alpha and nb == n_beta:
            idx.append(x)
    sub = H[np.ix_(idx, idx)]
    return float(np.linalg.eigvalsh(sub)[0])


@pytest.mark.parametrize("seed,n_alpha,n_beta", [(0, 1, 1), (1, 2, 1), (2, 2, 2)])
def test_fci_matches_dense_fock_space(seed, n_alpha, n_beta):
    rng = np.random.default_rng(seed)
    norb = 3
    h = rng.standard_normal((norb, norb))
    h = 0.5 * (h + h.T)
    raw = rng.standard_normal((norb,) * 4)
    eri = np.zeros_like(raw)
    # impose full 8-fold symmetry
    for perm in (
        (0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
        (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0),
    ):
        eri += np.transpose(raw, perm)
    eri /= 8.0

    H = dense_spin_hamiltonian(h, eri)
    want = sector_ground(H, norb, n_alpha, n_beta)
    got = fci_ground_energy(h, eri, n_alpha, n_beta)
    assert got == pytest.approx(want, abs=1e-10)


def test_determinant_energy_is_ci_diagonal():
    rng = np.random.default_rng(5)
    norb = 4
    h = rng.standard_normal((norb, norb))
    h = 0.5 * (h + h.T)
    raw = rng.standard_normal((norb,) * 4)
    eri = np.zeros_like(raw)
    for perm in (
        (0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
        (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0),
    ):
        eri += np.transpose(raw, perm)
    eri /= 8.0
    # FCI of a 1x1 sector equals the determinant energy
    full = fci_ground_energy(h, eri, norb, norb)
    det = determinant_energy(h, eri, tuple(range(norb)), tuple(range(norb)))
    assert full == pytest.approx(det, abs=1e-10)


def test_h2_fci_beats_scf_and_matches_two_by_two():
    geom = [("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 0.74))]
    scf = run_scf(geom, 1, 1)
    folded = fold_active_space(scf)
    e_fci = fci_ground_energy(folded.h, folded.eri, 1, 1, folded.e_core)
    assert e_fci < scf.energy - 1e-3
    # closed-shell H2: ground energy from the sigma_g^2 / sigma_u^2 2x2 block
    h, eri = folded.h, folded.eri
    e11 = 2 * h[0, 0] + eri[0, 0, 0, 0]
    e22 = 2 * h[1, 1] + eri[1, 1, 1, 1]
    k = eri[0, 1, 0, 1]
    block = np.array([[e11, k], [k, e22]])
    want = np.linalg.eigvalsh(block)[0] + folded.e_core
    assert e_fci == pytest.approx(want, abs=1e-10)