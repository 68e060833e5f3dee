"""Determinant full CI over spatial-orbital integrals.

Builds the CI matrix with Slater-Condon rules on alpha/beta occupation
strings.  Small systems only: the matrix is dense and diagonalized
exactly.  This route is deliberately independent of any second-quantized
statevector machinery so downstream consumers can cross-validate.
"""

from itertools import combinations

import numpy as np

__all__ = ["fci_ground_energy", "determinant_energy"]


def _mask(occ) -> int:
    m = 0
    for p in occ:
        m |= 1 << p
    return m


def _single_phase(mask: int, p: int, q: int) -> float:
    """Sign of a_q+ a_p applied to an occupation-string bitmask."""
    lo, hi = (p, q) if p < q else (q, p)
    between = mask & (((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1))
    return -1.0 if bin(between).count("1") % 2 else 1.0


def determinant_energy(h, eri, occ_a, occ_b) -> float:
    """Energy expectation of a single determinant (excludes core constant)."""
    e = sum(h[i, i] for i in occ_a) + sum(h[i, i] for i in occ_b)
    for occ in (occ_a, occ_b):
        for i in occ:
            for j in occ:
                e += 0.5 * (eri[i, i, j, j] - eri[i, j, j, i])
    for i in occ_a:
        for j in occ_b:
            e += eri[i, i, j, j]
    return float(e)


def _single_element(h, eri, p, q, same, other):
    """<D|H|D(p->q)> without the phase; same/other are spectator occupations."""
    val = h[p, q]
    for i in same:
        if i != p:
            val += eri[p, q, i, i] - eri[p, i, i, q]
    for i in other:
        val += eri[p, q, i, i]
    return val


def fci_ground_energy(h, eri, n_alpha, n_beta, e_core=0.0, n_roots=1):
    """Lowest eigenvalue(s) of the CI matrix in the (n_alpha, n_beta) sector."""
    norb = h.shape[0]
    strings_a = list(combinations(range(norb), n_alpha))
    strings_b = list(combinations(range(norb), n_beta))
    masks_a = [_mask(s) for s in strings_a]
    masks_b = [_mask(s) for s in strings_b]
    na, nb = len(strings_a), len(strings_b)
    dim = na * nb

    # single-excitation tables per spin: (I, J, p, q, phase)
    def excitations(strings, masks):
        index = {s: i for i, s in enumerate(strings)}
        singles = []
        for I, occ in enumerate(strings):
            occ_set = set(occ)
            for p in occ:
                for q in range(norb):
                    if q in occ_set:
                        continue
                    new = tuple(sorted(occ_set - {p} | {q}))
                    singles.append((I, index[new], p, q, _single_phase(masks[I], p, q)))
        return singles

    singles_a = excitations(strings_a, masks_a)
    singles_b = excitations(strings_b, masks_b)

    H = np.zeros((dim, dim))

    for Ia, occ_a in enumerate(strings_a):
        for Ib, occ_b in enumerate(strings_b):
            row = Ia * nb + Ib
            H[row, row] = determinant_energy(h, eri, occ_a, occ_b)

    # alpha singles (beta spectator) and beta singles
    for singles, is_alpha in ((singles_a, True), (singles_b, False)):
        for I, J, p, q, ph in singles:
            if is_alpha:
                for Ib, occ_b in enumerate(strings_b):
                    row, col = I * nb + Ib, J * nb + Ib
                    H[row, col] += ph * _single_element(
                        h, eri, p, q, strings_a[I], occ_b
                    )
            else:
                for Ia, occ_a in enumerate(strings_a):
                    row, col = Ia * nb + I, Ia * nb + J
                    H[row, col] += ph * _single_element(
                        h, eri, p, q, strings_b[I], occ_a
                    )

    # same-spin doubles via sequential singles with ordered index pairs
    def add_same_spin_doubles(strings, masks, is_alpha):
        index = {s: i for i, s in enumerate(strings)}
        for I, occ in enumerate(strings):
            occ_set = set(occ)
            virt = [q for q in range(norb) if q not in occ_set]
            for p, q in combinations(occ, 2):
                for r, s in combinations(virt, 2):
                    # p->r then q->s on the intermediate string
                    mid_set = occ_set - {p} | {r}
                    ph1 = _single_phase(masks[I], p, r)
                    ph2 = _single_phase(_mask(mid_set), q, s)
                    J = index[tuple(sorted(mid_set - {q} | {s}))]
                    val = ph1 * ph2 * (eri[p, r, q, s] - eri[p, s, q, r])
                    if is_alpha:
                        for Ib in range(nb):
                            H[I * nb + Ib, J * nb + Ib] += val
                    else:
                        for Ia in range(na):
                            H[Ia * nb + I, Ia * nb + J] += val

    add_same_spin_doubles(strings_a, masks_a, True)
    add_same_spin_doubles(strings_b, masks_b, False)

    # opposite-spin doubles combine one single from each spin
    by_start_a: dict[int, list] = {}
    for I, J, p, q, ph in singles_a:
        by_start_a.setdefault(I, []).append((J, p, q, ph))
    by_start_b: dict[int, list] = {}
    for I, J, p, q, ph in singles_b:
        by_start_b.setdefault(I, []).append((J, p, q, ph))
    for Ia, lst_a in by_start_a.items():
        for Ib, lst_b in by_start_b.items():
            row = Ia * nb + Ib
            for Ja, p, r, pha in lst_a:
                for Jb, q, s, phb in lst_b:
                    H[row, Ja * nb + Jb] += pha * phb * eri[p, r, q, s]

    if not np.allclose(H, H.T, atol=1e-9):
        raise AssertionError("CI matrix lost symmetry")
    vals = np.linalg.eigvalsh(H)
    if n_roots == 1:
        return float(vals[0] + e_core)
    return vals[:n_roots] + e_core
