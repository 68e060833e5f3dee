"""Basis bookkeeping and pair-matrix container behavior."""

from math import comb

import numpy as np
import pytest

from cqesim.states import (
    hartree_fock_index,
    hartree_fock_state,
    random_state,
    sector_dimension,
    sector_indices,
)
from cqesim.tensors import TwoBodyTensor, pair_index, pair_table, sz_conserving_mask


def test_hartree_fock_index_bits():
    # two alphas and one beta: orbitals 0, 2 and 1
    assert hartree_fock_index(6, 2, 1) == 0b000111
    assert hartree_fock_index(6, 3, 3) == 0b111111
    psi = hartree_fock_state(4, 1, 1)
    assert psi[0b0011] == 1.0
    assert np.count_nonzero(psi) == 1


def test_sector_enumeration_counts():
    for n, ne, sz2 in [(6, 2, 0), (8, 4, 0), (8, 6, 2), (10, 5, 1)]:
        idx = sector_indices(n, ne, sz2)
        assert len(idx) == sector_dimension(n, ne, sz2)
        n_alpha = (ne + sz2) // 2
        assert len(idx) == comb(n // 2, n_alpha) * comb(n // 2, ne - n_alpha)
        occ = np.bitwise_count(idx.astype(np.uint64))
        assert np.all(occ == ne)
        alpha_mask = sum(1 << q for q in range(0, n, 2))
        occ_a = np.bitwise_count(idx.astype(np.uint64) & np.uint64(alpha_mask))
        assert np.all(occ_a == n_alpha)
        assert np.all(np.diff(idx) > 0)


def test_random_state_sector_support():
    rng = np.random.default_rng(0)
    psi = random_state(8, rng, n_elec=4, sz2=0)
    assert abs(np.linalg.norm(psi) - 1.0) < 1e-12
    support = np.flatnonzero(psi)
    allowed = set(sector_indices(8, 4, 0).tolist())
    assert set(support.tolist()) <= allowed


def test_pair_table_roundtrip():
    pairs, index = pair_table(6)
    assert len(pairs) == 15
    for m, (i, j) in enumerate(pairs):
        assert pair_index(6, i, j) == m
        assert index[j, i] == m


@pytest.mark.parametrize("fermionic,sign", [(True, -1.0), (False, 1.0)])
def test_element_symmetry_extension(fermionic, sign):
    t = TwoBodyTensor(4, fermionic=fermionic)
    t.add_element(0, 1, 2, 3, 2.5 + 0.5j)
    assert t.element(0, 1, 2, 3) == 2.5 + 0.5j
    assert t.element(1, 0, 2, 3) == sign * (2.5 + 0.5j)
    assert t.element(0, 1, 3, 2) == sign * (2.5 + 0.5j)
    assert t.element(1, 0, 3, 2) == 2.5 + 0.5j
    assert t.element(0, 0, 2, 3) == 0.0
    d4 = t.to_dense4()
    assert d4[1, 0, 2, 3] == sign * (2.5 + 0.5j)


def test_add_element_noncanonical_signs():
    t = TwoBodyTensor(4, fermionic=True)
    t.add_element(1, 0, 2, 3, 1.0)
    assert t.element(0, 1, 2, 3) == -1.0


def test_trace_counts_ordered_pairs():
    t = TwoBodyTensor(4, fermionic=True)
    t.add_element(0, 1, 0, 1, 3.0)
    assert t.trace() == 6.0


def test_sz_mask_blocks():
    mask = sz_conserving_mask(4)
    r_aa = pair_index(4, 0, 2)  # both alpha
    r_bb = pair_index(4, 1, 3)
    r_ab = pair_index(4, 0, 1)
    assert not mask[r_aa, r_bb]
    assert mask[r_aa, r_aa]
    assert mask[r_ab, pair_index(4, 2, 3)]
    assert not mask[r_ab, r_aa]


def test_hermiticity_predicates():
    rng = np.random.default_rng(1)
    m = 6
    raw = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    herm = TwoBodyTensor(4, raw + raw.conj().T)
    anti = TwoBodyTensor(4, raw - raw.conj().T)
    assert herm.is_hermitian() and not herm.is_antihermitian()
    assert anti.is_antihermitian() and not anti.is_hermitian()
    assert anti.dagger().mat == pytest.approx(-anti.mat)
