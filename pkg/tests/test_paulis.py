import numpy as np
import pytest

from cqesim.paulis import (
    TARGETS,
    canonical_sz_elements,
    expand_excitation,
    expand_generator,
    string_weight,
    target_strings,
    y_parity,
)
from cqesim.rdm import count_rdm2_canonical

from oracles import excitation_dense, qubit_chain

X = np.array([[0.0, 1.0], [1.0, 0.0]])
Z = np.diag([1.0, -1.0])
XZ = X @ Z


def dense_from_strings(n_qubits, strings):
    """Rebuild the dense operator from {(x, z): coeff} masks."""
    out = np.zeros((1 << n_qubits, 1 << n_qubits), dtype=complex)
    for (x, z), coeff in strings.items():
        factors = {}
        for q in range(n_qubits):
            xb, zb = (x >> q) & 1, (z >> q) & 1
            if xb and zb:
                factors[q] = XZ
            elif xb:
                factors[q] = X
            elif zb:
                factors[q] = Z
        out += coeff * qubit_chain(n_qubits, factors)
    return out


@pytest.mark.parametrize("fermionic", [True, False])
@pytest.mark.parametrize(
    "element", [(0, 1, 2, 3), (0, 2, 1, 3), (1, 3, 1, 3), (0, 3, 0, 3), (2, 3, 0, 1)]
)
def test_excitation_expansion_matches_dense(element, fermionic):
    strings = expand_excitation(element, fermionic)
    got = dense_from_strings(4, strings)
    i, j, k, l = element
    want = excitation_dense(4, i, j, k, l, fermionic)
    assert np.allclose(got, want, atol=1e-12)


@pytest.mark.parametrize("amp", [0.8, 0.3j, 0.5 - 0.2j])
def test_generator_expansion_is_antihermitian(amp):
    element = (0, 1, 2, 3)
    strings = expand_generator(element, amp, True)
    got = dense_from_strings(4, strings)
    e = excitation_dense(4, 0, 1, 2, 3, True)
    want = amp * e - np.conj(amp) * e.conj().T
    assert np.allclose(got, want, atol=1e-12)
    assert np.abs(got + got.conj().T).max() < 1e-12


def test_generator_string_census_by_amplitude_phase():
    element = (0, 1, 2, 3)
    real = expand_generator(element, 1.0, True)
    imag = expand_generator(element, 1.0j, True)
    both = expand_generator(element, 1.0 + 1.0j, True)
    assert len(real) == 8 and all(y_parity(x, z) == 1 for x, z in real)
    assert len(imag) == 8 and all(y_parity(x, z) == 0 for x, z in imag)
    assert len(both) == 16


def test_diagonal_generator_is_z_only():
    strings = expand_generator((0, 2, 0, 2), 0.7j, True)
    assert strings and all(x == 0 for x, _ in strings)
    got = dense_from_strings(4, strings)
    assert np.abs(got - np.diag(got.diagonal())).max() == 0.0


def test_weight_and_parity_helpers():
    assert string_weight(0b101, 0b001) == 2
    assert string_weight(0, 0b1100) == 2
    assert string_weight(0, 0) == 0
    assert y_parity(0b11, 0b01) == 1
    assert y_parity(0b11, 0b11) == 0
    assert y_parity(0b1, 0b10) == 0


@pytest.mark.parametrize("n", [4, 6, 8])
def test_canonical_elements_match_stored_count(n):
    elements = list(canonical_sz_elements(n))
    assert len(elements) == count_rdm2_canonical(n)
    assert len(set(elements)) == len(elements)
    for i, j, k, l in elements:
        assert i < j and k < l and (i, j) <= (k, l)


def test_target_string_counts():
    # the tails permute strings element by element without changing the
    # union size, so both A targets count the same; the real-state 2-RDM
    # keeps only the even-Y half
    for n, a_count in ((4, 40), (6, 264), (8, 944)):
        for target in ("EncodedA", "UnencodedA"):
            xs, zs = target_strings(n, target)
            assert len(xs) == a_count
        xs, _ = target_strings(n, "EncodedRdm2")
        assert len(xs) == a_count // 2


@pytest.mark.parametrize("target", TARGETS)
def test_target_strings_are_sorted_unique_nontrivial(target):
    xs, zs = target_strings(6, target)
    keys = list(zip(xs.tolist(), zs.tolist()))
    assert keys == sorted(set(keys))
    assert all(x != 0 for x, _ in keys)
    if target.endswith("Rdm2"):
        assert all(y_parity(int(x), int(z)) == 0 for x, z in keys)


def test_unknown_target_rejected():
    with pytest.raises(ValueError):
        target_strings(4, "EncodedB")


def test_encoded_strings_carry_tails():
    # parity tails cancel pairwise between ladder sites, so they only add
    # weight on qubits crossed by an odd number of intervals: (0,4,2,6)
    # leaves bare Z on qubits 1 and 5, while adjacent pairs cancel fully
    enc = expand_excitation((0, 4, 2, 6), True)
    bare = expand_excitation((0, 4, 2, 6), False)
    assert {string_weight(x, z) for x, z in enc} == {6}
    assert {string_weight(x, z) for x, z in bare} == {4}
    adj_enc = expand_excitation((0, 1, 4, 5), True)
    adj_bare = expand_excitation((0, 1, 4, 5), False)
    assert {string_weight(x, z) for x, z in adj_enc} == {4}
    assert {string_weight(x, z) for x, z in adj_bare} == {4}
