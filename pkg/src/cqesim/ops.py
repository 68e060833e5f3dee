"""Statevector actions of pair excitations and two-body tensors.

Contexts (source, target, sign tables) are cached per element and orbital
count, so repeated applications during an optimization pay the basis
enumeration once.
"""

from functools import lru_cache

import numpy as np

from . import _backend as bk
from .states import num_qubits_of
from .tensors import TwoBodyTensor, pair_table

__all__ = [
    "context",
    "apply_excitation",
    "excitation_expectation",
    "rotate_element",
    "apply_tensor",
    "tensor_expectation",
    "trotter_rotate",
    "trotter_order",
]


@lru_cache(maxsize=None)
def context(n_qubits: int, i: int, j: int, k: int, l: int, fermionic: bool):
    src, tgt, signs = bk.excitation_context(n_qubits, i, j, k, l, fermionic)
    for a in (src, tgt, signs):
        a.setflags(write=False)
    return src, tgt, signs


def apply_excitation(psi: np.ndarray, element, fermionic: bool = True) -> np.ndarray:
    """a+_i a+_j a_l a_k |psi> for element = (i, j, k, l)."""
    i, j, k, l = element
    src, tgt, signs = context(num_qubits_of(psi), i, j, k, l, fermionic)
    out = np.zeros_like(psi)
    bk.accumulate(out, psi, src, tgt, signs, 1.0)
    return out


def excitation_expectation(bra: np.ndarray, ket: np.ndarray, element, fermionic: bool = True) -> complex:
    i, j, k, l = element
    src, tgt, signs = context(num_qubits_of(ket), i, j, k, l, fermionic)
    return bk.expectation(bra, ket, src, tgt, signs)


def rotate_element(psi: np.ndarray, element, amp: complex, fermionic: bool = True) -> None:
    """In-place psi <- exp(amp G - conj(amp) G+) psi for a canonical element.

    Diagonal elements (i, j) == (k, l) represent a single n_i n_j term in
    an operator sum, so only exp(amp n_i n_j) is applied; unitarity then
    requires a purely imaginary amp, which the callers guarantee.
    """
    i, j, k, l = element
    src, tgt, signs = context(num_qubits_of(psi), i, j, k, l, fermionic)
    if (i, j) == (k, l):
        bk.apply_phase(psi, src, amp)
    else:
        bk.apply_givens(psi, src, tgt, signs, amp)


def apply_tensor(psi: np.ndarray, tensor: TwoBodyTensor) -> np.ndarray:
    """Full operator action, summing every nonzero pair-matrix entry."""
    n = tensor.n_qubits
    pairs, _ = pair_table(n)
    out = np.zeros_like(psi)
    rows, cols = np.nonzero(tensor.mat)
    for r, c in zip(rows, cols):
        i, j = pairs[r]
        k, l = pairs[c]
        src, tgt, signs = context(n, int(i), int(j), int(k), int(l), tensor.fermionic)
        bk.accumulate(out, psi, src, tgt, signs, tensor.mat[r, c])
    return out


def tensor_expectation(psi: np.ndarray, tensor: TwoBodyTensor) -> complex:
    n = tensor.n_qubits
    pairs, _ = pair_table(n)
    rows, cols = np.nonzero(tensor.mat)
    acc = 0.0 + 0.0j
    for r, c in zip(rows, cols):
        i, j = pairs[r]
        k, l = pairs[c]
        src, tgt, signs = context(n, int(i), int(j), int(k), int(l), tensor.fermionic)
        acc += tensor.mat[r, c] * bk.expectation(psi, psi, src, tgt, signs)
    return acc


def trotter_order(tensor: TwoBodyTensor, by_magnitude: bool = False):
    """Upper-triangle (row, col) factor order for a Trotter product.

    Canonical order is ascending lexicographic over pair indices; the
    magnitude order sorts by descending coefficient modulus with
    lexicographic tie-breaking.
    """
    m = tensor.mat
    rows, cols = np.nonzero(np.triu(np.abs(m)) != 0.0)
    if by_magnitude:
        mags = np.abs(m[rows, cols])
        # stable sort on lex key first, then on -|amp|
        order = np.lexsort((cols, rows, -mags))
        rows, cols = rows[order], cols[order]
    return list(zip(rows.tolist(), cols.tolist()))


def trotter_rotate(psi, tensor: TwoBodyTensor, scale: complex = 1.0, order=None, reverse: bool = False) -> None:
    """In-place first-order Trotter product for exp(scale * T).

    scale * T must be anti-Hermitian so each factor is unitary: either an
    anti-Hermitian tensor with real scale, or a Hermitian tensor with an
    imaginary scale.  Each upper-triangle entry is fused with its
    conjugate-transpose partner into one exact pair rotation.  The exact
    inverse of trotter_rotate(psi, T, s) is trotter_rotate(psi, T, -s,
    reverse=True).
    """
    n = tensor.n_qubits
    pairs, _ = pair_table(n)
    if order is None:
        order = trotter_order(tensor)
    if reverse:
        order = list(reversed(order))
    for r, c in order:
        amp = scale * tensor.mat[r, c]
        if amp == 0.0:
            continue
        i, j = pairs[r]
        k, l = pairs[c]
        rotate_element(psi, (int(i), int(j), int(k), int(l)), amp, tensor.fermionic)
