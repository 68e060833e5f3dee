"""Numpy implementation of the statevector hot kernels.

The compiled extension cqesim._kernels exports the same entry points;
cqesim._backend picks one at import time.  Statevectors are dense
complex128 arrays indexed by occupation bitstrings (bit q of the array
index is the occupation of spin orbital q).

The elementary operator throughout is the pair excitation

    G(i, j, k, l) = a+_i a+_j a_l a_k

with creators (i, j) and annihilators (k, l).  In the fermionic case the
ladder operators carry Jordan-Wigner parity signs; in the qubit-particle
case they are bare raising and lowering operators and every sign is +1.
"""

import numpy as np

__all__ = [
    "excitation_context",
    "expectation",
    "accumulate",
    "apply_givens",
    "apply_phase",
    "qwc_degrees",
]

BACKEND = "numpy"


def excitation_context(n_qubits, i, j, k, l, fermionic=True):
    """Tabulate the action of G(i, j, k, l) on the full basis.

    Returns (sources, targets, signs): the operator maps basis state
    sources[m] to signs[m] * targets[m] and annihilates everything else.
    The map is a bijection between disjoint source and target sets,
    except for diagonal elements (i, j) == (k, l) where G = n_i n_j and
    targets coincide with sources.
    """
    if i == j or k == l:
        raise ValueError("pair indices must be distinct")
    if not (0 <= min(i, j, k, l) and max(i, j, k, l) < n_qubits):
        raise ValueError("orbital index out of range")
    src = np.arange(1 << n_qubits, dtype=np.uint64)
    cur = src
    par = np.zeros(src.size, dtype=np.uint64)
    # apply a_k, a_l, a+_j, a+_i in sequence; parity counts set bits below
    # the active orbital before each flip
    for q, create in ((k, False), (l, False), (j, True), (i, True)):
        bit = np.uint64(1 << q)
        keep = ((cur & bit) == 0) if create else ((cur & bit) != 0)
        src, cur, par = src[keep], cur[keep], par[keep]
        if fermionic:
            par += np.bitwise_count(cur & np.uint64((1 << q) - 1))
        cur = cur ^ bit
    signs = np.where(par & np.uint64(1), -1.0, 1.0)
    return src.astype(np.intp), cur.astype(np.intp), signs


def expectation(bra, ket, src, tgt, signs):
    """<bra| G |ket> for a tabulated excitation."""
    return complex(np.sum(signs * np.conj(bra[tgt]) * ket[src]))


def accumulate(out, psi, src, tgt, signs, coeff):
    """out += coeff * G psi.  Safe because targets are distinct."""
    out[tgt] += (coeff * signs) * psi[src]


def apply_givens(psi, src, tgt, signs, amp):
    """In-place psi <- exp(amp G - conj(amp) G+) psi, off-diagonal G.

    Exact: G restricted to span{source, target} squares to -|amp|^2 times
    the identity, so the exponential is a plane rotation on each pair.
    """
    r = abs(amp)
    if r == 0.0:
        return
    c = np.cos(r)
    u = (amp / r) * np.sin(r)
    a = psi[src]
    b = psi[tgt]
    psi[src] = c * a - np.conj(u) * (signs * b)
    psi[tgt] = c * b + u * (signs * a)


def apply_phase(psi, idx, amp):
    """In-place psi <- exp(amp n_i n_j) psi on the tabulated support."""
    psi[idx] *= np.exp(amp)


def qwc_degrees(xs, zs):
    """Qubit-wise-commutation degree of each Pauli string.

    Strings are (x, z) uint64 mask pairs; two strings are compatible when
    their letters agree on every shared support qubit.  Row blocks keep
    the broadcast temporaries at a fixed memory footprint.
    """
    n = xs.shape[0]
    deg = np.zeros(n, dtype=np.int64)
    support = xs | zs
    block = max(1, (1 << 22) // max(n, 1))
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        ov = support[lo:hi, None] & support[None, :]
        ok = ((xs[lo:hi, None] ^ xs[None, :]) & ov) == 0
        ok &= ((zs[lo:hi, None] ^ zs[None, :]) & ov) == 0
        deg[lo:hi] = ok.sum(axis=1) - 1  # drop self-compatibility
    return deg
