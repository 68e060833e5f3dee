"""Pauli-string expansions of pair excitations, encoded and bare.

A string is canonically X^x Z^z with bit masks (x, z) and a complex
coefficient; the letter on qubit q is X for an x bit, Z for a z bit, and
Y where both are set (the i factor of Y = iXZ lives in the coefficient).
Jordan-Wigner ladder operators carry Z tails below their site; the
qubit-particle (unencoded) forms are the same raising and lowering
operators with the tails dropped.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np

__all__ = [
    "expand_excitation",
    "expand_generator",
    "string_weight",
    "y_parity",
    "canonical_sz_elements",
    "target_strings",
    "TARGETS",
]


def _ladder_terms(p: int, create: bool, fermionic: bool):
    """sigma+ = (X + XZ)/2, sigma- = (X - XZ)/2, with an optional Z tail."""
    tail = (1 << p) - 1 if fermionic else 0
    x = 1 << p
    s = 0.5 if create else -0.5
    return ((x, tail, 0.5), (x, tail | x, s))


def _multiply(acc, terms):
    """Multiply every accumulated string by every term of one factor."""
    out = {}
    for (x1, z1), c1 in acc.items():
        for x2, z2, c2 in terms:
            phase = -1.0 if (int(z1 & x2).bit_count() & 1) else 1.0
            key = (x1 ^ x2, z1 ^ z2)
            out[key] = out.get(key, 0.0) + c1 * c2 * phase
    return {k: v for k, v in out.items() if abs(v) > 1e-14}


@lru_cache(maxsize=None)
def expand_excitation(element: tuple, fermionic: bool):
    """{(x, z): coeff} for a+_i a+_j a_l a_k."""
    i, j, k, l = element
    acc = {(0, 0): 1.0}
    for p, create in ((i, True), (j, True), (l, False), (k, False)):
        acc = _multiply(acc, _ladder_terms(p, create, fermionic))
    return acc


@lru_cache(maxsize=None)
def expand_generator(element: tuple, amp: complex, fermionic: bool):
    """Strings of amp G - conj(amp) G+ (diagonal: amp G alone)."""
    i, j, k, l = element
    acc = {}
    for key, c in expand_excitation(element, fermionic).items():
        acc[key] = acc.get(key, 0.0) + amp * c
    if (i, j) != (k, l):
        for key, c in expand_excitation((k, l, i, j), fermionic).items():
            acc[key] = acc.get(key, 0.0) - np.conj(amp) * np.conj(c)
    return {k: v for k, v in acc.items() if abs(v) > 1e-14}


def string_weight(x: int, z: int) -> int:
    return int(x | z).bit_count()


def y_parity(x: int, z: int) -> int:
    return int(x & z).bit_count() & 1


def canonical_sz_elements(n_qubits: int):
    """Canonical element pairs (i<j, k<l, (i,j) <= (k,l)) conserving Sz."""
    pairs = list(combinations(range(n_qubits), 2))

    def sz(pair):
        return sum(1 if q % 2 == 0 else -1 for q in pair)

    for a, bra in enumerate(pairs):
        for ket in pairs[a:]:
            if sz(bra) == sz(ket):
                yield bra + ket


# Measurement targets.  The residual targets need real and imaginary parts
# of every transition element (the auxiliary states are complex), so both
# Y parities appear; the ground-state 2-RDM of a real Hamiltonian is real,
# which strikes the odd-Y strings.  Z-only strings form the single shared
# diagonal measurement basis and are not counted as graph vertices.
TARGETS = ("EncodedA", "UnencodedA", "EncodedRdm2")


def target_strings(n_qubits: int, target: str):
    """Sorted (x, z) mask arrays of the strings a target tensor needs."""
    if target not in TARGETS:
        raise ValueError(f"unknown measurement target {target!r}")
    fermionic = target.startswith("Encoded")
    even_y_only = target.endswith("Rdm2")
    found = set()
    for element in canonical_sz_elements(n_qubits):
        for (x, z) in expand_excitation(element, fermionic):
            if x == 0:
                continue
            if even_y_only and y_parity(x, z):
                continue
            found.add((x, z))
    ordered = sorted(found)
    xs = np.array([f[0] for f in ordered], dtype=np.uint64)
    zs = np.array([f[1] for f in ordered], dtype=np.uint64)
    return xs, zs
