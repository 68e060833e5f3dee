"""McMurchie-Davidson molecular integrals over contracted Cartesian Gaussians.

One- and two-electron integrals are assembled from Hermite expansion
coefficients and Hermite Coulomb integrals; the Boys function comes from
the confluent hypergeometric representation.  Loops run over contracted
functions directly, which is adequate for the minimal-basis systems this
package targets.
"""

from functools import lru_cache

import numpy as np
from scipy.special import hyp1f1

from .basis import ContractedGaussian, nuclear_charges


def boys(n: int, x: float) -> float:
    return float(hyp1f1(n + 0.5, n + 1.5, -x)) / (2.0 * n + 1.0)


def _E(i: int, j: int, t: int, Q: float, a: float, b: float) -> float:
    """Hermite expansion coefficient for a 1D Gaussian product."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return float(np.exp(-q * Q * Q))
    if j == 0:
        return (
            _E(i - 1, j, t - 1, Q, a, b) / (2.0 * p)
            - (q * Q / a) * _E(i - 1, j, t, Q, a, b)
            + (t + 1) * _E(i - 1, j, t + 1, Q, a, b)
        )
    return (
        _E(i, j - 1, t - 1, Q, a, b) / (2.0 * p)
        + (q * Q / b) * _E(i, j - 1, t, Q, a, b)
        + (t + 1) * _E(i, j - 1, t + 1, Q, a, b)
    )


def _overlap_prim(a, lmn1, A, b, lmn2, B) -> float:
    s = 1.0
    for d in range(3):
        s *= _E(lmn1[d], lmn2[d], 0, A[d] - B[d], a, b)
    return s * (np.pi / (a + b)) ** 1.5


def _kinetic_prim(a, lmn1, A, b, lmn2, B) -> float:
    # assemble from overlaps with shifted angular momentum on the ket
    l2, m2, n2 = lmn2

    def bump(idx, step):
        l = list(lmn2)
        l[idx] += step
        return tuple(l)

    term0 = b * (2 * (l2 + m2 + n2) + 3) * _overlap_prim(a, lmn1, A, b, lmn2, B)
    term1 = -2.0 * b**2 * (
        _overlap_prim(a, lmn1, A, b, bump(0, 2), B)
        + _overlap_prim(a, lmn1, A, b, bump(1, 2), B)
        + _overlap_prim(a, lmn1, A, b, bump(2, 2), B)
    )
    term2 = -0.5 * (
        l2 * (l2 - 1) * _overlap_prim(a, lmn1, A, b, bump(0, -2), B)
        + m2 * (m2 - 1) * _overlap_prim(a, lmn1, A, b, bump(1, -2), B)
        + n2 * (n2 - 1) * _overlap_prim(a, lmn1, A, b, bump(2, -2), B)
    )
    return term0 + term1 + term2


def _R(t, u, v, n, p, PC, cache):
    """Hermite Coulomb integral R^n_{tuv}."""
    if t < 0 or u < 0 or v < 0:
        return 0.0
    key = (t, u, v, n)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if t == u == v == 0:
        val = (-2.0 * p) ** n * boys(n, p * float(PC @ PC))
    elif t > 0:
        val = (t - 1) * _R(t - 2, u, v, n + 1, p, PC, cache) + PC[0] * _R(
            t - 1, u, v, n + 1, p, PC, cache
        )
    elif u > 0:
        val = (u - 1) * _R(t, u - 2, v, n + 1, p, PC, cache) + PC[1] * _R(
            t, u - 1, v, n + 1, p, PC, cache
        )
    else:
        val = (v - 1) * _R(t, u, v - 2, n + 1, p, PC, cache) + PC[2] * _R(
            t, u, v - 1, n + 1, p, PC, cache
        )
    cache[key] = val
    return val


def _nuclear_prim(a, lmn1, A, b, lmn2, B, C) -> float:
    p = a + b
    P = (a * A + b * B) / p
    PC = P - C
    cache: dict = {}
    val = 0.0
    for t in range(lmn1[0] + lmn2[0] + 1):
        et = _E(lmn1[0], lmn2[0], t, A[0] - B[0], a, b)
        for u in range(lmn1[1] + lmn2[1] + 1):
            eu = _E(lmn1[1], lmn2[1], u, A[1] - B[1], a, b)
            for v in range(lmn1[2] + lmn2[2] + 1):
                ev = _E(lmn1[2], lmn2[2], v, A[2] - B[2], a, b)
                val += et * eu * ev * _R(t, u, v, 0, p, PC, cache)
    return 2.0 * np.pi / p * val


def _eri_prim(a, lmn1, A, b, lmn2, B, c, lmn3, C, d, lmn4, D) -> float:
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    P = (a * A + b * B) / p
    Q = (c * C + d * D) / q
    PQ = P - Q
    cache: dict = {}

    e1 = [
        [_E(lmn1[dim], lmn2[dim], t, A[dim] - B[dim], a, b) for t in range(lmn1[dim] + lmn2[dim] + 1)]
        for dim in range(3)
    ]
    e2 = [
        [_E(lmn3[dim], lmn4[dim], t, C[dim] - D[dim], c, d) for t in range(lmn3[dim] + lmn4[dim] + 1)]
        for dim in range(3)
    ]

    val = 0.0
    for t, et in enumerate(e1[0]):
        for u, eu in enumerate(e1[1]):
            for v, ev in enumerate(e1[2]):
                w1 = et * eu * ev
                if w1 == 0.0:
                    continue
                for tau, ft in enumerate(e2[0]):
                    for nu, fu in enumerate(e2[1]):
                        for phi, fv in enumerate(e2[2]):
                            w2 = ft * fu * fv
                            if w2 == 0.0:
                                continue
                            sign = -1.0 if (tau + nu + phi) % 2 else 1.0
                            val += w1 * w2 * sign * _R(
                                t + tau, u + nu, v + phi, 0, alpha, PQ, cache
                            )
    return val * 2.0 * np.pi**2.5 / (p * q * np.sqrt(p + q))


def _contract2(f, g1: ContractedGaussian, g2: ContractedGaussian, *extra) -> float:
    val = 0.0
    for a, ca in zip(g1.exps, g1.coefs):
        for b, cb in zip(g2.exps, g2.coefs):
            val += ca * cb * f(a, g1.lmn, g1.center, b, g2.lmn, g2.center, *extra)
    return val


def normalize_contractions(basis: list[ContractedGaussian]) -> None:
    for g in basis:
        s = _contract2(_overlap_prim, g, g)
        g.coefs = g.coefs / np.sqrt(s)


def overlap_matrix(basis) -> np.ndarray:
    n = len(basis)
    S = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            S[i, j] = S[j, i] = _contract2(_overlap_prim, basis[i], basis[j])
    return S


def kinetic_matrix(basis) -> np.ndarray:
    n = len(basis)
    T = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            T[i, j] = T[j, i] = _contract2(_kinetic_prim, basis[i], basis[j])
    return T


def nuclear_matrix(basis, geometry) -> np.ndarray:
    charges, coords = nuclear_charges(geometry)
    n = len(basis)
    V = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            val = 0.0
            for z, C in zip(charges, coords):
                val -= z * _contract2(_nuclear_prim, basis[i], basis[j], C)
            V[i, j] = V[j, i] = val
    return V


def eri_tensor(basis) -> np.ndarray:
    """Chemist-notation two-electron integrals (ij|kl), 8-fold symmetric."""
    n = len(basis)
    eri = np.zeros((n, n, n, n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1)]
    for a, (i, j) in enumerate(pairs):
        for i2, j2 in pairs[: a + 1]:
            g1, g2, g3, g4 = basis[i], basis[j], basis[i2], basis[j2]
            val = 0.0
            for e1, c1 in zip(g1.exps, g1.coefs):
                for e2, c2 in zip(g2.exps, g2.coefs):
                    for e3, c3 in zip(g3.exps, g3.coefs):
                        for e4, c4 in zip(g4.exps, g4.coefs):
                            val += c1 * c2 * c3 * c4 * _eri_prim(
                                e1, g1.lmn, g1.center,
                                e2, g2.lmn, g2.center,
                                e3, g3.lmn, g3.center,
                                e4, g4.lmn, g4.center,
                            )
            for p, q in ((i, j), (j, i)):
                for r, s in ((i2, j2), (j2, i2)):
                    eri[p, q, r, s] = val
                    eri[r, s, p, q] = val
    return eri
