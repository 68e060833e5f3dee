"""STO-3G basis construction.

STO-3G expands each Slater orbital in three Gaussians whose exponents are
universal least-squares fits scaled by the square of an element-specific
Slater exponent zeta.  Contraction coefficients multiply normalized
primitives, and each contracted function is renormalized numerically.
"""

from dataclasses import dataclass, field

import numpy as np

ANGSTROM_TO_BOHR = 1.0 / 0.52917720859

# universal STO-3G fit parameters for a zeta = 1 Slater function
_BASE_1S_EXPS = np.array([2.227660584, 0.405771156, 0.109818])
_COEF_1S = np.array([0.154328967, 0.535328142, 0.444634542])
_BASE_2SP_EXPS = np.array([0.994203122, 0.231031087, 0.075138628])
_COEF_2S = np.array([-0.099967229, 0.399512826, 0.700115468])
_COEF_2P = np.array([0.155916275, 0.607683719, 0.391957393])

# Slater exponents (zeta1s, zeta2sp) per element symbol
_ZETAS = {
    "H": (1.24, None),
    "He": (1.69, None),
    "C": (5.67, 1.72),
    "N": (6.67, 1.95),
    "O": (7.66, 2.25),
    "F": (8.65, 2.55),
}

ATOMIC_NUMBER = {"H": 1, "He": 2, "C": 6, "N": 7, "O": 8, "F": 9}


@dataclass
class ContractedGaussian:
    """Cartesian contracted Gaussian: sum_k coefs[k] * x^l y^m z^n exp(-exps[k] r^2)."""

    center: np.ndarray
    lmn: tuple[int, int, int]
    exps: np.ndarray
    coefs: np.ndarray
    atom: int = field(default=-1)

    @property
    def l_total(self) -> int:
        return sum(self.lmn)


def _primitive_norm(alpha: float, lmn) -> float:
    lx, ly, lz = lmn
    L = lx + ly + lz
    df = 1.0
    for l in lmn:
        for m in range(2 * l - 1, 0, -2):
            df *= m
    return (2.0 * alpha / np.pi) ** 0.75 * (4.0 * alpha) ** (L / 2.0) / np.sqrt(df)


def _shells_for(symbol: str):
    z1, z2 = _ZETAS[symbol]
    shells = [(0, _BASE_1S_EXPS * z1**2, _COEF_1S)]
    if z2 is not None:
        shells.append((0, _BASE_2SP_EXPS * z2**2, _COEF_2S))
        shells.append((1, _BASE_2SP_EXPS * z2**2, _COEF_2P))
    return shells


def build_basis(geometry) -> list[ContractedGaussian]:
    """Cartesian STO-3G functions for geometry = [(symbol, xyz_angstrom), ...].

    Orbitals are ordered atom by atom, shells in 1s/2s/2p order, and p
    components as x, y, z.
    """
    funcs: list[ContractedGaussian] = []
    for atom_index, (symbol, xyz) in enumerate(geometry):
        center = np.asarray(xyz, dtype=float) * ANGSTROM_TO_BOHR
        for l, exps, coefs in _shells_for(symbol):
            components = [(0, 0, 0)] if l == 0 else [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
            for lmn in components:
                scaled = coefs * np.array([_primitive_norm(a, lmn) for a in exps])
                funcs.append(ContractedGaussian(center, lmn, exps.copy(), scaled, atom_index))
    return funcs


def nuclear_charges(geometry):
    charges = np.array([ATOMIC_NUMBER[sym] for sym, _ in geometry], dtype=float)
    coords = np.array([xyz for _, xyz in geometry], dtype=float) * ANGSTROM_TO_BOHR
    return charges, coords


def nuclear_repulsion(geometry) -> float:
    charges, coords = nuclear_charges(geometry)
    e = 0.0
    for a in range(len(charges)):
        for b in range(a + 1, len(charges)):
            e += charges[a] * charges[b] / np.linalg.norm(coords[a] - coords[b])
    return e
