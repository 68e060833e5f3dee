"""FCIDUMP reader (Molpro text convention).

The header is a Fortran namelist starting with &FCI and closed by &END or
a bare /.  Records that follow are "value i j k l" with 1-based spatial
indices: four nonzero indices give a two-electron integral in chemist
notation (ij|kl), "value i j 0 0" a one-electron integral, and
"value 0 0 0 0" the scalar core energy.  Permutational symmetry is
implied, unlisted integrals are zero.
"""

import re
from dataclasses import dataclass, field

import numpy as np

__all__ = ["IntegralSet", "FcidumpError", "parse_fcidump", "load_fcidump"]


class FcidumpError(ValueError):
    pass


@dataclass
class IntegralSet:
    """Spatial-orbital integrals of a molecular Hamiltonian in Hartree.

    eri carries the full 8-fold permutational symmetry; orbsym is parsed
    and stored but never interpreted.
    """

    n_spatial: int
    n_electrons: int
    ms2: int
    core_energy: float
    h1: np.ndarray
    eri: np.ndarray
    orbsym: tuple = field(default=())

    def __post_init__(self):
        r = self.n_spatial
        if self.h1.shape != (r, r) or self.eri.shape != (r, r, r, r):
            raise FcidumpError("integral array shapes do not match NORB")
        if not np.allclose(self.h1, self.h1.T, atol=1e-12):
            raise FcidumpError("one-electron matrix is not symmetric")
        for axes in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if not np.allclose(self.eri, self.eri.transpose(axes), atol=1e-12):
                raise FcidumpError("two-electron tensor breaks 8-fold symmetry")

    @property
    def n_spin_orbitals(self) -> int:
        return 2 * self.n_spatial


_INT_KEYS = {"NORB", "NELEC", "MS2", "ISYM"}


def _parse_namelist(header: str) -> dict:
    body = header.strip()
    if not body.upper().startswith("&FCI"):
        raise FcidumpError("missing &FCI namelist")
    body = body[4:]
    fields = {}
    # KEY=val[,val...] groups; values may spill across lines
    for m in re.finditer(r"([A-Za-z0-9_]+)\s*=\s*([^=]*?)(?=[A-Za-z0-9_]+\s*=|$)", body, re.S):
        key = m.group(1).upper()
        raw = [tok for tok in re.split(r"[,\s]+", m.group(2).strip()) if tok]
        if key in _INT_KEYS:
            if len(raw) != 1:
                raise FcidumpError(f"{key} expects a single integer")
            fields[key] = int(raw[0])
        elif key == "ORBSYM":
            fields[key] = tuple(int(t) for t in raw)
        else:
            fields[key] = tuple(raw)
    return fields


def parse_fcidump(text) -> IntegralSet:
    """Parse FCIDUMP content given as str or bytes."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    m = re.search(r"(&END|/)", text, re.I)
    if m is None:
        raise FcidumpError("namelist is never terminated")
    fields = _parse_namelist(text[: m.start()])
    if "NORB" not in fields or "NELEC" not in fields:
        raise FcidumpError("NORB and NELEC are required")
    r = fields["NORB"]
    if r <= 0:
        raise FcidumpError("NORB must be positive")

    h1 = np.zeros((r, r))
    eri = np.zeros((r, r, r, r))
    core = 0.0
    seen: dict[tuple, float] = {}

    def record(key, v, lineno):
        old = seen.get(key)
        if old is not None and abs(old - v) > 1e-12:
            raise FcidumpError(f"record {lineno}: conflicts with earlier entry for {key}")
        seen[key] = v
    for lineno, line in enumerate(text[m.end():].splitlines(), 1):
        toks = line.split()
        if not toks:
            continue
        if len(toks) != 5:
            raise FcidumpError(f"record {lineno}: expected 'value i j k l'")
        try:
            v = float(toks[0].replace("D", "E").replace("d", "e"))
            i, j, k, l = (int(t) for t in toks[1:])
        except ValueError as exc:
            raise FcidumpError(f"record {lineno}: {exc}") from None
        if min(i, j, k, l) < 0 or max(i, j, k, l) > r:
            raise FcidumpError(f"record {lineno}: index out of range")
        if i == 0 and j == 0 and k == 0 and l == 0:
            record((0,), v, lineno)
            core = v
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise FcidumpError(f"record {lineno}: bad one-electron indices")
            record((min(i, j), max(i, j)), v, lineno)
            h1[i - 1, j - 1] = h1[j - 1, i - 1] = v
        elif min(i, j, k, l) == 0:
            raise FcidumpError(f"record {lineno}: bad index pattern")
        else:
            bra, ket = (min(i, j), max(i, j)), (min(k, l), max(k, l))
            record((min(bra, ket), max(bra, ket)), v, lineno)
            a, b, c, d = i - 1, j - 1, k - 1, l - 1
            for p, q, s, t in (
                (a, b, c, d), (b, a, c, d), (a, b, d, c), (b, a, d, c),
                (c, d, a, b), (d, c, a, b), (c, d, b, a), (d, c, b, a),
            ):
                eri[p, q, s, t] = v

    return IntegralSet(
        n_spatial=r,
        n_electrons=fields["NELEC"],
        ms2=fields.get("MS2", 0),
        core_energy=core,
        h1=h1,
        eri=eri,
        orbsym=fields.get("ORBSYM", ()),
    )


def load_fcidump(path) -> IntegralSet:
    with open(path, "rb") as fh:
        return parse_fcidump(fh.read())
