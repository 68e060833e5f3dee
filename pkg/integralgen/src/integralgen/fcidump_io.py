"""FCIDUMP writing with 8-fold symmetry reduction."""

import numpy as np


def write_fcidump(path, h, eri, e_core, n_elec, ms2, threshold=1e-12):
    """Write chemist-notation integrals; 1-based indices, &FCI namelist."""
    norb = h.shape[0]
    lines = [
        f"&FCI NORB={norb},NELEC={n_elec},MS2={ms2},",
        "  ORBSYM=" + "1," * norb,
        "  ISYM=1,",
        "&END",
    ]

    def emit(value, i, j, k, l):
        lines.append(f"{value:23.16E} {i:4d} {j:4d} {k:4d} {l:4d}")

    for i in range(norb):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(i + 1):
                for l in range(k + 1):
                    kl = k * (k + 1) // 2 + l
                    if kl > ij:
                        continue
                    v = eri[i, j, k, l]
                    if abs(v) > threshold:
                        emit(v, i + 1, j + 1, k + 1, l + 1)
    for i in range(norb):
        for j in range(i + 1):
            if abs(h[i, j]) > threshold:
                emit(h[i, j], i + 1, j + 1, 0, 0)
    emit(e_core, 0, 0, 0, 0)

    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
