"""Named benchmark systems and fixture generation.

All geometries are in Angstrom.  Hydrogen chains are linear.  The h4
fixture sits at a compact 1.0 spacing and feeds the convergence
benchmarks; its dissociation variants scale that spacing.  The longer
chains (h6 through h12) use a 2.0 spacing, wide enough that only
diagonal and nearest-neighbor orbital products carry two-electron
weight above 1e-6.  That keeps the pivoted Cholesky factor count of
the dumped integrals at two vectors per atom, the regime the resource
benchmarks probe; compact chains pick up second-neighbor products and
inflate the count to roughly three per bond.

The recorded Hartree-Fock energy is the aufbau determinant expectation
over the dumped integrals, so consumers re-deriving it from the
FCIDUMP must agree to numerical precision.
"""

import json
import os
import tempfile
from math import comb

from .fci import determinant_energy, fci_ground_energy
from .fold import fold_active_space, pi_orbital_indices
from .fcidump_io import write_fcidump
from .scf import run_scf

# largest CI dimension we are willing to diagonalize when recording
# reference energies; beyond this fci_energy is recorded as null
_MAX_FCI_DIM = 2500


def _h_chain(n, spacing):
    return [("H", (0.0, 0.0, spacing * i)) for i in range(n)]


def _system_table():
    systems = {}

    def chain(name, n, spacing=1.0):
        systems[name] = {
            "geometry": _h_chain(n, spacing),
            "n_alpha": n // 2,
            "n_beta": n // 2,
            "active": None,
        }

    systems["h2"] = {
        "geometry": [("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 0.74))],
        "n_alpha": 1,
        "n_beta": 1,
        "active": None,
    }
    chain("h4", 4)
    for d in (0.8, 1.25, 1.5, 2.0):
        chain(f"h4_d{d:.2f}", 4, d)
    chain("h6", 6, 2.0)
    chain("h8", 8, 2.0)
    chain("h10", 10, 2.0)
    chain("h12", 12, 2.0)

    systems["hf"] = {
        "geometry": [("H", (0.0, 0.0, 0.0)), ("F", (0.0, 0.0, 0.917))],
        "n_alpha": 5,
        "n_beta": 5,
        "active": None,
    }

    for d in (1.1, 1.2, 1.5):
        systems[f"o2_d{d:.2f}"] = {
            "geometry": [("O", (0.0, 0.0, 0.0)), ("O", (0.0, 0.0, d))],
            "n_alpha": 9,
            "n_beta": 7,
            # pi and pi* shells: two highest doubly occupied plus the two
            # singly occupied orbitals
            "active": {"n_core": 5, "n_orbitals": 4},
        }
    return systems


SYSTEMS = _system_table()


def available_systems():
    return sorted(SYSTEMS)


def generate(name: str, out_dir: str) -> dict:
    """Run SCF (+ optional folding), write FCIDUMP and reference.json.

    Files appear atomically: nothing is left behind if any stage fails.
    """
    spec = SYSTEMS[name]
    scf = run_scf(spec["geometry"], spec["n_alpha"], spec["n_beta"])

    active = spec["active"]
    if active is None:
        n_core = 0
        folded = fold_active_space(scf)
        n_active = folded.h.shape[0]
    else:
        # pi/pi* active space selected by orbital character, with the
        # remaining doubly occupied orbitals folded into the core
        act = pi_orbital_indices(scf, spec["geometry"])
        if len(act) != active["n_orbitals"]:
            raise RuntimeError(f"expected {active['n_orbitals']} pi orbitals, found {act}")
        core = [m for m in range(scf.n_beta) if m not in act]
        n_core = len(core)
        n_active = len(act)
        folded = fold_active_space(scf, core=core, active=act)

    n_elec = folded.n_alpha + folded.n_beta
    ms2 = folded.n_alpha - folded.n_beta

    occ_a = tuple(range(folded.n_alpha))
    occ_b = tuple(range(folded.n_beta))
    hf_energy = folded.e_core + determinant_energy(folded.h, folded.eri, occ_a, occ_b)

    norb = folded.h.shape[0]
    dim = comb(norb, folded.n_alpha) * comb(norb, folded.n_beta)
    fci_energy = None
    if dim <= _MAX_FCI_DIM:
        fci_energy = fci_ground_energy(
            folded.h, folded.eri, folded.n_alpha, folded.n_beta, folded.e_core
        )

    reference = {
        "hf_energy": hf_energy,
        "fci_energy": fci_energy,
        "geometry": [[sym, list(xyz)] for sym, xyz in spec["geometry"]],
        "basis": "STO-3G",
        "active_space": (
            None
            if active is None
            else {
                "n_core": n_core,
                "n_orbitals": n_active,
                "n_electrons": n_elec,
                "ms2": ms2,
            }
        ),
    }

    os.makedirs(out_dir, exist_ok=True)
    tmp = tempfile.mkdtemp(dir=out_dir)
    try:
        write_fcidump(os.path.join(tmp, "FCIDUMP"), folded.h, folded.eri, folded.e_core, n_elec, ms2)
        with open(os.path.join(tmp, "reference.json"), "w") as f:
            json.dump(reference, f, indent=1)
            f.write("\n")
        for fn in ("FCIDUMP", "reference.json"):
            os.replace(os.path.join(tmp, fn), os.path.join(out_dir, fn))
    finally:
        for fn in os.listdir(tmp):
            os.unlink(os.path.join(tmp, fn))
        os.rmdir(tmp)
    return reference
