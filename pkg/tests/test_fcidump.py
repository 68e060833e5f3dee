import numpy as np
import pytest

from cqesim.fcidump import FcidumpError, IntegralSet, parse_fcidump

from conftest import load_case

HEADER = "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n"


def test_core_only_file():
    ints = parse_fcidump(HEADER + " 0.7137 0 0 0 0\n")
    assert ints.core_energy == pytest.approx(0.7137, abs=0)
    assert not ints.h1.any()
    assert not ints.eri.any()
    assert ints.n_spatial == 2 and ints.n_electrons == 2


def test_slash_terminator_and_d_exponent():
    text = "&FCI NORB=1,NELEC=2,MS2=0\n/\n-1.25D+00 1 1 0 0\n"
    ints = parse_fcidump(text)
    assert ints.h1[0, 0] == pytest.approx(-1.25, abs=0)


def test_namelist_fields_and_orbsym():
    text = "&FCI NORB=3, NELEC=4, MS2=2, ORBSYM=1,1,1, ISYM=1,\n&END\n 0.0 0 0 0 0\n"
    ints = parse_fcidump(text)
    assert ints.ms2 == 2
    assert ints.orbsym == (1, 1, 1)


def test_eightfold_expansion():
    ints = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n 0.33 1 2 1 1\n")
    v = ints.eri
    for idx in [(0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0)]:
        assert v[idx] == pytest.approx(0.33, abs=0)
    assert np.count_nonzero(v) == 4


def test_one_electron_symmetrized():
    ints = parse_fcidump(HEADER + " 0.5 2 1 0 0\n")
    assert ints.h1[0, 1] == ints.h1[1, 0] == pytest.approx(0.5, abs=0)


def test_bytes_input():
    ints = parse_fcidump((HEADER + " 1.0 0 0 0 0\n").encode())
    assert ints.core_energy == 1.0


@pytest.mark.parametrize(
    "text",
    [
        "&FCI NORB=2,NELEC=2,MS2=0,\n",  # never terminated
        "&FCI NELEC=2,MS2=0,\n&END\n",  # missing NORB
        HEADER + " 1.0 1 2 3\n",  # short record
        HEADER + " 1.0 1 0 1 1\n",  # zero inside a 4-index record
        HEADER + " 1.0 3 1 1 1\n",  # index out of range
        HEADER + " abc 1 1 0 0\n",  # non-numeric value
        HEADER + " 1.0 1 2 1 1\n 2.0 2 1 1 1\n",  # conflicting duplicates
    ],
)
def test_malformed_inputs(text):
    with pytest.raises(FcidumpError):
        parse_fcidump(text)


def test_consistent_duplicate_allowed():
    ints = parse_fcidump(HEADER + " 1.0 1 2 1 1\n 1.0 2 1 1 1\n")
    assert ints.eri[0, 1, 0, 0] == 1.0


def test_integralset_rejects_asymmetric_h1():
    with pytest.raises(ValueError):
        IntegralSet(
            n_spatial=2,
            n_electrons=2,
            ms2=0,
            core_energy=0.0,
            h1=np.array([[0.0, 1.0], [0.0, 0.0]]),
            eri=np.zeros((2, 2, 2, 2)),
        )


def test_fixture_roundtrip_validates():
    ints, ref = load_case("h2")
    assert ints.n_spatial == 2
    assert ints.n_electrons == 2
    assert ints.ms2 == 0
    # validated 8-fold symmetry on construction; spot check one value
    assert abs(ints.eri[0, 0, 0, 0]) > 0.1
    assert ref["basis"] == "STO-3G"
