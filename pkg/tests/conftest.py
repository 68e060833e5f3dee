import json
from functools import lru_cache
from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@lru_cache(maxsize=None)
def load_case(name):
    """(IntegralSet, reference dict) for a committed FCIDUMP fixture."""
    from cqesim.fcidump import load_fcidump

    ints = load_fcidump(FIXTURES / name / "FCIDUMP")
    ref = json.loads((FIXTURES / name / "reference.json").read_text())
    return ints, ref


@lru_cache(maxsize=None)
def load_hamiltonian(name):
    from cqesim.hamiltonian import build_reduced_hamiltonian

    ints, ref = load_case(name)
    return build_reduced_hamiltonian(ints), ref


@pytest.fixture
def fixtures_dir():
    return FIXTURES
