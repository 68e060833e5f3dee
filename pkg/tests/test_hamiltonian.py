import numpy as np
import pytest
from scipy.linalg import expm

from cqesim.fcidump import IntegralSet
from cqesim.hamiltonian import (
    CholeskyFactorization,
    ReducedHamiltonian,
    apply_one_body,
    aufbau_occupation,
    build_reduced_hamiltonian,
    determinant_energy,
    evolve_auxiliary,
    fci_ground_state,
    hamiltonian_factors,
    hartree_fock_reference,
    pivoted_cholesky,
)
from cqesim.states import CapabilityError, FockState, random_state
from cqesim.tensors import TwoBodyTensor, pair_table

from conftest import load_case, load_hamiltonian
from oracles import excitation_dense


def dense_hamiltonian(ham):
    """Explicit 2^n x 2^n matrix from Kronecker-product ladder operators."""
    n = ham.n_qubits
    pairs, _ = pair_table(n)
    out = ham.core_energy * np.eye(1 << n, dtype=complex)
    rows, cols = np.nonzero(ham.k2.mat)
    for r, c in zip(rows, cols):
        i, j = pairs[r]
        k, l = pairs[c]
        out += ham.k2.mat[r, c] * excitation_dense(n, i, j, k, l, True)
    return out


def toy_integrals(r, n_elec, ms2=0, seed=7, rank=4):
    rng = np.random.default_rng(seed)
    h1 = rng.normal(size=(r, r))
    h1 = 0.5 * (h1 + h1.T)
    # sums of symmetric outer products are PSD with full 8-fold symmetry
    eri = np.zeros((r, r, r, r))
    for _ in range(rank):
        s = rng.normal(size=(r, r))
        s = 0.5 * (s + s.T)
        eri += np.einsum("ij,kl->ijkl", s, s) / (r * r)
    return IntegralSet(
        n_spatial=r,
        n_electrons=n_elec,
        ms2=ms2,
        core_energy=rng.normal(),
        h1=h1,
        eri=eri,
    )


def test_zero_integrals_energy_is_core():
    ints = IntegralSet(2, 2, 0, -0.5, np.zeros((2, 2)), np.zeros((2, 2, 2, 2)))
    ham = build_reduced_hamiltonian(ints)
    assert not ham.k2.mat.any()
    rng = np.random.default_rng(0)
    psi = random_state(4, rng, n_elec=2, sz2=0)
    assert ham.energy(psi) == pytest.approx(-0.5, abs=1e-12)


def test_single_electron_rejected():
    ints = IntegralSet(2, 1, 1, 0.0, np.zeros((2, 2)), np.zeros((2, 2, 2, 2)))
    with pytest.raises(ValueError):
        build_reduced_hamiltonian(ints)


def test_k2_is_hermitian_and_frozen():
    ham, _ = load_hamiltonian("h2")
    assert ham.k2.is_hermitian(1e-12)
    with pytest.raises(ValueError):
        ham.k2.mat[0, 0] = 1.0


@pytest.mark.parametrize("name", ["h2", "h4", "hf", "o2_d1.20"])
def test_hf_determinant_matches_generator(name):
    ham, ref = load_hamiltonian(name)
    occ = aufbau_occupation(ham.integrals)
    assert determinant_energy(ham, occ) == pytest.approx(ref["hf_energy"], abs=1e-8)


def test_determinant_energy_validates_occupation():
    ham, _ = load_hamiltonian("h2")
    with pytest.raises(ValueError):
        determinant_energy(ham, (0,))
    with pytest.raises(ValueError):
        determinant_energy(ham, (0, 0))
    with pytest.raises(ValueError):
        determinant_energy(ham, (0, 99))


def test_energy_three_independent_paths():
    # pair-diagonal sum, full tensor expectation, and the dense oracle
    ham, _ = load_hamiltonian("h2")
    ref = hartree_fock_reference(ham)
    e_diag = determinant_energy(ham, aufbau_occupation(ham.integrals))
    e_expect = ham.energy(ref)
    dense = dense_hamiltonian(ham)
    e_dense = float(np.real(ref.amplitudes.conj() @ dense @ ref.amplitudes))
    assert e_diag == pytest.approx(e_expect, abs=1e-9)
    assert e_dense == pytest.approx(e_expect, abs=1e-9)


def test_apply_matches_dense_oracle():
    ints = toy_integrals(2, 2, seed=3)
    ham = build_reduced_hamiltonian(ints)
    dense = dense_hamiltonian(ham)
    rng = np.random.default_rng(5)
    psi = random_state(4, rng)
    assert np.allclose(ham.apply(psi), dense @ psi, atol=1e-12)


def test_one_body_fold_matches_direct_action():
    # on the N-electron sector the folded k2 must act exactly like h1
    ints = IntegralSet(3, 3, 1, 0.0, toy_integrals(3, 3).h1, np.zeros((3,) * 4))
    ham = build_reduced_hamiltonian(ints)
    rng = np.random.default_rng(11)
    for _ in range(5):
        psi = random_state(6, rng, n_elec=3, sz2=1)
        direct = apply_one_body(psi, ints.h1)
        assert np.allclose(ham.apply(psi), direct, atol=1e-10)


def test_one_body_only_fci_is_orbital_sum():
    ints = IntegralSet(3, 4, 0, 0.25, toy_integrals(3, 4, seed=9).h1, np.zeros((3,) * 4))
    ham = build_reduced_hamiltonian(ints)
    energy, state = fci_ground_state(ham, 4, 0)
    levels = np.linalg.eigvalsh(ints.h1)
    expected = 0.25 + 2.0 * (levels[0] + levels[1])
    assert energy == pytest.approx(expected, abs=1e-10)
    assert state.n_particles == 4


def test_fci_matches_recorded_reference():
    ham, ref = load_hamiltonian("h2")
    energy, _ = fci_ground_state(ham, 2, 0)
    assert energy == pytest.approx(ref["fci_energy"], abs=1e-7)


def test_fci_variational_bound():
    ham, _ = load_hamiltonian("h4")
    energy, state = fci_ground_state(ham, 4, 0)
    resid = ham.apply(state.amplitudes) - energy * state.amplitudes
    assert np.linalg.norm(resid) < 1e-9
    rng = np.random.default_rng(21)
    for _ in range(20):
        psi = random_state(8, rng, n_elec=4, sz2=0)
        assert ham.energy(psi) >= energy - 1e-12


def test_fci_invariant_under_orbital_relabeling():
    ints = toy_integrals(3, 4, seed=13)
    base, _ = fci_ground_state(build_reduced_hamiltonian(ints), 4, 0)
    perm = np.array([2, 0, 1])
    relabeled = IntegralSet(
        n_spatial=3,
        n_electrons=4,
        ms2=0,
        core_energy=ints.core_energy,
        h1=ints.h1[np.ix_(perm, perm)],
        eri=ints.eri[np.ix_(perm, perm, perm, perm)],
    )
    other, _ = fci_ground_state(build_reduced_hamiltonian(relabeled), 4, 0)
    assert other == pytest.approx(base, abs=1e-9)


def test_fci_hubbard_dimer_analytic():
    t, u = 0.6, 2.5
    eri = np.zeros((2, 2, 2, 2))
    eri[0, 0, 0, 0] = eri[1, 1, 1, 1] = u
    ints = IntegralSet(2, 2, 0, 0.0, np.array([[0.0, -t], [-t, 0.0]]), eri)
    energy, _ = fci_ground_state(build_reduced_hamiltonian(ints), 2, 0)
    expected = 0.5 * u - np.sqrt(0.25 * u * u + 4.0 * t * t)
    assert energy == pytest.approx(expected, abs=1e-10)


def test_fci_sector_capability_limit():
    ham, _ = load_hamiltonian("h12")
    with pytest.raises(CapabilityError):
        fci_ground_state(ham, 12, 0)


def test_evolve_delta_zero_identity():
    ham, _ = load_hamiltonian("h2")
    ref = hartree_fock_reference(ham)
    out = evolve_auxiliary(ref, ham, 0.0, "Exact")
    assert out is ref
    outs = evolve_auxiliary(ref, ham, 0.0, "CholeskyFactored")
    assert len(outs) == 1 and outs[0] is ref


def test_evolve_rejects_unknown_method():
    ham, _ = load_hamiltonian("h2")
    with pytest.raises(ValueError):
        evolve_auxiliary(hartree_fock_reference(ham), ham, 0.01, "pade")


def test_evolve_eigenstate_picks_up_pure_phase():
    ham, _ = load_hamiltonian("h2")
    energy, state = fci_ground_state(ham, 2, 0)
    out = evolve_auxiliary(state, ham, 0.05, "Exact")
    expected = np.exp(-0.05j * energy) * state.amplitudes
    assert np.allclose(out.amplitudes, expected, atol=1e-12)


def test_evolve_exact_matches_dense_expm():
    ham, _ = load_hamiltonian("h4")
    ref = hartree_fock_reference(ham)
    dense = dense_hamiltonian(ham)
    for delta in (0.01, 0.3):
        out = evolve_auxiliary(ref, ham, delta, "Exact")
        expected = expm(-1j * delta * dense) @ ref.amplitudes
        assert np.linalg.norm(out.amplitudes - expected) < 1e-12


def test_trotter_first_order_error_scaling():
    ham, _ = load_hamiltonian("h4")
    ref = hartree_fock_reference(ham)

    def err(delta):
        ex = evolve_auxiliary(ref, ham, delta, "Exact")
        tr = evolve_auxiliary(ref, ham, delta, "TrotterFirstOrder")
        return np.linalg.norm(ex.amplitudes - tr.amplitudes)

    ratio = err(0.02) / err(0.01)
    assert 3.5 <= ratio <= 4.5


def test_cholesky_rank_one_recovery():
    rng = np.random.default_rng(3)
    v = rng.normal(size=(3, 3))
    v = 0.5 * (v + v.T)
    eri = np.einsum("ij,kl->ijkl", v, v)
    fac = pivoted_cholesky(eri, 1e-10)
    assert fac.rank == 1
    assert np.allclose(fac.reconstruction(3), eri, atol=1e-10)


def test_cholesky_rejects_indefinite_input():
    v = np.eye(2)
    with pytest.raises(ValueError):
        pivoted_cholesky(-np.einsum("ij,kl->ijkl", v, v), 1e-8)


@pytest.mark.parametrize("name,order", [("h2", 4), ("h4_d2.00", 8)])
def test_cholesky_order_minimal_basis(name, order):
    # hydrogen chains at wide spacing keep one product density per atom
    # plus one per bond, so the two-electron rank is 2n-1 and the factored
    # propagator order 2n
    ints, _ = load_case(name)
    assert pivoted_cholesky(ints.eri, 1e-6).order == order


def test_cholesky_reconstruction_within_threshold():
    ints, _ = load_case("h4")
    for threshold in (1e-4, 1e-6, 1e-10):
        fac = pivoted_cholesky(ints.eri, threshold)
        err = np.abs(fac.reconstruction(ints.n_spatial) - ints.eri).max()
        assert err <= threshold


def test_cholesky_order_monotone_in_threshold():
    ints, _ = load_case("h4")
    thresholds = [1e-2, 1e-4, 1e-6, 1e-8, 1e-12]
    orders = [pivoted_cholesky(ints.eri, t).order for t in thresholds]
    assert orders == sorted(orders)


def test_factored_hamiltonian_energy_identity():
    # core + h~ + 1/2 sum (L_P)^2 must reproduce the packed-tensor energy
    ints, _ = load_case("h4")
    ham = build_reduced_hamiltonian(ints)
    factors = hamiltonian_factors(ints, threshold=1e-12)
    rng = np.random.default_rng(17)
    for _ in range(5):
        psi = random_state(8, rng, n_elec=4, sz2=0)
        acc = factors.core_energy + np.vdot(psi, apply_one_body(psi, factors.one_body))
        for vec in factors.cholesky.vectors:
            lv = apply_one_body(psi, vec)
            acc += 0.5 * np.vdot(lv, lv)
        assert np.real(acc) == pytest.approx(ham.energy(psi), abs=1e-9)
        assert abs(np.imag(acc)) < 1e-9


def test_factored_evolution_state_count_and_norms():
    ham, _ = load_hamiltonian("h2")
    ref = hartree_fock_reference(ham)
    outs = evolve_auxiliary(ref, ham, 0.01, "CholeskyFactored")
    assert len(outs) == hamiltonian_factors(ham.integrals).order
    for st in outs:
        assert np.linalg.norm(st.amplitudes) == pytest.approx(1.0, abs=1e-12)


def test_factored_evolution_matches_exact_for_commuting_pieces():
    # single Cholesky vector plus diagonal one-body: factors commute, so the
    # full propagator is literally the ordered product of the factor maps
    rng = np.random.default_rng(23)
    v = np.diag(rng.uniform(0.5, 1.0, size=2))
    eri = np.einsum("ij,kl->ijkl", v, v)
    h1 = np.diag(rng.uniform(-1.0, 0.0, size=2))
    ints = IntegralSet(2, 2, 0, 0.1, h1, eri)
    ham = build_reduced_hamiltonian(ints)
    psi = random_state(4, rng, n_elec=2, sz2=0)
    state = FockState(psi, 2, 0)
    delta = 0.07
    exact = evolve_auxiliary(state, ham, delta, "Exact")
    factors = hamiltonian_factors(ints, threshold=1e-14)
    product = psi.copy()
    fn_one = lambda val: apply_one_body(val, factors.one_body) + factors.core_energy * val
    from cqesim.hamiltonian import _taylor_expm_apply

    product = _taylor_expm_apply(
        lambda val: -1j * delta * fn_one(val), product, 10.0
    )
    for vec in factors.cholesky.vectors:
        product = _taylor_expm_apply(
            lambda val, vec=vec: -0.5j * delta * apply_one_body(apply_one_body(val, vec), vec),
            product,
            10.0,
        )
    assert np.linalg.norm(product - exact.amplitudes) < 1e-11


def test_reduced_hamiltonian_requires_hermitian_tensor():
    mat = np.zeros((6, 6), dtype=complex)
    mat[0, 1] = 1.0  # no conjugate partner
    with pytest.raises(ValueError):
        ReducedHamiltonian(TwoBodyTensor(4, mat, fermionic=True), 0.0, 2, 0)


def test_cholesky_factorization_vectors_frozen():
    ints, _ = load_case("h2")
    fac = pivoted_cholesky(ints.eri, 1e-6)
    assert isinstance(fac, CholeskyFactorization)
    with pytest.raises(ValueError):
        fac.vectors[0][0, 0] = 2.0
