"""CQE iteration engine.

One iteration measures the residual (the energy gradient along every
canonical pair generator), optionally applies a limited-memory
quasi-Newton correction, prunes small elements, picks a step by a
quadratic trust-region fit, and folds the scaled update into the ansatz
with p-depth merging.  The Hamiltonian is always fermionic; the encoding
only decides whether the generators carry Jordan-Wigner phases (fermion)
or are bare qubit-particle operators (qubit).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import _backend as bk
from .hamiltonian import ReducedHamiltonian, evolve_auxiliary
from .ops import context, excitation_expectation, trotter_order, trotter_rotate
from .rdm import compute_rdm2, energy_from_rdm2
from .states import FockState
from .tensors import TwoBodyTensor, pair_table, sz_conserving_mask

__all__ = [
    "ResidualMatrix",
    "AnsatzLayer",
    "Ansatz",
    "CqeConfig",
    "ConvergenceTrace",
    "TraceRow",
    "residual_exact",
    "residual_parity_split",
    "residual_auxiliary",
    "sparsify",
    "merge_p_depth",
    "choose_epsilon",
    "fit_quadratic_step",
    "quasi_newton_correct",
    "run_cqe",
]

ENCODINGS = ("fermion", "qubit")


def _check_encoding(encoding: str) -> str:
    if encoding not in ENCODINGS:
        raise ValueError(f"encoding must be one of {ENCODINGS}, got {encoding!r}")
    return encoding


@dataclass(frozen=True, eq=False)
class ResidualMatrix:
    """Anti-Hermitian canonical pair matrix of gradient elements."""

    tensor: TwoBodyTensor
    encoding: str

    def __post_init__(self):
        _check_encoding(self.encoding)
        if not self.tensor.is_antihermitian(1e-10):
            raise ValueError("residual must be anti-Hermitian")
        self.tensor.mat.setflags(write=False)

    @property
    def norm_inf(self) -> float:
        return self.tensor.max_abs()

    @property
    def norm_2(self) -> float:
        return self.tensor.norm()

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.tensor.mat))

    def replace_matrix(self, mat: np.ndarray) -> "ResidualMatrix":
        return ResidualMatrix(
            TwoBodyTensor(self.tensor.n_qubits, mat, self.tensor.fermionic),
            self.encoding,
        )


@dataclass(frozen=True, eq=False)
class AnsatzLayer:
    """One exponential factor exp(T) with T the accumulated scaled update.

    The tensor already contains every epsilon-scaled residual merged into
    this layer; epsilon records the most recent step scalar for
    inspection and iteration_born the iteration that created the layer.
    """

    tensor: ResidualMatrix
    epsilon: float
    iteration_born: int


@dataclass(frozen=True, eq=False)
class Ansatz:
    layers: tuple
    reference: FockState

    def apply(self) -> np.ndarray:
        """Reference state pushed through every layer in order."""
        psi = np.array(self.reference.amplitudes, dtype=np.complex128, copy=True)
        for layer in self.layers:
            _rotate_layer(psi, layer.tensor.tensor)
        return psi


def _rotate_layer(psi: np.ndarray, tensor: TwoBodyTensor, scale: complex = 1.0) -> None:
    trotter_rotate(psi, tensor, scale=scale, order=trotter_order(tensor, by_magnitude=True))


def _commutator_elements(psi: np.ndarray, phi: np.ndarray, n_qubits: int, fermionic: bool):
    """Upper-triangle <[H, G]> with phi = H psi precomputed."""
    pairs, _ = pair_table(n_qubits)
    mask = sz_conserving_mask(n_qubits)
    mat = np.zeros((len(pairs), len(pairs)), dtype=np.complex128)
    for a in range(len(pairs)):
        i, j = (int(v) for v in pairs[a])
        for b in range(a, len(pairs)):
            if not mask[a, b]:
                continue
            k, l = (int(v) for v in pairs[b])
            el = (i, j, k, l)
            val = excitation_expectation(phi, psi, el, fermionic) - excitation_expectation(psi, phi, el, fermionic)
            mat[a, b] = val
            if b != a:
                mat[b, a] = -np.conj(val)
    return mat


def residual_exact(state: FockState, ham: ReducedHamiltonian, encoding: str) -> ResidualMatrix:
    """<psi|[H, G_IJ]|psi> for every canonical Sz-conserving element."""
    _check_encoding(encoding)
    psi = state.amplitudes
    phi = ham.apply(psi)
    mat = _commutator_elements(psi, phi, state.n_qubits, encoding == "fermion")
    return ResidualMatrix(TwoBodyTensor(state.n_qubits, mat, encoding == "fermion"), encoding)


def residual_parity_split(state: FockState, ham: ReducedHamiltonian):
    """Commutator expectations split by the Jordan-Wigner sign of each
    transition: (P_plus, P_minus) pair matrices with the encoded residual
    equal to P_plus + P_minus and the unencoded one to P_plus - P_minus.
    """
    psi = state.amplitudes
    phi = ham.apply(psi)
    n = state.n_qubits
    pairs, _ = pair_table(n)
    mask = sz_conserving_mask(n)
    plus = np.zeros((len(pairs), len(pairs)), dtype=np.complex128)
    minus = np.zeros_like(plus)
    for a in range(len(pairs)):
        i, j = (int(v) for v in pairs[a])
        for b in range(len(pairs)):
            if not mask[a, b]:
                continue
            k, l = (int(v) for v in pairs[b])
            src, tgt, signs = context(n, i, j, k, l, True)
            for out, sel in ((plus, signs > 0), (minus, signs < 0)):
                if not np.any(sel):
                    continue
                s, t, g = src[sel], tgt[sel], signs[sel]
                e1 = bk.expectation(phi, psi, s, t, g)
                e2 = bk.expectation(psi, phi, s, t, g)
                out[a, b] += e1 - e2
    return plus, minus


def _transition_expectation(lam: np.ndarray, n_qubits: int, fermionic: bool):
    """Upper-triangle <lam|G|lam> over canonical Sz-conserving elements."""
    pairs, _ = pair_table(n_qubits)
    mask = sz_conserving_mask(n_qubits)
    mat = np.zeros((len(pairs), len(pairs)), dtype=np.complex128)
    for a in range(len(pairs)):
        i, j = (int(v) for v in pairs[a])
        for b in range(len(pairs)):
            if mask[a, b]:
                k, l = (int(v) for v in pairs[b])
                mat[a, b] = excitation_expectation(lam, lam, (i, j, k, l), fermionic)
    return mat


_PROPAGATORS = {
    "exact": "Exact",
    "auxtrotter": "TrotterFirstOrder",
    "aux-trotter": "TrotterFirstOrder",
    "trotterfirstorder": "TrotterFirstOrder",
    "auxcholesky": "CholeskyFactored",
    "aux-cholesky": "CholeskyFactored",
    "choleskyfactored": "CholeskyFactored",
}


def residual_auxiliary(state: FockState, ham: ReducedHamiltonian, delta: float,
                       encoding: str, method: str = "Exact") -> ResidualMatrix:
    """Residual from auxiliary evolved states, delta^-1 Im<Lam|G|Lam>.

    Real states need one forward auxiliary state per factor; complex
    states use a centered difference with states at +delta and -delta.
    The propagator method is Exact, TrotterFirstOrder, or
    CholeskyFactored (which sums per-factor contributions).
    """
    _check_encoding(encoding)
    prop = _PROPAGATORS.get(str(method).lower())
    if prop is None:
        raise ValueError(f"unknown auxiliary propagator {method!r}")
    if delta < 1e-8:
        raise ValueError("delta below 1e-8 amplifies roundoff beyond the O(delta^2) bias")
    n = state.n_qubits
    fermionic = encoding == "fermion"
    is_real = float(np.abs(state.amplitudes.imag).max()) <= 1e-12

    def states_at(d):
        # backward evolution through conjugation needs conj(H) == H
        if d < 0 and float(np.abs(ham.k2.mat.imag).max()) > 0.0:
            raise ValueError("centered differences need a real Hamiltonian matrix")
        src = state if d >= 0 else state.replace_amplitudes(np.conj(state.amplitudes))
        out = evolve_auxiliary(src, ham, abs(d), prop)
        if not isinstance(out, list):
            out = [out]
        if d < 0:
            out = [s.replace_amplitudes(np.conj(s.amplitudes)) for s in out]
        return out

    if is_real:
        # real state and Hamiltonian: e^{+i d H}psi = conj(e^{-i d H}psi),
        # and Im<Lam|G|Lam> at -d is just the negative, so one side works
        acc = np.zeros((pair_table(n)[0].shape[0],) * 2, dtype=np.complex128)
        for lam in states_at(delta):
            acc += _transition_expectation(lam.amplitudes, n, fermionic)
        mat = acc.imag.astype(np.complex128) / delta
    else:
        acc = np.zeros((pair_table(n)[0].shape[0],) * 2, dtype=np.complex128)
        for lam_p in states_at(delta):
            acc += _transition_expectation(lam_p.amplitudes, n, fermionic)
        for lam_m in states_at(-delta):
            acc -= _transition_expectation(lam_m.amplitudes, n, fermionic)
        mat = acc / (2.0j * delta)
    mat = 0.5 * (mat - mat.conj().T)  # exact anti-Hermitian projection
    return ResidualMatrix(TwoBodyTensor(n, mat, fermionic), encoding)


def sparsify(residual: ResidualMatrix, c: float) -> ResidualMatrix:
    """Zero every element with |el| < c * max|el|; ties at the threshold survive."""
    if not 0.0 <= c <= 1.0:
        raise ValueError("sparsification fraction must lie in [0, 1]")
    if c == 0.0:
        return residual
    cut = c * residual.norm_inf
    mat = np.where(np.abs(residual.tensor.mat) >= cut, residual.tensor.mat, 0.0)
    return residual.replace_matrix(mat)


def merge_p_depth(ansatz: Ansatz, new_residual: ResidualMatrix, p: int, epsilon: float,
                  iteration: Optional[int] = None):
    """Fold epsilon * new_residual into the ansatz.

    The merge window is the trailing p layers of the ansatz (plus the
    prospective fresh layer).  Each nonzero element lands in the most
    recent windowed layer that already holds that element; everything
    else goes into at most one fresh layer.  Returns (ansatz,
    touched_old) where touched_old reports whether an existing layer
    changed.
    """
    if p < 0:
        raise ValueError("p must be nonnegative")
    if iteration is None:
        iteration = max((l.iteration_born for l in ansatz.layers), default=0) + 1
    scaled = epsilon * new_residual.tensor.mat
    rows, cols = np.nonzero(scaled)
    eligible = list(range(max(0, len(ansatz.layers) - p), len(ansatz.layers)))
    updates: dict = {}
    fresh = np.zeros_like(scaled)
    fresh_any = False
    for r, c in zip(rows, cols):
        home = None
        for idx in reversed(eligible):
            if ansatz.layers[idx].tensor.tensor.mat[r, c] != 0.0:
                home = idx
                break
        if home is None:
            fresh[r, c] = scaled[r, c]
            fresh_any = True
        else:
            updates.setdefault(home, []).append((r, c))
    layers = list(ansatz.layers)
    for idx, entries in updates.items():
        mat = layers[idx].tensor.tensor.mat.copy()
        for r, c in entries:
            mat[r, c] += scaled[r, c]
        layers[idx] = replace(
            layers[idx],
            tensor=layers[idx].tensor.replace_matrix(mat),
            epsilon=epsilon,
        )
    if fresh_any:
        layers.append(
            AnsatzLayer(
                tensor=new_residual.replace_matrix(fresh),
                epsilon=epsilon,
                iteration_born=iteration,
            )
        )
    return Ansatz(tuple(layers), ansatz.reference), bool(updates)


def _parse_epsilon_strategy(strategy):
    """'fixed:VAL' -> ('fixed', VAL); 'trust' -> ('trust', None)."""
    if isinstance(strategy, (int, float)):
        return "fixed", float(strategy)
    text = str(strategy).strip().lower()
    if text in ("trust", "quadratictrustregion"):
        return "trust", None
    if text.startswith("fixed"):
        _, _, val = text.partition(":")
        if not val:
            raise ValueError("fixed strategy needs a value, e.g. fixed:0.1")
        return "fixed", float(val)
    raise ValueError(f"unknown epsilon strategy {strategy!r}")


def _energy_along(psi: np.ndarray, direction: ResidualMatrix, ham: ReducedHamiltonian,
                  eps: float) -> float:
    if eps == 0.0:
        return ham.energy(psi)
    trial = psi.copy()
    _rotate_layer(trial, direction.tensor, scale=eps)
    return ham.energy(trial)


def fit_quadratic_step(evaluate, slope: float, radius: float):
    """Parabolic line search: minimizer of the fit through E at {0, t, 2t}.

    The probe t points downhill along the supplied slope; the minimizer
    is clamped to [-2t, 2t], nonpositive fitted curvature falls back to
    the lower-energy endpoint, and the step is halved until the returned
    epsilon satisfies E(eps) <= E(0) + 1e-12.  Returns (eps, new_radius,
    E(eps)): interior minimizers double the radius for the next call,
    boundary hits halve it.
    """
    e0 = evaluate(0.0)
    if slope == 0.0:
        return 0.0, radius, e0
    t = -np.sign(slope) * radius
    for _ in range(40):
        e1 = evaluate(t)
        e2 = evaluate(2.0 * t)
        d1, d2 = e1 - e0, e2 - e0
        curv = d2 - 2.0 * d1  # proportional to the fitted curvature
        if curv > 0.0:
            eps = t * (4.0 * d1 - d2) / (2.0 * (2.0 * d1 - d2))
            eps = float(np.clip(eps, -abs(2.0 * t), abs(2.0 * t)))
            boundary = abs(eps) >= abs(2.0 * t) * (1.0 - 1e-12)
        else:
            eps = 2.0 * t if e2 <= evaluate(-2.0 * t) else -2.0 * t
            boundary = True
        e_taken = evaluate(eps)
        if e_taken <= e0 + 1e-12:
            new_radius = radius * 0.5 if boundary else radius * 2.0
            return eps, new_radius, e_taken
        t *= 0.5
        radius *= 0.5
    return 0.0, radius, e0


def _trust_epsilon(psi, direction, ham, gradient, radius):
    """fit_quadratic_step on the true energy along the direction, with the
    analytic slope dE/d eps = sum direction * gradient fixing the probe sign."""
    slope = float(np.sum(direction.tensor.mat * gradient.tensor.mat).real)
    return fit_quadratic_step(lambda e: _energy_along(psi, direction, ham, e), slope, radius)


def choose_epsilon(ansatz: Ansatz, direction: ResidualMatrix, ham: ReducedHamiltonian,
                   strategy, radius: Optional[float] = None) -> float:
    """Step scalar for one update; see _trust_epsilon for the fit."""
    kind, value = _parse_epsilon_strategy(strategy)
    if kind == "fixed":
        return value
    if direction.norm_inf == 0.0:
        raise ValueError("direction is zero")
    psi = ansatz.apply()
    if radius is None:
        radius = 0.5 / direction.norm_inf
    eps, _, _ = _trust_epsilon(psi, direction, ham, direction, radius)
    return eps


def _inner(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sum(np.conj(a) * b).real)


def quasi_newton_correct(history, gradient: ResidualMatrix) -> ResidualMatrix:
    """Two-loop limited-memory BFGS transform of the gradient.

    history holds (s, y) pairs, most recent last, as matrices or
    ResidualMatrix wrappers; pairs with non-positive curvature s.y are
    skipped.  Empty history returns the gradient unchanged.
    """
    def raw(x):
        return x.tensor.mat if isinstance(x, ResidualMatrix) else x

    pairs = [
        (raw(s), raw(y))
        for s, y in history
        if _inner(raw(s), raw(y)) > 1e-14
    ]
    if not pairs:
        return gradient
    q = gradient.tensor.mat.copy()
    alphas = []
    for s, y in reversed(pairs):
        rho = 1.0 / _inner(s, y)
        alpha = rho * _inner(s, q)
        q = q - alpha * y
        alphas.append((alpha, rho, s, y))
    s_last, y_last = pairs[-1]
    q *= _inner(s_last, y_last) / _inner(y_last, y_last)
    for alpha, rho, s, y in reversed(alphas):
        beta = rho * _inner(y, q)
        q = q + (alpha - beta) * s
    q = 0.5 * (q - q.conj().T)
    return gradient.replace_matrix(q)


@dataclass(frozen=True)
class CqeConfig:
    encoding: str = "fermion"
    sparse_c: float = 0.0
    p_depth: int = 0
    delta: float = 0.01
    residual_method: str = "exact"
    epsilon_strategy: str = "trust"
    second_order: str = "none"
    tol_residual_norm: float = 1e-3
    max_iterations: int = 200

    def __post_init__(self):
        _check_encoding(self.encoding)
        if not 0.0 <= self.sparse_c <= 1.0:
            raise ValueError("sparse_c must lie in [0, 1]")
        if self.p_depth < 0:
            raise ValueError("p_depth must be nonnegative")
        if self.delta <= 0.0:
            raise ValueError("delta must be positive")
        if self.tol_residual_norm <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.qn_memory() not in (0, 2, 3):
            raise ValueError("second_order must be none, lbfgs:2, or lbfgs:3")
        _parse_epsilon_strategy(self.epsilon_strategy)
        if self._residual_kind() is None:
            raise ValueError(f"unknown residual method {self.residual_method!r}")

    def qn_memory(self) -> int:
        text = self.second_order.strip().lower()
        if text in ("none", ""):
            return 0
        if text.startswith("lbfgs:"):
            return int(text.split(":", 1)[1])
        if text.startswith("limitedmemoryquasinewton"):
            return int("".join(ch for ch in text if ch.isdigit()) or 0)
        return -1

    def _residual_kind(self):
        text = self.residual_method.strip().lower()
        if text in ("exact", "exactcommutator"):
            return ("exact", None)
        if text in _PROPAGATORS and text != "exact":
            return ("aux", _PROPAGATORS[text])
        return None


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    energy: float
    residual_norm_a: float
    residual_norm_b: float
    layers: int
    nnz: int
    cnot_estimate: int


@dataclass(frozen=True, eq=False)
class ConvergenceTrace:
    rows: tuple
    status: str
    final_energy: float
    final_state: FockState
    rdm2: object
    ansatz: Ansatz

    @property
    def iterations(self) -> int:
        return len(self.rows)


def _ansatz_nnz(ansatz: Ansatz) -> int:
    total = 0
    for layer in ansatz.layers:
        total += int(np.count_nonzero(np.triu(layer.tensor.tensor.mat)))
    return total


def run_cqe(ham: ReducedHamiltonian, reference: FockState, config: CqeConfig) -> ConvergenceTrace:
    """Iterate residual -> correction -> prune -> step -> merge to convergence.

    Returns a trace with one row per iteration; status is converged,
    stagnated (five iterations without descent), or max_iterations.
    The per-iteration energy is cross-checked against the 2-RDM
    contraction, and the final 2-RDM is attached.
    """
    from .resources import count_cnots

    if reference.n_qubits != ham.n_qubits:
        raise ValueError("reference state size does not match the Hamiltonian")
    if reference.n_particles != ham.n_electrons or reference.sz_twice != ham.ms2:
        raise ValueError("reference state is not in the Hamiltonian's (N, Sz) sector")
    kind = config._residual_kind()
    memory = config.qn_memory()
    strategy_kind, strategy_value = _parse_epsilon_strategy(config.epsilon_strategy)

    ansatz = Ansatz((), reference)
    psi = np.array(reference.amplitudes, dtype=np.complex128, copy=True)
    energy = ham.energy(psi)
    radius = None
    rows = []
    status = "max_iterations"
    history: list = []
    pending_s = None
    prev_a = None
    stall = 0

    for m in range(1, config.max_iterations + 1):
        state = FockState(psi, reference.n_particles, reference.sz_twice)
        if kind[0] == "exact":
            a_res = residual_exact(state, ham, config.encoding)
        else:
            a_res = residual_auxiliary(state, ham, config.delta, config.encoding, kind[1])
        _assert_rdm_energy(ham, state, energy)

        if memory:
            if pending_s is not None and prev_a is not None:
                history.append((pending_s, a_res.tensor.mat - prev_a))
                if len(history) > memory:
                    history.pop(0)
            pending_s = None
            prev_a = a_res.tensor.mat
            b_res = quasi_newton_correct(history, a_res)
        else:
            b_res = a_res
        conv_norm = b_res.norm_2 if memory else a_res.norm_2

        if conv_norm < config.tol_residual_norm:
            status = "converged"
            rows.append(TraceRow(m, energy, a_res.norm_2, b_res.norm_2,
                                 len(ansatz.layers), _ansatz_nnz(ansatz), count_cnots(ansatz)))
            break

        pruned = sparsify(b_res, config.sparse_c)
        if pruned.norm_inf == 0.0:
            status = "stagnated"
            rows.append(TraceRow(m, energy, a_res.norm_2, b_res.norm_2,
                                 len(ansatz.layers), _ansatz_nnz(ansatz), count_cnots(ansatz)))
            break

        if strategy_kind == "fixed":
            eps = strategy_value
        else:
            if radius is None:
                radius = 0.5 / pruned.norm_inf
            eps, radius, _ = _trust_epsilon(psi, pruned, ham, a_res, radius)

        new_ansatz, touched_old = merge_p_depth(ansatz, pruned, config.p_depth, eps, m)
        if touched_old:
            trial = new_ansatz.apply()
            e_new = ham.energy(trial)
            if strategy_kind == "trust" and e_new > energy + 1e-12:
                # merged product reordered the factors uphill; fall back to
                # a fresh layer, which reproduces the line-search energy
                new_ansatz, touched_old = merge_p_depth(ansatz, pruned, 0, eps, m)
                trial = psi.copy()
                _rotate_layer(trial, new_ansatz.layers[-1].tensor.tensor)
                e_new = ham.energy(trial)
            psi = trial
        elif len(new_ansatz.layers) > len(ansatz.layers):
            _rotate_layer(psi, new_ansatz.layers[-1].tensor.tensor)
            e_new = ham.energy(psi)
        else:
            e_new = energy  # zero step: nothing merged, nothing appended
        ansatz = new_ansatz

        if memory and not touched_old and eps != 0.0:
            pending_s = eps * pruned.tensor.mat

        stall = stall + 1 if e_new >= energy - 1e-12 else 0
        energy = e_new
        rows.append(TraceRow(m, energy, a_res.norm_2, b_res.norm_2,
                             len(ansatz.layers), _ansatz_nnz(ansatz), count_cnots(ansatz)))
        if stall >= 5:
            status = "stagnated"
            break

    final_state = FockState(psi / np.linalg.norm(psi), reference.n_particles, reference.sz_twice)
    rdm = compute_rdm2(final_state)
    return ConvergenceTrace(
        rows=tuple(rows),
        status=status,
        final_energy=energy,
        final_state=final_state,
        rdm2=rdm,
        ansatz=ansatz,
    )


def _assert_rdm_energy(ham: ReducedHamiltonian, state: FockState, energy: float) -> None:
    rdm = compute_rdm2(state)
    contracted = energy_from_rdm2(ham, rdm)
    if abs(contracted - energy) > 1e-9:
        raise RuntimeError(
            f"2-RDM contraction energy {contracted:.12f} drifted from "
            f"expectation {energy:.12f}"
        )
