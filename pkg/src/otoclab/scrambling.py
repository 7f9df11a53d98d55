"""Quantum scrambling diagnostics.

Heisenberg evolution, 2-point autocorrelators, squared commutators, 4-point
out-of-time-ordered correlators, nested-commutator growth series, Pauli-string
support spreading, entanglement entropy, and recurrence fidelity.

Hamiltonian models are diagonalized once per call and the eigenframe is reused
across the whole time grid; Floquet models are evolved kick by kick.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import NumericalValidationError
from .hilbert import (TOL_HERM, CompositeSpace, DensityMatrix, Operator,
                      PureState, partial_trace)
from .models import ModelInstance

# Pauli-string projection is exact but costs 4^L memory; beyond this use a
# sparse method that is deliberately out of scope here.
SUPPORT_PROFILE_MAX_SITES = 8

State = Union[PureState, DensityMatrix]


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing sample times (1/J units, or kick counts)."""

    times: np.ndarray = field(repr=False)

    def __post_init__(self):
        ts = np.asarray(self.times, dtype=float).reshape(-1)
        if ts.size == 0:
            raise ValueError("time grid must be nonempty")
        if ts.size > 1 and not np.all(np.diff(ts) > 0):
            raise ValueError("time grid must be strictly increasing")
        object.__setattr__(self, "times", ts)

    @classmethod
    def linspace(cls, start: float, stop: float, num: int) -> "TimeGrid":
        return cls(np.linspace(start, stop, num))

    @classmethod
    def kicks(cls, count: int) -> "TimeGrid":
        return cls(np.arange(count + 1, dtype=float))

    def __len__(self):
        return self.times.size


@dataclass(frozen=True)
class TimeSeries:
    grid: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != self.grid.times.shape:
            raise ValueError("values and grid lengths differ")
        object.__setattr__(self, "values", vals)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def real_values(self, tol: float = 1e-9) -> np.ndarray:
        """Discard an imaginary part only after checking it is numerical noise."""
        if np.iscomplexobj(self.values):
            worst = float(np.abs(self.values.imag).max())
            if worst > tol:
                raise ValueError(f"series has non-negligible imaginary part {worst:.3e}")
            return self.values.real.copy()
        return self.values.astype(float)


@dataclass(frozen=True)
class SpreadingProfile:
    """Per-time, per-site normalized support weights of an evolving operator."""

    grid: TimeGrid
    weights: np.ndarray = field(repr=False)  # shape (n_times, n_sites)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != len(self.grid):
            raise ValueError("weights must be (n_times, n_sites)")
        object.__setattr__(self, "weights", w)


def _integer_kicks(grid: TimeGrid) -> np.ndarray:
    ts = grid.times
    rounded = np.rint(ts)
    if np.any(np.abs(ts - rounded) > 0) or np.any(rounded < 0):
        raise ValueError("Floquet models need nonnegative integer kick times")
    return rounded.astype(int)


def _eig_frame(model: ModelInstance):
    if model.hamiltonian is None:
        raise ValueError("operation requires a Hamiltonian model")
    return np.linalg.eigh(model.hamiltonian.matrix)


def _to_frame(mat: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    return vecs.conj().T @ mat @ vecs


def _phases(evals: np.ndarray, t: float) -> np.ndarray:
    return np.exp(1j * evals * t)


def _evolved_in_frame(w_frame: np.ndarray, evals: np.ndarray, t: float) -> np.ndarray:
    # W(t) = e^{iHt} W e^{-iHt}; elementwise phases in the eigenframe.
    ph = _phases(evals, t)
    return (ph[:, None] * w_frame) * ph.conj()[None, :]


def _state_in_frame(state: State, vecs: np.ndarray):
    if isinstance(state, PureState):
        return vecs.conj().T @ state.amplitudes
    return vecs.conj().T @ state.matrix @ vecs


def _expect(mat: np.ndarray, fstate) -> complex:
    if fstate.ndim == 1:
        return complex(np.vdot(fstate, mat @ fstate))
    return complex(np.einsum("ij,ji->", fstate, mat))


def _run_grid(n: int, task: Callable[[int], None], threads: int):
    if threads <= 1:
        for k in range(n):
            task(k)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(task, range(n)))


def _check_spaces(model: ModelInstance, *objs):
    for obj in objs:
        if obj.space.site_dims != model.space.site_dims:
            from .errors import SpaceMismatchError
            raise SpaceMismatchError(
                f"operand space {obj.space.site_dims} does not match model "
                f"space {model.space.site_dims}")


def heisenberg_evolve(model: ModelInstance, w0: Operator, t: float) -> Operator:
    """W(t) = U(t)^dag W U(t); spectrum and Hermiticity preserving."""
    _check_spaces(model, w0)
    if model.hamiltonian is not None:
        evals, vecs = _eig_frame(model)
        wf = _evolved_in_frame(_to_frame(w0.matrix, vecs), evals, t)
        return Operator(model.space, vecs @ wf @ vecs.conj().T)
    kicks = int(np.rint(t))
    if abs(t - kicks) > 0 or kicks < 0:
        raise ValueError(f"Floquet evolution needs a nonnegative integer kick count, got {t}")
    U = model.floquet_unitary.matrix
    W = w0.matrix
    for _ in range(kicks):
        W = U.conj().T @ W @ U
    return Operator(model.space, W)


def _pair_series(model: ModelInstance, mats: dict, state: State, grid: TimeGrid,
                 at_time: Callable[[dict, object], complex], evolve_keys: Sequence[str],
                 threads: int = 1) -> np.ndarray:
    """Evaluate at_time(evolved mats, frame state) across the grid.

    Matrices named in evolve_keys follow Heisenberg evolution; the rest stay
    fixed.  Hamiltonian models share one eigendecomposition and may run the
    grid loop concurrently; Floquet models advance kick by kick.
    """
    out = np.empty(len(grid), dtype=complex)
    if model.hamiltonian is not None:
        evals, vecs = _eig_frame(model)
        frame = {k: _to_frame(m, vecs) for k, m in mats.items()}
        fstate = _state_in_frame(state, vecs)

        def task(k):
            current = dict(frame)
            for key in evolve_keys:
                current[key] = _evolved_in_frame(frame[key], evals, grid.times[k])
            out[k] = at_time(current, fstate)

        _run_grid(len(grid), task, threads)
        return out

    kick_grid = _integer_kicks(grid)
    U = model.floquet_unitary.matrix
    fstate = state.amplitudes if isinstance(state, PureState) else state.matrix
    current = dict(mats)
    kick = 0
    for k, target in enumerate(kick_grid):
        while kick < target:
            for key in evolve_keys:
                current[key] = U.conj().T @ current[key] @ U
            kick += 1
        out[k] = at_time(current, fstate)
    return out


def two_point(model: ModelInstance, a: Operator, state: State, grid: TimeGrid,
              threads: int = 1) -> TimeSeries:
    """<A(t) A(0)> in the given state (complex in general)."""
    _check_spaces(model, a, state)

    def at_time(mats, fstate):
        return _expect(mats["at"] @ mats["a0"], fstate)

    vals = _pair_series(model, {"at": a.matrix, "a0": a.matrix}, state, grid,
                        at_time, evolve_keys=("at",), threads=threads)
    return TimeSeries(grid, vals)


def squared_commutator(model: ModelInstance, w: Operator, v: Operator, state: State,
                       grid: TimeGrid, validation_tol: float | None = 1e-10,
                       threads: int = 1) -> TimeSeries:
    """C(t) = <[W(t), V]^dag [W(t), V]>, a nonnegative real series.

    When validation_tol is set and W, V are Hermitian, the Hermitian form
    -<[W(t), V]^2> is computed alongside and any disagreement beyond the
    tolerance raises NumericalValidationError.
    """
    _check_spaces(model, w, v, state)
    hermitian_pair = w.is_hermitian(TOL_HERM) and v.is_hermitian(TOL_HERM)

    def at_time(mats, fstate):
        m = mats["w"] @ mats["v"] - mats["v"] @ mats["w"]
        c = _expect(m.conj().T @ m, fstate)
        if validation_tol is not None and hermitian_pair:
            c_alt = -_expect(m @ m, fstate)
            if abs(c - c_alt) > validation_tol:
                raise NumericalValidationError(
                    f"commutator-square paths disagree by {abs(c - c_alt):.3e} "
                    f"(tolerance {validation_tol:.3e})")
        return c

    vals = _pair_series(model, {"w": w.matrix, "v": v.matrix}, state, grid,
                        at_time, evolve_keys=("w",), threads=threads)
    worst_imag = float(np.abs(vals.imag).max())
    if worst_imag > 1e-9:
        raise NumericalValidationError(
            f"squared commutator has imaginary part {worst_imag:.3e}")
    return TimeSeries(grid, vals.real.copy())


def squared_commutator_terms(model: ModelInstance, w: Operator, v: Operator,
                             state: State, grid: TimeGrid, threads: int = 1) -> TimeSeries:
    """Four-term expansion <VW(t)^2V> + <W(t)V^2W(t)> - <W(t)VW(t)V> - <VW(t)VW(t)>.

    An independent evaluation path used to cross-check squared_commutator.
    """
    _check_spaces(model, w, v, state)

    def at_time(mats, fstate):
        wt, v0 = mats["w"], mats["v"]
        return (_expect(v0 @ wt @ wt @ v0, fstate)
                + _expect(wt @ v0 @ v0 @ wt, fstate)
                - _expect(wt @ v0 @ wt @ v0, fstate)
                - _expect(v0 @ wt @ v0 @ wt, fstate))

    vals = _pair_series(model, {"w": w.matrix, "v": v.matrix}, state, grid,
                        at_time, evolve_keys=("w",), threads=threads)
    return TimeSeries(grid, vals)


def otoc_f(model: ModelInstance, w: Operator, v: Operator, state: State,
           grid: TimeGrid, threads: int = 1) -> TimeSeries:
    """F(t) = <W(t) V W(t) V>, reported as a complex series."""
    _check_spaces(model, w, v, state)

    def at_time(mats, fstate):
        wt, v0 = mats["w"], mats["v"]
        return _expect(wt @ v0 @ wt @ v0, fstate)

    vals = _pair_series(model, {"w": w.matrix, "v": v.matrix}, state, grid,
                        at_time, evolve_keys=("w",), threads=threads)
    return TimeSeries(grid, vals)


def bch_series(model: ModelInstance, w0: Operator, t: float, order: int) -> Operator:
    """Nested-commutator expansion sum_n (it)^n/n! ad_H^n(W)."""
    if model.hamiltonian is None:
        raise ValueError("bch_series requires a Hamiltonian model")
    _check_spaces(model, w0)
    if order < 0:
        raise ValueError("order must be >= 0")
    H = model.hamiltonian.matrix
    term = w0.matrix.astype(complex)
    total = term.copy()
    coeff = 1.0 + 0j
    for n in range(1, order + 1):
        term = H @ term - term @ H
        coeff *= 1j * t / n
        total = total + coeff * term
    return Operator(model.space, total)


_PAULI_STACK = np.stack([
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
])


def pauli_coefficients(matrix: np.ndarray, n_sites: int) -> np.ndarray:
    """Coefficients Tr(sigma_s A) / 2^L over all Pauli strings, shape (4,)*L.

    Parseval: sum |coeff|^2 = ||A||_F^2 / 2^L.
    """
    L = n_sites
    if matrix.shape != (2 ** L, 2 ** L):
        raise ValueError("matrix does not act on the stated number of qubits")
    tensor = np.asarray(matrix, dtype=complex).reshape([2] * (2 * L))
    # Q[a, i, j] = sigma_a[i, j] / 2 pairs row index j with column index i.
    Q = _PAULI_STACK / 2.0
    for k in range(L):
        tensor = np.tensordot(tensor, Q, axes=([0, L - k], [2, 1]))
    return tensor


def _weights_from_coeffs(coeffs: np.ndarray, L: int) -> np.ndarray:
    sq = np.abs(coeffs) ** 2
    total = sq.sum()
    denom = total - sq[(0,) * L]  # identity string never spreads; excluded
    if denom <= 0:
        raise ValueError("operator is proportional to the identity; no support profile")
    return np.array([(total - sq.take(0, axis=j).sum()) / denom for j in range(L)])


def support_profile(model: ModelInstance, w0: Operator, grid: TimeGrid,
                    threads: int = 1) -> SpreadingProfile:
    """Per-site squared-coefficient weight of W(t) in the Pauli-string basis."""
    _check_spaces(model, w0)
    space = model.space
    if any(d != 2 for d in space.site_dims):
        raise ValueError("support_profile is defined for qubit chains")
    L = space.n_sites
    if L > SUPPORT_PROFILE_MAX_SITES:
        raise ValueError(
            f"support_profile caps at {SUPPORT_PROFILE_MAX_SITES} qubits (got {L})")
    if model.hamiltonian is None:
        raise ValueError("support_profile requires a Hamiltonian model")
    evals, vecs = _eig_frame(model)
    w_frame = _to_frame(w0.matrix, vecs)
    weights = np.empty((len(grid), L))

    def task(k):
        wf = _evolved_in_frame(w_frame, evals, grid.times[k])
        wt = vecs @ wf @ vecs.conj().T
        weights[k] = _weights_from_coeffs(pauli_coefficients(wt, L), L)

    _run_grid(len(grid), task, threads)
    return SpreadingProfile(grid, weights)


def entanglement_entropy(state: PureState, keep_sites: Sequence[int]) -> float:
    """Von Neumann entropy (nats) of the reduced state on keep_sites.

    Uses the Schmidt decomposition across the bipartition, so the spectrum
    is exactly nonnegative and no density matrix is materialized.
    """
    keep = sorted(set(int(s) for s in keep_sites))
    n = state.space.n_sites
    if not keep or len(keep) >= n:
        raise ValueError("partition must keep at least one site and trace out at least one")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep_sites must lie in [0, {n})")
    rest = [s for s in range(n) if s not in keep]
    dims = state.space.site_dims
    tensor = state.amplitudes.reshape(dims)
    left = int(np.prod([dims[s] for s in keep]))
    mat = tensor.transpose(keep + rest).reshape(left, -1)
    probs = np.linalg.svd(mat, compute_uv=False) ** 2
    probs = probs[probs > 1e-15]
    return float(-(probs * np.log(probs)).sum())


def recurrence_fidelity(model: ModelInstance, state: PureState, grid: TimeGrid) -> TimeSeries:
    """|<psi| e^{-iHt} |psi>|^2; returns to 1 at common periods of the spectrum."""
    if model.hamiltonian is None:
        raise ValueError("recurrence_fidelity requires a Hamiltonian model")
    _check_spaces(model, state)
    evals, vecs = _eig_frame(model)
    pops = np.abs(vecs.conj().T @ state.amplitudes) ** 2
    amp = np.exp(-1j * np.outer(grid.times, evals)) @ pops
    return TimeSeries(grid, np.abs(amp) ** 2)
