"""Finite-dimensional Hilbert-space primitives.

Dense complex matrices tagged with their tensor-factor structure, plus the
operations everything downstream builds on: tensor products, local embeddings,
partial traces, Hermitian matrix exponentials, expectation values and Gibbs
states.  Natural units hbar = k_B = 1 throughout.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import PsdClampWarning, SpaceMismatchError

# Double-precision dense algebra at dims <= 4096, max-norm scale O(1).
TOL_HERM = 1e-10
TOL_UNITARY = 1e-10
TOL_NORM = 1e-12
TOL_PSD = 1e-10
TOL_PSD_SILENT = 1e-14  # rounding dust; clamped without a warning


@dataclass(frozen=True)
class CompositeSpace:
    """Ordered tensor product of finite local factors."""

    site_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.site_dims)
        if not dims:
            raise ValueError("composite space needs at least one site")
        if any(d < 2 for d in dims):
            raise ValueError(f"every site dimension must be >= 2, got {dims}")
        object.__setattr__(self, "site_dims", dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.site_dims))

    @property
    def n_sites(self) -> int:
        return len(self.site_dims)


def _require_same_space(a, b):
    if a.space.site_dims != b.space.site_dims:
        raise SpaceMismatchError(
            f"space mismatch: {a.space.site_dims} vs {b.space.site_dims}")


@dataclass(frozen=True)
class Operator:
    """Dense complex matrix acting on a composite space."""

    space: CompositeSpace
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        d = self.space.total_dim
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} does not match total_dim {d}")
        object.__setattr__(self, "matrix", mat)

    def dagger(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)

    def is_hermitian(self, tol: float = TOL_HERM) -> bool:
        return float(np.abs(self.matrix - self.matrix.conj().T).max()) < tol

    def is_unitary(self, tol: float = TOL_UNITARY) -> bool:
        d = self.space.total_dim
        gram = self.matrix.conj().T @ self.matrix
        return float(np.abs(gram - np.eye(d)).max()) < tol

    def __matmul__(self, other: "Operator") -> "Operator":
        _require_same_space(self, other)
        return Operator(self.space, self.matrix @ other.matrix)

    def __add__(self, other: "Operator") -> "Operator":
        _require_same_space(self, other)
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        _require_same_space(self, other)
        return Operator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.space, self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(self.space, -self.matrix)


@dataclass(frozen=True)
class PureState:
    """Normalized state vector on a composite space."""

    space: CompositeSpace
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        vec = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if vec.shape != (self.space.total_dim,):
            raise ValueError(
                f"amplitude length {vec.shape[0]} does not match total_dim "
                f"{self.space.total_dim}")
        nrm2 = float(np.vdot(vec, vec).real)
        if abs(nrm2 - 1.0) >= TOL_NORM:
            raise ValueError(f"state not normalized: |psi|^2 = {nrm2!r}")
        object.__setattr__(self, "amplitudes", vec)

    @classmethod
    def from_vector(cls, space: CompositeSpace, vec: np.ndarray) -> "PureState":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(vec)
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(space, vec / nrm)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix.

    Eigenvalues in [-TOL_PSD, 0) are clamped to zero; those below
    -TOL_PSD_SILENT additionally raise a PsdClampWarning, while smaller dust
    (inevitable when reassembling spectral decompositions) is clamped quietly.
    Anything more negative than -TOL_PSD is rejected.
    """

    space: CompositeSpace
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        d = self.space.total_dim
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} does not match total_dim {d}")
        herm_defect = float(np.abs(mat - mat.conj().T).max())
        if herm_defect >= TOL_HERM:
            raise ValueError(f"density matrix not Hermitian: defect {herm_defect:.3e}")
        tr = complex(np.trace(mat)).real
        if abs(tr - 1.0) >= TOL_NORM:
            raise ValueError(f"density matrix trace {tr!r} not within tolerance of 1")
        off = mat - np.diag(np.diagonal(mat))
        if not off.any():
            evals = np.diagonal(mat).real
            if evals.min() < -TOL_PSD:
                raise ValueError(
                    f"density matrix has eigenvalue {evals.min():.3e} < -{TOL_PSD}")
            if evals.min() < 0:
                if evals.min() < -TOL_PSD_SILENT:
                    warnings.warn(
                        f"clamping {int((evals < 0).sum())} negative eigenvalue(s) "
                        f"down to {evals.min():.3e}", PsdClampWarning, stacklevel=2)
                evals = np.clip(evals, 0.0, None)
                mat = np.diag(evals / evals.sum()).astype(complex)
        else:
            evals, vecs = np.linalg.eigh(mat)
            if evals.min() < -TOL_PSD:
                raise ValueError(
                    f"density matrix has eigenvalue {evals.min():.3e} < -{TOL_PSD}")
            if evals.min() < 0:
                if evals.min() < -TOL_PSD_SILENT:
                    warnings.warn(
                        f"clamping {int((evals < 0).sum())} negative eigenvalue(s) "
                        f"down to {evals.min():.3e}", PsdClampWarning, stacklevel=2)
                evals = np.clip(evals, 0.0, None)
                mat = (vecs * (evals / evals.sum())) @ vecs.conj().T
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_pure(cls, state: PureState) -> "DensityMatrix":
        v = state.amplitudes
        return cls(state.space, np.outer(v, v.conj()))


def identity(space: CompositeSpace) -> Operator:
    return Operator(space, np.eye(space.total_dim, dtype=complex))


def maximally_mixed(space: CompositeSpace) -> DensityMatrix:
    d = space.total_dim
    return DensityMatrix(space, np.eye(d, dtype=complex) / d)


def tensor_product(a: Operator, b: Operator) -> Operator:
    space = CompositeSpace(a.space.site_dims + b.space.site_dims)
    return Operator(space, np.kron(a.matrix, b.matrix))


def embed_local(space: CompositeSpace, site: int, w: Union[Operator, np.ndarray]) -> Operator:
    """I (x) ... (x) w (x) ... (x) I with w at position `site`."""
    if not 0 <= site < space.n_sites:
        raise IndexError(f"site {site} out of range for {space.n_sites} sites")
    mat = w.matrix if isinstance(w, Operator) else np.asarray(w, dtype=complex)
    d_site = space.site_dims[site]
    if mat.shape != (d_site, d_site):
        raise ValueError(
            f"local operator shape {mat.shape} does not match site dimension {d_site}")
    d_left = int(np.prod(space.site_dims[:site], dtype=np.int64)) if site else 1
    d_right = int(np.prod(space.site_dims[site + 1:], dtype=np.int64))
    full = np.kron(np.kron(np.eye(d_left), mat), np.eye(d_right))
    return Operator(space, full)


def partial_trace(rho: Union[DensityMatrix, PureState], keep_sites: Sequence[int]) -> DensityMatrix:
    """Trace out every site not in keep_sites; kept sites stay in ascending order."""
    if isinstance(rho, PureState):
        rho = DensityMatrix.from_pure(rho)
    keep = sorted(set(int(s) for s in keep_sites))
    if not keep:
        raise ValueError("keep_sites must be nonempty")
    n = rho.space.n_sites
    if any(s < 0 or s >= n for s in keep):
        raise IndexError(f"keep_sites {keep} out of range for {n} sites")
    dims = list(rho.space.site_dims)
    tensor = rho.matrix.reshape(dims + dims)
    remaining = list(range(n))
    for site in sorted(set(range(n)) - set(keep), reverse=True):
        pos = remaining.index(site)
        m = len(remaining)
        tensor = np.trace(tensor, axis1=pos, axis2=pos + m)
        remaining.remove(site)
    sub = CompositeSpace(tuple(dims[s] for s in keep))
    d_sub = sub.total_dim
    return DensityMatrix(sub, tensor.reshape(d_sub, d_sub))


def expm_hermitian(h: Operator, scale: complex) -> Operator:
    """exp(scale * h) by spectral decomposition; h must be Hermitian."""
    if not h.is_hermitian():
        defect = float(np.abs(h.matrix - h.matrix.conj().T).max())
        raise ValueError(f"expm_hermitian needs a Hermitian input, defect {defect:.3e}")
    evals, vecs = np.linalg.eigh(h.matrix)
    return Operator(h.space, (vecs * np.exp(scale * evals)) @ vecs.conj().T)


def commutator(a: Operator, b: Operator) -> Operator:
    _require_same_space(a, b)
    return Operator(a.space, a.matrix @ b.matrix - b.matrix @ a.matrix)


def expectation(a: Operator, state: Union[PureState, DensityMatrix]) -> complex:
    """<psi|A|psi> for pure states, Tr(rho A) for density matrices."""
    _require_same_space(a, state)
    if isinstance(state, PureState):
        v = state.amplitudes
        return complex(np.vdot(v, a.matrix @ v))
    return complex(np.einsum("ij,ji->", state.matrix, a.matrix))


def gibbs_state(h: Operator, beta: float) -> DensityMatrix:
    """exp(-beta H) / Tr exp(-beta H); beta = 0 is the maximally mixed state."""
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if not h.is_hermitian():
        raise ValueError("gibbs_state needs a Hermitian Hamiltonian")
    evals, vecs = np.linalg.eigh(h.matrix)
    weights = np.exp(-beta * (evals - evals.min()))  # shift guards overflow
    weights /= weights.sum()
    return DensityMatrix(h.space, (vecs * weights) @ vecs.conj().T)
