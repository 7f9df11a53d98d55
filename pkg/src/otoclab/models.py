"""Model builders: mixed-field Ising chain, quantum kicked rotor, and the
inverted harmonic oscillator in a truncated Fock basis.

Each builder returns a ModelInstance bundling the generator of dynamics
(Hamiltonian or one-period Floquet unitary) with a named local-operator
factory and a metadata echo of the spec.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ResourceError
from .hilbert import CompositeSpace, Operator, PureState, embed_local

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_PAULI = {"x": PAULI_X, "y": PAULI_Y, "z": PAULI_Z}

# Default cap on a single dense complex matrix (16 bytes per entry).
DEFAULT_MEMORY_CAP_BYTES = 4 * 1024 ** 3


@dataclass(frozen=True)
class SpinChainSpec:
    """Mixed-field Ising chain H = -J sum ZZ - h_x sum X - h_z sum Z.

    Defaults are the standard nonintegrable point; (h_x, h_z) = (1.0, 0.0)
    gives the integrable transverse-field reference.
    """

    length: int
    coupling: float = 1.0
    field_x: float = 1.05
    field_z: float = 0.5
    boundary: str = "open"

    def __post_init__(self):
        if self.length < 2:
            raise ValueError("chain length must be >= 2")
        for name in ("coupling", "field_x", "field_z"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"unknown boundary {self.boundary!r}")


@dataclass(frozen=True)
class KickedRotorSpec:
    """Quantum kicked rotor on a symmetric momentum-basis truncation."""

    kick_strength: float
    effective_planck: float
    basis_size: int
    period: float = 1.0

    def __post_init__(self):
        if self.basis_size < 3 or self.basis_size % 2 == 0:
            raise ValueError(f"basis_size must be odd and >= 3, got {self.basis_size}")
        if self.kick_strength < 0:
            raise ValueError("kick_strength must be >= 0")
        if self.effective_planck <= 0:
            raise ValueError("effective_planck must be > 0")


@dataclass(frozen=True)
class InvertedOscillatorSpec:
    """H = p^2/2m - m lambda^2 x^2 / 2 on a reference-oscillator Fock basis.

    regular=True flips the quadratic term's sign, giving the ordinary
    oscillator of frequency lambda (useful as a truncation sanity check).
    """

    mass: float = 1.0
    instability_rate: float = 1.0
    truncation: int = 128
    regular: bool = False

    def __post_init__(self):
        if self.truncation < 16:
            raise ValueError("truncation must be >= 16")
        if self.mass <= 0 or self.instability_rate <= 0:
            raise ValueError("mass and instability_rate must be > 0")


@dataclass(frozen=True)
class ModelInstance:
    """A built model: generator of dynamics plus local-operator factory."""

    space: CompositeSpace
    hamiltonian: Optional[Operator]
    floquet_unitary: Optional[Operator]
    local_ops: Callable[[int, str], Operator] = field(repr=False)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if (self.hamiltonian is None) == (self.floquet_unitary is None):
            raise ValueError("exactly one of hamiltonian / floquet_unitary required")
        if self.hamiltonian is not None and not self.hamiltonian.is_hermitian(1e-12):
            raise ValueError("hamiltonian branch must be Hermitian")
        if self.floquet_unitary is not None and not self.floquet_unitary.is_unitary():
            raise ValueError("floquet branch must be unitary")

    def local_op(self, site: int, label: str) -> Operator:
        return self.local_ops(site, label)

    @property
    def family(self) -> str:
        return self.metadata.get("family", "unknown")


def build_spin_chain(spec: SpinChainSpec,
                     memory_cap_bytes: int = DEFAULT_MEMORY_CAP_BYTES) -> ModelInstance:
    L = spec.length
    dim = 2 ** L
    footprint = dim * dim * 16
    if footprint > memory_cap_bytes:
        raise ResourceError(
            f"chain of length {L} needs a {dim}x{dim} complex matrix "
            f"({footprint / 1024 ** 3:.2f} GiB), over the {memory_cap_bytes / 1024 ** 3:.2f} GiB cap")
    space = CompositeSpace((2,) * L)

    def pauli_at(site, label):
        key = label.lower()
        if key not in _PAULI:
            raise KeyError(f"unknown operator label {label!r}; chain labels are x, y, z")
        return embed_local(space, site, _PAULI[key])

    H = np.zeros((dim, dim), dtype=complex)
    bonds = [(i, i + 1) for i in range(L - 1)]
    if spec.boundary == "periodic":
        bonds.append((L - 1, 0))
    for i, j in bonds:
        H -= spec.coupling * (pauli_at(i, "z").matrix @ pauli_at(j, "z").matrix)
    for i in range(L):
        H -= spec.field_x * pauli_at(i, "x").matrix
        H -= spec.field_z * pauli_at(i, "z").matrix
    return ModelInstance(
        space=space,
        hamiltonian=Operator(space, H),
        floquet_unitary=None,
        local_ops=pauli_at,
        metadata={"family": "chain", "spec": asdict(spec)},
    )


def global_parity(model: ModelInstance) -> Operator:
    """Product of X over all sites; commutes with the chain H when field_z = 0."""
    if model.family != "chain":
        raise ValueError("global_parity is defined for spin chains")
    out = np.array([[1.0 + 0j]])
    for _ in range(model.space.n_sites):
        out = np.kron(out, PAULI_X)
    return Operator(model.space, out)


def build_kicked_rotor(spec: KickedRotorSpec) -> ModelInstance:
    N = spec.basis_size
    hbar = spec.effective_planck
    m = np.arange(N, dtype=float) - (N - 1) // 2
    theta = 2.0 * np.pi * np.arange(N) / N
    # Angle-grid <-> momentum-basis DFT; both Floquet factors exactly unitary.
    F = np.exp(1j * np.outer(theta, m)) / np.sqrt(N)

    def to_momentum(diag_theta):
        return F.conj().T @ (diag_theta[:, None] * F)

    kick = to_momentum(np.exp(-1j * (spec.kick_strength / hbar) * np.cos(theta)))
    free = np.exp(-1j * hbar * m ** 2 / 2.0 * spec.period)
    U = free[:, None] * kick  # kick first, then free drift
    space = CompositeSpace((N,))

    tables = {
        "p": np.diag((hbar * m).astype(complex)),
        "n": np.diag(m.astype(complex)),
        "cos": to_momentum(np.cos(theta).astype(complex)),
        "sin": to_momentum(np.sin(theta).astype(complex)),
    }

    def rotor_op(site, label):
        if site != 0:
            raise IndexError("rotor has a single site, index 0")
        key = label.lower()
        if key not in tables:
            raise KeyError(f"unknown operator label {label!r}; rotor labels are p, n, cos, sin")
        return Operator(space, tables[key])

    return ModelInstance(
        space=space,
        hamiltonian=None,
        floquet_unitary=Operator(space, U),
        local_ops=rotor_op,
        metadata={"family": "rotor", "spec": asdict(spec)},
    )


def build_inverted_oscillator(spec: InvertedOscillatorSpec) -> ModelInstance:
    N = spec.truncation
    mass, lam = spec.mass, spec.instability_rate
    a = np.diag(np.sqrt(np.arange(1, N)), 1).astype(complex)
    scale = np.sqrt(2.0 * mass * lam)
    x = (a + a.conj().T) / scale
    p = 1j * np.sqrt(mass * lam / 2.0) * (a.conj().T - a)
    sign = 1.0 if spec.regular else -1.0
    H = p @ p / (2.0 * mass) + sign * mass * lam ** 2 * (x @ x) / 2.0
    H = (H + H.conj().T) / 2.0
    space = CompositeSpace((N,))

    tables = {
        "x": x,
        "p": p,
        "a": a,
        "n": np.diag(np.arange(N, dtype=complex)),
        # Hyperbolic quadratures: u(t) = u e^{lt}, s(t) = s e^{-lt}, [u, s] = i.
        "u": (p + mass * lam * x) / scale,
        "s": (p - mass * lam * x) / scale,
    }

    def osc_op(site, label):
        if site != 0:
            raise IndexError("oscillator has a single site, index 0")
        key = label.lower()
        if key not in tables:
            raise KeyError(
                f"unknown operator label {label!r}; oscillator labels are x, p, a, n, u, s")
        return Operator(space, tables[key])

    return ModelInstance(
        space=space,
        hamiltonian=Operator(space, H),
        floquet_unitary=None,
        local_ops=osc_op,
        metadata={"family": "oscillator", "spec": asdict(spec)},
    )


def coherent_wavepacket(model: ModelInstance, center: tuple[float, float],
                        width: float = 1.0) -> PureState:
    """Normalized Gaussian wavepacket at a phase-space point.

    Rotor: discrete Gaussian in momentum at p0 with angle phases for theta0;
    momentum spread width * sqrt(hbar_eff / 2).  Oscillator: displaced ground
    state of the reference oscillator (coherent state), width 1 only.
    """
    if width <= 0:
        raise ValueError("width must be > 0")
    if model.family == "rotor":
        theta0, p0 = center
        spec = model.metadata["spec"]
        hbar = spec["effective_planck"]
        N = spec["basis_size"]
        m = np.arange(N, dtype=float) - (N - 1) // 2
        sigma_p = width * np.sqrt(hbar / 2.0)
        amps = np.exp(-((hbar * m - p0) ** 2) / (4.0 * sigma_p ** 2))
        amps = amps * np.exp(-1j * m * theta0)  # phase sign fixed by <cos theta> = cos theta0
        return PureState.from_vector(model.space, amps)
    if model.family == "oscillator":
        if abs(width - 1.0) > 1e-12:
            raise ValueError("oscillator packets support width = 1 only (coherent states)")
        x0, p0 = center
        spec = model.metadata["spec"]
        mass, lam = spec["mass"], spec["instability_rate"]
        alpha = np.sqrt(mass * lam / 2.0) * x0 + 1j * p0 / np.sqrt(2.0 * mass * lam)
        N = spec["truncation"]
        amps = np.zeros(N, dtype=complex)
        amps[0] = 1.0
        for n in range(N - 1):  # alpha^n / sqrt(n!) via stable recurrence
            amps[n + 1] = amps[n] * alpha / np.sqrt(n + 1.0)
        return PureState.from_vector(model.space, amps)
    raise ValueError(f"unsupported model family {model.family!r} for wavepackets")
