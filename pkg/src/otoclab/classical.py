"""Classical companion dynamics on the torus.

Arnold cat map and Chirikov standard map, tangent-map Lyapunov exponents,
finite-difference sensitivity (the numerical face of the Poisson bracket),
and an Ulam-type transfer-matrix discretization of the Koopman picture in
which observables and densities evolve linearly.

Conventions: cat map (x, p) -> (2x + p, x + p) mod 1; standard map kicks
first, p' = p + K sin(theta), theta' = theta + p', both mod 2 pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .scrambling import TimeGrid, TimeSeries

_RENORM_EVERY = 10  # keeps 10^6-step tangent products inside double range


@dataclass(frozen=True)
class TorusMap:
    kind: str
    K: float = 0.0

    def __post_init__(self):
        if self.kind not in ("cat", "standard"):
            raise ValueError(f"unknown map kind {self.kind!r}")
        if self.kind == "standard" and self.K < 0:
            raise ValueError("standard-map K must be >= 0")

    @property
    def domain(self) -> float:
        return 1.0 if self.kind == "cat" else 2.0 * math.pi


@dataclass(frozen=True)
class MapState:
    x: float
    p: float


@dataclass(frozen=True)
class TangentState:
    """Accumulated tangent matrix with extracted scale: the true Jacobian is
    jacobian * exp(log_scale)."""

    base: MapState
    jacobian: np.ndarray = field(repr=False)
    log_scale: float = 0.0

    @property
    def log_det(self) -> float:
        """log |det| of the true accumulated Jacobian; 0 for symplectic maps."""
        det = abs(float(np.linalg.det(self.jacobian)))
        return math.log(det) + 2.0 * self.log_scale


@dataclass(frozen=True)
class KoopmanGrid:
    """Column-stochastic transfer matrix on indicator functions of an n x n
    cell grid; cell (i, j) has flat index i * n + j."""

    resolution: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        n2 = self.resolution ** 2
        if self.matrix.shape != (n2, n2):
            raise ValueError("matrix shape does not match resolution")
        colsums = self.matrix.sum(axis=0)
        if float(np.abs(colsums - 1.0).max()) > 1e-12:
            raise ValueError("transfer matrix must be column stochastic")


def _fold(value: float, domain: float) -> float:
    return value % domain


def _step(map_: TorusMap, x: float, p: float) -> tuple[float, float]:
    if map_.kind == "cat":
        return (2.0 * x + p) % 1.0, (x + p) % 1.0
    two_pi = 2.0 * math.pi
    p1 = (p + map_.K * math.sin(x)) % two_pi
    return (x + p1) % two_pi, p1


def _jacobian_entries(map_: TorusMap, x: float) -> tuple[float, float, float, float]:
    if map_.kind == "cat":
        return 2.0, 1.0, 1.0, 1.0
    kc = map_.K * math.cos(x)
    return 1.0 + kc, 1.0, kc, 1.0


def iterate_map(map_: TorusMap, s: MapState, steps: int) -> MapState:
    if steps < 0:
        raise ValueError("steps must be >= 0")
    d = map_.domain
    x, p = _fold(s.x, d), _fold(s.p, d)
    for _ in range(steps):
        x, p = _step(map_, x, p)
    return MapState(x, p)


def orbit(map_: TorusMap, s: MapState, steps: int) -> np.ndarray:
    """Orbit samples including the start point, shape (steps + 1, 2)."""
    d = map_.domain
    x, p = _fold(s.x, d), _fold(s.p, d)
    out = np.empty((steps + 1, 2))
    out[0] = (x, p)
    for k in range(steps):
        x, p = _step(map_, x, p)
        out[k + 1] = (x, p)
    return out


def tangent_accumulate(map_: TorusMap, s0: MapState, steps: int) -> TangentState:
    """Product of step Jacobians along the orbit, renormalized periodically."""
    d = map_.domain
    x, p = _fold(s0.x, d), _fold(s0.p, d)
    a, b, c, dd = 1.0, 0.0, 0.0, 1.0
    log_scale = 0.0
    for k in range(steps):
        ja, jb, jc, jd = _jacobian_entries(map_, x)
        a, b, c, dd = ja * a + jb * c, ja * b + jb * dd, jc * a + jd * c, jc * b + jd * dd
        x, p = _step(map_, x, p)
        if (k + 1) % _RENORM_EVERY == 0:
            s = max(abs(a), abs(b), abs(c), abs(dd))
            if s > 0.0:
                a, b, c, dd = a / s, b / s, c / s, dd / s
                log_scale += math.log(s)
    return TangentState(base=MapState(x, p),
                        jacobian=np.array([[a, b], [c, dd]]),
                        log_scale=log_scale)


def tangent_lyapunov(map_: TorusMap, s0: MapState, steps: int) -> float:
    """Largest Lyapunov exponent from the accumulated tangent map."""
    if steps < 100:
        raise ValueError("need at least 100 steps for a stable exponent")
    tangent = tangent_accumulate(map_, s0, steps)
    top_sv = float(np.linalg.svd(tangent.jacobian, compute_uv=False)[0])
    return (tangent.log_scale + math.log(top_sv)) / steps


def sensitivity_fd(map_: TorusMap, s0: MapState, steps: int, delta: float) -> float:
    """Central finite-difference estimate of d x(t) / d x(0).

    Valid while the two orbits stay closer than the torus fold scale; beyond
    that folding wraps the separation and the estimate breaks down.
    """
    if delta <= 0:
        raise ValueError("delta must be > 0")
    d = map_.domain
    plus = iterate_map(map_, MapState(s0.x + delta, s0.p), steps)
    minus = iterate_map(map_, MapState(s0.x - delta, s0.p), steps)
    diff = (plus.x - minus.x + d / 2.0) % d - d / 2.0  # minimal image
    return diff / (2.0 * delta)


def koopman_matrix(map_: TorusMap, resolution: int) -> KoopmanGrid:
    """Ulam transfer matrix from cell representatives at lattice corners.

    The cat map sends the corner lattice (i/n, j/n) to itself exactly, so its
    matrix is an integer-arithmetic permutation for every n; the standard map
    uses containing-cell assignment of the mapped representative.
    """
    n = resolution
    if n < 8:
        raise ValueError("resolution must be >= 8")
    size = n * n
    M = np.zeros((size, size))
    if map_.kind == "cat":
        src = np.arange(size)
        i, j = src // n, src % n
        dest = ((2 * i + j) % n) * n + (i + j) % n
        M[dest, src] = 1.0
    else:
        cell = map_.domain / n
        for i in range(n):
            for j in range(n):
                x1, p1 = _step(map_, i * cell, j * cell)
                di = int(x1 / cell) % n
                dj = int(p1 / cell) % n
                M[di * n + dj, i * n + j] = 1.0
    return KoopmanGrid(resolution=n, matrix=M)


def cell_points(map_: TorusMap, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Representative (x, p) for every cell, flat-indexed like KoopmanGrid."""
    n = resolution
    idx = np.arange(n * n)
    cell = map_.domain / n
    return (idx // n) * cell, (idx % n) * cell


def koopman_correlation(grid: KoopmanGrid, f: Sequence[float], g: Sequence[float],
                        steps: int) -> TimeSeries:
    """Centered correlation <f o T^k, g> - <f><g> under the uniform measure,
    computed by repeated application of the linear transfer matrix."""
    n2 = grid.resolution ** 2
    f = np.asarray(f, dtype=float).reshape(-1)
    g = np.asarray(g, dtype=float).reshape(-1)
    if f.size != n2 or g.size != n2:
        raise ValueError(f"observables must have {n2} cell values")
    mean_product = f.mean() * g.mean()
    values = np.empty(steps + 1)
    fk = f.copy()
    transfer_t = grid.matrix.T  # observables evolve by the transpose
    for k in range(steps + 1):
        values[k] = float(fk @ g) / n2 - mean_product
        if k < steps:
            fk = transfer_t @ fk
    return TimeSeries(TimeGrid.kicks(steps), values)
