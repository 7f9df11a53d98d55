import math

import numpy as np
import pytest

from otoclab.classical import (KoopmanGrid, MapState, TorusMap, cell_points,
                               iterate_map, koopman_correlation,
                               koopman_matrix, orbit, sensitivity_fd,
                               tangent_accumulate, tangent_lyapunov)

CAT_EXPONENT = math.log((3.0 + math.sqrt(5.0)) / 2.0)


def test_map_validation():
    with pytest.raises(ValueError):
        TorusMap("baker")
    with pytest.raises(ValueError):
        TorusMap("standard", K=-1.0)
    assert TorusMap("cat").domain == 1.0
    assert TorusMap("standard", K=1.0).domain == 2.0 * math.pi


def test_iterate_and_orbit_fold_into_domain():
    cat = TorusMap("cat")
    end = iterate_map(cat, MapState(1.3, -0.2), 0)
    assert np.allclose((end.x, end.p), (0.3, 0.8))
    path = orbit(cat, MapState(0.1, 0.2), 7)
    assert path.shape == (8, 2)
    assert path.min() >= 0.0 and path.max() < 1.0
    last = iterate_map(cat, MapState(0.1, 0.2), 7)
    assert np.allclose(path[-1], (last.x, last.p))
    with pytest.raises(ValueError):
        iterate_map(cat, MapState(0.0, 0.0), -1)


def test_free_rotation_orbit_is_a_drift():
    free = TorusMap("standard", K=0.0)
    path = orbit(free, MapState(0.5, 1.0), 3)
    assert np.allclose(path[:, 1], 1.0)
    assert np.allclose(path[:, 0], [0.5, 1.5, 2.5, 3.5])


def test_cat_exponent_matches_closed_form():
    # constant Jacobian, so the estimate converges at machine precision
    rate = tangent_lyapunov(TorusMap("cat"), MapState(0.1, 0.2), 1000)
    assert abs(rate - CAT_EXPONENT) < 1e-6
    with pytest.raises(ValueError):
        tangent_lyapunov(TorusMap("cat"), MapState(0.1, 0.2), 50)


def test_free_rotation_exponent_decays_like_log_n():
    # shear tangent map grows linearly; exponent ~ ln(n)/n
    free = TorusMap("standard", K=0.0)
    rate = tangent_lyapunov(free, MapState(0.5, 1.0), 100000)
    assert 0.0 < rate < 1e-2


def test_strong_kick_exponent_near_chirikov_estimate():
    chaotic = TorusMap("standard", K=10.0)
    rate = tangent_lyapunov(chaotic, MapState(1.0, 0.3), 20000)
    assert abs(rate - math.log(5.0)) / math.log(5.0) < 0.15


def test_symplectic_log_det_vanishes():
    # 10 steps: det of the stored factor is ~1e-9, still above the
    # cancellation floor of a 2x2 determinant, so log_det is meaningful
    tangent = tangent_accumulate(TorusMap("cat"), MapState(0.1, 0.2), 10)
    assert abs(tangent.log_det) < 1e-6
    assert tangent.log_scale > 0.0  # renormalization kicked in


def test_finite_difference_matches_tangent_then_breaks():
    cat = TorusMap("cat")
    s0 = MapState(0.1, 0.2)
    tangent = tangent_accumulate(cat, s0, 8)
    expected = tangent.jacobian[0, 0] * math.exp(tangent.log_scale)
    fd = sensitivity_fd(cat, s0, 8, delta=1e-9)
    assert abs(fd - expected) / abs(expected) < 1e-6
    # separation wraps the torus long before 40 steps; estimate collapses
    tangent_40 = tangent_accumulate(cat, s0, 40)
    true_40 = tangent_40.jacobian[0, 0] * math.exp(tangent_40.log_scale)
    fd_40 = sensitivity_fd(cat, s0, 40, delta=1e-9)
    assert abs(fd_40 - true_40) / abs(true_40) > 0.5
    with pytest.raises(ValueError):
        sensitivity_fd(cat, s0, 5, delta=0.0)


def test_cat_transfer_matrix_is_a_permutation():
    grid = koopman_matrix(TorusMap("cat"), 12)
    M = grid.matrix
    assert set(np.unique(M)) == {0.0, 1.0}
    assert np.array_equal(M @ M.T, np.eye(144))
    with pytest.raises(ValueError):
        koopman_matrix(TorusMap("cat"), 7)


def test_standard_transfer_matrix_is_column_stochastic():
    grid = koopman_matrix(TorusMap("standard", K=10.0), 16)
    assert grid.matrix.shape == (256, 256)
    assert np.allclose(grid.matrix.sum(axis=0), 1.0)
    bad = np.zeros((64, 64))
    with pytest.raises(ValueError):
        KoopmanGrid(resolution=8, matrix=bad)


def test_cat_correlations_mix_and_uniform_is_stationary():
    cat = TorusMap("cat")
    grid = koopman_matrix(cat, 50)
    x, _ = cell_points(cat, 50)
    f = np.cos(2.0 * np.pi * x)
    series = koopman_correlation(grid, f, f, steps=5)
    assert np.isclose(series.values[0].real, 0.5)
    assert abs(series.values[5]) < 1e-12
    flat = koopman_correlation(grid, np.ones(2500), f, steps=5)
    assert np.abs(flat.values).max() < 1e-15
    with pytest.raises(ValueError):
        koopman_correlation(grid, f[:-1], f, steps=3)
