"""End-to-end checks of the quantitative claims this package is built around.

Each test pins one headline behavior at an explicit tolerance; run with -v for
one pass/fail line per claim, and with -s to also see the measured numbers.
"""

import json
import math
import time

import numpy as np
import yaml

from otoclab import cli
from otoclab.analysis import Window, fit_lyapunov, mss_check
from otoclab.classical import (MapState, TorusMap, sensitivity_fd,
                               tangent_accumulate, tangent_lyapunov)
from otoclab.hilbert import CompositeSpace, Operator, maximally_mixed
from otoclab.models import ModelInstance, SpinChainSpec, build_spin_chain
from otoclab.scrambling import (TimeGrid, TimeSeries, squared_commutator,
                                squared_commutator_terms, support_profile)

from conftest import PRESET_NAMES, preset_path


def chaotic_chain(length):
    return build_spin_chain(SpinChainSpec(length=length, coupling=1.0,
                                          field_x=1.05, field_z=0.5))


def timed_run(name, out_dir):
    start = time.perf_counter()
    rc = cli.main(["run", str(preset_path(name)), "--output-dir", str(out_dir)])
    elapsed = time.perf_counter() - start
    assert rc == 0, f"preset {name} exited with code {rc}"
    report = json.loads((out_dir / "report.json").read_text())
    return report, elapsed


def test_single_qubit_squared_commutator_matches_4sin2(run_preset):
    space = CompositeSpace((2,))
    h = Operator(space, np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex))
    z = Operator(space, np.diag([1.0 + 0.0j, -1.0]))
    model = ModelInstance(space=space, hamiltonian=h, floquet_unitary=None,
                          local_ops=lambda site, label: z)
    grid = TimeGrid.linspace(0.0, 10.0, 201)
    start = time.perf_counter()
    series = squared_commutator(model, z, z, maximally_mixed(space), grid)
    elapsed = time.perf_counter() - start
    err = float(np.abs(series.real_values() - 4.0 * np.sin(grid.times) ** 2).max())
    print(f"\nsingle qubit: max |C(t) - 4 sin^2 t| = {err:.3e} (tol 1e-8), "
          f"{elapsed:.3f} s")
    assert err < 1e-8
    assert elapsed < 1.0
    _, report = run_preset("single_qubit_check")
    assert report["extras"]["max_abs_error"] < 1e-8


def test_commutator_square_paths_agree_pointwise():
    model = chaotic_chain(6)
    w = model.local_op(0, "z")
    v = model.local_op(5, "z")
    state = maximally_mixed(model.space)
    grid = TimeGrid.linspace(0.0, 10.0, 100)
    start = time.perf_counter()
    direct = squared_commutator(model, w, v, state, grid, validation_tol=None)
    terms = squared_commutator_terms(model, w, v, state, grid)
    elapsed = time.perf_counter() - start
    gap = float(np.abs(direct.values - terms.values).max())
    print(f"\nL=6 dual evaluation: max |direct - four-term| = {gap:.3e} "
          f"(tol 1e-10), {elapsed:.1f} s")
    assert gap <= 1e-10
    assert elapsed < 30.0


def test_commutator_vanishes_at_t0_and_support_starts_local():
    model = chaotic_chain(6)
    state = maximally_mixed(model.space)
    grid = TimeGrid.linspace(0.0, 1.0, 2)
    w = model.local_op(0, "z")
    worst = 0.0
    for j in range(1, 6):
        series = squared_commutator(model, w, model.local_op(j, "z"),
                                    state, grid)
        worst = max(worst, abs(float(series.values[0].real)))
    profile = support_profile(model, w, grid)
    away = profile.weights[0, 1:]
    print(f"\nt=0 locality: max C(0) over sites 1..5 = {worst:.3e} "
          f"(tol 1e-12); off-site weights {away.tolist()}")
    assert worst < 1e-12
    assert np.all(away == 0.0)
    assert np.isclose(profile.weights[0, 0], 1.0)


def test_support_arrival_times_increase_along_chain(tmp_path):
    report, elapsed = timed_run("chain_spreading", tmp_path / "spreading")
    times = report["extras"]["crossing_times"][1:6]
    print(f"\nL=8 arrival times (sites 1..5): {times}, {elapsed:.1f} s")
    assert all(t is not None for t in times)
    assert all(a < b for a, b in zip(times, times[1:]))
    assert elapsed < 300.0


def test_conserved_parity_stays_flat_while_chaotic_chain_scrambles(run_preset):
    out, report = run_preset("integrable_vs_chaotic")
    flat = report["extras"]["max_c_integrable"]
    plateau = report["saturation"]["c_chaotic"]["plateau"]
    data = np.genfromtxt(out / "c_of_t.csv", delimiter=",", skip_header=1)
    c3 = float(data[np.argmin(np.abs(data[:, 0] - 3.0)), 2])

    _, entropy_report = run_preset("chain_entropy_vs_otoc")
    peak = entropy_report["extras"]["max_entropy_nats"]
    target = 0.8 * 0.5 * entropy_report["extras"]["half_cut_max_nats"]
    print(f"\nconserved W: max C = {flat:.3e} (tol 1e-10); chaotic C(3) = "
          f"{c3:.3f} vs 0.1*plateau = {0.1 * plateau:.3f}; half-cut entropy "
          f"peak {peak:.3f} nats vs target {target:.3f}")
    assert flat < 1e-10
    assert c3 > 0.1 * plateau
    assert peak > target


def test_unstable_oscillator_rate_near_2lambda_with_small_truncation_drift(tmp_path):
    report, elapsed = timed_run("inverted_oscillator", tmp_path / "osc")
    rates = {name: fit["rate"] for name, fit in report["fits"].items()}
    drift = report["provenance"]["truncation_drift"]
    print(f"\ninverted oscillator: rates {rates} (target 2.0 +- 10%), "
          f"truncation drift {drift:.2e} (tol 0.02), {elapsed:.1f} s")
    assert set(rates) == {"n128", "n256"}
    for rate in rates.values():
        assert abs(rate - 2.0) / 2.0 < 0.10
    assert drift is not None and drift < 0.02
    assert elapsed < 120.0


def test_sea_packet_outgrows_island_packet_by_factor_five(tmp_path):
    report, elapsed = timed_run("island_vs_sea", tmp_path / "rotor")
    rate_island = report["extras"]["rate_island"]
    rate_sea = report["extras"]["rate_sea"]
    print(f"\nkicked rotor: sea rate {rate_sea:.3f}, island rate "
          f"{rate_island:.3f} (need sea > 0.5 and island <= sea/5), "
          f"{elapsed:.1f} s")
    assert rate_sea > 0.5
    assert rate_island <= rate_sea / 5.0
    assert elapsed < 180.0


def test_saturation_time_grows_with_log_inverse_hbar(run_preset):
    _, report = run_preset("ehrenfest_scaling")
    points = report["extras"]["points"]
    hbars = [p[0] for p in points]
    tsats = [p[1] for p in points]
    slope = report["extras"]["slope"]
    print(f"\nEhrenfest: t_sat {dict(zip(hbars, np.round(tsats, 3)))}, "
          f"slope vs ln(1/hbar) = {slope:.3f} (need > 0)")
    assert hbars == sorted(hbars, reverse=True)
    assert all(a < b for a, b in zip(tsats, tsats[1:]))
    assert slope > 0.0


def test_cat_and_standard_map_exponents_match_references(run_preset):
    s0 = MapState(0.2, 0.1)
    cat = TorusMap("cat")
    cat_err = abs(tangent_lyapunov(cat, s0, 1000)
                  - math.log((3.0 + math.sqrt(5.0)) / 2.0))
    free_rate = tangent_lyapunov(TorusMap("standard", K=0.0),
                                 MapState(0.5, 1.0), 100000)
    tangent = tangent_accumulate(cat, s0, 10)
    expected = tangent.jacobian[0, 0] * math.exp(tangent.log_scale)
    fd = sensitivity_fd(cat, s0, 10, delta=1e-7)
    fd_rel = abs(fd - expected) / abs(expected)
    print(f"\nexponents: cat error {cat_err:.2e} (tol 1e-6); free rotation "
          f"{free_rate:.2e} (tol 1e-2); FD vs tangent rel {fd_rel:.2e}")
    assert cat_err < 1e-6
    assert 0.0 <= free_rate < 1e-2
    assert fd_rel < 1e-6
    _, report = run_preset("classical_lyapunov")
    assert report["extras"]["abs_error"] < 1e-6
    assert report["extras"]["fd_check"]["rel_diff"] < 1e-6


def test_cat_map_transfer_matrix_permutes_and_mixes(run_preset):
    _, report = run_preset("cat_map_koopman")
    extras = report["extras"]
    print(f"\nKoopman n=50: permutation {extras['is_permutation']}, "
          f"stationarity {extras['stationarity_residual']:.1e} (tol 1e-12), "
          f"correlation ratio at step 5 {extras['decay_ratio_step5']:.1e} "
          f"(need < 0.1)")
    assert extras["resolution"] == 50
    assert extras["is_permutation"] is True
    assert extras["stationarity_residual"] <= 1e-12
    assert extras["decay_ratio_step5"] < 0.1


def test_growth_rate_sits_under_thermal_bound_with_decade_caveat(run_preset):
    _, report = run_preset("mss_report")
    mss = report["mss"]
    print(f"\nbound check: rate {mss['rate']:.4f} vs bound {mss['bound']:.1f}, "
          f"ratio {mss['ratio']:.3f} (need < 1), caveat {mss['caveat']}")
    assert mss["passed"] is True
    assert mss["ratio"] < 1.0
    assert np.isclose(mss["bound"], 4.0)
    assert mss["caveat"] is False
    # any fit window spanning under a decade must carry the caveat flag
    grid = TimeGrid.linspace(0.0, 2.0, 81)
    series = TimeSeries(grid, np.exp(2.0 * grid.times).astype(complex))
    short = fit_lyapunov(series, Window(0.2, 0.8))
    assert mss_check(short, temperature=2.0 / math.pi).caveat is True


def test_commensurate_spectrum_revives_at_common_period(run_preset):
    _, report = run_preset("recurrence_demo")
    extras = report["extras"]
    print(f"\nrecurrence: period {extras['recurrence_period']:.6f} "
          f"(2 pi = {2 * math.pi:.6f}), fidelity there "
          f"{extras['fidelity_at_period']:.12f} (need > 1 - 1e-6)")
    assert np.isclose(extras["recurrence_period"], 2.0 * math.pi)
    assert extras["fidelity_at_period"] > 1.0 - 1e-6


def test_runs_are_deterministic_and_interface_contracts_hold(tmp_path, capsys):
    preset = str(preset_path("single_qubit_check"))
    dirs = [tmp_path / "first", tmp_path / "second"]
    for d in dirs:
        assert cli.main(["run", preset, "--output-dir", str(d)]) == 0
    names = sorted(p.name for p in dirs[0].iterdir())
    assert names == sorted(p.name for p in dirs[1].iterdir())
    for name in names:
        a = (dirs[0] / name).read_bytes()
        b = (dirs[1] / name).read_bytes()
        assert a == b, f"{name} differs between identical runs"

    for name in PRESET_NAMES:
        assert cli.main(["validate", str(preset_path(name))]) == 0

    bad = tmp_path / "bad.yaml"
    bad.write_text(yaml.safe_dump({"experiment": "nope"}))
    assert cli.main(["run", str(bad)]) == 2
    assert cli.main(["run", preset, "--memory-cap", "1e-7",
                     "--output-dir", str(tmp_path / "tiny")]) == 3
    strict = tmp_path / "strict.yaml"
    strict.write_text(yaml.safe_dump({
        "experiment": "chain_otoc",
        "model": {"family": "chain", "length": 3, "coupling": 1.0,
                  "field_x": 1.05, "field_z": 0.5},
        "operators": {"w": {"label": "z", "site": 0},
                      "v": {"label": "z", "site": 2}},
        "grid": {"start": 0.0, "stop": 2.0, "num": 21},
        "analysis": {"validation_tol": 1e-30},
    }))
    assert cli.main(["run", str(strict),
                     "--output-dir", str(tmp_path / "strict-out")]) == 4
    capsys.readouterr()
    print("\ndeterminism: {} files byte-identical across repeat runs; "
          "12 presets validate; exit codes 2/3/4 honored".format(len(names)))
