"""Named experiment runners: each takes a validated RunConfig, executes one
scrambling study end to end, writes CSV time series plus a report.json, and
returns the report as a dict.

Every runner is deterministic given its config: there is no stochastic
sampling anywhere in the pipeline, so the recorded seed is interface
plumbing, not a randomness source.  CSV floats are printed with a fixed
%.12e format so repeated runs are byte-identical.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import __version__
from .analysis import (Window, convergence_window, detect_growth_window,
                       estimate_saturation, fit_lyapunov, mss_check)
from .analysis import ehrenfest_scaling as _ehrenfest_scaling
from .classical import (MapState, TorusMap, cell_points, koopman_correlation,
                        koopman_matrix, orbit, sensitivity_fd,
                        tangent_accumulate, tangent_lyapunov)
from .config import (RunConfig, build_grid, build_model, build_state,
                     check_memory)
from .errors import ConfigError, NumericalValidationError
from .hilbert import PureState, maximally_mixed
from .models import (InvertedOscillatorSpec, KickedRotorSpec,
                     build_inverted_oscillator, build_kicked_rotor,
                     coherent_wavepacket, global_parity)
from .scrambling import (TimeGrid, TimeSeries, entanglement_entropy, otoc_f,
                         recurrence_fidelity, squared_commutator,
                         squared_commutator_terms, support_profile, two_point)

SPREADING_THRESHOLD = 0.05  # site weight marking arrival of operator support


# ---------------------------------------------------------------------------
# report plumbing

def _num(x) -> Optional[float]:
    x = float(x)
    return x if math.isfinite(x) else None


def write_csv(path: str, headers: list[str], columns: list[np.ndarray]):
    """Comma-separated columns, %.12e floats, one header row with units."""
    cols = [np.asarray(c, dtype=float) for c in columns]
    if any(c.shape != cols[0].shape for c in cols):
        raise ValueError("csv columns must share a length")
    with open(path, "w", newline="") as fh:
        fh.write(",".join(headers) + "\n")
        for row in zip(*cols):
            fh.write(",".join(f"{v:.12e}" for v in row) + "\n")


def _fit_dict(fit) -> dict:
    return {
        "rate": _num(fit.rate),
        "intercept": _num(fit.intercept),
        "residual": _num(fit.residual),
        "n_points": fit.n_points,
        "valid": fit.valid,
        "decades": _num(fit.decades),
        "window": {"t_start": _num(fit.window.t_start),
                   "t_end": _num(fit.window.t_end)},
    }


def _sat_dict(sat) -> dict:
    return {"t_sat": _num(sat.t_sat), "plateau": _num(sat.plateau),
            "method": sat.method}


def _mss_dict(verdict) -> dict:
    return {"passed": verdict.passed, "ratio": _num(verdict.ratio),
            "bound": _num(verdict.bound), "rate": _num(verdict.rate),
            "caveat": verdict.caveat}


def _try_growth_fit(series, floor_fraction: float, ceiling_fraction: float):
    """Saturation-anchored window detection plus log-linear fit; None when
    the series never offers a usable window."""
    sat = estimate_saturation(series)
    window = detect_growth_window(series, floor=floor_fraction * sat.plateau,
                                  ceiling_fraction=ceiling_fraction)
    if window.is_empty:
        return sat, None
    try:
        return sat, fit_lyapunov(series, window)
    except ValueError:
        return sat, None


def _fit_params(cfg: RunConfig) -> tuple[float, float]:
    fit = cfg.analysis.get("fit") or {}
    return (float(fit.get("floor_fraction", 0.01)),
            float(fit.get("ceiling_fraction", 0.5)))


def _operator(cfg: RunConfig, model, key: str, label: str, site: int = 0):
    block = cfg.operators.get(key) or {}
    return model.local_op(int(block.get("site", site)),
                          str(block.get("label", label)))


def _model_fields(cfg: RunConfig) -> dict:
    return {k: v for k, v in cfg.model.items() if k != "family"}


# ---------------------------------------------------------------------------
# runners

def _run_single_qubit_check(cfg: RunConfig, out_dir: str) -> dict:
    model = build_model(cfg)
    grid = build_grid(cfg)
    state = build_state(cfg, model)
    w = _operator(cfg, model, "w", "z")
    v = _operator(cfg, model, "v", "z")
    series = squared_commutator(model, w, v, state, grid,
                                validation_tol=cfg.analysis["validation_tol"],
                                threads=cfg.threads)
    c = series.real_values()
    write_csv(os.path.join(out_dir, "c_of_t.csv"),
              ["t [1/J]", "c [1]"], [grid.times, c])

    extras: dict = {}
    spec = model.metadata["spec"]
    if spec["coupling"] == 0.0 and spec["field_z"] == 0.0:
        # decoupled qubits in a pure transverse field precess at 2 h_x,
        # so C(t) for W = V = Z has the closed form 4 sin^2(2 h_x t)
        target = 4.0 * np.sin(2.0 * spec["field_x"] * grid.times) ** 2
        extras["closed_form"] = "4 sin^2(2 h_x t)"
        extras["max_abs_error"] = _num(np.abs(c - target).max())
    return {"series_files": ["c_of_t.csv"], "extras": extras}


def _run_chain_otoc(cfg: RunConfig, out_dir: str) -> dict:
    model = build_model(cfg)
    grid = build_grid(cfg)
    state = build_state(cfg, model)
    last = model.space.n_sites - 1
    w = _operator(cfg, model, "w", "z", 0)
    v = _operator(cfg, model, "v", "z", last)
    tol = cfg.analysis["validation_tol"]
    series = squared_commutator(model, w, v, state, grid,
                                validation_tol=tol, threads=cfg.threads)
    terms = squared_commutator_terms(model, w, v, state, grid,
                                     threads=cfg.threads)
    cross = float(np.abs(series.values - terms.values).max())
    if cross > tol:
        raise NumericalValidationError(
            f"four-term commutator expansion deviates from the direct form "
            f"by {cross:.3e} (tolerance {tol:.3e})")
    f = otoc_f(model, w, v, state, grid, threads=cfg.threads)

    write_csv(os.path.join(out_dir, "c_of_t.csv"),
              ["t [1/J]", "c [1]"], [grid.times, series.real_values()])
    write_csv(os.path.join(out_dir, "otoc.csv"),
              ["t [1/J]", "f_re [1]", "f_im [1]"],
              [grid.times, f.values.real, f.values.imag])

    sat, fit = _try_growth_fit(series, *_fit_params(cfg))
    return {
        "series_files": ["c_of_t.csv", "otoc.csv"],
        "fits": {"c": _fit_dict(fit)} if fit else {},
        "saturation": {"c": _sat_dict(sat)},
        "extras": {"cross_check_max_diff": _num(cross)},
    }


def _run_chain_spreading(cfg: RunConfig, out_dir: str) -> dict:
    model = build_model(cfg)
    grid = build_grid(cfg)
    w = _operator(cfg, model, "w", "z", 0)
    profile = support_profile(model, w, grid, threads=cfg.threads)
    L = model.space.n_sites
    write_csv(os.path.join(out_dir, "spreading.csv"),
              ["t [1/J]"] + [f"site_{j} [1]" for j in range(L)],
              [grid.times] + [profile.weights[:, j] for j in range(L)])

    threshold = float(cfg.params.get("threshold", SPREADING_THRESHOLD))
    crossings: list[Optional[float]] = []
    for j in range(L):
        above = profile.weights[:, j] > threshold
        crossings.append(_num(grid.times[int(np.argmax(above))])
                         if above.any() else None)
    return {
        "series_files": ["spreading.csv"],
        "extras": {"threshold": threshold, "crossing_times": crossings},
    }


def _run_chain_entropy_vs_otoc(cfg: RunConfig, out_dir: str) -> dict:
    model = build_model(cfg)
    grid = build_grid(cfg)
    psi0 = build_state(cfg, model)
    if not isinstance(psi0, PureState):
        raise ConfigError("chain_entropy_vs_otoc needs a pure initial state")
    L = model.space.n_sites
    keep = list(range(L // 2))

    evals, vecs = np.linalg.eigh(model.hamiltonian.matrix)
    amps0 = vecs.conj().T @ psi0.amplitudes
    entropy = np.empty(len(grid))
    for k, t in enumerate(grid.times):
        amps_t = vecs @ (np.exp(-1j * evals * t) * amps0)
        entropy[k] = entanglement_entropy(
            PureState(model.space, amps_t), keep)

    infinite_t = maximally_mixed(model.space)
    w = _operator(cfg, model, "w", "z", 0)
    v = _operator(cfg, model, "v", "z", L - 1)
    series = squared_commutator(model, w, v, infinite_t, grid,
                                validation_tol=cfg.analysis["validation_tol"],
                                threads=cfg.threads)

    write_csv(os.path.join(out_dir, "entropy.csv"),
              ["t [1/J]", "entropy [nats]"], [grid.times, entropy])
    write_csv(os.path.join(out_dir, "c_of_t.csv"),
              ["t [1/J]", "c [1]"], [grid.times, series.real_values()])

    ent_series_sat = estimate_saturation(
        TimeSeries(grid, entropy.astype(complex)))
    c_sat = estimate_saturation(series)
    return {
        "series_files": ["entropy.csv", "c_of_t.csv"],
        "saturation": {"entropy": _sat_dict(ent_series_sat),
                       "c": _sat_dict(c_sat)},
        "extras": {"max_entropy_nats": _num(entropy.max()),
                   "half_cut_max_nats": _num((L // 2) * math.log(2.0))},
    }


def _run_integrable_vs_chaotic(cfg: RunConfig, out_dir: str) -> dict:
    model_chaotic = build_model(cfg)
    grid = build_grid(cfg)
    state = build_state(cfg, model_chaotic)

    overrides = cfg.params.get("integrable") or {}
    fields = dict(_model_fields(cfg), **{k: overrides[k] for k in overrides})
    integrable_cfg = RunConfig(experiment=cfg.experiment,
                               model=dict(fields, family="chain"),
                               memory_cap_bytes=cfg.memory_cap_bytes)
    model_integrable = build_model(integrable_cfg)
    if model_integrable.metadata["spec"]["field_z"] != 0.0:
        raise ConfigError("integrable reference chain needs field_z = 0 "
                          "so the global parity is conserved")

    parity = global_parity(model_chaotic)
    tol = cfg.analysis["validation_tol"]
    c_int = squared_commutator(model_integrable, parity, parity, state, grid,
                               validation_tol=tol, threads=cfg.threads)
    c_cha = squared_commutator(model_chaotic, parity, parity, state, grid,
                               validation_tol=tol, threads=cfg.threads)
    a = _operator(cfg, model_integrable, "a", "z", 0)
    g = two_point(model_integrable, a, state, grid, threads=cfg.threads)

    write_csv(os.path.join(out_dir, "c_of_t.csv"),
              ["t [1/J]", "c_integrable [1]", "c_chaotic [1]"],
              [grid.times, c_int.real_values(), c_cha.real_values()])
    write_csv(os.path.join(out_dir, "two_point.csv"),
              ["t [1/J]", "g_re [1]", "g_im [1]"],
              [grid.times, g.values.real, g.values.imag])

    sat = estimate_saturation(c_cha)
    return {
        "series_files": ["c_of_t.csv", "two_point.csv"],
        "saturation": {"c_chaotic": _sat_dict(sat)},
        "extras": {"max_c_integrable": _num(np.abs(c_int.values).max()),
                   "c_chaotic_plateau": _num(sat.plateau)},
    }


def _inverted_pair(cfg: RunConfig):
    """Squared commutator at truncation N and 2N with a shared convergence
    window; the backbone of the oscillator experiments."""
    model = build_model(cfg)
    spec = model.metadata["spec"]
    n_small = spec["truncation"]
    big = build_inverted_oscillator(InvertedOscillatorSpec(
        mass=spec["mass"], instability_rate=spec["instability_rate"],
        truncation=2 * n_small, regular=spec["regular"]))
    grid = build_grid(cfg)
    tol = cfg.analysis["validation_tol"]

    def run(m):
        state = build_state(cfg, m)
        w = _operator(cfg, m, "w", "u")
        v = _operator(cfg, m, "v", "s")
        return squared_commutator(m, w, v, state, grid,
                                  validation_tol=tol, threads=cfg.threads)

    series_small, series_big = run(model), run(big)
    floor = float(cfg.params.get("window_floor", 2.0))
    rel_tol = float(cfg.params.get("window_rel_tol", 0.01))
    window = convergence_window(series_small, series_big, floor, rel_tol)
    if window.is_empty:
        raise NumericalValidationError(
            "no window where the two truncations agree above the floor; "
            "the truncated growth cannot be trusted at any time")
    fit_small = fit_lyapunov(series_small, window)
    fit_big = fit_lyapunov(series_big, window)
    drift = abs(fit_small.rate - fit_big.rate) / abs(fit_big.rate)
    return {
        "grid": grid, "n_small": n_small,
        "series_small": series_small, "series_big": series_big,
        "window": window, "fit_small": fit_small, "fit_big": fit_big,
        "drift": drift, "floor": floor, "rel_tol": rel_tol,
        "rate_closed_form": 2.0 * spec["instability_rate"],
    }


def _inverted_report(pair, out_dir: str) -> dict:
    n, grid = pair["n_small"], pair["grid"]
    write_csv(os.path.join(out_dir, "c_of_t.csv"),
              ["t [1/lambda]", f"c_n{n} [1]", f"c_n{2 * n} [1]"],
              [grid.times, pair["series_small"].real_values(),
               pair["series_big"].real_values()])
    return {
        "series_files": ["c_of_t.csv"],
        "fits": {f"n{n}": _fit_dict(pair["fit_small"]),
                 f"n{2 * n}": _fit_dict(pair["fit_big"])},
        "truncation_drift": _num(pair["drift"]),
        "extras": {
            "window_floor": pair["floor"],
            "window_rel_tol": pair["rel_tol"],
            "truncation_drift": _num(pair["drift"]),
            "rate_closed_form": pair["rate_closed_form"],
        },
    }


def _run_inverted_oscillator(cfg: RunConfig, out_dir: str) -> dict:
    return _inverted_report(_inverted_pair(cfg), out_dir)


def _run_mss_report(cfg: RunConfig, out_dir: str) -> dict:
    mss_block = cfg.analysis.get("mss")
    if not mss_block:
        raise ConfigError("mss_report needs analysis.mss.temperature")
    pair = _inverted_pair(cfg)
    verdict = mss_check(pair["fit_big"], float(mss_block["temperature"]))
    report = _inverted_report(pair, out_dir)
    report["mss"] = _mss_dict(verdict)
    return report


def _run_island_vs_sea(cfg: RunConfig, out_dir: str) -> dict:
    model_island = build_model(cfg)
    grid = build_grid(cfg)
    state_island = build_state(cfg, model_island)

    sea = cfg.params.get("sea") or {}
    fields = dict(_model_fields(cfg),
                  kick_strength=float(sea.get("kick_strength", 10.0)))
    model_sea = build_kicked_rotor(KickedRotorSpec(**fields))
    center = sea.get("packet_center", [1.0, 0.3])
    state_sea = coherent_wavepacket(model_sea,
                                    (float(center[0]), float(center[1])))

    tol = cfg.analysis["validation_tol"]
    w_label = (cfg.operators.get("w") or {}).get("label", "sin")
    runs = {}
    for name, model, state in (("island", model_island, state_island),
                               ("sea", model_sea, state_sea)):
        op = model.local_op(0, w_label)
        runs[name] = squared_commutator(model, op, op, state, grid,
                                        validation_tol=tol,
                                        threads=cfg.threads)

    write_csv(os.path.join(out_dir, "c_of_t.csv"),
              ["t [kicks]", "c_island [1]", "c_sea [1]"],
              [grid.times, runs["island"].real_values(),
               runs["sea"].real_values()])

    lo, hi = cfg.params.get("fit_window", [1.0, 4.0])
    window = Window(float(lo), float(hi))
    fits = {name: fit_lyapunov(series, window)
            for name, series in runs.items()}
    rate_island, rate_sea = fits["island"].rate, fits["sea"].rate
    ratio = rate_sea / rate_island if rate_island > 0 else None
    return {
        "series_files": ["c_of_t.csv"],
        "fits": {name: _fit_dict(f) for name, f in fits.items()},
        "saturation": {"sea": _sat_dict(estimate_saturation(runs["sea"]))},
        "extras": {
            "fit_window": [float(lo), float(hi)],
            "rate_island": _num(rate_island),
            "rate_sea": _num(rate_sea),
            "growth_ratio": None if ratio is None else _num(ratio),
            "sea_kick_strength": fields["kick_strength"],
        },
    }


def _run_ehrenfest_scaling(cfg: RunConfig, out_dir: str) -> dict:
    spec = KickedRotorSpec(**_model_fields(cfg))
    hbars = [float(h) for h in cfg.params.get("hbar_list", [0.2, 0.1, 0.05])]
    n_kicks = int(cfg.grid.get("kicks", 30))
    label = (cfg.operators.get("w") or {}).get("label", "sin")
    result = _ehrenfest_scaling(spec, hbars, n_kicks=n_kicks,
                                operator_label=label, threads=cfg.threads)

    names = [f"hbar_{h:g}" for h in hbars]
    write_csv(os.path.join(out_dir, "c_of_t.csv"),
              ["t [kicks]"] + [f"c_{name} [1]" for name in names],
              [result.series[0].times]
              + [s.real_values() for s in result.series])

    fits = {name: _fit_dict(fit) for name, fit in zip(names, result.fits)
            if fit is not None}
    saturation = {name: _sat_dict(estimate_saturation(s))
                  for name, s in zip(names, result.series)}
    return {
        "series_files": ["c_of_t.csv"],
        "fits": fits,
        "saturation": saturation,
        "extras": {
            "points": [[_num(h), _num(t)] for h, t in result.points],
            "slope": _num(result.slope),
            "applicable": result.applicable,
        },
    }


def _run_cat_map_koopman(cfg: RunConfig, out_dir: str) -> dict:
    resolution = int(cfg.params.get("resolution", 50))
    steps = int(cfg.params.get("steps", 8))
    map_ = TorusMap("cat")
    grid = koopman_matrix(map_, resolution)
    xs, _ = cell_points(map_, resolution)
    f = np.cos(2.0 * math.pi * xs)
    corr = koopman_correlation(grid, f, f, steps)

    write_csv(os.path.join(out_dir, "classical.csv"),
              ["t [steps]", "corr [1]"], [corr.times, corr.values.real])

    M = grid.matrix
    is_permutation = bool(np.array_equal(M @ M.T, np.eye(M.shape[0])))
    uniform = np.full(M.shape[0], 1.0 / M.shape[0])
    stationarity = float(np.abs(M @ uniform - uniform).max())
    c0 = float(corr.values[0].real)
    decay = float(abs(corr.values[min(5, steps)].real) / abs(c0))
    return {
        "series_files": ["classical.csv"],
        "extras": {
            "resolution": resolution,
            "is_permutation": is_permutation,
            "stationarity_residual": _num(stationarity),
            "corr_initial": _num(c0),
            "decay_ratio_step5": _num(decay),
        },
    }


def _run_classical_lyapunov(cfg: RunConfig, out_dir: str) -> dict:
    steps = int(cfg.params.get("steps", 1000))
    seed_point = cfg.params.get("seed_point", [0.2, 0.1])
    s0 = MapState(float(seed_point[0]), float(seed_point[1]))
    cat = TorusMap("cat")

    rate = tangent_lyapunov(cat, s0, steps)
    reference = math.log((3.0 + math.sqrt(5.0)) / 2.0)

    fd_steps = int(cfg.params.get("fd_steps", 10))
    delta = float(cfg.params.get("fd_delta", 1.0e-7))
    fd = sensitivity_fd(cat, s0, fd_steps, delta)
    # over a short horizon the full tangent entry is the right comparator
    tangent = tangent_accumulate(cat, s0, fd_steps)
    exact_entry = tangent.jacobian[0, 0] * math.exp(tangent.log_scale)

    std_k = float(cfg.params.get("standard_K", 10.0))
    std_steps = int(cfg.params.get("standard_steps", 20000))
    std_rate = tangent_lyapunov(TorusMap("standard", K=std_k), s0, std_steps)
    std_reference = math.log(std_k / 2.0)

    samples = orbit(cat, s0, steps)
    write_csv(os.path.join(out_dir, "classical.csv"),
              ["t [steps]", "x [1]", "p [1]"],
              [np.arange(steps + 1, dtype=float),
               samples[:, 0], samples[:, 1]])

    return {
        "series_files": ["classical.csv"],
        "extras": {
            "steps": steps,
            "lyapunov": _num(rate),
            "reference_rate": _num(reference),
            "abs_error": _num(abs(rate - reference)),
            "fd_check": {
                "steps": fd_steps, "delta": delta,
                "fd_derivative": _num(fd),
                "tangent_derivative": _num(exact_entry),
                "rel_diff": _num(abs(fd - exact_entry)
                                 / max(abs(exact_entry), 1e-300)),
            },
            "standard_map": {
                "K": std_k, "steps": std_steps,
                "lyapunov": _num(std_rate),
                "reference_rate": _num(std_reference),
                "rel_diff": _num(abs(std_rate - std_reference)
                                 / abs(std_reference)),
            },
        },
    }


def _float_gcd(values, tol: float = 1.0e-9) -> float:
    g = 0.0
    for v in values:
        v = abs(float(v))
        while v > tol:
            g, v = v, g % v
    return g


def _run_recurrence_demo(cfg: RunConfig, out_dir: str) -> dict:
    model = build_model(cfg)
    grid = build_grid(cfg)
    psi = build_state(cfg, model)
    if not isinstance(psi, PureState):
        raise ConfigError("recurrence_demo needs a pure initial state")

    series = recurrence_fidelity(model, psi, grid)
    write_csv(os.path.join(out_dir, "two_point.csv"),
              ["t [1/J]", "fidelity [1]"],
              [grid.times, series.real_values()])

    evals = np.linalg.eigvalsh(model.hamiltonian.matrix)
    gaps = evals - evals[0]
    g = _float_gcd(gaps[gaps > 1.0e-9])
    extras: dict = {"spectrum": [_num(e) for e in evals]}
    if g > 0:
        period = 2.0 * math.pi / g
        probe = recurrence_fidelity(model, psi,
                                    TimeGrid(np.array([0.0, period])))
        extras["recurrence_period"] = _num(period)
        extras["fidelity_at_period"] = _num(probe.values[1].real)
    else:
        extras["recurrence_period"] = None
        extras["fidelity_at_period"] = None
    return {"series_files": ["two_point.csv"], "extras": extras}


# ---------------------------------------------------------------------------
# registry

@dataclass(frozen=True)
class ExperimentInfo:
    name: str
    description: str
    tag: str
    runner: Callable[[RunConfig, str], dict]


REGISTRY: dict[str, ExperimentInfo] = {
    info.name: info for info in (
        ExperimentInfo(
            "single_qubit_check",
            "squared commutator of decoupled precessing qubits against the "
            "4 sin^2(2 h_x t) closed form",
            "closed-form oracle", _run_single_qubit_check),
        ExperimentInfo(
            "chain_otoc",
            "end-to-end OTOC and squared commutator on a nonintegrable "
            "Ising chain with a four-term cross-check",
            "operator scrambling", _run_chain_otoc),
        ExperimentInfo(
            "chain_spreading",
            "per-site support of a Heisenberg-evolved edge operator, with "
            "arrival times across the chain",
            "light cone", _run_chain_spreading),
        ExperimentInfo(
            "chain_entropy_vs_otoc",
            "half-cut entanglement growth after a product-state quench next "
            "to the infinite-temperature commutator growth",
            "entanglement growth", _run_chain_entropy_vs_otoc),
        ExperimentInfo(
            "integrable_vs_chaotic",
            "conserved global parity: flat commutator on the transverse-field "
            "chain versus growth on the mixed-field chain",
            "integrability contrast", _run_integrable_vs_chaotic),
        ExperimentInfo(
            "inverted_oscillator",
            "exponential commutator growth of the unstable quadratic model "
            "at two basis truncations with a convergence window",
            "exponential growth", _run_inverted_oscillator),
        ExperimentInfo(
            "island_vs_sea",
            "kicked-rotor packets seeded in a stability island versus the "
            "chaotic sea, with growth rates from a shared window",
            "phase-space localization", _run_island_vs_sea),
        ExperimentInfo(
            "ehrenfest_scaling",
            "saturation time of kicked-rotor commutator growth against "
            "ln(1/hbar_eff)",
            "Ehrenfest time", _run_ehrenfest_scaling),
        ExperimentInfo(
            "mss_report",
            "fitted oscillator growth rate compared with the 2 pi T bound, "
            "with a short-window caveat flag",
            "growth-rate bound", _run_mss_report),
        ExperimentInfo(
            "cat_map_koopman",
            "transfer-operator correlation decay for the cat map on an "
            "exact corner-lattice partition",
            "transfer-operator mixing", _run_cat_map_koopman),
        ExperimentInfo(
            "classical_lyapunov",
            "tangent-map Lyapunov exponents for the cat and standard maps "
            "with a finite-difference cross-check",
            "Lyapunov exponents", _run_classical_lyapunov),
        ExperimentInfo(
            "recurrence_demo",
            "return fidelity of a small commensurate-spectrum chain over "
            "two full revivals",
            "quantum recurrences", _run_recurrence_demo),
    )
}


def list_experiments() -> list[str]:
    """Stable one-line-per-experiment listing."""
    return [f"{info.name} - {info.description} [{info.tag}]"
            for info in REGISTRY.values()]


def run_experiment(cfg: RunConfig, out_dir: str) -> dict:
    """Execute a registry experiment and write its CSVs plus report.json."""
    if cfg.experiment not in REGISTRY:
        raise ConfigError(f"unknown experiment {cfg.experiment!r}; "
                          "run the list command for choices")
    check_memory(cfg)
    os.makedirs(out_dir, exist_ok=True)
    result = REGISTRY[cfg.experiment].runner(cfg, out_dir)
    report = {
        "experiment": cfg.experiment,
        "config": cfg.echo(),
        "series_files": result.get("series_files", []),
        "fits": result.get("fits", {}),
        "saturation": result.get("saturation", {}),
        "mss": result.get("mss"),
        "extras": result.get("extras", {}),
        "provenance": {
            "version": __version__,
            "seed": cfg.seed,
            "threads": cfg.threads,
            "truncation_drift": result.get("truncation_drift"),
        },
    }
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        fh.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return report
