"""Run-configuration parsing and validation for the experiment runner.

Configs are YAML with a small schema: an experiment name from the registry,
a model block, operator labels for W and V, an ensemble, a time grid, analysis
toggles, and free-form experiment parameters.  Validation never executes an
experiment; it reports the model dimension and the estimated dense-matrix
footprint, refusing anything over the memory cap.
"""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

import yaml

from .errors import ConfigError, ResourceError
from .hilbert import DensityMatrix, PureState, gibbs_state, maximally_mixed
from .models import (DEFAULT_MEMORY_CAP_BYTES, InvertedOscillatorSpec,
                     KickedRotorSpec, ModelInstance, SpinChainSpec,
                     build_inverted_oscillator, build_kicked_rotor,
                     build_spin_chain, coherent_wavepacket)
from .scrambling import TimeGrid

import numpy as np

OUTPUT_ROOT_ENV = "OTOCLAB_OUTPUT"
DEFAULT_VALIDATION_TOL = 1e-10

_TOP_LEVEL_KEYS = {"experiment", "model", "operators", "ensemble", "grid",
                   "analysis", "params", "output_dir", "seed", "threads",
                   "memory_cap_gib"}


@dataclass
class RunConfig:
    experiment: str
    model: dict = field(default_factory=dict)
    operators: dict = field(default_factory=dict)
    ensemble: dict = field(default_factory=lambda: {"kind": "infinite_t"})
    grid: dict = field(default_factory=dict)
    analysis: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    output_dir: Optional[str] = None
    seed: int = 0
    threads: int = 1
    memory_cap_bytes: int = DEFAULT_MEMORY_CAP_BYTES

    def echo(self) -> dict:
        return asdict(self)


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def load_config(path: str, known_experiments: Optional[set] = None) -> RunConfig:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"config parse error in {path}: {exc}")
    _require(isinstance(raw, dict), f"config root must be a mapping, got {type(raw).__name__}")
    return validate_config(raw, known_experiments)


def validate_config(raw: dict, known_experiments: Optional[set] = None) -> RunConfig:
    unknown = set(raw) - _TOP_LEVEL_KEYS
    _require(not unknown, f"unknown config keys: {sorted(unknown)}")
    _require("experiment" in raw, "missing required field: experiment")
    name = raw["experiment"]
    _require(isinstance(name, str), "field experiment must be a string")
    if known_experiments is not None:
        _require(name in known_experiments,
                 f"unknown experiment {name!r}; run the list command for choices")

    cfg = RunConfig(experiment=name)
    cfg.model = _validate_model_block(raw.get("model") or {})
    cfg.operators = _validate_operators_block(raw.get("operators") or {})
    cfg.ensemble = _validate_ensemble_block(raw.get("ensemble") or {"kind": "infinite_t"})
    cfg.grid = _validate_grid_block(raw.get("grid") or {}, cfg.model)
    cfg.analysis = _validate_analysis_block(raw.get("analysis") or {})
    params = raw.get("params") or {}
    _require(isinstance(params, dict), "field params must be a mapping")
    cfg.params = params

    out = raw.get("output_dir")
    _require(out is None or isinstance(out, str), "field output_dir must be a string")
    cfg.output_dir = out
    seed = raw.get("seed", 0)
    _require(isinstance(seed, int), "field seed must be an integer")
    cfg.seed = seed
    threads = raw.get("threads", 1)
    _require(isinstance(threads, int) and threads >= 1, "field threads must be a positive integer")
    cfg.threads = threads
    cap = raw.get("memory_cap_gib", DEFAULT_MEMORY_CAP_BYTES / 1024 ** 3)
    _require(isinstance(cap, (int, float)) and cap > 0, "field memory_cap_gib must be positive")
    cfg.memory_cap_bytes = int(cap * 1024 ** 3)
    return cfg


def _validate_model_block(block: Any) -> dict:
    _require(isinstance(block, dict), "field model must be a mapping")
    if not block:
        return {}
    _require("family" in block, "missing required field: model.family")
    family = block["family"]
    allowed = {
        "chain": {"length", "coupling", "field_x", "field_z", "boundary"},
        "rotor": {"kick_strength", "effective_planck", "basis_size", "period"},
        "oscillator": {"mass", "instability_rate", "truncation", "regular"},
    }
    _require(family in allowed, f"model.family must be one of {sorted(allowed)}, got {family!r}")
    unknown = set(block) - allowed[family] - {"family"}
    _require(not unknown, f"unknown model fields for family {family!r}: {sorted(unknown)}")
    return dict(block)


def _validate_operators_block(block: Any) -> dict:
    _require(isinstance(block, dict), "field operators must be a mapping")
    for key, spec in block.items():
        _require(key in ("w", "v", "a"), f"operators entries must be w, v or a, got {key!r}")
        _require(isinstance(spec, dict) and "label" in spec,
                 f"operators.{key} needs a label")
        site = spec.get("site", 0)
        _require(isinstance(site, int) and site >= 0,
                 f"operators.{key}.site must be a nonnegative integer")
    return dict(block)


def _validate_ensemble_block(block: Any) -> dict:
    _require(isinstance(block, dict), "field ensemble must be a mapping")
    kind = block.get("kind", "infinite_t")
    _require(kind in ("infinite_t", "gibbs", "pure"),
             f"ensemble.kind must be infinite_t, gibbs or pure, got {kind!r}")
    if kind == "gibbs":
        beta = block.get("beta")
        _require(isinstance(beta, (int, float)) and beta >= 0,
                 "ensemble.beta must be a nonnegative number")
    if kind == "pure":
        state = block.get("state") or {}
        _require(isinstance(state, dict), "ensemble.state must be a mapping")
        _require(any(k in state for k in ("packet", "basis_index", "bitstring", "uniform")),
                 "ensemble.state needs packet, basis_index, bitstring or uniform")
    return dict(block, kind=kind)


def _validate_grid_block(block: Any, model_block: dict) -> dict:
    _require(isinstance(block, dict), "field grid must be a mapping")
    if not block:
        return {}
    if "kicks" in block:
        kicks = block["kicks"]
        _require(isinstance(kicks, int) and kicks >= 1, "grid.kicks must be a positive integer")
        return {"kicks": kicks}
    for key in ("start", "stop", "num"):
        _require(key in block, f"grid needs start/stop/num or kicks; missing grid.{key}")
    start, stop, num = block["start"], block["stop"], block["num"]
    _require(isinstance(num, int) and num >= 1, "grid.num must be a positive integer")
    _require(stop > start, "grid.stop must exceed grid.start")
    if model_block.get("family") == "rotor":
        times = np.linspace(start, stop, num)
        offgrid = np.abs(times - np.rint(times)).max()
        _require(offgrid == 0 and start >= 0,
                 "grid.start/stop/num: Floquet models need nonnegative integer kick times "
                 "(use grid.kicks)")
    return {"start": float(start), "stop": float(stop), "num": num}


def _validate_analysis_block(block: Any) -> dict:
    _require(isinstance(block, dict), "field analysis must be a mapping")
    out = dict(block)
    fit = out.get("fit")
    if fit is not None:
        _require(isinstance(fit, dict), "analysis.fit must be a mapping")
        cf = fit.get("ceiling_fraction", 0.1)
        _require(isinstance(cf, (int, float)) and 0 < cf < 1,
                 "analysis.fit.ceiling_fraction must lie in (0, 1)")
    mss = out.get("mss")
    if mss is not None:
        _require(isinstance(mss, dict) and isinstance(mss.get("temperature"), (int, float))
                 and mss["temperature"] > 0,
                 "analysis.mss.temperature must be a positive number")
    tol = out.get("validation_tol", DEFAULT_VALIDATION_TOL)
    _require(isinstance(tol, (int, float)) and tol > 0,
             "analysis.validation_tol must be positive")
    out["validation_tol"] = float(tol)
    return out


def estimate_dimension(cfg: RunConfig) -> int:
    """Largest dense-matrix side the run will touch."""
    block = cfg.model
    family = block.get("family")
    if family == "chain":
        return 2 ** int(block.get("length", 2))
    if family == "rotor":
        return int(block.get("basis_size", 3))
    if family == "oscillator":
        # the truncation-convergence policy always runs N and 2N
        return 2 * int(block.get("truncation", InvertedOscillatorSpec().truncation))
    return 2  # model-free experiments (classical maps)


def check_memory(cfg: RunConfig) -> dict:
    dim = estimate_dimension(cfg)
    footprint = dim * dim * 16
    report = {"dimension": dim, "bytes_per_matrix": footprint,
              "cap_bytes": cfg.memory_cap_bytes}
    if footprint > cfg.memory_cap_bytes:
        raise ResourceError(
            f"estimated dense footprint {footprint / 1024 ** 3:.2f} GiB for dimension "
            f"{dim} exceeds the {cfg.memory_cap_bytes / 1024 ** 3:.2f} GiB cap")
    return report


def build_model(cfg: RunConfig) -> ModelInstance:
    block = cfg.model
    _require(bool(block), "experiment requires a model block")
    family = block["family"]
    fields = {k: v for k, v in block.items() if k != "family"}
    try:
        if family == "chain":
            return build_spin_chain(SpinChainSpec(**fields),
                                    memory_cap_bytes=cfg.memory_cap_bytes)
        if family == "rotor":
            return build_kicked_rotor(KickedRotorSpec(**fields))
        return build_inverted_oscillator(InvertedOscillatorSpec(**fields))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid model spec: {exc}")


def build_grid(cfg: RunConfig) -> TimeGrid:
    block = cfg.grid
    _require(bool(block), "experiment requires a grid block")
    if "kicks" in block:
        return TimeGrid.kicks(block["kicks"])
    return TimeGrid.linspace(block["start"], block["stop"], block["num"])


def build_state(cfg: RunConfig, model: ModelInstance):
    block = cfg.ensemble
    kind = block["kind"]
    if kind == "infinite_t":
        return maximally_mixed(model.space)
    if kind == "gibbs":
        _require(model.hamiltonian is not None,
                 "ensemble.kind gibbs needs a Hamiltonian model")
        return gibbs_state(model.hamiltonian, float(block["beta"]))
    state = block["state"]
    if "packet" in state:
        packet = state["packet"]
        center = packet.get("center", [0.0, 0.0])
        _require(isinstance(center, (list, tuple)) and len(center) == 2,
                 "ensemble.state.packet.center must be [position, momentum]")
        return coherent_wavepacket(model, (float(center[0]), float(center[1])),
                                   width=float(packet.get("width", 1.0)))
    dim = model.space.total_dim
    if "bitstring" in state:
        bits = str(state["bitstring"])
        _require(set(bits) <= {"0", "1"} and len(bits) == model.space.n_sites,
                 "ensemble.state.bitstring must be one bit per site")
        index = int(bits, 2)
    elif "uniform" in state:
        vec = np.ones(dim, dtype=complex)
        return PureState.from_vector(model.space, vec)
    else:
        index = state["basis_index"]
        _require(isinstance(index, int) and 0 <= index < dim,
                 f"ensemble.state.basis_index must lie in [0, {dim})")
    vec = np.zeros(dim, dtype=complex)
    vec[index] = 1.0
    return PureState(model.space, vec)


def resolve_output_dir(cfg: RunConfig, cli_override: Optional[str] = None) -> str:
    if cli_override:
        return cli_override
    if cfg.output_dir:
        return cfg.output_dir
    root = os.environ.get(OUTPUT_ROOT_ENV, "runs")
    return os.path.join(root, cfg.experiment)
