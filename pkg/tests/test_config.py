import numpy as np
import pytest

from otoclab.config import (DEFAULT_VALIDATION_TOL, RunConfig, build_grid,
                            build_model, build_state, check_memory,
                            estimate_dimension, load_config,
                            resolve_output_dir, validate_config)
from otoclab.errors import ConfigError, ResourceError
from otoclab.hilbert import DensityMatrix, PureState


def raw_chain(**extra):
    base = {
        "experiment": "chain_otoc",
        "model": {"family": "chain", "length": 3, "coupling": 1.0,
                  "field_x": 1.05, "field_z": 0.5},
        "operators": {"w": {"label": "z", "site": 0},
                      "v": {"label": "z", "site": 2}},
        "grid": {"start": 0.0, "stop": 1.0, "num": 11},
    }
    base.update(extra)
    return base


def test_load_config_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(str(tmp_path / "missing.yaml"))
    bad = tmp_path / "bad.yaml"
    bad.write_text("experiment: [unclosed\n")
    with pytest.raises(ConfigError, match="parse error"):
        load_config(str(bad))
    listy = tmp_path / "list.yaml"
    listy.write_text("- a\n- b\n")
    with pytest.raises(ConfigError, match="mapping"):
        load_config(str(listy))


def test_load_config_roundtrip(tmp_path):
    import yaml
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(raw_chain(seed=7, threads=2)))
    cfg = load_config(str(path), known_experiments={"chain_otoc"})
    assert cfg.experiment == "chain_otoc"
    assert cfg.seed == 7 and cfg.threads == 2
    assert cfg.analysis["validation_tol"] == DEFAULT_VALIDATION_TOL
    echo = cfg.echo()
    assert echo["model"]["length"] == 3


def test_top_level_validation():
    with pytest.raises(ConfigError, match="unknown config keys"):
        validate_config(raw_chain(bogus=1))
    with pytest.raises(ConfigError, match="missing required field: experiment"):
        validate_config({"model": {"family": "chain"}})
    with pytest.raises(ConfigError, match="unknown experiment"):
        validate_config(raw_chain(), known_experiments={"something_else"})
    with pytest.raises(ConfigError, match="threads"):
        validate_config(raw_chain(threads=0))
    with pytest.raises(ConfigError, match="seed"):
        validate_config(raw_chain(seed="abc"))
    with pytest.raises(ConfigError, match="memory_cap_gib"):
        validate_config(raw_chain(memory_cap_gib=-1))


def test_model_block_validation():
    with pytest.raises(ConfigError, match="model.family"):
        validate_config(raw_chain(model={"length": 3}))
    with pytest.raises(ConfigError, match="model.family must be one of"):
        validate_config(raw_chain(model={"family": "lattice"}))
    with pytest.raises(ConfigError, match="unknown model fields"):
        validate_config(raw_chain(model={"family": "rotor", "length": 4}))


def test_operator_and_ensemble_validation():
    with pytest.raises(ConfigError, match="operators entries"):
        validate_config(raw_chain(operators={"x": {"label": "z"}}))
    with pytest.raises(ConfigError, match="needs a label"):
        validate_config(raw_chain(operators={"w": {"site": 0}}))
    with pytest.raises(ConfigError, match="site"):
        validate_config(raw_chain(operators={"w": {"label": "z", "site": -1}}))
    with pytest.raises(ConfigError, match="ensemble.kind"):
        validate_config(raw_chain(ensemble={"kind": "canonical"}))
    with pytest.raises(ConfigError, match="ensemble.beta"):
        validate_config(raw_chain(ensemble={"kind": "gibbs"}))
    with pytest.raises(ConfigError, match="ensemble.state"):
        validate_config(raw_chain(ensemble={"kind": "pure", "state": {}}))


def test_grid_validation():
    with pytest.raises(ConfigError, match="grid.kicks"):
        validate_config(raw_chain(grid={"kicks": 0}))
    with pytest.raises(ConfigError, match="missing grid.num"):
        validate_config(raw_chain(grid={"start": 0.0, "stop": 1.0}))
    with pytest.raises(ConfigError, match="grid.stop"):
        validate_config(raw_chain(grid={"start": 1.0, "stop": 0.0, "num": 5}))
    # Floquet models only support integer kick times
    rotor = {"family": "rotor", "kick_strength": 1.0,
             "effective_planck": 0.5, "basis_size": 31}
    with pytest.raises(ConfigError, match="grid.start/stop/num"):
        validate_config(raw_chain(model=rotor, operators={},
                                  grid={"start": 0.0, "stop": 1.5, "num": 4}))
    ok = validate_config(raw_chain(model=rotor, operators={},
                                   grid={"start": 0.0, "stop": 5.0, "num": 6}))
    assert ok.grid == {"start": 0.0, "stop": 5.0, "num": 6}


def test_analysis_validation():
    with pytest.raises(ConfigError, match="ceiling_fraction"):
        validate_config(raw_chain(analysis={"fit": {"ceiling_fraction": 1.2}}))
    with pytest.raises(ConfigError, match="mss.temperature"):
        validate_config(raw_chain(analysis={"mss": {"temperature": -0.5}}))
    with pytest.raises(ConfigError, match="validation_tol"):
        validate_config(raw_chain(analysis={"validation_tol": 0.0}))
    cfg = validate_config(raw_chain(analysis={"validation_tol": 1e-8}))
    assert cfg.analysis["validation_tol"] == 1e-8


def test_dimension_and_memory_estimates():
    chain = validate_config(raw_chain())
    assert estimate_dimension(chain) == 8
    rotor = validate_config({"experiment": "x",
                             "model": {"family": "rotor", "kick_strength": 1.0,
                                       "effective_planck": 0.5, "basis_size": 31}})
    assert estimate_dimension(rotor) == 31
    # oscillator runs both N and 2N, so the footprint is set by 2N
    osc = validate_config({"experiment": "x",
                           "model": {"family": "oscillator", "truncation": 128}})
    assert estimate_dimension(osc) == 256
    free = validate_config({"experiment": "x"})
    assert estimate_dimension(free) == 2

    report = check_memory(chain)
    assert report == {"dimension": 8, "bytes_per_matrix": 8 * 8 * 16,
                      "cap_bytes": chain.memory_cap_bytes}
    tight = validate_config(raw_chain(memory_cap_gib=1e-7))
    with pytest.raises(ResourceError, match="exceeds"):
        check_memory(tight)


def test_build_model_and_grid():
    cfg = validate_config(raw_chain())
    model = build_model(cfg)
    assert model.space.total_dim == 8
    grid = build_grid(cfg)
    assert len(grid) == 11 and grid.times[-1] == 1.0
    with pytest.raises(ConfigError, match="invalid model spec"):
        build_model(validate_config(raw_chain(model={"family": "chain",
                                                     "length": 1})))
    with pytest.raises(ConfigError, match="requires a model block"):
        build_model(validate_config({"experiment": "x"}))
    with pytest.raises(ConfigError, match="requires a grid block"):
        build_grid(validate_config({"experiment": "x"}))
    kicks = validate_config({"experiment": "x", "grid": {"kicks": 4}})
    assert np.array_equal(build_grid(kicks).times, [0, 1, 2, 3, 4])


def test_build_state_variants():
    cfg = validate_config(raw_chain())
    model = build_model(cfg)

    rho = build_state(cfg, model)
    assert isinstance(rho, DensityMatrix)
    assert np.allclose(rho.matrix, np.eye(8) / 8)

    gibbs_cfg = validate_config(raw_chain(ensemble={"kind": "gibbs", "beta": 0.7}))
    gibbs = build_state(gibbs_cfg, model)
    assert np.isclose(np.trace(gibbs.matrix).real, 1.0)

    bits = validate_config(raw_chain(ensemble={"kind": "pure",
                                               "state": {"bitstring": "011"}}))
    psi = build_state(bits, model)
    assert isinstance(psi, PureState)
    assert psi.amplitudes[3] == 1.0

    uniform = validate_config(raw_chain(ensemble={"kind": "pure",
                                                  "state": {"uniform": True}}))
    flat = build_state(uniform, model)
    assert np.allclose(np.abs(flat.amplitudes), 1.0 / np.sqrt(8))

    with pytest.raises(ConfigError, match="bitstring"):
        build_state(validate_config(raw_chain(
            ensemble={"kind": "pure", "state": {"bitstring": "01"}})), model)
    with pytest.raises(ConfigError, match="basis_index"):
        build_state(validate_config(raw_chain(
            ensemble={"kind": "pure", "state": {"basis_index": 99}})), model)

    rotor_cfg = validate_config({
        "experiment": "x",
        "model": {"family": "rotor", "kick_strength": 1.0,
                  "effective_planck": 0.5, "basis_size": 31},
        "ensemble": {"kind": "gibbs", "beta": 1.0},
    })
    rotor = build_model(rotor_cfg)
    with pytest.raises(ConfigError, match="needs a Hamiltonian"):
        build_state(rotor_cfg, rotor)


def test_resolve_output_dir(monkeypatch):
    cfg = RunConfig(experiment="demo")
    monkeypatch.delenv("OTOCLAB_OUTPUT", raising=False)
    assert resolve_output_dir(cfg) == "runs/demo"
    monkeypatch.setenv("OTOCLAB_OUTPUT", "/tmp/elsewhere")
    assert resolve_output_dir(cfg) == "/tmp/elsewhere/demo"
    cfg.output_dir = "picked"
    assert resolve_output_dir(cfg) == "picked"
    assert resolve_output_dir(cfg, cli_override="cli-wins") == "cli-wins"
