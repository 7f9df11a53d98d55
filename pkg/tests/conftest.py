import json
from pathlib import Path

import pytest

from otoclab import cli

REPO_ROOT = Path(__file__).resolve().parents[1]
PRESET_DIR = REPO_ROOT / "presets"

PRESET_NAMES = [
    "single_qubit_check", "chain_otoc", "chain_spreading",
    "chain_entropy_vs_otoc", "integrable_vs_chaotic", "inverted_oscillator",
    "island_vs_sea", "ehrenfest_scaling", "mss_report", "cat_map_koopman",
    "classical_lyapunov", "recurrence_demo",
]


def preset_path(name: str) -> Path:
    return PRESET_DIR / f"{name}.yaml"


@pytest.fixture(scope="session")
def run_preset(tmp_path_factory):
    """Run a preset once per session; returns (output_dir, report dict)."""
    root = tmp_path_factory.mktemp("preset-runs")
    cache = {}

    def _run(name: str):
        if name not in cache:
            out = root / name
            rc = cli.main(["run", str(preset_path(name)),
                           "--output-dir", str(out)])
            assert rc == 0, f"preset {name} exited with code {rc}"
            report = json.loads((out / "report.json").read_text())
            cache[name] = (out, report)
        return cache[name]

    return _run
