"""JSON and CSV serialization for measures and measurements."""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from .measure import DiscreteMeasure, Measurement, SamplingGrid


def _floats(x) -> list:
    # Python floats serialize via repr, which round-trips exactly
    return [float(v) for v in np.asarray(x).reshape(-1)]


def measure_to_dict(mu: DiscreteMeasure) -> dict:
    return {
        "supports": _floats(mu.supports),
        "amplitudes_re": _floats(mu.amplitudes.real),
        "amplitudes_im": _floats(mu.amplitudes.imag),
    }


def measure_from_dict(d: dict) -> DiscreteMeasure:
    amps = np.asarray(d["amplitudes_re"], float) + 1j * np.asarray(d.get("amplitudes_im", [0.0] * len(d["amplitudes_re"])), float)
    return DiscreteMeasure(np.asarray(d["supports"], float), amps)


def measurement_to_dict(y: Measurement) -> dict:
    return {
        "omega": float(y.grid.omega),
        "m": int(y.grid.m),
        "sigma": float(y.sigma),
        "seed": y.noise_seed,
        "values_re": _floats(y.values.real),
        "values_im": _floats(y.values.imag),
    }


def measurement_from_dict(d: dict) -> Measurement:
    values = np.asarray(d["values_re"], float) + 1j * np.asarray(d["values_im"], float)
    grid = SamplingGrid(float(d["omega"]), int(d["m"]))
    if values.size != grid.m:
        raise ValueError(f"expected {grid.m} values, got {values.size}")
    return Measurement(values, grid, float(d.get("sigma", 0.0)), d.get("seed"))


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj: Any) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2) + "\n")


def read_json(path) -> Any:
    with open(path) as fh:
        return json.load(fh)
