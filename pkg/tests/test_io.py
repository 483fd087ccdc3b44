import json
import os

import numpy as np
from hypothesis import given, strategies as st

from linespec.io import (
    atomic_write_text,
    measure_from_dict,
    measure_to_dict,
    measurement_from_dict,
    measurement_to_dict,
)
from linespec.measure import DiscreteMeasure, SamplingGrid, synthesize_measurement

finite = st.floats(-1e6, 1e6, allow_nan=False)


@given(st.lists(finite, min_size=1, max_size=6, unique=True), st.data())
def test_measure_round_trip_is_exact(ys, data):
    re = data.draw(st.lists(st.floats(0.5, 10), min_size=len(ys), max_size=len(ys)))
    im = data.draw(st.lists(finite, min_size=len(ys), max_size=len(ys)))
    mu = DiscreteMeasure(ys, np.array(re) + 1j * np.array(im))
    back = measure_from_dict(json.loads(json.dumps(measure_to_dict(mu))))
    assert back == mu


def test_measurement_round_trip_is_exact():
    mu = DiscreteMeasure([-0.5, 0.0, 0.5, 1.0], [1, -1, -1, 1])
    y = synthesize_measurement(mu, SamplingGrid(1.0, 20), 1e-7, seed=3)
    d = json.loads(json.dumps(measurement_to_dict(y)))
    assert set(d) == {"omega", "m", "sigma", "seed", "values_re", "values_im"}
    back = measurement_from_dict(d)
    assert back.values.tobytes() == y.values.tobytes()
    assert back.sigma == y.sigma and back.noise_seed == 3


def test_atomic_write_leaves_no_temp_files(tmp_path):
    target = tmp_path / "out.json"
    atomic_write_text(target, "first")
    atomic_write_text(target, "second")
    assert target.read_text() == "second"
    assert os.listdir(tmp_path) == ["out.json"]
