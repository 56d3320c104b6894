import json

import numpy as np
import pytest

from src.models.core import FieldState, SampledComplexFunction
from src.models.experiment import Family, Scenario
from src.models.scattering import DiscreteSpectrum, ScatteringData
from src.services import io
from src.services.errors import ConfigurationError, InvalidDataError


def test_field_csv_keeps_full_precision(tmp_path):
    state = FieldState(t=1.25, x_start=-1.0, dx=0.5,
                       u=np.array([1 / 3, 2j / 7, 0.1, 0.0, 1e-300]),
                       v=np.array([np.pi, -np.e, 0j, 1 + 1j, 5.0]))
    path = io.write_fields(str(tmp_path / "fields.csv"), state)
    with open(path) as f:
        assert f.readline().strip() == "# t=1.25"
        assert f.readline().strip() == "x,re_u,im_u,re_v,im_v"
    back = io.read_fields(path)
    assert back.t == 1.25
    assert np.array_equal(back.u, state.u)
    assert np.array_equal(back.v, state.v)
    assert np.allclose(back.x_grid, state.x_grid)


def test_scattering_json(tmp_path):
    grid = np.linspace(-2, 2, 5)
    r = SampledComplexFunction(grid, np.array([0, 0.1j, 0.2, -0.1j, 0]))
    data = ScatteringData(r=r, r_hat=r, spectrum=DiscreteSpectrum([complex(-0.5, 0.9)], [0.3 - 0.2j]))
    path = io.write_scattering(str(tmp_path / "scattering.json"), data)
    with open(path) as f:
        raw = json.load(f)
    assert io.schema_errors(raw, 'scattering') == []
    back = io.read_scattering(path)
    assert np.array_equal(back.r.values, r.values)
    assert back.spectrum.norming[0] == 0.3 - 0.2j


def test_parse_config_defaults():
    config = io.parse_config({'scenario': 'roundtrip'})
    assert config.scenario == Scenario.ROUNDTRIP
    assert config.initial.family == Family.GAUSSIAN
    assert config.tolerance('roundtrip') == 1e-3
    assert config.raw == {'scenario': 'roundtrip'}


@pytest.mark.parametrize("raw, field", [
    ({}, 'scenario'),
    ({'scenario': 'nope'}, 'scenario'),
    ({'scenario': 'roundtrip', 'dx': -1}, 'dx'),
    ({'scenario': 'roundtrip', 'speed': 1.5}, 'speed'),
    ({'scenario': 'roundtrip', 'tolerances': {'bogus': 1.0}}, 'tolerances.bogus'),
    ({'scenario': 'roundtrip', 'initial': {'family': 'solitons'}}, 'initial.eigenvalues'),
    ({'scenario': 'roundtrip', 'initial': {'eigenvalues': [[0.5, 0.5]], 'norming': [[1, 0]]}},
     'initial.eigenvalues[0]'),
    ({'scenario': 'roundtrip', 'x_window': [1, 0, 10]}, 'x_window'),
    ({'scenario': 'roundtrip', 'initial': {'width': 0}}, 'initial.width'),
    ({'scenario': 'roundtrip', 'times': [1.0, -2.0]}, 'times[1]'),
    ({'scenario': 'roundtrip', 'initial': {'eigenvalues': [[-0.5, 'a']]}}, 'initial.eigenvalues[0][1]'),
    ({'scenario': 'roundtrip', 'refinements': 'three'}, 'refinements'),
])
def test_parse_config_rejects(raw, field):
    with pytest.raises(ConfigurationError) as excinfo:
        io.parse_config(raw)
    assert excinfo.value.field == field
    assert excinfo.value.exit_code == 2


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        io.load_config(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigurationError):
        io.load_config(str(broken))


def test_summary_validation():
    summary = {'scenario': 'roundtrip', 'digest': 'abc', 'pass': True, 'exponent': None,
               'max_residual': 1e-4, 'checks': [], 'metrics': {}, 'files': ['summary.json']}
    io.validate_summary(summary)
    summary['checks'] = [{'name': 'x', 'value': 1.0, 'tolerance': 2.0, 'comparison': '<', 'pass': True}]
    with pytest.raises(InvalidDataError):
        io.validate_summary(summary)


def test_write_json_refuses_nan(tmp_path):
    with pytest.raises(ValueError):
        io.write_json(str(tmp_path / "bad.json"), {'value': float('nan')})
    assert io.finite_or_none(float('inf')) is None
    assert io.finite_or_none(2.5) == 2.5


def test_schema_errors_name_the_offending_field():
    errors = io.schema_errors({'initial': {'width': -1.0}, 'dx': 'fine'}, 'config')
    assert errors[0] == "scenario: 'scenario' is a required property"
    assert any(e.startswith("dx: ") for e in errors)
    assert any(e.startswith("initial.width: ") for e in errors)
    assert io.schema_errors({'scenario': 'roundtrip'}, 'config') == []
