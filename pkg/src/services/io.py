"""
File formats of the lab: field CSV, scattering-data JSON, plain tables and
the committed JSON schemas that configurations and summaries must satisfy.
"""

import csv
import json
import logging
import math
import os
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
from jsonschema import Draft7Validator, ValidationError
from jsonschema.exceptions import best_match

from src.models.core import FieldState, SampledComplexFunction
from src.models.experiment import ExperimentConfig
from src.models.scattering import DiscreteSpectrum, ScatteringData
from src.services.errors import ConfigurationError, InvalidDataError

logger = logging.getLogger(__name__)

SCHEMA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'schemas')
FIELD_COLUMNS = ['x', 're_u', 'im_u', 're_v', 'im_v']

def _format(value: float) -> str:
    return repr(float(value))


# -- schemas -----------------------------------------------------------------

@lru_cache(maxsize=8)
def load_schema(name: str) -> Dict[str, Any]:
    with open(os.path.join(SCHEMA_DIR, f"{name}.schema.json")) as f:
        return json.load(f)


@lru_cache(maxsize=8)
def schema_validator(name: str) -> Draft7Validator:
    return Draft7Validator(load_schema(name))


def field_name(error: ValidationError) -> Optional[str]:
    """Dotted config path of a validation error, e.g. ``initial.eigenvalues[0]``.

    A missing required key is reported under its own name, not its parent's.
    """
    path = list(error.absolute_path)
    if error.validator == 'required' and isinstance(error.instance, dict):
        missing = [k for k in error.validator_value if k not in error.instance]
        path.extend(missing[:1])
    name = ''
    for part in path:
        if isinstance(part, int):
            name += f"[{part}]"
        else:
            name += f".{part}" if name else str(part)
    return name or None


def schema_errors(instance: Any, name: str) -> List[str]:
    errors = sorted(schema_validator(name).iter_errors(instance), key=lambda e: list(e.absolute_path))
    return [f"{field_name(e) or '<root>'}: {e.message}" for e in errors]


def validate_summary(summary: Dict[str, Any]) -> None:
    errors = schema_errors(summary, 'summary')
    if errors:
        raise InvalidDataError("summary does not match its schema: " + "; ".join(errors))


def parse_config(raw: Any) -> ExperimentConfig:
    error = best_match(schema_validator('config').iter_errors(raw))
    if error is not None:
        raise ConfigurationError(error.message, field=field_name(error))
    return ExperimentConfig.from_dict(raw)


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as f:
            raw = json.load(f)
    except FileNotFoundError:
        raise ConfigurationError(f"configuration file {path} not found")
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"configuration file {path} is not valid JSON: {e}")
    return parse_config(raw)


# -- writers -----------------------------------------------------------------

def write_json(path: str, payload: Dict[str, Any]) -> str:
    with open(path, 'w') as f:
        f.write(json.dumps(payload, indent=2, sort_keys=True, allow_nan=False))
        f.write('\n')
    return path


def write_rows(path: str, rows: Iterable[Dict[str, Any]], columns: Sequence[str]) -> str:
    """Plain CSV table; floats written with full round-trip precision."""
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(row[c]) if isinstance(row[c], float) else row[c] for c in columns])
    return path


def write_fields(path: str, state: FieldState) -> str:
    x = state.x_grid
    with open(path, 'w', newline='') as f:
        f.write(f"# t={_format(state.t)}\n")
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(FIELD_COLUMNS)
        for xi, ui, vi in zip(x, state.u, state.v):
            writer.writerow([_format(xi), _format(ui.real), _format(ui.imag),
                             _format(vi.real), _format(vi.imag)])
    return path


def read_fields(path: str) -> FieldState:
    with open(path) as f:
        header = f.readline().strip()
        if not header.startswith('# t='):
            raise InvalidDataError(f"{path}: missing '# t=' header")
        t = float(header[4:])
        reader = csv.DictReader(f)
        rows = list(reader)
    if len(rows) < 2:
        raise InvalidDataError(f"{path}: needs at least two rows")
    x = np.array([float(r['x']) for r in rows])
    u = np.array([complex(float(r['re_u']), float(r['im_u'])) for r in rows])
    v = np.array([complex(float(r['re_v']), float(r['im_v'])) for r in rows])
    dx = float((x[-1] - x[0]) / (x.size - 1))
    return FieldState(t=t, x_start=float(x[0]), dx=dx, u=u, v=v)


def scattering_to_dict(data: ScatteringData) -> Dict[str, Any]:
    def samples(f: SampledComplexFunction):
        return [[float(p), float(q.real), float(q.imag)] for p, q in zip(f.grid, f.values)]
    return {'r': samples(data.r), 'r_hat': samples(data.r_hat),
            'spectrum': data.spectrum.to_dict()}


def scattering_from_dict(raw: Dict[str, Any]) -> ScatteringData:
    errors = schema_errors(raw, 'scattering')
    if errors:
        raise InvalidDataError("scattering data do not match their schema: " + "; ".join(errors))

    def samples(rows):
        arr = np.asarray(rows, dtype=float)
        return SampledComplexFunction(arr[:, 0], arr[:, 1] + 1j * arr[:, 2])

    entries = raw['spectrum']
    spectrum = DiscreteSpectrum(
        np.array([complex(*e['lambda']) for e in entries], dtype=complex),
        np.array([complex(*e['C']) for e in entries], dtype=complex),
    )
    return ScatteringData(r=samples(raw['r']), r_hat=samples(raw['r_hat']), spectrum=spectrum)


def write_scattering(path: str, data: ScatteringData) -> str:
    return write_json(path, scattering_to_dict(data))


def read_scattering(path: str) -> ScatteringData:
    with open(path) as f:
        return scattering_from_dict(json.load(f))


def finite_or_none(value: float):
    """JSON-safe float: NaN and infinities become null."""
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None
