"""
Experiment configuration: one JSON document per run, parsed and validated
into an ExperimentConfig.
"""

import copy
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from config import Config
from src.services.errors import ConfigurationError


class Scenario(Enum):
    RADIATION_ASYMPTOTICS = "radiation_asymptotics"
    SOLITON_TRACK = "soliton_track"
    TWO_SOLITON_RESOLUTION = "two_soliton_resolution"
    ROUNDTRIP = "roundtrip"
    B_EQUALITY = "b_equality"


class Family(Enum):
    GAUSSIAN = "gaussian"            # u0 = A exp(-((x-c)/w)^2), v0 = A_v exp(-((x-c)/w)^2)
    SOLITONS = "solitons"            # reflectionless data {lambda_j, C_j}
    SOLITONS_PLUS_GAUSSIAN = "solitons_plus_gaussian"
    ANALYTIC_REFLECTION = "analytic_reflection"  # closed-form r(w), r^(z) = r(1/z)/z


def _number(raw: Dict[str, Any], key: str, default, path: str, positive: bool = False) -> float:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"expected a number, got {value!r}", field=f"{path}{key}")
    if positive and value <= 0:
        raise ConfigurationError(f"must be positive, got {value}", field=f"{path}{key}")
    return float(value)


def _integer(raw: Dict[str, Any], key: str, default, path: str, minimum: int = 1) -> int:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigurationError(f"expected an integer >= {minimum}, got {value!r}", field=f"{path}{key}")
    return value


def _number_list(raw: Dict[str, Any], key: str, default, path: str, positive: bool = True) -> List[float]:
    value = raw.get(key, default)
    if not isinstance(value, list) or not value:
        raise ConfigurationError("expected a non-empty list of numbers", field=f"{path}{key}")
    out = []
    for i, item in enumerate(value):
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigurationError(f"expected a number, got {item!r}", field=f"{path}{key}[{i}]")
        if positive and item <= 0:
            raise ConfigurationError(f"must be positive, got {item}", field=f"{path}{key}[{i}]")
        out.append(float(item))
    return out


def _complex_list(raw: Dict[str, Any], key: str, path: str) -> List[complex]:
    value = raw.get(key, [])
    if not isinstance(value, list):
        raise ConfigurationError("expected a list of [re, im] pairs", field=f"{path}{key}")
    out = []
    for i, pair in enumerate(value):
        if (not isinstance(pair, list) or len(pair) != 2
                or not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in pair)):
            raise ConfigurationError(f"expected [re, im], got {pair!r}", field=f"{path}{key}[{i}]")
        out.append(complex(pair[0], pair[1]))
    return out


def _grid(raw: Dict[str, Any], key: str, default: Tuple[float, float, int], path: str) -> Tuple[float, float, int]:
    value = raw.get(key, list(default))
    if (not isinstance(value, list) or len(value) != 3
            or not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in value)
            or not value[0] < value[1] or not isinstance(value[2], int) or value[2] < 3):
        raise ConfigurationError(f"expected [lo, hi, count] with lo < hi and count >= 3, got {value!r}",
                                 field=f"{path}{key}")
    return float(value[0]), float(value[1]), int(value[2])


@dataclass(frozen=True)
class InitialData:
    family: Family
    amplitude: float = 0.1
    v_amplitude: Optional[float] = None
    width: float = 1.0
    center: float = 0.0
    alpha: float = 0.0
    eigenvalues: List[complex] = field(default_factory=list)
    norming: List[complex] = field(default_factory=list)

    @classmethod
    def from_dict(cls, raw: Any, path: str = 'initial.') -> 'InitialData':
        if not isinstance(raw, dict):
            raise ConfigurationError("expected an object", field=path.rstrip('.'))
        try:
            family = Family(raw.get('family', Family.GAUSSIAN.value))
        except ValueError:
            raise ConfigurationError(f"unknown family {raw.get('family')!r}", field=f"{path}family")
        eigenvalues = _complex_list(raw, 'eigenvalues', path)
        norming = _complex_list(raw, 'norming', path)
        if len(eigenvalues) != len(norming):
            raise ConfigurationError("eigenvalues and norming differ in length", field=f"{path}norming")
        for i, lam in enumerate(eigenvalues):
            if not (lam.real < 0 < lam.imag):
                raise ConfigurationError(f"{lam} is not in the open second quadrant",
                                         field=f"{path}eigenvalues[{i}]")
        if family in (Family.SOLITONS, Family.SOLITONS_PLUS_GAUSSIAN) and not eigenvalues:
            raise ConfigurationError("soliton families need eigenvalues", field=f"{path}eigenvalues")
        v_amplitude = raw.get('v_amplitude')
        if v_amplitude is not None:
            v_amplitude = _number(raw, 'v_amplitude', None, path)
        return cls(
            family=family,
            amplitude=_number(raw, 'amplitude', 0.1, path),
            v_amplitude=v_amplitude,
            width=_number(raw, 'width', 1.0, path, positive=True),
            center=_number(raw, 'center', 0.0, path),
            alpha=_number(raw, 'alpha', 0.0, path),
            eigenvalues=eigenvalues,
            norming=norming,
        )

    def to_dict(self) -> dict:
        return {
            'family': self.family.value,
            'amplitude': self.amplitude,
            'v_amplitude': self.v_amplitude,
            'width': self.width,
            'center': self.center,
            'alpha': self.alpha,
            'eigenvalues': [[z.real, z.imag] for z in self.eigenvalues],
            'norming': [[z.real, z.imag] for z in self.norming],
        }


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario
    initial: InitialData
    dx: float = Config.DX
    domain: Tuple[float, float] = (-16.0, 16.0)
    times: List[float] = field(default_factory=lambda: [10.0])
    taus: List[float] = field(default_factory=lambda: [50.0, 100.0, 200.0, 400.0])
    speed: float = 0.2
    speed_count: int = 50
    speed_limit: float = 0.9
    refinements: int = 3
    x_window: Tuple[float, float, int] = (-8.0, 8.0, 257)
    w_grid: Tuple[float, float, int] = Config.W_GRID
    z_grid: Tuple[float, float, int] = Config.Z_GRID
    contour: Tuple[float, float, int] = Config.CONTOUR
    search_box: Tuple[float, float, float, float] = Config.SEARCH_BOX
    with_spectrum: bool = True
    output_dir: str = Config.OUTPUT_DIR
    tolerances: Dict[str, float] = field(default_factory=lambda: dict(Config.TOLERANCES))
    raw: Dict[str, Any] = field(default_factory=dict, compare=False)

    @classmethod
    def from_dict(cls, raw: Any) -> 'ExperimentConfig':
        if not isinstance(raw, dict):
            raise ConfigurationError("configuration must be a JSON object")
        if 'scenario' not in raw:
            raise ConfigurationError("missing", field='scenario')
        try:
            scenario = Scenario(raw['scenario'])
        except ValueError:
            raise ConfigurationError(f"unknown scenario {raw['scenario']!r}", field='scenario')

        domain = raw.get('domain', [-16.0, 16.0])
        if (not isinstance(domain, list) or len(domain) != 2
                or not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in domain)
                or not domain[0] < domain[1]):
            raise ConfigurationError(f"expected [lo, hi] with lo < hi, got {domain!r}", field='domain')

        box = raw.get('search_box', list(Config.SEARCH_BOX))
        if (not isinstance(box, list) or len(box) != 4
                or not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in box)
                or not (box[0] < box[1] and 0 < box[2] < box[3])):
            raise ConfigurationError(f"expected [re_min, re_max, im_min, im_max], got {box!r}",
                                     field='search_box')

        tolerances = dict(Config.TOLERANCES)
        overrides = raw.get('tolerances', {})
        if not isinstance(overrides, dict):
            raise ConfigurationError("expected an object", field='tolerances')
        for key, value in overrides.items():
            if key not in tolerances:
                raise ConfigurationError("unknown tolerance", field=f"tolerances.{key}")
            tolerances[key] = _number(overrides, key, None, 'tolerances.', positive=True)

        with_spectrum = raw.get('with_spectrum', True)
        if not isinstance(with_spectrum, bool):
            raise ConfigurationError("expected true or false", field='with_spectrum')
        output_dir = raw.get('output_dir', Config.OUTPUT_DIR)
        if not isinstance(output_dir, str) or not output_dir:
            raise ConfigurationError("expected a directory path", field='output_dir')

        speed = _number(raw, 'speed', 0.2, '')
        if not -1 < speed < 1:
            raise ConfigurationError(f"must lie in (-1, 1), got {speed}", field='speed')
        speed_limit = _number(raw, 'speed_limit', 0.9, '', positive=True)
        if speed_limit >= 1:
            raise ConfigurationError(f"must lie in (0, 1), got {speed_limit}", field='speed_limit')

        return cls(
            scenario=scenario,
            initial=InitialData.from_dict(raw.get('initial', {})),
            dx=_number(raw, 'dx', Config.DX, '', positive=True),
            domain=(float(domain[0]), float(domain[1])),
            times=_number_list(raw, 'times', [10.0], ''),
            taus=_number_list(raw, 'taus', [50.0, 100.0, 200.0, 400.0], ''),
            speed=speed,
            speed_count=_integer(raw, 'speed_count', 50, ''),
            speed_limit=speed_limit,
            refinements=_integer(raw, 'refinements', 3, '', minimum=2),
            x_window=_grid(raw, 'x_window', (-8.0, 8.0, 257), ''),
            w_grid=_grid(raw, 'w_grid', Config.W_GRID, ''),
            z_grid=_grid(raw, 'z_grid', Config.Z_GRID, ''),
            contour=_grid(raw, 'contour', Config.CONTOUR, ''),
            search_box=tuple(float(b) for b in box),
            with_spectrum=with_spectrum,
            output_dir=output_dir,
            tolerances=tolerances,
            raw=copy.deepcopy(raw),
        )

    def tolerance(self, name: str) -> float:
        return self.tolerances[name]
