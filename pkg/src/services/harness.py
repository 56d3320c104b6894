"""
Experiment orchestration: builds initial data, drives the numerical modules
through one of the verification scenarios and writes plot-ready tables, a
JSON summary and a plain-text log into a run directory named after the
configuration digest.
"""

import hashlib
import json
import logging
import math
import os
from contextlib import contextmanager
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from src.models.core import AnalyticComplexFunction, FieldState
from src.models.experiment import ExperimentConfig, Family, Scenario
from src.models.scattering import ScatteringData
from src.models.solitons import soliton_data
from src.services import io
from src.services.asymptotics import (
    delta0_pm, delta_fn, endpoint_limit_error, f_pm, f_pm_from_coefficients, f_pm_w_side,
    gamma_modulus_defect, half_plane_violation, kappa_hat, predict_fields, prediction_sweep,
    z_side_coefficients,
)
from src.services.core import cone_coords
from src.services.errors import ConfigurationError, DomainError, ResolutionError
from src.services.rhp import contour_grid, reconstruct_fields
from src.services.scattering import (
    default_grid, evolve_scattering, scattering_data, transformed_relation_defect, transition_w,
    trim_to_support,
)
from src.services.simulator import evolve, padded, sample_at
from src.services.solitons import (
    mtm_residual, n_soliton, one_soliton, one_soliton_parameters, resolution_prediction,
    soliton_fields,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(levelname)s %(name)s: %(message)s'
ANALYTIC_SUPPORT = 40.0
WINDOW_WIDTHS = 8.0
TRANSFORMED_NODES = 64
GAMMA_SWEEP = (1e-3, 2.0, 400)
HALF_PLANE_NODES = np.linspace(-1.0, 1.0, 41)[1:-1]
HALF_PLANE_POINTS = (0.5j, -0.5j, 0.5 + 0.25j, -0.5 - 0.25j)


# -- initial data ------------------------------------------------------------

def _gaussian(config: ExperimentConfig, x: NDArray) -> Tuple[NDArray, NDArray]:
    init = config.initial
    profile = np.exp(-((x - init.center) / init.width) ** 2)
    v_amplitude = init.amplitude if init.v_amplitude is None else init.v_amplitude
    return (init.amplitude * profile).astype(complex), (v_amplitude * profile).astype(complex)


def _solitons(config: ExperimentConfig, t: float, x: NDArray) -> Tuple[NDArray, NDArray]:
    init = config.initial
    if len(init.eigenvalues) == 1:
        return one_soliton(init.eigenvalues[0], init.norming[0], t, x)
    return soliton_fields(soliton_data(zip(init.eigenvalues, init.norming)), t, x)


def family_fields(config: ExperimentConfig, x) -> Tuple[NDArray, NDArray]:
    """(u0, v0) of the configured initial-data family on the points x."""
    x = np.asarray(x, dtype=float)
    family = config.initial.family
    if family == Family.GAUSSIAN:
        return _gaussian(config, x)
    if family == Family.SOLITONS:
        return _solitons(config, 0.0, x)
    if family == Family.SOLITONS_PLUS_GAUSSIAN:
        su, sv = _solitons(config, 0.0, x)
        gu, gv = _gaussian(config, x)
        return su + gu, sv + gv
    raise ConfigurationError(f"family '{family.value}' has no field representation",
                             field='initial.family')


def initial_fields(config: ExperimentConfig, dx: Optional[float] = None) -> FieldState:
    dx = config.dx if dx is None else dx
    lo, hi = config.domain
    n = int(round((hi - lo) / dx)) + 1
    x = lo + dx * np.arange(n)
    u, v = family_fields(config, x)
    return FieldState(t=0.0, x_start=lo, dx=dx, u=u, v=v)


def analytic_reflection(config: ExperimentConfig) -> Tuple[AnalyticComplexFunction, AnalyticComplexFunction]:
    """r(w) = A exp(-(w - 1/w)^2/4 + i alpha w) and r^(z) = r(1/z)/z."""
    amplitude, alpha = config.initial.amplitude, config.initial.alpha

    def r(w):
        w = np.asarray(w, dtype=float)
        safe = np.where(w == 0, 1.0, w)
        out = amplitude * np.exp(-0.25 * (safe - 1.0 / safe) ** 2 + 1j * alpha * safe)
        return np.where(w == 0, 0.0, out)

    def r_hat(z):
        z = np.asarray(z, dtype=float)
        safe = np.where(z == 0, 1.0, z)
        return np.where(z == 0, 0.0, r(1.0 / safe) / safe)

    support = (-ANALYTIC_SUPPORT, ANALYTIC_SUPPORT)
    return AnalyticComplexFunction(r, support), AnalyticComplexFunction(r_hat, support)


def scatter(config: ExperimentConfig, state: FieldState) -> ScatteringData:
    return scattering_data(state, default_grid(config.w_grid), default_grid(config.z_grid),
                           search_box=config.search_box, with_spectrum=config.with_spectrum)


def _on_step(t: float, dx: float) -> float:
    """Nearest multiple of dx."""
    return round(t / dx) * dx


# -- checks and fits ---------------------------------------------------------

def fit_decay(points: Sequence[Tuple[float, float]]) -> float:
    """p in residual ~ tau^{-p}, by least squares on log residual vs log tau."""
    if len(points) < 4:
        raise DomainError(f"decay fit needs at least 4 points, got {len(points)}")
    tau = np.array([p[0] for p in points], dtype=float)
    residual = np.array([p[1] for p in points], dtype=float)
    if np.any(tau <= 0) or np.any(residual <= 0):
        raise DomainError("decay fit needs positive tau and residual values")
    slope = np.polyfit(np.log(tau), np.log(residual), 1)[0]
    return float(-slope) + 0.0


def check(name: str, value: float, tolerance: float, comparison: str = '<=') -> Dict[str, Any]:
    value = io.finite_or_none(value)
    if value is None:
        passed = False
    elif comparison == '<=':
        passed = value <= tolerance
    else:
        passed = value >= tolerance
    return {'name': name, 'value': value, 'tolerance': float(tolerance),
            'comparison': comparison, 'pass': bool(passed)}


def config_digest(config: ExperimentConfig) -> str:
    canonical = json.dumps(config.raw, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


class Outcome:
    """Collects what a scenario produces."""

    def __init__(self, run_dir: str):
        self.run_dir = run_dir
        self.checks: List[Dict[str, Any]] = []
        self.metrics: Dict[str, Any] = {}
        self.quarantine: Dict[str, Any] = {}
        self.files: List[str] = []
        self.exponent: Optional[float] = None
        self.max_residual: Optional[float] = None

    def path(self, name: str) -> str:
        self.files.append(name)
        return os.path.join(self.run_dir, name)

    def add(self, *checks: Dict[str, Any]) -> None:
        self.checks.extend(checks)


# -- scenarios ---------------------------------------------------------------

def run_radiation_asymptotics(config: ExperimentConfig, out: Outcome) -> None:
    state0 = initial_fields(config)
    data = scatter(config, state0)
    if not data.soliton_free:
        raise ResolutionError(f"radiation scenario needs soliton-free data, found "
                              f"{len(data.spectrum)} eigenvalue(s)")
    io.write_scattering(out.path('scattering.json'), data)

    gamma = 1.0 / math.sqrt(1.0 - config.speed ** 2)
    times = sorted(_on_step(tau * gamma, config.dx) for tau in config.taus)
    state = padded(state0, times[-1] + abs(config.speed) * times[-1])
    rows, fit_points = [], []
    for t in times:
        state = evolve(state, t)
        k = int(round((config.speed * t - state.x_start) / state.dx))
        x = state.x_start + k * state.dx
        u, v = sample_at(state, x)
        u_as, v_as = predict_fields(data.r_hat, t, x)
        residual = abs(u - u_as)
        tau = cone_coords(t, x).tau
        fit_points.append((tau, residual))
        rows.append({'t': t, 'x': x, 'tau': tau,
                     're_u': u.real, 'im_u': u.imag, 're_v': v.real, 'im_v': v.imag,
                     're_u_as': u_as.real, 'im_u_as': u_as.imag,
                     're_v_as': v_as.real, 'im_v_as': v_as.imag, 'residual': residual,
                     'residual_v': abs(v - v_as)})
        logger.info(f"tau = {tau:.3f}: residual {residual:.3e}")
    io.write_rows(out.path('residuals.csv'), rows, list(rows[0].keys()))

    out.exponent = fit_decay(fit_points)
    out.max_residual = max(p[1] for p in fit_points)
    out.metrics.update({'speed': config.speed, 'charge_drift': state.metadata['charge_drift'],
                        'positivity': data.positivity})
    out.add(check('decay_exponent', out.exponent, config.tolerance('decay_exponent'), '>='))


def run_soliton_track(config: ExperimentConfig, out: Outcome) -> None:
    init = config.initial
    if init.family != Family.SOLITONS:
        raise ConfigurationError("soliton_track needs the 'solitons' family", field='initial.family')
    lam, norming = init.eigenvalues[0], init.norming[0]
    spectrum = soliton_data([(lam, norming)])
    t_final = config.times[-1]
    params = one_soliton_parameters(lam, norming)
    out.metrics['parameters'] = params.to_dict()

    xs = default_grid(config.x_window)
    linear = n_soliton(spectrum, t_final, xs)
    closed_u, closed_v = one_soliton(lam, norming, t_final, xs)
    exactness = float(max(np.max(np.abs(linear.u - closed_u)), np.max(np.abs(linear.v - closed_v))))
    out.add(check('soliton_exactness', exactness, config.tolerance('soliton_exactness')))
    out.metrics['pde_residual'] = mtm_residual(
        lambda t, x: one_soliton(lam, norming, t, x), t_final, xs, 1e-3)

    errors, drifts = [], []
    for level in range(config.refinements):
        dx = config.dx / 2 ** level
        t_step = _on_step(t_final, dx)
        state = evolve(padded(initial_fields(config, dx), t_step), t_step)
        exact_u, exact_v = one_soliton(lam, norming, state.t, state.x_grid)
        err = float(max(np.max(np.abs(state.u - exact_u)), np.max(np.abs(state.v - exact_v))))
        errors.append(err)
        drifts.append(state.metadata['charge_drift'])
        if level == 0:
            io.write_fields(out.path('fields.csv'), state)
        logger.info(f"dx = {dx:.3e}: sup error {err:.3e}")
    orders = [math.log2(a / b) for a, b in zip(errors, errors[1:]) if a > 0 and b > 0]
    order = min(orders) if orders else float('nan')
    io.write_rows(out.path('convergence.csv'),
                  [{'dx': config.dx / 2 ** k, 'error': e, 'charge_drift': d}
                   for k, (e, d) in enumerate(zip(errors, drifts))],
                  ['dx', 'error', 'charge_drift'])

    out.max_residual = errors[0]
    out.metrics.update({'errors': errors, 'orders': orders})
    out.add(check('soliton_track', errors[0], config.tolerance('soliton_track')),
            check('convergence_order', order, config.tolerance('convergence_order'), '>='),
            check('charge_drift', drifts[0], config.tolerance('charge_drift')))


def run_two_soliton_resolution(config: ExperimentConfig, out: Outcome) -> None:
    if config.initial.family not in (Family.SOLITONS, Family.SOLITONS_PLUS_GAUSSIAN):
        raise ConfigurationError("two_soliton_resolution needs a soliton family", field='initial.family')
    state0 = initial_fields(config)
    data = scatter(config, state0)
    io.write_scattering(out.path('scattering.json'), data)
    count = len(data.spectrum)
    out.metrics['eigenvalues_found'] = count
    if count == 0:
        raise ResolutionError("no eigenvalues found in the initial data")

    predictions = [resolution_prediction(data, j) for j in range(count)]
    out.metrics['modified_constants'] = [p.to_dict() for p in predictions]
    times = sorted(_on_step(t, config.dx) for t in config.times)
    speeds = [abs(one_soliton_parameters(lam, 1.0).velocity) for lam in data.spectrum.eigenvalues]
    state = padded(state0, times[-1] * max(speeds + [0.0]) + times[-1] * 0.1)

    rows = []
    ratios = []
    constants = {j: [] for j in range(count)}
    for t in times:
        state = evolve(state, t)
        x = state.x_grid
        for j, visible in enumerate(predictions):
            lam = data.spectrum.eigenvalues[j]
            k = int(np.nonzero(visible.eigenvalues == lam)[0][0])
            params = one_soliton_parameters(lam, visible.norming[k])
            center = params.x0 + params.velocity * t
            half = WINDOW_WIDTHS / params.energy
            window = (x >= center - half) & (x <= center + half)
            if len(visible) == 1:
                eu, ev = one_soliton(lam, visible.norming[k], t, x[window])
            else:
                eu, ev = soliton_fields(visible, t, x[window])
            err = float(max(np.max(np.abs(state.u[window] - eu)), np.max(np.abs(state.v[window] - ev))))
            constants[j].append(err * math.sqrt(t))
            rows.append({'t': t, 'soliton': j, 'center': center, 'error': err, 'K': err * math.sqrt(t)})
            logger.info(f"t = {t:g}, soliton {j}: error {err:.3e}, K = {err * math.sqrt(t):.3e}")
    io.write_rows(out.path('resolution.csv'), rows, ['t', 'soliton', 'center', 'error', 'K'])

    for j, ks in constants.items():
        ratio = max(ks) / min(ks) if min(ks) > 0 else float('inf')
        ratios.append(ratio)
        out.add(check(f'resolution_k_ratio_{j}', ratio, config.tolerance('resolution_k_ratio')))
    out.max_residual = max(r['error'] for r in rows)
    out.metrics.update({'k_constants': {str(j): ks for j, ks in constants.items()},
                        'charge_drift': state.metadata['charge_drift']})


def run_roundtrip(config: ExperimentConfig, out: Outcome) -> None:
    state0 = initial_fields(config)
    data = scatter(config, state0)
    io.write_scattering(out.path('scattering.json'), data)

    trimmed = trim_to_support(state0)
    w = default_grid(config.w_grid)
    unitarity = float(np.nanmax(transition_w(trimmed, w).unitarity_defect()))
    z_all = default_grid(config.z_grid)
    lo = max(abs(config.w_grid[0]), abs(config.w_grid[1])) ** -1
    usable = z_all[(np.abs(z_all) >= lo) & (z_all != 0)]
    z_nodes = usable[np.linspace(0, usable.size - 1, TRANSFORMED_NODES).astype(int)]
    relation = transformed_relation_defect(trimmed, z_nodes)
    out.add(check('unitarity', unitarity, config.tolerance('unitarity')),
            check('transformed_relation', relation, config.tolerance('transformed_relation')))

    xs = default_grid(config.x_window)
    rebuilt = reconstruct_fields(data, 0.0, xs, with_poles=not data.soliton_free,
                                 contour=contour_grid(config.contour))
    exact_u, exact_v = family_fields(config, xs)
    error = float(max(np.nanmax(np.abs(rebuilt.u - exact_u)), np.nanmax(np.abs(rebuilt.v - exact_v))))
    io.write_fields(out.path('reconstruction.csv'), rebuilt)
    out.metrics['reconstruction_failures'] = len(rebuilt.metadata['failures'])
    out.add(check('roundtrip', error if not rebuilt.metadata['failures'] else float('nan'),
                  config.tolerance('roundtrip')))

    t_lin = _on_step(config.times[0], config.dx)
    evolved = evolve(padded(state0, t_lin), t_lin)
    direct = scatter(config, evolved)
    flowed = evolve_scattering(data, t_lin)
    lin_r = float(max(np.max(np.abs(direct.r.values - flowed.r.values)),
                      np.max(np.abs(direct.r_hat.values - flowed.r_hat.values))))
    out.add(check('linearization_r', lin_r, config.tolerance('linearization_r')))
    if len(data.spectrum) and len(direct.spectrum) == len(data.spectrum):
        rel = np.abs(direct.spectrum.norming - flowed.spectrum.norming) / np.abs(flowed.spectrum.norming)
        out.add(check('linearization_c', float(np.max(rel)), config.tolerance('linearization_c')))
    out.max_residual = error
    out.metrics.update({'linearization_time': t_lin, 'positivity': data.positivity})


def report_half_plane(nu: Callable, points: Sequence[complex], out: Outcome, tolerance: float) -> None:
    """Half-plane bound on delta: a check when nu keeps one sign, quarantined otherwise."""
    values = np.asarray(nu(HALF_PLANE_NODES), dtype=float)
    if np.all(values >= 0) or np.all(values <= 0):
        sign = 1 if np.all(values >= 0) else -1
        out.add(check('half_plane', half_plane_violation(nu, points, sign), tolerance))
    else:
        logger.info("nu changes sign on (-1, 1); half-plane bound quarantined")
        out.quarantine['half_plane_violation'] = half_plane_violation(nu, points)


def run_b_equality(config: ExperimentConfig, out: Outcome) -> None:
    if config.initial.family == Family.ANALYTIC_REFLECTION:
        r, r_hat = analytic_reflection(config)
    else:
        data = scatter(config, initial_fields(config))
        r, r_hat = data.r, data.r_hat

    speeds = np.linspace(-config.speed_limit, config.speed_limit, config.speed_count + 2)[1:-1]
    rows, worst, worst_coeff = [], 0.0, 0.0
    for s in speeds:
        closed = f_pm(r_hat, float(s))
        w_route = f_pm_w_side(r, float(s))
        coeff = f_pm_from_coefficients(z_side_coefficients(r_hat, closed.z0), closed.z0, float(s))
        diff = max(abs(closed.f_minus - w_route.f_minus), abs(closed.f_plus - w_route.f_plus))
        diff_coeff = max(abs(closed.f_minus - coeff.f_minus), abs(closed.f_plus - coeff.f_plus))
        worst, worst_coeff = max(worst, diff), max(worst_coeff, diff_coeff)
        rows.append({'speed': float(s),
                     're_f_minus': closed.f_minus.real, 'im_f_minus': closed.f_minus.imag,
                     're_f_plus': closed.f_plus.real, 'im_f_plus': closed.f_plus.imag,
                     're_f_minus_w': w_route.f_minus.real, 'im_f_minus_w': w_route.f_minus.imag,
                     're_f_plus_w': w_route.f_plus.real, 'im_f_plus_w': w_route.f_plus.imag,
                     'difference': diff})
    io.write_rows(out.path('stationary_amplitudes.csv'), rows, list(rows[0].keys()))
    out.add(check('b_equality', worst, config.tolerance('b_equality')))
    out.metrics['coefficient_route_difference'] = worst_coeff

    z0 = cone_coords(1.0, config.speed * 1.0).z0
    nu = lambda s: kappa_hat(r_hat, z0 * np.asarray(s, dtype=float))
    interior = np.linspace(-0.95, 0.95, 39)
    jump = 0.0
    for zeta in interior:
        plus, minus = delta_fn(nu, zeta, side=1), delta_fn(nu, zeta, side=-1)
        factor = math.exp(2 * math.pi * float(nu(np.array([zeta]))[0]))
        jump = max(jump, abs(plus - minus * factor))
    d_minus, d_plus = delta0_pm(nu)
    unimodular = max(abs(abs(d_minus) - 1.0), abs(abs(d_plus) - 1.0))
    distances = [1e-2 / 2 ** k for k in range(5)]
    rates = []
    for end in (-1, 1):
        errs = [endpoint_limit_error(nu, d, end=end) for d in distances]
        rates.append(fit_decay([(1.0 / d, e) for d, e in zip(distances, errs)]))
    gammas = list(np.linspace(GAMMA_SWEEP[0], GAMMA_SWEEP[1], GAMMA_SWEEP[2]))
    gammas += [k for k in (nu(np.array([-1.0]))[0], nu(np.array([1.0]))[0]) if k != 0]
    gamma_defect = max(abs(gamma_modulus_defect(k)) for k in gammas)
    out.add(check('delta_jump', jump, config.tolerance('delta_jump')),
            check('delta_unimodular', unimodular, config.tolerance('delta_unimodular')),
            check('delta_rate', min(rates), config.tolerance('delta_rate'), '>='),
            check('gamma_identity', gamma_defect, config.tolerance('gamma_identity')))
    report_half_plane(nu, HALF_PLANE_POINTS, out, config.tolerance('half_plane'))
    out.max_residual = worst
    out.metrics.update({'delta_rates': rates, 'speed': config.speed})


RUNNERS: Dict[Scenario, Callable[[ExperimentConfig, Outcome], None]] = {
    Scenario.RADIATION_ASYMPTOTICS: run_radiation_asymptotics,
    Scenario.SOLITON_TRACK: run_soliton_track,
    Scenario.TWO_SOLITON_RESOLUTION: run_two_soliton_resolution,
    Scenario.ROUNDTRIP: run_roundtrip,
    Scenario.B_EQUALITY: run_b_equality,
}


# -- run directory -----------------------------------------------------------

def prepare_run_dir(config: ExperimentConfig, out_dir: Optional[str] = None) -> Tuple[str, str]:
    digest = config_digest(config)
    run_dir = os.path.join(out_dir or config.output_dir, f"run-{digest[:12]}")
    try:
        os.makedirs(run_dir, exist_ok=True)
    except OSError as e:
        raise ConfigurationError(f"cannot create run directory {run_dir}: {e}", field='output_dir')
    if not os.access(run_dir, os.W_OK):
        raise ConfigurationError(f"run directory {run_dir} is not writable", field='output_dir')
    return run_dir, digest


@contextmanager
def run_log(run_dir: str):
    """Timestamp-free run.log capturing the lab's loggers."""
    handler = logging.FileHandler(os.path.join(run_dir, 'run.log'), mode='w')
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    lab_logger = logging.getLogger('src')
    previous = lab_logger.level
    lab_logger.addHandler(handler)
    lab_logger.setLevel(logging.INFO)
    try:
        yield
    finally:
        lab_logger.removeHandler(handler)
        lab_logger.setLevel(previous)
        handler.close()


def run_scenario(config: ExperimentConfig, out_dir: Optional[str] = None) -> Tuple[Dict[str, Any], str]:
    """Run the configured scenario; returns the validated summary and the run directory."""
    run_dir, digest = prepare_run_dir(config, out_dir)
    outcome = Outcome(run_dir)
    with run_log(run_dir):
        logger.info(f"Scenario {config.scenario.value}, config digest {digest[:12]}")
        RUNNERS[config.scenario](config, outcome)
        passed = all(c['pass'] for c in outcome.checks)
        for c in outcome.checks:
            level = logging.INFO if c['pass'] else logging.ERROR
            logger.log(level, f"{c['name']}: {c['value']} {c['comparison']} {c['tolerance']} "
                              f"-> {'pass' if c['pass'] else 'FAIL'}")
        summary = {
            'scenario': config.scenario.value,
            'digest': digest,
            'pass': passed,
            'exponent': io.finite_or_none(outcome.exponent),
            'max_residual': io.finite_or_none(outcome.max_residual),
            'checks': outcome.checks,
            'metrics': _json_ready(outcome.metrics),
            'quarantine': _json_ready(outcome.quarantine),
            'files': sorted(outcome.files + ['run.log', 'summary.json']),
        }
        io.validate_summary(summary)
        io.write_json(os.path.join(run_dir, 'summary.json'), summary)
    return summary, run_dir


def _json_ready(value):
    if isinstance(value, dict):
        return {str(k): _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return io.finite_or_none(value)
    return str(value)


# -- single commands ---------------------------------------------------------

def _cmd_simulate(config: ExperimentConfig, out: Outcome) -> None:
    state0 = initial_fields(config)
    times = sorted(_on_step(t, config.dx) for t in config.times)
    state = padded(state0, times[-1])
    for t in times:
        state = evolve(state, t)
        io.write_fields(out.path(f"fields_t{t:g}.csv"), state)
        out.metrics[f"charge_drift_t{t:g}"] = state.metadata['charge_drift']


def _cmd_scatter(config: ExperimentConfig, out: Outcome) -> None:
    data = scatter(config, initial_fields(config))
    io.write_scattering(out.path('scattering.json'), data)
    out.metrics.update({'eigenvalues': len(data.spectrum), 'positivity': data.positivity,
                        'resonance_margin': data.resonance_margin})


def _reflection_for(config: ExperimentConfig):
    if config.initial.family == Family.ANALYTIC_REFLECTION:
        return analytic_reflection(config)[1]
    return scatter(config, initial_fields(config)).r_hat


def _cmd_predict(config: ExperimentConfig, out: Outcome) -> None:
    r_hat = _reflection_for(config)
    gamma = 1.0 / math.sqrt(1.0 - config.speed ** 2)
    points = [(tau * gamma, config.speed * tau * gamma) for tau in config.taus]
    rows = prediction_sweep(r_hat, points)
    io.write_rows(out.path('predictions.csv'), rows, list(rows[0].keys()))


def _cmd_soliton(config: ExperimentConfig, out: Outcome) -> None:
    init = config.initial
    spectrum = soliton_data(zip(init.eigenvalues, init.norming))
    xs = default_grid(config.x_window)
    for t in config.times:
        io.write_fields(out.path(f"soliton_t{t:g}.csv"), n_soliton(spectrum, t, xs))


def _cmd_reconstruct(config: ExperimentConfig, out: Outcome) -> None:
    data = scatter(config, initial_fields(config))
    xs = default_grid(config.x_window)
    contour = contour_grid(config.contour)
    for t in config.times:
        state = reconstruct_fields(data, t, xs, with_poles=not data.soliton_free, contour=contour)
        io.write_fields(out.path(f"reconstruction_t{t:g}.csv"), state)
        out.metrics[f"failures_t{t:g}"] = len(state.metadata['failures'])


def _cmd_resolve(config: ExperimentConfig, out: Outcome) -> None:
    data = scatter(config, initial_fields(config))
    entries = []
    for j, lam in enumerate(data.spectrum.eigenvalues):
        visible = resolution_prediction(data, j)
        entries.append({'index': j, 'lambda': [lam.real, lam.imag],
                        'C': [data.spectrum.norming[j].real, data.spectrum.norming[j].imag],
                        'visible': visible.to_dict()})
    io.write_json(out.path('resolution.json'), {'solitons': entries})


COMMANDS: Dict[str, Callable[[ExperimentConfig, Outcome], None]] = {
    'simulate': _cmd_simulate,
    'scatter': _cmd_scatter,
    'predict': _cmd_predict,
    'soliton': _cmd_soliton,
    'reconstruct': _cmd_reconstruct,
    'resolve': _cmd_resolve,
}


def run_command(name: str, config: ExperimentConfig, out_dir: Optional[str] = None) -> Tuple[Dict[str, Any], str]:
    """One CLI verb. 'report' runs the configured scenario; the others produce their tables."""
    if name == 'report':
        return run_scenario(config, out_dir)
    if name not in COMMANDS:
        raise ConfigurationError(f"unknown command {name!r}", field='command')
    run_dir, digest = prepare_run_dir(config, out_dir)
    outcome = Outcome(run_dir)
    with run_log(run_dir):
        logger.info(f"Command {name}, config digest {digest[:12]}")
        COMMANDS[name](config, outcome)
    result = {'command': name, 'digest': digest, 'pass': True,
              'metrics': _json_ready(outcome.metrics), 'files': sorted(outcome.files + ['run.log'])}
    return result, run_dir
