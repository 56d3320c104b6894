"""
Read-mostly HTTP view on the lab: cone geometry, closed-form solitons,
radiation predictions for analytic reflection data and the run registry.
"""

import logging

from flask import Blueprint, jsonify, request

from src.models.experiment import ExperimentConfig
from src.services import registry
from src.services.asymptotics import prediction_sweep
from src.services.core import cone_coords
from src.services.errors import LabError
from src.services.harness import analytic_reflection
from src.services.solitons import cone_scale, one_soliton, one_soliton_parameters

logger = logging.getLogger(__name__)

lab_bp = Blueprint('lab', __name__)


def _complex(raw, name):
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise LabError(f"'{name}' must be a [re, im] pair")
    return complex(float(raw[0]), float(raw[1]))


def _pair(z):
    return [z.real, z.imag]


@lab_bp.route('/cone', methods=['GET'])
def cone():
    """Light-cone coordinates of (t, x) and the scale L(x/t)."""
    try:
        t = request.args.get('t', type=float)
        x = request.args.get('x', type=float)
        if t is None or x is None:
            return jsonify({'error': "query parameters 't' and 'x' are required"}), 400
        coords = cone_coords(t, x)
        return jsonify({
            'tau': coords.tau,
            'w0': coords.w0,
            'z0': coords.z0,
            'scale': cone_scale(x / t),
        })
    except LabError as e:
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        logger.error(f"Cone lookup failed: {e}")
        return jsonify({'error': str(e)}), 500


@lab_bp.route('/soliton', methods=['POST'])
def soliton():
    """Closed-form one-soliton on a list of x at time t."""
    try:
        data = request.get_json() or {}
        lam = _complex(data.get('lambda'), 'lambda')
        norming = _complex(data.get('C'), 'C')
        t = float(data.get('t', 0.0))
        xs = [float(x) for x in data.get('x', [])]
        u, v = one_soliton(lam, norming, t, xs)
        return jsonify({
            'parameters': one_soliton_parameters(lam, norming).to_dict(),
            'x': xs,
            'u': [_pair(z) for z in u],
            'v': [_pair(z) for z in v],
        })
    except (LabError, ValueError, TypeError) as e:
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        logger.error(f"Soliton evaluation failed: {e}")
        return jsonify({'error': str(e)}), 500


@lab_bp.route('/predict', methods=['POST'])
def predict():
    """Radiation prediction for analytic reflection data at the given (t, x) points."""
    try:
        data = request.get_json() or {}
        config = ExperimentConfig.from_dict({
            'scenario': 'b_equality',
            'initial': {'family': 'analytic_reflection',
                        'amplitude': data.get('amplitude', 0.3),
                        'alpha': data.get('alpha', 0.0)},
        })
        points = [(float(p[0]), float(p[1])) for p in data.get('points', [])]
        if not points:
            return jsonify({'error': "'points' must list at least one [t, x] pair"}), 400
        _, r_hat = analytic_reflection(config)
        return jsonify({'predictions': prediction_sweep(r_hat, points)})
    except (LabError, ValueError, TypeError, IndexError) as e:
        return jsonify({'error': str(e)}), 400
    except Exception as e:
        logger.error(f"Prediction failed: {e}")
        return jsonify({'error': str(e)}), 500


@lab_bp.route('/runs', methods=['GET'])
def runs():
    try:
        scenario = request.args.get('scenario')
        passed = request.args.get('passed')
        flag = None if passed is None else passed.lower() in ('1', 'true', 'yes')
        found = registry.list_runs(scenario=scenario, passed=flag)
        return jsonify({'runs': [run.to_dict() for run in found], 'total': len(found)})
    except Exception as e:
        logger.error(f"Run listing failed: {e}")
        return jsonify({'error': str(e)}), 500


@lab_bp.route('/runs/<int:run_id>', methods=['GET'])
def run_detail(run_id):
    try:
        run = registry.get_run(run_id)
        if run is None:
            return jsonify({'error': 'Run not found'}), 404
        return jsonify({'run': run.to_dict()})
    except Exception as e:
        logger.error(f"Run lookup failed: {e}")
        return jsonify({'error': str(e)}), 500
