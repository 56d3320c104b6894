import os

from dotenv import load_dotenv

load_dotenv()


class Config:
    SECRET_KEY = os.getenv('MTM_LAB_SECRET_KEY', 'mtm-lab-dev-key')
    SQLALCHEMY_DATABASE_URI = os.getenv(
        'MTM_LAB_DATABASE_URI',
        f"sqlite:///{os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src', 'database', 'lab.db')}"
    )
    SQLALCHEMY_TRACK_MODIFICATIONS = False

    OUTPUT_DIR = os.getenv('MTM_LAB_OUTPUT_DIR', 'runs')
    LOG_LEVEL = os.getenv('MTM_LAB_LOG_LEVEL', 'INFO')

    # Simulator
    DX = 1.0 / 256
    BOUNDARY_WARN_AMPLITUDE = 1e-10
    DOMAIN_PADDING = 8.0
    STRANG_ORDER = 'C-M-T-M-C'

    # Scattering
    W_GRID = (-12.0, 12.0, 2048)
    Z_GRID = (-12.0, 12.0, 2048)
    SEARCH_BOX = (-12.0, 12.0, 0.05, 12.0)  # re_min, re_max, im_min, im_max in w
    RESONANCE_TOL = 1e-6
    NEWTON_TOL = 1e-10
    NEWTON_MAX_ITER = 40
    SIMPLE_ZERO_TOL = 1e-8
    EIGENVALUE_ZERO_TOL = 1e-8
    PROPORTIONALITY_TOL = 1e-4
    ISOLATION_SIZE = 0.25
    MAX_QUADRISECTION_DEPTH = 14

    # Quadrature
    GL_PANELS = 20
    GL_ORDER = 16

    # Riemann-Hilbert solver
    CONTOUR = (-16.0, 16.0, 4096)
    SMALL_NORM_THRESHOLD = 0.5
    FIXED_POINT_TOL = 1e-12
    FIXED_POINT_MAX_ITER = 200
    DENSE_FALLBACK_NODES = 2048
    GMRES_RESTART = 60
    GMRES_MAX_ITER = 200
    JUMP_DET_TOL = 1e-10
    NEAR_AXIS_FACTOR = 5.0

    # Solitons
    CONDITION_LIMIT = 1e12
    EXPONENT_CAP = 350.0
    MAX_SOLITONS = 16

    TOLERANCES = {
        'charge_drift': 1e-10,
        'unitarity': 1e-6,
        'transformed_relation': 1e-6,
        'linearization_r': 1e-3,
        'linearization_c': 1e-3,
        'soliton_exactness': 1e-10,
        'soliton_track': 1e-3,
        'convergence_order': 1.9,
        'decay_exponent': 0.6,
        'b_equality': 1e-8,
        'resolution_k_ratio': 2.0,
        'roundtrip': 1e-3,
        'delta_jump': 1e-6,
        'delta_unimodular': 1e-8,
        'delta_rate': 0.4,
        'resolution_forms': 1e-6,
        'gamma_identity': 1e-10,
        'half_plane': 1e-10,
    }


class TestConfig(Config):
    TESTING = True
    SQLALCHEMY_DATABASE_URI = 'sqlite:///:memory:'
    OUTPUT_DIR = os.getenv('MTM_LAB_TEST_OUTPUT_DIR', 'test-runs')
