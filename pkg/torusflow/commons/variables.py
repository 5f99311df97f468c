from pathlib import Path
from typing import Tuple

import numpy as np

# ======================================================================================================================
#                                                 TYPES
# ======================================================================================================================
WavevectorType = Tuple[int, ...]
MultiIndexType = Tuple[int, ...]
ComplexArray = np.ndarray  # complex128, shape (m, 2N+1, ..., 2N+1)
RealArray = np.ndarray

# ======================================================================================================================
#                                                 PATHS
# ======================================================================================================================

# PACKAGE-RELATIVE PATHS
PACKAGE_DIR = Path(__file__).parent.parent.parent
TEMPLATES_DIR = PACKAGE_DIR / 'torusflow/data/templates'
FIELD_SCHEMA_PATH = TEMPLATES_DIR / 'field.schema.json'
MANIFEST_SCHEMA_PATH = TEMPLATES_DIR / 'manifest.schema.json'
CERT_REPORT_SCHEMA_PATH = TEMPLATES_DIR / 'cert_report.schema.json'
SUMMARY_SCHEMA_PATH = TEMPLATES_DIR / 'summary.schema.json'
CONFIGS_DIR = PACKAGE_DIR / 'configs'

# TRAJECTORY DIRECTORY LAYOUT
TRAJ_CONFIG_FILENAME = 'config.json'
TRAJ_TIMES_FILENAME = 'times.json'
TRAJ_FIELDS_DIRNAME = 'fields'
TRAJ_NODE_STEM = 'node_{:04d}'

# EXPERIMENT OUTPUTS
SUMMARY_FILENAME = 'summary.json'
ERROR_FILENAME = 'error.json'
CERT_REPORT_FILENAME = 'cert_report.json'
TRAJECTORY_DIRNAME = 'trajectory'

# ======================================================================================================================
#                                                 SERIALIZATION
# ======================================================================================================================
BINARY_MAGIC = b'TMF1'
BINARY_HEADER_FORMAT = '<4sIIIB'  # magic, n, m, N, real flag
BINARY_COEFF_DTYPE = '<c16'
MANIFEST_VERSION = 1

# ======================================================================================================================
#                                                 NUMERICS
# ======================================================================================================================
MEAN_TOLERANCE = 1e-12  # relative to the l1 norm, for the zero-mean precondition of the inverse laplacian
MEAN_DRIFT_TOLERANCE = 1e-12  # absolute, drift of the k=0 mode along a trajectory
DIVERGENCE_TOLERANCE = 1e-12
GENERATED_DIVERGENCE_TOLERANCE = 1e-14  # relative to sum_k |k|_e |v_k|, for generated initial data
PICARD_TOLERANCE = 1e-10
QUADRATURE_TOLERANCE = 1e-6
MAX_PICARD_ITERATIONS = 200
DIVERGENCE_PATIENCE = 3  # consecutive residual increases before a Picard iteration is declared divergent
DIRECT_CONVOLUTION_MAX_TRUNC = 8
NODE_CHUNK_SIZE = 16  # grid nodes transformed together in one batch
DOMINATION_RTOL = 1e-9
DOMINATION_ATOL = 1e-12  # relative to the largest majorant coefficient
MIN_DECAY_SHELLS = 5
CONSTANT_SCAN_RADIUS = 30
PROJECTION_SCAN_RADIUS = 50
# Closure of the majorant contraction: a * c_W * |V| must not exceed this value
CLOSURE_THRESHOLD = (np.sqrt(2.) - 1.) / 2.
CERT_SEARCH_UPPER_BOUND = 64.
CERT_SEARCH_MIN_TIME = 2. ** -40
CERT_BISECTION_STEPS = 40
PROBE_HORIZON = 50.
PROBE_TIME_STEPS = 200
PROBE_GROWTH_TOLERANCE = 0.01
UNIQUENESS_DELTA = 1e-6  # Default distance between the two data sets, in the analytic norm of radius r_tilde
UNIQUENESS_GAP_CONSTANT = 100.  # Frozen bound on the gap after t_hat, in units of the data distance delta
UNIQUENESS_CHECK_OFFSET = 0.1  # The gap is checked at the first node after t_hat + UNIQUENESS_CHECK_OFFSET
STRIP_VARIATION_LIMIT = 10.  # Largest accepted ratio between strip values on two sample grids
MEAN_RATE_FRACTION = 0.9  # Fraction of nu / 2 the decay rate towards the mean must reach
MEAN_RATE_WINDOW = (10., 20.)  # The mean decay rate is only judged when the fit window covers this interval

# ======================================================================================================================
#                                                 EXPERIMENTS
# ======================================================================================================================
EXPERIMENT_IDS = ('solve', 'certify', 'decay', 'uniqueness', 'majorant-check', 'props')
GENERATOR_IDS = ('taylor-green', 'single-mode', 'random-hs')
CALCULUS_PROPERTY_IDS = ('sum', 'product', 'scalar', 'integral', 'derivative', 'heat', 'd_product', 'inv_laplacian',
                         'projection')
EXIT_SUCCESS = 0
EXIT_NUMERICAL_FAILURE = 1
EXIT_CONFIG_ERROR = 2
