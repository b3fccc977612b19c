"""
VNEstruct - Configuration Settings
Defaults for the entropy kernels, embedding, synthetic experiments and training.
"""

VERSION = '1.0.0'

# =============================================================================
# Graph / Linear Algebra
# =============================================================================
SYMMETRY_TOL = 1e-12          # max |a_ij - a_ji| accepted as symmetric
JACOBI_TOL = 1e-11            # off-diagonal Frobenius norm, relative to ||A||_F
JACOBI_MAX_SWEEPS = 100
TAU_LIMIT = 1e150             # beyond this the rotation angle uses t = 1 / (2 tau)

POWER_SEED = 0x5EED           # start vector stream; never the all-ones null vector
POWER_TOL = 1e-9              # step |lambda_k - lambda_(k-1)| and residual ||M x - lambda x||
POWER_MAX_ITERS = 10_000

EIGEN_FLOOR = -1e-9           # density-matrix eigenvalues below this are a defect

# =============================================================================
# Embedding
# =============================================================================
class EntropyMode:
    AUTO   = 'auto'    # exact up to EXACT_NODE_LIMIT ego-net nodes, approx beyond
    EXACT  = 'exact'   # full Jacobi eigendecomposition
    APPROX = 'approx'  # -Q ln(lambda_max) with power iteration

MODE_CHOICES = ['auto', 'exact', 'approx']

EXACT_NODE_LIMIT = 200
DEFAULT_RADIUS = 4
RADIUS_GRID = [1, 2, 3, 4]

DEFAULT_THREADS = 1           # single-threaded output is the reference output
MAX_THREADS = 32

# =============================================================================
# Synthetic Shapes
# =============================================================================
class ShapeKind:
    HOUSE = 'house'
    STAR  = 'star'
    FAN   = 'fan'

SHAPE_ROLES = {
    'house': ['bottom', 'top', 'apex'],
    'star': ['center', 'leaf'],
    'fan': ['apex', 'path-end', 'path-interior'],
}

DEFAULT_STAR_SIZE = 5
DEFAULT_FAN_SIZE = 4
SHAPE_INSTANCES = 10
CYCLE_LENGTH = 30
CYCLE_CLASS = 'cycle'
CYCLE_ATTACH_CLASS = 'cycle:attached'   # cycle nodes carrying a shape

CONFIG_CHOICES = ['basic-house', 'basic-star', 'basic-fan', 'varied']
VARIED_SHAPES = [('house', 0), ('star', DEFAULT_STAR_SIZE), ('fan', DEFAULT_FAN_SIZE)]

# =============================================================================
# Evaluation
# =============================================================================
KMEANS_RESTARTS = 10
KMEANS_MAX_ITERS = 300
KMEANS_TOL = 1e-8             # max centroid movement

LOGREG_L2 = 1e-3
LOGREG_ITERS = 500
LOGREG_LR = 0.1
LOGREG_BACKTRACK = 0.5
LOGREG_MIN_LR = 1e-8

CV_SPLITS = 10
CV_TEST_SIZE = 0.2

REPORT_COLUMNS = ['Homogeneity', 'Completeness', 'Silhouette', 'Accuracy', 'F1-score']

# =============================================================================
# Readout Training
# =============================================================================
TRAIN_EPOCHS = 300
TRAIN_LR = 0.01
LR_DECAY = 0.3
LR_DECAY_EVERY = 50
BATCH_SIZE = 32
HIDDEN_GRID = [8, 16, 32]
TRAIN_FOLDS = 10
INNER_FOLDS = 3
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8

ATTRIBUTE_CHOICES = ['auto', 'degree', 'none']

GRADCHECK_STEP = 1e-5

# =============================================================================
# Output Settings
# =============================================================================
CSV_DIGITS = 17               # significant digits; exact float round-trip
CACHE_FILE = '.embedding_cache.json'

BENCH_DEGREE = 4
BENCH_RADIUS = 2

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_CONVERGENCE = 2


def resolve_sizes(value_str):
    """Resolve a comma separated list of graph sizes.

    Accepts:
        - Plain integers: '1000,2000' -> [1000, 2000]
        - k-suffixed: '1k,2k,4k' -> [1000, 2000, 4000]
    Raises:
        ValueError: if an entry is malformed or not positive
    """
    sizes = []
    for token in value_str.split(','):
        token = token.strip().lower()
        if not token:
            continue
        if token.endswith('k'):
            size = int(float(token[:-1]) * 1000)
        else:
            size = int(token)
        if size <= 0:
            raise ValueError(f"Size must be positive, got {size}")
        sizes.append(size)
    if not sizes:
        raise ValueError(f"No sizes in '{value_str}'")
    return sizes


def resolve_int_list(value_str):
    """'8,16,32' -> [8, 16, 32]; every entry must be a positive integer."""
    values = [int(v) for v in value_str.split(',') if v.strip()]
    if not values or any(v <= 0 for v in values):
        raise ValueError(f"Expected positive integers, got '{value_str}'")
    return values
