# bresse/config.py

import os

# Base paths
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
OUTPUT_DIR = os.environ.get("BRESSE_OUTPUT_DIR", os.path.join(BASE_DIR, "output"))
LOG_FILE_NAME = "bresse.log"

# Physical defaults (nondimensional, order one, all wave speeds equal):
# - rho1 = rho*A, rho2 = rho*I
# - kappa = shear stiffness, k0 = longitudinal stiffness, b = bending stiffness
# - ell = 1/R curvature (0 gives the Timoshenko beam plus a decoupled wave)
# - gamma1..3 = boundary feedback gains at x = 0
DEFAULT_PARAMS = {
    "rho1": 1.0,
    "rho2": 1.0,
    "kappa": 1.0,
    "k0": 1.0,
    "b": 1.0,
    "ell": 0.5,
    "L": 1.0,
    "gamma1": 1.0,
    "gamma2": 1.0,
    "gamma3": 1.0,
}

# Discretization and run defaults
DEFAULT_N = 32
DEFAULT_T = 20.0
DEFAULT_LAMBDA_MAX = 200.0
DEFAULT_SWEEP_COUNT = 161
DEFAULT_SEED = 0
DEFAULT_FIT_WINDOW = (5.0, 15.0)
DEFAULT_SHOOTING_MODES = 5
DEFAULT_SCAN_FACTORS = (0.25, 0.5, 1.0, 2.0, 4.0)

# Verification defaults
VERIFY_LAMBDA = 5.0
VERIFY_TRIALS = 100
BOUNDARY_SWEEP = (1, 100)  # integer lambdas, inclusive

# Tolerances
DISSIPATIVITY_TOL = 1e-11  # relative to ||U||_H^2
RESIDUAL_TOL = 1e-10  # relative linear-solve residual in the H-norm
NEAR_SINGULARITY_TOL = 1e-12  # sigma_min relative to ||A_hat||
AMPLIFICATION_LIMIT = 1e10  # ||U|| / ||F|| beyond which a resolvent solve is singular
CLEARANCE_TOL = 1e-9
CONJUGATE_TOL = 1e-9
DENSE_EIG_LIMIT = 5000  # largest 6N handled by the dense eigensolver
SYSTEM_CACHE_SIZE = 2  # systems whose factorizations stay cached
SHIFT_INVERT_MODES = 60
SHIFT_INVERT_SHIFTS = 4  # targets i*omega spread over the resolved band
SHOOTING_TOL = 1e-12
SHOOTING_MAX_ITER = 60
DEDUP_TOL = 1e-8
SHOOTING_MATCH_TOL = 5e-2  # relative discrete-vs-shooting gap accepted by certify
RESOLVED_BAND = 0.25  # resolved modes have |Im| <= RESOLVED_BAND * mesh cutoff frequency
MULTIPLIER_MIN_RATIO = 1.8
BOUNDARY_GROWTH_LIMIT = 2.0

# Plotting
PLOT_FIGSIZE = (6.4, 4.8)
PLOT_DPI = 100
SVG_HASH_SALT = "bresse"
