"""Global numerical tolerances and defaults shared across the package.

All class-membership certificates and simplicity tests are decided against
this single tolerance set so that "certifies CPTP", "certifies GKSL" and
"has simple spectrum" mean the same thing everywhere.
"""

# Class-membership certificate tolerances (two orders above kernel accuracy).
TOL_TP = 1e-10
TOL_UNITAL = 1e-10
TOL_CP = 1e-10
TOL_GKSL = 1e-10

# Absolute minimum-gap threshold below which a spectrum counts as degenerate.
# Channel spectra live in the closed unit disk, so absolute is meaningful.
GAP_TOL = 1e-8

# Eigenvalue clustering tolerance for multiplicity reports (above eigensolver
# residuals, below GAP_TOL semantics).
CLUSTER_TOL = 1e-7

# Relative singular-value cutoff for numerical rank / geometric multiplicity.
RANK_TAU = 1e-8

# Per-eigenpair residual bound ||Mv - lambda v|| / ||M||_F after convergence.
EIG_RESIDUAL_TOL = 1e-9

# Positivity sampling heuristic: Haar sample count and local refinement steps.
POSITIVITY_SAMPLES = 2000
REFINE_STEPS = 50

# Regularization schedules.
SCHEDULE_TRIALS = 16     # linearly decreasing lambda trials
SCAN_POINTS = 64         # time-factor grid points per scan window
BISECTION_WIDTH = 1e-6   # refinement width for exceptional intervals

# Gauss-Legendre quadrature order for the exponential-difference identity.
QUAD_ORDER_DEFAULT = 32

# Seeding: every sampling entry point takes an explicit seed or Generator;
# the CLI reads this environment variable (default seed 0).
ENV_SEED_VAR = "SCF_SEED"
DEFAULT_SEED = 0
