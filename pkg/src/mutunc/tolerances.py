"""Numerical tolerances shared by the library, the tests and the CLI."""

STRUCTURAL = 1e-8   # unitarity, orthonormality of decoded bases
ALGEBRAIC = 1e-10   # traces, normalization, marginals
IDEMPOTENT = 1e-12  # projector checks
PSD = 1e-9          # smallest admissible eigenvalue is -PSD
PROB_SUM = 1e-9
PROB_CLAMP = 1e-14  # probabilities below this are treated as exact zeros

# violation thresholds for RelationReport
EXACT_RHS = 1e-9
OPTIMIZED_RHS = 1e-6

# fitness above this triggers re-verification of optimized coefficients
NEAR_VIOLATION = -1e-4
# strict-improvement margin in the mutation-scaling rule
IMPROVEMENT = 1e-12
