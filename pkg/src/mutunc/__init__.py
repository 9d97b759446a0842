"""Mutual-information uncertainty relations for bipartite measurements.

Evaluators for entropic and mutual-information uncertainty relations on
finite-dimensional states, the coefficients they depend on, and a genetic
search for violations.
"""

from .coefficients import (
    OptimizerBudget, alignment_unitary, coeff_a, coeff_c, coeff_c_doubleprime, coeff_c_prime,
    coeff_c_prime_closed_form, coeff_c_tilde_prime, coeff_c_tripleprime, overlap_matrix, sum_sq,
)
from .ga import GAConfig, evolve
from .infomeasures import (
    INF, Ensemble, accessible_information, joint_distribution, mutual_information,
    renyi_entropy, shannon_entropy,
)
from .relations import RELATIONS, EnsembleScenario, MeasurementScenario, RelationReport, evaluate
from .search import ScenarioCodec, decode_scenario, run_search

__version__ = "0.1.0"
