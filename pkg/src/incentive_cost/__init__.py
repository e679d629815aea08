"""Expected cost of institutional reward and punishment in finite populations."""

__version__ = "0.1.0"

from .chain import (  # noqa: F401
    Direction,
    IncentiveScheme,
    build_transition_matrix,
    cooperation_frequency,
    expected_visits,
    fixation_probability,
    fundamental_matrix,
    log_fixation_probability,
    theta_min,
)
from .cost import cost_derivative, cost_profile, critical_functions, derive_psi, expected_cost  # noqa: F401
from .games import DonationGame, PopulationConfig, PublicGoodsGame, delta, payoff_C, payoff_D  # noqa: F401
from .phase import Branch, analyze, beta_star, f_star, find_u2, monotonicity_profile, optimize  # noqa: F401
