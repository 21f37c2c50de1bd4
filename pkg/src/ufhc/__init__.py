"""Common upper frequently hypercyclic vectors for weighted backward shifts.

Checks the hypotheses of a block-construction criterion for a parametrised
family of weighted shifts on l^p, builds an explicit common witness vector
and certifies its visit densities on a parameter grid.
"""

__version__ = "0.1.0"

from .constructor import ConstructionPlan, build, budget_estimate, compute_d, compute_eta, compute_gap_s0, compute_start_N0, plan
from .criterion_checker import Status, Verdict, check_exponential_family, check_shift_criterion, check_summable_lipschitz
from .density_analysis import VisitProfile, best_density_from, finite_density, visiting_times
from .errors import BudgetExceeded, ConfigError, ConstructionError, NonSummable, NotApplicable
from .sequence_space import FNormLadder, LpNorm, OpenBall, Seminorm, SparseVector, f_norm, in_ball, norm, p_norm
from .verifier import Certificate, default_grid, verify_density_certificate, verify_membership, verify_scheduled_visits
from .weight_families import (
    CompactInterval,
    ConstantMultiple,
    ExpFamily,
    RatioPower,
    Tabulated,
    inverse_tail_bound,
    lipschitz_constant,
    lipschitz_sum,
    log_weight_product,
    right_inverse_power_apply,
    shift_power_apply,
    weight_at,
)
