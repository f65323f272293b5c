"""Corecursive extensive-form games: convergence, equilibria and coinduction."""

from .auction import characterize, check_features, make_dollar, make_zero_one, pattern_to_profile
from .coinduct import ThreeValued, certify, eval3, minimal_depth
from .deviation import dominates, enumerate_deviations, one_deviation_principle
from .fixpoint import box, induced_utility, pe, spe, strongly_convergent, weakly_convergent
from .schema import (
    Affine,
    Choice,
    EquationSystem,
    Kind,
    Leaf,
    Node,
    Utility,
    VarRef,
    bisimilar,
    project,
    validate,
)
from .unfold import UNKNOWN, to_dot, unfold

__version__ = "0.1.0"
