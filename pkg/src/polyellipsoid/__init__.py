"""Minimum-radius translated polyellipsoids covering a demand set."""

from .decomp import DecompTrace, solve_decomposition, solve_subset
from .foci_select import InfeasibleSelection, solve_foci_selection, solve_restricted
from .minimax import SolverConfig, project_simplex, solve_direct, solve_lagrangean
from .model import (DualCertificate, Instance, Solution, objective, phi,
                    phi_all, support_set, translate_invariance_check)
from .norms import (NormSpec, derive_polar_extremes, dual_norm_eval,
                    norm_eval, norm_subgradient, smoothed_eval)
from .onedim import Interval1D, polyellipse_interval, solve_1d
from .ordered_median import OrderedSpec, om_rearrangement_check, om_value, solve_om
from .weber import weber_solve

__version__ = "0.1.0"
