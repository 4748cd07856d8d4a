"""Bisimulation pseudometrics for finite MDPs and their quantitative modal logic."""
from ._jit import NUMBA_ENABLED
from .bisim import (DiscountConfig, FixpointReport, apply_functional, bisim_metric,
                    certify_upper_bound, kleene_iterates, lift_mdp, lift_mrp)
from .model import Dist, Mdp, PMetric, Predicate, dirac, dump_model, load_model, validate_pmetric
from .transport import (TransportSolution, duality_gap, expectation, wasserstein_dual,
                        wasserstein_p, wasserstein_primal)

__version__ = "0.1.0"
