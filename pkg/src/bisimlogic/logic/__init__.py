"""The quantitative modal languages L and L'."""
from .enumeration import Enumeration, enumerate_formulas, enumerate_theory
from .semantics import Evaluator, distance_from_values, eval_formula, logical_distance
from .synthesis import (WitnessSet, approximate_at_pair, best_pair_witnesses,
                        expressivity_witnesses, lattice_approximate, witness_error_bound)
from .syntax import (L, LPRIME, TOP, AddC, And, Cx, Dia, DiaPrime, Formula, Not, Or, Plus, Rew,
                     Scale, SubC, Top, conj, const, dag_size, disj, parse_formula, to_text)
