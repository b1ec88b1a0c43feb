"""Proof <-> formulation translations and direct simulations between proof systems."""
from .common import TranslationError
from .builder import RevResBuilder, resolve_along, weaken_along_tree, weaken_occurrence
from .simulations import maxresw_to_revres, revres_to_res, revres_to_usa, revrest_to_uns
from .algebraic import (check_status_law, eol_to_uns, sol_to_usa, status_trees, uns_to_eol,
                        usa_to_sol)
from .revres_sopl import WIDTH_CONSTANT, revres_to_sopl, sopl_formulation_to_revres

__all__ = [
    "TranslationError", "RevResBuilder", "resolve_along", "weaken_along_tree", "weaken_occurrence",
    "maxresw_to_revres", "revres_to_res", "revres_to_usa", "revrest_to_uns",
    "check_status_law", "eol_to_uns", "sol_to_usa", "status_trees", "uns_to_eol", "usa_to_sol",
    "WIDTH_CONSTANT", "revres_to_sopl", "sopl_formulation_to_revres",
]
