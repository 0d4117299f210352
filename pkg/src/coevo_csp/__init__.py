"""Binary CSP solving with learned constraint weights.

Constraint weights come from a competitive coevolutionary GA, from RNDI
restarts or from weighted hill climbing, and drive variable ordering in a
MAC (maintaining arc consistency) backtracking search.
"""

__version__ = "0.1.0"

from .baselines import HcParams, RndiParams, hc_learn, rndi_learn
from .coevo import CoevoParams, learn_weights
from .core import (CONFLICTS, SUPPORTS, Constraint, ContractError, CspInstance, Relation,
                   check, is_solution, make_instance, violated_constraints)
from .generators import (GeoParams, ModelDParams, ModelRbParams, gen_geo, gen_model_d,
                         gen_model_rb)
from .io import parse_native, parse_xcsp, read_instance, serialize_native
from .search import (DomainStore, Heuristic, Outcome, SearchLimits, SearchStats, ac3,
                     initial_weights, mac_search, revise, select_variable,
                     static_order_by_wdeg)
from .stats import mann_whitney_u, vargha_delaney_a

__all__ = [
    "CONFLICTS", "SUPPORTS", "CoevoParams", "Constraint", "ContractError", "CspInstance",
    "DomainStore", "GeoParams", "HcParams", "Heuristic", "ModelDParams", "ModelRbParams",
    "Outcome", "Relation", "RndiParams", "SearchLimits", "SearchStats", "ac3", "check",
    "gen_geo", "gen_model_d", "gen_model_rb", "hc_learn", "initial_weights", "is_solution",
    "learn_weights", "mac_search", "make_instance", "mann_whitney_u", "parse_native",
    "parse_xcsp", "read_instance", "revise", "rndi_learn", "select_variable",
    "serialize_native", "static_order_by_wdeg", "vargha_delaney_a", "violated_constraints",
]
