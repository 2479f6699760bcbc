"""Reconfigure unit discs by one straight move each, after shifting the targets.

Submodules: ``geometry`` (planar primitives), ``blocking`` (blocking graph and
move orders), ``vippodrome`` (constraint regions in shift space), ``labeled``
(exact optimizers for a fixed matching), ``unlabeled`` (direction-based
heuristics), ``instances`` (generators and JSON), ``cli``.
"""
from .blocking import CycleError, Itinerary, Matching, build_tbg, topo_itinerary, validate_itinerary
from .geometry import get_eps, set_eps, smallest_enclosing_disc
from .instances import Instance, align, generate, load, save
from .labeled import (OptimizationResult, is_valid_translation, minimize_aabr, minimize_sed,
                      minimize_translation)
from .unlabeled import (delta_matching, feasibility_translation, generic_direction,
                        multi_direction_optimize, shortest_valid_on_ray)

__version__ = "0.1.0"
