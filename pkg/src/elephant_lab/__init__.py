"""Elephant random walks, their Polya-type urns and the superdiffusive limit law."""

__version__ = "0.1.0"

from .walk import WalkConfig, exponent, memory_for_exponent, simulate_walk, walk_ensemble  # noqa: E402
from .urn import UrnConfig, simulate_urn, urn_ensemble, urn_to_walk_position  # noqa: E402
from .exact import ExactLaw, exact_law_1d, exact_law_counts  # noqa: E402
from .moments import m_sequence, moment_L1, moment_Lq  # noqa: E402

__all__ = [
    "WalkConfig", "exponent", "memory_for_exponent", "simulate_walk", "walk_ensemble",
    "UrnConfig", "simulate_urn", "urn_ensemble", "urn_to_walk_position",
    "ExactLaw", "exact_law_1d", "exact_law_counts",
    "m_sequence", "moment_L1", "moment_Lq",
]
