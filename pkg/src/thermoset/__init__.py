"""Thermodynamic-formalism toolkit for Markov iterated function systems on the interval."""

__version__ = "0.1.0"

from .errors import (
    ThermosetError,
    EmptySubshift,
    ParseError,
    DomainError,
    NotMonotone,
    OutOfRange,
    ValidationError,
    NoConvergence,
    NoSignChange,
    NoTransitivity,
    ContractionDetected,
    InversionStall,
    ConfigError,
)
from .symbolic import (
    SubshiftSpec,
    FollowerGraph,
    build_follower_graph,
    repair_complete_invariance,
    transitive_components,
    enumerate_words,
    is_admissible_periodic,
    cut_cylinder,
)
