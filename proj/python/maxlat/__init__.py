"""Coupled-lattice iteration engine for the discretized vacuum Maxwell system."""

from maxlat._core import (
    Box,
    CouplingEntry,
    CouplingTable,
    EngineState,
    IoError,
    Lattice,
    NumericError,
    PruneReport,
    PrunePolicy,
    ProbeSeries,
    RunRecord,
    ValidationError,
    add_shifted_scaled,
    analysis,
    io,
    maxwell,
    run,
    step,
    validate_table,
    __version__,
)

__all__ = [
    "Box",
    "CouplingEntry",
    "CouplingTable",
    "EngineState",
    "IoError",
    "Lattice",
    "NumericError",
    "PruneReport",
    "PrunePolicy",
    "ProbeSeries",
    "RunRecord",
    "ValidationError",
    "add_shifted_scaled",
    "analysis",
    "io",
    "maxwell",
    "run",
    "step",
    "validate_table",
    "__version__",
]
