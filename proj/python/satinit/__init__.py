"""Evolved activity initialization for a CDCL SAT solver."""

from ._core import (
    Cnf,
    DimacsError,
    HarnessError,
    Program,
    ProgramParseError,
    __version__,
    compute_activities,
    evolve,
    fitness,
    histogram,
    map_model_back,
    normalize,
    parse_dimacs,
    preprocess,
    preset_names,
    random_ksat,
    read_dimacs,
    reorder,
    satisfies,
    solve,
    validate,
    var_stats,
)

__all__ = [
    "Cnf",
    "DimacsError",
    "HarnessError",
    "Program",
    "ProgramParseError",
    "__version__",
    "compute_activities",
    "evolve",
    "fitness",
    "histogram",
    "map_model_back",
    "normalize",
    "parse_dimacs",
    "preprocess",
    "preset_names",
    "random_ksat",
    "read_dimacs",
    "reorder",
    "satisfies",
    "solve",
    "validate",
    "var_stats",
]
