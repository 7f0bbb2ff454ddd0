"""Obligation discharge: clausifier, saturation prover, finite model finder,
external ATP runner, and the portfolio tying them together."""

from .clausify import Clause, clausify, equality_axioms
from .external import (
    EXTERNAL,
    INTERNAL_MODEL_FINDER,
    INTERNAL_RESOLUTION,
    ProverConfig,
    run_external,
)
from .modelfinder import FiniteModel, find_model
from .portfolio import (
    PROVED,
    REFUTED,
    ObligationResult,
    default_configs,
    detect_external_configs,
    portfolio,
    run_prover,
)
from .resolution import ResolutionLimits, resolution_prove

__all__ = [
    "Clause", "clausify", "equality_axioms", "EXTERNAL",
    "INTERNAL_MODEL_FINDER", "INTERNAL_RESOLUTION", "ProverConfig",
    "run_external", "FiniteModel", "find_model", "PROVED", "REFUTED",
    "ObligationResult", "default_configs", "detect_external_configs",
    "portfolio", "run_prover", "ResolutionLimits", "resolution_prove",
]
