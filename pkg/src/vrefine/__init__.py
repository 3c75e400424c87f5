"""vrefine: iterative visual-program refinement.

Multi-hypothesis edit generation, pairwise tournament state evaluation,
hypothesis reversion and tweak/leap scheduling -- runnable fully offline
against a deterministic procedural-texture DSL, and against real
renderers/VLMs through pluggable executor, generator, evaluator and
imagination backends.
"""

from .errors import (BackendError, ConfigError, DimensionMismatch, ExecError,
                     ExecutionFailed, InitError, VRefineError)
from .types import (EditCandidate, Flags, Intent, IterationRecord, Program,
                    SearchConfig, SearchTrace, VisualState, default_schedule,
                    validate_config)

__version__ = "0.1.0"

__all__ = [
    "BackendError", "ConfigError", "DimensionMismatch", "EditCandidate",
    "ExecError", "ExecutionFailed", "Flags", "InitError", "Intent",
    "IterationRecord", "Program", "SearchConfig", "SearchTrace",
    "VRefineError", "VisualState", "default_schedule", "validate_config",
    "__version__",
]
