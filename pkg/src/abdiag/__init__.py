"""Diagnosis over causal knowledge with graded certainty.

The package provides three nested engines over the same knowledge shape:
crisp diagnosis when every disorder's effects are fully known, set-valued
diagnosis when knowledge is incomplete, and graded plausibility ranking
when both knowledge and observations carry qualitative certainty levels.
"""

from .core import (
    ADDITIVE,
    EXPLICIT,
    CertaintyScale,
    DisorderProfile,
    FuzzySet,
    GradeConflict,
    KnowledgeBase,
    Level,
    Observation,
    TwofoldSet,
    combine_profiles,
    consistency,
    inclusion,
    twofold_violations,
    union_twofold,
)
from .errors import (
    DiagnosisError,
    DocumentError,
    InadmissibleAssociationError,
    LevelNotOnScaleError,
    MissingProfileError,
    ModeError,
    TwofoldViolationError,
    UniverseMismatchError,
    UnknownDisorderError,
    UnknownManifestationError,
    ValidationError,
)

__all__ = [
    "ADDITIVE",
    "EXPLICIT",
    "CertaintyScale",
    "DisorderProfile",
    "FuzzySet",
    "GradeConflict",
    "KnowledgeBase",
    "Level",
    "Observation",
    "TwofoldSet",
    "combine_profiles",
    "consistency",
    "inclusion",
    "twofold_violations",
    "union_twofold",
    "DiagnosisError",
    "DocumentError",
    "InadmissibleAssociationError",
    "LevelNotOnScaleError",
    "MissingProfileError",
    "ModeError",
    "TwofoldViolationError",
    "UniverseMismatchError",
    "UnknownDisorderError",
    "UnknownManifestationError",
    "ValidationError",
]

__version__ = "0.1.0"
