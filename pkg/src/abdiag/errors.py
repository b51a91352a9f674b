"""Exception types shared by the engines and the document layer."""

from __future__ import annotations


class DiagnosisError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(DiagnosisError):
    """A value or combination of values violates a domain invariant."""


class LevelNotOnScaleError(ValidationError):
    """A grade is not one of the certainty scale's levels."""


class UniverseMismatchError(ValidationError):
    """Two fuzzy sets built over different universes or scales were combined."""


class UnknownManifestationError(ValidationError):
    """A manifestation identifier is not part of the universe."""


class UnknownDisorderError(ValidationError):
    """A disorder identifier is not part of the knowledge base."""


class TwofoldViolationError(ValidationError):
    """Certain and excluded parts overlap (pointwise min above zero).

    ``conflicts`` holds one entry per offending manifestation.
    """

    def __init__(self, conflicts):
        self.conflicts = tuple(conflicts)
        detail = ", ".join(
            f"{c.manifestation} (certain {c.positive}, excluded {c.negative})"
            for c in self.conflicts
        )
        super().__init__(f"certain/excluded parts overlap at: {detail}")


class ModeError(DiagnosisError):
    """An engine was invoked on inputs outside its operating mode."""


class MissingProfileError(DiagnosisError):
    """Explicit composition was queried for a subset without a declared profile."""


class InadmissibleAssociationError(DiagnosisError):
    """The queried disorder subset is not a declared admissible association."""


class DocumentError(DiagnosisError):
    """A document failed validation. ``issues`` carries the full report."""

    def __init__(self, issues):
        self.issues = tuple(issues)
        detail = "; ".join(
            f"{issue.path}: {issue.message}"
            for issue in self.issues
            if issue.severity == "error"
        )
        super().__init__(detail or "invalid document")
