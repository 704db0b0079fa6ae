"""Exception types shared across the workbench."""

from __future__ import annotations


class PmfuzzError(Exception):
    """Base class for all workbench errors."""


class DurationOutOfRange(PmfuzzError):
    """A duration lies outside the activity's [crash_time, normal_time] interval."""


class NetworkValidationError(PmfuzzError):
    """Raised with the complete list of violations found in a network definition."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(v.message for v in self.violations)
        super().__init__(f"invalid network: {lines}")


class ModelMalformed(PmfuzzError):
    """A LinearModel references unknown variables or carries nonsense bounds."""


class ScenarioValidationError(PmfuzzError):
    """A scenario contradicts the network it is applied to."""


class UnknownActivityInScenario(ScenarioValidationError):
    """A scenario names an activity id the network does not define."""


class InfeasibleScenario(PmfuzzError):
    """No schedule satisfies the scenario constraints (checked at lambda = 0)."""


class LambdaOutOfOpenInterval(PmfuzzError):
    """Membership inversion requires 0 < lambda < 1."""


class SearchSpaceTooLarge(PmfuzzError):
    """The enumeration box exceeds the oracle's safety guard."""


class ProjectFileError(PmfuzzError):
    """A project document could not be parsed or validated."""

    def __init__(self, message, violations=()):
        self.violations = list(violations)
        super().__init__(message)


class ScenarioFileError(PmfuzzError):
    """A scenario document could not be parsed or validated."""

    def __init__(self, message, violations=()):
        self.violations = list(violations)
        super().__init__(message)
