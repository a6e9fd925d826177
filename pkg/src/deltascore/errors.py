"""Exception hierarchy shared across the toolkit."""


class DeltaScoreError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(DeltaScoreError, ValueError):
    pass


class DegeneratePerturbation(DeltaScoreError):
    """The perturbation would produce an empty or unusable story."""


class ScoringError(DeltaScoreError):
    """A likelihood backend failed. The original exception is chained."""


class EmptyScoreError(ScoringError):
    """The backend returned zero scored story tokens."""


class BatchError(ScoringError):
    def __init__(self, causes):
        self.causes = list(causes)
        summary = "; ".join(f"item {i}: {exc}" for i, exc in self.causes[:5])
        super().__init__(f"all {len(self.causes)} batch items failed ({summary})")


class ServiceError(DeltaScoreError):
    """The external text service was unreachable or kept failing."""


class ReplayMiss(ServiceError):
    """Replay mode found no cassette entry for a request."""


class EmptyResult(DeltaScoreError):
    pass


class IngestError(DeltaScoreError):
    def __init__(self, problems):
        self.problems = list(problems)
        lines = "\n".join(f"  line {n}: {msg}" for n, msg in self.problems[:10])
        super().__init__(f"{len(self.problems)} invalid record(s):\n{lines}")


class UndefinedCorrelation(DeltaScoreError, ArithmeticError):
    pass


class InsufficientData(DeltaScoreError):
    pass


class JoinError(DeltaScoreError):
    """Scores reference story ids that have no rating record."""

    def __init__(self, orphans):
        self.orphans = sorted(orphans)
        shown = ", ".join(self.orphans[:20])
        super().__init__(f"{len(self.orphans)} score id(s) without ratings: {shown}")
