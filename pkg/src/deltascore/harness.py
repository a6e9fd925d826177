"""Story-level Kendall correlation between metric scores and human ratings."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import IngestError, InsufficientData, InvalidInput, JoinError, UndefinedCorrelation
from .perturb import ASPECTS, Aspect
from .text import ConditionedStory

MAX_REPORTED_PROBLEMS = 10


@dataclass(frozen=True)
class RatedStory:
    story: ConditionedStory
    ratings: Mapping[Aspect, tuple[int, ...]]

    @property
    def id(self) -> str:
        return self.story.id

    def aggregated(self, aspect) -> float | None:
        scores = self.ratings.get(Aspect(aspect))
        return aggregate_ratings(scores) if scores else None


# ---------------------------------------------------------------------------
# ingestion
# ---------------------------------------------------------------------------


def _validate(row) -> tuple[RatedStory | None, str | None]:
    if not isinstance(row, dict):
        return None, "record is not a JSON object"
    for key in ("id", "condition", "story"):
        if not isinstance(row.get(key), str):
            return None, f"field '{key}' must be a string"
    if not row["id"]:
        return None, "field 'id' is empty"
    if not row["story"].strip():
        return None, "field 'story' is empty"
    system = row.get("system")
    if system is not None and not isinstance(system, str):
        return None, "field 'system' must be a string"
    ratings = row.get("ratings")
    if not isinstance(ratings, dict):
        return None, "field 'ratings' must be an object"
    parsed = {}
    for name, values in ratings.items():
        try:
            aspect = Aspect(name)
        except ValueError:
            return None, f"field 'ratings.{name}' is not a known aspect"
        if not isinstance(values, list) or not values:
            return None, f"field 'ratings.{name}' must be a non-empty list"
        for v in values:
            if isinstance(v, bool) or not isinstance(v, int) or not 1 <= v <= 5:
                return None, f"field 'ratings.{name}' has rating {v!r} outside 1..5"
        parsed[aspect] = tuple(values)
    story = ConditionedStory(row["id"], row["condition"], row["story"], system)
    return RatedStory(story, parsed), None


def parse_dataset(lines) -> list[RatedStory]:
    out: list[RatedStory] = []
    problems: list[tuple[int, str]] = []
    seen: set[str] = set()
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            problems.append((n, f"invalid JSON ({exc.msg})"))
        else:
            rated, problem = _validate(row)
            if problem is None and rated.id in seen:
                problem = f"duplicate id {rated.id!r}"
            if problem is not None:
                problems.append((n, problem))
            else:
                seen.add(rated.id)
                out.append(rated)
        if len(problems) >= MAX_REPORTED_PROBLEMS:
            break
    if problems:
        raise IngestError(problems)
    return out


def ingest_dataset(path) -> list[RatedStory]:
    """Read a JSON Lines judgment file.

    Each line: ``{"id", "condition", "story", "system", "ratings": {aspect:
    [int, ...]}}`` with ratings on the 1..5 scale, one per annotator.
    """
    with Path(path).open(encoding="utf-8") as fh:
        return parse_dataset(fh)


def aggregate_ratings(ratings):
    """Mean annotator score; a mapping is aggregated per aspect."""
    if isinstance(ratings, Mapping):
        return {Aspect(a): aggregate_ratings(v) for a, v in ratings.items()}
    values = list(ratings)
    if not values:
        raise InvalidInput("no ratings to aggregate")
    return math.fsum(values) / len(values)


# ---------------------------------------------------------------------------
# Kendall tau-b
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KendallResult:
    tau: float
    n: int
    concordant: int
    discordant: int
    ties_x: int  # pairs tied in x (including pairs tied in both)
    ties_y: int
    ties_xy: int


def kendall_tau(xs: Sequence[float], ys: Sequence[float]) -> KendallResult:
    """Tie-corrected Kendall tau-b over all ``n(n-1)/2`` pairs.

    ``(C - D) / sqrt((P - Tx) * (P - Ty))`` with ``P`` the pair count and
    ``Tx``/``Ty`` the pairs tied in each list.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise InvalidInput(f"length mismatch: {x.shape} vs {y.shape}")
    n = x.size
    if n < 2:
        raise InvalidInput("need at least two observations")
    if np.isnan(x).any() or np.isnan(y).any():
        raise InvalidInput("NaN in input")
    i, j = np.triu_indices(n, k=1)
    sx = np.sign(x[i] - x[j])
    sy = np.sign(y[i] - y[j])
    prod = sx * sy
    concordant = int(np.count_nonzero(prod > 0))
    discordant = int(np.count_nonzero(prod < 0))
    ties_x = int(np.count_nonzero(sx == 0))
    ties_y = int(np.count_nonzero(sy == 0))
    ties_xy = int(np.count_nonzero((sx == 0) & (sy == 0)))
    pairs = n * (n - 1) // 2
    denom = (pairs - ties_x) * (pairs - ties_y)
    if denom == 0:
        raise UndefinedCorrelation("one of the lists is constant")
    tau = (concordant - discordant) / math.sqrt(denom)
    return KendallResult(tau, n, concordant, discordant, ties_x, ties_y, ties_xy)


# ---------------------------------------------------------------------------
# correlation reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AspectCorrelation:
    aspect: Aspect
    tau: float
    n: int
    concordant: int
    discordant: int
    ties_x: int
    ties_y: int
    excluded: tuple[str, ...] = ()

    @property
    def abs_tau(self) -> float:
        return abs(self.tau)

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "abs_tau": self.abs_tau,
            "n": self.n,
            "concordant": self.concordant,
            "discordant": self.discordant,
            "ties_metric": self.ties_x,
            "ties_human": self.ties_y,
            "excluded": len(self.excluded),
            "excluded_ids": list(self.excluded),
        }


@dataclass(frozen=True)
class CorrelationReport:
    metric_id: str
    dataset_id: str
    aspects: Mapping[Aspect, AspectCorrelation] = field(default_factory=dict)

    def __getitem__(self, aspect) -> AspectCorrelation:
        return self.aspects[Aspect(aspect)]

    def to_dict(self) -> dict:
        return {
            "metric": self.metric_id,
            "dataset": self.dataset_id,
            "aspects": {a.value: c.to_dict() for a, c in self.aspects.items()},
        }


def _usable(value) -> bool:
    return value is not None and not (isinstance(value, float) and math.isnan(value))


def correlate(
    scores: Mapping[str, float | None],
    rated: Sequence[RatedStory],
    aspect,
) -> AspectCorrelation:
    """Correlate per-story metric scores with aggregated ratings for one aspect.

    Stories lacking a score or a rating for ``aspect`` are excluded and listed.
    Score ids with no rated story are a join error.
    """
    aspect = Aspect(aspect)
    known = {r.id for r in rated}
    orphans = set(scores) - known
    if orphans:
        raise JoinError(orphans)
    xs, ys, excluded = [], [], []
    for r in rated:
        s = scores.get(r.id)
        h = r.aggregated(aspect)
        if _usable(s) and h is not None:
            xs.append(float(s))
            ys.append(h)
        else:
            excluded.append(r.id)
    if len(xs) < 2:
        raise InsufficientData(f"{aspect.value}: only {len(xs)} usable stories")
    k = kendall_tau(xs, ys)
    return AspectCorrelation(aspect, k.tau, k.n, k.concordant, k.discordant, k.ties_x, k.ties_y, tuple(excluded))


def correlate_aspects(
    scores,
    rated: Sequence[RatedStory],
    *,
    aspects=ASPECTS,
    by_aspect: bool = False,
    metric_id: str = "metric",
    dataset_id: str = "dataset",
) -> CorrelationReport:
    """Build a report over several aspects.

    ``scores`` maps ``id -> score`` and is reused for every aspect, or, with
    ``by_aspect=True``, maps ``aspect -> (id -> score)``.
    """
    out = {}
    for a in map(Aspect, aspects):
        per = scores.get(a, scores.get(a.value, {})) if by_aspect else scores
        out[a] = correlate(per, rated, a)
    return CorrelationReport(metric_id, dataset_id, out)


def format_table(reports: Sequence[CorrelationReport], aspects=ASPECTS, scale: float = 100.0) -> str:
    """Aligned text table: one row per metric, five aspect columns per dataset.

    Values are ``|tau| * scale`` with one decimal.
    """
    aspects = [Aspect(a) for a in aspects]
    datasets = list(dict.fromkeys(r.dataset_id for r in reports))
    metrics = list(dict.fromkeys(r.metric_id for r in reports))
    index = {(r.metric_id, r.dataset_id): r for r in reports}
    cell = 6
    name_w = max([len("Metric")] + [len(m) for m in metrics]) + 2
    group_w = cell * len(aspects)
    lines = [
        " " * name_w + "".join(d.center(group_w) for d in datasets),
        "Metric".ljust(name_w) + "".join(a.abbrev.rjust(cell) for _ in datasets for a in aspects),
    ]
    lines.append("-" * len(lines[1]))
    for m in metrics:
        row = m.ljust(name_w)
        for d in datasets:
            rep = index.get((m, d))
            for a in aspects:
                if rep is None or a not in rep.aspects:
                    row += "-".rjust(cell)
                else:
                    row += f"{rep.aspects[a].abs_tau * scale:.1f}".rjust(cell)
        lines.append(row)
    return "\n".join(line.rstrip() for line in lines) + "\n"
