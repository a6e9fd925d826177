"""DeltaScore: ``log p(s|c) - log p(s'|c)`` for a perturbed story ``s'``.

A larger value means the perturbation hurt the story more, which is read as
higher quality on the aspect the perturbation probes.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DegeneratePerturbation, ScoringError
from .perturb import Aspect, AspectProfile, PerturbationSpec, ProfileSet, Resources, perturb
from .rng import derive_seed
from .scoring import LogprobBackend, TokenLogLik, score_conditional
from .text import ConditionedStory


@dataclass(frozen=True)
class DeltaFlags:
    noop: bool = False
    truncated: bool = False
    degenerate: bool = False


@dataclass(frozen=True)
class DeltaResult:
    id: str
    aspect: Aspect | None
    spec: PerturbationSpec
    logp_original: float
    logp_perturbed: float | None
    delta: float | None
    flags: DeltaFlags = field(default_factory=DeltaFlags)
    profile: str | None = None
    replicates: int = 1

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "profile": self.profile,
            "aspect": self.aspect.value if self.aspect else None,
            "kind": self.spec.kind.value,
            "degree": self.spec.degree,
            "seed": self.spec.seed,
            "replicates": self.replicates,
            "logp_original": self.logp_original,
            "logp_perturbed": self.logp_perturbed,
            "delta": self.delta,
            "flags": {
                "noop": self.flags.noop,
                "truncated": self.flags.truncated,
                "degenerate": self.flags.degenerate,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), ensure_ascii=False)


def story_seed(global_seed: int, story_id: str, kind) -> int:
    """Per-story seed so reruns repeat but stories are perturbed independently."""
    return derive_seed(global_seed, story_id, getattr(kind, "value", kind))


def _score(backend, story: ConditionedStory, text: str) -> TokenLogLik:
    try:
        return score_conditional(backend, story.condition, text)
    except ScoringError as exc:
        raise ScoringError(f"story {story.id!r}: {exc}") from exc


def likelihood_delta(backend: LogprobBackend, condition: str, story: str, perturbed: str) -> float:
    """``mean log p(story|condition) - mean log p(perturbed|condition)``."""
    a = score_conditional(backend, condition, story).mean_logprob
    b = score_conditional(backend, condition, perturbed).mean_logprob
    return a - b


def delta_score(
    story: ConditionedStory,
    spec: PerturbationSpec,
    backend: LogprobBackend,
    resources: Resources | None = None,
    *,
    aspect=None,
    original: TokenLogLik | None = None,
    replicates: int = 1,
    profile: str | None = None,
) -> DeltaResult:
    """Perturb ``story`` with ``spec`` and subtract the two mean log-likelihoods.

    Both likelihoods use the same backend and condition. A no-op perturbation
    short-circuits to ``delta == 0``. With ``replicates > 1`` the perturbed
    likelihood is averaged over extra seeds derived from ``spec.seed``.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    orig = original if original is not None else _score(backend, story, story.story)
    aspect = Aspect(aspect) if aspect is not None else None
    perturbed_lps = []
    noop_all = True
    truncated = orig.truncated
    for r in range(replicates):
        rspec = spec if r == 0 else spec.with_seed(derive_seed(spec.seed, r))
        try:
            p = perturb(story, rspec, resources)
        except DegeneratePerturbation:
            return DeltaResult(
                story.id, aspect, spec, orig.mean_logprob, None, None,
                DeltaFlags(degenerate=True, truncated=truncated), profile, replicates,
            )
        if p.noop:
            perturbed_lps.append(orig.mean_logprob)
            continue
        noop_all = False
        ll = _score(backend, story, p.perturbed)
        truncated = truncated or ll.truncated
        perturbed_lps.append(ll.mean_logprob)
    if noop_all:
        lp = orig.mean_logprob
        delta = 0.0
    else:
        lp = perturbed_lps[0] if replicates == 1 else sum(perturbed_lps) / replicates
        delta = orig.mean_logprob - lp
    return DeltaResult(
        story.id, aspect, spec, orig.mean_logprob, lp, delta,
        DeltaFlags(noop=noop_all, truncated=truncated), profile, replicates,
    )


def evaluate_aspects(
    story: ConditionedStory,
    profiles: ProfileSet | Iterable[AspectProfile],
    backend: LogprobBackend,
    resources: Resources | None = None,
    *,
    replicates: int = 1,
    original: TokenLogLik | None = None,
) -> dict[Aspect, DeltaResult]:
    """One :class:`DeltaResult` per aspect; the original is scored once.

    Aspects that share a spec share one computation.
    """
    name = profiles.name if isinstance(profiles, ProfileSet) else None
    items = profiles.profiles if isinstance(profiles, ProfileSet) else tuple(profiles)
    if original is None:
        original = _score(backend, story, story.story)
    cache: dict[PerturbationSpec, DeltaResult] = {}
    out = {}
    for prof in items:
        if prof.spec not in cache:
            cache[prof.spec] = delta_score(
                story, prof.spec, backend, resources,
                original=original, replicates=replicates, profile=name,
            )
        base = cache[prof.spec]
        out[prof.aspect] = DeltaResult(
            base.id, prof.aspect, base.spec, base.logp_original, base.logp_perturbed,
            base.delta, base.flags, name, replicates,
        )
    return out


def score_corpus(
    stories: Sequence[ConditionedStory],
    profile_sets: Sequence[ProfileSet],
    backend: LogprobBackend,
    *,
    seed: int = 0,
    resources: Resources | None = None,
    replicates: int = 1,
    jobs: int = 1,
) -> list[DeltaResult]:
    """Every story under every profile set, seeds derived from ``seed``.

    Output order is story-major, then profile set, then aspect, regardless of
    ``jobs``.
    """

    def one(story):
        rows = []
        original = _score(backend, story, story.story)
        for ps in profile_sets:
            seeded = ProfileSet(
                ps.name,
                tuple(
                    AspectProfile(p.aspect, p.spec.with_seed(story_seed(seed, story.id, p.spec.kind)))
                    for p in ps.profiles
                ),
            )
            results = evaluate_aspects(story, seeded, backend, resources, replicates=replicates, original=original)
            rows.extend(results[p.aspect] for p in seeded.profiles)
        return rows

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(one, stories))
    else:
        chunks = [one(s) for s in stories]
    return [r for chunk in chunks for r in chunk]
