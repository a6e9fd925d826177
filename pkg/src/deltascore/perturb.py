"""Aspect-targeted story perturbations.

Every local perturbation is a pure function of ``(story, spec)``: the same
input and seed give byte-identical output. The three service-backed kinds
(relevant-word lookup, commonsense violation, blander narrative) are
reproducible only through a recorded cassette.

Degree semantics:

* ``Typo`` edits ``round(degree * W)`` of the ``W`` eligible words, one
  adjacent-character transposition each.
* ``Jumble`` shuffles consecutive spans of ``max(2, round(degree * m))``
  tokens; degree 1.0 shuffles the whole story.
* ``Antonym`` replaces each lexicon word independently with probability
  ``degree``.

All other kinds take no degree and require ``degree == 1.0``.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources as _resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import llm
from .errors import DegeneratePerturbation, InvalidInput
from .rng import SeededRng, round_half_up
from .text import ConditionedStory, detokenize, replace_spans, tokenize


class PerturbationKind(str, Enum):
    TYPO = "typo"
    SUBJ_VERB_DIS = "subj_verb_dis"
    JUMBLE = "jumble"
    SENT_REORDER = "sent_reorder"
    RM_REL_WORDS = "rm_rel_words"
    STORY_REPLACE = "story_replace"
    ANTONYM = "antonym"
    COMMONSENSE = "commonsense"
    BLANDER_NARRATIVE = "blander_narrative"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, name: str) -> "PerturbationKind":
        key = name.strip().lower().replace("-", "_")
        for kind in cls:
            if key in (kind.value, kind.label.lower()):
                return kind
        raise InvalidInput(f"unknown perturbation kind {name!r}")


_LABELS = {
    PerturbationKind.TYPO: "Typo",
    PerturbationKind.SUBJ_VERB_DIS: "SubjVerbDis",
    PerturbationKind.JUMBLE: "Jumble",
    PerturbationKind.SENT_REORDER: "SentReorder",
    PerturbationKind.RM_REL_WORDS: "RmRelWords",
    PerturbationKind.STORY_REPLACE: "StoryReplace",
    PerturbationKind.ANTONYM: "Antonym",
    PerturbationKind.COMMONSENSE: "Commonsense",
    PerturbationKind.BLANDER_NARRATIVE: "BlanderNarrative",
}

DEGREE_KINDS = frozenset({PerturbationKind.TYPO, PerturbationKind.JUMBLE, PerturbationKind.ANTONYM})


class Aspect(str, Enum):
    FLUENCY = "fluency"
    COHERENCE = "coherence"
    RELATEDNESS = "relatedness"
    LOGICALITY = "logicality"
    INTERESTINGNESS = "interestingness"

    @property
    def abbrev(self) -> str:
        return self.value[:3].capitalize() + "."


ASPECTS = tuple(Aspect)


@dataclass(frozen=True)
class PerturbationSpec:
    kind: PerturbationKind
    degree: float = 1.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", PerturbationKind(self.kind))
        if not 0.0 <= self.degree <= 1.0:
            raise InvalidInput(f"degree must be in [0, 1], got {self.degree}")
        if self.kind not in DEGREE_KINDS and self.degree != 1.0:
            raise InvalidInput(f"{self.kind.label} takes no degree; it must be 1.0")
        if not 0 <= self.seed < 2**64:
            raise InvalidInput("seed must be a 64-bit unsigned integer")

    def with_seed(self, seed: int) -> "PerturbationSpec":
        return PerturbationSpec(self.kind, self.degree, seed)


@dataclass(frozen=True)
class Edit:
    op: str
    position: int
    before: str
    after: str


@dataclass(frozen=True)
class PerturbedStory:
    id: str
    original: str
    perturbed: str
    spec: PerturbationSpec
    edits: tuple[Edit, ...] = ()
    noop: bool = False
    note: str = ""

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "kind": self.spec.kind.value,
            "degree": self.spec.degree,
            "seed": self.spec.seed,
            "original": self.original,
            "perturbed": self.perturbed,
            "edits": [e.__dict__ for e in self.edits],
            "noop": self.noop,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), ensure_ascii=False, sort_keys=False)


def _unpack(story) -> tuple[str, str]:
    if isinstance(story, ConditionedStory):
        return story.id, story.story
    if not isinstance(story, str) or not story.strip():
        raise InvalidInput("story must be non-empty text")
    return "", story


def _result(sid, original, perturbed, spec, edits, *, noop=None, note="") -> PerturbedStory:
    if noop is None:
        noop = tokenize(perturbed).words == tokenize(original).words
    return PerturbedStory(sid, original, perturbed, spec, tuple(edits), noop, note)


# ---------------------------------------------------------------------------
# Typo
# ---------------------------------------------------------------------------


def _swap_sites(word: str) -> list[int]:
    return [i for i in range(len(word) - 1) if word[i] != word[i + 1]]


def perturb_typo(story, degree: float, seed: int) -> PerturbedStory:
    """Transpose one adjacent character pair in ``round(degree * W)`` words.

    Eligible words contain a letter and at least one adjacent pair of
    differing characters, so every edit really changes the text. Words are
    drawn without replacement; for each, in draw order, one pair is drawn.
    """
    sid, text = _unpack(story)
    spec = PerturbationSpec(PerturbationKind.TYPO, degree, seed)
    toks = tokenize(text).tokens
    eligible = [i for i, t in enumerate(toks) if any(c.isalpha() for c in t.text) and _swap_sites(t.text)]
    if not eligible:
        return _result(sid, text, text, spec, [], noop=True, note="no eligible word")
    rng = SeededRng(seed)
    k = round_half_up(degree * len(eligible))
    replacements = {}
    for pick in rng.sample(len(eligible), k):
        idx = eligible[pick]
        word = toks[idx].text
        sites = _swap_sites(word)
        p = sites[rng.below(len(sites))]
        replacements[idx] = word[:p] + word[p + 1] + word[p] + word[p + 2 :]
    edits = [Edit("swap", i, toks[i].text, replacements[i]) for i in sorted(replacements)]
    return _result(sid, text, replace_spans(text, toks, replacements), spec, edits)


# ---------------------------------------------------------------------------
# SubjVerbDis
# ---------------------------------------------------------------------------

AUX_FLIPS = {
    "is": "am",
    "am": "is",
    "are": "is",
    "was": "were",
    "were": "was",
    "has": "have",
    "have": "has",
    "does": "do",
    "do": "does",
}
# a form right after one of these is non-finite ("to have", "did n't do")
_NON_FINITE_CUES = frozenset(
    "to will would can could should might must may shall n't not 'll 'd".split()
)
SINGULAR_SUBJECTS = frozenset({"he", "she", "it"})
PLURAL_SUBJECTS = frozenset({"i", "you", "we", "they"})

VERBS = """
accept add agree allow answer appear ask bake believe belong borrow break bring build buy call
carry catch change check choose clean climb close come cook cost count cover cry cut dance decide
deliver destroy die draw dream dress drink drive drop eat enjoy enter expect explain fall feel fight
fill find finish fish fix fly follow forget fry get give go grow guess happen hate hear help hide
hit hold hope hug hunt hurry jump keep kick kill kiss know laugh learn leave lie like listen live
look lose love make marry mean meet miss move need notice obey offer open order own paint pass pay
pick plan plant play pray prefer prepare promise pull push put reach read realize receive remember
rent reply rest return ride ring rise run save say search see seem sell send serve shop shout show
sing sit sleep smell smile snow speak spend stand start stay steal stop study swim take talk taste
teach tell thank think throw touch travel try turn understand use visit wait wake walk want wash
watch wear win wish wonder work worry write
""".split()


def third_person(verb: str) -> str:
    irregular = {"go": "goes", "do": "does", "have": "has", "be": "is"}
    if verb in irregular:
        return irregular[verb]
    if verb.endswith("y") and len(verb) > 1 and verb[-2] not in "aeiou":
        return verb[:-1] + "ies"
    if verb.endswith(("s", "x", "z", "ch", "sh", "o")):
        return verb + "es"
    return verb + "s"


_TO_THIRD = {v: third_person(v) for v in VERBS}
_TO_BASE = {s: v for v, s in _TO_THIRD.items()}


def _match_case(template: str, word: str) -> str:
    if template[:1].isupper():
        return word[:1].upper() + word[1:]
    return word


def perturb_subj_verb(story, seed: int = 0) -> PerturbedStory:
    """Break subject-verb agreement with a closed lexicon.

    Finite copulas and auxiliaries are flipped wherever they occur (``is`` ->
    ``am``, ``are`` -> ``is``, ``was`` <-> ``were`` ...). Lexical verbs are
    flipped only right after a pronoun subject: ``he walks`` -> ``he walk``,
    ``they walk`` -> ``they walks``. The seed is accepted for interface
    symmetry; the rule set is deterministic.
    """
    sid, text = _unpack(story)
    spec = PerturbationSpec(PerturbationKind.SUBJ_VERB_DIS, 1.0, seed)
    toks = tokenize(text).tokens
    replacements = {}
    for i, tok in enumerate(toks):
        w = tok.text.casefold()
        prev = toks[i - 1].text.casefold() if i else ""
        if w in AUX_FLIPS and prev not in _NON_FINITE_CUES:
            replacements[i] = _match_case(tok.text, AUX_FLIPS[w])
        elif prev in SINGULAR_SUBJECTS and w in _TO_BASE:
            replacements[i] = _match_case(tok.text, _TO_BASE[w])
        elif prev in PLURAL_SUBJECTS and w in _TO_THIRD:
            replacements[i] = _match_case(tok.text, _TO_THIRD[w])
    if not replacements:
        return _result(sid, text, text, spec, [], noop=True, note="no recognized verb")
    edits = [Edit("agree", i, toks[i].text, r) for i, r in sorted(replacements.items())]
    return _result(sid, text, replace_spans(text, toks, replacements), spec, edits)


# ---------------------------------------------------------------------------
# Jumble / SentReorder
# ---------------------------------------------------------------------------


def jumble_span(m: int, degree: float) -> int:
    return max(2, round_half_up(degree * m))


def perturb_jumble(story, degree: float, seed: int) -> PerturbedStory:
    """Shuffle tokens inside consecutive spans (punctuation included)."""
    sid, text = _unpack(story)
    spec = PerturbationSpec(PerturbationKind.JUMBLE, degree, seed)
    words = tokenize(text).words
    m = len(words)
    if m < 2:
        return _result(sid, text, text, spec, [], noop=True, note="single token")
    rng = SeededRng(seed)
    span = jumble_span(m, degree)
    out: list[str] = []
    edits = []
    for start in range(0, m, span):
        chunk = words[start : start + span]
        if len(chunk) >= 2:
            perm = rng.permutation(len(chunk))
            shuffled = [chunk[j] for j in perm]
            edits.append(Edit("permute", start, " ".join(chunk), " ".join(shuffled)))
            chunk = shuffled
        out.extend(chunk)
    return _result(sid, text, detokenize(out), spec, edits)


def perturb_sent_reorder(story, seed: int) -> PerturbedStory:
    """Shuffle whole sentences.

    Two sentences are always swapped. With three or more, an identity draw is
    redrawn once and the second draw is kept whatever it is.
    """
    sid, text = _unpack(story)
    spec = PerturbationSpec(PerturbationKind.SENT_REORDER, 1.0, seed)
    tk = tokenize(text)
    n = len(tk.sentences)
    if n < 2:
        return _result(sid, text, text, spec, [], noop=True, note="single sentence")
    if n == 2:
        perm = [1, 0]
    else:
        rng = SeededRng(seed)
        perm = rng.permutation(n)
        if perm == list(range(n)):
            perm = rng.permutation(n)
    words = tk.words
    out = [w for j in perm for w in words[slice(*tk.sentences[j])]]
    edit = Edit("reorder", 0, " ".join(map(str, range(n))), " ".join(map(str, perm)))
    return _result(sid, text, detokenize(out), spec, [edit])


# ---------------------------------------------------------------------------
# RmRelWords / StoryReplace
# ---------------------------------------------------------------------------


def perturb_rm_rel_words(story, relevant_words: Iterable[str]) -> PerturbedStory:
    sid, text = _unpack(story)
    spec = PerturbationSpec(PerturbationKind.RM_REL_WORDS)
    targets = {w.strip().casefold() for w in relevant_words} - {""}
    if not targets:
        raise InvalidInput("relevant-word set is empty")
    words = tokenize(text).words
    kept, edits = [], []
    for i, w in enumerate(words):
        if w.casefold() in targets:
            edits.append(Edit("delete", i, w, ""))
        else:
            kept.append(w)
    if not edits:
        return _result(sid, text, text, spec, [], noop=True, note="no relevant word present")
    if not kept:
        raise DegeneratePerturbation(f"removing {sorted(targets)} would empty story {sid!r}")
    return _result(sid, text, detokenize(kept), spec, edits)


def replacement_pool(stories: Iterable[ConditionedStory], original: ConditionedStory) -> list[ConditionedStory]:
    """Candidates for StoryReplace: stories written for a different condition."""
    return [s for s in stories if s.id != original.id and s.condition != original.condition]


def perturb_story_replace(story, pool: Sequence[ConditionedStory], backend) -> PerturbedStory:
    """Swap in the pool story whose unconditional mean log-likelihood is closest.

    Ties go to the lexicographically smallest id.
    """
    from .scoring import score_conditional

    sid, text = _unpack(story)
    spec = PerturbationSpec(PerturbationKind.STORY_REPLACE)
    if not pool:
        raise InvalidInput("StoryReplace needs a non-empty candidate pool")
    target = score_conditional(backend, "", text).mean_logprob
    best = None
    for cand in pool:
        dist = abs(score_conditional(backend, "", cand.story).mean_logprob - target)
        key = (dist, cand.id)
        if best is None or key < best[0]:
            best = (key, cand)
    (dist, _), chosen = best
    edit = Edit("replace", 0, sid, chosen.id)
    return _result(sid, text, chosen.story, spec, [edit], note=f"distance={dist!r}")


# ---------------------------------------------------------------------------
# Antonym
# ---------------------------------------------------------------------------


class AntonymLexicon(Mapping[str, tuple]):
    """Case-folded word -> antonyms; the first antonym is the one used."""

    def __init__(self, entries: Mapping[str, Sequence[str]]):
        self._entries = {k.casefold(): tuple(v) for k, v in entries.items() if v}

    def __getitem__(self, word):
        return self._entries[word.casefold()]

    def __contains__(self, word):
        return isinstance(word, str) and word.casefold() in self._entries

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    @classmethod
    def parse(cls, text: str) -> "AntonymLexicon":
        entries = {}
        for n, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            fields = [f.strip() for f in line.split("\t") if f.strip()]
            if len(fields) < 2:
                raise InvalidInput(f"antonym lexicon line {n} has no antonym: {line!r}")
            entries.setdefault(fields[0], fields[1:])
        return cls(entries)


def load_lexicon(path) -> AntonymLexicon:
    return AntonymLexicon.parse(Path(path).read_text(encoding="utf-8"))


@functools.lru_cache(maxsize=1)
def default_lexicon() -> AntonymLexicon:
    data = _resources.files("deltascore").joinpath("data/antonyms.tsv").read_text(encoding="utf-8")
    return AntonymLexicon.parse(data)


def perturb_antonym(story, degree: float, seed: int, lexicon: Mapping[str, Sequence[str]] | None = None) -> PerturbedStory:
    """Replace each lexicon word with its first antonym with probability ``degree``.

    One uniform draw is consumed per lexicon word, in text order, whether or
    not it fires.
    """
    sid, text = _unpack(story)
    spec = PerturbationSpec(PerturbationKind.ANTONYM, degree, seed)
    if lexicon is None:
        lex = default_lexicon()
    elif isinstance(lexicon, AntonymLexicon):
        lex = lexicon
    else:
        lex = AntonymLexicon(lexicon)
    toks = tokenize(text).tokens
    eligible = [i for i, t in enumerate(toks) if t.text in lex]
    if not eligible:
        return _result(sid, text, text, spec, [], noop=True, note="no lexicon word")
    rng = SeededRng(seed)
    replacements = {}
    for i in eligible:
        if rng.random() < degree:
            replacements[i] = _match_case(toks[i].text, lex[toks[i].text][0])
    edits = [Edit("antonym", i, toks[i].text, r) for i, r in sorted(replacements.items())]
    return _result(sid, text, replace_spans(text, toks, replacements), spec, edits)


# ---------------------------------------------------------------------------
# service-backed
# ---------------------------------------------------------------------------

_SERVICE_KINDS = {
    llm.PromptTemplate.COMMONSENSE: PerturbationKind.COMMONSENSE,
    llm.PromptTemplate.BLANDER_NARRATIVE: PerturbationKind.BLANDER_NARRATIVE,
}


def perturb_via_service(story, template, client, title: str | None = None) -> PerturbedStory:
    """Let the text service rewrite the story; the request/response pair is logged."""
    sid, text = _unpack(story)
    template = llm.PromptTemplate(template)
    if template not in _SERVICE_KINDS:
        raise InvalidInput(f"{template.value} does not produce a rewritten story")
    spec = PerturbationSpec(_SERVICE_KINDS[template])
    prompt = llm.render_prompt(template, title=title, story=text)
    response = client.complete(prompt)
    if not response or not response.strip():
        raise DegeneratePerturbation(f"service returned an empty story for {sid!r}")
    edit = Edit("service", 0, prompt, response)
    perturbed = response.strip()
    return _result(sid, text, perturbed, spec, [edit])


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


@dataclass
class Resources:
    """Kind-specific payloads kept out of :class:`PerturbationSpec`.

    ``relevant_words`` may be a fixed set, a mapping ``story id -> set`` or a
    callable ``ConditionedStory -> set``. Without it, RmRelWords asks
    ``client``. ``pool`` is filtered per story with :func:`replacement_pool`.
    """

    lexicon: Mapping[str, Sequence[str]] | None = None
    relevant_words: object = None
    pool: Sequence[ConditionedStory] | None = None
    backend: object = None
    client: object = None


def _relevant_for(story: ConditionedStory, res: Resources):
    rw = res.relevant_words
    if callable(rw):
        return rw(story), None
    if isinstance(rw, Mapping):
        return rw.get(story.id, set()), None
    if rw is not None:
        return rw, None
    if res.client is None:
        raise InvalidInput("RmRelWords needs relevant words or a service client")
    words, prompt, response = llm.relevant_words(res.client, story.condition, story.story)
    return words, Edit("service", 0, prompt, response)


def perturb(story: ConditionedStory, spec: PerturbationSpec, resources: Resources | None = None) -> PerturbedStory:
    res = resources or Resources()
    kind = spec.kind
    if kind is PerturbationKind.TYPO:
        out = perturb_typo(story, spec.degree, spec.seed)
    elif kind is PerturbationKind.SUBJ_VERB_DIS:
        out = perturb_subj_verb(story, spec.seed)
    elif kind is PerturbationKind.JUMBLE:
        out = perturb_jumble(story, spec.degree, spec.seed)
    elif kind is PerturbationKind.SENT_REORDER:
        out = perturb_sent_reorder(story, spec.seed)
    elif kind is PerturbationKind.ANTONYM:
        out = perturb_antonym(story, spec.degree, spec.seed, res.lexicon)
    elif kind is PerturbationKind.RM_REL_WORDS:
        words, exchange = _relevant_for(story, res)
        out = perturb_rm_rel_words(story, words)
        if exchange is not None:
            out = _with_edits(out, (exchange,) + out.edits)
    elif kind is PerturbationKind.STORY_REPLACE:
        if res.backend is None or res.pool is None:
            raise InvalidInput("StoryReplace needs a candidate pool and a backend")
        out = perturb_story_replace(story, replacement_pool(res.pool, story), res.backend)
    elif kind in (PerturbationKind.COMMONSENSE, PerturbationKind.BLANDER_NARRATIVE):
        if res.client is None:
            raise InvalidInput(f"{kind.label} needs a service client")
        template = {v: k for k, v in _SERVICE_KINDS.items()}[kind]
        out = perturb_via_service(story, template, res.client)
    else:  # pragma: no cover
        raise InvalidInput(f"unhandled kind {kind}")
    # keep the caller's seed on record even for seedless kinds
    return _with_spec(out, spec)


def _with_edits(p: PerturbedStory, edits) -> PerturbedStory:
    return PerturbedStory(p.id, p.original, p.perturbed, p.spec, tuple(edits), p.noop, p.note)


def _with_spec(p: PerturbedStory, spec: PerturbationSpec) -> PerturbedStory:
    return PerturbedStory(p.id, p.original, p.perturbed, spec, p.edits, p.noop, p.note)


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

TARGET_ASPECT = {
    PerturbationKind.TYPO: Aspect.FLUENCY,
    PerturbationKind.SUBJ_VERB_DIS: Aspect.FLUENCY,
    PerturbationKind.JUMBLE: Aspect.COHERENCE,
    PerturbationKind.SENT_REORDER: Aspect.COHERENCE,
    PerturbationKind.RM_REL_WORDS: Aspect.RELATEDNESS,
    PerturbationKind.STORY_REPLACE: Aspect.RELATEDNESS,
    PerturbationKind.ANTONYM: Aspect.LOGICALITY,
    PerturbationKind.COMMONSENSE: Aspect.LOGICALITY,
    PerturbationKind.BLANDER_NARRATIVE: Aspect.INTERESTINGNESS,
}

PRODUCTION_DEGREES = {
    PerturbationKind.TYPO: 0.4,
    PerturbationKind.JUMBLE: 0.9,
    PerturbationKind.ANTONYM: 0.8,
}


@dataclass(frozen=True)
class AspectProfile:
    aspect: Aspect
    spec: PerturbationSpec


@dataclass(frozen=True)
class ProfileSet:
    """One perturbation setting per aspect; a row of the correlation table."""

    name: str
    profiles: tuple[AspectProfile, ...]

    def __post_init__(self):
        aspects = [p.aspect for p in self.profiles]
        if len(set(aspects)) != len(aspects):
            raise InvalidInput(f"profile set {self.name!r} has duplicate aspects")

    @classmethod
    def uniform(cls, spec: PerturbationSpec, name: str | None = None, aspects=ASPECTS) -> "ProfileSet":
        name = name or (spec.kind.label if spec.kind not in DEGREE_KINDS else f"{spec.kind.label}@{spec.degree:g}")
        return cls(name, tuple(AspectProfile(Aspect(a), spec) for a in aspects))

    @property
    def aspects(self) -> tuple[Aspect, ...]:
        return tuple(p.aspect for p in self.profiles)

    def spec_for(self, aspect) -> PerturbationSpec:
        for p in self.profiles:
            if p.aspect == Aspect(aspect):
                return p.spec
        raise KeyError(aspect)


@dataclass(frozen=True)
class ProfileCatalog:
    production: tuple[ProfileSet, ...]
    aspect_targeted: tuple[ProfileSet, ...]
    target_aspects: Mapping[PerturbationKind, Aspect] = field(default_factory=lambda: dict(TARGET_ASPECT))

    def lookup(self, kind) -> PerturbationSpec:
        kind = PerturbationKind(kind)
        for ps in self.production + self.aspect_targeted:
            spec = ps.profiles[0].spec
            if spec.kind is kind:
                return spec
        raise KeyError(kind)

    def target_aspect(self, kind) -> Aspect:
        return self.target_aspects[PerturbationKind(kind)]

    def get(self, name: str) -> tuple[ProfileSet, ...]:
        if name == "default":
            return self.production
        if name == "aspect-targeted":
            return self.aspect_targeted
        raise KeyError(name)


def default_profiles() -> ProfileCatalog:
    """Typo@0.4, Jumble@0.9 and Antonym@0.8, each scored against every aspect.

    ``aspect_targeted`` has one row per perturbation kind (degree kinds at the
    same production degrees) and ``target_aspect`` gives the aspect each kind
    was designed for.
    """
    production = tuple(ProfileSet.uniform(PerturbationSpec(k, d)) for k, d in PRODUCTION_DEGREES.items())
    targeted = tuple(
        ProfileSet.uniform(PerturbationSpec(k, PRODUCTION_DEGREES.get(k, 1.0))) for k in TARGET_ASPECT
    )
    return ProfileCatalog(production, targeted)
