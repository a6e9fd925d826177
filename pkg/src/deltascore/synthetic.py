"""Seeded synthetic corpora for hermetic experiments.

``fluent_sentences`` draws short declarative sentences from a small template
grammar, already in the space-separated corpus normalization. A bigram model
trained on a few thousand of them prefers the grammatical word order, which is
all the directional checks need.
"""

from __future__ import annotations

from .perturb import perturb_jumble
from .rng import SeededRng
from .text import ConditionedStory, detokenize, tokenize

NAMES = "anna ben carla david emma frank grace henry iris jack".split()
PRONOUNS = {"anna": "she", "carla": "she", "emma": "she", "grace": "she", "iris": "she"}
NOUNS = "dog cat ball book cake bike letter gift kite song lamp hat".split()
PLACES = "park store school beach library market garden kitchen station river".split()
ADJS = "small red old new happy quiet bright warm lovely strange".split()
VERBS_PAST = "found bought carried painted cleaned fixed wrapped dropped opened sold".split()
VERBS_BASE = "find buy carry paint clean fix wrap open sell read".split()
TIMES = "yesterday morning | last night | on sunday | after lunch | before dinner | every day".split(" | ")
FEELINGS = "happy tired proud excited nervous calm".split()

_TEMPLATES = (
    "{name} {vp} a {adj} {noun} at the {place} {time} .",
    "{name} went to the {place} {time} because {pron} wanted to {vb} a {noun} .",
    "the {adj} {noun} was in the {place} and {name} {vp} it {time} .",
    "{time} , {name} {vp} the {noun} and then walked to the {place} .",
    "{name} was very {feel} when {pron} {vp} the {adj} {noun} .",
    "at the {place} , {name} and a friend {vp} a {adj} {noun} together .",
)


def _pick(rng: SeededRng, items):
    return items[rng.below(len(items))]


def fluent_sentence(rng: SeededRng) -> str:
    name = _pick(rng, NAMES)
    return _pick(rng, _TEMPLATES).format(
        name=name,
        pron=PRONOUNS.get(name, "he"),
        noun=_pick(rng, NOUNS),
        place=_pick(rng, PLACES),
        adj=_pick(rng, ADJS),
        vp=_pick(rng, VERBS_PAST),
        vb=_pick(rng, VERBS_BASE),
        time=_pick(rng, TIMES),
        feel=_pick(rng, FEELINGS),
    )


def fluent_sentences(n: int, seed: int = 0) -> list[str]:
    rng = SeededRng(seed)
    return [fluent_sentence(rng) for _ in range(n)]


def synthetic_story(rng: SeededRng, n_sentences: int = 5) -> str:
    return " ".join(fluent_sentence(rng) for _ in range(n_sentences))


def plant_corruption(story: str, passes: int, seed: int) -> str:
    """Apply ``passes`` rounds of corruption; each round fully jumbles one
    not-yet-jumbled sentence, chosen at random."""
    tk = tokenize(story)
    sentences = [tk.words[a:b] for a, b in tk.sentences]
    if passes > len(sentences):
        raise ValueError(f"{passes} passes but only {len(sentences)} sentences")
    rng = SeededRng(seed)
    order = rng.sample(len(sentences), passes)
    for r, idx in enumerate(order):
        jumbled = perturb_jumble(detokenize(sentences[idx]), 1.0, rng.next_u64())
        sentences[idx] = jumbled.perturbed.split(" ")
    return detokenize(w for s in sentences for w in s)


def planted_quality_corpus(n: int = 100, seed: int = 0, levels: int = 5, n_sentences: int = 5):
    """``n`` stories with planted quality ``levels - 1 - k`` after ``k`` passes.

    Returns ``[(ConditionedStory, quality), ...]`` with ``k`` cycling through
    ``0 .. levels - 1``.
    """
    rng = SeededRng(seed)
    out = []
    for i in range(n):
        k = i % levels
        text = plant_corruption(synthetic_story(rng, n_sentences), k, rng.next_u64())
        out.append((ConditionedStory(f"syn-{i:03d}", "", text), levels - 1 - k))
    return out
