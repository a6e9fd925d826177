"""
DeltaScore
==========

The score is the drop in mean log-likelihood caused by a perturbation. A
fluent story has more to lose, so it gets a larger delta than a story that
is already scrambled.
"""

from deltascore import (
    ConditionedStory,
    NGramBackend,
    NGramModel,
    PerturbationSpec,
    default_profiles,
    delta_score,
    evaluate_aspects,
    perturb_jumble,
)
from deltascore.synthetic import fluent_sentences

backend = NGramBackend(NGramModel.train(fluent_sentences(2000, seed=1), order=2, alpha=1.0))

fluent = "grace found a small ball in the garden after lunch . she was very happy ."
scrambled = perturb_jumble(fluent, 1.0, seed=3).perturbed

spec = PerturbationSpec("jumble", 0.9, seed=5)
for sid, text in (("fluent", fluent), ("scrambled", scrambled)):
    r = delta_score(ConditionedStory(sid, "", text), spec, backend)
    print(f"{sid:10s} delta = {r.delta:6.3f}   ({r.logp_original:.3f} -> {r.logp_perturbed:.3f})")

# One result per aspect; the original story is scored once and shared.
story = ConditionedStory("s1", "", fluent)
for ps in default_profiles().production:
    results = evaluate_aspects(story, ps, backend)
    print(ps.name, {a.abbrev: round(r.delta, 3) for a, r in results.items()})

# Averaging over several perturbation draws lowers the variance.
print(delta_score(story, spec, backend, replicates=8).delta)
