"""
Perturbing a story
==================

Each perturbation corrupts a story in a way aimed at one quality aspect.
All of them are seeded, so the same story and seed give the same output.
"""

from deltascore import (
    ConditionedStory,
    PerturbationSpec,
    Resources,
    default_profiles,
    perturb,
)

story = ConditionedStory(
    "roc-1",
    "she went to the store .",
    "she did n't intend to buy anything . unfortunately she has poor impulse control . "
    "she was so happy when she found a big red hat .",
)

# The three production settings: Typo@0.4, Jumble@0.9 and Antonym@0.8.
for profile_set in default_profiles().production:
    spec = profile_set.profiles[0].spec.with_seed(7)
    out = perturb(story, spec)
    print(f"{profile_set.name:12s} {out.perturbed}")

# Seedless kinds: subject/verb disagreement and sentence reordering.
for kind in ("subj_verb_dis", "sent_reorder"):
    print(f"{kind:12s} {perturb(story, PerturbationSpec(kind, seed=7)).perturbed}")

# Removing words related to the condition needs the word set; here it is
# supplied directly instead of asking a text service.
res = Resources(relevant_words={"store", "buy", "hat"})
out = perturb(story, PerturbationSpec("rm_rel_words"), res)
print(f"{'rm_rel_words':12s} {out.perturbed}")

# Every output carries an edit log and serializes to one JSON line.
print(perturb(story, PerturbationSpec("typo", 0.4, seed=7)).to_json())

# A no-op is flagged rather than raised: one sentence cannot be reordered.
print(perturb(ConditionedStory("x", "", "just one sentence ."), PerturbationSpec("sent_reorder")).noop)
