import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deltascore import (
    Aspect,
    AspectProfile,
    ConditionedStory,
    PerturbationSpec,
    ProfileSet,
    Resources,
    ScoringError,
    default_profiles,
    delta_score,
    evaluate_aspects,
    score_conditional,
    score_corpus,
)
from deltascore.scoring import ScoredTokens
from conftest import FnBackend

LN_HALF, LN_SIXTH = math.log(1 / 2), math.log(1 / 6)


def test_noop_is_exactly_zero(toy_backend):
    s = ConditionedStory("s", "", "hello")
    r = delta_score(s, PerturbationSpec("jumble", 1.0, 1), toy_backend)
    assert r.delta == 0.0 and r.flags.noop
    assert r.logp_perturbed == r.logp_original


def test_bigram_swap_by_hand(toy_backend):
    # "a b": mean(ln 1/2, ln 1/2); "b a": mean(ln 1/6, ln 1/6) -> delta = ln 3
    # seed 2 draws the swap (checked against the longhand Fisher-Yates replay)
    s = ConditionedStory("s", "", "a b")
    r = delta_score(s, PerturbationSpec("jumble", 1.0, 2), toy_backend)
    assert r.logp_original == pytest.approx(LN_HALF, abs=1e-12)
    assert r.logp_perturbed == pytest.approx(LN_SIXTH, abs=1e-12)
    assert r.delta == pytest.approx(math.log(3), abs=1e-12)


def test_antisymmetry(toy_backend):
    spec = PerturbationSpec("sent_reorder", seed=0)
    fwd = delta_score(ConditionedStory("s", "", "a b . b a ."), spec, toy_backend)
    back = delta_score(ConditionedStory("s", "", "b a . a b ."), spec, toy_backend)
    assert fwd.delta == pytest.approx(-back.delta, abs=1e-12)


def test_log_base_rescaling_keeps_sign(fluent_backend):
    # a model whose logprobs are all scaled by a positive constant (a change of
    # log base) gives deltas of the same sign
    scaled = FnBackend(lambda w: 0.0)

    def story_logprobs(condition, story):
        toks, lps, tr = fluent_backend.story_logprobs(condition, story)
        return ScoredTokens(toks, [2.0 * v for v in lps], tr)

    scaled.story_logprobs = story_logprobs
    s = ConditionedStory("s", "", "anna bought a warm cake at the market on sunday .")
    spec = PerturbationSpec("jumble", 0.9, 3)
    a = delta_score(s, spec, fluent_backend).delta
    b = delta_score(s, spec, scaled).delta
    assert b == pytest.approx(2 * a, abs=1e-12) and a > 0


def test_evaluate_aspects_shares_original():
    be = FnBackend(lambda w: -1.0 - len(w) / 10)
    s = ConditionedStory("s", "c", "the happy dog ran home early . then it slept .")
    res = evaluate_aspects(s, default_profiles().production[1], be)
    assert set(res) == set(Aspect)
    assert len({r.logp_original for r in res.values()}) == 1
    # one original + one perturbed score
    assert len(be.calls) == 2
    assert all(r.profile == "Jumble@0.9" for r in res.values())


def test_evaluate_aspects_targeted_mix(toy_backend):
    prof = ProfileSet("mix", (
        AspectProfile(Aspect.FLUENCY, PerturbationSpec("typo", 0.4, 1)),
        AspectProfile(Aspect.COHERENCE, PerturbationSpec("sent_reorder", seed=1)),
    ))
    res = evaluate_aspects(ConditionedStory("s", "", "a b . b a ."), prof, toy_backend)
    assert res[Aspect.FLUENCY].spec.kind.value == "typo"
    assert res[Aspect.COHERENCE].spec.kind.value == "sent_reorder"


def test_degenerate_flags_result(toy_backend):
    s = ConditionedStory("s", "", "a a")
    r = delta_score(s, PerturbationSpec("rm_rel_words"), toy_backend, Resources(relevant_words={"a"}))
    assert r.flags.degenerate and r.delta is None
    assert r.to_record()["flags"]["degenerate"] is True


def test_scoring_error_propagates():
    class Down:
        backend_id = "down"

        def story_logprobs(self, c, s):
            raise ConnectionError("x")

    with pytest.raises(ScoringError, match="'s1'"):
        delta_score(ConditionedStory("s1", "", "a b"), PerturbationSpec("jumble"), Down())


def test_replicates_average(fluent_backend):
    s = ConditionedStory("s", "", "grace found a small ball in the garden after lunch .")
    spec = PerturbationSpec("jumble", 0.9, 5)
    one = delta_score(s, spec, fluent_backend)
    many = delta_score(s, spec, fluent_backend, replicates=4)
    assert many.replicates == 4 and one.delta > 0 and many.delta > 0
    assert many.to_record()["replicates"] == 4
    with pytest.raises(ValueError):
        delta_score(s, spec, fluent_backend, replicates=0)


@pytest.mark.parametrize("jobs", [1, 3])
def test_score_corpus_order_and_determinism(fluent_backend, jobs):
    stories = [ConditionedStory(f"s{i}", "", f"anna found a {n} at the park .") for i, n in enumerate(["kite", "book", "lamp"])]
    sets = default_profiles().production
    rows = score_corpus(stories, sets, fluent_backend, seed=7, jobs=jobs)
    assert len(rows) == 3 * 3 * 5
    assert [r.id for r in rows[:15]] == ["s0"] * 15
    assert rows == score_corpus(stories, sets, fluent_backend, seed=7)
    other = score_corpus(stories, sets, fluent_backend, seed=8)
    assert [r.spec.seed for r in rows] != [r.spec.seed for r in other]


_tok = st.sampled_from(["a", "b", "c", "."])


@settings(max_examples=100)
@given(st.lists(_tok, min_size=1, max_size=12), st.lists(_tok, min_size=1, max_size=12))
def test_delta_is_difference_of_means(xs, ys):
    be = FnBackend(lambda w: -1.0 - "abc.".index(w))
    a = score_conditional(be, "", " ".join(xs)).mean_logprob
    b = score_conditional(be, "", " ".join(ys)).mean_logprob
    assert (a - b) == pytest.approx(-(b - a), abs=1e-12)
