"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import hashlib
import json
import math
import random
import statistics
import time
from collections import Counter

import pytest

from deltascore import (
    ConditionedStory,
    NGramBackend,
    NGramModel,
    PerturbationSpec,
    UndefinedCorrelation,
    cli,
    delta_score,
    kendall_tau,
    likelihood_delta,
    perturb_antonym,
    perturb_jumble,
    perturb_sent_reorder,
    perturb_typo,
    score_conditional,
    score_corpus,
    tokenize,
)
from deltascore.perturb import ProfileSet
from deltascore.scoring import build_backend as real_build_backend
from deltascore.synthetic import fluent_sentences, planted_quality_corpus
from conftest import acceptance, ngram_server, write_dataset
from oracles import tau_b_bruteforce

pytestmark = pytest.mark.acceptance

ASPECT_NAMES = ("fluency", "coherence", "relatedness", "logicality", "interestingness")


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def planted_dataset(path, n=100, seed=3):
    rows = []
    for story, quality in planted_quality_corpus(n, seed=seed):
        rows.append({
            "id": story.id, "condition": story.condition, "story": story.story, "system": "synthetic",
            "ratings": {a: [quality + 1] for a in ASPECT_NAMES},
        })
    return write_dataset(path, rows)


def trained_model_file(tmp_path):
    corpus = tmp_path / "fluent.txt"
    corpus.write_text("\n".join(fluent_sentences(2000, seed=1)) + "\n")
    out = tmp_path / "bigram.txt"
    assert cli.main(["train-lm", "--corpus", str(corpus), "--order", "2", "--alpha", "1", "--out", str(out)]) == 0
    return out


def record_remote(monkeypatch, model_path, args):
    model = NGramModel.load(model_path)
    monkeypatch.setattr(cli, "build_backend", lambda cfg: real_build_backend(cfg, transport=ngram_server(model)))
    try:
        assert cli.main(args) == 0
    finally:
        monkeypatch.setattr(cli, "build_backend", real_build_backend)


# ---------------------------------------------------------------------------


def test_criterion_1_table_shaped_report(monkeypatch, tmp_path, capsys):
    # stand-in for released judgments: the planted corpus, scored through the
    # remote backend (recorded once, then replayed)
    data = planted_dataset(tmp_path / "ROC.jsonl", n=40)
    model = trained_model_file(tmp_path)
    tape = tmp_path / "lm-tape.jsonl"
    remote = ["delta", "--dataset", str(data), "--backend", "remote", "--endpoint", "http://lm.invalid/score",
              "--model", "bigram", "--cassette", str(tape), "--seed", "0"]
    record_remote(monkeypatch, model, remote + ["--cassette-mode", "record", "--out", str(tmp_path / "rec")])
    assert cli.main(remote + ["--cassette-mode", "replay", "--out", str(tmp_path / "d")]) == 0
    capsys.readouterr()
    assert cli.main(["correlate", "--scores", str(tmp_path / "d/deltas.jsonl"), "--ratings", str(data),
                     "--dataset-id", "ROC", "--out", str(tmp_path / "c")]) == 0
    lines = capsys.readouterr().out.splitlines()
    body = lines[3:]
    ok = (
        lines[0].strip() == "ROC"
        and lines[1].split() == ["Metric", "Flu.", "Coh.", "Rel.", "Log.", "Int."]
        and [l.split()[0] for l in body] == ["Typo@0.4", "Jumble@0.9", "Antonym@0.8"]
        and all(len(l.split()) == 6 for l in body)
        and all(0.0 <= float(v) <= 100.0 for l in body for v in l.split()[1:])
    )
    acceptance(1, ok, f"remote replay delta + correlate gives a {len(body)}x5 |tau| table (layout only)")


def test_criterion_2_likelihood_oracle():
    start = time.perf_counter()
    backend = NGramBackend(NGramModel.train(["a b", "a b"], order=2, alpha=1.0))
    # V = {a, b, <unk>, </s>}; p(w|h) = (c(h,w) + 1) / (c(h) + 4)
    # p(a|<s>) = p(b|a) = 3/6; p(b|<s>) = p(a|a) = p(a|b) = p(b|b) = p(<unk>|<s>) = 1/6
    # unseen history <unk>: 1/4 for every word
    h, s, q = math.log(1 / 2), math.log(1 / 6), math.log(1 / 4)
    cases = [
        ("", "a", h),
        ("", "a b", h),
        ("a", "b", h),
        ("", "b a", s),
        ("b", "a", s),
        ("a b", "a", s),
        ("", "z", s),
        ("z", "a", q),
        ("", "a a b", (h + s + h) / 3),
        ("a", "b b", (h + s) / 2),
        ("", "a b a b", (h + h + s + h) / 4),
        ("z z", "z", q),
        ("a b", "a b", (s + h) / 2),
    ]
    worst = max(abs(score_conditional(backend, c, st).mean_logprob - want) for c, st, want in cases)
    elapsed = time.perf_counter() - start
    acceptance(2, worst <= 1e-9 and elapsed < 1.0,
               f"{len(cases)} hand-worked cases, max error {worst:.1e}, {elapsed:.3f}s")


def test_criterion_3_delta_wiring(fluent_backend):
    rng = random.Random(0)
    sentences = fluent_sentences(200, seed=11)
    zero_ok = all(likelihood_delta(fluent_backend, "", x, x) == 0.0 for x in sentences[:100])
    worst = 0.0
    for i in range(100):
        cond = sentences[rng.randrange(200)]
        a = " ".join(sentences[rng.randrange(200)] for _ in range(rng.randint(1, 3)))
        b = perturb_jumble(a, rng.random(), rng.getrandbits(64)).perturbed if i % 2 else sentences[rng.randrange(200)]
        worst = max(worst, abs(likelihood_delta(fluent_backend, cond, a, b) + likelihood_delta(fluent_backend, cond, b, a)))
    story = ConditionedStory("x", "", "anna")
    noop_zero = delta_score(story, PerturbationSpec("jumble", 0.9, 1), fluent_backend).delta == 0.0
    ok = zero_ok and noop_zero and worst <= 1e-12
    acceptance(3, ok, f"delta(s, s) == 0 exactly; antisymmetry max error {worst:.1e} over 100 pairs")


def test_criterion_4_directional_validity(fluent_backend):
    start = time.perf_counter()
    held = [s for s in fluent_sentences(400, seed=2) if len(tokenize(s).words) >= 10][:200]
    assert len(held) == 200
    positive = wins = 0
    for i, text in enumerate(held):
        spec = PerturbationSpec("jumble", 0.9, 500 + i)
        fluent = delta_score(ConditionedStory(f"f{i}", "", text), spec, fluent_backend).delta
        jumbled_text = perturb_jumble(text, 1.0, 1000 + i).perturbed
        jumbled = delta_score(ConditionedStory(f"j{i}", "", jumbled_text), spec, fluent_backend).delta
        positive += fluent > 0
        wins += fluent > jumbled
    elapsed = time.perf_counter() - start
    ok = positive / 200 >= 0.95 and wins / 200 >= 0.90 and elapsed < 30
    acceptance(4, ok, f"positive {positive}/200, fluent beats pre-jumbled {wins}/200, {elapsed:.2f}s")


def test_criterion_5_degree_monotonicity():
    start = time.perf_counter()
    typo_text = "the old man walked slowly to the quiet market today"
    w = 10
    lexicon = {"happy": ["sad"], "big": ["small"], "early": ["late"], "hot": ["cold"], "open": ["closed"]}
    ant_text = "the big dog was happy to wake early on a hot day near the open gate . " * 2
    e = 10
    seeds = range(200)
    degrees = [d / 10 for d in range(1, 11)]
    typo_means, ant_ok, details = [], True, []
    for d in degrees:
        typo_means.append(statistics.fmean(len(perturb_typo(typo_text, d, s).edits) for s in seeds))
        ant = statistics.fmean(len(perturb_antonym(ant_text, d, s, lexicon).edits) for s in seeds)
        sigma = math.sqrt(e * d * (1 - d) / len(seeds))
        if abs(ant - d * e) > 3 * sigma + 1e-12:
            ant_ok = False
            details.append(f"antonym@{d}: {ant} vs {d * e}")
    typo_ok = typo_means == sorted(typo_means) and all(
        abs(m - math.floor(d * w + 0.5)) <= 1 for m, d in zip(typo_means, degrees)
    )
    elapsed = time.perf_counter() - start
    ok = typo_ok and ant_ok and elapsed < 10
    acceptance(5, ok, f"typo means {typo_means}; antonym within 3 sigma: {ant_ok} {details}; {elapsed:.2f}s")


def test_criterion_6_kendall_oracle():
    rng = random.Random(6)
    mismatches = 0
    for _ in range(1000):
        n = rng.randint(2, 50)
        levels = rng.choice([2, 3, 5, 1000])
        xs = [rng.randrange(levels) for _ in range(n)]
        ys = [rng.randrange(levels) if rng.random() < 0.5 else rng.random() for _ in range(n)]
        try:
            want = tau_b_bruteforce(xs, ys)
        except ZeroDivisionError:
            try:
                kendall_tau(xs, ys)
                mismatches += 1
            except UndefinedCorrelation:
                pass
            continue
        mismatches += kendall_tau(xs, ys).tau != want
    extremes = kendall_tau([1, 2, 3, 4], [1, 2, 3, 4]).tau == 1.0 and kendall_tau([1, 2, 3, 4], [4, 3, 2, 1]).tau == -1.0
    acceptance(6, mismatches == 0 and extremes, f"{mismatches} mismatches vs brute force on 1000 vectors; +-1 exact: {extremes}")


def test_criterion_7_synthetic_correlation(tmp_path, capsys):
    start = time.perf_counter()
    data = planted_dataset(tmp_path / "planted.jsonl")
    model = trained_model_file(tmp_path)
    assert cli.main(["delta", "--dataset", str(data), "--model-path", str(model), "--profiles", "jumble@0.9",
                     "--seed", "0", "--out", str(tmp_path / "d")]) == 0
    assert cli.main(["correlate", "--scores", str(tmp_path / "d/deltas.jsonl"), "--ratings", str(data),
                     "--dataset-id", "planted", "--out", str(tmp_path / "c")]) == 0
    capsys.readouterr()
    report = json.loads((tmp_path / "c/correlation.json").read_text())["reports"][0]
    tau = report["aspects"]["coherence"]["tau"]
    elapsed = time.perf_counter() - start
    acceptance(7, abs(tau) >= 0.8 and elapsed < 60, f"|tau| = {abs(tau):.4f} over 100 planted stories, {elapsed:.2f}s")


def test_criterion_8_determinism(monkeypatch, tmp_path, capsys):
    data = planted_dataset(tmp_path / "d.jsonl", n=20)
    model = trained_model_file(tmp_path)
    pert = ["perturb", "--dataset", str(data), "--kind", "jumble", "--degree", "0.9", "--seed", "21"]
    assert cli.main(pert + ["--out", str(tmp_path / "p1")]) == 0
    assert cli.main(pert + ["--out", str(tmp_path / "p2")]) == 0
    tape = tmp_path / "tape.jsonl"
    remote = ["delta", "--dataset", str(data), "--backend", "remote", "--endpoint", "http://lm.invalid/score",
              "--model", "bigram", "--cassette", str(tape), "--seed", "21"]
    record_remote(monkeypatch, model, remote + ["--cassette-mode", "record", "--out", str(tmp_path / "rec")])
    assert cli.main(remote + ["--cassette-mode", "replay", "--out", str(tmp_path / "d1")]) == 0
    assert cli.main(remote + ["--cassette-mode", "replay", "--out", str(tmp_path / "d2")]) == 0
    same_p = sha(tmp_path / "p1/perturbations.jsonl") == sha(tmp_path / "p2/perturbations.jsonl")
    same_d = sha(tmp_path / "d1/deltas.jsonl") == sha(tmp_path / "d2/deltas.jsonl")
    acceptance(8, same_p and same_d, f"perturb outputs identical: {same_p}; replayed delta outputs identical: {same_d}")


def test_criterion_9_conservation():
    rng = random.Random(9)
    vocab = ["the", "dog", "ran", "home", ".", "!", "?", ",", "she", "was", "n't", "happy", "...", "a", "aa", "x'y"]
    failures = 0
    cases = 10_000
    for _ in range(cases):
        text = " ".join(rng.choice(vocab) for _ in range(rng.randint(1, 60)))
        seed = rng.getrandbits(64)
        before = Counter(tokenize(text).words)
        failures += Counter(tokenize(perturb_jumble(text, rng.random(), seed).perturbed).words) != before
        failures += Counter(tokenize(perturb_sent_reorder(text, seed).perturbed).words) != before
        failures += len(perturb_typo(text, rng.random(), seed).perturbed) != len(text)
    acceptance(9, failures == 0, f"{failures} failures over {cases} cases each for Jumble, SentReorder and Typo")
