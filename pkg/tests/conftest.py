import json
import sys
from pathlib import Path

import httpx
import pytest

from deltascore import NGramBackend, NGramModel, ScoringError
from deltascore.scoring import ScoredTokens
from deltascore.synthetic import fluent_sentences
from deltascore.text import tokenize

sys.path.insert(0, str(Path(__file__).parent))


class FnBackend:
    """Backend whose per-token logprob is an arbitrary function of the token."""

    def __init__(self, fn, backend_id="mock"):
        self.fn = fn
        self.backend_id = backend_id
        self.calls = []

    def story_logprobs(self, condition, story):
        self.calls.append((condition, story))
        words = tokenize(story).words
        return ScoredTokens(words, [self.fn(w) for w in words])


class FailingBackend:
    backend_id = "failing"

    def __init__(self, fail_on=lambda story: True):
        self.fail_on = fail_on

    def story_logprobs(self, condition, story):
        if self.fail_on(story):
            raise ConnectionError("backend down")
        return ScoredTokens(["x"], [-1.0])


def ngram_server(model: NGramModel, *, status_plan=None, log=None):
    """httpx transport emulating a logprob service backed by ``model``.

    ``status_plan`` is a list of status codes served before real answers.
    Serves both the native and the openai-echo request shapes.
    """
    plan = list(status_plan or [])

    def handler(request: httpx.Request):
        if log is not None:
            log.append(request)
        if plan:
            return httpx.Response(plan.pop(0), json={"error": "busy"})
        body = json.loads(request.content)
        if "prompt" in body:
            text = body["prompt"]
            words = text.split(" ")
            offsets, pos = [], 0
            for w in words:
                offsets.append(max(pos - 1, 0) if pos else 0)
                pos += len(w) + 1
            lps = [None] + model.continuation_logprobs(words[:1], words[1:])
            toks = [words[0]] + [" " + w for w in words[1:]]
            return httpx.Response(200, json={"choices": [{"logprobs": {
                "tokens": toks, "token_logprobs": lps, "text_offset": offsets}}]})
        ctx = body["context"].split() if body["context"] else []
        cont = body["continuation"].split()
        return httpx.Response(200, json={"tokens": cont, "logprobs": model.continuation_logprobs(ctx, cont)})

    return httpx.MockTransport(handler)


@pytest.fixture
def toy_model():
    return NGramModel.train([["a", "b"], ["a", "b"]], order=2, alpha=1.0)


@pytest.fixture
def toy_backend(toy_model):
    return NGramBackend(toy_model)


@pytest.fixture(scope="session")
def fluent_model():
    return NGramModel.train(fluent_sentences(2000, seed=1), order=2, alpha=1.0)


@pytest.fixture(scope="session")
def fluent_backend(fluent_model):
    return NGramBackend(fluent_model)


def write_dataset(path: Path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    return path


ACCEPTANCE_LINES = []


def acceptance(number: int, ok: bool, detail: str) -> None:
    """Record one acceptance line and fail the calling test if ``ok`` is false."""
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
