"""Token-mean conditional log-likelihood, ``log p(s|c)``.

Two backends share one contract, :meth:`story_logprobs`, which returns the
natural-log probability of every story token given everything before it
(condition included). :func:`score_conditional` averages those into a
:class:`TokenLogLik`; the mean runs over story tokens only, never condition
tokens.

``NGramModel`` is a hermetic, trainable stand-in for a large language model.
``RemoteLogprobBackend`` talks to a logprob service over HTTP.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Protocol, Sequence

import httpx

from ._http import Cassette, JsonPoster
from .errors import BatchError, DeltaScoreError, EmptyScoreError, InvalidInput, ScoringError
from .text import tokenize

BOS, EOS, UNK = "<s>", "</s>", "<unk>"
MODEL_HEADER = "ngram-model v1"


class ScoredTokens(NamedTuple):
    tokens: list[str]
    logprobs: list[float]
    truncated: bool = False


class LogprobBackend(Protocol):
    backend_id: str

    def story_logprobs(self, condition: str, story: str) -> ScoredTokens: ...


@dataclass(frozen=True)
class TokenLogLik:
    story_token_logprobs: tuple[float, ...]
    mean_logprob: float
    token_count: int
    backend_id: str
    condition_included: bool
    truncated: bool = False
    tokens: tuple[str, ...] = field(default=(), repr=False)


# ---------------------------------------------------------------------------
# n-gram model
# ---------------------------------------------------------------------------


class NGramModel:
    """Additive-smoothing n-gram model.

    ``p(w | h) = (count(h, w) + alpha) / (count(h) + alpha * V)`` where ``h`` is
    the previous ``order - 1`` tokens and ``V`` counts the training words plus
    the unknown and end symbols. The begin marker is history-only and is not
    part of ``V``.
    """

    def __init__(self, order: int, alpha: float, counts: dict[int, Counter]):
        if order < 1:
            raise InvalidInput("order must be >= 1")
        if not alpha > 0:
            raise InvalidInput("smoothing constant must be > 0")
        self.order = order
        self.alpha = float(alpha)
        self.counts = counts
        self.vocab = frozenset(g[0] for g in counts.get(1, ())) | {UNK, EOS}
        self._top = counts[order]
        self._context = Counter()
        for gram, c in self._top.items():
            self._context[gram[:-1]] += c

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    @classmethod
    def train(cls, corpus: Iterable[Sequence[str] | str], order: int = 2, alpha: float = 1.0) -> "NGramModel":
        if order < 1:
            raise InvalidInput("order must be >= 1")
        counts: dict[int, Counter] = {k: Counter() for k in range(1, order + 1)}
        n_seqs = 0
        for seq in corpus:
            words = tokenize(seq).words if isinstance(seq, str) else list(seq)
            if not words:
                continue
            n_seqs += 1
            padded = [BOS] * (order - 1) + words + [EOS]
            for t in range(order - 1, len(padded)):
                for k in range(1, order + 1):
                    counts[k][tuple(padded[t - k + 1 : t + 1])] += 1
        if n_seqs == 0:
            raise InvalidInput("cannot train on an empty corpus")
        return cls(order, alpha, counts)

    def _map(self, word: str) -> str:
        return word if word in self.vocab or word == BOS else UNK

    def prob(self, word: str, history: Sequence[str] = ()) -> float:
        h = tuple(self._map(w) for w in history)[-(self.order - 1):] if self.order > 1 else ()
        if len(h) < self.order - 1:
            h = (BOS,) * (self.order - 1 - len(h)) + h
        w = self._map(word)
        return (self._top[h + (w,)] + self.alpha) / (self._context[h] + self.alpha * self.vocab_size)

    def logprob(self, word: str, history: Sequence[str] = ()) -> float:
        return math.log(self.prob(word, history))

    def continuation_logprobs(self, context: Sequence[str], continuation: Sequence[str]) -> list[float]:
        """Log-probabilities of ``continuation`` tokens after ``context``.

        The sequence starts with ``order - 1`` begin markers; no end transition
        is scored.
        """
        seq = [BOS] * (self.order - 1) + list(context) + list(continuation)
        start = self.order - 1 + len(context)
        k = self.order - 1
        return [self.logprob(seq[t], seq[t - k : t]) for t in range(start, len(seq))]

    # --- persistence -------------------------------------------------------

    def dumps(self) -> str:
        lines = [f"{MODEL_HEADER} order={self.order} alpha={self.alpha!r} vocab={self.vocab_size}"]
        for k in range(1, self.order + 1):
            for gram in sorted(self.counts[k]):
                lines.append(f"{k}\t{' '.join(gram)}\t{self.counts[k][gram]}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def loads(cls, text: str) -> "NGramModel":
        lines = text.splitlines()
        if not lines or not lines[0].startswith(MODEL_HEADER + " "):
            raise InvalidInput("not an ngram-model v1 file")
        fields = dict(item.split("=", 1) for item in lines[0][len(MODEL_HEADER) + 1 :].split())
        order, alpha, vocab = int(fields["order"]), float(fields["alpha"]), int(fields["vocab"])
        counts: dict[int, Counter] = {k: Counter() for k in range(1, order + 1)}
        for n, line in enumerate(lines[1:], start=2):
            try:
                k, gram, c = line.split("\t")
                counts[int(k)][tuple(gram.split(" "))] = int(c)
            except (ValueError, KeyError) as exc:
                raise InvalidInput(f"bad model line {n}: {line!r}") from exc
        model = cls(order, alpha, counts)
        if model.vocab_size != vocab:
            raise InvalidInput(f"vocab size mismatch: header {vocab}, counts give {model.vocab_size}")
        return model

    @classmethod
    def load(cls, path) -> "NGramModel":
        return cls.loads(Path(path).read_text(encoding="utf-8"))


class NGramBackend:
    """Decoder-style scoring: condition tokens precede story tokens in one sequence."""

    def __init__(self, model: NGramModel):
        self.model = model
        self.backend_id = f"ngram-o{model.order}-a{model.alpha:g}"

    def story_logprobs(self, condition: str, story: str) -> ScoredTokens:
        context = tokenize(condition).words if condition.strip() else []
        words = tokenize(story).words
        return ScoredTokens(words, self.model.continuation_logprobs(context, words))


# ---------------------------------------------------------------------------
# remote backend
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "ngram"  # "ngram" | "remote"
    # ngram
    order: int = 2
    alpha: float = 1.0
    model_path: str | None = None
    # remote
    endpoint: str | None = None
    model: str | None = None
    token_env: str | None = None
    timeout: float = 30.0
    max_retries: int = 3
    backoff: float = 0.5
    provider: str = "native"  # "native" | "openai-echo"
    architecture: str = "decoder"  # "decoder" | "encoder-decoder"
    max_story_tokens: int | None = None
    max_in_flight: int = 4
    cassette: str | None = None
    cassette_mode: str = "live"

    def __post_init__(self):
        if self.kind not in ("ngram", "remote"):
            raise InvalidInput(f"unknown backend kind {self.kind!r}")
        if self.order < 1:
            raise InvalidInput("order must be >= 1")
        if not self.alpha > 0:
            raise InvalidInput("smoothing constant must be > 0")
        if not self.timeout > 0:
            raise InvalidInput("timeout must be > 0")
        if self.kind == "remote" and not (self.endpoint and self.model):
            raise InvalidInput("remote backend needs endpoint and model")
        if self.provider not in ("native", "openai-echo"):
            raise InvalidInput(f"unknown provider {self.provider!r}")
        if self.architecture not in ("decoder", "encoder-decoder"):
            raise InvalidInput(f"unknown architecture {self.architecture!r}")


class RemoteLogprobBackend:
    """Scores through an HTTP logprob service.

    Native wire shape: ``{model, context, continuation}`` ->
    ``{tokens, logprobs}``. The ``openai-echo`` provider maps the same request
    onto a completions call with ``echo`` and ``max_tokens=0`` and keeps the
    tokens whose text offset falls inside the continuation.

    Whether the condition is fed to a decoder as a prefix or to an encoder is
    the server's business; the averaging over story tokens is identical.
    """

    def __init__(self, config: BackendConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        self.backend_id = f"remote:{config.model}"
        headers = {}
        if config.token_env and os.environ.get(config.token_env):
            headers["Authorization"] = f"Bearer {os.environ[config.token_env]}"
        cassette = Cassette(config.cassette, config.cassette_mode) if config.cassette else None
        self._poster = JsonPoster(
            config.endpoint,
            headers=headers,
            timeout=config.timeout,
            max_retries=config.max_retries,
            backoff=config.backoff,
            cassette=cassette,
            transport=transport,
            max_in_flight=config.max_in_flight,
            error_cls=ScoringError,
        )

    def request_body(self, condition: str, story: str) -> dict:
        if self.config.provider == "openai-echo":
            prompt = f"{condition} {story}" if condition else story
            return {
                "model": self.config.model,
                "prompt": prompt,
                "max_tokens": 0,
                "echo": True,
                "logprobs": 0,
                "temperature": 0,
            }
        return {"model": self.config.model, "context": condition, "continuation": story}

    def story_logprobs(self, condition: str, story: str) -> ScoredTokens:
        raw = self._poster.post(self.request_body(condition, story))
        try:
            if self.config.provider == "openai-echo":
                lp = raw["choices"][0]["logprobs"]
                cut = len(condition)
                pairs = [
                    (tok, val)
                    for tok, val, off in zip(lp["tokens"], lp["token_logprobs"], lp["text_offset"])
                    # the very first token of an unconditioned prompt has no logprob
                    if off >= cut and val is not None
                ]
                tokens = [t for t, _ in pairs]
                logprobs = [float(v) for _, v in pairs]
            else:
                tokens = list(raw["tokens"])
                logprobs = [float(v) for v in raw["logprobs"]]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ScoringError(f"unexpected logprob response: {str(raw)[:200]}") from exc
        if len(tokens) != len(logprobs):
            raise ScoringError("tokens and logprobs differ in length")
        truncated = False
        cap = self.config.max_story_tokens
        if cap is not None and len(logprobs) > cap:
            tokens, logprobs, truncated = tokens[:cap], logprobs[:cap], True
        return ScoredTokens(tokens, logprobs, truncated)

    def close(self):
        self._poster.close()


def build_backend(config: BackendConfig, transport=None) -> LogprobBackend:
    if config.kind == "ngram":
        if not config.model_path:
            raise InvalidInput("ngram backend needs model_path")
        return NGramBackend(NGramModel.load(config.model_path))
    return RemoteLogprobBackend(config, transport=transport)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def score_conditional(backend: LogprobBackend, condition: str, story: str) -> TokenLogLik:
    if not story or not story.strip():
        raise InvalidInput("story is empty")
    try:
        scored = backend.story_logprobs(condition, story)
    except ScoringError:
        raise
    except DeltaScoreError:
        raise
    except Exception as exc:
        raise ScoringError(f"{getattr(backend, 'backend_id', backend)} failed: {exc}") from exc
    logprobs = tuple(float(v) for v in scored.logprobs)
    if not logprobs:
        raise EmptyScoreError("backend scored zero story tokens")
    bad = [v for v in logprobs if not (v <= 0.0) or math.isnan(v)]
    if bad:
        raise ScoringError(f"backend returned invalid log-probabilities, e.g. {bad[0]}")
    return TokenLogLik(
        story_token_logprobs=logprobs,
        mean_logprob=math.fsum(logprobs) / len(logprobs),
        token_count=len(logprobs),
        backend_id=backend.backend_id,
        condition_included=bool(condition and condition.strip()),
        truncated=scored.truncated,
        tokens=tuple(scored.tokens),
    )


@dataclass(frozen=True)
class BatchItemError:
    index: int
    error: Exception

    def __str__(self):
        return f"{type(self.error).__name__}: {self.error}"


def score_batch(
    backend: LogprobBackend, items: Sequence[tuple[str, str]], jobs: int = 1
) -> list[TokenLogLik | BatchItemError]:
    """Score many ``(condition, story)`` pairs; results keep input order.

    A failing item yields a :class:`BatchItemError` in its slot. Only when every
    item fails is :class:`BatchError` raised.
    """

    def one(i):
        condition, story = items[i]
        try:
            return score_conditional(backend, condition, story)
        except Exception as exc:  # isolate per-item failures
            return BatchItemError(i, exc)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, range(len(items))))
    else:
        results = [one(i) for i in range(len(items))]
    if results and all(isinstance(r, BatchItemError) for r in results):
        raise BatchError((r.index, r.error) for r in results)
    return results
