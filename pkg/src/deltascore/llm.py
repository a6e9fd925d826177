"""Client for an external instruction-following service.

Three perturbations (relevant-word removal, commonsense violation and blander
narrative) are defined only through prompts to a chat model. This module holds
those prompts and a small HTTP client with record/replay support so that test
runs never touch the network.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum

import httpx

from ._http import Cassette, JsonPoster
from .errors import EmptyResult, InvalidInput, ServiceError


class PromptTemplate(str, Enum):
    RELEVANT_WORDS = "RelevantWords"
    COMMONSENSE = "Commonsense"
    BLANDER_NARRATIVE = "BlanderNarrative"


TEMPLATES = {
    PromptTemplate.RELEVANT_WORDS: (
        "Find all words in the given story that is relevant to the given title. "
        "Please only print words in the given story, and separate them by ','.  "
        '"title": {title}, "story": {story}'
    ),
    PromptTemplate.COMMONSENSE: (
        "Revise the following story such that certain elements does not make sense. "
        "The revision should be minimal, e.g., by changing a few words. "
        '"story": {story}'
    ),
    PromptTemplate.BLANDER_NARRATIVE: (
        "Revise the following story to make it less interesting "
        "(e.g., expected ending, no plot twist). The revision should be minimal. "
        '"story": {story}'
    ),
}

_SLOTS = ("title", "story")


def render_prompt(template, title: str | None = None, story: str | None = None) -> str:
    template = PromptTemplate(template)
    text = TEMPLATES[template]
    values = {"title": title, "story": story}
    for slot in _SLOTS:
        marker = "{" + slot + "}"
        if marker not in text:
            continue
        value = values[slot]
        if value is None or not value.strip():
            raise InvalidInput(f"{template.value} prompt needs a non-empty {slot}")
        text = text.replace(marker, value)
    return text


def parse_relevant_words(response: str) -> set[str]:
    """Comma-separated word list -> case-folded set."""
    if not response or not response.strip():
        raise EmptyResult("empty relevant-words response")
    words = {w.strip().casefold() for w in response.split(",")}
    words.discard("")
    if not words:
        raise EmptyResult(f"no words in response {response!r}")
    return words


@dataclass(frozen=True)
class ServiceConfig:
    endpoint: str
    model: str
    token_env: str | None = None
    temperature: float = 0.0
    timeout: float = 60.0
    max_retries: int = 3
    backoff: float = 1.0
    cassette: str | None = None
    cassette_mode: str = "live"
    provider: str = "generic"  # "generic" -> {content}; "openai" -> choices[0].message.content
    max_in_flight: int = 4

    def __post_init__(self):
        if self.temperature < 0:
            raise InvalidInput("temperature must be >= 0")
        if self.timeout <= 0:
            raise InvalidInput("timeout must be > 0")
        if self.provider not in ("generic", "openai"):
            raise InvalidInput(f"unknown provider {self.provider!r}")
        if self.cassette_mode != "live" and not self.cassette:
            raise InvalidInput(f"cassette mode {self.cassette_mode!r} needs a cassette path")


class ServiceClient:
    def __init__(self, config: ServiceConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
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
            error_cls=ServiceError,
        )

    def request_body(self, prompt: str) -> dict:
        return {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
        }

    def complete(self, prompt: str) -> str:
        raw = self._poster.post(self.request_body(prompt))
        try:
            if self.config.provider == "openai":
                return raw["choices"][0]["message"]["content"]
            return raw["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ServiceError(f"unexpected response shape: {str(raw)[:200]}") from exc

    def close(self):
        self._poster.close()


def complete(config: ServiceConfig, prompt: str, transport=None) -> str:
    client = ServiceClient(config, transport=transport)
    try:
        return client.complete(prompt)
    finally:
        client.close()


def relevant_words(client, title: str, story: str) -> tuple[set[str], str, str]:
    """Ask the service which story words relate to the title.

    Returns ``(words, prompt, raw_response)`` so callers can log the exchange.
    """
    prompt = render_prompt(PromptTemplate.RELEVANT_WORDS, title=title, story=story)
    response = client.complete(prompt)
    return parse_relevant_words(response), prompt, response
