"""JSON-over-HTTP with retries, plus a record/replay cassette.

A cassette is a JSON Lines file of ``{"key", "request", "response"}`` rows.
The key is the SHA-256 of the canonical request JSON, so lookups do not depend
on the endpoint URL or on header values such as auth tokens.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
import time
from pathlib import Path

import httpx

from .errors import ReplayMiss

log = logging.getLogger(__name__)

MODES = ("live", "record", "replay")
_RETRYABLE_STATUS = {408, 409, 425, 429, 500, 502, 503, 504}


def request_key(body: dict) -> str:
    canonical = json.dumps(body, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class Cassette:
    def __init__(self, path, mode: str = "replay"):
        if mode not in MODES:
            raise ValueError(f"unknown cassette mode {mode!r}")
        self.path = Path(path)
        self.mode = mode
        self._lock = threading.Lock()
        self._entries: dict[str, dict] = {}
        if mode == "replay" and not self.path.exists():
            raise FileNotFoundError(f"replay mode needs an existing cassette: {self.path}")
        if self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        row = json.loads(line)
                        self._entries[row["key"]] = row["response"]

    def __len__(self):
        return len(self._entries)

    def lookup(self, body: dict) -> dict:
        key = request_key(body)
        with self._lock:
            if key not in self._entries:
                raise ReplayMiss(f"no cassette entry for request {key[:12]} in {self.path}")
            return self._entries[key]

    def append(self, body: dict, response: dict) -> None:
        key = request_key(body)
        row = {"key": key, "request": body, "response": response}
        with self._lock:
            if key in self._entries:
                return
            self._entries[key] = response
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")


class JsonPoster:
    """POSTs JSON bodies with exponential backoff and optional cassette."""

    def __init__(
        self,
        url: str,
        *,
        headers: dict | None = None,
        timeout: float = 30.0,
        max_retries: int = 3,
        backoff: float = 0.5,
        cassette: Cassette | None = None,
        transport: httpx.BaseTransport | None = None,
        max_in_flight: int = 4,
        error_cls: type[Exception] = RuntimeError,
    ):
        if timeout <= 0:
            raise ValueError("timeout must be positive")
        self.url = url
        self.headers = headers or {}
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff
        self.cassette = cassette
        self.error_cls = error_cls
        self._transport = transport
        self._client: httpx.Client | None = None
        self._client_lock = threading.Lock()
        self._slots = threading.BoundedSemaphore(max_in_flight)

    def _http(self) -> httpx.Client:
        with self._client_lock:
            if self._client is None:
                self._client = httpx.Client(timeout=self.timeout, transport=self._transport)
            return self._client

    def close(self):
        if self._client is not None:
            self._client.close()

    def post(self, body: dict) -> dict:
        if self.cassette is not None and self.cassette.mode == "replay":
            return self.cassette.lookup(body)
        with self._slots:
            response = self._post_with_retries(body)
        if self.cassette is not None and self.cassette.mode == "record":
            self.cassette.append(body, response)
        return response

    def _post_with_retries(self, body: dict) -> dict:
        last: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self._http().post(self.url, json=body, headers=self.headers)
            except httpx.TransportError as exc:
                last = exc
                log.warning("POST %s failed (attempt %d): %s", self.url, attempt + 1, exc)
                continue
            if resp.status_code in _RETRYABLE_STATUS:
                last = RuntimeError(f"HTTP {resp.status_code}")
                log.warning("POST %s returned %d (attempt %d)", self.url, resp.status_code, attempt + 1)
                continue
            if resp.status_code >= 400:
                raise self.error_cls(f"HTTP {resp.status_code} from {self.url}: {resp.text[:200]}")
            try:
                return resp.json()
            except ValueError as exc:
                raise self.error_cls(f"non-JSON response from {self.url}") from exc
        raise self.error_cls(
            f"{self.url} failed after {self.max_retries + 1} attempt(s): {last}"
        ) from last
