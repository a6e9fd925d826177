"""
Remote backends and record/replay
=================================

Remote logprob services and the text service used by the rewrite
perturbations go through the same small HTTP layer. A cassette records each
request/response pair so later runs replay them without a network.

The "service" below is a local function mounted as an httpx transport.
"""

import json
import tempfile
from pathlib import Path

import httpx

from deltascore import (
    BackendConfig,
    NGramModel,
    PromptTemplate,
    RemoteLogprobBackend,
    ServiceClient,
    ServiceConfig,
    perturb_via_service,
    render_prompt,
    score_conditional,
)
from deltascore.synthetic import fluent_sentences

model = NGramModel.train(fluent_sentences(2000, seed=1), order=2, alpha=1.0)


def logprob_server(request):
    body = json.loads(request.content)
    ctx = body["context"].split()
    cont = body["continuation"].split()
    return httpx.Response(200, json={"tokens": cont, "logprobs": model.continuation_logprobs(ctx, cont)})


def chat_server(request):
    # a stand-in that swaps one word, as a real rewrite might
    prompt = json.loads(request.content)["messages"][0]["content"]
    story = prompt.split('"story": ', 1)[1]
    return httpx.Response(200, json={"content": story.replace("lake", "sky")})


tape = Path(tempfile.mkdtemp()) / "lm.jsonl"
cfg = BackendConfig(kind="remote", endpoint="http://lm.local/score", model="bigram",
                    cassette=str(tape), cassette_mode="record")
live = RemoteLogprobBackend(cfg, transport=httpx.MockTransport(logprob_server))
print(score_conditional(live, "emma was happy .", "she sold a lamp .").mean_logprob)

# Replay needs no transport at all.
replay = RemoteLogprobBackend(BackendConfig(kind="remote", endpoint="http://lm.local/score", model="bigram",
                                            cassette=str(tape), cassette_mode="replay"))
print(score_conditional(replay, "emma was happy .", "she sold a lamp .").mean_logprob)

# The rewrite perturbations send a fixed instruction with the story.
print(render_prompt(PromptTemplate.COMMONSENSE, story="they took me down to the lake ."))
client = ServiceClient(ServiceConfig(endpoint="http://chat.local", model="any"),
                       transport=httpx.MockTransport(chat_server))
out = perturb_via_service("they took me down to the lake .", PromptTemplate.COMMONSENSE, client)
print(out.perturbed, "| logged op:", out.edits[0].op)
