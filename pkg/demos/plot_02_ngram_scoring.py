"""
Token-mean log-likelihood with an n-gram model
==============================================

The built-in backend is an additive-smoothing n-gram model. It scores the
story tokens given the condition and averages their log-probabilities.
"""

import math

from deltascore import NGramBackend, NGramModel, score_conditional
from deltascore.synthetic import fluent_sentences

# A two-line toy corpus keeps the arithmetic checkable by hand.
toy = NGramModel.train(["a b", "a b"], order=2, alpha=1.0)
print("vocabulary size:", toy.vocab_size)  # a, b, <unk>, </s>
print("p(b|a) =", toy.prob("b", ["a"]), "= (2 + 1) / (2 + 4)")

backend = NGramBackend(toy)
r = score_conditional(backend, "", "a b")
print("mean log p('a b') =", r.mean_logprob, "=", math.log(0.5))

# A larger model trained on template sentences.
model = NGramModel.train(fluent_sentences(2000, seed=1), order=2, alpha=1.0)
backend = NGramBackend(model)
for text in ["anna found a red kite at the park .", "kite park a anna . red the at found"]:
    print(f"{score_conditional(backend, '', text).mean_logprob:8.3f}  {text}")

# The condition changes the probabilities but never the number of scored tokens.
a = score_conditional(backend, "", "ben sold a lamp .")
b = score_conditional(backend, "yesterday morning ,", "ben sold a lamp .")
print(a.token_count, b.token_count, round(a.mean_logprob, 3), round(b.mean_logprob, 3))

# Models are saved as plain text and reload byte for byte.
text = model.dumps()
assert NGramModel.loads(text).dumps() == text
print(text.splitlines()[0])
