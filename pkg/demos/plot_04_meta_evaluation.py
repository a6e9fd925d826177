"""
Correlating with human judgments
================================

Metric scores are compared with aggregated ratings by story-level Kendall
tau-b. Here the "ratings" are planted: each synthetic story has ``k`` of its
sentences fully jumbled and is rated ``5 - k``.
"""

from deltascore import (
    NGramBackend,
    NGramModel,
    PerturbationSpec,
    ProfileSet,
    RatedStory,
    correlate_aspects,
    format_table,
    score_corpus,
)
from deltascore.synthetic import fluent_sentences, planted_quality_corpus

backend = NGramBackend(NGramModel.train(fluent_sentences(2000, seed=1), order=2, alpha=1.0))

corpus = planted_quality_corpus(100, seed=3)
rated = [RatedStory(story, {a: (q + 1,) for a in ("fluency", "coherence")}) for story, q in corpus]

reports = []
for spec in (PerturbationSpec("jumble", 0.9), PerturbationSpec("typo", 0.4)):
    ps = ProfileSet.uniform(spec, aspects=("fluency", "coherence"))
    results = score_corpus([r.story for r in rated], [ps], backend, seed=0)
    scores = {r.id: r.delta for r in results if r.aspect.value == "coherence"}
    reports.append(correlate_aspects(scores, rated, aspects=("fluency", "coherence"),
                                     metric_id=ps.name, dataset_id="planted"))

print(format_table(reports, aspects=("fluency", "coherence")))
print("signed tau (Jumble, coherence):", round(reports[0]["coherence"].tau, 4))
