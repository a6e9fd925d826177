"""Story evaluation by perturbation-induced likelihood drop.

A story's quality on an aspect is read off how much its mean token
log-likelihood falls when the story is perturbed in an aspect-specific way::

    from deltascore import ConditionedStory, NGramModel, NGramBackend, PerturbationSpec, delta_score

    backend = NGramBackend(NGramModel.train(corpus, order=2, alpha=1.0))
    story = ConditionedStory("s1", "dad took me fishing .", "we sat in a spot and waited .")
    delta_score(story, PerturbationSpec("jumble", 0.9, seed=1), backend).delta
"""

__version__ = "0.1.0"

from .delta import (
    DeltaFlags,
    DeltaResult,
    delta_score,
    evaluate_aspects,
    likelihood_delta,
    score_corpus,
    story_seed,
)
from .errors import (
    BatchError,
    DegeneratePerturbation,
    DeltaScoreError,
    EmptyResult,
    EmptyScoreError,
    IngestError,
    InsufficientData,
    InvalidInput,
    JoinError,
    ReplayMiss,
    ScoringError,
    ServiceError,
    UndefinedCorrelation,
)
from .harness import (
    AspectCorrelation,
    CorrelationReport,
    KendallResult,
    RatedStory,
    aggregate_ratings,
    correlate,
    correlate_aspects,
    format_table,
    ingest_dataset,
    kendall_tau,
)
from .llm import PromptTemplate, ServiceClient, ServiceConfig, parse_relevant_words, render_prompt
from .perturb import (
    ASPECTS,
    Aspect,
    AspectProfile,
    AntonymLexicon,
    Edit,
    PerturbationKind,
    PerturbationSpec,
    PerturbedStory,
    ProfileCatalog,
    ProfileSet,
    Resources,
    default_lexicon,
    default_profiles,
    load_lexicon,
    perturb,
    perturb_antonym,
    perturb_jumble,
    perturb_rm_rel_words,
    perturb_sent_reorder,
    perturb_story_replace,
    perturb_subj_verb,
    perturb_typo,
    perturb_via_service,
)
from .rng import SeededRng, derive_seed
from .scoring import (
    BackendConfig,
    NGramBackend,
    NGramModel,
    RemoteLogprobBackend,
    TokenLogLik,
    build_backend,
    score_batch,
    score_conditional,
)
from .text import ConditionedStory, TokenizedStory, detokenize, segment_sentences, tokenize
