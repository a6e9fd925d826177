"""Command-line entry point.

Subcommands: ``perturb``, ``train-lm``, ``delta`` and ``correlate``. Every flag
can also come from ``--config FILE`` (TOML; top-level keys apply to every
subcommand, a ``[delta]``-style table to one). Command-line flags win.

Exit codes: 0 success, 1 usage, 2 data error, 3 backend/service error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from collections import defaultdict
from pathlib import Path

from . import __version__
from .delta import score_corpus, story_seed
from .errors import (
    DeltaScoreError,
    IngestError,
    JoinError,
    ScoringError,
    ServiceError,
    UndefinedCorrelation,
)
from .harness import CorrelationReport, correlate, format_table, ingest_dataset
from .llm import ServiceClient, ServiceConfig
from .perturb import (
    DEGREE_KINDS,
    PRODUCTION_DEGREES,
    ASPECTS,
    Aspect,
    PerturbationKind,
    PerturbationSpec,
    ProfileSet,
    Resources,
    default_profiles,
    load_lexicon,
    perturb,
)
from .scoring import BackendConfig, NGramModel, build_backend
from .text import tokenize

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger("deltascore")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_BACKEND = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_manifest(out: Path, manifest: dict) -> None:
    _atomic_write(out / "manifest.json", json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _jsonl(rows) -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows)


def _degree(value: str) -> float:
    try:
        d = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}")
    if not 0.0 <= d <= 1.0:
        raise argparse.ArgumentTypeError(f"degree must be in [0, 1], got {d}")
    return d


def _seed(value: str) -> int:
    s = int(value)
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return s


def _backend_config(args) -> BackendConfig:
    if args.backend == "ngram":
        return BackendConfig(kind="ngram", model_path=args.model_path)
    return BackendConfig(
        kind="remote",
        endpoint=args.endpoint,
        model=args.model,
        token_env=args.token_env,
        timeout=args.timeout,
        max_retries=args.max_retries,
        provider=args.provider,
        architecture=args.architecture,
        max_story_tokens=args.max_story_tokens,
        max_in_flight=max(1, args.jobs),
        cassette=args.cassette,
        cassette_mode=args.cassette_mode,
    )


def _service_client(args):
    if not args.service_endpoint:
        return None
    return ServiceClient(
        ServiceConfig(
            endpoint=args.service_endpoint,
            model=args.service_model or "gpt-3.5-turbo",
            token_env=args.service_token_env,
            provider=args.service_provider,
            cassette=args.service_cassette,
            cassette_mode=args.service_cassette_mode,
        )
    )


def _resources(args, stories=None, backend=None) -> Resources:
    lexicon = load_lexicon(args.lexicon) if getattr(args, "lexicon", None) else None
    relevant = None
    if getattr(args, "relevant_words", None):
        relevant = {
            row["id"]: set(row["words"])
            for row in map(json.loads, Path(args.relevant_words).read_text(encoding="utf-8").splitlines())
            if row
        }
    return Resources(
        lexicon=lexicon,
        relevant_words=relevant,
        pool=stories,
        backend=backend,
        client=_service_client(args),
    )


def _parse_profiles(value: str) -> list[ProfileSet]:
    catalog = default_profiles()
    if value in ("default", "aspect-targeted"):
        return list(catalog.get(value))
    sets = []
    for item in value.split(","):
        name, _, deg = item.strip().partition("@")
        try:
            kind = PerturbationKind.parse(name)
            degree = float(deg) if deg else PRODUCTION_DEGREES.get(kind, 1.0)
            sets.append(ProfileSet.uniform(PerturbationSpec(kind, degree)))
        except ValueError as exc:
            raise UsageError(f"bad profile {item.strip()!r}: {exc}") from exc
    return sets


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_perturb(args) -> int:
    rated = ingest_dataset(args.dataset)
    stories = [r.story for r in rated]
    kind = PerturbationKind.parse(args.kind)
    degree = args.degree
    if degree is None:
        degree = PRODUCTION_DEGREES.get(kind, 1.0)
    if not 0.0 <= degree <= 1.0:
        raise UsageError(f"degree must be in [0, 1], got {degree}")
    if kind not in DEGREE_KINDS and degree != 1.0:
        raise UsageError(f"{kind.label} takes no degree")
    backend = None
    if kind is PerturbationKind.STORY_REPLACE:
        backend = build_backend(_backend_config(args))
    res = _resources(args, stories, backend)
    rows, failures = [], []
    for story in stories:
        spec = PerturbationSpec(kind, degree, story_seed(args.seed, story.id, kind))
        try:
            rows.append(perturb(story, spec, res).to_record())
        except DeltaScoreError as exc:
            failures.append(exc)
            log.error("story %s: %s", story.id, exc)
    out = Path(args.out)
    _atomic_write(out / "perturbations.jsonl", _jsonl(rows))
    _write_manifest(out, {
        "command": "perturb",
        "dataset": str(args.dataset),
        "kind": kind.value,
        "degree": degree,
        "seed": args.seed,
        "output": str(out),
    })
    if failures:
        return EXIT_BACKEND if any(isinstance(e, (ScoringError, ServiceError)) for e in failures) else EXIT_DATA
    return EXIT_OK


def _read_corpus(path: Path) -> list[str]:
    lines = path.read_text(encoding="utf-8").splitlines()
    if path.suffix == ".jsonl":
        seqs = []
        for line in lines:
            if line.strip():
                row = json.loads(line)
                seqs.append(" ".join(x for x in (row.get("condition", ""), row["story"]) if x))
        return seqs
    return [line for line in lines if line.strip()]


def cmd_train_lm(args) -> int:
    corpus = [tokenize(line).words for line in _read_corpus(Path(args.corpus))]
    model = NGramModel.train(corpus, order=args.order, alpha=args.alpha)
    _atomic_write(Path(args.out), model.dumps())
    log.info("trained order-%d model, V=%d", model.order, model.vocab_size)
    return EXIT_OK


def cmd_delta(args) -> int:
    if args.replicates < 1:
        raise UsageError("--replicates must be >= 1")
    rated = ingest_dataset(args.dataset)
    stories = [r.story for r in rated]
    config = _backend_config(args)
    backend = build_backend(config)
    profile_sets = _parse_profiles(args.profiles)
    res = _resources(args, stories, backend)
    results = score_corpus(
        stories, profile_sets, backend,
        seed=args.seed, resources=res, replicates=args.replicates, jobs=args.jobs,
    )
    out = Path(args.out)
    _atomic_write(out / "deltas.jsonl", _jsonl(r.to_record() for r in results))
    _write_manifest(out, {
        "command": "delta",
        "dataset": str(args.dataset),
        "seed": args.seed,
        "backend": {k: v for k, v in config.__dict__.items() if v is not None},
        "profiles": args.profiles,
        "profile_sets": [ps.name for ps in profile_sets],
        "replicates": args.replicates,
        "output": str(out),
    })
    return EXIT_OK


def _load_scores(path: Path) -> dict[str, dict[Aspect | None, dict[str, float | None]]]:
    """profile -> aspect (None = every aspect) -> id -> score."""
    table: dict = defaultdict(lambda: defaultdict(dict))
    for n, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        row = json.loads(line)
        if "id" not in row:
            raise IngestError([(n, "score record has no 'id'")])
        value = row.get("delta", row.get("score"))
        profile = row.get("profile") or row.get("metric") or path.stem
        aspect = Aspect(row["aspect"]) if row.get("aspect") else None
        table[profile][aspect][row["id"]] = value
    return table


def cmd_correlate(args) -> int:
    rated = ingest_dataset(args.ratings)
    scores = _load_scores(Path(args.scores))
    dataset_id = args.dataset_id or Path(args.ratings).stem
    aspects = [Aspect(a) for a in args.aspects.split(",")] if args.aspects else list(ASPECTS)
    reports = []
    for profile, by_aspect in scores.items():
        per = {}
        for a in aspects:
            s = by_aspect.get(a, by_aspect.get(None))
            if s is None:
                continue
            try:
                per[a] = correlate(s, rated, a)
            except UndefinedCorrelation as exc:
                log.warning("%s/%s: %s", profile, a.value, exc)
        reports.append(CorrelationReport(profile, dataset_id, per))
    out = Path(args.out)
    payload = {"dataset": dataset_id, "reports": [r.to_dict() for r in reports]}
    _atomic_write(out / "correlation.json", json.dumps(payload, indent=2) + "\n")
    table = format_table(reports, aspects)
    _atomic_write(out / "correlation.txt", table)
    _write_manifest(out, {
        "command": "correlate",
        "scores": str(args.scores),
        "ratings": str(args.ratings),
        "dataset_id": dataset_id,
        "output": str(out),
    })
    sys.stdout.write(table)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_backend_flags(p):
    g = p.add_argument_group("likelihood backend")
    g.add_argument("--backend", choices=["ngram", "remote"], default="ngram")
    g.add_argument("--model-path", help="n-gram model file")
    g.add_argument("--endpoint", help="remote logprob endpoint URL")
    g.add_argument("--model", help="remote model name")
    g.add_argument("--provider", choices=["native", "openai-echo"], default="native")
    g.add_argument("--architecture", choices=["decoder", "encoder-decoder"], default="decoder")
    g.add_argument("--token-env", help="environment variable holding the API token")
    g.add_argument("--timeout", type=float, default=30.0)
    g.add_argument("--max-retries", type=int, default=3)
    g.add_argument("--max-story-tokens", type=int)
    g.add_argument("--cassette", help="record/replay file for the logprob backend")
    g.add_argument("--cassette-mode", choices=["live", "record", "replay"], default="live")


def _add_resource_flags(p):
    g = p.add_argument_group("perturbation resources")
    g.add_argument("--lexicon", help="antonym lexicon (TSV); defaults to the bundled one")
    g.add_argument("--relevant-words", help="JSONL of {id, words} for RmRelWords")
    g.add_argument("--service-endpoint", help="chat-completion endpoint for service perturbations")
    g.add_argument("--service-model")
    g.add_argument("--service-token-env")
    g.add_argument("--service-provider", choices=["generic", "openai"], default="generic")
    g.add_argument("--service-cassette")
    g.add_argument("--service-cassette-mode", choices=["live", "record", "replay"], default="live")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="deltascore", description="DeltaScore story evaluation toolkit.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="TOML file mirroring the flags")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("perturb", help="perturb every story in a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--kind", required=True)
    p.add_argument("--degree", type=_degree)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", required=True, help="output directory")
    _add_resource_flags(p)
    _add_backend_flags(p)
    p.set_defaults(func=cmd_perturb, jobs=1)

    p = sub.add_parser("train-lm", help="train the n-gram backend")
    p.add_argument("--corpus", required=True, help="text (one sequence per line) or dataset JSONL")
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--out", required=True, help="model file")
    p.set_defaults(func=cmd_train_lm)

    p = sub.add_parser("delta", help="DeltaScore for every story and profile")
    p.add_argument("--dataset", required=True)
    p.add_argument("--profiles", default="default",
                   help="'default', 'aspect-targeted', or a list like 'jumble@0.9,typo@0.4'")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--replicates", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="output directory")
    _add_backend_flags(p)
    _add_resource_flags(p)
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("correlate", help="Kendall correlation against human ratings")
    p.add_argument("--scores", required=True, help="JSONL with id, [profile], [aspect], delta|score")
    p.add_argument("--ratings", required=True, help="dataset JSONL with ratings")
    p.add_argument("--dataset-id")
    p.add_argument("--aspects", help="comma-separated subset of aspects")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_correlate)
    return parser


def _apply_config(parser, argv) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config, "rb") as fh:
        config = tomllib.load(fh)
    command = next((a for a in rest if not a.startswith("-")), None)
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    top = {k.replace("-", "_"): v for k, v in config.items() if not isinstance(v, dict)}
    for name, subparser in sub.choices.items():
        section = {k.replace("-", "_"): v for k, v in config.get(name, {}).items()}
        defaults = {**top, **section}
        dests = {a.dest for a in subparser._actions}
        unknown = set(section) - dests
        if unknown and name == command:
            parser.error(f"unknown config keys for {name}: {sorted(unknown)}")
        subparser.set_defaults(**{k: v for k, v in defaults.items() if k in dests})
        # config values satisfy required flags
        for action in subparser._actions:
            if action.dest in defaults:
                action.required = False


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        print(f"deltascore: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return exc.code
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors, --help, --version
        return exc.code
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"deltascore {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ScoringError, ServiceError) as exc:
        print(f"deltascore {args.command}: backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except JoinError as exc:
        print(f"deltascore {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DeltaScoreError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"deltascore {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
