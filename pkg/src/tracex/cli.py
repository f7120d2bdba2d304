"""Command-line entry points.

Exit codes: 0 ok, 1 configuration error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from tracex.corpus import CorpusError, generate_synthetic, load_testbed, write_testbed
from tracex.embeddings import EmbeddingError, TrainConfig, train_skipgram
from tracex.pipeline import BPE_VOCAB_SIZES, NumericError, RunConfig, run_analysis
from tracex.report import OrphanPolicy, ReportError, detect_orphans, extreme_cases
from tracex.tokenization import BpeTrainingError, conventional_tokenize, train_bpe

EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracex",
        description="Information-theoretic analysis of software trace links",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the full pipeline on testbeds")
    analyze.add_argument("--manifest", action="append", required=True, dest="manifests")
    analyze.add_argument("--preproc", default="conventional",
                         choices=["conventional", *BPE_VOCAB_SIZES])
    analyze.add_argument("--vectorizer", default="skipgram",
                         choices=["skipgram", "pvdbow", "none"])
    analyze.add_argument("--embeddings", default=None,
                         help="load pretrained word vectors instead of training")
    analyze.add_argument("--bpe-model", default=None, help="prebuilt BPE model JSON")
    analyze.add_argument("--seed", type=int, default=0)
    analyze.add_argument("--out", default="out")
    analyze.add_argument("--dim", type=int, default=50)
    analyze.add_argument("--epochs", type=int, default=20)
    analyze.add_argument("--orphan-quantile", type=float, default=0.99)
    analyze.add_argument("--orphan-metric", default="mi", choices=["mi", "si"])
    analyze.add_argument("--threads", type=int, default=None)

    validate = sub.add_parser("validate", help="check a testbed manifest")
    validate.add_argument("manifest")
    validate.add_argument("--json", action="store_true")

    bpe = sub.add_parser("train-bpe", help="train a BPE model from text files")
    bpe.add_argument("paths", nargs="+")
    bpe.add_argument("--vocab-size", type=int, required=True)
    bpe.add_argument("--out", required=True)

    emb = sub.add_parser("train-embeddings", help="train skip-gram word vectors")
    emb.add_argument("paths", nargs="+")
    emb.add_argument("--dim", type=int, default=50)
    emb.add_argument("--epochs", type=int, default=20)
    emb.add_argument("--seed", type=int, default=0)
    emb.add_argument("--out", required=True)

    cases = sub.add_parser("cases", help="edge-case and orphan listings from records")
    cases.add_argument("records", help="records.jsonl from a previous analyze run")
    cases.add_argument("--metric", default="loss", choices=["loss", "noise"])
    cases.add_argument("--k", type=int, default=5)
    cases.add_argument("--orphan-quantile", type=float, default=0.99)
    cases.add_argument("--orphan-metric", default="mi", choices=["mi", "si"])
    cases.add_argument("--json", action="store_true")

    synth = sub.add_parser("synth", help="generate a synthetic testbed")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--sources", type=int, default=10)
    synth.add_argument("--targets", type=int, default=10)
    synth.add_argument("--overlap", type=float, default=0.5)
    synth.add_argument("--out", required=True)
    return parser


def cmd_analyze(args) -> int:
    kwargs = dict(
        manifests=args.manifests,
        preprocessing=args.preproc,
        vectorizer=args.vectorizer,
        embedding_path=args.embeddings,
        bpe_model_path=args.bpe_model,
        seed=args.seed,
        out_dir=args.out,
        dim=args.dim,
        epochs=args.epochs,
        orphan_quantile=args.orphan_quantile,
        orphan_metric=args.orphan_metric,
    )
    if args.threads is not None:
        kwargs["threads"] = args.threads
    cfg = RunConfig(**kwargs)
    results = run_analysis(cfg)
    for result in results:
        undefined = {m: n for m, n in result.undefined_counts.items() if n}
        if undefined:
            print(
                f"{result.testbed.name}: undefined pair counts {undefined}",
                file=sys.stderr,
            )
    return 0


def cmd_validate(args) -> int:
    tb = load_testbed(args.manifest)
    report = {
        "name": tb.name,
        "all": tb.n_all,
        "links": tb.n_links,
        "non_links": tb.n_non_links,
        "empty_artifacts": tb.empty_artifact_ids,
    }
    if args.json:
        print(json.dumps(report, sort_keys=True))
    else:
        print(
            f"{tb.name}: {tb.n_all} candidates, {tb.n_links} links, "
            f"{tb.n_non_links} non-links, {len(tb.empty_artifact_ids)} empty artifacts"
        )
    return 0


def _read_corpus(paths: list[str]) -> list[str]:
    texts = []
    for p in paths:
        path = Path(p)
        if not path.is_file():
            raise CorpusError(f"corpus file not found: {path}")
        texts.append(path.read_text(encoding="utf-8", errors="replace"))
    return texts


def cmd_train_bpe(args) -> int:
    texts = _read_corpus(args.paths)
    model = train_bpe(texts, args.vocab_size)
    budget = args.vocab_size - (len(model.vocab) - len(model.merges))
    if len(model.merges) < budget:
        print(
            f"warning: stopped after {len(model.merges)} merges "
            "(no remaining pair occurs twice)",
            file=sys.stderr,
        )
    model.save(args.out)
    return 0


def cmd_train_embeddings(args) -> int:
    texts = _read_corpus(args.paths)
    corpus = [conventional_tokenize(t) for t in texts]
    cfg = TrainConfig(dim=args.dim, epochs=args.epochs, seed=args.seed)
    trained = train_skipgram(corpus, cfg)
    trained.matrix.save(args.out)
    return 0


def cmd_cases(args) -> int:
    path = Path(args.records)
    if not path.is_file():
        raise CorpusError(f"records file not found: {path}")
    rows = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line]
    listings = extreme_cases(rows, args.metric, args.k)
    if any(r["is_link"] for r in rows):
        policy = OrphanPolicy(quantile=args.orphan_quantile, metric=args.orphan_metric)
        listings += detect_orphans(rows, policy)
    for c in listings:
        doc = {
            "kind": c.kind, "source_id": c.source_id, "target_id": c.target_id,
            "is_link": c.is_link, "value": c.value, "rank": c.rank,
        }
        print(json.dumps(doc, sort_keys=True) if args.json else
              f"{c.kind}#{c.rank}: {c.source_id} -> {c.target_id} = {c.value:.4f}")
    return 0


def cmd_synth(args) -> int:
    tb = generate_synthetic(args.seed, args.sources, args.targets, args.overlap)
    manifest = write_testbed(tb, args.out)
    print(manifest)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "analyze": cmd_analyze,
        "validate": cmd_validate,
        "train-bpe": cmd_train_bpe,
        "train-embeddings": cmd_train_embeddings,
        "cases": cmd_cases,
        "synth": cmd_synth,
    }
    try:
        return handlers[args.command](args)
    except (CorpusError, BpeTrainingError, EmbeddingError, ReportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
