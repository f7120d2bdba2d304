"""End-to-end analysis pipeline: load -> tokenize -> per-pair metrics ->
embeddings -> distances -> evaluation -> report files.

Per-pair computation may run on multiple threads (TRACEX_THREADS); results
are always emitted in the deterministic candidate order.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from tracex import __version__
from tracex.corpus import Testbed, enumerate_candidates, load_testbed
from tracex.embeddings import (
    EmbeddingError,
    EmbeddingMatrix,
    TrainConfig,
    load_embeddings,
    mean_doc_vector,
    train_pvdbow,
    train_skipgram,
)
from tracex.evaluation import EvaluationError, correlation_table, pr_auc, roc_auc
from tracex.infotheory import info_record
from tracex.report import (
    OrphanPolicy,
    by_links_table,
    detect_orphans,
    extreme_cases,
    information_table,
    null_shared_census,
    scatter_svg,
    write_by_links_csv,
    write_cases_jsonl,
    write_correlations_csv,
    write_information_csv,
    write_records_csv,
    write_records_jsonl,
)
from tracex.semantics import distance_record
from tracex.tokenization import (
    BpeModel,
    TokenCounts,
    bpe_encode,
    conventional_tokenize,
    count_tokens,
    train_bpe,
)

BPE_VOCAB_SIZES = {"bpe8k": 8000, "bpe32k": 32000}

SCORE_METRICS = {
    "mi": 1.0,
    "si": 1.0,
    "wmd_sim": 1.0,
    "scm": 1.0,
    "cos_sim": 1.0,
    "euc": -1.0,  # smaller distance = more link-like
}

SEMANTIC_METRICS = ["wmd_sim", "scm", "cos_sim", "euc"]
INFO_METRICS = ["mi", "loss", "noise", "si"]


class NumericError(RuntimeError):
    """Raised when a non-finite value surfaces in computed records."""


@dataclass
class RunConfig:
    manifests: list[str]
    preprocessing: str = "conventional"  # conventional | bpe8k | bpe32k
    vectorizer: str = "skipgram"  # skipgram | pvdbow | none
    embedding_path: str | None = None  # load instead of training
    bpe_model_path: str | None = None
    seed: int = 0
    out_dir: str = "out"
    orphan_quantile: float = 0.99
    orphan_metric: str = "mi"
    dim: int = 50
    epochs: int = 20
    window: int = 5
    negatives: int = 5
    min_count: int = 1
    threads: int = field(
        default_factory=lambda: int(os.environ.get("TRACEX_THREADS", "1"))
    )

    def __post_init__(self) -> None:
        if self.preprocessing not in ("conventional", *BPE_VOCAB_SIZES):
            raise ValueError(f"unknown preprocessing: {self.preprocessing}")
        if self.vectorizer not in ("skipgram", "pvdbow", "none"):
            raise ValueError(f"unknown vectorizer: {self.vectorizer}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


def tokenize_testbed(tb: Testbed, cfg: RunConfig) -> tuple[dict[str, list[str]], BpeModel | None]:
    """Token sequences per (role, id) key; trains or loads BPE when requested."""
    texts = {("source", a.id): a.raw_text for a in tb.sources}
    texts.update({("target", a.id): a.raw_text for a in tb.targets})
    model = None
    if cfg.preprocessing in BPE_VOCAB_SIZES:
        if cfg.bpe_model_path:
            model = BpeModel.load(cfg.bpe_model_path)
        else:
            model = train_bpe(list(texts.values()), BPE_VOCAB_SIZES[cfg.preprocessing])
        seqs = {key: bpe_encode(model, text) for key, text in texts.items()}
    else:
        seqs = {key: conventional_tokenize(text) for key, text in texts.items()}
    return {f"{role}:{aid}": toks for (role, aid), toks in seqs.items()}, model


def _ordered_map(fn, items, threads: int):
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass
class TestbedResult:
    testbed: Testbed
    rows: list[dict]
    evaluation: dict
    undefined_counts: dict[str, int]


def analyze_testbed(tb: Testbed, cfg: RunConfig) -> TestbedResult:
    seqs, _ = tokenize_testbed(tb, cfg)
    counts: dict[str, TokenCounts] = {key: count_tokens(s) for key, s in seqs.items()}
    candidates = enumerate_candidates(tb)

    word_matrix, doc_vecs = _build_embeddings(tb, seqs, counts, cfg)

    def pair_row(cand) -> dict:
        src = counts[f"source:{cand.source_id}"]
        tgt = counts[f"target:{cand.target_id}"]
        info = info_record(src, tgt)
        row = {
            "source_id": cand.source_id,
            "target_id": cand.target_id,
            "is_link": cand.is_link,
            "h_x": info.h_x, "h_y": info.h_y, "h_pool": info.h_pool,
            "mi": info.mi, "loss": info.loss, "noise": info.noise,
            "si": info.si, "sx": info.sx,
            "d1": info.d1, "d2": info.d2, "d3": info.d3,
            "null_shared": info.null_shared,
            "wmd": None, "scm": None, "cos": None, "euc": None,
            "wmd_sim": None, "cos_sim": None, "wmd_relaxed": False,
        }
        if cfg.vectorizer != "none":
            sv = doc_vecs.get(f"source:{cand.source_id}")
            tv = doc_vecs.get(f"target:{cand.target_id}")
            dist = distance_record(src, tgt, word_matrix, sv, tv)
            row.update({
                "wmd": dist.wmd, "scm": dist.scm, "cos": dist.cos, "euc": dist.euc,
                "wmd_sim": dist.wmd_sim, "cos_sim": dist.cos_sim,
                "wmd_relaxed": dist.wmd_relaxed,
            })
        return row

    rows = _ordered_map(pair_row, candidates, cfg.threads)
    _check_finite(rows)

    undefined = {
        metric: sum(1 for r in rows if r.get(metric) is None)
        for metric in SCORE_METRICS
    }
    evaluation = _evaluate(rows)
    return TestbedResult(tb, rows, evaluation, undefined)


def _build_embeddings(
    tb: Testbed,
    seqs: dict[str, list[str]],
    counts: dict[str, TokenCounts],
    cfg: RunConfig,
) -> tuple[EmbeddingMatrix | None, dict[str, np.ndarray]]:
    """Word matrix for WMD/SCM plus per-artifact document vectors for COS/EUC."""
    if cfg.vectorizer == "none":
        return None, {}
    train_cfg = TrainConfig(
        dim=cfg.dim, window=cfg.window, negatives=cfg.negatives,
        epochs=cfg.epochs, min_count=cfg.min_count, seed=cfg.seed,
    )
    keys = sorted(seqs)
    if cfg.vectorizer == "pvdbow":
        docs = [(k, seqs[k]) for k in keys if seqs[k]]
        dv = train_pvdbow(docs, train_cfg)
        word_matrix = dv.word_matrix
        doc_vecs = {doc_id: dv.vector(doc_id) for doc_id in dv.doc_ids}
        return word_matrix, doc_vecs
    if cfg.embedding_path:
        word_matrix = load_embeddings(cfg.embedding_path)
    else:
        corpus = [seqs[k] for k in keys if seqs[k]]
        word_matrix = train_skipgram(corpus, train_cfg).matrix
    doc_vecs = {}
    for key in keys:
        try:
            doc_vecs[key] = mean_doc_vector(counts[key], word_matrix)
        except EmbeddingError:
            pass  # OOV-only artifact: COS/EUC stay undefined for its pairs
    return word_matrix, doc_vecs


def _check_finite(rows: list[dict]) -> None:
    for row in rows:
        for key, value in row.items():
            if isinstance(value, float) and not np.isfinite(value):
                raise NumericError(
                    f"non-finite {key} for pair ({row['source_id']}, {row['target_id']})"
                )


def _evaluate(rows: list[dict]) -> dict:
    labels_all = [r["is_link"] for r in rows]
    out: dict = {"scores": {}}
    for metric, sign in SCORE_METRICS.items():
        defined = [(l, r[metric]) for l, r in zip(labels_all, rows) if r.get(metric) is not None]
        entry: dict = {"n_defined": len(defined), "n_excluded": len(rows) - len(defined)}
        if defined:
            labels, values = zip(*defined)
            scores = [sign * v for v in values]
            try:
                entry["roc_auc"] = roc_auc(labels, scores)
            except EvaluationError:
                entry["roc_auc"] = None
            try:
                entry["pr_auc"] = pr_auc(labels, scores)
            except EvaluationError:
                entry["pr_auc"] = None
        else:
            entry["roc_auc"] = None
            entry["pr_auc"] = None
        out["scores"][metric] = entry
    return out


def run_analysis(cfg: RunConfig) -> list[TestbedResult]:
    """Analyze every manifest and write the full report tree under out_dir."""
    out_root = Path(cfg.out_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    results = []
    for manifest in cfg.manifests:
        tb = load_testbed(manifest)
        result = analyze_testbed(tb, cfg)
        write_report_tree(result, cfg, out_root / "reports" / tb.name)
        results.append(result)
    metadata = {
        "version": __version__,
        "config": {
            "manifests": cfg.manifests,
            "preprocessing": cfg.preprocessing,
            "vectorizer": cfg.vectorizer,
            "embedding_path": cfg.embedding_path,
            "seed": cfg.seed,
            "dim": cfg.dim,
            "epochs": cfg.epochs,
            "window": cfg.window,
            "negatives": cfg.negatives,
            "min_count": cfg.min_count,
            "orphan_quantile": cfg.orphan_quantile,
            "orphan_metric": cfg.orphan_metric,
            "threads": cfg.threads,
        },
        "testbeds": {
            r.testbed.name: {
                "all": r.testbed.n_all,
                "links": r.testbed.n_links,
                "non_links": r.testbed.n_non_links,
                "empty_artifacts": r.testbed.empty_artifact_ids,
                "undefined_pair_counts": r.undefined_counts,
            }
            for r in results
        },
    }
    (out_root / "run.json").write_text(
        json.dumps(metadata, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return results


def write_report_tree(result: TestbedResult, cfg: RunConfig, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = result.rows
    tb = result.testbed

    write_records_csv(rows, out_dir / "records.csv")
    write_records_jsonl(rows, out_dir / "records.jsonl")
    write_information_csv(
        [information_table(rows, tb.name)], out_dir / "information.csv"
    )
    write_by_links_csv(by_links_table(rows), out_dir / "by_links.csv")
    write_correlations_csv(
        correlation_table(rows, SEMANTIC_METRICS, INFO_METRICS),
        out_dir / "correlations.csv",
    )

    listings = extreme_cases(rows, "loss") + extreme_cases(rows, "noise")
    if tb.n_links > 0:
        policy = OrphanPolicy(quantile=cfg.orphan_quantile, metric=cfg.orphan_metric)
        try:
            listings += detect_orphans(rows, policy)
        except Exception:
            pass  # no defined link metric; census still emitted below
    write_cases_jsonl(listings, out_dir / "cases.jsonl")

    for color in ("loss", "noise"):
        (out_dir / f"scatter_{color}.svg").write_text(
            scatter_svg(rows, color_key=color) + "\n", encoding="utf-8"
        )

    evaluation = {
        "testbed": tb.name,
        "counts": {"all": tb.n_all, "links": tb.n_links, "non_links": tb.n_non_links},
        "aggregation": "per candidate pair",
        "null_shared": null_shared_census(rows),
        "undefined_pair_counts": result.undefined_counts,
        **result.evaluation,
    }
    (out_dir / "evaluation.json").write_text(
        json.dumps(evaluation, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
