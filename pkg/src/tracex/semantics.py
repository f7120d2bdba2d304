"""Semantic distances between candidate pairs: EUC, COS, SCM, WMD.

Word Mover's Distance uses Euclidean ground cost between token vectors and
exact optimal transport; bags too large for the exact solver fall back to
the relaxed lower bound with a flag. Out-of-vocabulary tokens are dropped;
a pair whose side becomes empty gets undefined distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from tracex.embeddings import EmbeddingMatrix
from tracex.tokenization import TokenCounts
from tracex.transport import transport_cost

EXACT_WMD_PAIR_LIMIT = 65536


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    """1 - cos(u, v), clamped to [0, 2]. Zero vectors are an error."""
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine distance is undefined for a zero vector")
    return float(min(2.0, max(0.0, 1.0 - float(u @ v) / (nu * nv))))


def euclidean_distance(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return float(np.linalg.norm(u - v))


def _in_vocab(counts: TokenCounts, m: EmbeddingMatrix) -> tuple[list[str], np.ndarray]:
    tokens = sorted(t for t, c in counts.counts.items() if c > 0 and t in m.index)
    weights = np.array([counts.counts[t] for t in tokens], dtype=np.int64)
    return tokens, weights


def soft_cosine(a: TokenCounts, b: TokenCounts, m: EmbeddingMatrix) -> float:
    """Soft cosine over the union in-vocab term set.

    Term similarity s_ij = max(0, cos(v_i, v_j))^2 with unit diagonal;
    relu^2 is not guaranteed PSD, so denominators are clamped.
    """
    ta, wa = _in_vocab(a, m)
    tb, wb = _in_vocab(b, m)
    if not ta or not tb:
        raise ValueError("soft cosine undefined: a side has no in-vocab tokens")
    terms = sorted(set(ta) | set(tb))
    vecs = np.stack([m.vector(t) for t in terms])
    norms = np.linalg.norm(vecs, axis=1)
    norms[norms == 0.0] = 1.0
    unit = vecs / norms[:, None]
    sim = np.maximum(0.0, unit @ unit.T) ** 2
    np.fill_diagonal(sim, 1.0)
    idx = {t: i for i, t in enumerate(terms)}
    va = np.zeros(len(terms))
    vb = np.zeros(len(terms))
    for t, w in zip(ta, wa):
        va[idx[t]] = w
    for t, w in zip(tb, wb):
        vb[idx[t]] = w
    num = float(va @ sim @ vb)
    den = math.sqrt(max(1e-12, float(va @ sim @ va)) * max(1e-12, float(vb @ sim @ vb)))
    return float(min(1.0, max(0.0, num / den)))


def relaxed_wmd(weights_a: np.ndarray, weights_b: np.ndarray, cost: np.ndarray) -> float:
    """Lower bound: max of the two one-sided nearest-neighbor relaxations."""
    pa = weights_a / weights_a.sum()
    pb = weights_b / weights_b.sum()
    return float(max(pa @ cost.min(axis=1), pb @ cost.min(axis=0)))


def wmd(
    a: TokenCounts, b: TokenCounts, m: EmbeddingMatrix
) -> tuple[float, bool]:
    """Word Mover's Distance and a flag marking the relaxed fallback.

    Exact transport when |support_a| * |support_b| <= EXACT_WMD_PAIR_LIMIT,
    otherwise the relaxed lower bound (flag True).
    """
    ta, wa = _in_vocab(a, m)
    tb, wb = _in_vocab(b, m)
    if not ta or not tb:
        raise ValueError("WMD undefined: a side has no in-vocab tokens")
    va = np.stack([m.vector(t) for t in ta])
    vb = np.stack([m.vector(t) for t in tb])
    diff = va[:, None, :] - vb[None, :, :]
    cost = np.sqrt((diff * diff).sum(axis=2))
    if len(ta) * len(tb) > EXACT_WMD_PAIR_LIMIT:
        return relaxed_wmd(wa.astype(float), wb.astype(float), cost), True
    return transport_cost(wa, wb, cost), False


def similarity(distance: float) -> float:
    """Normalized distance inverse, 1 / (1 + d)."""
    return 1.0 / (1.0 + distance)


@dataclass
class DistanceRecord:
    """Per-pair distance bundle; None marks an undefined (OOV-empty) metric."""

    wmd: float | None
    scm: float | None
    cos: float | None
    euc: float | None
    wmd_sim: float | None
    cos_sim: float | None
    wmd_relaxed: bool = False


def distance_record(
    src_counts: TokenCounts,
    tgt_counts: TokenCounts,
    word_matrix: EmbeddingMatrix | None,
    src_vec: np.ndarray | None,
    tgt_vec: np.ndarray | None,
) -> DistanceRecord:
    """Assemble all six distance fields for one pair.

    WMD/SCM need a word embedding matrix; COS/EUC need per-document vectors
    (count-weighted means or trained doc vectors). Undefined metrics stay
    None rather than aborting the pair.
    """
    wmd_val = scm_val = cos_val = euc_val = None
    relaxed = False
    if word_matrix is not None:
        try:
            wmd_val, relaxed = wmd(src_counts, tgt_counts, word_matrix)
        except ValueError:
            pass
        try:
            scm_val = soft_cosine(src_counts, tgt_counts, word_matrix)
        except ValueError:
            pass
    if src_vec is not None and tgt_vec is not None:
        try:
            cos_val = cosine_distance(src_vec, tgt_vec)
        except ValueError:
            pass
        euc_val = euclidean_distance(src_vec, tgt_vec)
    return DistanceRecord(
        wmd=wmd_val,
        scm=scm_val,
        cos=cos_val,
        euc=euc_val,
        wmd_sim=None if wmd_val is None else similarity(wmd_val),
        cos_sim=None if cos_val is None else similarity(cos_val),
        wmd_relaxed=relaxed,
    )
