"""Information measures over token count vectors, per candidate pair.

The joint construction is pooled counts: concatenate the two token
multisets and take the entropy of the result as H_pool. Under it
mi = h_x + h_y - h_pool is an overlap score (it can be negative for
disjoint bags), loss = h_pool - h_y is the source information unexplained
by the target, and noise = h_pool - h_x is target information absent from
the source, so mi + loss = h_x and mi + noise = h_y hold exactly.
All logarithms are base 2; values are bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from tracex.tokenization import TokenCounts


@dataclass(frozen=True)
class TokenDistribution:
    probs: dict[str, float]

    @property
    def support_size(self) -> int:
        return len(self.probs)

    @classmethod
    def from_counts(cls, counts: TokenCounts) -> "TokenDistribution":
        total = counts.total
        if total <= 0:
            raise ValueError("cannot build a distribution from empty counts")
        return cls({t: c / total for t, c in counts.counts.items() if c > 0})


def entropy(d: TokenDistribution) -> float:
    """H = -sum p log2 p, with 0 log 0 := 0."""
    return -sum(p * math.log2(p) for p in d.probs.values() if p > 0.0)


def self_information(d: TokenDistribution, token: str) -> float:
    """-log2 p(token). Absent tokens are an error, not a p=0 limit."""
    if token not in d.probs:
        raise KeyError(f"token not in support: {token!r}")
    return -math.log2(d.probs[token])


def counts_entropy(counts: TokenCounts) -> float:
    """Entropy of the normalized count vector, computed from raw counts."""
    total = counts.total
    if total <= 0:
        raise ValueError("entropy of empty counts is undefined")
    support = [c for c in counts.counts.values() if c > 0]
    if len(support) == 1:
        return 0.0  # point mass: avoid log-cancellation residue
    # H = log2(total) - (1/total) sum c log2 c, exact for integer counts
    return math.log2(total) - sum(c * math.log2(c) for c in support) / total


def pool(a: TokenCounts, b: TokenCounts) -> TokenCounts:
    """Multiset union: per-token sum of counts."""
    merged = dict(a.counts)
    for t, c in b.counts.items():
        merged[t] = merged.get(t, 0) + c
    return TokenCounts({t: c for t, c in merged.items() if c > 0})


def pooled_mutual_information(a: TokenCounts, b: TokenCounts) -> float:
    """MI = H(a) + H(b) - H(pool(a, b)). May be negative for disjoint bags."""
    return counts_entropy(a) + counts_entropy(b) - counts_entropy(pool(a, b))


def conditional_entropies(a: TokenCounts, b: TokenCounts) -> tuple[float, float]:
    """Return (loss, noise) = (H_pool - H(b), H_pool - H(a))."""
    h_pool = counts_entropy(pool(a, b))
    return h_pool - counts_entropy(b), h_pool - counts_entropy(a)


def min_shared_counts(a: TokenCounts, b: TokenCounts) -> TokenCounts:
    """Per-token minimum over the union vocabulary, zero entries retained."""
    vocab = set(a.counts) | set(b.counts)
    return TokenCounts({t: min(a.counts.get(t, 0), b.counts.get(t, 0)) for t in vocab})


def msi_entropy(a: TokenCounts, b: TokenCounts) -> float:
    """Entropy of the normalized min-shared vector; 0 when the vector is null."""
    shared = min_shared_counts(a, b)
    if shared.total == 0:
        return 0.0
    return counts_entropy(shared)


def extropy(probs: list[float]) -> float:
    """J = -sum (1 - p_i) log2(1 - p_i); terms at p=0 and p=1 contribute 0."""
    return -sum((1.0 - p) * math.log2(1.0 - p) for p in probs if 0.0 < p < 1.0)


def msi_extropy(a: TokenCounts, b: TokenCounts) -> float:
    """Extropy of the normalized min-shared vector over its stored entries."""
    shared = min_shared_counts(a, b)
    total = shared.total
    if total == 0:
        return 0.0
    return extropy([c / total for c in shared.counts.values()])


@dataclass
class InfoRecord:
    """Per-pair information bundle.

    d2 and d3 follow the published-table convention: d2 = h_y minus the
    reported noise column (which numerically equals this loss) and
    d3 = h_x minus the reported loss column (numerically this noise).
    Fields are None when a side is empty (flagged, not fatal).
    """

    h_x: float | None
    h_y: float | None
    h_pool: float | None
    mi: float | None
    loss: float | None
    noise: float | None
    si: float
    sx: float
    d1: float | None
    d2: float | None
    d3: float | None
    null_shared: bool
    defined: bool = True


def info_record(src_counts: TokenCounts, tgt_counts: TokenCounts) -> InfoRecord:
    """Compute every pairwise information measure for one candidate pair."""
    shared = min_shared_counts(src_counts, tgt_counts)
    null_shared = shared.total == 0
    si = msi_entropy(src_counts, tgt_counts)
    sx = msi_extropy(src_counts, tgt_counts)

    src_empty = src_counts.total == 0
    tgt_empty = tgt_counts.total == 0
    if src_empty or tgt_empty:
        h_x = None if src_empty else counts_entropy(src_counts)
        h_y = None if tgt_empty else counts_entropy(tgt_counts)
        return InfoRecord(
            h_x=h_x, h_y=h_y, h_pool=None, mi=None, loss=None, noise=None,
            si=si, sx=sx, d1=None, d2=None, d3=None,
            null_shared=null_shared, defined=False,
        )

    h_x = counts_entropy(src_counts)
    h_y = counts_entropy(tgt_counts)
    h_pool = counts_entropy(pool(src_counts, tgt_counts))
    mi = h_x + h_y - h_pool
    loss = h_pool - h_y
    noise = h_pool - h_x
    return InfoRecord(
        h_x=h_x, h_y=h_y, h_pool=h_pool, mi=mi, loss=loss, noise=noise,
        si=si, sx=sx,
        d1=h_y - h_x, d2=h_y - loss, d3=h_x - noise,
        null_shared=null_shared,
    )
