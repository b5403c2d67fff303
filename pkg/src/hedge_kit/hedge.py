"""Hierarchy construction: top-down divisive splitting at the weakest
interaction, the agglomerative bottom-up variant, span importance
scoring, and ranking helpers.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import (Contribution, Hierarchy, Partition, Span, TokenSequence,
                   candidate_splits, canonical_json, merge_adjacent, split_span)
from .predictor import Predictor
from .shapley import InteractionContext, interaction_score


@dataclass(frozen=True)
class TraceEntry:
    span: Span
    j: int
    phi: float
    candidates: tuple[tuple[Span, int, float], ...]


@dataclass(frozen=True)
class Explanation:
    seq: TokenSequence
    hierarchy: Hierarchy
    contributions: tuple[Contribution, ...]
    predicted_class: int
    trace: tuple[TraceEntry, ...]
    variant: str = "top-down"


def importance(predictor: Predictor, seq: TokenSequence, span: Span,
               label: int | None = None) -> float:
    """Predicted-class probability minus the best competing class, with
    the span evaluated in a length-preserving pad context."""
    if label is None:
        label = predictor.predicted_label(seq)
    probs = predictor.predict_masked(seq, span.indices()).probs
    best_other = max(p for c, p in enumerate(probs) if c != label)
    return probs[label] - best_other


def explain(predictor: Predictor, seq: TokenSequence, m: int = 2) -> Explanation:
    """Top-down divisive hierarchy: n-1 iterations, each splitting the
    candidate with the globally weakest interaction score.

    Each candidate is scored under its own post-split partition. Ties
    break by candidate order (leftmost span, then smallest j).
    """
    n = seq.n
    label = predictor.predicted_label(seq)
    root = Span(0, n)
    partitions = [Partition.whole(n)]
    contribs = [Contribution(root, importance(predictor, seq, root, label), 0)]
    trace = []
    p = partitions[0]
    for t in range(1, n):
        cands = candidate_splits(p)
        scored = []
        for span, j in cands:
            post = split_span(p, span, j)
            ctx = InteractionContext(seq, post, Span(span.start, j),
                                     Span(j, span.end), m)
            scored.append((span, j, interaction_score(predictor, ctx, label)))
        best = min(range(len(scored)), key=lambda i: scored[i][2])
        span, j, phi = scored[best]
        p = split_span(p, span, j)
        partitions.append(p)
        for half in (Span(span.start, j), Span(j, span.end)):
            contribs.append(
                Contribution(half, importance(predictor, seq, half, label), t))
        trace.append(TraceEntry(span, j, phi, tuple(scored)))
    return Explanation(seq, Hierarchy(partitions), tuple(contribs), label,
                       tuple(trace), "top-down")


def explain_bottom_up(predictor: Predictor, seq: TokenSequence,
                      m: int = 2) -> Explanation:
    """Agglomerative variant: start from singletons and repeatedly merge
    the adjacent pair with the strongest interaction. The resulting
    partitions are read in reverse so the hierarchy still runs from the
    whole sequence down to singletons. Trace entries are in merge order.
    """
    n = seq.n
    label = predictor.predicted_label(seq)
    p = Partition.singletons(n)
    partitions = [p]
    trace = []
    while len(p) > 1:
        scored = []
        for left, right in zip(p.spans, p.spans[1:]):
            ctx = InteractionContext(seq, p, left, right, m)
            scored.append((left, right, interaction_score(predictor, ctx, label)))
        # argmax with leftmost tie-break
        best = min(range(len(scored)), key=lambda i: (-scored[i][2], i))
        left, right, phi = scored[best]
        p = merge_adjacent(p, left, right)
        partitions.append(p)
        trace.append(TraceEntry(Span(left.start, right.end), left.end, phi,
                                tuple((l, l.end, s) for l, r, s in scored)))
    partitions.reverse()
    root = Span(0, n)
    contribs = [Contribution(root, importance(predictor, seq, root, label), 0)]
    for t in range(1, len(partitions)):
        prev = set(partitions[t - 1].spans)
        for span in partitions[t].spans:
            if span not in prev:
                contribs.append(
                    Contribution(span, importance(predictor, seq, span, label), t))
    return Explanation(seq, Hierarchy(partitions), tuple(contribs), label,
                       tuple(trace), "bottom-up")


def top_feature(expl: Explanation, max_len: int | None = None) -> Contribution:
    """Highest-importance contribution within the length cap, excluding
    the root record; ties break by earlier timestep, then leftmost."""
    pool = [c for c in expl.contributions if c.timestep > 0
            and (max_len is None or c.span.length <= max_len)]
    if not pool:  # n == 1: the root is the only (singleton) record
        return expl.contributions[0]
    return min(pool, key=lambda c: (-c.score, c.timestep, c.span.start))


def word_ranking(expl: Explanation) -> list[int]:
    """All token indices ordered by descending singleton importance,
    positional tie-break."""
    scores = {}
    for c in expl.contributions:
        if c.span.length == 1:
            scores[c.span.start] = c.score
    n = expl.seq.n
    assert len(scores) == n, "hierarchy has not reached singletons"
    return sorted(range(n), key=lambda i: (-scores[i], i))


def to_dict(expl: Explanation) -> dict:
    return {
        "tokens": list(expl.seq.tokens),
        "predicted_class": expl.predicted_class,
        "variant": expl.variant,
        "hierarchy": [[s for s in p.spans] for p in expl.hierarchy.partitions],
        "contributions": [
            {"span": c.span, "score": c.score, "timestep": c.timestep}
            for c in expl.contributions
        ],
        "trace": [
            {"span": e.span, "j": e.j, "phi": e.phi,
             "candidates": [{"span": s, "j": j, "phi": phi}
                            for s, j, phi in e.candidates]}
            for e in expl.trace
        ],
    }


def to_json(expl: Explanation) -> str:
    return canonical_json(to_dict(expl))
