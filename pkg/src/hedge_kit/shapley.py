"""Interaction index between two adjacent spans given a partition,
exact and neighbor-approximated, plus exact per-word values used as a
brute-force oracle.

All subset sums use math.fsum; subset weights go through log-factorials
so they stay finite for neighborhoods up to ~20 spans.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Partition, Span, TokenSequence
from .errors import CapacityError
from .predictor import Predictor


@dataclass(frozen=True)
class InteractionContext:
    seq: TokenSequence
    partition: Partition
    left: Span
    right: Span
    m: int = 2

    def __post_init__(self):
        # canonicalize orientation so the score is symmetric by construction
        if self.right.end == self.left.start:
            left, right = self.right, self.left
            object.__setattr__(self, "left", left)
            object.__setattr__(self, "right", right)
        if self.left.end != self.right.start:
            raise ValueError("left and right spans must be adjacent")
        if self.left not in self.partition or self.right not in self.partition:
            raise ValueError("split spans must belong to the partition")
        if self.m < 0:
            raise ValueError("neighbor radius must be non-negative")

    def neighbor_spans(self) -> list[Span]:
        """m spans left of the pair, the pair, m spans right; partition order."""
        spans = self.partition.spans
        i = spans.index(self.left)
        lo = max(0, i - self.m)
        hi = min(len(spans), i + 2 + self.m)
        return list(spans[lo:hi])


def interaction_weight(subset_size: int, players: int) -> float:
    """|S|! (M - |S| - 2)! / (M - 1)! for an M-player interaction index."""
    if players < 2 or subset_size > players - 2:
        raise ValueError("subset too large for the player count")
    return math.exp(math.lgamma(subset_size + 1)
                    + math.lgamma(players - subset_size - 1)
                    - math.lgamma(players))


def as_printed_weight(subset_size: int, players: int) -> float:
    """|S|! (P - |S| - 1)! / P!  (alternative normalization)."""
    return math.exp(math.lgamma(subset_size + 1)
                    + math.lgamma(players - subset_size)
                    - math.lgamma(players + 1))


def _present(spans) -> frozenset[int]:
    out = set()
    for s in spans:
        out.update(s.indices())
    return frozenset(out)


def _prob_table(predictor: Predictor, seq: TokenSequence, present_sets,
                label: int) -> dict[frozenset, float]:
    unique = list(dict.fromkeys(present_sets))
    preds = predictor.predict_batch([(seq, p) for p in unique])
    return {p: pred.probs[label] for p, pred in zip(unique, preds)}


def gamma(predictor: Predictor, ctx: InteractionContext, subset,
          label: int | None = None) -> float:
    """Second-order marginal difference for one conditioning subset."""
    subset = list(subset)
    allowed = set(ctx.neighbor_spans()) - {ctx.left, ctx.right}
    if not set(subset) <= allowed:
        raise ValueError("subset must come from the neighbor set minus the pair")
    if label is None:
        label = predictor.predicted_label(ctx.seq)
    sets = [_present(subset + [ctx.left, ctx.right]),
            _present(subset + [ctx.left]),
            _present(subset + [ctx.right]),
            _present(subset)]
    table = _prob_table(predictor, ctx.seq, sets, label)
    return table[sets[0]] - table[sets[1]] - table[sets[2]] + table[sets[3]]


def _interaction_sum(predictor: Predictor, seq: TokenSequence, left: Span,
                     right: Span, others: list[Span], label: int,
                     weight_fn, players: int) -> float:
    q = len(others)
    subsets = []
    for mask in range(1 << q):
        subsets.append([others[b] for b in range(q) if mask >> b & 1])
    present_sets = []
    for sub in subsets:
        present_sets.append((_present(sub + [left, right]),
                             _present(sub + [left]),
                             _present(sub + [right]),
                             _present(sub)))
    flat = [p for quad in present_sets for p in quad]
    table = _prob_table(predictor, seq, flat, label)
    terms = []
    for sub, (a, b, c, d) in zip(subsets, present_sets):
        g = table[a] - table[b] - table[c] + table[d]
        terms.append(weight_fn(len(sub), players) * g)
    return math.fsum(terms)


def interaction_score(predictor: Predictor, ctx: InteractionContext,
                      label: int | None = None) -> float:
    """Neighbor-restricted interaction index of the (left, right) pair."""
    if label is None:
        label = predictor.predicted_label(ctx.seq)
    neighbors = ctx.neighbor_spans()
    others = [s for s in neighbors if s not in (ctx.left, ctx.right)]
    return _interaction_sum(predictor, ctx.seq, ctx.left, ctx.right, others,
                            label, interaction_weight, len(neighbors))


def exact_interaction_score(predictor: Predictor, seq: TokenSequence,
                            partition: Partition, left: Span, right: Span,
                            label: int | None = None, limit: int = 12,
                            weighting: str = "interaction-index") -> float:
    """Full-enumeration oracle over every other span in the partition.

    weighting='interaction-index' uses |S|!(P-|S|-2)!/(P-1)! so the
    neighbor-restricted score converges to this value when the
    neighborhood covers the whole partition; 'as-printed' uses
    |S|!(P-|S|-1)!/P! and is exposed for comparison only.
    """
    if len(partition) > limit:
        raise CapacityError(
            f"partition size {len(partition)} exceeds exact limit {limit}")
    if left.end != right.start or left not in partition or right not in partition:
        raise ValueError("left/right must be adjacent spans of the partition")
    if label is None:
        label = predictor.predicted_label(seq)
    others = [s for s in partition.spans if s not in (left, right)]
    if weighting == "interaction-index":
        weight_fn = interaction_weight
    elif weighting == "as-printed":
        weight_fn = as_printed_weight
    else:
        raise ValueError(f"unknown weighting {weighting!r}")
    return _interaction_sum(predictor, seq, left, right, others, label,
                            weight_fn, len(partition))


def exact_shapley_values(predictor: Predictor, seq: TokenSequence,
                         limit: int = 12, label: int | None = None) -> list[float]:
    """Exact per-token values by enumerating all 2^n coalitions.

    Test oracle only: v(S) is the predicted-label probability of the
    sequence masked to S.
    """
    n = seq.n
    if n > limit:
        raise CapacityError(f"sequence length {n} exceeds exact limit {limit}")
    if label is None:
        label = predictor.predicted_label(seq)
    coalitions = [frozenset(b for b in range(n) if mask >> b & 1)
                  for mask in range(1 << n)]
    table = _prob_table(predictor, seq, coalitions, label)
    values = []
    for i in range(n):
        terms = []
        for s_set in coalitions:
            if i in s_set:
                continue
            w = math.exp(math.lgamma(len(s_set) + 1)
                         + math.lgamma(n - len(s_set))
                         - math.lgamma(n + 1))
            terms.append(w * (table[s_set | {i}] - table[s_set]))
        values.append(math.fsum(terms))
    return values
