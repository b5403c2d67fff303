"""Fidelity metrics (probability drop after deletion, log-odds after
masking, cohesion under span shuffling) and the word-level baseline
rankings used for comparison tables.

Top-k% counts round up with a floor of one token. Deletion shortens the
sequence; masking preserves length. Per-example RNG streams derive from
(master seed, example index) so results are order-independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import TokenSequence
from .hedge import Explanation, top_feature
from .predictor import Predictor

LOG_CLAMP = 1e-12


def top_count(n: int, percent: float) -> int:
    return max(1, math.ceil(n * percent / 100.0))


@dataclass
class MetricResult:
    aggregate: float
    per_example: list[float]
    flags: list[str] = field(default_factory=list)


def _mean(values) -> float:
    values = list(values)
    return math.fsum(values) / len(values) if values else 0.0


def aopc(predictor: Predictor, seqs: list[TokenSequence],
         rankings: list[list[int]], k: float) -> MetricResult:
    """Mean predicted-class probability drop after deleting the top k%
    ranked tokens (sequence is shortened, not padded)."""
    drops = []
    flags = []
    for seq, ranking in zip(seqs, rankings):
        assert sorted(ranking) == list(range(seq.n)), "ranking must cover all tokens"
        before = predictor.predict_masked(seq, seq.all_indices())
        label = before.label
        dropped = set(ranking[:top_count(seq.n, k)])
        kept = [t for i, t in enumerate(seq.tokens) if i not in dropped]
        if kept:
            after = predictor.predict_tokens(kept)
        else:
            after = predictor.predict_masked(seq, frozenset())
            flags.append("all-deleted:all-pad-fallback")
        drops.append(before.probs[label] - after.probs[label])
    return MetricResult(_mean(drops), drops, flags)


def log_odds(predictor: Predictor, seqs: list[TokenSequence],
             rankings: list[list[int]], r: float) -> MetricResult:
    """Mean log-ratio of predicted-class probability after pad-masking
    the top r% ranked tokens (length preserving); lower is better."""
    scores = []
    for seq, ranking in zip(seqs, rankings):
        assert sorted(ranking) == list(range(seq.n)), "ranking must cover all tokens"
        before = predictor.predict_masked(seq, seq.all_indices())
        label = before.label
        masked = set(ranking[:top_count(seq.n, r)])
        present = seq.all_indices() - masked
        after = predictor.predict_masked(seq, present)
        p0 = max(before.probs[label], LOG_CLAMP)
        p1 = max(after.probs[label], LOG_CLAMP)
        scores.append(math.log(p1 / p0))
    return MetricResult(_mean(scores), scores)


def example_rng(master_seed: int, example_index: int) -> np.random.Generator:
    return np.random.default_rng([master_seed, example_index])


def cohesion(predictor: Predictor, seqs: list[TokenSequence],
             explanations: list[Explanation], q: int,
             max_len: int | None = None, seed: int = 0) -> MetricResult:
    """Mean probability drop when the top span's words are re-inserted
    one at a time at uniformly random positions; higher is better."""
    per_example = []
    for idx, (seq, expl) in enumerate(zip(seqs, explanations)):
        rng = example_rng(seed, idx)
        span = top_feature(expl, max_len).span
        before = predictor.predict_masked(seq, seq.all_indices())
        label = before.label
        remainder = [t for i, t in enumerate(seq.tokens)
                     if not (span.start <= i < span.end)]
        span_words = list(seq.tokens[span.start:span.end])
        drops = []
        for _ in range(q):
            shuffled = list(remainder)
            for w in span_words:
                pos = int(rng.integers(0, len(shuffled) + 1))
                shuffled.insert(pos, w)
            after = predictor.predict_tokens(shuffled)
            drops.append(before.probs[label] - after.probs[label])
        per_example.append(_mean(drops))
    return MetricResult(_mean(per_example), per_example)


def leave_one_out(predictor: Predictor, seq: TokenSequence) -> list[int]:
    """Rank tokens by the probability drop when each is pad-masked."""
    before = predictor.predict_masked(seq, seq.all_indices())
    label = before.label
    preds = predictor.predict_batch(
        [(seq, seq.all_indices() - {i}) for i in range(seq.n)])
    scores = [before.probs[label] - p.probs[label] for p in preds]
    return sorted(range(seq.n), key=lambda i: (-scores[i], i))


def sample_shapley_values(predictor: Predictor, seq: TokenSequence,
                          samples: int, seed: int = 0) -> list[float]:
    """Permutation-sampling estimates of per-token values with
    v(S) = predicted-class probability masked to S."""
    n = seq.n
    label = predictor.predicted_label(seq)
    rng = np.random.default_rng(seed)
    totals = [0.0] * n
    for _ in range(samples):
        perm = rng.permutation(n)
        present: set[int] = set()
        requests = []
        requests.append((seq, frozenset()))
        for i in perm:
            present.add(int(i))
            requests.append((seq, frozenset(present)))
        preds = predictor.predict_batch(requests)
        for pos, i in enumerate(perm):
            totals[int(i)] += preds[pos + 1].probs[label] - preds[pos].probs[label]
    return [t / samples for t in totals]


def sample_shapley(predictor: Predictor, seq: TokenSequence,
                   samples: int, seed: int = 0) -> list[int]:
    values = sample_shapley_values(predictor, seq, samples, seed)
    return sorted(range(seq.n), key=lambda i: (-values[i], i))


def random_ranking(seq: TokenSequence, seed: int = 0,
                   example_index: int = 0) -> list[int]:
    rng = example_rng(seed, example_index)
    return [int(i) for i in rng.permutation(seq.n)]


KNOWN_METHODS = ("hedge", "hedge-bottom-up", "leave-one-out",
                 "sample-shapley", "random")
HIERARCHY_METHODS = ("hedge", "hedge-bottom-up")


@dataclass
class EvalRun:
    dataset_id: str
    predictor_spec: str
    methods: list[str]
    params: dict
    # results[method][metric_label] -> MetricResult
    results: dict

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "predictor": self.predictor_spec,
            "methods": list(self.methods),
            "params": dict(self.params),
            "results": {
                method: {
                    label: {"aggregate": res.aggregate,
                            "per_example": res.per_example,
                            "flags": res.flags}
                    for label, res in by_metric.items()
                }
                for method, by_metric in self.results.items()
            },
        }

    def render_table(self) -> str:
        labels: list[str] = []
        for by_metric in self.results.values():
            for label in by_metric:
                if label not in labels:
                    labels.append(label)
        width = max(len(m) for m in self.methods) + 2
        col = max(12, max(len(l) for l in labels) + 2)
        lines = ["method".ljust(width) + "".join(l.rjust(col) for l in labels)]
        for method in self.methods:
            row = method.ljust(width)
            for label in labels:
                res = self.results[method].get(label)
                row += ("-" if res is None else f"{res.aggregate:.4f}").rjust(col)
            lines.append(row)
        return "\n".join(lines) + "\n"


def run_evaluation(predictor: Predictor, seqs: list[TokenSequence],
                   methods: list[str], ks: list[float], rs: list[float],
                   q: int, samples: int, seed: int, m: int = 2,
                   max_len: int | None = None, dataset_id: str = "",
                   predictor_spec: str = "") -> EvalRun:
    from .hedge import explain, explain_bottom_up, word_ranking

    unknown = [meth for meth in methods if meth not in KNOWN_METHODS]
    if unknown:
        raise ValueError(f"unknown methods: {unknown}")
    results: dict[str, dict[str, MetricResult]] = {}
    for method in methods:
        explanations = None
        if method == "hedge":
            explanations = [explain(predictor, s, m) for s in seqs]
            rankings = [word_ranking(e) for e in explanations]
        elif method == "hedge-bottom-up":
            explanations = [explain_bottom_up(predictor, s, m) for s in seqs]
            rankings = [word_ranking(e) for e in explanations]
        elif method == "leave-one-out":
            rankings = [leave_one_out(predictor, s) for s in seqs]
        elif method == "sample-shapley":
            rankings = [sample_shapley(predictor, s, samples, [seed, i])
                        for i, s in enumerate(seqs)]
        else:
            rankings = [random_ranking(s, seed, i) for i, s in enumerate(seqs)]
        by_metric: dict[str, MetricResult] = {}
        for k in ks:
            by_metric[f"aopc@{k:g}"] = aopc(predictor, seqs, rankings, k)
        for r in rs:
            by_metric[f"log_odds@{r:g}"] = log_odds(predictor, seqs, rankings, r)
        if explanations is not None:
            by_metric[f"cohesion@{q}"] = cohesion(
                predictor, seqs, explanations, q, max_len, seed)
        results[method] = by_metric
    params = {"k": ks, "r": rs, "q": q, "samples": samples, "seed": seed,
              "m": m, "max_len": max_len}
    return EvalRun(dataset_id, predictor_spec, list(methods), params, results)
