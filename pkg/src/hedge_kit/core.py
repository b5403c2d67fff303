"""Domain types and partition algebra shared by every other module.

All intervals are 0-based half-open [start, end). Operations are pure;
every type is an immutable value.
"""
from __future__ import annotations

from dataclasses import dataclass


class StructureError(ValueError):
    """A span was not found where the partition structure requires it."""


@dataclass(frozen=True, order=True)
class Span:
    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    @property
    def length(self) -> int:
        return self.end - self.start

    def indices(self) -> range:
        return range(self.start, self.end)


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple[str, ...]

    def __init__(self, tokens):
        tokens = tuple(tokens)
        if len(tokens) == 0:
            raise ValueError("token sequence must be non-empty")
        object.__setattr__(self, "tokens", tokens)

    @property
    def n(self) -> int:
        return len(self.tokens)

    def all_indices(self) -> frozenset[int]:
        return frozenset(range(self.n))


@dataclass(frozen=True)
class Partition:
    n: int
    spans: tuple[Span, ...]

    def __init__(self, n, spans):
        spans = tuple(spans)
        if not spans:
            raise ValueError("partition must contain at least one span")
        if spans[0].start != 0 or spans[-1].end != n:
            raise ValueError(f"partition does not cover [0, {n})")
        for a, b in zip(spans, spans[1:]):
            if a.end != b.start:
                raise ValueError(f"spans {a} and {b} are not contiguous")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "spans", spans)

    def __len__(self) -> int:
        return len(self.spans)

    def __contains__(self, span: Span) -> bool:
        return span in self.spans

    def __iter__(self):
        return iter(self.spans)

    @classmethod
    def whole(cls, n: int) -> "Partition":
        return cls(n, (Span(0, n),))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(n, tuple(Span(i, i + 1) for i in range(n)))


@dataclass(frozen=True)
class Hierarchy:
    partitions: tuple[Partition, ...]

    def __init__(self, partitions):
        partitions = tuple(partitions)
        if not partitions:
            raise ValueError("hierarchy must contain at least one partition")
        n = partitions[0].n
        if partitions[0].spans != (Span(0, n),):
            raise ValueError("hierarchy must start from the whole-sequence partition")
        for t in range(1, len(partitions)):
            _check_single_split(partitions[t - 1], partitions[t])
        object.__setattr__(self, "partitions", partitions)

    @property
    def n(self) -> int:
        return self.partitions[0].n

    def __len__(self) -> int:
        return len(self.partitions)


def _check_single_split(prev: Partition, cur: Partition) -> tuple[Span, Span]:
    """Verify cur refines prev by exactly one split; return the two halves."""
    if len(cur) != len(prev) + 1:
        raise ValueError("each hierarchy step must add exactly one span")
    old = set(prev.spans)
    new = [s for s in cur.spans if s not in old]
    if len(new) != 2 or new[0].end != new[1].start:
        raise ValueError("hierarchy step is not a single split")
    if Span(new[0].start, new[1].end) not in old:
        raise ValueError("split halves do not concatenate to a previous span")
    return new[0], new[1]


@dataclass(frozen=True)
class Contribution:
    span: Span
    score: float
    timestep: int

    def __post_init__(self):
        if self.timestep < 0:
            raise ValueError("timestep must be non-negative")


def split_span(p: Partition, target: Span, j: int) -> Partition:
    """Replace target with [target.start, j) and [j, target.end)."""
    if target not in p:
        raise StructureError(f"{target} is not a span of the partition")
    if not (target.start < j < target.end):
        raise ValueError(f"split point {j} is not interior to {target}")
    spans = []
    for s in p.spans:
        if s == target:
            spans.append(Span(target.start, j))
            spans.append(Span(j, target.end))
        else:
            spans.append(s)
    return Partition(p.n, spans)


def merge_adjacent(p: Partition, left: Span, right: Span) -> Partition:
    """Replace two adjacent spans with their concatenation."""
    if left not in p or right not in p:
        raise StructureError("spans are not in the partition")
    if left.end != right.start:
        raise ValueError(f"{left} and {right} are not adjacent")
    spans = []
    for s in p.spans:
        if s == left:
            spans.append(Span(left.start, right.end))
        elif s == right:
            continue
        else:
            spans.append(s)
    return Partition(p.n, spans)


def candidate_splits(p: Partition) -> list[tuple[Span, int]]:
    """All (span, j) split candidates, ordered by span.start then j.

    The ordering is normative: tie-breaking in the hierarchy builder
    depends on it.
    """
    out = []
    for s in p.spans:
        for j in range(s.start + 1, s.end):
            out.append((s, j))
    return out


# --- canonical JSON encoding -------------------------------------------------

def format_score(x: float) -> str:
    """IEEE-754 double printed with 17 significant digits."""
    return format(float(x), ".17g")


def canonical_json(obj) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    parts: list[str] = []
    _encode(obj, parts)
    return "".join(parts)


def _encode(obj, parts: list[str]) -> None:
    import json as _json

    if isinstance(obj, bool) or obj is None:
        parts.append(_json.dumps(obj))
    elif isinstance(obj, float):
        parts.append(format_score(obj))
    elif isinstance(obj, int):
        parts.append(str(obj))
    elif isinstance(obj, str):
        parts.append(_json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, Span):
        parts.append(f"[{obj.start}, {obj.end}]")
    elif isinstance(obj, dict):
        parts.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                parts.append(", ")
            parts.append(_json.dumps(str(k), ensure_ascii=False))
            parts.append(": ")
            _encode(v, parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple)):
        parts.append("[")
        for i, v in enumerate(obj):
            if i:
                parts.append(", ")
            _encode(v, parts)
        parts.append("]")
    else:
        raise TypeError(f"cannot encode {type(obj).__name__}")
