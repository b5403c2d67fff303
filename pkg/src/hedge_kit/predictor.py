"""Black-box classifier abstraction with caching, batching, and three
backends: built-in synthetic models, a subprocess JSON-lines wire
protocol, and HTTP.

Masking preserves sequence length: absent positions are rendered as the
pad literal. The evaluation counter is part of the contract so
complexity claims are testable.
"""
from __future__ import annotations

import json
import math
import shlex
import subprocess
import threading
from dataclasses import dataclass, field

from .core import TokenSequence
from .errors import ConfigError, ContractError, ProtocolError, TransportError

DEFAULT_PAD = "<pad>"

PROB_SUM_TOL = 1e-6


@dataclass(frozen=True)
class Prediction:
    probs: tuple[float, ...]

    def __init__(self, probs):
        probs = tuple(float(p) for p in probs)
        if len(probs) < 2:
            raise ContractError(f"need at least 2 classes, got {len(probs)}")
        for p in probs:
            if not (0.0 <= p <= 1.0):
                raise ContractError(f"probability {p} outside [0, 1]")
        if abs(sum(probs) - 1.0) > PROB_SUM_TOL:
            raise ContractError(f"probabilities sum to {sum(probs)}")
        object.__setattr__(self, "probs", probs)

    @property
    def label(self) -> int:
        return max(range(len(self.probs)), key=lambda i: self.probs[i])


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


# --- builtin synthetic models ------------------------------------------------


@dataclass(frozen=True)
class BuiltinModel:
    """Binary bag-of-words model with contiguous bigram overrides.

    A matching bigram replaces the sum of its two unigram weights; pad
    tokens score 0 and break bigrams. Class scores are [-s, +s] and the
    probabilities their softmax, i.e. p(pos) = sigmoid(2 s). Bigrams
    are matched by a greedy left-to-right scan.
    """

    classes: tuple[str, ...] = ("neg", "pos")
    unigrams: dict = field(default_factory=dict)
    bigrams: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "BuiltinModel":
        try:
            classes = tuple(d.get("classes", ("neg", "pos")))
            unigrams = {str(k): float(v) for k, v in d.get("unigrams", {}).items()}
            bigrams = {}
            for entry in d.get("bigrams", []):
                t1, t2, w = entry
                bigrams[(str(t1), str(t2))] = float(w)
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"malformed builtin model: {exc}") from exc
        if len(classes) != 2:
            raise ConfigError("builtin models are binary only")
        return cls(classes, unigrams, bigrams)

    @classmethod
    def from_file(cls, path: str) -> "BuiltinModel":
        try:
            with open(path, encoding="utf-8") as fh:
                d = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load builtin model {path!r}: {exc}") from exc
        return cls.from_dict(d)

    def score(self, tokens, pad: str) -> float:
        s = 0.0
        i = 0
        n = len(tokens)
        while i < n:
            t = tokens[i]
            if t == pad:
                i += 1
                continue
            if i + 1 < n and tokens[i + 1] != pad and (t, tokens[i + 1]) in self.bigrams:
                s += self.bigrams[(t, tokens[i + 1])]
                i += 2
            else:
                s += self.unigrams.get(t, 0.0)
                i += 1
        return s

    def predict(self, tokens, pad: str) -> list[float]:
        # both entries via the same sigmoid so score negation flips
        # the vector exactly
        s = self.score(tokens, pad)
        return [sigmoid(-2.0 * s), sigmoid(2.0 * s)]


DEMO_MODEL = BuiltinModel(
    unigrams={"not": -0.5, "bad": -2.0, "good": 1.0, "great": 1.5, "awful": -1.8,
              "waste": -1.2, "boring": -1.0},
    bigrams={("not", "bad"): 1.5, ("not", "good"): -1.0},
)


# --- backends ----------------------------------------------------------------


class BuiltinBackend:
    def __init__(self, model: BuiltinModel, pad: str = DEFAULT_PAD):
        self.model = model
        self.pad = pad

    def evaluate(self, batch: list[tuple[str, ...]]) -> list[list[float]]:
        return [self.model.predict(toks, self.pad) for toks in batch]

    def close(self) -> None:
        pass


class SubprocessBackend:
    """Serializes JSON-lines requests over one pipe to a child process.

    Wire format, one object per line:
      handshake  {"hello": {"classes": C, "pad": "<pad>"}}
      request    {"id": 1, "batch": [["the", "<pad>", "cat"], ...]}
      response   {"id": 1, "probs": [[0.2, 0.8], ...]}
    """

    def __init__(self, cmd: str, pad: str = DEFAULT_PAD):
        self.pad = pad
        try:
            self.proc = subprocess.Popen(
                shlex.split(cmd),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
            )
        except OSError as exc:
            raise TransportError(f"cannot start backend {cmd!r}: {exc}") from exc
        self._next_id = 0
        self._lock = threading.Lock()
        hello = self._read_line()
        if "fatal" in hello:
            raise TransportError(f"backend failed to start: {hello['fatal']}")
        if "hello" not in hello:
            raise ProtocolError(f"expected handshake, got {hello!r}")
        self.classes = int(hello["hello"]["classes"])
        backend_pad = hello["hello"].get("pad")
        if backend_pad != self.pad:
            raise ConfigError(
                f"backend pad literal {backend_pad!r} != configured {self.pad!r}")

    def _read_line(self) -> dict:
        line = self.proc.stdout.readline()
        if not line:
            raise TransportError("backend closed its output stream")
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"unparseable backend line: {line!r}") from exc
        if not isinstance(obj, dict):
            raise ProtocolError(f"backend line is not an object: {line!r}")
        return obj

    def evaluate(self, batch: list[tuple[str, ...]]) -> list[list[float]]:
        if not batch:
            return []
        with self._lock:
            self._next_id += 1
            req_id = self._next_id
            msg = json.dumps({"id": req_id, "batch": [list(t) for t in batch]})
            try:
                self.proc.stdin.write(msg + "\n")
                self.proc.stdin.flush()
            except (OSError, ValueError) as exc:
                raise TransportError(f"backend write failed: {exc}") from exc
            resp = self._read_line()
        if "error" in resp:
            raise ProtocolError(f"backend error: {resp['error']}")
        if resp.get("id") != req_id:
            raise ProtocolError(f"response id {resp.get('id')} != request id {req_id}")
        probs = resp.get("probs")
        if not isinstance(probs, list) or len(probs) != len(batch):
            raise ProtocolError("response probs do not align with the batch")
        return probs

    def close(self) -> None:
        if self.proc.poll() is None:
            try:
                self.proc.stdin.close()
            except OSError:
                pass
            self.proc.wait(timeout=10)


class HttpBackend:
    """POST /predict with the same JSON body as the subprocess protocol."""

    def __init__(self, url: str, pad: str = DEFAULT_PAD, retries: int = 2,
                 timeout: float = 30.0):
        self.url = url.rstrip("/")
        self.pad = pad
        self.retries = retries
        self.timeout = timeout
        self._next_id = 0

    def evaluate(self, batch: list[tuple[str, ...]]) -> list[list[float]]:
        import requests

        if not batch:
            return []
        self._next_id += 1
        body = {"id": self._next_id, "batch": [list(t) for t in batch]}
        last_exc = None
        for attempt in range(self.retries + 1):
            try:
                r = requests.post(self.url + "/predict", json=body,
                                  timeout=self.timeout)
                r.raise_for_status()
                resp = r.json()
                break
            except (requests.RequestException, ValueError) as exc:
                last_exc = exc
        else:
            raise TransportError(f"HTTP backend failed: {last_exc}",
                                 retries=self.retries)
        probs = resp.get("probs") if isinstance(resp, dict) else None
        if not isinstance(probs, list) or len(probs) != len(batch):
            raise ProtocolError("HTTP response probs do not align with the batch")
        return probs

    def close(self) -> None:
        pass


# --- the caching predictor ---------------------------------------------------


class Predictor:
    """Memoized, batched front of a backend.

    Results are keyed by the rendered token tuple, which is a bijective
    function of (token list, present set) since the pad literal never
    appears in inputs.
    """

    def __init__(self, backend, pad: str = DEFAULT_PAD, cache_enabled: bool = True):
        self.backend = backend
        self.pad = pad
        self.cache_enabled = cache_enabled
        self._cache: dict[tuple[str, ...], Prediction] = {}
        self._lock = threading.Lock()
        self.evaluations = 0

    def render(self, seq: TokenSequence, present) -> tuple[str, ...]:
        if self.pad in seq.tokens:
            raise ConfigError(f"input contains the reserved pad literal {self.pad!r}")
        present = frozenset(present)
        if not present <= seq.all_indices():
            raise ValueError("present set contains out-of-range indices")
        rendered = tuple(t if i in present else self.pad
                         for i, t in enumerate(seq.tokens))
        assert len(rendered) == seq.n
        return rendered

    def predict_masked(self, seq: TokenSequence, present) -> Prediction:
        return self.predict_batch([(seq, present)])[0]

    def predict_tokens(self, tokens) -> Prediction:
        """Plain evaluation of an arbitrary (possibly shortened) token list."""
        seq = TokenSequence(tokens)
        return self.predict_masked(seq, seq.all_indices())

    def predict_batch(self, requests) -> list[Prediction]:
        keys = [self.render(seq, present) for seq, present in requests]
        with self._lock:
            misses: list[tuple[str, ...]] = []
            seen = set()
            for k in keys:
                if (not self.cache_enabled or k not in self._cache) and k not in seen:
                    seen.add(k)
                    misses.append(k)
            fresh: dict[tuple[str, ...], Prediction] = {}
            if misses:
                raw = self.backend.evaluate(misses)
                if len(raw) != len(misses):
                    raise ProtocolError("backend returned a misaligned batch")
                self.evaluations += len(misses)
                fresh = {k: Prediction(p) for k, p in zip(misses, raw)}
                if self.cache_enabled:
                    self._cache.update(fresh)
            if self.cache_enabled:
                return [self._cache[k] for k in keys]
            return [fresh[k] for k in keys]

    def predicted_label(self, seq: TokenSequence) -> int:
        return self.predict_masked(seq, seq.all_indices()).label

    def close(self) -> None:
        self.backend.close()


def build_predictor(spec: str, pad: str = DEFAULT_PAD,
                    cache_enabled: bool = True) -> Predictor:
    """Parse 'builtin:<path>|demo', 'subprocess:<cmd>', or 'http:<url>'."""
    kind, _, rest = spec.partition(":")
    if kind == "builtin":
        model = DEMO_MODEL if rest in ("", "demo") else BuiltinModel.from_file(rest)
        backend = BuiltinBackend(model, pad)
    elif kind == "subprocess":
        if not rest:
            raise ConfigError("subprocess predictor needs a command")
        backend = SubprocessBackend(rest, pad)
    elif kind == "http":
        if not rest:
            raise ConfigError("http predictor needs a URL")
        backend = HttpBackend(rest, pad)
    else:
        raise ConfigError(f"unknown predictor kind {kind!r}")
    return Predictor(backend, pad, cache_enabled)
