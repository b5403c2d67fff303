"""Random synthetic models and sentences for tests, the selftest
command, and desk-scale experiments."""
from __future__ import annotations

import numpy as np

from .core import TokenSequence
from .predictor import BuiltinModel


def vocabulary(size: int) -> list[str]:
    return [f"w{i:02d}" for i in range(size)]


def random_model(rng: np.random.Generator, vocab_size: int = 8,
                 bigram_count: int = 0, scale: float = 1.5) -> BuiltinModel:
    vocab = vocabulary(vocab_size)
    unigrams = {w: float(rng.normal(0.0, scale)) for w in vocab}
    bigrams = {}
    while len(bigrams) < bigram_count:
        t1, t2 = rng.choice(vocab, size=2, replace=True)
        bigrams[(str(t1), str(t2))] = float(rng.normal(0.0, 2.0 * scale))
    return BuiltinModel(unigrams=unigrams, bigrams=bigrams)


def random_sentence(rng: np.random.Generator, vocab_size: int,
                    length: int) -> TokenSequence:
    vocab = vocabulary(vocab_size)
    return TokenSequence(str(w) for w in rng.choice(vocab, size=length))
