import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hedge_kit.core import TokenSequence
from hedge_kit.predictor import DEFAULT_PAD, BuiltinBackend, BuiltinModel, Predictor


NEGATION_MODEL = BuiltinModel(
    unigrams={"not": -0.5, "bad": -2.0, "a": 0.0, "movie": 0.0},
    bigrams={("not", "bad"): 1.5},
)


def make_predictor(model: BuiltinModel, pad: str = DEFAULT_PAD) -> Predictor:
    return Predictor(BuiltinBackend(model, pad), pad)


@pytest.fixture
def negation_predictor():
    return make_predictor(NEGATION_MODEL)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def seq(*tokens) -> TokenSequence:
    return TokenSequence(tokens)
