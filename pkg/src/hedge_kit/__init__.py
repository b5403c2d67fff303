"""Hierarchical explanations for black-box text classifiers via
weakest-interaction splitting."""

from .core import (Contribution, Hierarchy, Partition, Span, TokenSequence,
                   candidate_splits, split_span)
from .hedge import (Explanation, explain, explain_bottom_up, importance,
                    top_feature, word_ranking)
from .predictor import (BuiltinBackend, BuiltinModel, Prediction, Predictor,
                        build_predictor)
from .shapley import (InteractionContext, exact_interaction_score,
                      exact_shapley_values, gamma, interaction_score)

__all__ = [
    "Contribution", "Hierarchy", "Partition", "Span", "TokenSequence",
    "candidate_splits", "split_span",
    "Explanation", "explain", "explain_bottom_up", "importance",
    "top_feature", "word_ranking",
    "BuiltinBackend", "BuiltinModel", "Prediction", "Predictor",
    "build_predictor",
    "InteractionContext", "exact_interaction_score", "exact_shapley_values",
    "gamma", "interaction_score",
]

__version__ = "0.1.0"
