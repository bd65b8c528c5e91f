"""Adaptive-temperature stochastic decoding toolkit.

A small dialogue LM carries a diversity-score regression head; mapped
through a calibrated monotone-decreasing function, the score drives the
sampling temperature per context or per token, under top-k / top-p /
typical / pure temperature sampling.
"""

from .backend import BACKEND_NAME, available_backends
from .core import argmax_token, entropy, sample_categorical, softmax_with_temperature
from .decode import DecodeConfig, DecodeResult, decode_context, temperature_trace
from .errors import InvalidInputError, MissingArtifactError, StaleArtifactError
from .head import RegressionHeadParams, head_forward, mse_loss, predict_sentence_score, predict_token_score, train_head
from .labeling import (
    LabeledExample,
    LabelingConfig,
    filter_extremes,
    label_dataset,
    mean_pairwise_similarity,
    ngram_cosine_similarity,
    score_context,
)
from .mapping import MappingCalibration, MappingConfig, calibrate, map_score
from .model import DialogueExample, TinyLmParams, TrainConfig, dynamic_nll_loss, forward_step, generate, nll_loss, train_lm
from .rng import RngState
from .truncation import TruncationConfig, truncate_top_k, truncate_top_p, truncate_typical
from .vocab import Vocabulary

__version__ = "0.1.0"
