"""Diversity-score regression head on the LM hidden state.

score = tanh(W1^T x + b1) . W2 + b2, a two-layer map from the hidden
state to a scalar.  Raw scores are clamped to [0, 1] at prediction time
(labels are mean pairwise similarities, so that is their codomain); the
MSE objective is fit on the raw value.

Two attachment levels: sentence-level reads the hidden state at the
context-closing EOS (the same state that predicts the first response
token); token-level reads the state that produces each generated token.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .errors import InvalidInputError
from .model import (
    TinyLmParams,
    TrainConfig,
    _gather_batch,
    _nll_grads,
    _shuffled,
    batch_states,
    context_window,
    example_positions,
)
from .rng import RngState
from .vocab import PAD_ID, Vocabulary


@dataclass
class RegressionHeadParams:
    w1: np.ndarray  # (hidden, hidden)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (hidden,)
    b2: float

    @property
    def hidden_dim(self) -> int:
        return self.w1.shape[0]

    def param_count(self) -> int:
        return self.w1.size + self.b1.size + self.w2.size + 1

    def copy(self) -> "RegressionHeadParams":
        return RegressionHeadParams(self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2)

    def validate(self) -> None:
        d = self.hidden_dim
        if self.w1.shape != (d, d) or self.b1.shape != (d,) or self.w2.shape != (d,):
            raise InvalidInputError("head parameter shapes inconsistent")
        if not (
            np.isfinite(self.w1).all()
            and np.isfinite(self.b1).all()
            and np.isfinite(self.w2).all()
            and np.isfinite(self.b2)
        ):
            raise InvalidInputError("head parameters contain non-finite entries")


def init_head(hidden_dim: int, rng: RngState) -> RegressionHeadParams:
    def u(*shape):
        return np.ascontiguousarray(rng.uniform_array(shape, -0.08, 0.08))

    return RegressionHeadParams(
        w1=u(hidden_dim, hidden_dim),
        b1=u(hidden_dim),
        w2=u(hidden_dim),
        b2=float(rng.uniform_array((1,), -0.08, 0.08)[0]),
    )


def zero_head(hidden_dim: int) -> RegressionHeadParams:
    return RegressionHeadParams(
        np.zeros((hidden_dim, hidden_dim)),
        np.zeros(hidden_dim),
        np.zeros(hidden_dim),
        0.0,
    )


def clamp_score(raw: float) -> float:
    return min(max(float(raw), 0.0), 1.0)


def head_forward(head: RegressionHeadParams, x) -> float:
    """Raw (unclamped) score for one hidden state."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (head.hidden_dim,):
        raise InvalidInputError(f"hidden state must have length {head.hidden_dim}, got {x.shape}")
    if not np.isfinite(x).all():
        raise InvalidInputError("hidden state contains non-finite entries")
    return kernels.head_score(head.w1, head.b1, head.w2, head.b2, x)


def head_forward_batch(head: RegressionHeadParams, states: np.ndarray) -> np.ndarray:
    return np.tanh(states @ head.w1 + head.b1) @ head.w2 + head.b2


def mse_loss(
    head: RegressionHeadParams, states: np.ndarray, labels
) -> tuple[float, "HeadGrads"]:
    """Mean squared error of raw scores against labels, with analytic grads."""
    labels = np.asarray(labels, dtype=np.float64).reshape(-1)
    states = np.asarray(states, dtype=np.float64)
    if len(states) == 0 or len(states) != len(labels):
        raise InvalidInputError("states and labels must be nonempty and aligned")
    loss, grads, _ = _mse_grads(head, states, labels, 1.0 / len(labels))
    return loss, grads


@dataclass
class HeadGrads:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float


def _mse_grads(
    head: RegressionHeadParams, states: np.ndarray, labels: np.ndarray, scale: float
) -> tuple[float, HeadGrads, np.ndarray]:
    """Returns (mean loss * scale * n, grads of the scaled loss, d/d states)."""
    a = np.tanh(states @ head.w1 + head.b1)
    pred = a @ head.w2 + head.b2
    err = pred - labels
    loss = float((err * err).sum()) * scale
    dpred = (2.0 * scale) * err
    g_w2 = a.T @ dpred
    g_b2 = float(dpred.sum())
    da = np.outer(dpred, head.w2)
    dpre = (1.0 - a * a) * da
    g_w1 = states.T @ dpre
    g_b1 = dpre.sum(axis=0)
    d_states = dpre @ head.w1.T
    return loss, HeadGrads(g_w1, g_b1, g_w2, g_b2), d_states


def predict_sentence_score(
    lm: TinyLmParams, head: RegressionHeadParams, vocab: Vocabulary, context: str
) -> float:
    """Clamped score from the hidden state at the context's EOS position."""
    window = context_window(vocab, lm.window, context)
    _, hidden = kernels.forward_step(lm.emb, lm.w_h, lm.b_h, lm.w_o, lm.b_o, window)
    return clamp_score(kernels.head_score(head.w1, head.b1, head.w2, head.b2, hidden))


def predict_token_score(lm: TinyLmParams, head: RegressionHeadParams, window_ids) -> float:
    """Clamped score from the hidden state of one decoding step."""
    w = np.ascontiguousarray(window_ids, dtype=np.int64)
    if w.shape != (lm.window,):
        raise InvalidInputError(f"window must have length {lm.window}")
    _, hidden = kernels.forward_step(lm.emb, lm.w_h, lm.b_h, lm.w_o, lm.b_o, w)
    return clamp_score(kernels.head_score(head.w1, head.b1, head.w2, head.b2, hidden))


def _sentence_windows(vocab: Vocabulary, window: int, examples) -> np.ndarray:
    return np.stack([context_window(vocab, window, ex.context) for ex in examples])


def _token_windows(vocab: Vocabulary, window: int, examples) -> tuple[np.ndarray, np.ndarray]:
    """Candidate-position windows and their (shared) sentence labels.

    Every generation step of every candidate inherits the example's
    diversity score: the window producing candidate token t is paired with
    the sentence label.
    """
    rows: list[np.ndarray] = []
    labels: list[float] = []
    for ex in examples:
        ctx = vocab.encode_context(ex.context)
        for cand in ex.candidates:
            ids = vocab.encode_text(cand)
            prefix = [PAD_ID] * window + ctx
            for tok in ids:
                rows.append(np.asarray(prefix[-window:], dtype=np.int64))
                labels.append(ex.score)
                prefix.append(tok)
    if not rows:
        raise InvalidInputError("no token-level positions in dataset")
    return np.stack(rows), np.asarray(labels)


def train_head(
    lm: TinyLmParams,
    head: RegressionHeadParams,
    dataset,
    config: TrainConfig,
    level: str = "sentence",
    vocab: Vocabulary | None = None,
) -> list[float]:
    """Fit the head on labeled examples; returns per-epoch MSE.

    `dataset` is a list of labeled examples (see labeling module) carrying
    `.context`, `.candidates` and `.score`.  In `frozen_lm` mode the LM is
    untouched and states are precomputed once.  In `joint` mode each batch
    optimizes NLL + joint_weight * MSE and the MSE gradient also flows
    into the LM through the hidden states.
    """
    if vocab is None:
        raise InvalidInputError("train_head requires the vocabulary")
    if level not in ("sentence", "token"):
        raise InvalidInputError(f"level must be sentence or token, got {level!r}")
    for ex in dataset:
        if getattr(ex, "score", None) is None:
            raise InvalidInputError("train_head needs labeled examples (missing score)")

    if config.head_mode == "frozen_lm":
        return _train_head_frozen(lm, head, dataset, config, level, vocab)
    return _train_head_joint(lm, head, dataset, config, level, vocab)


def _train_head_frozen(lm, head, dataset, config, level, vocab) -> list[float]:
    if level == "sentence":
        windows = _sentence_windows(vocab, lm.window, dataset)
        labels = np.asarray([ex.score for ex in dataset])
    else:
        windows, labels = _token_windows(vocab, lm.window, dataset)
    states = batch_states(lm, windows)
    order_rng = RngState(config.seed).spawn(2)
    losses = []
    for _ in range(config.epochs):
        order = _shuffled(len(labels), order_rng)
        total = 0.0
        for start in range(0, len(order), config.batch_size):
            idx = order[start : start + config.batch_size]
            loss, grads, _ = _mse_grads(head, states[idx], labels[idx], 1.0 / len(idx))
            _apply_head_grads(head, grads, config.learning_rate)
            total += loss * len(idx)
        losses.append(total / len(labels))
    return losses


def _apply_head_grads(head: RegressionHeadParams, grads: HeadGrads, lr: float) -> None:
    head.w1 -= lr * grads.w1
    head.b1 -= lr * grads.b1
    head.w2 -= lr * grads.w2
    head.b2 -= lr * grads.b2


def _train_head_joint(lm, head, dataset, config, level, vocab) -> list[float]:
    """Combined objective: mean NLL over response positions plus
    joint_weight * mean MSE over head positions, both per batch."""
    encoded = [example_positions(vocab, lm.window, ex) for ex in dataset]
    if level == "sentence":
        head_windows = [_sentence_windows(vocab, lm.window, [ex]) for ex in dataset]
        head_labels = [np.asarray([ex.score]) for ex in dataset]
    else:
        per_ex = [_token_windows(vocab, lm.window, [ex]) for ex in dataset]
        head_windows = [w for w, _ in per_ex]
        head_labels = [l for _, l in per_ex]

    order_rng = RngState(config.seed).spawn(3)
    losses = []
    for _ in range(config.epochs):
        order = _shuffled(len(dataset), order_rng)
        total = 0.0
        for start in range(0, len(order), config.batch_size):
            idx = order[start : start + config.batch_size]
            windows, targets, temps = _gather_batch(encoded, None, idx)
            nll_sum, lm_grads = _nll_grads(lm, windows, targets, temps, 1.0 / len(targets))

            hw = np.concatenate([head_windows[i] for i in idx])
            hl = np.concatenate([head_labels[i] for i in idx])
            x = lm.emb[hw].reshape(len(hw), -1)
            states = np.tanh(x @ lm.w_h + lm.b_h)
            mse, h_grads, d_states = _mse_grads(
                head, states, hl, config.joint_weight / len(hl)
            )
            # backprop the MSE term into the LM encoder
            dpre = (1.0 - states * states) * d_states
            lm_grads[1] += x.T @ dpre
            lm_grads[2] += dpre.sum(axis=0)
            dx = (dpre @ lm.w_h.T).reshape(len(hw) * lm.window, lm.embed_dim)
            np.add.at(lm_grads[0], hw.reshape(-1), dx)

            for arr, g in zip(lm.arrays(), lm_grads):
                arr -= config.learning_rate * g
            _apply_head_grads(head, h_grads, config.learning_rate)
            total += nll_sum / len(targets) * len(idx) + mse * len(idx)
        losses.append(total / len(dataset))
    return losses
