"""Fixed-window autoregressive language model with analytic gradients.

Architecture: the last `window` token embeddings are concatenated and fed
through one tanh hidden layer to vocabulary logits.  The hidden state is
the per-step representation consumed by the diversity regression head, so
it is returned by every forward call.

Training is plain SGD on mean negative log-likelihood over response
positions.  Both the standard and the dynamic-temperature objective run
through the same code path (`temps` = all ones for the standard case), so
a dynamic run whose temperatures are all exactly 1.0 is bit-identical to
standard training.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .errors import InvalidInputError
from .rng import RngState
from .truncation import TruncationConfig
from .vocab import EOS_ID, PAD_ID, Vocabulary

SCENARIOS = ("qa", "chitchat")


@dataclass
class TinyLmParams:
    """Model weights; `hidden_dim` is the state size the regression head consumes."""

    emb: np.ndarray  # (vocab, embed_dim)
    w_h: np.ndarray  # (window * embed_dim, hidden_dim)
    b_h: np.ndarray  # (hidden_dim,)
    w_o: np.ndarray  # (hidden_dim, vocab)
    b_o: np.ndarray  # (vocab,)
    window: int

    @property
    def vocab_size(self) -> int:
        return self.emb.shape[0]

    @property
    def embed_dim(self) -> int:
        return self.emb.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.w_h.shape[1]

    def arrays(self) -> list[np.ndarray]:
        return [self.emb, self.w_h, self.b_h, self.w_o, self.b_o]

    def param_count(self) -> int:
        return sum(a.size for a in self.arrays())

    def copy(self) -> "TinyLmParams":
        return TinyLmParams(*(a.copy() for a in self.arrays()), window=self.window)

    def validate(self) -> None:
        v, d_e = self.emb.shape
        if self.w_h.shape != (self.window * d_e, self.hidden_dim):
            raise InvalidInputError("w_h shape inconsistent with window and embed_dim")
        if self.b_h.shape != (self.hidden_dim,) or self.b_o.shape != (v,):
            raise InvalidInputError("bias shapes inconsistent")
        if self.w_o.shape != (self.hidden_dim, v):
            raise InvalidInputError("w_o shape inconsistent")
        if not all(np.isfinite(a).all() for a in self.arrays()):
            raise InvalidInputError("model parameters contain non-finite entries")


INIT_SCALE = 0.08


def init_params(
    vocab_size: int,
    embed_dim: int,
    hidden_dim: int,
    window: int,
    rng: RngState,
) -> TinyLmParams:
    """Uniform(-0.08, 0.08) initialization drawn from `rng`."""

    def u(*shape):
        return np.ascontiguousarray(rng.uniform_array(shape, -INIT_SCALE, INIT_SCALE))

    return TinyLmParams(
        emb=u(vocab_size, embed_dim),
        w_h=u(window * embed_dim, hidden_dim),
        b_h=u(hidden_dim),
        w_o=u(hidden_dim, vocab_size),
        b_o=u(vocab_size),
        window=window,
    )


def zero_grads(params: TinyLmParams) -> list[np.ndarray]:
    return [np.zeros_like(a) for a in params.arrays()]


@dataclass
class DialogueExample:
    context: str
    response: str
    scenario: str

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise InvalidInputError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")


@dataclass
class TrainConfig:
    learning_rate: float = 0.5
    epochs: int = 30
    batch_size: int = 128
    seed: int = 0
    mode: str = "nll"  # or "dynamic_temperature"
    head_mode: str = "frozen_lm"  # or "joint"
    joint_weight: float = 1.0  # MSE weight when head_mode == "joint"

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise InvalidInputError("learning_rate must be positive")
        if self.epochs < 1:
            raise InvalidInputError("epochs must be >= 1")
        if self.mode not in ("nll", "dynamic_temperature"):
            raise InvalidInputError(f"unknown training mode {self.mode!r}")
        if self.head_mode not in ("frozen_lm", "joint"):
            raise InvalidInputError(f"unknown head mode {self.head_mode!r}")


def forward_step(params: TinyLmParams, window_ids) -> tuple[np.ndarray, np.ndarray]:
    """Logits and hidden state for one window of `params.window` token ids."""
    w = np.ascontiguousarray(window_ids, dtype=np.int64)
    if w.shape != (params.window,):
        raise InvalidInputError(f"window must have length {params.window}, got {w.shape}")
    if (w < 0).any() or (w >= params.vocab_size).any():
        raise InvalidInputError("window contains out-of-range token ids")
    return kernels.forward_step(params.emb, params.w_h, params.b_h, params.w_o, params.b_o, w)


def example_positions(
    vocab: Vocabulary, window: int, example: DialogueExample
) -> tuple[np.ndarray, np.ndarray]:
    """(windows, targets) for every response position of one example.

    The model predicts each response token (and the closing EOS) from the
    last `window` ids of BOS + context + EOS + generated-so-far, left
    padded with PAD.
    """
    ctx = vocab.encode_context(example.context)
    resp = vocab.encode_response(example.response)
    prefix = [PAD_ID] * window + ctx
    windows = np.empty((len(resp), window), dtype=np.int64)
    targets = np.empty(len(resp), dtype=np.int64)
    for t, target in enumerate(resp):
        windows[t] = prefix[-window:]
        targets[t] = target
        prefix.append(target)
    return windows, targets


def context_window(vocab: Vocabulary, window: int, context: str) -> np.ndarray:
    """Window whose last id is the context-closing EOS (the sentence state)."""
    ctx = vocab.encode_context(context)
    padded = [PAD_ID] * window + ctx
    return np.asarray(padded[-window:], dtype=np.int64)


def batch_states(params: TinyLmParams, windows: np.ndarray) -> np.ndarray:
    """Hidden states for a batch of windows, (n, hidden_dim)."""
    x = params.emb[windows].reshape(len(windows), -1)
    return np.tanh(x @ params.w_h + params.b_h)


def _nll_grads(
    params: TinyLmParams,
    windows: np.ndarray,
    targets: np.ndarray,
    temps: np.ndarray,
    scale: float,
) -> tuple[float, list[np.ndarray]]:
    """Sum of -ln softmax(z/T)[target] over positions, and grads of
    scale * that sum.  `scale` is normally 1/position-count."""
    n = len(targets)
    x = params.emb[windows].reshape(n, -1)
    h = np.tanh(x @ params.w_h + params.b_h)
    z = h @ params.w_o + params.b_o
    s = z / temps[:, None]
    m = s.max(axis=1, keepdims=True)
    e = np.exp(s - m)
    sum_e = e.sum(axis=1, keepdims=True)
    rows = np.arange(n)
    log_p = (s[rows, targets] - m[:, 0]) - np.log(sum_e[:, 0])
    loss_sum = float(-log_p.sum())

    dz = e / sum_e
    dz[rows, targets] -= 1.0
    dz *= scale / temps[:, None]
    g_w_o = h.T @ dz
    g_b_o = dz.sum(axis=0)
    dh = dz @ params.w_o.T
    dpre = (1.0 - h * h) * dh
    g_w_h = x.T @ dpre
    g_b_h = dpre.sum(axis=0)
    dx = (dpre @ params.w_h.T).reshape(n * params.window, params.embed_dim)
    g_emb = np.zeros_like(params.emb)
    np.add.at(g_emb, windows.reshape(-1), dx)
    return loss_sum, [g_emb, g_w_h, g_b_h, g_w_o, g_b_o]


def _gather_batch(
    encoded: list[tuple[np.ndarray, np.ndarray]],
    temps: np.ndarray | None,
    idx: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    windows = np.concatenate([encoded[i][0] for i in idx])
    targets = np.concatenate([encoded[i][1] for i in idx])
    if temps is None:
        t = np.ones(len(targets))
    else:
        t = np.concatenate([np.full(len(encoded[i][1]), temps[i]) for i in idx])
    return windows, targets, t


def nll_loss(
    params: TinyLmParams, batch: list[DialogueExample], vocab: Vocabulary
) -> tuple[float, list[np.ndarray]]:
    """Mean NLL over all response positions of the batch, with analytic grads."""
    if not batch:
        raise InvalidInputError("batch must be nonempty")
    encoded = [example_positions(vocab, params.window, ex) for ex in batch]
    windows, targets, temps = _gather_batch(encoded, None, np.arange(len(batch)))
    loss_sum, grads = _nll_grads(params, windows, targets, temps, 1.0 / len(targets))
    return loss_sum / len(targets), grads


def dynamic_nll_loss(
    params: TinyLmParams,
    batch: list[DialogueExample],
    temperatures,
    vocab: Vocabulary,
) -> tuple[float, list[np.ndarray]]:
    """NLL where each example's softmax is shaped by its own temperature.

    `temperatures` holds one positive value per example (applied to every
    position of that example) or one per position, flattened in batch
    order.
    """
    if not batch:
        raise InvalidInputError("batch must be nonempty")
    temps = np.asarray(temperatures, dtype=np.float64).reshape(-1)
    if (temps <= 0.0).any() or not np.isfinite(temps).all():
        raise InvalidInputError("temperatures must be positive and finite")
    encoded = [example_positions(vocab, params.window, ex) for ex in batch]
    n_pos = sum(len(t) for _, t in encoded)
    if len(temps) == len(batch):
        windows, targets, temps = _gather_batch(encoded, temps, np.arange(len(batch)))
    elif len(temps) == n_pos:
        windows = np.concatenate([w for w, _ in encoded])
        targets = np.concatenate([t for _, t in encoded])
    else:
        raise InvalidInputError(
            f"need one temperature per example ({len(batch)}) or per position ({n_pos}), got {len(temps)}"
        )
    loss_sum, grads = _nll_grads(params, windows, targets, temps, 1.0 / len(targets))
    return loss_sum / len(targets), grads


@dataclass
class TrainResult:
    epoch_losses: list[float] = field(default_factory=list)


def train_lm(
    params: TinyLmParams,
    dataset: list[DialogueExample],
    config: TrainConfig,
    vocab: Vocabulary,
    example_temps: np.ndarray | None = None,
) -> TrainResult:
    """SGD in place over `dataset`; `example_temps` switches on the
    dynamic-temperature objective (one temperature per example)."""
    if not dataset:
        raise InvalidInputError("training dataset is empty")
    if example_temps is not None and len(example_temps) != len(dataset):
        raise InvalidInputError("example_temps must align with dataset")
    encoded = [example_positions(vocab, params.window, ex) for ex in dataset]
    order_rng = RngState(config.seed).spawn(1)
    result = TrainResult()
    for _ in range(config.epochs):
        order = _shuffled(len(dataset), order_rng)
        total, count = 0.0, 0
        for start in range(0, len(order), config.batch_size):
            idx = order[start : start + config.batch_size]
            windows, targets, temps = _gather_batch(encoded, example_temps, idx)
            loss_sum, grads = _nll_grads(params, windows, targets, temps, 1.0 / len(targets))
            for arr, g in zip(params.arrays(), grads):
                arr -= config.learning_rate * g
            total += loss_sum
            count += len(targets)
        result.epoch_losses.append(total / count)
    return result


def _shuffled(n: int, rng: RngState) -> np.ndarray:
    """Fisher-Yates with our deterministic rng."""
    order = np.arange(n)
    for i in range(n - 1, 0, -1):
        j = int(rng.next_float() * (i + 1))
        order[i], order[j] = order[j], order[i]
    return order


def generate(
    params: TinyLmParams,
    vocab: Vocabulary,
    context: str,
    trunc_config: TruncationConfig,
    temperature_fn,
    rng: RngState,
    max_len: int,
) -> list[int]:
    """Autoregressive sampling until EOS or `max_len` tokens.

    `temperature_fn(step, hidden) -> float` supplies the per-step
    temperature; the fixed and adaptive modes differ only in this hook.
    The returned ids exclude the terminating EOS.
    """
    if max_len < 1:
        raise InvalidInputError("max_len must be >= 1")
    window = context_window(vocab, params.window, context).copy()
    out: list[int] = []
    k = kernels
    for step in range(max_len):
        logits, hidden = k.forward_step(
            params.emb, params.w_h, params.b_h, params.w_o, params.b_o, window
        )
        t = temperature_fn(step, hidden)
        probs = k.softmax_temperature(logits, t)
        if trunc_config.kind == "top_k":
            probs = k.truncate_top_k(probs, trunc_config.k)
        elif trunc_config.kind == "top_p":
            probs = k.truncate_top_p(probs, trunc_config.p)
        elif trunc_config.kind == "typical":
            probs = k.truncate_typical(probs, trunc_config.tau)
        idx = k.sample_index(probs, rng.next_float())
        if idx == EOS_ID:
            break
        out.append(idx)
        window[:-1] = window[1:]
        window[-1] = idx
    return out


def greedy_generate(
    params: TinyLmParams, vocab: Vocabulary, context: str, max_len: int
) -> list[int]:
    """Deterministic argmax decoding (ties to the lowest index)."""
    window = context_window(vocab, params.window, context).copy()
    out: list[int] = []
    for _ in range(max_len):
        logits, _ = kernels.forward_step(
            params.emb, params.w_h, params.b_h, params.w_o, params.b_o, window
        )
        idx = int(np.argmax(logits))
        if idx == EOS_ID:
            break
        out.append(idx)
        window[:-1] = window[1:]
        window[-1] = idx
    return out
