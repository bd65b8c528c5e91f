"""Pure-numpy implementations of the per-step decoding kernels.

This is the fallback backend; `dyntemp._stepkernels` (Cython) implements
the same signatures.  Inputs are assumed validated by the callers in
`core`, `truncation` and `model` — these functions are the hot path and
do no checking of their own.

Tie-break conventions (shared with the compiled backend, pinned by tests):
  * probability sorts: descending probability, then ascending index
  * typicality sorts: ascending |−ln p − H|, then descending probability,
    then ascending index
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def forward_step(emb, w_h, b_h, w_o, b_o, window):
    """One decoder step: concat window embeddings -> tanh affine -> logits."""
    x = emb[window].reshape(-1)
    hidden = np.tanh(x @ w_h + b_h)
    logits = hidden @ w_o + b_o
    return logits, hidden


def softmax_temperature(logits, t):
    """exp((z - max z)/t) normalized; max subtraction for overflow safety."""
    scaled = (logits - logits.max()) / t
    e = np.exp(scaled)
    return e / e.sum()


def entropy(probs):
    """Shannon entropy in nats over the nonzero support."""
    p = probs[probs > 0.0]
    return float(-(p * np.log(p)).sum())


def head_score(w1, b1, w2, b2, x):
    """Two-layer regression head: tanh(W1^T x + b1) . W2 + b2."""
    return float(np.tanh(x @ w1 + b1) @ w2 + b2)


def _descending_order(probs):
    # argsort of -probs is stable, so ties resolve to the lower index
    return np.argsort(-probs, kind="stable")


def truncate_top_k(probs, k):
    support = int(np.count_nonzero(probs))
    if k >= support:
        return probs.copy()
    keep = _descending_order(probs)[:k]
    out = np.zeros_like(probs)
    out[keep] = probs[keep]
    return out / out.sum()


def truncate_top_p(probs, p):
    order = _descending_order(probs)
    support = int(np.count_nonzero(probs))
    csum = np.cumsum(probs[order])
    cut = int(np.searchsorted(csum, p, side="left"))
    if cut + 1 >= support:
        return probs.copy()
    keep = order[: cut + 1]
    out = np.zeros_like(probs)
    out[keep] = probs[keep]
    return out / out.sum()


def truncate_typical(probs, tau):
    support_idx = np.flatnonzero(probs)
    p = probs[support_idx]
    h = entropy(probs)
    dev = np.abs(-np.log(p) - h)
    # lexsort: last key is primary
    order = np.lexsort((support_idx, -p, dev))
    csum = np.cumsum(p[order])
    cut = int(np.searchsorted(csum, tau, side="left"))
    if cut + 1 >= len(support_idx):
        return probs.copy()
    keep = support_idx[order[: cut + 1]]
    out = np.zeros_like(probs)
    out[keep] = probs[keep]
    return out / out.sum()


def sample_index(probs, u):
    """Smallest index i with u < cumsum(probs)[i]; falls back to the last
    support index when u lands beyond the (float) total mass."""
    csum = np.cumsum(probs)
    idx = int(np.searchsorted(csum, u, side="right"))
    if idx >= len(probs) or probs[idx] == 0.0:
        idx = int(np.flatnonzero(probs)[-1])
    return idx
