"""Binary model checkpoint.

Layout (all little-endian):

    bytes 0..5   magic "DDSLM1"
    <6I          vocab_size, embed_dim, window, hidden_dim,
                 head_level (0 sentence, 1 token, 2 untrained),
                 calibrated flag (0/1)
    <I           mapping strategy code (identity=0, linear=1,
                 exponential=2, inverse_sigmoid=3)
    <5d          sharpness, t_min, t_max, s_mean, t0
    float64 blocks, row-major:
                 emb, w_h, b_h, w_o, b_o, head w1, b1, w2, b2(1)
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, MissingArtifactError
from .head import RegressionHeadParams
from .mapping import MappingCalibration, MappingConfig
from .model import TinyLmParams

MAGIC = b"DDSLM1"
HEAD_LEVELS = ("sentence", "token", "untrained")
_STRATEGY_CODE = {"identity": 0, "linear": 1, "exponential": 2, "inverse_sigmoid": 3}
_CODE_STRATEGY = {v: k for k, v in _STRATEGY_CODE.items()}


@dataclass
class Checkpoint:
    lm: TinyLmParams
    head: RegressionHeadParams
    head_level: str = "untrained"
    mapping: MappingConfig | None = None
    calibration: MappingCalibration | None = None


def save_checkpoint(path: str | Path, ckpt: Checkpoint) -> None:
    ckpt.lm.validate()
    ckpt.head.validate()
    if ckpt.head_level not in HEAD_LEVELS:
        raise InvalidInputError(f"head_level must be one of {HEAD_LEVELS}")
    if (ckpt.mapping is None) != (ckpt.calibration is None):
        raise InvalidInputError("mapping and calibration must be stored together")
    lm, head = ckpt.lm, ckpt.head
    parts = [
        MAGIC,
        struct.pack(
            "<6I",
            lm.vocab_size,
            lm.embed_dim,
            lm.window,
            lm.hidden_dim,
            HEAD_LEVELS.index(ckpt.head_level),
            0 if ckpt.mapping is None else 1,
        ),
    ]
    if ckpt.mapping is None:
        parts.append(struct.pack("<I5d", 0, 0.0, 0.0, 0.0, 0.0, 0.0))
    else:
        parts.append(
            struct.pack(
                "<I5d",
                _STRATEGY_CODE[ckpt.mapping.strategy],
                ckpt.mapping.sharpness,
                ckpt.mapping.t_min,
                ckpt.mapping.t_max,
                ckpt.calibration.s_mean,
                ckpt.calibration.t0,
            )
        )
    for arr in lm.arrays() + [head.w1, head.b1, head.w2, np.asarray([head.b2])]:
        parts.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    Path(path).write_bytes(b"".join(parts))


def load_checkpoint(path: str | Path) -> Checkpoint:
    p = Path(path)
    if not p.exists():
        raise MissingArtifactError(f"checkpoint {p} does not exist")
    data = p.read_bytes()
    if data[:6] != MAGIC:
        raise InvalidInputError(f"{p} is not a model checkpoint (bad magic)")
    off = 6
    v, d_e, w, d_h, level_code, calib_flag = struct.unpack_from("<6I", data, off)
    off += struct.calcsize("<6I")
    strat_code, sharp, t_min, t_max, s_mean, t0 = struct.unpack_from("<I5d", data, off)
    off += struct.calcsize("<I5d")

    def block(*shape):
        nonlocal off
        n = int(np.prod(shape))
        arr = np.frombuffer(data, dtype="<f8", count=n, offset=off).reshape(shape).copy()
        off += n * 8
        return arr

    lm = TinyLmParams(
        emb=block(v, d_e),
        w_h=block(w * d_e, d_h),
        b_h=block(d_h),
        w_o=block(d_h, v),
        b_o=block(v),
        window=w,
    )
    head = RegressionHeadParams(w1=block(d_h, d_h), b1=block(d_h), w2=block(d_h), b2=float(block(1)[0]))
    if off != len(data):
        raise InvalidInputError(f"{p} has {len(data) - off} trailing bytes")
    lm.validate()
    head.validate()
    mapping = calibration = None
    if calib_flag:
        mapping = MappingConfig(_CODE_STRATEGY[strat_code], sharp, t_min, t_max)
        calibration = MappingCalibration(s_mean, t0)
    return Checkpoint(lm, head, HEAD_LEVELS[level_code], mapping, calibration)
