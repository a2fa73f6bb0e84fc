"""Half-overlap block framing for long records.

Analysis blocks are windowed with sin^2(pi*n/N_b), whose half-shifted copies
sum to one exactly, so plain overlap-add of processed blocks restores the
interior of the record.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument


@dataclass
class BlockFrame:
    n_block: int = 500

    def __post_init__(self):
        if self.n_block < 2 or self.n_block % 2:
            raise InvalidArgument(
                f"block length must be even and >= 2, got {self.n_block}")

    @property
    def hop(self) -> int:
        return self.n_block // 2

    def window(self) -> np.ndarray:
        n = np.arange(self.n_block)
        return np.sin(np.pi * n / self.n_block) ** 2


def frame_blocks(values: np.ndarray, frame: BlockFrame) -> tuple[np.ndarray, np.ndarray]:
    """Split into windowed half-overlapping blocks.

    Returns (blocks, starts); the record is zero-padded so every sample is
    covered by two block positions (start offsets run from -hop).
    """
    values = np.asarray(values)
    if values.ndim != 1:
        raise InvalidArgument("expected a 1D record")
    n = values.shape[0]
    hop = frame.hop
    starts = np.arange(-hop, n, hop)
    w = frame.window()
    padded = np.zeros(n + 2 * frame.n_block, dtype=values.dtype)
    padded[frame.n_block:frame.n_block + n] = values
    blocks = np.stack([padded[s + frame.n_block:s + frame.n_block + frame.n_block] * w
                       for s in starts])
    return blocks, starts


def merge_blocks(blocks: np.ndarray, starts: np.ndarray, n: int) -> np.ndarray:
    """Overlap-add the (possibly processed) blocks back into one record."""
    blocks = np.asarray(blocks)
    starts = np.asarray(starts, dtype=int)
    if blocks.shape[0] != starts.shape[0]:
        raise InvalidArgument("blocks and starts disagree in count")
    n_block = blocks.shape[1]
    out = np.zeros(n + 2 * n_block, dtype=blocks.dtype)
    for block, s in zip(blocks, starts):
        out[s + n_block:s + n_block + n_block] += block
    return out[n_block:n_block + n]
