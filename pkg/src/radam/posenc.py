"""Fixed 2D sinusoidal positional encoding for the flattened pixel grid.

The first z/2 channels encode the column coordinate x, the last z/2 the
row coordinate y, each as interleaved sin/cos pairs at geometrically
decreasing frequencies 10000^(-4i/z).  Rows follow r = y*w + x, matching
the aggregation layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aggregate import AggregatedMap


@dataclass(frozen=True)
class PositionalEncoding:
    table: np.ndarray  # (w*h, z)
    width: int
    height: int


def positional_encoding(w: int, h: int, z: int) -> PositionalEncoding:
    """Build the (w*h, z) encoding table for a w x h grid with z channels."""
    if w < 1 or h < 1:
        raise ValueError(f"grid dims must be >= 1, got {w}x{h}")
    if z % 4 != 0:
        raise ValueError(f"channel count must be divisible by 4, got {z}")
    ys, xs = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    xs = xs.reshape(-1, 1).astype(np.float64)  # (wh, 1), row r = y*w + x
    ys = ys.reshape(-1, 1).astype(np.float64)
    freq = 10000.0 ** (-4.0 * np.arange(z // 4) / z)  # (z/4,)
    table = np.empty((w * h, z), dtype=np.float64)
    half = z // 2
    table[:, 0:half:2] = np.sin(xs * freq)
    table[:, 1:half:2] = np.cos(xs * freq)
    table[:, half::2] = np.sin(ys * freq)
    table[:, half + 1 :: 2] = np.cos(ys * freq)
    return PositionalEncoding(table=table, width=w, height=h)


def add_pe(x: AggregatedMap, pe: PositionalEncoding) -> AggregatedMap:
    """Element-wise sum of the aggregated map and the encoding table."""
    if x.data.shape != pe.table.shape:
        raise ValueError(
            f"shape mismatch: map {x.data.shape} vs table {pe.table.shape}"
        )
    return AggregatedMap(
        data=x.data + pe.table,
        width=x.width,
        height=x.height,
        channel_offsets=list(x.channel_offsets),
    )
