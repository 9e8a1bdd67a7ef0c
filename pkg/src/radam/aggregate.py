"""Multi-depth activation-map aggregation and baseline poolings.

Activation maps are stored as (height, width, channels) arrays.  The
aggregated matrix has one row per pixel in row-major order (r = y*w + x)
and one column per channel across all blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ZERO_SLICE_TOL = 1e-12


@dataclass
class ActivationMap:
    data: np.ndarray  # (h, w, z_i)
    block_index: int  # 1-based position in the backbone

    def __post_init__(self):
        if self.data.ndim != 3:
            raise ValueError(f"activation map must be 3D, got {self.data.shape}")
        if any(d < 1 for d in self.data.shape):
            raise ValueError(f"all dims must be >= 1, got {self.data.shape}")

    @property
    def channels(self) -> int:
        return self.data.shape[2]


@dataclass
class AggregatedMap:
    data: np.ndarray  # (w*h, z)
    width: int
    height: int
    channel_offsets: list[int]


def normalize_channels(x: ActivationMap) -> ActivationMap:
    """Scale each 2D channel slice to unit Euclidean (Frobenius) norm.

    All-zero slices stay zero.
    """
    data = np.asarray(x.data, dtype=np.float64)
    norms = np.sqrt(np.sum(data * data, axis=(0, 1)))
    safe = np.where(norms < ZERO_SLICE_TOL, 1.0, norms)
    return ActivationMap(data=data / safe[np.newaxis, np.newaxis, :],
                         block_index=x.block_index)


def resize_bilinear(src: np.ndarray, target_w: int, target_h: int) -> np.ndarray:
    """Bilinear resize with half-pixel centers (no corner alignment).

    Works on a 2D map or an (h, w, z) stack, resizing each channel.
    Same-size targets return the input values exactly.
    """
    if target_w < 1 or target_h < 1:
        raise ValueError(f"target dims must be >= 1, got {target_w}x{target_h}")
    src = np.asarray(src, dtype=np.float64)
    h, w = src.shape[:2]
    if (h, w) == (target_h, target_w):
        return src.copy()

    def axis_coords(n_src: int, n_dst: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        # source coordinate of each output center, clamped to the grid
        pos = (np.arange(n_dst) + 0.5) * (n_src / n_dst) - 0.5
        pos = np.clip(pos, 0.0, n_src - 1.0)
        lo = np.floor(pos).astype(np.intp)
        hi = np.minimum(lo + 1, n_src - 1)
        return lo, hi, pos - lo

    y0, y1, fy = axis_coords(h, target_h)
    x0, x1, fx = axis_coords(w, target_w)
    fy = fy.reshape(-1, 1) if src.ndim == 2 else fy.reshape(-1, 1, 1)
    fx = fx.reshape(1, -1) if src.ndim == 2 else fx.reshape(1, -1, 1)
    top = src[y0][:, x0] * (1 - fx) + src[y0][:, x1] * fx
    bot = src[y1][:, x0] * (1 - fx) + src[y1][:, x1] * fx
    return top * (1 - fy) + bot * fy


def anchor_index(n: int) -> int:
    """1-based index of the anchor (middle) block: ceil(n/2)."""
    return (n + 1) // 2


def aggregate_maps(maps: list[ActivationMap]) -> AggregatedMap:
    """Normalize, resize to the anchor block's size, concatenate, flatten.

    Every map is channel-normalized, resized to the spatial size of block
    ceil(n/2), and the channels are concatenated; the result is reshaped
    so each pixel is a row.
    """
    if len(maps) < 2:
        raise ValueError(f"need at least 2 maps, got {len(maps)}")
    order = [m.block_index for m in maps]
    if order != sorted(order) or len(set(order)) != len(order):
        raise ValueError(f"maps must be sorted by unique block_index, got {order}")
    anchor = maps[anchor_index(len(maps)) - 1]
    h, w = anchor.data.shape[:2]
    pieces = []
    offsets = []
    z_total = 0
    for m in maps:
        norm = normalize_channels(m)
        resized = resize_bilinear(norm.data, target_w=w, target_h=h)
        pieces.append(resized)
        offsets.append(z_total)
        z_total += m.channels
    stacked = np.concatenate(pieces, axis=2)  # (h, w, z)
    return AggregatedMap(
        data=stacked.reshape(h * w, z_total),
        width=w,
        height=h,
        channel_offsets=offsets,
    )


def gap(x: ActivationMap) -> np.ndarray:
    """Per-channel spatial mean (global average pooling)."""
    return np.asarray(x.data, dtype=np.float64).mean(axis=(0, 1))


def gap_agg(maps: list[ActivationMap]) -> np.ndarray:
    """Concatenated GAP over all blocks; same length z as the aggregated map."""
    if len(maps) < 2:
        raise ValueError(f"need at least 2 maps, got {len(maps)}")
    return np.concatenate([gap(m) for m in maps])
