"""Synthetic texture benchmark: five texture classes plus fabricated
backbone blocks, so the whole pipeline can be exercised end to end
without any pre-trained network.

Blocks are built from a fixed bank of Gaussian-derivative filters,
rectified, and subsampled at strides (4, 8, 16, 32) with channel counts
(8, 16, 32, 64), mimicking the shape of a 4-block convolutional backbone
on a 224x224 input.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from . import tensorio
from .aggregate import ActivationMap

CLASSES = ("grating_low", "grating_high", "checkerboard", "white_noise", "lowpass_noise")
BLOCK_STRIDES = (4, 8, 16, 32)
BLOCK_CHANNELS = (8, 16, 32, 64)

_ORDERS = [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (2, 0), (2, 1), (1, 2)]
_BLOCK_SIGMAS = (
    (1.0,),
    (1.0, 2.0),
    (1.0, 2.0, 3.0, 4.0),
    (1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 12.0),
)


def make_image(cls: str, rng: np.random.Generator, size: int = 224) -> np.ndarray:
    """One sample of the given texture class, values roughly in [-1, 1]."""
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    if cls in ("grating_low", "grating_high"):
        freq = 0.05 if cls == "grating_low" else 0.15
        theta = rng.uniform(0, np.pi)
        phase = rng.uniform(0, 2 * np.pi)
        img = np.sin(2 * np.pi * freq * (xs * np.cos(theta) + ys * np.sin(theta)) + phase)
    elif cls == "checkerboard":
        cell = rng.integers(8, 17)
        ox, oy = rng.integers(0, cell, size=2)
        img = ((((xs + ox) // cell) + ((ys + oy) // cell)) % 2) * 2.0 - 1.0
    elif cls == "white_noise":
        img = rng.standard_normal((size, size))
    elif cls == "lowpass_noise":
        # filtered shot noise: sparse impulses smoothed into blobs
        impulses = (rng.random((size, size)) < 0.005) * rng.standard_normal((size, size))
        img = gaussian_filter(impulses, sigma=4.0)
        img /= max(img.std(), 1e-12)
    else:
        raise ValueError(f"unknown class {cls!r}")
    return img + 0.01 * rng.standard_normal((size, size))


def make_blocks(img: np.ndarray) -> list[ActivationMap]:
    """Fabricate 4 activation blocks from a fixed Gaussian-derivative bank."""
    maps = []
    for i, (stride, n_ch, sigmas) in enumerate(
        zip(BLOCK_STRIDES, BLOCK_CHANNELS, _BLOCK_SIGMAS), start=1
    ):
        channels = []
        for sigma in sigmas:
            for order in _ORDERS:
                resp = np.abs(gaussian_filter(img, sigma=sigma, order=order))
                channels.append(resp[stride // 2 :: stride, stride // 2 :: stride])
        data = np.stack(channels, axis=2)
        assert data.shape[2] == n_ch
        maps.append(ActivationMap(data=data.astype(np.float32), block_index=i))
    return maps


def generate_dataset(
    out_dir: str | Path,
    n_per_class: int = 40,
    size: int = 224,
    seed: int = 0,
    train_fraction: float = 0.5,
    classes: tuple[str, ...] = CLASSES,
) -> Path:
    """Write block RADT files and a manifest; returns the manifest path.

    Within each class, samples alternate between train and test so the
    split is balanced at any n_per_class.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    manifest_path = out / "manifest.jsonl"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        for cls in classes:
            n_train = int(round(n_per_class * train_fraction))
            for j in range(n_per_class):
                img = make_image(cls, rng, size=size)
                paths = []
                for blk in make_blocks(img):
                    name = f"{cls}_{j:03d}_block{blk.block_index}.radt"
                    tensorio.write_tensor(blk.data, out / name)
                    paths.append(name)
                record = {
                    "path": paths,
                    "label": cls,
                    "split": "train" if j < n_train else "test",
                }
                fh.write(json.dumps(record) + "\n")
    return manifest_path
