"""Randomized autoencoder core and the end-to-end per-image descriptor.

Each RAE projects the pixel matrix through a frozen random column,
applies a sigmoid, and solves the decoder in closed form; the decoder
weights ARE the features.  m RAEs are combined by plain summation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .aggregate import ActivationMap, AggregatedMap, aggregate_maps
from .posenc import add_pe, positional_encoding
from .rng import DegenerateInputError, EncoderWeights, LcgParams, encoder_weights

SINGULAR_TOL = 1e-10


@dataclass
class DecoderWeights:
    nu: np.ndarray  # (z,) for q=1, else (z, q)
    seed_index: int = 0


@dataclass
class FeatureVector:
    phi: np.ndarray  # (z,)
    m: int
    provenance: dict = field(default_factory=dict)


def sigmoid_forward(x: np.ndarray, w: EncoderWeights | np.ndarray) -> np.ndarray:
    """Encoder forward pass: elementwise sigmoid of x @ w."""
    mat = w.matrix if isinstance(w, EncoderWeights) else np.asarray(w)
    if mat.ndim == 1:
        mat = mat[:, np.newaxis]
    if x.shape[1] != mat.shape[0]:
        raise ValueError(f"shape mismatch: {x.shape} @ {mat.shape}")
    return expit(x @ mat)


def fit_decoder(
    x: np.ndarray, g: np.ndarray, ridge: float = 0.0, seed_index: int = 0
) -> DecoderWeights:
    """Closed-form least-squares decoder: minimize ||x - g f^T||_F over f.

    Solved through the normal equations f = x^T g (g^T g)^-1; for q=1
    this is a single division.  `ridge` adds an optional Tikhonov term
    (off by default).
    """
    x = np.asarray(x, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    if g.ndim == 1:
        g = g[:, np.newaxis]
    if x.shape[0] != g.shape[0]:
        raise ValueError(f"row mismatch: x {x.shape} vs g {g.shape}")
    q = g.shape[1]
    gram = g.T @ g  # (q, q)
    xtg = x.T @ g  # (z, q)
    if q == 1:
        denom = gram[0, 0] + ridge
        if denom < 1e-12:
            raise DegenerateInputError("encoder output has vanishing norm")
        return DecoderWeights(nu=xtg[:, 0] / denom, seed_index=seed_index)
    if ridge > 0.0:
        gram = gram + ridge * np.eye(q)
    # rank-revealing solve: drop singular values below tol * sigma_max
    u, s, vt = np.linalg.svd(gram)
    if s[0] < 1e-12:
        raise DegenerateInputError("encoder output has vanishing norm")
    inv = np.where(s > SINGULAR_TOL * s[0], 1.0 / np.where(s > 0, s, 1.0), 0.0)
    f = xtg @ (vt.T * inv) @ u.T
    return DecoderWeights(nu=f, seed_index=seed_index)


def soup(decoders: list[DecoderWeights]) -> FeatureVector:
    """Elementwise sum of decoder weights (no averaging)."""
    if not decoders:
        raise ValueError("need at least one decoder")
    shape = decoders[0].nu.shape
    for d in decoders[1:]:
        if d.nu.shape != shape:
            raise ValueError(f"decoder shape mismatch: {d.nu.shape} vs {shape}")
    total = np.zeros(shape, dtype=np.float64)
    for d in decoders:
        total += d.nu
    return FeatureVector(phi=total.reshape(-1), m=len(decoders))


def encode_aggregated(
    xprime: AggregatedMap, m: int, lcg: LcgParams, q: int = 1
) -> FeatureVector:
    """Run m RAEs on a PE-augmented aggregated map and sum the decoders."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    z = xprime.data.shape[1]
    pe = positional_encoding(xprime.width, xprime.height, z)
    data = add_pe(xprime, pe).data
    decoders = []
    for k, w in enumerate(encoder_weights(lcg, z=z, q=q, m=m)):
        g = sigmoid_forward(data, w)
        decoders.append(fit_decoder(data, g, seed_index=k))
    return soup(decoders)


def radam_feature(
    maps: list[ActivationMap], m: int = 4, lcg: LcgParams | None = None, q: int = 1
) -> FeatureVector:
    """Full per-image descriptor: aggregate, add PE, encode with m RAEs."""
    if lcg is None:
        lcg = LcgParams()
    feature = encode_aggregated(aggregate_maps(maps), m=m, lcg=lcg, q=q)
    feature.provenance = {"blocks": [mp.channels for mp in maps], "m": m}
    return feature
