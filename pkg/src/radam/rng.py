"""Deterministic random encoder weights from a linear congruential generator.

All randomness in the encoding pipeline comes from one integer LCG stream
(x_{k+1} = (a*x_k + b) mod c, ZX81 constants by default), so features are
reproducible across runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# ZX81 configuration
DEFAULT_A = 75
DEFAULT_B = 74
DEFAULT_C = 2**16 + 1
DEFAULT_X0 = 0


class DegenerateInputError(ValueError):
    """Input has no usable variance or rank."""


@dataclass(frozen=True)
class LcgParams:
    a: int = DEFAULT_A
    b: int = DEFAULT_B
    c: int = DEFAULT_C
    x0: int = DEFAULT_X0

    def __post_init__(self):
        if self.c <= 1:
            raise ValueError(f"modulus must be > 1, got {self.c}")
        for name in ("a", "b", "x0"):
            v = getattr(self, name)
            if not (0 <= v < self.c):
                raise ValueError(f"{name}={v} out of range [0, {self.c})")


@dataclass(frozen=True)
class EncoderWeights:
    matrix: np.ndarray  # z x q, orthonormal columns
    seed_index: int


def lcg_sequence(params: LcgParams, count: int) -> np.ndarray:
    """First `count` successor states after x0 (x0 itself excluded)."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    out = np.empty(count, dtype=np.int64)
    x = params.x0
    for i in range(count):
        x = (params.a * x + params.b) % params.c
        out[i] = x
    return out


def standardize(v: np.ndarray) -> np.ndarray:
    """Shift/scale to zero mean and unit population standard deviation."""
    v = np.asarray(v, dtype=np.float64)
    if v.size < 2:
        raise ValueError("need at least 2 entries to standardize")
    sigma = v.std()
    if sigma < 1e-12:
        raise DegenerateInputError("constant vector has zero variance")
    return (v - v.mean()) / sigma


def orthogonalize(M: np.ndarray) -> np.ndarray:
    """Orthonormalize the columns of M, preserving their span.

    Uses a reduced QR factorization with the sign convention that the
    diagonal of R is nonnegative, which makes the result unique. For a
    single column this is plain unit-norm scaling.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise ValueError("expected a 2D matrix")
    z, q = M.shape
    if z < q:
        raise ValueError(f"need rows >= cols, got {M.shape}")
    Q, R = np.linalg.qr(M, mode="reduced")
    diag = np.diag(R)
    if np.any(np.abs(diag) < 1e-10 * max(1.0, np.abs(diag).max(initial=0.0))):
        raise DegenerateInputError("matrix is rank deficient")
    Q = Q * np.sign(diag)[np.newaxis, :]
    return Q


def encoder_weights(
    params: LcgParams, z: int, q: int = 1, m: int = 1
) -> list[EncoderWeights]:
    """Generate the m encoder weight matrices from one LCG stream.

    One sequence of m*z*q values is drawn; RAE k receives the k-th
    contiguous chunk of z*q values, reshaped column-major to z x q,
    standardized per column, then orthogonalized.  Because chunks are
    prefixes of the same stream, the weights of RAE k are unchanged
    when m grows.
    """
    if z < q:
        raise ValueError(f"need z >= q, got z={z}, q={q}")
    if m < 1 or q < 1:
        raise ValueError("m and q must be >= 1")
    stream = lcg_sequence(params, m * z * q).astype(np.float64)
    weights = []
    for k in range(m):
        chunk = stream[k * z * q : (k + 1) * z * q].reshape((z, q), order="F")
        cols = np.column_stack([standardize(chunk[:, j]) for j in range(q)])
        weights.append(EncoderWeights(matrix=orthogonalize(cols), seed_index=k))
    return weights
