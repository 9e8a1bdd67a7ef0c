"""Training-free texture descriptors: multi-depth activation aggregation,
sinusoidal positional encoding, and randomized-autoencoder feature soups,
with linear classifiers on top.
"""

from .aggregate import (
    ActivationMap,
    AggregatedMap,
    aggregate_maps,
    gap,
    gap_agg,
    normalize_channels,
    resize_bilinear,
)
from .classifier import (
    ClassifierModel,
    evaluate,
    lda_train,
    predict,
    svm_train,
)
from .posenc import PositionalEncoding, add_pe, positional_encoding
from .rae import (
    DecoderWeights,
    FeatureVector,
    fit_decoder,
    radam_feature,
    sigmoid_forward,
    soup,
)
from .rng import EncoderWeights, LcgParams, encoder_weights, lcg_sequence
from .tensorio import DatasetManifest, read_manifest, read_tensor, write_tensor

__version__ = "0.1.0"

__all__ = [
    "ActivationMap",
    "AggregatedMap",
    "ClassifierModel",
    "DatasetManifest",
    "DecoderWeights",
    "EncoderWeights",
    "FeatureVector",
    "LcgParams",
    "PositionalEncoding",
    "add_pe",
    "aggregate_maps",
    "encoder_weights",
    "evaluate",
    "fit_decoder",
    "gap",
    "gap_agg",
    "lcg_sequence",
    "lda_train",
    "normalize_channels",
    "positional_encoding",
    "predict",
    "radam_feature",
    "read_manifest",
    "read_tensor",
    "resize_bilinear",
    "sigmoid_forward",
    "soup",
    "svm_train",
    "write_tensor",
]
