"""Backbone activation exporter feeding the RADT-based encoding pipeline."""

from .backbones import BackboneSpec, get_backbone, list_backbones
from .export import ChannelMismatchError, export_activations, tap_activations

__all__ = [
    "BackboneSpec",
    "ChannelMismatchError",
    "export_activations",
    "get_backbone",
    "list_backbones",
    "tap_activations",
]
