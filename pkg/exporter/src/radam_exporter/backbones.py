"""Backbone registry: which layers to tap and the channel counts to expect.

Tap points are the outputs of the architecture's main stages.  A
channel-count guard at export time catches wrong tap points immediately.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import torchvision.models as tvm


@dataclass(frozen=True)
class BackboneSpec:
    name: str
    builder: object = field(repr=False)
    block_taps: tuple[str, ...]
    expected_channels: tuple[int, ...]
    pretraining_tag: str = "ImageNet-1K"

    def __post_init__(self):
        if len(self.block_taps) != len(self.expected_channels):
            raise ValueError("taps and channel lists must have equal length")
        if len(self.block_taps) not in (4, 5):
            raise ValueError("backbones must expose 4 or 5 blocks")


def _resnet_taps():
    return ("maxpool", "layer1", "layer2", "layer3", "layer4")


def _convnext_taps():
    # features[1], [3], [5], [7] are the four stage outputs
    return ("features.1", "features.3", "features.5", "features.7")


_SPECS = (
    BackboneSpec(
        name="resnet18",
        builder=tvm.resnet18,
        block_taps=_resnet_taps(),
        expected_channels=(64, 64, 128, 256, 512),
    ),
    BackboneSpec(
        name="resnet50",
        builder=tvm.resnet50,
        block_taps=_resnet_taps(),
        expected_channels=(64, 256, 512, 1024, 2048),
    ),
    BackboneSpec(
        name="convnext_tiny",
        builder=tvm.convnext_tiny,
        block_taps=_convnext_taps(),
        expected_channels=(96, 192, 384, 768),
    ),
    BackboneSpec(
        name="convnext_base",
        builder=tvm.convnext_base,
        block_taps=_convnext_taps(),
        expected_channels=(128, 256, 512, 1024),
    ),
    BackboneSpec(
        name="convnext_large",
        builder=tvm.convnext_large,
        block_taps=_convnext_taps(),
        expected_channels=(192, 384, 768, 1536),
    ),
    BackboneSpec(
        name="mobilenet_v2",
        builder=tvm.mobilenet_v2,
        # inverted-residual stage boundaries matching the channel list
        block_taps=("features.1", "features.3", "features.6",
                    "features.13", "features.17"),
        expected_channels=(16, 24, 32, 96, 320),
    ),
)


def list_backbones() -> list[BackboneSpec]:
    """All supported backbones with their tap points and channel counts."""
    return list(_SPECS)


def get_backbone(name: str) -> BackboneSpec:
    for spec in _SPECS:
        if spec.name == name:
            return spec
    known = ", ".join(s.name for s in _SPECS)
    raise KeyError(f"unknown backbone {name!r}; available: {known}")
