"""Forward images through a backbone and dump tapped block outputs as
RADT files plus a JSON-lines manifest consumable by the encoding pipeline.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torchvision import transforms

from radam import tensorio

from .backbones import BackboneSpec

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)

_PREPROCESS = transforms.Compose(
    [
        transforms.Resize((224, 224)),  # forced resizing, no crop
        transforms.ToTensor(),
        transforms.Normalize(IMAGENET_MEAN, IMAGENET_STD),
    ]
)


class ChannelMismatchError(RuntimeError):
    """Tapped layer produced an unexpected channel count."""


def build_model(spec: BackboneSpec, weights_path: str | Path | None = None):
    """Instantiate the backbone in eval mode, optionally loading a local
    state-dict checkpoint (pretrained weights are not bundled).

    Without a checkpoint the random initialization is seeded, so repeated
    exports of the same images stay bitwise identical.
    """
    if weights_path is not None:
        model = spec.builder(weights=None)
        state = torch.load(weights_path, map_location="cpu", weights_only=True)
        model.load_state_dict(state)
    else:
        with torch.random.fork_rng():
            torch.manual_seed(0)
            model = spec.builder(weights=None)
    model.eval()
    return model


def _resolve_module(model, dotted: str):
    mod = model
    for part in dotted.split("."):
        mod = getattr(mod, part) if not part.isdigit() else mod[int(part)]
    return mod


def tap_activations(model, spec: BackboneSpec, batch: torch.Tensor) -> list[np.ndarray]:
    """Run one forward pass and return the tapped maps as (h, w, z) arrays."""
    captured: dict[str, torch.Tensor] = {}
    handles = []
    for name in spec.block_taps:
        module = _resolve_module(model, name)
        handles.append(
            module.register_forward_hook(
                lambda _m, _i, out, key=name: captured.__setitem__(key, out)
            )
        )
    try:
        with torch.no_grad():
            model(batch)
    finally:
        for h in handles:
            h.remove()
    maps = []
    for name, expected in zip(spec.block_taps, spec.expected_channels):
        out = captured[name][0]  # (z, h, w)
        if out.shape[0] != expected:
            raise ChannelMismatchError(
                f"{spec.name}:{name} produced {out.shape[0]} channels, "
                f"expected {expected}"
            )
        maps.append(out.permute(1, 2, 0).contiguous().numpy().astype(np.float32))
    return maps


def load_image(path: str | Path) -> torch.Tensor:
    with Image.open(path) as img:
        return _PREPROCESS(img.convert("RGB")).unsqueeze(0)


def export_activations(
    images: list[str | Path],
    spec: BackboneSpec,
    out_dir: str | Path,
    weights_path: str | Path | None = None,
    split: str = "train",
    labels: list[str] | None = None,
) -> Path:
    """Export block activations for each image; returns the manifest path.

    Labels default to each image's parent directory name (the usual
    class-per-folder dataset layout).
    """
    if not images:
        raise ValueError("no images to export")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if labels is None:
        labels = [Path(p).parent.name for p in images]
    model = build_model(spec, weights_path)
    manifest_path = out / "manifest.jsonl"
    with open(manifest_path, "w", encoding="utf-8") as fh:
        for idx, (img_path, label) in enumerate(zip(images, labels)):
            maps = tap_activations(model, spec, load_image(img_path))
            names = []
            for block_i, data in enumerate(maps, start=1):
                name = f"img{idx:05d}_block{block_i}.radt"
                tensorio.write_tensor(data, out / name)
                names.append(name)
            fh.write(
                json.dumps({"path": names, "label": label, "split": split}) + "\n"
            )
    return manifest_path
