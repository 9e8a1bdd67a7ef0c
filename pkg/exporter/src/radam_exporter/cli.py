"""CLI: dump backbone block activations for an image folder."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .backbones import get_backbone, list_backbones
from .export import export_activations

IMAGE_SUFFIXES = {".jpg", ".jpeg", ".png", ".bmp", ".tif", ".tiff", ".webp"}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="radam-export",
        description="Export per-block backbone activations as RADT files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    exp = sub.add_parser("export", help="forward a folder of images")
    exp.add_argument("--backbone", required=True)
    exp.add_argument("--images", required=True, help="folder; class per subdir")
    exp.add_argument("--out", required=True)
    exp.add_argument("--weights", default=None,
                     help="local state-dict checkpoint (optional)")
    exp.add_argument("--split", default="train")

    sub.add_parser("list", help="show supported backbones")

    args = parser.parse_args(argv)
    if args.command == "list":
        for spec in list_backbones():
            print(f"{spec.name}: blocks={len(spec.block_taps)} "
                  f"channels={spec.expected_channels} ({spec.pretraining_tag})")
        return 0

    try:
        spec = get_backbone(args.backbone)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    images = sorted(
        p for p in Path(args.images).rglob("*")
        if p.suffix.lower() in IMAGE_SUFFIXES
    )
    if not images:
        print(f"error: no images under {args.images}", file=sys.stderr)
        return 1
    manifest = export_activations(
        images, spec, args.out, weights_path=args.weights, split=args.split
    )
    print(f"exported {len(images)} images -> {manifest}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
