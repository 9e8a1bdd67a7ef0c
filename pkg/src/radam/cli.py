"""Command-line surface: encode features, fit/evaluate classifiers,
generate the synthetic benchmark, and run self-checks.

Exit codes: 0 success, 1 validation error, 2 partial failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import classifier, synthetic, tensorio
from .aggregate import ActivationMap, gap, gap_agg
from .posenc import positional_encoding
from .rae import fit_decoder, radam_feature, sigmoid_forward
from .rng import LcgParams, encoder_weights, lcg_sequence

POOLINGS = ("radam", "gap", "gap_agg")
CLASSIFIERS = ("svm", "lda")


def _load_maps(paths: list[str]) -> list[ActivationMap]:
    return [
        ActivationMap(data=tensorio.read_tensor(p).astype(np.float64), block_index=i)
        for i, p in enumerate(paths, start=1)
    ]


def _encode_record(paths: list[str], pooling: str, m: int, lcg: LcgParams) -> np.ndarray:
    maps = _load_maps(paths)
    if pooling == "radam":
        return radam_feature(maps, m=m, lcg=lcg).phi
    if pooling == "gap":
        return gap(maps[-1])
    if pooling == "gap_agg":
        return gap_agg(maps)
    raise ValueError(f"unknown pooling {pooling!r}")


def _thread_count(requested: int | None) -> int:
    env = os.environ.get("RADAM_THREADS")
    if env:
        return max(1, int(env))
    if requested:
        return max(1, requested)
    return os.cpu_count() or 1


def cmd_encode(args) -> int:
    try:
        manifest = tensorio.read_manifest(args.manifest)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    lcg = LcgParams(a=args.lcg_a, b=args.lcg_b, c=args.lcg_c, x0=args.lcg_x0)

    def work(item):
        idx, rec = item
        try:
            phi = _encode_record(rec.paths, args.pooling, args.m, lcg)
            name = f"feature_{idx:05d}.radt"
            tensorio.write_tensor(phi, out / name)
            return idx, name, None
        except Exception as exc:  # per-record failure, keep going
            return idx, None, str(exc)

    with ThreadPoolExecutor(max_workers=_thread_count(args.threads)) as pool:
        results = list(pool.map(work, enumerate(manifest.records)))

    errors = [(idx, msg) for idx, _, msg in results if msg is not None]
    index = {
        "pooling": args.pooling,
        "m": args.m,
        "lcg": {"a": lcg.a, "b": lcg.b, "c": lcg.c, "x0": lcg.x0},
        "records": [
            {
                "index": idx,
                "feature": name,
                "label": manifest.records[idx].label,
                "split": manifest.records[idx].split,
                "fold": manifest.records[idx].fold,
            }
            for idx, name, msg in results
            if msg is None
        ],
    }
    with open(out / "index.json", "w", encoding="utf-8") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
    print(f"encoded {len(index['records'])}/{len(manifest.records)} records -> {out}")
    if errors:
        for idx, msg in errors:
            print(f"record {idx}: {msg}", file=sys.stderr)
        return 2
    return 0


def _load_store(store: str | Path, split: str | None = None):
    store = Path(store)
    with open(store / "index.json", "r", encoding="utf-8") as fh:
        index = json.load(fh)
    rows = [r for r in index["records"] if split is None or r["split"] == split]
    if not rows:
        raise ValueError(f"no records with split={split!r} in {store}")
    feats = np.vstack([tensorio.read_tensor(store / r["feature"]) for r in rows])
    labels = [r["label"] for r in rows]
    folds = [r["fold"] if r["fold"] is not None else 0 for r in rows]
    return index, feats.astype(np.float64), labels, folds


def cmd_fit(args) -> int:
    try:
        _, feats, labels, _ = _load_store(args.features, split="train")
        if args.classifier == "svm":
            model = classifier.svm_train(
                feats, labels, c=args.C, tol=args.tol,
                max_epochs=args.max_epochs, standardize=args.standardize,
            )
        else:
            model = classifier.lda_train(feats, labels)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    classifier.save_model(model, args.model)
    acc = float(np.mean([p == t for p, t in
                         zip(classifier.predict(model, feats), labels)]))
    report = {"classifier": args.classifier, "train_accuracy": acc,
              "n_train": len(labels), "classes": model.classes}
    with open(Path(args.model) / "train_report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    print(f"trained {args.classifier} on {len(labels)} samples, "
          f"train accuracy {acc:.4f}")
    return 0


def cmd_eval(args) -> int:
    try:
        model = classifier.load_model(args.model)
        index, feats, labels, folds = _load_store(args.features, split=args.split)
        report = classifier.evaluate(model, feats, labels, folds)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = {
        "pooling": index["pooling"],
        "classifier": model.kind,
        "folds": report["folds"],
        "mean": report["mean"],
        "std": report["std"],
    }
    for row in report["folds"]:
        print(f"fold {row['fold']}: accuracy {row['accuracy']:.4f}")
    print(f"mean {report['mean']:.4f} +/- {report['std']:.4f}")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
    return 0


def cmd_synth(args) -> int:
    manifest = synthetic.generate_dataset(
        args.output, n_per_class=args.per_class, seed=args.seed,
        train_fraction=args.train_fraction,
    )
    print(f"wrote synthetic benchmark manifest: {manifest}")
    return 0


def _selftest_checks(lcg_a: int):
    lcg = LcgParams(a=lcg_a)
    seq = lcg_sequence(lcg, 3).tolist()
    yield "lcg first states == [74, 5624, 28652]", seq == [74, 5624, 28652], seq

    ws = encoder_weights(LcgParams(), z=64, q=1, m=4)
    dev = max(abs(float(w.matrix[:, 0] @ w.matrix[:, 0]) - 1.0) for w in ws)
    yield "encoder columns unit norm (dev <= 1e-6)", dev <= 1e-6, dev

    rng = np.random.default_rng(7)
    x = rng.standard_normal((128, 16))
    g = sigmoid_forward(x, ws[0].matrix[:16, :])
    f = fit_decoder(x, g).nu
    res = float(np.linalg.norm(x.T @ g[:, 0] - (g[:, 0] @ g[:, 0]) * f))
    rel = res / max(float(np.linalg.norm(x.T @ g[:, 0])), 1e-300)
    yield "decoder normal-equation residual <= 1e-6", rel <= 1e-6, rel

    pe = positional_encoding(8, 8, 32).table
    ok = float(np.abs(pe).max()) <= 1.0 + 1e-12
    yield "positional encoding bounded by 1", ok, float(np.abs(pe).max())

    with tempfile.TemporaryDirectory() as tmp:
        t = rng.standard_normal((3, 4, 5)).astype(np.float32)
        p = Path(tmp) / "t.radt"
        tensorio.write_tensor(t, p)
        ok = np.array_equal(tensorio.read_tensor(p), t)
    yield "tensor container round trip bit-exact", ok, ok


def cmd_selftest(args) -> int:
    failures = 0
    for name, ok, value in _selftest_checks(args.lcg_a):
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name} (observed: {value})")
        failures += 0 if ok else 1
    if failures:
        print(f"{failures} check(s) failed", file=sys.stderr)
        return 1
    print("all checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radam",
        description="Training-free texture features from multi-depth "
                    "activation maps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="encode a manifest into a feature store")
    enc.add_argument("--manifest", required=True)
    enc.add_argument("--output", required=True)
    enc.add_argument("--pooling", choices=POOLINGS, default="radam")
    enc.add_argument("--m", type=int, default=4)
    enc.add_argument("--lcg-a", type=int, default=75)
    enc.add_argument("--lcg-b", type=int, default=74)
    enc.add_argument("--lcg-c", type=int, default=2**16 + 1)
    enc.add_argument("--lcg-x0", type=int, default=0)
    enc.add_argument("--threads", type=int, default=None)
    enc.set_defaults(func=cmd_encode)

    fit = sub.add_parser("fit", help="train a classifier on split=train")
    fit.add_argument("--features", required=True, help="feature store directory")
    fit.add_argument("--model", required=True, help="output model directory")
    fit.add_argument("--classifier", choices=CLASSIFIERS, default="svm")
    fit.add_argument("--C", type=float, default=1.0)
    fit.add_argument("--tol", type=float, default=classifier.SVM_TOL)
    fit.add_argument("--max-epochs", type=int, default=classifier.SVM_MAX_EPOCHS)
    fit.add_argument("--standardize", action="store_true")
    fit.set_defaults(func=cmd_fit)

    ev = sub.add_parser("eval", help="evaluate a trained model")
    ev.add_argument("--features", required=True)
    ev.add_argument("--model", required=True)
    ev.add_argument("--split", default="test")
    ev.add_argument("--report", default=None, help="write JSON report here")
    ev.set_defaults(func=cmd_eval)

    syn = sub.add_parser("synth", help="generate the synthetic texture benchmark")
    syn.add_argument("--output", required=True)
    syn.add_argument("--per-class", type=int, default=40)
    syn.add_argument("--seed", type=int, default=0)
    syn.add_argument("--train-fraction", type=float, default=0.5)
    syn.set_defaults(func=cmd_synth)

    st = sub.add_parser("selftest", help="run built-in invariant checks")
    st.add_argument("--lcg-a", type=int, default=75, help=argparse.SUPPRESS)
    st.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
