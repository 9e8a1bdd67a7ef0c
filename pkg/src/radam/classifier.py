"""Linear classifiers for the descriptors: one-vs-rest SVM and shrinkage LDA.

The SVM is an L2-regularized hinge-loss linear machine solved by dual
coordinate descent with a fixed cyclic coordinate order, so training is
deterministic.  LDA pools the within-class covariance and shrinks it
toward a scaled identity with the Ledoit-Wolf optimal intensity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import tensorio

SVM_TOL = 1e-4
SVM_MAX_EPOCHS = 1000


@dataclass
class ClassifierModel:
    kind: str  # "svm" | "lda"
    classes: list[str]
    weights: np.ndarray  # (n_classes, z)
    biases: np.ndarray  # (n_classes,)
    scaler_mean: np.ndarray | None = None
    scaler_scale: np.ndarray | None = None


def _validate_features(features: np.ndarray) -> np.ndarray:
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2:
        raise ValueError(f"features must be 2D, got {features.shape}")
    if not np.all(np.isfinite(features)):
        raise ValueError("features contain non-finite values")
    return features


def _fit_scaler(features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = features.mean(axis=0)
    scale = features.std(axis=0)
    scale[scale < 1e-12] = 1.0
    return mean, scale


def _svm_binary_loop(x, y, c, tol, max_epochs, alpha, w):
    n = x.shape[0]
    q_diag = np.sum(x * x, axis=1)
    for _ in range(max_epochs):
        max_violation = 0.0
        for i in range(n):
            g = y[i] * (w @ x[i]) - 1.0
            if alpha[i] <= 0.0:
                pg = min(g, 0.0)
            elif alpha[i] >= c:
                pg = max(g, 0.0)
            else:
                pg = g
            max_violation = max(max_violation, abs(pg))
            if abs(pg) > 1e-14 and q_diag[i] > 0.0:
                new = min(max(alpha[i] - g / q_diag[i], 0.0), c)
                if new != alpha[i]:
                    w += (new - alpha[i]) * y[i] * x[i]
                    alpha[i] = new
        if max_violation <= tol:
            break


try:  # the jitted loop is ~100x faster; plain python is the fallback
    from numba import njit

    _svm_binary_loop = njit(cache=True)(_svm_binary_loop)
except ImportError:  # pragma: no cover
    pass


def _svm_binary(
    x: np.ndarray, y: np.ndarray, c: float, tol: float, max_epochs: int
) -> tuple[np.ndarray, np.ndarray]:
    """Dual coordinate descent for min_w 0.5 w'w + c * sum hinge(y_i w'x_i).

    x already carries the augmented bias column.  Coordinates are visited
    in a fixed cyclic order; converged when the largest projected-gradient
    violation in an epoch drops below tol.  Returns (w, alpha).
    """
    alpha = np.zeros(x.shape[0])
    w = np.zeros(x.shape[1])
    _svm_binary_loop(
        np.ascontiguousarray(x), np.ascontiguousarray(y),
        float(c), float(tol), int(max_epochs), alpha, w,
    )
    return w, alpha


def svm_train(
    features: np.ndarray,
    labels: list[str],
    c: float = 1.0,
    tol: float = SVM_TOL,
    max_epochs: int = SVM_MAX_EPOCHS,
    standardize: bool = False,
) -> ClassifierModel:
    """One-vs-rest linear SVM with hinge loss and regularization weight c."""
    features = _validate_features(features)
    labels = [str(l) for l in labels]
    if len(labels) != features.shape[0] or features.shape[0] < 2:
        raise ValueError("need >= 2 samples with matching labels")
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise ValueError("need at least 2 distinct classes")
    scaler_mean = scaler_scale = None
    if standardize:
        scaler_mean, scaler_scale = _fit_scaler(features)
        features = (features - scaler_mean) / scaler_scale
    aug = np.hstack([features, np.ones((features.shape[0], 1))])
    y_idx = np.array([classes.index(l) for l in labels])
    n_feat = features.shape[1]
    weights = np.zeros((len(classes), n_feat))
    biases = np.zeros(len(classes))
    for k in range(len(classes)):
        y = np.where(y_idx == k, 1.0, -1.0)
        w, _ = _svm_binary(aug, y, c, tol, max_epochs)
        weights[k] = w[:-1]
        biases[k] = w[-1]
    return ClassifierModel(
        kind="svm",
        classes=classes,
        weights=weights,
        biases=biases,
        scaler_mean=scaler_mean,
        scaler_scale=scaler_scale,
    )


def ledoit_wolf_shrinkage(x_centered: np.ndarray) -> float:
    """Optimal shrinkage intensity toward mu*I for centered data."""
    n, p = x_centered.shape
    x2 = x_centered**2
    emp_trace = x2.sum(axis=0) / n  # per-feature variance
    mu = emp_trace.sum() / p
    delta_ = float(np.sum((x_centered.T @ x_centered) ** 2)) / n**2
    beta_ = float(np.sum(x2.T @ x2))
    beta = (beta_ / n - delta_) / (p * n)
    delta = (delta_ - 2.0 * mu * emp_trace.sum() + p * mu**2) / p
    if delta <= 0:
        return 0.0
    return float(min(max(beta, 0.0) / delta, 1.0))


def lda_train(features: np.ndarray, labels: list[str]) -> ClassifierModel:
    """Linear discriminant with Ledoit-Wolf shrunk pooled covariance."""
    features = _validate_features(features)
    labels = [str(l) for l in labels]
    classes = sorted(set(labels))
    n, p = features.shape
    if n <= len(classes):
        raise ValueError(f"need more samples ({n}) than classes ({len(classes)})")
    y_idx = np.array([classes.index(l) for l in labels])
    means = np.vstack([features[y_idx == k].mean(axis=0) for k in range(len(classes))])
    priors = np.array([(y_idx == k).mean() for k in range(len(classes))])
    centered = features - means[y_idx]
    shrink = ledoit_wolf_shrinkage(centered)
    cov = centered.T @ centered / n
    mu = np.trace(cov) / p
    cov = (1.0 - shrink) * cov + shrink * mu * np.eye(p)
    coef = np.linalg.solve(cov, means.T).T  # (K, p)
    biases = -0.5 * np.einsum("kp,kp->k", coef, means) + np.log(priors)
    return ClassifierModel(kind="lda", classes=classes, weights=coef, biases=biases)


def decision_values(model: ClassifierModel, features: np.ndarray) -> np.ndarray:
    features = _validate_features(features)
    if features.shape[1] != model.weights.shape[1]:
        raise ValueError(
            f"feature width {features.shape[1]} != trained width "
            f"{model.weights.shape[1]}"
        )
    if model.scaler_mean is not None:
        features = (features - model.scaler_mean) / model.scaler_scale
    return features @ model.weights.T + model.biases


def predict(model: ClassifierModel, features: np.ndarray) -> list[str]:
    """Argmax over per-class decision values; ties go to the earlier class."""
    scores = decision_values(model, features)
    return [model.classes[i] for i in np.argmax(scores, axis=1)]


def evaluate(
    model: ClassifierModel,
    features: np.ndarray,
    labels: list[str],
    folds: list[int] | None = None,
) -> dict:
    """Per-fold accuracy plus mean and population standard deviation."""
    labels = [str(l) for l in labels]
    if len(labels) == 0:
        raise ValueError("empty evaluation split")
    predicted = predict(model, features)
    if folds is None:
        folds = [0] * len(labels)
    if len(folds) != len(labels):
        raise ValueError("fold list length mismatch")
    fold_ids = sorted(set(folds))
    per_fold = []
    folds_arr = np.array(folds)
    hits = np.array([p == t for p, t in zip(predicted, labels)])
    for f in fold_ids:
        mask = folds_arr == f
        if not mask.any():
            raise ValueError(f"fold {f} is empty")
        per_fold.append({"fold": int(f), "accuracy": float(hits[mask].mean())})
    accs = np.array([row["accuracy"] for row in per_fold])
    return {
        "folds": per_fold,
        "mean": float(accs.mean()),
        "std": float(accs.std()),
    }


def save_model(model: ClassifierModel, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tensorio.write_tensor(model.weights, out / "weights.radt")
    tensorio.write_tensor(model.biases, out / "biases.radt")
    meta = {"kind": model.kind, "classes": model.classes,
            "scaled": model.scaler_mean is not None}
    if model.scaler_mean is not None:
        tensorio.write_tensor(model.scaler_mean, out / "scaler_mean.radt")
        tensorio.write_tensor(model.scaler_scale, out / "scaler_scale.radt")
    with open(out / "model.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)


def load_model(model_dir: str | Path) -> ClassifierModel:
    d = Path(model_dir)
    with open(d / "model.json", "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    mean = scale = None
    if meta.get("scaled"):
        mean = tensorio.read_tensor(d / "scaler_mean.radt").astype(np.float64)
        scale = tensorio.read_tensor(d / "scaler_scale.radt").astype(np.float64)
    return ClassifierModel(
        kind=meta["kind"],
        classes=list(meta["classes"]),
        weights=tensorio.read_tensor(d / "weights.radt").astype(np.float64),
        biases=tensorio.read_tensor(d / "biases.radt").astype(np.float64),
        scaler_mean=mean,
        scaler_scale=scale,
    )
