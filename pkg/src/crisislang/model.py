"""Classifiers over sparse count vectors.

Multinomial Naive Bayes with Laplace smoothing is the primary model.
Logistic regression (batch gradient descent, L2 on the weights) exists for
feature-importance ranking, and the select-all baseline labels everything IR.
All models serialize to a versioned JSON document.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from crisislang.features import (
    FeatureClass,
    FeatureId,
    FeatureVector,
    feature_sort_key,
    feature_to_str,
    str_to_feature,
)

IR = "IR"
OR = "OR"
LABELS = (IR, OR)

MODEL_SCHEMA_VERSION = 1

LabeledVector = tuple[FeatureVector, str]


class TrainingDiverged(RuntimeError):
    """Logistic-regression loss became non-finite (learning rate too high)."""

    def __init__(self, epoch: int):
        self.epoch = epoch
        super().__init__(f"non-finite loss at epoch {epoch}; lower the learning rate")


@dataclass(frozen=True)
class Prediction:
    label: str
    score: float


@dataclass
class NaiveBayesModel:
    class_log_prior: dict[str, float]
    feature_log_likelihood: dict[str, dict[FeatureId, float]]
    vocabulary: frozenset[FeatureId]
    alpha: float


@dataclass(frozen=True)
class LogRegParams:
    learning_rate: float = 0.1
    l2: float = 1e-4
    max_epochs: int = 500
    tolerance: float = 1e-6


@dataclass
class LogisticRegressionModel:
    weights: dict[FeatureId, float]
    bias: float
    params: LogRegParams


def _check_labels(data: Sequence[LabeledVector]) -> None:
    if not data:
        raise ValueError("training data is empty")
    seen = {label for _, label in data}
    bad = seen - set(LABELS)
    if bad:
        raise ValueError(f"labels must be IR or OR, got {sorted(bad)}")
    if seen != set(LABELS):
        raise ValueError(f"both labels required, got only {sorted(seen)}")


def train_naive_bayes(data: Sequence[LabeledVector], alpha: float = 1.0) -> NaiveBayesModel:
    """Fit multinomial NB: likelihood(f|c) = (n_fc + alpha) / (n_c + alpha |V|)."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    _check_labels(data)

    class_counts = {label: 0 for label in LABELS}
    feature_counts: dict[str, dict[FeatureId, int]] = {label: {} for label in LABELS}
    totals = {label: 0 for label in LABELS}
    vocabulary: set[FeatureId] = set()
    for vector, label in data:
        class_counts[label] += 1
        bucket = feature_counts[label]
        for fid, count in vector.items():
            vocabulary.add(fid)
            bucket[fid] = bucket.get(fid, 0) + count
            totals[label] += count

    n = len(data)
    class_log_prior = {label: math.log(class_counts[label] / n) for label in LABELS}
    v = len(vocabulary)
    loglik: dict[str, dict[FeatureId, float]] = {}
    for label in LABELS:
        denom = totals[label] + alpha * v
        loglik[label] = {
            fid: math.log((feature_counts[label].get(fid, 0) + alpha) / denom)
            for fid in vocabulary
        }

    model = NaiveBayesModel(
        class_log_prior=class_log_prior,
        feature_log_likelihood=loglik,
        vocabulary=frozenset(vocabulary),
        alpha=alpha,
    )
    _assert_nb_normalized(model)
    return model


def _assert_nb_normalized(model: NaiveBayesModel) -> None:
    prior_mass = sum(math.exp(p) for p in model.class_log_prior.values())
    if abs(prior_mass - 1.0) > 1e-9:
        raise AssertionError(f"class priors sum to {prior_mass}, not 1")
    if not model.vocabulary:
        return
    for label in LABELS:
        mass = sum(math.exp(ll) for ll in model.feature_log_likelihood[label].values())
        if abs(mass - 1.0) > 1e-9:
            raise AssertionError(f"{label} likelihoods sum to {mass}, not 1")


def predict_nb(model: NaiveBayesModel, vector: FeatureVector) -> Prediction:
    """Log-posterior margin for IR vs OR; unseen features are ignored.

    Score 0 ties break toward IR (recall favors the in-region class).
    """
    score = model.class_log_prior[IR] - model.class_log_prior[OR]
    ll_ir = model.feature_log_likelihood[IR]
    ll_or = model.feature_log_likelihood[OR]
    for fid, count in vector.items():
        if fid in model.vocabulary:
            score += count * (ll_ir[fid] - ll_or[fid])
    return Prediction(label=IR if score >= 0.0 else OR, score=score)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss_and_gradient(
    x: np.ndarray, y: np.ndarray, weights: np.ndarray, bias: float, l2: float
) -> tuple[float, np.ndarray, float]:
    """Mean negative log-likelihood plus (l2/2)||w||^2; bias unregularized."""
    with np.errstate(over="ignore"):  # inf loss is caught by the trainer
        z = x @ weights + bias
        loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * float(weights @ weights))
        residual = _sigmoid(z) - y
        grad_w = x.T @ residual / len(y) + l2 * weights
        grad_b = float(np.mean(residual))
    return loss, grad_w, grad_b


def design_matrix(
    data: Sequence[LabeledVector],
) -> tuple[np.ndarray, np.ndarray, list[FeatureId]]:
    """Dense design matrix with a deterministic feature ordering."""
    vocab = sorted({fid for vector, _ in data for fid in vector}, key=feature_sort_key)
    index = {fid: i for i, fid in enumerate(vocab)}
    x = np.zeros((len(data), len(vocab)))
    y = np.zeros(len(data))
    for row, (vector, label) in enumerate(data):
        y[row] = 1.0 if label == IR else 0.0
        for fid, count in vector.items():
            x[row, index[fid]] = float(count)
    return x, y, vocab


def train_logreg(
    data: Sequence[LabeledVector], params: LogRegParams = LogRegParams()
) -> LogisticRegressionModel:
    """Batch gradient descent from zero init until the update stalls."""
    _check_labels(data)
    x, y, vocab = design_matrix(data)
    weights = np.zeros(len(vocab))
    bias = 0.0
    for epoch in range(params.max_epochs):
        loss, grad_w, grad_b = logistic_loss_and_gradient(x, y, weights, bias, params.l2)
        if not math.isfinite(loss):
            raise TrainingDiverged(epoch)
        step_w = params.learning_rate * grad_w
        step_b = params.learning_rate * grad_b
        weights -= step_w
        bias -= step_b
        largest = max(float(np.max(np.abs(step_w))) if len(vocab) else 0.0, abs(step_b))
        if largest < params.tolerance:
            break
    if not (np.all(np.isfinite(weights)) and math.isfinite(bias)):
        raise TrainingDiverged(params.max_epochs)
    return LogisticRegressionModel(
        weights={fid: float(w) for fid, w in zip(vocab, weights)},
        bias=float(bias),
        params=params,
    )


def predict_lr(model: LogisticRegressionModel, vector: FeatureVector) -> Prediction:
    """Sigmoid probability of IR; label IR at probability >= 0.5."""
    z = model.bias
    for fid, count in vector.items():
        z += count * model.weights.get(fid, 0.0)
    prob = 1.0 / (1.0 + math.exp(-z)) if z >= 0 else math.exp(z) / (1.0 + math.exp(z))
    return Prediction(label=IR if prob >= 0.5 else OR, score=prob)


def top_features(
    model: LogisticRegressionModel, k: int, feature_class: FeatureClass
) -> list[tuple[FeatureId, float]]:
    """Most IR-indicative features of one class: weight descending, key ties."""
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    items = [(fid, w) for fid, w in model.weights.items() if fid.cls is feature_class]
    items.sort(key=lambda kv: (-kv[1], kv[0].key))
    return items[:k]


def select_all_baseline(vector: FeatureVector) -> Prediction:
    """Label every instance IR, the degenerate recall-1.0 baseline."""
    return Prediction(label=IR, score=math.inf)


def model_to_dict(
    model: NaiveBayesModel | LogisticRegressionModel,
    feature_classes: Sequence[FeatureClass] | None = None,
) -> dict:
    doc: dict = {"version": MODEL_SCHEMA_VERSION}
    if feature_classes is not None:
        doc["feature_classes"] = [c.value for c in feature_classes]
    if isinstance(model, NaiveBayesModel):
        doc["kind"] = "nb"
        doc["alpha"] = model.alpha
        doc["class_log_prior"] = dict(model.class_log_prior)
        doc["feature_log_likelihood"] = {
            label: {
                feature_to_str(fid): ll
                for fid, ll in sorted(table.items(), key=lambda kv: feature_sort_key(kv[0]))
            }
            for label, table in model.feature_log_likelihood.items()
        }
    else:
        doc["kind"] = "logreg"
        doc["bias"] = model.bias
        doc["weights"] = {
            feature_to_str(fid): w
            for fid, w in sorted(model.weights.items(), key=lambda kv: feature_sort_key(kv[0]))
        }
        doc["hyperparameters"] = {
            "learning_rate": model.params.learning_rate,
            "l2": model.params.l2,
            "max_epochs": model.params.max_epochs,
            "tolerance": model.params.tolerance,
        }
    return doc


def model_from_dict(doc: dict) -> tuple[NaiveBayesModel | LogisticRegressionModel, list[FeatureClass] | None]:
    if doc.get("version") != MODEL_SCHEMA_VERSION:
        raise ValueError(f"unsupported model version: {doc.get('version')}")
    raw_classes = doc.get("feature_classes")
    classes = [FeatureClass(c) for c in raw_classes] if raw_classes is not None else None
    if doc["kind"] == "nb":
        loglik = {
            label: {str_to_feature(key): ll for key, ll in table.items()}
            for label, table in doc["feature_log_likelihood"].items()
        }
        model: NaiveBayesModel | LogisticRegressionModel = NaiveBayesModel(
            class_log_prior=dict(doc["class_log_prior"]),
            feature_log_likelihood=loglik,
            vocabulary=frozenset(loglik[IR]),
            alpha=doc["alpha"],
        )
    elif doc["kind"] == "logreg":
        hp = doc["hyperparameters"]
        model = LogisticRegressionModel(
            weights={str_to_feature(key): w for key, w in doc["weights"].items()},
            bias=doc["bias"],
            params=LogRegParams(
                learning_rate=hp["learning_rate"],
                l2=hp["l2"],
                max_epochs=hp["max_epochs"],
                tolerance=hp["tolerance"],
            ),
        )
    else:
        raise ValueError(f"unknown model kind: {doc.get('kind')!r}")
    return model, classes


def save_model(
    path: str | Path,
    model: NaiveBayesModel | LogisticRegressionModel,
    feature_classes: Sequence[FeatureClass] | None = None,
) -> None:
    doc = model_to_dict(model, feature_classes)
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> tuple[NaiveBayesModel | LogisticRegressionModel, list[FeatureClass] | None]:
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def predict(model: NaiveBayesModel | LogisticRegressionModel, vector: FeatureVector) -> Prediction:
    if isinstance(model, NaiveBayesModel):
        return predict_nb(model, vector)
    return predict_lr(model, vector)
