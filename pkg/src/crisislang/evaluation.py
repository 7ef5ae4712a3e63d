"""Experimental protocol: balanced sampling, repeated stratified CV,
IR-perspective metrics, rank-based ROC AUC, the class-imbalance sweep, and
the exhaustive search over the 63 feature-class combinations.

All randomness is derived from explicit integer seeds; repeat i of a
cross-validation run uses seed + i, so each reading is individually
reproducible.
"""

from __future__ import annotations

import itertools
import logging
import random
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from crisislang.features import FeatureClass, missing_classes, vectorize
from crisislang.model import IR, OR, predict_nb, train_naive_bayes
from crisislang.text import TaggedTweet

logger = logging.getLogger(__name__)

LabeledTweet = tuple[TaggedTweet, str]

DEFAULT_IMBALANCE_RATIOS = (0.05, 0.1, 0.2, 0.35, 0.5, 0.65, 0.8, 0.9, 0.95)


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    degenerate_flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "degenerate_flags": list(self.degenerate_flags),
        }


def compute_metrics(predicted: Sequence[str], truth: Sequence[str]) -> Metrics:
    """Confusion-matrix metrics with IR as the positive class.

    Undefined denominators are reported as 0 with an explicit flag so
    degenerate readings stay visible in aggregates.
    """
    if len(predicted) != len(truth):
        raise ValueError(f"length mismatch: {len(predicted)} predictions, {len(truth)} truths")
    if not truth:
        raise ValueError("empty prediction set")
    tp = fp = fn = tn = 0
    for p, t in zip(predicted, truth):
        if p == IR and t == IR:
            tp += 1
        elif p == IR:
            fp += 1
        elif t == IR:
            fn += 1
        else:
            tn += 1
    flags: list[str] = []
    accuracy = (tp + tn) / len(truth)
    if tp + fp == 0:
        precision = 0.0
        flags.append("precision")
    else:
        precision = tp / (tp + fp)
    if tp + fn == 0:
        recall = 0.0
        flags.append("recall")
    else:
        recall = tp / (tp + fn)
    if precision + recall == 0.0:
        f1 = 0.0
        flags.append("f1")
    else:
        f1 = 2.0 * precision * recall / (precision + recall)
    return Metrics(accuracy, precision, recall, f1, tuple(flags))


def mean_metrics(readings: Sequence[Metrics]) -> Metrics:
    n = len(readings)
    flags = sorted({flag for m in readings for flag in m.degenerate_flags})
    return Metrics(
        accuracy=sum(m.accuracy for m in readings) / n,
        precision=sum(m.precision for m in readings) / n,
        recall=sum(m.recall for m in readings) / n,
        f1=sum(m.f1 for m in readings) / n,
        degenerate_flags=tuple(flags),
    )


def balanced_sample(
    ir: Sequence[TaggedTweet], or_pool: Sequence[TaggedTweet], seed: int
) -> list[LabeledTweet]:
    """All IR tweets plus an equal-size uniform sample from the OR pool.

    When the OR pool is the smaller side, IR is downsampled instead (with a
    warning) so the result is always a 50/50 split.
    """
    if not ir:
        raise ValueError("IR set is empty; nothing to balance against")
    rng = random.Random(seed)
    if len(or_pool) >= len(ir):
        chosen_or = rng.sample(list(or_pool), len(ir))
        return [(t, IR) for t in ir] + [(t, OR) for t in chosen_or]
    logger.warning(
        "OR pool (%d) smaller than IR (%d); downsampling IR", len(or_pool), len(ir)
    )
    chosen_ir = rng.sample(list(ir), len(or_pool))
    return [(t, IR) for t in chosen_ir] + [(t, OR) for t in or_pool]


def stratified_fold_indices(
    labels: Sequence[str], folds: int, rng: random.Random
) -> list[list[int]]:
    """Shuffle, then deal each label's instances round-robin across folds.

    Per repeat the folds are disjoint and their union is the full index set.
    """
    if folds < 2:
        raise ValueError(f"need at least 2 folds, got {folds}")
    order = list(range(len(labels)))
    rng.shuffle(order)
    assignments: list[list[int]] = [[] for _ in range(folds)]
    dealt: Counter[str] = Counter()
    for idx in order:
        label = labels[idx]
        assignments[dealt[label] % folds].append(idx)
        dealt[label] += 1
    return assignments


@dataclass
class CvReport:
    readings: list[Metrics]
    mean: Metrics
    seed: int
    repeats: int
    folds: int

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "repeats": self.repeats,
            "folds": self.folds,
            "readings": [m.to_dict() for m in self.readings],
            "mean": self.mean.to_dict(),
        }

    def to_csv(self) -> str:
        lines = ["reading,accuracy,precision,recall,f1,degenerate_flags"]
        for i, m in enumerate(self.readings, start=1):
            flags = ";".join(m.degenerate_flags)
            lines.append(f"{i},{m.accuracy!r},{m.precision!r},{m.recall!r},{m.f1!r},{flags}")
        m = self.mean
        flags = ";".join(m.degenerate_flags)
        lines.append(f"mean,{m.accuracy!r},{m.precision!r},{m.recall!r},{m.f1!r},{flags}")
        return "\n".join(lines) + "\n"


def _vectorize_all(
    data: Sequence[LabeledTweet], classes: Sequence[FeatureClass]
) -> list[dict]:
    return [vectorize(tweet, classes, on_missing="error") for tweet, _ in data]


def cross_validate(
    data: Sequence[LabeledTweet],
    classes: Sequence[FeatureClass],
    repeats: int = 3,
    folds: int = 5,
    seed: int = 0,
    alpha: float = 1.0,
) -> CvReport:
    """Repeated stratified k-fold CV of the NB classifier.

    Each repeat reshuffles with seed + repeat index; the report carries
    repeats x folds readings plus their arithmetic mean.
    """
    if len(data) < folds:
        raise ValueError(f"{len(data)} instances cannot fill {folds} folds")
    vectors = _vectorize_all(data, classes)
    labels = [label for _, label in data]
    readings: list[Metrics] = []
    for repeat in range(repeats):
        rng = random.Random(seed + repeat)
        assignments = stratified_fold_indices(labels, folds, rng)
        for held_out in assignments:
            held = set(held_out)
            train = [(vectors[i], labels[i]) for i in range(len(data)) if i not in held]
            model = train_naive_bayes(train, alpha=alpha)
            predicted = [predict_nb(model, vectors[i]).label for i in held_out]
            truth = [labels[i] for i in held_out]
            readings.append(compute_metrics(predicted, truth))
    return CvReport(
        readings=readings,
        mean=mean_metrics(readings),
        seed=seed,
        repeats=repeats,
        folds=folds,
    )


def roc_auc(scores: Sequence[float], truth: Sequence[str]) -> float:
    """Rank-based AUC: P(random IR scores above random OR), ties count half."""
    if len(scores) != len(truth):
        raise ValueError("scores and truth differ in length")
    n_pos = sum(1 for t in truth if t == IR)
    n_neg = len(truth) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC requires both labels in the truth sequence")
    order = sorted(range(len(scores)), key=lambda i: scores[i])
    ranks = [0.0] * len(scores)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and scores[order[j + 1]] == scores[order[i]]:
            j += 1
        avg_rank = (i + j) / 2.0 + 1.0  # ranks are 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = avg_rank
        i = j + 1
    pos_rank_sum = sum(r for r, t in zip(ranks, truth) if t == IR)
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


@dataclass
class ImbalanceSweep:
    ratios: list[float]
    auc_per_ratio: list[float]
    summary_auc: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "ratios": self.ratios,
            "auc_per_ratio": self.auc_per_ratio,
            "summary_auc": self.summary_auc,
        }

    def to_csv(self) -> str:
        lines = ["ratio,auc"]
        for ratio, auc in zip(self.ratios, self.auc_per_ratio):
            lines.append(f"{ratio!r},{auc!r}")
        return "\n".join(lines) + "\n"


def _stratified_split(
    indices_by_label: dict[str, list[int]], test_fraction: float, rng: random.Random
) -> tuple[list[int], list[int]]:
    train: list[int] = []
    test: list[int] = []
    for label in sorted(indices_by_label):
        members = list(indices_by_label[label])
        rng.shuffle(members)
        n_test = max(1, round(len(members) * test_fraction))
        if n_test >= len(members):
            raise ValueError(f"label {label} too small to split train/test")
        test.extend(members[:n_test])
        train.extend(members[n_test:])
    return train, test


def imbalance_sweep(
    ir: Sequence[TaggedTweet],
    or_pool: Sequence[TaggedTweet],
    classes: Sequence[FeatureClass],
    ratios: Sequence[float] = DEFAULT_IMBALANCE_RATIOS,
    seed: int = 0,
    alpha: float = 1.0,
    test_fraction: float = 0.2,
) -> ImbalanceSweep:
    """Retrain at each IR fraction and measure AUC on a held-out split.

    For each ratio the largest dataset the two pools can support is drawn,
    split 80/20 stratified, and scored with NB log-posterior margins.
    """
    ir_vectors = [vectorize(t, classes, on_missing="error") for t in ir]
    or_vectors = [vectorize(t, classes, on_missing="error") for t in or_pool]
    aucs: list[float] = []
    for step, ratio in enumerate(ratios):
        if not 0.0 < ratio < 1.0:
            raise ValueError(f"ratio must be in (0, 1), got {ratio}")
        n_total = min(int(len(ir_vectors) / ratio), int(len(or_vectors) / (1.0 - ratio)))
        k_ir = min(round(n_total * ratio), len(ir_vectors))
        k_or = min(n_total - k_ir, len(or_vectors))
        if k_ir < 2 or k_or < 2:
            raise ValueError(
                f"ratio {ratio} infeasible for pools of {len(ir_vectors)} IR / "
                f"{len(or_vectors)} OR tweets"
            )
        rng = random.Random(seed * 1000003 + step)
        sample = [(v, IR) for v in rng.sample(ir_vectors, k_ir)]
        sample += [(v, OR) for v in rng.sample(or_vectors, k_or)]
        by_label = {IR: list(range(k_ir)), OR: list(range(k_ir, k_ir + k_or))}
        train_idx, test_idx = _stratified_split(by_label, test_fraction, rng)
        model = train_naive_bayes([sample[i] for i in train_idx], alpha=alpha)
        scores = [predict_nb(model, sample[i][0]).score for i in test_idx]
        truth = [sample[i][1] for i in test_idx]
        aucs.append(roc_auc(scores, truth))
    return ImbalanceSweep(
        ratios=list(ratios),
        auc_per_ratio=aucs,
        summary_auc=sum(aucs) / len(aucs),
        seed=seed,
    )


@dataclass
class CombinationEntry:
    classes: tuple[FeatureClass, ...]
    report: CvReport

    def class_names(self) -> str:
        return "+".join(c.value for c in self.classes)


@dataclass
class CombinationReport:
    entries: list[CombinationEntry]
    excluded_classes: list[FeatureClass] = field(default_factory=list)

    def ranked(self) -> list[CombinationEntry]:
        return sorted(
            self.entries,
            key=lambda e: (-e.report.mean.f1, len(e.classes), e.class_names()),
        )

    def to_dict(self) -> dict:
        return {
            "excluded_classes": [c.value for c in self.excluded_classes],
            "entries": [
                {"classes": e.class_names(), "mean": e.report.mean.to_dict()}
                for e in self.ranked()
            ],
        }

    def to_csv(self) -> str:
        lines = ["rank,classes,accuracy,precision,recall,f1"]
        for rank, e in enumerate(self.ranked(), start=1):
            m = e.report.mean
            lines.append(
                f"{rank},{e.class_names()},{m.accuracy!r},{m.precision!r},{m.recall!r},{m.f1!r}"
            )
        return "\n".join(lines) + "\n"


def enumerate_combinations(
    data: Sequence[LabeledTweet],
    seed: int = 0,
    repeats: int = 3,
    folds: int = 5,
    alpha: float = 1.0,
    workers: int = 1,
) -> CombinationReport:
    """Cross-validate every non-empty subset of the extractable classes.

    All subsets share the same fold seed, so rankings compare like-for-like.
    A class is extractable only when every tweet carries its tag layer;
    anything else is excluded and reported.
    """
    available = [
        cls
        for cls in FeatureClass
        if all(not missing_classes(tweet, [cls]) for tweet, _ in data)
    ]
    excluded = [cls for cls in FeatureClass if cls not in available]
    if not available:
        raise ValueError("no feature class is extractable from this data")
    subsets: list[tuple[FeatureClass, ...]] = []
    for size in range(1, len(available) + 1):
        subsets.extend(itertools.combinations(available, size))

    def run(subset: tuple[FeatureClass, ...]) -> CombinationEntry:
        report = cross_validate(
            data, list(subset), repeats=repeats, folds=folds, seed=seed, alpha=alpha
        )
        return CombinationEntry(classes=subset, report=report)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(run, subsets))
    else:
        entries = [run(subset) for subset in subsets]
    return CombinationReport(entries=entries, excluded_classes=excluded)


def bigram_cloud(tweets: Iterable[TaggedTweet], k: int) -> list[tuple[str, int]]:
    """Top-k word bigrams by count, ties broken lexicographically."""
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    counts: Counter[str] = Counter()
    for tweet in tweets:
        surfaces = tweet.surfaces()
        for i in range(len(surfaces) - 1):
            counts[f"{surfaces[i]} {surfaces[i + 1]}"] += 1
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ordered[:k]
