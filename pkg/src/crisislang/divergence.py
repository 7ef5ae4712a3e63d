"""Word-distribution divergence between tweet groups.

Jensen-Shannon divergence with base-2 logarithms, so values live in [0, 1].
The mixture distribution covers the union support, so no smoothing is needed.
Matrices come in two flavors: hour-by-hour within a region on one local day,
and group-by-group across named regions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Iterable, Mapping, Sequence

from crisislang.ingest import RawTweet, Region
from crisislang.text import TaggedTweet, attach_tags, tokenize


@dataclass(frozen=True)
class TokenDistribution:
    probs: dict[str, float]
    support_size: int


@dataclass
class DivergenceMatrix:
    labels: list[str]
    values: list[list[float]]
    normalized_values: list[list[float]]

    def to_dict(self) -> dict:
        return {
            "labels": self.labels,
            "values": self.values,
            "normalized_values": self.normalized_values,
        }

    def to_csv(self) -> str:
        lines = ["," + ",".join(self.labels)]
        for label, row in zip(self.labels, self.values):
            lines.append(label + "," + ",".join(repr(v) for v in row))
        return "\n".join(lines) + "\n"


def word_distribution(tweets: Iterable[TaggedTweet]) -> TokenDistribution:
    """Unigram relative frequencies over all tokens of all tweets."""
    counts: dict[str, int] = {}
    total = 0
    for tweet in tweets:
        for token in tweet.surfaces():
            counts[token] = counts.get(token, 0) + 1
            total += 1
    if total == 0:
        raise ValueError("cannot build a distribution from zero tokens")
    probs = {token: count / total for token, count in counts.items()}
    return TokenDistribution(probs=probs, support_size=len(counts))


def js_divergence(p: TokenDistribution, q: TokenDistribution) -> float:
    """JSD(p, q) = KL(p||m)/2 + KL(q||m)/2 with m the even mixture, base 2.

    Tokens are visited in sorted order and each token's two half-terms are
    added together, so swapping the arguments gives the bit-identical result.
    """
    pp, qp = p.probs, q.probs
    total = 0.0
    for token in sorted(set(pp) | set(qp)):
        pi = pp.get(token, 0.0)
        qi = qp.get(token, 0.0)
        m = 0.5 * (pi + qi)
        term_p = 0.5 * pi * math.log2(pi / m) if pi > 0.0 else 0.0
        term_q = 0.5 * qi * math.log2(qi / m) if qi > 0.0 else 0.0
        total += term_p + term_q
    return total


def _min_max_normalize(values: list[list[float]]) -> list[list[float]]:
    flat = [v for row in values for v in row]
    lo, hi = min(flat), max(flat)
    if hi <= lo:
        return [[0.0 for _ in row] for row in values]
    return [[(v - lo) / (hi - lo) for v in row] for row in values]


def pairwise_matrix(
    labels: Sequence[str], distributions: Sequence[TokenDistribution]
) -> DivergenceMatrix:
    """Symmetric JSD matrix with zero diagonal; entries clamped into [0, 1]."""
    n = len(labels)
    values = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = js_divergence(distributions[i], distributions[j])
            d = min(1.0, max(0.0, d))
            values[i][j] = d
            values[j][i] = d
    return DivergenceMatrix(
        labels=list(labels), values=values, normalized_values=_min_max_normalize(values)
    )


def _tokens_only(tweet: RawTweet) -> TaggedTweet:
    return attach_tags(tokenize(tweet.text), tweet_id=tweet.id)


def hourly_divergence_matrix(
    tweets: Iterable[RawTweet],
    region: Region,
    day: date,
    hours: Sequence[int],
    timezone_offset_minutes: int = 0,
) -> tuple[DivergenceMatrix, list[str]]:
    """Pairwise JSD between hourly word distributions inside the region.

    Hours are clock hours of the given local day under the fixed UTC offset.
    Hours with no tokens are dropped from the axis; the drop reasons come
    back as warnings.
    """
    if not hours:
        raise ValueError("hour range is empty")
    offset = timedelta(minutes=timezone_offset_minutes)
    buckets: dict[int, list[TaggedTweet]] = {h: [] for h in hours}
    for tweet in tweets:
        if tweet.geo is None or not region.contains(tweet.geo):
            continue
        local = tweet.created_at + offset
        if local.date() != day or local.hour not in buckets:
            continue
        buckets[local.hour].append(_tokens_only(tweet))

    labels: list[str] = []
    distributions: list[TokenDistribution] = []
    warnings: list[str] = []
    for hour in hours:
        label = f"{hour:02d}:00"
        try:
            dist = word_distribution(buckets[hour])
        except ValueError:
            warnings.append(f"hour {label} has no tokens; dropped from the axis")
            continue
        labels.append(label)
        distributions.append(dist)
    if not labels:
        raise ValueError("no hour in the range has any tokens")
    return pairwise_matrix(labels, distributions), warnings


def regional_divergence_matrix(
    groups: Mapping[str, Sequence[TaggedTweet]],
) -> tuple[DivergenceMatrix, list[str]]:
    """Pairwise JSD between named tweet groups (for example, cities)."""
    labels: list[str] = []
    distributions: list[TokenDistribution] = []
    warnings: list[str] = []
    for name, tweets in groups.items():
        try:
            dist = word_distribution(tweets)
        except ValueError:
            warnings.append(f"group {name!r} has no tokens; dropped from the axis")
            continue
        labels.append(name)
        distributions.append(dist)
    if not labels:
        raise ValueError("no group has any tokens")
    return pairwise_matrix(labels, distributions), warnings
