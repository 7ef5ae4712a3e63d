"""Sparse feature extraction over tagged tweets.

Six feature classes: word unigrams and bigrams, POS n-grams (n = 1..3) over
the coarse ARK and fine PTB tag layers, shallow-parse chunk features, and the
mixed crisis-sensitive class (selected ARK tag patterns in tag-only and
word/tag form, the "in ... <noun>" prepositional pattern, and existential
"there" paired with its succeeding verb).

Feature identifiers are class-qualified, so textually identical keys from
different classes never collide. Counts are raw frequencies.
"""

from __future__ import annotations

from collections import Counter
from enum import Enum
from typing import Iterable, NamedTuple

from crisislang.text import TaggedTweet


class FeatureClass(Enum):
    UNIGRAM = "UNIGRAM"
    BIGRAM = "BIGRAM"
    ARK_POS = "ARK_POS"
    PTB_POS = "PTB_POS"
    SHALLOW_PARSE = "SHALLOW_PARSE"
    CRISIS_SENSITIVE = "CRISIS_SENSITIVE"


class FeatureId(NamedTuple):
    cls: FeatureClass
    key: str


FeatureVector = dict[FeatureId, int]

# ARK tag patterns mined from in-region crisis data; matched stride-1 with
# overlaps, emitted both tag-only (PAT:) and word/tag (WT:).
ARK_CRISIS_PATTERNS: tuple[tuple[str, ...], ...] = (
    ("N",),
    ("A",),
    ("!",),
    ("N", "R"),
    ("L", "A"),
    ("N", "P"),
    ("P", "D", "N"),
    ("L", "A", "!"),
    ("A", "N", "P"),
)

# Layers each class needs beyond the tokens themselves.
_REQUIRED_LAYER = {
    FeatureClass.UNIGRAM: None,
    FeatureClass.BIGRAM: None,
    FeatureClass.ARK_POS: "ark",
    FeatureClass.PTB_POS: "ptb",
    FeatureClass.SHALLOW_PARSE: "chunk",
    FeatureClass.CRISIS_SENSITIVE: "ark",
}


class MissingLayerError(ValueError):
    """A requested feature class needs a tag layer the tweet does not carry."""

    def __init__(self, tweet_id: str, classes: list[FeatureClass]):
        self.tweet_id = tweet_id
        self.classes = classes
        names = ", ".join(c.value for c in classes)
        super().__init__(f"tweet {tweet_id!r} lacks tag layers for: {names}")


def feature_to_str(fid: FeatureId) -> str:
    return f"{fid.cls.value}:{fid.key}"


def str_to_feature(raw: str) -> FeatureId:
    cls_name, _, key = raw.partition(":")
    return FeatureId(FeatureClass(cls_name), key)


def feature_sort_key(fid: FeatureId) -> tuple[str, str]:
    return (fid.cls.value, fid.key)


def _has_layer(tweet: TaggedTweet, layer: str | None) -> bool:
    if layer is None:
        return True
    return {"ark": tweet.has_ark, "ptb": tweet.has_ptb, "chunk": tweet.has_chunk}[layer]


def missing_classes(tweet: TaggedTweet, classes: Iterable[FeatureClass]) -> list[FeatureClass]:
    return [c for c in classes if not _has_layer(tweet, _REQUIRED_LAYER[c])]


def extract_word_ngrams(tweet: TaggedTweet, n: int) -> FeatureVector:
    """Contiguous word n-grams (n = 1 or 2), no boundary padding."""
    if n not in (1, 2):
        raise ValueError(f"word n-grams support n in {{1, 2}}, got {n}")
    cls = FeatureClass.UNIGRAM if n == 1 else FeatureClass.BIGRAM
    surfaces = tweet.surfaces()
    counts: Counter[FeatureId] = Counter()
    for i in range(len(surfaces) - n + 1):
        counts[FeatureId(cls, " ".join(surfaces[i : i + n]))] += 1
    return dict(counts)


def extract_pos_ngrams(tweet: TaggedTweet, tagset: str, n: int) -> FeatureVector:
    """Contiguous POS-tag n-grams (n = 1..3) over the ARK or PTB layer."""
    if tagset not in ("ark", "ptb"):
        raise ValueError(f"tagset must be 'ark' or 'ptb', got {tagset!r}")
    if n not in (1, 2, 3):
        raise ValueError(f"POS n-grams support n in {{1, 2, 3}}, got {n}")
    cls = FeatureClass.ARK_POS if tagset == "ark" else FeatureClass.PTB_POS
    if not _has_layer(tweet, tagset):
        raise MissingLayerError(tweet.tweet_id, [cls])
    tags = [t.ark_tag if tagset == "ark" else t.ptb_tag for t in tweet.tokens]
    counts: Counter[FeatureId] = Counter()
    for i in range(len(tags) - n + 1):
        counts[FeatureId(cls, " ".join(tags[i : i + n]))] += 1
    return dict(counts)


def chunk_spans(tweet: TaggedTweet) -> list[tuple[str, int, int]]:
    """Maximal chunks as (label, start, end) half-open token spans.

    Tolerant IOB reading: a bare I- tag after O or a different label starts
    a fresh chunk; O tokens belong to no chunk.
    """
    spans: list[tuple[str, int, int]] = []
    current: tuple[str, int] | None = None
    for i, token in enumerate(tweet.tokens):
        tag = token.chunk_tag or "O"
        if tag == "O":
            if current is not None:
                spans.append((current[0], current[1], i))
                current = None
            continue
        prefix, _, label = tag.partition("-")
        if prefix == "I" and current is not None and current[0] == label:
            continue
        if current is not None:
            spans.append((current[0], current[1], i))
        current = (label, i)
    if current is not None:
        spans.append((current[0], current[1], len(tweet.tokens)))
    return spans


def extract_shallow_parse(tweet: TaggedTweet) -> FeatureVector:
    """Chunk-label n-grams (n = 1..3) plus one LABEL:headword per chunk.

    The n-grams run over the sequence of maximal chunks; the headword is
    approximated as the last token of the chunk.
    """
    if not tweet.has_chunk:
        raise MissingLayerError(tweet.tweet_id, [FeatureClass.SHALLOW_PARSE])
    cls = FeatureClass.SHALLOW_PARSE
    spans = chunk_spans(tweet)
    labels = [label for label, _, _ in spans]
    counts: Counter[FeatureId] = Counter()
    for n in (1, 2, 3):
        for i in range(len(labels) - n + 1):
            counts[FeatureId(cls, " ".join(labels[i : i + n]))] += 1
    for label, _, end in spans:
        counts[FeatureId(cls, f"{label}:{tweet.tokens[end - 1].surface}")] += 1
    return dict(counts)


def _pp_match_in_chunks(spans: list[tuple[str, int, int]], i: int, j: int) -> bool:
    # The preposition must sit in a PP chunk and the noun in the NP chunk
    # that immediately follows it.
    for idx, (label, start, end) in enumerate(spans):
        if start <= i < end:
            if label != "PP":
                return False
            if idx + 1 >= len(spans):
                return False
            nxt_label, nxt_start, nxt_end = spans[idx + 1]
            return nxt_label == "NP" and nxt_start == end and nxt_start <= j < nxt_end
    return False


def extract_crisis_sensitive(tweet: TaggedTweet) -> FeatureVector:
    """The mixed crisis-sensitive class (requires the ARK layer).

    Emits, per match: PAT:<tags> and WT:<word/tag ...> for each of the nine
    ARK patterns; PP:in:<noun> for "in" + optional determiners/adjectives +
    noun (confined to a PP+NP chunk pair when a chunk layer is present); and
    EX:<verb> for existential "there" with its succeeding verb.
    """
    if not tweet.has_ark:
        raise MissingLayerError(tweet.tweet_id, [FeatureClass.CRISIS_SENSITIVE])
    cls = FeatureClass.CRISIS_SENSITIVE
    tokens = tweet.tokens
    tags = [t.ark_tag for t in tokens]
    counts: Counter[FeatureId] = Counter()

    for pattern in ARK_CRISIS_PATTERNS:
        width = len(pattern)
        for i in range(len(tags) - width + 1):
            if tuple(tags[i : i + width]) != pattern:
                continue
            counts[FeatureId(cls, "PAT:" + " ".join(pattern))] += 1
            wt = " ".join(f"{tokens[i + k].surface}/{pattern[k]}" for k in range(width))
            counts[FeatureId(cls, "WT:" + wt)] += 1

    spans = chunk_spans(tweet) if tweet.has_chunk else None
    for i, token in enumerate(tokens):
        if token.surface != "in" or tags[i] != "P":
            continue
        j = i + 1
        while j < len(tokens) and tags[j] in ("D", "A"):
            j += 1
        if j < len(tokens) and tags[j] == "N":
            if spans is not None and not _pp_match_in_chunks(spans, i, j):
                continue
            counts[FeatureId(cls, f"PP:in:{tokens[j].surface}")] += 1

    if tweet.has_ptb:
        for i, token in enumerate(tokens):
            if token.ptb_tag != "EX":
                continue
            for j in (i + 1, i + 2):
                if j < len(tokens) and (tokens[j].ptb_tag or "").startswith("V"):
                    counts[FeatureId(cls, f"EX:{tokens[j].surface}")] += 1
                    break
    else:
        for i, token in enumerate(tokens):
            if token.surface != "there":
                continue
            if i > 0 and tags[i - 1] == "P":
                continue
            for j in (i + 1, i + 2):
                if j < len(tokens) and tags[j] == "V":
                    counts[FeatureId(cls, f"EX:{tokens[j].surface}")] += 1
                    break

    return dict(counts)


def _extract_class(tweet: TaggedTweet, cls: FeatureClass) -> FeatureVector:
    if cls is FeatureClass.UNIGRAM:
        return extract_word_ngrams(tweet, 1)
    if cls is FeatureClass.BIGRAM:
        return extract_word_ngrams(tweet, 2)
    if cls in (FeatureClass.ARK_POS, FeatureClass.PTB_POS):
        tagset = "ark" if cls is FeatureClass.ARK_POS else "ptb"
        merged: Counter[FeatureId] = Counter()
        for n in (1, 2, 3):
            merged.update(extract_pos_ngrams(tweet, tagset, n))
        return dict(merged)
    if cls is FeatureClass.SHALLOW_PARSE:
        return extract_shallow_parse(tweet)
    return extract_crisis_sensitive(tweet)


def vectorize(
    tweet: TaggedTweet,
    classes: Iterable[FeatureClass],
    on_missing: str = "error",
) -> FeatureVector:
    """Disjoint union of the requested per-class vectors.

    on_missing="error" raises when a class needs an absent tag layer;
    "skip" drops such classes for this tweet (callers report coverage).
    """
    classes = list(classes)
    if not classes:
        raise ValueError("at least one feature class is required")
    if on_missing not in ("error", "skip"):
        raise ValueError(f"on_missing must be 'error' or 'skip', got {on_missing!r}")
    absent = missing_classes(tweet, classes)
    if absent and on_missing == "error":
        raise MissingLayerError(tweet.tweet_id, absent)
    vector: FeatureVector = {}
    for cls in classes:
        if cls in absent:
            continue
        vector.update(_extract_class(tweet, cls))
    return vector


def vector_to_json(vector: FeatureVector) -> dict[str, int]:
    ordered = sorted(vector.items(), key=lambda kv: feature_sort_key(kv[0]))
    return {feature_to_str(fid): count for fid, count in ordered}
