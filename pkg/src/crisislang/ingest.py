"""Corpus ingestion: JSON Lines parsing and geo/time partitioning.

One message per line: {"id", "text", "created_at", optional "geo" {lat, lon},
optional "ark_tags"/"ptb_tags"/"chunk_tags"}. Geotagged messages inside the
configured time windows are split into IR / OR / PC_IR / PC_OR; non-geotagged
messages form the unlabeled pool that classification later targets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Iterable

EARTH_RADIUS_KM = 6371.0

TAG_LAYER_FIELDS = ("ark_tags", "ptb_tags", "chunk_tags")


class RecordError(ValueError):
    """A single corpus record failed parsing or validation."""


@dataclass(frozen=True)
class GeoPoint:
    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat <= 90.0:
            raise RecordError(f"latitude out of range: {self.lat}")
        if not -180.0 <= self.lon <= 180.0:
            raise RecordError(f"longitude out of range: {self.lon}")


@dataclass(frozen=True)
class Region:
    """Geographic disc: epicenter plus radius in kilometers."""

    epicenter: GeoPoint
    radius_km: float

    def __post_init__(self) -> None:
        if self.radius_km <= 0:
            raise ValueError(f"radius_km must be positive, got {self.radius_km}")

    def contains(self, point: GeoPoint) -> bool:
        # Boundary-inclusive: a point exactly on the disc edge counts as inside.
        return haversine_km(self.epicenter, point) <= self.radius_km


@dataclass(frozen=True)
class TimeWindow:
    """Half-open UTC interval [start, end)."""

    start: datetime
    end: datetime

    def __post_init__(self) -> None:
        for name, value in (("start", self.start), ("end", self.end)):
            if value.tzinfo is None:
                raise ValueError(f"{name} must be timezone-aware")
        if not self.start < self.end:
            raise ValueError("window start must precede end")

    def contains(self, instant: datetime) -> bool:
        return self.start <= instant < self.end


class PartitionLabel(str, Enum):
    IR = "IR"
    OR = "OR"
    PC_IR = "PC_IR"
    PC_OR = "PC_OR"
    UNASSIGNED = "UNASSIGNED"


@dataclass(frozen=True)
class RawTweet:
    id: str
    text: str
    created_at: datetime
    geo: GeoPoint | None = None
    ark_tags: tuple[str, ...] | None = None
    ptb_tags: tuple[str, ...] | None = None
    chunk_tags: tuple[str, ...] | None = None


def parse_timestamp(value: str) -> datetime:
    """Parse an RFC 3339 timestamp to UTC; naive values are assumed UTC."""
    if not isinstance(value, str):
        raise RecordError(f"created_at must be a string, got {type(value).__name__}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError:
        raise RecordError(f"unparseable timestamp: {value!r}") from None
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)


def _parse_tag_layer(obj: dict, name: str) -> tuple[str, ...] | None:
    raw = obj.get(name)
    if raw is None:
        return None
    if not isinstance(raw, list) or not all(isinstance(t, str) for t in raw):
        raise RecordError(f"{name} must be a list of strings")
    return tuple(raw)


def parse_tweet_record(line: str) -> RawTweet:
    """Parse one JSON Lines record into a validated RawTweet.

    Unknown fields are ignored. Tag layers are not checked against the
    tokenization here; alignment is validated when tags are attached.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordError(f"malformed JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise RecordError("record is not a JSON object")
    for name in ("id", "text", "created_at"):
        if name not in obj or obj[name] is None:
            raise RecordError(f"missing required field: {name}")
    tweet_id = obj["id"]
    if isinstance(tweet_id, int):
        tweet_id = str(tweet_id)
    if not isinstance(tweet_id, str) or not tweet_id:
        raise RecordError("id must be a non-empty string")
    text = obj["text"]
    if not isinstance(text, str) or not text:
        raise RecordError("text must be a non-empty string")
    created_at = parse_timestamp(obj["created_at"])

    geo = None
    raw_geo = obj.get("geo")
    if raw_geo is not None:
        if not isinstance(raw_geo, dict) or "lat" not in raw_geo or "lon" not in raw_geo:
            raise RecordError("geo must be an object with lat and lon")
        lat, lon = raw_geo["lat"], raw_geo["lon"]
        if not isinstance(lat, (int, float)) or not isinstance(lon, (int, float)):
            raise RecordError("geo lat/lon must be numbers")
        geo = GeoPoint(float(lat), float(lon))

    layers = {name: _parse_tag_layer(obj, name) for name in TAG_LAYER_FIELDS}
    return RawTweet(id=tweet_id, text=text, created_at=created_at, geo=geo, **layers)


def haversine_km(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance in kilometers (mean Earth radius 6371 km)."""
    lat1, lat2 = math.radians(a.lat), math.radians(b.lat)
    dlat = math.radians(b.lat - a.lat)
    dlon = math.radians(b.lon - a.lon)
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return EARTH_RADIUS_KM * 2.0 * math.asin(min(1.0, math.sqrt(h)))


def assign_partition(
    tweet: RawTweet,
    region: Region,
    crisis: TimeWindow,
    pre_crisis: TimeWindow | None = None,
) -> PartitionLabel:
    """Label a geotagged tweet by disc membership within the crisis windows."""
    if tweet.geo is None:
        raise ValueError(f"tweet {tweet.id} has no geo coordinates")
    if crisis.contains(tweet.created_at):
        return PartitionLabel.IR if region.contains(tweet.geo) else PartitionLabel.OR
    if pre_crisis is not None and pre_crisis.contains(tweet.created_at):
        return PartitionLabel.PC_IR if region.contains(tweet.geo) else PartitionLabel.PC_OR
    return PartitionLabel.UNASSIGNED


@dataclass
class Corpus:
    """A loaded, partitioned corpus. Immutable by convention after loading."""

    groups: dict[PartitionLabel, list[RawTweet]] = field(
        default_factory=lambda: {label: [] for label in PartitionLabel}
    )
    unlabeled: list[RawTweet] = field(default_factory=list)
    lines: int = 0
    skipped: int = 0
    duplicates: int = 0
    skip_reasons: list[str] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        summary = {label.value: len(tweets) for label, tweets in self.groups.items()}
        summary["unlabeled"] = len(self.unlabeled)
        summary["skipped"] = self.skipped
        summary["duplicates"] = self.duplicates
        summary["lines"] = self.lines
        return summary

    def imbalance_ratio(self) -> float | None:
        """|IR| / (|IR| + |OR|), or None when both partitions are empty."""
        n_ir = len(self.groups[PartitionLabel.IR])
        n_or = len(self.groups[PartitionLabel.OR])
        if n_ir + n_or == 0:
            return None
        return n_ir / (n_ir + n_or)


def load_corpus(
    path: str | Path,
    region: Region,
    crisis: TimeWindow,
    pre_crisis: TimeWindow | None = None,
    max_reported_errors: int = 20,
) -> Corpus:
    """Load and partition a JSON Lines corpus.

    Malformed records and duplicate ids are skipped and counted, never fatal.
    Blank lines are ignored. Per-label counts plus unlabeled plus skipped
    always sum to the number of non-blank input lines.
    """
    corpus = Corpus()
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            corpus.lines += 1
            try:
                tweet = parse_tweet_record(line)
            except RecordError as exc:
                corpus.skipped += 1
                if len(corpus.skip_reasons) < max_reported_errors:
                    corpus.skip_reasons.append(f"line {lineno}: {exc}")
                continue
            if tweet.id in seen:
                corpus.skipped += 1
                corpus.duplicates += 1
                if len(corpus.skip_reasons) < max_reported_errors:
                    corpus.skip_reasons.append(f"line {lineno}: duplicate id {tweet.id}")
                continue
            seen.add(tweet.id)
            if tweet.geo is None:
                corpus.unlabeled.append(tweet)
            else:
                label = assign_partition(tweet, region, crisis, pre_crisis)
                corpus.groups[label].append(tweet)
    return corpus


def tweet_to_record(tweet: RawTweet) -> dict:
    """Canonical JSON-serializable form of a tweet (schema fields only)."""
    record: dict = {
        "id": tweet.id,
        "text": tweet.text,
        "created_at": tweet.created_at.isoformat().replace("+00:00", "Z"),
    }
    if tweet.geo is not None:
        record["geo"] = {"lat": tweet.geo.lat, "lon": tweet.geo.lon}
    for name in TAG_LAYER_FIELDS:
        layer = getattr(tweet, name)
        if layer is not None:
            record[name] = list(layer)
    return record


def write_jsonl(path: str | Path, tweets: Iterable[RawTweet]) -> int:
    """Write tweets as canonical JSON Lines; returns the record count."""
    written = 0
    with open(path, "w", encoding="utf-8") as handle:
        for tweet in tweets:
            handle.write(json.dumps(tweet_to_record(tweet), sort_keys=True) + "\n")
            written += 1
    return written


def read_jsonl(path: str | Path) -> list[RawTweet]:
    """Strict reader for files this package wrote itself (no skip logic)."""
    tweets = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                tweets.append(parse_tweet_record(line))
    return tweets
