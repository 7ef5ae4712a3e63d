#!/usr/bin/env python3
"""Generate the deterministic demo corpus used by configs/demo.json.

Writes data/demo.jsonl: geotagged messages in and around a Boston-like
crisis window plus a non-geotagged pool, with vocabulary that separates the
two regions well enough for the demo pipeline to be interesting.
"""

import argparse
import json
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

BOSTON = {"lat": 42.35, "lon": -71.08}
NYC = {"lat": 40.75, "lon": -73.99}
CRISIS_START = datetime(2013, 4, 15, 18, 48, tzinfo=timezone.utc)
PRE_START = datetime(2013, 4, 9, 14, 0, tzinfo=timezone.utc)

INSIDE_PHRASES = [
    "i'm safe in boston everyone",
    "explosion near the finish line",
    "there is smoke everywhere downtown",
    "#prayforboston the marathon stopped",
    "police are closing the streets here",
    "we're okay but it's chaos in boston",
]
OUTSIDE_PHRASES = [
    "watching the news about boston",
    "thoughts going out to runners",
    "can't believe what i'm seeing on tv",
    "news says there was an explosion",
    "hope everyone in boston is safe",
    "praying for the people affected",
]


def stamp(base, minutes):
    return (base + timedelta(minutes=minutes)).isoformat().replace("+00:00", "Z")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", default="data/demo.jsonl")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--per-group", type=int, default=60)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    lines = []

    def record(tweet_id, phrases, geo, created):
        text = rng.choice(phrases)
        doc = {"id": tweet_id, "text": text, "created_at": created}
        if geo is not None:
            doc["geo"] = geo
        lines.append(json.dumps(doc, sort_keys=True))

    for i in range(args.per_group):
        record(f"ir{i}", INSIDE_PHRASES, dict(BOSTON), stamp(CRISIS_START, 1 + i * 3))
    for i in range(args.per_group + 30):
        record(f"or{i}", OUTSIDE_PHRASES, dict(NYC), stamp(CRISIS_START, 1 + i * 2))
    for i in range(20):
        phrases = INSIDE_PHRASES if i % 2 == 0 else OUTSIDE_PHRASES
        geo = dict(BOSTON) if i % 2 == 0 else dict(NYC)
        record(f"pc{i}", phrases, geo, stamp(PRE_START, 5 + i * 10))
    for i in range(40):
        phrases = INSIDE_PHRASES if i % 2 == 0 else OUTSIDE_PHRASES
        record(f"u{i}", phrases, None, stamp(CRISIS_START, 2 + i * 5))

    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} records to {out}")


if __name__ == "__main__":
    main()
