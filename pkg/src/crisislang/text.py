"""Twitter-aware tokenization, tag-layer alignment, and a fallback tagger.

The tokenizer is a deterministic approximation of Twitter-specific tooling:
lowercase, split on whitespace, peel edge punctuation into separate tokens,
and keep hashtags, mentions, URLs, and apostrophe contractions whole. URLs
are the one exception to lowercasing; their original form is preserved.

External taggers are out of scope. Corpora may carry pre-computed ARK, PTB,
and IOB chunk layers; for untagged desk-scale data the rule-based fallback
produces ARK-style tags only.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from crisislang.ingest import RawTweet

# Coarse Twitter POS inventory, for reference and fallback output.
ARK_TAGS = frozenset(
    ["N", "O", "^", "S", "Z", "V", "L", "M", "A", "R", "!", "D", "P", "&", "T",
     "X", "Y", "#", "@", "~", "U", "E", "$", "G", ","]
)

PREPOSITIONS = frozenset(
    ["in", "on", "at", "of", "for", "from", "to", "with", "by", "about", "over",
     "under", "near", "into", "through", "during", "after", "before", "against",
     "between", "without", "within", "along", "across", "around", "behind",
     "beyond", "off", "per", "via"]
)

DETERMINERS = frozenset(
    ["a", "an", "the", "this", "that", "these", "those", "my", "your", "his",
     "her", "its", "our", "their", "some", "any", "each", "every", "no",
     "all", "both"]
)

# ARK "L": fused nominal + verbal contractions.
CONTRACTIONS = frozenset(
    ["i'm", "it's", "there's", "that's", "he's", "she's", "what's", "who's",
     "here's", "where's", "how's", "let's", "i'll", "you'll", "he'll",
     "she'll", "we'll", "they'll", "i've", "you've", "we've", "they've",
     "i'd", "you'd", "he'd", "she'd", "we'd", "they'd", "you're", "we're",
     "they're"]
)

ADVERB_LEXICON = frozenset(
    ["here", "there", "now", "then", "very", "really", "just", "still", "too",
     "so", "again", "never", "always", "soon", "already", "everywhere",
     "away", "back", "home", "fast"]
)

VERB_LEXICON = frozenset(
    ["is", "are", "was", "were", "be", "been", "being", "am", "has", "have",
     "had", "do", "does", "did", "will", "would", "can", "could", "should",
     "may", "might", "must", "get", "got", "go", "goes", "went", "gone",
     "need", "needs", "stay", "run", "ran", "come", "came", "see", "saw",
     "know", "think", "say", "said", "make", "made", "take", "took", "hope",
     "pray", "help", "keep", "feel", "felt", "hear", "heard"]
)

ADJECTIVE_LEXICON = frozenset(
    ["safe", "big", "bad", "good", "scared", "afraid", "huge", "small", "new",
     "old", "free", "open", "great", "terrible", "awful", "crazy", "strong",
     "dark", "loud", "okay", "ok", "fine", "many", "much", "more", "worst",
     "horrible", "sad", "happy"]
)

_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "less", "ish", "al", "ic")

_URL_RE = re.compile(r"^(https?://|www\.)", re.IGNORECASE)
_SIGIL_RE = re.compile(r"^[@#][a-z0-9_]", re.IGNORECASE)
_NUMERIC_RE = re.compile(r"^[0-9]+([.,:/-][0-9]+)*%?$")


class AlignmentError(ValueError):
    """A tag layer does not line up one-per-token with the tokenization."""

    def __init__(self, tweet_id: str, layer: str, n_tags: int, n_tokens: int):
        self.tweet_id = tweet_id
        self.layer = layer
        super().__init__(
            f"tweet {tweet_id!r}: {layer} has {n_tags} tags for {n_tokens} tokens"
        )


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    ark_tag: str | None = None
    ptb_tag: str | None = None
    chunk_tag: str | None = None


@dataclass(frozen=True)
class TaggedTweet:
    tweet_id: str
    tokens: tuple[TaggedToken, ...]

    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    @property
    def has_ark(self) -> bool:
        return bool(self.tokens) and self.tokens[0].ark_tag is not None

    @property
    def has_ptb(self) -> bool:
        return bool(self.tokens) and self.tokens[0].ptb_tag is not None

    @property
    def has_chunk(self) -> bool:
        return bool(self.tokens) and self.tokens[0].chunk_tag is not None


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _split_piece(piece: str) -> list[str]:
    """Peel leading/trailing punctuation characters into their own tokens."""
    i, j = 0, len(piece) - 1
    left: list[str] = []
    while i <= j and _is_punct(piece[i]):
        left.append(piece[i])
        i += 1
    right: list[str] = []
    while j >= i and _is_punct(piece[j]):
        right.append(piece[j])
        j -= 1
    core = piece[i : j + 1]
    out = left
    if core:
        out.append(core)
    out.extend(reversed(right))
    return out


def tokenize(text: str) -> list[str]:
    """Deterministic, lowercasing tokenization of one message."""
    tokens: list[str] = []
    for piece in text.split():
        if _URL_RE.match(piece):
            tokens.append(piece)  # URLs verbatim, case preserved
            continue
        piece = piece.lower()
        if _SIGIL_RE.match(piece):
            # Keep the @/# sigil attached; peel only trailing punctuation.
            j = len(piece) - 1
            trailing: list[str] = []
            while j > 1 and _is_punct(piece[j]):
                trailing.append(piece[j])
                j -= 1
            tokens.append(piece[: j + 1])
            tokens.extend(reversed(trailing))
            continue
        tokens.extend(_split_piece(piece))
    return tokens


def attach_tags(
    tokens: list[str],
    ark_tags: tuple[str, ...] | list[str] | None = None,
    ptb_tags: tuple[str, ...] | list[str] | None = None,
    chunk_tags: tuple[str, ...] | list[str] | None = None,
    tweet_id: str = "",
) -> TaggedTweet:
    """Align optional tag layers with a token sequence.

    Each provided layer must have exactly one tag per token; a layer is
    all-or-nothing for the whole tweet.
    """
    layers = {"ark_tags": ark_tags, "ptb_tags": ptb_tags, "chunk_tags": chunk_tags}
    for name, layer in layers.items():
        if layer is not None and len(layer) != len(tokens):
            raise AlignmentError(tweet_id, name, len(layer), len(tokens))
    tagged = tuple(
        TaggedToken(
            surface=token,
            ark_tag=ark_tags[i] if ark_tags is not None else None,
            ptb_tag=ptb_tags[i] if ptb_tags is not None else None,
            chunk_tag=chunk_tags[i] if chunk_tags is not None else None,
        )
        for i, token in enumerate(tokens)
    )
    return TaggedTweet(tweet_id=tweet_id, tokens=tagged)


def _open_class_tag(token: str) -> str:
    # Heuristic fallback for open-class words; noun is the default.
    if token in ADVERB_LEXICON:
        return "R"
    if token in VERB_LEXICON:
        return "V"
    if token in ADJECTIVE_LEXICON:
        return "A"
    if token.endswith("ly"):
        return "R"
    if token.endswith(("ing", "ed")):
        return "V"
    if token.endswith(_ADJ_SUFFIXES):
        return "A"
    return "N"


def fallback_ark_tags(tokens: list[str]) -> list[str]:
    """Rule-based ARK-style tag per token; deterministic, list-driven."""
    tags = []
    for token in tokens:
        if token.startswith("@") and len(token) > 1:
            tags.append("@")
        elif token.startswith("#") and len(token) > 1:
            tags.append("#")
        elif _URL_RE.match(token):
            tags.append("U")
        elif all(_is_punct(ch) for ch in token):
            tags.append("!")
        elif token in PREPOSITIONS:
            tags.append("P")
        elif token in DETERMINERS:
            tags.append("D")
        elif token in CONTRACTIONS:
            tags.append("L")
        elif _NUMERIC_RE.match(token):
            tags.append("$")
        else:
            tags.append(_open_class_tag(token))
    return tags


def tag_raw_tweet(tweet: RawTweet, use_fallback: bool = False) -> TaggedTweet:
    """Tokenize a raw tweet and attach whatever layers it carries.

    With use_fallback, tweets lacking an ARK layer get fallback tags so the
    tag-dependent feature classes stay usable.
    """
    tokens = tokenize(tweet.text)
    ark = tweet.ark_tags
    if ark is None and use_fallback:
        ark = tuple(fallback_ark_tags(tokens))
    return attach_tags(
        tokens,
        ark_tags=ark,
        ptb_tags=tweet.ptb_tags,
        chunk_tags=tweet.chunk_tags,
        tweet_id=tweet.id,
    )
