"""Parser for markdown answers that interleave text with indexed images.

Answers reference retrieved images through placeholders of the exact form
``![alt text](IMG#k)`` and cite source documents as
``<sup>[n](DOC#n)</sup>``. Parsing is total: defects never raise, they are
reported through ``FailureFlags`` (a placeholder index outside ``[1, N]`` is
a hallucination; an ``IMG#`` token outside a well-formed placeholder makes
the whole answer invalid-format).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Mapping

from .errors import EnvelopeError, MissingUrl

QUERY_CATEGORIES = ("what-is", "how-to", "yes-or-no", "head-to-head")

# Placeholder grammar: alt text may be empty and may not contain ']' or a
# newline; the link target is an IMG#<digits> token with optional blanks.
IMAGE_REF_RE = re.compile(r"!\[([^\]\n]*)\]\([ \t]*IMG#(\d+)[ \t]*\)")
CITATION_RE = re.compile(r"<sup>\[(\d+)\]\(DOC#(\d+)\)</sup>")
_IMG_TOKEN = "IMG#"


@dataclass
class ImageReference:
    """One well-formed image placeholder found in an answer."""

    index: int
    alt_text: str
    char_span: tuple[int, int]


@dataclass
class FailureFlags:
    invalid_format: bool = False
    hallucinated_indices: list[int] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.invalid_format and not self.hallucinated_indices


@dataclass
class ImageContext:
    """Text immediately surrounding one image placeholder."""

    image_index: int
    before_text: str
    after_text: str


@dataclass
class ParsedAnswer:
    """Structured view of a markdown answer.

    ``text_segments`` holds the text between consecutive image references
    (plus the stretches before the first and after the last), so
    ``len(text_segments) == len(image_refs) + 1`` and interleaving segments
    with the reference spans reproduces the source.
    """

    source: str
    image_refs: list[ImageReference]
    text_segments: list[str]
    citations: list[int]
    flags: FailureFlags

    def in_range_refs(self) -> list[ImageReference]:
        hallucinated = set(self.flags.hallucinated_indices)
        return [ref for ref in self.image_refs if ref.index not in hallucinated]


@dataclass
class AnswerEnvelope:
    """The reason/category/answer triple of a structured model response."""

    reason: str
    category: str | None
    answer: str


def parse_answer(markdown: str, image_count: int) -> ParsedAnswer:
    """Parse an interleaved answer against a sample with ``image_count`` images.

    Never raises on the answer text itself; all defects become flags.
    """
    if image_count < 1:
        raise ValueError("image_count must be >= 1")
    refs: list[ImageReference] = []
    segments: list[str] = []
    cursor = 0
    for match in IMAGE_REF_RE.finditer(markdown):
        refs.append(
            ImageReference(
                index=int(match.group(2)),
                alt_text=match.group(1),
                char_span=match.span(),
            )
        )
        segments.append(markdown[cursor : match.start()])
        cursor = match.end()
    segments.append(markdown[cursor:])

    hallucinated: list[int] = []
    for ref in refs:
        if not 1 <= ref.index <= image_count and ref.index not in hallucinated:
            hallucinated.append(ref.index)

    # Any IMG# token left over once well-formed placeholders are excised
    # means the markdown structure is broken.
    invalid = _IMG_TOKEN in "".join(segments)

    citations = [int(m.group(2)) for m in CITATION_RE.finditer(markdown)]
    return ParsedAnswer(
        source=markdown,
        image_refs=refs,
        text_segments=segments,
        citations=citations,
        flags=FailureFlags(invalid_format=invalid, hallucinated_indices=hallucinated),
    )


def extract_image_sequence(parsed: ParsedAnswer, dedupe: bool = True) -> list[int]:
    """In-range image indices in document order.

    Hallucinated indices are excluded. With ``dedupe`` only the first
    occurrence of each index is kept, which is what the sequence metrics
    expect.
    """
    hallucinated = set(parsed.flags.hallucinated_indices)
    seen: set[int] = set()
    sequence: list[int] = []
    for ref in parsed.image_refs:
        if ref.index in hallucinated:
            continue
        if dedupe:
            if ref.index in seen:
                continue
            seen.add(ref.index)
        sequence.append(ref.index)
    return sequence


def extract_contexts(parsed: ParsedAnswer, window_cap: int = 500) -> list[ImageContext]:
    """One context per in-range image reference, in document order.

    ``before_text`` is the tail of the preceding text segment and
    ``after_text`` the head of the following one, each capped at
    ``window_cap`` characters after citation superscripts are stripped.
    """
    if window_cap < 1:
        raise ValueError("window_cap must be >= 1")
    hallucinated = set(parsed.flags.hallucinated_indices)
    contexts: list[ImageContext] = []
    for pos, ref in enumerate(parsed.image_refs):
        if ref.index in hallucinated:
            continue
        before = strip_citations(parsed.text_segments[pos])
        after = strip_citations(parsed.text_segments[pos + 1])
        contexts.append(
            ImageContext(
                image_index=ref.index,
                before_text=before[-window_cap:],
                after_text=after[:window_cap],
            )
        )
    return contexts


def extract_answer_envelope(raw: str) -> AnswerEnvelope:
    """Unwrap a structured reason/category/answer response.

    Models answering through the generation protocol wrap their markdown in a
    JSON object; models answering directly emit bare markdown. Bare markdown
    (including anything that fails to parse as a JSON object with an
    ``answer`` field) passes through unchanged. A structured envelope whose
    category is outside the query taxonomy raises ``EnvelopeError``.
    """
    text = raw.strip()
    if text.startswith("```"):
        # Tolerate a fenced ```json ... ``` wrapper around the envelope.
        lines = text.splitlines()
        if len(lines) >= 2 and lines[-1].strip().startswith("```"):
            text = "\n".join(lines[1:-1]).strip()
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, ValueError):
        return AnswerEnvelope(reason="", category=None, answer=raw)
    if not isinstance(data, dict) or not isinstance(data.get("answer"), str):
        return AnswerEnvelope(reason="", category=None, answer=raw)
    category = data.get("category")
    if category is not None and category not in QUERY_CATEGORIES:
        raise EnvelopeError(
            f"category {category!r} is not one of {', '.join(QUERY_CATEGORIES)}"
        )
    return AnswerEnvelope(
        reason=str(data.get("reason", "")), category=category, answer=data["answer"]
    )


def render_with_urls(parsed: ParsedAnswer, url_map: Mapping[int, str]) -> str:
    """Replace each in-range IMG#k target with its URL.

    Hallucinated placeholders are deleted wholesale. Only the IMG#k token is
    rewritten, so surrounding placeholder text (alt text, optional blanks)
    survives verbatim and an identity map reproduces the source.
    """
    hallucinated = set(parsed.flags.hallucinated_indices)
    parts: list[str] = []
    for pos, ref in enumerate(parsed.image_refs):
        parts.append(parsed.text_segments[pos])
        if ref.index in hallucinated:
            continue
        if ref.index not in url_map:
            raise MissingUrl(f"no URL for in-range image index {ref.index}")
        span_text = parsed.source[ref.char_span[0] : ref.char_span[1]]
        token_start = span_text.index(_IMG_TOKEN)
        token_end = token_start + len(_IMG_TOKEN)
        while token_end < len(span_text) and span_text[token_end].isdigit():
            token_end += 1
        parts.append(
            span_text[:token_start] + url_map[ref.index] + span_text[token_end:]
        )
    parts.append(parsed.text_segments[-1])
    return "".join(parts)


def strip_citations(text: str) -> str:
    return CITATION_RE.sub("", text)


def strip_markup(text: str) -> str:
    """Reduce markdown to prose for text metrics.

    Removes image placeholders, citation superscripts, leading heading
    markers, and table pipes; everything else is left to the tokenizer.
    """
    text = IMAGE_REF_RE.sub("", text)
    text = strip_citations(text)
    text = re.sub(r"(?m)^[ \t]{0,3}#+[ \t]*", "", text)
    return text.replace("|", " ")
