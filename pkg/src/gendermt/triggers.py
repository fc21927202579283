"""English trigger sequences that route a sentence to the gender-adapted model.

Pattern grammar (one pattern per line in a pattern file)::

    line     := [ID ":"] ["^"] element+
    element  := literal | tagset [ "*" | "+" ]
    literal  := '"' word (" " word)* '"'     case-insensitive surface match
    tagset   := TAG | "[" TAG (" " TAG)* "]"  bracket = any of the tags

``*`` and ``+`` consume the longest run of matching tokens and never give
tokens back. ``^`` anchors the pattern to the first token. Blank lines and
``#`` comments are ignored. Patterns without an ID are numbered ``P1``,
``P2``, ... in file order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .corpus_io import TAGS, Lang, TaggedSentence

BASE = "base"
ADAPTED = "adapted"


@dataclass(frozen=True)
class Literal:
    words: tuple[str, ...]


@dataclass(frozen=True)
class TagSet:
    tags: frozenset[str]
    repeat: str = ""  # "", "*" or "+"


@dataclass(frozen=True)
class TriggerPattern:
    pattern_id: str
    elements: tuple
    anchored_start: bool = False

    def match_at(self, tokens, start: int) -> int | None:
        """Index of the last matched token, or None."""
        pos = start
        for el in self.elements:
            if isinstance(el, Literal):
                n = len(el.words)
                if pos + n > len(tokens):
                    return None
                if any(tokens[pos + k].surface.lower() != w for k, w in enumerate(el.words)):
                    return None
                pos += n
            elif el.repeat:
                run = pos
                while run < len(tokens) and tokens[run].tag in el.tags:
                    run += 1
                if el.repeat == "+" and run == pos:
                    return None
                pos = run
            else:
                if pos >= len(tokens) or tokens[pos].tag not in el.tags:
                    return None
                pos += 1
        return pos - 1 if pos > start else None


class PatternSyntaxError(ValueError):
    pass


_TOKEN_RE = re.compile(r'\s*(?:"([^"]*)"|\[([^\]]*)\]([*+]?)|([A-Z_]+)([*+]?))')
_ID_RE = re.compile(r"^\s*([A-Za-z][\w-]*)\s*:(.*)$")


def _tags(names: Sequence[str]) -> frozenset[str]:
    for name in names:
        if name not in TAGS:
            raise PatternSyntaxError(f"unknown tag {name!r}")
    if not names:
        raise PatternSyntaxError("empty tag set")
    return frozenset(names)


def parse_pattern(text: str, pattern_id: str) -> TriggerPattern:
    body = text.strip()
    anchored = body.startswith("^")
    if anchored:
        body = body[1:]
    elements = []
    pos = 0
    body = body.rstrip()
    while pos < len(body):
        m = _TOKEN_RE.match(body, pos)
        if m is None or m.end() == pos:
            raise PatternSyntaxError(f"cannot parse pattern at {body[pos:]!r}")
        literal, bracket, bracket_rep, tag, tag_rep = m.groups()
        if literal is not None:
            words = tuple(w.lower() for w in literal.split())
            if not words:
                raise PatternSyntaxError("empty literal")
            elements.append(Literal(words))
        elif bracket is not None:
            elements.append(TagSet(_tags(bracket.split()), bracket_rep))
        else:
            elements.append(TagSet(_tags([tag]), tag_rep))
        pos = m.end()
    if not elements:
        raise PatternSyntaxError("empty pattern")
    return TriggerPattern(pattern_id, tuple(elements), anchored)


def parse_pattern_file(path) -> list[TriggerPattern]:
    patterns = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            m = _ID_RE.match(line)
            if m:
                pid, body = m.group(1), m.group(2)
            else:
                pid, body = f"P{len(patterns) + 1}", line
            try:
                patterns.append(parse_pattern(body, pid))
            except PatternSyntaxError as exc:
                raise PatternSyntaxError(f"{path}:{lineno}: {exc}") from None
    return patterns


DEFAULT_PATTERNS = (
    parse_pattern('"I am" RB* JJ', "T1"),
    parse_pattern('"you are" [JJ VBG]', "T2"),
    parse_pattern("^VB", "T3"),
    parse_pattern('"you" VBP', "T4"),
    parse_pattern('"you" JJ', "T5"),
)


def match_triggers(sentence: TaggedSentence, patterns: Sequence[TriggerPattern] = DEFAULT_PATTERNS):
    """Every ``(pattern_id, (start, end))`` match, by start then pattern order."""
    if sentence.lang is not Lang.EN:
        raise ValueError(f"trigger matching needs an English sentence, got {sentence.lang.value}")
    tokens = sentence.tokens
    found = []
    for start in range(len(tokens)):
        for pattern in patterns:
            if pattern.anchored_start and start > 0:
                continue
            end = pattern.match_at(tokens, start)
            if end is not None:
                found.append((pattern.pattern_id, (start, end)))
    return found


@dataclass(frozen=True)
class Route:
    decision: str
    matched: tuple[str, ...] = ()

    def to_json(self, ident: int) -> dict:
        return {"id": ident, "route": self.decision, "matched": list(self.matched)}


def route(sentence: TaggedSentence, patterns: Sequence[TriggerPattern] = DEFAULT_PATTERNS) -> Route:
    fired = {pid for pid, _ in match_triggers(sentence, patterns)}
    order = [p.pattern_id for p in patterns]
    matched = tuple(pid for pid in dict.fromkeys(order) if pid in fired)
    return Route(ADAPTED if matched else BASE, matched)


def route_corpus(sentences, patterns: Sequence[TriggerPattern] = DEFAULT_PATTERNS):
    """Route each sentence; returns ``(routes, {"base": n, "adapted": n})``."""
    routes = [route(s, patterns) for s in sentences]
    counts = {BASE: 0, ADAPTED: 0}
    for r in routes:
        counts[r.decision] += 1
    return routes, counts
