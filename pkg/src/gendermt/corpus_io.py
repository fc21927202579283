"""Reading and writing parallel text, Pharaoh alignments, tagged corpora and annotation records.

Tagged corpora are tab-separated, one token per line::

    0	أنا	PRON_S	person=1|number=sing
    1	متأكد	JJ	gender=m

with sentences separated by blank lines. Plain text corpora hold one
whitespace-tokenized sentence per line; their tokens get the tag ``OTHER``.
"""

from __future__ import annotations

import enum
import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .labels import Gender, GenderLabel, Role, sorted_labels

TAGS = frozenset({
    "JJ", "VB", "VBI", "NN", "PRON_S", "PRON_O", "CALL_PART",
    "RB", "VBG", "VBP", "MD", "PRP", "OTHER",
})

FEATURE_VALUES: Mapping[str, frozenset[str]] = {
    "gender": frozenset({"m", "f"}),
    "person": frozenset({"1", "2", "3"}),
    "number": frozenset({"sing", "dual", "plur"}),
    "verbform": frozenset({"perf", "imperf", "imperative"}),
    "clitic_person": frozenset({"1", "2", "3"}),
    "clitic_number": frozenset({"sing", "dual", "plur"}),
}
# free-valued, used for lexicon lookups
LEMMA = "lemma"

TAGGED_SUFFIXES = (".tags", ".conll")

_LINK_RE = re.compile(r"^([0-9]+)-([0-9]+)$")


class Lang(enum.Enum):
    EN = "EN"
    AR = "AR"


class CorpusError(ValueError):
    """A corpus file violates its declared format."""

    def __init__(self, message: str, path=None, lineno: int | None = None):
        self.path = None if path is None else str(path)
        self.lineno = lineno
        where = ""
        if self.path is not None:
            where = self.path if lineno is None else f"{self.path}:{lineno}"
            where += ": "
        elif lineno is not None:
            where = f"line {lineno}: "
        super().__init__(where + message)


class LineCountMismatch(CorpusError):
    def __init__(self, path_a, count_a: int, path_b, count_b: int):
        self.counts = {str(path_a): count_a, str(path_b): count_b}
        super().__init__(
            f"line count mismatch: {path_a} has {count_a}, {path_b} has {count_b}"
        )


def validate_feats(feats: Mapping[str, str]) -> None:
    for key, value in feats.items():
        if key == LEMMA:
            if not value or any(ch.isspace() for ch in value):
                raise ValueError(f"bad lemma value {value!r}")
            continue
        allowed = FEATURE_VALUES.get(key)
        if allowed is None:
            raise ValueError(f"unknown feature key {key!r}")
        if value not in allowed:
            raise ValueError(f"unknown feature value {key}={value!r}")


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    tag: str = "OTHER"
    feats: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.surface or any(ch.isspace() for ch in self.surface):
            raise ValueError(f"bad token surface {self.surface!r}")
        if self.tag not in TAGS:
            raise ValueError(f"unknown tag {self.tag!r}")
        validate_feats(self.feats)

    def get(self, key: str) -> str | None:
        return self.feats.get(key)

    @property
    def lookup_key(self) -> str:
        """Lemma when present, else surface."""
        return self.feats.get(LEMMA, self.surface)


@dataclass(frozen=True)
class TaggedSentence:
    lang: Lang
    tokens: tuple[TaggedToken, ...] = ()

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def text(self) -> str:
        return " ".join(self.surfaces)


@dataclass(frozen=True)
class ParallelPair:
    id: int
    src: TaggedSentence
    tgt: TaggedSentence
    links: frozenset[tuple[int, int]] = frozenset()
    align_score: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.align_score <= 1.0:
            raise ValueError(f"align_score {self.align_score} outside [0, 1]")
        for i, j in self.links:
            if not (0 <= i < len(self.src) and 0 <= j < len(self.tgt)):
                raise ValueError(
                    f"link {i}-{j} out of range for {len(self.src)}x{len(self.tgt)} pair"
                )


def plain_sentence(text: str, lang: Lang) -> TaggedSentence:
    return TaggedSentence(lang, tuple(TaggedToken(w) for w in text.split()))


# ---------------------------------------------------------------------------
# readers

def _read_lines(path) -> list[str]:
    with open(path, encoding="utf-8", newline="") as f:
        data = f.read()
    lines = data.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [line[:-1] if line.endswith("\r") else line for line in lines]


def read_text_corpus(path, lang: Lang) -> list[TaggedSentence]:
    return [plain_sentence(line, lang) for line in _read_lines(path)]


def parse_feats(text: str) -> dict[str, str]:
    if text == "_":
        return {}
    feats = {}
    for item in text.split("|"):
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ValueError(f"malformed feature {item!r}")
        if key in feats:
            raise ValueError(f"duplicate feature key {key!r}")
        feats[key] = value
    validate_feats(feats)
    return feats


def format_feats(feats: Mapping[str, str]) -> str:
    if not feats:
        return "_"
    return "|".join(f"{k}={v}" for k, v in feats.items())


def read_tagged_corpus(path, lang: Lang = Lang.AR) -> list[TaggedSentence]:
    sentences = []
    current: list[TaggedToken] = []
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            if current:
                sentences.append(TaggedSentence(lang, tuple(current)))
                current = []
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise CorpusError(f"expected 4 tab-separated fields, got {len(fields)}", path, lineno)
        index, surface, tag, feats = fields
        if not (index.isascii() and index.isdigit()) or int(index) != len(current):
            raise CorpusError(
                f"token index {index!r} is not consecutive (expected {len(current)})", path, lineno
            )
        try:
            current.append(TaggedToken(surface, tag, parse_feats(feats)))
        except ValueError as exc:
            raise CorpusError(str(exc), path, lineno) from None
    if current:
        sentences.append(TaggedSentence(lang, tuple(current)))
    return sentences


def is_tagged_path(path) -> bool:
    return str(path).endswith(TAGGED_SUFFIXES)


def read_sentences(path, lang: Lang, tagged: bool | None = None) -> list[TaggedSentence]:
    """Read a tagged or plain corpus; ``tagged=None`` decides by file suffix."""
    if tagged is None:
        tagged = is_tagged_path(path)
    return read_tagged_corpus(path, lang) if tagged else read_text_corpus(path, lang)


def parse_alignment(line: str, lineno: int | None = None, path=None) -> frozenset[tuple[int, int]]:
    links = set()
    for token in line.split():
        m = _LINK_RE.match(token)
        if m is None:
            raise CorpusError(f"malformed alignment link {token!r}", path, lineno)
        links.add((int(m.group(1)), int(m.group(2))))
    return frozenset(links)


def format_alignment(links: Iterable[tuple[int, int]]) -> str:
    return " ".join(f"{i}-{j}" for i, j in sorted(links))


def read_alignments(path) -> list[frozenset[tuple[int, int]]]:
    return [parse_alignment(line, n, path) for n, line in enumerate(_read_lines(path), start=1)]


def read_scores(path) -> list[float]:
    scores = []
    for lineno, line in enumerate(_read_lines(path), start=1):
        try:
            score = float(line)
        except ValueError:
            raise CorpusError(f"alignment score {line!r} is not a number", path, lineno) from None
        if not 0.0 <= score <= 1.0:
            raise CorpusError(f"alignment score {score} outside [0, 1]", path, lineno)
        scores.append(score)
    return scores


def read_parallel_corpus(
    src_path,
    tgt_path,
    align_path,
    score_path=None,
    *,
    src_tagged: bool | None = None,
    tgt_tagged: bool | None = None,
) -> list[ParallelPair]:
    """Read line-aligned source/target sentences with their Pharaoh alignments.

    For tagged files, "lines" are sentences. Without a score file every pair
    gets ``align_score`` 1.0; without an alignment file pairs have no links.
    """
    src = read_sentences(src_path, Lang.EN, src_tagged)
    tgt = read_sentences(tgt_path, Lang.AR, tgt_tagged)
    if len(src) != len(tgt):
        raise LineCountMismatch(src_path, len(src), tgt_path, len(tgt))
    if align_path is None:
        aligns = [frozenset()] * len(src)
    else:
        aligns = read_alignments(align_path)
    if len(aligns) != len(src):
        raise LineCountMismatch(src_path, len(src), align_path, len(aligns))
    if score_path is not None:
        scores = read_scores(score_path)
        if len(scores) != len(src):
            raise LineCountMismatch(src_path, len(src), score_path, len(scores))
    else:
        scores = [1.0] * len(src)

    pairs = []
    for idx, (s, t, links, score) in enumerate(zip(src, tgt, aligns, scores)):
        for i, j in sorted(links):
            if i >= len(s):
                raise CorpusError(
                    f"source index {i} out of range (sentence has {len(s)} tokens)",
                    align_path, idx + 1,
                )
            if j >= len(t):
                raise CorpusError(
                    f"target index {j} out of range (sentence has {len(t)} tokens)",
                    align_path, idx + 1,
                )
        pairs.append(ParallelPair(idx, s, t, links, score))
    return pairs


# ---------------------------------------------------------------------------
# writers

def write_lines(path, lines: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line + "\n")


def write_text_corpus(sentences: Sequence[TaggedSentence], path) -> None:
    write_lines(path, (s.text() for s in sentences))


def write_tagged_corpus(sentences: Sequence[TaggedSentence], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for sent in sentences:
            for i, tok in enumerate(sent.tokens):
                f.write(f"{i}\t{tok.surface}\t{tok.tag}\t{format_feats(tok.feats)}\n")
            f.write("\n")


def write_parallel_corpus(
    pairs: Sequence[ParallelPair],
    src_path,
    tgt_path,
    align_path,
    score_path=None,
    *,
    src_tagged: bool = False,
    tgt_tagged: bool = False,
) -> None:
    src = [p.src for p in pairs]
    tgt = [p.tgt for p in pairs]
    (write_tagged_corpus if src_tagged else write_text_corpus)(src, src_path)
    (write_tagged_corpus if tgt_tagged else write_text_corpus)(tgt, tgt_path)
    write_lines(align_path, (format_alignment(p.links) for p in pairs))
    if score_path is not None:
        write_lines(score_path, (repr(float(p.align_score)) for p in pairs))


def dumps_record(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def write_jsonl(records: Iterable[dict], path) -> None:
    write_lines(path, (dumps_record(r) for r in records))


def read_jsonl(path) -> list[dict]:
    records = []
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise CorpusError(f"invalid JSON: {exc.msg}", path, lineno) from None
    return records


@dataclass(frozen=True)
class AnnotationRecord:
    id: int
    labels: frozenset[GenderLabel]
    rules: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "labels": [
                {"role": lab.role.value, "gender": lab.gender.value}
                for lab in sorted_labels(self.labels)
            ],
            "rules": list(self.rules),
        }


def annotation_record(pair: ParallelPair, labels, matches) -> AnnotationRecord:
    return AnnotationRecord(pair.id, frozenset(labels), tuple(m.rule_id for m in matches))


def write_annotations(entries, path) -> None:
    """Write one JSON line per ``(pair, labels, matches)`` entry.

    ``AnnotationRecord`` objects are accepted as entries too.
    """
    records = []
    for entry in entries:
        if not isinstance(entry, AnnotationRecord):
            entry = annotation_record(*entry)
        records.append(entry.to_json())
    write_jsonl(records, path)


def parse_annotation(obj: dict, lineno: int | None = None, path=None) -> AnnotationRecord:
    try:
        labels = frozenset(
            GenderLabel(Role(lab["role"]), Gender(lab["gender"])) for lab in obj["labels"]
        )
        rules = tuple(str(r) for r in obj.get("rules", ()))
        ident = obj["id"]
        if not isinstance(ident, int) or isinstance(ident, bool):
            raise ValueError(f"id must be an integer, got {ident!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusError(f"bad annotation record: {exc}", path, lineno) from None
    return AnnotationRecord(ident, labels, rules)


def read_annotations(path) -> list[AnnotationRecord]:
    out = []
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"invalid JSON: {exc.msg}", path, lineno) from None
        out.append(parse_annotation(obj, lineno, path))
    return out


def ensure_parent(path) -> None:
    parent = Path(path).parent
    if str(parent) and not parent.exists():
        os.makedirs(parent, exist_ok=True)
