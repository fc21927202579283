"""Gender side-constraint tokens appended to English source sentences."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus_io import AnnotationRecord, ParallelPair
from .labels import (LISTENER_F, LISTENER_M, SPEAKER_F, SPEAKER_M, GenderLabel,
                     check_one_per_role, sorted_labels)


@dataclass(frozen=True)
class GenderTokenScheme:
    speaker_m: str = "<SPKR_M>"
    speaker_f: str = "<SPKR_F>"
    listener_m: str = "<LSTR_M>"
    listener_f: str = "<LSTR_F>"

    def __post_init__(self):
        tokens = self.tokens()
        if len(set(tokens)) != 4:
            raise ValueError(f"gender tokens must be distinct: {tokens}")
        for tok in tokens:
            if not tok or any(ch.isspace() for ch in tok):
                raise ValueError(f"gender token {tok!r} must be a single non-empty word")
            if not (tok.startswith("<") and tok.endswith(">")):
                raise ValueError(f"gender token {tok!r} must be wrapped in angle brackets")

    def tokens(self) -> tuple[str, str, str, str]:
        return (self.speaker_m, self.speaker_f, self.listener_m, self.listener_f)

    def token_for(self, label: GenderLabel) -> str:
        return self._by_label()[label]

    def label_for(self, token: str) -> GenderLabel | None:
        for label, tok in self._by_label().items():
            if tok == token:
                return label
        return None

    def _by_label(self) -> dict:
        return {SPEAKER_M: self.speaker_m, SPEAKER_F: self.speaker_f,
                LISTENER_M: self.listener_m, LISTENER_F: self.listener_f}


DEFAULT_SCHEME = GenderTokenScheme()


def inject(sentence: str, labels: Iterable[GenderLabel], scheme: GenderTokenScheme = DEFAULT_SCHEME) -> str:
    """Append one token per label, speaker token first."""
    labels = list(labels)
    check_one_per_role(labels)
    tokens = [scheme.token_for(label) for label in sorted_labels(labels)]
    if not tokens:
        return sentence
    if sentence == "":
        return " ".join(tokens)
    return " ".join([sentence, *tokens])


def strip(sentence: str, scheme: GenderTokenScheme = DEFAULT_SCHEME):
    """Remove the trailing run of gender tokens; returns ``(text, labels)``."""
    text = sentence
    labels = []
    while text:
        head, sep, last = text.rpartition(" ")
        label = scheme.label_for(last)
        if label is None:
            break
        labels.append(label)
        text = head
        if not sep:
            break
    check_one_per_role(labels)
    return text, frozenset(labels)


LABELED_ONLY = "labeled_only"
ALL = "all"


def build_training_set(
    pairs: Sequence[ParallelPair],
    annotations: Sequence[AnnotationRecord],
    mode: str = ALL,
    scheme: GenderTokenScheme = DEFAULT_SCHEME,
):
    """Return line-aligned ``(source_lines, target_lines)`` for NMT training.

    ``mode="all"`` keeps every pair and appends tokens where labels exist;
    ``mode="labeled_only"`` keeps only pairs with at least one label.
    """
    if mode not in (ALL, LABELED_ONLY):
        raise ValueError(f"unknown mode {mode!r}")
    if len(pairs) != len(annotations):
        raise ValueError(f"{len(pairs)} pairs but {len(annotations)} annotation records")
    src_lines, tgt_lines = [], []
    for pair, record in zip(pairs, annotations):
        if pair.id != record.id:
            raise ValueError(f"annotation id {record.id} does not match pair id {pair.id}")
        if mode == LABELED_ONLY and not record.labels:
            continue
        src_lines.append(inject(pair.src.text(), record.labels, scheme))
        tgt_lines.append(pair.tgt.text())
    return src_lines, tgt_lines
