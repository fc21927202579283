"""Rule-based speaker/listener gender annotation of POS-tagged Arabic sentences.

Eleven contiguous-token rules look for a gendered adjective, noun or verb
whose agreement reveals who is speaking or being addressed:

    R1  doubly-transitive VB + 2nd sing object pronoun + JJ   listener, JJ gender
    R2  2nd sing subject pronoun + JJ                          listener, JJ gender
    R3  2nd sing subject pronoun + VBI + JJ                    listener, JJ gender
    R4  VB 2nd sing fem                                        listener, fem
    R5  imperative VB 2nd sing                                 listener, VB gender
    R6  calling particle + NN|JJ                               listener, NN/JJ gender
    R7  doubly-transitive VB + 1st sing object pronoun + JJ   speaker, JJ gender
    R8  1st sing subject pronoun + JJ                          speaker, JJ gender
    R9  1st sing subject pronoun + VBI + JJ                    speaker, JJ gender
    R10 person-less VB (no 2nd person clitic) + JJ             listener if aligned English has "you"
    R11 person-less VB + JJ                                    speaker if aligned English has "I"

R10 and R11 are alignment-gated: the verb form alone cannot tell first from
second (or third) person, so the label only stands once the aligned English
phrase settles it.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

from .corpus_io import AnnotationRecord, Lang, ParallelPair, TaggedSentence, TaggedToken
from .labels import ALL_LABELS, Gender, GenderLabel, Role

RULE_IDS = tuple(f"R{n}" for n in range(1, 12))
GATED_RULES = frozenset({"R10", "R11"})
VERB_TAGS = frozenset({"VB", "VBI"})


def read_lexicon(path) -> frozenset[str]:
    """One entry per line; ``#`` starts a comment."""
    entries = set()
    with open(path, encoding="utf-8") as f:
        for line in f:
            entry = line.split("#", 1)[0].strip()
            if entry:
                entries.add(entry)
    return frozenset(entries)


def _bundled(name: str) -> frozenset[str]:
    with resources.as_file(resources.files("gendermt") / "data" / name) as path:
        return read_lexicon(path)


@dataclass(frozen=True)
class Lexicons:
    doubly_transitive_verbs: frozenset[str] = field(
        default_factory=lambda: _bundled("doubly_transitive.txt"))
    incomplete_verbs: frozenset[str] = field(
        default_factory=lambda: _bundled("incomplete_verbs.txt"))
    call_particles: frozenset[str] = field(
        default_factory=lambda: _bundled("call_particles.txt"))
    en_first_person: frozenset[str] = frozenset({"i"})
    en_second_person: frozenset[str] = frozenset({"you"})

    @classmethod
    def from_files(cls, doubly_transitive=None, incomplete_verbs=None, call_particles=None):
        """Load lexicons, falling back to the bundled lists for paths left as None."""
        kwargs = {}
        if doubly_transitive is not None:
            kwargs["doubly_transitive_verbs"] = read_lexicon(doubly_transitive)
        if incomplete_verbs is not None:
            kwargs["incomplete_verbs"] = read_lexicon(incomplete_verbs)
        if call_particles is not None:
            kwargs["call_particles"] = read_lexicon(call_particles)
        return cls(**kwargs)


@dataclass(frozen=True)
class RuleMatch:
    rule_id: str
    span: tuple[int, int]  # inclusive
    label: GenderLabel
    needs_alignment: bool
    gender_source_index: int

    @property
    def rule_number(self) -> int:
        return int(self.rule_id[1:])


# ---------------------------------------------------------------------------
# token predicates

def _gender(tok: TaggedToken) -> Gender | None:
    value = tok.get("gender")
    return None if value is None else Gender(value)


def _is_sing(tok: TaggedToken, person: str) -> bool:
    return tok.get("person") == person and tok.get("number") == "sing"


def _subject_pronoun(tok, person):
    return tok.tag == "PRON_S" and _is_sing(tok, person)


def _object_pronoun(tok, person):
    return tok.tag == "PRON_O" and _is_sing(tok, person)


def _has_clitic(tok, person):
    return tok.get("clitic_person") == person and tok.get("clitic_number") == "sing"


def _gendered(tok, tags) -> bool:
    return tok.tag in tags and tok.get("gender") is not None


def _doubly_transitive(tok, lex):
    return tok.tag == "VB" and tok.lookup_key in lex.doubly_transitive_verbs


def _incomplete(tok, lex):
    return tok.tag == "VBI" or (tok.tag == "VB" and tok.lookup_key in lex.incomplete_verbs)


def _call_particle(tok, lex):
    return tok.tag == "CALL_PART" or tok.surface in lex.call_particles


# ---------------------------------------------------------------------------
# rules: each returns (end, donor) for a match starting at ``i`` or None

def _doubly_transitive_rule(person):
    def rule(toks, i, lex):
        if not _doubly_transitive(toks[i], lex):
            return None
        # object pronoun as its own token
        if i + 2 < len(toks) and _object_pronoun(toks[i + 1], person) and _gendered(toks[i + 2], {"JJ"}):
            return i + 2, i + 2
        # object pronoun attached to the verb
        if _has_clitic(toks[i], person) and i + 1 < len(toks) and _gendered(toks[i + 1], {"JJ"}):
            return i + 1, i + 1
        return None
    return rule


def _pronoun_jj_rule(person):
    def rule(toks, i, lex):
        if i + 1 < len(toks) and _subject_pronoun(toks[i], person) and _gendered(toks[i + 1], {"JJ"}):
            return i + 1, i + 1
        return None
    return rule


def _pronoun_vbi_jj_rule(person):
    def rule(toks, i, lex):
        if (i + 2 < len(toks) and _subject_pronoun(toks[i], person)
                and _incomplete(toks[i + 1], lex) and _gendered(toks[i + 2], {"JJ"})):
            return i + 2, i + 2
        return None
    return rule


def _r4(toks, i, lex):
    tok = toks[i]
    if tok.tag in VERB_TAGS and _is_sing(tok, "2") and tok.get("gender") == "f":
        return i, i
    return None


def _r5(toks, i, lex):
    tok = toks[i]
    if (tok.tag in VERB_TAGS and tok.get("verbform") == "imperative"
            and _is_sing(tok, "2") and tok.get("gender") is not None):
        return i, i
    return None


def _r6(toks, i, lex):
    if i + 1 < len(toks) and _call_particle(toks[i], lex) and _gendered(toks[i + 1], {"NN", "JJ"}):
        return i + 1, i + 1
    return None


def _ambiguous_verb_jj(toks, i):
    tok = toks[i]
    return (tok.tag in VERB_TAGS and tok.get("person") is None
            and i + 1 < len(toks) and _gendered(toks[i + 1], {"JJ"}))


def _r10(toks, i, lex):
    if _ambiguous_verb_jj(toks, i) and toks[i].get("clitic_person") != "2":
        return i + 1, i + 1
    return None


def _r11(toks, i, lex):
    if _ambiguous_verb_jj(toks, i):
        return i + 1, i + 1
    return None


# (rule id, role, fixed gender or None for the donor's gender, matcher)
_RULES = (
    ("R1", Role.LISTENER, None, _doubly_transitive_rule("2")),
    ("R2", Role.LISTENER, None, _pronoun_jj_rule("2")),
    ("R3", Role.LISTENER, None, _pronoun_vbi_jj_rule("2")),
    ("R4", Role.LISTENER, Gender.FEM, _r4),
    ("R5", Role.LISTENER, None, _r5),
    ("R6", Role.LISTENER, None, _r6),
    ("R7", Role.SPEAKER, None, _doubly_transitive_rule("1")),
    ("R8", Role.SPEAKER, None, _pronoun_jj_rule("1")),
    ("R9", Role.SPEAKER, None, _pronoun_vbi_jj_rule("1")),
    ("R10", Role.LISTENER, None, _r10),
    ("R11", Role.SPEAKER, None, _r11),
)


def match_rules(sentence: TaggedSentence, lex: Lexicons, gated: bool = True) -> list[RuleMatch]:
    """All rule matches, ordered by start position then rule number.

    With ``gated=False`` the alignment-gated rules are skipped and the
    result depends on the Arabic sentence alone.
    """
    if sentence.lang is not Lang.AR:
        raise ValueError(f"rule matching needs an Arabic sentence, got {sentence.lang.value}")
    toks = sentence.tokens
    matches = []
    for start in range(len(toks)):
        for rule_id, role, fixed, matcher in _RULES:
            if not gated and rule_id in GATED_RULES:
                continue
            hit = matcher(toks, start, lex)
            if hit is None:
                continue
            end, donor = hit
            gender = fixed if fixed is not None else _gender(toks[donor])
            if gender is None:
                continue
            matches.append(RuleMatch(
                rule_id, (start, end), GenderLabel(role, gender),
                rule_id in GATED_RULES, donor,
            ))
    return matches


def aligned_english(span: tuple[int, int], pair: ParallelPair) -> set[int]:
    start, end = span
    return {i for i, j in pair.links if start <= j <= end}


def resolve_alignment(match: RuleMatch, pair: ParallelPair, lex: Lexicons) -> GenderLabel | None:
    """Confirm a gated match from the aligned English pronouns, or abstain."""
    start, end = match.span
    if not (0 <= start <= end < len(pair.tgt)):
        raise ValueError(f"span {match.span} out of range for target of length {len(pair.tgt)}")
    words = {pair.src.tokens[i].surface.lower() for i in aligned_english(match.span, pair)}
    first = bool(words & lex.en_first_person)
    second = bool(words & lex.en_second_person)
    if first == second:
        return None
    if match.rule_id == "R11" and first:
        return match.label
    if match.rule_id == "R10" and second:
        return match.label
    return None


def annotate_pair(pair: ParallelPair, lex: Lexicons, use_alignment: bool = True):
    """Return ``(labels, fired)`` for one pair: at most one label per role.

    Ungated rules decide a role whenever any of them fires; gated matches
    only speak for a role the ungated rules left open. Disagreeing genders
    within the deciding group drop the role.
    """
    matches = match_rules(pair.tgt, lex, gated=use_alignment)
    confirmed = []
    for m in matches:
        if m.needs_alignment:
            label = resolve_alignment(m, pair, lex)
            if label is not None:
                confirmed.append(m)
        else:
            confirmed.append(m)

    labels = set()
    fired = []
    for role in Role:
        plain = [m for m in confirmed if m.label.role is role and not m.needs_alignment]
        gated = [m for m in confirmed if m.label.role is role and m.needs_alignment]
        deciding = plain or gated
        genders = {m.label.gender for m in deciding}
        if len(genders) != 1:
            continue
        label = GenderLabel(role, genders.pop())
        labels.add(label)
        fired.extend(m for m in confirmed if m.label == label and m.label.role is role)
    fired.sort(key=lambda m: (m.span[0], m.rule_number))
    return frozenset(labels), fired


@dataclass(frozen=True)
class AnnotationSummary:
    total: int
    labeled: int
    per_class: dict

    @property
    def fraction(self) -> float:
        return self.labeled / self.total if self.total else 0.0

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "labeled": self.labeled,
            "fraction": self.fraction,
            "per_class": {str(label): self.per_class[label] for label in ALL_LABELS},
        }


def annotate_corpus(pairs: Sequence[ParallelPair], lex: Lexicons, use_alignment: bool = True):
    """Annotate every pair in order; returns ``(records, summary)``."""
    records = []
    counts = Counter()
    labeled = 0
    for pair in pairs:
        labels, fired = annotate_pair(pair, lex, use_alignment)
        records.append(AnnotationRecord(pair.id, labels, tuple(m.rule_id for m in fired)))
        counts.update(labels)
        labeled += bool(labels)
    per_class = {label: counts[label] for label in ALL_LABELS}
    return records, AnnotationSummary(len(records), labeled, per_class)
