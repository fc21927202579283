import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gendermt.annotator import (
    GATED_RULES, Lexicons, RuleMatch, annotate_corpus, annotate_pair, match_rules,
    read_lexicon, resolve_alignment,
)
from gendermt.corpus_io import Lang, ParallelPair, TaggedSentence, TaggedToken, plain_sentence, read_annotations
from gendermt.labels import LISTENER_F, LISTENER_M, SPEAKER_F, SPEAKER_M

from conftest import GOLD


def tok(surface, tag="OTHER", **feats):
    return TaggedToken(surface, tag, {k: str(v) for k, v in feats.items()})


def ar(*tokens):
    return TaggedSentence(Lang.AR, tuple(tokens))


def pair(tgt, en="", links=()):
    return ParallelPair(0, plain_sentence(en, Lang.EN), tgt, frozenset(links))


I_PRON = tok("أنا", "PRON_S", person=1, number="sing")
YOU_PRON = tok("أنت", "PRON_S", person=2, number="sing")
BECAME = tok("أصبحت", "VB", lemma="أصبح")


def test_lexicon_defaults(lex):
    assert {"يا", "أيها", "أيتها"} <= lex.call_particles
    assert {"كان", "أصبح"} <= lex.incomplete_verbs
    assert lex.en_first_person == {"i"} and lex.en_second_person == {"you"}


def test_read_lexicon_comments(tmp_path):
    path = tmp_path / "lex.txt"
    path.write_text("# header\nكان\n\n  أصبح  # trailing\n", encoding="utf-8")
    assert read_lexicon(path) == {"كان", "أصبح"}


def test_lexicons_from_files_override(tmp_path):
    path = tmp_path / "cp.txt"
    path.write_text("وا\n", encoding="utf-8")
    lex = Lexicons.from_files(call_particles=path)
    assert lex.call_particles == {"وا"}
    assert "كان" in lex.incomplete_verbs


def test_r8_speaker_masc(lex):
    [m] = match_rules(ar(I_PRON, tok("متأكد", "JJ", gender="m")), lex)
    assert m == RuleMatch("R8", (0, 1), SPEAKER_M, False, 1)


def test_r6_call_particle(lex):
    [m] = match_rules(ar(tok("يا", "CALL_PART"), tok("رجل", "NN", gender="m")), lex)
    assert (m.rule_id, m.label, m.span) == ("R6", LISTENER_M, (0, 1))


def test_r4_second_person_feminine_verb(lex):
    verb = tok("تلعبين", "VB", person=2, number="sing", gender="f")
    [m] = match_rules(ar(YOU_PRON, verb), lex)
    assert (m.rule_id, m.label, m.gender_source_index) == ("R4", LISTENER_F, 1)


def test_empty_sentence(lex):
    assert match_rules(ar(), lex) == []


def test_donor_without_gender_abstains(lex):
    assert match_rules(ar(I_PRON, tok("بخير", "JJ")), lex) == []


def test_non_arabic_rejected(lex):
    with pytest.raises(ValueError):
        match_rules(plain_sentence("I am sure", Lang.EN), lex)


@pytest.mark.parametrize("tokens, rule, label", [
    ([tok("علمتك", "VB", lemma="علم", clitic_person=2, clitic_number="sing", person=1, number="sing"),
      tok("مجتهدا", "JJ", gender="m")], "R1", LISTENER_M),
    ([tok("وجدت", "VB", lemma="وجد", person=1, number="sing"), tok("ك", "PRON_O", person=2, number="sing"),
      tok("صادقة", "JJ", gender="f")], "R1", LISTENER_F),
    ([YOU_PRON, tok("متعبة", "JJ", gender="f")], "R2", LISTENER_F),
    ([YOU_PRON, tok("كنت", "VBI", person=2, number="sing"), tok("متعبا", "JJ", gender="m")], "R3", LISTENER_M),
    ([YOU_PRON, tok("كنت", "VB", lemma="كان", person=2, number="sing"), tok("متعبا", "JJ", gender="m")],
     "R3", LISTENER_M),
    ([tok("اجلس", "VB", verbform="imperative", person=2, number="sing", gender="m")], "R5", LISTENER_M),
    ([tok("أيتها", "CALL_PART"), tok("الجميلة", "JJ", gender="f")], "R6", LISTENER_F),
    ([tok("أيها", "OTHER"), tok("الرجل", "NN", gender="m")], "R6", LISTENER_M),
    ([tok("جعلتني", "VB", lemma="جعل", person=2, number="sing", gender="m", clitic_person=1,
          clitic_number="sing"), tok("سعيدة", "JJ", gender="f")], "R7", SPEAKER_F),
    ([tok("جعل", "VB", person=3, number="sing"), tok("ني", "PRON_O", person=1, number="sing"),
      tok("سعيدا", "JJ", gender="m")], "R7", SPEAKER_M),
    ([I_PRON, tok("كنت", "VBI", person=1, number="sing"), tok("متأكدة", "JJ", gender="f")], "R9", SPEAKER_F),
])
def test_single_rule_fixtures(lex, tokens, rule, label):
    matches = match_rules(ar(*tokens), lex)
    assert [(m.rule_id, m.label) for m in matches] == [(rule, label)]
    assert not matches[0].needs_alignment


def test_gated_rules_on_ambiguous_verb(lex):
    sent = ar(BECAME, tok("سعيدا", "JJ", gender="m"))
    matches = match_rules(sent, lex)
    assert [(m.rule_id, m.label, m.needs_alignment) for m in matches] == [
        ("R10", LISTENER_M, True), ("R11", SPEAKER_M, True)]
    assert match_rules(sent, lex, gated=False) == []


def test_r10_blocked_by_second_person_clitic(lex):
    verb = tok("جعلتك", "VB", clitic_person=2, clitic_number="sing")
    ids = [m.rule_id for m in match_rules(ar(verb, tok("سعيدا", "JJ", gender="m")), lex)]
    assert ids == ["R11"]


def test_verb_with_person_not_gated(lex):
    verb = tok("أصبحت", "VB", person=3, number="sing", gender="f")
    assert match_rules(ar(verb, tok("سعيدة", "JJ", gender="f")), lex) == []


def test_contiguity_blocks_intervening_adverb(lex):
    assert match_rules(ar(I_PRON, tok("جدا", "RB"), tok("متأكد", "JJ", gender="m")), lex) == []


def test_match_order_is_start_then_rule(lex):
    imperative_f = tok("اذهبي", "VB", verbform="imperative", person=2, number="sing", gender="f")
    sent = ar(I_PRON, tok("متأكدة", "JJ", gender="f"), imperative_f)
    assert [(m.rule_id, m.span[0]) for m in match_rules(sent, lex)] == [("R8", 0), ("R4", 2), ("R5", 2)]


def _gated_pair(en, links, gender="m"):
    sent = ar(BECAME, tok("سعيد", "JJ", gender=gender))
    return pair(sent, en, links)


def test_resolve_with_i(lex):
    p = _gated_pair("I became happy", {(0, 0), (1, 0), (2, 1)})
    r10, r11 = match_rules(p.tgt, lex)
    assert resolve_alignment(r11, p, lex) == SPEAKER_M
    assert resolve_alignment(r10, p, lex) is None


def test_resolve_with_you_uppercase(lex):
    p = _gated_pair("You became happy", {(0, 0), (1, 0), (2, 1)}, "f")
    r10, r11 = match_rules(p.tgt, lex)
    assert resolve_alignment(r10, p, lex) == LISTENER_F
    assert resolve_alignment(r11, p, lex) is None


def test_resolve_neither_or_both(lex):
    p = _gated_pair("she became happy", {(0, 0), (1, 0), (2, 1)})
    assert all(resolve_alignment(m, p, lex) is None for m in match_rules(p.tgt, lex))
    p = _gated_pair("I told you happy", {(0, 0), (2, 0), (3, 1)})
    assert all(resolve_alignment(m, p, lex) is None for m in match_rules(p.tgt, lex))


def test_resolve_only_uses_aligned_words(lex):
    # "I" is in the sentence but not aligned to the matched span
    sent = ar(tok("قال", "OTHER"), BECAME, tok("سعيدا", "JJ", gender="m"))
    p = pair(sent, "I said he became happy", {(0, 0), (1, 0), (3, 1), (4, 2)})
    assert all(resolve_alignment(m, p, lex) is None for m in match_rules(p.tgt, lex))


def test_resolve_span_out_of_range(lex):
    p = _gated_pair("I became happy", {(0, 0)})
    bogus = RuleMatch("R11", (0, 5), SPEAKER_M, True, 1)
    with pytest.raises(ValueError):
        resolve_alignment(bogus, p, lex)


def test_annotate_agreeing_duplicates(lex):
    sent = ar(YOU_PRON, tok("متعبة", "JJ", gender="f"),
              tok("تلعبين", "VB", person=2, number="sing", gender="f"))
    labels, fired = annotate_pair(pair(sent), lex)
    assert labels == {LISTENER_F}
    assert [m.rule_id for m in fired] == ["R2", "R4"]


def test_annotate_conflict_abstains(lex):
    sent = ar(tok("يا", "CALL_PART"), tok("رجل", "NN", gender="m"),
              tok("تلعبين", "VB", person=2, number="sing", gender="f"))
    labels, fired = annotate_pair(pair(sent), lex)
    assert labels == frozenset() and fired == []


def test_annotate_conflict_only_drops_that_role(lex):
    sent = ar(I_PRON, tok("متأكد", "JJ", gender="m"), tok("يا", "CALL_PART"), tok("رجل", "NN", gender="m"),
              tok("تلعبين", "VB", person=2, number="sing", gender="f"))
    labels, fired = annotate_pair(pair(sent), lex)
    assert labels == {SPEAKER_M}
    assert [m.rule_id for m in fired] == ["R8"]


def test_gated_label_never_overrides_plain(lex):
    sent = ar(I_PRON, tok("متأكدة", "JJ", gender="f"), BECAME, tok("سعيدا", "JJ", gender="m"))
    p = pair(sent, "I am sure I became happy", {(0, 0), (1, 0), (2, 1), (3, 2), (4, 2), (5, 3)})
    labels, fired = annotate_pair(p, lex)
    assert labels == {SPEAKER_F}
    assert [m.rule_id for m in fired] == ["R8"]


def test_arabic_only_mode_skips_gated(lex):
    p = _gated_pair("I became happy", {(0, 0), (1, 0), (2, 1)})
    assert annotate_pair(p, lex, use_alignment=False) == (frozenset(), [])
    assert annotate_pair(p, lex)[0] == {SPEAKER_M}


def test_annotate_corpus_counts(lex, gold_pairs):
    records, summary = annotate_corpus(gold_pairs[:4], lex)
    assert [r.id for r in records] == [0, 1, 2, 3]
    assert summary.labeled == 4 and summary.total == 4
    assert summary.per_class == {SPEAKER_M: 1, SPEAKER_F: 1, LISTENER_M: 1, LISTENER_F: 1}


def test_annotate_corpus_nothing_fires(lex):
    pairs = [pair(ar(tok("الجو", "NN", gender="m"), tok("جميل", "JJ", gender="m")))]
    _, summary = annotate_corpus(pairs, lex)
    assert summary.labeled == 0 and summary.fraction == 0.0


def test_annotate_corpus_fraction(lex, gold_pairs):
    records, summary = annotate_corpus(gold_pairs, lex)
    assert summary.fraction == sum(bool(r.labels) for r in records) / len(records)


def test_gold_corpus_agreement(lex, gold_pairs):
    records, _ = annotate_corpus(gold_pairs, lex)
    assert records == read_annotations(GOLD / "gold.jsonl")
    records, _ = annotate_corpus(gold_pairs, lex, use_alignment=False)
    assert records == read_annotations(GOLD / "gold_arabic_only.jsonl")


# --- properties over random tagged sentences --------------------------------

_SURFACES = ["أنا", "أنت", "أصبحت", "يا", "علمتك", "سعيد", "رجل", "جدا", "كان"]
_TAGS = ["PRON_S", "PRON_O", "VB", "VBI", "JJ", "NN", "CALL_PART", "RB", "OTHER"]


@st.composite
def random_token(draw):
    feats = {}
    for key, values in [("gender", "mf"), ("person", "123"), ("number", ["sing", "plur"]),
                        ("verbform", ["perf", "imperative"]), ("clitic_person", "12"),
                        ("clitic_number", ["sing"])]:
        if draw(st.booleans()):
            feats[key] = draw(st.sampled_from(list(values)))
    return TaggedToken(draw(st.sampled_from(_SURFACES)), draw(st.sampled_from(_TAGS)), feats)


@st.composite
def random_pair(draw):
    toks = draw(st.lists(random_token(), max_size=7))
    en = draw(st.lists(st.sampled_from(["I", "you", "You", "she", "happy", "became"]), max_size=6))
    links = set()
    if toks and en:
        links = draw(st.sets(st.tuples(st.integers(0, len(en) - 1), st.integers(0, len(toks) - 1)),
                             max_size=8))
    return ParallelPair(0, TaggedSentence(Lang.EN, tuple(TaggedToken(w) for w in en)),
                        ar(*toks), frozenset(links))


@settings(max_examples=400, deadline=None)
@given(random_pair())
def test_annotation_properties(p):
    lex = Lexicons()
    matches = match_rules(p.tgt, lex)
    # deterministic, ordered, donor traceable, gating flag exact
    assert matches == match_rules(p.tgt, lex)
    assert [(m.span[0], m.rule_number) for m in matches] == sorted((m.span[0], m.rule_number) for m in matches)
    for m in matches:
        start, end = m.span
        assert 0 <= start <= m.gender_source_index <= end < len(p.tgt)
        assert p.tgt.tokens[m.gender_source_index].get("gender") == m.label.gender.value
        assert m.needs_alignment == (m.rule_id in GATED_RULES)

    labels, fired = annotate_pair(p, lex)
    roles = [label.role for label in labels]
    assert len(roles) == len(set(roles))
    assert {m.label for m in fired} == set(labels)

    plain, _ = annotate_pair(p, lex, use_alignment=False)
    # gating only fills roles that plain rules left empty
    for label in plain:
        assert label in labels
    plain_roles = {label.role for label in plain}
    for label in labels - plain:
        assert label.role not in plain_roles
