"""Annotation precision/recall, gender-dependence statistics and corpus BLEU."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence

from .labels import ALL_LABELS, Role

NA = "n/a"


# ---------------------------------------------------------------------------
# precision / recall

@dataclass(frozen=True)
class ClassScore:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float | None:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else None

    @property
    def recall(self) -> float | None:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else None


@dataclass(frozen=True)
class PrReport:
    classes: tuple
    scores: dict

    def __getitem__(self, cls) -> ClassScore:
        return self.scores[cls]

    def to_json(self) -> dict:
        return {
            str(c): {"precision": self.scores[c].precision, "recall": self.scores[c].recall,
                     "tp": self.scores[c].tp, "fp": self.scores[c].fp, "fn": self.scores[c].fn}
            for c in self.classes
        }

    def render(self) -> str:
        names = [str(c) for c in self.classes]
        width = max(9, *(len(n) for n in names))
        rows = [["Metric", *names],
                ["Precision", *(_pct(self.scores[c].precision) for c in self.classes)],
                ["Recall", *(_pct(self.scores[c].recall) for c in self.classes)]]
        return "\n".join("  ".join(cell.ljust(width) for cell in row).rstrip() for row in rows)


def _pct(value: float | None) -> str:
    return NA if value is None else f"{100 * value:.2f}%"


def score_sets(predicted: Sequence[Iterable[Hashable]], gold: Sequence[Iterable[Hashable]], classes) -> PrReport:
    """Per-class tp/fp/fn where each sentence carries a set of classes."""
    if len(predicted) != len(gold):
        raise ValueError(f"{len(predicted)} predicted vs {len(gold)} gold sentences")
    counts = {c: [0, 0, 0] for c in classes}
    for pred, ref in zip(predicted, gold):
        pred, ref = set(pred), set(ref)
        for c in classes:
            if c in pred and c in ref:
                counts[c][0] += 1
            elif c in pred:
                counts[c][1] += 1
            elif c in ref:
                counts[c][2] += 1
    return PrReport(tuple(classes), {c: ClassScore(*v) for c, v in counts.items()})


def score_annotations(predicted, gold) -> PrReport:
    return score_sets(predicted, gold, ALL_LABELS)


def score_triggers(predicted: Sequence[bool], gold: Sequence[bool]) -> PrReport:
    """P/R of the "adapted" decision against gold gender-sensitivity flags."""
    return score_sets([{"adapted"} if p else set() for p in predicted],
                      [{"adapted"} if g else set() for g in gold], ("adapted",))


# ---------------------------------------------------------------------------
# dependence statistics

DEPENDENCE_CATEGORIES = ("None", "Speaker Only", "Listener Only", "Both Speaker and Listener")


@dataclass(frozen=True)
class DependenceStats:
    none_pct: float
    speaker_only_pct: float
    listener_only_pct: float
    both_pct: float
    total: int

    def rows(self):
        return list(zip(DEPENDENCE_CATEGORIES, (self.none_pct, self.speaker_only_pct,
                                                self.listener_only_pct, self.both_pct)))

    def to_json(self) -> dict:
        return {"total": self.total, "none": self.none_pct, "speaker_only": self.speaker_only_pct,
                "listener_only": self.listener_only_pct, "both": self.both_pct}

    def render(self) -> str:
        width = max(len(c) for c in DEPENDENCE_CATEGORIES)
        lines = [f"{'Gender Dependence'.ljust(width)}  Percentage of Sentences"]
        lines += [f"{name.ljust(width)}  {pct:.1f}%" for name, pct in self.rows()]
        return "\n".join(lines)


def dependence_stats(label_sets: Sequence[Iterable]) -> DependenceStats:
    """Share of sentences by which roles carry a label.

    Accepts label sets or annotation records (anything with ``.labels``).
    """
    if not label_sets:
        raise ValueError("dependence statistics need at least one sentence")
    counts = Counter()
    for item in label_sets:
        labels = getattr(item, "labels", item)
        roles = {label.role for label in labels}
        counts[(Role.SPEAKER in roles, Role.LISTENER in roles)] += 1
    n = len(label_sets)
    pct = {k: 100.0 * v / n for k, v in counts.items()}
    return DependenceStats(pct.get((False, False), 0.0), pct.get((True, False), 0.0),
                           pct.get((False, True), 0.0), pct.get((True, True), 0.0), n)


# ---------------------------------------------------------------------------
# BLEU

@dataclass(frozen=True)
class BleuReport:
    precisions: tuple[float, ...]
    matches: tuple[int, ...]
    totals: tuple[int, ...]
    brevity_penalty: float
    score: float
    candidate_len: int
    reference_len: int

    def to_json(self) -> dict:
        return {"score": self.score, "brevity_penalty": self.brevity_penalty,
                "precisions": list(self.precisions), "candidate_len": self.candidate_len,
                "reference_len": self.reference_len}

    def render(self) -> str:
        return format_bleu(self.score)


def format_bleu(score: float | None) -> str:
    return NA if score is None else f"{100 * score:.2f}"


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[k:k + n]) for k in range(len(tokens) - n + 1))


def ngram_stats(candidate: Sequence[str], reference: Sequence[str], max_n: int = 4):
    """Clipped match counts and candidate n-gram totals for one sentence."""
    matches, totals = [], []
    for n in range(1, max_n + 1):
        cand = _ngram_counts(candidate, n)
        ref = _ngram_counts(reference, n)
        matches.append(sum(min(c, ref[g]) for g, c in cand.items()))
        totals.append(sum(cand.values()))
    return matches, totals


def corpus_bleu(candidates: Sequence[Sequence[str]], references: Sequence[Sequence[str]],
                max_n: int = 4, smooth: bool = False) -> BleuReport:
    """Single-reference corpus BLEU over pre-tokenized sentences.

    ``smooth=True`` adds one to the numerator and denominator of every n >= 2
    precision (useful for sentence-level scores); the default is unsmoothed.
    An order with no candidate n-grams in the whole corpus counts as
    precision 1.0, so identical corpora of short sentences still score 1.0.
    """
    if len(candidates) != len(references):
        raise ValueError(f"{len(candidates)} candidates vs {len(references)} references")
    if not candidates:
        raise ValueError("BLEU needs a non-empty corpus")
    matches = [0] * max_n
    totals = [0] * max_n
    c_len = r_len = 0
    for cand, ref in zip(candidates, references):
        m, t = ngram_stats(cand, ref, max_n)
        for k in range(max_n):
            matches[k] += m[k]
            totals[k] += t[k]
        c_len += len(cand)
        r_len += len(ref)

    precisions = []
    for k in range(max_n):
        num, den = matches[k], totals[k]
        if smooth and k >= 1:
            num, den = num + 1, den + 1
        # no candidate n-grams of this order anywhere: vacuously precise,
        # shortness is left to the brevity penalty
        precisions.append(num / den if den else 1.0)

    if c_len == 0:
        bp = 0.0
    elif c_len > r_len:
        bp = 1.0
    else:
        bp = math.exp(1.0 - r_len / c_len)

    if min(precisions) == 0.0 or bp == 0.0:
        score = 0.0
    else:
        score = bp * math.exp(sum(math.log(p) for p in precisions) / max_n)
    return BleuReport(tuple(precisions), tuple(matches), tuple(totals), bp, score, c_len, r_len)


def sentence_bleu(candidate, reference, max_n: int = 4) -> float:
    return corpus_bleu([candidate], [reference], max_n, smooth=True).score


@dataclass(frozen=True)
class SystemComparison:
    baseline_full: BleuReport
    proposed_full: BleuReport
    baseline_subset: BleuReport | None
    proposed_subset: BleuReport | None
    subset_size: int
    total: int

    @staticmethod
    def _score(report):
        return None if report is None else report.score

    def deltas(self) -> dict:
        full = self.proposed_full.score - self.baseline_full.score
        subset = None
        if self.baseline_subset is not None:
            subset = self.proposed_subset.score - self.baseline_subset.score
        return {"full": full, "subset": subset}

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "subset_size": self.subset_size,
            "baseline": {"full": self.baseline_full.score, "subset": self._score(self.baseline_subset)},
            "proposed": {"full": self.proposed_full.score, "subset": self._score(self.proposed_subset)},
            "delta": self.deltas(),
        }

    def render(self) -> str:
        header = ("Model", "Full Test Set", "Gender Labeled Test Set")
        rows = [
            ("Baseline", format_bleu(self.baseline_full.score), format_bleu(self._score(self.baseline_subset))),
            ("Proposed", format_bleu(self.proposed_full.score), format_bleu(self._score(self.proposed_subset))),
        ]
        d = self.deltas()
        rows.append(("Delta", format_bleu(d["full"]), format_bleu(d["subset"])))
        widths = [max(len(r[k]) for r in [header, *rows]) for k in range(3)]
        return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
                         for row in [header, *rows])


def compare_systems(baseline_out, adapted_out, references, routes, max_n: int = 4) -> SystemComparison:
    """Baseline everywhere versus baseline on base-routed plus adapted on adapted-routed sentences.

    ``routes`` holds ``"base"``/``"adapted"`` decisions (or objects with a
    ``decision`` attribute). The subset columns score the adapted-routed
    sentences only.
    """
    n = len(references)
    if not (len(baseline_out) == len(adapted_out) == len(routes) == n):
        raise ValueError(
            f"misaligned inputs: baseline {len(baseline_out)}, adapted {len(adapted_out)}, "
            f"references {n}, routes {len(routes)}"
        )
    decisions = [getattr(r, "decision", r) for r in routes]
    for d in decisions:
        if d not in ("base", "adapted"):
            raise ValueError(f"unknown route {d!r}")
    proposed = [a if d == "adapted" else b for b, a, d in zip(baseline_out, adapted_out, decisions)]
    subset = [k for k, d in enumerate(decisions) if d == "adapted"]

    baseline_full = corpus_bleu(baseline_out, references, max_n)
    proposed_full = corpus_bleu(proposed, references, max_n)
    if subset:
        refs = [references[k] for k in subset]
        baseline_subset = corpus_bleu([baseline_out[k] for k in subset], refs, max_n)
        proposed_subset = corpus_bleu([adapted_out[k] for k in subset], refs, max_n)
    else:
        baseline_subset = proposed_subset = None
    return SystemComparison(baseline_full, proposed_full, baseline_subset, proposed_subset, len(subset), n)
