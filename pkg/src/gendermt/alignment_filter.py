"""Alignment-quality features and a keep/drop classifier for parallel pairs."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Sequence, Union

from .corpus_io import ParallelPair

KEEP = "keep"
DROP = "drop"
CLASSES = (KEEP, DROP)

FEATURE_NAMES = ("align_score", "src_len", "tgt_len", "unaligned_ratio", "one_to_one_ratio")


@dataclass(frozen=True)
class FilterFeatures:
    align_score: float
    src_len: int
    tgt_len: int
    unaligned_ratio: float
    one_to_one_ratio: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.align_score, self.src_len, self.tgt_len,
                self.unaligned_ratio, self.one_to_one_ratio)

    def __getitem__(self, index: int) -> float:
        return self.as_tuple()[index]


def extract_features(pair: ParallelPair) -> FilterFeatures:
    src_len, tgt_len = len(pair.src), len(pair.tgt)
    src_deg = Counter(i for i, _ in pair.links)
    tgt_deg = Counter(j for _, j in pair.links)

    total = src_len + tgt_len
    unaligned = (src_len - len(src_deg)) + (tgt_len - len(tgt_deg))
    unaligned_ratio = unaligned / total if total else 0.0

    if pair.links:
        one_to_one = sum(1 for i, j in pair.links if src_deg[i] == 1 and tgt_deg[j] == 1)
        one_to_one_ratio = one_to_one / len(pair.links)
    else:
        one_to_one_ratio = 0.0
    return FilterFeatures(pair.align_score, src_len, tgt_len, unaligned_ratio, one_to_one_ratio)


# ---------------------------------------------------------------------------
# decision tree

@dataclass(frozen=True)
class Leaf:
    label: str


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "Node"
    right: "Node"


Node = Union[Leaf, Split]


@dataclass(frozen=True)
class DecisionTree:
    root: Node

    def depth(self) -> int:
        def walk(node):
            if isinstance(node, Leaf):
                return 0
            return 1 + max(walk(node.left), walk(node.right))
        return walk(self.root)

    def to_json(self) -> dict:
        def enc(node):
            if isinstance(node, Leaf):
                return {"class": node.label}
            return {"feature": node.feature, "threshold": node.threshold,
                    "left": enc(node.left), "right": enc(node.right)}
        return enc(self.root)

    @classmethod
    def from_json(cls, obj: dict) -> "DecisionTree":
        def dec(o):
            if not isinstance(o, dict):
                raise ValueError(f"tree node must be an object, got {o!r}")
            if "class" in o:
                if o["class"] not in CLASSES:
                    raise ValueError(f"unknown leaf class {o['class']!r}")
                return Leaf(o["class"])
            feature = o["feature"]
            if not isinstance(feature, int) or not 0 <= feature < len(FEATURE_NAMES):
                raise ValueError(f"invalid feature index {feature!r}")
            return Split(feature, float(o["threshold"]), dec(o["left"]), dec(o["right"]))
        try:
            return cls(dec(obj))
        except KeyError as exc:
            raise ValueError(f"tree node missing key {exc}") from None

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json(), f, indent=2)
            f.write("\n")

    @classmethod
    def load(cls, path) -> "DecisionTree":
        with open(path, encoding="utf-8") as f:
            return cls.from_json(json.load(f))


def _gini(counts: Counter) -> float:
    n = sum(counts.values())
    if n == 0:
        return 0.0
    return 1.0 - sum((c / n) ** 2 for c in counts.values())


def _majority(labels) -> str:
    counts = Counter(labels)
    return KEEP if counts[KEEP] >= counts[DROP] else DROP


def _best_split(rows, labels, min_leaf):
    """Lowest weighted Gini over midpoint thresholds; ties keep the first found."""
    n = len(rows)
    best = None  # (impurity, feature, threshold)
    for feature in range(len(FEATURE_NAMES)):
        order = sorted(range(n), key=lambda k: rows[k][feature])
        left = Counter()
        right = Counter(labels)
        for pos in range(n - 1):
            k = order[pos]
            left[labels[k]] += 1
            right[labels[k]] -= 1
            lo, hi = rows[k][feature], rows[order[pos + 1]][feature]
            if lo == hi:
                continue
            n_left = pos + 1
            if n_left < min_leaf or n - n_left < min_leaf:
                continue
            impurity = (n_left * _gini(left) + (n - n_left) * _gini(right)) / n
            # strict < keeps the lowest feature, then the lowest threshold
            if best is None or impurity < best[0] - 1e-12:
                best = (impurity, feature, (lo + hi) / 2.0)
    return best


def train_tree(samples, max_depth: int | None = None, min_leaf: int = 1) -> DecisionTree:
    """Grow a Gini tree over ``(FilterFeatures, "keep"|"drop")`` samples.

    ``max_depth=None`` grows until nodes are pure or unsplittable.
    """
    if not samples:
        raise ValueError("cannot train a tree on zero samples")
    if min_leaf < 1:
        raise ValueError("min_leaf must be at least 1")
    rows = []
    labels = []
    for features, label in samples:
        if label not in CLASSES:
            raise ValueError(f"unknown class {label!r}")
        rows.append(features.as_tuple() if isinstance(features, FilterFeatures) else tuple(features))
        labels.append(label)

    def grow(idx, depth):
        sub_labels = [labels[k] for k in idx]
        if len(set(sub_labels)) <= 1 or (max_depth is not None and depth >= max_depth):
            return Leaf(_majority(sub_labels))
        best = _best_split([rows[k] for k in idx], sub_labels, min_leaf)
        if best is None:
            return Leaf(_majority(sub_labels))
        _, feature, threshold = best
        left = [k for k in idx if rows[k][feature] <= threshold]
        right = [k for k in idx if rows[k][feature] > threshold]
        return Split(feature, threshold, grow(left, depth + 1), grow(right, depth + 1))

    return DecisionTree(grow(list(range(len(rows))), 0))


def classify(tree: DecisionTree, features) -> str:
    values = features.as_tuple() if isinstance(features, FilterFeatures) else tuple(features)
    node = tree.root
    while isinstance(node, Split):
        node = node.left if values[node.feature] <= node.threshold else node.right
    return node.label


# ---------------------------------------------------------------------------
# corpus filtering

@dataclass(frozen=True)
class Thresholds:
    min_score: float = 0.0
    max_unaligned: float = 1.0
    min_one_to_one: float = 0.0

    def keeps(self, f: FilterFeatures) -> bool:
        return (f.align_score >= self.min_score
                and f.unaligned_ratio <= self.max_unaligned
                and f.one_to_one_ratio >= self.min_one_to_one)


@dataclass(frozen=True)
class FilterReport:
    total: int
    kept: int
    dropped: int
    dropped_ids: tuple[int, ...]
    mode: str

    def to_json(self) -> dict:
        return {"mode": self.mode, "total": self.total, "kept": self.kept,
                "dropped": self.dropped, "dropped_ids": list(self.dropped_ids)}


def filter_corpus(pairs: Sequence[ParallelPair], criterion: DecisionTree | Thresholds):
    """Split ``pairs`` into kept pairs (input order) and a count report."""
    if isinstance(criterion, DecisionTree):
        mode = "tree"
        def keep(p):
            return classify(criterion, extract_features(p)) == KEEP
    else:
        mode = "thresholds"
        def keep(p):
            return criterion.keeps(extract_features(p))
    kept, dropped = [], []
    for p in pairs:
        (kept if keep(p) else dropped).append(p)
    report = FilterReport(len(pairs), len(kept), len(dropped), tuple(p.id for p in dropped), mode)
    return kept, report
