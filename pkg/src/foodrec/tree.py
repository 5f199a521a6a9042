"""From-scratch CART classifier with Gini impurity.

The tree is fully deterministic: splits with equal gain go to the lower
feature index and then the lower threshold, and leaves with tied counts
predict the lexicographically smallest label. Growth only stops at pure
nodes, identical feature vectors, ``max_depth`` or ``min_samples_split``,
so unbounded trees fit any conflict-free training set exactly.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from foodrec.errors import (
    DimensionMismatch,
    EmptyLabelSet,
    EmptyTrainingSet,
    ParseError,
    ShapeMismatch,
)

# Gains closer than this are treated as ties, so float noise cannot reorder them.
GAIN_TOL = 1e-12


@dataclass(frozen=True)
class TreeConfig:
    max_depth: Optional[int] = None
    min_samples_split: int = 2

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be a positive integer")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")


@dataclass(frozen=True)
class Leaf:
    counts: tuple[int, ...]  # aligned with the model's label_set
    label: str


@dataclass(frozen=True)
class Internal:
    feature: int
    threshold: float
    left: "Node"
    right: "Node"


Node = Union[Leaf, Internal]


@dataclass(frozen=True)
class DecisionTreeModel:
    root: Node
    feature_count: int
    label_set: tuple[str, ...]

    def predict(self, x) -> str:
        return predict(self, x)

    def predict_many(self, X) -> list[str]:
        return predict_many(self, X)

    def depth(self) -> int:
        def _depth(node):
            if isinstance(node, Leaf):
                return 0
            return 1 + max(_depth(node.left), _depth(node.right))

        return _depth(self.root)


def gini(labels) -> float:
    """1 - sum of squared class fractions."""
    labels = list(labels)
    if not labels:
        raise EmptyLabelSet("gini of an empty label multiset is undefined")
    n = len(labels)
    return 1.0 - sum((c / n) ** 2 for c in Counter(labels).values())


def _gini_from_counts(counts):
    # counts: (..., n_classes) array
    totals = counts.sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = counts / totals[..., None]
    return 1.0 - np.nansum(p * p, axis=-1)


def _leaf(counts, label_set):
    counts = tuple(int(c) for c in counts)
    # argmax returns the first maximum; label_set is sorted
    return Leaf(counts=counts, label=label_set[int(np.argmax(counts))])


def _best_split(X, y, n_classes):
    """Return (gain, feature, threshold) of the best split, or None."""
    n = len(y)
    parent_counts = np.bincount(y, minlength=n_classes)
    parent_impurity = _gini_from_counts(parent_counts.astype(float))
    best = None
    for feature in range(X.shape[1]):
        col = X[:, feature]
        order = np.argsort(col, kind="stable")
        xs = col[order]
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), y[order]] = 1.0
        left = np.cumsum(onehot, axis=0)[:-1]
        # candidate cut after position i is valid only between distinct values
        valid = xs[1:] > xs[:-1]
        if not valid.any():
            continue
        left = left[valid]
        right = parent_counts[None, :] - left
        n_left = left.sum(axis=1)
        n_right = n - n_left
        weighted = (n_left * _gini_from_counts(left) + n_right * _gini_from_counts(right)) / n
        gains = parent_impurity - weighted
        # lowest threshold among the (tolerance-equal) maxima
        i = int(np.flatnonzero(gains >= gains.max() - GAIN_TOL)[0])
        gain = float(gains[i])
        if best is None or gain > best[0] + GAIN_TOL:
            lo = xs[:-1][valid][i]
            hi = xs[1:][valid][i]
            best = (gain, feature, float((lo + hi) / 2.0))
    return best


def fit(features, labels, config: TreeConfig = TreeConfig()) -> DecisionTreeModel:
    """Grow an unpruned CART tree by greedy Gini-gain maximization."""
    labels = [str(label) for label in labels]
    if len(labels) == 0:
        raise EmptyTrainingSet("cannot fit a tree on zero examples")
    try:
        X = np.asarray(features, dtype=float)
    except ValueError as exc:
        raise ShapeMismatch(f"feature vectors have inconsistent dimensionality: {exc}") from exc
    if X.ndim != 2 or X.shape[0] != len(labels):
        raise ShapeMismatch(
            f"features shape {X.shape} incompatible with {len(labels)} labels"
        )
    label_set = tuple(sorted(set(labels)))
    index = {label: i for i, label in enumerate(label_set)}
    y = np.array([index[label] for label in labels], dtype=np.intp)
    n_classes = len(label_set)

    def grow(rows, depth):
        counts = np.bincount(y[rows], minlength=n_classes)
        if (
            np.count_nonzero(counts) <= 1
            or len(rows) < config.min_samples_split
            or (config.max_depth is not None and depth >= config.max_depth)
        ):
            return _leaf(counts, label_set)
        split = _best_split(X[rows], y[rows], n_classes)
        # A zero-gain split is still taken: on XOR-like data every single cut
        # has zero gain, and stopping there would leave training points wrong.
        if split is None:
            return _leaf(counts, label_set)
        _, feature, threshold = split
        go_left = X[rows, feature] <= threshold
        return Internal(
            feature=feature,
            threshold=threshold,
            left=grow(rows[go_left], depth + 1),
            right=grow(rows[~go_left], depth + 1),
        )

    root = grow(np.arange(len(labels)), 0)
    return DecisionTreeModel(root=root, feature_count=X.shape[1], label_set=label_set)


def predict(model: DecisionTreeModel, x) -> str:
    if len(x) != model.feature_count:
        raise DimensionMismatch(
            f"input has {len(x)} features, model expects {model.feature_count}"
        )
    node = model.root
    while isinstance(node, Internal):
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node.label


def predict_many(model: DecisionTreeModel, X) -> list[str]:
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return []
    if X.ndim != 2 or X.shape[1] != model.feature_count:
        raise DimensionMismatch(
            f"inputs of shape {X.shape} do not match {model.feature_count} features"
        )
    out = np.empty(len(X), dtype=object)

    def descend(node, rows):
        if len(rows) == 0:
            return
        if isinstance(node, Leaf):
            out[rows] = node.label
            return
        mask = X[rows, node.feature] <= node.threshold
        descend(node.left, rows[mask])
        descend(node.right, rows[~mask])

    descend(model.root, np.arange(len(X)))
    return list(out)


# -- text persistence ---------------------------------------------------------

def export_text(model: DecisionTreeModel) -> str:
    """Render the tree as indented lines; ``import_text`` reverses it exactly."""
    lines = [f"tree {model.feature_count} {' '.join(model.label_set)}"]

    def emit(node, depth):
        pad = "  " * depth
        if isinstance(node, Leaf):
            counts = " ".join(str(c) for c in node.counts)
            lines.append(f"{pad}leaf {node.label} {counts}")
        else:
            lines.append(f"{pad}node {node.feature} <= {node.threshold!r}")
            emit(node.left, depth + 1)
            emit(node.right, depth + 1)

    emit(model.root, 0)
    return "\n".join(lines) + "\n"


def import_text(text: str) -> DecisionTreeModel:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith("tree "):
        raise ParseError("tree text must start with a 'tree' header line")
    header = lines[0].split()
    try:
        feature_count = int(header[1])
    except (IndexError, ValueError) as exc:
        raise ParseError(f"bad tree header: {lines[0]!r}") from exc
    label_set = tuple(header[2:])
    pos = 1

    def parse(depth):
        nonlocal pos
        if pos >= len(lines):
            raise ParseError("unexpected end of tree text")
        line = lines[pos]
        indent = len(line) - len(line.lstrip(" "))
        if indent != 2 * depth:
            raise ParseError(f"line {pos + 1}: expected indentation {2 * depth}, got {indent}")
        parts = line.split()
        pos += 1
        try:
            if parts[0] == "leaf":
                counts = tuple(int(c) for c in parts[2:])
                if len(counts) != len(label_set):
                    raise ParseError(f"line {pos}: leaf has {len(counts)} counts")
                return Leaf(counts=counts, label=parts[1])
            if parts[0] == "node" and parts[2] == "<=":
                feature = int(parts[1])
                threshold = float(parts[3])
                left = parse(depth + 1)
                right = parse(depth + 1)
                return Internal(feature, threshold, left, right)
        except (IndexError, ValueError) as exc:
            raise ParseError(f"line {pos}: malformed tree line {line!r}") from exc
        raise ParseError(f"line {pos}: malformed tree line {line!r}")

    root = parse(0)
    if pos != len(lines):
        raise ParseError(f"trailing content after tree at line {pos + 1}")
    return DecisionTreeModel(root=root, feature_count=feature_count, label_set=label_set)
