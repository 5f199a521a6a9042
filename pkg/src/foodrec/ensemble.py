"""Self-paced under-sampling ensemble (IMVB7) built on the CART base learner.

Each iteration scores the majority set with the current ensemble, groups the
samples into equal-width hardness bins, and draws a balanced under-sample
whose per-bin share is proportional to ``1 / (mean_hardness + alpha)``. The
self-pace factor ``alpha`` decays geometrically over the iterations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from foodrec import tree as cart
from foodrec.errors import (
    EmptyEnsemble,
    InvalidBinCount,
    InvalidTarget,
    NoNonEmptyBins,
    ParseError,
    SingleClassInput,
    DataError,
)
from foodrec.tree import DecisionTreeModel, TreeConfig

POSITIVE = "pos"
NEGATIVE = "neg"


@dataclass(frozen=True)
class SelfPaceSchedule:
    n_iterations: int
    alpha_start: float = 10.0
    alpha_end: float = 0.05

    def __post_init__(self):
        if self.n_iterations < 1:
            raise ValueError("n_iterations must be >= 1")
        if self.alpha_start <= 0 or self.alpha_end <= 0:
            raise ValueError("self-pace factors must be positive")
        if self.n_iterations > 1 and not self.alpha_start > self.alpha_end:
            raise ValueError("alpha_start must exceed alpha_end for a decreasing schedule")

    @property
    def values(self) -> tuple[float, ...]:
        n = self.n_iterations
        if n == 1:
            return (float(self.alpha_start),)
        ratio = self.alpha_end / self.alpha_start
        vals = [self.alpha_start * ratio ** (i / (n - 1)) for i in range(n)]
        vals[-1] = float(self.alpha_end)
        return tuple(vals)


@dataclass
class HardnessBins:
    k: int
    members: list[np.ndarray]  # per bin: indices into the majority set
    means: list[float]  # nan for empty bins

    def span(self, b: int) -> tuple[float, float]:
        return b / self.k, (b + 1) / self.k


@dataclass
class EnsembleState:
    base_models: list[DecisionTreeModel] = field(default_factory=list)
    # diagnostics: rows of every per-iteration training set
    training_sizes: list[int] = field(default_factory=list)

    @property
    def iteration(self) -> int:
        return len(self.base_models) - 1

    def score(self, X) -> np.ndarray:
        return predict_scores(self, X)


@dataclass
class BinarySplitSet:
    """Binary problem split into the larger (majority) and smaller (minority) side.

    ``minority_positive`` records which side carries the positive label; the
    roles are swapped at construction when the positive class is the larger one.
    """

    majority: np.ndarray
    minority: np.ndarray
    minority_positive: bool = True

    def __post_init__(self):
        self.majority = np.atleast_2d(np.asarray(self.majority, dtype=float))
        self.minority = np.atleast_2d(np.asarray(self.minority, dtype=float))
        if len(self.majority) < len(self.minority):
            self.majority, self.minority = self.minority, self.majority
            self.minority_positive = not self.minority_positive
        if len(self.minority) == 0 or self.minority.size == 0:
            raise DataError("binary problem needs at least one sample of each class")

    @classmethod
    def from_labels(cls, X, is_positive) -> "BinarySplitSet":
        X = np.asarray(X, dtype=float)
        is_positive = np.asarray(is_positive, dtype=bool)
        return cls(majority=X[~is_positive], minority=X[is_positive], minority_positive=True)

    @property
    def majority_target(self) -> float:
        return 0.0 if self.minority_positive else 1.0


def predict_scores(state: EnsembleState, X) -> np.ndarray:
    """F(x): mean positive-class vote of the base trees, for each row of ``X``."""
    if not state.base_models:
        raise EmptyEnsemble("ensemble has no base models")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    votes = np.zeros(len(X))
    for model in state.base_models:
        votes += np.array(cart.predict_many(model, X)) == POSITIVE
    return votes / len(state.base_models)


def predict_score(state: EnsembleState, x) -> float:
    return float(predict_scores(state, [x])[0])


def predict_label(state: EnsembleState, x) -> str:
    return POSITIVE if predict_score(state, x) >= 0.5 else NEGATIVE


def compute_hardness(state: EnsembleState, X, targets) -> np.ndarray:
    """|F(x) - y| with y in {0, 1}."""
    scores = predict_scores(state, X)
    return np.abs(scores - np.asarray(targets, dtype=float))


def bin_by_hardness(hardness, k: int = 5) -> HardnessBins:
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise InvalidBinCount(f"bin count must be a positive integer, got {k!r}")
    h = np.asarray(hardness, dtype=float)
    if h.size and (h.min() < 0 or h.max() > 1):
        raise DataError("hardness values must lie in [0, 1]")
    idx = np.minimum(np.floor(h * k).astype(np.intp), k - 1)
    members = [np.flatnonzero(idx == b) for b in range(k)]
    means = [float(h[m].mean()) if len(m) else math.nan for m in members]
    return HardnessBins(k=k, members=members, means=means)


def allocate(bins: HardnessBins, alpha: float, target: int) -> list[int]:
    """Per-bin sample counts summing to ``target`` by largest-remainder rounding."""
    if not isinstance(target, (int, np.integer)) or target < 1:
        raise InvalidTarget(f"target must be a positive integer, got {target!r}")
    nonempty = [b for b in range(bins.k) if len(bins.members[b])]
    if not nonempty:
        raise NoNonEmptyBins("every hardness bin is empty")
    weights = {b: 1.0 / (bins.means[b] + alpha) for b in nonempty}
    total = sum(weights.values())
    quotas = {b: target * w / total for b, w in weights.items()}
    alloc = {b: math.floor(q) for b, q in quotas.items()}
    short = target - sum(alloc.values())
    # larger remainder first, lower bin index on ties
    for b in sorted(nonempty, key=lambda b: (-(quotas[b] - alloc[b]), b))[:short]:
        alloc[b] += 1
    return [alloc.get(b, 0) for b in range(bins.k)]


def self_paced_undersample(bins: HardnessBins, alpha: float, target: int, seed=None) -> np.ndarray:
    """Indices into the majority set, ``target`` of them, drawn bin by bin.

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    rng = np.random.default_rng(seed)
    picked = []
    for members, count in zip(bins.members, allocate(bins, alpha, target)):
        if count == 0:
            continue
        picked.append(rng.choice(members, size=count, replace=count > len(members)))
    return np.concatenate(picked)


def _balanced_fit(data, majority_rows, tree_config):
    X = np.vstack([data.minority, data.majority[majority_rows]])
    pos, neg = (POSITIVE, NEGATIVE) if data.minority_positive else (NEGATIVE, POSITIVE)
    y = [pos] * len(data.minority) + [neg] * len(majority_rows)
    return cart.fit(X, y, tree_config), len(y)


def fit_binary(
    data: BinarySplitSet,
    schedule: SelfPaceSchedule,
    k: int = 5,
    tree_config: TreeConfig = TreeConfig(),
    seed=None,
) -> EnsembleState:
    rng = np.random.default_rng(seed)
    n_min, n_maj = len(data.minority), len(data.majority)
    state = EnsembleState()

    first = rng.choice(n_maj, size=n_min, replace=False)
    model, size = _balanced_fit(data, first, tree_config)
    state.base_models.append(model)
    state.training_sizes.append(size)

    targets = np.full(n_maj, data.majority_target)
    for alpha in schedule.values[1:]:
        hardness = compute_hardness(state, data.majority, targets)
        bins = bin_by_hardness(hardness, k)
        rows = self_paced_undersample(bins, alpha, n_min, rng)
        model, size = _balanced_fit(data, rows, tree_config)
        state.base_models.append(model)
        state.training_sizes.append(size)
    return state


# -- one-vs-rest ---------------------------------------------------------------

@dataclass
class MulticlassEnsemble:
    classes: tuple[str, ...]
    ensembles: list[EnsembleState]
    schedule: Optional[SelfPaceSchedule] = None
    k: int = 5
    seed: Optional[int] = None

    def scores(self, X) -> np.ndarray:
        """(n_samples, n_classes) matrix of per-class F(x)."""
        return np.column_stack([predict_scores(e, X) for e in self.ensembles])

    def predict_many(self, X) -> list[str]:
        # argmax takes the first maximum, i.e. the lowest class index on ties
        return [self.classes[i] for i in np.argmax(self.scores(X), axis=1)]

    def predict(self, x) -> str:
        return self.predict_many([x])[0]


def class_seed(seed, class_index: int) -> np.random.SeedSequence:
    entropy = 0 if seed is None else int(seed)
    return np.random.SeedSequence([entropy, class_index])


def fit_multiclass(
    features,
    labels,
    schedule: SelfPaceSchedule,
    k: int = 5,
    tree_config: TreeConfig = TreeConfig(),
    seed: Optional[int] = 0,
) -> MulticlassEnsemble:
    X = np.asarray(features, dtype=float)
    labels = np.array([str(label) for label in labels], dtype=object)
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise SingleClassInput(f"one-vs-rest needs at least 2 classes, got {classes}")
    ensembles = []
    for i, cls in enumerate(classes):
        data = BinarySplitSet.from_labels(X, labels == cls)
        rng = np.random.default_rng(class_seed(seed, i))
        ensembles.append(fit_binary(data, schedule, k, tree_config, rng))
    return MulticlassEnsemble(classes, ensembles, schedule, k, seed)


# -- persistence ---------------------------------------------------------------

def export_multiclass(model: MulticlassEnsemble) -> str:
    s = model.schedule
    header = (
        f"imvb7 classes={','.join(model.classes)} k={model.k} seed={model.seed}"
        + (f" iterations={s.n_iterations} alpha_start={s.alpha_start!r} alpha_end={s.alpha_end!r}" if s else "")
    )
    parts = [header + "\n"]
    for cls, state in zip(model.classes, model.ensembles):
        for j, base in enumerate(state.base_models):
            parts.append(f"== {cls} {j}\n")
            parts.append(cart.export_text(base))
    return "".join(parts)


def import_multiclass(text: str) -> MulticlassEnsemble:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("imvb7 "):
        raise ParseError("ensemble text must start with an 'imvb7' header line")
    try:
        fields = dict(tok.split("=", 1) for tok in lines[0].split()[1:])
        classes = tuple(fields["classes"].split(","))
        k = int(fields["k"])
        seed = None if fields["seed"] == "None" else int(fields["seed"])
        schedule = None
        if "iterations" in fields:
            schedule = SelfPaceSchedule(
                int(fields["iterations"]),
                float(fields["alpha_start"]),
                float(fields["alpha_end"]),
            )
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad ensemble header: {lines[0]!r}") from exc
    blocks: dict[str, list[list[str]]] = {cls: [] for cls in classes}
    current = None
    for line in lines[1:]:
        if line.startswith("== "):
            cls = line.split()[1]
            if cls not in blocks:
                raise ParseError(f"block for unknown class {cls!r}")
            current = []
            blocks[cls].append(current)
        elif current is None:
            if line.strip():
                raise ParseError("tree content before the first block marker")
        else:
            current.append(line)
    ensembles = [
        EnsembleState(base_models=[cart.import_text("\n".join(b)) for b in blocks[cls]])
        for cls in classes
    ]
    return MulticlassEnsemble(classes, ensembles, schedule, k, seed)
