"""Survey and image-manifest loaders and the seeded 80/10/10 split."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from foodrec.errors import (
    DuplicateTuple,
    EmptyInput,
    ParseError,
    UnknownFoodLabel,
    UnknownValue,
)
from foodrec.schema import AttributeSchema

FOODS = ("Fruit", "Fish", "Meat", "Pizza")
FOOD_COLUMN = "food"


@dataclass(frozen=True)
class SurveyRecord:
    values: tuple[str, ...]
    food: str


@dataclass(frozen=True)
class LabeledSet:
    role: str
    records: list

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


@dataclass(frozen=True)
class SplitSpec:
    seed: int = 0
    train_fraction: float = 0.8
    val_fraction: float = 0.1
    test_fraction: float = 0.1
    stratify: bool = False

    def __post_init__(self):
        fracs = (self.train_fraction, self.val_fraction, self.test_fraction)
        if any(f <= 0 for f in fracs) or not math.isclose(sum(fracs), 1.0):
            raise ValueError(f"split fractions must be positive and sum to 1, got {fracs}")


@dataclass(frozen=True)
class ImageManifestEntry:
    path: str
    labels: dict


def _read_rows(path):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not valid UTF-8: {exc}") from exc
    except csv.Error as exc:
        raise ParseError(f"{path}: malformed CSV: {exc}") from exc
    if not rows:
        raise ParseError(f"{path}: missing header row")
    header = [h.strip() for h in rows[0]]
    body = [(i, [c.strip() for c in row]) for i, row in enumerate(rows[1:], start=2) if row]
    for lineno, row in body:
        if len(row) != len(header):
            raise ParseError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
    return header, body


def load_survey(path, schema: AttributeSchema) -> list[SurveyRecord]:
    """One record per data row, in file order.

    Columns outside the schema (e.g. ``age`` when age is not fused) are ignored.
    """
    header, body = _read_rows(path)
    missing = [name for name in (*schema.names, FOOD_COLUMN) if name not in header]
    if missing:
        raise ParseError(f"{path}: header lacks columns {missing}")
    cols = [header.index(name) for name in schema.names]
    food_col = header.index(FOOD_COLUMN)
    records: list[SurveyRecord] = []
    seen: dict[tuple, tuple[str, int]] = {}
    for lineno, row in body:
        values = tuple(row[c] for c in cols)
        try:
            schema.validate_tuple(values)
        except UnknownValue as exc:
            raise UnknownValue(f"{path}:{lineno}: {exc}") from None
        food = row[food_col]
        if food not in FOODS:
            raise UnknownFoodLabel(f"{path}:{lineno}: food {food!r} not in {FOODS}")
        if values in seen and seen[values][0] != food:
            prev_food, prev_line = seen[values]
            raise DuplicateTuple(
                f"{path}:{lineno}: combination {values} labelled {food!r}, "
                f"but line {prev_line} labelled it {prev_food!r}"
            )
        seen.setdefault(values, (food, lineno))
        records.append(SurveyRecord(values, food))
    return records


def write_survey(path, schema: AttributeSchema, records: Sequence[SurveyRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([*schema.names, FOOD_COLUMN])
        for rec in records:
            writer.writerow([*rec.values, rec.food])


def load_manifest(path, schema: AttributeSchema) -> list[ImageManifestEntry]:
    header, body = _read_rows(path)
    if not header or header[0] != "path":
        raise ParseError(f"{path}: manifest header must start with 'path'")
    attrs = header[1:]
    unknown = [a for a in attrs if a not in schema]
    if unknown:
        raise ParseError(f"{path}: manifest columns {unknown} are not schema attributes")
    entries = []
    for lineno, row in body:
        labels = {}
        for name, value in zip(attrs, row[1:]):
            if value == "":
                continue  # unlabelled cell
            if value not in schema.attribute(name).values:
                raise UnknownValue(f"{path}:{lineno}: {value!r} is not a value of {name!r}")
            labels[name] = value
        entries.append(ImageManifestEntry(path=row[0], labels=labels))
    return entries


def split_sizes(n: int, spec: "SplitSpec" = SplitSpec()) -> tuple[int, int, int]:
    """Validation and test get ``floor(n * fraction)``; train keeps the remainder."""
    # the epsilon absorbs representation error, e.g. 0.1 * 30 != 3 exactly
    n_val = math.floor(n * spec.val_fraction + 1e-9)
    n_test = math.floor(n * spec.test_fraction + 1e-9)
    return n - n_val - n_test, n_val, n_test


def _stratified_order(labels, rng):
    # spread every class evenly along the permutation so each slice is ~proportional
    labels = list(labels)
    keys = np.empty(len(labels))
    for cls in sorted(set(labels)):
        idx = np.flatnonzero(np.array([lab == cls for lab in labels]))
        idx = rng.permutation(idx)
        keys[idx] = (np.arange(len(idx)) + rng.random()) / len(idx)
    return np.argsort(keys, kind="stable")


def split(records: Sequence, spec: SplitSpec = SplitSpec(), labels: Optional[Sequence] = None):
    """Seeded shuffle then slice into (train, val, test) ``LabeledSet``s.

    Sizes follow :func:`split_sizes`. With ``spec.stratify`` the shuffle interleaves classes
    (``labels`` defaults to each record's ``food`` attribute).
    """
    records = list(records)
    n = len(records)
    if n == 0:
        raise EmptyInput("cannot split an empty record list")
    rng = np.random.default_rng(spec.seed)
    if spec.stratify:
        if labels is None:
            labels = [r.food for r in records]
        order = _stratified_order(labels, rng)
    else:
        order = rng.permutation(n)
    n_train, n_val, _ = split_sizes(n, spec)
    parts = (order[:n_train], order[n_train:n_train + n_val], order[n_train + n_val:])
    return tuple(
        LabeledSet(role, [records[i] for i in idx])
        for role, idx in zip(("train", "val", "test"), parts)
    )


def resolve_image_path(entry: ImageManifestEntry, manifest_path) -> Path:
    p = Path(entry.path)
    return p if p.is_absolute() else Path(manifest_path).parent / p
