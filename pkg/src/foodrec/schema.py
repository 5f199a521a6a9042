"""Attribute catalog, one-hot encoding and combination enumeration.

Every attribute owns a contiguous block of bits whose width equals its
vocabulary size; a tuple sets exactly one bit per block.
"""

from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from foodrec.errors import (
    ArityMismatch,
    BlockOrderMismatch,
    BlockWidthMismatch,
    InvalidViableEntry,
    MalformedBlock,
    MalformedVector,
    ParseError,
    SchemaError,
    UnknownValue,
)

AGE = "age"


@dataclass(frozen=True)
class Attribute:
    name: str
    values: tuple[str, ...]

    @property
    def cardinality(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class AttributeSchema:
    """Ordered attribute catalog; the order fixes the bit layout."""

    attributes: tuple[Attribute, ...]

    def __post_init__(self):
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate attribute names in {names}")
        for attr in self.attributes:
            if attr.cardinality < 2:
                raise SchemaError(f"attribute {attr.name!r} needs at least 2 values")
            if len(set(attr.values)) != attr.cardinality:
                raise SchemaError(f"duplicate values in attribute {attr.name!r}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, Sequence[str]]]) -> "AttributeSchema":
        return cls(tuple(Attribute(name, tuple(values)) for name, values in pairs))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(a.cardinality for a in self.attributes)

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(itertools.accumulate((0,) + self.widths[:-1])) if self.attributes else ()

    @property
    def vector_length(self) -> int:
        return sum(self.widths)

    def __len__(self):
        return len(self.attributes)

    def attribute(self, name: str) -> Attribute:
        for attr in self.attributes:
            if attr.name == name:
                return attr
        raise SchemaError(f"no attribute named {name!r}")

    def __contains__(self, name) -> bool:
        return name in self.names

    def without(self, name: str) -> "AttributeSchema":
        return AttributeSchema(tuple(a for a in self.attributes if a.name != name))

    def validate_tuple(self, values: Sequence[str]) -> tuple[str, ...]:
        if len(values) != len(self.attributes):
            raise ArityMismatch(
                f"tuple has {len(values)} values, schema has {len(self.attributes)} attributes"
            )
        for attr, value in zip(self.attributes, values):
            if value not in attr.values:
                raise UnknownValue(f"{value!r} is not a value of attribute {attr.name!r}")
        return tuple(values)

    def to_json(self) -> list[dict]:
        return [{"name": a.name, "values": list(a.values)} for a in self.attributes]


ENVIRONMENT_ATTRIBUTES = (
    ("scene", ("beach", "park", "restaurant", "street", "countryside")),
    ("weather", ("sunny", "rainy", "cloudy", "snowy")),
    ("period", ("morning", "afternoon", "evening")),
    ("dominant_color", ("warm", "cool")),
)
AGE_ATTRIBUTE = (AGE, ("child", "adult", "senior"))


def default_schema(include_age: bool = False) -> AttributeSchema:
    """Four environment attributes (5*4*3*2 = 120 combinations), optionally plus age."""
    pairs = list(ENVIRONMENT_ATTRIBUTES)
    if include_age:
        pairs.append(AGE_ATTRIBUTE)
    return AttributeSchema.from_pairs(pairs)


def load_schema(path) -> AttributeSchema:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, list):
        raise ParseError(f"{path}: schema must be a JSON array")
    try:
        return AttributeSchema.from_pairs((entry["name"], entry["values"]) for entry in doc)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{path}: each entry needs 'name' and 'values'") from exc


def encode(schema: AttributeSchema, values: Sequence[str]) -> tuple[int, ...]:
    """One-hot encode ``values``; bit ``offset(a) + index(v)`` is set for each attribute."""
    values = schema.validate_tuple(values)
    bits = [0] * schema.vector_length
    for offset, attr, value in zip(schema.offsets, schema.attributes, values):
        bits[offset + attr.values.index(value)] = 1
    return tuple(bits)


def decode(schema: AttributeSchema, vector: Sequence[int]) -> tuple[str, ...]:
    if len(vector) != schema.vector_length:
        raise MalformedVector(
            f"vector length {len(vector)} != expected {schema.vector_length}"
        )
    out = []
    for offset, attr in zip(schema.offsets, schema.attributes):
        block = vector[offset:offset + attr.cardinality]
        out.append(attr.values[_hot_index(block, attr.name, MalformedVector)])
    return tuple(out)


def _hot_index(block, name, error):
    if any(bit not in (0, 1) for bit in block):
        raise error(f"block for {name!r} contains non-binary entries: {list(block)}")
    hot = [i for i, bit in enumerate(block) if bit == 1]
    if len(hot) != 1:
        raise error(f"block for {name!r} has {len(hot)} set bits, expected exactly 1")
    return hot[0]


def one_hot_block(attr: Attribute, value: str) -> tuple[int, ...]:
    if value not in attr.values:
        raise UnknownValue(f"{value!r} is not a value of attribute {attr.name!r}")
    return tuple(int(v == value) for v in attr.values)


def fuse_incremental(schema: AttributeSchema, blocks: Sequence) -> tuple[int, ...]:
    """Append per-attribute one-hot blocks onto an empty vector, in schema order.

    ``blocks`` holds either bare bit sequences or ``(attribute_name, bits)``
    pairs; named blocks are checked against the schema order. The final
    length check stands in for reshaping before classification.
    """
    if len(blocks) != len(schema):
        raise BlockOrderMismatch(f"got {len(blocks)} blocks for {len(schema)} attributes")
    vector: list[int] = []
    for attr, block in zip(schema.attributes, blocks):
        if isinstance(block, tuple) and len(block) == 2 and isinstance(block[0], str):
            name, block = block
            if name != attr.name:
                raise BlockOrderMismatch(f"expected block for {attr.name!r}, got {name!r}")
        if len(block) != attr.cardinality:
            raise BlockWidthMismatch(
                f"block for {attr.name!r} has width {len(block)}, expected {attr.cardinality}"
            )
        _hot_index(block, attr.name, MalformedBlock)
        vector.extend(int(bit) for bit in block)
    if len(vector) != schema.vector_length:
        raise MalformedVector(f"fused length {len(vector)} != {schema.vector_length}")
    return tuple(vector)


def enumerate_combinations(schema: AttributeSchema, viable=None) -> list[tuple[str, ...]]:
    """Cartesian product of the vocabularies in schema order, optionally filtered."""
    combos = list(itertools.product(*(a.values for a in schema.attributes)))
    if viable is None:
        return combos
    keep = set()
    for entry in viable:
        try:
            keep.add(schema.validate_tuple(tuple(entry)))
        except (UnknownValue, ArityMismatch) as exc:
            raise InvalidViableEntry(f"viable entry {entry!r}: {exc}") from exc
    return [c for c in combos if c in keep]


def load_viable(path, schema: AttributeSchema) -> set[tuple[str, ...]]:
    """Read a viability CSV whose header names the schema attributes."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return set()
        header = [h.strip() for h in header]
        if sorted(header) != sorted(schema.names):
            raise ParseError(f"{path}: header {header} does not match schema {list(schema.names)}")
        order = [header.index(name) for name in schema.names]
        out = set()
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            entry = tuple(row[i].strip() for i in order)
            try:
                out.add(schema.validate_tuple(entry))
            except UnknownValue as exc:
                raise InvalidViableEntry(f"{path}:{lineno}: {exc}") from exc
    return out
