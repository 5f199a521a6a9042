"""End-to-end recommender: attribute providers, fusion, decision tree, evaluation.

Providers resolve one attribute each, in schema order; their one-hot blocks
are fused into the feature vector that the recommender tree classifies.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from foodrec import ensemble, imaging, tree
from foodrec.dataset import FOODS, SurveyRecord
from foodrec.errors import (
    DataError,
    EmptyEvaluationSet,
    InvariantViolation,
    ParseError,
    ProviderFailure,
    SchemaError,
)
from foodrec.metrics import MetricReport, evaluate
from foodrec.schema import AGE, AttributeSchema, encode, fuse_incremental, one_hot_block
from foodrec.tree import DecisionTreeModel, TreeConfig

PIPELINE_FORMAT = "foodrec-pipeline/1"


# -- providers ---------------------------------------------------------------------

class OracleProvider:
    """Reads the ground-truth label for its attribute from the input's manifest labels."""

    kind = "oracle"

    def __init__(self, attribute: str):
        self.attribute = attribute

    def resolve(self, image_path, labels) -> str:
        try:
            return labels[self.attribute]
        except KeyError:
            raise KeyError(f"no manifest label for {self.attribute!r}") from None

    def to_json(self, base_dir) -> dict:
        return {"attribute": self.attribute, "kind": self.kind}


class DominantColorProvider:
    kind = "dominant_color"

    def __init__(self, attribute="dominant_color", palette=imaging.DEFAULT_PALETTE, k=2, seed=0):
        self.attribute = attribute
        self.palette = palette
        self.k = k
        self.seed = seed

    def resolve(self, image_path, labels) -> str:
        if image_path is None:
            raise ValueError("an image is required to extract the dominant colour")
        return imaging.dominant_color(imaging.read_ppm(image_path), self.palette, self.k, self.seed)

    def to_json(self, base_dir) -> dict:
        return {
            "attribute": self.attribute,
            "kind": self.kind,
            "palette": self.palette.to_json(),
            "k": self.k,
            "seed": self.seed,
        }


class ImvbSceneProvider:
    """Colour-histogram features classified by a one-vs-rest IMVB7 ensemble."""

    kind = "imvb_scene"

    def __init__(self, model: ensemble.MulticlassEnsemble, attribute="scene",
                 bins_per_channel=4, model_path=None):
        self.model = model
        self.attribute = attribute
        self.bins_per_channel = bins_per_channel
        self.model_path = model_path

    def resolve(self, image_path, labels) -> str:
        if image_path is None:
            raise ValueError("an image is required to classify the scene")
        features = imaging.rgb_histogram(imaging.read_ppm(image_path), self.bins_per_channel)
        return self.model.predict(features)

    def to_json(self, base_dir) -> dict:
        if self.model_path is None:
            raise InvariantViolation("scene provider has no model file to reference")
        return {
            "attribute": self.attribute,
            "kind": self.kind,
            "model": os.path.relpath(self.model_path, base_dir),
            "bins_per_channel": self.bins_per_channel,
        }


def provider_from_json(doc: dict, base_dir):
    kind = doc.get("kind")
    if kind == OracleProvider.kind:
        return OracleProvider(doc["attribute"])
    if kind == DominantColorProvider.kind:
        return DominantColorProvider(
            doc["attribute"],
            imaging.ColorPalette.from_json(doc["palette"]),
            int(doc.get("k", 2)),
            int(doc.get("seed", 0)),
        )
    if kind == ImvbSceneProvider.kind:
        model_path = Path(base_dir) / doc["model"]
        model = ensemble.import_multiclass(model_path.read_text(encoding="utf-8"))
        return ImvbSceneProvider(model, doc["attribute"], int(doc["bins_per_channel"]), model_path)
    raise ParseError(f"unknown provider kind {kind!r}")


# -- pipeline ------------------------------------------------------------------------

@dataclass(frozen=True)
class RecommendationPipeline:
    schema: AttributeSchema
    providers: tuple
    recommender: DecisionTreeModel
    include_age: bool = False
    tree_config: TreeConfig = TreeConfig()

    def __post_init__(self):
        if tuple(p.attribute for p in self.providers) != self.schema.names:
            raise SchemaError(
                f"providers {[p.attribute for p in self.providers]} do not match "
                f"schema order {list(self.schema.names)}"
            )
        if self.recommender.feature_count != self.schema.vector_length:
            raise SchemaError(
                f"recommender expects {self.recommender.feature_count} features, "
                f"schema encodes {self.schema.vector_length}"
            )


def fusion_schema(schema: AttributeSchema, include_age: bool) -> AttributeSchema:
    """Drop the person attribute unless it takes part in fusion."""
    if include_age:
        if AGE not in schema:
            raise SchemaError("include_age requested but the schema has no 'age' attribute")
        return schema
    return schema.without(AGE) if AGE in schema else schema


def train_pipeline(
    survey: Sequence[SurveyRecord],
    schema: AttributeSchema,
    tree_config: TreeConfig = TreeConfig(),
    include_age: bool = False,
    providers: Optional[dict] = None,
) -> RecommendationPipeline:
    """Fit the recommender on one-hot encoded survey records.

    ``survey`` must conform to ``fusion_schema(schema, include_age)``.
    ``providers`` maps attribute names to non-default providers; every other
    attribute gets an :class:`OracleProvider`.
    """
    schema = fusion_schema(schema, include_age)
    vectors = [encode(schema, rec.values) for rec in survey]
    recommender = tree.fit(vectors, [rec.food for rec in survey], tree_config)
    providers = providers or {}
    chosen = tuple(providers.get(name) or OracleProvider(name) for name in schema.names)
    return RecommendationPipeline(schema, chosen, recommender, include_age, tree_config)


def resolve_attributes(pipeline: RecommendationPipeline, image_path, labels) -> tuple[str, ...]:
    values = []
    for provider, attr in zip(pipeline.providers, pipeline.schema.attributes):
        try:
            value = provider.resolve(image_path, labels)
        except (DataError, OSError, KeyError, ValueError) as exc:
            raise ProviderFailure(attr.name, exc) from exc
        if value not in attr.values:
            raise ProviderFailure(attr.name, f"value {value!r} outside vocabulary {attr.values}")
        values.append(value)
    return tuple(values)


def recommend(pipeline: RecommendationPipeline, image_path=None, labels=None) -> str:
    labels = labels or {}
    values = resolve_attributes(pipeline, image_path, labels)
    blocks = [
        (attr.name, one_hot_block(attr, value))
        for attr, value in zip(pipeline.schema.attributes, values)
    ]
    vector = fuse_incremental(pipeline.schema, blocks)
    return tree.predict(pipeline.recommender, vector)


def survey_inputs(records: Sequence[SurveyRecord], schema: AttributeSchema):
    """Turn survey rows into (image_path, labels, food) triples for oracle-only pipelines."""
    return [(None, dict(zip(schema.names, rec.values)), rec.food) for rec in records]


def evaluate_pipeline(pipeline: RecommendationPipeline, inputs, beta: float = 1.0) -> MetricReport:
    """``inputs`` holds (image_path, labels, true_food) triples."""
    inputs = list(inputs)
    if not inputs:
        raise EmptyEvaluationSet("no labelled inputs to evaluate")
    y_true = [food for _, _, food in inputs]
    y_pred = [recommend(pipeline, path, labels) for path, labels, _ in inputs]
    return evaluate(y_true, y_pred, FOODS, beta)


# -- persistence -------------------------------------------------------------------

def save_pipeline(pipeline: RecommendationPipeline, path) -> Path:
    """Write a JSON header plus the recommender tree as a sibling text file."""
    path = Path(path)
    base_dir = path.parent
    tree_path = path.with_name(path.stem + ".tree.txt")
    tree_path.write_text(tree.export_text(pipeline.recommender), encoding="utf-8")
    doc = {
        "format": PIPELINE_FORMAT,
        "schema": pipeline.schema.to_json(),
        "include_age": pipeline.include_age,
        "tree_config": {
            "max_depth": pipeline.tree_config.max_depth,
            "min_samples_split": pipeline.tree_config.min_samples_split,
        },
        "providers": [p.to_json(base_dir) for p in pipeline.providers],
        "recommender": tree_path.name,
    }
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return tree_path


def load_pipeline(path) -> RecommendationPipeline:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    if doc.get("format") != PIPELINE_FORMAT:
        raise ParseError(f"{path}: not a {PIPELINE_FORMAT} file")
    try:
        schema = AttributeSchema.from_pairs((a["name"], a["values"]) for a in doc["schema"])
        providers = tuple(provider_from_json(p, path.parent) for p in doc["providers"])
        recommender = tree.import_text((path.parent / doc["recommender"]).read_text(encoding="utf-8"))
        tree_config = TreeConfig(**doc.get("tree_config", {}))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{path}: missing or malformed field: {exc}") from exc
    return RecommendationPipeline(schema, providers, recommender, bool(doc["include_age"]), tree_config)
