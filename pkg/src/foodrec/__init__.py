"""Environment-aware food recommendation: attribute fusion, IMVB7 ensembles and a CART recommender."""

from foodrec.dataset import FOODS, SplitSpec, SurveyRecord, load_manifest, load_survey, split
from foodrec.metrics import MetricReport, evaluate
from foodrec.pipeline import (
    RecommendationPipeline,
    evaluate_pipeline,
    load_pipeline,
    recommend,
    save_pipeline,
    train_pipeline,
)
from foodrec.schema import AttributeSchema, decode, default_schema, encode, enumerate_combinations
from foodrec.tree import DecisionTreeModel, TreeConfig

__version__ = "0.1.0"

__all__ = [
    "FOODS",
    "AttributeSchema",
    "DecisionTreeModel",
    "MetricReport",
    "RecommendationPipeline",
    "SplitSpec",
    "SurveyRecord",
    "TreeConfig",
    "decode",
    "default_schema",
    "encode",
    "enumerate_combinations",
    "evaluate",
    "evaluate_pipeline",
    "load_manifest",
    "load_pipeline",
    "load_survey",
    "recommend",
    "save_pipeline",
    "split",
    "train_pipeline",
]
