"""Synthetic fixtures standing in for the unpublished survey and image data."""

from __future__ import annotations

import numpy as np

from foodrec.dataset import FOODS, SurveyRecord
from foodrec.imaging import RasterImage
from foodrec.schema import AttributeSchema, default_schema, enumerate_combinations

VIABLE_SEED = 2024
N_VIABLE = 75


def food_rule(values: dict) -> str:
    """Deterministic attribute -> food preference used to label synthetic surveys."""
    if values["scene"] == "beach":
        return "Fish"
    if values["weather"] in ("rainy", "snowy"):
        return "Meat"
    if values["period"] == "evening":
        return "Pizza"
    return "Fruit"


def viable_combinations(schema: AttributeSchema | None = None, n: int = N_VIABLE,
                        seed: int = VIABLE_SEED) -> list[tuple[str, ...]]:
    """A fixed ``n``-subset of all combinations, kept in enumeration order."""
    schema = schema or default_schema()
    combos = enumerate_combinations(schema)
    keep = np.sort(np.random.default_rng(seed).choice(len(combos), size=n, replace=False))
    return [combos[i] for i in keep]


def synthetic_survey(noise: float = 0.05, seed: int = 0, schema: AttributeSchema | None = None,
                     combos=None) -> list[SurveyRecord]:
    """Label every viable combination with :func:`food_rule`, then corrupt a fraction.

    ``round(noise * n)`` records, chosen by ``seed``, get a different food drawn
    uniformly from the other three.
    """
    schema = schema or default_schema()
    combos = combos if combos is not None else viable_combinations(schema)
    foods = [food_rule(dict(zip(schema.names, c))) for c in combos]
    rng = np.random.default_rng(seed)
    n_noisy = int(round(noise * len(combos)))
    for i in rng.choice(len(combos), size=n_noisy, replace=False):
        others = [f for f in FOODS if f != foods[i]]
        foods[i] = others[rng.integers(len(others))]
    return [SurveyRecord(tuple(c), f) for c, f in zip(combos, foods)]


def two_cloud_dataset(n_majority=2000, n_minority=100, separation=2.0, dim=2, seed=0):
    """Gaussian majority and minority clouds in ``dim`` dimensions.

    Returns ``(X, is_minority)``. Unit-variance clouds whose centres sit
    ``separation`` apart along every axis.
    """
    rng = np.random.default_rng(seed)
    maj = rng.normal(0.0, 1.0, size=(n_majority, dim))
    mino = rng.normal(separation, 1.0, size=(n_minority, dim))
    X = np.vstack([maj, mino])
    y = np.r_[np.zeros(n_majority, dtype=bool), np.ones(n_minority, dtype=bool)]
    return X, y


SCENE_COLORS = {
    "beach": (230, 200, 120),
    "park": (60, 160, 60),
    "restaurant": (150, 60, 40),
    "street": (120, 120, 130),
    "countryside": (170, 190, 60),
}


def scene_image(scene: str, size=8, noise=20, seed=0) -> RasterImage:
    """Noisy image whose colour distribution identifies ``scene``."""
    rng = np.random.default_rng(seed)
    base = np.array(SCENE_COLORS[scene], dtype=float)
    px = base + rng.normal(0.0, noise, size=(size * size, 3))
    return RasterImage(size, size, np.clip(np.rint(px), 0, 255).astype(np.uint8))
