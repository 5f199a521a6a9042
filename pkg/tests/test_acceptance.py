"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line shown in the pytest terminal summary.
"""

import time
from fractions import Fraction

import numpy as np

from foodrec import tree as cart
from foodrec.dataset import SplitSpec, split, split_sizes
from foodrec.ensemble import (
    BinarySplitSet,
    SelfPaceSchedule,
    allocate,
    bin_by_hardness,
    fit_binary,
    predict_scores,
)
from foodrec.imaging import ColorPalette, RasterImage, dominant_color, parse_ppm, write_ppm
from foodrec.metrics import evaluate
from foodrec.pipeline import evaluate_pipeline, survey_inputs, train_pipeline
from foodrec.schema import decode, default_schema, encode, enumerate_combinations
from foodrec.synthetic import synthetic_survey, two_cloud_dataset

METRIC_TOL = 1e-12


def counting_oracle(y_true, y_pred, labels):
    tp = dict.fromkeys(labels, 0)
    fp = dict.fromkeys(labels, 0)
    fn = dict.fromkeys(labels, 0)
    for t, p in zip(y_true, y_pred):
        if t == p:
            tp[t] += 1
        else:
            fp[p] += 1
            fn[t] += 1
    k = len(labels)
    A = Fraction(sum(tp.values()), len(y_true))
    P = sum(Fraction(tp[c], tp[c] + fp[c]) if tp[c] + fp[c] else Fraction(0) for c in labels) / k
    R = sum(Fraction(tp[c], tp[c] + fn[c]) if tp[c] + fn[c] else Fraction(0) for c in labels) / k
    F = 2 * P * R / (P + R) if P + R else Fraction(0)
    return A, P, R, F


def test_c1_metrics_oracle_equivalence(criterion):
    rng = np.random.default_rng(20240601)
    cases = []
    for _ in range(1000):
        k = int(rng.integers(2, 11))
        n = int(rng.integers(1, 10_001))
        labels = list(range(k))
        cases.append((rng.integers(0, k, n).tolist(), rng.integers(0, k, n).tolist(), labels))
    start = time.perf_counter()
    reports = [evaluate(t, p, labels) for t, p, labels in cases]
    elapsed = time.perf_counter() - start
    worst = 0.0
    for (t, p, labels), rep in zip(cases, reports):
        expected = counting_oracle(t, p, labels)
        got = (rep.accuracy, rep.macro_precision, rep.macro_recall, rep.f_score)
        worst = max(worst, max(abs(Fraction(g) - e) for g, e in zip(got, expected)))
    ok = worst <= METRIC_TOL and elapsed < 10.0
    criterion(ok, f"max |err|={float(worst):.2e} runtime={elapsed:.2f}s")
    assert worst <= METRIC_TOL
    assert elapsed < 10.0


def test_c2_worked_metric_instance(criterion):
    rep = evaluate(["a", "a", "b", "b", "c"], ["a", "b", "b", "b", "c"], ["a", "b", "c"])
    ok = (
        rep.accuracy == 0.8
        and abs(rep.macro_precision - 8 / 9) <= METRIC_TOL
        and abs(rep.macro_recall - 5 / 6) <= METRIC_TOL
        and abs(rep.f_score - 1440 / 1674) <= METRIC_TOL
        and round(rep.f_score, 4) == 0.8602
    )
    criterion(ok, f"A={rep.accuracy} P={rep.macro_precision:.4f} R={rep.macro_recall:.4f} F={rep.f_score:.4f}")
    assert ok


def test_c3_encoding_bijection(criterion):
    schema = default_schema()
    combos = enumerate_combinations(schema)
    one_hot = all(
        sum(encode(schema, c)[o:o + w]) == 1 and set(encode(schema, c)) <= {0, 1}
        for c in combos
        for o, w in zip(schema.offsets, schema.widths)
    )
    bijective = all(decode(schema, encode(schema, c)) == c for c in combos)
    ok = len(combos) == 120 and one_hot and bijective
    criterion(ok, f"{len(combos)} combinations, one-hot={one_hot}, bijective={bijective}")
    assert ok


def _survey_experiment(noise, seeds=range(20)):
    schema = default_schema()
    accs = []
    for seed in seeds:
        survey = synthetic_survey(noise=noise, seed=seed)
        train, _, test = split(survey, SplitSpec(seed=seed))
        pipe = train_pipeline(train.records, schema)
        accs.append(evaluate_pipeline(pipe, survey_inputs(test.records, schema)).accuracy)
    return float(np.mean(accs))


def test_c4_recommender_accuracy_analogue(criterion):
    start = time.perf_counter()
    noisy = _survey_experiment(0.05)
    clean = _survey_experiment(0.0)
    elapsed = time.perf_counter() - start
    ok = noisy >= 0.85 and clean >= 0.99 and elapsed < 30.0
    criterion(ok, f"mean test acc: 5% noise={noisy:.4f} (>=0.85), 0% noise={clean:.4f} (>=0.99), {elapsed:.1f}s")
    assert noisy >= 0.85
    assert clean >= 0.99
    assert elapsed < 30.0


def test_c5_self_paced_balance_and_benefit(criterion):
    # evaluated on a class-balanced held-out draw from the same two clouds
    start = time.perf_counter()
    sizes_ok = True
    f_ens, f_single = [], []
    for seed in range(10):
        X, y = two_cloud_dataset(2000, 100, separation=1.5, seed=seed)
        X_test, y_test = two_cloud_dataset(1000, 1000, separation=1.5, seed=1000 + seed)
        truth = np.where(y_test, "pos", "neg")
        state = fit_binary(BinarySplitSet.from_labels(X, y), SelfPaceSchedule(10), 5, cart.TreeConfig(), seed)
        sizes_ok &= len(state.base_models) == 10 and all(s == 200 for s in state.training_sizes[1:])
        ens_pred = np.where(predict_scores(state, X_test) >= 0.5, "pos", "neg")
        single = cart.fit(X, np.where(y, "pos", "neg"))
        f_ens.append(evaluate(truth, ens_pred, ["neg", "pos"]).f_score)
        f_single.append(evaluate(truth, cart.predict_many(single, X_test), ["neg", "pos"]).f_score)
    elapsed = time.perf_counter() - start
    margin = float(np.mean(f_ens) - np.mean(f_single))
    ok = sizes_ok and margin >= 0.05 and elapsed < 60.0
    criterion(ok, f"balance={sizes_ok} ensemble F={np.mean(f_ens):.4f} single F={np.mean(f_single):.4f} "
                  f"margin={margin:.4f} (>=0.05) {elapsed:.1f}s")
    assert sizes_ok
    assert margin >= 0.05
    assert elapsed < 60.0


def test_c6_self_paced_allocation(criterion):
    bins = bin_by_hardness([0.1] * 40 + [0.9] * 40, 2)
    alloc = allocate(bins, 0.1, 60)
    ok = alloc == [50, 10]
    criterion(ok, f"allocations={alloc}")
    assert ok


def test_c7_split_exactness(criterion):
    start = time.perf_counter()
    big = split(range(50_000), SplitSpec(seed=0))
    big_sizes = tuple(len(p) for p in big)
    rng = np.random.default_rng(77)
    partition_ok = True
    for n in range(1, 201):
        seed = int(rng.integers(2**32))
        items = list(range(n))
        parts = split(items, SplitSpec(seed=seed))
        flat = [x for p in parts for x in p.records]
        partition_ok &= sorted(flat) == items and len(set(flat)) == n
        partition_ok &= tuple(len(p) for p in parts) == split_sizes(n)
        partition_ok &= [p.records for p in split(items, SplitSpec(seed=seed))] == [p.records for p in parts]
    elapsed = time.perf_counter() - start
    ok = big_sizes == (40000, 5000, 5000) and partition_ok and elapsed < 5.0
    criterion(ok, f"n=50000 -> {big_sizes}; n=1..200 disjoint/covering/deterministic={partition_ok}; {elapsed:.2f}s")
    assert ok


def test_c8_image_layer(criterion):
    start = time.perf_counter()
    rng = np.random.default_rng(8)
    roundtrip_ok = True
    for _ in range(40):
        w, h = (int(v) for v in rng.integers(0, 65, 2))
        img = RasterImage(w, h, rng.integers(0, 256, size=(w * h, 3), dtype=np.uint8))
        for fmt in ("P3", "P6"):
            roundtrip_ok &= parse_ppm(write_ppm(img, fmt)) == img
    palette = ColorPalette((("warm", (255, 128, 0)), ("cool", (0, 128, 255))))
    pure_ok = (
        dominant_color(RasterImage.uniform(8, 8, (255, 0, 0)), palette, 2, 0) == "warm"
        and dominant_color(RasterImage.uniform(8, 8, (0, 128, 255)), palette, 2, 0) == "cool"
    )
    px = np.array([(250, 60, 30)] * 70 + [(20, 40, 230)] * 30, dtype=np.uint8)
    mixed = RasterImage(10, 10, rng.permutation(px))
    mixed_ok = dominant_color(mixed, palette, k=2, seed=0) == "warm"
    elapsed = time.perf_counter() - start
    ok = roundtrip_ok and pure_ok and mixed_ok and elapsed < 5.0
    criterion(ok, f"roundtrip={roundtrip_ok} pure={pure_ok} 70/30={mixed_ok} {elapsed:.2f}s")
    assert ok


def test_c9_tree_determinism(criterion):
    rng = np.random.default_rng(9)
    X = np.unique(rng.integers(0, 2, size=(120, 10)).astype(float), axis=0)
    y = [("Fruit", "Fish", "Meat", "Pizza")[i] for i in rng.integers(0, 4, len(X))]
    first = cart.export_text(cart.fit(X, y))
    second = cart.export_text(cart.fit(X.copy(), list(y)))
    model = cart.fit(X, y)
    train_acc = float(np.mean(np.array(cart.predict_many(model, X)) == np.array(y)))
    ok = first == second and train_acc == 1.0
    criterion(ok, f"byte-identical={first == second} train_acc={train_acc}")
    assert ok
