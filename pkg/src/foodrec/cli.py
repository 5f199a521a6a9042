"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from foodrec import ensemble, imaging, pipeline, schema as schema_mod
from foodrec.dataset import (
    SplitSpec,
    load_manifest,
    load_survey,
    resolve_image_path,
    split,
)
from foodrec.errors import DataError, InvariantViolation
from foodrec.tree import TreeConfig

log = logging.getLogger("foodrec")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _cmd_split(args):
    with open(args.input, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh)]
    if not rows:
        raise DataError(f"{args.input}: missing header row")
    header, body = rows[0], [row for row in rows[1:] if row]
    parts = split(body, SplitSpec(seed=args.seed))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for part in parts:
        with open(out_dir / f"{part.role}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(part.records)
    print(" ".join(f"{p.role}={len(p)}" for p in parts))


def _cmd_enumerate(args):
    schema = schema_mod.load_schema(args.schema)
    viable = schema_mod.load_viable(args.viable, schema) if args.viable else None
    for combo in schema_mod.enumerate_combinations(schema, viable):
        print(",".join(combo))


def _cmd_encode(args):
    schema = schema_mod.load_schema(args.schema)
    values = [v.strip() for v in args.tuple.split(",")]
    print("".join(str(b) for b in schema_mod.encode(schema, values)))


def _cmd_extract_color(args):
    palette = imaging.load_palette(args.palette)
    image = imaging.read_ppm(args.image)
    print(imaging.dominant_color(image, palette, args.k, args.seed))


def _cmd_train_imvb7(args):
    schema = schema_mod.load_schema(args.schema)
    entries = load_manifest(args.manifest, schema)
    features, labels = [], []
    for entry in entries:
        if args.attribute not in entry.labels:
            raise DataError(f"{entry.path}: no {args.attribute!r} label")
        image = imaging.read_ppm(resolve_image_path(entry, args.manifest))
        features.append(imaging.rgb_histogram(image, args.bins_per_channel))
        labels.append(entry.labels[args.attribute])
    model = ensemble.fit_multiclass(
        np.array(features),
        labels,
        ensemble.SelfPaceSchedule(args.iterations),
        k=args.bins,
        tree_config=TreeConfig(max_depth=args.max_depth),
        seed=args.seed,
    )
    Path(args.out).write_text(ensemble.export_multiclass(model), encoding="utf-8")
    log.info("trained %d one-vs-rest ensembles on %d images", len(model.classes), len(labels))


def _cmd_train_tree(args):
    full = schema_mod.load_schema(args.schema)
    fused = pipeline.fusion_schema(full, args.include_age)
    survey = load_survey(args.survey, fused)
    providers = {}
    if args.scene_model:
        model = ensemble.import_multiclass(Path(args.scene_model).read_text(encoding="utf-8"))
        providers["scene"] = pipeline.ImvbSceneProvider(
            model, bins_per_channel=args.bins_per_channel, model_path=args.scene_model
        )
    if args.palette:
        providers["dominant_color"] = pipeline.DominantColorProvider(
            palette=imaging.load_palette(args.palette), k=args.color_k, seed=args.color_seed
        )
    pipe = pipeline.train_pipeline(
        survey, full, TreeConfig(max_depth=args.max_depth), args.include_age, providers
    )
    pipeline.save_pipeline(pipe, args.out)


def _cmd_recommend(args):
    pipe = pipeline.load_pipeline(args.pipeline)
    entries = load_manifest(args.manifest, pipe.schema)
    image = Path(args.image)
    labels = {}
    for entry in entries:
        candidate = resolve_image_path(entry, args.manifest)
        if entry.path == args.image or candidate.resolve() == image.resolve():
            labels = entry.labels
            break
    print(pipeline.recommend(pipe, image, labels))


def _cmd_evaluate(args):
    pipe = pipeline.load_pipeline(args.pipeline)
    survey = load_survey(args.survey, pipe.schema)
    parts = dict((p.role, p) for p in split(survey, SplitSpec(seed=args.seed)))
    chosen = parts[args.split].records if args.split != "all" else survey
    report = pipeline.evaluate_pipeline(
        pipe, pipeline.survey_inputs(chosen, pipe.schema), beta=args.beta
    )
    print(report.to_json())


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="foodrec", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("split", help="seeded 80/10/10 split of a CSV file")
    p.add_argument("--input", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("enumerate", help="list attribute combinations")
    p.add_argument("--schema", required=True)
    p.add_argument("--viable")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("encode", help="one-hot encode an attribute tuple")
    p.add_argument("--schema", required=True)
    p.add_argument("--tuple", required=True)
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("extract-color", help="dominant colour label of a PPM image")
    p.add_argument("--image", required=True)
    p.add_argument("--palette", required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_extract_color)

    p = sub.add_parser("train-imvb7", help="train the one-vs-rest scene ensemble")
    p.add_argument("--manifest", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--iterations", type=int, required=True)
    p.add_argument("--bins", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--attribute", default="scene")
    p.add_argument("--bins-per-channel", type=int, default=4)
    p.add_argument("--max-depth", type=int)
    p.set_defaults(func=_cmd_train_imvb7)

    p = sub.add_parser("train-tree", help="train the food recommender")
    p.add_argument("--survey", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--max-depth", type=int)
    p.add_argument("--include-age", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--scene-model", help="IMVB7 ensemble file; scene is then read from images")
    p.add_argument("--bins-per-channel", type=int, default=4)
    p.add_argument("--palette", help="palette JSON; dominant colour is then read from images")
    p.add_argument("--color-k", type=int, default=2)
    p.add_argument("--color-seed", type=int, default=0)
    p.set_defaults(func=_cmd_train_tree)

    p = sub.add_parser("recommend", help="recommend a food for one image")
    p.add_argument("--pipeline", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=_cmd_recommend)

    p = sub.add_parser("evaluate", help="evaluate a pipeline on one split of a survey")
    p.add_argument("--pipeline", required=True)
    p.add_argument("--survey", required=True)
    p.add_argument("--split", choices=("train", "val", "test", "all"), default="test")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta", type=float, default=1.0)
    p.set_defaults(func=_cmd_evaluate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args.func(args)
    except ValueError as exc:
        if isinstance(exc, DataError):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DATA
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        log.exception("unexpected failure")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
