import json

import pytest

from foodrec.dataset import write_survey
from foodrec.imaging import DEFAULT_PALETTE, RasterImage, write_ppm
from foodrec.schema import default_schema
from foodrec.synthetic import SCENE_COLORS, scene_image, synthetic_survey


@pytest.fixture
def env_schema():
    return default_schema()


@pytest.fixture
def workspace(tmp_path):
    """Schema, palette, survey, and a small labelled image set on disk."""
    schema = default_schema(include_age=True)
    (tmp_path / "schema.json").write_text(json.dumps(schema.to_json()))
    (tmp_path / "palette.json").write_text(json.dumps(DEFAULT_PALETTE.to_json()))
    write_survey(tmp_path / "survey.csv", default_schema(), synthetic_survey(noise=0.0))

    img_dir = tmp_path / "images"
    img_dir.mkdir()
    rows = ["path,scene,weather,period,dominant_color"]
    for i, scene in enumerate(SCENE_COLORS):
        for j in range(12):
            name = f"images/{scene}_{j}.ppm"
            (tmp_path / name).write_bytes(write_ppm(scene_image(scene, seed=100 * i + j)))
            rows.append(f"{name},{scene},sunny,morning,warm")
    (tmp_path / "manifest.csv").write_text("\n".join(rows) + "\n")

    (tmp_path / "warm.ppm").write_bytes(write_ppm(RasterImage.uniform(4, 4, (250, 90, 20)), "P3"))
    return tmp_path


ACCEPTANCE_RESULTS = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: call with (ok, detail)."""

    def record(ok, detail=""):
        ACCEPTANCE_RESULTS.append((request.node.name, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
