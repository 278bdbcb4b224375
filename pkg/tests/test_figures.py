import json

import numpy as np
import pytest

from hotloop.figures import node_subset, reproduce_figures, write_bundle


@pytest.fixture(scope="module")
def bundle(plant, sweep):
    return reproduce_figures(plant, sweep)


def test_seven_datasets_and_manifest(bundle):
    assert len(bundle.datasets) == 7
    names = [d["name"] for d in bundle.manifest["datasets"]]
    assert names == [d.name for d in bundle.datasets]
    assert bundle.manifest["seed"] == 2012
    assert len(bundle.manifest["config_hash"]) == 64


def test_subset_is_seeded(plant):
    a, b = node_subset(plant), node_subset(plant)
    assert np.array_equal(a, b) and len(a) == 13 and len(set(a.tolist())) == 13


def test_histogram_fits(bundle):
    mu, sigma = bundle["fig4b_core_histogram"].fit
    assert mu == pytest.approx(84.0, abs=0.5) and sigma == pytest.approx(2.8, abs=0.3)
    mu, sigma = bundle["fig5b_power_histogram"].fit
    assert mu == pytest.approx(206.0, abs=1.0) and sigma == pytest.approx(5.4, abs=0.6)
    counts = bundle["fig4b_core_histogram"].series["count"]
    assert counts.sum() == 216


def test_cop_ratio_in_dataset(bundle):
    s = bundle["fig6b_cop"].series
    sp, cop = s["setpoint_C"], s["cop"]
    ratio = cop[sp == 70.0][0] / cop[sp == 57.0][0]
    assert ratio == pytest.approx(1.90, abs=0.02)


def test_relative_power_starts_at_zero(bundle):
    s = bundle["fig6a_relative_power"].series
    node_cols = [c for c in s.columns if c.startswith("node")]
    assert len(node_cols) == 13
    first = s.data[0, [s.columns.index(c) for c in node_cols]]
    assert np.allclose(first, 0.0, atol=1e-12)


def test_write_bundle(tmp_path, bundle):
    names = write_bundle(bundle, tmp_path)
    assert sorted(p.name for p in tmp_path.iterdir()) == sorted(names)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["datasets"][1]["fit"]["mu"] == pytest.approx(bundle.datasets[1].fit[0], rel=1e-5)
