import math

import numpy as np
import pytest

import chronoblox as cb

TWO_TRIANGLES = "\n".join(
    ["phase,source,target"]
    + [f"0,{u},{v}" for u, v in [("a", "b"), ("b", "c"), ("a", "c"), ("d", "e"), ("e", "f"), ("d", "f"), ("c", "d")]]
    + ["1,a,b"]
)


def test_parse_sequence():
    s = cb.parse_sequence(TWO_TRIANGLES)
    assert s["n_phases"] == 2
    assert s["phases"][0]["nodes"] == 6
    assert s["phases"][0]["edges"] == 7
    with pytest.raises(Exception):
        cb.parse_sequence("phase,source,target\n0,a\n")


def test_louvain_splits_triangles():
    groups, q = cb.louvain(TWO_TRIANGLES, 0, seed=1)
    assert groups["a"] == groups["b"] == groups["c"]
    assert groups["d"] == groups["e"] == groups["f"]
    assert groups["a"] != groups["d"]
    assert q == pytest.approx(5 / 14)


def test_jaccard():
    assert cb.jaccard([1, 2, 3], [2, 3, 4]) == pytest.approx(0.5)
    assert cb.jaccard([1], [2]) == 0.0


def test_hhi_keep_mask():
    assert cb.hhi_keep_mask([(0, 0, 1, 0, 0.9), (0, 0, 1, 1, 0.1)]) == [True, False]


def test_pca_axis():
    values = cb.pca_axis([(0.0, 0.0), (1.0, 1.0), (3.0, 3.0)])
    assert sum(values) == pytest.approx(0.0, abs=1e-12)
    assert abs(values[2] - values[0]) == pytest.approx(3 * math.sqrt(2))


def test_pacmap_on_numpy():
    rng = np.random.default_rng(0)
    x = np.vstack([rng.normal(size=(20, 8)) + 20 * np.eye(8)[k] for k in range(3)])
    y = cb.pacmap(x, seed=3)
    assert y.shape == (60, 2)
    assert np.isfinite(y).all()
    assert np.array_equal(y, cb.pacmap(x, seed=3))


def test_run_and_validate():
    edges, parts = cb.generate_scenario(seed=1, scale=0.1)
    artifact = cb.run(edges, partitions=parts, config={"deterministic": True})
    assert artifact["schema_version"] == 1
    assert artifact["meta"]["n_phases"] == 11
    assert cb.validate_artifact(artifact) == []
    artifact["groups"][0]["x"] = None
    assert len(cb.validate_artifact(artifact)) == 1
