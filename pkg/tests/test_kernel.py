import json
import warnings

import numpy as np
import pytest

from wickgraph.errors import ValidationError
from wickgraph.kernel import PRESETS, CovarianceKernel

BM = CovarianceKernel.preset("brownian_motion")
BB = CovarianceKernel.preset("brownian_bridge")


@pytest.mark.parametrize(
    "kernel, s, t, expected",
    [
        (BM, 0.3, 0.7, 0.3),
        (BB, 0.3, 0.7, 0.3 - 0.21),
        (CovarianceKernel.preset("product"), 0.5, 0.5, 0.25),
        (CovarianceKernel.preset("constant"), 0.1, 0.9, 1.0),
        (CovarianceKernel.preset("exponential", scale=2.0), 0.0, 1.0, np.exp(-0.5)),
    ],
)
def test_eval_examples(kernel, s, t, expected):
    assert kernel.eval(s, t) == pytest.approx(expected, abs=1e-15)


def test_eval_rejects_out_of_range():
    with pytest.raises(ValidationError):
        BM.eval(1.5, 0.2)


def test_unknown_preset():
    with pytest.raises(ValidationError):
        CovarianceKernel.preset("ou")


@pytest.mark.parametrize("name", PRESETS)
def test_symmetry_random_pairs(name):
    rng = np.random.default_rng(1)
    k = CovarianceKernel.preset(name)
    s, t = rng.random(10_000), rng.random(10_000)
    assert np.array_equal(k(s, t), k(t, s))


@pytest.mark.parametrize("name", PRESETS)
def test_gram_symmetric_psd(name):
    rng = np.random.default_rng(2)
    k = CovarianceKernel.preset(name)
    G = k.gram(rng.random(12))
    assert np.array_equal(G, G.T)
    assert np.linalg.eigvalsh(G).min() >= -1e-12


def test_grid_interpolates_nodes():
    nodes = np.linspace(0, 1, 6)
    table = np.minimum.outer(nodes, nodes)
    k = CovarianceKernel.from_grid(table)
    assert np.allclose(k(nodes[:, None], nodes[None, :]), table, atol=0)
    # bilinear on a min kernel is exact at nodes, and between them stays within a cell's spread
    assert k.eval(0.1, 0.9) == pytest.approx(0.1)
    assert np.allclose(k.breakpoints, nodes)


def test_grid_symmetrization_warns():
    table = np.array([[1.0, 0.2], [0.4, 1.0]])
    with pytest.warns(UserWarning):
        k = CovarianceKernel.from_grid(table)
    assert k.table[0, 1] == k.table[1, 0] == pytest.approx(0.3)


def test_grid_symmetric_no_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        CovarianceKernel.from_grid(np.eye(3))


def test_grid_rejects_non_square():
    with pytest.raises(ValidationError):
        CovarianceKernel.from_grid(np.ones((2, 3)))


def test_csv_and_config(tmp_path):
    nodes = np.linspace(0, 1, 5)
    table = np.minimum.outer(nodes, nodes) - np.outer(nodes, nodes)
    path = tmp_path / "bridge.csv"
    np.savetxt(path, table, delimiter=",")
    k = CovarianceKernel.from_config({"grid_file": "bridge.csv"}, base_dir=tmp_path)
    assert k == CovarianceKernel.from_csv(path)
    assert k.eval(0.25, 0.75) == pytest.approx(0.0625)
    assert json.dumps(k.to_config())
    with pytest.raises(ValidationError):
        CovarianceKernel.from_csv(tmp_path / "missing.csv")


def test_config_round_trip_and_identity():
    k = CovarianceKernel.from_config({"preset": "exponential", "scale": 0.5})
    assert CovarianceKernel.from_config(k.to_config()) == k
    assert k != CovarianceKernel.preset("exponential", scale=0.6)
    assert hash(BM) == hash(CovarianceKernel.preset("brownian_motion"))
    with pytest.raises(ValidationError):
        CovarianceKernel.from_config({})
