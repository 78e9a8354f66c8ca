import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from svdgft import GraphValidationError
from svdgft.denoise import (
    SNR_CAP_DB,
    ExperimentConfig,
    add_noise,
    build_graph,
    isnr,
    piecewise_signal,
    run_experiment,
    smooth_signal,
    snr,
)
from svdgft.gft import svd_basis
from svdgft.graph import DirectedGraph, adjacency_matrix, build_laplacian, circulant_graph, random_undirected_graph
from svdgft.variation import quadratic_variation


def test_piecewise_single_piece_is_constant():
    g = circulant_graph(10, [1])
    np.testing.assert_array_equal(piecewise_signal(g, 1), np.zeros(10))
    np.testing.assert_array_equal(piecewise_signal(g, 1, levels=[2.5]), np.full(10, 2.5))


def test_piecewise_binary_cut():
    g = random_undirected_graph(20, 0.2, seed=3)
    x = piecewise_signal(g, 2, levels=[0.0, 1.0], seed=1)
    assert set(np.unique(x)) == {0.0, 1.0}
    A = adjacency_matrix(g)
    # quadratic variation of an indicator is the total weight crossing the cut
    cut = sum(w for s, d, w in g.edges if x[s] != x[d]) / 2
    assert quadratic_variation(build_laplacian(g), x) == pytest.approx(cut, rel=1e-12)
    assert A.sum() > 0


def test_piecewise_groups_are_connected():
    g = circulant_graph(30, [1])
    x = piecewise_signal(g, 3, seed=5)
    # on a cycle each piece is an arc, so labels change exactly 3 times around it
    assert np.sum(x != np.roll(x, 1)) == 3


def test_piecewise_determinism_and_errors():
    g = circulant_graph(12, [1, 2])
    np.testing.assert_array_equal(piecewise_signal(g, 4, seed=9), piecewise_signal(g, 4, seed=9))
    with pytest.raises(GraphValidationError):
        piecewise_signal(g, 13)
    with pytest.raises(GraphValidationError):
        piecewise_signal(g, 2, levels=[1.0])


def test_piecewise_unreachable_vertices_join_group_zero():
    g = DirectedGraph(4, [(0, 1, 1.0)])
    x = piecewise_signal(g, 2, levels=[7.0, 8.0], seed=0)
    assert set(x) <= {7.0, 8.0}


def test_smooth_signal_is_bandlimited():
    b = svd_basis(build_laplacian(random_undirected_graph(30, 0.2, seed=0)))
    x = smooth_signal(b, 5, amplitude=2.0, seed=1)
    assert np.sqrt(np.mean(x**2)) == pytest.approx(2.0)
    assert np.linalg.norm(b.V[:, 5:].T @ x) <= 1e-10 * np.linalg.norm(x)


def test_noise_statistics():
    x = np.zeros(10_000)
    eta = add_noise(x, 9.0, seed=3)
    assert np.var(eta) == pytest.approx(9.0, rel=0.05)
    assert abs(eta.mean()) < 0.1
    np.testing.assert_array_equal(eta, add_noise(x, 9.0, seed=3))
    assert not np.array_equal(eta, add_noise(x, 9.0, seed=4))
    tiny = add_noise(np.ones(5), 1e-20, seed=0)
    np.testing.assert_allclose(tiny, 1.0, atol=1e-8)
    with pytest.raises(GraphValidationError):
        add_noise(x, 0.0)


def test_ratio_examples(rng):
    x = rng.standard_normal(40)
    assert isnr(x, x) == pytest.approx(0.0)
    eta = rng.standard_normal(40)
    eta *= np.linalg.norm(x) / 10 / np.linalg.norm(eta)
    assert isnr(x, eta) == pytest.approx(20.0)
    assert snr(x, x) == SNR_CAP_DB
    assert snr(x, x + 1e-300) == SNR_CAP_DB
    assert snr(x, np.zeros(40)) == pytest.approx(0.0)
    with pytest.raises(GraphValidationError):
        snr(np.zeros(3), np.ones(3))


def _cfg(**kw):
    d = dict(graph={"type": "circulant", "n": 16, "q": [1, 2]}, variances=[1.0], M=[4], trials=2)
    d.update(kw)
    return ExperimentConfig.from_dict(d)


def test_full_band_is_identity_and_empty_band_is_zero_db():
    rep = run_experiment(_cfg(M=[0, 16], signal={"type": "smooth", "components": 3, "count": 2}))
    by_m = {s["M"]: s for s in rep.summary}
    full = rep.rows[rep.rows[:, 1] == 16]
    np.testing.assert_allclose(full[:, 5], full[:, 4], atol=1e-9)
    assert by_m[0]["mean_snr"] == pytest.approx(0.0, abs=1e-12)
    assert rep.energy_monotone
    assert rep.rows.shape == (2 * 2 * 2, 6)


def test_noise_shared_across_cutoffs():
    rep = run_experiment(_cfg(M=[2, 8]))
    r = rep.rows
    np.testing.assert_array_equal(r[r[:, 1] == 2][:, 4], r[r[:, 1] == 8][:, 4])


def test_smooth_undirected_setting_gains():
    # on an undirected graph U = V, so the projector is orthogonal and the bias vanishes
    cfg = ExperimentConfig.from_dict(
        {
            "graph": {"type": "file", "path": "unused"},
            "signal": {"type": "smooth", "components": 10, "amplitude": 10.0, "count": 4},
            "variances": [9.0],
            "M": [25],
            "trials": 50,
        }
    )
    g = random_undirected_graph(200, 0.05, seed=1)
    rep = run_experiment(cfg, graph=g)
    s = rep.summary[0]
    assert s["mean_snr"] > s["mean_isnr"] + 1.0
    assert s["samples"] == 200


@settings(max_examples=10)
@given(st.integers(0, 2**32), st.integers(12, 40))
def test_undirected_projection_never_increases_error(seed, n):
    # orthogonal projection onto a space containing x cannot increase the noise
    g = random_undirected_graph(n, 0.3, seed)
    b = svd_basis(build_laplacian(g))
    x = smooth_signal(b, 3, seed=seed)
    y = add_noise(x, 1.0, seed)
    from svdgft.gft import bandlimit

    assert np.linalg.norm(bandlimit(b, 6, y) - x) <= np.linalg.norm(y - x) + 1e-9


def test_experiment_determinism():
    a = run_experiment(_cfg(seed=4))
    b = run_experiment(_cfg(seed=4))
    np.testing.assert_array_equal(a.rows, b.rows)
    assert a.to_dict() == b.to_dict()
    assert not np.array_equal(a.rows, run_experiment(_cfg(seed=5)).rows)


def test_build_graph_knn_deterministic():
    spec = {"type": "knn", "n": 30, "k": 3}
    assert build_graph(spec, 1) == build_graph(spec, 1)
    assert build_graph(spec, 1).num_edges == 90


@pytest.mark.parametrize(
    "bad",
    [
        {"variances": [0.0]},
        {"variances": []},
        {"M": [-1]},
        {"M": [1.5]},
        {"trials": 0},
        {"graph": {"type": "star"}},
        {"signal": {"type": "chirp"}},
        {"signal": {"type": "smooth", "count": 0}},
        {"colour": "red"},
    ],
)
def test_config_validation(bad):
    with pytest.raises(GraphValidationError):
        _cfg(**bad)


def test_config_requires_graph_and_cutoffs_fit():
    with pytest.raises(GraphValidationError):
        ExperimentConfig.from_dict({"trials": 1})
    with pytest.raises(GraphValidationError):
        run_experiment(_cfg(M=[17]))


def test_config_round_trip():
    c = _cfg()
    assert ExperimentConfig.from_dict(c.to_dict()).to_dict() == c.to_dict()
