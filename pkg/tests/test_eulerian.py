import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import cycle3, graph_from_matrix
from svdgft import GraphValidationError, HypothesisViolation
from svdgft.eulerian import (
    check_eulerian_laplacian,
    check_necessary_condition,
    check_reflection,
    d_sigma,
    d_uv,
    derivative_bound,
    finite_difference_errors,
    is_simple,
    laplacian_t,
    sigma_asym,
    svd_path,
)
from svdgft.gft import svd_basis
from svdgft.graph import DirectedGraph, build_laplacian, random_digraph, random_eulerian_graph, random_undirected_graph


def _L(seed, n=10, cycles=4):
    return build_laplacian(random_eulerian_graph(n, cycles, seed))


def _raw_svd(M):
    # ascending singular triplets from LAPACK, sign fixed by u . ref later
    U, s, Vt = np.linalg.svd(M)
    return U[:, ::-1], s[::-1], Vt[::-1].T


def test_check_eulerian():
    with pytest.raises(GraphValidationError):
        check_eulerian_laplacian(build_laplacian(DirectedGraph(2, [(0, 1, 1.0)])))
    check_eulerian_laplacian(build_laplacian(cycle3()))


@given(st.integers(0, 2**32), st.floats(0, 1), st.floats(0, 1))
def test_laplacian_t_is_affine(seed, t, s):
    L = _L(seed, 8, 3)
    np.testing.assert_array_equal(laplacian_t(L, 0), L)
    np.testing.assert_array_equal(laplacian_t(L, 1), L.T)
    half = laplacian_t(L, 0.5)
    np.testing.assert_allclose(half, half.T, atol=1e-15)
    mix = s * laplacian_t(L, t) + (1 - s) * laplacian_t(L, 1 - t)
    np.testing.assert_allclose(mix, laplacian_t(L, s * t + (1 - s) * (1 - t)), atol=1e-12)
    np.testing.assert_allclose(laplacian_t(L, t) @ np.ones(8), 0, atol=1e-12)
    np.testing.assert_allclose(laplacian_t(L, t).T @ np.ones(8), 0, atol=1e-12)


def test_sigma_asym_examples(rng):
    L = build_laplacian(random_undirected_graph(10, 0.3, seed=1))
    assert sigma_asym(L) <= 1e-14
    assert sigma_asym(build_laplacian(cycle3())) == pytest.approx(np.sqrt(3), abs=1e-12)
    L = _L(2)
    assert sigma_asym(3 * L) == pytest.approx(3 * sigma_asym(L), rel=1e-12)
    X = rng.standard_normal((10, 2000))
    X /= np.linalg.norm(X, axis=0)
    assert np.linalg.norm((L - L.T) @ X, axis=0).max() <= sigma_asym(L) + 1e-12


@given(st.integers(0, 2**32))
def test_sigma_family_symmetric_and_lipschitz(seed):
    L = _L(seed, 9, 3)
    grid = np.linspace(0, 1, 11)
    S = np.array([np.sort(np.linalg.svd(laplacian_t(L, t), compute_uv=False)) for t in grid])
    scale = 1 + S.max()
    assert np.abs(S - S[::-1]).max() <= 1e-9 * scale
    lip = sigma_asym(L) * np.diff(grid)[:, None]
    assert np.all(np.abs(np.diff(S, axis=0)) <= lip + 1e-9)


def test_path_is_aligned():
    L = _L(3, 12, 5)
    path = svd_path(L, np.linspace(0, 1, 21))
    assert path.evaluated_points >= 21
    for a, b in zip(path.bases, path.bases[1:]):
        assert np.all(np.einsum("ij,ij->j", a.V, b.V)[1:] > 0)
        assert np.all(np.einsum("ij,ij->j", a.U, b.U)[1:] > 0)
    for b in path.bases:
        assert b.sigma[0] == 0.0
        np.testing.assert_allclose(b.U[:, 0], b.V[:, 0], atol=1e-12)
        np.testing.assert_allclose(b.V[:, 0], 1 / np.sqrt(12), atol=1e-12)


def test_path_grid_validation():
    L = _L(0)
    for bad in ([], [0.5, 0.2], [-0.1, 0.5], [0.0, 1.5]):
        with pytest.raises(GraphValidationError):
            svd_path(L, bad)


def test_simple_flags():
    assert not is_simple(svd_basis(build_laplacian(cycle3())))
    assert is_simple(svd_basis(_L(5)))


# --- derivatives against independent finite differences


def _fd_oracle(L, t, h=1e-6):
    """Central differences from raw LAPACK output, signs matched to the basis at t."""
    mid = svd_basis(laplacian_t(L, t))
    Up, sp, Vp = _raw_svd(laplacian_t(L, t + h))
    Um, sm, Vm = _raw_svd(laplacian_t(L, t - h))
    for U, V in ((Up, Vp), (Um, Vm)):
        sign = np.sign(np.einsum("ij,ij->j", V, mid.V))
        U *= sign
        V *= sign
    return mid, (sp - sm) / (2 * h), (Up - Um) / (2 * h), (Vp - Vm) / (2 * h)


@pytest.mark.parametrize("seed", range(6))
def test_derivatives_match_finite_differences(seed):
    L = _L(seed, 10, 4)
    t = 0.3
    mid, ds, dU, dV = _fd_oracle(L, t)
    assert is_simple(mid)
    for i in range(1, mid.n):
        assert abs(d_sigma(mid, L, i) - ds[i]) <= 1e-5 * np.abs(ds).max()
        du, dv = d_uv(mid, L, i)
        assert np.linalg.norm(du - dU[:, i]) <= 1e-4 * np.linalg.norm(dU[:, i])
        assert np.linalg.norm(dv - dV[:, i]) <= 1e-4 * np.linalg.norm(dV[:, i])


def test_d_sigma_sign_on_a_small_example():
    L = _L(11, 6, 3)
    b = svd_basis(laplacian_t(L, 0.2))
    h = 1e-6
    up = np.sort(np.linalg.svd(laplacian_t(L, 0.2 + h), compute_uv=False))
    dn = np.sort(np.linalg.svd(laplacian_t(L, 0.2 - h), compute_uv=False))
    i = 4
    assert np.sign(d_sigma(b, L, i)) == np.sign(up[i] - dn[i])


def test_finite_difference_report():
    r = finite_difference_errors(_L(1), 0.25)
    assert r["d_sigma"] <= 1e-5 and r["d_uv"] <= 1e-4
    assert finite_difference_errors(build_laplacian(cycle3()), 0.25) is None
    with pytest.raises(GraphValidationError):
        finite_difference_errors(_L(1), 0.0)


def test_undirected_derivatives_vanish():
    L = build_laplacian(random_undirected_graph(8, 0.6, seed=4))
    b = svd_basis(L)
    for i in range(b.kernel_rank, 8):
        assert d_sigma(b, L, i) == 0.0


def test_not_simple_raises():
    b = svd_basis(build_laplacian(cycle3()))
    with pytest.raises(HypothesisViolation):
        d_sigma(b, build_laplacian(cycle3()), 1)
    with pytest.raises(HypothesisViolation):
        d_uv(b, build_laplacian(cycle3()), 1)
    with pytest.raises(HypothesisViolation):
        d_sigma(b, build_laplacian(cycle3()), 0)


@pytest.mark.parametrize("seed", range(5))
def test_derivative_norm_bound(seed):
    L = _L(seed, 9, 4)
    for t in (0.1, 0.35, 0.8):
        b = svd_basis(laplacian_t(L, t))
        if not is_simple(b):
            continue
        bound = derivative_bound(b, L)
        for i in range(1, 9):
            du, dv = d_uv(b, L, i)
            assert max(np.linalg.norm(du), np.linalg.norm(dv)) <= bound * (1 + 1e-10)
            assert abs(d_sigma(b, L, i)) <= sigma_asym(L) + 1e-10


# --- reflection and the necessary condition


@pytest.mark.parametrize("seed", range(4))
def test_reflection(seed):
    path = svd_path(_L(seed), np.linspace(0, 1, 11))
    r = check_reflection(path, seed=seed)
    assert r["status"] == "pass", r
    assert r["pairs"] == 11


def test_reflection_inconclusive_cases():
    r = check_reflection(svd_path(build_laplacian(cycle3()), np.linspace(0, 1, 5)))
    assert r["status"] == "inconclusive"
    r = check_reflection(svd_path(_L(0), [0.1, 0.2]))
    assert r["status"] == "inconclusive" and "pair" in r["reason"]


def test_necessary_condition_detects_changing_basis():
    r = check_necessary_condition(_L(7))
    assert not r["condition_holds"] and r["bases_differ"]
    assert r["constant_basis_possible"] is False
    r = check_necessary_condition(build_laplacian(cycle3()))
    assert r["square_gap"] == pytest.approx(3.0)


def test_necessary_condition_holds_for_an_asymmetric_graph():
    # negative weights make (L^T)^2 = L^2 with L != L^T
    A = np.zeros((3, 3))
    A[1, 0], A[0, 1], A[2, 1], A[1, 2], A[0, 2], A[2, 0] = 2, 1, -2.5, -3.5, 2, 1
    L = build_laplacian(graph_from_matrix(A))
    assert np.abs(L - L.T).max() > 0.5
    r = check_necessary_condition(L)
    assert r["condition_holds"] and r["bases_differ"] is None


def test_undirected_path_is_constant():
    L = build_laplacian(random_undirected_graph(8, 0.5, seed=2))
    path = svd_path(L, [0.0, 0.5, 1.0])
    for b in path.bases[1:]:
        np.testing.assert_allclose(b.V, path.bases[0].V, atol=1e-12)
