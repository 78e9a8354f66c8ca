"""Frequencies along the path ``L_t = (1 - t) L + t L^T`` of an Eulerian graph.

On an Eulerian graph both ``L`` and ``L^T`` annihilate the constant signal, so
every ``L_t`` is again an Eulerian Laplacian, ``L_{1/2}`` is symmetric and
``L_t`` runs from the graph to its transpose.  This module tracks an aligned
(sign- and order-continuous) SVD along the path, evaluates the analytic
derivatives of simple singular triplets and checks the reflection
``U_t = V_{1-t}`` and the necessary condition ``(L^T)^2 = L^2`` for a
t-independent basis.
"""

from dataclasses import dataclass
import math

import numpy as np

from ._errors import GraphValidationError, HypothesisViolation
from .gft import SvdBasis, gft, svd_basis
from .rng import generator

__all__ = [
    "EulerianPath",
    "GAP_REL_TOL",
    "check_eulerian_laplacian",
    "laplacian_t",
    "sigma_asym",
    "is_simple",
    "svd_path",
    "align_to",
    "d_sigma",
    "d_uv",
    "derivative_bound",
    "check_reflection",
    "check_necessary_condition",
    "finite_difference_errors",
]

GAP_REL_TOL = 1e-8
MAX_PATH_POINTS = 2**10
MAX_STEP_ANGLE = math.radians(30.0)


@dataclass(frozen=True, eq=False)
class EulerianPath:
    """Aligned SVD bases of ``L_t`` on an increasing grid of ``t`` values."""

    laplacian: np.ndarray
    grid: np.ndarray
    bases: tuple
    simple_flags: tuple
    evaluated_points: int

    def sigmas(self):
        return np.array([b.sigma for b in self.bases])


def check_eulerian_laplacian(L, tol=1e-12):
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise GraphValidationError(f"Laplacian must be square, got shape {L.shape}")
    scale = max(np.abs(np.diag(L)).max(), 1.0)
    rows = np.abs(L.sum(axis=1)).max()
    cols = np.abs(L.sum(axis=0)).max()
    if rows > tol * scale * L.shape[0] or cols > tol * scale * L.shape[0]:
        raise GraphValidationError(
            f"graph is not Eulerian (row-sum residual {rows:.2e}, column-sum residual {cols:.2e})"
        )
    return L


def laplacian_t(L, t):
    """``(1 - t) L + t L^T`` for ``0 <= t <= 1``."""
    L = check_eulerian_laplacian(L)
    if not 0.0 <= t <= 1.0:
        raise GraphValidationError(f"t must lie in [0, 1], got {t!r}")
    return (1.0 - t) * L + t * L.T


def sigma_asym(L):
    """Largest singular value of ``L - L^T``."""
    L = np.asarray(L, dtype=float)
    return float(np.linalg.norm(L - L.T, 2))


def _gap_tol(sigma):
    return GAP_REL_TOL * (1.0 + float(sigma[-1]))


def is_simple(basis):
    """All frequencies distinct (and hence only one zero) by the relative gap test."""
    return bool(basis.n < 2 or np.diff(basis.sigma).min() > _gap_tol(basis.sigma))


def _clusters(*sigmas):
    """Index groups of near-equal frequencies, merged across the given spectra."""
    n = sigmas[0].size
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for s in sigmas:
        gaps = np.diff(s)
        tol = GAP_REL_TOL * (1.0 + np.maximum(s[:-1], s[1:]))
        for i in np.flatnonzero(gaps < tol):
            parent[find(i + 1)] = find(i)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [sorted(g) for g in groups.values()]


def align_to(prev, basis):
    """Reorder and sign-flip ``basis`` columns to follow ``prev`` continuously.

    Within each cluster of near-equal frequencies, columns of ``basis`` are
    matched greedily to those of ``prev`` by largest ``|<v_prev, v_new>|``;
    each pair ``(u_i, v_i)`` is then flipped jointly so that
    ``<v_prev_i, v_new_i> >= 0``.

    Returns
    -------
    aligned : SvdBasis
    angle : float
        Largest principal angle (radians) between matching cluster subspaces.
    """
    U, V = basis.U.copy(), basis.V.copy()
    perm = np.arange(basis.n)
    worst = 0.0
    for group in _clusters(prev.sigma, basis.sigma):
        G = prev.V[:, group].T @ V[:, group]
        if len(group) > 1:
            A = np.abs(G).copy()
            assign = {}
            for _ in group:
                a, b = np.unravel_index(np.argmax(A), A.shape)
                assign[a] = b
                A[a, :] = -1.0
                A[:, b] = -1.0
            for a, gi in enumerate(group):
                perm[gi] = group[assign[a]]
        cos = np.linalg.svd(G, compute_uv=False).min()
        worst = max(worst, math.acos(min(1.0, float(cos))))
    U, V = U[:, perm], V[:, perm]
    sigma = basis.sigma[perm]
    dots = np.einsum("ij,ij->j", prev.V, V)
    flip = np.where(dots < 0, -1.0, 1.0)
    return SvdBasis(basis.n, sigma, U * flip, V * flip, basis.kernel_rank), worst


def svd_path(L, grid):
    """Aligned SVD bases of ``L_t`` at each grid point.

    Consecutive points whose cluster subspaces turn by 30 degrees or more are
    bridged by bisection, with at most ``2**10`` evaluated points in total;
    the intermediate bases only carry the alignment and are not returned.
    """
    L = check_eulerian_laplacian(L)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise GraphValidationError("grid must be a non-empty 1-D sequence")
    if grid.min() < 0.0 or grid.max() > 1.0:
        raise GraphValidationError("grid points must lie in [0, 1]")
    if np.any(np.diff(grid) <= 0):
        raise GraphValidationError("grid must be strictly increasing")

    budget = [MAX_PATH_POINTS - grid.size]

    def basis_at(t):
        return svd_basis((1.0 - t) * L + t * L.T)

    def advance(t0, b0, t1, b1):
        aligned, angle = align_to(b0, b1)
        if angle < MAX_STEP_ANGLE or budget[0] <= 0 or t1 - t0 < 1e-12:
            return aligned
        budget[0] -= 1
        tm = 0.5 * (t0 + t1)
        bm = advance(t0, b0, tm, basis_at(tm))
        return advance(tm, bm, t1, b1)

    bases = [basis_at(grid[0])]
    for t0, t1 in zip(grid[:-1], grid[1:]):
        bases.append(advance(t0, bases[-1], t1, basis_at(t1)))
    flags = tuple(is_simple(b) for b in bases)
    used = MAX_PATH_POINTS - budget[0]
    return EulerianPath(L, grid, tuple(bases), flags, used)


def _require_simple(basis, i, need_all):
    s = basis.sigma
    tol = _gap_tol(s)
    if not 1 <= i < basis.n:
        raise HypothesisViolation(f"frequency index must be in [1, {basis.n - 1}], got {i}")
    if s[i] <= tol:
        raise HypothesisViolation(f"sigma_{i} = {s[i]:.3e} is not positive")
    if need_all:
        gaps = np.diff(s)
        j = int(np.argmin(gaps))
        if gaps[j] <= tol:
            raise HypothesisViolation(f"spectrum not simple: sigma_{j + 1} - sigma_{j} = {gaps[j]:.3e} <= {tol:.3e}")
    else:
        near = [s[i] - s[i - 1]] + ([s[i + 1] - s[i]] if i + 1 < basis.n else [])
        if min(near) <= tol:
            raise HypothesisViolation(f"sigma_{i} is not simple: neighbouring gap {min(near):.3e} <= {tol:.3e}")


def d_sigma(basis_t, L, i):
    """``d sigma_i / dt = u_i^T (L^T - L) v_i`` for a simple ``sigma_i``.

    This is ``u_i^T (d L_t / dt) v_i``; as ``L^T - L`` is antisymmetric it
    equals ``-v_i^T (L^T - L) u_i``.
    """
    _require_simple(basis_t, i, need_all=False)
    L = np.asarray(L, dtype=float)
    return float(basis_t.U[:, i] @ (L.T - L) @ basis_t.V[:, i])


def _coefficients(sigma, i):
    s_i = sigma[i]
    with np.errstate(divide="ignore"):
        denom = s_i**2 - sigma**2
        a = s_i / denom
        b = sigma / denom
    a[i] = 1.0 / (4.0 * s_i)
    b[i] = -1.0 / (4.0 * s_i)
    return a, b


def d_uv(basis_t, L, i):
    """Derivatives ``(du_i/dt, dv_i/dt)`` of a simple singular pair.

    Sums over ``k = 1 .. n-1`` of ``(-b_ik v_k^T D u_i + a_ik u_k^T D v_i) u_k``
    and ``(-a_ik v_k^T D u_i + b_ik u_k^T D v_i) v_k`` with ``D = L^T - L``.
    Requires the whole spectrum at ``t`` to be simple and ``u_0 = v_0``
    constant, i.e. a connected Eulerian graph.
    """
    _require_simple(basis_t, i, need_all=True)
    L = np.asarray(L, dtype=float)
    D = L.T - L
    U, V = basis_t.U[:, 1:], basis_t.V[:, 1:]
    a, b = _coefficients(basis_t.sigma, i)
    a, b = a[1:], b[1:]
    p = V.T @ (D @ basis_t.U[:, i])
    q = U.T @ (D @ basis_t.V[:, i])
    du = U @ (-b * p + a * q)
    dv = V @ (-a * p + b * q)
    return du, dv


def derivative_bound(basis_t, L):
    """``C(t) * sigma_asym`` bounding ``||du_i/dt||`` and ``||dv_i/dt||``."""
    s = basis_t.sigma
    top_a = top_b = 0.0
    for i in range(1, basis_t.n):
        a, b = _coefficients(s, i)
        top_a = max(top_a, np.abs(a[1:]).max())
        top_b = max(top_b, np.abs(b[1:]).max())
    return (top_a + top_b) * sigma_asym(L)


def _column_distance(A, B):
    """Largest columnwise distance between ``A`` and ``B`` after per-column sign choice."""
    return float(np.minimum(np.linalg.norm(A - B, axis=0), np.linalg.norm(A + B, axis=0)).max())


def check_reflection(path, seed=0, probes=5):
    """Check ``U_t = V_{1-t}`` and the GFT reflection on a symmetric grid.

    Returns a report with ``status`` one of ``"pass"``, ``"fail"`` or
    ``"inconclusive"`` (when some frequency along the path is not simple).
    """
    report = {"status": "inconclusive", "pairs": 0, "column_residual": None, "gft_residual": None}
    if not all(path.simple_flags):
        bad = [float(t) for t, f in zip(path.grid, path.simple_flags) if not f]
        report["reason"] = f"frequencies not simple at t = {bad[:5]}"
        return report
    index = {round(float(t), 12): k for k, t in enumerate(path.grid)}
    rng = generator(seed, 0x726566)
    col = gres = 0.0
    pairs = 0
    for k, t in enumerate(path.grid):
        j = index.get(round(1.0 - float(t), 12))
        if j is None:
            continue
        pairs += 1
        bt, br = path.bases[k], path.bases[j]
        col = max(col, _column_distance(bt.U, br.V))
        for _ in range(probes):
            x = rng.standard_normal(bt.n)
            ft, fr = gft(bt, x), gft(br, x)
            gres = max(gres, np.abs(fr.sum_block - ft.sum_block).max(), np.abs(fr.diff_block + ft.diff_block).max())
    if pairs == 0:
        report["reason"] = "grid has no pair (t, 1 - t)"
        return report
    report.update(pairs=pairs, column_residual=col, gft_residual=float(gres))
    report["status"] = "pass" if col <= 1e-7 and gres <= 1e-8 else "fail"
    return report


def check_necessary_condition(L):
    """Compare ``(L^T)^2`` with ``L^2``, the necessary condition for a t-independent basis.

    If the two differ, the aligned bases at ``t = 0`` and ``t = 1`` are
    compared as well; by contraposition they must differ.  Equality of the
    squares does not imply the bases can be shared: the condition is
    necessary, not sufficient.
    """
    L = check_eulerian_laplacian(L)
    gap = float(np.abs(L.T @ L.T - L @ L).max())
    tol = 1e-9 * (1.0 + np.linalg.norm(L, 2) ** 2)
    report = {
        "square_gap": gap,
        "tolerance": float(tol),
        "condition_holds": bool(gap <= tol),
        "note": "(L^T)^2 = L^2 is necessary, not sufficient, for a t-independent SVD basis",
    }
    if gap > tol:
        path = svd_path(L, [0.0, 1.0])
        b0, b1 = path.bases
        dist = max(_column_distance(b0.U, b1.U), _column_distance(b0.V, b1.V))
        report.update(
            basis_distance=dist,
            bases_differ=bool(dist > 1e-6),
            constant_basis_possible=False,
        )
    else:
        report.update(basis_distance=None, bases_differ=None, constant_basis_possible=None)
    return report


def finite_difference_errors(L, t, h=1e-6):
    """Compare :func:`d_sigma` and :func:`d_uv` with central differences at ``t``.

    The difference quotients use the aligned path on ``(t - h, t, t + h)``.
    Returns ``None`` when the spectrum at any of the three points is not
    simple.  The ``d_sigma`` error is relative to the largest finite-difference
    derivative, floored at ``1e-3 * sigma_asym``: near ``t = 1/2`` all
    frequency derivatives vanish and the central difference is dominated by
    roundoff of order ``eps * sigma / h``.  The ``d_uv`` error is the worst
    per-component relative error.
    """
    L = check_eulerian_laplacian(L)
    if not h <= t <= 1.0 - h:
        raise GraphValidationError(f"t = {t} is within h = {h} of the interval ends")
    path = svd_path(L, [t - h, t, t + h])
    if not all(path.simple_flags):
        return None
    lo, mid, hi = path.bases
    idx = range(1, mid.n)
    ana = np.array([d_sigma(mid, L, i) for i in idx])
    fd = (hi.sigma[1:] - lo.sigma[1:]) / (2 * h)
    scale = max(np.abs(fd).max(), 1e-3 * sigma_asym(L), 1e-300)
    err_s = float(np.abs(ana - fd).max() / scale)
    err_uv = 0.0
    for i in idx:
        du, dv = d_uv(mid, L, i)
        for a, f in ((du, (hi.U[:, i] - lo.U[:, i]) / (2 * h)), (dv, (hi.V[:, i] - lo.V[:, i]) / (2 * h))):
            nf = np.linalg.norm(f)
            err = np.linalg.norm(a - f) / nf if nf > 1e-8 else np.linalg.norm(a - f)
            err_uv = max(err_uv, float(err))
    return {"t": float(t), "d_sigma": err_s, "d_uv": err_uv}
