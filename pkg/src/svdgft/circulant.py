"""Real SVD of directed circulant Laplacians built from the DFT.

For ``Q = {q_1 < ... < q_L}`` the circulant Laplacian ``C`` has entries
``C[i, i] = L`` and ``C[i, j] = -1`` when ``j - i`` is in ``Q`` mod ``n``.  Its
eigenvalues are the symbol values ``P(w^i) = L - sum_l w^(i q_l)`` with the DFT
columns as eigenvectors, and

    U = W Theta P0 R P1,   V = W P0 R P1

are real orthogonal matrices with ``C = U Sigma V^T``.  ``C`` is the
Laplacian of the *transpose* of :func:`svdgft.graph.circulant_graph`.
"""

from dataclasses import dataclass

import numpy as np

from ._errors import ConsistencyError, GraphValidationError
from .gft import ZERO_REL_TOL, GftCoefficients, SvdBasis
from .graph import DirectedGraph, _check_q_set, build_laplacian

__all__ = [
    "CirculantSymbol",
    "CirculantFactorization",
    "circulant_laplacian",
    "symbol",
    "dft_matrix",
    "phase_matrix",
    "rotation_matrix",
    "pairing_order",
    "permutations",
    "factorized_svd",
    "factorization_basis",
    "theorem1_gft",
    "verify",
]


@dataclass(frozen=True, eq=False)
class CirculantSymbol:
    n: int
    q_set: tuple
    values: np.ndarray

    @property
    def magnitudes(self):
        return np.abs(self.values)


@dataclass(frozen=True, eq=False)
class CirculantFactorization:
    n: int
    q_set: tuple
    laplacian: np.ndarray
    W: np.ndarray
    Theta: np.ndarray
    P0: np.ndarray
    Q_perm: np.ndarray
    P1: np.ndarray
    R: np.ndarray
    U: np.ndarray
    V: np.ndarray
    Sigma: np.ndarray
    residuals: dict


def _q(n, q_set):
    if int(n) != n or n < 2:
        raise GraphValidationError(f"circulant graphs need n >= 2, got {n!r}")
    return int(n), _check_q_set(int(n), q_set)


def circulant_laplacian(n, q_set):
    n, q = _q(n, q_set)
    C = len(q) * np.eye(n)
    for i in range(n):
        for s in q:
            C[i, (i + s) % n] = -1.0
    return C


def circulant_digraph(n, q_set):
    """The graph whose Laplacian is :func:`circulant_laplacian` (edges ``i+q -> i``)."""
    n, q = _q(n, q_set)
    return DirectedGraph(n, [((i + s) % n, i, 1.0) for i in range(n) for s in q])


def symbol(n, q_set):
    """Symbol values ``P(w^i) = |Q| - sum_q w^(i q)`` at the ``n``-th roots of unity."""
    n, q = _q(n, q_set)
    i = np.arange(n)
    # exact integer exponents keep P(1) = 0 and conjugate symmetry to rounding
    vals = len(q) - sum(np.exp(2j * np.pi * ((i * s) % n) / n) for s in q)
    return CirculantSymbol(n, q, vals)


def dft_matrix(n):
    ij = np.outer(np.arange(n), np.arange(n)) % n
    return np.exp(2j * np.pi * ij / n) / np.sqrt(n)


def _zero_mask(sym):
    mag = sym.magnitudes
    return mag <= max(ZERO_REL_TOL * mag.max(), 1e-12 * sym.n)


def phase_matrix(sym):
    """Diagonal of unit phases ``P / |P|``, with 1 where the symbol vanishes."""
    mag = sym.magnitudes
    zero = _zero_mask(sym)
    ph = np.where(zero, 1.0 + 0j, sym.values / np.where(zero, 1.0, mag))
    return np.diag(ph)


def rotation_matrix(n):
    """Block diagonal ``diag(1, R2, ..., R2[, 1])`` with ``R2 = [[1, -i], [1, i]] / sqrt(2)``."""
    R = np.eye(n, dtype=complex)
    R2 = np.array([[1, -1j], [1, 1j]]) / np.sqrt(2)
    for k in range(1, (n + 1) // 2):
        R[2 * k - 1 : 2 * k + 1, 2 * k - 1 : 2 * k + 1] = R2
    return R


def pairing_order(n):
    """Column order ``0, 1, n-1, 2, n-2, ...`` (then ``n/2`` for even ``n``)."""
    order = [0]
    for k in range(1, (n + 1) // 2):
        order += [k, n - k]
    if n % 2 == 0 and n > 1:
        order.append(n // 2)
    return order


def _perm_matrix(cols):
    n = len(cols)
    P = np.zeros((n, n))
    P[cols, np.arange(n)] = 1.0
    return P


def _sorted_units(sym):
    """Index units ``(0)``, ``(k, n-k)``, ``(n/2)`` in nondecreasing magnitude.

    Magnitudes within ``1e-10 (1 + max)`` of each other count as ties and are
    ordered by their smaller index; index 0 always comes first.
    """
    n = sym.n
    mag = sym.magnitudes
    units = [(k, n - k) for k in range(1, (n + 1) // 2)]
    if n % 2 == 0 and n > 1:
        units.append((n // 2,))
    units.sort(key=lambda u: (min(mag[list(u)]), u[0]))
    tol = 1e-10 * (1.0 + mag.max())
    groups = []
    for u in units:
        m = min(mag[list(u)])
        if groups and m - groups[-1][0] <= tol:
            groups[-1][1].append(u)
        else:
            groups.append((m, [u]))
    ordered = [(0,)]
    for _, members in groups:
        ordered += sorted(members, key=lambda u: u[0])
    return ordered


def permutations(sym):
    """Permutation matrices ``(P0, Q, P1)``.

    ``P0`` has columns ``e_0, e_1, e_{n-1}, e_2, e_{n-2}, ...``, so ``W P0``
    puts each conjugate pair of DFT columns side by side for ``R`` to combine.
    ``Q`` sorts the symbol magnitudes, ``Sigma = Q^T M Q`` with 0 first and each
    pair ``(i, n-i)`` adjacent, and ``P1 = P0^T Q``.
    """
    n = sym.n
    P0 = _perm_matrix(pairing_order(n))
    q = [i for u in _sorted_units(sym) for i in u]
    Q = _perm_matrix(q)
    return P0, Q, P0.T @ Q


def factorized_svd(n, q_set):
    """Assemble the DFT-based real SVD of the circulant Laplacian and check it.

    Raises
    ------
    ConsistencyError
        If any factor invariant fails; the residual is attached.
    """
    n, q = _q(n, q_set)
    C = circulant_laplacian(n, q)
    sym = symbol(n, q)
    W = dft_matrix(n)
    Theta = phase_matrix(sym)
    R = rotation_matrix(n)
    P0, Q, P1 = permutations(sym)
    M = np.diag(sym.magnitudes)
    Uc = W @ Theta @ P0 @ R @ P1
    Vc = W @ P0 @ R @ P1
    Sigma = np.diag(Q.T @ M @ Q).copy()
    Sigma[_zero_mask(sym)[np.argmax(Q, axis=0)]] = 0.0
    # paired magnitudes agree only to rounding; keep the diagonal exactly sorted
    Sigma = np.maximum.accumulate(Sigma)

    I = np.eye(n)
    res = {
        "eigen_identity": float(np.abs(C @ W - W @ Theta @ M).max()),
        "commutation": float(np.abs(M @ P0 @ R @ P0.T - P0 @ R @ P0.T @ M).max()),
        "imag_U": float(np.abs(Uc.imag).max()),
        "imag_V": float(np.abs(Vc.imag).max()),
    }
    U, V = Uc.real.copy(), Vc.real.copy()
    res.update(
        orthogonality_U=float(np.abs(U.T @ U - I).max()),
        orthogonality_V=float(np.abs(V.T @ V - I).max()),
        reconstruction=float(np.abs(C - (U * Sigma) @ V.T).max()),
        sigma_monotone=float(max(0.0, -np.diff(Sigma).min(initial=0.0))),
    )
    scale = 1.0 + Sigma.max()
    limits = {
        "eigen_identity": 1e-12 * scale,
        "commutation": 1e-12 * scale,
        "imag_U": 1e-12,
        "imag_V": 1e-12,
        "orthogonality_U": 1e-12,
        "orthogonality_V": 1e-12,
        "reconstruction": 1e-10 * scale,
        "sigma_monotone": 1e-12 * scale,
    }
    for key, lim in limits.items():
        if res[key] > lim:
            raise ConsistencyError(f"circulant factorization n={n} Q={list(q)}: {key} exceeds {lim:.1e}", res[key])
    return CirculantFactorization(n, q, C, W, Theta, P0, Q, P1, R, U, V, Sigma, res)


def factorization_basis(fac):
    """View a circulant factorization as an :class:`SvdBasis`."""
    sym = symbol(fac.n, fac.q_set)
    k = int(np.sum(_zero_mask(sym)))
    return SvdBasis(fac.n, fac.Sigma, fac.U, fac.V, k)


def theorem1_gft(n, q_set, x, fac=None):
    """GFT of ``x`` computed from its DFT.

    ``sum = P1^T R^H P0^T (Theta^H + I) DFT(x) / 2`` and
    ``diff = P1^T R^H P0^T (Theta^H - I) DFT(x) / 2`` with ``DFT(x) = W^H x``,
    evaluated by FFT rather than through ``U`` and ``V``.
    """
    if fac is None:
        fac = factorized_svd(n, q_set)
    x = np.asarray(x, dtype=float)
    if x.shape != (fac.n,):
        raise ValueError(f"signal has shape {x.shape}, expected ({fac.n},)")
    X = np.fft.fft(x) / np.sqrt(fac.n)
    th = np.diag(fac.Theta).conj()
    T = fac.P1.T @ fac.R.conj().T @ fac.P0.T
    a = T @ ((th + 1) * X) / 2
    b = T @ ((th - 1) * X) / 2
    imag = max(np.abs(a.imag).max(), np.abs(b.imag).max())
    if imag > 1e-10 * max(1.0, np.linalg.norm(x)):
        raise ConsistencyError("DFT-side coefficients are not real", imag)
    return GftCoefficients(a.real, b.real)


def verify(n, q_set, seed=0, probes=4):
    """Full invariant report for one ``(n, Q)`` pair (used by the CLI)."""
    from .gft import gft
    from .rng import generator

    fac = factorized_svd(n, q_set)
    dense = np.sort(np.linalg.svd(fac.laplacian, compute_uv=False))
    basis = factorization_basis(fac)
    rng = generator(seed, fac.n)
    path_gap = 0.0
    for _ in range(probes):
        x = rng.standard_normal(fac.n)
        t1 = theorem1_gft(n, q_set, x, fac)
        d1 = gft(basis, x)
        path_gap = max(path_gap, np.abs(t1.sum_block - d1.sum_block).max(), np.abs(t1.diff_block - d1.diff_block).max())
    graph_match = float(np.abs(build_laplacian(circulant_digraph(n, q_set)) - fac.laplacian).max())
    res = dict(fac.residuals)
    res["spectrum_vs_dense_svd"] = float(np.abs(dense - fac.Sigma).max())
    res["dft_route_vs_definition"] = float(path_gap)
    res["graph_laplacian"] = graph_match
    scale = 1.0 + fac.Sigma.max()
    checks = {
        "real_factors": res["imag_U"] <= 1e-12 and res["imag_V"] <= 1e-12,
        "orthogonal": res["orthogonality_U"] <= 1e-12 and res["orthogonality_V"] <= 1e-12,
        "reconstruction": res["reconstruction"] <= 1e-10 * scale,
        "spectrum_matches_dense_svd": res["spectrum_vs_dense_svd"] <= 1e-10,
        "eigen_identity": res["eigen_identity"] <= 1e-12 * scale,
        "commutation": res["commutation"] <= 1e-12 * scale,
        "dft_equivalence": res["dft_route_vs_definition"] <= 1e-10,
        "graph_laplacian": graph_match == 0.0,
    }
    return fac, res, checks
