"""SVD-based graph Fourier transform on directed graphs.

The frequencies of a graph are the singular values of its Laplacian and the
left/right frequency components are the singular vectors.  A signal ``x`` is
mapped to the ``2n`` coefficients

    sum_block  = (U^T + V^T) x / 2
    diff_block = (U^T - V^T) x / 2

which is the orthogonal eigenbasis of the self-adjoint dilation
``[[0, L], [L^T, 0]]`` applied to ``(x, x) / sqrt(2)``.
"""

from dataclasses import dataclass

import numpy as np

from ._errors import GraphValidationError

__all__ = [
    "ZERO_REL_TOL",
    "ZERO_ABS_TOL",
    "SvdBasis",
    "GftCoefficients",
    "Dilation",
    "svd_basis",
    "basis_residuals",
    "gft",
    "igft",
    "gft_matrix",
    "dilation",
    "bandlimit",
    "energy_profile",
    "energy_curve",
]

ZERO_REL_TOL = 1e-10
ZERO_ABS_TOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SvdBasis:
    """Ordered singular triplets of a Laplacian.

    ``sigma`` is nondecreasing, ``U[:, i]`` and ``V[:, i]`` are the left and
    right components of frequency ``sigma[i]``, and the first
    ``kernel_rank`` singular values are exactly zero.
    """

    n: int
    sigma: np.ndarray
    U: np.ndarray
    V: np.ndarray
    kernel_rank: int

    def __post_init__(self):
        for name in ("sigma", "U", "V"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def kernel_index(self):
        """Largest index with zero frequency (``i0`` in the usual notation)."""
        return self.kernel_rank - 1


@dataclass(frozen=True, eq=False)
class GftCoefficients:
    sum_block: np.ndarray
    diff_block: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "sum_block", _frozen(self.sum_block))
        object.__setattr__(self, "diff_block", _frozen(self.diff_block))

    def stacked(self):
        return np.concatenate([self.sum_block, self.diff_block])

    def norm(self):
        return float(np.sqrt(np.sum(self.sum_block**2) + np.sum(self.diff_block**2)))


@dataclass(frozen=True, eq=False)
class Dilation:
    S: np.ndarray
    F: np.ndarray
    sigma: np.ndarray


def _as_laplacian(L):
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1] or L.shape[0] == 0:
        raise GraphValidationError(f"Laplacian must be a non-empty square matrix, got shape {L.shape}")
    if not np.all(np.isfinite(L)):
        raise GraphValidationError("Laplacian has non-finite entries")
    return L


def _fix_sign(v):
    """Flip ``v`` so its largest-magnitude entry (lowest index among ties) is positive."""
    mag = np.abs(v)
    top = mag.max()
    if top == 0.0:
        return v, 1.0
    j = int(np.flatnonzero(mag >= top * (1.0 - 1e-12))[0])
    s = 1.0 if v[j] > 0 else -1.0
    return s * v, s


def _complete(kernel, first=None):
    """Orthonormal basis of ``span(kernel)``, starting with ``first`` if given.

    The basis is built from the orthogonal projector onto the span, by
    Gram-Schmidt over the coordinate vectors in index order, so it depends
    only on the subspace and not on the particular ``kernel`` columns.
    """
    n, k = kernel.shape
    cols = [] if first is None else [first]
    P = kernel @ kernel.T
    for j in range(n):
        if len(cols) == k:
            break
        c = P[:, j].copy()
        for _ in range(2):
            for q in cols:
                c -= (q @ c) * q
        nrm = np.linalg.norm(c)
        if nrm > 1e-8:
            c, _ = _fix_sign(c / nrm)
            cols.append(c)
    if len(cols) != k:
        raise RuntimeError("kernel completion lost rank")
    return np.column_stack(cols)


def svd_basis(L):
    """Frequencies and frequency components of a Laplacian.

    The zero block is rebuilt so that ``v0 = 1/sqrt(n)`` and ``u0`` is the unit
    vector of ``ker(L^T)`` closest to a constant with nonnegative mean; for
    nonzero frequencies ``u_i = L v_i / sigma_i``.  Each nonzero-frequency pair
    is flipped jointly so the largest-magnitude entry of ``v_i`` is positive.

    Parameters
    ----------
    L : (n, n) array_like
        Laplacian with zero row sums.

    Returns
    -------
    SvdBasis
    """
    L = _as_laplacian(L)
    n = L.shape[0]
    Ul, s, Vt = np.linalg.svd(L)
    order = np.argsort(s, kind="stable")
    s = s[order]
    Ul = Ul[:, order]
    Vr = Vt.T[:, order]

    smax = s[-1]
    tol = ZERO_REL_TOL * smax if smax > 0 else ZERO_ABS_TOL
    k = max(int(np.sum(s <= tol)), 1)
    sigma = s.copy()
    sigma[:k] = 0.0

    ones = np.full(n, 1.0 / np.sqrt(n))
    V = np.empty((n, n))
    U = np.empty((n, n))
    V[:, :k] = _complete(Vr[:, :k], ones)

    Kl = Ul[:, :k]
    p = Kl @ (Kl.T @ np.ones(n))
    pn = np.linalg.norm(p)
    if pn > 1e-10 * np.sqrt(n):
        u0 = p / pn
    else:
        # every unit kernel vector has the same spread; take a canonical one
        u0 = _complete(Kl)[:, 0]
    U[:, :k] = _complete(Kl, u0)

    for i in range(k, n):
        v, _ = _fix_sign(Vr[:, i])
        V[:, i] = v
        U[:, i] = (L @ v) / sigma[i]
    return SvdBasis(n, sigma, U, V, k)


def basis_residuals(basis, L):
    """Orthogonality, reconstruction and ``v0`` residuals of ``basis`` against ``L``."""
    L = np.asarray(L, dtype=float)
    I = np.eye(basis.n)
    U, V, s = basis.U, basis.V, basis.sigma
    return {
        "orthogonality_U": float(np.abs(U.T @ U - I).max()),
        "orthogonality_V": float(np.abs(V.T @ V - I).max()),
        "reconstruction": float(np.abs(L - (U * s) @ V.T).max()),
        "v0_constant": float(np.abs(V[:, 0] - 1.0 / np.sqrt(basis.n)).max()),
        "sigma_nondecreasing": bool(np.all(np.diff(s) >= 0)),
        "sigma0": float(s[0]),
    }


def _signal(basis, x, name="signal"):
    x = np.asarray(x, dtype=float)
    if x.shape[0] != basis.n:
        raise GraphValidationError(f"{name} has length {x.shape[0]}, graph has {basis.n} vertices")
    return x


def gft(basis, x):
    """Forward transform; ``x`` may also be an ``(n, m)`` stack of signals."""
    x = _signal(basis, x)
    a = basis.U.T @ x
    b = basis.V.T @ x
    return GftCoefficients((a + b) / 2, (a - b) / 2)


def igft(basis, z1, z2):
    """Inverse transform ``(U (z1 + z2) + V (z1 - z2)) / 2``.

    This is the least-squares inverse of :func:`gft`.
    """
    z1 = _signal(basis, z1, "sum block")
    z2 = _signal(basis, z2, "diff block")
    return (basis.U @ (z1 + z2) + basis.V @ (z1 - z2)) / 2


def gft_matrix(basis):
    """The ``2n x n`` matrix of the forward transform."""
    return np.vstack([(basis.U.T + basis.V.T) / 2, (basis.U.T - basis.V.T) / 2])


def dilation(L, basis=None):
    """Self-adjoint dilation ``S = [[0, L], [L^T, 0]]`` and its orthogonal eigenbasis.

    ``F = [[U, U], [V, -V]] / sqrt(2)`` satisfies ``S = F diag(sigma, -sigma) F^T``.
    """
    L = _as_laplacian(L)
    if basis is None:
        basis = svd_basis(L)
    n = L.shape[0]
    Z = np.zeros((n, n))
    S = np.block([[Z, L], [L.T, Z]])
    F = np.block([[basis.U, basis.U], [basis.V, -basis.V]]) / np.sqrt(2)
    return Dilation(S, F, basis.sigma)


def _check_band(basis, M):
    if int(M) != M or not 0 <= M <= basis.n:
        raise GraphValidationError(f"band cutoff M must be an integer in [0, {basis.n}], got {M!r}")
    return int(M)


def bandlimit(basis, M, x):
    """Keep the first ``M`` frequencies: ``(U_M U_M^T x + V_M V_M^T x) / 2``."""
    M = _check_band(basis, M)
    x = _signal(basis, x)
    Um, Vm = basis.U[:, :M], basis.V[:, :M]
    return (Um @ (Um.T @ x) + Vm @ (Vm.T @ x)) / 2


def energy_curve(basis, x):
    """Relative energy captured by the first ``M`` frequencies for ``M = 0 .. n``."""
    x = _signal(basis, x)
    nx = np.linalg.norm(x)
    if nx == 0:
        raise GraphValidationError("energy ratio is undefined for the zero signal")
    c = gft(basis, x)
    per = c.sum_block**2 + c.diff_block**2
    return np.sqrt(np.concatenate([[0.0], np.cumsum(per)])) / nx


def energy_profile(basis, x, M):
    """Fraction ``||first M coefficient pairs|| / ||x||`` of signal energy."""
    M = _check_band(basis, M)
    return float(energy_curve(basis, x)[M])
