"""Small dense linear algebra used by the proximal-plane classifiers.

Everything here works on plain ``numpy`` arrays. The generalized
Rayleigh-quotient minimizer factors the (always positive definite) numerator
matrix and never the denominator, which is allowed to be singular.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateDenominator,
    DimensionMismatch,
    NonFiniteInput,
    NotPositiveDefinite,
    NotSymmetric,
)

SYMMETRY_RTOL = 1e-10


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray


def as_square(S, name="S"):
    S = np.asarray(S, dtype=float)
    if S.ndim == 0:
        S = S.reshape(1, 1)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise NonFiniteInput(f"{name} contains NaN or Inf")
    return S


def check_symmetric(S, name="S"):
    scale = max(np.abs(S).max(), np.finfo(float).tiny)
    if np.abs(S - S.T).max() > SYMMETRY_RTOL * scale:
        raise NotSymmetric(f"{name} is not symmetric")


def cholesky(S):
    """Lower-triangular ``L`` with ``L @ L.T == S``.

    Raises
    ------
    NotPositiveDefinite
        If ``S`` has a non-positive pivot.
    """
    S = as_square(S)
    check_symmetric(S)
    try:
        return np.linalg.cholesky(S)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc


def sym_eig(S):
    """Eigenpairs of a symmetric matrix, ascending by eigenvalue."""
    S = as_square(S)
    check_symmetric(S)
    values, vectors = np.linalg.eigh(S)
    return [EigenPair(float(values[i]), vectors[:, i].copy()) for i in range(len(values))]


def _factor_with_ridge(G):
    try:
        return cholesky(G)
    except NotPositiveDefinite:
        # one retry: rounding can push a tiny-delta G off the SPD cone
        n = G.shape[0]
        ridge = 1e-10 * np.trace(G) / n
        return cholesky(G + ridge * np.eye(n))


def min_rayleigh(G, H):
    """Minimize ``z'Gz / z'Hz`` for SPD ``G`` and PSD ``H``.

    Solves the reciprocal problem: with ``G = L L'`` the largest eigenpair
    ``(mu, v)`` of ``L^-1 H L^-T`` gives the minimizer ``z = L^-T v`` and the
    minimum ``1 / mu``.

    Returns
    -------
    EigenPair
        Smallest generalized eigenvalue and its unit-norm eigenvector.
    """
    G = as_square(G, "G")
    H = as_square(H, "H")
    if G.shape != H.shape:
        raise DimensionMismatch(f"G is {G.shape} but H is {H.shape}")
    check_symmetric(G, "G")
    check_symmetric(H, "H")

    h_norm = np.linalg.norm(H)
    if h_norm == 0.0 or h_norm <= 1e-14 * np.linalg.norm(G):
        raise DegenerateDenominator("denominator matrix is numerically zero")

    L = _factor_with_ridge(G)
    n = G.shape[0]
    # C = L^-1 H L^-T, symmetrized against rounding
    X = scipy.linalg.solve_triangular(L, H, lower=True, check_finite=False)
    C = scipy.linalg.solve_triangular(L, X.T, lower=True, check_finite=False)
    C = 0.5 * (C + C.T)
    mu, V = scipy.linalg.eigh(C, subset_by_index=[n - 1, n - 1], check_finite=False)
    mu = float(mu[0])
    if not mu > 0.0:
        raise DegenerateDenominator("largest reciprocal eigenvalue is not positive")

    z = scipy.linalg.solve_triangular(L, V[:, 0], lower=True, trans="T", check_finite=False)
    z /= np.linalg.norm(z)
    # deterministic sign: largest-magnitude component positive
    if z[np.argmax(np.abs(z))] < 0:
        z = -z
    return EigenPair(1.0 / mu, z)


def min_rayleigh_factored(G, E, assume_symmetric=False):
    """:func:`min_rayleigh` with the denominator given as ``H = E' E``.

    With ``F' = L^-1 E'`` the reciprocal matrix is ``F' F``; when ``E`` has
    fewer rows than columns its nonzero spectrum is taken from the smaller
    ``F F'`` instead. ``assume_symmetric`` skips the symmetry check for
    callers that built ``G`` symmetric.
    """
    G = as_square(G, "G")
    E = np.asarray(E, dtype=float)
    if E.ndim != 2 or E.shape[1] != G.shape[0] or E.shape[0] < 1:
        raise DimensionMismatch(f"factor of shape {E.shape} for G of order {G.shape[0]}")
    if not np.all(np.isfinite(E)):
        raise NonFiniteInput("E contains NaN or Inf")
    if not assume_symmetric:
        check_symmetric(G, "G")
    if not np.any(E):
        raise DegenerateDenominator("denominator matrix is numerically zero")

    L = _factor_with_ridge(G)
    n = G.shape[0]
    Ft = scipy.linalg.solve_triangular(L, E.T, lower=True, check_finite=False)
    r = Ft.shape[1]
    if r < n:
        S = Ft.T @ Ft
        mu, Y = scipy.linalg.eigh(0.5 * (S + S.T), subset_by_index=[r - 1, r - 1],
                                  check_finite=False)
        v = Ft @ Y[:, 0]
    else:
        S = Ft @ Ft.T
        mu, V = scipy.linalg.eigh(0.5 * (S + S.T), subset_by_index=[n - 1, n - 1],
                                  check_finite=False)
        v = V[:, 0]
    mu = float(mu[0])
    if not mu > 0.0:
        raise DegenerateDenominator("largest reciprocal eigenvalue is not positive")

    z = scipy.linalg.solve_triangular(L, v, lower=True, trans="T", check_finite=False)
    z /= np.linalg.norm(z)
    if z[np.argmax(np.abs(z))] < 0:
        z = -z
    return EigenPair(1.0 / mu, z)


def rayleigh_quotient(G, H, z):
    z = np.asarray(z, dtype=float)
    return float(z @ G @ z) / float(z @ H @ z)
