"""Per-sample fuzzy membership weights for the two training classes.

Three schemes are available besides the trivial all-ones weighting:

* ``exp``: an exponential of the signed distance difference to the two class
  centers, scaled into ``[0.5, 1]`` by the rate ``f``.
* ``ratio``: ``s + (1 - s) * exp(-(d_own / d_other) ** 2)``.
* ``proposed``: only points farther from their own center than the class's
  mean center distance are down-weighted (with the ``ratio`` value); all
  other points keep weight 1.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateCenters, DimensionMismatch, EmptyClass, PointOnOtherCenter

DEFAULT_F = 1.0
DEFAULT_S = 0.5

_CENTER_EPS = 1e-12
# tolerance on "farther than the mean" so exactly-equidistant points stay at 1
_THRESHOLD_RTOL = 1e-12


class FuzzyMethod(str, Enum):
    NONE = "none"
    EXP = "exp"
    RATIO = "ratio"
    PROPOSED = "proposed"


@dataclass(frozen=True)
class FuzzyWeights:
    weights_a: np.ndarray
    weights_b: np.ndarray
    method: FuzzyMethod = FuzzyMethod.NONE
    param: float | None = None


def _class_matrix(X, name):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[0] < 1:
        raise EmptyClass(f"class {name} has no samples")
    return X


def class_centers(A, B):
    """Return ``(C_A, C_B, d_AB)``: the two class means and their distance."""
    A = _class_matrix(A, "A")
    B = _class_matrix(B, "B")
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(f"A has {A.shape[1]} columns, B has {B.shape[1]}")
    ca = A.mean(axis=0)
    cb = B.mean(axis=0)
    return ca, cb, float(np.linalg.norm(ca - cb))


def _distances(X, c):
    return np.linalg.norm(X - c, axis=1)


def exp_weights(X, own_center, other_center, f=DEFAULT_F):
    """Exponential membership of the rows of ``X`` for fixed class centers."""
    own = np.asarray(own_center, dtype=float)
    other = np.asarray(other_center, dtype=float)
    d_ab = float(np.linalg.norm(own - other))
    if d_ab <= _CENTER_EPS:
        raise DegenerateCenters(f"class centers are {d_ab:.3g} apart")
    X = _class_matrix(X, "X")
    ratio = (_distances(X, other) - _distances(X, own)) / d_ab
    # rounding can push |ratio| a hair past 1; the triangle inequality bounds it
    ratio = np.clip(ratio, -1.0, 1.0)
    return 0.5 + (np.exp(f * ratio) - np.exp(-f)) / (2.0 * (np.exp(f) - np.exp(-f)))


def membership_exp(A, B, f=DEFAULT_F):
    """Exponential memberships; every weight lies in ``[0.5, 1]``."""
    if not f > 0:
        raise ValueError(f"f must be positive, got {f}")
    A = _class_matrix(A, "A")
    B = _class_matrix(B, "B")
    ca, cb, d_ab = class_centers(A, B)
    if d_ab <= _CENTER_EPS:
        raise DegenerateCenters(f"class centers are {d_ab:.3g} apart")
    return FuzzyWeights(
        exp_weights(A, ca, cb, f),
        exp_weights(B, cb, ca, f),
        FuzzyMethod.EXP,
        float(f),
    )


def _check_s(s):
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0, 1), got {s}")


def membership_center_ratio(A, own_center, other_center, s=DEFAULT_S):
    """Weights ``s + (1 - s) exp(-(d(A_i, own) / d(A_i, other))**2)`` for the rows of ``A``."""
    _check_s(s)
    A = _class_matrix(A, "A")
    d_own = _distances(A, np.asarray(own_center, dtype=float))
    d_other = _distances(A, np.asarray(other_center, dtype=float))
    bad = np.flatnonzero(d_other <= _CENTER_EPS)
    if bad.size:
        raise PointOnOtherCenter(f"row {bad[0]} coincides with the other class center")
    w = s + (1.0 - s) * np.exp(-((d_own / d_other) ** 2))
    # the exact value is above s; round up when the exp term is below half an ulp
    return np.maximum(w, np.nextafter(s, 1.0))


def _proposed_side(X, own, other, s):
    d_own = _distances(X, own)
    far = d_own > d_own.mean() * (1.0 + _THRESHOLD_RTOL)
    w = np.ones(len(X))
    if far.any():
        w[far] = membership_center_ratio(X[far], own, other, s)
    return w


def membership_proposed(A, B, s=DEFAULT_S):
    """Down-weight only the points lying beyond their class's mean center distance.

    Points at or inside the mean distance from their own center keep weight 1;
    points outside get the center-ratio weight, so every weight is in ``(s, 1]``.
    """
    _check_s(s)
    A = _class_matrix(A, "A")
    B = _class_matrix(B, "B")
    # coincident centers are tolerated: the ratio then equals 1 for every point
    ca, cb, _ = class_centers(A, B)
    return FuzzyWeights(
        _proposed_side(A, ca, cb, s),
        _proposed_side(B, cb, ca, s),
        FuzzyMethod.PROPOSED,
        float(s),
    )


def membership_ratio(A, B, s=DEFAULT_S):
    """Center-ratio weights for both classes."""
    A = _class_matrix(A, "A")
    B = _class_matrix(B, "B")
    ca, cb, d_ab = class_centers(A, B)
    if d_ab <= _CENTER_EPS:
        raise DegenerateCenters(f"class centers are {d_ab:.3g} apart")
    return FuzzyWeights(
        membership_center_ratio(A, ca, cb, s),
        membership_center_ratio(B, cb, ca, s),
        FuzzyMethod.RATIO,
        float(s),
    )


def no_membership(A, B):
    A = _class_matrix(A, "A")
    B = _class_matrix(B, "B")
    return FuzzyWeights(np.ones(len(A)), np.ones(len(B)), FuzzyMethod.NONE, None)


def compute_weights(method, A, B, f=DEFAULT_F, s=DEFAULT_S):
    """Dispatch on a method token (``none``, ``exp``, ``ratio``, ``proposed``)."""
    method = FuzzyMethod(method)
    if method is FuzzyMethod.NONE:
        return no_membership(A, B)
    if method is FuzzyMethod.EXP:
        return membership_exp(A, B, f)
    if method is FuzzyMethod.RATIO:
        return membership_ratio(A, B, s)
    return membership_proposed(A, B, s)
