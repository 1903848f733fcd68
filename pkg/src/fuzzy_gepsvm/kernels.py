"""Kernel functions and rectangular kernel matrices.

Four families are supported, selected by a lowercase token:

========  ==============================================
poly      ``(<x, y> + 1) ** d``
rbf       ``exp(-||x - y||**2 / (2 sigma**2))``
exprbf    ``exp(-||x - y|| / (D sigma))``
polyrbf   ``(1 + exp(-||x - y||**2 / (D sigma))) ** d``
========  ==============================================

``D`` is the data dimension. The degree ``d`` may be any positive real.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DimensionMismatch, NonFiniteResult


class KernelFamily(str, Enum):
    POLY = "poly"
    RBF = "rbf"
    EXPRBF = "exprbf"
    POLYRBF = "polyrbf"


USES_SIGMA = {KernelFamily.RBF, KernelFamily.EXPRBF, KernelFamily.POLYRBF}
USES_DEGREE = {KernelFamily.POLY, KernelFamily.POLYRBF}


@dataclass(frozen=True)
class KernelSpec:
    family: KernelFamily
    data_dim: int
    degree: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", KernelFamily(self.family))
        if int(self.data_dim) != self.data_dim or self.data_dim < 1:
            raise ValueError(f"data_dim must be a positive integer, got {self.data_dim}")
        object.__setattr__(self, "data_dim", int(self.data_dim))
        if self.family in USES_SIGMA and not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.family in USES_DEGREE and not self.degree > 0:
            raise ValueError(f"degree must be positive, got {self.degree}")

    @property
    def params(self):
        """The free parameters of this family, in (sigma, degree) order."""
        out = {}
        if self.family in USES_SIGMA:
            out["sigma"] = self.sigma
        if self.family in USES_DEGREE:
            out["degree"] = self.degree
        return out


def _real_power(base, d):
    base = np.asarray(base, dtype=float)
    if float(d).is_integer():
        with np.errstate(over="ignore"):
            out = base ** int(d)
    else:
        if np.any(base < 0):
            raise NonFiniteResult("negative base raised to a non-integer degree")
        with np.errstate(over="ignore", divide="ignore"):
            out = np.exp(d * np.log(base))
    if not np.all(np.isfinite(out)):
        raise NonFiniteResult(f"kernel overflow at degree {d}")
    return out


def _sq_distances(X, C):
    # cdist forms explicit differences: identical rows give exact zeros
    return cdist(X, C, "sqeuclidean")


def _apply(spec, inner, sqdist):
    fam = spec.family
    if fam is KernelFamily.POLY:
        return _real_power(inner() + 1.0, spec.degree)
    d2 = sqdist()
    if fam is KernelFamily.RBF:
        return np.exp(-d2 / (2.0 * spec.sigma ** 2))
    if fam is KernelFamily.EXPRBF:
        return np.exp(-np.sqrt(d2) / (spec.data_dim * spec.sigma))
    return _real_power(1.0 + np.exp(-d2 / (spec.data_dim * spec.sigma)), spec.degree)


def _as_rows(X, spec, name):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != spec.data_dim:
        raise DimensionMismatch(
            f"{name} has {X.shape[-1] if X.ndim else 0} columns, kernel expects {spec.data_dim}"
        )
    return X


def kernel_value(spec, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (spec.data_dim,) or y.shape != (spec.data_dim,):
        raise DimensionMismatch(
            f"vectors of shape {x.shape} and {y.shape}, kernel expects ({spec.data_dim},)"
        )
    diff = x - y
    value = _apply(spec, lambda: np.dot(x, y), lambda: np.dot(diff, diff))
    return float(value)


def kernel_matrix(spec, X, C):
    """Matrix ``K`` with ``K[i, j] = kernel_value(spec, X[i], C[j])``."""
    X = _as_rows(X, spec, "X")
    C = _as_rows(C, spec, "C")
    return _apply(spec, lambda: X @ C.T, lambda: _sq_distances(X, C))
