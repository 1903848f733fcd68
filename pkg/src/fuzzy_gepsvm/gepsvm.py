"""Generalized eigenvalue proximal classifiers: linear, fuzzy linear and kernel.

Each model is a pair of proximal surfaces. Surface ``i`` is fit to lie close
to the points of class ``i`` and far from the other class by minimizing a
regularized Rayleigh quotient; a point is assigned to the class of the
nearer surface.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from ._atomic import atomic_write_text
from .dataio import NormParams
from .errors import DimensionMismatch, EmptyClass, ParseError, WeightLengthMismatch
from .kernels import KernelSpec, kernel_matrix

FORMAT_HEADER = "gepsvm-model v1"


@dataclass(frozen=True)
class LinearModel:
    w1: np.ndarray
    gamma1: float
    w2: np.ndarray
    gamma2: float
    delta: float

    @property
    def n_features(self):
        return len(self.w1)


@dataclass(frozen=True)
class NonlinearModel:
    u1: np.ndarray
    gamma1: float
    u2: np.ndarray
    gamma2: float
    reference_points: np.ndarray
    kernel: KernelSpec
    delta: float

    @property
    def n_features(self):
        return self.reference_points.shape[1]


def _check_classes(A, B):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    for name, X in (("A", A), ("B", B)):
        if X.ndim != 2 or X.shape[0] < 1:
            raise EmptyClass(f"class {name} must be a non-empty 2-D matrix, got shape {X.shape}")
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(f"A has {A.shape[1]} columns, B has {B.shape[1]}")
    return A, B


def _check_delta(delta):
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    return float(delta)


def _augment(X):
    return np.hstack([X, -np.ones((X.shape[0], 1))])


def _gram(E):
    S = E.T @ E
    return 0.5 * (S + S.T)


def _solve_planes(EA, EB, delta):
    """Both (normal, offset) pairs from the augmented class matrices ``[X, -e]``."""
    gram_a = _gram(EA)
    gram_b = _gram(EB)
    ridge = delta * np.eye(gram_a.shape[0])
    z1 = linalg.min_rayleigh_factored(gram_a + ridge, EB, assume_symmetric=True).vector
    z2 = linalg.min_rayleigh_factored(gram_b + ridge, EA, assume_symmetric=True).vector
    return z1[:-1], float(z1[-1]), z2[:-1], float(z2[-1])


def train_linear(A, B, delta):
    A, B = _check_classes(A, B)
    delta = _check_delta(delta)
    w1, g1, w2, g2 = _solve_planes(_augment(A), _augment(B), delta)
    return LinearModel(w1, g1, w2, g2, delta)


def train_linear_fuzzy(A, B, delta, weights):
    """Linear model with each row of ``A`` and ``B`` scaled by its membership weight.

    The ``-e`` column is not scaled. With all-ones weights the result is
    identical to :func:`train_linear`.
    """
    A, B = _check_classes(A, B)
    delta = _check_delta(delta)
    wa = np.asarray(weights.weights_a, dtype=float)
    wb = np.asarray(weights.weights_b, dtype=float)
    if wa.shape != (len(A),) or wb.shape != (len(B),):
        raise WeightLengthMismatch(
            f"weights of length {wa.shape}/{wb.shape} for classes of size {len(A)}/{len(B)}"
        )
    w1, g1, w2, g2 = _solve_planes(_augment(wa[:, None] * A), _augment(wb[:, None] * B), delta)
    return LinearModel(w1, g1, w2, g2, delta)


def train_nonlinear(A, B, delta, kernel):
    A, B = _check_classes(A, B)
    delta = _check_delta(delta)
    C = np.vstack([A, B])
    KA = kernel_matrix(kernel, A, C)
    KB = kernel_matrix(kernel, B, C)
    u1, g1, u2, g2 = _solve_planes(_augment(KA), _augment(KB), delta)
    return NonlinearModel(u1, g1, u2, g2, C, kernel, delta)


def _rows(X, n):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != n:
        raise DimensionMismatch(f"expected {n} features, got shape {X.shape}")
    return X


def plane_distances(model, X):
    """Distances of each row of ``X`` to the two surfaces, shape ``(m, 2)``."""
    if isinstance(model, LinearModel):
        X = _rows(X, model.n_features)
        p1, p2 = X @ model.w1 - model.gamma1, X @ model.w2 - model.gamma2
        n1, n2 = np.linalg.norm(model.w1), np.linalg.norm(model.w2)
    else:
        X = _rows(X, model.n_features)
        K = kernel_matrix(model.kernel, X, model.reference_points)
        p1, p2 = K @ model.u1 - model.gamma1, K @ model.u2 - model.gamma2
        n1, n2 = np.linalg.norm(model.u1), np.linalg.norm(model.u2)
    with np.errstate(divide="ignore"):
        return np.column_stack([
            np.abs(p1) / n1 if n1 > 0 else np.full(len(X), np.inf),
            np.abs(p2) / n2 if n2 > 0 else np.full(len(X), np.inf),
        ])


def predict(model, X):
    """Labels in ``{1, 2}`` for every row of ``X``; ties go to class 1."""
    d = plane_distances(model, X)
    return np.where(d[:, 0] <= d[:, 1], 1, 2)


def classify_linear(model, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n_features,):
        raise DimensionMismatch(f"expected vector of length {model.n_features}, got {x.shape}")
    return int(predict(model, x)[0])


def classify_nonlinear(model, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n_features,):
        raise DimensionMismatch(f"expected vector of length {model.n_features}, got {x.shape}")
    return int(predict(model, x)[0])


# -- persistence ---------------------------------------------------------------

def _fmt(values):
    return " ".join(format(float(v), ".17g") for v in np.atleast_1d(values))


def model_to_text(model, norm=None):
    lines = []
    if isinstance(model, LinearModel):
        lines.append(f"{FORMAT_HEADER} linear")
        lines.append(f"delta {_fmt(model.delta)}")
        lines.append(f"dims {model.n_features}")
        lines.append(f"w1 {_fmt(model.w1)}")
        lines.append(f"gamma1 {_fmt(model.gamma1)}")
        lines.append(f"w2 {_fmt(model.w2)}")
        lines.append(f"gamma2 {_fmt(model.gamma2)}")
    else:
        k = model.kernel
        m, n = model.reference_points.shape
        lines.append(f"{FORMAT_HEADER} nonlinear")
        lines.append(f"kernel {k.family.value} {k.data_dim} {_fmt(k.degree)} {_fmt(k.sigma)}")
        lines.append(f"delta {_fmt(model.delta)}")
        lines.append(f"dims {m} {n}")
        lines.append(f"u1 {_fmt(model.u1)}")
        lines.append(f"gamma1 {_fmt(model.gamma1)}")
        lines.append(f"u2 {_fmt(model.u2)}")
        lines.append(f"gamma2 {_fmt(model.gamma2)}")
        lines.extend(f"ref {_fmt(row)}" for row in model.reference_points)
    if norm is not None:
        lines.append(f"norm {norm.kind}")
        lines.append(f"norm_shift {_fmt(norm.shift)}")
        lines.append(f"norm_scale {_fmt(norm.scale)}")
    return "\n".join(lines) + "\n"


def model_from_text(text):
    """Parse :func:`model_to_text` output; returns ``(model, norm_or_None)``."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith(FORMAT_HEADER):
        raise ParseError("not a gepsvm-model v1 file", line=1)
    kind = lines[0][len(FORMAT_HEADER):].strip()
    fields = {}
    refs = []
    for lineno, line in enumerate(lines[1:], start=2):
        key, _, rest = line.partition(" ")
        try:
            if key == "kernel":
                fam, dim, deg, sig = rest.split()
                fields[key] = KernelSpec(fam, int(dim), float(deg), float(sig))
            elif key == "norm":
                fields[key] = rest.strip()
            elif key == "dims":
                fields[key] = [int(v) for v in rest.split()]
            elif key == "ref":
                refs.append([float(v) for v in rest.split()])
            else:
                fields[key] = np.array([float(v) for v in rest.split()])
        except ValueError as exc:
            raise ParseError(f"bad value for {key!r}: {exc}", line=lineno) from exc

    try:
        norm = None
        if "norm" in fields:
            norm = NormParams(fields["norm"], fields["norm_shift"], fields["norm_scale"])
        if kind == "linear":
            model = LinearModel(
                fields["w1"], float(fields["gamma1"][0]),
                fields["w2"], float(fields["gamma2"][0]),
                float(fields["delta"][0]),
            )
            if len(model.w1) != fields["dims"][0] or len(model.w2) != fields["dims"][0]:
                raise ParseError("plane normals disagree with dims")
        elif kind == "nonlinear":
            ref = np.array(refs, dtype=float)
            m, n = fields["dims"]
            if ref.shape != (m, n) or len(fields["u1"]) != m or len(fields["u2"]) != m:
                raise ParseError("reference points or coefficients disagree with dims")
            model = NonlinearModel(
                fields["u1"], float(fields["gamma1"][0]),
                fields["u2"], float(fields["gamma2"][0]),
                ref, fields["kernel"], float(fields["delta"][0]),
            )
        else:
            raise ParseError(f"unknown model kind {kind!r}", line=1)
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}") from exc
    return model, norm


def save_model(path, model, norm=None):
    atomic_write_text(path, model_to_text(model, norm))


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_text(fh.read())
