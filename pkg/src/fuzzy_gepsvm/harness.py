"""Cross-validation, DSA-driven hyperparameter tuning and benchmark tables."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import dsa, fuzzy, gepsvm
from ._atomic import atomic_write_text
from .dataio import make_folds, normalize_apply, normalize_fit, split_classes
from .errors import FoldError, GepsvmError, LengthMismatch
from .kernels import KernelFamily, KernelSpec

log = logging.getLogger(__name__)

DELTA_BOUNDS = (0.001, 10000.0)
SIGMA_BOUNDS = (0.001, 33.0)
DEGREE_BOUNDS = (0.001, 33.0)

MODES = ("linear", "linear_fuzzy", "nonlinear")

RESULT_COLUMNS = ("dataset", "mode", "kernel", "P1", "P2", "P3", "train_pct", "test_pct",
                  "mean_pct", "cycles_used", "seed", "error")


@dataclass(frozen=True)
class TrainerSpec:
    """What to train and which parameters are searched.

    The parameter vector is always ``(delta, sigma, degree)`` restricted to the
    ones the mode and kernel family use, in that order.
    """
    mode: str = "linear"
    kernel: KernelFamily | None = None
    fuzzy_method: str = "none"
    f: float = fuzzy.DEFAULT_F
    s: float = fuzzy.DEFAULT_S
    normalization: str = "minmax"
    delta_bounds: tuple = DELTA_BOUNDS
    sigma_bounds: tuple = SIGMA_BOUNDS
    degree_bounds: tuple = DEGREE_BOUNDS

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "nonlinear":
            if self.kernel is None:
                raise ValueError("nonlinear mode needs a kernel family")
            object.__setattr__(self, "kernel", KernelFamily(self.kernel))
        elif self.kernel is not None:
            raise ValueError(f"{self.mode} mode takes no kernel")
        fm = fuzzy.FuzzyMethod(self.fuzzy_method)
        if self.mode != "linear_fuzzy" and fm is not fuzzy.FuzzyMethod.NONE:
            raise ValueError("fuzzy weights apply only to linear_fuzzy mode")
        object.__setattr__(self, "fuzzy_method", fm.value)

    @property
    def param_names(self):
        names = ["delta"]
        if self.kernel in (KernelFamily.RBF, KernelFamily.EXPRBF, KernelFamily.POLYRBF):
            names.append("sigma")
        if self.kernel in (KernelFamily.POLY, KernelFamily.POLYRBF):
            names.append("degree")
        return names

    def search_space(self):
        bounds = {"delta": self.delta_bounds, "sigma": self.sigma_bounds,
                  "degree": self.degree_bounds}
        lo = [bounds[n][0] for n in self.param_names]
        hi = [bounds[n][1] for n in self.param_names]
        return dsa.SearchSpace(np.array(lo), np.array(hi))

    def params_dict(self, theta):
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if theta.size != len(self.param_names):
            raise LengthMismatch(f"{theta.size} parameters for {self.param_names}")
        return dict(zip(self.param_names, (float(v) for v in theta)))

    @property
    def label(self):
        return self.kernel.value if self.kernel is not None else "-"


@dataclass
class CvResult:
    per_fold: list
    params: np.ndarray
    cycles_used: int = 0
    history: list = field(default_factory=list)

    @property
    def mean_train(self):
        return float(np.mean([tr for tr, _ in self.per_fold]))

    @property
    def mean_test(self):
        return float(np.mean([te for _, te in self.per_fold]))

    @property
    def mean_pct(self):
        """Average of the training and testing means, the "Mean ACC" column."""
        return 0.5 * (self.mean_train + self.mean_test)


def accuracy(predicted, actual):
    """Percentage of matching labels."""
    predicted = np.asarray(predicted)
    actual = np.asarray(actual)
    if predicted.shape != actual.shape or predicted.ndim != 1 or predicted.size < 1:
        raise LengthMismatch(f"label vectors of shape {predicted.shape} and {actual.shape}")
    return 100.0 * float(np.mean(predicted == actual))


@dataclass(frozen=True)
class PreparedTrain:
    """Everything about a training set that does not depend on the tuned parameters."""
    norm: object
    A: np.ndarray
    B: np.ndarray
    weights: object
    n_features: int


def prepare(spec, train):
    norm = normalize_fit(train, spec.normalization)
    A, B = split_classes(normalize_apply(norm, train))
    weights = None
    if spec.mode == "linear_fuzzy":
        weights = fuzzy.compute_weights(spec.fuzzy_method, A, B, f=spec.f, s=spec.s)
    return PreparedTrain(norm, A, B, weights, train.n)


def fit_prepared(spec, prep, theta):
    params = spec.params_dict(theta)
    if spec.mode == "linear":
        return gepsvm.train_linear(prep.A, prep.B, params["delta"])
    if spec.mode == "linear_fuzzy":
        return gepsvm.train_linear_fuzzy(prep.A, prep.B, params["delta"], prep.weights)
    kernel = KernelSpec(spec.kernel, prep.n_features,
                        degree=params.get("degree", 1.0), sigma=params.get("sigma", 1.0))
    return gepsvm.train_nonlinear(prep.A, prep.B, params["delta"], kernel)


def fit(spec, train, theta):
    """Fit normalization, fuzzy weights and a model on ``train``.

    Returns ``(model, norm)``; apply ``norm`` to new data before predicting.
    """
    prep = prepare(spec, train)
    return fit_prepared(spec, prep, theta), prep.norm


@dataclass(frozen=True)
class _Fold:
    prep: PreparedTrain
    train_X: np.ndarray
    train_y: np.ndarray
    test_X: np.ndarray
    test_y: np.ndarray


def prepare_folds(spec, data, plan):
    """Per-fold training state, built from each fold's training rows only."""
    folds = []
    for fold in range(plan.k):
        train_idx, test_idx = plan.train_test(fold)
        train, test = data.subset(train_idx), data.subset(test_idx)
        try:
            prep = prepare(spec, train)
        except GepsvmError as exc:
            raise FoldError(fold, exc) from exc
        folds.append(_Fold(prep, prep.norm.apply(train.features), train.labels,
                           prep.norm.apply(test.features), test.labels))
    return folds


def _run_fold(spec, folds, fold, theta):
    f = folds[fold]
    try:
        model = fit_prepared(spec, f.prep, theta)
        train_acc = accuracy(gepsvm.predict(model, f.train_X), f.train_y)
        test_acc = accuracy(gepsvm.predict(model, f.test_X), f.test_y)
    except GepsvmError as exc:
        raise FoldError(fold, exc) from exc
    return train_acc, test_acc


def cross_validate(spec, data, theta, k=10, seed=0, jobs=1, folds=None):
    """Stratified ``k``-fold CV at fixed parameters ``theta``.

    Every fold fits scaling, memberships and the model on its training part
    only. Folds may run on ``jobs`` threads; results stay in fold order.
    ``folds`` takes the output of :func:`prepare_folds` to skip that work.
    """
    if folds is None:
        folds = prepare_folds(spec, data, make_folds(data, k, seed))
    idx = range(len(folds))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_fold = list(pool.map(lambda f: _run_fold(spec, folds, f, theta), idx))
    else:
        per_fold = [_run_fold(spec, folds, f, theta) for f in idx]
    return CvResult(per_fold, np.atleast_1d(np.asarray(theta, dtype=float)).copy())


def tune(spec, data, config=None, k=10, seed=0, jobs=1):
    """Search ``spec``'s parameter box with DSA, maximizing mean CV test accuracy.

    The fold plan is fixed for the whole run so the objective is a
    deterministic function of the parameters. Parameter vectors at which
    training fails numerically score 0% accuracy. The search stops early
    once 100% mean test accuracy is reached.
    """
    config = config or dsa.DsaConfig(seed=seed)
    if config.target_fitness is None:
        config = replace(config, target_fitness=0.0)
    folds = prepare_folds(spec, data, make_folds(data, k, seed))

    def objective(theta):
        try:
            return 100.0 - cross_validate(spec, data, theta, folds=folds).mean_test
        except FoldError as exc:
            log.debug("objective failed at %s: %s", theta, exc)
            return 100.0

    evaluate = dsa.thread_evaluator(jobs) if jobs > 1 else None
    result = dsa.optimize(spec.search_space(), config, objective, evaluate)
    best = cross_validate(spec, data, result.best_position, folds=folds)
    best.cycles_used = result.cycles_used
    best.history = result.history
    return best


def _fmt_param(params, name):
    return f"{params[name]:.4f}" if name in params else "-"


def benchmark(datasets, specs, output_path=None, config=None, k=10, seed=0, jobs=1,
              plot_path=None):
    """Tune every spec on every dataset and tabulate the results.

    One row per (dataset, spec). A failing row is recorded with its ``error``
    column set and the run continues. Returns the rows as dicts.
    """
    rows = []
    for data in datasets:
        for spec in specs:
            row = dict.fromkeys(RESULT_COLUMNS, "-")
            row.update(dataset=data.name, mode=spec.mode, kernel=spec.label, seed=seed, error="")
            try:
                res = tune(spec, data, config, k, seed, jobs)
                params = spec.params_dict(res.params)
                row.update(
                    P1=_fmt_param(params, "delta"), P2=_fmt_param(params, "sigma"),
                    P3=_fmt_param(params, "degree"),
                    train_pct=f"{res.mean_train:.4f}", test_pct=f"{res.mean_test:.4f}",
                    mean_pct=f"{res.mean_pct:.4f}", cycles_used=res.cycles_used,
                )
            except Exception as exc:  # noqa: BLE001 -- recorded per row
                log.warning("benchmark row %s/%s failed: %s", data.name, spec.label, exc)
                row["error"] = f"{type(exc).__name__}: {exc}".replace("\t", " ").replace("\n", " ")
            rows.append(row)
    if output_path is not None:
        atomic_write_text(output_path, rows_to_tsv(rows))
    if plot_path is not None:
        atomic_write_text(plot_path, plot_data_tsv(rows))
    return rows


def rows_to_tsv(rows):
    lines = ["\t".join(RESULT_COLUMNS)]
    lines += ["\t".join(str(r[c]) for c in RESULT_COLUMNS) for r in rows]
    return "\n".join(lines) + "\n"


def plot_data_tsv(rows):
    """``kernel, dataset, mean_acc`` triples for a per-kernel bar chart."""
    lines = ["kernel\tdataset\tmean_acc"]
    lines += [f"{r['kernel']}\t{r['dataset']}\t{r['mean_pct']}" for r in rows if not r["error"]]
    return "\n".join(lines) + "\n"
