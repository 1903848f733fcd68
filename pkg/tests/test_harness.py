import numpy as np
import pytest

from fuzzy_gepsvm import dataio, gepsvm, harness
from fuzzy_gepsvm.dsa import DsaConfig
from fuzzy_gepsvm.errors import LengthMismatch
from fuzzy_gepsvm.harness import TrainerSpec

SPECS = [
    TrainerSpec("linear"),
    TrainerSpec("linear_fuzzy", fuzzy_method="exp"),
    TrainerSpec("linear_fuzzy", fuzzy_method="ratio"),
    TrainerSpec("linear_fuzzy", fuzzy_method="proposed"),
    TrainerSpec("nonlinear", kernel="rbf"),
    TrainerSpec("nonlinear", kernel="polyrbf"),
]
THETAS = {"linear": [1.0], "linear_fuzzy": [1.0], "rbf": [1.0, 0.8], "polyrbf": [1.0, 0.8, 2.0]}


def theta_for(spec):
    return THETAS[spec.label if spec.mode == "nonlinear" else spec.mode]


# -- accuracy ----------------------------------------------------------------------------

def test_accuracy_examples():
    assert harness.accuracy([1, 2, 1], [1, 2, 1]) == 100.0
    assert harness.accuracy([1, 1], [2, 2]) == 0.0
    assert harness.accuracy([1, 1, 2, 2], [1, 2, 2, 2]) == 75.0
    with pytest.raises(LengthMismatch):
        harness.accuracy([1, 2], [1])
    with pytest.raises(LengthMismatch):
        harness.accuracy([], [])


# -- TrainerSpec ------------------------------------------------------------------------

@pytest.mark.parametrize("spec, names", [
    (TrainerSpec("linear"), ["delta"]),
    (TrainerSpec("nonlinear", kernel="rbf"), ["delta", "sigma"]),
    (TrainerSpec("nonlinear", kernel="exprbf"), ["delta", "sigma"]),
    (TrainerSpec("nonlinear", kernel="poly"), ["delta", "degree"]),
    (TrainerSpec("nonlinear", kernel="polyrbf"), ["delta", "sigma", "degree"]),
])
def test_search_dimensions(spec, names):
    assert spec.param_names == names
    space = spec.search_space()
    assert space.dim == len(names)
    assert space.low[0] == 0.001 and space.up[0] == 10000.0
    if len(names) > 1:
        assert space.up[1] == 33.0


def test_spec_validation():
    with pytest.raises(ValueError):
        TrainerSpec("nonlinear")
    with pytest.raises(ValueError):
        TrainerSpec("linear", kernel="rbf")
    with pytest.raises(ValueError):
        TrainerSpec("linear", fuzzy_method="exp")


# -- cross_validate ---------------------------------------------------------------------

def test_blobs_linear_perfect():
    res = harness.cross_validate(TrainerSpec("linear"), dataio.synth_blobs(50), [1.0])
    assert res.mean_test == 100.0
    assert len(res.per_fold) == 10
    assert res.mean_train == pytest.approx(np.mean([tr for tr, _ in res.per_fold]))


def test_permuted_labels_near_chance():
    data = dataio.synth_blobs(100, n_features=3, separation=10.0, seed=1)
    rng = np.random.default_rng(2)
    shuffled = dataio.Dataset(data.features, rng.permutation(data.labels))
    res = harness.cross_validate(TrainerSpec("linear"), shuffled, [1.0])
    assert abs(res.mean_test - 50) <= 10


def test_leave_one_out():
    data = dataio.synth_blobs(5, seed=3)
    res = harness.cross_validate(TrainerSpec("linear"), data, [1.0], k=10)
    assert len(res.per_fold) == 10
    assert all(te in (0.0, 100.0) for _, te in res.per_fold)


def test_parallel_folds_match_serial():
    data = dataio.synth_blobs(30, n_features=3, separation=2.0, seed=4)
    spec = TrainerSpec("nonlinear", kernel="rbf")
    a = harness.cross_validate(spec, data, [1.0, 0.8])
    b = harness.cross_validate(spec, data, [1.0, 0.8], jobs=4)
    assert a.per_fold == b.per_fold


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"{s.mode}-{s.fuzzy_method}-{s.label}")
def test_no_test_fold_leakage(spec):
    data = dataio.synth_blobs(30, n_features=3, separation=2.5, seed=5)
    plan = dataio.make_folds(data, 5, seed=0)
    theta = theta_for(spec)
    clean = harness.prepare_folds(spec, data, plan)
    rng = np.random.default_rng(6)
    for fold in range(plan.k):
        _, test_idx = plan.train_test(fold)
        X = data.features.copy()
        X[test_idx] = rng.normal(size=(len(test_idx), data.n)) * 1e6
        dirty = harness.prepare_folds(spec, dataio.Dataset(X, data.labels), plan)
        a = harness._run_fold(spec, clean, fold, theta)
        b = harness._run_fold(spec, dirty, fold, theta)
        assert a[0] == b[0]
        np.testing.assert_array_equal(clean[fold].prep.norm.shift, dirty[fold].prep.norm.shift)
        ma = harness.fit_prepared(spec, clean[fold].prep, theta)
        mb = harness.fit_prepared(spec, dirty[fold].prep, theta)
        assert gepsvm.model_to_text(ma) == gepsvm.model_to_text(mb)


# -- tune ------------------------------------------------------------------------------

def test_tune_blobs_stops_early():
    # only small delta separates min-max scaled blobs, so not every seed finds it
    data = dataio.synth_blobs(50)
    early = 0
    for seed in range(10):
        cfg = DsaConfig(popsize=30, maxcycle=20, seed=seed)
        res = harness.tune(TrainerSpec("linear"), data, cfg)
        if res.cycles_used < cfg.maxcycle:
            early += 1
            assert res.mean_test == 100.0
    assert early >= 5


def test_tune_collapsed_box_equals_cross_validate():
    spec = TrainerSpec("linear", delta_bounds=(2.5, 2.5 + 1e-12))
    data = dataio.synth_blobs(30, separation=1.5, seed=7)
    res = harness.tune(spec, data, DsaConfig(popsize=5, maxcycle=3))
    ref = harness.cross_validate(spec, data, [2.5])
    assert res.per_fold == ref.per_fold


def test_tune_matches_rerun_and_cycle_invariant():
    data = dataio.synth_xor(points_per_quadrant=10, noise_sd=0.4, seed=1)
    spec = TrainerSpec("nonlinear", kernel="rbf")
    cfg = DsaConfig(popsize=6, maxcycle=4, seed=3)
    res = harness.tune(spec, data, cfg, seed=3)
    again = harness.cross_validate(spec, data, res.params, seed=3)
    assert res.mean_test == again.mean_test
    assert res.cycles_used <= cfg.maxcycle
    if res.cycles_used < cfg.maxcycle:
        assert res.history[-1][1] == 0.0


def test_objective_is_pure():
    data = dataio.synth_blobs(20, separation=1.0, seed=8)
    spec = TrainerSpec("linear_fuzzy", fuzzy_method="proposed")
    folds = harness.prepare_folds(spec, data, dataio.make_folds(data, 10, 0))
    runs = {harness.cross_validate(spec, data, [0.3], folds=folds).mean_test for _ in range(3)}
    assert len(runs) == 1


def test_tune_deterministic():
    data = dataio.synth_blobs(20, separation=1.0, seed=9)
    cfg = DsaConfig(popsize=5, maxcycle=3, seed=11)
    a = harness.tune(TrainerSpec("linear"), data, cfg)
    b = harness.tune(TrainerSpec("linear"), data, cfg)
    assert a.history == b.history
    np.testing.assert_array_equal(a.params, b.params)


# -- benchmark -------------------------------------------------------------------------------

def test_benchmark_empty_specs(tmp_path):
    out = tmp_path / "r.tsv"
    rows = harness.benchmark([dataio.synth_blobs(10)], [], out)
    assert rows == []
    assert out.read_text() == "\t".join(harness.RESULT_COLUMNS) + "\n"


def test_benchmark_three_kernels(tmp_path):
    out, plot = tmp_path / "r.tsv", tmp_path / "p.tsv"
    specs = [TrainerSpec("nonlinear", kernel=k) for k in ("rbf", "poly", "polyrbf")]
    cfg = DsaConfig(popsize=4, maxcycle=1)
    harness.benchmark([dataio.synth_xor(5, 0.3)], specs, out, cfg, k=5, plot_path=plot)
    lines = out.read_text().splitlines()
    assert len(lines) == 4
    header = lines[0].split("\t")
    assert "mean_pct" in header and header[-1] == "error"
    for line in lines[1:]:
        row = dict(zip(header, line.split("\t")))
        assert row["error"] == ""
        assert float(row["mean_pct"]) == pytest.approx(
            (float(row["train_pct"]) + float(row["test_pct"])) / 2, abs=1e-3)
    assert len(plot.read_text().splitlines()) == 4


def test_benchmark_records_row_errors():
    single = dataio.Dataset(np.zeros((10, 2)), np.ones(10, dtype=int), name="single")
    rows = harness.benchmark([single, dataio.synth_blobs(10)], [TrainerSpec("linear")],
                             config=DsaConfig(popsize=4, maxcycle=1), k=5)
    assert rows[0]["error"] and not rows[1]["error"]
