"""Differential Search Algorithm for bound-constrained minimization.

A population ("superorganism") of ``N`` points in a box migrates toward low
objective values. Every cycle each point proposes a stopover site

    stopover = x + scale * (donor - x)

where the donors are a random row shuffle of the population and ``scale`` is
``Gamma(2 r1) * (r2 - r3)``. A random binary mask freezes part of the
coordinates, out-of-box coordinates are redrawn uniformly, and a stopover
replaces its parent only when it is strictly better.

The objective is minimized. Randomness comes from one
``numpy.random.Generator`` per run, so a run is fully determined by its seed.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpace, ObjectiveFailure


@dataclass(frozen=True)
class SearchSpace:
    low: np.ndarray
    up: np.ndarray

    def __post_init__(self):
        low = np.atleast_1d(np.asarray(self.low, dtype=float))
        up = np.atleast_1d(np.asarray(self.up, dtype=float))
        if low.shape != up.shape or low.ndim != 1 or low.size < 1:
            raise InvalidSpace(f"bounds of shape {low.shape} and {up.shape}")
        if not (np.all(np.isfinite(low)) and np.all(np.isfinite(up))):
            raise InvalidSpace("bounds must be finite")
        if np.any(low >= up):
            raise InvalidSpace("every lower bound must be below its upper bound")
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "up", up)

    @property
    def dim(self):
        return self.low.size

    def contains(self, X):
        X = np.asarray(X)
        return bool(np.all((X >= self.low) & (X <= self.up)))


@dataclass(frozen=True)
class DsaConfig:
    popsize: int = 30
    maxcycle: int = 20
    p_factor: float = 0.3
    seed: int = 0
    target_fitness: float | None = None

    def __post_init__(self):
        if self.popsize < 4:
            raise ValueError(f"popsize must be at least 4, got {self.popsize}")
        if self.maxcycle < 1:
            raise ValueError(f"maxcycle must be at least 1, got {self.maxcycle}")
        if not self.p_factor > 0:
            raise ValueError(f"p_factor must be positive, got {self.p_factor}")


@dataclass
class Superorganism:
    positions: np.ndarray
    fitness: np.ndarray
    best_history: list = field(default_factory=list)
    last_donor: np.ndarray | None = None

    @property
    def best_index(self):
        return int(np.argmin(self.fitness))

    @property
    def best_fitness(self):
        return float(self.fitness[self.best_index])


@dataclass(frozen=True)
class DsaResult:
    best_position: np.ndarray
    best_fitness: float
    history: list
    cycles_used: int
    organism: Superorganism


def serial_evaluator(objective, points):
    return [objective(x) for x in points]


def thread_evaluator(jobs):
    """Evaluator running the objective on up to ``jobs`` threads, results in input order."""
    def evaluate(objective, points):
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(objective, points))
    return evaluate


def _evaluate(objective, points, evaluate):
    evaluate = evaluate or serial_evaluator
    try:
        values = evaluate(objective, list(points))
    except ObjectiveFailure:
        raise
    except Exception:
        # locate the failing organism with a serial pass
        values = []
        for i, x in enumerate(points):
            try:
                values.append(objective(x))
            except Exception as exc:
                raise ObjectiveFailure(i, exc) from exc
    out = np.array(values, dtype=float)
    return np.where(np.isnan(out), np.inf, out)


def _uniform_in(space, rng, shape):
    return rng.random(shape) * (space.up - space.low) + space.low


def initialize(space, config, objective, rng=None, evaluate=None):
    rng = np.random.default_rng(config.seed) if rng is None else rng
    positions = _uniform_in(space, rng, (config.popsize, space.dim))
    fitness = _evaluate(objective, positions, evaluate)
    org = Superorganism(positions, fitness)
    org.best_history.append((0, org.best_fitness))
    return org


def generate_scale(rng):
    """One draw of ``Gamma(shape=2 r1) * (r2 - r3)`` with ``r1, r2, r3 ~ U(0, 1)``."""
    shape = 2.0 * rng.random()
    g = rng.gamma(shape, 1.0)
    return float(g * (rng.random() - rng.random()))


def mutation_mask(N, D, rng, p_factor=0.3):
    """Binary ``N x D`` mask; 1 freezes an element at its parent value, 0 lets it move."""
    p1 = p_factor * rng.random()
    p2 = p_factor * rng.random()
    if rng.random() < rng.random():
        if rng.random() < p1:
            r = rng.random((N, D))
            for i in range(N):
                r[i] = r[i] < rng.random()
            return r.astype(int)
        r = np.ones((N, D), dtype=int)
        for i in range(N):
            read = rng.integers(D)
            u = rng.random()
            r[i, rng.integers(D)] = int(r[i, read] < u)
        return r
    r = np.ones((N, D), dtype=int)
    for i in range(N):
        count = min(D, max(1, math.ceil(p2 * rng.random() * D)))
        r[i, rng.integers(D, size=count)] = 0
    return r


def evolve_cycle(org, space, config, objective, rng, cycle=None, evaluate=None):
    """One migration step; returns a new :class:`Superorganism`."""
    X = org.positions
    N, D = X.shape
    donor_index = rng.permutation(N)
    donor = X[donor_index]
    scale = generate_scale(rng)
    stopover = X + scale * (donor - X)

    frozen = mutation_mask(N, D, rng, config.p_factor) > 0
    stopover[frozen] = X[frozen]

    outside = (stopover < space.low) | (stopover > space.up)
    if outside.any():
        rows, cols = np.nonzero(outside)
        span = space.up[cols] - space.low[cols]
        stopover[rows, cols] = rng.random(rows.size) * span + space.low[cols]

    y = _evaluate(objective, stopover, evaluate)
    better = y < org.fitness
    positions = np.where(better[:, None], stopover, X)
    fitness = np.where(better, y, org.fitness)

    new = Superorganism(positions, fitness, list(org.best_history), donor_index)
    if cycle is None:
        cycle = len(org.best_history)
    new.best_history.append((cycle, new.best_fitness))
    return new


def optimize(space, config, objective, evaluate=None):
    """Run DSA for ``config.maxcycle`` cycles or until ``target_fitness`` is reached."""
    rng = np.random.default_rng(config.seed)
    org = initialize(space, config, objective, rng, evaluate)
    cycles = 0
    target = config.target_fitness
    while cycles < config.maxcycle and not (target is not None and org.best_fitness <= target):
        cycles += 1
        org = evolve_cycle(org, space, config, objective, rng, cycles, evaluate)
    best = org.best_index
    return DsaResult(org.positions[best].copy(), float(org.fitness[best]),
                     list(org.best_history), cycles, org)
