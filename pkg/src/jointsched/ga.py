"""Real-coded genetic algorithm over policy weight vectors.

Scheme-agnostic: the caller supplies a deterministic chromosome -> fitness
callback. Evaluations within a generation may run through any map function
(serial or parallel); results are order-independent because the callback is
pure and operator randomness is applied in a single-threaded barrier step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .objective import DEFAULT_P_INV
from .rng import generator, substream_seed

__all__ = ["GaParams", "GaTrace", "init_population", "evolve", "spawn_eval_seeds"]


@dataclass(frozen=True)
class GaParams:
    population: int = 40
    generations: int = 35
    w_min: float = -10.0
    w_max: float = 10.0
    elite: int = 2
    tournament: int = 3
    crossover_rate: float = 0.9
    blend_alpha: float = 0.5  # BLX interval extension factor
    mutation_rate: float = 0.1  # per gene
    mutation_scale: float = 0.1  # stddev as a fraction of box width
    stall_limit: Optional[int] = 10  # None disables early stopping
    p_inv: float = DEFAULT_P_INV
    seed: int = 0

    def validate(self):
        if self.population < 2:
            raise ValueError("population must be >= 2")
        if not 0 <= self.elite < self.population:
            raise ValueError("elite count must be in [0, population)")
        if self.w_min > self.w_max:
            raise ValueError("search box is empty")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.tournament < 1:
            raise ValueError("tournament size must be >= 1")
        return self


@dataclass
class GaTrace:
    """Per-generation best-so-far fitness, population mean, and best chromosome."""

    best: list = field(default_factory=list)
    mean: list = field(default_factory=list)
    best_chromosome: list = field(default_factory=list)

    @property
    def generations(self) -> int:
        return len(self.best)

    def write_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["generation", "best_J_ms", "mean_J_ms"])
            for g, (b, m) in enumerate(zip(self.best, self.mean)):
                w.writerow([g, repr(b * 1e3), repr(m * 1e3)])


def spawn_eval_seeds(master_seed: int, generation: int, index: int) -> int:
    """Deterministic 64-bit sub-seed for evaluation (generation, index)."""
    return substream_seed(master_seed, "eval", generation, index)


def init_population(params: GaParams, dim: int, seed: int) -> np.ndarray:
    """P chromosomes i.i.d. uniform over the search box."""
    rng = generator(seed, "ga-init")
    return rng.uniform(params.w_min, params.w_max, size=(params.population, dim))


def evolve(
    params: GaParams,
    dim: int,
    eval_fn: Callable[[np.ndarray], float],
    map_fn=map,
):
    """Run the GA; returns (best chromosome, best fitness, trace).

    Elites are copied unchanged every generation, so the best-so-far
    sequence in the trace is non-increasing. Fitness values are memoized on
    exact chromosome bytes, so elites are never re-decoded.
    """
    params.validate()
    rng = generator(params.seed, "ga-ops")
    pop = init_population(params, dim, params.seed)
    memo: dict[bytes, float] = {}
    trace = GaTrace()
    best_chrom = None
    best_fit = np.inf
    stall = 0
    width = params.w_max - params.w_min

    for gen in range(params.generations):
        keys = [row.tobytes() for row in pop]
        fresh = [i for i, k in enumerate(keys) if k not in memo]
        for i, fit in zip(fresh, map_fn(eval_fn, [pop[i] for i in fresh])):
            memo[keys[i]] = float(fit)
        fits = np.array([memo[k] for k in keys])
        gen_best = int(np.argmin(fits))
        improved = fits[gen_best] < best_fit
        if improved:
            best_fit = float(fits[gen_best])
            best_chrom = pop[gen_best].copy()
            stall = 0
        else:
            stall += 1
        trace.best.append(best_fit)
        trace.mean.append(float(fits.mean()))
        trace.best_chromosome.append(best_chrom.copy())

        if gen == params.generations - 1:
            break
        if params.stall_limit is not None and stall >= params.stall_limit:
            break

        elite_idx = np.argsort(fits, kind="stable")[: params.elite]
        elites = pop[elite_idx].copy()
        offspring = np.empty((params.population - params.elite, dim))
        for j in range(len(offspring)):
            pa = _tournament(rng, fits, params.tournament)
            pb = _tournament(rng, fits, params.tournament)
            if rng.random() < params.crossover_rate:
                child = _blx(rng, pop[pa], pop[pb], params.blend_alpha)
            else:
                child = pop[pa].copy()
            mutate = rng.random(dim) < params.mutation_rate
            child[mutate] += rng.normal(0.0, params.mutation_scale * width, size=int(mutate.sum()))
            offspring[j] = np.clip(child, params.w_min, params.w_max)
        pop = np.vstack([elites, offspring])

    return best_chrom, best_fit, trace


def _tournament(rng, fits, size: int) -> int:
    contenders = rng.integers(0, len(fits), size=size)
    best = contenders[0]
    for c in contenders[1:]:
        if fits[c] < fits[best]:
            best = c
    return int(best)


def _blx(rng, a, b, alpha):
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    spread = hi - lo
    return rng.uniform(lo - alpha * spread, hi + alpha * spread)
