"""Channel partition optimisation.

The stage-one feasibility of successive zero-forcing depends only on how the
channel indices are split into disjoint sets: a partition fails as soon as
one set violates the polygon inequality.  The continuous surrogate minimised
here is the pseudo-loss, the maximum polygon distance over the sets; its
Heaviside image is the 0/1 loss.

Three optimisers are provided:

* random assignment (balanced block split by default, multinomial behind a
  flag),
* iterative repair moving donor elements into failing sets (optionally under
  a fixed-cardinality constraint, where every move is a swap),
* a genetic algorithm over label vectors with tournament selection, single
  point crossover, per-gene mutation and elite carry-over.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator

from .polygon import polygon_distance

NEG_INF = -np.inf


@dataclass
class Partition:
    """Disjoint cover of indices 0..n-1 by sets labeled 0..n_sets-1.

    Every label in range must be used; empty sets are permitted only
    transiently inside the optimisers, never in a constructed Partition.
    """

    assignment: np.ndarray
    n_sets: int

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.int64)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("assignment must be a non-empty 1-d integer array")
        if a.min() < 0 or a.max() >= self.n_sets:
            raise ValueError("set labels out of range")
        counts = np.bincount(a, minlength=self.n_sets)
        if np.any(counts == 0):
            raise ValueError("every set label must be used at least once")
        self.assignment = a

    @property
    def n(self) -> int:
        return self.assignment.size

    def sets(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.assignment == l) for l in range(self.n_sets)]

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.n_sets)


def _compact(assignment: np.ndarray) -> Partition:
    """Drop unused labels, preserving the order of first appearance by label id."""
    used = np.unique(assignment)
    remap = np.zeros(used.max() + 1, dtype=np.int64)
    remap[used] = np.arange(used.size)
    return Partition(remap[assignment], int(used.size))


def _set_dists(mags: np.ndarray, assignment: np.ndarray, m: int) -> np.ndarray:
    """Per-set polygon distances; empty sets get -inf."""
    sums = np.bincount(assignment, weights=mags, minlength=m)
    maxs = np.zeros(m)
    np.maximum.at(maxs, assignment, mags)
    d = 2.0 * maxs - sums
    d[np.bincount(assignment, minlength=m) == 0] = NEG_INF
    return d


def set_distance(h, part: Partition, l: int) -> float:
    """Polygon distance of set l of the partition (indices 0-based)."""
    if not 0 <= l < part.n_sets:
        raise ValueError(f"set index {l} out of range [0, {part.n_sets})")
    idx = np.flatnonzero(part.assignment == l)
    if idx.size == 0:
        raise ValueError(f"set {l} is empty")
    return polygon_distance(np.abs(np.asarray(h))[idx])


def pseudo_loss(h, part: Partition) -> float:
    """Maximum polygon distance over the partition sets."""
    mags = np.abs(np.asarray(h, dtype=complex))
    if mags.size != part.n:
        raise ValueError("vector length does not match partition")
    return float(_set_dists(mags, part.assignment, part.n_sets).max())


def loss(h, part: Partition) -> int:
    """Heaviside image of the pseudo-loss: 1 iff pseudo_loss > 0 (strict)."""
    return int(pseudo_loss(h, part) > 0.0)


def balanced_sizes(n: int, m: int) -> np.ndarray:
    """Set sizes as equal as possible: the first n % m sets get one extra."""
    k, r = divmod(n, m)
    return np.asarray([k + 1] * r + [k] * (m - r), dtype=np.int64)


def random_partition(n: int, m: int, rng: Generator, fc: bool = True) -> Partition:
    """Uniform random partition of n indices into m sets.

    With fc=True (default) a random permutation is cut into m blocks of
    near-equal size (exactly n/m when m divides n).  With fc=False each index
    is assigned multinomially, redrawing until no set is empty.
    """
    if m < 1 or m > n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    if fc:
        template = np.repeat(np.arange(m), balanced_sizes(n, m))
        assignment = np.empty(n, dtype=np.int64)
        assignment[rng.permutation(n)] = template
        return Partition(assignment, m)
    while True:
        assignment = rng.integers(0, m, n)
        if np.bincount(assignment, minlength=m).min() > 0:
            return Partition(assignment, m)


def partition_matrix(part: Partition) -> np.ndarray:
    """Binary (n_sets, n) membership matrix; every column sums to one."""
    mat = np.zeros((part.n_sets, part.n), dtype=np.int64)
    mat[part.assignment, np.arange(part.n)] = 1
    return mat


def _set_info(mags: np.ndarray, members: np.ndarray):
    """(size, sum, max value, argmax index, second max, min value, argmin index)."""
    vals = mags[members]
    top = int(np.argmax(vals))
    max2 = np.delete(vals, top).max() if vals.size > 1 else 0.0
    bot = int(np.argmin(vals))
    return (
        vals.size,
        float(vals.sum()),
        float(vals[top]),
        int(members[top]),
        float(max2),
        float(vals[bot]),
        int(members[bot]),
    )


def iterative_partition(
    h,
    m: int,
    rng: Generator,
    max_epochs: int = 50,
    fc: bool = False,
    init: Partition | None = None,
    full_output: bool = False,
):
    """Local-search partition repair minimising the pseudo-loss.

    Starting from a random assignment (or `init`), each epoch walks the
    failing sets in increasing distance order and tries to pull in a donor
    element with magnitude above the deficit, choosing the donor whose
    removal hurts its source set least (scanning donors smallest first and
    stopping early once the source stays feasible).  When no single donor
    can close the deficit, the largest harmless donor moves in instead, so
    a dominant element is joined by smaller ones over several epochs.
    Under fc=True every move is a swap with the failing set's smallest
    element, so set sizes never change.

    Accepted moves never increase the pseudo-loss, hence the per-epoch trace
    is non-increasing.  Stops at loss 0, on an epoch without improvement, or
    at max_epochs.

    Returns the partition, or (partition, trace) when full_output is set.
    """
    h = np.asarray(h, dtype=complex)
    n = h.size
    if m < 1 or m > n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    mags = np.abs(h)

    if init is not None:
        if init.n != n or init.n_sets > m:
            raise ValueError("init partition does not match (n, m)")
        assignment = init.assignment.copy()
    elif fc:
        template = np.repeat(np.arange(m), balanced_sizes(n, m))
        assignment = np.empty(n, dtype=np.int64)
        assignment[rng.permutation(n)] = template
    else:
        assignment = rng.integers(0, m, n)

    donor_order = np.argsort(mags, kind="stable")
    dists = _set_dists(mags, assignment, m)
    trace = [float(dists.max())]

    for _ in range(max_epochs):
        if trace[-1] <= 0.0:
            break
        failing = [int(l) for l in np.argsort(dists, kind="stable") if dists[l] > 0]
        for l in failing:
            dist_l = float(dists[l])
            if dist_l <= 0.0:
                continue
            _, sum_l, max_l, max_l_idx, max2_l, min_l, min_l_idx = _set_info(
                mags, np.flatnonzero(assignment == l)
            )
            # Post-removal max of the failing set once its min element leaves.
            rem_tgt_max = max_l if min_l_idx != max_l_idx else max2_l
            d = dist_l + min_l if fc else dist_l
            e_now = float(dists.max())

            stats: dict[int, tuple] = {}

            def evaluate(i: int):
                """Post-move distances (target, source) for donor i, or None."""
                s = int(assignment[i])
                if s == l:
                    return None
                if s not in stats:
                    stats[s] = _set_info(mags, np.flatnonzero(assignment == s))
                size_s, sum_s, max_s, max_s_idx, max2_s, _, _ = stats[s]
                rem_src_max = max_s if i != max_s_idx else max2_s
                if fc:
                    # Swap: donor i leaves s, the failing set's min element joins s.
                    new_src = 2.0 * max(rem_src_max, min_l) - (sum_s - mags[i] + min_l)
                    new_tgt = 2.0 * max(rem_tgt_max, mags[i]) - (sum_l - min_l + mags[i])
                else:
                    if size_s < 2:
                        return None  # removal would empty the source
                    new_src = 2.0 * rem_src_max - (sum_s - mags[i])
                    new_tgt = 2.0 * max(max_l, mags[i]) - (sum_l + mags[i])
                if new_tgt >= dist_l:
                    return None  # the failing set must strictly improve
                return new_tgt, new_src

            pocket_d = d
            pocket = None  # (donor index, source label, new target dist, new source dist)
            for i in donor_order:
                if mags[i] <= d:
                    continue
                cand = evaluate(int(i))
                if cand is None:
                    continue
                new_tgt, new_src = cand
                if new_src < pocket_d:
                    pocket_d = new_src
                    pocket = (int(i), int(assignment[i]), new_tgt, new_src)
                    if pocket_d < 0.0:
                        break
            accept = pocket is not None and pocket_d < d

            if not accept:
                # No donor can close the deficit in one move; feed the failing
                # set the largest element whose move keeps every touched set
                # below the current deficit.
                floor_mag = min_l if fc else 0.0
                for i in donor_order[::-1]:
                    if not floor_mag < mags[i] <= d:
                        continue
                    cand = evaluate(int(i))
                    if cand is not None and cand[1] < dist_l:
                        pocket = (int(i), int(assignment[i]), cand[0], cand[1])
                        accept = True
                        break

            if accept:
                i, s, new_tgt, new_src = pocket
                # Never let the global pseudo-loss grow (guards the fc swap
                # threshold, which is looser than the current maximum).
                if max(new_tgt, new_src) <= e_now:
                    if fc:
                        assignment[min_l_idx] = s
                    assignment[i] = l
                    dists = _set_dists(mags, assignment, m)
        dists = _set_dists(mags, assignment, m)
        e = float(dists.max())
        trace.append(e)
        if e >= trace[-2]:
            break

    part = _compact(assignment)
    if full_output:
        return part, np.asarray(trace)
    return part


def iterative_partition_fc(
    h,
    m: int,
    rng: Generator,
    max_epochs: int = 50,
    init: Partition | None = None,
    full_output: bool = False,
):
    """Iterative repair restricted to swaps, preserving all set cardinalities."""
    return iterative_partition(
        h, m, rng, max_epochs=max_epochs, fc=True, init=init, full_output=full_output
    )


@dataclass
class GeneticConfig:
    """Knobs of the genetic optimiser.

    population defaults to 10*n when left as None.  Crossover fills 85% of
    each new generation, every gene mutates to a different label with 10%
    probability, and the 25 fittest individuals survive unchanged.
    """

    population: int | None = None
    elites: int = 25
    crossover_rate: float = 0.85
    mutation_rate: float = 0.10
    max_generations: int = 200
    stall_generations: int = 30


def _population_pseudo_loss(mags: np.ndarray, chroms: np.ndarray, m: int) -> np.ndarray:
    """Pseudo-loss of every chromosome.

    A chromosome that leaves a label unused is not a partition into m sets
    and scores +inf, otherwise merging sets would always look attractive.
    """
    dists = np.empty((chroms.shape[0], m))
    valid = np.ones(chroms.shape[0], dtype=bool)
    for l in range(m):
        mask = chroms == l
        used = mask.any(axis=1)
        valid &= used
        sums = mask @ mags
        maxs = np.where(mask, mags, NEG_INF).max(axis=1)
        dists[:, l] = np.where(used, 2.0 * maxs - sums, NEG_INF)
    return np.where(valid, dists.max(axis=1), np.inf)


def genetic_partition(
    h,
    m: int,
    rng: Generator,
    config: GeneticConfig | None = None,
    full_output: bool = False,
):
    """Genetic search over label vectors minimising the pseudo-loss.

    Binary tournaments pick parents, single-point crossover and per-gene
    mutation produce offspring, and elite carry-over makes the best
    pseudo-loss non-increasing across generations.  Set sizes are not
    constrained.  Stops as soon as a feasible individual appears, after
    `stall_generations` without improvement, or at `max_generations`.
    """
    h = np.asarray(h, dtype=complex)
    n = h.size
    if m < 1 or m > n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    cfg = config or GeneticConfig()
    pop = cfg.population if cfg.population is not None else 10 * n
    if not 0 <= cfg.elites < pop:
        raise ValueError("need 0 <= elites < population")
    if not (0.0 <= cfg.crossover_rate <= 1.0 and 0.0 <= cfg.mutation_rate <= 1.0):
        raise ValueError("rates must lie in [0, 1]")
    mags = np.abs(h)

    chroms = rng.integers(0, m, (pop, n))
    fitness = _population_pseudo_loss(mags, chroms, m)
    best_idx = int(np.argmin(fitness))
    best_val = float(fitness[best_idx])
    best = chroms[best_idx].copy()
    trace = [best_val]
    stall = 0

    for _ in range(cfg.max_generations):
        if best_val <= 0.0:
            break
        order = np.argsort(fitness, kind="stable")
        elites = chroms[order[: cfg.elites]]
        n_off = pop - cfg.elites
        n_pairs = int(round(cfg.crossover_rate * n_off)) // 2
        n_copies = n_off - 2 * n_pairs

        cand = rng.integers(0, pop, (2 * n_pairs + n_copies, 2))
        fa, fb = fitness[cand[:, 0]], fitness[cand[:, 1]]
        take_a = (fa < fb) | ((fa == fb) & (cand[:, 0] <= cand[:, 1]))
        parents = np.where(take_a, cand[:, 0], cand[:, 1])

        offspring = np.empty((n_off, n), dtype=np.int64)
        if n_pairs:
            p1 = chroms[parents[:n_pairs]]
            p2 = chroms[parents[n_pairs : 2 * n_pairs]]
            cut = rng.integers(1, n, n_pairs)
            left = np.arange(n) < cut[:, None]
            offspring[:n_pairs] = np.where(left, p1, p2)
            offspring[n_pairs : 2 * n_pairs] = np.where(left, p2, p1)
        if n_copies:
            offspring[2 * n_pairs :] = chroms[parents[2 * n_pairs :]]

        if m > 1 and cfg.mutation_rate > 0:
            mut = rng.random((n_off, n)) < cfg.mutation_rate
            shift = rng.integers(1, m, (n_off, n))
            offspring = np.where(mut, (offspring + shift) % m, offspring)

        chroms = np.vstack([elites, offspring])
        fitness = np.concatenate(
            [fitness[order[: cfg.elites]], _population_pseudo_loss(mags, offspring, m)]
        )
        gen_best = int(np.argmin(fitness))
        gen_val = float(fitness[gen_best])
        if gen_val < best_val:
            best_val = gen_val
            best = chroms[gen_best].copy()
            stall = 0
        else:
            stall += 1
        trace.append(best_val)
        if stall >= cfg.stall_generations:
            break

    if not np.isfinite(best_val):
        best = _fill_missing_labels(best, m, mags)
    part = Partition(best, m)
    if full_output:
        return part, np.asarray(trace)
    return part


def _fill_missing_labels(chrom: np.ndarray, m: int, mags: np.ndarray) -> np.ndarray:
    """Give every unused label one element from the currently largest set."""
    chrom = chrom.copy()
    for l in range(m):
        if not np.any(chrom == l):
            counts = np.bincount(chrom, minlength=m)
            big = int(np.argmax(counts))
            members = np.flatnonzero(chrom == big)
            chrom[members[np.argmin(mags[members])]] = l
    return chrom


PARTITION_ALGOS = ("random", "random-fc", "iterative", "iterative-fc", "genetic")


def make_partitioner(algo: str):
    """Map an algorithm name onto a callable (h, m, rng) -> Partition."""
    if algo == "random":
        return lambda h, m, rng: random_partition(np.asarray(h).size, m, rng, fc=False)
    if algo == "random-fc":
        return lambda h, m, rng: random_partition(np.asarray(h).size, m, rng, fc=True)
    if algo == "iterative":
        return lambda h, m, rng: iterative_partition(h, m, rng)
    if algo == "iterative-fc":
        return lambda h, m, rng: iterative_partition_fc(h, m, rng)
    if algo == "genetic":
        return lambda h, m, rng: genetic_partition(h, m, rng)
    raise ValueError(f"unknown partition algorithm {algo!r}")
