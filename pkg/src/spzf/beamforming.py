"""Successive zero-forcing of several channel vectors with unit-modulus phases.

Stage k partitions the current user's (reduced) vector, solves each set to a
zero sum, and collapses every remaining user's vector set-wise with the same
rotations.  The final beamformer is the product of the per-stage rotations
pulled back to the antenna index, so every entry keeps magnitude one.

Stage failures are classified by the sign of the polygon distance, not by
solver breakdown, so outage statistics do not depend on solver internals.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator

from .partition import Partition, iterative_partition, make_partitioner
from .polygon import EPS_CLOSURE, polygon_solver_batch

RESIDUAL_TOL = EPS_CLOSURE


@dataclass
class SpzfSolution:
    """Successful solve: unit-modulus w plus per-stage bookkeeping."""

    w: np.ndarray
    stage_phases: list[np.ndarray]
    stage_partitions: list[Partition]
    residuals: np.ndarray

    @property
    def success(self) -> bool:
        return True


@dataclass
class OutageReport:
    """A stage whose sets cannot all close a polygon.

    outcome is "e1" when any partition set of an intermediate stage fails and
    "e2" when the final reduced vector fails (the two-user error events).
    """

    outcome: str
    failing_stage: int

    @property
    def success(self) -> bool:
        return False


def verify_zero_forcing(w, channels) -> np.ndarray:
    """Per-user relative residuals |h_k^T w| / sum_i |h_ki|."""
    w = np.asarray(w, dtype=complex)
    H = np.atleast_2d(np.asarray(channels, dtype=complex))
    if H.shape[1] != w.size:
        raise ValueError("channel length does not match beamformer length")
    num = np.abs(H @ w)
    den = np.abs(H).sum(axis=1)
    return num / np.where(den > 0, den, 1.0)


def compose_beamformer(stage_partitions, stage_phases) -> np.ndarray:
    """Pull per-stage rotations back to antenna entries.

    Entry i accumulates its own stage-1 phase plus the phase of the group it
    was folded into at each later stage, so |w_i| = 1 exactly.
    """
    if len(stage_partitions) != len(stage_phases) or not stage_phases:
        raise ValueError("need matching, non-empty stage lists")
    phases0 = np.asarray(stage_phases[0], dtype=float)
    if stage_partitions[0].n != phases0.size:
        raise ValueError("stage 1 dimensions do not chain")
    total = phases0.copy()
    idx = stage_partitions[0].assignment
    for part, ph in zip(stage_partitions[1:], stage_phases[1:]):
        ph = np.asarray(ph, dtype=float)
        if part.n != ph.size:
            raise ValueError("stage phase length does not match its partition")
        if idx.max() >= part.n:
            raise ValueError("stage dimensions do not chain")
        total += ph[idx]
        idx = part.assignment[idx]
    return np.exp(1j * total)


def _solve_stage_sets(vec: np.ndarray, part: Partition) -> np.ndarray:
    """Phases zero-forcing every set of `vec`; caller checks feasibility."""
    sets = part.sets()
    kmax = max(s.size for s in sets)
    padded = np.zeros((part.n_sets, kmax), dtype=complex)
    for l, idx in enumerate(sets):
        padded[l, : idx.size] = vec[idx]
    solved = polygon_solver_batch(padded)
    phases = np.zeros(part.n)
    for l, idx in enumerate(sets):
        phases[idx] = solved[l, : idx.size]
    return phases


def reduced_channel(h2, part: Partition, phases1) -> np.ndarray:
    """Set-wise sums of the next user's rotated entries: y_l = sum_{i in l} h2_i e^{j phi_i}."""
    h2 = np.asarray(h2, dtype=complex)
    phases1 = np.asarray(phases1, dtype=float)
    if h2.size != part.n or phases1.size != part.n:
        raise ValueError("vector, partition and phases must share one length")
    y = np.zeros(part.n_sets, dtype=complex)
    np.add.at(y, part.assignment, h2 * np.exp(1j * phases1))
    return y


def _run_stages(channels: np.ndarray, stage_parts) -> SpzfSolution | OutageReport:
    """Shared stage machinery; `stage_parts[k]` maps stage k's vector to a Partition."""
    K = channels.shape[0]
    reduced = [channels[k].copy() for k in range(K)]
    partitions: list[Partition] = []
    phase_list: list[np.ndarray] = []
    for k in range(K):
        vec = reduced[k]
        if k < K - 1:
            part = stage_parts[k](vec)
        else:
            part = Partition(np.zeros(vec.size, dtype=np.int64), 1)
        mags = np.abs(vec)
        for idx in part.sets():
            if 2.0 * mags[idx].max() - mags[idx].sum() > 0:
                return OutageReport("e1" if k < K - 1 else "e2", k + 1)
        phases = _solve_stage_sets(vec, part)
        partitions.append(part)
        phase_list.append(phases)
        rot = np.exp(1j * phases)
        for j in range(k + 1, K):
            y = np.zeros(part.n_sets, dtype=complex)
            np.add.at(y, part.assignment, reduced[j] * rot)
            reduced[j] = y
    w = compose_beamformer(partitions, phase_list)
    residuals = verify_zero_forcing(w, channels)
    return SpzfSolution(w, phase_list, partitions, residuals)


def spzf_two_user(h1, h2, part: Partition) -> SpzfSolution | OutageReport:
    """Two-user solve for an explicit stage-1 partition.

    Zero-forces each set of h1, folds h2 into the reduced vector, zero-forces
    that, and composes the final unit-modulus beamformer.  Returns an
    OutageReport ("e1" or "e2") when a stage fails the polygon inequality.
    """
    h1 = np.asarray(h1, dtype=complex)
    h2 = np.asarray(h2, dtype=complex)
    if h1.size != h2.size:
        raise ValueError("the two channel vectors must have equal length")
    if part.n != h1.size:
        raise ValueError("partition does not cover the channel indices")
    return _run_stages(np.vstack([h1, h2]), [lambda vec: part])


def best_effort_beamformer(h1, h2, part: Partition) -> np.ndarray:
    """Two-user beamformer built without feasibility checks.

    Infeasible sets cannot close, but the triangle construction still leaves
    the smallest reachable residual (the polygon distance), so the returned
    w is the least-leakage unit-modulus vector this construction can give.
    """
    h1 = np.asarray(h1, dtype=complex)
    h2 = np.asarray(h2, dtype=complex)
    phases1 = _solve_stage_sets(h1, part)
    y = reduced_channel(h2, part, phases1)
    phases2 = polygon_solver_batch(y[None, :])[0]
    trivial = Partition(np.zeros(part.n_sets, dtype=np.int64), 1)
    return compose_beamformer([part, trivial], [phases1, phases2])


def feasible_m_range(n: int) -> list[int]:
    """Valid two-user set counts: 3 <= m <= n/3 (empty when n < 9)."""
    return list(range(3, n // 3 + 1))


def feasible_m_chains(n: int, k: int) -> list[tuple[int, ...]]:
    """All set-count chains (m_2, ..., m_K) with 3 <= m_{j+1} <= m_j / 3."""
    if k < 2:
        return [()]
    chains = []

    def extend(prev: int, chain: tuple[int, ...]):
        if len(chain) == k - 1:
            chains.append(chain)
            return
        for m_next in range(3, prev // 3 + 1):
            extend(m_next, chain + (m_next,))

    extend(n, ())
    return chains


def spzf_general(
    channels,
    set_counts,
    partitioner="iterative",
    rng: Generator | None = None,
) -> SpzfSolution | OutageReport:
    """Successive zero-forcing of K >= 2 channels.

    `set_counts` lists the stage set counts (m_2, ..., m_K); each must obey
    3 <= m_{k+1} <= m_k / 3 starting from m_1 = N, which forces N >= 3^K.
    `partitioner` is an algorithm name or a callable (vec, m, rng) ->
    Partition applied stage-wise to the current user's reduced vector.
    """
    H = np.atleast_2d(np.asarray(channels, dtype=complex))
    K, n = H.shape
    counts = [int(m) for m in set_counts]
    if len(counts) != K - 1:
        raise ValueError(f"need {K - 1} stage set counts for {K} users")
    if n < 3**K:
        raise ValueError(f"{K} users need at least 3^{K} = {3**K} antennas, got {n}")
    prev = n
    for m in counts:
        if not 3 <= m <= prev / 3:
            raise ValueError(f"set count chain violates 3 <= m' <= m/3 at {m} after {prev}")
        prev = m
    if callable(partitioner):
        fn = partitioner
    else:
        fn = make_partitioner(partitioner)
    rng = rng if rng is not None else np.random.default_rng()
    stage_parts = [
        (lambda mk: (lambda vec: fn(vec, mk, rng)))(mk) for mk in counts
    ]
    return _run_stages(H, stage_parts)


def solve_two_user(
    h1,
    h2,
    m: int,
    algo: str = "iterative",
    rng: Generator | None = None,
) -> tuple[Partition, SpzfSolution | OutageReport]:
    """Partition h1 with the named algorithm, then run the two-user solve."""
    rng = rng if rng is not None else np.random.default_rng()
    if algo == "iterative":
        part = iterative_partition(h1, m, rng)
    else:
        part = make_partitioner(algo)(h1, m, rng)
    return part, spzf_two_user(h1, h2, part)
