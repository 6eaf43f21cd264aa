"""Polygon feasibility tests and constructive phase solving.

A complex vector h can be rotated entrywise so that its sum vanishes iff
the largest magnitude does not exceed the sum of the remaining ones (the
polygon inequality: the entries close a polygon in the complex plane).
The solver balances the magnitudes into three piles, closes the resulting
triangle with law-of-cosines angles, and maps each pile's direction back
to a per-entry phase.
"""
from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi

# Relative closure tolerance: |sum h_i e^{j phi_i}| <= EPS_CLOSURE * sum |h_i|.
EPS_CLOSURE = 1e-9
# Two-entry vectors close only in anti-phase; magnitudes must match to this
# relative tolerance.
EPS_PAIR = 1e-12


class InfeasibleSetError(ValueError):
    """Raised when magnitudes cannot be rotated onto a closed polygon."""


def polygon_distance(mags) -> float:
    """Largest magnitude minus the sum of all others.

    Non-positive iff the polygon inequality holds; when positive it equals
    the smallest extra magnitude that would restore feasibility.
    """
    mags = np.asarray(mags, dtype=float)
    if mags.ndim != 1 or mags.size == 0:
        raise ValueError("polygon_distance expects a non-empty 1-d magnitude list")
    if np.any(mags < 0) or not np.all(np.isfinite(mags)):
        raise ValueError("magnitudes must be finite and non-negative")
    return float(2.0 * mags.max() - mags.sum())


def satisfies_polygon_inequality(mags) -> bool:
    """True iff the magnitudes can close a polygon (distance <= 0)."""
    return polygon_distance(mags) <= 0.0


def greedy_three_partition(mags):
    """Split magnitudes into three piles whose sums satisfy the triangle inequality.

    Magnitudes are scanned in descending order and each goes to the pile with
    the smallest running sum (ties to the lowest pile index).  Whenever the
    polygon inequality holds for the input, the three resulting sums close a
    triangle.

    Returns a list of three index arrays.
    """
    mags = np.asarray(mags, dtype=float)
    if mags.size < 3:
        raise ValueError("need at least three magnitudes to form three piles")
    if not satisfies_polygon_inequality(mags):
        raise InfeasibleSetError("polygon inequality fails; no feasible grouping")
    order = np.argsort(-mags, kind="stable")
    sums = np.zeros(3)
    groups: list[list[int]] = [[], [], []]
    for i in order:
        g = int(np.argmin(sums))
        groups[g].append(int(i))
        sums[g] += mags[i]
    return [np.asarray(g, dtype=np.intp) for g in groups]


def polygon_solver_batch(h: np.ndarray) -> np.ndarray:
    """Vectorised phase solver for a batch of equal-length vectors.

    Parameters
    ----------
    h : complex array of shape (batch, n)
        Zero entries are allowed and act as padding; their phases are
        arbitrary and do not disturb the closure.

    Returns phases of shape (batch, n) in [0, 2*pi).  Feasibility is not
    checked here: rows violating the polygon inequality produce phases
    whose closure residual exceeds the tolerance.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2:
        raise ValueError("expected a (batch, n) array")
    nb, n = h.shape
    mags = np.abs(h)

    order = np.argsort(-mags, axis=1, kind="stable")
    sorted_mags = np.take_along_axis(mags, order, axis=1)
    rows = np.arange(nb)
    sums = np.zeros((nb, 3))
    group_sorted = np.empty((nb, n), dtype=np.int8)
    for t in range(n):
        g = np.argmin(sums, axis=1)
        group_sorted[:, t] = g
        sums[rows, g] += sorted_mags[:, t]
    group = np.empty_like(group_sorted)
    np.put_along_axis(group, order, group_sorted, axis=1)

    s1, s2, s3 = sums[:, 0], sums[:, 1], sums[:, 2]
    # Close the triangle of pile sums: pile 0 points along angle 0, the other
    # two fold back by the adjacent triangle angles.  Degenerate piles (zero
    # sums) collapse to angle 0 / pi.
    with np.errstate(divide="ignore", invalid="ignore"):
        cos_a = np.where(s1 * s2 > 0, (s1**2 + s2**2 - s3**2) / (2 * s1 * s2), 1.0)
        cos_b = np.where(s1 * s3 > 0, (s1**2 + s3**2 - s2**2) / (2 * s1 * s3), 1.0)
    ang_a = np.arccos(np.clip(cos_a, -1.0, 1.0))
    ang_b = np.arccos(np.clip(cos_b, -1.0, 1.0))
    theta = np.stack([np.zeros(nb), np.pi - ang_a, np.pi + ang_b], axis=1)

    phases = theta[rows[:, None], group] - np.angle(h)
    return np.mod(phases, TWO_PI)


def polygon_solver(h) -> np.ndarray:
    """Phases phi such that sum_i h_i * e^{j phi_i} = 0 (within EPS_CLOSURE).

    Raises InfeasibleSetError when the polygon inequality fails, ValueError
    for vectors shorter than two entries.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 1 or h.size < 2:
        raise ValueError("polygon_solver needs a 1-d vector with >= 2 entries")
    mags = np.abs(h)
    if h.size == 2:
        scale = mags.max()
        if scale == 0.0:
            return np.zeros(2)
        if abs(mags[0] - mags[1]) > EPS_PAIR * scale:
            raise InfeasibleSetError("two entries close only with equal magnitudes")
        return np.mod(np.array([0.0, np.pi]) - np.angle(h), TWO_PI)
    if not satisfies_polygon_inequality(mags):
        raise InfeasibleSetError("polygon inequality fails for this vector")
    return polygon_solver_batch(h[None, :])[0]


def closure_residual(h, phases) -> float:
    """Relative residual |sum h_i e^{j phi_i}| / sum |h_i| (0 when h == 0)."""
    h = np.asarray(h, dtype=complex)
    total = np.abs(h).sum()
    if total == 0.0:
        return 0.0
    return float(np.abs(np.sum(h * np.exp(1j * np.asarray(phases)))) / total)
