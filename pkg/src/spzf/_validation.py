"""Input validation helpers shared by the estimator wrappers."""
from __future__ import annotations

import numpy as np
from numpy.random import Generator


def as_channel_vector(X, name: str = "X") -> np.ndarray:
    """Coerce to a 1-d complex vector; accepts (n,), (n, 1) and (1, n) shapes."""
    arr = np.asarray(X)
    if arr.ndim == 2 and 1 in arr.shape:
        arr = arr.ravel()
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d complex vector")
    arr = arr.astype(complex)
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_channel_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce to a (k, n) complex matrix of stacked channel vectors."""
    arr = np.atleast_2d(np.asarray(X)).astype(complex)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"{name} must be a (k, n) complex matrix")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_generator(random_state) -> Generator:
    """Accept None, an integer seed, or a Generator."""
    if isinstance(random_state, Generator):
        return random_state
    return np.random.default_rng(random_state)
