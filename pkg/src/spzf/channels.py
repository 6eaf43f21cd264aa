"""Channel realization generators.

Two fading models are supported: i.i.d. Rayleigh entries CN(0, sigma^2) and
a geometric multipath model where the vector is a random superposition of
uniform-linear-array response vectors.  Eavesdropper matrices stack
independent rows of the same model.

All samplers are pure functions of (arguments, generator state), so trials
driven by independently derived generators are reproducible regardless of
execution order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator


def substream(seed, *path: int) -> Generator:
    """Generator for a labeled substream of a master seed.

    Identical (seed, path) always yields the identical sample sequence,
    independent of host, worker count, or call order.  `seed` may itself be
    a tuple of ints for nested derivation.
    """
    base = tuple(seed) if isinstance(seed, tuple) else (int(seed),)
    entropy = base + tuple(int(p) for p in path)
    return np.random.default_rng(np.random.SeedSequence(entropy))


@dataclass
class ChannelModel:
    """Configuration of the fading model.

    model : "rayleigh" or "geometric"
    sigma2 : per-entry variance of Rayleigh entries
    paths : number of multipath components (geometric only)
    spacing_ratio : antenna spacing over wavelength (geometric only)
    """

    model: str = "rayleigh"
    sigma2: float = 1.0
    paths: int = 10
    spacing_ratio: float = 0.5

    def __post_init__(self):
        if self.model not in ("rayleigh", "geometric"):
            raise ValueError(f"unknown channel model {self.model!r}")
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")
        if self.paths < 1:
            raise ValueError("paths must be >= 1")
        if self.spacing_ratio <= 0:
            raise ValueError("spacing_ratio must be positive")


def sample_rayleigh(n: int, sigma2: float, rng: Generator) -> np.ndarray:
    """n i.i.d. CN(0, sigma2) entries (re and im each with variance sigma2/2)."""
    if n < 1:
        raise ValueError("antenna count must be >= 1")
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    z = rng.standard_normal((2, n))
    return np.sqrt(sigma2 / 2.0) * (z[0] + 1j * z[1])


def array_response(n: int, phi: float, spacing_ratio: float) -> np.ndarray:
    """Uniform linear array response: entry i is exp(j*2*pi*(d/lambda)*i*sin(phi))/sqrt(n)."""
    if n < 1:
        raise ValueError("antenna count must be >= 1")
    i = np.arange(n)
    return np.exp(1j * 2.0 * np.pi * spacing_ratio * i * np.sin(phi)) / np.sqrt(n)


def sample_geometric(n: int, cfg: ChannelModel, rng: Generator) -> np.ndarray:
    """Multipath superposition sqrt(1/L) * sum_l alpha_l * a(phi_l).

    alpha_l ~ CN(0,1) i.i.d., phi_l uniform on [0, 2*pi], drawn independently
    per call.
    """
    if cfg.model != "geometric":
        raise ValueError("config is not a geometric model")
    if n < 1:
        raise ValueError("antenna count must be >= 1")
    L = cfg.paths
    z = rng.standard_normal((2, L))
    alpha = (z[0] + 1j * z[1]) / np.sqrt(2.0)
    phis = rng.uniform(0.0, 2.0 * np.pi, L)
    steer = np.exp(
        1j * 2.0 * np.pi * cfg.spacing_ratio * np.outer(np.sin(phis), np.arange(n))
    ) / np.sqrt(n)
    return np.sqrt(1.0 / L) * (alpha @ steer)


def sample_channel(n: int, cfg: ChannelModel, rng: Generator) -> np.ndarray:
    """One channel vector drawn from the configured model."""
    if cfg.model == "rayleigh":
        return sample_rayleigh(n, cfg.sigma2, rng)
    return sample_geometric(n, cfg, rng)


def sample_channel_block(trials: int, n: int, cfg: ChannelModel, rng: Generator) -> np.ndarray:
    """(trials, n) matrix of independent channel vectors.

    The Rayleigh block is drawn in one vectorized call; geometric rows fall
    back to per-row draws (per-path loops dominate anyway).
    """
    if cfg.model == "rayleigh":
        z = rng.standard_normal((2, trials, n))
        return np.sqrt(cfg.sigma2 / 2.0) * (z[0] + 1j * z[1])
    L = cfg.paths
    z = rng.standard_normal((2, trials, L))
    alpha = (z[0] + 1j * z[1]) / np.sqrt(2.0)
    phis = rng.uniform(0.0, 2.0 * np.pi, (trials, L))
    steer = np.exp(
        1j * 2.0 * np.pi * cfg.spacing_ratio * np.sin(phis)[..., None] * np.arange(n)
    ) / np.sqrt(n)
    return np.sqrt(1.0 / L) * np.einsum("tl,tln->tn", alpha, steer)


def sample_eve_matrix(n_e: int, n: int, cfg: ChannelModel, rng: Generator) -> np.ndarray:
    """(n_e, n) eavesdropper matrix; each row follows the configured model."""
    if n_e < 1:
        raise ValueError("eavesdropper antenna count must be >= 1")
    return np.vstack([sample_channel(n, cfg, rng) for _ in range(n_e)])
