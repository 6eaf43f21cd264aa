"""Monte Carlo estimators for outage probabilities and secrecy rates.

Trials are split into fixed-size chunks, each driven by a generator derived
from (seed, chunk index), so estimates are bit-identical for any worker
count and any execution order.  Channel blocks are always drawn before any
algorithm randomness inside a chunk, which keeps channels paired across
runs that differ only in the partition algorithm.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .beamforming import (
    best_effort_beamformer,
    feasible_m_range,
    reduced_channel,
    spzf_two_user,
    _solve_stage_sets,
)
from .channels import ChannelModel, sample_channel_block, substream
from .partition import _set_dists, balanced_sizes, make_partitioner
from .polygon import polygon_solver_batch

CHUNK_TRIALS = 1024
FRAY_CHUNK = 1 << 16


@dataclass
class OutageEstimate:
    """Binomial probability estimate with its standard error."""

    probability: float
    trials: int
    stderr: float

    @classmethod
    def from_counts(cls, failures: int, trials: int) -> "OutageEstimate":
        if trials <= 0:
            return cls(float("nan"), 0, float("nan"))
        p = failures / trials
        return cls(p, trials, math.sqrt(p * (1.0 - p) / trials))


@dataclass
class MeanEstimate:
    mean: float
    stderr: float
    trials: int


@dataclass
class TwoUserOutage:
    """Joint result of a two-user outage run.

    The counts satisfy outage = stage-1 failures + stage-2 failures exactly.
    """

    outage: OutageEstimate
    e1: OutageEstimate
    e2_given_e1c: OutageEstimate
    n_e1: int
    n_e2: int
    trials: int


def _chunk_sizes(trials: int, chunk: int) -> list[int]:
    return [min(chunk, trials - s) for s in range(0, trials, chunk)]


def _map_chunks(fn, n_chunks: int, threads: int) -> list:
    if threads <= 1 or n_chunks <= 1:
        return [fn(c) for c in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n_chunks)))


def fray_approx(m: int) -> float:
    """Large-m asymptote of the single-channel failure probability: m*exp(-pi*m^2/16)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return float(m * math.exp(-math.pi * m * m / 16.0))


def fray_empirical(
    m: int,
    sigma2: float = 1.0,
    trials: int = 100_000,
    seed=0,
    model: ChannelModel | None = None,
) -> OutageEstimate:
    """Fraction of length-m channel draws violating the polygon inequality.

    Defaults to i.i.d. Rayleigh entries; pass a geometric ChannelModel to
    sample that instead.
    """
    if m < 1 or trials < 1:
        raise ValueError("need m >= 1 and trials >= 1")
    cfg = model or ChannelModel("rayleigh", sigma2=sigma2)
    fails = 0
    for c, size in enumerate(_chunk_sizes(trials, FRAY_CHUNK)):
        rng = substream(seed, c)
        mags = np.abs(sample_channel_block(size, m, cfg, rng))
        fails += int((2.0 * mags.max(axis=1) - mags.sum(axis=1) > 0).sum())
    return OutageEstimate.from_counts(fails, trials)


def _padded_by_label(values_list, labels: np.ndarray, m: int):
    """Group row entries by label into zero-padded (B, m, kmax) blocks."""
    B, n = labels.shape
    order = np.argsort(labels, axis=1, kind="stable")
    sl = np.take_along_axis(labels, order, axis=1)
    flat = (np.arange(B)[:, None] * m + labels).ravel()
    counts = np.bincount(flat, minlength=B * m).reshape(B, m)
    kmax = int(counts.max())
    starts = np.zeros((B, m), dtype=np.int64)
    starts[:, 1:] = np.cumsum(counts, axis=1)[:, :-1]
    rank = np.arange(n)[None, :] - np.take_along_axis(starts, sl, axis=1)
    rows = np.repeat(np.arange(B), n)
    out = []
    for values in values_list:
        padded = np.zeros((B, m, kmax), dtype=values.dtype)
        padded[rows, sl.ravel(), rank.ravel()] = np.take_along_axis(
            values, order, axis=1
        ).ravel()
        out.append(padded)
    return out, counts


def _random_labels(B: int, n: int, m: int, rng, fc: bool) -> np.ndarray:
    if fc:
        template = np.repeat(np.arange(m), balanced_sizes(n, m))
        perm = np.argsort(rng.random((B, n)), axis=1)
        labels = np.empty((B, n), dtype=np.int64)
        np.put_along_axis(labels, perm, np.broadcast_to(template, (B, n)), axis=1)
        return labels
    labels = rng.integers(0, m, (B, n))
    while True:
        counts = np.bincount(
            (np.arange(B)[:, None] * m + labels).ravel(), minlength=B * m
        ).reshape(B, m)
        bad = np.flatnonzero(counts.min(axis=1) == 0)
        if bad.size == 0:
            return labels
        labels[bad] = rng.integers(0, m, (bad.size, n))


def _classify_chunk_vectorized(h1, h2, m: int, rng, fc: bool):
    """Stage failures for the random partition algorithms, fully vectorised."""
    B, n = h1.shape
    labels = _random_labels(B, n, m, rng, fc)
    (p1, p2), _ = _padded_by_label([h1, h2], labels, m)
    mags = np.abs(p1)
    dists = 2.0 * mags.max(axis=2) - mags.sum(axis=2)
    e1 = (dists > 0).any(axis=1)
    ok = ~e1
    n_e2 = 0
    if ok.any():
        sets1 = p1[ok].reshape(-1, p1.shape[2])
        phases = polygon_solver_batch(sets1)
        y = (p2[ok].reshape(-1, p2.shape[2]) * np.exp(1j * phases)).sum(axis=1)
        y = y.reshape(-1, m)
        ymag = np.abs(y)
        n_e2 = int((2.0 * ymag.max(axis=1) - ymag.sum(axis=1) > 0).sum())
    return int(e1.sum()), n_e2


def _classify_chunk_pertrial(h1, h2, m: int, rng, partitioner):
    """Stage failures for partition algorithms that run one trial at a time."""
    n_e1 = 0
    n_e2 = 0
    for t in range(h1.shape[0]):
        part = partitioner(h1[t], m, rng)
        mags = np.abs(h1[t])
        if _set_dists(mags, part.assignment, part.n_sets).max() > 0:
            n_e1 += 1
            continue
        phases = _solve_stage_sets(h1[t], part)
        y = reduced_channel(h2[t], part, phases)
        ymag = np.abs(y)
        if 2.0 * ymag.max() - ymag.sum() > 0:
            n_e2 += 1
    return n_e1, n_e2


def estimate_outage_two_user(
    n: int,
    m: int,
    algo: str = "random-fc",
    model: ChannelModel | None = None,
    trials: int = 10_000,
    seed=0,
    threads: int = 1,
) -> TwoUserOutage:
    """Monte Carlo estimate of Pr[outage], Pr(e1) and Pr(e2 | no e1).

    Per trial two channels are drawn, the named algorithm partitions the
    first one, a stage-1 failure is any set with positive polygon distance,
    and surviving trials test the reduced vector of the second channel.
    """
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    cfg = model or ChannelModel()
    fast_fc = {"random": False, "random-fc": True}.get(algo) if isinstance(algo, str) else None
    if fast_fc is None:
        partitioner = make_partitioner(algo) if isinstance(algo, str) else algo
    else:
        partitioner = None
    sizes = _chunk_sizes(trials, CHUNK_TRIALS)

    def run(c: int):
        rng = substream(seed, c)
        h1 = sample_channel_block(sizes[c], n, cfg, rng)
        h2 = sample_channel_block(sizes[c], n, cfg, rng)
        if fast_fc is not None:
            return _classify_chunk_vectorized(h1, h2, m, rng, fast_fc)
        return _classify_chunk_pertrial(h1, h2, m, rng, partitioner)

    parts = _map_chunks(run, len(sizes), threads)
    n_e1 = sum(p[0] for p in parts)
    n_e2 = sum(p[1] for p in parts)
    return TwoUserOutage(
        outage=OutageEstimate.from_counts(n_e1 + n_e2, trials),
        e1=OutageEstimate.from_counts(n_e1, trials),
        e2_given_e1c=OutageEstimate.from_counts(n_e2, trials - n_e1),
        n_e1=n_e1,
        n_e2=n_e2,
        trials=trials,
    )


def random_partition_outage_closed_form(n: int, m: int, fray) -> float:
    """Closed-form outage of the balanced random partition.

    1 - (1 - f(n/m))^m * (1 - f(m)) with f supplied as a callable; requires
    m to divide n so every set has exactly n/m elements.
    """
    if m < 1 or n % m != 0:
        raise ValueError("m must divide n for the closed form")
    return float(1.0 - (1.0 - fray(n // m)) ** m * (1.0 - fray(m)))


def optimal_m_search(
    n: int,
    algo: str = "random-fc",
    model: ChannelModel | None = None,
    trials: int = 10_000,
    seed=0,
    threads: int = 1,
) -> tuple[int, TwoUserOutage]:
    """Empirical minimiser of the outage probability over 3 <= m <= n/3."""
    candidates = feasible_m_range(n)
    if not candidates:
        raise ValueError(f"no feasible set count for n={n} (need n >= 9)")
    best_m, best = None, None
    for m in candidates:
        est = estimate_outage_two_user(
            n, m, algo=algo, model=model, trials=trials, seed=(_as_tuple(seed) + (m,)), threads=threads
        )
        if best is None or est.outage.probability < best.outage.probability:
            best_m, best = m, est
    return best_m, best


def _as_tuple(seed) -> tuple:
    return tuple(seed) if isinstance(seed, tuple) else (int(seed),)


def message_beamformer(h) -> np.ndarray:
    """Unit-modulus vector aligning every channel entry: h^T v = sum |h_i|."""
    h = np.asarray(h, dtype=complex)
    if h.size == 0:
        raise ValueError("empty channel vector")
    return np.exp(-1j * np.angle(h))


@dataclass
class RateSample:
    """One channel realisation's rate terms (legitimate minus eavesdropper)."""

    legit_term: float
    eve_term: float
    rate: float


def secrecy_rate_sample(
    h,
    G,
    v,
    w,
    p_total: float,
    noise_chains: int = 1,
    base: float = 2.0,
) -> RateSample:
    """Achievable-rate sample for message beam v and noise beam w.

    Both beams carry power p_total / (noise_chains + 1) split over n
    antennas.  The eavesdropper term uses the rank-2 structure of the
    covariance, reducing the determinant ratio to scalars: with a = G v',
    b = G w', det(I + aa' + bb') = (1+|a|^2)(1+|b|^2) - |a'b|^2.
    Pass w=None to transmit no artificial noise.
    """
    h = np.asarray(h, dtype=complex)
    G = np.atleast_2d(np.asarray(G, dtype=complex))
    if G.shape[1] != h.size:
        raise ValueError("eavesdropper matrix width does not match channel length")
    scale = math.sqrt(p_total / (h.size * (noise_chains + 1)))
    vt = scale * np.asarray(v, dtype=complex)
    a = G @ vt
    na = float((np.abs(a) ** 2).sum())
    hv2 = float(np.abs(h @ vt) ** 2)
    if w is None:
        hw2 = 0.0
        nb = 0.0
        ab2 = 0.0
    else:
        wt = scale * np.asarray(w, dtype=complex)
        b = G @ wt
        hw2 = float(np.abs(h @ wt) ** 2)
        nb = float((np.abs(b) ** 2).sum())
        ab2 = float(np.abs(np.vdot(a, b)) ** 2)
    log = lambda x: math.log(x) / math.log(base)
    legit = log(1.0 + hv2 / (1.0 + hw2))
    eve = log(((1.0 + na) * (1.0 + nb) - ab2) / (1.0 + nb))
    return RateSample(legit, eve, legit - eve)


@dataclass
class SecrecyConfig:
    """System parameters of the secrecy experiment (unit noise variance)."""

    snr_db: float
    n: int
    n_e: int
    noise_chains: int = 1

    def __post_init__(self):
        if self.n < 1 or self.n_e < 1:
            raise ValueError("need n >= 1 and n_e >= 1")
        if self.noise_chains != 1:
            raise ValueError("a single noise chain is assumed")

    @property
    def power(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)


@dataclass
class SecrecyEstimate:
    rate_user1: MeanEstimate
    rate_user2: MeanEstimate
    rate_min: MeanEstimate
    outage: OutageEstimate
    m: int
    trials: int


def _mean_estimate(x: np.ndarray) -> MeanEstimate:
    se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else float("nan")
    return MeanEstimate(float(x.mean()), se, int(x.size))


def estimate_secrecy_rate(
    cfg: SecrecyConfig,
    algo: str = "iterative",
    model: ChannelModel | None = None,
    trials: int = 1_000,
    seed=0,
    m: int | None = None,
    threads: int = 1,
    outage_policy: str = "transmit",
    floor: bool = True,
    m_search_trials: int | None = None,
    full_output: bool = False,
):
    """Mean secrecy rates over channel draws for one algorithm.

    Per trial: draw both user channels and the eavesdropper matrix, build
    the noise beam with the named partition algorithm at set count m (found
    by outage search when omitted), phase-match the message beam to each
    user, and evaluate the rate terms.  On a zero-forcing outage the trial
    follows `outage_policy`: "transmit" (default) sends the best-effort
    noise beam anyway, so residual leakage degrades the legitimate SNR;
    "no-noise" transmits without artificial noise; "zero-rate" scores the
    trial zero; "resample" retries the partition a few times before falling
    back to the best-effort beam.  Rates are floored at zero before
    averaging unless floor=False.
    """
    if outage_policy not in ("transmit", "no-noise", "zero-rate", "resample"):
        raise ValueError(f"unknown outage policy {outage_policy!r}")
    channel_cfg = model or ChannelModel()
    if m is None:
        m, _ = optimal_m_search(
            cfg.n,
            algo=algo,
            model=channel_cfg,
            trials=m_search_trials or trials,
            seed=_as_tuple(seed) + (1,),
            threads=threads,
        )
    partitioner = make_partitioner(algo) if isinstance(algo, str) else algo
    sizes = _chunk_sizes(trials, CHUNK_TRIALS)
    p_total = cfg.power

    def run(c: int):
        rng = substream(_as_tuple(seed) + (0,), c)
        B = sizes[c]
        h1 = sample_channel_block(B, cfg.n, channel_cfg, rng)
        h2 = sample_channel_block(B, cfg.n, channel_cfg, rng)
        G = sample_channel_block(B * cfg.n_e, cfg.n, channel_cfg, rng).reshape(
            B, cfg.n_e, cfg.n
        )
        r1 = np.empty(B)
        r2 = np.empty(B)
        out_flags = np.zeros(B, dtype=bool)
        for t in range(B):
            attempts = 3 if outage_policy == "resample" else 1
            w = None
            part = None
            for _ in range(attempts):
                part = partitioner(h1[t], m, rng)
                res = spzf_two_user(h1[t], h2[t], part)
                if res.success:
                    w = res.w
                    break
            out_flags[t] = w is None
            if out_flags[t]:
                if outage_policy == "zero-rate":
                    r1[t] = 0.0
                    r2[t] = 0.0
                    continue
                if outage_policy in ("transmit", "resample"):
                    w = best_effort_beamformer(h1[t], h2[t], part)
            v1 = message_beamformer(h1[t])
            v2 = message_beamformer(h2[t])
            r1[t] = secrecy_rate_sample(h1[t], G[t], v1, w, p_total, cfg.noise_chains).rate
            r2[t] = secrecy_rate_sample(h2[t], G[t], v2, w, p_total, cfg.noise_chains).rate
        if floor:
            r1 = np.maximum(r1, 0.0)
            r2 = np.maximum(r2, 0.0)
        return r1, r2, out_flags

    parts = _map_chunks(run, len(sizes), threads)
    r1 = np.concatenate([p[0] for p in parts])
    r2 = np.concatenate([p[1] for p in parts])
    outages = np.concatenate([p[2] for p in parts])
    rmin = np.minimum(r1, r2)
    est = SecrecyEstimate(
        rate_user1=_mean_estimate(r1),
        rate_user2=_mean_estimate(r2),
        rate_min=_mean_estimate(rmin),
        outage=OutageEstimate.from_counts(int(outages.sum()), trials),
        m=m,
        trials=trials,
    )
    if full_output:
        return est, {"rate_user1": r1, "rate_user2": r2, "rate_min": rmin, "outage": outages}
    return est
