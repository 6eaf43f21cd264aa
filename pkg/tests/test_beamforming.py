"""Successive zero-forcing tests.

The zero-forcing claim is verified by evaluating h_k^T w directly, which is
an oracle independent of how the stages built w.
"""
import numpy as np
import pytest

from spzf.beamforming import (
    OutageReport,
    SpzfSolution,
    best_effort_beamformer,
    compose_beamformer,
    feasible_m_chains,
    feasible_m_range,
    reduced_channel,
    spzf_general,
    spzf_two_user,
    verify_zero_forcing,
)
from spzf.channels import sample_rayleigh, substream
from spzf.partition import Partition, random_partition
from spzf.polygon import polygon_solver


def feasible_pair(seed, n=9, m=3):
    """Deterministic (h1, h2, partition) with a succeeding two-user solve."""
    k = 0
    while True:
        rng = substream(seed, k)
        h1 = sample_rayleigh(n, 1.0, rng)
        h2 = sample_rayleigh(n, 1.0, rng)
        part = random_partition(n, m, rng)
        if isinstance(spzf_two_user(h1, h2, part), SpzfSolution):
            return h1, h2, part
        k += 1


class TestReducedChannel:
    def test_single_set_zero_phases(self):
        h2 = np.array([1 + 1j, 2.0, -3j])
        part = Partition(np.zeros(3, dtype=np.int64), 1)
        y = reduced_channel(h2, part, np.zeros(3))
        assert np.allclose(y, [h2.sum()])

    def test_blocks_of_three_match_per_set_sums(self):
        k = 0
        while True:
            rng = substream(30, k)
            h1 = sample_rayleigh(9, 1.0, rng)
            h2 = sample_rayleigh(9, 1.0, rng)
            blocks = [np.abs(h1[i : i + 3]) for i in (0, 3, 6)]
            if all(2 * b.max() <= b.sum() for b in blocks):
                break
            k += 1
        part = Partition(np.repeat(np.arange(3), 3), 3)
        phases = np.concatenate([polygon_solver(h1[i : i + 3]) for i in (0, 3, 6)])
        y = reduced_channel(h2, part, phases)
        rotated = h2 * np.exp(1j * phases)
        expected = [rotated[0:3].sum(), rotated[3:6].sum(), rotated[6:9].sum()]
        assert np.allclose(y, expected)

    def test_dimension_mismatch(self):
        part = Partition(np.zeros(3, dtype=np.int64), 1)
        with pytest.raises(ValueError):
            reduced_channel(np.ones(4, dtype=complex), part, np.zeros(3))

    def test_reduced_entries_have_pooled_variance(self):
        # Fixed stage-one operator, fresh second channels: each reduced entry
        # should carry the pooled variance of its set (n/m entries).
        rng = substream(31)
        n, m, trials = 30, 5, 20_000
        h1 = sample_rayleigh(n, 1.0, rng)
        while True:
            part = random_partition(n, m, rng)
            res = [np.abs(h1[part.assignment == l]) for l in range(m)]
            if all(2 * r.max() - r.sum() <= 0 for r in res):
                break
            h1 = sample_rayleigh(n, 1.0, rng)
        phases = np.zeros(n)
        for l in range(m):
            idx = np.flatnonzero(part.assignment == l)
            phases[idx] = polygon_solver(h1[idx])
        H2 = (rng.standard_normal((trials, n)) + 1j * rng.standard_normal((trials, n))) / np.sqrt(2)
        rot = np.exp(1j * phases)
        B = np.zeros((m, n))
        B[part.assignment, np.arange(n)] = 1.0
        Y = (H2 * rot) @ B.T
        power = np.mean(np.abs(Y) ** 2, axis=0)
        assert np.all(np.abs(power - n / m) < 0.1 * n / m)


class TestTwoUser:
    def test_feasible_instance(self):
        h1, h2, part = feasible_pair(32)
        res = spzf_two_user(h1, h2, part)
        assert isinstance(res, SpzfSolution)
        assert np.max(np.abs(np.abs(res.w) - 1)) < 1e-12
        assert np.all(res.residuals <= 1e-9)
        assert np.all(verify_zero_forcing(res.w, [h1, h2]) <= 1e-9)

    def test_dominant_singleton_is_stage_one_failure(self):
        h1 = np.array([5.0, 1.0, 1.0, 1.0], dtype=complex)
        h2 = np.ones(4, dtype=complex)
        part = Partition(np.array([0, 1, 1, 1]), 2)
        res = spzf_two_user(h1, h2, part)
        assert isinstance(res, OutageReport)
        assert res.outcome == "e1" and res.failing_stage == 1

    def test_pair_sets_force_stage_two_failure(self):
        # Two anti-phase pairs zero-force h1, but the reduced vector then has
        # two generically unequal entries, which cannot close.
        h1 = np.array([1.0, -1.0, 2.0, -2.0], dtype=complex)
        h2 = np.array([0.3 + 1j, -0.7, 1.5j, 0.2], dtype=complex)
        part = Partition(np.array([0, 0, 1, 1]), 2)
        res = spzf_two_user(h1, h2, part)
        assert isinstance(res, OutageReport)
        assert res.outcome == "e2" and res.failing_stage == 2

    def test_closure_on_many_random_successes(self):
        successes = 0
        for k in range(400):
            rng = substream(33, k)
            h1 = sample_rayleigh(12, 1.0, rng)
            h2 = sample_rayleigh(12, 1.0, rng)
            part = random_partition(12, 3, rng)
            res = spzf_two_user(h1, h2, part)
            if isinstance(res, SpzfSolution):
                successes += 1
                assert np.all(res.residuals <= 1e-9)
        assert successes > 100

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            spzf_two_user(
                np.ones(4, dtype=complex),
                np.ones(5, dtype=complex),
                Partition(np.array([0, 0, 1, 1]), 2),
            )


class TestCompose:
    def test_single_stage_identity(self):
        phases = np.array([0.1, 2.0, 4.0])
        part = Partition(np.arange(3), 3)
        w = compose_beamformer([part], [phases])
        assert np.allclose(w, np.exp(1j * phases))

    def test_two_stage_sum_of_phases(self):
        part1 = Partition(np.repeat(np.arange(3), 3), 3)
        part2 = Partition(np.zeros(3, dtype=np.int64), 1)
        ph1 = np.linspace(0.1, 0.9, 9)
        ph2 = np.array([0.5, 1.5, 2.5])
        w = compose_beamformer([part1, part2], [ph1, np.zeros(3)])
        assert np.allclose(w, np.exp(1j * ph1))
        w = compose_beamformer([part1, part2], [ph1, ph2])
        assert np.allclose(w, np.exp(1j * (ph1 + ph2[part1.assignment])))

    def test_unit_modulus_for_any_chain(self):
        h1, h2, part = feasible_pair(34)
        res = spzf_two_user(h1, h2, part)
        w = compose_beamformer(res.stage_partitions, res.stage_phases)
        assert np.max(np.abs(np.abs(w) - 1)) < 1e-15
        assert np.allclose(w, res.w)

    def test_dimension_chain_mismatch(self):
        part1 = Partition(np.repeat(np.arange(3), 3), 3)
        bad2 = Partition(np.zeros(2, dtype=np.int64), 1)
        with pytest.raises(ValueError):
            compose_beamformer([part1, bad2], [np.zeros(9), np.zeros(2)])


class TestVerify:
    def test_cancelling_pair(self):
        res = verify_zero_forcing(np.ones(2, dtype=complex), [[1.0, -1.0]])
        assert res[0] == pytest.approx(0.0)

    def test_aligned_pair(self):
        res = verify_zero_forcing(np.ones(2, dtype=complex), [[1.0, 1.0]])
        assert res[0] == pytest.approx(1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            verify_zero_forcing(np.ones(3, dtype=complex), [[1.0, 1.0]])


class TestGeneralK:
    def test_two_user_consistency_is_bitwise(self):
        h1, h2, part = feasible_pair(35)
        direct = spzf_two_user(h1, h2, part)
        via_general = spzf_general(
            np.vstack([h1, h2]), [part.n_sets], partitioner=lambda v, m, r: part
        )
        assert isinstance(via_general, SpzfSolution)
        assert np.array_equal(direct.w, via_general.w)
        assert np.array_equal(direct.residuals, via_general.residuals)

    def test_three_users_feasible_draws(self):
        successes = 0
        for k in range(120):
            rng = substream(36, k)
            H = np.vstack([sample_rayleigh(27, 1.0, rng) for _ in range(3)])
            res = spzf_general(H, [9, 3], partitioner="iterative", rng=rng)
            if isinstance(res, SpzfSolution):
                successes += 1
                assert res.residuals.shape == (3,)
                assert np.all(res.residuals <= 1e-9)
                assert np.max(np.abs(np.abs(res.w) - 1)) < 1e-12
        assert successes >= 5

    def test_scaling_law_rejects_small_n(self):
        H = np.ones((3, 26), dtype=complex)
        with pytest.raises(ValueError):
            spzf_general(H, [9, 3])

    def test_chain_bounds_enforced(self):
        H = np.ones((3, 27), dtype=complex)
        with pytest.raises(ValueError):
            spzf_general(H, [4, 3])  # needs m2 with 3 <= m3 <= m2/3
        with pytest.raises(ValueError):
            spzf_general(H, [9])  # wrong chain length


class TestFeasibleRanges:
    def test_two_user_range(self):
        assert feasible_m_range(9) == [3]
        assert feasible_m_range(30) == list(range(3, 11))
        assert feasible_m_range(8) == []

    def test_three_user_chains(self):
        assert feasible_m_chains(27, 3) == [(9, 3)]
        chains = feasible_m_chains(81, 3)
        assert (27, 9) in chains and (9, 3) in chains
        for m2, m3 in chains:
            assert 3 <= m3 <= m2 / 3 and 3 <= m2 <= 81 / 3


class TestBestEffort:
    def test_unit_modulus_and_minimum_leakage(self):
        h1 = np.array([5.0, 1.0, 1.0], dtype=complex)
        h2 = np.array([1.0, 1j, -1.0], dtype=complex)
        part = Partition(np.zeros(3, dtype=np.int64), 1)
        w = best_effort_beamformer(h1, h2, part)
        assert np.max(np.abs(np.abs(w) - 1)) < 1e-12
        # The single set cannot close; the best reachable |h1^T w| equals the
        # polygon distance 5 - 2 = 3.
        assert np.abs(h1 @ w) == pytest.approx(3.0, abs=1e-9)
