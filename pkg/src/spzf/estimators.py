"""Scikit-learn style wrappers around the partitioners and the beamformer.

Partitioning a channel vector is clustering-shaped work: fit takes the n
channel gains as samples and exposes the set assignment as `labels_`.  The
beamformer estimator fits a stacked (k, n) channel matrix and exposes the
unit-modulus vector `w_`.  All classes follow the get_params/set_params
protocol so they clone and grid-search like any other estimator.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.exceptions import NotFittedError

from ._validation import as_channel_matrix, as_channel_vector, as_generator
from .beamforming import spzf_two_user, spzf_general
from .partition import (
    GeneticConfig,
    genetic_partition,
    iterative_partition,
    loss,
    pseudo_loss,
    random_partition,
)


class _PartitionerBase(BaseEstimator, ClusterMixin):
    """Shared fit bookkeeping: labels_, pseudo_loss_, loss_."""

    def _finish(self, h, part, trace=None):
        self.labels_ = part.assignment.copy()
        self.n_sets_ = part.n_sets
        self.partition_ = part
        self.pseudo_loss_ = pseudo_loss(h, part)
        self.loss_ = loss(h, part)
        if trace is not None:
            self.trace_ = np.asarray(trace)
        return self

    def _check_fitted(self):
        if not hasattr(self, "labels_"):
            raise NotFittedError("estimator has not been fitted")


class RandomPartitioner(_PartitionerBase):
    """Uniform random split of the channel indices into n_sets sets.

    With fixed_cardinality=True (default) a random permutation is cut into
    blocks of near-equal size.
    """

    def __init__(self, n_sets=3, fixed_cardinality=True, random_state=None):
        self.n_sets = n_sets
        self.fixed_cardinality = fixed_cardinality
        self.random_state = random_state

    def fit(self, X, y=None):
        h = as_channel_vector(X)
        rng = as_generator(self.random_state)
        part = random_partition(h.size, self.n_sets, rng, fc=self.fixed_cardinality)
        return self._finish(h, part)


class IterativePartitioner(_PartitionerBase):
    """Local-search repair of failing sets, minimising the pseudo-loss."""

    def __init__(self, n_sets=3, fixed_cardinality=False, max_epochs=50, random_state=None):
        self.n_sets = n_sets
        self.fixed_cardinality = fixed_cardinality
        self.max_epochs = max_epochs
        self.random_state = random_state

    def fit(self, X, y=None):
        h = as_channel_vector(X)
        rng = as_generator(self.random_state)
        part, trace = iterative_partition(
            h,
            self.n_sets,
            rng,
            max_epochs=self.max_epochs,
            fc=self.fixed_cardinality,
            full_output=True,
        )
        self._finish(h, part, trace)
        self.n_epochs_ = len(trace) - 1
        return self


class GeneticPartitioner(_PartitionerBase):
    """Genetic search over set assignments, minimising the pseudo-loss."""

    def __init__(
        self,
        n_sets=3,
        population=None,
        elites=25,
        crossover_rate=0.85,
        mutation_rate=0.10,
        max_generations=200,
        stall_generations=30,
        random_state=None,
    ):
        self.n_sets = n_sets
        self.population = population
        self.elites = elites
        self.crossover_rate = crossover_rate
        self.mutation_rate = mutation_rate
        self.max_generations = max_generations
        self.stall_generations = stall_generations
        self.random_state = random_state

    def fit(self, X, y=None):
        h = as_channel_vector(X)
        rng = as_generator(self.random_state)
        cfg = GeneticConfig(
            population=self.population,
            elites=self.elites,
            crossover_rate=self.crossover_rate,
            mutation_rate=self.mutation_rate,
            max_generations=self.max_generations,
            stall_generations=self.stall_generations,
        )
        part, trace = genetic_partition(h, self.n_sets, rng, config=cfg, full_output=True)
        self._finish(h, part, trace)
        self.n_generations_ = len(trace) - 1
        return self


class SuccessiveZeroForcer(BaseEstimator):
    """Fit a unit-modulus beamformer that nulls every row of a channel matrix.

    X is the (k, n) stack of user channels.  For two users the first row is
    partitioned into n_sets sets by the chosen partitioner; for k > 2 pass
    set_counts with the full stage chain.  After a successful fit, `w_`
    holds the beamformer and `residuals_` the per-user relative leakage;
    a stage failure leaves `outage_` set and `w_` equal to None.
    """

    def __init__(self, partitioner=None, n_sets=3, set_counts=None, random_state=None):
        self.partitioner = partitioner
        self.n_sets = n_sets
        self.set_counts = set_counts
        self.random_state = random_state

    def _stage_partitioner(self):
        base = self.partitioner if self.partitioner is not None else IterativePartitioner()
        if isinstance(base, str):
            from .partition import make_partitioner

            return make_partitioner(base)

        def run(vec, m, rng):
            est = base.__class__(**{**base.get_params(), "n_sets": m, "random_state": rng})
            return est.fit(vec).partition_

        return run

    def fit(self, X, y=None):
        H = as_channel_matrix(X)
        k, n = H.shape
        if k < 2:
            raise ValueError("need at least two stacked channel vectors")
        rng = as_generator(self.random_state)
        fn = self._stage_partitioner()
        if k == 2 and self.set_counts is None:
            part = fn(H[0], self.n_sets, rng)
            result = spzf_two_user(H[0], H[1], part)
        else:
            counts = self.set_counts if self.set_counts is not None else [self.n_sets]
            result = spzf_general(H, counts, partitioner=fn, rng=rng)
        if result.success:
            self.w_ = result.w
            self.residuals_ = result.residuals
            self.stage_partitions_ = result.stage_partitions
            self.stage_phases_ = result.stage_phases
            self.outage_ = None
        else:
            self.w_ = None
            self.residuals_ = None
            self.stage_partitions_ = None
            self.stage_phases_ = None
            self.outage_ = result
        return self

    def transform(self, X):
        """Project channels onto the fitted beamformer: row k maps to h_k^T w."""
        if not hasattr(self, "w_"):
            raise NotFittedError("estimator has not been fitted")
        if self.w_ is None:
            raise ValueError("fit ended in outage; no beamformer available")
        H = as_channel_matrix(X)
        return H @ self.w_
