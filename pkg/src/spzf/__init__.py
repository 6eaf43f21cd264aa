"""Constant-modulus artificial-noise beamforming via successive partition zero-forcing."""

from .beamforming import (
    OutageReport,
    SpzfSolution,
    compose_beamformer,
    feasible_m_chains,
    feasible_m_range,
    reduced_channel,
    solve_two_user,
    spzf_general,
    spzf_two_user,
    verify_zero_forcing,
)
from .channels import (
    ChannelModel,
    array_response,
    sample_channel,
    sample_channel_block,
    sample_eve_matrix,
    sample_geometric,
    sample_rayleigh,
    substream,
)
from .metrics import (
    MeanEstimate,
    OutageEstimate,
    RateSample,
    SecrecyConfig,
    SecrecyEstimate,
    TwoUserOutage,
    estimate_outage_two_user,
    estimate_secrecy_rate,
    fray_approx,
    fray_empirical,
    message_beamformer,
    optimal_m_search,
    random_partition_outage_closed_form,
    secrecy_rate_sample,
)
from .partition import (
    GeneticConfig,
    Partition,
    genetic_partition,
    iterative_partition,
    iterative_partition_fc,
    loss,
    make_partitioner,
    partition_matrix,
    pseudo_loss,
    random_partition,
    set_distance,
)
from .polygon import (
    InfeasibleSetError,
    closure_residual,
    greedy_three_partition,
    polygon_distance,
    polygon_solver,
    satisfies_polygon_inequality,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelModel",
    "GeneticConfig",
    "InfeasibleSetError",
    "MeanEstimate",
    "OutageEstimate",
    "OutageReport",
    "Partition",
    "RateSample",
    "SecrecyConfig",
    "SecrecyEstimate",
    "SpzfSolution",
    "TwoUserOutage",
    "array_response",
    "closure_residual",
    "compose_beamformer",
    "estimate_outage_two_user",
    "estimate_secrecy_rate",
    "feasible_m_chains",
    "feasible_m_range",
    "fray_approx",
    "fray_empirical",
    "genetic_partition",
    "greedy_three_partition",
    "iterative_partition",
    "iterative_partition_fc",
    "loss",
    "make_partitioner",
    "message_beamformer",
    "optimal_m_search",
    "partition_matrix",
    "polygon_distance",
    "polygon_solver",
    "pseudo_loss",
    "random_partition",
    "random_partition_outage_closed_form",
    "reduced_channel",
    "sample_channel",
    "sample_channel_block",
    "sample_eve_matrix",
    "sample_geometric",
    "sample_rayleigh",
    "satisfies_polygon_inequality",
    "secrecy_rate_sample",
    "set_distance",
    "solve_two_user",
    "spzf_general",
    "spzf_two_user",
    "substream",
    "verify_zero_forcing",
]
