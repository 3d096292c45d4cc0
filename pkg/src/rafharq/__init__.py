"""Rich-feedback HARQ link simulator: non-binary LDPC coding with
multiplicative repetition, q-ary belief propagation, an explicit device
energy model, baseline feedback policies, and a DQN feedback agent."""

from .galois import GaloisField
from .ldpc import (
    MotherCode,
    binary_example_code,
    construct_mother_code,
    encode,
    is_codeword,
    mr_multipliers,
    mr_symbols,
    puncture,
    syndrome,
)
from .bpdec import DecodeResult, TannerGraph, bp_decode, combine_retransmission, entropy_bits
from .phy import Modulation, apply_channel, snr_to_sigma2
from .protocol import EnergyModel, LinkSimulator, derive_ps, naive_normalizer, round_energy
from .experiments import (
    ResultRow,
    appendix_demo,
    build_simulator,
    discounted_objective,
    evaluate,
    grid_search,
    lifetime_gain_months,
    pareto_frontier,
)

__all__ = [
    "GaloisField", "MotherCode", "binary_example_code", "construct_mother_code",
    "encode", "is_codeword", "mr_multipliers", "mr_symbols", "puncture", "syndrome",
    "DecodeResult", "TannerGraph", "bp_decode", "combine_retransmission", "entropy_bits",
    "Modulation", "apply_channel", "snr_to_sigma2",
    "EnergyModel", "LinkSimulator", "derive_ps", "naive_normalizer", "round_energy",
    "ResultRow", "appendix_demo", "build_simulator", "discounted_objective",
    "evaluate", "grid_search", "lifetime_gain_months", "pareto_frontier",
]

__version__ = "0.1.0"
