"""Linear programming: exact simplex, MWU soft solver, streaming LP."""

from .lpio import LPFormatError, format_lp, parse_lp, read_lp, write_lp
from .mwu_lp import (
    BracketExhausted,
    GuessRejected,
    MwuLpResult,
    MwuLpState,
    lp_binary_search,
    lp_width,
    mwu_iterations,
    mwu_lp_solve,
    objective_range,
    two_party_lp,
)
from .simplex import InfeasibleError, LinearProgram, LPError, LPSolution, UnboundedError, simplex_solve
from .streaming import (
    PassBudgetExhausted,
    SampleAndPruneLP,
    StreamAdapterConfig,
    StreamingAlgorithm,
    count_violations,
    multipass_lp_violate,
    run_monolithic,
    split_stream,
    stream_to_distributed,
)

__all__ = [
    "BracketExhausted",
    "GuessRejected",
    "InfeasibleError",
    "LPError",
    "LPFormatError",
    "LPSolution",
    "LinearProgram",
    "MwuLpResult",
    "MwuLpState",
    "PassBudgetExhausted",
    "SampleAndPruneLP",
    "StreamAdapterConfig",
    "StreamingAlgorithm",
    "UnboundedError",
    "count_violations",
    "format_lp",
    "lp_binary_search",
    "lp_width",
    "multipass_lp_violate",
    "mwu_iterations",
    "mwu_lp_solve",
    "objective_range",
    "parse_lp",
    "read_lp",
    "run_monolithic",
    "simplex_solve",
    "split_stream",
    "stream_to_distributed",
    "two_party_lp",
    "write_lp",
]
