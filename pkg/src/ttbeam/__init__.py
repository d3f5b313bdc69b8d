"""ttbeam: min/max search for tensors in tensor-train format.

The central objects are :class:`TTTensor` (a chain of three-way cores)
and the beam search :func:`optima_tt` / :func:`optima_tt_max`, which
approximate the extreme elements of a train by keeping, mode after mode,
the ``k`` partial multi-indices whose squared tensor mass is largest.
Around them the package provides the train arithmetic the search needs
(:func:`tt_add`, :func:`tt_dif`, :func:`tt_const`, :func:`tt_orth`),
exact marginals and sampling of the squared train, classic benchmark
functions on Chebyshev grids, a dense brute-force oracle for testing,
and a seeded experiment CLI (``ttbeam``).

All public multi-indices are one-based; see :mod:`ttbeam.tensor`.
"""

from . import kernels
from .benchmarks import (
    BENCHMARK_NAMES,
    Benchmark,
    GridSpec,
    discretize_full,
    explicit_cores,
    get_benchmark,
    list_benchmarks,
    nearest_grid_index,
    tt_svd,
)
from .errors import BudgetExceededError, RankChainError, ZeroMassError
from .optima import (
    DEFAULT_BEAM_WIDTH,
    CandidateSet,
    OptimaResult,
    join_first_indices,
    optima_tt,
    optima_tt_max,
    optima_tt_max_bidir,
    split_joined_index,
    top_k,
)
from .probability import (
    MarginalTable,
    beam_marginal_check,
    prefix_marginal,
    sample,
)
from .serialization import (
    deserialize,
    from_json,
    load,
    save,
    serialize,
    to_json,
)
from .tensor import (
    FULL_ELEMENT_BUDGET,
    TTTensor,
    gram_residual,
    tt_add,
    tt_const,
    tt_dif,
    tt_orth,
    tt_random,
)

__version__ = "0.1.0"

backend = kernels.backend

__all__ = [
    "BENCHMARK_NAMES",
    "Benchmark",
    "BudgetExceededError",
    "CandidateSet",
    "DEFAULT_BEAM_WIDTH",
    "FULL_ELEMENT_BUDGET",
    "GridSpec",
    "MarginalTable",
    "OptimaResult",
    "RankChainError",
    "TTTensor",
    "ZeroMassError",
    "backend",
    "beam_marginal_check",
    "deserialize",
    "discretize_full",
    "explicit_cores",
    "from_json",
    "get_benchmark",
    "gram_residual",
    "join_first_indices",
    "list_benchmarks",
    "load",
    "nearest_grid_index",
    "optima_tt",
    "optima_tt_max",
    "optima_tt_max_bidir",
    "prefix_marginal",
    "sample",
    "save",
    "serialize",
    "split_joined_index",
    "to_json",
    "top_k",
    "tt_add",
    "tt_const",
    "tt_dif",
    "tt_orth",
    "tt_random",
    "tt_svd",
]
