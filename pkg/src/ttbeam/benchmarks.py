"""Benchmark functions on Chebyshev grids, and builders for their trains.

Provides the ten classic global-optimization test functions used by the
experiment runner, a Gauss-Lobatto grid specification mapping grid
indices to coordinates, dense discretization, a TT-SVD compressor for
small dimensions, and exact closed-form train constructors for the five
functions whose structure permits them (products and sums of univariate
terms give rank 1 and rank 2; their combination gives rank 3).

Definitions, domains, and known minima follow the standard forms:

===========  ====================  =======================================
name         domain                global minimum
===========  ====================  =======================================
Ackley       [-32.768, 32.768]^d   f(0) = 0
Alpine       [-10, 10]^d           f(0) = 0
Dixon        [-10, 10]^d           f(x*) = 0, x*_i = 2^(-(2^i - 2) / 2^i)
Exponential  [-1, 1]^d             f(0) = -1
Griewank     [-600, 600]^d         f(0) = 0
Michalewicz  [0, pi]^d             no closed form for general d
Qing         [-500, 500]^d         f(x*) = 0, x*_i = sqrt(i)
Rastrigin    [-5.12, 5.12]^d       f(0) = 0
Schaffer     [-100, 100]^d         f(0) = 0           (the F7 chain form)
Schwefel     [-500, 500]^d         f(x*) ~= 0, x*_i = 420.96874622750...
===========  ====================  =======================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import BudgetExceededError
from .tensor import FULL_ELEMENT_BUDGET, TTTensor, tt_add

_SCHWEFEL_OFFSET = 418.9828872724339
_SCHWEFEL_ARGMIN = 420.968746359982025


# ----------------------------------------------------------------------
# Grids
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Per-mode Chebyshev-Gauss-Lobatto discretization of a box.

    Mode ``m`` covers ``[lower[m], upper[m]]`` with ``sizes[m]`` nodes at

        x_i = (a + b) / 2 + (b - a) / 2 * cos(pi * (i - 1) / (n - 1))

    for one-based ``i``, so node 1 sits on the upper endpoint, node ``n``
    on the lower, and the nodes are symmetric about the box center.
    """

    lower: tuple
    upper: tuple
    sizes: tuple

    def __post_init__(self):
        if not len(self.lower) == len(self.upper) == len(self.sizes):
            raise ValueError("lower, upper, and sizes must have equal length")
        for a, b, n in zip(self.lower, self.upper, self.sizes):
            if not a < b:
                raise ValueError(f"need lower < upper, got [{a}, {b}]")
            if n < 2:
                raise ValueError(f"need at least 2 nodes per mode, got {n}")

    @classmethod
    def uniform(cls, d: int, lower: float, upper: float, n: int) -> "GridSpec":
        """The same interval and node count in every one of ``d`` modes."""
        return cls(
            lower=(float(lower),) * d,
            upper=(float(upper),) * d,
            sizes=(int(n),) * d,
        )

    @property
    def ndim(self) -> int:
        return len(self.sizes)

    def nodes(self, mode: int) -> np.ndarray:
        """Node coordinates of one-based ``mode``, upper endpoint first."""
        a, b, n = self.lower[mode - 1], self.upper[mode - 1], self.sizes[mode - 1]
        theta = np.pi * np.arange(n) / (n - 1)
        return (a + b) / 2 + (b - a) / 2 * np.cos(theta)

    def points(self, idx) -> np.ndarray:
        """Coordinates of one-based multi-indices, shape ``(..., d)``."""
        idx = np.asarray(idx, dtype=np.int64)
        if idx.shape[-1] != self.ndim:
            raise ValueError(f"expected trailing axis of length {self.ndim}")
        out = np.empty(idx.shape, dtype=np.float64)
        for m in range(self.ndim):
            nodes = self.nodes(m + 1)
            j = idx[..., m]
            if np.any(j < 1) or np.any(j > self.sizes[m]):
                raise ValueError(f"index out of range 1..{self.sizes[m]} in mode {m + 1}")
            out[..., m] = nodes[j - 1]
        return out


# ----------------------------------------------------------------------
# Benchmark registry
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class Benchmark:
    """A named multivariate test function with its domain and optimum.

    ``fn`` evaluates a batch of points of shape ``(..., d)``.  When
    ``exact_min`` is True, ``fn(min_point)`` equals ``min_value`` to
    high accuracy; otherwise the recorded optimum is approximate (or
    unknown, in which case ``min_point`` is None).  ``explicit_tt``
    builds the exact discretized train on a grid, for the functions
    whose structure permits it.
    """

    name: str
    dim: int
    lower: float
    upper: float
    fn: Callable[[np.ndarray], np.ndarray]
    min_point: Optional[np.ndarray]
    min_value: Optional[float]
    exact_min: bool
    explicit_tt: Optional[Callable[[GridSpec], TTTensor]] = None

    def grid(self, n: int) -> GridSpec:
        """Uniform Gauss-Lobatto grid over this benchmark's box."""
        return GridSpec.uniform(self.dim, self.lower, self.upper, n)


def _ackley(x):
    d = x.shape[-1]
    rms = np.sqrt((x**2).sum(axis=-1) / d)
    cos_mean = np.cos(2 * np.pi * x).sum(axis=-1) / d
    return -20.0 * np.exp(-0.2 * rms) - np.exp(cos_mean) + 20.0 + np.e


def _alpine(x):
    return np.abs(x * np.sin(x) + 0.1 * x).sum(axis=-1)


def _dixon(x):
    i = np.arange(2, x.shape[-1] + 1, dtype=np.float64)
    head = (x[..., 0] - 1.0) ** 2
    return head + (i * (2.0 * x[..., 1:] ** 2 - x[..., :-1]) ** 2).sum(axis=-1)


def _exponential(x):
    return -np.exp(-0.5 * (x**2).sum(axis=-1))


def _griewank(x):
    i = np.arange(1, x.shape[-1] + 1, dtype=np.float64)
    return (x**2).sum(axis=-1) / 4000.0 - np.cos(x / np.sqrt(i)).prod(axis=-1) + 1.0


def _michalewicz(x):
    i = np.arange(1, x.shape[-1] + 1, dtype=np.float64)
    return -(np.sin(x) * np.sin(i * x**2 / np.pi) ** 20).sum(axis=-1)


def _qing(x):
    i = np.arange(1, x.shape[-1] + 1, dtype=np.float64)
    return ((x**2 - i) ** 2).sum(axis=-1)


def _rastrigin(x):
    return 10.0 * x.shape[-1] + (x**2 - 10.0 * np.cos(2 * np.pi * x)).sum(axis=-1)


def _schaffer(x):
    s = np.sqrt(x[..., :-1] ** 2 + x[..., 1:] ** 2)
    term = np.sqrt(s) * (np.sin(50.0 * s**0.2) + 1.0)
    return (term.mean(axis=-1)) ** 2


def _schwefel(x):
    return _SCHWEFEL_OFFSET * x.shape[-1] - (
        x * np.sin(np.sqrt(np.abs(x)))
    ).sum(axis=-1)


def _dixon_argmin(d):
    i = np.arange(1, d + 1, dtype=np.float64)
    return 2.0 ** (-(2.0**i - 2.0) / 2.0**i)


_SPECS = {
    "ackley": (_ackley, -32.768, 32.768, lambda d: np.zeros(d), 0.0, True),
    "alpine": (_alpine, -10.0, 10.0, lambda d: np.zeros(d), 0.0, True),
    "dixon": (_dixon, -10.0, 10.0, _dixon_argmin, 0.0, True),
    "exponential": (_exponential, -1.0, 1.0, lambda d: np.zeros(d), -1.0, True),
    "griewank": (_griewank, -600.0, 600.0, lambda d: np.zeros(d), 0.0, True),
    "michalewicz": (_michalewicz, 0.0, np.pi, None, None, False),
    "qing": (_qing, -500.0, 500.0, lambda d: np.sqrt(np.arange(1, d + 1)), 0.0, True),
    "rastrigin": (_rastrigin, -5.12, 5.12, lambda d: np.zeros(d), 0.0, True),
    "schaffer": (_schaffer, -100.0, 100.0, lambda d: np.zeros(d), 0.0, True),
    "schwefel": (
        _schwefel,
        -500.0,
        500.0,
        lambda d: np.full(d, _SCHWEFEL_ARGMIN),
        0.0,
        False,  # argmin known only numerically; optimum is ~0, not exactly 0
    ),
}

_ALIASES = {
    "grienwank": "griewank",
    "dixon-price": "dixon",
    "alpine1": "alpine",
    "schaffer-f7": "schaffer",
    "schwefel-2.26": "schwefel",
}

#: Canonical registry order (alphabetical, as in the experiment tables).
BENCHMARK_NAMES = (
    "Ackley",
    "Alpine",
    "Dixon",
    "Exponential",
    "Griewank",
    "Michalewicz",
    "Qing",
    "Rastrigin",
    "Schaffer",
    "Schwefel",
)


def _canonical(name: str) -> str:
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    if key not in _SPECS:
        raise KeyError(
            f"unknown benchmark {name!r}; known: {', '.join(BENCHMARK_NAMES)}"
        )
    return key


def get_benchmark(name: str, d: int) -> Benchmark:
    """Instantiate a registered benchmark for dimension ``d`` by name.

    Name lookup is case-insensitive and accepts the common aliases
    (e.g. ``Grienwank`` for Griewank, ``Dixon-Price`` for Dixon).
    """
    key = _canonical(name)
    fn, lower, upper, argmin, fmin, exact = _SPECS[key]
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    point = None if argmin is None else np.asarray(argmin(d), dtype=np.float64)
    return Benchmark(
        name=key.capitalize(),
        dim=d,
        lower=lower,
        upper=upper,
        fn=fn,
        min_point=point,
        min_value=fmin,
        exact_min=exact,
        explicit_tt=(
            (lambda grid, _key=key: explicit_cores(_key, grid))
            if key in _EXPLICIT_BUILDERS
            else None
        ),
    )


def list_benchmarks(d: int) -> list[Benchmark]:
    """All ten registered benchmarks, instantiated for dimension ``d``."""
    return [get_benchmark(name, d) for name in BENCHMARK_NAMES]


# ----------------------------------------------------------------------
# Discretization
# ----------------------------------------------------------------------


def discretize_full(
    bench: Benchmark,
    grid: GridSpec,
    element_budget: int = FULL_ELEMENT_BUDGET,
    chunk: int = 1 << 19,
) -> np.ndarray:
    """Dense array of the benchmark evaluated at every grid point.

    Evaluation is chunked so the coordinate matrix never materializes in
    full; only the result array of ``prod(sizes)`` doubles is allocated.
    """
    if grid.ndim != bench.dim:
        raise ValueError(f"grid has {grid.ndim} modes, benchmark has {bench.dim}")
    total = math.prod(grid.sizes)
    if total > element_budget:
        raise BudgetExceededError(
            f"grid has {total} points, budget is {element_budget}"
        )
    nodes = [grid.nodes(m + 1) for m in range(grid.ndim)]
    out = np.empty(total, dtype=np.float64)
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        multi = np.unravel_index(np.arange(lo, hi), grid.sizes)
        coords = np.stack(
            [nodes[m][multi[m]] for m in range(grid.ndim)], axis=-1
        )
        out[lo:hi] = bench.fn(coords)
    return out.reshape(grid.sizes)


def nearest_grid_index(grid: GridSpec, x) -> np.ndarray:
    """One-based multi-index of the grid point closest to ``x``, per mode.

    Equidistant ties go to the lower index.  ``x`` must lie inside the
    grid's box.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != grid.ndim:
        raise ValueError(f"expected a point of dimension {grid.ndim}")
    out = np.empty(grid.ndim, dtype=np.int64)
    for m in range(grid.ndim):
        if not grid.lower[m] <= x[m] <= grid.upper[m]:
            raise ValueError(
                f"coordinate {x[m]} outside [{grid.lower[m]}, {grid.upper[m]}] "
                f"in mode {m + 1}"
            )
        out[m] = int(np.argmin(np.abs(grid.nodes(m + 1) - x[m]))) + 1
    return out


# ----------------------------------------------------------------------
# Train builders
# ----------------------------------------------------------------------


def tt_svd(full, rel_tol: float = 1e-10) -> TTTensor:
    """Compress a dense array into a train by sequential truncated SVD.

    At each unfolding, singular values are dropped from the tail while
    the discarded squared mass stays below ``(rel_tol * ||full||_F)^2 /
    (d - 1)``, which guarantees a total Frobenius reconstruction error of
    at most ``rel_tol * ||full||_F``.
    """
    full = np.asarray(full, dtype=np.float64)
    shape = full.shape
    d = full.ndim
    if d == 1:
        return TTTensor([full[None, :, None]])
    delta_sq = (rel_tol * np.linalg.norm(full.reshape(-1))) ** 2 / (d - 1)
    cores = []
    w = full
    r = 1
    for i in range(d - 1):
        w = w.reshape(r * shape[i], -1)
        u, s, vt = np.linalg.svd(w, full_matrices=False)
        tail = np.concatenate([np.cumsum((s**2)[::-1])[::-1], [0.0]])
        rank = max(1, int(np.argmax(tail <= delta_sq)))
        cores.append(u[:, :rank].reshape(r, shape[i], rank))
        w = s[:rank, None] * vt[:rank]
        r = rank
    cores.append(w.reshape(r, shape[-1], 1))
    return TTTensor(cores, copy=False)


def _product_cores(grid: GridSpec, factor, negate: bool) -> TTTensor:
    """Rank-1 train of ``prod_i factor(x_i, i)``, optionally negated."""
    cores = []
    for m in range(grid.ndim):
        g = factor(grid.nodes(m + 1), m + 1)
        cores.append(np.ascontiguousarray(g[None, :, None]))
    if negate:
        cores[-1] = -cores[-1]
    return TTTensor(cores, copy=False)


def _sum_cores(grid: GridSpec, term) -> TTTensor:
    """Rank-2 train of ``sum_i term(x_i, i)`` via the running-sum construction.

    The first core carries ``[g_1(x), 1]``, interior cores the transfer
    blocks ``[[1, 0], [g_i(x), 1]]``, and the last core ``[1, g_d(x)]``,
    so the chain product accumulates the sum exactly.
    """
    d = grid.ndim
    terms = [term(grid.nodes(m + 1), m + 1) for m in range(d)]
    if d == 1:
        return TTTensor([terms[0][None, :, None]])
    first = np.zeros((1, grid.sizes[0], 2))
    first[0, :, 0] = terms[0]
    first[0, :, 1] = 1.0
    cores = [first]
    for m in range(1, d - 1):
        block = np.zeros((2, grid.sizes[m], 2))
        block[0, :, 0] = 1.0
        block[1, :, 0] = terms[m]
        block[1, :, 1] = 1.0
        cores.append(block)
    last = np.zeros((2, grid.sizes[d - 1], 1))
    last[0, :, 0] = 1.0
    last[1, :, 0] = terms[d - 1]
    cores.append(last)
    return TTTensor(cores, copy=False)


def _explicit_exponential(grid: GridSpec) -> TTTensor:
    return _product_cores(grid, lambda x, i: np.exp(-0.5 * x**2), negate=True)


def _explicit_qing(grid: GridSpec) -> TTTensor:
    return _sum_cores(grid, lambda x, i: (x**2 - i) ** 2)


def _explicit_rastrigin(grid: GridSpec) -> TTTensor:
    return _sum_cores(grid, lambda x, i: x**2 - 10.0 * np.cos(2 * np.pi * x) + 10.0)


def _explicit_schwefel(grid: GridSpec) -> TTTensor:
    return _sum_cores(
        grid, lambda x, i: _SCHWEFEL_OFFSET - x * np.sin(np.sqrt(np.abs(x)))
    )


def _explicit_griewank(grid: GridSpec) -> TTTensor:
    # Folding the +1 into the additive terms keeps the sum part at rank 2,
    # so adding the rank-1 product part yields rank 3 overall.
    d = grid.ndim
    sum_part = _sum_cores(grid, lambda x, i: x**2 / 4000.0 + 1.0 / d)
    prod_part = _product_cores(
        grid, lambda x, i: np.cos(x / np.sqrt(i)), negate=True
    )
    return tt_add(sum_part, prod_part)


_EXPLICIT_BUILDERS = {
    "exponential": _explicit_exponential,
    "griewank": _explicit_griewank,
    "qing": _explicit_qing,
    "rastrigin": _explicit_rastrigin,
    "schwefel": _explicit_schwefel,
}


def explicit_cores(name: str, grid: GridSpec) -> TTTensor:
    """Exact train of a benchmark's grid discretization, in closed form.

    Available for Exponential (rank 1), Griewank (rank 3), Qing,
    Rastrigin, and Schwefel (rank 2); accepts the same aliases as
    :func:`get_benchmark`.
    """
    key = _canonical(name)
    builder = _EXPLICIT_BUILDERS.get(key)
    if builder is None:
        raise KeyError(
            f"no explicit train construction for {name!r}; available: "
            f"{', '.join(sorted(_EXPLICIT_BUILDERS))}"
        )
    return builder(grid)
