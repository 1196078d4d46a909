"""Search Hamiltonian, success probability and penalized runtime cost.

The uniform start state and the marked vertex are both constant on the cells
of the coarsest equitable partition that isolates the marked vertex, so the
evolution never leaves the span of the normalized cell indicators. By default
the Hamiltonian is diagonalized in that quotient space, which is exact and
usually much smaller than ``n``.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .spectral import EigenSystem, eigendecompose

__all__ = [
    "DegenerateEvaluation",
    "NumericalError",
    "CostParams",
    "SearchProblem",
    "SearchSetup",
    "equitable_partition",
    "build_setup",
    "success_probability",
    "cost",
    "state_norm",
]

CLAMP_TOL = 1e-9
NORM_TOL = 1e-10
P_FLOOR = 1e-300


class NumericalError(RuntimeError):
    """Probability or norm left [0, 1] by more than round-off."""


class DegenerateEvaluation(ArithmeticError):
    """Cost requested where the success probability is numerically zero."""


@dataclass(frozen=True)
class CostParams:
    """Penalty ``t_penalty = penalty_coefficient * ln(n)``."""

    penalty_coefficient: float = 1.0

    def __post_init__(self) -> None:
        if not self.penalty_coefficient >= 0:
            raise ValueError("penalty_coefficient must be >= 0")

    def penalty(self, n: int) -> float:
        return self.penalty_coefficient * math.log(n)


def equitable_partition(g: Graph, w: int) -> np.ndarray:
    """Cell label per vertex for the coarsest equitable refinement of ``{w}, V - {w}``.

    Plain colour refinement; labels are canonical (sorted signatures), so the
    result is deterministic.
    """
    colors = np.zeros(g.n, dtype=int)
    colors[w] = 1
    count = 2 if g.n > 1 else 1
    while True:
        sigs = [
            (int(colors[v]), tuple(sorted(int(colors[u]) for u in g.neighbors[v])))
            for v in range(g.n)
        ]
        labels = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = np.array([labels[s] for s in sigs], dtype=int)
        if len(labels) == count:
            return new
        colors, count = new, len(labels)


@dataclass(frozen=True)
class SearchSetup:
    """Diagonalized search Hamiltonian for one hopping rate.

    ``spectrum`` is the eigensystem of ``H = -(gamma*A + |w><w|)`` (restricted
    to the quotient space when reduced); ``overlap_w[j]`` and ``overlap_s[j]``
    are the components of eigenvector ``j`` along the marked vertex and along
    the uniform state.
    """

    graph: Graph = field(repr=False)
    marked: int
    gamma: float
    spectrum: EigenSystem = field(repr=False)
    overlap_w: np.ndarray = field(repr=False)
    overlap_s: np.ndarray = field(repr=False)
    hamiltonian: np.ndarray = field(repr=False)
    start: np.ndarray = field(repr=False)
    reduced: bool = True

    @property
    def n(self) -> int:
        return self.graph.n


class SearchProblem:
    """A graph with a marked vertex; hands out (cached) :class:`SearchSetup` per gamma."""

    def __init__(self, graph: Graph, marked: int, reduce: bool = True, cache_size: int = 256):
        if not 0 <= marked < graph.n:
            raise ValueError(f"marked vertex {marked} outside [0, {graph.n})")
        self.graph = graph
        self.marked = marked
        self.reduce = reduce
        self.cache_size = cache_size
        self._cache: OrderedDict[float, SearchSetup] = OrderedDict()
        n = graph.n
        if reduce:
            cells = equitable_partition(graph, marked)
            m = int(cells.max()) + 1
            sizes = np.bincount(cells, minlength=m).astype(float)
            counts = np.zeros((m, m))
            if graph.edges:
                e = np.asarray(graph.edges)
                np.add.at(counts, (cells[e[:, 0]], cells[e[:, 1]]), 1.0)
                np.add.at(counts, (cells[e[:, 1]], cells[e[:, 0]]), 1.0)
            self.walk = counts / np.sqrt(np.outer(sizes, sizes))
            self.start = np.sqrt(sizes / n)
            self.marked_index = int(cells[marked])
            self.cells = cells
        else:
            self.walk = np.array(graph.adjacency)
            self.start = np.full(n, 1.0 / math.sqrt(n))
            self.marked_index = marked
            self.cells = np.arange(n)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def dim(self) -> int:
        return self.walk.shape[0]

    def hamiltonian(self, gamma: float) -> np.ndarray:
        h = -gamma * self.walk
        h[self.marked_index, self.marked_index] -= 1.0
        return h

    def setup(self, gamma: float) -> SearchSetup:
        gamma = float(gamma)
        if not gamma >= 0:
            raise ValueError(f"gamma must be >= 0, got {gamma}")
        hit = self._cache.get(gamma)
        if hit is not None:
            self._cache.move_to_end(gamma)
            return hit
        h = self.hamiltonian(gamma)
        es = eigendecompose(h)
        ow = es.vectors[self.marked_index, :].copy()
        os_ = es.vectors.T @ self.start
        for name, vec in (("marked", ow), ("start", os_)):
            total = float(vec @ vec)
            if abs(total - 1.0) > NORM_TOL:
                raise NumericalError(f"{name} overlaps sum to {total}, not 1")
        s = SearchSetup(
            graph=self.graph,
            marked=self.marked,
            gamma=gamma,
            spectrum=es,
            overlap_w=ow,
            overlap_s=os_,
            hamiltonian=h,
            start=self.start,
            reduced=self.reduce,
        )
        self._cache[gamma] = s
        if len(self._cache) > self.cache_size:
            self._cache.popitem(last=False)
        return s

    def probability(self, gamma: float, t):
        return success_probability(self.setup(gamma), t)

    def cost(self, gamma: float, t: float, cp: CostParams) -> float:
        return cost(self.setup(gamma), t, cp)


def build_setup(g: Graph, w: int, gamma: float, reduce: bool = True) -> SearchSetup:
    return SearchProblem(g, w, reduce=reduce, cache_size=1).setup(gamma)


def _clamp(p: np.ndarray) -> np.ndarray:
    if np.any(p < -CLAMP_TOL) or np.any(p > 1.0 + CLAMP_TOL):
        raise NumericalError(f"success probability outside [0, 1]: {p}")
    return np.clip(p, 0.0, 1.0)


def success_probability(s: SearchSetup, t):
    """``|<w| exp(-i t H) |psi0>|^2``; ``t`` may be a scalar or an array."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or not np.all(np.isfinite(t_arr)):
        raise ValueError("evolution time must be finite and >= 0")
    weights = s.overlap_w * s.overlap_s
    phases = np.exp(-1j * np.multiply.outer(t_arr, s.spectrum.values))
    amp = phases @ weights
    p = _clamp(amp.real**2 + amp.imag**2)
    return float(p) if p.ndim == 0 else p


def state_norm(s: SearchSetup, t: float) -> float:
    """Squared norm of the evolved state summed over the basis (should stay 1)."""
    amps = s.spectrum.vectors @ (np.exp(-1j * t * s.spectrum.values) * s.overlap_s)
    return float(np.sum(np.abs(amps) ** 2))


def cost(s: SearchSetup, t: float, cp: CostParams) -> float:
    """Penalized expected runtime ``(t + c ln n) / p(t)``."""
    p = success_probability(s, t)
    if p < P_FLOOR:
        raise DegenerateEvaluation(f"p({t}) = {p} at gamma={s.gamma}")
    return (float(t) + cp.penalty(s.n)) / p
