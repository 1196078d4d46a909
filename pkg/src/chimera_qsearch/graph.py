"""Chimera graph construction, marked-vertex selection and basic graph queries."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "ChimeraParams",
    "Graph",
    "vertex_id",
    "vertex_coords",
    "build_chimera",
    "marked_vertex",
    "max_degree",
    "spectral_norm",
    "is_connected",
    "to_json",
    "from_json",
    "save_graph",
    "load_graph",
]

SIDE_A = 0
SIDE_B = 1


@dataclass(frozen=True)
class ChimeraParams:
    """Grid dimensions and shore size of chimera graph chi(rows, cols, shore)."""

    rows: int
    cols: int
    shore: int

    def __post_init__(self) -> None:
        for name in ("rows", "cols", "shore"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise TypeError(f"{name} must be an integer, got {value!r}")
            if value < 1:
                raise ValueError(f"{name} must be >= 1, got {value}")

    @classmethod
    def square(cls, k: int, l: int) -> ChimeraParams:
        return cls(k, k, l)

    @property
    def n(self) -> int:
        return 2 * self.rows * self.cols * self.shore

    @property
    def edge_count(self) -> int:
        r, c, s = self.rows, self.cols, self.shore
        return r * c * s * s + s * (c * (r - 1) + r * (c - 1))


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``.

    ``edges`` holds pairs ``(u, v)`` with ``u < v``, sorted lexicographically.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    params: ChimeraParams | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"invalid edge ({u}, {v}) for n={self.n}")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and set(self.edges) == set(other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        if self.edges:
            e = np.asarray(self.edges)
            a[e[:, 0], e[:, 1]] = 1.0
            a[e[:, 1], e[:, 0]] = 1.0
        a.setflags(write=False)
        return a

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(x)) for x in nbrs)

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(x) for x in self.neighbors], dtype=int)


def vertex_id(params: ChimeraParams, row: int, col: int, side: int, slot: int) -> int:
    if not (0 <= row < params.rows and 0 <= col < params.cols):
        raise ValueError(f"cell ({row}, {col}) outside {params.rows}x{params.cols} grid")
    if side not in (SIDE_A, SIDE_B) or not (0 <= slot < params.shore):
        raise ValueError(f"invalid side/slot ({side}, {slot})")
    return ((row * params.cols + col) * 2 + side) * params.shore + slot


def vertex_coords(params: ChimeraParams, vid: int) -> tuple[int, int, int, int]:
    """Inverse of :func:`vertex_id`: ``(row, col, side, slot)``."""
    if not (0 <= vid < params.n):
        raise ValueError(f"vertex {vid} outside [0, {params.n})")
    rest, slot = divmod(vid, params.shore)
    cell, side = divmod(rest, 2)
    row, col = divmod(cell, params.cols)
    return row, col, side, slot


def build_chimera(params: ChimeraParams) -> Graph:
    """Build chi(rows, cols, shore).

    Each cell is K_{shore,shore} between side A and side B. Side-A slot j is
    coupled to slot j of the cells above and below, side-B slot j to slot j
    of the cells left and right.
    """
    r, c, s = params.rows, params.cols, params.shore
    edges = []
    for row in range(r):
        for col in range(c):
            for i in range(s):
                a = vertex_id(params, row, col, SIDE_A, i)
                for j in range(s):
                    edges.append((a, vertex_id(params, row, col, SIDE_B, j)))
                if row + 1 < r:
                    edges.append((a, vertex_id(params, row + 1, col, SIDE_A, i)))
                if col + 1 < c:
                    edges.append(
                        (
                            vertex_id(params, row, col, SIDE_B, i),
                            vertex_id(params, row, col + 1, SIDE_B, i),
                        )
                    )
    edges = sorted((min(u, v), max(u, v)) for u, v in edges)
    return Graph(params.n, tuple(edges), params)


def marked_vertex(params: ChimeraParams) -> int:
    """Side-A slot 0 of the central cell ``(rows // 2, cols // 2)``."""
    return vertex_id(params, params.rows // 2, params.cols // 2, SIDE_A, 0)


def max_degree(g: Graph) -> int:
    return int(g.degrees.max()) if g.n else 0


def spectral_norm(g: Graph) -> float:
    """Largest absolute eigenvalue of the adjacency matrix."""
    from .spectral import eigendecompose

    values = eigendecompose(g.adjacency).values
    return float(max(abs(values[0]), abs(values[-1])))


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return True
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in g.neighbors[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == g.n


def to_json(g: Graph) -> dict:
    if g.params is None:
        raise ValueError("only chimera graphs carry an export format")
    return {
        "rows": g.params.rows,
        "cols": g.params.cols,
        "shore": g.params.shore,
        "n": g.n,
        "edges": [list(e) for e in g.edges],
    }


def from_json(data: dict) -> Graph:
    params = ChimeraParams(int(data["rows"]), int(data["cols"]), int(data["shore"]))
    n = int(data["n"])
    if n != params.n:
        raise ValueError(f"n={n} inconsistent with params (expected {params.n})")
    edges = tuple(sorted((min(u, v), max(u, v)) for u, v in data["edges"]))
    return Graph(n, edges, params)


def save_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(to_json(g)) + "\n")


def load_graph(path: str | Path) -> Graph:
    return from_json(json.loads(Path(path).read_text()))
