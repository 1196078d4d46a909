"""Symmetric eigendecomposition and fast-search condition metrics.

The metrics are evaluated on the centralized Hamiltonian ``H1 = a*A + b*I``
whose top eigenvalue is 1 and whose remaining spectrum is symmetric about
zero (``lambda_2 = -lambda_n``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .families import FamilySpec, RegressionFit, fit_loglog
from .graph import ChimeraParams, build_chimera, marked_vertex

__all__ = [
    "EigenSystem",
    "CentralizedHamiltonian",
    "ConditionMetrics",
    "eigendecompose",
    "centralize",
    "condition_metrics",
    "graph_metrics",
    "family_metrics",
    "metric_scaling",
    "METRIC_FIELDS",
]

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray  # descending
    vectors: np.ndarray  # column i pairs with values[i]

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude component positive; argmax picks the lowest index on ties
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def eigendecompose(matrix) -> EigenSystem:
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.T, rtol=0.0, atol=SYMMETRY_TOL):
        raise ValueError("matrix is not symmetric")
    values, vectors = np.linalg.eigh(a)
    # eigh is ascending; stable descending sort keeps original order inside ties
    order = np.argsort(-values, kind="stable")
    return EigenSystem(values[order], _fix_signs(vectors[:, order]))


@dataclass(frozen=True)
class CentralizedHamiltonian:
    a: float
    b: float
    base: EigenSystem

    @property
    def values(self) -> np.ndarray:
        return self.a * self.base.values + self.b

    @property
    def vectors(self) -> np.ndarray:
        return self.base.vectors


def centralize(es: EigenSystem) -> CentralizedHamiltonian:
    """Affine map ``a*mu + b`` sending mu_1 -> 1 and mu_2, mu_n -> +-Delta."""
    mu = es.values
    if mu.shape[0] < 2:
        raise ValueError("need at least two eigenvalues")
    mu1, mu2, mun = float(mu[0]), float(mu[1]), float(mu[-1])
    if mu1 - mu2 <= 1e-10 * max(1.0, abs(mu1)):
        raise ValueError("top eigenvalue is degenerate; centralization is ill-defined")
    a = 2.0 / (2.0 * mu1 - mu2 - mun)
    b = -a * (mu2 + mun) / 2.0
    return CentralizedHamiltonian(a, b, es)


@dataclass(frozen=True)
class ConditionMetrics:
    """Spectral quantities of the centralized Hamiltonian at one marked vertex.

    ``delta`` is the spectral gap ``1 - lambda_2``; ``bulk_radius`` is
    ``max(|lambda_2|, |lambda_n|)``, the bound on the non-leading spectrum
    (``delta + bulk_radius == 1`` after centralization).
    """

    n: int
    delta: float
    bulk_radius: float
    epsilon: float
    r: float
    nu: float

    @property
    def sqrt_epsilon(self) -> float:
        return math.sqrt(self.epsilon)

    @property
    def condition_ratio(self) -> float:
        """``r*Delta / (nu*sqrt(eps))``; the fast-search condition asks for this to be large."""
        return self.r * self.delta / (self.nu * self.sqrt_epsilon)

    @property
    def efficiency_estimate(self) -> float:
        return 1.0 / (self.sqrt_epsilon * self.nu**3)


METRIC_FIELDS = ("delta", "bulk_radius", "sqrt_epsilon", "nu", "r", "condition_ratio", "efficiency_estimate")


def condition_metrics(ch: CentralizedHamiltonian, w: int) -> ConditionMetrics:
    lam = ch.values
    n = lam.shape[0]
    if not 0 <= w < n:
        raise ValueError(f"marked vertex {w} outside [0, {n})")
    overlaps = ch.vectors[w, :] ** 2
    gaps = 1.0 - lam[1:]
    if np.any(np.abs(gaps) < 1e-12):
        raise ValueError("eigenvalue 1 is repeated; graph is disconnected")
    weights = overlaps[1:]
    r = float(np.sum(weights / gaps))
    nu = r / float(np.sum(weights / gaps**2))
    return ConditionMetrics(
        n=n,
        delta=float(1.0 - lam[1]),
        bulk_radius=float(max(abs(lam[1]), abs(lam[-1]))),
        epsilon=float(overlaps[0]),
        r=r,
        nu=nu,
    )


def graph_metrics(params: ChimeraParams) -> ConditionMetrics:
    g = build_chimera(params)
    ch = centralize(eigendecompose(g.adjacency))
    return condition_metrics(ch, marked_vertex(params))


def family_metrics(
    family: FamilySpec, size_cap: int | None = None
) -> list[tuple[int, ChimeraParams, ConditionMetrics]]:
    """Condition metrics for every member of ``family``, sorted by graph order."""
    rows = [(i, p, graph_metrics(p)) for i, p in family.members(size_cap)]
    return sorted(rows, key=lambda row: row[1].n)


def metric_scaling(
    family: FamilySpec, metric: str, size_cap: int | None = None, rows=None
) -> RegressionFit:
    """Power-law fit of one metric (a name from ``METRIC_FIELDS``) against graph order."""
    if metric not in METRIC_FIELDS:
        raise ValueError(f"unknown metric {metric!r}")
    if rows is None:
        rows = family_metrics(family, size_cap)
    return fit_loglog([m.n for _, _, m in rows], [getattr(m, metric) for _, _, m in rows])
