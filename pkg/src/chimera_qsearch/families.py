"""Chimera graph families and log-log power-law regression."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import ChimeraParams

__all__ = ["FAMILY_NAMES", "FamilySpec", "RegressionFit", "fit_loglog", "parse_range"]

FAMILY_NAMES = ("local", "global", "grid-quadratic", "balanced", "cell-quadratic")
_NEEDS_FIXED = {"local", "global"}


@dataclass(frozen=True)
class FamilySpec:
    """A sequence of square chimera graphs indexed by ``i``.

    local(l): chi(i, i, l); global(k): chi(k, k, i); grid-quadratic: chi(i^2, i^2, i);
    balanced: chi(i, i, i); cell-quadratic: chi(i, i, i^2).
    """

    name: str
    indices: tuple[int, ...]
    fixed: int | None = None

    def __post_init__(self) -> None:
        if self.name not in FAMILY_NAMES:
            raise ValueError(f"unknown family {self.name!r}; expected one of {FAMILY_NAMES}")
        if self.name in _NEEDS_FIXED:
            if self.fixed is None or self.fixed < 1:
                raise ValueError(f"family {self.name!r} needs a positive fixed parameter")
        elif self.fixed is not None:
            raise ValueError(f"family {self.name!r} takes no fixed parameter")
        if not self.indices or min(self.indices) < 1:
            raise ValueError("indices must be positive integers")
        object.__setattr__(self, "indices", tuple(sorted(set(int(i) for i in self.indices))))

    @classmethod
    def from_range(cls, name: str, start: int, stop: int, fixed: int | None = None) -> FamilySpec:
        """Inclusive index range ``start..stop``."""
        return cls(name, tuple(range(start, stop + 1)), fixed)

    @property
    def label(self) -> str:
        return f"{self.name}({self.fixed})" if self.fixed is not None else self.name

    def params(self, i: int) -> ChimeraParams:
        if self.name == "local":
            return ChimeraParams(i, i, self.fixed)
        if self.name == "global":
            return ChimeraParams(self.fixed, self.fixed, i)
        if self.name == "grid-quadratic":
            return ChimeraParams(i * i, i * i, i)
        if self.name == "balanced":
            return ChimeraParams(i, i, i)
        return ChimeraParams(i, i, i * i)

    def members(self, size_cap: int | None = None) -> list[tuple[int, ChimeraParams]]:
        """``(i, params)`` pairs in index order, dropping graphs with more than ``size_cap`` vertices."""
        out = []
        for i in self.indices:
            p = self.params(i)
            if size_cap is None or p.n <= size_cap:
                out.append((i, p))
        return out


@dataclass(frozen=True)
class RegressionFit:
    """Least-squares line ``log y = intercept + slope * log n``."""

    slope: float
    intercept: float
    r2: float
    points: tuple[tuple[float, float], ...] = field(repr=False)
    residuals: tuple[float, ...] = field(repr=False, default=())

    @property
    def n_points(self) -> int:
        return len(self.points)


def fit_loglog(orders, values) -> RegressionFit:
    """Ordinary least squares of ``ln(values)`` against ``ln(orders)`` (at least 3 points)."""
    x = np.log(np.asarray(orders, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    if x.shape != y.shape:
        raise ValueError("orders and values differ in length")
    if x.size < 3:
        raise ValueError(f"need at least 3 points for a fit, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("orders and values must be positive and finite")
    if np.ptp(x) == 0:
        raise ValueError("need at least two distinct orders")
    design = np.column_stack([np.ones_like(x), x])
    (intercept, slope), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - (intercept + slope * x)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return RegressionFit(
        slope=float(slope),
        intercept=float(intercept),
        r2=r2,
        points=tuple(zip(x.tolist(), y.tolist())),
        residuals=tuple(resid.tolist()),
    )


def parse_range(text: str) -> tuple[int, int]:
    """Parse ``"2..6"`` (inclusive) or a single ``"4"``."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        start, stop = int(lo), int(hi)
    else:
        start = stop = int(text)
    if start < 1 or stop < start:
        raise ValueError(f"bad range {text!r}")
    return start, stop

