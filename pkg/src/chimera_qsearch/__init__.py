"""Continuous-time quantum spatial search on chimera graphs."""

from .analysis import SweepConfig, family_sweep, filter_records, fit_alpha, per_order_minima
from .evolution import CostParams, SearchProblem, build_setup, cost, success_probability
from .families import FamilySpec, RegressionFit, fit_loglog
from .graph import ChimeraParams, Graph, build_chimera, marked_vertex, max_degree, spectral_norm
from .optimizer import NelderMeadConfig, OptimumRecord, nelder_mead, qss_optimization, time_upperbound
from .spectral import ConditionMetrics, centralize, condition_metrics, eigendecompose, metric_scaling

__all__ = [
    "ChimeraParams", "Graph", "build_chimera", "marked_vertex", "max_degree", "spectral_norm",
    "eigendecompose", "centralize", "condition_metrics", "metric_scaling", "ConditionMetrics",
    "CostParams", "SearchProblem", "build_setup", "success_probability", "cost",
    "NelderMeadConfig", "OptimumRecord", "nelder_mead", "qss_optimization", "time_upperbound",
    "FamilySpec", "RegressionFit", "fit_loglog",
    "SweepConfig", "family_sweep", "filter_records", "per_order_minima", "fit_alpha",
]
