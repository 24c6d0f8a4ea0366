"""Markovian sliced Wasserstein distances, their baselines, and applications."""

from .distances import DistanceSpec
from .exact_ot import brute_force_wasserstein, exact_wasserstein
from .flow import FlowConfig, FlowTrace, make_s_shape, run_flow
from .gradients import grad_direction, grad_supports
from .max_sw import AscentConfig, max_ksw, max_sw
from .measure import EmpiricalMeasure, ProjectedMeasure, project, validate
from .msw import (InputAwareDeterministic, InputAwareVmf, MswConfig, OrthogonalBased, RandomWalk,
                  estimator_variance_report, msw_estimate, msw_estimate_burn_thin, sample_chain)
from .ot1d import wasserstein_1d, wasserstein_1d_pth_power
from .sw import ksw, sw

__all__ = [
    "AscentConfig", "DistanceSpec", "EmpiricalMeasure", "FlowConfig", "FlowTrace", "InputAwareDeterministic",
    "InputAwareVmf", "MswConfig", "OrthogonalBased", "ProjectedMeasure", "RandomWalk", "brute_force_wasserstein",
    "estimator_variance_report", "exact_wasserstein", "grad_direction", "grad_supports", "ksw",
    "make_s_shape", "max_ksw", "max_sw", "msw_estimate", "msw_estimate_burn_thin", "project", "run_flow",
    "sample_chain", "sw", "validate", "wasserstein_1d", "wasserstein_1d_pth_power",
]
