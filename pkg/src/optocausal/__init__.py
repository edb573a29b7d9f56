"""Causal response and output nonclassicality of a linearized optomechanical cavity."""
from ._kernels import BACKEND
from .causality import (ComplexRootSet, FrequencyWindow, KernelCheck, Verdict, causality_verdict,
                        kernel_check, numerator_cubic, perturbative_gcrt, solve_roots)
from .nonclassical import NonclassicalityResult, measure_nonclassicality
from .params import Sidedness, StabilityThresholds, SystemParams, fig2_params, make_params, pt_thresholds
from .response import (ProbeResponse, SlabParameters, eps_over_mu, reflect_transmit,
                       response_coefficient, slab_retrieval)
from .steady import SingleModeMoments, cavity_moments, steady_state
from .sweep import (CriticalReport, SweepRecord, critical_report, find_critical_classical,
                    find_critical_nonclassical, sweep_g)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ComplexRootSet", "CriticalReport", "FrequencyWindow", "KernelCheck",
    "NonclassicalityResult", "ProbeResponse", "Sidedness", "SingleModeMoments",
    "SlabParameters", "StabilityThresholds", "SweepRecord", "SystemParams", "Verdict",
    "causality_verdict", "cavity_moments", "critical_report", "eps_over_mu", "fig2_params",
    "find_critical_classical", "find_critical_nonclassical", "kernel_check", "make_params",
    "measure_nonclassicality", "numerator_cubic", "perturbative_gcrt", "pt_thresholds",
    "reflect_transmit", "response_coefficient", "slab_retrieval", "solve_roots",
    "steady_state", "sweep_g",
]
