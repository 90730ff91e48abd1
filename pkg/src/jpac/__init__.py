"""Joint power and admission control via non-convex lq approximation deflation."""

from .network import (
    NetworkInstance,
    NormalizedProblem,
    normalize,
    restrict,
    select_alpha,
    sinr,
    spectral_radius,
)
from .scenario import ScenarioConfig, generate
from .kernel import (
    AugmentedProblem,
    KktCertificate,
    MultistartResult,
    SolverConfig,
    augment,
    interior_point_default,
    interior_point_random,
    multistart_solve,
    round_to_power,
    solve_potential_reduction,
)
from .admission import (
    AdmissionResult,
    admissible,
    foschini_miljanic,
    min_power_allocation,
    necessary_condition,
    postprocess,
    preprocess,
    removal_candidate,
    run_lqmd,
    run_nlpd,
)
from .oracle import EnumerationResult, enumerate_l0, estimate_qbar, lp_exact

__all__ = [
    "NetworkInstance", "NormalizedProblem", "normalize", "restrict",
    "select_alpha", "sinr", "spectral_radius",
    "ScenarioConfig", "generate",
    "AugmentedProblem", "KktCertificate", "MultistartResult", "SolverConfig",
    "augment", "interior_point_default", "interior_point_random",
    "multistart_solve", "round_to_power", "solve_potential_reduction",
    "AdmissionResult", "admissible", "foschini_miljanic",
    "min_power_allocation", "necessary_condition", "postprocess",
    "preprocess", "removal_candidate", "run_lqmd", "run_nlpd",
    "EnumerationResult", "enumerate_l0", "estimate_qbar", "lp_exact",
]
