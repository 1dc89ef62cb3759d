"""Rate functionals, domain geometry, and critical-temperature bounds for
Schroedingerist spin models, with Monte Carlo cross-checks."""

__version__ = "0.1.0"

from .errors import (
    DegenerateWeights,
    HypothesisViolation,
    InsufficientCurve,
    InvalidParams,
    NearBoundary,
    NoConstraintPoints,
    NoRoot,
    OutOfThetaRange,
    SquimldError,
)
from .gecore import (
    DomainVerdict,
    KernelQ,
    QRoot,
    RateParams,
    ThetaPair,
    H_value,
    cgf_c,
    grad_c,
    h_value,
    in_domain_D,
    integral_inv_q,
    k_value,
    q_gap_from_p,
    solve_Q,
    solve_Q_detail,
)
from .ratecurves import (
    BiasedInterval,
    ConstraintSample,
    GFunctions,
    RateCurvePoint,
    biased_cdf,
    biased_sample,
    classify_theorem_two,
    compute_I1,
    compute_I1_detail,
    compute_I2,
    domain_scan,
    sample_domain_point,
)
from .wfe import (
    PStarResult,
    RareEventResult,
    WfeParams,
    a_of_x,
    admissibility_bound,
    beta_critical,
    check_hypotheses,
    p_star,
    p_star_inf,
    p_theta,
    rare_event_rate_mc,
    theta_range,
)
from .ensembles import (
    FullWavefunction,
    SymmetricWavefunction,
    chain_tables,
    classical_ising_1d,
    dispersion_sym,
    energy_cw,
    energy_squim_d1,
    entropy_weight,
    g_values,
    magnetization_sym,
    sample_sphere,
    wfe_f,
)
from .mc import (
    EnsembleConfig,
    EsmResult,
    McEstimate,
    esm_evaluate,
    infinite_T_msq_exact,
    thermal_average,
)
from .validate import CheckResult, run_validation
from .report import RunManifest
