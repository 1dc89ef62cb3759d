"""Thermal-average Monte Carlo over uniform spherical ensembles, with oracles.

A thermal average at inverse temperature beta is a ratio of two integrals
over the unit sphere of wavefunction amplitudes,

    [F]_beta = E[F(phi) exp(-f(phi))] / E[exp(-f(phi))],

where the expectation is over the uniform sphere measure and f is the
model's weight exponent.  Every observable and exponent here depends on
the wavefunction only through its state weights w_n = |phi_n|^2, and the
uniform sphere measure (complex amplitudes, so two real coordinates per
state) induces exactly the flat Dirichlet law on w.  The integrals are
therefore estimated on the simplex directly.

Models whose exponent is linear in w (plain and entropy-weighted
symmetric-state models, and the full chain) write their weight as
exp(phi . w) and get a rate-tilted Dirichlet importance proposal:
w = e / sum(e) with independent e_n ~ Exp(1 + c_n), where
c = max(phi) - phi >= 0 is the decay form of the exponent.  The proposal
density on the simplex is proportional to prod(lam_n) / (lam . w)^K with
lam_n = 1 + c_n and K cells, and since lam . w = 1 + c . w the log
importance weight collapses to a scalar function of v = c . w:

    log w = -v + K log(1 + v) + const,

which peaks at v = K - 1, exactly the shell where the tilted proposal
concentrates, so the weight effective sample size stays a healthy
fraction of the budget up to beta*N of order 10^4.  beta = 0 gives c = 0,
which is exactly uniform sampling.  The full-chain model enumerates 2^N
states, capping N at 20.

The wavefunction-energy model's exponent is quadratic in w (it rewards
m^2), and its mass sits in two antipodal magnetized caps rather than in
one linear-exponent shell, so no single tilt of the above family covers
it.  It gets an equal mixture of two angular Gaussians on the amplitude
sphere, one tilted toward each cap, built from the tangent linearization
m^2 >= 2|m| - 1: component fields +-2*omega*g_n - (omega-1)*g_n^2 (times
beta*N), scaled to keep inverse variances positive.  The mixture density
is evaluated exactly for the importance weight, and the construction
stays flip-symmetric, reducing to the uniform measure at beta = 0.  At
large beta*N this keeps the effective sample size usable at small N; for
wider systems the guard below refuses honestly.

Estimator plumbing shared by all models:

  * ratio of weighted sums with a delta-method standard error,
        SE^2 = (sum w^2 (F - R)^2) / (sum w)^2;
  * per-shard partial sums carry their own max-shift and are merged in
    fixed shard order with a running rescale, so results are bit-identical
    for any worker count and invariant under adding a constant to f;
  * an effective-sample-size guard on the weight sums: below ESS_MIN the
    estimate is refused rather than reported, because collapsed weights
    produce silently garbage means;
  * spin-flip symmetry (n -> N-n, or global flip of the chain) holds for
    every model exponent, and every public observable is even under it, so
    the symmetrized estimator is applied analytically: magnetization
    enters only through |m| and m^2, and the internal signed-magnetization
    check is identically zero.

Closed-form oracles: the infinite-temperature second moment of the
magnetization from exact uniform-sphere moments, and a product-form model
whose partition function and dispersion term are evaluated by direct
enumeration of all 2^N spin configurations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import FULL_N_MAX, chain_tables, g_values, log_binomials
from .errors import DegenerateWeights, InvalidParams
from .parallel import map_shards, shard_rng, split_counts

MODELS = ("SQUIM_d1", "SCWM", "SCWM_WFE", "SCWM_ENTROPY")
OBSERVABLES = ("msq", "m_abs", "magnetized_fraction", "dispersion")

SHARDS_DEFAULT = 64
ESS_MIN = 100.0
# Batch rows are sized so one chunk stays around 32 MB of draws even for
# the widest state spaces.
CHUNK_SCALARS = 1 << 22


@dataclass(frozen=True)
class EnsembleConfig:
    """A thermal-average job: model, size, temperature, and sampling budget."""

    N: int
    beta: float
    model: str
    samples: int
    omega: float | None = None
    eps: float = 0.0
    seed: int = 0
    workers: int = 1
    shards: int = SHARDS_DEFAULT

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise InvalidParams(f"unknown model {self.model!r}, want one of {MODELS}")
        if self.N < 2:
            raise InvalidParams(f"need N >= 2, got {self.N}")
        if self.model == "SQUIM_d1" and self.N > FULL_N_MAX:
            raise InvalidParams(
                f"SQUIM_d1 enumerates 2^N states, capped at N={FULL_N_MAX}"
            )
        if not self.beta >= 0.0:
            raise InvalidParams(f"need beta >= 0, got {self.beta}")
        if self.samples < 1:
            raise InvalidParams(f"need samples >= 1, got {self.samples}")
        if self.model == "SCWM_WFE":
            if self.omega is None:
                raise InvalidParams("SCWM_WFE requires omega")
            if not self.omega >= 0.0:
                raise InvalidParams(f"need omega >= 0, got {self.omega}")
        elif self.omega is not None:
            raise InvalidParams(f"omega is only meaningful for SCWM_WFE, got model {self.model!r}")
        if not 0.0 <= self.eps <= 1.0:
            raise InvalidParams(f"magnetized-fraction threshold must be in [0, 1], got {self.eps}")
        if self.seed < 0:
            raise InvalidParams(f"need seed >= 0, got {self.seed}")
        if self.workers < 1 or self.shards < 1:
            raise InvalidParams("workers and shards must be >= 1")


@dataclass(frozen=True)
class McEstimate:
    """A ratio estimate with its delta-method error bar."""

    mean: float
    std_error: float
    n_samples: int
    numerator_ess: float

    def __post_init__(self) -> None:
        if not self.std_error >= 0.0:
            raise InvalidParams(f"need std_error >= 0, got {self.std_error}")
        if self.n_samples <= 0:
            raise InvalidParams(f"need n_samples > 0, got {self.n_samples}")


@dataclass(frozen=True)
class EsmResult:
    """Enumerated product-form model: log partition and dispersion term."""

    logZhat: float
    msq_dispersion: float
    N: int
    beta: float

    def __post_init__(self) -> None:
        if not self.msq_dispersion >= 0.0:
            raise InvalidParams(
                f"need msq_dispersion >= 0, got {self.msq_dispersion}"
            )


def _shard_partials(shard: int, payload: dict) -> tuple:
    """(max_logw, T0, T1, T2, T1sq, Tcross) for one shard, self-shifted.

    T0 = sum w, T1 = sum w F, T2 = sum w^2, T1sq = sum w^2 F^2,
    Tcross = sum w^2 F, all with w = exp(logw - max_logw).
    """
    count = payload["counts"][shard]
    if count == 0:
        return (-np.inf, 0.0, 0.0, 0.0, 0.0, 0.0)
    rng = shard_rng(payload["seed"], shard)
    model = payload["model"]
    observable = payload["observable"]
    n_spins = payload["N"]
    beta = payload["beta"]
    shift = payload["energy_shift"]

    if model == "SCWM_WFE":
        dim = 2 * (n_spins + 1)
        g = g_values(n_spins)
        gsq = g * g
        omega = payload["omega"]
        field_p = beta * n_spins * (2.0 * omega * g - (omega - 1.0) * gsq)
        field_m = beta * n_spins * (-2.0 * omega * g - (omega - 1.0) * gsq)
        scale = 1.0 / (1.0 + 2.0 * max(field_p.max(), field_m.max(), 0.0) / dim)
        alpha_p = 1.0 - 2.0 * scale * field_p / dim
        alpha_m = 1.0 - 2.0 * scale * field_m / dim
        sig_p = 1.0 / np.sqrt(alpha_p)
        sig_m = 1.0 / np.sqrt(alpha_m)
        # log |Sigma|^(-1/2) per component; each state owns two coords
        logdet_p = float(np.sum(np.log(alpha_p)))
        logdet_m = float(np.sum(np.log(alpha_m)))
        cells = n_spins + 1
    else:
        # weight exponent linear in the state weights: exp(phi . w)
        if model == "SQUIM_d1":
            cells = 2**n_spins
            m_conf, interaction, _flips = chain_tables(n_spins)
            g = 2.0 * m_conf / n_spins
            gsq = g * g
            # f = beta * <H> = -beta * <I>
            phi = beta * interaction
        else:
            cells = n_spins + 1
            g = g_values(n_spins)
            gsq = g * g
            phi = beta * n_spins * gsq
            if model == "SCWM_ENTROPY":
                phi = phi + log_binomials(n_spins)
        c_decay = phi.max() - phi
        lam = 1.0 + c_decay

    rows = max(1, CHUNK_SCALARS // cells)
    run_max = -np.inf
    t0 = t1 = t2 = t1sq = tcross = 0.0
    done = 0
    while done < count:
        m = min(rows, count - done)
        done += m
        if model == "SCWM_WFE":
            pick = rng.random(m) < 0.5
            sig = np.where(pick[:, None], sig_p, sig_m)
            a = rng.standard_normal((m, cells)) * sig
            b = rng.standard_normal((m, cells)) * sig
            w_amp = a * a + b * b
            w_amp /= w_amp.sum(axis=1, keepdims=True)
            mag = w_amp @ g
            ssq = w_amp @ gsq
            disp = ssq - mag * mag
            f = beta * n_spins * (1.0 - mag * mag + (omega - 1.0) * disp)
            lq_p = logdet_p - 0.5 * dim * np.log(w_amp @ alpha_p)
            lq_m = logdet_m - 0.5 * dim * np.log(w_amp @ alpha_m)
            logw = -(f + shift) - np.logaddexp(lq_p, lq_m)
        else:
            w_amp = rng.standard_exponential((m, cells))
            w_amp /= lam
            w_amp /= w_amp.sum(axis=1, keepdims=True)
            mag = w_amp @ g
            ssq = w_amp @ gsq
            v = w_amp @ c_decay
            logw = -(v + shift) + cells * np.log1p(v)

        if observable == "msq":
            fval = mag * mag
        elif observable == "m_abs":
            fval = np.abs(mag)
        elif observable == "magnetized_fraction":
            fval = (np.abs(mag) >= payload["eps"]).astype(float)
        elif observable == "dispersion":
            fval = ssq - mag * mag
        else:  # m_signed: identically zero once flip-symmetrized
            fval = np.zeros_like(mag)

        chunk_max = float(np.max(logw))
        new_max = max(run_max, chunk_max)
        w = np.exp(logw - new_max)
        if run_max > -np.inf and new_max != run_max:
            r = math.exp(run_max - new_max)
            t0 *= r
            t1 *= r
            t2 *= r * r
            t1sq *= r * r
            tcross *= r * r
        run_max = new_max
        wsq = w * w
        t0 += float(np.sum(w))
        t1 += float(w @ fval)
        t2 += float(np.sum(wsq))
        t1sq += float(wsq @ (fval * fval))
        tcross += float(wsq @ fval)
    return (run_max, t0, t1, t2, t1sq, tcross)


def thermal_average(
    cfg: EnsembleConfig, observable: str, energy_shift: float = 0.0
) -> McEstimate:
    """Estimate [observable]_beta for the configured model.

    energy_shift adds a constant to the weight exponent before
    exponentiation; the ratio cancels it analytically (the per-shard
    max-shift absorbs it exactly), so it exists as a validation hook.

    Raises DegenerateWeights when the weight effective sample size
    (sum w)^2 / sum w^2 falls below ESS_MIN.
    """
    if observable not in OBSERVABLES and observable != "m_signed":
        raise InvalidParams(
            f"unknown observable {observable!r}, want one of {OBSERVABLES}"
        )
    payload = {
        "counts": split_counts(cfg.samples, cfg.shards),
        "seed": cfg.seed,
        "model": cfg.model,
        "observable": observable,
        "N": cfg.N,
        "beta": cfg.beta,
        "omega": cfg.omega,
        "eps": cfg.eps,
        "energy_shift": energy_shift,
    }
    parts = map_shards(_shard_partials, payload, cfg.shards, cfg.workers)

    run_max = -np.inf
    t0 = t1 = t2 = t1sq = tcross = 0.0
    for p_max, p0, p1, p2, p1sq, pcross in parts:
        if p_max == -np.inf:
            continue
        new_max = max(run_max, p_max)
        if run_max > -np.inf and new_max != run_max:
            r = math.exp(run_max - new_max)
            t0 *= r
            t1 *= r
            t2 *= r * r
            t1sq *= r * r
            tcross *= r * r
        rs = math.exp(p_max - new_max)
        t0 += p0 * rs
        t1 += p1 * rs
        t2 += p2 * rs * rs
        t1sq += p1sq * rs * rs
        tcross += pcross * rs * rs
        run_max = new_max

    denom_ess = t0 * t0 / t2 if t2 > 0.0 else 0.0
    if denom_ess < ESS_MIN:
        raise DegenerateWeights(
            f"weight ESS {denom_ess:.1f} < {ESS_MIN:.0f} at beta={cfg.beta}, "
            f"N={cfg.N}, model={cfg.model}; raise samples or lower beta*N"
        )
    mean = t1 / t0
    var = (t1sq - 2.0 * mean * tcross + mean * mean * t2) / (t0 * t0)
    std_error = math.sqrt(max(var, 0.0))
    numerator_ess = t1 * t1 / t1sq if t1sq > 0.0 else 0.0
    return McEstimate(
        mean=mean,
        std_error=std_error,
        n_samples=cfg.samples,
        numerator_ess=numerator_ess,
    )


def infinite_T_msq_exact(n_spins: int) -> float:
    """Exact [m^2] at beta = 0 from uniform-sphere moments.

    With d = 2(N+1) real coordinates, E[u_j^2] = 3/(d(d+2)) and
    E[u_j u_k] = 1/(d(d+2)); each state weight joins two coordinates, so
    E[w_n^2] = 8/(d(d+2)) and E[w_n w_k] = 4/(d(d+2)).  Since sum_n g_n = 0
    the cross terms collapse and [m^2] = (c1 - c2) sum_n g_n^2.
    """
    if n_spins < 2:
        raise InvalidParams(f"need N >= 2, got {n_spins}")
    dim = 2 * (n_spins + 1)
    c1 = 8.0 / (dim * (dim + 2))
    c2 = 4.0 / (dim * (dim + 2))
    g = g_values(n_spins)
    return (c1 - c2) * float(g @ g)


def esm_evaluate(n_spins: int, beta: float) -> EsmResult:
    """Product-form model by enumeration of all 2^N chain configurations.

    Zhat = prod_S 1/(1 + E_S / a_N) with a_N = 2*2^N and E_S = beta times
    the adjacent-flip count of S (the nonnegative-energy convention), and
    the dispersion term is (1/a_N^2) sum_S M_S^2 / (1 + E_S/a_N)^2.  The
    companion first-moment term vanishes exactly: complementing all spins
    maps index S to 2^N-1-S, negates M_S, and preserves E_S, so the sum
    cancels in exact pairs (asserted below).
    """
    if not 2 <= n_spins <= FULL_N_MAX:
        raise InvalidParams(f"need 2 <= N <= {FULL_N_MAX}, got {n_spins}")
    if not beta >= 0.0:
        raise InvalidParams(f"need beta >= 0, got {beta}")
    a_n = 2.0 * 2**n_spins
    m_conf, _interaction, flips = chain_tables(n_spins)
    ratio = beta * flips / a_n
    log_zhat = -float(np.sum(np.log1p(ratio)))
    denom = 1.0 + ratio
    first = m_conf / denom
    assert np.all(first + first[::-1] == 0.0)
    msq_dispersion = float(np.sum((m_conf / denom) ** 2)) / (a_n * a_n)
    return EsmResult(
        logZhat=log_zhat, msq_dispersion=msq_dispersion, N=n_spins, beta=beta
    )
