"""Loss multipliers (psi functions) and mean/sigma-parametrized VaR and CVaR.

A risk value is always of the form  -mu + psi(u) * sigma, where psi
depends only on the tail level u, the distribution family, and the risk
measure.  The T multipliers carry the sqrt((nu-2)/nu) factor that
normalizes the standard T to unit variance, so Gaussian and T numbers are
comparable like for like.
"""

import math
from dataclasses import dataclass

from .special import check_probability, gauss_pdf, gauss_quantile, log_gamma
from .tquantile import t_quantile

__all__ = [
    "GAUSSIAN",
    "STUDENT_T",
    "VAR",
    "CVAR",
    "RiskSpec",
    "MomentParams",
    "psi",
    "k_function",
    "value_at_risk",
    "conditional_value_at_risk",
    "total_kurtosis",
]

GAUSSIAN = "gaussian"
STUDENT_T = "student-t"
VAR = "var"
CVAR = "cvar"


@dataclass(frozen=True)
class RiskSpec:
    """Distribution family x risk measure selecting one psi function."""
    distribution: str = GAUSSIAN
    measure: str = VAR
    nu: float | None = None

    def __post_init__(self):
        if self.distribution not in (GAUSSIAN, STUDENT_T):
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.measure not in (VAR, CVAR):
            raise ValueError(f"unknown measure {self.measure!r}")
        if self.distribution == STUDENT_T:
            if self.nu is None:
                raise ValueError("student-t spec requires nu")
            if not (self.nu > 2.0):
                raise ValueError(
                    f"student-t risk requires nu > 2 for a finite variance, got {self.nu}")
        elif self.nu is not None:
            raise ValueError("nu is only meaningful for student-t")

    def with_measure(self, measure: str) -> "RiskSpec":
        return RiskSpec(self.distribution, measure, self.nu)


@dataclass(frozen=True)
class MomentParams:
    """Per-period mean and standard deviation."""
    mu: float
    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0.0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")


def _check_loss_tail(u: float) -> float:
    check_probability(u)
    if u >= 0.5:
        raise ValueError(f"loss-tail level must satisfy u < 1/2, got {u}")
    return u


def k_function(t: float, nu: float) -> float:
    """Tail-integral kernel for the T CVaR.

    k(t,nu) = nu^(nu/2) Gamma((nu-1)/2) (nu+t^2)^((1-nu)/2)
              / (2 sqrt(pi) Gamma(nu/2)),
    computed in log space since nu^(nu/2) overflows near nu ~ 300.
    """
    if not (nu > 1.0):
        raise ValueError(f"k_function requires nu > 1, got {nu}")
    log_k = 0.5 * nu * math.log(nu) + log_gamma(0.5 * (nu - 1.0)) \
        + 0.5 * (1.0 - nu) * math.log(nu + t * t) \
        - math.log(2.0) - 0.5 * math.log(math.pi) - log_gamma(0.5 * nu)
    return math.exp(log_k)


def psi(spec: RiskSpec, u: float) -> float:
    """Loss multiplier psi(u) for the given distribution/measure pair."""
    _check_loss_tail(u)
    if spec.distribution == GAUSSIAN:
        if spec.measure == VAR:
            return -gauss_quantile(u)
        return gauss_pdf(gauss_quantile(u)) / u
    nu = spec.nu
    scale = math.sqrt((nu - 2.0) / nu)
    q = t_quantile(u, nu)
    if spec.measure == VAR:
        return -scale * q
    return scale * k_function(q, nu) / u


def value_at_risk(m: MomentParams, spec: RiskSpec, u: float) -> float:
    """VaR at tail level u for a distribution with the given moments."""
    return -m.mu + psi(spec.with_measure(VAR), u) * m.sigma


def conditional_value_at_risk(m: MomentParams, spec: RiskSpec, u: float) -> float:
    """CVaR (expected shortfall) at tail level u."""
    return -m.mu + psi(spec.with_measure(CVAR), u) * m.sigma


def total_kurtosis(nu: float) -> float:
    """Kurtosis 3 + 6/(nu-4) of the T family; undefined for nu <= 4."""
    if not (nu > 4.0):
        raise ValueError(f"kurtosis requires nu > 4, got {nu}")
    return 3.0 + 6.0 / (nu - 4.0)
