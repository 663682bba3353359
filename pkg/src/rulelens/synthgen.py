"""Seeded generators for the validation datasets.

All randomness comes from SplitMix64, a counter-based 64-bit generator
with fixed published constants, so a (kind, n, seed) triple yields
byte-identical CSV output on every platform. Gaussians use an inverse-CDF
rational approximation, Gamma uses Marsaglia-Tsang, Weibull inverse-CDF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dataset import Column, ColumnKind, Dataset

_GAMMA64 = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Deterministic counter-based PRNG (SplitMix64, Steele et al. 2014)."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA64) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def normal(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        u = self.uniform()
        while u <= 0.0:
            u = self.uniform()
        return mu + sigma * _inverse_normal_cdf(u)

    def gamma(self, alpha: float, theta: float) -> float:
        """Marsaglia-Tsang (2000) squeeze method."""
        if alpha < 1.0:
            u = self.uniform()
            while u <= 0.0:
                u = self.uniform()
            return self.gamma(alpha + 1.0, theta) * u ** (1.0 / alpha)
        d = alpha - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        while True:
            x = self.normal()
            v = (1.0 + c * x) ** 3
            if v <= 0.0:
                continue
            u = self.uniform()
            if u < 1.0 - 0.0331 * x**4:
                return d * v * theta
            if u > 0.0 and math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
                return d * v * theta

    def weibull(self, k: float, lam: float) -> float:
        u = self.uniform()
        while u >= 1.0 or u <= 0.0:
            u = self.uniform()
        return lam * (-math.log(1.0 - u)) ** (1.0 / k)


# Acklam's rational approximation to the standard normal quantile,
# |relative error| < 1.15e-9 over (0, 1).
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def _inverse_normal_cdf(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
                / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    if p > 1.0 - _P_LOW:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        return -((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
                 / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    q = p - 0.5
    r = q * q
    return ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
            / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))


def _continuous(name: str, values: list[float]) -> Column:
    return Column(name=name, kind=ColumnKind.CONTINUOUS, values=tuple(values),
                  minimum=min(values), maximum=max(values))


def _categorical(name: str, values: list[str]) -> Column:
    return Column(name=name, kind=ColumnKind.CATEGORICAL, values=tuple(values),
                  categories=tuple(sorted(set(values))))


def gen_sanity(n: int, seed: int) -> Dataset:
    """Three pure-noise columns plus one data column whose value is the
    target verbatim (identity map)."""
    if n < 30:
        raise ValueError("sanity dataset needs n >= 30")
    rng = SplitMix64(seed)
    rand1, rand2, rand3, data = [], [], [], []
    for _ in range(n):
        rand1.append(rng.uniform())
        rand2.append(rng.uniform())
        rand3.append(rng.uniform())
        data.append(rng.uniform())
    return Dataset(
        columns=(
            _continuous("rand1", rand1),
            _continuous("rand2", rand2),
            _continuous("rand3", rand3),
            _continuous("data", data),
            _continuous("y", list(data)),
        ),
        n=n,
    )


@dataclass(frozen=True)
class SalariesParams:
    """Generator knobs; the defaults are parameters, not ground truth.

    Females draw experience from a materially lower distribution (the
    indirect bias channel); a fraction of records gets a salary bonus for
    the third gender (the manager-preference channel).
    """

    p_male: float = 0.47
    p_female: float = 0.47  # remainder is "other"
    base_salary: float = 20_000.0
    gpa_coeff: float = 6_000.0
    reputation_coeff: float = 1_200.0
    experience_coeff: float = 1_800.0
    noise_sd: float = 2_500.0
    exp_mean: float = 14.0
    exp_sd: float = 6.0
    exp_mean_female: float = 5.0
    exp_sd_female: float = 3.5
    other_bonus_rate: float = 0.3
    other_bonus_factor: float = 1.15


def _draw_person(rng: SplitMix64, params: SalariesParams):
    u = rng.uniform()
    if u < params.p_male:
        gender = "male"
    elif u < params.p_male + params.p_female:
        gender = "female"
    else:
        gender = "other"
    gpa = 1.0 + 3.0 * rng.uniform()
    reputation = 10.0 * rng.uniform()
    if gender == "female":
        exp = rng.normal(params.exp_mean_female, params.exp_sd_female)
    else:
        exp = rng.normal(params.exp_mean, params.exp_sd)
    exp = min(max(exp, 0.0), 30.0)
    return gender, gpa, reputation, exp


def gen_biased_salaries(n: int, seed: int, params: SalariesParams = SalariesParams()) -> Dataset:
    """Salaries increase with GPA, reputation and experience; bias enters
    indirectly through the female experience distribution and directly
    through a random manager preference for the third gender."""
    if n < 100:
        raise ValueError("salaries dataset needs n >= 100")
    rng = SplitMix64(seed)
    genders, gpas, reputations, experiences, salaries = [], [], [], [], []
    for _ in range(n):
        gender, gpa, reputation, exp = _draw_person(rng, params)
        salary = (
            params.base_salary
            + params.gpa_coeff * gpa
            + params.reputation_coeff * reputation
            + params.experience_coeff * exp
            + rng.normal(0.0, params.noise_sd)
        )
        bonus_draw = rng.uniform()
        if gender == "other" and bonus_draw < params.other_bonus_rate:
            salary *= params.other_bonus_factor
        genders.append(gender)
        gpas.append(gpa)
        reputations.append(reputation)
        experiences.append(exp)
        salaries.append(max(salary, 1_000.0))
    return Dataset(
        columns=(
            _categorical("Gender", genders),
            _continuous("GPA", gpas),
            _continuous("UniversityReputation", reputations),
            _continuous("Experience", experiences),
            _continuous("Salary", salaries),
        ),
        n=n,
    )


def gen_skewed_salaries(n: int, seed: int, mu: float = 50_000.0, sd: float = 10_000.0,
                        params: SalariesParams = SalariesParams()) -> Dataset:
    """Same independent columns as the biased salaries set, but salary
    depends on gender only: Weibull for men, Gamma for everyone else,
    moment-matched so means and variances agree across groups."""
    if n < 500:
        raise ValueError("skewed salaries dataset needs n >= 500")
    matched = match_moments(mu, sd * sd)
    alpha, theta = matched["gamma"]
    k, lam = matched["weibull"]
    rng = SplitMix64(seed)
    genders, gpas, reputations, experiences, salaries = [], [], [], [], []
    for _ in range(n):
        gender, gpa, reputation, exp = _draw_person(rng, params)
        if gender == "male":
            salary = rng.weibull(k, lam)
        else:
            salary = rng.gamma(alpha, theta)
        genders.append(gender)
        gpas.append(gpa)
        reputations.append(reputation)
        experiences.append(exp)
        salaries.append(salary)
    return Dataset(
        columns=(
            _categorical("Gender", genders),
            _continuous("GPA", gpas),
            _continuous("UniversityReputation", reputations),
            _continuous("Experience", experiences),
            _continuous("Salary", salaries),
        ),
        n=n,
    )


def match_moments(mu: float, var: float) -> dict:
    """Gamma and Weibull parameters sharing the given mean and variance.

    Gamma is closed-form. The Weibull shape solves the coefficient-of-
    variation equation CV^2 = Gamma(1+2/k)/Gamma(1+1/k)^2 - 1 by bisection.
    """
    if mu <= 0 or var <= 0:
        raise ValueError("mu and var must be > 0")
    cv2 = var / (mu * mu)

    def residual(k: float) -> float:
        g1 = math.lgamma(1.0 + 1.0 / k)
        g2 = math.lgamma(1.0 + 2.0 / k)
        return math.exp(g2 - 2.0 * g1) - 1.0 - cv2

    lo, hi = 0.1, 50.0
    f_lo, f_hi = residual(lo), residual(hi)
    if f_lo * f_hi > 0:
        raise ValueError("coefficient of variation %g outside solvable bracket" % math.sqrt(cv2))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = residual(mid)
        if f_lo * f_mid <= 0:
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
        if abs(f_mid) < 1e-10 * max(cv2, 1.0) and (hi - lo) < 1e-12 * mid:
            break
    k = 0.5 * (lo + hi)
    lam = mu / math.exp(math.lgamma(1.0 + 1.0 / k))
    return {"gamma": (mu * mu / var, var / mu), "weibull": (k, lam)}


GENERATORS = {
    "sanity": gen_sanity,
    "salaries": gen_biased_salaries,
    "salaries-skew": gen_skewed_salaries,
}
