"""Bernoulli KL machinery and numeric generalization-bound evaluators.

Every bound is evaluated verbatim from its closed form, in natural
logarithms, with preconditions checked and recorded rather than enforced.
Vacuous values (> 1) are reported as-is so cross-bound comparisons stay
faithful.  Infima/suprema over the margin level theta are taken over the
observed margins plus a 1000-point uniform grid on (0, 1]; the objectives
are piecewise smooth between CDF jumps, which sit exactly at the observed
margins, so the candidate set loses at most grid resolution (1e-3) on the
smooth part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .margin import MarginProfile, candidate_thetas, cdf, i_hat, kth_margin, moments

INF = float("inf")

KL_INVERSE_ITERATIONS = 64
SATURATION_PROBE = 1.0 - 1e-15


# ---------------------------------------------------------------------------
# KL machinery


def kl(q: float, p: float) -> float:
    """Bernoulli KL divergence q*ln(q/p) + (1-q)*ln((1-q)/(1-p)).

    Conventions: 0*ln 0 = 0; +inf when p in {0, 1} disagrees with q.
    """
    if not 0.0 <= q <= 1.0 or not 0.0 <= p <= 1.0:
        raise ValueError("q and p must lie in [0, 1]")
    total = 0.0
    if q > 0.0:
        if p == 0.0:
            return INF
        total += q * math.log(q / p)
    if q < 1.0:
        if p == 1.0:
            return INF
        total += (1.0 - q) * math.log((1.0 - q) / (1.0 - p))
    return total


def kl_inverse(q: float, u: float) -> float:
    """Smallest w >= q with KL(q||w) >= u, by bisection on [q, 1].

    Returns 1.0 (saturated) when even w -> 1 cannot reach u.  A fixed 64
    bisection iterations shrink the interval below 1e-19.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    if u < 0.0:
        raise ValueError("u must be >= 0")
    if u == 0.0:
        return q
    if q == 1.0:
        return 1.0
    if q == 0.0:
        # Closed form: KL(0||w) = -ln(1-w) >= u  <=>  w >= 1 - exp(-u).
        return 1.0 - math.exp(-u)
    if kl(q, SATURATION_PROBE) < u:
        return 1.0
    lo, hi = q, 1.0
    for _ in range(KL_INVERSE_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if kl(q, mid) >= u:
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# Bound reports


@dataclass(frozen=True)
class BoundInputs:
    m: int
    h_size: int
    delta: float
    profile: MarginProfile

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.h_size < 2:
            raise ValueError("h_size must be >= 2")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")


@dataclass
class BoundReport:
    bound_name: str
    value: float
    arg: float | int | None = None
    preconditions: list[tuple[str, bool, str]] = field(default_factory=list)
    intermediates: dict = field(default_factory=dict)
    rigorous: bool = True
    notes: list[str] = field(default_factory=list)

    @property
    def preconditions_ok(self) -> bool:
        return all(ok for _, ok, _ in self.preconditions)

    def to_dict(self) -> dict:
        return {
            "name": self.bound_name,
            "value": self.value,
            "arg": self.arg,
            "preconditions": [
                {"name": n, "satisfied": ok, "detail": detail}
                for n, ok, detail in self.preconditions
            ],
            "intermediates": dict(self.intermediates),
            "rigorous": self.rigorous,
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
# Individual bounds


def bound_breiman(inputs: BoundInputs) -> BoundReport:
    """Minimum-margin bound: R*(ln(2m) + ln(1/R) + 1) + ln(h/delta)/m."""
    m, h, delta = inputs.m, inputs.h_size, inputs.delta
    theta1 = kth_margin(inputs.profile, 1)
    report = BoundReport("breiman", INF, arg=theta1)

    gate = 4.0 * math.sqrt(2.0 / h)
    report.preconditions.append(
        ("min_margin_gate", theta1 > gate, f"theta1={theta1:.6g} vs 4*sqrt(2/|H|)={gate:.6g}")
    )
    if theta1 <= 0.0:
        report.preconditions.append(("r_bounded", False, "R infinite for theta1 <= 0"))
        report.rigorous = False
        return report

    r = 32.0 * math.log(2.0 * h) / (m * theta1 * theta1)
    report.intermediates["R"] = r
    report.preconditions.append(("r_bounded", r <= 2.0 * m, f"R={r:.6g} vs 2m={2 * m}"))
    report.value = r * (math.log(2.0 * m) + math.log(1.0 / r) + 1.0) + math.log(h / delta) / m
    report.rigorous = report.preconditions_ok
    return report


def _kth_q(theta: float, m: int, h: int, delta: float) -> float:
    return (
        8.0 * math.log(2.0 * h) / (theta * theta) * math.log(2.0 * m * m / math.log(h))
        + math.log(h)
        + math.log(m / delta)
    )


def bound_kth(inputs: BoundInputs, k: int) -> BoundReport:
    """kth-margin bound: ln|H|/m + KL^-1((k-1)/m; q/m) at theta = kth margin.

    The constant-k closed form is recorded alongside when m > 4k.
    """
    m, h, delta = inputs.m, inputs.h_size, inputs.delta
    theta = kth_margin(inputs.profile, k)
    report = BoundReport("kth_margin", INF, arg=k)
    gate = math.sqrt(8.0 / h)
    report.preconditions.append(
        ("kth_margin_gate", theta > gate, f"theta_k={theta:.6g} vs sqrt(8/|H|)={gate:.6g}")
    )
    report.intermediates["theta"] = theta
    if theta <= 0.0:
        report.rigorous = False
        return report

    q = _kth_q(theta, m, h, delta)
    report.intermediates["q"] = q
    report.value = math.log(h) / m + kl_inverse((k - 1) / m, q / m)
    if m > 4 * k:
        # ln(k m^{k-1} / delta) expanded to stay in float range for large k.
        constant_k = math.log(h) / m + (2.0 / m) * (
            8.0 * math.log(2.0 * h) / (theta * theta) * math.log(2.0 * m * m / math.log(h))
            + math.log(h)
            + math.log(k) + (k - 1) * math.log(m) - math.log(delta)
        )
        report.intermediates["constant_k_value"] = constant_k
    report.rigorous = report.preconditions_ok
    return report


def bound_emargin(inputs: BoundInputs) -> BoundReport:
    """Margin-CDF grid bound: ln|H|/m + inf over q in {0,1/m,...,1} of
    KL^-1(q; u[theta_hat(q)]); grid points without an admissible level are
    skipped.  The kth-margin infimum variant is evaluated alongside."""
    from .margin import emargin_theta

    m, h, delta = inputs.m, inputs.h_size, inputs.delta
    if h < 9:
        raise ValueError("h_size must be >= 9")
    report = BoundReport("emargin", INF)

    log_h = math.log(h)
    best = INF
    best_q = None
    for i in range(m + 1):
        q = i / m
        theta = emargin_theta(inputs.profile, q, h)
        if theta is None:
            continue
        u = (
            8.0 * log_h / (theta * theta) * math.log(2.0 * m * m / log_h)
            + log_h
            + math.log(m / delta)
        ) / m
        val = kl_inverse(q, u)
        if val < best:
            best, best_q = val, q
    if best_q is None:
        report.notes.append("no admissible grid point; all margin levels below the gate")
        return report
    report.value = log_h / m + best
    report.arg = best_q
    report.intermediates["q_grid_minimizer"] = best_q

    # Infimum-over-k companion form (same gate per k).
    gate = math.sqrt(8.0 / h)
    best_k_val, best_k = INF, None
    for k in range(1, m + 1):
        theta_k = kth_margin(inputs.profile, k)
        if theta_k <= gate:
            continue
        val = kl_inverse((k - 1) / m, _kth_q(theta_k, m, h, delta) / m)
        if val < best_k_val:
            best_k_val, best_k = val, k
    if best_k is not None:
        report.intermediates["kth_infimum_value"] = log_h / m + best_k_val
        report.intermediates["kth_infimum_k"] = best_k
    return report


def _mu_new(theta: float, m: int, h: int, delta: float) -> float:
    return 8.0 / (theta * theta) * math.log(m) * math.log(2.0 * h) + math.log(2.0 * h / delta)


def bound_new(inputs: BoundInputs) -> BoundReport:
    """Variance-aware margin-distribution bound:
    2/m + inf_theta [Pr_S[yf<theta] + (7mu+3*sqrt(2mu))/(3m)
                     + sqrt((2mu/m)*Pr_S[yf<theta])]."""
    m, h, delta = inputs.m, inputs.h_size, inputs.delta
    if m < 4:
        raise ValueError("m must be >= 4")
    p = inputs.profile
    best, best_theta, best_mu = INF, None, None
    for theta in candidate_thetas(p):
        theta = float(theta)
        mu = _mu_new(theta, m, h, delta)
        frac = cdf(p, theta, strict=True)
        val = frac + (7.0 * mu + 3.0 * math.sqrt(2.0 * mu)) / (3.0 * m) + math.sqrt(
            2.0 * mu / m * frac
        )
        if val < best:
            best, best_theta, best_mu = val, theta, mu
    report = BoundReport("new_upper", 2.0 / m + best, arg=best_theta)
    report.intermediates["mu"] = best_mu
    return report


def bound_lower(inputs: BoundInputs) -> BoundReport:
    """Lower bound on generalization error:
    sup_theta [Pr_S[yf<-theta] - sqrt((2mu/m)*Pr_S[yf<0])
               - (7mu+3*sqrt(2mu))/(3m)] - 2/m, clipped below at 0.

    The sampled-committee factor Pr_S[yg<0] is evaluated with the voting
    classifier itself as surrogate; the substitution is recorded.
    """
    m, h, delta = inputs.m, inputs.h_size, inputs.delta
    if m < 4:
        raise ValueError("m must be >= 4")
    p = inputs.profile
    frac_neg = cdf(p, 0.0, strict=True)
    best, best_theta = -INF, None
    for theta in candidate_thetas(p):
        theta = float(theta)
        mu = _mu_new(theta, m, h, delta)
        val = (
            cdf(p, -theta, strict=True)
            - math.sqrt(2.0 * mu / m * frac_neg)
            - (7.0 * mu + 3.0 * math.sqrt(2.0 * mu)) / (3.0 * m)
        )
        if val > best:
            best, best_theta = val, theta
    raw = best - 2.0 / m
    report = BoundReport("lower", max(0.0, raw), arg=best_theta)
    report.intermediates["raw_value"] = raw
    report.notes.append("committee sign-error factor evaluated on f itself")
    return report


def bound_distribution(inputs: BoundInputs) -> BoundReport:
    """Whole-distribution bound with average-margin and spread terms:
    1/m^50 + inf_theta [Pr_S[yf<theta] + sqrt(6mu)/m^1.5 + 7mu/(3m)
                        + sqrt((2mu/m)*I(theta)) + exp(-2 ln m /
                          (1 - E_S[yf]^2 + theta/9))]."""
    m, h, delta = inputs.m, inputs.h_size, inputs.delta
    if m < 4:
        raise ValueError("m must be >= 4")
    p = inputs.profile
    avg, _ = moments(p)
    best, best_theta, best_terms = INF, None, None
    for theta in candidate_thetas(p):
        theta = float(theta)
        mu = 144.0 * math.log(m) * math.log(2.0 * h) / (theta * theta) + math.log(
            2.0 * h / delta
        )
        terms = {
            "cdf": cdf(p, theta, strict=True),
            "sqrt_mu": math.sqrt(6.0 * mu) / m**1.5,
            "linear_mu": 7.0 * mu / (3.0 * m),
            "spread": math.sqrt(2.0 * mu / m * i_hat(p, theta)),
            "exp": math.exp(-2.0 * math.log(m) / (1.0 - avg * avg + theta / 9.0)),
        }
        val = sum(terms.values())
        if val < best:
            best, best_theta, best_terms = val, theta, terms
    report = BoundReport("distribution", 1.0 / m**50 + best, arg=best_theta)
    report.intermediates["summands"] = best_terms
    report.intermediates["average_margin"] = avg
    return report


def index_schapire(inputs: BoundInputs, theta: float) -> BoundReport:
    """Classic margin-distribution expression with the unspecified leading
    constant instantiated as 1: a NON-RIGOROUS comparison index only."""
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must be in (0, 1]")
    m, h, delta = inputs.m, inputs.h_size, inputs.delta
    penalty = math.sqrt(
        (math.log(m) * math.log(h) / (theta * theta) + math.log(1.0 / delta)) / m
    )
    value = cdf(inputs.profile, theta, strict=False) + penalty
    report = BoundReport("schapire_index", value, arg=theta, rigorous=False)
    report.notes.append("leading constant unspecified; index for scaling comparisons only")
    return report


@dataclass(frozen=True)
class Corollary2Verdict:
    preconditions_ok: bool
    inequality_holds: bool
    new_value: float
    breiman_value: float
    preconditions: tuple[tuple[str, bool, str], ...]


def check_corollary2(inputs: BoundInputs) -> Corollary2Verdict:
    """Executable tightness check: under the three stated preconditions the
    variance-aware bound total must not exceed the minimum-margin bound."""
    m, h, delta = inputs.m, inputs.h_size, inputs.delta
    theta1 = kth_margin(inputs.profile, 1)
    if theta1 <= 0.0:
        return Corollary2Verdict(
            False, True, INF, INF, (("positive_min_margin", False, f"theta1={theta1}"),)
        )

    gate = 4.0 * math.sqrt(2.0 / h)
    r = 32.0 * math.log(2.0 * h) / (m * theta1 * theta1)
    size_floor = max(4.0, math.exp(theta1 * theta1 / (4.0 * math.log(2.0 * h)) * math.log(h / delta)))
    pre = (
        ("min_margin_gate", theta1 > gate, f"theta1={theta1:.6g} vs {gate:.6g}"),
        ("r_bounded", r <= 2.0 * m, f"R={r:.6g} vs 2m={2 * m}"),
        ("sample_size_floor", m >= size_floor, f"m={m} vs floor={size_floor:.6g}"),
    )
    ok = all(flag for _, flag, _ in pre)
    new_val = bound_new(inputs).value
    breiman_val = bound_breiman(inputs).value
    return Corollary2Verdict(ok, new_val <= breiman_val, new_val, breiman_val, pre)
