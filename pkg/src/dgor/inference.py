"""Asymptotic inference and sample-size planning for estimated odds ratios.

The estimator's large-sample law is Normal on the ratio scale:
sqrt(N) (eta_hat - eta) -> N(0, sigma_eta^2), with sigma_eta^2 given by a
per-arm score variance. The log-scale standard error follows by the delta
method, se_log = sigma_eta / (eta sqrt(N)), which is what the Wald test and
confidence intervals use.

Design-based arm weights (path probabilities) serve planning; observed-count
weights serve estimation-time inference.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from . import engine
from .errors import (
    DegenerateDenominator,
    InvalidDesign,
    MissingRate,
    NonFiniteEstimate,
    OutOfRange,
    ZeroEffect,
    ZeroWeight,
)
from .model import ArmKey, KStageRegimeModel, SmartDesign, TwoStageRegimeModel

# --------------------------------------------------------------------------
# Standard normal quantile


def _phi_upper(z: float) -> float:
    """P(Z > z) for standard normal Z."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _phi(z: float) -> float:
    """P(Z <= z), stable in both tails."""
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


_ACKLAM_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
             1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_ACKLAM_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
             6.680131188771972e+01, -1.328068155288572e+01)
_ACKLAM_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
             -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_ACKLAM_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
             3.754408661907416e+00)


def inverse_normal_cdf(p: float) -> float:
    """Standard normal quantile, accurate to ~1e-15 after refinement.

    Rational initial approximation (central and tail branches) followed by one
    Halley step against the exact erfc-based cdf.
    """
    if not 0.0 < p < 1.0:
        raise OutOfRange(f"quantile argument must be in (0,1), got {p}")
    p_low, p_high = 0.02425, 1 - 0.02425
    if p < p_low:
        q = math.sqrt(-2 * math.log(p))
        a, b, c, d = _ACKLAM_A, _ACKLAM_B, _ACKLAM_C, _ACKLAM_D
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1)
    elif p <= p_high:
        q = p - 0.5
        r = q * q
        a, b = _ACKLAM_A, _ACKLAM_B
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / \
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1)
    else:
        q = math.sqrt(-2 * math.log1p(-p))
        c, d = _ACKLAM_C, _ACKLAM_D
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1)
    # One Halley refinement against the exact cdf.
    err = _phi(x) - p
    pdf = math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)
    if pdf > 0:
        u = err / pdf
        x = x - u / (1 + x * u / 2)
    return x


# --------------------------------------------------------------------------
# Arm weights


@dataclass(frozen=True)
class DesignWeights:
    """Expected (or observed) fraction of the trial landing in each arm.

    Keys are arm paths: ``(t1,)`` for the stage-1 responder arm and
    ``(t1, t2)`` for a non-responder arm (K-stage strata extend the tuple).
    ``source`` is "design-based" or "observed-counts". A full-trial design
    weighting sums to 1; weight maps restricted to the arms of one comparison
    may sum to less.
    """

    weights: Mapping[ArmKey, float]
    source: str = "design-based"

    def __post_init__(self):
        for arm, w in self.weights.items():
            if w < 0:
                raise ZeroWeight(f"arm {arm} has negative weight {w}")

    def require(self, arm: ArmKey) -> float:
        w = self.weights.get(arm)
        if w is None:
            raise ZeroWeight(f"no weight for arm {arm}")
        if w <= 0:
            raise ZeroWeight(f"arm {arm} has zero weight")
        return w


def design_weights(design: SmartDesign, response_rates: Mapping[str, float]) -> DesignWeights:
    """Path-probability weight of every arm in a restricted design.

    Responder arm of t1: P(stage1=t1) * gamma(t1); each non-responder arm:
    P(stage1=t1) * (1-gamma(t1)) * P(stage2 option). Rejects degenerate rates
    that leave an arm unreachable.
    """
    weights: dict[ArmKey, float] = {}
    for t1 in design.stage1_arms:
        if t1 not in response_rates:
            raise MissingRate(f"no planning response rate for stage-1 arm {t1!r}")
        gamma = float(response_rates[t1])
        if not 0 <= gamma <= 1:
            raise MissingRate(f"response rate for {t1!r} must be in [0,1], got {gamma}")
        r1 = design.stage1_probability(t1)
        weights[(t1,)] = r1 * gamma
        for t2 in design.stage2_options[t1]:
            weights[(t1, t2)] = r1 * (1 - gamma) * design.stage2_probability(t1, t2)
    for arm, w in weights.items():
        if w <= 0:
            raise ZeroWeight(f"arm {arm} is unreachable under the planning rates")
    return DesignWeights(weights=weights, source="design-based")


def observed_weights(arm_counts: Mapping[ArmKey, int], total_n: int) -> DesignWeights:
    if total_n <= 0:
        raise ZeroWeight("total sample size must be positive")
    return DesignWeights(
        weights={arm: c / total_n for arm, c in arm_counts.items()},
        source="observed-counts",
    )


def pair_design_weights(model_g: TwoStageRegimeModel,
                        model_gprime: TwoStageRegimeModel,
                        shared: bool,
                        stage1_prob: float = 0.5,
                        stage2_prob: float = 0.5) -> DesignWeights:
    """Planning weights for the arms of one two-stage comparison.

    Assumes the canonical trial: two initial treatments randomized with
    ``stage1_prob``, non-responders randomized between two options with
    ``stage2_prob``. Arms outside the compared regimes are omitted (their
    weight sits with the rest of the trial).
    """
    w: dict[ArmKey, float] = {}
    for model in (model_gprime, model_g):
        g = model.response_rate
        w[model.responder_arm] = stage1_prob * g
        w[model.nonresponder_arm] = stage1_prob * (1 - g) * stage2_prob
    if shared and model_g.labels[0] != model_gprime.labels[0]:
        raise InvalidDesign("shared-path weights need a common initial treatment")
    for arm, weight in w.items():
        if weight <= 0:
            raise ZeroWeight(f"arm {arm} is unreachable under the planning rates")
    return DesignWeights(weights=w, source="design-based")


def kstage_design_weights(model_g: KStageRegimeModel,
                          model_gprime: KStageRegimeModel,
                          stage1_prob: float = 0.5,
                          branch_prob: float = 0.5) -> DesignWeights:
    """Planning weights for every terminal stratum of a K-stage comparison.

    Each stage's non-responders are randomized among options with
    ``branch_prob`` of staying on the regime's path.
    """
    w: dict[ArmKey, float] = {}
    for model in (model_gprime, model_g):
        path = stage1_prob
        for idx, gamma in enumerate(model.stage_response_rates):
            w[model.stratum_key(idx)] = w.get(model.stratum_key(idx), 0.0) + path * gamma
            path *= (1 - gamma) * branch_prob
        key = model.stratum_key(model.k - 1)
        w[key] = w.get(key, 0.0) + path
    for arm, weight in w.items():
        if weight <= 0:
            raise ZeroWeight(f"stratum {arm} is unreachable under the planning rates")
    return DesignWeights(weights=w, source="design-based")


# --------------------------------------------------------------------------
# Asymptotic variance of sqrt(N)(eta_hat - eta)


def _tail_sums(mix: tuple[float, ...]) -> tuple[list[float], list[float]]:
    j = len(mix)
    upper = [math.fsum(mix[b + 1:]) for b in range(j)]
    lower = [math.fsum(mix[:b]) for b in range(j)]
    return upper, lower


def _score_variance(arm_scores, weights: DesignWeights, p_lt: float) -> float:
    """(1/p_lt^2) * sum_a Var_a(W)/omega_a for per-arm score vectors W."""
    total = 0.0
    for arm, pmf, w_vec in arm_scores:
        omega = weights.require(arm)
        m1 = math.fsum(p * w for p, w in zip(pmf, w_vec))
        m2 = math.fsum(p * w * w for p, w in zip(pmf, w_vec))
        total += (m2 - m1 * m1) / omega
    return total / (p_lt * p_lt)


def asymptotic_variance_dp(model_g: TwoStageRegimeModel,
                           model_gprime: TwoStageRegimeModel,
                           weights: DesignWeights) -> float:
    """Variance of sqrt(N)(eta_hat - eta) for a distinct-path comparison.

    Per arm a with cell probabilities pi_ab, the score is
    W_ab = w_a [ S_gt(b) - eta S_lt(b) ], where w_a is the arm's mixture
    weight in its own regime and S_gt/S_lt are tail sums of the opposing
    regime's marginal mixture; the variance aggregates Var_a(W)/omega_a over
    the four arms and divides by P(Y_g < Y_g')^2.
    """
    if model_g.labels[0] == model_gprime.labels[0]:
        raise InvalidDesign(
            "distinct-path variance needs different initial treatments; "
            "use asymptotic_variance_sp for a shared-path pair")
    res = engine.dgor_two_stage(model_g, model_gprime)
    if res.p_lt <= 0:
        raise DegenerateDenominator("P(Y_g < Y_g') = 0: variance undefined")
    eta = res.dgor
    up_g, lo_g = _tail_sums(model_g.marginal_pmf())
    up_p, lo_p = _tail_sums(model_gprime.marginal_pmf())
    j = model_g.j
    g_ref = model_gprime.response_rate
    g_cmp = model_g.response_rate
    # Reference-side arms compare their category b against the comparison
    # regime's mixture; comparison-side arms do the reverse.
    ref_scores = [up_g[b] - eta * lo_g[b] for b in range(j)]
    cmp_scores = [lo_p[b] - eta * up_p[b] for b in range(j)]
    arm_scores = [
        (model_gprime.responder_arm, model_gprime.responder_pmf.probs,
         [g_ref * s for s in ref_scores]),
        (model_gprime.nonresponder_arm, model_gprime.nonresponder_pmf.probs,
         [(1 - g_ref) * s for s in ref_scores]),
        (model_g.responder_arm, model_g.responder_pmf.probs,
         [g_cmp * s for s in cmp_scores]),
        (model_g.nonresponder_arm, model_g.nonresponder_pmf.probs,
         [(1 - g_cmp) * s for s in cmp_scores]),
    ]
    return _score_variance(arm_scores, weights, res.p_lt)


def asymptotic_variance_sp(model_g: TwoStageRegimeModel,
                           model_gprime: TwoStageRegimeModel,
                           weights: DesignWeights) -> float:
    """Variance of sqrt(N)(eta_hat - eta) for a shared-path comparison.

    Same score structure as the distinct-path case with the second regime's
    rate replaced by the shared rate; the shared responder arm accumulates the
    score contributions from both of its regime roles, because the estimated
    ratio moves with a shared cell through both appearances.
    """
    if model_g.labels[0] != model_gprime.labels[0]:
        raise InvalidDesign("shared-path variance needs a common initial treatment")
    if abs(model_g.response_rate - model_gprime.response_rate) > 1e-12:
        raise InvalidDesign("shared-path models must share the response rate")
    if model_g.responder_pmf.probs != model_gprime.responder_pmf.probs:
        raise InvalidDesign("shared-path models must share the responder distribution")
    res = engine.dgor_two_stage(model_g, model_gprime)
    if res.p_lt <= 0:
        raise DegenerateDenominator("P(Y_g < Y_g') = 0: variance undefined")
    eta = res.dgor
    gamma = model_g.response_rate
    up_g, lo_g = _tail_sums(model_g.marginal_pmf())
    up_p, lo_p = _tail_sums(model_gprime.marginal_pmf())
    j = model_g.j
    ref_scores = [up_g[b] - eta * lo_g[b] for b in range(j)]
    cmp_scores = [lo_p[b] - eta * up_p[b] for b in range(j)]
    shared_scores = [gamma * (r + c) for r, c in zip(ref_scores, cmp_scores)]
    arm_scores = [
        (model_g.responder_arm, model_g.responder_pmf.probs, shared_scores),
        (model_gprime.nonresponder_arm, model_gprime.nonresponder_pmf.probs,
         [(1 - gamma) * s for s in ref_scores]),
        (model_g.nonresponder_arm, model_g.nonresponder_pmf.probs,
         [(1 - gamma) * s for s in cmp_scores]),
    ]
    return _score_variance(arm_scores, weights, res.p_lt)


def asymptotic_variance_kstage(model_g: KStageRegimeModel,
                               model_gprime: KStageRegimeModel,
                               weights: DesignWeights) -> float:
    """Variance of sqrt(N)(eta_hat - eta) for a K-stage comparison.

    Generalizes the two-stage expression: every terminal stratum contributes
    its path-weighted score against the opposing regime's marginal mixture.
    Strata shared between the two regimes (same treatment path) accumulate
    both roles' scores. Reduces to the two-stage variance at K=2.
    """
    res = engine.dgor_kstage(model_g, model_gprime)
    if res.p_lt <= 0:
        raise DegenerateDenominator("P(Y_g < Y_g') = 0: variance undefined")
    eta = res.dgor
    up_g, lo_g = _tail_sums(model_g.marginal_pmf())
    up_p, lo_p = _tail_sums(model_gprime.marginal_pmf())
    j = model_g.j
    ref_scores = [up_g[b] - eta * lo_g[b] for b in range(j)]
    cmp_scores = [lo_p[b] - eta * up_p[b] for b in range(j)]

    acc: dict[ArmKey, tuple[tuple[float, ...], list[float]]] = {}

    def add(model: KStageRegimeModel, base_scores):
        for idx, (path_w, pmf) in enumerate(zip(model.stratum_weights(),
                                                model.terminal_pmfs)):
            key = model.stratum_key(idx)
            scores = [path_w * s for s in base_scores]
            if key in acc:
                prev_pmf, prev_scores = acc[key]
                if prev_pmf != pmf.probs:
                    raise InvalidDesign(
                        f"stratum {key} appears in both regimes with different pmfs")
                acc[key] = (prev_pmf, [a + b for a, b in zip(prev_scores, scores)])
            else:
                acc[key] = (pmf.probs, scores)

    add(model_gprime, ref_scores)
    add(model_g, cmp_scores)
    arm_scores = [(key, pmf, scores) for key, (pmf, scores) in acc.items()]
    return _score_variance(arm_scores, weights, res.p_lt)


# --------------------------------------------------------------------------
# Wald test, confidence interval, sample size


@dataclass(frozen=True)
class InferenceResult:
    log_dgor_hat: float
    se_log: float
    z_stat: float
    p_value: float
    ci: tuple[float, float]
    dgor_ci: tuple[float, float]
    alpha: float


def wald_inference(log_dgor_hat: float, sigma_eta: float, eta_hat: float,
                   n: int, alpha: float = 0.05) -> InferenceResult:
    """Two-sided Wald test of log dgor = 0 with a (1-alpha) confidence interval.

    ``sigma_eta`` is the ratio-scale variance of sqrt(N)(eta_hat - eta); the
    log-scale SE is sqrt(sigma_eta)/(eta_hat sqrt(n)).
    """
    if n <= 0:
        raise OutOfRange(f"sample size must be positive, got {n}")
    if not 0 < alpha < 1:
        raise OutOfRange(f"alpha must be in (0,1), got {alpha}")
    if not math.isfinite(eta_hat) or eta_hat <= 0:
        raise NonFiniteEstimate(f"eta_hat must be finite and positive, got {eta_hat!r}")
    if not math.isfinite(log_dgor_hat):
        raise NonFiniteEstimate(f"log dgor estimate is not finite: {log_dgor_hat!r}")
    if sigma_eta <= 0:
        raise NonFiniteEstimate(f"sigma_eta must be positive, got {sigma_eta!r}")
    se_log = math.sqrt(sigma_eta) / eta_hat / math.sqrt(n)
    z = log_dgor_hat / se_log
    p_value = min(1.0, 2.0 * _phi_upper(abs(z)))
    zc = inverse_normal_cdf(1 - alpha / 2)
    lo, hi = log_dgor_hat - zc * se_log, log_dgor_hat + zc * se_log
    return InferenceResult(
        log_dgor_hat=log_dgor_hat,
        se_log=se_log,
        z_stat=z,
        p_value=p_value,
        ci=(lo, hi),
        dgor_ci=(math.exp(lo), math.exp(hi)),
        alpha=alpha,
    )


def sample_size(effect_size: float, alpha: float = 0.05, power: float = 0.80) -> int:
    """Total trial size for a two-sided level-alpha test at the given power.

    ``effect_size`` is the standardized log-scale effect, log(dgor)/sigma_log.
    """
    if effect_size == 0:
        raise ZeroEffect("effect size must be nonzero")
    if not 0 < alpha < 1 or not 0 < power < 1:
        raise OutOfRange("alpha and power must lie in (0,1)")
    z_a = inverse_normal_cdf(1 - alpha / 2)
    z_b = inverse_normal_cdf(power)
    return math.ceil((z_a + z_b) ** 2 / effect_size ** 2)


@dataclass(frozen=True)
class SampleSizePlan:
    n: int
    effect_size: float
    dgor: float
    log_dgor: float
    sigma_eta: float
    sigma_log: float
    alpha: float
    power: float


def plan_from_models(model_g, model_gprime, shared: bool,
                     alpha: float = 0.05, power: float = 0.80,
                     weights: DesignWeights | None = None) -> SampleSizePlan:
    """Effect size and total N implied by a pair of regime models.

    The dgor and its ratio-scale variance come from the models; the
    standardized effect is log(dgor) * dgor / sqrt(sigma_eta). Design-based
    weights are derived from the models when not supplied.
    """
    kstage = isinstance(model_g, KStageRegimeModel)
    if kstage:
        if weights is None:
            weights = kstage_design_weights(model_g, model_gprime)
        res = engine.dgor_kstage(model_g, model_gprime)
        sigma2 = asymptotic_variance_kstage(model_g, model_gprime, weights)
    else:
        if weights is None:
            weights = pair_design_weights(model_g, model_gprime, shared)
        res = engine.dgor_two_stage(model_g, model_gprime)
        if shared:
            sigma2 = asymptotic_variance_sp(model_g, model_gprime, weights)
        else:
            sigma2 = asymptotic_variance_dp(model_g, model_gprime, weights)
    if res.dgor == 1.0 or res.log_dgor is None:
        if res.log_dgor == 0.0 or res.dgor == 1.0:
            raise ZeroEffect("the two regimes have dgor 1: no effect to power for")
        raise NonFiniteEstimate(f"dgor {res.dgor!r} admits no finite effect size")
    sigma_log = math.sqrt(sigma2) / res.dgor
    es = res.log_dgor / sigma_log
    return SampleSizePlan(
        n=sample_size(es, alpha, power),
        effect_size=es,
        dgor=res.dgor,
        log_dgor=res.log_dgor,
        sigma_eta=sigma2,
        sigma_log=sigma_log,
        alpha=alpha,
        power=power,
    )


def sample_size_from_models(model_g, model_gprime, shared: bool,
                            alpha: float = 0.05, power: float = 0.80,
                            weights: DesignWeights | None = None) -> int:
    return plan_from_models(model_g, model_gprime, shared, alpha, power, weights).n
