"""Sequential pairwise search for the best regime in a finite class.

The current champion meets each remaining member once; it is retained only
when its odds ratio over the challenger is significantly greater than 1 at
the (Bonferroni-corrected) per-test level, otherwise the challenger takes
over. Exactly M-1 tests are performed for M members, in class order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import estimate, inference
from .errors import InvalidDesign
from .estimate import FittedSmartModel, RegimeSpec
from .model import SmartDataset


@dataclass(frozen=True)
class RegimeClass:
    members: tuple[RegimeSpec, ...]
    alpha_family: float = 0.05
    correction: str = "bonferroni"

    def __post_init__(self):
        if not self.members:
            raise InvalidDesign("regime class is empty")
        if len(set(self.members)) != len(self.members):
            raise InvalidDesign("regime class contains duplicates")
        if self.correction not in ("bonferroni", "none"):
            raise InvalidDesign(f"unknown correction {self.correction!r}")

    def per_test_alpha(self) -> float:
        if self.correction == "bonferroni" and len(self.members) > 1:
            return self.alpha_family / (len(self.members) - 1)
        return self.alpha_family


@dataclass(frozen=True)
class PolicyTest:
    champion: RegimeSpec
    challenger: RegimeSpec
    dgor_hat: float
    log_dgor_hat: float
    se_log: float
    z_stat: float
    p_value_one_sided: float
    ci: tuple[float, float]
    alpha_per_test: float
    champion_retained: bool


@dataclass(frozen=True)
class PolicyResult:
    winner: RegimeSpec
    trace: tuple[PolicyTest, ...]
    alpha_per_test: float


def _compare(fit: FittedSmartModel, champion: RegimeSpec, challenger: RegimeSpec,
             alpha: float) -> PolicyTest:
    model_champ = fit.regime_model(champion)
    model_chall = fit.regime_model(challenger)
    shared = champion.stage1 == challenger.stage1
    result = estimate.estimate_dgor_plugin(fit, champion, challenger)
    weights = inference.observed_weights(fit.arm_counts, fit.total_n)
    if shared:
        sigma2 = inference.asymptotic_variance_sp(model_champ, model_chall, weights)
    else:
        sigma2 = inference.asymptotic_variance_dp(model_champ, model_chall, weights)
    log_eta = result.require_log()
    se_log = math.sqrt(sigma2) / result.dgor / math.sqrt(fit.total_n)
    z = log_eta / se_log
    p_one_sided = 0.5 * math.erfc(z / math.sqrt(2.0))
    z_alpha = inference.inverse_normal_cdf(1 - alpha)
    zc = inference.inverse_normal_cdf(1 - alpha / 2)
    # Champion stays only on a significant one-sided win over the challenger;
    # a tie or loss hands the title over (the search removes the challenger
    # from the pool either way).
    retained = z > z_alpha
    return PolicyTest(
        champion=champion,
        challenger=challenger,
        dgor_hat=result.dgor,
        log_dgor_hat=log_eta,
        se_log=se_log,
        z_stat=z,
        p_value_one_sided=p_one_sided,
        ci=(log_eta - zc * se_log, log_eta + zc * se_log),
        alpha_per_test=alpha,
        champion_retained=retained,
    )


def find_optimal(regime_class: RegimeClass,
                 source: SmartDataset | FittedSmartModel) -> PolicyResult:
    """Champion-style search over the class; returns the winner and the full
    decision trace (one entry per test, M-1 in total)."""
    fit = source if isinstance(source, FittedSmartModel) else estimate.fit_mle(source)
    alpha = regime_class.per_test_alpha()
    members = list(regime_class.members)
    champion = members[0]
    trace: list[PolicyTest] = []
    for challenger in members[1:]:
        test = _compare(fit, champion, challenger, alpha)
        trace.append(test)
        if not test.champion_retained:
            champion = challenger
    return PolicyResult(winner=champion, trace=tuple(trace), alpha_per_test=alpha)
