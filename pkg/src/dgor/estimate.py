"""Estimation of regime models and odds ratios from trial data.

Three routes to the same target:

* ``estimate_dgor_plugin`` — closed-form maximum likelihood: arm-wise category
  frequencies and empirical response rates plugged into the exact formula;
* ``estimate_dgor_concordance`` — ratio of weighted concordant to weighted
  discordant cross-regime pairs, counted through per-arm histograms;
* ``estimate_p_ustat`` — the two-sample U-statistic for real-valued outcomes,
  estimating P(Y_g > Y_g') directly.

With the default observed-split pair weights the concordance route reproduces
the plug-in estimate exactly (to floating point) on every dataset; with the
design weights (responders count once, non-responders twice) the two agree
whenever the realized stage-2 split is even, and asymptotically always.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import engine
from .engine import DgorResult
from .errors import EmptyArm, EmptyDataset, MissingArm
from .model import (
    ArmKey,
    ContinuousSmartDataset,
    OrdinalPmf,
    SmartDataset,
    TwoStageRegimeModel,
    small_cell_flags,
)

SMALL_CELL_THRESHOLD = 0.05

WARN_ZERO_DISCORDANT = "zero_discordant: no discordant pairs, dgor is +infinity"
WARN_TIES_DOMINANT = "ties_dominant: more than half of the compared pairs are exact ties"


@dataclass(frozen=True)
class RegimeSpec:
    """Names one embedded regime of a restricted design: start ``stage1``,
    switch non-responders to ``stage2``."""

    stage1: str
    stage2: str

    @classmethod
    def parse(cls, text: str) -> "RegimeSpec":
        parts = text.split(":")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise MissingArm(f"regime spec must look like 'A:E', got {text!r}")
        return cls(stage1=parts[0], stage2=parts[1])

    @property
    def responder_arm(self) -> ArmKey:
        return (self.stage1,)

    @property
    def nonresponder_arm(self) -> ArmKey:
        return (self.stage1, self.stage2)

    def __str__(self) -> str:
        return f"{self.stage1}:{self.stage2}"


@dataclass(frozen=True)
class FittedSmartModel:
    """Counting MLEs from one dataset: response rates, arm pmfs, arm sizes."""

    response_rates: Mapping[str, float]
    arm_pmfs: Mapping[ArmKey, OrdinalPmf]
    arm_counts: Mapping[ArmKey, int]
    stage1_counts: Mapping[str, int]
    total_n: int
    j: int

    def pmf(self, arm: ArmKey) -> OrdinalPmf:
        if arm not in self.arm_counts:
            raise MissingArm(f"arm {','.join(arm)} is not part of the fitted design")
        if self.arm_counts[arm] == 0:
            raise EmptyArm(f"arm {','.join(arm)} has no patients")
        return self.arm_pmfs[arm]

    def regime_model(self, regime: RegimeSpec) -> TwoStageRegimeModel:
        if regime.stage1 not in self.response_rates:
            raise MissingArm(f"no stage-1 arm {regime.stage1!r} in the data")
        return TwoStageRegimeModel(
            response_rate=self.response_rates[regime.stage1],
            responder_pmf=self.pmf(regime.responder_arm),
            nonresponder_pmf=self.pmf(regime.nonresponder_arm),
            labels=(regime.stage1, regime.stage2),
        )


def fit_mle(data: SmartDataset) -> FittedSmartModel:
    """Closed-form MLE: category frequencies per arm, responder fraction per
    stage-1 treatment. Arms with no patients keep a zero count and no pmf;
    requesting them later raises EmptyArm."""
    if data.n == 0:
        raise EmptyDataset("no trajectories")
    j = data.j
    counts: dict[ArmKey, np.ndarray] = {arm: np.zeros(j, dtype=np.int64)
                                        for arm in data.design.arms()}
    stage1_counts: dict[str, int] = {t1: 0 for t1 in data.design.stage1_arms}
    responders: dict[str, int] = {t1: 0 for t1 in data.design.stage1_arms}
    for t in data.trajectories:
        stage1_counts[t.stage1] += 1
        if t.responder:
            responders[t.stage1] += 1
            arm: ArmKey = (t.stage1,)
        else:
            arm = (t.stage1, t.stage2)
        counts[arm][t.outcome - 1] += 1
    arm_pmfs = {}
    for arm, vec in counts.items():
        total = int(vec.sum())
        if total > 0:
            arm_pmfs[arm] = OrdinalPmf(tuple(int(c) / total for c in vec))
    response_rates = {
        t1: (responders[t1] / n if n else 0.0)
        for t1, n in stage1_counts.items()
    }
    return FittedSmartModel(
        response_rates=response_rates,
        arm_pmfs=arm_pmfs,
        arm_counts={arm: int(vec.sum()) for arm, vec in counts.items()},
        stage1_counts=stage1_counts,
        total_n=data.n,
        j=j,
    )


def _small_cell_warnings(models: Sequence[TwoStageRegimeModel]) -> tuple[str, ...]:
    notes = []
    for model in models:
        for name, pmf in (("responder", model.responder_pmf),
                          ("non-responder", model.nonresponder_pmf)):
            flagged = small_cell_flags(pmf, SMALL_CELL_THRESHOLD)
            if flagged:
                arm = ",".join(model.responder_arm if name == "responder"
                               else model.nonresponder_arm)
                notes.append(
                    f"small_cells: arm {arm} ({name}) has categories {flagged} "
                    f"below {SMALL_CELL_THRESHOLD:g}")
    return tuple(notes)


def estimate_dgor_plugin(fit: FittedSmartModel,
                         regime_g: RegimeSpec,
                         regime_gprime: RegimeSpec) -> DgorResult:
    """Plug the counting MLEs into the exact two-stage formula.

    Attaches a warning per estimated arm pmf containing a cell below 5%.
    """
    model_g = fit.regime_model(regime_g)
    model_gp = fit.regime_model(regime_gprime)
    result = engine.dgor_two_stage(model_g, model_gp)
    return result.with_warnings(_small_cell_warnings([model_gp, model_g]))


def _arm_histograms(data: SmartDataset) -> tuple[dict[ArmKey, np.ndarray], dict[str, int]]:
    j = data.j
    hists: dict[ArmKey, np.ndarray] = {}
    stage1_nonresp: dict[str, int] = {}
    for t in data.trajectories:
        arm: ArmKey = (t.stage1,) if t.responder else (t.stage1, t.stage2)
        if arm not in hists:
            hists[arm] = np.zeros(j, dtype=np.int64)
        hists[arm][t.outcome - 1] += 1
        if not t.responder:
            stage1_nonresp[t.stage1] = stage1_nonresp.get(t.stage1, 0) + 1
    return hists, stage1_nonresp


def _weighted_regime_histogram(regime: RegimeSpec,
                               hists: Mapping[ArmKey, np.ndarray],
                               stage1_nonresp: Mapping[str, int],
                               weighting: str) -> np.ndarray:
    resp = hists.get(regime.responder_arm)
    nonresp = hists.get(regime.nonresponder_arm)
    if resp is None and nonresp is None:
        raise MissingArm(f"no patients consistent with regime {regime}")
    j = len(resp) if resp is not None else len(nonresp)
    out = np.zeros(j, dtype=float)
    if resp is not None:
        out += resp  # responders are randomized once: weight 1
    if nonresp is not None:
        if weighting == "design":
            w = 2.0  # non-responders are randomized twice
        elif weighting == "observed":
            w = stage1_nonresp[regime.stage1] / nonresp.sum()
        else:
            raise ValueError(f"unknown weighting {weighting!r}")
        out += w * nonresp
    return out


def estimate_dgor_concordance(data: SmartDataset,
                              regime_g: RegimeSpec,
                              regime_gprime: RegimeSpec,
                              weighting: str = "observed") -> DgorResult:
    """Weighted concordant/discordant pair ratio across the four arm pairs.

    Pair weight = product of each member's randomization weight: 1 for a
    responder, and for a non-responder either the literal 2 of the printed
    estimator (``weighting="design"``) or the realized inverse share of the
    stage-2 split (``weighting="observed"``, default), which makes the ratio
    identical to the plug-in MLE on every dataset.

    Counting runs on per-arm category histograms, so cost is O(N + J^2)
    rather than O(N^2) pair enumeration.
    """
    hists, stage1_nonresp = _arm_histograms(data)
    for regime in (regime_g, regime_gprime):
        for arm in (regime.responder_arm, regime.nonresponder_arm):
            if arm not in hists or hists[arm].sum() == 0:
                raise EmptyArm(f"arm {','.join(arm)} has no patients")
    f_ref = _weighted_regime_histogram(regime_gprime, hists, stage1_nonresp, weighting)
    f_cmp = _weighted_regime_histogram(regime_g, hists, stage1_nonresp, weighting)
    outer = np.outer(f_ref, f_cmp)
    concordant = float(np.triu(outer, k=1).sum())
    discordant = float(np.tril(outer, k=-1).sum())
    ties = float(np.trace(outer))
    total = concordant + discordant + ties
    if discordant > 0:
        dgor = concordant / discordant
        log_dgor = math.log(dgor) if concordant > 0 else None
        warnings: tuple[str, ...] = () if concordant > 0 else (engine.WARN_DEGENERATE_NUMERATOR,)
    else:
        dgor = math.inf
        log_dgor = None
        warnings = (WARN_ZERO_DISCORDANT,)
    return DgorResult(
        p_gt=concordant / total,
        p_lt=discordant / total,
        p_eq=ties / total,
        dgor=dgor,
        log_dgor=log_dgor,
        warnings=warnings,
    )


def _continuous_arms(data: ContinuousSmartDataset,
                     regime: RegimeSpec) -> tuple[np.ndarray, np.ndarray]:
    resp, nonresp = [], []
    for s1, r, s2, y in zip(data.stage1, data.responder, data.stage2, data.outcome):
        if s1 != regime.stage1:
            continue
        if r:
            resp.append(y)
        elif s2 == regime.stage2:
            nonresp.append(y)
    if not resp:
        raise EmptyArm(f"arm {regime.stage1} (responders) has no patients")
    if not nonresp:
        raise EmptyArm(f"arm {regime.stage1},{regime.stage2} has no patients")
    return np.sort(np.asarray(resp, dtype=float)), np.sort(np.asarray(nonresp, dtype=float))


def _cross_pair_counts(x_sorted: np.ndarray, y_sorted: np.ndarray) -> tuple[int, int]:
    """(# pairs with x > y, # exact-tie pairs) over the full cross product."""
    lo = np.searchsorted(x_sorted, y_sorted, side="right")
    eq = lo - np.searchsorted(x_sorted, y_sorted, side="left")
    greater = int((len(x_sorted) - lo).sum())
    return greater, int(eq.sum())


def estimate_p_ustat(data: ContinuousSmartDataset,
                     regime_g: RegimeSpec,
                     regime_gprime: RegimeSpec,
                     rates: Mapping[str, float] | None = None) -> tuple[float, DgorResult]:
    """U-statistic estimate of P(Y_g > Y_g') for real-valued outcomes.

    Every cross pair of patients from the two regimes' arms is scored with the
    strict-inequality indicator; each responder-status pair is averaged over
    its own arm sizes and weighted by the product of (estimated or supplied)
    response-rate factors. Returns (p_hat, dgor result) with
    dgor = p_hat/(1 - p_hat): for continuous data ties have probability zero,
    and a dataset where ties dominate is flagged rather than reinterpreted.
    """
    if rates is None:
        rates = {}
        for t1 in {regime_g.stage1, regime_gprime.stage1}:
            n1 = sum(1 for s in data.stage1 if s == t1)
            if n1 == 0:
                raise EmptyArm(f"no patients started on {t1!r}")
            n_resp = sum(1 for s, r in zip(data.stage1, data.responder) if s == t1 and r)
            rates[t1] = n_resp / n1
    for t1 in (regime_g.stage1, regime_gprime.stage1):
        if t1 not in rates:
            raise MissingArm(f"no response rate supplied for stage-1 arm {t1!r}")
    gamma_cmp = float(rates[regime_g.stage1])
    gamma_ref = float(rates[regime_gprime.stage1])

    cmp_arms = _continuous_arms(data, regime_g)      # (responders, non-responders)
    ref_arms = _continuous_arms(data, regime_gprime)
    p_hat = 0.0
    tie_pairs = 0
    all_pairs = 0
    for r_cmp, x in ((1, cmp_arms[0]), (0, cmp_arms[1])):
        w_cmp = gamma_cmp if r_cmp else (1 - gamma_cmp)
        for r_ref, y in ((1, ref_arms[0]), (0, ref_arms[1])):
            w_ref = gamma_ref if r_ref else (1 - gamma_ref)
            greater, ties = _cross_pair_counts(x, y)
            npairs = len(x) * len(y)
            p_hat += w_cmp * w_ref * greater / npairs
            tie_pairs += ties
            all_pairs += npairs

    warnings: list[str] = []
    if tie_pairs > 0.5 * all_pairs:
        warnings.append(WARN_TIES_DOMINANT)
    if p_hat >= 1.0:
        dgor, log_dgor = math.inf, None
        warnings.append(engine.WARN_DEGENERATE_DENOMINATOR)
    elif p_hat == 0.0:
        dgor, log_dgor = 0.0, None
        warnings.append(engine.WARN_DEGENERATE_NUMERATOR)
    else:
        dgor = p_hat / (1 - p_hat)
        log_dgor = math.log(dgor)
    result = DgorResult(
        p_gt=p_hat,
        p_lt=1 - p_hat,
        p_eq=0.0,
        dgor=dgor,
        log_dgor=log_dgor,
        warnings=tuple(warnings),
    )
    return p_hat, result
