"""Exact concordance probabilities and dynamic generalized odds ratios.

Two embedded regimes g and g' induce potential outcomes Y_g, Y_g' for two
independently selected patients. The dynamic generalized odds ratio is

    dgor = P(Y_g > Y_g') / P(Y_g < Y_g'),

where each regime's outcome distribution stratifies over responder status
(two-stage) or over the stage of first response (K-stage). Ties contribute to
neither side and are reported as ``p_eq``.

``dgor_two_stage`` computes the stratified sum directly; ``dgor_matrix_form``
recomputes it from per-stratum outer products (strict upper vs strict lower
triangles). The two paths are algebraically identical and serve as mutual
cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateDenominator, MismatchedJ, NotBinary
from .model import KStageRegimeModel, TwoStageRegimeModel

WARN_DEGENERATE_DENOMINATOR = "degenerate_denominator: P(Y_g < Y_g') = 0, dgor is +infinity"
WARN_DEGENERATE_NUMERATOR = "degenerate_numerator: P(Y_g > Y_g') = 0, dgor is 0"


@dataclass(frozen=True)
class DgorResult:
    """Concordance/discordance/tie probabilities and the resulting odds ratio.

    ``dgor`` is ``math.inf`` when no discordance mass favours the reference
    regime; ``log_dgor`` is None whenever ``dgor`` is 0 or infinite.
    """

    p_gt: float
    p_lt: float
    p_eq: float
    dgor: float
    log_dgor: float | None
    warnings: tuple[str, ...] = ()

    def require_log(self) -> float:
        if self.log_dgor is None:
            raise DegenerateDenominator(
                f"log dgor undefined for dgor={self.dgor!r}", warnings=self.warnings)
        return self.log_dgor

    def with_warnings(self, extra: tuple[str, ...]) -> "DgorResult":
        return replace(self, warnings=self.warnings + tuple(extra))


def _make_result(p_gt: float, p_lt: float, p_eq: float) -> DgorResult:
    warnings: tuple[str, ...] = ()
    if p_lt > 0:
        dgor = p_gt / p_lt
        log_dgor = math.log(dgor) if p_gt > 0 else None
        if p_gt == 0:
            warnings = (WARN_DEGENERATE_NUMERATOR,)
    else:
        dgor = math.inf
        log_dgor = None
        warnings = (WARN_DEGENERATE_DENOMINATOR,)
    return DgorResult(p_gt=p_gt, p_lt=p_lt, p_eq=p_eq, dgor=dgor,
                      log_dgor=log_dgor, warnings=warnings)


def _strata_two_stage(model: TwoStageRegimeModel) -> list[tuple[float, tuple[float, ...]]]:
    g = model.response_rate
    return [(g, model.responder_pmf.probs), (1 - g, model.nonresponder_pmf.probs)]


def _check_same_j(model_g, model_gprime) -> int:
    if model_g.j != model_gprime.j:
        raise MismatchedJ(f"models have J={model_g.j} and J={model_gprime.j}")
    return model_g.j


def _compare_strata(strata_g, strata_gprime, j: int) -> DgorResult:
    """Sum the strict-inequality mass over every pair of terminal strata.

    Terms are accumulated product-by-product through an exact sum, so a
    symmetric input (identical regimes) yields p_gt == p_lt bitwise and a
    ratio of exactly 1.
    """
    gt_terms, lt_terms, eq_terms = [], [], []
    for w_ref, a in strata_gprime:          # a: reference regime pmf, index u
        for w_cmp, b in strata_g:           # b: comparison regime pmf, index s
            w = w_ref * w_cmp
            if w == 0:
                continue
            for u in range(j):
                au = a[u]
                if au == 0:
                    continue
                for s in range(j):
                    term = w * (au * b[s])
                    if s > u:
                        gt_terms.append(term)
                    elif s < u:
                        lt_terms.append(term)
                    else:
                        eq_terms.append(term)
    return _make_result(math.fsum(gt_terms), math.fsum(lt_terms), math.fsum(eq_terms))


def dgor_two_stage(model_g: TwoStageRegimeModel,
                   model_gprime: TwoStageRegimeModel) -> DgorResult:
    """dgor of ``model_g`` over ``model_gprime`` for two-stage regimes.

    Covers both distinct-path pairs and shared-path pairs: a shared-path
    comparison is the same computation with both models carrying the same
    response rate and responder distribution (see ``dgor_shared_path``).
    """
    j = _check_same_j(model_g, model_gprime)
    return _compare_strata(_strata_two_stage(model_g), _strata_two_stage(model_gprime), j)


def dgor_shared_path(response_rate: float,
                     responder_pmf,
                     nonresponder_pmf_ref,
                     nonresponder_pmf_cmp) -> DgorResult:
    """Convenience wrapper: compare two regimes sharing the initial treatment.

    First-stage responders contribute identically to both regimes, so only the
    non-responder distributions (and the common response rate) matter beyond
    the shared responder arm.
    """
    from .model import shared_path_pair

    ref, cmp_ = shared_path_pair(response_rate, responder_pmf,
                                 nonresponder_pmf_ref, nonresponder_pmf_cmp)
    return dgor_two_stage(cmp_, ref)


def dgor_matrix_form(model_g: TwoStageRegimeModel,
                     model_gprime: TwoStageRegimeModel) -> DgorResult:
    """Independent recomputation of ``dgor_two_stage`` via outer products.

    For each responder-status pair, the J x J outer product of the two arm
    pmfs is split into its strict upper triangle (comparison regime ahead),
    strict lower triangle, and diagonal (ties).
    """
    j = _check_same_j(model_g, model_gprime)
    p_gt = p_lt = p_eq = 0.0
    for w_ref, a in _strata_two_stage(model_gprime):
        av = np.asarray(a)
        for w_cmp, b in _strata_two_stage(model_g):
            w = w_ref * w_cmp
            outer = np.outer(av, np.asarray(b))   # rows: reference (u), cols: comparison (s)
            p_gt += w * float(np.triu(outer, k=1).sum())
            p_lt += w * float(np.tril(outer, k=-1).sum())
            p_eq += w * float(np.trace(outer))
    return _make_result(p_gt, p_lt, p_eq)


def dor_binary(model_g: TwoStageRegimeModel,
               model_gprime: TwoStageRegimeModel) -> DgorResult:
    """Dynamic odds ratio: the binary-outcome (J=2) special case.

    With both response rates at zero this reduces to the classical odds ratio
    of the two non-responder arms.
    """
    if model_g.j != 2 or model_gprime.j != 2:
        raise NotBinary(f"dor requires J=2, got J={model_g.j} and J={model_gprime.j}")
    num_terms, den_terms, eq_terms = [], [], []
    for w_ref, a in _strata_two_stage(model_gprime):
        for w_cmp, b in _strata_two_stage(model_g):
            w = w_ref * w_cmp
            num_terms.append(w * (a[0] * b[1]))
            den_terms.append(w * (a[1] * b[0]))
            eq_terms.append(w * (a[0] * b[0]))
            eq_terms.append(w * (a[1] * b[1]))
    return _make_result(math.fsum(num_terms), math.fsum(den_terms), math.fsum(eq_terms))


def dgor_kstage(model_g: KStageRegimeModel,
                model_gprime: KStageRegimeModel) -> DgorResult:
    """dgor between two K-stage regimes (K may differ between the two).

    Each regime contributes one terminal stratum per first-response stage plus
    a never-responder stratum; strata are weighted by their path probability
    and compared pairwise.
    """
    j = _check_same_j(model_g, model_gprime)
    strata_g = list(zip(model_g.stratum_weights(),
                        (p.probs for p in model_g.terminal_pmfs)))
    strata_gp = list(zip(model_gprime.stratum_weights(),
                         (p.probs for p in model_gprime.terminal_pmfs)))
    return _compare_strata(strata_g, strata_gp, j)


@dataclass(frozen=True)
class TheoremReport:
    """Outcome of the structural-equality checks relating dgor to response rates.

    ``condition`` is ``"matched_arms"`` when the two regimes share both the
    responder and the non-responder distributions, ``"crossed_arms"`` when each
    regime's responder distribution equals the other's non-responder
    distribution, else None. ``implied`` gives the direction the structure
    forces on the dgor ("one", "greater", "less", or "one_for_all_rates" when
    the discriminating triangle sums coincide); ``consistent`` records whether
    the computed dgor agrees.
    """

    condition: str | None
    triangle_upper: float | None
    triangle_lower: float | None
    rate_gap: float | None
    implied: str | None
    dgor: float
    consistent: bool


def _triangle_sums(a, b) -> tuple[float, float]:
    j = len(a)
    upper = math.fsum(a[u] * b[s] for u in range(j) for s in range(u + 1, j))
    lower = math.fsum(a[u] * b[s] for u in range(j) for s in range(u))
    return upper, lower


def _pmf_equal(x, y, tol: float = 1e-12) -> bool:
    return len(x) == len(y) and all(abs(p - q) <= tol for p, q in zip(x, y))


def theorem_conditions(model_g: TwoStageRegimeModel,
                       model_gprime: TwoStageRegimeModel,
                       tol: float = 1e-12) -> TheoremReport:
    """Check the matched-arms / crossed-arms structures and the implied dgor sign.

    Under matched arms the dgor equals 1 iff the response rates are equal, and
    otherwise its direction is the sign of (rate_cmp - rate_ref) times the sign
    of the (responder x non-responder) triangle-sum gap. Under crossed arms the
    same holds with the reference rate compared against 1 - rate_cmp.
    """
    result = dgor_two_stage(model_g, model_gprime)
    resp_ref = model_gprime.responder_pmf.probs
    non_ref = model_gprime.nonresponder_pmf.probs
    resp_cmp = model_g.responder_pmf.probs
    non_cmp = model_g.nonresponder_pmf.probs
    g_ref = model_gprime.response_rate
    g_cmp = model_g.response_rate

    if _pmf_equal(resp_ref, resp_cmp, tol) and _pmf_equal(non_ref, non_cmp, tol):
        condition = "matched_arms"
        upper, lower = _triangle_sums(resp_ref, non_cmp)
        rate_gap = g_ref - g_cmp
    elif _pmf_equal(resp_ref, non_cmp, tol) and _pmf_equal(non_ref, resp_cmp, tol):
        condition = "crossed_arms"
        upper, lower = _triangle_sums(resp_ref, resp_cmp)
        rate_gap = g_ref - (1 - g_cmp)
    else:
        return TheoremReport(condition=None, triangle_upper=None, triangle_lower=None,
                             rate_gap=None, implied=None, dgor=result.dgor,
                             consistent=True)

    if abs(upper - lower) <= tol:
        implied = "one_for_all_rates"
    elif abs(rate_gap) <= tol:
        implied = "one"
    else:
        # The comparison regime beats the reference exactly when the rate gap
        # and the triangle gap share a sign.
        sign = (1 if upper > lower else -1) * (1 if rate_gap > 0 else -1)
        implied = "greater" if sign > 0 else "less"

    if implied in ("one", "one_for_all_rates"):
        consistent = abs(result.dgor - 1.0) <= 1e-9
    elif implied == "greater":
        consistent = result.dgor > 1.0
    else:
        consistent = result.dgor < 1.0
    return TheoremReport(condition=condition, triangle_upper=upper, triangle_lower=lower,
                         rate_gap=rate_gap, implied=implied, dgor=result.dgor,
                         consistent=consistent)
