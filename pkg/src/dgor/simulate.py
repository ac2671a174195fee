"""Synthetic trial generation, Monte Carlo oracles, and replication studies.

Randomness is counter-based and splittable: every replication draws from a
Philox stream keyed by (seed, replication index), so sequential and parallel
executions of the same scenario produce bit-identical reports.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import engine, inference
from .errors import (
    AllReplicationsFailed,
    IncompleteTruth,
    InvalidDesign,
    NotThreeCategories,
    OutOfRange,
)
from .model import (
    ArmKey,
    KStageRegimeModel,
    OrdinalPmf,
    SmartDataset,
    SmartDesign,
    Trajectory,
    TwoStageRegimeModel,
)


def rng_for(seed: int, replication: int = 0) -> np.random.Generator:
    """Philox generator on the stream keyed by (seed, replication)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(replication,))
    return np.random.Generator(np.random.Philox(ss))


# --------------------------------------------------------------------------
# Trial generation


@dataclass(frozen=True)
class TrialTruth:
    """Generating parameters for one trial: a response rate per stage-1 arm
    and an outcome pmf per terminal arm."""

    response_rates: Mapping[str, float]
    arm_pmfs: Mapping[ArmKey, OrdinalPmf]
    j: int


def truth_from_models(design: SmartDesign,
                      model_g: TwoStageRegimeModel,
                      model_gprime: TwoStageRegimeModel) -> TrialTruth:
    """Assemble full-trial truth from the two compared regimes.

    Design arms not visited by either regime receive a uniform placeholder
    pmf: they influence the randomization split only, never any statistic of
    the comparison.
    """
    j = model_g.j
    rates: dict[str, float] = {}
    pmfs: dict[ArmKey, OrdinalPmf] = {}
    for model in (model_gprime, model_g):
        t1 = model.labels[0]
        if t1 in rates and abs(rates[t1] - model.response_rate) > 1e-12:
            raise InvalidDesign(f"conflicting response rates for stage-1 arm {t1!r}")
        rates[t1] = model.response_rate
        resp_key = model.responder_arm
        if resp_key in pmfs and pmfs[resp_key].probs != model.responder_pmf.probs:
            raise InvalidDesign(f"conflicting responder pmfs for arm {t1!r}")
        pmfs[resp_key] = model.responder_pmf
        pmfs[model.nonresponder_arm] = model.nonresponder_pmf
    uniform = OrdinalPmf(tuple(1.0 / j for _ in range(j)))
    for t1 in design.stage1_arms:
        rates.setdefault(t1, 0.5)
        pmfs.setdefault((t1,), uniform)
        for t2 in design.stage2_options[t1]:
            pmfs.setdefault((t1, t2), uniform)
    return TrialTruth(response_rates=rates, arm_pmfs=pmfs, j=j)


def design_for_pair(model_g: TwoStageRegimeModel,
                    model_gprime: TwoStageRegimeModel) -> SmartDesign:
    """Canonical restricted trial containing both regimes: two initial
    treatments, two stage-2 options per non-responder node."""

    def other_option(label: str, taken: Sequence[str]) -> str:
        for candidate in ("E", "F", "G", "H"):
            if candidate != label and candidate not in taken:
                return candidate
        return label + "_alt"

    stage1 = []
    options: dict[str, tuple[str, ...]] = {}
    for model in (model_gprime, model_g):
        t1, t2 = model.labels
        if t1 not in stage1:
            stage1.append(t1)
            options[t1] = (t2,)
        elif t2 not in options[t1]:
            options[t1] = options[t1] + (t2,)
    if len(stage1) == 1:
        stage1.append("_other")
        options["_other"] = ("_x", "_y")
    for t1 in stage1:
        while len(options[t1]) < 2:
            options[t1] = options[t1] + (other_option(options[t1][0], options[t1]),)
    return SmartDesign(stage1_arms=tuple(stage1), stage2_options=options)


def _draw_trial_arrays(design: SmartDesign, truth: TrialTruth, n: int,
                       rng: np.random.Generator):
    """Vectorized trial draw; consumes exactly 4n uniforms."""
    stage1_arms = list(design.stage1_arms)
    p1 = np.array([design.stage1_probability(a) for a in stage1_arms])
    cdf1 = np.cumsum(p1)
    cdf1[-1] = 1.0
    gammas = np.array([truth.response_rates[a] for a in stage1_arms])

    arm_list = design.arms()
    arm_index = {arm: i for i, arm in enumerate(arm_list)}
    cdfs = np.empty((len(arm_list), truth.j))
    for arm, i in arm_index.items():
        if arm not in truth.arm_pmfs:
            raise IncompleteTruth(f"no outcome pmf for arm {','.join(arm)}")
        cdfs[i] = np.cumsum(truth.arm_pmfs[arm].probs)
        cdfs[i, -1] = 1.0

    u1 = rng.random(n)
    u2 = rng.random(n)
    u3 = rng.random(n)
    u4 = rng.random(n)

    s1_idx = np.searchsorted(cdf1, u1, side="left")
    responder = u2 < gammas[s1_idx]

    arm_ids = np.empty(n, dtype=np.int64)
    for i, t1 in enumerate(stage1_arms):
        in_arm = s1_idx == i
        resp_mask = in_arm & responder
        arm_ids[resp_mask] = arm_index[(t1,)]
        opts = design.stage2_options[t1]
        probs = np.cumsum([design.stage2_probability(t1, t2) for t2 in opts])
        probs[-1] = 1.0
        nonresp_mask = in_arm & ~responder
        choice = np.searchsorted(probs, u3[nonresp_mask], side="left")
        ids = np.array([arm_index[(t1, t2)] for t2 in opts])
        arm_ids[nonresp_mask] = ids[choice]

    outcome = (u4[:, None] > cdfs[arm_ids]).sum(axis=1) + 1
    return s1_idx, responder, arm_ids, outcome.astype(np.int64), arm_list, stage1_arms


def generate_trial(design: SmartDesign, truth: TrialTruth, n: int,
                   seed: int) -> SmartDataset:
    """Simulate a restricted SMART of ``n`` patients; deterministic in ``seed``."""
    if n < 2:
        raise OutOfRange(f"trial size must be at least 2, got {n}")
    for t1 in design.stage1_arms:
        if t1 not in truth.response_rates:
            raise IncompleteTruth(f"no response rate for stage-1 arm {t1!r}")
    rng = rng_for(seed)
    s1_idx, responder, arm_ids, outcome, arm_list, stage1_arms = _draw_trial_arrays(
        design, truth, n, rng)
    width = len(str(n))
    rows = []
    for i in range(n):
        arm = arm_list[arm_ids[i]]
        t1 = stage1_arms[s1_idx[i]]
        t2 = t1 if responder[i] else arm[1]
        rows.append(Trajectory(
            patient_id=f"p{i + 1:0{width}d}",
            stage1=t1,
            responder=bool(responder[i]),
            stage2=t2,
            outcome=int(outcome[i]),
        ))
    return SmartDataset(design=design, trajectories=tuple(rows), j=truth.j)


# --------------------------------------------------------------------------
# Monte Carlo oracle


def _model_strata(model) -> tuple[np.ndarray, np.ndarray]:
    """(stratum cdf, per-stratum outcome cdf matrix) for either model kind."""
    if isinstance(model, TwoStageRegimeModel):
        model = model.to_kstage()
    weights = np.cumsum(model.stratum_weights())
    weights[-1] = 1.0
    cdfs = np.empty((model.k, model.j))
    for i, pmf in enumerate(model.terminal_pmfs):
        cdfs[i] = np.cumsum(pmf.probs)
        cdfs[i, -1] = 1.0
    return weights, cdfs


def oracle_comparison_counts(model_g, model_gprime, pop_size: int,
                             seed: int) -> tuple[int, int, int]:
    """Simulate ``pop_size`` independent outcome pairs and count each order."""
    if pop_size < 10_000:
        raise OutOfRange(f"oracle population must be at least 10^4, got {pop_size}")
    rng = rng_for(seed)
    n_gt = n_lt = n_eq = 0
    chunk = 1 << 20
    remaining = pop_size
    strata_g, cdfs_g = _model_strata(model_g)
    strata_p, cdfs_p = _model_strata(model_gprime)
    while remaining > 0:
        m = min(chunk, remaining)
        remaining -= m
        sg = np.searchsorted(strata_g, rng.random(m), side="left")
        yg = (rng.random(m)[:, None] > cdfs_g[sg]).sum(axis=1)
        sp = np.searchsorted(strata_p, rng.random(m), side="left")
        yp = (rng.random(m)[:, None] > cdfs_p[sp]).sum(axis=1)
        n_gt += int((yg > yp).sum())
        n_lt += int((yg < yp).sum())
        n_eq += int((yg == yp).sum())
    return n_gt, n_lt, n_eq


def population_dgor_oracle(model_g, model_gprime, pop_size: int = 10 ** 6,
                           seed: int = 0) -> float:
    """Monte Carlo dgor from a large simulated population of outcome pairs.

    Independent of the exact engine's algebra: draws each regime's stratum and
    outcome directly and returns the strict-greater over strict-less count
    ratio. Serves as the oracle the engine is checked against.
    """
    n_gt, n_lt, _ = oracle_comparison_counts(model_g, model_gprime, pop_size, seed)
    if n_lt == 0:
        return math.inf
    return n_gt / n_lt


# --------------------------------------------------------------------------
# Replication studies


@dataclass(frozen=True)
class StudyScenario:
    """One simulation study: truth pair, test levels, size, replications, seed."""

    model_g: TwoStageRegimeModel | KStageRegimeModel
    model_gprime: TwoStageRegimeModel | KStageRegimeModel
    shared: bool = False
    alpha: float = 0.05
    power_target: float = 0.80
    n_override: int | None = None
    replications: int = 5000
    seed: int = 0

    def __post_init__(self):
        if self.replications < 1:
            raise OutOfRange("need at least one replication")
        if not 0 < self.alpha < 1 or not 0 < self.power_target < 1:
            raise OutOfRange("alpha and power must lie in (0,1)")
        kstage = isinstance(self.model_g, KStageRegimeModel)
        if kstage != isinstance(self.model_gprime, KStageRegimeModel):
            raise InvalidDesign("both truth models must be the same kind")
        if kstage and self.shared:
            raise InvalidDesign("replication studies support K-stage comparisons "
                                "with distinct initial treatments only")
        if not kstage:
            same_start = self.model_g.labels[0] == self.model_gprime.labels[0]
            if self.shared != same_start:
                raise InvalidDesign(
                    "shared flag does not match the models' initial treatments")


@dataclass(frozen=True)
class StudyReport:
    true_dgor: float
    n_used: int
    replications: int
    mean_dgor_hat: float
    sse: float
    mean_ase: float
    power_hat: float
    coverage_hat: float
    failures: int


def _planned_n(scenario: StudyScenario) -> int:
    if scenario.n_override is not None:
        return scenario.n_override
    return inference.sample_size_from_models(
        scenario.model_g, scenario.model_gprime, scenario.shared,
        scenario.alpha, scenario.power_target)


def _replicate_two_stage(scenario: StudyScenario, n: int, z_crit: float,
                         log_eta_true: float, start: int, stop: int) -> list[tuple]:
    """Per-replication records for replications start..stop-1.

    Record: (ok, eta_hat, ase, reject, cover). Failed replications (empty arm
    or one-sided concordance) carry ok=False and count as non-rejections.
    """
    model_g = scenario.model_g
    model_gp = scenario.model_gprime
    design = design_for_pair(model_g, model_gp)
    truth = truth_from_models(design, model_g, model_gp)
    arm_list = design.arms()
    j = truth.j
    need = [model_gp.responder_arm, model_gp.nonresponder_arm,
            model_g.responder_arm, model_g.nonresponder_arm]
    need_ids = [arm_list.index(a) for a in need]
    stage1_arms = list(design.stage1_arms)
    records = []
    for rep in range(start, stop):
        rng = rng_for(scenario.seed, rep)
        s1_idx, responder, arm_ids, outcome, _, _ = _draw_trial_arrays(
            design, truth, n, rng)
        hist = np.bincount(arm_ids * j + (outcome - 1),
                           minlength=len(arm_list) * j).reshape(len(arm_list), j)
        arm_n = hist.sum(axis=1)
        if any(arm_n[i] == 0 for i in need_ids):
            records.append((False, 0.0, 0.0, False, False))
            continue
        stage1_totals = np.bincount(s1_idx, minlength=len(stage1_arms))

        def fitted(model) -> TwoStageRegimeModel:
            t1 = model.labels[0]
            i1 = stage1_arms.index(t1)
            resp_id = arm_list.index(model.responder_arm)
            non_id = arm_list.index(model.nonresponder_arm)
            return TwoStageRegimeModel(
                response_rate=arm_n[resp_id] / stage1_totals[i1],
                responder_pmf=OrdinalPmf(tuple(hist[resp_id] / arm_n[resp_id])),
                nonresponder_pmf=OrdinalPmf(tuple(hist[non_id] / arm_n[non_id])),
                labels=model.labels,
            )

        fit_g, fit_gp = fitted(model_g), fitted(model_gp)
        res = engine.dgor_two_stage(fit_g, fit_gp)
        if res.log_dgor is None or res.p_lt <= 0 or res.p_gt <= 0:
            records.append((False, 0.0, 0.0, False, False))
            continue
        weights = inference.DesignWeights(
            weights={arm: arm_n[i] / n for i, arm in enumerate(arm_list)},
            source="observed-counts")
        try:
            if scenario.shared:
                sigma2 = inference.asymptotic_variance_sp(fit_g, fit_gp, weights)
            else:
                sigma2 = inference.asymptotic_variance_dp(fit_g, fit_gp, weights)
        except Exception:
            records.append((False, 0.0, 0.0, False, False))
            continue
        se_log = math.sqrt(sigma2) / res.dgor / math.sqrt(n)
        if se_log <= 0 or not math.isfinite(se_log):
            records.append((False, 0.0, 0.0, False, False))
            continue
        reject = abs(res.log_dgor / se_log) > z_crit
        cover = (res.log_dgor - z_crit * se_log) <= log_eta_true <= (res.log_dgor + z_crit * se_log)
        records.append((True, res.dgor, res.dgor * se_log, reject, cover))
    return records


def _replicate_kstage(scenario: StudyScenario, n: int, z_crit: float,
                      log_eta_true: float, start: int, stop: int) -> list[tuple]:
    """K-stage distinct-path replications.

    Trial structure: initial 50:50 split; at each later stage, non-responders
    are randomized with probability 1/2 to stay on the regime's path. Stage
    response rates are estimated from the at-risk patients on the path.
    """
    model_g: KStageRegimeModel = scenario.model_g
    model_gp: KStageRegimeModel = scenario.model_gprime
    j = model_g.j
    records = []
    for rep in range(start, stop):
        rng = rng_for(scenario.seed, rep)
        n_ref = int(rng.binomial(n, 0.5))
        sides = []
        ok = True
        for model, n_side in ((model_gp, n_ref), (model_g, n - n_ref)):
            at_risk = n_side
            gammas_hat = []
            stratum_counts = []
            for gamma in model.stage_response_rates:
                if at_risk == 0:
                    ok = False
                    break
                resp = int(rng.binomial(at_risk, gamma))
                gammas_hat.append(resp / at_risk)
                stratum_counts.append(resp)
                nonresp = at_risk - resp
                at_risk = int(rng.binomial(nonresp, 0.5))
            if not ok:
                break
            stratum_counts.append(at_risk)
            if any(c == 0 for c in stratum_counts):
                ok = False
                break
            pmf_hats = []
            for count, pmf in zip(stratum_counts, model.terminal_pmfs):
                draws = rng.multinomial(count, pmf.probs)
                pmf_hats.append(OrdinalPmf(tuple(draws / count)))
            sides.append((model, gammas_hat, pmf_hats, stratum_counts))
        if not ok:
            records.append((False, 0.0, 0.0, False, False))
            continue
        fit_models = []
        weight_map: dict[ArmKey, float] = {}
        for model, gammas_hat, pmf_hats, counts in sides:
            fit = KStageRegimeModel(
                stage_response_rates=tuple(gammas_hat),
                terminal_pmfs=tuple(pmf_hats),
                labels=model.labels,
            )
            fit_models.append(fit)
            for idx, c in enumerate(counts):
                weight_map[fit.stratum_key(idx)] = c / n
        fit_gp, fit_g = fit_models
        res = engine.dgor_kstage(fit_g, fit_gp)
        if res.log_dgor is None or res.p_lt <= 0 or res.p_gt <= 0:
            records.append((False, 0.0, 0.0, False, False))
            continue
        weights = inference.DesignWeights(weights=weight_map, source="observed-counts")
        try:
            sigma2 = inference.asymptotic_variance_kstage(fit_g, fit_gp, weights)
        except Exception:
            records.append((False, 0.0, 0.0, False, False))
            continue
        se_log = math.sqrt(sigma2) / res.dgor / math.sqrt(n)
        reject = abs(res.log_dgor / se_log) > z_crit
        cover = (res.log_dgor - z_crit * se_log) <= log_eta_true <= (res.log_dgor + z_crit * se_log)
        records.append((True, res.dgor, res.dgor * se_log, reject, cover))
    return records


def _study_records(scenario: StudyScenario, n: int, start: int, stop: int) -> list[tuple]:
    z_crit = inference.inverse_normal_cdf(1 - scenario.alpha / 2)
    kstage = isinstance(scenario.model_g, KStageRegimeModel)
    if kstage:
        true_res = engine.dgor_kstage(scenario.model_g, scenario.model_gprime)
        log_eta_true = true_res.require_log()
        return _replicate_kstage(scenario, n, z_crit, log_eta_true, start, stop)
    true_res = engine.dgor_two_stage(scenario.model_g, scenario.model_gprime)
    log_eta_true = true_res.require_log()
    return _replicate_two_stage(scenario, n, z_crit, log_eta_true, start, stop)


def run_study(scenario: StudyScenario, workers: int = 1) -> StudyReport:
    """Run the scenario's replications and aggregate the usual summaries.

    Degenerate replications (an empty needed arm, or concordance mass on one
    side only) are reported in ``failures``: they count as non-rejections for
    power and are excluded from the moment and coverage summaries. Reports are
    identical for any ``workers`` value thanks to per-replication RNG streams.
    """
    kstage = isinstance(scenario.model_g, KStageRegimeModel)
    if kstage:
        true_dgor = engine.dgor_kstage(scenario.model_g, scenario.model_gprime).dgor
    else:
        true_dgor = engine.dgor_two_stage(scenario.model_g, scenario.model_gprime).dgor
    n = _planned_n(scenario)
    reps = scenario.replications
    if workers <= 1:
        records = _study_records(scenario, n, 0, reps)
    else:
        bounds = np.linspace(0, reps, workers + 1).astype(int)
        chunks = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if a < b]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_study_records, scenario, n, a, b) for a, b in chunks]
            records = []
            for fut in futures:
                records.extend(fut.result())
    kept = [r for r in records if r[0]]
    failures = len(records) - len(kept)
    if not kept:
        raise AllReplicationsFailed(f"all {reps} replications were degenerate")
    etas = [r[1] for r in kept]
    ases = [r[2] for r in kept]
    rejects = sum(1 for r in kept if r[3])
    covers = sum(1 for r in kept if r[4])
    mean_eta = math.fsum(etas) / len(etas)
    if len(etas) > 1:
        sse = math.sqrt(math.fsum((e - mean_eta) ** 2 for e in etas) / (len(etas) - 1))
    else:
        sse = 0.0
    return StudyReport(
        true_dgor=true_dgor,
        n_used=n,
        replications=reps,
        mean_dgor_hat=mean_eta,
        sse=sse,
        mean_ase=math.fsum(ases) / len(ases),
        power_hat=rejects / reps,
        coverage_hat=covers / len(kept),
        failures=failures,
    )


# --------------------------------------------------------------------------
# Barycentric coordinates

_SQRT3_2 = math.sqrt(3.0) / 2.0


def barycentric_coords(pmf: OrdinalPmf) -> tuple[float, float]:
    """Equilateral-triangle embedding of a 3-category pmf.

    Vertices: category 1 at (0,0), category 2 at (1,0), category 3 at
    (1/2, sqrt(3)/2); a pmf maps to its probability-weighted vertex average.
    """
    if pmf.j != 3:
        raise NotThreeCategories(f"barycentric coordinates need J=3, got J={pmf.j}")
    p1, p2, p3 = pmf.probs
    return (p2 + 0.5 * p3, _SQRT3_2 * p3)


def coords_csv(points: Sequence[tuple[str, OrdinalPmf]]) -> str:
    """``label,x,y`` lines for external plotting."""
    lines = ["label,x,y"]
    for label, pmf in points:
        x, y = barycentric_coords(pmf)
        lines.append(f"{label},{x!r},{y!r}")
    return "\n".join(lines) + "\n"
