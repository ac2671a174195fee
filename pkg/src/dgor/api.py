"""Request handling shared by the CLI and the HTTP service.

Each handler takes a plain dict (parsed flags or a JSON body), validates it,
runs the computation, and returns a JSON-ready dict. Keeping one code path
guarantees the two entry points emit byte-identical documents for identical
logical inputs.
"""
from __future__ import annotations

import math
from typing import Mapping, Sequence

from . import engine, inference, simulate
from .engine import DgorResult
from .errors import DgorError, UsageError
from .model import (
    KStageRegimeModel,
    OrdinalPmf,
    TwoStageRegimeModel,
    shared_path_pair,
    validate_pmf,
)
from .serialize import jsonable

DEFAULT_ALPHA = 0.05
DEFAULT_POWER = 0.80


def _require(payload: Mapping, key: str):
    if key not in payload or payload[key] is None:
        raise UsageError(f"missing required field {key!r}")
    return payload[key]


def _as_pmf(value, tol: float) -> OrdinalPmf:
    if isinstance(value, str):
        try:
            value = [float(part) for part in value.split(",")]
        except ValueError:
            raise UsageError(f"cannot parse probability list from {value!r}")
    if not isinstance(value, Sequence):
        raise UsageError(f"expected a probability list, got {value!r}")
    return validate_pmf(value, tol=tol)


def _as_rate(value, name: str) -> float:
    try:
        rate = float(value)
    except (TypeError, ValueError):
        raise UsageError(f"{name} must be a number, got {value!r}")
    return rate


def parse_models(payload: Mapping) -> tuple[object, object, bool, str]:
    """Build (model_cmp, model_ref, shared, mode) from a request payload.

    Distinct mode wants gamma1/resp1/nonresp1 (reference regime) and
    gamma2/resp2/nonresp2 (comparison); shared mode wants gamma/resp plus the
    two non-responder pmfs; kstage mode wants gammas1/pmfs1 and gammas2/pmfs2.
    """
    mode = payload.get("mode", "distinct")
    tol = float(payload.get("pmf_tol", 1e-9))
    if mode == "shared":
        gamma = _as_rate(_require(payload, "gamma"), "gamma")
        resp = _as_pmf(_require(payload, "resp"), tol)
        non1 = _as_pmf(_require(payload, "nonresp1"), tol)
        non2 = _as_pmf(_require(payload, "nonresp2"), tol)
        ref, cmp_ = shared_path_pair(gamma, resp, non1, non2)
        return cmp_, ref, True, mode
    if mode == "distinct":
        ref = TwoStageRegimeModel(
            response_rate=_as_rate(_require(payload, "gamma1"), "gamma1"),
            responder_pmf=_as_pmf(_require(payload, "resp1"), tol),
            nonresponder_pmf=_as_pmf(_require(payload, "nonresp1"), tol),
            labels=tuple(payload.get("labels1", ("A", "E"))),
        )
        cmp_ = TwoStageRegimeModel(
            response_rate=_as_rate(_require(payload, "gamma2"), "gamma2"),
            responder_pmf=_as_pmf(_require(payload, "resp2"), tol),
            nonresponder_pmf=_as_pmf(_require(payload, "nonresp2"), tol),
            labels=tuple(payload.get("labels2", ("B", "E"))),
        )
        if ref.labels[0] == cmp_.labels[0]:
            raise UsageError("distinct-path regimes need different stage-1 labels; "
                             "use shared mode for a common initial treatment")
        return cmp_, ref, False, mode
    if mode == "kstage":
        def kmodel(which: str, default_labels: str) -> KStageRegimeModel:
            gammas = _require(payload, f"gammas{which}")
            if isinstance(gammas, str):
                gammas = [float(g) for g in gammas.split(",")]
            pmfs = _require(payload, f"pmfs{which}")
            if isinstance(pmfs, str):
                pmfs = [p for p in pmfs.split(";") if p]
            labels = payload.get(f"labels{which}")
            return KStageRegimeModel(
                stage_response_rates=tuple(float(g) for g in gammas),
                terminal_pmfs=tuple(_as_pmf(p, tol) for p in pmfs),
                labels=tuple(labels) if labels else tuple(
                    f"{default_labels}{i+1}" for i in range(len(pmfs))),
            )

        ref = kmodel("1", "A")
        cmp_ = kmodel("2", "B")
        return cmp_, ref, False, mode
    raise UsageError(f"unknown mode {mode!r}; expected distinct, shared, or kstage")


def _result_dict(result: DgorResult) -> dict:
    return {
        "p_gt": result.p_gt,
        "p_lt": result.p_lt,
        "p_eq": result.p_eq,
        "dgor": None if not math.isfinite(result.dgor) else result.dgor,
        "log_dgor": result.log_dgor,
        "warnings": list(result.warnings),
    }


def compute_request(payload: Mapping) -> dict:
    """dgor (and optional Wald inference when ``n`` is supplied)."""
    model_cmp, model_ref, shared, mode = parse_models(payload)
    if mode == "kstage":
        result = engine.dgor_kstage(model_cmp, model_ref)
    else:
        result = engine.dgor_two_stage(model_cmp, model_ref)
    out = _result_dict(result)
    out["mode"] = mode
    n = payload.get("n")
    if n is not None:
        alpha = float(payload.get("alpha", DEFAULT_ALPHA))
        if mode == "kstage":
            weights = inference.kstage_design_weights(model_cmp, model_ref)
            sigma2 = inference.asymptotic_variance_kstage(model_cmp, model_ref, weights)
        else:
            weights = inference.pair_design_weights(model_cmp, model_ref, shared)
            if shared:
                sigma2 = inference.asymptotic_variance_sp(model_cmp, model_ref, weights)
            else:
                sigma2 = inference.asymptotic_variance_dp(model_cmp, model_ref, weights)
        inf_res = inference.wald_inference(result.require_log(), sigma2,
                                           result.dgor, int(n), alpha)
        out["inference"] = jsonable(inf_res)
    return out


def samplesize_request(payload: Mapping) -> dict:
    """Total N from a standardized effect size or from full regime models."""
    alpha = float(payload.get("alpha", DEFAULT_ALPHA))
    power = float(payload.get("power", DEFAULT_POWER))
    if payload.get("es") is not None:
        es = float(payload["es"])
        n = inference.sample_size(es, alpha, power)
        return {"n": n, "es": es, "alpha": alpha, "power": power}
    model_cmp, model_ref, shared, mode = parse_models(payload)
    plan = inference.plan_from_models(model_cmp, model_ref, shared, alpha, power)
    return {
        "n": plan.n,
        "es": plan.effect_size,
        "dgor": plan.dgor,
        "log_dgor": plan.log_dgor,
        "sigma_eta": plan.sigma_eta,
        "sigma_log": plan.sigma_log,
        "alpha": alpha,
        "power": power,
        "mode": mode,
    }


def coords_request(payload: Mapping) -> dict:
    """Barycentric plane coordinates for J=3 pmfs."""
    pmf_entries = _require(payload, "pmfs")
    if not isinstance(pmf_entries, Sequence) or isinstance(pmf_entries, str):
        raise UsageError("pmfs must be a list of {label, probs} entries")
    tol = float(payload.get("pmf_tol", 1e-9))
    points = []
    for i, entry in enumerate(pmf_entries):
        if isinstance(entry, Mapping):
            label = str(entry.get("label", f"pmf{i+1}"))
            probs = _require(entry, "probs")
        else:
            label, probs = f"pmf{i+1}", entry
        pmf = _as_pmf(probs, tol)
        x, y = simulate.barycentric_coords(pmf)
        points.append({"label": label, "x": x, "y": y})
    return {"points": points}


def error_document(exc: DgorError) -> dict:
    return {"code": exc.code, "message": str(exc)}
