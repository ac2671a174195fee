"""Command-line interface.

Subcommands: compute, estimate, samplesize, simulate, policy, coords, serve.
All outputs are JSON documents produced by the same serialization path the
HTTP service uses; `--format table` renders a small human-readable view.
Commands are deterministic; the only source of randomness is `simulate`,
which takes `--seed`.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import api, estimate, inference, policy, serialize, simulate
from .errors import DgorError, UsageError
from .estimate import RegimeSpec
from .ingest import ingest_stard_like
from .model import (
    KStageRegimeModel,
    SmartDataset,
    SmartDesign,
    TwoStageRegimeModel,
    read_continuous_trajectories,
    read_trajectories,
    validate_pmf,
)


def _add_two_stage_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--distinct", action="store_true", help="compare regimes with different initial treatments")
    p.add_argument("--shared", action="store_true", help="compare regimes sharing the initial treatment")
    p.add_argument("--kstage", action="store_true", help="compare K-stage regimes")
    p.add_argument("--gamma", type=float, help="shared mode: common response rate")
    p.add_argument("--resp", help="shared mode: responder pmf, comma separated")
    p.add_argument("--gamma1", type=float, help="reference regime response rate")
    p.add_argument("--resp1", help="reference regime responder pmf")
    p.add_argument("--nonresp1", help="reference regime non-responder pmf")
    p.add_argument("--gamma2", type=float, help="comparison regime response rate")
    p.add_argument("--resp2", help="comparison regime responder pmf")
    p.add_argument("--nonresp2", help="comparison regime non-responder pmf")
    p.add_argument("--gammas1", help="kstage mode: reference stage response rates")
    p.add_argument("--pmfs1", help="kstage mode: reference terminal pmfs, ';' separated")
    p.add_argument("--gammas2", help="kstage mode: comparison stage response rates")
    p.add_argument("--pmfs2", help="kstage mode: comparison terminal pmfs, ';' separated")
    p.add_argument("--pmf-tol", type=float, default=1e-9,
                   help="tolerance on pmf sums before exact renormalization "
                        "(use e.g. 0.02 for published tables rounded to 2 decimals)")


def _payload_from_flags(args) -> dict:
    modes = [m for m, on in (("distinct", args.distinct), ("shared", args.shared),
                             ("kstage", args.kstage)) if on]
    if len(modes) > 1:
        raise UsageError("choose exactly one of --distinct, --shared, --kstage")
    mode = modes[0] if modes else ("shared" if args.gamma is not None else "distinct")
    payload = {"mode": mode, "pmf_tol": args.pmf_tol}
    for key in ("gamma", "resp", "gamma1", "resp1", "nonresp1",
                "gamma2", "resp2", "nonresp2",
                "gammas1", "pmfs1", "gammas2", "pmfs2"):
        value = getattr(args, key)
        if value is not None:
            payload[key] = value
    return payload


def _emit(args, document: dict) -> None:
    if getattr(args, "format", "json") == "table":
        for key, value in document.items():
            print(f"{key}: {value}")
    else:
        print(serialize.dumps(document))


def _cmd_compute(args) -> int:
    payload = _payload_from_flags(args)
    if args.n is not None:
        payload["n"] = args.n
    payload["alpha"] = args.alpha
    _emit(args, api.compute_request(payload))
    return 0


def _cmd_samplesize(args) -> int:
    payload = _payload_from_flags(args)
    payload["alpha"] = args.alpha
    payload["power"] = args.power
    if args.es is not None:
        payload["es"] = args.es
    _emit(args, api.samplesize_request(payload))
    return 0


def _infer_design(rows) -> SmartDesign:
    stage1, options = [], {}
    for t in rows:
        if t.stage1 not in stage1:
            stage1.append(t.stage1)
            options[t.stage1] = []
        if not t.responder and t.stage2 not in options[t.stage1]:
            options[t.stage1].append(t.stage2)
    return SmartDesign(
        stage1_arms=tuple(stage1),
        stage2_options={k: tuple(v) if v else (k,) for k, v in options.items()},
    )


def _load_dataset(args) -> SmartDataset:
    text = open(args.input, encoding="utf-8").read()
    if getattr(args, "qol_stages", False):
        design = _design_from_text(text, qol=True)
        return ingest_stard_like(text, design)
    design = _design_from_text(text, qol=False)
    j = args.categories
    if j is None:
        import csv as _csv
        import io as _io
        j = max(int(row["outcome"]) for row in _csv.DictReader(_io.StringIO(text)))
    return read_trajectories(text, design, j)


def _design_from_text(text: str, qol: bool) -> SmartDesign:
    import csv as _csv
    import io as _io

    class Row:
        def __init__(self, d):
            self.stage1 = d["stage1"]
            self.responder = d["responder"] == "1"
            self.stage2 = d["stage2"]

    rows = [Row(d) for d in _csv.DictReader(_io.StringIO(text))]
    if qol:
        # responders continue stage 1 whatever the file says (e.g. a follow-up label)
        for r in rows:
            if r.responder:
                r.stage2 = r.stage1
    return _infer_design(rows)


def _cmd_estimate(args) -> int:
    regime_g = RegimeSpec.parse(args.regime2)
    regime_gp = RegimeSpec.parse(args.regime1)
    if args.continuous:
        design_text = open(args.input, encoding="utf-8").read()
        data = read_continuous_trajectories(design_text, _design_from_text(design_text, qol=False))
        rates = None
        if args.rates:
            rates = {}
            for item in args.rates.split(","):
                label, value = item.split("=")
                rates[label] = float(value)
        p_hat, result = estimate.estimate_p_ustat(data, regime_g, regime_gp, rates)
        doc = {"method": "ustat", "p_gt_hat": p_hat}
        doc.update(api._result_dict(result))
        _emit(args, doc)
        return 0
    data = _load_dataset(args)
    fit = estimate.fit_mle(data)
    if args.method == "concordance":
        result = estimate.estimate_dgor_concordance(data, regime_g, regime_gp,
                                                    weighting=args.weighting)
    else:
        result = estimate.estimate_dgor_plugin(fit, regime_g, regime_gp)
    doc = {"method": args.method, "n": data.n}
    doc.update(api._result_dict(result))
    if result.log_dgor is not None:
        model_g = fit.regime_model(regime_g)
        model_gp = fit.regime_model(regime_gp)
        weights = inference.observed_weights(fit.arm_counts, fit.total_n)
        shared = regime_g.stage1 == regime_gp.stage1
        if shared:
            sigma2 = inference.asymptotic_variance_sp(model_g, model_gp, weights)
        else:
            sigma2 = inference.asymptotic_variance_dp(model_g, model_gp, weights)
        doc["inference"] = serialize.jsonable(inference.wald_inference(
            result.log_dgor, sigma2, result.dgor, data.n, args.alpha))
    _emit(args, doc)
    return 0


def _scenario_from_file(path: str) -> simulate.StudyScenario:
    spec = json.load(open(path, encoding="utf-8"))
    regimes = spec.get("regimes")
    if not regimes or len(regimes) != 2:
        raise UsageError("scenario file needs exactly two entries under 'regimes'")

    def build(entry, default_s1, default_s2):
        return TwoStageRegimeModel(
            response_rate=float(entry["gamma"]),
            responder_pmf=validate_pmf(entry["resp"], tol=float(entry.get("pmf_tol", 1e-9))),
            nonresponder_pmf=validate_pmf(entry["nonresp"], tol=float(entry.get("pmf_tol", 1e-9))),
            labels=(entry.get("stage1", default_s1), entry.get("stage2", default_s2)),
        )

    ref = build(regimes[0], "A", "E")
    shared_guess = regimes[1].get("stage1", "B" if regimes[0].get("stage1", "A") != "B" else "B2")
    cmp_ = build(regimes[1], shared_guess, "F")
    shared = ref.labels[0] == cmp_.labels[0]
    return simulate.StudyScenario(
        model_g=cmp_,
        model_gprime=ref,
        shared=shared,
        alpha=float(spec.get("alpha", api.DEFAULT_ALPHA)),
        power_target=float(spec.get("power", api.DEFAULT_POWER)),
        n_override=spec.get("n"),
        replications=int(spec.get("replications", 5000)),
        seed=int(spec.get("seed", 0)),
    )


def _cmd_simulate(args) -> int:
    if args.scenario:
        scenario = _scenario_from_file(args.scenario)
        if args.replications is not None:
            scenario = simulate.StudyScenario(
                model_g=scenario.model_g, model_gprime=scenario.model_gprime,
                shared=scenario.shared, alpha=scenario.alpha,
                power_target=scenario.power_target, n_override=scenario.n_override,
                replications=args.replications,
                seed=args.seed if args.seed is not None else scenario.seed)
        elif args.seed is not None:
            scenario = simulate.StudyScenario(
                model_g=scenario.model_g, model_gprime=scenario.model_gprime,
                shared=scenario.shared, alpha=scenario.alpha,
                power_target=scenario.power_target, n_override=scenario.n_override,
                replications=scenario.replications, seed=args.seed)
    else:
        model_cmp, model_ref, shared, mode = api.parse_models(_payload_from_flags(args))
        scenario = simulate.StudyScenario(
            model_g=model_cmp, model_gprime=model_ref, shared=shared,
            alpha=args.alpha, power_target=args.power, n_override=args.n,
            replications=args.replications if args.replications is not None else 5000,
            seed=args.seed if args.seed is not None else 0)
    report = simulate.run_study(scenario, workers=args.workers)
    _emit(args, serialize.jsonable(report))
    return 0


def _cmd_policy(args) -> int:
    data = _load_dataset(args)
    members = tuple(RegimeSpec.parse(m) for m in args.regimes.split(","))
    regime_class = policy.RegimeClass(
        members=members, alpha_family=args.alpha_family, correction=args.correction)
    result = policy.find_optimal(regime_class, data)
    doc = {
        "winner": str(result.winner),
        "alpha_per_test": result.alpha_per_test,
        "tests": [
            {
                "champion": str(t.champion),
                "challenger": str(t.challenger),
                "dgor_hat": t.dgor_hat,
                "log_dgor_hat": t.log_dgor_hat,
                "se_log": t.se_log,
                "z_stat": t.z_stat,
                "p_value_one_sided": t.p_value_one_sided,
                "ci": list(t.ci),
                "champion_retained": t.champion_retained,
            }
            for t in result.trace
        ],
    }
    _emit(args, doc)
    return 0


def _cmd_coords(args) -> int:
    entries = []
    for item in args.pmf:
        if "=" in item:
            label, probs = item.split("=", 1)
        else:
            label, probs = f"pmf{len(entries)+1}", item
        entries.append({"label": label, "probs": probs})
    doc = api.coords_request({"pmfs": entries, "pmf_tol": args.pmf_tol})
    if args.format == "csv":
        print("label,x,y")
        for point in doc["points"]:
            print(f"{point['label']},{point['x']!r},{point['y']!r}")
    else:
        _emit(args, doc)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dgor", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="exact dgor for specified regime models")
    _add_two_stage_flags(p)
    p.add_argument("--n", type=int, help="trial size: adds Wald inference to the output")
    p.add_argument("--alpha", type=float, default=api.DEFAULT_ALPHA)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=_cmd_compute)

    p = sub.add_parser("samplesize", help="required N from an effect size or models")
    _add_two_stage_flags(p)
    p.add_argument("--es", type=float, help="standardized log-scale effect size")
    p.add_argument("--alpha", type=float, default=api.DEFAULT_ALPHA)
    p.add_argument("--power", type=float, default=api.DEFAULT_POWER)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=_cmd_samplesize)

    p = sub.add_parser("estimate", help="estimate dgor from a trajectory CSV")
    p.add_argument("--input", required=True, help="trajectory CSV path")
    p.add_argument("--regime1", required=True, help="reference regime, e.g. A:E")
    p.add_argument("--regime2", required=True, help="comparison regime, e.g. B:E")
    p.add_argument("--method", choices=("plugin", "concordance"), default="plugin")
    p.add_argument("--weighting", choices=("observed", "design"), default="observed",
                   help="pair weights for the concordance method")
    p.add_argument("--continuous", action="store_true",
                   help="treat outcomes as real-valued and use the U-statistic")
    p.add_argument("--rates", help="fixed response rates, e.g. A=0.3,B=0.4 (continuous only)")
    p.add_argument("--qol-stages", action="store_true",
                   help="input carries per-stage scores (patient_id,stage1,responder,stage2,y1,y2)")
    p.add_argument("--categories", type=int, help="number of outcome categories (default: max seen)")
    p.add_argument("--alpha", type=float, default=api.DEFAULT_ALPHA)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("simulate", help="replication study for a scenario")
    _add_two_stage_flags(p)
    p.add_argument("--scenario", help="scenario JSON file")
    p.add_argument("--replications", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--n", type=int, help="override the formula-based trial size")
    p.add_argument("--alpha", type=float, default=api.DEFAULT_ALPHA)
    p.add_argument("--power", type=float, default=api.DEFAULT_POWER)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("policy", help="search a finite regime class on a dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--regimes", required=True, help="comma-separated class, e.g. A:E,A:F,B:E,B:F")
    p.add_argument("--alpha-family", type=float, default=api.DEFAULT_ALPHA)
    p.add_argument("--correction", choices=("bonferroni", "none"), default="bonferroni")
    p.add_argument("--qol-stages", action="store_true")
    p.add_argument("--categories", type=int)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=_cmd_policy)

    p = sub.add_parser("coords", help="barycentric coordinates for 3-category pmfs")
    p.add_argument("--pmf", action="append", required=True,
                   help="label=p1,p2,p3 (repeatable)")
    p.add_argument("--pmf-tol", type=float, default=1e-9)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_coords)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8645)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DgorError as exc:
        print(serialize.dumps({"error": api.error_document(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
