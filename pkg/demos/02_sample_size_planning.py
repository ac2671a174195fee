"""Sample-size planning: from a standardized effect size or from full models.

The planning chain is dgor -> ratio-scale variance (design-based arm weights)
-> log-scale effect size -> total N for a two-sided test.
"""
from dgor import TwoStageRegimeModel, sample_size, validate_pmf
from dgor.inference import plan_from_models

# If an investigator elicits the standardized effect size directly:
for es in (0.219, 0.161, 0.117):
    print(f"effect size {es:.3f}  ->  N = {sample_size(es, alpha=0.05, power=0.80)}")

# Planning from full regime models.
reference = TwoStageRegimeModel(
    response_rate=0.3,
    responder_pmf=validate_pmf((0.23, 0.51, 0.26)),
    nonresponder_pmf=validate_pmf((0.50, 0.41, 0.09)),
    labels=("A", "E"),
)
candidate = TwoStageRegimeModel(
    response_rate=0.4,
    responder_pmf=validate_pmf((0.31, 0.50, 0.19)),
    nonresponder_pmf=validate_pmf((0.14, 0.47, 0.39)),
    labels=("B", "E"),
)
plan = plan_from_models(candidate, reference, shared=False, alpha=0.05, power=0.80)
print(f"\nmodel-based plan: dgor = {plan.dgor:.4f}  ES = {plan.effect_size:.4f}"
      f"  sigma_log = {plan.sigma_log:.3f}  ->  N = {plan.n}")

# What-if: how does the required N move with the candidate's response rate?
print("\nresponse-rate sensitivity (candidate arm):")
for gamma in (0.30, 0.35, 0.40, 0.45, 0.50):
    variant = TwoStageRegimeModel(gamma, candidate.responder_pmf,
                                  candidate.nonresponder_pmf, labels=("B", "E"))
    plan = plan_from_models(variant, reference, shared=False)
    print(f"  gamma_B = {gamma:.2f}:  dgor = {plan.dgor:.3f}  N = {plan.n}")
