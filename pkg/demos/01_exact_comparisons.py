"""Exact regime comparisons: distinct-path, shared-path, binary, K-stage.

Walks through the quality-of-life comparison of mono- vs combination-therapy
strategies (response rates 0.32 / 0.45, three ordered outcome categories) and
a few structural facts worth knowing about the dynamic generalized odds ratio.
"""
from dgor import (
    KStageRegimeModel,
    TwoStageRegimeModel,
    dgor_kstage,
    dgor_matrix_form,
    dgor_two_stage,
    dor_binary,
    shared_path_pair,
    theorem_conditions,
    validate_pmf,
)

# Start mono (M); responders are followed up, non-responders switch to M again.
mono_mono = TwoStageRegimeModel(
    response_rate=0.32,
    responder_pmf=validate_pmf((0.08, 0.33, 0.59)),
    nonresponder_pmf=validate_pmf((0.50, 0.34, 0.16)),
    labels=("M", "M"),
)
# Start combination (C); non-responders switch to mono.
combo_mono = TwoStageRegimeModel(
    response_rate=0.45,
    responder_pmf=validate_pmf((0.10, 0.30, 0.60)),
    nonresponder_pmf=validate_pmf((0.41, 0.39, 0.20)),
    labels=("C", "M"),
)

result = dgor_two_stage(combo_mono, mono_mono)
print("distinct-path comparison, combo-then-mono vs mono-then-mono")
print(f"  P(better) = {result.p_gt:.4f}  P(worse) = {result.p_lt:.4f} "
      f" P(tie) = {result.p_eq:.4f}")
print(f"  dgor = {result.dgor:.4f}   log dgor = {result.log_dgor:.4f}")

check = dgor_matrix_form(combo_mono, mono_mono)
print(f"  matrix-form cross-check: |difference| = {abs(check.dgor - result.dgor):.2e}")

# Shared-path: same initial treatment, responders contribute to both regimes.
ref, cmp_ = shared_path_pair(
    response_rate=0.32,
    responder_pmf=(0.08, 0.33, 0.59),
    nonresponder_pmf_ref=(0.50, 0.34, 0.16),   # switch to mono
    nonresponder_pmf_cmp=(0.39, 0.25, 0.36),   # switch to combination
    stage1="M", stage2_ref="M", stage2_cmp="C",
)
shared = dgor_two_stage(cmp_, ref)
print("\nshared-path comparison, switch-to-combo vs switch-to-mono after M")
print(f"  dgor = {shared.dgor:.4f}")

# A shared-path dgor of 1 does NOT imply equal non-responder distributions:
ref, cmp_ = shared_path_pair(0.2, (0.2, 0.3, 0.5), (0.12, 0.32, 0.56), (0.06, 0.41, 0.53))
print(f"  counterexample with different switch arms: dgor = "
      f"{dgor_two_stage(cmp_, ref).dgor:.4f}")

# Binary outcomes reduce to a dynamic odds ratio; with nobody responding it is
# the classical odds ratio of the two non-responder arms.
arm_a = TwoStageRegimeModel(0.0, validate_pmf((0.5, 0.5)), validate_pmf((0.4, 0.6)),
                            labels=("A", "E"))
arm_b = TwoStageRegimeModel(0.0, validate_pmf((0.5, 0.5)), validate_pmf((0.2, 0.8)),
                            labels=("B", "E"))
print(f"\nbinary, all non-responders: dor = {dor_binary(arm_b, arm_a).dgor:.4f} "
      f"(classical OR = {0.4 * 0.8 / (0.6 * 0.2):.4f})")

# Three-stage regimes: terminal strata are 'first response after stage k'.
three_a = KStageRegimeModel(
    stage_response_rates=(0.3, 0.3),
    terminal_pmfs=tuple(validate_pmf(p) for p in
                        ((0.1, 0.3, 0.6), (0.3, 0.4, 0.3), (0.5, 0.3, 0.2))),
    labels=("A1", "A2", "A3"),
)
three_b = KStageRegimeModel(
    stage_response_rates=(0.4, 0.4),
    terminal_pmfs=tuple(validate_pmf(p) for p in
                        ((0.05, 0.25, 0.70), (0.25, 0.40, 0.35), (0.45, 0.35, 0.20))),
    labels=("B1", "B2", "B3"),
)
print(f"three-stage comparison: dgor = {dgor_kstage(three_b, three_a).dgor:.4f}")

# When both regimes share their arm distributions, the response rates alone
# decide the direction.
shared_resp = validate_pmf((0.1, 0.2, 0.7))
shared_non = validate_pmf((0.5, 0.3, 0.2))
report = theorem_conditions(
    TwoStageRegimeModel(0.2, shared_resp, shared_non, labels=("B", "E")),
    TwoStageRegimeModel(0.6, shared_resp, shared_non, labels=("A", "E")),
)
print(f"\nmatched arms, rates 0.6 vs 0.2: implied direction = {report.implied!r}, "
      f"computed dgor = {report.dgor:.4f}, consistent = {report.consistent}")
