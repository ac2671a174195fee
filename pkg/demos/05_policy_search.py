"""Finding the best embedded regime in a finite class by sequential testing.

Simulates a two-stage trial with mono (M) and combination (C) therapy at both
stages, then runs the champion-style search over all four embedded regimes
with a Bonferroni-corrected per-test level.
"""
from dgor import RegimeSpec, find_optimal, generate_trial, validate_pmf
from dgor.model import SmartDesign
from dgor.policy import RegimeClass
from dgor.simulate import TrialTruth

design = SmartDesign(stage1_arms=("M", "C"),
                     stage2_options={"M": ("M", "C"), "C": ("M", "C")})
truth = TrialTruth(
    response_rates={"M": 0.32, "C": 0.45},
    arm_pmfs={
        ("M",): validate_pmf((0.08, 0.33, 0.59)),
        ("C",): validate_pmf((0.10, 0.30, 0.60)),
        ("M", "M"): validate_pmf((0.50, 0.34, 0.16)),
        ("M", "C"): validate_pmf((0.39, 0.25, 0.36)),
        ("C", "M"): validate_pmf((0.41, 0.39, 0.20)),
        ("C", "C"): validate_pmf((0.46, 0.32, 0.21), tol=0.02),
    },
    j=3,
)
data = generate_trial(design, truth, n=4000, seed=2025)

regime_class = RegimeClass(
    members=(RegimeSpec("M", "M"), RegimeSpec("M", "C"),
             RegimeSpec("C", "M"), RegimeSpec("C", "C")),
    alpha_family=0.05,
    correction="bonferroni",
)
result = find_optimal(regime_class, data)

print(f"per-test level: {result.alpha_per_test:.4f} "
      f"(family 0.05 over {len(regime_class.members) - 1} tests)")
for test in result.trace:
    verdict = "champion retained" if test.champion_retained else "challenger takes over"
    print(f"  {test.champion} vs {test.challenger}: dgor = {test.dgor_hat:.3f}, "
          f"z = {test.z_stat:+.2f}, one-sided p = {test.p_value_one_sided:.4f} -> {verdict}")
print(f"winner: {result.winner}")
