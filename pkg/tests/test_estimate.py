import math

import numpy as np
import pytest

from conftest import DISTINCT_ROWS, stard_model
from dgor import errors
from dgor.engine import dgor_two_stage
from dgor.estimate import (
    RegimeSpec,
    estimate_dgor_concordance,
    estimate_dgor_plugin,
    estimate_p_ustat,
    fit_mle,
)
from dgor.model import (
    ContinuousSmartDataset,
    SmartDataset,
    SmartDesign,
    Trajectory,
)
from dgor.simulate import design_for_pair, generate_trial, rng_for, truth_from_models

DESIGN_AB = SmartDesign.two_by_two()


def tiny_dataset():
    rows = (
        Trajectory("p1", "A", True, "A", 2),
        Trajectory("p2", "A", False, "E", 1),
        Trajectory("p3", "A", False, "E", 3),
        Trajectory("p4", "A", True, "A", 2),
        # a small B side so two-sided comparisons are possible
        Trajectory("p5", "B", True, "B", 3),
        Trajectory("p6", "B", False, "E", 1),
        Trajectory("p7", "B", False, "E", 2),
        Trajectory("p8", "B", False, "F", 2),
    )
    return SmartDataset(DESIGN_AB, rows, j=3)


class TestFitMle:
    def test_direct_counting(self):
        fit = fit_mle(tiny_dataset())
        assert fit.response_rates["A"] == 0.5
        assert fit.arm_pmfs[("A",)].probs == (0.0, 1.0, 0.0)
        assert fit.arm_pmfs[("A", "E")].probs == (0.5, 0.0, 0.5)
        assert fit.arm_counts[("A", "E")] == 2
        assert fit.total_n == 8
        assert sum(fit.arm_counts.values()) == fit.total_n

    def test_empty_arm_raised_when_requested_downstream(self):
        fit = fit_mle(tiny_dataset())
        with pytest.raises(errors.EmptyArm, match="A,F"):
            fit.regime_model(RegimeSpec("A", "F"))

    def test_pmfs_are_exact_rational_counts(self):
        fit = fit_mle(tiny_dataset())
        for arm, pmf in fit.arm_pmfs.items():
            n = fit.arm_counts[arm]
            for p in pmf.probs:
                assert p == round(p * n) / n

    def test_large_sample_recovery(self):
        row = DISTINCT_ROWS[0]
        model_g, model_gp = row.models()
        design = design_for_pair(model_g, model_gp)
        truth = truth_from_models(design, model_g, model_gp)
        data = generate_trial(design, truth, 100_000, seed=17)
        fit = fit_mle(data)
        assert fit.response_rates["A"] == pytest.approx(0.3, abs=0.01)
        assert fit.response_rates["B"] == pytest.approx(0.4, abs=0.01)
        for arm, true_pmf in ((("A",), row.aa), (("A", "E"), row.ae),
                              (("B",), row.bb), (("B", "E"), row.be)):
            for est, true in zip(fit.arm_pmfs[arm].probs, true_pmf):
                assert est == pytest.approx(true, abs=0.01)


class TestPlugin:
    def test_matches_hand_computation_on_tiny_data(self):
        fit = fit_mle(tiny_dataset())
        result = estimate_dgor_plugin(fit, RegimeSpec("B", "E"), RegimeSpec("A", "E"))
        hand = dgor_two_stage(fit.regime_model(RegimeSpec("B", "E")),
                              fit.regime_model(RegimeSpec("A", "E")))
        assert result.dgor == hand.dgor

    def test_identical_regimes_give_one(self):
        fit = fit_mle(tiny_dataset())
        result = estimate_dgor_plugin(fit, RegimeSpec("A", "E"), RegimeSpec("A", "E"))
        assert result.dgor == 1.0

    def test_small_cell_warning_attached(self):
        rows = [Trajectory(f"r{i}", "A", True, "A", 2) for i in range(20)]
        # 100 non-responders: cells (0.95, 0.03, 0.02)
        outcomes = [1] * 95 + [2] * 3 + [3] * 2
        rows += [Trajectory(f"n{i}", "A", False, "E", y) for i, y in enumerate(outcomes)]
        rows += [Trajectory(f"b{i}", "B", i % 2 == 0, "B" if i % 2 == 0 else "E", 1 + i % 3)
                 for i in range(30)]
        data = SmartDataset(DESIGN_AB, tuple(rows), j=3)
        result = estimate_dgor_plugin(fit_mle(data), RegimeSpec("B", "E"), RegimeSpec("A", "E"))
        assert any("small_cells" in w and "A,E" in w for w in result.warnings)


class TestConcordance:
    def test_equals_plugin_on_random_datasets(self):
        rng = np.random.default_rng(64)
        for trial in range(60):
            n = int(rng.integers(40, 400))
            row = DISTINCT_ROWS[trial % len(DISTINCT_ROWS)]
            model_g, model_gp = row.models()
            design = design_for_pair(model_g, model_gp)
            truth = truth_from_models(design, model_g, model_gp)
            data = generate_trial(design, truth, n, seed=1000 + trial)
            fit = fit_mle(data)
            rg, rp = RegimeSpec("B", "E"), RegimeSpec("A", "E")
            try:
                plug = estimate_dgor_plugin(fit, rg, rp)
            except errors.EmptyArm:
                continue
            conc = estimate_dgor_concordance(data, rg, rp, weighting="observed")
            if math.isfinite(plug.dgor):
                assert conc.dgor == pytest.approx(plug.dgor, abs=1e-12 * max(1, plug.dgor))
            else:
                assert not math.isfinite(conc.dgor)

    def test_design_weights_match_printed_integers(self):
        # with an exactly even stage-2 split the two weightings coincide
        rows = []
        for i in range(10):
            rows.append(Trajectory(f"a{i}", "A", True, "A", 1 + i % 3))
        for i in range(8):
            rows.append(Trajectory(f"e{i}", "A", False, "E", 1 + i % 3))
        for i in range(8):
            rows.append(Trajectory(f"f{i}", "A", False, "F", 1 + (i + 1) % 3))
        for i in range(10):
            rows.append(Trajectory(f"b{i}", "B", True, "B", 1 + (i + 1) % 3))
        for i in range(6):
            rows.append(Trajectory(f"g{i}", "B", False, "E", 1 + i % 3))
        for i in range(6):
            rows.append(Trajectory(f"h{i}", "B", False, "F", 3 - i % 3))
        data = SmartDataset(DESIGN_AB, tuple(rows), j=3)
        rg, rp = RegimeSpec("B", "E"), RegimeSpec("A", "E")
        obs = estimate_dgor_concordance(data, rg, rp, weighting="observed")
        des = estimate_dgor_concordance(data, rg, rp, weighting="design")
        assert obs.dgor == pytest.approx(des.dgor, abs=1e-12)

    def test_zero_discordant_minimal_dataset(self):
        rows = (
            Trajectory("p1", "A", True, "A", 1),
            Trajectory("p2", "B", True, "B", 2),
            Trajectory("p3", "A", False, "E", 1),
            Trajectory("p4", "B", False, "E", 2),
        )
        data = SmartDataset(DESIGN_AB, rows, j=2)
        res = estimate_dgor_concordance(data, RegimeSpec("B", "E"), RegimeSpec("A", "E"))
        assert res.dgor == math.inf
        assert any("zero_discordant" in w for w in res.warnings)

    def test_missing_arm(self):
        data = tiny_dataset()
        with pytest.raises(errors.EmptyArm):
            estimate_dgor_concordance(data, RegimeSpec("B", "F"), RegimeSpec("A", "F"))

    def test_recovers_published_value_at_scale(self):
        model_g = stard_model("C", "M")
        model_gp = stard_model("M", "M")
        design = design_for_pair(model_g, model_gp)
        truth = truth_from_models(design, model_g, model_gp)
        data = generate_trial(design, truth, 100_000, seed=90)
        res = estimate_dgor_concordance(data, RegimeSpec("C", "M"), RegimeSpec("M", "M"))
        assert res.dgor == pytest.approx(1.43, abs=0.05)


class TestConsistency:
    def test_error_shrinks_with_n(self):
        model_g = stard_model("C", "M")
        model_gp = stard_model("M", "M")
        truth_eta = dgor_two_stage(model_g, model_gp).dgor
        design = design_for_pair(model_g, model_gp)
        truth = truth_from_models(design, model_g, model_gp)
        rg, rp = RegimeSpec("C", "M"), RegimeSpec("M", "M")
        medians = {}
        for n, sims in ((1_000, 81), (10_000, 41), (100_000, 41)):
            errs = []
            for rep in range(sims):
                data = generate_trial(design, truth, n, seed=7_000_000 + 13 * n + rep)
                fit = fit_mle(data)
                errs.append(abs(estimate_dgor_plugin(fit, rg, rp).dgor - truth_eta))
            medians[n] = sorted(errs)[len(errs) // 2]
        assert medians[1_000] > medians[10_000] > medians[100_000]
        assert medians[100_000] < 0.02


class TestUStatistic:
    @staticmethod
    def build_continuous(rng, n_per_arm, mu):
        ids, s1, resp, s2, y = [], [], [], [], []
        for (t1, is_resp, t2), mean in mu.items():
            for i in range(n_per_arm):
                ids.append(f"{t1}{t2}{int(is_resp)}_{i}")
                s1.append(t1)
                resp.append(is_resp)
                s2.append(t1 if is_resp else t2)
                y.append(float(mean + rng.standard_normal()))
        return ContinuousSmartDataset(DESIGN_AB, tuple(ids), tuple(s1), tuple(resp),
                                      tuple(s2), tuple(y))

    def test_all_ties(self):
        data = ContinuousSmartDataset(
            DESIGN_AB,
            ("p1", "p2", "p3", "p4"),
            ("A", "A", "B", "B"),
            (True, False, True, False),
            ("A", "E", "B", "E"),
            (0.0, 0.0, 0.0, 0.0),
        )
        p_hat, res = estimate_p_ustat(data, RegimeSpec("B", "E"), RegimeSpec("A", "E"),
                                      rates={"A": 0.5, "B": 0.5})
        assert p_hat == 0.0
        assert res.dgor == 0.0
        assert any("ties_dominant" in w for w in res.warnings)

    def test_complete_separation(self):
        data = ContinuousSmartDataset(
            DESIGN_AB,
            ("p1", "p2", "p3", "p4"),
            ("B", "B", "A", "A"),
            (True, False, True, False),
            ("B", "E", "A", "E"),
            (2.0, 2.0, 1.0, 1.0),
        )
        p_hat, res = estimate_p_ustat(data, RegimeSpec("B", "E"), RegimeSpec("A", "E"),
                                      rates={"A": 0.5, "B": 0.5})
        assert p_hat == 1.0
        assert res.dgor == math.inf

    def test_against_simulation_oracle(self):
        mu = {("A", True, "A"): 0.0, ("A", False, "E"): 0.4,
              ("B", True, "B"): 0.6, ("B", False, "E"): 1.0}
        gamma = {"A": 0.3, "B": 0.4}
        # oracle: 10^7 paired draws from the generating law
        rng = rng_for(515151)
        n_oracle = 10 ** 7
        resp_a = rng.random(n_oracle) < gamma["A"]
        ya = np.where(resp_a, mu[("A", True, "A")], mu[("A", False, "E")]) \
            + rng.standard_normal(n_oracle)
        resp_b = rng.random(n_oracle) < gamma["B"]
        yb = np.where(resp_b, mu[("B", True, "B")], mu[("B", False, "E")]) \
            + rng.standard_normal(n_oracle)
        p_true = float((yb > ya).mean())

        data = self.build_continuous(np.random.default_rng(8080), 10_000, mu)
        p_hat, res = estimate_p_ustat(data, RegimeSpec("B", "E"), RegimeSpec("A", "E"),
                                      rates=gamma)
        # conservative sampling bound for a two-sample concordance estimate
        n_cmp = n_ref = 20_000
        se = 1.5 * math.sqrt(p_true * (1 - p_true) * (1 / n_cmp + 1 / n_ref))
        assert abs(p_hat - p_true) < 3 * se
        assert res.dgor == pytest.approx(p_hat / (1 - p_hat), abs=1e-12)

    def test_ordinal_data_as_reals_matches_plugin_probability(self):
        # strict-inequality convention: with the MLE rates, the U-statistic on
        # integer outcomes re-encoded as reals reproduces the plug-in P(Y_g > Y_g')
        row = DISTINCT_ROWS[2]
        model_g, model_gp = row.models()
        design = design_for_pair(model_g, model_gp)
        truth = truth_from_models(design, model_g, model_gp)
        data = generate_trial(design, truth, 800, seed=246)
        fit = fit_mle(data)
        continuous = ContinuousSmartDataset(
            design,
            tuple(t.patient_id for t in data.trajectories),
            tuple(t.stage1 for t in data.trajectories),
            tuple(t.responder for t in data.trajectories),
            tuple(t.stage2 for t in data.trajectories),
            tuple(float(t.outcome) for t in data.trajectories),
        )
        rg, rp = RegimeSpec("B", "E"), RegimeSpec("A", "E")
        p_hat, _ = estimate_p_ustat(continuous, rg, rp, rates=fit.response_rates)
        plug = estimate_dgor_plugin(fit, rg, rp)
        assert p_hat == pytest.approx(plug.p_gt, abs=1e-12)

    def test_plugin_rates_by_default(self):
        mu = {("A", True, "A"): 0.0, ("A", False, "E"): 0.5,
              ("B", True, "B"): 0.5, ("B", False, "E"): 1.0}
        data = self.build_continuous(np.random.default_rng(4), 50, mu)
        p_default, _ = estimate_p_ustat(data, RegimeSpec("B", "E"), RegimeSpec("A", "E"))
        # equal arm sizes make the empirical rates 0.5 exactly
        p_half, _ = estimate_p_ustat(data, RegimeSpec("B", "E"), RegimeSpec("A", "E"),
                                     rates={"A": 0.5, "B": 0.5})
        assert p_default == pytest.approx(p_half, abs=1e-15)
