import pytest

from conftest import STARD_GAMMA, STARD_NONRESPONDER, STARD_RESPONDER
from dgor import errors
from dgor.estimate import RegimeSpec, fit_mle
from dgor.model import OrdinalPmf, SmartDesign, validate_pmf
from dgor.policy import RegimeClass, find_optimal
from dgor.simulate import TrialTruth, generate_trial

STARD_DESIGN = SmartDesign(
    stage1_arms=("M", "C"),
    stage2_options={"M": ("M", "C"), "C": ("M", "C")},
)


def stard_truth() -> TrialTruth:
    pmfs = {("M",): validate_pmf(STARD_RESPONDER["M"], tol=0.02),
            ("C",): validate_pmf(STARD_RESPONDER["C"], tol=0.02)}
    for arm, probs in STARD_NONRESPONDER.items():
        pmfs[arm] = validate_pmf(probs, tol=0.02)
    return TrialTruth(response_rates=dict(STARD_GAMMA), arm_pmfs=pmfs, j=3)


ALL_REGIMES = (RegimeSpec("M", "M"), RegimeSpec("M", "C"),
               RegimeSpec("C", "M"), RegimeSpec("C", "C"))


class TestRegimeClass:
    def test_bonferroni_level(self):
        rc = RegimeClass(members=ALL_REGIMES, alpha_family=0.05)
        assert rc.per_test_alpha() == pytest.approx(0.05 / 3)

    def test_no_correction(self):
        rc = RegimeClass(members=ALL_REGIMES, alpha_family=0.05, correction="none")
        assert rc.per_test_alpha() == 0.05

    def test_duplicates_rejected(self):
        with pytest.raises(errors.InvalidDesign):
            RegimeClass(members=(RegimeSpec("A", "E"), RegimeSpec("A", "E")))

    def test_empty_rejected(self):
        with pytest.raises(errors.InvalidDesign):
            RegimeClass(members=())


class TestFindOptimal:
    def test_singleton_class(self):
        data = generate_trial(STARD_DESIGN, stard_truth(), 400, seed=10)
        result = find_optimal(RegimeClass(members=(RegimeSpec("M", "C"),)), data)
        assert result.winner == RegimeSpec("M", "C")
        assert result.trace == ()

    def test_exactly_m_minus_one_tests(self):
        data = generate_trial(STARD_DESIGN, stard_truth(), 4000, seed=11)
        result = find_optimal(RegimeClass(members=ALL_REGIMES), data)
        assert len(result.trace) == len(ALL_REGIMES) - 1

    def test_champion_chain_is_consistent(self):
        data = generate_trial(STARD_DESIGN, stard_truth(), 4000, seed=12)
        result = find_optimal(RegimeClass(members=ALL_REGIMES), data)
        champion = ALL_REGIMES[0]
        for test in result.trace:
            assert test.champion == champion
            if not test.champion_retained:
                champion = test.challenger
        assert result.winner == champion
        for test in result.trace:
            if test.champion_retained:
                assert test.z_stat > 0

    def test_dominated_regime_never_wins(self):
        # the M:M regime is significantly dominated in the generating truth
        for seed in (101, 202, 303, 404, 505):
            data = generate_trial(STARD_DESIGN, stard_truth(), 4000, seed=seed)
            result = find_optimal(RegimeClass(members=ALL_REGIMES), data)
            assert result.winner != RegimeSpec("M", "M")
            assert result.winner in {RegimeSpec("M", "C"), RegimeSpec("C", "M"),
                                     RegimeSpec("C", "C")}

    def test_tie_hands_title_to_challenger(self):
        # two structurally identical regimes: the test cannot be significant,
        # so the literal else-branch replaces the champion
        uniform = OrdinalPmf((0.25, 0.5, 0.25))
        pmfs = {("A",): uniform, ("A", "E"): OrdinalPmf((0.3, 0.4, 0.3)),
                ("A", "F"): OrdinalPmf((0.3, 0.4, 0.3)),
                ("B",): uniform, ("B", "E"): uniform, ("B", "F"): uniform}
        design = SmartDesign.two_by_two()
        truth = TrialTruth(response_rates={"A": 0.4, "B": 0.4}, arm_pmfs=pmfs, j=3)
        data = generate_trial(design, truth, 2000, seed=77)
        result = find_optimal(
            RegimeClass(members=(RegimeSpec("A", "E"), RegimeSpec("A", "F"))), data)
        test = result.trace[0]
        assert not test.champion_retained
        assert result.winner == RegimeSpec("A", "F")

    def test_accepts_prefitted_model(self):
        data = generate_trial(STARD_DESIGN, stard_truth(), 4000, seed=13)
        fit = fit_mle(data)
        via_fit = find_optimal(RegimeClass(members=ALL_REGIMES), fit)
        via_data = find_optimal(RegimeClass(members=ALL_REGIMES), data)
        assert via_fit == via_data

    def test_missing_arm_propagates(self):
        data = generate_trial(STARD_DESIGN, stard_truth(), 200, seed=14)
        with pytest.raises(errors.MissingArm):
            find_optimal(RegimeClass(members=(RegimeSpec("M", "M"),
                                              RegimeSpec("X", "Y"))), data)
