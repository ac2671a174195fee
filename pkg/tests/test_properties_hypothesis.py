"""Property-based fuzzing of the core invariants."""
import math

from hypothesis import given, settings
from hypothesis import strategies as st

from dgor.engine import dgor_matrix_form, dgor_two_stage
from dgor.model import TwoStageRegimeModel, validate_pmf
from dgor.simulate import barycentric_coords

raw_pmf = st.integers(2, 6).flatmap(
    lambda j: st.lists(st.floats(1e-6, 1.0), min_size=j, max_size=j))


def normalize(raw):
    total = math.fsum(raw)
    return validate_pmf(tuple(x / total for x in raw), tol=1e-6)


def models(j_source, gamma_g, gamma_gp):
    resp_g, non_g, resp_gp, non_gp = (normalize(r) for r in j_source)
    return (
        TwoStageRegimeModel(gamma_g, resp_g, non_g, labels=("B", "E")),
        TwoStageRegimeModel(gamma_gp, resp_gp, non_gp, labels=("A", "E")),
    )


pair_strategy = st.tuples(
    st.integers(2, 6).flatmap(
        lambda j: st.tuples(*([st.lists(st.floats(1e-6, 1.0), min_size=j, max_size=j)] * 4))),
    st.floats(0.0, 1.0),
    st.floats(0.0, 1.0),
)


@settings(max_examples=300, deadline=None)
@given(pair_strategy)
def test_closure_and_reciprocity(args):
    pmfs, gamma_g, gamma_gp = args
    model_g, model_gp = models(pmfs, gamma_g, gamma_gp)
    res = dgor_two_stage(model_g, model_gp)
    assert abs(res.p_gt + res.p_lt + res.p_eq - 1.0) <= 1e-12
    assert res.p_gt >= 0 and res.p_lt >= 0 and res.p_eq >= 0
    rev = dgor_two_stage(model_gp, model_g)
    assert rev.p_gt == res.p_lt and rev.p_lt == res.p_gt
    if math.isfinite(res.dgor) and math.isfinite(rev.dgor) and res.dgor > 0:
        assert abs(res.dgor * rev.dgor - 1.0) <= 1e-10 * max(1.0, res.dgor, rev.dgor)


@settings(max_examples=300, deadline=None)
@given(pair_strategy)
def test_matrix_form_equivalence(args):
    pmfs, gamma_g, gamma_gp = args
    model_g, model_gp = models(pmfs, gamma_g, gamma_gp)
    a = dgor_two_stage(model_g, model_gp)
    b = dgor_matrix_form(model_g, model_gp)
    assert abs(a.p_gt - b.p_gt) <= 1e-12
    assert abs(a.p_lt - b.p_lt) <= 1e-12
    assert abs(a.p_eq - b.p_eq) <= 1e-12


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(1e-9, 1.0), min_size=2, max_size=8))
def test_validate_pmf_normalizes_exactly(raw):
    pmf = normalize(raw)
    assert abs(math.fsum(pmf.probs) - 1.0) <= 1e-12
    assert all(0 <= p <= 1 for p in pmf.probs)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(1e-9, 1.0), min_size=3, max_size=3))
def test_barycentric_points_stay_inside_the_triangle(raw):
    x, y = barycentric_coords(normalize(raw))
    assert -1e-12 <= y <= math.sqrt(3) / 2 + 1e-12
    # left and right edges: y <= sqrt(3) x and y <= sqrt(3) (1 - x)
    assert y <= math.sqrt(3) * x + 1e-9
    assert y <= math.sqrt(3) * (1 - x) + 1e-9
