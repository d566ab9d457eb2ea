import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kfs.bounds import BoundParams, DimensionProfile, theta_range
from kfs.errors import DimensionMismatchError, DomainError, InfeasibleError
from kfs.fewshot import Cascade, ConstantPredictor, FewShotModel, Optimize, classify, fit, margin
from kfs.kernels import Kernel, SupportSample, d_statistic, mean_score

BASE = ConstantPredictor("base")


def support(points, kernel, label="new"):
    return SupportSample(np.asarray(points, dtype=float), label, kernel)


def test_fit_single_gaussian_point_by_hand():
    g = Kernel.gaussian(1.0)
    m = fit(g, support([[0.3, 0.3]], g), r_y=0.5, delta=0.5)
    assert m.D == 1
    assert m.Delta == 0.5
    assert theta_range(m.Delta, 0.5) == (0.0, 0.5)
    assert m.theta == 0.25


def test_fit_infeasible_reports_diagnostics():
    g = Kernel.gaussian(1.0)
    with pytest.raises(InfeasibleError) as err:
        fit(g, support([[0.3, 0.3]], g), r_y=2.0, delta=0.5)
    assert err.value.D == 1
    assert err.value.required_D == 2.0


def test_fit_identical_points_keeps_delta_term():
    g = Kernel.laplacian(2.0)
    x = [0.1, -0.2, 0.4]
    m = fit(g, support([x] * 4, g), r_y=0.3, delta=0.5)
    assert m.D == pytest.approx(math.sqrt(g(x, x)), rel=1e-15)
    assert m.Delta == pytest.approx(m.D - math.sqrt(0.09 / 4 + 0.75 * 0.3 * 0.5), rel=1e-15)


def test_fit_fixed_theta_validated():
    g = Kernel.gaussian(1.0)
    Z = support([[0.0, 0.0]], g)
    assert fit(g, Z, 0.5, delta=0.5, theta=0.4).theta == 0.4
    with pytest.raises(DomainError):
        fit(g, Z, 0.5, delta=0.5, theta=0.6)
    with pytest.raises(ValueError):
        fit(g, Z, 0.5, delta=0.5, theta="optimize")
    with pytest.raises(ValueError):
        fit(g, Z, 0.5, delta=1.0)
    with pytest.raises(ValueError):
        fit(g, Z, 0.5, theta="sometimes")


def test_fit_rebuilds_support_for_other_kernel():
    Z = support([[1.0, 0.0], [0.0, 1.0]], Kernel.linear())
    g = Kernel.gaussian(1.0)
    m = fit(g, Z, 0.2, delta=0.5)
    assert m.kernel == g and m.D == d_statistic(g, m.support)


def test_fit_optimize_policy():
    lin = Kernel.linear()
    rng = np.random.default_rng(5)
    pts = np.zeros((5, 50))
    pts[:, 0] = 2.0
    pts += rng.normal(0, 0.05, pts.shape)
    prof = DimensionProfile.identity(50)
    yp = BoundParams(A=1, r=1.0, k=5, delta=0.5, epsilon=0.1, profile=prof)
    m = fit(lin, support(pts, lin), 1.0, delta=Optimize(yp, 50, grid=32), theta="optimize")
    lo, hi = theta_range(m.Delta, 1.0)
    assert lo <= m.theta <= hi
    m2 = fit(lin, support(pts, lin), 1.0, delta=Optimize(yp, 50, grid=32))
    assert m2.delta == m.delta and m2.theta == pytest.approx(0.5 * (lo + hi))
    with pytest.raises(ValueError):
        fit(lin, support(pts, lin), 0.7, delta=Optimize(yp, 50))


def test_model_invariants_enforced():
    g = Kernel.gaussian(1.0)
    m = fit(g, support([[0.0, 0.0]], g), 0.5, delta=0.5)
    with pytest.raises(ValueError):
        FewShotModel(g, m.support, 0.5, D=0.9, delta=0.5, Delta=0.5, theta=0.25)
    with pytest.raises(ValueError):
        FewShotModel(g, m.support, 0.5, D=1.0, delta=0.5, Delta=0.4, theta=0.25)
    with pytest.raises(DomainError):
        FewShotModel(g, m.support, 0.5, D=1.0, delta=0.5, Delta=0.5, theta=0.7)


# ------------------------------------------------------------ classify and margin


def gaussian_model(theta=0.25):
    g = Kernel.gaussian(1.0)
    return fit(g, support([[0.2, -0.1]], g), 0.5, delta=0.5, theta=theta)


def test_support_point_is_new():
    m = gaussian_model()
    assert classify(m, [0.2, -0.1], BASE) == "new"


def test_far_point_falls_back():
    m = gaussian_model()
    assert classify(m, [40.0, 40.0], BASE) == "base"


def test_zero_margin_is_new():
    lin = Kernel.linear()
    m = fit(lin, support([[1.0, 0.0]], lin), 0.5, delta=0.5, theta=0.25)
    assert margin(m, [0.25, 0.0]) == 0
    assert classify(m, [0.25, 0.0], BASE) == "new"


def test_margin_by_hand():
    assert margin(gaussian_model(theta=0.5), [0.2, -0.1]) == 0.5


def test_margin_theta_zero_is_mean_score():
    m = gaussian_model(theta=0.0)
    x = [0.5, 0.5]
    assert margin(m, x) == mean_score(m.kernel, m.support, x)


def test_margin_linear_orthogonal():
    lin = Kernel.linear()
    m = fit(lin, support([[1.0, 0.0]], lin), 0.5, delta=0.5, theta=0.3)
    assert m.D == 1
    assert margin(m, [0.0, 1.0]) == -0.3


def test_margin_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        margin(gaussian_model(), [1.0, 2.0, 3.0])
    with pytest.raises(DimensionMismatchError):
        classify(gaussian_model(), [1.0], BASE)


def _model_from(pts, kernel, theta_frac):
    Z = support(pts, kernel)
    D = d_statistic(kernel, Z)
    r_y = 0.5 * D  # k=1-like feasibility margin for any k
    delta = 0.01
    try:
        base = fit(kernel, Z, r_y, delta=delta)
    except InfeasibleError:
        return None
    lo, hi = theta_range(base.Delta, r_y)
    return fit(kernel, Z, r_y, delta=delta, theta=lo + theta_frac * (hi - lo))


kernels = st.sampled_from([Kernel.gaussian(0.8), Kernel.laplacian(1.5), Kernel.linear(), Kernel.polynomial(2)])


@settings(max_examples=60, deadline=None)
@given(kernels, st.integers(0, 2**32 - 1), st.floats(0, 1))
def test_decision_consistency_and_permutation(kernel, seed, frac):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, (4, 3)) + np.array([1.5, 0, 0])
    m = _model_from(pts, kernel, frac)
    if m is None:
        return
    perm = rng.permutation(4)
    mp = FewShotModel(kernel, support(pts[perm], kernel), m.r_y, d_statistic(kernel, support(pts[perm], kernel)),
                      m.delta, m.Delta, m.theta)  # fmt: skip
    for x in rng.uniform(-2, 3, (30, 3)):
        g = margin(m, x)
        assert (classify(m, x, BASE) == "new") == (g >= 0)
        assert abs(margin(mp, x) - g) <= 1e-12
        if kernel.bounded:
            assert -m.theta * m.D <= g <= 1 - m.theta * m.D


def test_acceptance_rate_shrinks_with_theta():
    g = Kernel.gaussian(1.0)
    rng = np.random.default_rng(2)
    pts = rng.normal(0, 0.3, (5, 4))
    Z = support(pts, g)
    r_y = 0.3
    base = fit(g, Z, r_y, delta=0.2)
    lo, hi = theta_range(base.Delta, r_y)
    X = rng.normal(0, 1.0, (2000, 4))
    rates = [fit(g, Z, r_y, delta=0.2, theta=t).accepts(X).mean() for t in np.linspace(lo, hi, 12)]
    assert all(b <= a for a, b in zip(rates, rates[1:]))


def test_batch_margins_agree_with_scalar():
    m = gaussian_model()
    X = np.random.default_rng(0).uniform(-1, 1, (50, 2))
    np.testing.assert_allclose(m.margins(X), [margin(m, x) for x in X], rtol=0, atol=1e-14)


# ------------------------------------------------------------ serialisation


@pytest.mark.parametrize("kernel", [Kernel.linear(), Kernel.polynomial(3), Kernel.gaussian(0.7), Kernel.laplacian(1.1)], ids=str)
def test_roundtrip_exact(kernel, tmp_path):
    rng = np.random.default_rng(9)
    pts = rng.uniform(-1, 1, (6, 5)) + 2.0 / np.sqrt(5)
    m = _model_from(pts, kernel, 0.37)
    path = tmp_path / "model.json"
    m.save(path)
    back = FewShotModel.load(path)
    assert back.kernel == m.kernel
    assert back.new_label == m.new_label
    for name in ("r_y", "D", "delta", "Delta", "theta"):
        assert getattr(back, name) == getattr(m, name)
    assert np.array_equal(back.support.points, m.support.points)
    for x in rng.uniform(-1, 1, (20, 5)):
        assert abs(margin(back, x) - margin(m, x)) <= 1e-12


def test_serialised_document_is_self_describing():
    doc = json.loads(gaussian_model().dumps())
    assert doc["format"] == "kfs-fewshot-model"
    assert doc["kernel"] == {"kind": "gaussian", "param": 1.0}
    assert set(doc) >= {"support", "label", "D", "delta", "Delta", "theta", "r_y"}


def test_tampered_document_rejected():
    doc = json.loads(gaussian_model().dumps())
    doc["D"] = 0.5
    with pytest.raises(ValueError):
        FewShotModel.from_dict(doc)
    doc = json.loads(gaussian_model().dumps())
    doc["format"] = "something-else"
    with pytest.raises(ValueError):
        FewShotModel.from_dict(doc)


# ------------------------------------------------------------ several new classes


def test_cascade_first_acceptance_wins():
    g = Kernel.gaussian(0.5)
    a = fit(g, support([[0.0, 0.0]], g, "a"), 0.5, delta=0.5)
    b = fit(g, support([[0.1, 0.0]], g, "b"), 0.5, delta=0.5)
    c = fit(g, support([[3.0, 3.0]], g, "c"), 0.5, delta=0.5)
    cascade = Cascade([a, b, c], BASE)
    assert cascade.predict([0.05, 0.0]) == "a"  # both a and b accept; a registered first
    assert Cascade([b, a, c], BASE).predict([0.05, 0.0]) == "b"
    assert cascade.predict([3.0, 3.0]) == "c"
    assert cascade.predict([-9.0, 9.0]) == "base"


def test_named_theta_positions():
    g = Kernel.gaussian(1.0)
    Z = support([[0.0, 0.0]], g)
    assert [fit(g, Z, 0.5, delta=0.5, theta=t).theta for t in ("min", "midrange", "max")] == [0.0, 0.25, 0.5]
