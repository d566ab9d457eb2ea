import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kfs.errors import DegenerateInputError, DimensionMismatchError, PSDViolationError
from kfs.kernels import (
    Kernel,
    SupportSample,
    d_statistic,
    feature_cosine,
    feature_distance_sq,
    gram_sum,
    mean_score,
    mean_scores,
)
from oracles import monomial_features

ALL_KERNELS = [
    Kernel.linear(),
    Kernel.polynomial(1),
    Kernel.polynomial(2),
    Kernel.polynomial(3),
    Kernel.gaussian(0.7),
    Kernel.gaussian(2.0),
    Kernel.laplacian(1.0),
    Kernel.laplacian(0.3),
]
BOUNDED = [k for k in ALL_KERNELS if k.bounded]


def vec(n):
    return arrays(np.float64, n, elements=st.floats(-1, 1, allow_nan=False))


pairs = st.integers(1, 4).flatmap(lambda n: st.tuples(vec(n), vec(n)))


# ------------------------------------------------------------ eval examples


def test_linear_orthogonal():
    assert Kernel.linear()((1, 0), (0, 1)) == 0


def test_gaussian_self_is_one():
    assert Kernel.gaussian(0.7)((3, -2, 5), (3, -2, 5)) == 1


def test_polynomial_by_hand():
    assert Kernel.polynomial(2)((1, 1), (1, 0)) == 4


def test_laplacian_by_hand():
    assert Kernel.laplacian(1)((0, 0), (1, 0)) == pytest.approx(math.exp(-1), rel=1e-15)
    assert Kernel.laplacian(1)((0, 0), (1, 0)) == pytest.approx(0.367879, abs=1e-6)


def test_eval_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        Kernel.gaussian(1.0)((1, 2), (1, 2, 3))
    with pytest.raises(DimensionMismatchError):
        Kernel.linear().matrix(np.ones((2, 3)), np.ones((2, 4)))


def test_polynomial_degree_one_is_linear_plus_one():
    x, y = np.array([0.3, 0.5]), np.array([0.2, 0.9])
    assert Kernel.polynomial(1)(x, y) == Kernel.linear()(x, y) + 1


@pytest.mark.parametrize("bad", [("polynomial", 0), ("polynomial", 1.5), ("gaussian", 0), ("laplacian", -1), ("rbf", 1)])
def test_invalid_kernel_params(bad):
    with pytest.raises(ValueError):
        Kernel(*bad)


@pytest.mark.parametrize("text", ["linear", "polynomial:3", "gaussian:0.7", "laplacian:1.0"])
def test_parse_roundtrip(text):
    k = Kernel.parse(text)
    assert Kernel.parse(k.spec) == k


def test_matrix_matches_eval():
    rng = np.random.default_rng(0)
    X, Y = rng.uniform(-1, 1, (6, 3)), rng.uniform(-1, 1, (4, 3))
    for k in ALL_KERNELS:
        M = k.matrix(X, Y)
        F = k.matrix(X, Y, fast=True)
        ref = np.array([[k(x, y) for y in Y] for x in X])
        np.testing.assert_allclose(M, ref, rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(F, ref, rtol=1e-10, atol=1e-12)
        np.testing.assert_allclose(k.diag(X), [k(x, x) for x in X], rtol=1e-12)


# ------------------------------------------------------------ kernel-trick oracle


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_polynomial_matches_explicit_feature_map(m, n):
    rng = np.random.default_rng(1000 * m + n)
    k = Kernel.polynomial(m)
    for _ in range(1000):
        x, y = rng.uniform(-1, 1, (2, n))
        assert abs(monomial_features(x, m) @ monomial_features(y, m) - k(x, y)) <= 1e-10


def test_linear_matches_identity_feature_map():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        x, y = rng.uniform(-1, 1, (2, 4))
        assert abs(float(np.dot(x, y)) - Kernel.linear()(x, y)) <= 1e-10


# ------------------------------------------------------------ feature geometry


@pytest.mark.parametrize("k", ALL_KERNELS, ids=str)
def test_distance_to_self_is_zero(k):
    x = (0.3, -0.4, 0.9)
    assert feature_distance_sq(k, x, x) == 0


def test_linear_distance_by_hand():
    assert feature_distance_sq(Kernel.linear(), (1, 0), (0, 1)) == 2


def test_gaussian_distance_in_open_interval():
    v = feature_distance_sq(Kernel.gaussian(1.0), (0.1, 0.2), (0.5, -0.3))
    assert 0 < v < 2


class _BrokenKernel:
    """Returns values no PSD kernel can produce."""

    def __call__(self, x, y):
        return 1.0 if np.array_equal(x, y) else 2.0


def test_distance_flags_non_psd():
    with pytest.raises(PSDViolationError):
        feature_distance_sq(_BrokenKernel(), np.array([0.0]), np.array([1.0]))


class _RoundoffKernel:
    def __call__(self, x, y):
        return 1.0 if np.array_equal(x, y) else 1.0 + 1e-12


def test_distance_clamps_roundoff():
    assert feature_distance_sq(_RoundoffKernel(), np.array([0.0]), np.array([1.0])) == 0.0


@pytest.mark.parametrize("k", ALL_KERNELS, ids=str)
def test_cosine_self_is_one(k):
    x = (0.3, -0.4, 0.9)
    assert feature_cosine(k, x, x) == 1


def test_cosine_linear_scale_free():
    assert feature_cosine(Kernel.linear(), (2, 0), (0, 3)) == 0


def test_cosine_gaussian_by_hand():
    assert feature_cosine(Kernel.gaussian(1.0), (0, 0), (2, 0)) == pytest.approx(math.exp(-2), rel=1e-15)


def test_cosine_degenerate_at_origin():
    with pytest.raises(DegenerateInputError):
        feature_cosine(Kernel.linear(), (0, 0), (1, 0))


@settings(max_examples=200, deadline=None)
@given(pairs, st.sampled_from(ALL_KERNELS))
def test_kernel_symmetry(xy, k):
    x, y = xy
    assert k(x, y) == k(y, x)


@settings(max_examples=200, deadline=None)
@given(pairs, st.sampled_from(BOUNDED))
def test_bounded_kernel_range(xy, k):
    x, y = xy
    assert k(x, x) == 1
    assert 0 < k(x, y) <= 1


@settings(max_examples=200, deadline=None)
@given(pairs, st.sampled_from(ALL_KERNELS))
def test_distance_nonnegative_and_cosine_bounded(xy, k):
    x, y = xy
    assert feature_distance_sq(k, x, y) >= 0
    if k(x, x) > 0 and k(y, y) > 0:
        assert -1 - 1e-12 <= feature_cosine(k, x, y) <= 1 + 1e-12


# ------------------------------------------------------------ support sample, mean score, D


def test_support_sample_validation():
    with pytest.raises(ValueError):
        SupportSample(np.empty((0, 3)), "new", Kernel.linear())
    with pytest.raises(ValueError):
        SupportSample([[1.0, 2.0], [1.0]], "new", Kernel.linear())


def test_support_sample_is_immutable():
    Z = SupportSample([[1.0, 0.0], [0.0, 1.0]], "new", Kernel.linear())
    with pytest.raises(ValueError):
        Z.points[0, 0] = 5.0
    with pytest.raises(ValueError):
        Z.gram[0, 0] = 5.0


@pytest.mark.parametrize("k", ALL_KERNELS, ids=str)
def test_gram_symmetric_with_exact_diagonal(k):
    pts = np.random.default_rng(3).uniform(-1, 1, (7, 3))
    Z = SupportSample(pts, "new", k)
    assert np.array_equal(Z.gram, Z.gram.T)
    assert all(Z.gram[i, i] == k(p, p) for i, p in enumerate(pts))


@pytest.mark.parametrize("k", ALL_KERNELS, ids=str)
def test_mean_score_single_point(k):
    Z = SupportSample([[0.2, -0.7]], "new", k)
    x = (0.5, 0.1)
    assert mean_score(k, Z, x) == k((0.2, -0.7), x)


def test_mean_score_identical_support_gaussian():
    k = Kernel.gaussian(0.5)
    x = [0.1, 0.2, 0.3]
    Z = SupportSample([x] * 4, "new", k)
    assert mean_score(k, Z, x) == 1


def test_mean_score_linear_by_hand():
    k = Kernel.linear()
    Z = SupportSample([[1, 0], [0, 1]], "new", k)
    assert mean_score(k, Z, (1, 1)) == 1


def test_mean_score_dimension_mismatch():
    k = Kernel.linear()
    Z = SupportSample([[1, 0], [0, 1]], "new", k)
    with pytest.raises(DimensionMismatchError):
        mean_score(k, Z, (1, 1, 1))
    with pytest.raises(DimensionMismatchError):
        mean_scores(k, Z, np.ones((3, 3)))


def test_d_statistic_single_gaussian_point():
    k = Kernel.gaussian(1.3)
    assert d_statistic(k, SupportSample([[0.4, 0.4]], "new", k)) == 1


@pytest.mark.parametrize("k", ALL_KERNELS, ids=str)
def test_d_statistic_identical_points(k):
    x = [0.3, -0.1]
    for count in (1, 3, 10):
        D = d_statistic(k, SupportSample([x] * count, "new", k))
        assert D == pytest.approx(math.sqrt(k(x, x)), rel=1e-14)


def test_d_statistic_linear_by_hand():
    k = Kernel.linear()
    D = d_statistic(k, SupportSample([[1, 0], [0, 1]], "new", k))
    assert D == pytest.approx(math.sqrt(2) / 2, rel=1e-15)
    assert D == pytest.approx(0.70711, abs=1e-5)


def test_d_statistic_is_norm_of_explicit_mean():
    rng = np.random.default_rng(11)
    pts = rng.uniform(-1, 1, (6, 3))
    k = Kernel.polynomial(2)
    mean_feat = np.mean([monomial_features(p, 2) for p in pts], axis=0)
    assert d_statistic(k, SupportSample(pts, "new", k)) == pytest.approx(np.linalg.norm(mean_feat), rel=1e-12)


support_sets = st.integers(1, 4).flatmap(
    lambda n: st.tuples(
        arrays(np.float64, st.tuples(st.integers(1, 8), st.just(n)), elements=st.floats(-1, 1, allow_nan=False)),
        vec(n),
    )
)


@settings(max_examples=150, deadline=None)
@given(support_sets, st.sampled_from(ALL_KERNELS), st.randoms(use_true_random=False))
def test_mean_score_and_d_statistic_properties(data, k, rnd):
    pts, x = data
    Z = SupportSample(pts, "new", k)
    s = mean_score(k, Z, x)
    assert s * Z.k == pytest.approx(math.fsum(k(p, x) for p in pts), rel=1e-15, abs=1e-15)
    perm = list(range(Z.k))
    rnd.shuffle(perm)
    Zp = SupportSample(pts[perm], "new", k)
    assert abs(mean_score(k, Zp, x) - s) <= 1e-12
    D = d_statistic(k, Z)
    assert D**2 * Z.k**2 == pytest.approx(gram_sum(k, Z), rel=1e-12, abs=1e-300)
    if k.bounded:
        assert 0 < s <= 1


@pytest.mark.parametrize("scale", [1e-100, 1e100])
def test_cosine_survives_extreme_scales(scale):
    x, y = np.array([scale, 0.0]), np.array([scale, scale])
    assert feature_cosine(Kernel.linear(), x, y) == pytest.approx(math.sqrt(0.5), rel=1e-15)
