import math

import numpy as np
import pytest
from scipy import stats

from netcov import (
    Constant,
    Dirac,
    ElementaryFieldConfig,
    ExpDecay,
    ExpDensity,
    KernelSpec,
    NotPositiveDefinite,
    ResolutionTooCoarse,
    auxiliary_covariance,
    build_oracle,
    chol_sample,
    edge_grid,
    elementary_field,
    kernel_matrix,
    lgcp_expected_count,
    lgcp_sample,
    make_point,
    resistance_matrix,
    sample_auxiliary,
    superposed_field,
)
from netcov.fixtures import single_edge
from netcov.simulate import cholesky_jitter, default_g_sigma

from conftest import random_points


def test_chol_sample_identity(rng):
    x = chol_sample(np.eye(3), rng, size=20000)
    assert x.shape == (20000, 3)
    assert np.allclose(np.cov(x.T), np.eye(3), atol=0.04)


def test_chol_sample_zero_matrix(rng):
    assert np.array_equal(chol_sample(np.zeros((4, 4)), rng), np.zeros(4))


def test_cholesky_jitter_rank_deficient():
    v = np.array([1.0, 2.0, 3.0])
    L, jit = cholesky_jitter(np.outer(v, v))
    assert jit > 0
    with pytest.raises(NotPositiveDefinite):
        cholesky_jitter(np.diag([1.0, -1.0]))


def test_chol_sample_covariance(rng, grid6, grid6_oracle):
    pts = random_points(grid6, rng, 6)
    spec = KernelSpec(Dirac(1.0), ExpDecay(pts[0], 3.0, 2.0), grid6_oracle, c=Constant(1.5))
    K = kernel_matrix(spec, pts)
    x = chol_sample(K, rng, size=40000)
    assert np.allclose(np.cov(x.T), K, atol=0.05)


def test_auxiliary_matches_covariance(rng, grid6, grid6_oracle):
    pts = random_points(grid6, rng, 6)
    # include two interior points on one edge to exercise the sequential bridge
    pts += [make_point(grid6, 7, 0.2), make_point(grid6, 7, 0.7)]
    A = sample_auxiliary(grid6_oracle, pts, rng, size=60000)
    C = auxiliary_covariance(grid6_oracle, pts)
    emp = A.T @ A / len(A)
    assert np.allclose(emp, C, atol=0.06 * np.max(np.diag(C)))


def test_auxiliary_variogram_is_resistance(rng):
    net = single_edge(2.0)
    o = build_oracle(net)
    pts = [make_point(net, 0, t) for t in (0.0, 0.5, 1.3, 2.0)]
    A = sample_auxiliary(o, pts, rng, size=80000)
    D = resistance_matrix(o, pts)
    for i in range(4):
        for j in range(i + 1, 4):
            emp = np.mean((A[:, i] - A[:, j]) ** 2)
            se = D[i, j] * math.sqrt(2 / len(A))
            assert abs(emp - D[i, j]) < 4 * se


def test_auxiliary_repeated_point(rng, grid6, grid6_oracle):
    p = make_point(grid6, 3, 0.4)
    A = sample_auxiliary(grid6_oracle, [p, make_point(grid6, 9, 0.1), p], rng, size=5)
    assert np.array_equal(A[:, 0], A[:, 2])


def _spec(grid6, grid6_oracle, fam=Dirac(1.0)):
    anchor = make_point(grid6, 30, 0.5)
    return KernelSpec(fam, ExpDecay(anchor, 3.0, 2.0), grid6_oracle,
                      c=ExpDecay(anchor, 2.0, 4.0))


@pytest.mark.parametrize("fam", [Dirac(1.0), ExpDensity(1.0)])
def test_elementary_moments(fam, grid6, grid6_oracle):
    rng = np.random.default_rng(5)
    spec = _spec(grid6, grid6_oracle, fam)
    pts = [make_point(grid6, 30, 0.5), make_point(grid6, 31, 0.2), grid6.vertex_point(0)]
    X = elementary_field(spec, ElementaryFieldConfig(), pts, rng, size=200000)
    K = kernel_matrix(spec, pts)
    emp = X.T @ X / len(X)
    se = np.sqrt(np.mean((X[:, :, None] * X[:, None, :] - emp) ** 2, axis=0) / len(X))
    assert np.all(np.abs(emp - K) < 4.5 * se)
    assert np.all(np.abs(X.mean(axis=0)) < 4.5 * X.std(axis=0) / math.sqrt(len(X)))


def test_default_g_sigma_formula(grid6, grid6_oracle):
    spec = _spec(grid6, grid6_oracle)
    pts = [make_point(grid6, 30, 0.5), grid6.vertex_point(0)]
    var_a = grid6_oracle.auxiliary_variance(pts).max()
    a_max = spec.a_values(pts).max()
    assert default_g_sigma(spec, pts) == pytest.approx(math.sqrt(var_a / 2 + a_max / 4))


def test_superposition_j_invariance_and_skew(grid6, grid6_oracle):
    spec = _spec(grid6, grid6_oracle)
    p = [make_point(grid6, 30, 0.5)]
    target = kernel_matrix(spec, p)[0, 0]
    kurt = []
    for J in (1, 16):
        rng = np.random.default_rng(11)
        cfg = ElementaryFieldConfig(J=J)
        x = np.array([superposed_field(spec, cfg, p, rng).values[0] for _ in range(4000)])
        assert np.mean(x ** 2) == pytest.approx(target, rel=0.2)
        kurt.append(stats.kurtosis(x))
    # heavier-than-Gaussian tails fade as J grows
    assert abs(kurt[1]) < abs(kurt[0])


def test_field_sample_determinism(grid6, grid6_oracle):
    spec = _spec(grid6, grid6_oracle)
    pts = [make_point(grid6, e, 0.5) for e in range(10)]
    cfg = ElementaryFieldConfig(J=8)
    a = superposed_field(spec, cfg, pts, np.random.default_rng(3), seed=3)
    b = superposed_field(spec, cfg, pts, np.random.default_rng(3), seed=3)
    assert np.array_equal(a.values, b.values)


# --- LGCP ------------------------------------------------------------------

def test_lgcp_constant_field_mean():
    net = single_edge(1000.0)
    grid = edge_grid(net, nodes_per_edge=11)
    x = np.zeros(len(grid.points))
    assert lgcp_expected_count(grid, x, 0.002) == pytest.approx(2.0)
    assert lgcp_expected_count(grid, x, 0.002, rule="exact") == pytest.approx(2.0)
    rng = np.random.default_rng(2)
    n = [len(lgcp_sample(grid, x, 0.002, rng).events) for _ in range(4000)]
    assert np.mean(n) == pytest.approx(2.0, abs=4 * math.sqrt(2 / 4000))


def test_lgcp_zero_rate(grid6):
    grid = edge_grid(grid6)
    pat = lgcp_sample(grid, np.zeros(len(grid.points)), 0.0, np.random.default_rng(0))
    assert pat.events == []


def test_trapezoid_identity():
    net = single_edge(2.0)
    grid = edge_grid(net, nodes_per_edge=3)
    x = np.array([0.0, 1.0, -1.0])
    # nodes at 0, 1, 2 have field 0, 1, -1 in canonical order
    vals = {p.offset: v for p, v in zip(grid.points, x)}
    want = 0.5 * (math.exp(vals[0.0]) + 2 * math.exp(vals[1.0]) + math.exp(vals[2.0]))
    assert lgcp_expected_count(grid, x, 1.0) == pytest.approx(want)


def test_exact_rule_linear_field():
    net = single_edge(1.0)
    grid = edge_grid(net, nodes_per_edge=2)
    x = np.array([0.0, 2.0])
    assert lgcp_expected_count(grid, x, 1.0, rule="exact") == pytest.approx(
        (math.exp(2) - 1) / 2, rel=1e-14)


def test_lgcp_sample_matches_exact_intensity():
    net = single_edge(1.0)
    grid = edge_grid(net, nodes_per_edge=2)
    x = np.array([0.0, 2.0])
    rng = np.random.default_rng(9)
    events = [e.offset for _ in range(3000) for e in lgcp_sample(grid, x, 2.0, rng).events]
    mean = lgcp_expected_count(grid, x, 2.0, rule="exact")
    assert len(events) / 3000 == pytest.approx(mean, abs=4 * math.sqrt(mean / 3000))
    # event offsets follow the density exp(2u) / normalizer
    cdf = lambda u: np.expm1(2 * np.asarray(u)) / math.expm1(2)
    assert stats.kstest(events, cdf).pvalue > 1e-3


def test_resolution_too_coarse(grid6):
    with pytest.raises(ResolutionTooCoarse):
        edge_grid(grid6, nodes_per_edge=1)


def test_edge_grid_shares_vertices(grid6):
    grid = edge_grid(grid6, nodes_per_edge=5)
    assert len(grid.points) == grid6.n_vertices + 3 * grid6.n_edges
