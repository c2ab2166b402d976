import math
from dataclasses import dataclass

import numpy as np
import pytest
from scipy import stats

from netcov import (
    Constant,
    Dirac,
    ExpDensity,
    FieldSample,
    KernelSpec,
    build_oracle,
    kernel_matrix,
    make_point,
    sample_points,
)
from netcov.errors import InsufficientData
from netcov.fixtures import single_edge
from netcov.infer import (
    CompactSupport,
    FitOptions,
    Gaussian,
    LocalFitProblem,
    WeightScheme,
    count_likelihood_work,
    fit_local,
    fit_sites,
    local_loglik,
    order_neighbors,
    scheme_from_name,
    weighted_local_likelihood,
    weights,
)

from conftest import random_points


@dataclass(frozen=True)
class Ones(WeightScheme):
    bandwidth: float = math.inf

    def __call__(self, d):
        return np.ones_like(np.asarray(d, dtype=float))


@dataclass(frozen=True)
class FirstK(WeightScheme):
    k: int = 1
    bandwidth: float = math.inf

    def __call__(self, d):
        w = np.zeros(np.shape(d))
        w[: self.k] = 1.0
        return w


def test_weight_values():
    cs = CompactSupport(200.0)
    assert weights(cs, np.array([200.0]))[0] == 0.0
    assert weights(cs, np.array([100.0]))[0] == 0.5
    assert weights(cs, np.array([0.0]))[0] == 1.0
    assert weights(Gaussian(120.0), np.array([120.0]))[0] == pytest.approx(math.exp(-1))
    assert isinstance(scheme_from_name("cs", 1.0), CompactSupport)
    assert isinstance(scheme_from_name("gauss", 1.0), Gaussian)
    with pytest.raises(ValueError):
        scheme_from_name("box", 1.0)


def test_order_neighbors_ties(unit_edge):
    o = build_oracle(unit_edge)
    s = make_point(unit_edge, 0, 0.5)
    pts = [make_point(unit_edge, 0, t) for t in (0.9, 0.1, 0.5, 0.3)]
    order, d = order_neighbors(o, s, pts)
    # 0.9 and 0.1 are equidistant; lower index first
    assert list(order) == [2, 3, 0, 1]
    assert d[0] == 0.0


def test_loglik_single_observation():
    y = 0.7
    a0, b0 = 2.0, 3.0
    var = b0 / math.sqrt(a0)
    want = -0.5 * math.log(2 * math.pi * var) - y * y / (2 * var)
    got = local_loglik(a0, b0, [y], np.zeros((1, 1)), Dirac(1.0))
    assert got == pytest.approx(want, rel=1e-14)
    assert local_loglik(a0, b0, [], np.zeros((0, 0)), Dirac(1.0)) == 0.0


@pytest.fixture
def small_problem(grid6, grid6_oracle):
    rng = np.random.default_rng(4)
    pts = random_points(grid6, rng, 30)
    vals = rng.standard_normal(30)
    site = make_point(grid6, 25, 0.5)
    return FieldSample(pts, vals), site


@pytest.mark.parametrize("fam", [Dirac(1.0), ExpDensity(0.5)])
def test_full_weights_telescope_to_joint(fam, small_problem, grid6_oracle):
    data, site = small_problem
    prob = LocalFitProblem(data, site, Ones(), fam, grid6_oracle)
    a0, b0 = 1.7, 0.9
    spec = KernelSpec(fam, Constant(a0), grid6_oracle, b=Constant(b0))
    C = kernel_matrix(spec, data.points)
    want = stats.multivariate_normal(np.zeros(len(C)), C).logpdf(data.values)
    assert weighted_local_likelihood(a0, b0, prob) == pytest.approx(want, rel=1e-10)


def test_partial_telescoping(small_problem, grid6_oracle):
    data, site = small_problem
    for k in (1, 2, 7):
        prob = LocalFitProblem(data, site, FirstK(k), Dirac(1.0), grid6_oracle)
        idx = prob.order[:k]
        pts = [data.points[i] for i in idx]
        want = local_loglik(1.3, 0.8, data.values[idx], grid6_oracle.distances(pts), Dirac(1.0))
        assert prob.k_star == k
        assert weighted_local_likelihood(1.3, 0.8, prob) == pytest.approx(want, rel=1e-12)


def test_truncation_at_one(small_problem, grid6_oracle):
    data, site = small_problem
    prob = LocalFitProblem(data, site, FirstK(1), Dirac(1.0), grid6_oracle)
    y = data.values[prob.order[0]]
    var = 0.8 / math.sqrt(1.3)
    want = -0.5 * math.log(2 * math.pi * var) - y * y / (2 * var)
    assert weighted_local_likelihood(1.3, 0.8, prob) == pytest.approx(want, rel=1e-13)


def test_joint_invariant_to_permutation(small_problem, grid6_oracle):
    data, site = small_problem
    perm = np.random.default_rng(1).permutation(len(data.points))
    shuffled = FieldSample([data.points[i] for i in perm], data.values[perm])
    p1 = LocalFitProblem(data, site, Ones(), Dirac(1.0), grid6_oracle)
    p2 = LocalFitProblem(shuffled, site, Ones(), Dirac(1.0), grid6_oracle)
    assert weighted_local_likelihood(2.0, 1.0, p1) == pytest.approx(
        weighted_local_likelihood(2.0, 1.0, p2), rel=1e-12)


def test_work_monotone_in_bandwidth(small_problem, grid6_oracle):
    data, site = small_problem
    prev = (0, 0)
    for tau in (0.5, 1.0, 2.0, 4.0, 100.0):
        prob = LocalFitProblem(data, site, CompactSupport(tau), Dirac(1.0), grid6_oracle)
        k, w = count_likelihood_work(prob)
        assert k >= prev[0] and w >= prev[1]
        assert w == sum(i * i for i in range(1, k + 1))
        prev = (k, w)
    assert prev[0] == len(data.points)


def test_insufficient_data(small_problem, grid6_oracle):
    data, site = small_problem
    prob = LocalFitProblem(data, site, FirstK(1), Dirac(1.0), grid6_oracle)
    with pytest.raises(InsufficientData):
        fit_local(prob)


def test_known_variance_links_b(grid6, grid6_oracle):
    rng = np.random.default_rng(8)
    pts = sample_points(grid6, "per_edge", 3)
    spec = KernelSpec(Dirac(1.0), Constant(2.0), grid6_oracle, c=Constant(1.0))
    y = np.linalg.cholesky(kernel_matrix(spec, pts)) @ rng.standard_normal(len(pts))
    site = make_point(grid6, 25, 0.5)
    prob = LocalFitProblem(FieldSample(pts, y), site, CompactSupport(2.0), Dirac(1.0),
                           grid6_oracle, variance_known=1.0)
    fit = fit_local(prob)
    assert fit.converged
    assert fit.b_hat == pytest.approx(math.sqrt(fit.a_hat), rel=1e-12)
    assert 0.2 < fit.a_hat < 20


def test_free_variance_fit_recovers_scale():
    net = single_edge(50.0)
    o = build_oracle(net)
    pts = [make_point(net, 0, t) for t in np.linspace(0, 50, 400)]
    spec = KernelSpec(Dirac(1.0), Constant(3.0), o, b=Constant(2.0))
    rng = np.random.default_rng(0)
    y = np.linalg.cholesky(kernel_matrix(spec, pts)) @ rng.standard_normal(len(pts))
    prob = LocalFitProblem(FieldSample(pts, y), pts[200], Ones(), Dirac(1.0), o)
    fit = fit_local(prob)
    # the variance b/sqrt(a) is well identified even when a and b separately are not
    assert fit.b_hat / math.sqrt(fit.a_hat) == pytest.approx(2 / math.sqrt(3), rel=0.5)


def test_fit_sites_empty_and_failure(small_problem, grid6, grid6_oracle):
    data, site = small_problem
    assert fit_sites(grid6_oracle, data, [], CompactSupport(1.0), Dirac(1.0)) == []
    far = grid6.vertex_point(0)
    near = make_point(grid6, 25, 0.5)
    rows = fit_sites(grid6_oracle, data, [near, far], CompactSupport(1.5), Dirac(1.0),
                     variance_known=1.0, options=FitOptions(restarts=2))
    assert rows[0].error is None and math.isfinite(rows[0].a_hat)
    tiny = fit_sites(grid6_oracle, data, [far], CompactSupport(1e-3), Dirac(1.0))
    assert tiny[0].error.startswith("InsufficientData")
    assert math.isnan(tiny[0].a_hat) and not tiny[0].converged
