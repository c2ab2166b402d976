"""Non-stationary covariance functions on linear networks.

Every kernel here has the form

    K(s, t) = sqrt(b(s) b(t)) * kappa(alpha(s, t), d_R(s, t)),
    kappa(alpha, d) = integral of (alpha + d w)^(-1/2) dF(w),

with ``alpha(s, t) = (a(s) + a(t)) / 2`` and ``F`` a positive finite measure
on ``(0, inf)``. The radial profile ``psi(r) = kappa(r, 1)`` is a generalized
Stieltjes function of order 1/2, and for ``s != t``

    K(s, t) = sqrt(b(s) b(t) / d) * psi(alpha / d).

Four measures are provided: a point mass (the Cauchy-type kernel), an
exponential density (erfc closed form), a scaled beta-prime density
(hypergeometric closed form), and an arbitrary finite atomic measure.

The matrix-valued extension multiplies component pairs by a positive
semidefinite matrix ``beta`` and uses ``alpha_ij(s, t) = (a_i(s) + a_j(t)) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .errors import DomainError, NonPositiveParameter, NonPSDBeta
from .network import NetworkPoint
from .resistance import ResistanceOracle
from .special import erfcx, hyp2f1_special

__all__ = [
    "StieltjesFamily",
    "Dirac",
    "ExpDensity",
    "BetaPrime",
    "NumericMeasure",
    "family_from_name",
    "SpatialFunction",
    "Constant",
    "ExpDecay",
    "Tabulated",
    "KernelSpec",
    "MultiKernelSpec",
    "psi",
    "kernel_eval",
    "kernel_matrix",
    "multi_kernel_eval",
    "multi_kernel_matrix",
    "colocated_correlation",
]


# ---------------------------------------------------------------------------
# Mixing measures
# ---------------------------------------------------------------------------

class StieltjesFamily:
    """A positive finite measure ``F`` on ``(0, inf)``."""

    total_mass: float = 1.0

    def kappa(self, alpha, d):
        """``integral (alpha + d w)^(-1/2) dF(w)`` for ``alpha > 0``, ``d >= 0``."""
        raise NotImplementedError

    def psi(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(~(r > 0)):
            raise DomainError("psi(r) is defined for r > 0 only")
        out = self.kappa(r, np.ones_like(r))
        return out if np.ndim(out) else float(out)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        """Draws from ``F`` normalized to a probability measure."""
        raise NotImplementedError

    def quantile(self, q: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class Dirac(StieltjesFamily):
    """Point mass at ``eta``; gives ``sqrt(b b / alpha) (1 + eta d / alpha)^(-1/2)``."""

    eta: float = 1.0

    def __post_init__(self):
        _check_positive("eta", self.eta)

    def kappa(self, alpha, d):
        return 1.0 / np.sqrt(alpha + self.eta * np.asarray(d, dtype=float))

    def sample(self, rng, size):
        return np.full(size, float(self.eta))

    def quantile(self, q):
        return float(self.eta)


@dataclass(frozen=True)
class ExpDensity(StieltjesFamily):
    """Exponential density ``exp(-w / eta) / eta``."""

    eta: float = 1.0

    def __post_init__(self):
        _check_positive("eta", self.eta)

    def density(self, w):
        return np.exp(-w / self.eta) / self.eta

    def kappa(self, alpha, d):
        alpha, d = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(d, float))
        pos = d > 0
        ds = np.where(pos, d, 1.0)
        x = alpha / (self.eta * ds)
        # sqrt(pi / (eta d)) exp(x) erfc(sqrt(x)), with exp*erfc fused
        val = np.sqrt(np.pi / (self.eta * ds)) * erfcx(np.sqrt(x))
        out = np.where(pos, val, 1.0 / np.sqrt(alpha))
        return out if out.ndim else float(out)

    def sample(self, rng, size):
        return rng.exponential(self.eta, size)

    def quantile(self, q):
        return float(-self.eta * math.log1p(-q))


@dataclass(frozen=True)
class BetaPrime(StieltjesFamily):
    """Scaled beta-prime density ``sqrt(eta) / pi * w^(-1/2) / (eta + w)``."""

    eta: float = 1.0

    def __post_init__(self):
        _check_positive("eta", self.eta)

    def density(self, w):
        return math.sqrt(self.eta) / np.pi / (np.sqrt(w) * (self.eta + w))

    def kappa(self, alpha, d):
        alpha, d = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(d, float))
        pos = d > 0
        ds = np.where(pos, d, 1.0)
        x = 1.0 - alpha / (self.eta * ds)
        val = (2.0 / np.pi) / np.sqrt(self.eta * ds) * hyp2f1_special(x)
        out = np.where(pos, val, 1.0 / np.sqrt(alpha))
        return out if out.ndim else float(out)

    def sample(self, rng, size):
        # W / eta is beta-prime(1/2, 1/2): a ratio of two Gamma(1/2) variables
        g1 = rng.standard_gamma(0.5, size)
        g2 = rng.standard_gamma(0.5, size)
        return self.eta * g1 / g2

    def quantile(self, q):
        return float(self.eta * stats.betaprime.ppf(q, 0.5, 0.5))


@dataclass(frozen=True)
class NumericMeasure(StieltjesFamily):
    """Finite atomic measure with the given positive ``nodes`` and ``weights``."""

    nodes: tuple = ()
    weights: tuple = ()

    def __post_init__(self):
        nodes = tuple(float(x) for x in self.nodes)
        weights = tuple(float(x) for x in self.weights)
        if not nodes or len(nodes) != len(weights):
            raise ValueError("nodes and weights must be non-empty and of equal length")
        for x in nodes + weights:
            _check_positive("atom", x)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def total_mass(self) -> float:
        return float(sum(self.weights))

    def kappa(self, alpha, d):
        alpha = np.asarray(alpha, dtype=float)
        d = np.asarray(d, dtype=float)
        out = np.zeros(np.broadcast(alpha, d).shape)
        for w, m in zip(self.nodes, self.weights):
            out += m / np.sqrt(alpha + d * w)
        return out if out.ndim else float(out)

    def sample(self, rng, size):
        p = np.asarray(self.weights) / self.total_mass
        return np.asarray(self.nodes)[rng.choice(len(p), size=size, p=p)]

    def quantile(self, q):
        order = np.argsort(self.nodes)
        cdf = np.cumsum(np.asarray(self.weights)[order]) / self.total_mass
        return float(np.asarray(self.nodes)[order][np.searchsorted(cdf, q)])


def family_from_name(name: str, eta: float = 1.0, **kw) -> StieltjesFamily:
    key = name.lower().replace("-", "_")
    if key in ("dirac", "cauchy"):
        return Dirac(eta)
    if key in ("exp", "exponential", "exp_density", "erfc"):
        return ExpDensity(eta)
    if key in ("beta_prime", "betaprime", "hypergeometric"):
        return BetaPrime(eta)
    if key in ("numeric", "numeric_measure", "atomic"):
        return NumericMeasure(kw["nodes"], kw["weights"])
    raise ValueError(f"unknown family {name!r}")


def psi(family: StieltjesFamily, r):
    """Generalized Stieltjes function ``integral (r + w)^(-1/2) dF(w)``."""
    return family.psi(r)


# ---------------------------------------------------------------------------
# Spatially varying parameter functions
# ---------------------------------------------------------------------------

class SpatialFunction:
    """A strictly positive function on the network."""

    def values(self, oracle: ResistanceOracle,
               points: Sequence[NetworkPoint]) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(SpatialFunction):
    value: float

    def values(self, oracle, points):
        return np.full(len(points), float(self.value))


@dataclass(frozen=True)
class ExpDecay(SpatialFunction):
    """``scale * exp(-d_R(s, anchor) / range)``."""

    anchor: NetworkPoint
    scale: float
    range: float

    def values(self, oracle, points):
        if not len(points):
            return np.zeros(0)
        d = oracle.distances_from(self.anchor, points)
        return self.scale * np.exp(-d / self.range)


@dataclass(frozen=True)
class Tabulated(SpatialFunction):
    """Values looked up per point; every evaluated point must be covered."""

    table: Mapping[NetworkPoint, float] = field(default_factory=dict)

    def values(self, oracle, points):
        try:
            return np.array([self.table[p] for p in points], dtype=float)
        except KeyError as exc:
            raise KeyError(f"no tabulated value at {exc.args[0]}") from None


def _check_positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise NonPositiveParameter(f"{name} must be positive and finite, got {value!r}")


def _check_values(name, vals):
    if np.any(~(np.isfinite(vals) & (vals > 0))):
        raise NonPositiveParameter(f"function {name} must be strictly positive")
    return vals


# ---------------------------------------------------------------------------
# Scalar kernels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KernelSpec:
    """Scalar non-stationary kernel.

    Give either ``b`` directly or ``c``; with ``c`` the kernel uses
    ``b = c * sqrt(a)``, so that ``K(s, s) = c(s) * F((0, inf))``.
    """

    family: StieltjesFamily
    a: SpatialFunction
    oracle: ResistanceOracle
    b: SpatialFunction | None = None
    c: SpatialFunction | None = None

    def __post_init__(self):
        if (self.b is None) == (self.c is None):
            raise ValueError("give exactly one of b or c")

    def a_values(self, points):
        return _check_values("a", self.a.values(self.oracle, points))

    def ab_values(self, points):
        a = self.a_values(points)
        if self.b is not None:
            b = self.b.values(self.oracle, points)
        else:
            b = self.c.values(self.oracle, points) * np.sqrt(a)
        return a, _check_values("b", b)


def kernel_eval(spec: KernelSpec, s: NetworkPoint, t: NetworkPoint) -> float:
    return float(kernel_matrix(spec, [s], [t])[0, 0])


def kernel_matrix(spec: KernelSpec, points: Sequence[NetworkPoint],
                  others: Sequence[NetworkPoint] | None = None) -> np.ndarray:
    """Covariance matrix ``[K(s_i, t_j)]``; symmetric when ``others`` is omitted."""
    a, b = spec.ab_values(points)
    D = spec.oracle.distances(points, others)
    if others is None:
        a2, b2 = a, b
    else:
        a2, b2 = spec.ab_values(others)
    alpha = 0.5 * (a[:, None] + a2[None, :])
    K = np.sqrt(b[:, None] * b2[None, :]) * spec.family.kappa(alpha, D)
    if others is None:
        K = 0.5 * (K + K.T)
    return K


# ---------------------------------------------------------------------------
# Matrix-valued kernels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultiKernelSpec:
    """``q``-variate kernel sharing one mixing measure across components."""

    family: StieltjesFamily
    a: tuple
    b: tuple
    beta: np.ndarray
    oracle: ResistanceOracle

    def __post_init__(self):
        beta = np.atleast_2d(np.asarray(self.beta, dtype=float))
        q = len(self.a)
        if len(self.b) != q or beta.shape != (q, q):
            raise ValueError(f"need {q} a-functions, {q} b-functions and a {q}x{q} beta")
        if not np.allclose(beta, beta.T, rtol=0, atol=1e-12 * max(1.0, np.abs(beta).max())):
            raise NonPSDBeta("beta must be symmetric")
        lam = np.linalg.eigvalsh(beta)
        if lam.min() < -1e-10 * np.trace(beta):
            raise NonPSDBeta(f"beta has negative eigenvalue {lam.min():.3g}")
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))
        object.__setattr__(self, "beta", beta)

    @property
    def q(self) -> int:
        return len(self.a)

    def ab_values(self, points):
        A = np.array([_check_values("a", f.values(self.oracle, points)) for f in self.a])
        B = np.array([_check_values("b", f.values(self.oracle, points)) for f in self.b])
        return A.reshape(self.q, len(points)), B.reshape(self.q, len(points))


def multi_kernel_eval(mspec: MultiKernelSpec, s: NetworkPoint, t: NetworkPoint,
                      i: int, j: int) -> float:
    """Cross-covariance ``K_ij(s, t)`` between component ``i`` at ``s`` and ``j`` at ``t``."""
    A, B = mspec.ab_values([s, t])
    d = mspec.oracle.between(s, t)
    alpha = 0.5 * (A[i, 0] + A[j, 1])
    return float(mspec.beta[i, j] * math.sqrt(B[i, 0] * B[j, 1])
                 * mspec.family.kappa(alpha, d))


def multi_kernel_matrix(mspec: MultiKernelSpec,
                        points: Sequence[NetworkPoint]) -> np.ndarray:
    """Block covariance of size ``N q``; row ``n * q + i`` is component ``i`` at point ``n``."""
    N, q = len(points), mspec.q
    A, B = mspec.ab_values(points)
    D = mspec.oracle.distances(points)
    M = np.empty((N * q, N * q))
    for i in range(q):
        for j in range(q):
            alpha = 0.5 * (A[i][:, None] + A[j][None, :])
            M[i::q, j::q] = (mspec.beta[i, j] * np.sqrt(B[i][:, None] * B[j][None, :])
                             * mspec.family.kappa(alpha, D))
    return 0.5 * (M + M.T)


def colocated_correlation(mspec: MultiKernelSpec, s: NetworkPoint,
                          i: int, j: int) -> float:
    A, _ = mspec.ab_values([s])
    ai, aj = A[i, 0], A[j, 0]
    beta = mspec.beta
    return float(beta[i, j] / math.sqrt(beta[i, i] * beta[j, j])
                 * (ai * aj) ** 0.25 / math.sqrt(0.5 * (ai + aj)))
