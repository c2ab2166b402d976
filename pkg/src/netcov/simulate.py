"""Simulation of Gaussian fields, the auxiliary field, and log-Gaussian Cox processes.

Two routes to a Gaussian field with a non-stationary kernel are offered:
the exact Cholesky route, and the superposition of ``J`` independent copies
of the elementary (non-Gaussian) random field

    X(s) = eps * sqrt(b(s) / g(Z)) * (pi / W)^(1/4) * phi(Z; A(s)/sqrt(2), a(s)/(4 W)),

which has exactly the target covariance for every ``J`` and becomes
Gaussian as ``J`` grows. ``Z`` has the Gaussian density ``g``, ``W`` is drawn
from the mixing measure, ``eps`` is a random sign and ``A`` is the auxiliary
field of the resistance metric.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg

from .errors import NotPositiveDefinite, ResolutionTooCoarse
from .kernels import Dirac, KernelSpec
from .network import LinearNetwork, NetworkPoint, canonical
from .resistance import ResistanceOracle

__all__ = [
    "FieldSample",
    "ElementaryFieldConfig",
    "PointPattern",
    "EdgeGrid",
    "cholesky_jitter",
    "chol_sample",
    "sample_auxiliary",
    "default_g_sigma",
    "elementary_field",
    "superposed_field",
    "edge_grid",
    "lgcp_sample",
    "lgcp_expected_count",
]

log = logging.getLogger(__name__)

JITTER_STEPS = (1e-10, 1e-8)


@dataclass
class FieldSample:
    points: list
    values: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.points),):
            raise ValueError("one value per point required")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")


@dataclass(frozen=True)
class ElementaryFieldConfig:
    """Ingredients of the superposition sampler.

    ``g_sigma`` is the standard deviation of the Gaussian sampling density of
    ``Z``; ``None`` picks :func:`default_g_sigma`.
    """

    g_sigma: float | None = None
    J: int = 1

    def __post_init__(self):
        if self.g_sigma is not None and not self.g_sigma > 0:
            raise ValueError("g_sigma must be positive")
        if self.J < 1:
            raise ValueError("J must be at least 1")


@dataclass
class PointPattern:
    events: list
    rho: float


# ---------------------------------------------------------------------------
# Cholesky route
# ---------------------------------------------------------------------------

def cholesky_jitter(cov: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor, retrying with diagonal jitter on failure.

    Jitter is ``1e-10`` then ``1e-8`` times ``trace / N``. Returns the factor
    and the jitter that was added.
    """
    cov = np.asarray(cov, dtype=float)
    try:
        return linalg.cholesky(cov, lower=True, check_finite=False), 0.0
    except linalg.LinAlgError:
        pass
    n = len(cov)
    scale = np.trace(cov) / n if n else 0.0
    for f in JITTER_STEPS:
        jit = f * scale
        try:
            L = linalg.cholesky(cov + jit * np.eye(n), lower=True, check_finite=False)
        except linalg.LinAlgError:
            continue
        log.info("cholesky needed jitter %.3g", jit)
        return L, jit
    raise NotPositiveDefinite(
        f"covariance is not positive definite even with jitter {JITTER_STEPS[-1]:g}*trace/N"
    )


def chol_sample(cov: np.ndarray, rng: np.random.Generator, size: int | None = None):
    """Zero-mean Gaussian draw(s) with covariance ``cov``.

    Returns shape ``(N,)``, or ``(size, N)`` when ``size`` is given.
    """
    cov = np.asarray(cov, dtype=float)
    n = len(cov)
    shape = (n,) if size is None else (size, n)
    if not np.any(cov):
        return np.zeros(shape)
    L, _ = cholesky_jitter(cov)
    z = rng.standard_normal((n, 1 if size is None else size))
    x = (L @ z).T
    return x[0] if size is None else x


# ---------------------------------------------------------------------------
# Auxiliary field
# ---------------------------------------------------------------------------

def sample_auxiliary(oracle: ResistanceOracle, points: Sequence[NetworkPoint],
                     rng: np.random.Generator, size: int | None = None):
    """Draw(s) of the auxiliary field at ``points``.

    The vertex vector is drawn through the Cholesky factor of the modified
    Laplacian, interpolated linearly, and each edge adds its own Brownian
    bridge sampled sequentially at the sorted interior offsets. Repeated
    points receive identical values.
    """
    n_draw = 1 if size is None else size
    net = oracle.network
    uniq: dict[NetworkPoint, int] = {}
    idx = np.array([uniq.setdefault(p, len(uniq)) for p in points], dtype=np.int64)
    upts = list(uniq)

    z = rng.standard_normal((net.n_vertices, n_draw))
    x = linalg.solve_triangular(oracle.chol, z, lower=True, trans="T")

    P = oracle.arrays(upts)
    vals = (1.0 - P.frac)[:, None] * x[P.u] + P.frac[:, None] * x[P.w]

    by_edge: dict[int, list[int]] = {}
    for k in np.flatnonzero(P.interior):
        by_edge.setdefault(int(P.edge[k]), []).append(int(k))
    for e in sorted(by_edge):
        ks = sorted(by_edge[e], key=lambda k: P.t[k])
        L = float(net.lengths[e])
        prev_t, prev_b = 0.0, np.zeros(n_draw)
        noise = rng.standard_normal((len(ks), n_draw))
        for r, k in enumerate(ks):
            t = float(P.t[k])
            rest = L - prev_t
            mean = prev_b * (L - t) / rest
            sd = math.sqrt((t - prev_t) * (L - t) / rest)
            prev_b = mean + sd * noise[r]
            prev_t = t
            vals[k] += prev_b

    out = vals[idx].T
    return out[0] if size is None else out


# ---------------------------------------------------------------------------
# Elementary field and superposition
# ---------------------------------------------------------------------------

def default_g_sigma(spec: KernelSpec, points: Sequence[NetworkPoint]) -> float:
    """Standard deviation of ``g`` covering every Gaussian factor at ``points``.

    ``g_sigma**2 = max var A / 2 + max a / (4 w_floor)``, with ``w_floor``
    the atom for a point mass and the 1% quantile of the measure otherwise.
    """
    var_a = spec.oracle.auxiliary_variance(points)
    a = spec.a_values(points)
    fam = spec.family
    w_floor = fam.eta if isinstance(fam, Dirac) else fam.quantile(0.01)
    return math.sqrt(var_a.max() / 2.0 + a.max() / (4.0 * w_floor))


def _elementary_batch(spec: KernelSpec, points, rng, n: int, g_sigma: float,
                      a=None, b=None) -> np.ndarray:
    if a is None:
        a, b = spec.ab_values(points)
    A = sample_auxiliary(spec.oracle, points, rng, size=n)
    Z = rng.normal(0.0, g_sigma, n)
    W = spec.family.sample(rng, n)
    eps = rng.choice(np.array([-1.0, 1.0]), n)

    var = a[None, :] / (4.0 * W[:, None])
    log_phi = -0.5 * np.log(2 * np.pi * var) - (Z[:, None] - A / math.sqrt(2)) ** 2 / (2 * var)
    log_g = -0.5 * math.log(2 * math.pi * g_sigma ** 2) - Z ** 2 / (2 * g_sigma ** 2)
    log_x = (0.5 * np.log(b)[None, :] - 0.5 * log_g[:, None]
             + 0.25 * np.log(np.pi / W)[:, None] + log_phi)
    # the representation assumes a probability measure
    scale = math.sqrt(spec.family.total_mass)
    return scale * eps[:, None] * np.exp(log_x)


def elementary_field(spec: KernelSpec, config: ElementaryFieldConfig,
                     points: Sequence[NetworkPoint], rng: np.random.Generator,
                     size: int | None = None, chunk: int = 50_000) -> np.ndarray:
    """Independent draw(s) of the elementary field at ``points``.

    Each draw shares one realization of ``(Z, W, eps, A)`` across all points.
    Returns ``(N,)`` or ``(size, N)``.
    """
    g_sigma = config.g_sigma or default_g_sigma(spec, points)
    a, b = spec.ab_values(points)
    n = 1 if size is None else size
    parts = []
    done = 0
    while done < n:
        m = min(chunk, n - done)
        parts.append(_elementary_batch(spec, points, rng, m, g_sigma, a, b))
        done += m
    out = np.concatenate(parts) if parts else np.zeros((0, len(points)))
    return out[0] if size is None else out


def superposed_field(spec: KernelSpec, config: ElementaryFieldConfig,
                     points: Sequence[NetworkPoint], rng: np.random.Generator,
                     seed: int | None = None) -> FieldSample:
    """Rescaled sum of ``J`` independent elementary fields."""
    draws = elementary_field(spec, config, points, rng, size=config.J)
    return FieldSample(list(points), draws.sum(axis=0) / math.sqrt(config.J), seed)


# ---------------------------------------------------------------------------
# Log-Gaussian Cox process
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeGrid:
    """Per-edge grid of nodes, endpoints included, for intensity evaluation.

    ``points`` holds each distinct grid node once (shared vertices appear a
    single time); ``node_index[e]`` maps the nodes of edge ``e`` into it.
    """

    network: LinearNetwork
    offsets: tuple
    node_index: tuple
    points: list = field(repr=False)


def edge_grid(network: LinearNetwork, h: float | None = None,
              nodes_per_edge: int | None = None) -> EdgeGrid:
    """Grid with spacing at most ``h`` on every edge.

    The default resolution is one twentieth of each edge's length. Passing
    ``nodes_per_edge`` fixes the node count instead.
    """
    offsets, index = [], []
    lookup: dict[NetworkPoint, int] = {}
    for e in range(network.n_edges):
        L = float(network.lengths[e])
        if nodes_per_edge is not None:
            k = int(nodes_per_edge)
        elif h is None:
            k = 21
        else:
            k = int(math.ceil(L / h)) + 1
        if k < 2:
            raise ResolutionTooCoarse(f"edge {e} would have {k} grid node(s); need 2")
        off = np.linspace(0.0, L, k)
        off[-1] = L
        ids = []
        for t in off:
            p = canonical(network, NetworkPoint(e, float(t)))
            ids.append(lookup.setdefault(p, len(lookup)))
        offsets.append(off)
        index.append(np.array(ids, dtype=np.int64))
    return EdgeGrid(network, tuple(offsets), tuple(index), list(lookup))


def _check_grid(grid: EdgeGrid, values):
    values = np.asarray(values, dtype=float)
    if values.shape != (len(grid.points),):
        raise ValueError("need one field value per grid node")
    for e, off in enumerate(grid.offsets):
        if len(off) < 2:
            raise ResolutionTooCoarse(f"edge {e} has fewer than 2 grid nodes")
    return values


def lgcp_expected_count(grid: EdgeGrid, values, rho: float,
                        rule: str = "trapezoid") -> float:
    """Integral of ``rho * exp(X)`` over the network.

    ``rule="trapezoid"`` applies the trapezoidal rule to the node intensities;
    ``rule="exact"`` integrates ``exp`` of the linearly interpolated field,
    which is the intensity :func:`lgcp_sample` realizes.
    """
    values = _check_grid(grid, values)
    total = 0.0
    for off, ids in zip(grid.offsets, grid.node_index):
        x = values[ids]
        h = np.diff(off)
        x0, x1 = x[:-1], x[1:]
        if rule == "trapezoid":
            total += float(np.sum(h * 0.5 * (np.exp(x0) + np.exp(x1))))
        elif rule == "exact":
            dx = x1 - x0
            small = np.abs(dx) < 1e-8
            safe = np.where(small, 1.0, dx)
            seg = np.where(small, np.exp(0.5 * (x0 + x1)), np.expm1(dx) / safe * np.exp(x0))
            total += float(np.sum(h * seg))
        else:
            raise ValueError(f"unknown rule {rule!r}")
    return rho * total


def lgcp_sample(grid: EdgeGrid, values, rho: float, rng: np.random.Generator,
                safety: float = 1.2) -> PointPattern:
    """Poisson pattern with intensity ``rho * exp(X)`` given the gridded field.

    On each grid cell a homogeneous Poisson process at ``safety`` times the
    larger endpoint intensity is thinned with probability
    ``rho * exp(x(u)) / bound``, ``x`` linear between nodes.
    """
    values = _check_grid(grid, values)
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    if rho == 0:
        return PointPattern([], 0.0)

    cell_edge, cell_lo, cell_len, x0s, x1s = [], [], [], [], []
    for e, (off, ids) in enumerate(zip(grid.offsets, grid.node_index)):
        x = values[ids]
        cell_edge.append(np.full(len(off) - 1, e))
        cell_lo.append(off[:-1])
        cell_len.append(np.diff(off))
        x0s.append(x[:-1])
        x1s.append(x[1:])
    cell_edge = np.concatenate(cell_edge)
    cell_lo = np.concatenate(cell_lo)
    cell_len = np.concatenate(cell_len)
    x0 = np.concatenate(x0s)
    x1 = np.concatenate(x1s)

    bound = safety * rho * np.exp(np.maximum(x0, x1))
    counts = rng.poisson(bound * cell_len)
    cell = np.repeat(np.arange(len(counts)), counts)
    u = rng.random(len(cell))
    x = x0[cell] + u * (x1[cell] - x0[cell])
    keep = rng.random(len(cell)) * bound[cell] < rho * np.exp(x)
    cell, u = cell[keep], u[keep]
    offs = cell_lo[cell] + u * cell_len[cell]
    events = [NetworkPoint(int(e), float(t)) for e, t in zip(cell_edge[cell], offs)]
    return PointPattern(events, float(rho))
