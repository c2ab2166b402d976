"""Resistance metric and the auxiliary Gaussian field that defines it.

The auxiliary field is the sum of a vertex-level Gaussian vector with
precision matrix ``Delta`` (conductance Laplacian plus one at a reference
vertex), linearly interpolated along edges, and an independent Brownian
bridge on every edge. The resistance metric is its variogram.

For a point at offset ``t`` on an edge ``(u, w)`` of length ``L`` the
interpolation weights are ``1 - t/L`` on ``u`` and ``t/L`` on ``w``. Bridge
covariance on one edge is ``t1 (L - t2) / L`` for ``t1 <= t2``.

Conductance between adjacent vertices is the reciprocal of the stored edge
length. This is the Euclidean distance unless lengths were overridden when
the network was built.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from scipy import linalg

from .errors import FactorizationFailure
from .network import LinearNetwork, NetworkPoint

__all__ = [
    "ResistanceOracle",
    "PointArrays",
    "build_oracle",
    "point_coefficients",
    "auxiliary_covariance",
    "resistance_between",
    "resistance_matrix",
]


class PointArrays:
    """Column view of a list of points: interpolation and bridge data."""

    __slots__ = ("edge", "t", "L", "u", "w", "frac", "interior")

    def __init__(self, network: LinearNetwork, points: Sequence[NetworkPoint]):
        n = len(points)
        self.edge = np.fromiter((p.edge for p in points), dtype=np.int64, count=n)
        self.t = np.fromiter((p.offset for p in points), dtype=float, count=n)
        self.L = network.lengths[self.edge]
        self.u = network.edges[self.edge, 0]
        self.w = network.edges[self.edge, 1]
        self.frac = self.t / self.L
        self.interior = (self.t > 0.0) & (self.t < self.L)
        # vertex-anchored points get exact indicator weights
        self.frac = np.where(self.t == 0.0, 0.0, np.where(self.t == self.L, 1.0, self.frac))

    def __len__(self):
        return len(self.t)

    @property
    def bridge_var(self) -> np.ndarray:
        return np.where(self.interior, self.t * (self.L - self.t) / self.L, 0.0)


class ResistanceOracle:
    """Factorized modified Laplacian with vertex covariance and resistances.

    Attributes
    ----------
    network : LinearNetwork
    reference_vertex : int
    delta : (n, n) ndarray
        Modified Laplacian (precision of the vertex part of the field).
    chol : (n, n) ndarray
        Lower Cholesky factor of ``delta``.
    sigma0 : (n, n) ndarray
        Vertex covariance, the inverse of ``delta``.
    vertex_resistance : (n, n) ndarray
        Effective resistance between vertices (variogram of ``sigma0``).
    """

    def __init__(self, network: LinearNetwork, reference_vertex: int = 0):
        n = network.n_vertices
        if not 0 <= reference_vertex < n:
            raise IndexError(f"reference vertex {reference_vertex} out of range")
        self.network = network
        self.reference_vertex = int(reference_vertex)

        u, w = network.edges[:, 0], network.edges[:, 1]
        con = 1.0 / network.lengths
        D = np.zeros((n, n))
        np.add.at(D, (u, u), con)
        np.add.at(D, (w, w), con)
        np.add.at(D, (u, w), -con)
        np.add.at(D, (w, u), -con)
        D[reference_vertex, reference_vertex] += 1.0
        self.delta = D

        try:
            self.chol = linalg.cholesky(D, lower=True)
        except linalg.LinAlgError as exc:
            raise FactorizationFailure(
                "modified Laplacian is not positive definite; network is malformed"
            ) from exc
        S = linalg.cho_solve((self.chol, True), np.eye(n))
        self.sigma0 = 0.5 * (S + S.T)

        d = np.diag(self.sigma0)
        R = d[:, None] + d[None, :] - 2.0 * self.sigma0
        np.fill_diagonal(R, 0.0)
        self.vertex_resistance = 0.5 * (R + R.T)

        for arr in (self.delta, self.chol, self.sigma0, self.vertex_resistance):
            arr.setflags(write=False)

    def arrays(self, points: Sequence[NetworkPoint]) -> PointArrays:
        return PointArrays(self.network, points)

    def auxiliary_covariance(self, points: Sequence[NetworkPoint],
                             others: Sequence[NetworkPoint] | None = None) -> np.ndarray:
        P = self.arrays(points)
        Q = P if others is None else self.arrays(others)
        S = self.sigma0
        C = _bilinear(S, P, Q)
        C += _bridge_cov(P, Q)
        if others is None:
            C = 0.5 * (C + C.T)
        return C

    def distances(self, points: Sequence[NetworkPoint],
                  others: Sequence[NetworkPoint] | None = None) -> np.ndarray:
        """Resistance metric between every point of ``points`` and ``others``.

        Computed from vertex resistances rather than ``sigma0`` so that the
        large reference offset in ``sigma0`` never enters a cancellation.
        """
        P = self.arrays(points)
        Q = P if others is None else self.arrays(others)
        R = self.vertex_resistance
        out = _bilinear(R, P, Q)
        # -1/2 (x - y)' R (x - y) with weights summing to one on each side
        selfP = P.frac * (1.0 - P.frac) * R[P.u, P.w]
        selfQ = Q.frac * (1.0 - Q.frac) * R[Q.u, Q.w]
        out -= selfP[:, None]
        out -= selfQ[None, :]

        bp, bq = P.bridge_var, Q.bridge_var
        out += bp[:, None] + bq[None, :]
        out -= 2.0 * _bridge_cov(P, Q)

        np.maximum(out, 0.0, out=out)
        same = ((P.edge[:, None] == Q.edge[None, :])
                & (P.t[:, None] == Q.t[None, :]))
        out[same] = 0.0
        if others is None:
            out = 0.5 * (out + out.T)
            np.fill_diagonal(out, 0.0)
        return out

    def distances_from(self, s: NetworkPoint,
                       points: Sequence[NetworkPoint]) -> np.ndarray:
        return self.distances([s], points)[0]

    def between(self, s: NetworkPoint, t: NetworkPoint) -> float:
        return float(self.distances([s], [t])[0, 0])

    def auxiliary_variance(self, points: Sequence[NetworkPoint]) -> np.ndarray:
        P = self.arrays(points)
        S = self.sigma0
        a, b = 1.0 - P.frac, P.frac
        return (a * a * S[P.u, P.u] + 2 * a * b * S[P.u, P.w]
                + b * b * S[P.w, P.w] + P.bridge_var)


def _bilinear(M: np.ndarray, P: PointArrays, Q: PointArrays) -> np.ndarray:
    """``E_P M E_Q'`` for the sparse interpolation matrices of two point sets."""
    pa, pb = 1.0 - P.frac, P.frac
    qa, qb = 1.0 - Q.frac, Q.frac
    return (pa[:, None] * qa[None, :] * M[np.ix_(P.u, Q.u)]
            + pa[:, None] * qb[None, :] * M[np.ix_(P.u, Q.w)]
            + pb[:, None] * qa[None, :] * M[np.ix_(P.w, Q.u)]
            + pb[:, None] * qb[None, :] * M[np.ix_(P.w, Q.w)])


def _bridge_cov(P: PointArrays, Q: PointArrays) -> np.ndarray:
    same = ((P.edge[:, None] == Q.edge[None, :])
            & P.interior[:, None] & Q.interior[None, :])
    lo = np.minimum(P.t[:, None], Q.t[None, :])
    hi = np.maximum(P.t[:, None], Q.t[None, :])
    return np.where(same, lo * (P.L[:, None] - hi) / P.L[:, None], 0.0)


def build_oracle(network: LinearNetwork,
                 reference_vertex: int | None = None) -> ResistanceOracle:
    return ResistanceOracle(network, 0 if reference_vertex is None else reference_vertex)


def point_coefficients(oracle: ResistanceOracle, p: NetworkPoint):
    """Interpolation weights over vertices and the bridge descriptor of ``p``.

    Returns ``(weights, bridge)`` where ``weights`` is a dense vector over
    vertices and ``bridge`` is ``(edge, offset, length)`` for interior points,
    ``None`` for vertex-anchored ones.
    """
    P = oracle.arrays([p])
    e = np.zeros(oracle.network.n_vertices)
    e[P.u[0]] += 1.0 - P.frac[0]
    e[P.w[0]] += P.frac[0]
    bridge = (p.edge, p.offset, float(P.L[0])) if P.interior[0] else None
    return e, bridge


def auxiliary_covariance(oracle: ResistanceOracle,
                         points: Sequence[NetworkPoint]) -> np.ndarray:
    return oracle.auxiliary_covariance(points)


def resistance_between(oracle: ResistanceOracle, s: NetworkPoint,
                       t: NetworkPoint) -> float:
    return oracle.between(s, t)


def resistance_matrix(oracle: ResistanceOracle,
                      points: Sequence[NetworkPoint]) -> np.ndarray:
    return oracle.distances(points)
