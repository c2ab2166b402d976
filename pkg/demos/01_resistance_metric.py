# Resistance distances on a few small networks.
#
# The distance between two points of a network is the variogram of an
# auxiliary Gaussian field: a Gaussian vector on the vertices (covariance
# from a modified graph Laplacian) interpolated linearly along each edge,
# plus an independent Brownian bridge per edge.

import numpy as np

from netcov import build_network, build_oracle, make_point, refine, resistance_matrix
from netcov.fixtures import load_fixture, unit_cycle

# one edge of length 1: distance is plain arc length
edge = build_network([(0, 0), (1, 0)], [(0, 1)])
o = build_oracle(edge)
print(o.delta)   # conductance 1 on the edge, +1 on the reference vertex
print(o.sigma0)  # its inverse
v0, mid, v1 = (make_point(edge, 0, t) for t in (0.0, 0.5, 1.0))
print("d(v0, v1) =", o.between(v0, v1), " d(v0, mid) =", o.between(v0, mid))

# on a cycle the two routes act like parallel resistors: 1 * 2 / (1 + 2)
cyc = unit_cycle()
oc = build_oracle(cyc)
print("adjacent vertices on a unit 3-cycle:", oc.between(cyc.vertex_point(0),
                                                        cyc.vertex_point(1)))
# midpoints of two different edges
p, q = make_point(cyc, 0, 0.5), make_point(cyc, 1, 0.5)
print("edge midpoints:", oc.between(p, q))

# a 6 x 6 grid with unit spacing (60 edges, total length 60)
grid = load_fixture("grid6")
og = build_oracle(grid)
print(grid)
print("largest vertex-to-vertex distance:", og.vertex_resistance.max())
# opposite corners are much closer than their path length of 10, since
# many routes run in parallel
print("corners:", og.between(grid.vertex_point(0), grid.vertex_point(35)))

# the reference vertex changes the auxiliary covariance, never the distances
pts = [make_point(grid, e, 0.3) for e in range(0, 60, 7)]
D0 = resistance_matrix(og, pts)
D9 = resistance_matrix(build_oracle(grid, 9), pts)
print("max change with another reference vertex:", np.abs(D0 - D9).max())

# splitting edges at the points and reading vertex distances gives the same
new, ids = refine(grid, pts)
D_ref = resistance_matrix(build_oracle(new), [new.vertex_point(i) for i in ids])
print("max change after refinement:", np.abs(D0 - D_ref).max())
