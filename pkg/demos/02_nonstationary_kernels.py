# Non-stationary covariances built from the resistance metric.
#
# K(s, t) = sqrt(b(s) b(t)) * integral of (alpha + d w)^(-1/2) dF(w), where
# alpha is the mean of a(s) and a(t) and d the resistance distance. The
# mixing measure F picks the family; a sets the local range, b the scale.

import numpy as np

from netcov import (BetaPrime, Constant, Dirac, ExpDecay, ExpDensity, KernelSpec,
                    MultiKernelSpec, NumericMeasure, build_oracle, colocated_correlation,
                    kernel_matrix, make_point, multi_kernel_matrix, psi, snap_to_network)
from netcov.fixtures import load_fixture

grid = load_fixture("grid6")
o = build_oracle(grid)

# radial profiles psi(r) = kappa(r, 1) are completely monotone
r = np.geomspace(0.01, 100, 5)
for fam in (Dirac(1.0), ExpDensity(1.0), BetaPrime(1.0),
            NumericMeasure((0.5, 2.0), (0.7, 0.3))):
    print(f"{type(fam).__name__:15s}", np.round(psi(fam, r), 4))

# a varies around an anchor near the top of the grid; b = c sqrt(a) keeps the
# marginal variance equal to c(s)
anchor = snap_to_network(grid, (2.5, 4.0))
a = ExpDecay(anchor, 4.0, 1.0)   # 4 exp(-d / 1)
c = ExpDecay(anchor, 2.0, 3.0)
spec = KernelSpec(Dirac(1.0), a, o, c=c)

pts = [anchor, make_point(grid, 30, 0.5), grid.vertex_point(0)]
K = kernel_matrix(spec, pts)
print(np.round(K, 4))
print("diagonal equals c(s):", np.allclose(np.diag(K), c.values(o, pts)))

# the same separation along two different edges: one pair beside the anchor,
# one pair in the far corner, where a is much smaller
def corr(pair):
    C = kernel_matrix(spec, pair)
    return C[0, 1] / np.sqrt(C[0, 0] * C[1, 1])


near = [make_point(grid, anchor.edge, 0.25), make_point(grid, anchor.edge, 0.75)]
far = [make_point(grid, 0, 0.25), make_point(grid, 0, 0.75)]
print("d_R:", o.between(*near), o.between(*far))
print("a:", a.values(o, near), a.values(o, far))
print("correlation near anchor:", corr(near))
print("correlation far away:   ", corr(far))

# bivariate field: a rank-one beta gives perfectly correlated components only
# when a is the same for both; otherwise colocated correlation drops below 1
m = MultiKernelSpec(Dirac(1.0), (Constant(1.0), Constant(4.0)),
                    (Constant(1.0), Constant(3.0)), np.ones((2, 2)), o)
print("colocated correlation:", colocated_correlation(m, anchor, 0, 1))
M = multi_kernel_matrix(m, pts)  # rows ordered point-major: n * q + i
print("block shape", M.shape, "min eigenvalue", np.linalg.eigvalsh(M).min())
