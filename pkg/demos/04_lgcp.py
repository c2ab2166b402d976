# A log-Gaussian Cox process on the grid.
#
# Intensity rho * exp(X(s)) with X a simulated field. Events are drawn by
# thinning a piecewise constant dominating Poisson process cell by cell.

from pathlib import Path

import numpy as np

from netcov import (Constant, Dirac, ExpDecay, KernelSpec, build_oracle, chol_sample,
                    edge_grid, kernel_matrix, lgcp_expected_count, lgcp_sample,
                    snap_to_network)
from netcov.fixtures import load_fixture
from netcov.svg import render_svg

grid = load_fixture("grid6")
o = build_oracle(grid)
anchor = snap_to_network(grid, (2.5, 4.0))
spec = KernelSpec(Dirac(1.0), ExpDecay(anchor, 5.0, 2.0), o, c=Constant(1.0))

eg = edge_grid(grid, h=0.05)   # every edge gets nodes at most 0.05 apart
print(len(eg.points), "grid nodes")
rng = np.random.default_rng(7)
x = chol_sample(kernel_matrix(spec, eg.points), rng)

rho = 0.5
print("expected count, trapezoid:", lgcp_expected_count(eg, x, rho))
print("expected count, exact for the interpolated field:",
      lgcp_expected_count(eg, x, rho, rule="exact"))

counts = [len(lgcp_sample(eg, x, rho, rng).events) for _ in range(2000)]
print("mean simulated count:", np.mean(counts))

pattern = lgcp_sample(eg, x, rho, rng)
out = Path("demo_out")
out.mkdir(exist_ok=True)
svg = render_svg(grid, eg.points, x, events=pattern.events, thickness=np.exp(x))
(out / "lgcp.svg").write_text(svg)
print(len(pattern.events), "events drawn to", out / "lgcp.svg")
