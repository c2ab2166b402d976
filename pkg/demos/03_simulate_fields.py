# Simulating a non-stationary field two ways.
#
# The Cholesky route is exact but cubic in the number of points. The
# superposition route averages J independent "elementary" fields, each cheap
# and non-Gaussian, whose covariance is exactly the kernel; the average tends
# to a Gaussian field as J grows.

from pathlib import Path

import numpy as np

from netcov import (Dirac, ElementaryFieldConfig, ExpDecay, KernelSpec, build_oracle,
                    chol_sample, elementary_field, kernel_matrix, make_point,
                    sample_points, superposed_field)
from netcov.fixtures import load_fixture
from netcov.svg import render_svg

grid = load_fixture("grid6")
o = build_oracle(grid)

# constants of the worked example rescaled from a diameter of about 837 to
# this grid's diameter
f = o.vertex_resistance.max() / 837.0
anchor = make_point(grid, 56, 0.5)
spec = KernelSpec(Dirac(1.0), ExpDecay(anchor, 2500 * f, 100 * f), o,
                  c=ExpDecay(anchor, 2.0, 1000 * f))

pts = sample_points(grid, "per_edge", 10)
rng = np.random.default_rng(2024)
x = chol_sample(kernel_matrix(spec, pts), rng)
print(len(pts), "points, sample sd", x.std())

# Monte Carlo check of the elementary field at five probes
probes = [anchor, make_point(grid, 55, 0.5), make_point(grid, 30, 0.3),
          make_point(grid, 10, 0.5), make_point(grid, 0, 0.0)]
X = elementary_field(spec, ElementaryFieldConfig(), probes, rng, size=200_000)
print("kernel\n", np.round(kernel_matrix(spec, probes), 3))
print("Monte Carlo\n", np.round(X.T @ X / len(X), 3))

# superposed field with J = 200
y = superposed_field(spec, ElementaryFieldConfig(J=200), pts, rng).values

out = Path("demo_out")
out.mkdir(exist_ok=True)
(out / "field_cholesky.svg").write_text(render_svg(grid, pts, x))
(out / "field_superposed.svg").write_text(render_svg(grid, pts, y))
print("wrote", sorted(p.name for p in out.glob("field_*.svg")))
