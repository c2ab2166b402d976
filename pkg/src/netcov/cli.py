"""Command line interface.

::

    netcov [--config FILE] [--seed N] [--out DIR] [--svg] COMMAND ...

Commands
--------
validate NETWORK            check a network JSON file and print a summary
metric NETWORK              resistance distances (``i,j,d_R``)
kernel                      kernel matrix entries (``i,j,K``)
simulate                    Gaussian field at the configured points
lgcp                        log-Gaussian Cox process on an edge grid
fit [--scheme S] [--bandwidth B]
                            replicated weighted local likelihood study
bench                       work (and optionally time) of one objective evaluation

Without ``--out`` the main CSV goes to standard output. With ``--out`` every
command writes named files into that directory. Identical config and seed
give byte-identical output.

Config file (JSON)
------------------
::

    {
      "network": "grid6.json",            # path relative to the config, or "fixture:grid6"
      "seed": 0,                          # may also sit in the simulation block
      "kernel": {
        "family": "dirac",                # dirac | exp | beta_prime | numeric
        "eta": 1.0,                       # numeric: "nodes": [...], "weights": [...]
        "a": {"type": "exp_decay", "scale": 7.07, "range": 0.283,
              "anchor": {"edge": 56, "offset": 0.5}},
        "c": {"type": "exp_decay", "scale": 2.0, "range": 2.83,
              "anchor": {"xy": [1.5, 5.0]}}    # or "b": {...}; {"type": "constant", "value": v}
      },                                  # a constant b or c of 0 gives the zero field
      "simulation": {
        "points": {"mode": "per_edge", "count": 28},   # midpoints | per_edge | total, or {"file": "p.csv"}
        "method": "cholesky",             # cholesky | superposed
        "J": 100, "g_sigma": null,
        "resolution": null,               # LGCP grid spacing; default edge length / 20
        "grid_nodes": null,               # or a fixed node count per edge (at least 2)
        "rho": 0.002, "safety": 1.2
      },
      "inference": {
        "scheme": "cs", "bandwidth": 200,  # cs | gauss
        "sites": [{"edge": 3, "offset": 0.5}],
        "replicates": 100, "variance": 1.0,
        "restarts": 3, "max_iter": 400
      },
      "bench": {
        "sizes": [503, 1006],
        "schemes": [{"scheme": "cs", "bandwidth": 100}, {"scheme": "gauss", "bandwidth": 120}],
        "site": {"xy": [2.5, 2.5]}
      }
    }
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import io as nio
from .errors import NetcovError
from .fixtures import FIXTURES, load_fixture
from .infer import FitOptions, LocalFitProblem, count_likelihood_work, fit_sites, \
    scheme_from_name, weighted_local_likelihood
from .kernels import Constant, ExpDecay, KernelSpec, family_from_name, kernel_matrix
from .network import LinearNetwork, NetworkPoint, make_point, sample_points, snap_to_network
from .resistance import ResistanceOracle
from .simulate import ElementaryFieldConfig, FieldSample, chol_sample, edge_grid, \
    lgcp_sample, superposed_field
from .svg import render_svg

log = logging.getLogger("netcov")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    network: LinearNetwork
    raw: dict
    base: Path
    seed: int = 0
    kernel: dict = field(default_factory=dict)
    simulation: dict = field(default_factory=dict)
    inference: dict = field(default_factory=dict)
    bench: dict = field(default_factory=dict)

    _oracle: ResistanceOracle | None = None

    @property
    def oracle(self) -> ResistanceOracle:
        if self._oracle is None:
            self._oracle = ResistanceOracle(self.network)
        return self._oracle


def _get(block: dict, key: str, where: str, default=..., kind=None, positive=False):
    if key not in block:
        if default is ...:
            raise ConfigError(f"{where}.{key}: required")
        return default
    val = block[key]
    if kind is not None and val is not None:
        try:
            val = kind(val)
        except (TypeError, ValueError):
            raise ConfigError(f"{where}.{key}: expected {kind.__name__}, got {val!r}") from None
    if positive and val is not None and not val > 0:
        raise ConfigError(f"{where}.{key}: must be positive, got {val!r}")
    return val


def load_network(spec: str, base: Path) -> LinearNetwork:
    if spec.startswith("fixture:"):
        name = spec.split(":", 1)[1]
        if name not in FIXTURES:
            raise ConfigError(f"network: unknown fixture {name!r}; have {sorted(FIXTURES)}")
        return load_fixture(name)
    path = (base / spec) if not Path(spec).is_absolute() else Path(spec)
    if not path.exists():
        raise ConfigError(f"network: file {path} does not exist")
    return nio.read_network(path)


def load_config(path: str | None) -> RunConfig:
    if path is None:
        raise ConfigError("this command needs --config")
    p = Path(path)
    try:
        raw = json.loads(p.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file {p} does not exist") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{p}: top level must be an object")
    base = p.resolve().parent
    net = load_network(_get(raw, "network", "config", kind=str), base)
    return RunConfig(
        network=net, raw=raw, base=base,
        seed=_get(raw, "seed", "config", _get(raw.get("simulation", {}), "seed", "simulation",
                                              0, int), int),
        kernel=raw.get("kernel", {}),
        simulation=raw.get("simulation", {}),
        inference=raw.get("inference", {}),
        bench=raw.get("bench", {}),
    )


def parse_point(net: LinearNetwork, obj: Any, where: str) -> NetworkPoint:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object with edge/offset or xy")
    try:
        if "xy" in obj:
            return snap_to_network(net, obj["xy"])
        return make_point(net, int(obj["edge"]), float(obj["offset"]))
    except KeyError as exc:
        raise ConfigError(f"{where}: missing {exc.args[0]!r}") from None
    except (NetcovError, IndexError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_function(cfg: RunConfig, obj: Any, where: str, allow_zero: bool = False):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    kind = _get(obj, "type", where, kind=str)
    if kind == "constant":
        if allow_zero and _get(obj, "value", where, kind=float) == 0.0:
            return ZERO
        return Constant(_get(obj, "value", where, kind=float, positive=True))
    if kind == "exp_decay":
        return ExpDecay(parse_point(cfg.network, _get(obj, "anchor", where), f"{where}.anchor"),
                        _get(obj, "scale", where, kind=float, positive=True),
                        _get(obj, "range", where, kind=float, positive=True))
    raise ConfigError(f"{where}.type: unknown function type {kind!r}")


# a constant zero b or c: the field is identically zero and no kernel is built
ZERO = Constant(0.0)


def build_kernel(cfg: RunConfig) -> KernelSpec | None:
    """Kernel from the config; ``None`` for the zero-variance kernel."""
    k = cfg.kernel
    if not k:
        raise ConfigError("kernel: block required")
    name = _get(k, "family", "kernel", "dirac", str)
    try:
        fam = family_from_name(name, _get(k, "eta", "kernel", 1.0, float, positive=True),
                               nodes=k.get("nodes"), weights=k.get("weights"))
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"kernel.family: {exc}") from None
    a = parse_function(cfg, _get(k, "a", "kernel"), "kernel.a")
    if ("b" in k) == ("c" in k):
        raise ConfigError("kernel: give exactly one of 'b' or 'c'")
    key = "b" if "b" in k else "c"
    var = parse_function(cfg, k[key], f"kernel.{key}", allow_zero=True)
    if var is ZERO:
        return None
    return KernelSpec(fam, a, cfg.oracle, **{key: var})


def config_points(cfg: RunConfig) -> list[NetworkPoint]:
    spec = cfg.simulation.get("points", {"mode": "midpoints"})
    where = "simulation.points"
    if "file" in spec:
        path = cfg.base / spec["file"]
        if not path.exists():
            raise ConfigError(f"{where}.file: {path} does not exist")
        return nio.read_points(cfg.network, path)
    mode = _get(spec, "mode", where, "midpoints", str)
    count = _get(spec, "count", where, None, int)
    try:
        return sample_points(cfg.network, mode, count)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

class Sink:
    def __init__(self, out: str | None, stdout):
        self.dir = Path(out) if out else None
        self.stdout = stdout
        if self.dir:
            self.dir.mkdir(parents=True, exist_ok=True)

    def text(self, name: str, text: str, primary: bool = True):
        if self.dir:
            (self.dir / name).write_text(text)
        elif primary:
            self.stdout.write(text)


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng([seed, *stream]) if stream else np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_validate(args, sink):
    net = nio.read_network(args.network)
    sink.text("validate.txt",
              f"{net.n_vertices} vertices, {net.n_edges} edges, connected, "
              f"total length {nio.fmt(net.total_length)}\n")


def cmd_metric(args, sink):
    net = nio.read_network(args.network)
    oracle = ResistanceOracle(net)
    if args.points:
        pts = nio.read_points(net, args.points)
    else:
        pts = [net.vertex_point(v) for v in range(net.n_vertices)]
    lines = ["i,j,d_R"]
    if args.pairs:
        if len(pts) % 2:
            raise ConfigError("--pairs needs an even number of points")
        for k in range(0, len(pts), 2):
            d = oracle.between(pts[k], pts[k + 1])
            lines.append(f"{k},{k + 1},{nio.fmt(d)}")
        dmax = max((float(x.split(",")[2]) for x in lines[1:]), default=0.0)
    else:
        D = oracle.distances(pts) if pts else np.zeros((0, 0))
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                lines.append(f"{i},{j},{nio.fmt(D[i, j])}")
        dmax = float(D.max()) if D.size else 0.0
    sink.text("metric.csv", "\n".join(lines) + "\n")
    if args.summary:
        sink.text("metric_summary.csv", f"statistic,value\nmax_d_R,{nio.fmt(dmax)}\n")


def cmd_kernel(args, sink):
    cfg = load_config(args.config)
    spec = build_kernel(cfg)
    pts = nio.read_points(cfg.network, args.points) if args.points else config_points(cfg)
    K = kernel_matrix(spec, pts) if pts and spec else np.zeros((len(pts), len(pts)))
    lines = ["i,j,K"]
    for i in range(len(pts)):
        for j in range(i, len(pts)):
            lines.append(f"{i},{j},{nio.fmt(K[i, j])}")
    sink.text("kernel.csv", "\n".join(lines) + "\n")


def _simulate(cfg: RunConfig, spec: KernelSpec | None, pts, rng) -> np.ndarray:
    sim = cfg.simulation
    if spec is None:
        return np.zeros(len(pts))
    method = _get(sim, "method", "simulation", "cholesky", str)
    if method == "cholesky":
        return chol_sample(kernel_matrix(spec, pts), rng)
    if method == "superposed":
        conf = ElementaryFieldConfig(_get(sim, "g_sigma", "simulation", None, float, True),
                                     _get(sim, "J", "simulation", 100, int, True))
        return superposed_field(spec, conf, pts, rng).values
    raise ConfigError(f"simulation.method: unknown method {method!r}")


def cmd_simulate(args, sink):
    cfg = load_config(args.config)
    seed = cfg.seed if args.seed is None else args.seed
    spec = build_kernel(cfg)
    pts = config_points(cfg)
    values = _simulate(cfg, spec, pts, _rng(seed))
    sink.text("field.csv", nio.to_string(nio.write_field, pts, values))
    if args.svg and sink.dir:
        sink.text("field.svg", render_svg(cfg.network, pts, values), primary=False)


def cmd_lgcp(args, sink):
    cfg = load_config(args.config)
    seed = cfg.seed if args.seed is None else args.seed
    sim = cfg.simulation
    spec = build_kernel(cfg)
    grid = edge_grid(cfg.network, h=_get(sim, "resolution", "simulation", None, float, True),
                     nodes_per_edge=_get(sim, "grid_nodes", "simulation", None, int))
    rng = _rng(seed)
    values = _simulate(cfg, spec, grid.points, rng)
    rho = _get(sim, "rho", "simulation", 0.002, float)
    if rho < 0:
        raise ConfigError("simulation.rho: must be nonnegative")
    pattern = lgcp_sample(grid, values, rho, rng,
                          safety=_get(sim, "safety", "simulation", 1.2, float, True))
    sink.text("pattern.csv", nio.to_string(nio.write_points, pattern.events))
    if sink.dir:
        sink.text("lgcp_field.csv", nio.to_string(nio.write_field, grid.points, values),
                  primary=False)
    if args.svg and sink.dir:
        sink.text("pattern.svg", render_svg(cfg.network, grid.points, values,
                                            events=pattern.events,
                                            thickness=np.exp(values)), primary=False)


def cmd_fit(args, sink):
    cfg = load_config(args.config)
    seed = cfg.seed if args.seed is None else args.seed
    inf = cfg.inference
    spec = build_kernel(cfg)
    if spec is None:
        raise ConfigError("fit: the kernel has zero variance")
    pts = config_points(cfg)
    name = args.scheme or _get(inf, "scheme", "inference", "cs", str)
    bw = args.bandwidth if args.bandwidth is not None else \
        _get(inf, "bandwidth", "inference", kind=float, positive=True)
    if not bw > 0:
        raise ConfigError("--bandwidth: must be positive")
    scheme = scheme_from_name(name, bw)
    sites = [parse_point(cfg.network, s, f"inference.sites[{i}]")
             for i, s in enumerate(_get(inf, "sites", "inference"))]
    reps = _get(inf, "replicates", "inference", 1, int)
    if reps < 0:
        raise ConfigError("inference.replicates: must be nonnegative")
    variance = _get(inf, "variance", "inference", None, float, True)
    opts = FitOptions(max_iter=_get(inf, "max_iter", "inference", 400, int, True),
                      restarts=_get(inf, "restarts", "inference", 3, int, True))

    all_fits = []
    if reps and pts:
        K = kernel_matrix(spec, pts)
    for r in range(reps):
        values = chol_sample(K, _rng(seed, r))
        try:
            fits = fit_sites(cfg.oracle, FieldSample(pts, values), sites, scheme,
                             spec.family, variance, opts)
        except NetcovError as exc:
            log.warning("replicate %d failed: %s", r, exc)
            continue
        all_fits.extend(fits)
    sink.text("fit.csv", nio.to_string(nio.write_fit, all_fits))

    true_a = spec.a_values(sites) if sites else np.zeros(0)
    lines = ["site_edge,site_offset,a_true,n_ok,median_bias,iqr"]
    for k, s in enumerate(sites):
        est = np.array([f.a_hat for f in all_fits[k::len(sites)] if f.error is None])
        if est.size:
            bias = est - true_a[k]
            q1, med, q3 = np.percentile(bias, [25, 50, 75])
            lines.append(f"{s.edge},{nio.fmt(s.offset)},{nio.fmt(true_a[k])},{est.size},"
                         f"{nio.fmt(med)},{nio.fmt(q3 - q1)}")
        else:
            lines.append(f"{s.edge},{nio.fmt(s.offset)},{nio.fmt(true_a[k])},0,nan,nan")
    summary = "\n".join(lines) + "\n"
    if sink.dir:
        sink.text("fit_summary.csv", summary, primary=False)
    else:
        sys.stderr.write(summary)


def _centre_site(net: LinearNetwork) -> NetworkPoint:
    return snap_to_network(net, net.vertices.mean(axis=0))


def cmd_bench(args, sink):
    cfg = load_config(args.config)
    seed = cfg.seed if args.seed is None else args.seed
    b = cfg.bench
    sizes = [int(n) for n in _get(b, "sizes", "bench", [500])]
    schemes = _get(b, "schemes", "bench",
                   [{"scheme": "cs", "bandwidth": 1.0}, {"scheme": "gauss", "bandwidth": 1.0}])
    site = parse_point(cfg.network, b["site"], "bench.site") if "site" in b \
        else _centre_site(cfg.network)
    family = family_from_name(cfg.kernel.get("family", "dirac"), cfg.kernel.get("eta", 1.0))

    header = "N,scheme,bandwidth,k_star,work,work_ratio"
    if args.timing:
        header += ",time_s,time_ratio"
    lines = [header]
    for n in sizes:
        pts = sample_points(cfg.network, "total", n)
        data = FieldSample(pts, _rng(seed, n).standard_normal(len(pts)))
        rows = []
        for s in schemes:
            sch = scheme_from_name(s["scheme"], float(s["bandwidth"]))
            prob = LocalFitProblem(data, site, sch, family, cfg.oracle, 1.0)
            k, work = count_likelihood_work(prob)
            t = math.nan
            if args.timing:
                weighted_local_likelihood(1.0, 1.0, prob)
                reps = 20
                best = math.inf
                for _ in range(3):
                    t0 = time.perf_counter()
                    for _ in range(reps):
                        weighted_local_likelihood(1.0, 1.0, prob)
                    best = min(best, (time.perf_counter() - t0) / reps)
                t = best
            rows.append((s["scheme"], sch.bandwidth, k, work, t))
        # ratios relative to the full Gaussian-weight evaluation at this N
        ref_work = n * (n + 1) * (2 * n + 1) // 6
        ref_t = next((r[4] for r in rows if r[0].startswith("g")), math.nan)
        for name, bw, k, work, t in rows:
            line = f"{n},{name},{nio.fmt(bw)},{k},{work},{nio.fmt(work / ref_work)}"
            if args.timing:
                line += f",{nio.fmt(t)},{nio.fmt(t / ref_t)}"
            lines.append(line)
    sink.text("bench.csv", "\n".join(lines) + "\n")


COMMANDS = {
    "validate": cmd_validate,
    "metric": cmd_metric,
    "kernel": cmd_kernel,
    "simulate": cmd_simulate,
    "lgcp": cmd_lgcp,
    "fit": cmd_fit,
    "bench": cmd_bench,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON run configuration")
    common.add_argument("--seed", type=_u64, default=argparse.SUPPRESS,
                        help="RNG seed (unsigned 64-bit), overrides the config")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    common.add_argument("--svg", action="store_true", default=argparse.SUPPRESS,
                        help="also write SVG renderings (needs --out)")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="netcov", parents=[common],
                                description="Non-stationary random fields on linear networks")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check a network file")
    s.add_argument("network")
    s = sub.add_parser("metric", parents=[common], help="resistance distances")
    s.add_argument("network")
    s.add_argument("--points", help="points CSV (default: all vertices)")
    s.add_argument("--pairs", action="store_true",
                   help="treat consecutive rows of the points file as pairs")
    s.add_argument("--summary", action="store_true", help="also report the maximum distance")
    s = sub.add_parser("kernel", parents=[common], help="kernel matrix entries")
    s.add_argument("--points", help="points CSV (default: configured sampling)")
    sub.add_parser("simulate", parents=[common], help="simulate a Gaussian field")
    sub.add_parser("lgcp", parents=[common], help="simulate a log-Gaussian Cox process")
    s = sub.add_parser("fit", parents=[common], help="replicated local likelihood fits")
    s.add_argument("--scheme", choices=["cs", "gauss"], help="weight scheme (overrides config)")
    s.add_argument("--bandwidth", type=float, help="tau or eta (overrides config)")
    s = sub.add_parser("bench", parents=[common], help="likelihood work table")
    s.add_argument("--timing", action="store_true",
                   help="add wall-clock columns (not reproducible across runs)")
    return p


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def main(argv=None, stdout=None) -> int:
    args = build_parser().parse_args(argv)
    for name, default in (("config", None), ("seed", None), ("out", None),
                          ("svg", False), ("verbose", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    sink = Sink(args.out, stdout or sys.stdout)
    try:
        COMMANDS[args.command](args, sink)
    except (NetcovError, ConfigError, ValueError, OSError) as exc:
        sys.stderr.write(f"netcov {args.command}: error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
