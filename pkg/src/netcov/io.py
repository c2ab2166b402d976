"""File formats.

Network JSON
    ``{"vertices": [[x, y], ...], "edges": [[i, j], ...], "lengths": [l, ...]}``
    where ``lengths`` is optional and overrides the Euclidean edge lengths.

Points CSV
    Header ``edge,offset``; one row per point, ``edge`` a zero-based edge
    index and ``offset`` the arc length from the edge's tail vertex.

Field CSV
    Header ``edge,offset,value``.

Fit CSV
    Header ``site_edge,site_offset,a_hat,b_hat,k_star,converged``; failed
    fits have ``nan`` estimates and ``converged`` set to ``error``.

Floats are written with 17 significant digits, so values round-trip exactly.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .network import LinearNetwork, NetworkPoint, build_network, make_point

__all__ = [
    "fmt",
    "network_from_dict",
    "read_network",
    "write_network",
    "read_points",
    "write_points",
    "write_field",
    "write_fit",
]


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def network_from_dict(obj: dict) -> LinearNetwork:
    for key in ("vertices", "edges"):
        if key not in obj:
            raise ValueError(f"network JSON lacks required key {key!r}")
    return build_network(obj["vertices"], obj["edges"], obj.get("lengths"))


def read_network(path) -> LinearNetwork:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return network_from_dict(obj)


def write_network(network: LinearNetwork, path) -> None:
    Path(path).write_text(json.dumps(network.to_dict(), indent=1) + "\n")


def read_points(network: LinearNetwork, path) -> list[NetworkPoint]:
    with open(path, newline="") as fh:
        return parse_points(network, fh, str(path))


def parse_points(network: LinearNetwork, fh: TextIO, name: str = "<points>") -> list[NetworkPoint]:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None:
        return []
    if [h.strip() for h in header[:2]] != ["edge", "offset"]:
        raise ValueError(f"{name}: expected header 'edge,offset', got {','.join(header)!r}")
    out = []
    for lineno, row in enumerate(reader, start=2):
        if not row or not "".join(row).strip():
            continue
        try:
            out.append(make_point(network, int(row[0]), float(row[1])))
        except (ValueError, IndexError) as exc:
            raise ValueError(f"{name}: line {lineno}: {exc}") from None
    return out


def _write_rows(path_or_fh, header: Sequence[str], rows: Iterable[Sequence[str]]):
    if isinstance(path_or_fh, (str, Path)):
        with open(path_or_fh, "w", newline="") as fh:
            _write_rows(fh, header, rows)
        return
    fh = path_or_fh
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(row) + "\n")


def write_points(points: Sequence[NetworkPoint], out) -> None:
    _write_rows(out, ["edge", "offset"], ([str(p.edge), fmt(p.offset)] for p in points))


def write_field(points: Sequence[NetworkPoint], values, out) -> None:
    _write_rows(out, ["edge", "offset", "value"],
                ([str(p.edge), fmt(p.offset), fmt(v)] for p, v in zip(points, values)))


def write_fit(fits, out) -> None:
    def row(f):
        conv = "error" if f.error else ("true" if f.converged else "false")
        return [str(f.site.edge), fmt(f.site.offset), fmt(f.a_hat), fmt(f.b_hat),
                str(f.k_star), conv]

    _write_rows(out, ["site_edge", "site_offset", "a_hat", "b_hat", "k_star", "converged"],
                (row(f) for f in fits))


def to_string(writer, *args) -> str:
    buf = io.StringIO()
    writer(*args, buf)
    return buf.getvalue()
