"""Deterministic serialisation: canonical JSON, trajectory CSV, OBJ meshes.

Identical inputs must produce byte-identical files (the reports embed the
seed, never wall-clock data), so floats are written with repr precision and
JSON keys are sorted.
"""

from __future__ import annotations

import json

import numpy as np


def _plain(obj):
    """Recursively convert numpy containers/scalars to plain Python."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def json_report(report: dict) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2) + "\n"


def csv_trajectory(rows: list[dict], columns: tuple[str, ...]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(repr(float(row[c])) for c in columns))
    return "\n".join(lines) + "\n"


def obj_mesh(
    points: np.ndarray,
    grid_shape: tuple[int, ...],
    drop_axis: int = 3,
) -> str:
    """Quad mesh of a sampled immersion as Wavefront OBJ text.

    For 2-dimensional charts the (nu, nv) grid becomes one sheet.  For
    3-dimensional charts each t-slice becomes a sheet (vertices shared in
    one file); vertices of 4-dimensional surfaces are projected by dropping
    the requested coordinate (the JSON report keeps all 4 coordinates).
    """
    points = np.asarray(points, dtype=float)
    ambient = points.shape[-1]
    if ambient == 4:
        keep = [i for i in range(4) if i != drop_axis]
        verts = points[:, keep]
    else:
        verts = points
    lines = [f"# affinesym mesh, grid {'x'.join(str(c) for c in grid_shape)}"]
    for p in verts:
        lines.append("v " + " ".join(repr(float(c)) for c in p))

    def vid(*idx):  # 1-based OBJ vertex index from grid multi-index
        flat = 0
        for i, c in zip(idx, grid_shape):
            flat = flat * c + i
        return flat + 1

    if len(grid_shape) == 2:
        nu, nv = grid_shape
        for i in range(nu - 1):
            for j in range(nv - 1):
                lines.append(
                    f"f {vid(i, j)} {vid(i + 1, j)} {vid(i + 1, j + 1)} {vid(i, j + 1)}"
                )
    else:
        nt, nu, nv = grid_shape
        for s in range(nt):
            for i in range(nu - 1):
                for j in range(nv - 1):
                    lines.append(
                        f"f {vid(s, i, j)} {vid(s, i + 1, j)} "
                        f"{vid(s, i + 1, j + 1)} {vid(s, i, j + 1)}"
                    )
    return "\n".join(lines) + "\n"
