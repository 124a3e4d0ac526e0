"""
    Marching-squares level sets of an ExclusionGrid.

    Interpolation happens in log10 coordinates on both axes and, for
    positive levels, on log10 of the ratio, matching the log-log plots.
"""

import math
from collections import defaultdict
from typing import Dict, Hashable, List, Tuple

import numpy as np

from modgrav.exclusion.grid import BoundaryLine, ExclusionGrid

EdgeKey = Tuple[str, int, int]

# cell edges in cyclic order: bottom, right, top, left
_EDGES = (
    (("h", 0, 0), (0, 0), (1, 0)),
    (("v", 1, 0), (1, 0), (1, 1)),
    (("h", 0, 1), (1, 1), (0, 1)),
    (("v", 0, 0), (0, 1), (0, 0)),
)


def _field(grid: ExclusionGrid, level: float) -> Tuple[np.ndarray, float, bool]:
    values = np.array(grid.ratio, dtype=float)
    finite = np.isfinite(values)
    logarithmic = level > 0.0 and bool(np.all(values[finite] > 0.0))
    if logarithmic:
        target = math.log10(level)
        out = np.full(values.shape, target + 1.0)
        out[finite] = np.log10(values[finite])
    else:
        target = level
        span = float(np.max(np.abs(values[finite]))) if np.any(finite) else 0.0
        out = np.where(finite, values, level + span + 1.0)
    return out, target, logarithmic


def _stitch(segments: List[Tuple[EdgeKey, EdgeKey]]) -> List[List[EdgeKey]]:
    neighbours: Dict[Hashable, List[EdgeKey]] = defaultdict(list)
    for a, b in segments:
        neighbours[a].append(b)
        neighbours[b].append(a)

    visited = set()
    chains: List[List[EdgeKey]] = []

    def walk(start: EdgeKey) -> List[EdgeKey]:
        chain = [start]
        visited.add(start)
        current = start
        while True:
            candidates = [n for n in neighbours[current] if n not in visited]
            if not candidates:
                break
            current = candidates[0]
            visited.add(current)
            chain.append(current)
        return chain

    # open chains begin at their endpoints, closed loops anywhere
    for key in sorted(neighbours):
        if key not in visited and len(neighbours[key]) == 1:
            chains.append(walk(key))
    for key in sorted(neighbours):
        if key not in visited:
            chain = walk(key)
            chain.append(chain[0])
            chains.append(chain)
    return chains


def extract_boundary(grid: ExclusionGrid, level: float) -> List[BoundaryLine]:
    """
    Polylines where the grid ratio crosses level. Non-finite cells count
    as above the level. Saddle cells are resolved by the cell average.
    """
    values, target, logarithmic = _field(grid, level)
    X = np.log10(grid.x_axis)
    Y = np.log10(grid.y_axis)
    ny, nx = values.shape

    points: Dict[EdgeKey, Tuple[float, float]] = {}
    segments: List[Tuple[EdgeKey, EdgeKey]] = []

    def crossing(key: EdgeKey, a: Tuple[int, int], b: Tuple[int, int]):
        if key not in points:
            fa, fb = values[a[1], a[0]], values[b[1], b[0]]
            t = (target - fa) / (fb - fa)
            points[key] = (X[a[0]] + t * (X[b[0]] - X[a[0]]), Y[a[1]] + t * (Y[b[1]] - Y[a[1]]))
        return key

    for j in range(ny - 1):
        for i in range(nx - 1):
            corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
            below = [values[cj, ci] < target for ci, cj in corners]
            if all(below) or not any(below):
                continue

            cut = []
            for edge, ((kind, di, dj), start, end) in enumerate(_EDGES):
                a = (i + start[0], j + start[1])
                b = (i + end[0], j + end[1])
                if below[edge] != below[(edge + 1) % 4]:
                    cut.append(crossing((kind, i + di, j + dj), a, b))

            if len(cut) == 2:
                segments.append((cut[0], cut[1]))
                continue

            centre_below = float(np.mean([values[cj, ci] for ci, cj in corners])) < target
            if centre_below == below[0]:
                # corners 0 and 2 connect through the centre; isolate 1 and 3
                segments.extend([(cut[0], cut[1]), (cut[2], cut[3])])
            else:
                segments.extend([(cut[3], cut[0]), (cut[1], cut[2])])

    lines = []
    for chain in _stitch(segments):
        vertices = [(10.0 ** points[k][0], 10.0 ** points[k][1]) for k in chain]
        lines.append(BoundaryLine(vertices=vertices, level=level))
    return lines
