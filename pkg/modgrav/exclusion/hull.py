import math
from typing import List, Sequence, Tuple

from modgrav.exceptions import DomainError

Point = Tuple[float, float]


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Sequence[Point], log_space: bool = True) -> List[Point]:
    """
    Counter-clockwise convex hull (monotone chain) without collinear
    vertices. With log_space the hull is taken over (log10 x, log10 y),
    so it is convex on log-log axes; vertices are returned in the
    original coordinates.
    """
    if not points:
        raise DomainError("convex hull of an empty point set")
    if log_space:
        for x, y in points:
            if not (x > 0.0 and y > 0.0):
                raise DomainError(f"log-space hull needs positive coordinates, got ({x}, {y})")
        originals = {(math.log10(x), math.log10(y)): (x, y) for x, y in points}
    else:
        originals = {(float(x), float(y)): (x, y) for x, y in points}
    mapped = sorted(originals)

    if len(mapped) <= 2:
        hull = mapped
    else:
        lower: List[Point] = []
        for p in mapped:
            while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0.0:
                lower.pop()
            lower.append(p)
        upper: List[Point] = []
        for p in reversed(mapped):
            while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0.0:
                upper.pop()
            upper.append(p)
        hull = lower[:-1] + upper[:-1]

    return [originals[p] for p in hull]
