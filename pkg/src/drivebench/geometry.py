"""Small planar geometry helpers: point/segment/polyline distance, polygons."""
from __future__ import annotations

import math

Point = tuple[float, float]


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    """Distance from p to the closed segment a-b."""
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    seg_sq = dx * dx + dy * dy
    if seg_sq == 0.0:
        return math.hypot(px - ax, py - ay)
    u = ((px - ax) * dx + (py - ay) * dy) / seg_sq
    u = min(1.0, max(0.0, u))
    return math.hypot(px - (ax + u * dx), py - (ay + u * dy))


def point_polyline_distance(p: Point, polyline) -> float:
    """Minimum distance from p to any segment of the polyline."""
    return min(point_segment_distance(p, polyline[i], polyline[i + 1]) for i in range(len(polyline) - 1))


def polyline_length(points) -> float:
    return sum(math.dist(points[i], points[i + 1]) for i in range(len(points) - 1))


def polygon_area(polygon) -> float:
    """Signed shoelace area of an implicitly closed polygon."""
    area = 0.0
    n = len(polygon)
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        area += x1 * y2 - x2 * y1
    return area / 2.0


def _on_segment(p: Point, a: Point, b: Point, eps: float = 1e-9) -> bool:
    return point_segment_distance(p, a, b) <= eps


def point_in_polygon(p: Point, polygon, include_boundary: bool = True) -> bool:
    """Even-odd test; points on an edge count as inside when include_boundary."""
    n = len(polygon)
    for i in range(n):
        if _on_segment(p, polygon[i], polygon[(i + 1) % n]):
            return include_boundary
    px, py = p
    inside = False
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < x_cross:
                inside = not inside
    return inside
