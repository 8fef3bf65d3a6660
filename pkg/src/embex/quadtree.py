"""Quadtree used for Barnes-Hut approximation of t-SNE repulsive forces.

Cells keep point counts and centers of mass. A traversal for point ``p``
treats a cell as a single body when ``cell_size / distance < theta``
(theta = 0 therefore degenerates to an exact all-pairs sum).
"""

from __future__ import annotations

import math

import numpy as np

_MAX_DEPTH = 64


class _Node:
    __slots__ = ("cx", "cy", "half", "count", "sx", "sy", "px", "py", "children", "depth")

    def __init__(self, cx: float, cy: float, half: float, depth: int):
        self.cx = cx
        self.cy = cy
        self.half = half
        self.depth = depth
        self.count = 0
        self.sx = 0.0  # coordinate sums (for center of mass)
        self.sy = 0.0
        self.px = 0.0  # representative point while the node is a leaf
        self.py = 0.0
        self.children = None

    def insert(self, x: float, y: float):
        if self.count == 0:
            self.px, self.py = x, y
            self.count = 1
            self.sx, self.sy = x, y
            return
        if self.children is None:
            # Identical coordinates (or a pathological depth) stay aggregated
            # in one leaf; their mutual distance is zero so the aggregate is
            # exact regardless of theta.
            if (self.px == x and self.py == y) or self.depth >= _MAX_DEPTH:
                self.count += 1
                self.sx += x
                self.sy += y
                return
            self._split()
        self.count += 1
        self.sx += x
        self.sy += y
        self._child_for(x, y).insert(x, y)

    def _split(self):
        h = self.half / 2.0
        d = self.depth + 1
        self.children = [
            _Node(self.cx - h, self.cy - h, h, d),
            _Node(self.cx + h, self.cy - h, h, d),
            _Node(self.cx - h, self.cy + h, h, d),
            _Node(self.cx + h, self.cy + h, h, d),
        ]
        # re-home the points accumulated so far (all at the same leaf coords)
        for _ in range(self.count):
            self._child_for(self.px, self.py).insert(self.px, self.py)

    def _child_for(self, x: float, y: float) -> "_Node":
        i = (1 if x > self.cx else 0) | (2 if y > self.cy else 0)
        return self.children[i]


class QuadTree:
    """Static quadtree over a set of 2D points."""

    def __init__(self, points: np.ndarray):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must have shape (n, 2)")
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        center = (lo + hi) / 2.0
        half = float(max(hi[0] - lo[0], hi[1] - lo[1])) / 2.0
        half = max(half, 1e-12) * (1.0 + 1e-9)  # strict containment
        self.root = _Node(float(center[0]), float(center[1]), half, 0)
        for x, y in pts:
            self.root.insert(float(x), float(y))

    def repulsion(self, x: float, y: float, theta: float) -> tuple[float, float, float]:
        """Accumulate Student-t repulsive numerators and the local Z share.

        Returns ``(fx, fy, z)`` where ``z = sum_cells N * w`` *includes* the
        query point's own w = 1 term (callers subtract one self term per
        point) and ``(fx, fy) = sum_cells N * w^2 * (p - com)``.
        """
        fx = 0.0
        fy = 0.0
        z = 0.0
        stack = [self.root]
        while stack:
            node = stack.pop()
            count = node.count
            if count == 0:
                continue
            mx = node.sx / count
            my = node.sy / count
            dx = x - mx
            dy = y - my
            d2 = dx * dx + dy * dy
            if node.children is None or node.half * 2.0 < theta * math.sqrt(d2):
                w = 1.0 / (1.0 + d2)
                z += count * w
                w2 = w * w
                fx += count * w2 * dx
                fy += count * w2 * dy
            else:
                stack.extend(node.children)
        return fx, fy, z
