"""Conforming triangular meshes of an inductor/workpiece/air cross-section.

The computational domain is a rectangular box containing a workpiece polygon
and zero or more coil polygons, surrounded by air.  Meshes are generated by
Delaunay triangulation of a filtered point set in which every polygon boundary
is resampled at the target mesh size; the filtering guarantees that the
sampled polygon edges appear as mesh edges, so every triangle lies entirely
in one region.

Boundary-layer resolution (skin effect) is obtained by red refinement of the
triangles within a given distance of tagged edges, with a 2:1 balance sweep
and a single green/blue closure pass so conformity and shape regularity are
preserved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import shapely
from scipy.spatial import Delaunay, cKDTree
from shapely.geometry import Polygon

# region labels (per triangle)
AIR, COIL, WORKPIECE = 0, 1, 2
REGION_NAMES = {AIR: "AIR", COIL: "COIL", WORKPIECE: "WORKPIECE"}
REGION_IDS = {v: k for k, v in REGION_NAMES.items()}

# boundary edge tags
OUTER, WORKPIECE_SURFACE, SYMMETRY = 0, 1, 2
TAG_NAMES = {OUTER: "OUTER", WORKPIECE_SURFACE: "WORKPIECE_SURFACE", SYMMETRY: "SYMMETRY"}
TAG_IDS = {v: k for k, v in TAG_NAMES.items()}

BOX_SIDES = ("left", "right", "bottom", "top")


class MeshError(ValueError):
    """Invalid geometry input or a generated mesh violating its invariants."""


@dataclass(frozen=True)
class Mesh:
    """Conforming 2D triangulation with region labels and tagged boundary edges.

    vertices       : (nv, 2) float64, coordinates in meters
    triangles      : (nt, 3) int32, CCW vertex triples (signed area > 0)
    region         : (nt,) int8, one of AIR / COIL / WORKPIECE
    boundary_edges : (nb, 2) int32 vertex pairs; every topological boundary
                     edge plus the workpiece-surface interface edges
    boundary_tags  : (nb,) int8, one of OUTER / WORKPIECE_SURFACE / SYMMETRY
    """

    vertices: np.ndarray
    triangles: np.ndarray
    region: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: np.ndarray

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]

    @cached_property
    def triangle_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        return 0.5 * ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                      - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))

    @cached_property
    def centroids(self) -> np.ndarray:
        return self.vertices[self.triangles].mean(axis=1)

    @cached_property
    def edge_counts(self) -> dict[tuple[int, int], int]:
        """Undirected edge -> number of incident triangles."""
        counts: dict[tuple[int, int], int] = {}
        for tri in self.triangles:
            a, b, c = int(tri[0]), int(tri[1]), int(tri[2])
            for e in ((a, b), (b, c), (c, a)):
                key = (e[0], e[1]) if e[0] < e[1] else (e[1], e[0])
                counts[key] = counts.get(key, 0) + 1
        return counts

    @cached_property
    def vertex_triangles(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.num_vertices)]
        for t, tri in enumerate(self.triangles):
            for v in tri:
                adj[int(v)].append(t)
        return adj

    def edges_with_tag(self, tag: int) -> np.ndarray:
        """Return the (k, 2) vertex pairs of boundary edges carrying `tag`."""
        if tag not in TAG_NAMES:
            raise MeshError(f"unknown boundary tag {tag!r}")
        mask = self.boundary_tags == tag
        return self.boundary_edges[mask]

    def region_area(self, label: int) -> float:
        return float(self.triangle_areas[self.region == label].sum())

    def boundary_vertices(self, tag: int) -> np.ndarray:
        """Sorted unique vertex indices on edges carrying `tag`."""
        edges = self.edges_with_tag(tag)
        return np.unique(edges.ravel()) if edges.size else np.empty(0, dtype=np.int32)

    def validate(self) -> None:
        """Check all mesh invariants; raise MeshError on the first violation."""
        nv = self.num_vertices
        if self.triangles.size and (self.triangles.min() < 0 or self.triangles.max() >= nv):
            raise MeshError("triangle vertex index out of range")
        if np.any(self.triangle_areas <= 0.0):
            raise MeshError("non-positive triangle signed area")
        # conformity: each edge in at most two triangles
        for edge, count in self.edge_counts.items():
            if count > 2:
                raise MeshError(f"edge {edge} shared by {count} triangles")
        # coil and workpiece closures must be disjoint (never share an edge)
        edge_regions: dict[tuple[int, int], set[int]] = {}
        for t, tri in enumerate(self.triangles):
            a, b, c = (int(v) for v in tri)
            reg = int(self.region[t])
            for e in ((a, b), (b, c), (c, a)):
                key = (e[0], e[1]) if e[0] < e[1] else (e[1], e[0])
                edge_regions.setdefault(key, set()).add(reg)
        for edge, regs in edge_regions.items():
            if COIL in regs and WORKPIECE in regs:
                raise MeshError(f"COIL and WORKPIECE share edge {edge}")
        # every topological boundary edge carries exactly one tag
        tagged: dict[tuple[int, int], int] = {}
        for (a, b), tag in zip(self.boundary_edges, self.boundary_tags):
            key = (int(a), int(b)) if a < b else (int(b), int(a))
            if key in tagged:
                raise MeshError(f"boundary edge {key} tagged twice")
            tagged[key] = int(tag)
        for edge, count in self.edge_counts.items():
            if count == 1 and edge not in tagged:
                raise MeshError(f"untagged topological boundary edge {edge}")
        for edge, tag in tagged.items():
            if edge not in self.edge_counts:
                raise MeshError(f"tagged edge {edge} not in mesh")
            if self.edge_counts[edge] == 2 and tag != WORKPIECE_SURFACE:
                raise MeshError(f"interior edge {edge} tagged {TAG_NAMES[tag]}")

    def min_angle(self) -> float:
        """Minimum interior angle over all triangles, in radians."""
        p = self.vertices[self.triangles]
        angles = np.empty((self.num_triangles, 3))
        for i in range(3):
            u = p[:, (i + 1) % 3] - p[:, i]
            v = p[:, (i + 2) % 3] - p[:, i]
            cosang = (u * v).sum(axis=1) / (np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1))
            angles[:, i] = np.arccos(np.clip(cosang, -1.0, 1.0))
        return float(angles.min())

    def locate(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Find containing triangle and barycentric coordinates for each point.

        Returns (tri_index, bary) with tri_index == -1 for points outside the
        mesh.  Candidates come from triangles incident to the nearest
        vertices, with a full scan fallback.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        tree = cKDTree(self.vertices)
        k = min(8, self.num_vertices)
        _, nearest = tree.query(points, k=k)
        nearest = np.atleast_2d(nearest)
        tri_idx = np.full(points.shape[0], -1, dtype=np.int64)
        bary = np.zeros((points.shape[0], 3))
        tol = 1e-12 + 1e-9 * math.sqrt(abs(float(self.triangle_areas.mean())))
        for i, pt in enumerate(points):
            cands: list[int] = []
            for v in nearest[i]:
                cands.extend(self.vertex_triangles[int(v)])
            seen = set()
            ordered = [t for t in cands if not (t in seen or seen.add(t))]
            hit = self._bary_in(pt, ordered, tol)
            if hit is None:
                hit = self._bary_in(pt, range(self.num_triangles), tol)
            if hit is not None:
                tri_idx[i], bary[i] = hit
        return tri_idx, bary

    def _bary_in(self, pt, candidates, tol):
        for t in candidates:
            ia, ib, ic = self.triangles[t]
            a, b, c = self.vertices[ia], self.vertices[ib], self.vertices[ic]
            det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            l1 = ((b[0] - pt[0]) * (c[1] - pt[1]) - (b[1] - pt[1]) * (c[0] - pt[0])) / det
            l2 = ((c[0] - pt[0]) * (a[1] - pt[1]) - (c[1] - pt[1]) * (a[0] - pt[0])) / det
            l3 = 1.0 - l1 - l2
            if l1 >= -tol and l2 >= -tol and l3 >= -tol:
                return int(t), np.array([l1, l2, l3])
        return None

    def interpolate(self, values: np.ndarray, points: np.ndarray) -> np.ndarray:
        """P1-interpolate a nodal field at arbitrary points inside the mesh."""
        tri_idx, bary = self.locate(points)
        if np.any(tri_idx < 0):
            raise MeshError("interpolation point outside mesh")
        return (values[self.triangles[tri_idx]] * bary).sum(axis=1)


@dataclass(frozen=True)
class DomainSpec:
    """Geometry of the computational box and its embedded polygons.

    box            : (x0, y0, x1, y1) outer extents in meters
    workpiece      : (k, 2) closed, non-self-intersecting polygon (CCW or CW)
    coils          : list of coil polygons, may be empty
    h              : target mesh size in meters
    symmetry_sides : box sides ("left"/"right"/"bottom"/"top") tagged SYMMETRY
                     instead of OUTER; realizes the half-cell symmetry cut
    """

    box: tuple[float, float, float, float]
    workpiece: np.ndarray
    coils: tuple[np.ndarray, ...] = ()
    h: float = 0.01
    symmetry_sides: tuple[str, ...] = ()

    def polygons(self) -> list[tuple[np.ndarray, int]]:
        out = [(np.asarray(self.workpiece, dtype=float), WORKPIECE)]
        out.extend((np.asarray(c, dtype=float), COIL) for c in self.coils)
        return out

    def validate(self) -> None:
        x0, y0, x1, y1 = self.box
        if not (x1 > x0 and y1 > y0):
            raise MeshError("outer box has non-positive extent")
        if not (self.h > 0.0):
            raise MeshError("target mesh size h must be positive")
        for side in self.symmetry_sides:
            if side not in BOX_SIDES:
                raise MeshError(f"unknown symmetry side {side!r}")
        box_poly = shapely.box(x0, y0, x1, y1)
        shapes = []
        for poly, label in self.polygons():
            if poly.shape[0] < 3:
                raise MeshError(f"{REGION_NAMES[label]} polygon needs >= 3 vertices")
            shp = Polygon(poly)
            if not shp.is_valid:
                raise MeshError(f"{REGION_NAMES[label]} polygon is self-intersecting or degenerate")
            # polygons may touch the box boundary (symmetry cuts / strip ends)
            # but must not leave it
            if not box_poly.covers(shp):
                raise MeshError(f"{REGION_NAMES[label]} polygon extends outside the outer box")
            shapes.append((shp, label))
        for i in range(len(shapes)):
            for j in range(i + 1, len(shapes)):
                if shapes[i][0].distance(shapes[j][0]) <= 0.0:
                    raise MeshError("polygons overlap or touch")


def polygon_area(poly: np.ndarray) -> float:
    """Shoelace area (absolute value) of a closed polygon given as vertex list."""
    p = np.asarray(poly, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _sample_polygon_boundary(poly: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray, list[tuple[int, int]]]:
    """Resample a polygon boundary at spacing <= h.

    Returns (points, local_spacing, segment_index_pairs); consecutive pairs
    must later be recovered as mesh edges.
    """
    pts: list[np.ndarray] = []
    spacing: list[float] = []
    n = poly.shape[0]
    for i in range(n):
        a = poly[i]
        b = poly[(i + 1) % n]
        length = float(np.hypot(*(b - a)))
        if length == 0.0:
            raise MeshError("polygon has a zero-length edge")
        ne = max(1, math.ceil(length / h))
        s = length / ne
        for j in range(ne):  # half-open: corner b belongs to the next edge
            pts.append(a + (j / ne) * (b - a))
            spacing.append(s)
    points = np.asarray(pts)
    segs = [(i, (i + 1) % len(pts)) for i in range(len(pts))]
    return points, np.asarray(spacing), segs


def _orient_ccw(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    p = vertices[triangles]
    two_area = ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))
    flip = two_area < 0.0
    triangles = triangles.copy()
    triangles[flip] = triangles[flip][:, [0, 2, 1]]
    return triangles


def _box_side_of_edge(a: np.ndarray, b: np.ndarray, box, tol: float) -> str | None:
    x0, y0, x1, y1 = box
    if abs(a[0] - x0) < tol and abs(b[0] - x0) < tol:
        return "left"
    if abs(a[0] - x1) < tol and abs(b[0] - x1) < tol:
        return "right"
    if abs(a[1] - y0) < tol and abs(b[1] - y0) < tol:
        return "bottom"
    if abs(a[1] - y1) < tol and abs(b[1] - y1) < tol:
        return "top"
    return None


def build_domain(spec: DomainSpec) -> Mesh:
    """Triangulate the domain described by `spec`.

    Every polygon boundary is resolved by mesh edges and every triangle lies
    entirely in one region; the result satisfies all Mesh invariants.
    """
    spec.validate()
    x0, y0, x1, y1 = spec.box
    h = spec.h
    scale = max(x1 - x0, y1 - y0)

    boundary_pts: list[np.ndarray] = []
    boundary_spacing: list[np.ndarray] = []
    segments: list[list[tuple[int, int]]] = []
    offset = 0
    for poly, _label in spec.polygons():
        pts, sp, segs = _sample_polygon_boundary(poly, h)
        boundary_pts.append(pts)
        boundary_spacing.append(sp)
        segments.append([(a + offset, b + offset) for a, b in segs])
        offset += pts.shape[0]
    bpts = np.vstack(boundary_pts) if boundary_pts else np.empty((0, 2))
    bspacing = np.concatenate(boundary_spacing) if boundary_spacing else np.empty(0)

    # background grid over the box, pruned near polygon boundaries so the
    # resampled boundary segments come out as (Gabriel) Delaunay edges
    nx = max(1, round((x1 - x0) / h))
    ny = max(1, round((y1 - y0) / h))
    gx = np.linspace(x0, x1, nx + 1)
    gy = np.linspace(y0, y1, ny + 1)
    gridx, gridy = np.meshgrid(gx, gy, indexing="ij")
    grid = np.column_stack([gridx.ravel(), gridy.ravel()])
    if bpts.shape[0]:
        tree = cKDTree(bpts)
        dist, nearest = tree.query(grid)
        keep = dist >= 0.8 * bspacing[nearest]
        grid = grid[keep]
    points = np.vstack([bpts, grid]) if bpts.shape[0] else grid

    tri = Delaunay(points)
    triangles = _orient_ccw(points, tri.simplices.astype(np.int32))

    # drop degenerate slivers only if truly zero-area (should not occur)
    p = points[triangles]
    areas = 0.5 * ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                   - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))
    if np.any(areas < 1e-14 * scale * scale):
        raise MeshError("degenerate triangle produced; perturb geometry or reduce h")

    # verify polygon boundaries are resolved by mesh edges
    edge_set = set()
    for t in triangles:
        a, b, c = (int(v) for v in t)
        for e in ((a, b), (b, c), (c, a)):
            edge_set.add((e[0], e[1]) if e[0] < e[1] else (e[1], e[0]))
    for segs in segments:
        for a, b in segs:
            key = (a, b) if a < b else (b, a)
            if key not in edge_set:
                raise MeshError("polygon boundary not resolved by mesh edges; reduce h")

    # classify triangles by centroid
    centroids = triangles_centroids = points[triangles].mean(axis=1)
    region = np.full(triangles.shape[0], AIR, dtype=np.int8)
    for poly, label in spec.polygons():
        shp = Polygon(poly)
        inside = shapely.contains_xy(shp, centroids[:, 0], centroids[:, 1])
        region[inside] = label

    # tag boundary edges: topological boundary by box side, then the
    # workpiece-surface interface
    edge_tris: dict[tuple[int, int], list[int]] = {}
    for t_idx, t in enumerate(triangles):
        a, b, c = (int(v) for v in t)
        for e in ((a, b), (b, c), (c, a)):
            key = (e[0], e[1]) if e[0] < e[1] else (e[1], e[0])
            edge_tris.setdefault(key, []).append(t_idx)
    side_tags = {side: (SYMMETRY if side in spec.symmetry_sides else OUTER) for side in BOX_SIDES}
    tol = 1e-9 * scale
    b_edges: list[tuple[int, int]] = []
    b_tags: list[int] = []
    for edge, tris in sorted(edge_tris.items()):
        if len(tris) == 1:
            side = _box_side_of_edge(points[edge[0]], points[edge[1]], spec.box, tol)
            if side is None:
                raise MeshError(f"boundary edge {edge} not on the outer box")
            b_edges.append(edge)
            b_tags.append(side_tags[side])
        else:
            r0, r1 = region[tris[0]], region[tris[1]]
            if (r0 == WORKPIECE) != (r1 == WORKPIECE):
                b_edges.append(edge)
                b_tags.append(WORKPIECE_SURFACE)

    mesh = Mesh(
        vertices=np.ascontiguousarray(points, dtype=np.float64),
        triangles=np.ascontiguousarray(triangles, dtype=np.int32),
        region=region,
        boundary_edges=np.asarray(b_edges, dtype=np.int32).reshape(-1, 2),
        boundary_tags=np.asarray(b_tags, dtype=np.int8),
    )
    mesh.validate()
    return mesh


def _point_segment_distance(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.linalg.norm(pts - a, axis=1)
    t = np.clip(((pts - a) @ ab) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return np.linalg.norm(pts - proj, axis=1)


class _Refiner:
    """Red refinement of marked triangles plus longest-edge closure.

    Closure bisections always split the triangle's longest edge, so the
    classical bound applies: every descendant's minimum angle is at least
    half the minimum angle of the input mesh.
    """

    def __init__(self, mesh: Mesh):
        self.verts: list[np.ndarray] = [v for v in mesh.vertices]
        self.tris: list[tuple[int, int, int]] = [tuple(int(v) for v in t) for t in mesh.triangles]
        self.region: list[int] = [int(r) for r in mesh.region]
        self.mid: dict[tuple[int, int], int] = {}

    def midpoint(self, a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        m = self.mid.get(key)
        if m is None:
            m = len(self.verts)
            self.verts.append(0.5 * (self.verts[a] + self.verts[b]))
            self.mid[key] = m
        return m

    def has_mid(self, a: int, b: int) -> bool:
        return ((a, b) if a < b else (b, a)) in self.mid

    def red(self, idx: int) -> list[int]:
        """Quadrisect triangle `idx` in place; children are similar to it."""
        v0, v1, v2 = self.tris[idx]
        m01 = self.midpoint(v0, v1)
        m12 = self.midpoint(v1, v2)
        m20 = self.midpoint(v2, v0)
        reg = self.region[idx]
        self.tris[idx] = (v0, m01, m20)
        self.region[idx] = reg
        out = [idx]
        for child in ((m01, v1, m12), (m20, m12, v2), (m01, m12, m20)):
            out.append(len(self.tris))
            self.tris.append(child)
            self.region.append(reg)
        return out

    def has_hanging(self, idx: int) -> bool:
        v0, v1, v2 = self.tris[idx]
        return self.has_mid(v0, v1) or self.has_mid(v1, v2) or self.has_mid(v2, v0)

    def bisect_longest(self, idx: int) -> list[int]:
        """Split `idx` across the midpoint of its longest edge (deterministic
        tie-break by vertex indices)."""
        v0, v1, v2 = self.tris[idx]
        best = None
        for a, b, c in ((v0, v1, v2), (v1, v2, v0), (v2, v0, v1)):
            d = float(np.hypot(*(self.verts[a] - self.verts[b])))
            key = (d, -min(a, b), -max(a, b))
            if best is None or key > best[0]:
                best = (key, (a, b, c))
        a, b, c = best[1]
        m = self.midpoint(a, b)
        reg = self.region[idx]
        self.tris[idx] = (a, m, c)
        self.region[idx] = reg
        child = len(self.tris)
        self.tris.append((m, b, c))
        self.region.append(reg)
        return [idx, child]


def refine_boundary_layer(mesh: Mesh, tag: int, depth: float, levels: int) -> Mesh:
    """Red-refine all triangles whose centroid lies within `depth` of any
    edge tagged `tag`, `levels` times, then restore conformity.

    Returns a new Mesh; `levels == 0` returns the input mesh unchanged.
    """
    if tag not in TAG_NAMES:
        raise MeshError(f"unknown boundary tag {tag!r}")
    if levels < 0:
        raise MeshError("levels must be >= 0")
    if depth <= 0.0:
        raise MeshError("depth must be positive")
    if levels == 0:
        return mesh

    segs = [(mesh.vertices[int(a)].copy(), mesh.vertices[int(b)].copy())
            for a, b in mesh.edges_with_tag(tag)]

    r = _Refiner(mesh)

    def near_band(indices: list[int]) -> list[int]:
        if not segs:
            return []
        cents = np.array([(np.asarray(r.verts[a]) + r.verts[b] + r.verts[c]) / 3.0
                          for a, b, c in (r.tris[i] for i in indices)])
        dmin = np.full(len(indices), np.inf)
        for a, b in segs:
            np.minimum(dmin, _point_segment_distance(cents, a, b), out=dmin)
        return [idx for idx, d in zip(indices, dmin) if d <= depth]

    active = list(range(len(r.tris)))
    for _ in range(levels):
        marked = near_band(active)
        marked_set = set(marked)
        children: list[int] = []
        for idx in marked:
            children.extend(r.red(idx))
        # red() reuses the parent slot for one child, so `active` stays a leaf list
        active = sorted(set(i for i in active if i not in marked_set) | set(children))

    # closure: longest-edge bisection of any leaf carrying a hanging node,
    # repeated to a fixpoint (new midpoints may make neighbors non-conforming)
    active_set = set(active)
    changed = True
    while changed:
        changed = False
        for idx in sorted(active_set):
            if r.has_hanging(idx):
                children = r.bisect_longest(idx)
                active_set.discard(idx)
                active_set.update(children)
                changed = True

    final_idx = sorted(active_set)
    final_tris = [r.tris[i] for i in final_idx]
    final_region = [r.region[i] for i in final_idx]

    # expand boundary edges through the midpoint hierarchy, inheriting tags
    b_edges: list[tuple[int, int]] = []
    b_tags: list[int] = []

    def expand(a: int, b: int, t: int) -> None:
        if r.has_mid(a, b):
            m = r.mid[(a, b) if a < b else (b, a)]
            expand(a, m, t)
            expand(m, b, t)
        else:
            b_edges.append((a, b))
            b_tags.append(t)

    for (a, b), t in zip(mesh.boundary_edges, mesh.boundary_tags):
        expand(int(a), int(b), int(t))

    out = Mesh(
        vertices=np.asarray(r.verts, dtype=np.float64),
        triangles=np.asarray(final_tris, dtype=np.int32),
        region=np.asarray(final_region, dtype=np.int8),
        boundary_edges=np.asarray(b_edges, dtype=np.int32).reshape(-1, 2),
        boundary_tags=np.asarray(b_tags, dtype=np.int8),
    )
    out.validate()
    return out


@dataclass(frozen=True)
class SubmeshMap:
    """Injective parent<->child index correspondence of a region submesh."""

    node_map: np.ndarray  # child vertex index -> parent vertex index
    tri_map: np.ndarray   # child triangle index -> parent triangle index

    def restrict(self, parent_values: np.ndarray) -> np.ndarray:
        """Pull a parent nodal field onto the submesh nodes."""
        return np.asarray(parent_values)[self.node_map]

    def extend(self, child_values: np.ndarray, num_parent: int, fill: float = 0.0) -> np.ndarray:
        """Scatter a submesh nodal field back onto the parent (fill elsewhere)."""
        out = np.full(num_parent, fill, dtype=float)
        out[self.node_map] = child_values
        return out


def submesh(mesh: Mesh, label: int) -> tuple[Mesh, SubmeshMap]:
    """Extract the triangles of one region as a standalone mesh.

    Parent WORKPIECE_SURFACE edges become OUTER edges of the submesh;
    SYMMETRY edges keep their tag; anything else on the new boundary
    becomes OUTER.
    """
    mask = mesh.region == label
    if not np.any(mask):
        raise MeshError(f"region {REGION_NAMES.get(label, label)} has zero triangles")
    tri_map = np.nonzero(mask)[0].astype(np.int32)
    tris = mesh.triangles[tri_map]
    node_map = np.unique(tris)
    renumber = np.full(mesh.num_vertices, -1, dtype=np.int32)
    renumber[node_map] = np.arange(node_map.size, dtype=np.int32)
    child_tris = renumber[tris]

    parent_tags: dict[tuple[int, int], int] = {}
    for (a, b), t in zip(mesh.boundary_edges, mesh.boundary_tags):
        key = (int(a), int(b)) if a < b else (int(b), int(a))
        parent_tags[key] = int(t)

    counts: dict[tuple[int, int], int] = {}
    for t in child_tris:
        a, b, c = (int(v) for v in t)
        for e in ((a, b), (b, c), (c, a)):
            key = (e[0], e[1]) if e[0] < e[1] else (e[1], e[0])
            counts[key] = counts.get(key, 0) + 1
    b_edges: list[tuple[int, int]] = []
    b_tags: list[int] = []
    for edge, count in sorted(counts.items()):
        if count != 1:
            continue
        pa, pb = int(node_map[edge[0]]), int(node_map[edge[1]])
        pkey = (pa, pb) if pa < pb else (pb, pa)
        tag = parent_tags.get(pkey, OUTER)
        if tag == WORKPIECE_SURFACE:
            tag = OUTER
        b_edges.append(edge)
        b_tags.append(tag)

    child = Mesh(
        vertices=mesh.vertices[node_map].copy(),
        triangles=np.ascontiguousarray(child_tris, dtype=np.int32),
        region=mesh.region[tri_map].copy(),
        boundary_edges=np.asarray(b_edges, dtype=np.int32).reshape(-1, 2),
        boundary_tags=np.asarray(b_tags, dtype=np.int8),
    )
    child.validate()
    return child, SubmeshMap(node_map=node_map.astype(np.int32), tri_map=tri_map)


def tooth_polygon(half_pitch: float, base_height: float, tooth_height: float,
                  tip_halfwidth: float, root_halfwidth: float) -> np.ndarray:
    """Half-tooth cross-section: a base slab with a trapezoidal tooth at x=0.

    The polygon touches x=0 (tooth centerline) and y=0 (body cut), both meant
    to be symmetry sides of the box; the valley floor extends to x=half_pitch.
    """
    if not (0.0 < tip_halfwidth <= root_halfwidth < half_pitch):
        raise MeshError("need 0 < tip_halfwidth <= root_halfwidth < half_pitch")
    return np.array([
        (0.0, 0.0),
        (half_pitch, 0.0),
        (half_pitch, base_height),
        (root_halfwidth, base_height),
        (tip_halfwidth, base_height + tooth_height),
        (0.0, base_height + tooth_height),
    ])


# ---------------------------------------------------------------------------
# plain-text export/import (format: MESH2D v1)

def write_mesh(mesh: Mesh, path) -> None:
    """Write a mesh in the whitespace-separated MESH2D v1 text format."""
    lines = ["MESH2D v1", str(mesh.num_vertices)]
    for x, y in mesh.vertices:
        lines.append(f"{float(x)!r} {float(y)!r}")
    lines.append(str(mesh.num_triangles))
    for t, reg in zip(mesh.triangles, mesh.region):
        lines.append(f"{t[0]} {t[1]} {t[2]} {REGION_NAMES[int(reg)]}")
    lines.append(str(mesh.boundary_edges.shape[0]))
    for (a, b), tag in zip(mesh.boundary_edges, mesh.boundary_tags):
        lines.append(f"{a} {b} {TAG_NAMES[int(tag)]}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def read_mesh(path) -> Mesh:
    """Read a MESH2D v1 text file written by `write_mesh`."""
    with open(path) as f:
        tokens = f.read().split("\n")
    rows = [ln.split() for ln in tokens if ln.strip()]
    if rows[0] != ["MESH2D", "v1"]:
        raise MeshError("not a MESH2D v1 file")
    i = 1
    nv = int(rows[i][0]); i += 1
    verts = np.array([[float(rows[i + k][0]), float(rows[i + k][1])] for k in range(nv)])
    i += nv
    nt = int(rows[i][0]); i += 1
    tris = np.array([[int(rows[i + k][0]), int(rows[i + k][1]), int(rows[i + k][2])]
                     for k in range(nt)], dtype=np.int32)
    region = np.array([REGION_IDS[rows[i + k][3]] for k in range(nt)], dtype=np.int8)
    i += nt
    nb = int(rows[i][0]); i += 1
    bedges = np.array([[int(rows[i + k][0]), int(rows[i + k][1])] for k in range(nb)],
                      dtype=np.int32).reshape(-1, 2)
    btags = np.array([TAG_IDS[rows[i + k][2]] for k in range(nb)], dtype=np.int8)
    mesh = Mesh(vertices=verts, triangles=tris, region=region,
                boundary_edges=bedges, boundary_tags=btags)
    mesh.validate()
    return mesh
