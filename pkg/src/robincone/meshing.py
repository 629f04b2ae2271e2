"""Tagged simplicial meshes for truncated conical domains.

Planar meshes discretize a truncated sector in the plane; meridian meshes
discretize the (r_cyl, z) half-section of an axisymmetric 3D domain.  Both
use the same ring construction: concentric polylines at uniform radial step,
with angular nodes marched from the Robin walls on an arc-length ladder
(step delta inside the boundary layer of width 2/alpha, growing linearly
outside, capped for triangle quality), zipper-triangulated ring to ring.

Everything is deterministic: identical inputs give identical node ordering.

Boundary edges carry one of three tags:
  ROBIN      physical boundary of the domain,
  ARTIFICIAL truncation arc at |x| = R_T,
  AXIS       symmetry axis (meridian meshes only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Callable, Optional, Union

import numpy as np

from .errors import (
    MeshingError,
    MeshQualityFailure,
    NotAxisymmetric,
    UnsupportedGeometry,
)
from .geometry import ConeSpec, Interval2D, LatitudeCircle


class Tag(IntEnum):
    ROBIN = 1
    ARTIFICIAL = 2
    AXIS = 3


MAX_ASPECT = 20.0          # longest/shortest edge per triangle
LAYER_FACTOR = 2.0         # boundary layer width = LAYER_FACTOR / alpha
FINE_FACTOR = 0.2          # in-layer edge bound = min(h, FINE_FACTOR/alpha)
STEP_SAFETY = 1.9          # delta = fine/STEP_SAFETY keeps zipper diagonals <= fine
GROWTH = 0.45              # linear growth of edge target outside the layer
CAP_STEPS = 7.0            # interior tangential cap = CAP_STEPS * delta


# ---------------------------------------------------------------------------
# domain specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmoothedVertex:
    """Replace the cone vertex by a circular-arc fillet of the given radius."""

    radius: float


@dataclass(frozen=True)
class RadialBump:
    """Smooth normal displacement of the boundary, supported in a radial band.

    The boundary wall angle is displaced by amplitude*bump((r-center)/(width/2))/r,
    i.e. a normal displacement of size ~amplitude on r in (center-width/2,
    center+width/2).
    """

    amplitude: float
    center: float
    width: float


Perturbation = Union[SmoothedVertex, RadialBump]


@dataclass
class DomainSpec:
    """Computational domain: cone + optional compact perturbation + truncation."""

    cone: ConeSpec
    truncation_radius: float
    alpha: float
    artificial_bc: str = "dirichlet"
    perturbation: Optional[Perturbation] = None

    def __post_init__(self):
        if self.truncation_radius <= 0:
            raise MeshingError("truncation radius must be positive")
        if self.alpha <= 0:
            raise MeshingError("alpha must be positive")
        if self.artificial_bc not in ("dirichlet", "neumann"):
            raise MeshingError(
                f"artificial_bc must be 'dirichlet' or 'neumann', got {self.artificial_bc!r}"
            )
        p = self.perturbation
        if isinstance(p, SmoothedVertex):
            if p.radius <= 0:
                raise MeshingError("smoothing radius must be positive")
            reach = _fillet(self._wall_angle(), p.radius).reach
            if reach > self.truncation_radius - 1.0:
                raise MeshingError(
                    "vertex smoothing must be supported inside the ball of "
                    f"radius R_T - 1 = {self.truncation_radius - 1.0:g} "
                    f"(fillet reaches {reach:g})"
                )
        elif isinstance(p, RadialBump):
            if p.width <= 0:
                raise MeshingError("bump width must be positive")
            if p.center - p.width / 2.0 <= 0.0:
                raise MeshingError("bump support must stay away from the vertex")
            if p.center + p.width / 2.0 > self.truncation_radius - 1.0:
                raise MeshingError(
                    "bump support must lie inside the ball of radius R_T - 1"
                )

    def _wall_angle(self) -> float:
        cs = self.cone.cross_section
        if isinstance(cs, Interval2D):
            return cs.theta
        if isinstance(cs, LatitudeCircle):
            return cs.theta0
        raise UnsupportedGeometry(
            "meshes exist for planar sectors and axisymmetric cones only"
        )

    @property
    def dimension(self) -> int:
        return self.cone.dimension


# ---------------------------------------------------------------------------
# mesh container
# ---------------------------------------------------------------------------

@dataclass
class Mesh:
    nodes: np.ndarray            # (n, 2)
    triangles: np.ndarray        # (m, 3) CCW
    boundary_edges: np.ndarray   # (k, 2)
    edge_tags: np.ndarray        # (k,) Tag values
    h: float
    grading: dict
    meridian: bool = False

    def triangle_areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        return 0.5 * (
            (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
            - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1])
        )

    def edge_lengths(self, edges: np.ndarray) -> np.ndarray:
        d = self.nodes[edges[:, 0]] - self.nodes[edges[:, 1]]
        return np.linalg.norm(d, axis=1)

    def boundary_length(self, tag: Tag) -> float:
        sel = self.boundary_edges[self.edge_tags == int(tag)]
        return float(np.sum(self.edge_lengths(sel)))

    def aspect_ratios(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        e = np.stack(
            [
                np.linalg.norm(p[:, 1] - p[:, 0], axis=1),
                np.linalg.norm(p[:, 2] - p[:, 1], axis=1),
                np.linalg.norm(p[:, 0] - p[:, 2], axis=1),
            ],
            axis=1,
        )
        return e.max(axis=1) / e.min(axis=1)

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]


# ---------------------------------------------------------------------------
# fillet geometry (vertex smoothing in a meridian/half-aperture section)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Fillet:
    """Circle of radius rf centered on the symmetry axis, tangent to the wall.

    ``center`` is the signed axis coordinate of the center, ``tangency`` the
    radius at which the arc meets the wall, ``apex`` the radius at which it
    crosses the axis, ``reach`` the largest radius the fillet touches.
    For wall angles above pi/2 the center sits on the negative axis and the
    domain gains the rounded region; below pi/2 the vertex tip is cut off.
    """

    wall: float
    rf: float
    center: float
    tangency: float
    apex: float

    @property
    def reach(self) -> float:
        return max(self.tangency, self.apex)

    def r_cut(self, psi: np.ndarray) -> np.ndarray:
        """First crossing radius of the ray at angle psi with the circle."""
        q = self.center * np.cos(psi)
        t2 = self.center**2 - self.rf**2
        disc = np.maximum(q * q - t2, 0.0)
        return q - np.sqrt(disc)

    def interval_hi(self, r: float) -> Optional[float]:
        """Upper angular end of the domain slice at radius r (None = empty)."""
        if self.wall < np.pi / 2.0:  # tip cut off
            if r < self.apex:
                return None
            if r >= self.tangency:
                return self.wall
            lo, hi = 0.0, self.wall
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if self.r_cut(np.asarray(mid)) <= r:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)
        # rounded outward: domain gains the region around the origin
        if r >= self.tangency:
            return self.wall
        if r <= self.apex:
            return np.pi
        lo, hi = self.wall, np.pi
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if self.r_cut(np.asarray(mid)) > r:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def _fillet(wall: float, rf: float) -> _Fillet:
    if abs(wall - np.pi / 2.0) < 1e-12:
        # flat boundary: smoothing is the identity
        return _Fillet(wall, rf, math.inf, 0.0, 0.0)
    s = math.sin(wall)
    if wall < np.pi / 2.0:
        center = rf / s
        tangency = rf / math.tan(wall)
        apex = center - rf
    else:
        center = -rf / s
        tangency = rf * abs(1.0 / math.tan(wall))
        apex = abs(center) - rf
    return _Fillet(wall, rf, center, tangency, apex)


# ---------------------------------------------------------------------------
# section domains: angular slice per radius + distance to the Robin boundary
# ---------------------------------------------------------------------------

class _SectionDomain:
    """Domain slice [psi_lo(r), psi_hi(r)] in a half-plane section.

    ``mirror`` duplicates the slice symmetrically about psi = 0 (planar
    sectors); otherwise psi = 0 is the symmetry axis of a meridian section.
    """

    def __init__(self, spec: DomainSpec, mirror: bool):
        self.spec = spec
        self.mirror = mirror
        self.wall = spec._wall_angle()
        self.fillet = None
        self.bump = None
        p = spec.perturbation
        if isinstance(p, SmoothedVertex):
            if mirror and self.wall >= np.pi / 2.0:
                raise MeshingError(
                    "vertex smoothing of planar sectors is supported for "
                    "half-aperture < pi/2 only"
                )
            self.fillet = _fillet(self.wall, p.radius)
            if math.isinf(self.fillet.center):
                self.fillet = None
        elif isinstance(p, RadialBump):
            self.bump = p
            hi = self.psi_hi(p.center)
            if hi is None or hi >= np.pi:
                raise MeshingError("bump amplitude pushes the wall past the axis")

    def _bump_dpsi(self, r: float) -> float:
        b = self.bump
        u = (r - b.center) / (b.width / 2.0)
        if abs(u) >= 1.0:
            return 0.0
        return (b.amplitude / r) * math.exp(1.0 - 1.0 / (1.0 - u * u))

    def psi_hi(self, r: float) -> Optional[float]:
        if self.fillet is not None:
            hi = self.fillet.interval_hi(r)
            if hi is None:
                return None
        else:
            hi = self.wall
        if self.bump is not None:
            hi = hi + self._bump_dpsi(r)
        return hi

    def psi_lo(self, r: float) -> Optional[float]:
        hi = self.psi_hi(r)
        if hi is None:
            return None
        return -hi if self.mirror else 0.0

    def contains_origin(self) -> bool:
        return self.fillet is None or self.fillet.wall > np.pi / 2.0

    def breakpoints(self) -> list:
        out = []
        if self.fillet is not None:
            out += [self.fillet.apex, self.fillet.tangency]
        if self.bump is not None:
            out += [
                self.bump.center - self.bump.width / 2.0,
                self.bump.center + self.bump.width / 2.0,
            ]
        return [b for b in out if 0.0 < b < self.spec.truncation_radius]

    def robin_ends(self) -> tuple:
        """(lower end is Robin, upper end is Robin)."""
        return (self.mirror, True)

    def build_boundary_points(self, radii: np.ndarray) -> np.ndarray:
        """Polyline sampling of the upper Robin boundary for distance queries."""
        pts = []
        for r in radii:
            hi = self.psi_hi(r)
            if hi is None:
                continue
            pts.append((r * math.sin(hi), r * math.cos(hi)))
        if self.fillet is not None:
            # sample the arc itself so the layer hugs it
            n = 64
            if self.fillet.wall < np.pi / 2.0:
                angs = np.linspace(0.0, self.fillet.wall, n)
            else:
                angs = np.linspace(self.fillet.wall, np.pi, n)
            rr = self.fillet.r_cut(angs)
            pts.extend(zip(rr * np.sin(angs), rr * np.cos(angs)))
        return np.asarray(pts)

    def dist_to_robin(self, xy: np.ndarray, boundary_pts: np.ndarray) -> np.ndarray:
        """Conservative distance from points (in section coords) to Robin parts."""
        xy = np.atleast_2d(xy)
        # straight-wall distance (full line through the origin), cheap and exact
        # away from perturbations; mirrored wall handled via |x|
        c, s = math.cos(self.wall), math.sin(self.wall)
        x = np.abs(xy[:, 0]) if self.mirror else xy[:, 0]
        d_line = np.abs(x * (-c) + xy[:, 1] * s)
        if self.fillet is None and self.bump is None:
            return d_line
        q = xy.copy()
        if self.mirror:
            q[:, 0] = np.abs(q[:, 0])
        d_pts = np.min(
            np.linalg.norm(q[:, None, :] - boundary_pts[None, :, :], axis=2), axis=1
        )
        if self.fillet is not None:
            center = np.array([0.0, self.fillet.center])
            d_arc = np.abs(np.linalg.norm(q - center, axis=1) - self.fillet.rf)
            d_pts = np.minimum(d_pts, d_arc)
            # the straight wall exists only beyond the tangency radius
            r = np.linalg.norm(q, axis=1)
            d_line = np.where(r >= self.fillet.tangency, d_line, np.inf)
        return np.minimum(d_line, d_pts)


# ---------------------------------------------------------------------------
# ring construction
# ---------------------------------------------------------------------------

def _ring_radii(R_T: float, delta: float, breakpoints: list) -> np.ndarray:
    base = list(np.arange(delta, R_T, delta))
    if not base or R_T - base[-1] > 0.6 * delta:
        base.append(R_T)
    else:
        base[-1] = R_T
    bps = []
    for b in sorted(breakpoints):
        if not bps or b - bps[-1] > 0.5 * delta:
            bps.append(b)
    keep = [r for r in base if all(abs(r - b) > 0.5 * delta for b in bps)]
    radii = np.asarray(sorted(keep + bps))
    return radii


def _march_angles(
    r: float,
    lo: float,
    hi: float,
    robin_lo: bool,
    robin_hi: bool,
    dist_fn: Callable[[np.ndarray], np.ndarray],
    delta: float,
    layer: float,
    cap: float,
) -> np.ndarray:
    """Angular nodes on the arc [lo, hi] at radius r, graded toward Robin ends."""
    span_arc = r * (hi - lo)
    if span_arc < 0.5 * delta:
        return np.array([0.5 * (lo + hi)])
    if span_arc <= 1.6 * delta:
        n = max(1, int(round(span_arc / delta)))
        return np.linspace(lo, hi, n + 1)

    def target(psi: float) -> float:
        xy = np.array([[r * math.sin(psi), r * math.cos(psi)]])
        t = float(dist_fn(xy)[0])
        if t <= 1.05 * layer + delta:
            return delta
        return min(cap, delta + GROWTH * (t - layer))

    def ladder(anchor: float, direction: float) -> list:
        out = []
        arc = 0.0
        psi = anchor
        while True:
            tau = target(psi)
            arc += tau
            psi = anchor + direction * arc / r
            if direction > 0 and psi >= hi - 0.5 * tau / r:
                break
            if direction < 0 and psi <= lo + 0.5 * tau / r:
                break
            out.append(psi)
            if len(out) > 100000:
                raise MeshingError("angular ladder runaway")
        return out

    marks = []
    if robin_hi:
        marks += ladder(hi, -1.0)
    if robin_lo:
        marks += ladder(lo, +1.0)
    if not (robin_hi or robin_lo):
        marks += ladder(hi, -1.0)
    marks = np.asarray(sorted(set(marks)))
    # enforce minimum separation against neighbors (merge clusters)
    angles = [lo]
    for psi in marks:
        tau = target(psi) / r
        if psi - angles[-1] >= 0.5 * tau and hi - psi >= 0.5 * tau:
            angles.append(psi)
    angles.append(hi)
    return np.asarray(angles)


def _zipper(tri_out: list, inner_idx, inner_psi, outer_idx, outer_psi):
    """Triangulate the strip between two rings by merging on angle."""
    i, j = 0, 0
    p, q = len(inner_idx), len(outer_idx)
    while i < p - 1 or j < q - 1:
        adv_inner = False
        if i < p - 1 and j < q - 1:
            adv_inner = inner_psi[i + 1] <= outer_psi[j + 1]
        elif i < p - 1:
            adv_inner = True
        if adv_inner:
            tri_out.append((inner_idx[i], outer_idx[j], inner_idx[i + 1]))
            i += 1
        else:
            tri_out.append((inner_idx[i], outer_idx[j], outer_idx[j + 1]))
            j += 1


def _build_section_mesh(spec: DomainSpec, h: float, mirror: bool) -> Mesh:
    domain = _SectionDomain(spec, mirror)
    R_T = spec.truncation_radius
    fine = min(h, FINE_FACTOR / spec.alpha)
    delta = fine / STEP_SAFETY
    layer = LAYER_FACTOR / spec.alpha
    cap = CAP_STEPS * delta

    radii = _ring_radii(R_T, delta, domain.breakpoints())
    boundary_pts = domain.build_boundary_points(radii)

    def dist_fn(xy):
        return domain.dist_to_robin(xy, boundary_pts)

    robin_lo, robin_hi = domain.robin_ends()

    nodes: list = []
    tris: list = []
    ring_idx_prev: Optional[np.ndarray] = None
    ring_psi_prev: Optional[np.ndarray] = None

    def emit_ring(r: float) -> tuple:
        lo = domain.psi_lo(r)
        hi = domain.psi_hi(r)
        if hi is None:
            return None, None
        psi = _march_angles(
            r, lo, hi, robin_lo, robin_hi, dist_fn, delta, layer, cap
        )
        sin_psi = np.sin(psi)
        sin_psi[np.abs(sin_psi) < 1e-14] = 0.0
        xy = np.stack([r * sin_psi, r * np.cos(psi)], axis=1)
        start = len(nodes)
        nodes.extend(xy)
        return np.arange(start, start + len(psi)), psi

    if domain.contains_origin():
        nodes.append(np.zeros(2))
        ring_idx_prev = np.array([0])
        ring_psi_prev = np.array([0.0])

    for r in radii:
        idx, psi = emit_ring(r)
        if idx is None:
            continue
        if ring_idx_prev is not None:
            _zipper(tris, ring_idx_prev, ring_psi_prev, idx, psi)
        ring_idx_prev, ring_psi_prev = idx, psi

    node_arr = np.asarray(nodes)
    tri_arr = np.asarray(tris, dtype=np.int64)

    # drop exact slivers (coincident nodes), then orient consistently
    p = node_arr[tri_arr]
    emin = np.minimum(
        np.minimum(
            np.linalg.norm(p[:, 1] - p[:, 0], axis=1),
            np.linalg.norm(p[:, 2] - p[:, 1], axis=1),
        ),
        np.linalg.norm(p[:, 0] - p[:, 2], axis=1),
    )
    tri_arr = tri_arr[emin > 1e-9 * delta]
    p = node_arr[tri_arr]
    area2 = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (
        p[:, 2, 0] - p[:, 0, 0]
    ) * (p[:, 1, 1] - p[:, 0, 1])
    flip = area2 < 0
    tri_arr[flip] = tri_arr[flip][:, [0, 2, 1]]

    edges, tags = _extract_boundary(node_arr, tri_arr, R_T, meridian=not mirror)
    mesh = Mesh(
        nodes=node_arr,
        triangles=tri_arr,
        boundary_edges=edges,
        edge_tags=tags,
        h=h,
        grading={
            "fine": fine,
            "delta": delta,
            "layer": layer,
            "growth": GROWTH,
            "cap": cap,
        },
        meridian=not mirror,
    )
    worst = float(np.max(mesh.aspect_ratios()))
    if worst > MAX_ASPECT:
        raise MeshQualityFailure(
            f"triangle aspect ratio {worst:.2f} exceeds {MAX_ASPECT}"
        )
    return mesh


def _extract_boundary(nodes, tris, R_T, meridian: bool):
    edges = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    key = np.sort(edges, axis=1)
    _, inv, counts = np.unique(
        key, axis=0, return_inverse=True, return_counts=True
    )
    boundary = key[counts[inv] == 1]
    boundary = np.unique(boundary, axis=0)
    radii = np.linalg.norm(nodes, axis=1)
    tags = np.full(boundary.shape[0], int(Tag.ROBIN), dtype=np.int8)
    on_trunc = np.abs(radii[boundary] - R_T) < 1e-9 * R_T
    tags[np.all(on_trunc, axis=1)] = int(Tag.ARTIFICIAL)
    if meridian:
        on_axis = np.abs(nodes[boundary][:, :, 0]) < 1e-12 * max(1.0, R_T)
        tags[np.all(on_axis, axis=1)] = int(Tag.AXIS)
    return boundary, tags


# ---------------------------------------------------------------------------
# public builders
# ---------------------------------------------------------------------------

def build_planar_mesh(spec: DomainSpec, h: float, bisector_angle: float = 0.0) -> Mesh:
    """Triangulate a truncated planar sector (2D domain).

    The sector has half-aperture theta about the bisector direction at angle
    ``bisector_angle`` from the +x axis (use theta = pi/4 and bisector
    pi/4 for the quadrant {x > 0, y > 0}).  Both straight sides are Robin;
    the truncation arc is tagged artificial.
    """
    if spec.dimension != 2:
        raise MeshingError("planar meshes require a 2D domain")
    if h <= 0:
        raise MeshingError("target edge length must be positive")
    mesh = _build_section_mesh(spec, h, mirror=True)
    # section coords are (perp, along-bisector); map orientation-preservingly
    # onto the plane with the bisector at the requested angle
    c, s = math.cos(bisector_angle), math.sin(bisector_angle)
    x = mesh.nodes[:, 1] * c + mesh.nodes[:, 0] * s
    y = mesh.nodes[:, 1] * s - mesh.nodes[:, 0] * c
    mesh.nodes = np.stack([x, y], axis=1)
    return mesh


def build_meridian_mesh(spec: DomainSpec, h: float) -> Mesh:
    """Triangulate the meridian half-section of an axisymmetric 3D domain.

    Section coordinates are (r_cyl, z).  The generator (and any perturbation
    of it) is Robin, the truncation arc artificial, the symmetry axis is
    tagged AXIS.
    """
    if spec.dimension != 3:
        raise MeshingError("meridian meshes require a 3D domain")
    if not isinstance(spec.cone.cross_section, LatitudeCircle):
        raise NotAxisymmetric(
            "meridian meshing requires an axisymmetric (latitude-circle) cross-section"
        )
    if h <= 0:
        raise MeshingError("target edge length must be positive")
    return _build_section_mesh(spec, h, mirror=False)


def refine_uniform(mesh: Mesh) -> Mesh:
    """Split every triangle into four via edge midpoints (nested refinement)."""
    nodes = list(mesh.nodes)
    mid_cache: dict = {}

    def midpoint(a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        if key not in mid_cache:
            nodes.append(0.5 * (mesh.nodes[a] + mesh.nodes[b]))
            mid_cache[key] = len(nodes) - 1
        return mid_cache[key]

    tris = []
    for a, b, c in mesh.triangles:
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        tris += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
    edges = []
    tags = []
    for (a, b), t in zip(mesh.boundary_edges, mesh.edge_tags):
        m = midpoint(a, b)
        edges += [(a, m), (m, b)]
        tags += [t, t]
    return Mesh(
        nodes=np.asarray(nodes),
        triangles=np.asarray(tris, dtype=np.int64),
        boundary_edges=np.asarray(edges, dtype=np.int64),
        edge_tags=np.asarray(tags, dtype=np.int8),
        h=mesh.h / 2.0,
        grading={**mesh.grading, "refined": mesh.grading.get("refined", 0) + 1},
        meridian=mesh.meridian,
    )


def save_vtk(mesh: Mesh, path: str) -> None:
    """Write the mesh as legacy ASCII VTK with an integer edge-tag cell field.

    Triangles carry tag 0; boundary line cells carry their Tag value.
    Output is bit-exact for identical meshes.
    """
    with open(path, "w") as f:
        f.write("# vtk DataFile Version 3.0\n")
        f.write("robincone mesh\n")
        f.write("ASCII\n")
        f.write("DATASET UNSTRUCTURED_GRID\n")
        f.write(f"POINTS {mesh.n_nodes} double\n")
        for x, y in mesh.nodes:
            f.write(f"{float(x)!r} {float(y)!r} 0.0\n")
        ntri = mesh.triangles.shape[0]
        nedg = mesh.boundary_edges.shape[0]
        f.write(f"CELLS {ntri + nedg} {4 * ntri + 3 * nedg}\n")
        for a, b, c in mesh.triangles:
            f.write(f"3 {a} {b} {c}\n")
        for a, b in mesh.boundary_edges:
            f.write(f"2 {a} {b}\n")
        f.write(f"CELL_TYPES {ntri + nedg}\n")
        f.write("5\n" * ntri)
        f.write("3\n" * nedg)
        f.write(f"CELL_DATA {ntri + nedg}\n")
        f.write("SCALARS edge_tag int 1\nLOOKUP_TABLE default\n")
        f.write("0\n" * ntri)
        for t in mesh.edge_tags:
            f.write(f"{int(t)}\n")
