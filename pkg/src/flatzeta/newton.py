"""Two-dimensional Newton polyhedra and their singularity invariants.

The polyhedron of a monomial support is the convex hull of the union of
translated positive quadrants; in two dimensions its boundary is a staircase:
finitely many vertices, the compact edges between them, and one noncompact
edge parallel to each axis.  Everything here runs in exact integer/rational
arithmetic: the Newton distance is a rational invariant and acceptance checks
compare it exactly.

Face scaling limits of structured model functions are decided structurally:
a noncompact edge admits its scaling limit precisely when the corresponding
flat-term list is empty, which is an exact criterion for this family (a
numeric t -> 0 limit could not distinguish slow convergence from divergence).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import FlatSupport, NotAdmitted
from .funcmodel import Poly2, SmoothModelFunction

__all__ = [
    "MonomialSupport",
    "Face",
    "NewtonPolyhedron",
    "build_polyhedron",
    "newton_distance",
    "principal_face",
    "adapted_sufficient",
    "is_convenient",
    "gamma_part",
    "in_class_E_hat",
    "VERTEX",
    "COMPACT_EDGE",
    "NONCOMPACT_EDGE",
]

VERTEX = "vertex"
COMPACT_EDGE = "compact-edge"
NONCOMPACT_EDGE = "noncompact-edge"


@dataclass(frozen=True)
class MonomialSupport:
    """A finite set of lattice exponents (duplicates collapse)."""

    points: frozenset[tuple[int, int]]

    def __post_init__(self):
        pts = frozenset((int(a), int(b)) for a, b in self.points)
        for a, b in pts:
            if a < 0 or b < 0:
                raise ValueError(f"support point {(a, b)} outside the positive quadrant")
        object.__setattr__(self, "points", pts)

    @classmethod
    def of(cls, *points) -> "MonomialSupport":
        return cls(frozenset(points))

    @classmethod
    def from_function(cls, f: SmoothModelFunction) -> "MonomialSupport":
        """Taylor support of a model function (flat terms contribute nothing)."""
        return cls(frozenset(f.taylor_support()))


@dataclass(frozen=True)
class Face:
    """A face of the staircase: a vertex, a compact edge, or a noncompact edge.

    ``normal`` is the primitive inward normal (a, b) with gcd 1 and the level
    l such that the face lies on {a*alpha + b*beta = l}; for vertex faces the
    stored normal is a strictly supporting one (it touches the polyhedron only
    at that vertex).
    """

    kind: str
    normal: tuple[int, int]
    level: int
    endpoints: tuple[tuple[int, int], ...]

    def contains_point(self, alpha: Fraction, beta: Fraction) -> bool:
        a, b = self.normal
        if a * alpha + b * beta != self.level:
            return False
        if self.kind == VERTEX:
            return (alpha, beta) == self.endpoints[0]
        if self.kind == COMPACT_EDGE:
            (a1, b1), (a2, b2) = self.endpoints
            return min(a1, a2) <= alpha <= max(a1, a2) and min(b1, b2) <= beta <= max(b1, b2)
        (a1, b1) = self.endpoints[0]
        return alpha >= a1 and beta >= b1 if self.normal == (0, 1) else (
            alpha >= a1 if self.normal[0] == 0 else beta >= b1)

    def lattice_points(self):
        """Lattice points on a compact face (finite by construction)."""
        if self.kind == VERTEX:
            return [self.endpoints[0]]
        if self.kind == NONCOMPACT_EDGE:
            raise ValueError("noncompact edges carry infinitely many lattice points")
        (a1, b1), (a2, b2) = self.endpoints
        da, db = a2 - a1, b2 - b1
        g = math.gcd(abs(da), abs(db))
        step = (da // g, db // g)
        return [(a1 + i * step[0], b1 + i * step[1]) for i in range(g + 1)]


@dataclass(frozen=True)
class NewtonPolyhedron:
    """Vertices and faces of the up-set convex hull (always unbounded)."""

    vertices: tuple[tuple[int, int], ...]
    edges: tuple[Face, ...]

    @property
    def unbounded(self) -> bool:
        return True

    @property
    def vertex_faces(self) -> tuple[Face, ...]:
        out = []
        for i, v in enumerate(self.vertices):
            normals = [e.normal for e in self.edges if v in e.endpoints]
            na = sum(n[0] for n in normals)
            nb = sum(n[1] for n in normals)
            g = math.gcd(na, nb)
            na, nb = na // g, nb // g
            out.append(Face(VERTEX, (na, nb), na * v[0] + nb * v[1], (v,)))
        return tuple(out)

    def contains(self, alpha, beta) -> bool:
        """Membership test: the hull is the intersection of the edge half-planes."""
        alpha = Fraction(alpha)
        beta = Fraction(beta)
        if alpha < 0 or beta < 0:
            return False
        return all(e.normal[0] * alpha + e.normal[1] * beta >= e.level for e in self.edges)


def _prune_dominated(points):
    """Keep the minimal points of the componentwise order."""
    pts = sorted(points)
    keep = []
    for p in pts:
        if not any(q[0] <= p[0] and q[1] <= p[1] and q != p for q in pts):
            keep.append(p)
    return keep


def build_polyhedron(support: MonomialSupport) -> NewtonPolyhedron:
    """Exact staircase hull of the union of translated positive quadrants."""
    if not support.points:
        raise FlatSupport("empty monomial support: the function is flat, no polyhedron")
    minimal = _prune_dominated(support.points)
    minimal.sort()  # alpha ascending; beta strictly descending on an antichain
    # lower-left convex chain: keep only counterclockwise turns
    hull: list[tuple[int, int]] = []
    for p in minimal:
        while len(hull) >= 2:
            o, q = hull[-2], hull[-1]
            cross = (q[0] - o[0]) * (p[1] - o[1]) - (q[1] - o[1]) * (p[0] - o[0])
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    vertices = tuple(hull)
    edges = [Face(NONCOMPACT_EDGE, (1, 0), vertices[0][0], (vertices[0],))]
    for v1, v2 in zip(vertices, vertices[1:]):
        na, nb = v1[1] - v2[1], v2[0] - v1[0]
        g = math.gcd(na, nb)
        na, nb = na // g, nb // g
        edges.append(Face(COMPACT_EDGE, (na, nb), na * v1[0] + nb * v1[1], (v1, v2)))
    edges.append(Face(NONCOMPACT_EDGE, (0, 1), vertices[-1][1], (vertices[-1],)))
    return NewtonPolyhedron(vertices, tuple(edges))


def newton_distance(poly: NewtonPolyhedron) -> Fraction:
    """Exact rational distance: where the diagonal enters the hull."""
    return max(Fraction(e.level, e.normal[0] + e.normal[1]) for e in poly.edges)


def principal_face(poly: NewtonPolyhedron) -> Face:
    """The minimal face containing the diagonal entry point (d, d)."""
    d = newton_distance(poly)
    for face in poly.vertex_faces:
        if face.endpoints[0] == (d, d):
            return face
    for face in poly.edges:
        if face.contains_point(d, d):
            return face
    raise AssertionError("diagonal point missed every boundary face")


def adapted_sufficient(poly: NewtonPolyhedron) -> bool:
    """True when the principal face is a vertex or a noncompact edge.

    This is a sufficient condition only: False means "unknown", because
    adaptedness is defined through a supremum over all coordinate systems
    and no general algorithm is available.
    """
    return principal_face(poly).kind in (VERTEX, NONCOMPACT_EDGE)


def is_convenient(poly: NewtonPolyhedron) -> bool:
    """True when the staircase touches both coordinate axes."""
    touches_alpha = any(v[1] == 0 for v in poly.vertices)
    touches_beta = any(v[0] == 0 for v in poly.vertices)
    return touches_alpha and touches_beta


def _poly_face_part(poly_part: Poly2, face: Face) -> Poly2:
    a, b = face.normal
    sel = []
    for i, j, c in poly_part.terms:
        if a * i + b * j == face.level and face.contains_point(Fraction(i), Fraction(j)):
            sel.append((i, j, c))
    return Poly2(tuple(sel))


def gamma_part(f: SmoothModelFunction, face: Face) -> Poly2:
    """Scaling limit of f along a face weight, when it exists.

    For compact faces and vertices the limit is the monomial sum over the
    face (flat terms scale away under any strictly positive weight).  For the
    model function's noncompact edges the limit exists precisely when the
    corresponding flat-term list is empty; the obstructing term is reported
    otherwise.  The admitted horizontal-edge part is v(x, 0) x^a y^b and the
    vertical one is v(0, y) x^a y^b.
    """
    f = f.pruned()
    taylor_poly = f.unit.shift_monomial(f.a, f.b)
    poly = build_polyhedron(MonomialSupport.from_function(f))
    if face.kind in (VERTEX, COMPACT_EDGE):
        if face.normal[0] <= 0 or face.normal[1] <= 0:
            raise ValueError("compact faces carry strictly positive normals")
        return _poly_face_part(taylor_poly, face)
    if face.kind != NONCOMPACT_EDGE:
        raise ValueError(f"unknown face kind {face.kind!r}")
    if face not in poly.edges:
        raise ValueError("face does not belong to the Newton polyhedron of f")
    if face.normal == (0, 1):
        # horizontal edge beta = b: y-scaling; obstructed by any g-term (j < b)
        if f.g_terms:
            j, factor = f.g_terms[0]
            raise NotAdmitted(face, ("g", j, factor),
                              "flat terms below the edge level diverge under the scaling")
        return f.unit.restrict_y0().shift_monomial(f.a, f.b)
    if face.normal == (1, 0):
        if f.h_terms:
            j, factor = f.h_terms[0]
            raise NotAdmitted(face, ("h", j, factor),
                              "flat terms below the edge level diverge under the scaling")
        return f.unit.restrict_x0().shift_monomial(f.a, f.b)
    raise ValueError(f"unexpected noncompact edge normal {face.normal}")


def in_class_E_hat(f: SmoothModelFunction) -> bool:
    """True when every edge of the polyhedron admits its scaling limit.

    For the structured model family this coincides with having no flat
    perturbation at all (class A).
    """
    poly = build_polyhedron(MonomialSupport.from_function(f))
    for face in poly.edges:
        try:
            gamma_part(f, face)
        except NotAdmitted:
            return False
    return True
