"""Simplicial meshes, face counts and the dimension audits built on them.

A mesh document is YAML (or JSON, which YAML reads as well)::

    dim: 2
    vertices:            # optional; rows of integers or "p/q" strings
      - [0, 0]
      - [1, 0]
      - [0, 1]
    cells:
      - [0, 1, 2]

Without ``vertices`` the complex is purely combinatorial, which is enough
for every counting routine here (spheres used in Dehn-Sommerville checks are
not embedded in R^dim).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from pathlib import Path

import yaml

from . import linalg
from .bgg_ops import binom
from .elements import dof_table
from .polyspaces import reference_vertices


class MeshError(ValueError):
    """Raised for malformed or non-manifold mesh documents."""


def _rational(x) -> Fraction:
    if isinstance(x, bool):
        raise MeshError(f"bad coordinate {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            raise MeshError(f"bad coordinate {x!r}; use integers or 'p/q' strings") from None
    if isinstance(x, Fraction):
        return x
    raise MeshError(f"bad coordinate {x!r}; floats are not accepted, use 'p/q' strings")


@dataclass
class SimplicialComplex:
    """A pure simplicial complex given by its top cells.

    Faces are sorted vertex tuples.  A face is on the boundary when it lies
    in some (dim-1)-face that belongs to exactly one top cell.
    """

    dim: int
    cells: tuple
    vertices: tuple | None = None
    name: str = ""
    num_vertices: int = field(default=0)

    def __post_init__(self):
        cells = [tuple(sorted(int(v) for v in c)) for c in self.cells]
        if not cells:
            raise MeshError("a mesh needs at least one cell")
        if self.dim < 0:
            raise MeshError("dim must be nonnegative")
        for c in cells:
            if len(c) != self.dim + 1:
                raise MeshError(f"cell {c} has {len(c)} vertices; dim {self.dim} needs {self.dim + 1}")
            if len(set(c)) != len(c):
                raise MeshError(f"cell {c} repeats a vertex")
            if c[0] < 0:
                raise MeshError(f"cell {c} has a negative vertex index")
        if len(set(cells)) != len(cells):
            dup = next(c for c in cells if cells.count(c) > 1)
            raise MeshError(f"duplicate cell {dup}")
        self.cells = tuple(cells)
        top = max(max(c) for c in cells) + 1
        if self.vertices is not None:
            verts = tuple(tuple(_rational(x) for x in v) for v in self.vertices)
            if len(verts) < top:
                raise MeshError(f"cells refer to vertex {top - 1} but only {len(verts)} vertices are given")
            if any(len(v) != self.dim for v in verts):
                raise MeshError(f"every vertex needs {self.dim} coordinates")
            self.vertices = verts
            for c in cells:
                rows = [[Fraction(1)] + list(verts[i]) for i in c]
                if linalg.bareiss_det(rows) == 0:
                    raise MeshError(f"cell {c} is affinely degenerate")
            self.num_vertices = len(verts)
        else:
            self.num_vertices = max(self.num_vertices, top)
        if self.dim >= 1:
            for facet, owners in self._facet_owners.items():
                if len(owners) > 2:
                    raise MeshError(f"face {facet} is shared by {len(owners)} cells (non-manifold)")

    # -- face lattice -------------------------------------------------------

    @cached_property
    def faces_by_dim(self) -> tuple:
        out = [set() for _ in range(self.dim + 1)]
        for c in self.cells:
            for m in range(self.dim + 1):
                out[m].update(combinations(c, m + 1))
        return tuple(tuple(sorted(s)) for s in out)

    def faces(self, m: int) -> tuple:
        return self.faces_by_dim[m] if 0 <= m <= self.dim else ()

    @cached_property
    def _facet_owners(self) -> dict:
        owners: dict = {}
        for i, c in enumerate(self.cells):
            for f in combinations(c, self.dim):
                owners.setdefault(f, []).append(i)
        return owners

    @cached_property
    def boundary_facets(self) -> tuple:
        if self.dim == 0:
            return ()
        return tuple(sorted(f for f, o in self._facet_owners.items() if len(o) == 1))

    @cached_property
    def boundary_faces(self) -> frozenset:
        out = set()
        for f in self.boundary_facets:
            for m in range(len(f)):
                out.update(combinations(f, m + 1))
        return frozenset(out)

    def is_interior(self, face: tuple) -> bool:
        return tuple(sorted(face)) not in self.boundary_faces

    def interior_faces(self, m: int) -> tuple:
        return tuple(f for f in self.faces(m) if f not in self.boundary_faces)

    @property
    def f_vector(self) -> tuple:
        return tuple(len(self.faces(m)) for m in range(self.dim + 1))

    @property
    def interior_f_vector(self) -> tuple:
        return tuple(len(self.interior_faces(m)) for m in range(self.dim + 1))

    @property
    def boundary_f_vector(self) -> tuple:
        return tuple(a - b for a, b in zip(self.f_vector, self.interior_f_vector))

    def boundary(self) -> "SimplicialComplex":
        """The boundary as a (dim-1)-complex (combinatorial)."""
        if not self.boundary_facets:
            raise MeshError("the complex has no boundary")
        return SimplicialComplex(self.dim - 1, self.boundary_facets, name=f"boundary of {self.name}".strip(), num_vertices=self.num_vertices)

    def euler_characteristic(self) -> int:
        return sum((-1) ** m * f for m, f in enumerate(self.f_vector))

    def to_document(self) -> dict:
        doc = {"dim": self.dim, "cells": [list(c) for c in self.cells]}
        if self.name:
            doc = {"name": self.name, **doc}
        if self.vertices is not None:
            doc["vertices"] = [[str(x) for x in v] for v in self.vertices]
        return doc


def load_complex(source) -> SimplicialComplex:
    """Read a mesh from a path, a YAML/JSON string, or an already parsed mapping."""
    if isinstance(source, dict):
        doc = source
    else:
        text = None
        if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source and Path(source).is_file()):
            text = Path(source).read_text()
        else:
            text = str(source)
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise MeshError(f"could not parse mesh document: {exc}") from None
    if not isinstance(doc, dict):
        raise MeshError("a mesh document must be a mapping with 'dim' and 'cells'")
    for key in ("dim", "cells"):
        if key not in doc:
            raise MeshError(f"mesh document is missing '{key}'")
    try:
        cells = [tuple(int(v) for v in c) for c in doc["cells"]]
    except (TypeError, ValueError):
        raise MeshError("cells must be lists of integer vertex indices") from None
    return SimplicialComplex(int(doc["dim"]), tuple(cells), doc.get("vertices"), str(doc.get("name", "")))


def dump_complex(cx: SimplicialComplex, fmt: str = "yaml") -> str:
    doc = cx.to_document()
    if fmt == "json":
        return json.dumps(doc, indent=2)
    return yaml.safe_dump(doc, sort_keys=False)


# ---------------------------------------------------------------------------
# Sample meshes


def single_simplex(n: int) -> SimplicialComplex:
    return SimplicialComplex(n, (tuple(range(n + 1)),), reference_vertices(n), f"simplex{n}")


def two_cell_patch_mesh(n: int) -> SimplicialComplex:
    """Reference simplex plus a neighbour across the facet opposite the origin."""
    verts = list(reference_vertices(n)) + [tuple(Fraction(1) + Fraction(i + 1, 3) for i in range(n))]
    return SimplicialComplex(n, (tuple(range(n + 1)), tuple(range(1, n + 2))), tuple(verts), f"patch{n}")


def cone_over_boundary(cx: SimplicialComplex, apex=None) -> SimplicialComplex:
    """Join a new vertex to every boundary facet.

    For a single simplex with its centroid as apex this is the Alfeld
    split, a ball with one interior vertex.  Coordinates are kept only when
    ``apex`` is given (or the complex is one simplex, where the centroid is used).
    """
    new = cx.num_vertices
    cells = tuple(tuple(f) + (new,) for f in cx.boundary_facets)
    if cx.vertices is not None and (apex is not None or len(cx.cells) == 1):
        if apex is None:
            c = cx.cells[0]
            apex = tuple(sum(cx.vertices[i][a] for i in c) / len(c) for a in range(cx.dim))
        verts = tuple(cx.vertices) + (tuple(_rational(x) if not isinstance(x, Fraction) else x for x in apex),)
        return SimplicialComplex(cx.dim, cells, verts, f"cone({cx.name})")
    return SimplicialComplex(cx.dim, cells, name=f"cone({cx.name})", num_vertices=new + 1)


def closed_cone(cx: SimplicialComplex) -> SimplicialComplex:
    """T together with the cone over its boundary: a closed complex with f^C_i = f_i + f^bd_{i-1}."""
    new = cx.num_vertices
    cells = tuple(cx.cells) + tuple(tuple(f) + (new,) for f in cx.boundary_facets)
    return SimplicialComplex(cx.dim, cells, name=f"closed cone({cx.name})", num_vertices=new + 1)


def simplex_boundary(d: int) -> SimplicialComplex:
    """Boundary of the (d+1)-simplex, a d-sphere."""
    return SimplicialComplex(d, tuple(combinations(range(d + 2), d + 1)), name=f"boundary of simplex{d + 1}")


def cross_polytope_boundary(d: int) -> SimplicialComplex:
    """Boundary of the (d+1)-dimensional cross-polytope; d = 2 is the octahedron."""
    cells = []
    for signs in range(2 ** (d + 1)):
        cells.append(tuple(2 * a + ((signs >> a) & 1) for a in range(d + 1)))
    return SimplicialComplex(d, tuple(cells), name="octahedron" if d == 2 else f"cross-polytope boundary {d}")


def octahedron() -> SimplicialComplex:
    return cross_polytope_boundary(2)


def sample_meshes(n: int) -> list[SimplicialComplex]:
    """The three contractible meshes used by the Euler audit."""
    return [single_simplex(n), two_cell_patch_mesh(n), cone_over_boundary(single_simplex(n))]


# ---------------------------------------------------------------------------
# Counting


@dataclass(frozen=True)
class DofCount:
    total: int
    per_dimension: tuple  # total over all faces of each dimension
    per_face: tuple  # count on a single face of each dimension


def global_dof_count(cx: SimplicialComplex, family: str, k: int, l: int, p: int = 1, r: int = 1, poly: str = "minus", q=None) -> DofCount:
    """Sum of per-face DoF counts over all faces, boundary included."""
    table = dof_table(family, cx.dim, k, l, p, r, poly, q)
    per_dim = tuple(table[m] * f for m, f in enumerate(cx.f_vector))
    return DofCount(sum(per_dim), per_dim, tuple(table))


def distribution_face_count(n: int, k: int, l: int, p: int) -> int:
    """Deltas attached to one interior (n-k)-face: sum_{s<p} C(n-k, s) C(k, k-l+s)."""
    return sum(binom(n - k, s) * binom(k, k - l + s) for s in range(p))


@dataclass(frozen=True)
class DistributionCount:
    total: int
    face_dim: int
    interior_faces: int
    per_face: int


def distribution_dim(cx: SimplicialComplex, k: int, l: int, p: int = 1) -> DistributionCount:
    """Dimension of the distributional space of (k, l) type, counted on interior (n-k)-faces.

    The components Alt^{n-k-s}(sigma) (x) Alt^{k-l+s}(sigma-perp), s < p,
    sit on every interior face of dimension n - k.  Needs k >= l - p + 1.
    """
    n = cx.dim
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, {n}]")
    if k < l - p + 1:
        raise ValueError(f"distributional spaces need k >= l - p + 1 (got k={k}, l={l}, p={p})")
    faces = len(cx.interior_faces(n - k))
    per = distribution_face_count(n, k, l, p)
    return DistributionCount(faces * per, n - k, faces, per)


@dataclass(frozen=True)
class EulerAudit:
    mesh: str
    n: int
    l: int
    p: int
    fe_dims: tuple
    dist_dims: tuple
    lhs: int
    rhs: int
    residual: int
    skeletal_lhs: int
    skeletal_rhs: int
    skeletal_residual: int

    @property
    def ok(self) -> bool:
        return self.residual == 0 and self.skeletal_residual == 0

    def row(self) -> list:
        return [self.mesh, self.n, self.l, self.p, self.lhs, self.rhs, self.residual, self.skeletal_residual, "PASS" if self.ok else "FAIL"]


def euler_valid(n: int, l: int, p: int) -> bool:
    return p >= 1 and l >= 0 and l + p <= n


def skeletal_identity(f: tuple, f_int: tuple, n: int, l: int, p: int) -> tuple[int, int]:
    """Both sides of the skeletal count identity with k = l + p, from f-vectors alone."""
    k = l + p
    fv = lambda v, t: v[t] if 0 <= t < len(v) else 0
    lhs = 0
    for s in range(p):
        lhs += sum((-1) ** t * binom(t, s) * binom(n - t, n - l - s) * fv(f, t) for t in range(k + 1))
        lhs += (-1) ** (n + p - 1) * sum((-1) ** t * binom(t, s) * binom(n - t, k - s) * fv(f_int, t) for t in range(n - l + 1))
    rhs = binom(n, l) + (-1) ** (p - 1) * binom(n, k)
    return lhs, rhs


def euler_audit(cx: SimplicialComplex, l: int, p: int = 1) -> EulerAudit:
    """Euler characteristic of the discrete sequence against the smooth one.

    The finite element part runs over theta = 0..l+p-1 with the skeletal
    lowest-order W_[p] spaces, the distributional part over
    theta = 0..n-l-1 with (n - theta, l + p) deltas.  The mesh must
    triangulate a contractible domain; this is not checked.
    """
    n = cx.dim
    if not euler_valid(n, l, p):
        raise ValueError(f"the Euler audit needs p >= 1 and l + p <= n (got l={l}, p={p}, n={n})")
    fe = tuple(global_dof_count(cx, "ijp_W", t, l, p, 1).total for t in range(l + p))
    dist = tuple(distribution_dim(cx, n - t, l + p, p).total for t in range(n - l))
    raw = sum((-1) ** t * d for t, d in enumerate(fe)) + sum((-1) ** (n + p - 1 + t) * d for t, d in enumerate(dist))
    lhs = (-1) ** (p - 1) * raw
    rhs = binom(n, l + p) + (-1) ** (p - 1) * binom(n, l)
    sl, sr = skeletal_identity(cx.f_vector, cx.interior_f_vector, n, l, p)
    return EulerAudit(cx.name, n, l, p, fe, dist, lhs, rhs, lhs - rhs, sl, sr, sl - sr)


def _sign(e: int) -> int:
    return -1 if e % 2 else 1


@dataclass(frozen=True)
class DehnSommervilleAudit:
    mesh: str
    d: int
    p: int
    lhs: int
    rhs: int

    @property
    def residual(self) -> int:
        return self.lhs - self.rhs


def dehn_sommerville_audit(sphere: SimplicialComplex, d: int | None = None, p: int = 0) -> DehnSommervilleAudit:
    """Dehn-Sommerville relation for a simplicial d-sphere (boundary of a (d+1)-polytope).

    With D = d + 1 and f_{-1} = 1:
    sum_{i=-1}^{p-1} (-1)^{D+i} C(D-i-1, D-p) f_i = sum_{i=-1}^{D-p-1} (-1)^i C(D-i-1, p) f_i.
    """
    d = sphere.dim if d is None else d
    if d != sphere.dim:
        raise ValueError(f"the complex has dimension {sphere.dim}, not {d}")
    D = d + 1
    if not 0 <= p <= D:
        raise ValueError(f"p must lie in [0, {D}]")
    f = {-1: 1, **{i: v for i, v in enumerate(sphere.f_vector)}}
    lhs = sum(_sign(D + i) * binom(D - i - 1, D - p) * f.get(i, 0) for i in range(-1, p))
    rhs = sum(_sign(i) * binom(D - i - 1, p) * f.get(i, 0) for i in range(-1, D - p))
    return DehnSommervilleAudit(sphere.name, d, p, lhs, rhs)
