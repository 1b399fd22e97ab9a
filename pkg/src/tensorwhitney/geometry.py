"""Simplices, face frames and trace operators.

A face F with vertices w_0..w_m (in the sorted order of their labels) is
parametrized by ``x = w_0 + sum_a t_a (w_a - w_0)`` over the reference
m-simplex.  Its frame consists of the edge vectors ``w_a - w_0`` followed by
an exact orthogonal basis of the normal space.  Writing
``dx^i = sum_j F[i][j] dalpha^j`` expresses any form in the dual frame;
``dalpha^a`` pulls back to ``dt^a`` for tangent indices and to zero for
normal ones.

A trace is stored as a map ``(t-monomial, I', J') -> coefficient`` where I'
indexes the tangent dual frame (1..m) and J' indexes the full dual frame
(1..m tangent, m+1..n normal).  The number of tangent entries of J' is what
the projections vartheta_q select.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial
from typing import Iterable, Sequence

from . import linalg
from .exterior import ConstForm, increasing_tuples
from .polyspaces import PolyForm, poly_const, poly_mul

Vector = tuple


def _vec(v) -> tuple:
    return tuple(Fraction(x) for x in v)


def _dot(a, b) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


@dataclass(frozen=True)
class Simplex:
    """A simplex with exact vertex coordinates and integer vertex labels.

    Labels identify shared vertices between cells of a mesh; faces always
    list their vertices in increasing label order.
    """

    vertices: tuple
    labels: tuple = None

    def __post_init__(self):
        verts = tuple(_vec(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        labels = tuple(range(len(verts))) if self.labels is None else tuple(self.labels)
        if len(labels) != len(verts) or len(set(labels)) != len(labels):
            raise ValueError("labels must be distinct, one per vertex")
        order = sorted(range(len(verts)), key=lambda i: labels[i])
        object.__setattr__(self, "vertices", tuple(verts[i] for i in order))
        object.__setattr__(self, "labels", tuple(labels[i] for i in order))
        if len({len(v) for v in verts}) != 1:
            raise ValueError("vertices have different lengths")
        if self.dim > self.n:
            raise ValueError("too many vertices for the ambient space")
        if self.dim > 0:
            edges = [[a - b for a, b in zip(v, self.vertices[0])] for v in self.vertices[1:]]
            if linalg.bareiss_rank(edges) != self.dim:
                raise ValueError("degenerate simplex: vertices are affinely dependent")

    @classmethod
    def reference(cls, n: int) -> "Simplex":
        from .polyspaces import reference_vertices

        return cls(reference_vertices(n))

    @property
    def n(self) -> int:
        return len(self.vertices[0])

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def faces(self, m: int) -> list["Simplex"]:
        """All m-dimensional faces, C(dim + 1, m + 1) of them, in lexicographic order."""
        return [self.face(idx) for idx in combinations(range(self.dim + 1), m + 1)]

    def all_faces(self) -> list["Simplex"]:
        return [f for m in range(self.dim + 1) for f in self.faces(m)]

    def face(self, local: Sequence[int]) -> "Simplex":
        local = tuple(local)
        return Simplex(tuple(self.vertices[i] for i in local), tuple(self.labels[i] for i in local))

    def face_by_labels(self, labels: Sequence[int]) -> "Simplex":
        pos = {lab: i for i, lab in enumerate(self.labels)}
        return self.face(sorted(pos[lab] for lab in labels))

    def local_indices(self, face: "Simplex") -> tuple:
        pos = {lab: i for i, lab in enumerate(self.labels)}
        return tuple(pos[lab] for lab in face.labels)

    def contains(self, face: "Simplex") -> bool:
        return set(face.labels) <= set(self.labels)

    @property
    def key(self) -> tuple:
        return self.labels


@dataclass(frozen=True)
class FaceFrame:
    """Tangent and normal frame of a face together with dual data and Gram blocks."""

    face: Simplex
    tangent: tuple
    normal: tuple
    matrix: tuple = field(repr=False)  # n x n, columns are the frame vectors
    dual: tuple = field(repr=False)  # rows are the dual 1-forms
    gram_tangent: tuple = field(repr=False)
    gram_normal: tuple = field(repr=False)
    gram_inverse: tuple = field(repr=False)

    @property
    def m(self) -> int:
        return len(self.tangent)

    @property
    def n(self) -> int:
        return self.face.n

    def cross_gram(self) -> list[list[Fraction]]:
        return [[_dot(t, v) for v in self.normal] for t in self.tangent]


def _orthogonal_complement(tangent: list, n: int) -> list:
    ortho: list = []
    for t in tangent:
        w = list(t)
        for q in ortho:
            c = _dot(w, q) / _dot(q, q)
            w = [a - c * b for a, b in zip(w, q)]
        ortho.append(w)
    normals = []
    for i in range(n):
        if len(normals) == n - len(tangent):
            break
        w = [Fraction(int(j == i)) for j in range(n)]
        for q in ortho + normals:
            c = _dot(w, q) / _dot(q, q)
            if c:
                w = [a - c * b for a, b in zip(w, q)]
        if any(w):
            normals.append(w)
    return normals


@lru_cache(maxsize=None)
def frame(face: Simplex, origin: int = 0) -> FaceFrame:
    """Frame of a face: edge vectors out of vertex ``origin`` (default the lowest label).

    The normal block is the Gram-Schmidt residual of the standard basis
    against the tangent block, unnormalized so everything stays rational.
    """
    n, m = face.n, face.dim
    verts = face.vertices
    others = [i for i in range(m + 1) if i != origin]
    tangent = [tuple(a - b for a, b in zip(verts[i], verts[origin])) for i in others]
    normal = [tuple(v) for v in _orthogonal_complement(tangent, n)]
    if len(normal) != n - m:
        raise ValueError("degenerate face")
    cols = tangent + normal
    mat = tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))
    dual = tuple(tuple(r) for r in linalg.inverse(mat))
    gram = [[_dot(a, b) for b in cols] for a in cols]
    ginv = linalg.inverse(gram) if n else []
    return FaceFrame(
        face,
        tuple(tangent),
        tuple(normal),
        mat,
        dual,
        tuple(tuple(gram[i][j] for j in range(m)) for i in range(m)),
        tuple(tuple(gram[i][j] for j in range(m, n)) for i in range(m, n)),
        tuple(tuple(r) for r in ginv),
    )


# ---------------------------------------------------------------------------
# Trace values


@dataclass(frozen=True, eq=False)
class TraceValue:
    """Restriction data of a form-valued form to a face.

    ``components`` maps ``(t-monomial, I', J')`` to exact coefficients.  I'
    indexes the tangent dual frame (the first slot is always pulled back);
    J' indexes the full dual frame, tangent indices 1..m before normal ones.
    """

    face: Simplex
    k: int
    l: int
    components: dict

    def __post_init__(self):
        object.__setattr__(self, "components", {key: v for key, v in self.components.items() if v})

    @property
    def m(self) -> int:
        return self.face.dim

    def tangential_count(self, J: tuple) -> int:
        return sum(1 for j in J if j <= self.m)

    def block(self, q: int) -> "TraceValue":
        """The part with exactly q tangential entries in the second slot."""
        return self.select({q})

    def select(self, qs: Iterable[int]) -> "TraceValue":
        qs = set(qs)
        comp = {key: v for key, v in self.components.items() if self.tangential_count(key[2]) in qs}
        return TraceValue(self.face, self.k, self.l, comp)

    def blocks(self) -> dict:
        out: dict = {}
        for key, v in self.components.items():
            out.setdefault(self.tangential_count(key[2]), {})[key] = v
        return {q: TraceValue(self.face, self.k, self.l, c) for q, c in sorted(out.items())}

    def __add__(self, other: "TraceValue") -> "TraceValue":
        out = dict(self.components)
        for key, v in other.components.items():
            out[key] = out.get(key, 0) + v
        return TraceValue(self.face, self.k, self.l, out)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TraceValue)
            and self.face.labels == other.face.labels
            and self.face.vertices == other.face.vertices
            and (self.k, self.l) == (other.k, other.l)
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.face.labels, self.k, self.l, frozenset(self.components.items())))

    def is_zero(self) -> bool:
        return not self.components

    def to_polyform(self) -> PolyForm:
        """View a fully tangential trace as a polynomial form on R^m (t-coordinates)."""
        m = self.m
        if any(j > m for _, _, J in self.components for j in J):
            raise ValueError("trace has normal components")
        return PolyForm(m, self.k, self.l, dict(self.components))


class _FaceCache:
    """Per-face substitution tables: polynomials in t and frame minors."""

    def __init__(self, face: Simplex, origin: int = 0):
        self.face = face
        self.fr = frame(face, origin)
        n, m = face.n, face.dim
        self.n, self.m = n, m
        w0 = face.vertices[origin]
        # x_i = w0_i + sum_a t_a tangent_a[i]
        self.coord = []
        for i in range(n):
            p = poly_const(m, w0[i])
            for a in range(m):
                c = self.fr.tangent[a][i]
                if c:
                    e = tuple(int(b == a) for b in range(m))
                    p[e] = p.get(e, 0) + c
            self.coord.append({k: v for k, v in p.items() if v})
        self.powers: dict = {}
        self.monos: dict = {}
        self.minors: dict = {}

    def power(self, i: int, e: int):
        key = (i, e)
        if key not in self.powers:
            self.powers[key] = poly_const(self.m, 1) if e == 0 else poly_mul(self.power(i, e - 1), self.coord[i])
        return self.powers[key]

    def mono(self, mono: tuple):
        if mono not in self.monos:
            p = poly_const(self.m, 1)
            for i, e in enumerate(mono):
                if e:
                    p = poly_mul(p, self.power(i, e))
            self.monos[mono] = p
        return self.monos[mono]

    def form(self, I: tuple, tangential_only: bool) -> dict:
        """Coefficients of dx^I in the dual frame: ``{I': det F[I, I']}``."""
        key = (I, tangential_only)
        if key not in self.minors:
            top = self.m if tangential_only else self.n
            out = {}
            for Ip in combinations(range(1, top + 1), len(I)):
                d = linalg.bareiss_det([[self.fr.matrix[i - 1][j - 1] for j in Ip] for i in I]) if I else Fraction(1)
                if d:
                    out[Ip] = d
            self.minors[key] = out
        return self.minors[key]


@lru_cache(maxsize=4096)
def face_cache(face: Simplex, origin: int = 0) -> _FaceCache:
    return _FaceCache(face, origin)


def restrict(face: Simplex, omega, second: str = "rho", origin: int = 0) -> TraceValue:
    """Pull back the first slot to ``face``; the second slot is pulled back
    (``second='iota'``) or kept in full (``second='rho'``), in dual-frame coordinates.
    """
    if isinstance(omega, ConstForm):
        omega = PolyForm.from_const(omega)
    fc = face_cache(face, origin)
    tang2 = second == "iota"
    # sum the substituted coefficient polynomial of each dx^I (x) dx^J first
    grouped: dict = {}
    for (mono, I, J), v in omega.terms.items():
        if not fc.form(I, True):
            continue
        acc = grouped.setdefault((I, J), {})
        for tm, w in fc.mono(mono).items():
            acc[tm] = acc.get(tm, 0) + v * w
    out: dict = {}
    for (I, J), poly in grouped.items():
        poly = [(tm, c) for tm, c in poly.items() if c]
        if not poly:
            continue
        fJ = fc.form(J, tang2)
        for Ip, a in fc.form(I, True).items():
            for Jp, b in fJ.items():
                ab = a * b
                for tm, c in poly:
                    key = (tm, Ip, Jp)
                    out[key] = out.get(key, 0) + ab * c
    return TraceValue(face, omega.k, omega.l, out)


def iota_star(face: Simplex, omega) -> TraceValue:
    """Pullback of the form slot; for a (k, l)-form the values are kept in full."""
    return restrict(face, omega, "rho")


def rho_star(face: Simplex, omega) -> TraceValue:
    """Restriction of a scalar form to the face without pulling back (all frame directions)."""
    if isinstance(omega, ConstForm):
        omega = PolyForm.from_const(omega)
    swapped = _swap_slots(omega)
    tv = restrict(face, swapped, "rho")
    return tv


def _swap_slots(omega: PolyForm) -> PolyForm:
    """Move a scalar k-form into the second slot of a (0, k)-form."""
    if omega.l != 0:
        raise ValueError("slot operations act on scalar forms; use double_trace for (k, l)-forms")
    return PolyForm(omega.n, 0, omega.k, {(m, (), I): v for (m, I, _), v in omega.terms.items()})


def vartheta(face: Simplex, q: int, omega) -> TraceValue:
    """The block of a scalar k-form with q tangential and k - q normal slots.

    The form is viewed as a (0, k)-form so that the tangential count is read
    off the second index of the trace components.
    """
    if isinstance(omega, ConstForm):
        omega = PolyForm.from_const(omega)
    k = omega.k
    if q < 0 or q > min(k, face.dim):
        return TraceValue(face, 0, k, {})
    return rho_star(face, omega).block(q)


def jstar_qs(m: int, p: int) -> set:
    return set(range(max(0, m - p + 1), m + 1))


def jstar_p(face: Simplex, p: int, omega) -> TraceValue:
    """jstar_[p] = vartheta_m + ... + vartheta_{m-p+1} for a scalar form on an m-face."""
    if p < 1:
        raise ValueError("p must be at least 1")
    if isinstance(omega, ConstForm):
        omega = PolyForm.from_const(omega)
    return rho_star(face, omega).select(jstar_qs(face.dim, p))


def double_trace(face: Simplex, kind: str, omega, p: int = 1) -> TraceValue:
    """iota* on the first slot and iota* (``kind='ii'``) or jstar_[p] (``kind='ij'``) on the second."""
    if kind == "ii":
        return restrict(face, omega, "iota")
    if kind in ("ij", "ijp"):
        return restrict(face, omega, "rho").select(jstar_qs(face.dim, p))
    raise ValueError(f"unknown trace kind {kind!r}")


# ---------------------------------------------------------------------------
# Exact pairing over a face


@lru_cache(maxsize=None)
def simplex_moment(alpha: tuple) -> Fraction:
    """Average of t^alpha over the reference m-simplex, m = len(alpha)."""
    m = len(alpha)
    num = factorial(m)
    for a in alpha:
        num *= factorial(a)
    return Fraction(num, factorial(sum(alpha) + m))


@lru_cache(maxsize=None)
def _gram_minors(ginv: tuple, rows: tuple, size: int) -> dict:
    """Entries det(G^{-1}[A, B]) for index sets A, B drawn from ``rows`` (1-based)."""
    sets = list(combinations(rows, size))
    out = {}
    for A in sets:
        for B in sets:
            d = linalg.bareiss_det([[ginv[a - 1][b - 1] for b in B] for a in A]) if size else Fraction(1)
            if d:
                out[(A, B)] = d
    return out


@dataclass(frozen=True, eq=False)
class TestForm:
    """A Gram-weighted test function on a face, ready for pairing with traces."""

    face: Simplex
    groups: dict  # (I', J') -> tuple of (t-monomial, weighted coefficient)

    def pair(self, trace: TraceValue) -> Fraction:
        total = Fraction(0)
        for (tm, I, J), v in trace.components.items():
            g = self.groups.get((I, J))
            if not g:
                continue
            for tm2, c in g:
                total += v * c * simplex_moment(tuple(a + b for a, b in zip(tm, tm2)))
        return total


def make_test(face: Simplex, components: dict, weighted: bool = True) -> TestForm:
    """Turn components ``(t-monomial, I', J') -> c`` on ``face`` into a TestForm.

    The weighting applies the inverse frame Gram matrix to both slots, so the
    pairing is the L2 product of the forms with respect to the Euclidean
    metric and the normalized face measure.
    """
    fr = frame(face)
    m, n = face.dim, face.n
    weighted_comp: dict = {}
    if weighted:
        ginv = fr.gram_inverse
        for (tm, I, J), c in components.items():
            gk = _gram_minors(ginv, tuple(range(1, m + 1)), len(I))
            gl = _gram_minors(ginv, tuple(range(1, n + 1)), len(J))
            for (A, B), x in gk.items():
                if B != I:
                    continue
                for (C, D), y in gl.items():
                    if D != J:
                        continue
                    key = (tm, A, C)
                    weighted_comp[key] = weighted_comp.get(key, 0) + c * x * y
    else:
        weighted_comp = dict(components)
    groups: dict = {}
    for (tm, I, J), c in weighted_comp.items():
        if c:
            groups.setdefault((I, J), []).append((tm, c))
    return TestForm(face, {key: tuple(v) for key, v in groups.items()})


def pairing(trace: TraceValue, test_components: dict, weighted: bool = True) -> Fraction:
    """Exact pairing of a trace with test components on the same face."""
    return make_test(trace.face, test_components, weighted).pair(trace)


def intrinsic_components(form: PolyForm, m: int) -> dict:
    """Components of a form on R^m (t-coordinates) in trace-key format."""
    if form.n != m:
        raise ValueError("form does not live on the face's reference space")
    return dict(form.terms)
