"""Bubble spaces of form-valued forms.

For a full-dimensional simplex K the bubbles of P Lambda^{k,l}(K) are the
forms whose double pullback vanishes on every proper face.  They decompose as

    sum over faces tau of K:  span(scalar basis forms attributed to tau) (x) N^l(tau, K)

where N^l(tau, K) is spanned by ``dlambda_{K minus tau} ^ dlambda_{J'}`` with
J' inside tau minus its first vertex.  Both this structural basis and the
definitional nullspace of the trace constraints are provided so that each can
check the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from . import linalg
from .bgg_ops import binom
from .exterior import ConstForm, increasing_tuples, wedge
from .geometry import Simplex, iota_star, restrict
from .polyspaces import (
    PolyForm,
    apply_S_dagger,
    coefficient_matrix,
    combine,
    dim_bubble,
    dlambda_wedge,
    kernel_coefficients,
    key_index,
    reference_vertices,
    scalar_basis,
    tensor_basis,
)

_FAMILY_ALIASES = {
    "minus": "minus",
    "Pminus": "minus",
    "Pr_minus": "minus",
    "full": "full",
    "Pr": "full",
}


def poly_kind(family: str) -> str:
    try:
        return _FAMILY_ALIASES[family]
    except KeyError:
        raise ValueError(f"unknown polynomial family {family!r}") from None


@dataclass(frozen=True)
class BubbleBasis:
    """Bubble forms on a simplex K (given in K's own ambient coordinates)."""

    face: Simplex
    family: str
    k: int
    l: int
    p: int
    r: int
    symmetric: bool
    basis: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)


def _check_full(K: Simplex):
    if K.dim != K.n:
        raise ValueError("bubbles are computed on a full-dimensional simplex; pass the face in its own coordinates")


def n_space(sigma: Simplex, K: Simplex, l: int) -> list[ConstForm]:
    """Constant l-forms on K whose pullback vanishes on every facet of K containing sigma.

    Returned as scalar forms of degree (l, 0).  The dimension is
    C(dim sigma, l + dim sigma - dim K).
    """
    _check_full(K)
    n = K.n
    loc = K.local_indices(sigma)
    rest = [i for i in range(n + 1) if i not in loc]
    need = l - len(rest)
    if need < 0:
        return []
    pool = loc[1:]
    out = []
    for Jp in combinations(pool, need):
        out.append(dlambda_wedge(K.vertices, tuple(rest) + Jp))
    return out


def n_space_nullspace(sigma: Simplex, K: Simplex, l: int) -> list[ConstForm]:
    """Definitional N^l(sigma, K): kernel of all facet pullbacks through sigma."""
    _check_full(K)
    n = K.n
    loc = set(K.local_indices(sigma))
    tuples = [tuple(J) for J in increasing_tuples(n, l)]
    basis = [ConstForm(n, l, 0, {(J, ()): 1}) for J in tuples]
    constraints = []
    for i in range(n + 1):
        if i in loc:
            continue
        facet = K.face([j for j in range(n + 1) if j != i])
        traces = [restrict(facet, b, "rho") for b in basis]
        keys = sorted({key for t in traces for key in t.components})
        for key in keys:
            constraints.append([t.components.get(key, Fraction(0)) for t in traces])
    if not constraints:
        return basis
    kernel = linalg.nullspace(constraints, len(basis))
    return [ConstForm(n, l, 0, {(J, ()): c for J, c in zip(tuples, v)}) for v in kernel]


def _structural(K: Simplex, poly: str, k: int, l: int, r: int) -> list[PolyForm]:
    n = K.n
    scal = scalar_basis(poly, n, r, k, K.vertices)
    nspaces: dict = {}
    out = []
    for a in scal:
        tau = a.face
        if tau not in nspaces:
            nspaces[tau] = n_space(K.face(tau), K, l)
        for nu in nspaces[tau]:
            out.append(a.form.tensor(nu))
    return out


def bubble_basis(K: Simplex, family: str, k: int, l: int, p: int = 1, r: int = 1) -> BubbleBasis:
    """Structural basis of the Alt bubbles of P Lambda^{k,l}(K); ``p`` is recorded only."""
    _check_full(K)
    poly = poly_kind(family)
    return BubbleBasis(K, poly, k, l, p, r, False, tuple(_structural(K, poly, k, l, r)))


def bubble_nullspace(K: Simplex, family: str, k: int, l: int, r: int = 1) -> list[PolyForm]:
    """Definitional bubbles: forms in P Lambda^{k,l}(K) with vanishing double pullback on every facet."""
    _check_full(K)
    poly = poly_kind(family)
    n = K.n
    basis = tensor_basis(poly, n, r, k, l, K.vertices)
    rows = []
    for i in range(n + 1):
        facet = K.face([j for j in range(n + 1) if j != i])
        traces = [restrict(facet, b, "iota") for b in basis]
        keys = sorted({key for t in traces for key in t.components})
        for key in keys:
            rows.append([t.components.get(key, Fraction(0)) for t in traces])
    if not rows:
        return list(basis)
    return [combine(basis, c) for c in linalg.nullspace(rows, len(basis))]


def span_equal(a: list[PolyForm], b: list[PolyForm]) -> bool:
    """Whether two lists of forms span the same space."""
    if not a and not b:
        return True
    index = key_index(list(a) + list(b))
    ra = linalg.bareiss_rank(coefficient_matrix(a, index)[0]) if a else 0
    rb = linalg.bareiss_rank(coefficient_matrix(b, index)[0]) if b else 0
    rab = linalg.bareiss_rank(coefficient_matrix(list(a) + list(b), index)[0])
    return ra == rb == rab


def bubble_W_basis(K: Simplex, k: int, l: int, p: int = 1, r: int = 1, family: str = "minus") -> BubbleBasis:
    """Kernel of S-dagger_[p] inside the Alt bubbles of K."""
    alt = bubble_basis(K, family, k, l, p, r)
    forms = list(alt.basis)
    if not forms:
        return BubbleBasis(K, alt.family, k, l, p, r, True, ())
    if k - p < 0 or l + p > K.n:
        return BubbleBasis(K, alt.family, k, l, p, r, True, tuple(forms))
    coeffs = kernel_coefficients(forms, lambda f: apply_S_dagger(f, p))
    return BubbleBasis(K, alt.family, k, l, p, r, True, tuple(combine(forms, c) for c in coeffs))


def s_dagger_rank_on_bubbles(K: Simplex, k: int, l: int, p: int = 1, r: int = 1, family: str = "minus") -> int:
    """Rank of S-dagger_[p] restricted to the Alt bubbles (surjectivity certificate)."""
    forms = list(bubble_basis(K, family, k, l, p, r).basis)
    if not forms or k - p < 0 or l + p > K.n:
        return 0
    images = [apply_S_dagger(f, p) for f in forms]
    rows, _ = coefficient_matrix(images)
    return linalg.bareiss_rank(rows) if rows and rows[0] else 0


# ---------------------------------------------------------------------------
# Intrinsic bubbles on reference simplices (used as DoF test spaces)


@lru_cache(maxsize=None)
def reference_simplex(m: int) -> Simplex:
    return Simplex(reference_vertices(m))


@lru_cache(maxsize=None)
def reference_bubbles(poly: str, m: int, r: int, k: int, l: int) -> tuple:
    if m < 0 or k > m or l > m or k < 0 or l < 0:
        return ()
    return bubble_basis(reference_simplex(m), poly, k, l, 1, r).basis


@lru_cache(maxsize=None)
def reference_W_bubbles(poly: str, m: int, r: int, k: int, l: int, p: int) -> tuple:
    if m < 0 or k > m or l > m or k < 0 or l < 0:
        return ()
    return bubble_W_basis(reference_simplex(m), k, l, p, r, poly).basis


@lru_cache(maxsize=None)
def reference_scalar_bubbles(poly: str, m: int, r: int, k: int) -> tuple:
    """Scalar forms of P Lambda^k on the reference m-simplex attributed to the whole simplex."""
    if k < 0 or k > m:
        return ()
    full = tuple(range(m + 1))
    return tuple(a.form for a in scalar_basis(poly, m, r, k) if a.face == full)


def bubble_dim_formula(poly: str, m: int, r: int, k: int, l: int) -> int:
    return dim_bubble(poly, m, r, k, l)


def w_bubble_dim_formula(poly: str, m: int, r: int, k: int, l: int, p: int) -> int:
    lower = dim_bubble(poly, m, r, k - p, l + p) if k - p >= 0 else 0
    return dim_bubble(poly, m, r, k, l) - lower
