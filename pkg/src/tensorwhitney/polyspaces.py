"""Polynomial form-valued forms on simplices.

Polynomials are kept in canonical Cartesian monomial form (exponent tuples
in x_1..x_n).  Barycentric coordinates of a simplex are affine polynomials
obtained by inverting the vertex matrix, so Whitney forms, the P_r^- and
P_r bases and the Koszul operator are all exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from . import linalg
from .bgg_ops import binom, s_dagger_image, s_image
from .exterior import ConstForm, increasing_tuples, merge

Mono = tuple[int, ...]
Poly = dict  # Mono -> Fraction


# ---------------------------------------------------------------------------
# Cartesian polynomials


def poly_const(n: int, c) -> Poly:
    c = Fraction(c)
    return {(0,) * n: c} if c else {}


def poly_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for m, v in b.items():
        w = out.get(m, 0) + v
        if w:
            out[m] = w
        else:
            out.pop(m, None)
    return out


def poly_scale(a: Poly, c) -> Poly:
    if c == 0:
        return {}
    return {m: v * c for m, v in a.items()}


def poly_mul(a: Poly, b: Poly) -> Poly:
    out: dict = {}
    for m1, v1 in a.items():
        for m2, v2 in b.items():
            m = tuple(x + y for x, y in zip(m1, m2))
            out[m] = out.get(m, 0) + v1 * v2
    return {m: v for m, v in out.items() if v}


def poly_pow(a: Poly, e: int, n: int) -> Poly:
    out = poly_const(n, 1)
    for _ in range(e):
        out = poly_mul(out, a)
    return out


def poly_degree(a: Poly) -> int:
    return max((sum(m) for m in a), default=-1)


def poly_eval(a: Poly, x: Sequence) -> Fraction:
    total = Fraction(0)
    for m, v in a.items():
        t = v
        for xi, e in zip(x, m):
            if e:
                t *= Fraction(xi) ** e
        total += t
    return total


def monomials(n: int, degree: int) -> list[Mono]:
    """All exponent tuples of total degree exactly ``degree`` (lexicographic, descending)."""
    if n == 0:
        return [()] if degree == 0 else []
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials(n - 1, degree - first):
            out.append((first,) + rest)
    return out


def multi_indices(length: int, degree: int) -> list[tuple[int, ...]]:
    return monomials(length, degree)


# ---------------------------------------------------------------------------
# Simplices and barycentric coordinates


def reference_vertices(n: int) -> tuple:
    """Vertices of the reference simplex: the origin and the unit vectors."""
    verts = [tuple(Fraction(0) for _ in range(n))]
    for i in range(n):
        verts.append(tuple(Fraction(int(j == i)) for j in range(n)))
    return tuple(verts)


@lru_cache(maxsize=None)
def barycentric(vertices: tuple) -> tuple:
    """Affine polynomials lambda_0..lambda_m of a full-dimensional simplex.

    Returns a tuple of ``(constant, gradient)`` pairs; ``gradient`` has
    length n.  The simplex must have n + 1 affinely independent vertices.
    """
    n = len(vertices[0])
    if len(vertices) != n + 1:
        raise ValueError("barycentric coordinates need a full-dimensional simplex")
    m = [[Fraction(1)] + [Fraction(x) for x in v] for v in vertices]
    if linalg.bareiss_det(m) == 0:
        raise ValueError("degenerate simplex")
    inv = linalg.inverse(m)  # row j of m times column i of inv is delta_ij
    out = []
    for i in range(n + 1):
        out.append((inv[0][i], tuple(inv[1 + a][i] for a in range(n))))
    return tuple(out)


def lambda_poly(vertices: tuple, i: int) -> Poly:
    n = len(vertices[0])
    c, g = barycentric(vertices)[i]
    out = poly_const(n, c)
    for a, ga in enumerate(g):
        if ga:
            e = tuple(int(b == a) for b in range(n))
            out[e] = ga
    return out


def dlambda(vertices: tuple, i: int) -> ConstForm:
    n = len(vertices[0])
    _, g = barycentric(vertices)[i]
    return ConstForm(n, 1, 0, {((a + 1,), ()): ga for a, ga in enumerate(g) if ga})


@dataclass(frozen=True)
class BarycentricMonomial:
    """lambda^alpha for a multi-index alpha over the vertices 0..n."""

    alpha: tuple

    def __post_init__(self):
        if any(a < 0 for a in self.alpha):
            raise ValueError("multi-index entries must be nonnegative")

    @property
    def degree(self) -> int:
        return sum(self.alpha)

    @property
    def support(self) -> tuple:
        return tuple(i for i, a in enumerate(self.alpha) if a)

    def to_poly(self, vertices: tuple) -> Poly:
        n = len(vertices[0])
        out = poly_const(n, 1)
        for i, a in enumerate(self.alpha):
            if a:
                out = poly_mul(out, poly_pow(lambda_poly(vertices, i), a, n))
        return out


# ---------------------------------------------------------------------------
# Polynomial form-valued forms


@dataclass(frozen=True, eq=False)
class PolyForm:
    """A polynomial (k, l)-form: ``sum c * x^m dx^I (x) dx^J`` in Cartesian coordinates."""

    n: int
    k: int
    l: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "terms", {key: Fraction(v) for key, v in self.terms.items() if v != 0})

    @property
    def signature(self):
        return (self.n, self.k, self.l)

    @classmethod
    def zero(cls, n, k, l) -> "PolyForm":
        return cls(n, k, l, {})

    @classmethod
    def from_const(cls, form: ConstForm, poly: Poly | None = None) -> "PolyForm":
        poly = poly_const(form.n, 1) if poly is None else poly
        terms: dict = {}
        for (I, J), c in form.coeffs.items():
            for m, v in poly.items():
                terms[(m, I, J)] = terms.get((m, I, J), 0) + c * v
        return cls(form.n, form.k, form.l, terms)

    def __add__(self, other: "PolyForm") -> "PolyForm":
        if self.signature != other.signature:
            raise ValueError(f"degree mismatch {self.signature} vs {other.signature}")
        out = dict(self.terms)
        for key, v in other.terms.items():
            out[key] = out.get(key, 0) + v
        return PolyForm(self.n, self.k, self.l, out)

    def __neg__(self):
        return PolyForm(self.n, self.k, self.l, {key: -v for key, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c) -> "PolyForm":
        c = Fraction(c)
        return PolyForm(self.n, self.k, self.l, {key: c * v for key, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyForm) and self.signature == other.signature and self.terms == other.terms

    def __hash__(self):
        return hash((self.signature, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(m) for m, _, _ in self.terms), default=-1)

    def times_poly(self, poly: Poly) -> "PolyForm":
        out: dict = {}
        for (m, I, J), v in self.terms.items():
            for m2, w in poly.items():
                key = (tuple(a + b for a, b in zip(m, m2)), I, J)
                out[key] = out.get(key, 0) + v * w
        return PolyForm(self.n, self.k, self.l, out)

    def tensor(self, second: ConstForm) -> "PolyForm":
        """Attach a constant scalar form to the second slot of a scalar polynomial form."""
        if self.l != 0 or second.l != 0:
            raise ValueError("tensor expects scalar forms (second degree 0)")
        out: dict = {}
        for (m, I, _), v in self.terms.items():
            for (J, _), w in second.coeffs.items():
                out[(m, I, J)] = out.get((m, I, J), 0) + v * w
        return PolyForm(self.n, self.k, second.k, out)

    def wedge(self, form: ConstForm) -> "PolyForm":
        """Right wedge of a scalar polynomial form with a constant scalar form."""
        if self.l != 0 or form.l != 0:
            raise ValueError("wedge expects scalar forms")
        out: dict = {}
        for (m, I, _), v in self.terms.items():
            for (K, _), w in form.coeffs.items():
                sgn, t = merge(I, K)
                if sgn:
                    out[(m, t, ())] = out.get((m, t, ()), 0) + sgn * v * w
        return PolyForm(self.n, self.k + form.k, 0, out)

    def coefficient_forms(self) -> dict:
        """Split into ``{monomial: ConstForm}``."""
        out: dict = {}
        for (m, I, J), v in self.terms.items():
            out.setdefault(m, {})[(I, J)] = v
        return {m: ConstForm(self.n, self.k, self.l, c) for m, c in out.items()}

    def evaluate(self, x: Sequence) -> ConstForm:
        out: dict = {}
        for (m, I, J), v in self.terms.items():
            t = v
            for xi, e in zip(x, m):
                if e:
                    t *= Fraction(xi) ** e
            out[(I, J)] = out.get((I, J), 0) + t
        return ConstForm(self.n, self.k, self.l, out)

    def vector(self, index: dict) -> list[Fraction]:
        """Coefficient vector relative to a key index ``{(m, I, J): position}``."""
        v = [Fraction(0)] * len(index)
        for key, c in self.terms.items():
            v[index[key]] = c
        return v

    def __repr__(self):
        return f"PolyForm(n={self.n}, k={self.k}, l={self.l}, terms={len(self.terms)})"


def apply_termwise(form: PolyForm, image, k2: int, l2: int) -> PolyForm:
    out: dict = {}
    for (m, I, J), v in form.terms.items():
        for (I2, J2), w in image(I, J).items():
            key = (m, I2, J2)
            out[key] = out.get(key, 0) + v * w
    return PolyForm(form.n, k2, l2, out)


def apply_S(form: PolyForm, p: int = 1) -> PolyForm:
    """S_[p] acting pointwise on the form part."""
    n = form.n
    for _ in range(p):
        if form.k + 1 > n or form.l - 1 < 0:
            return PolyForm.zero(n, form.k + p, form.l - p)
        form = apply_termwise(form, s_image, form.k + 1, form.l - 1)
    return form


def apply_S_dagger(form: PolyForm, p: int = 1) -> PolyForm:
    """S-dagger_[p] acting pointwise on the form part."""
    n = form.n
    for _ in range(p):
        if form.k - 1 < 0 or form.l + 1 > n:
            return PolyForm.zero(n, form.k - p, form.l + p)
        form = apply_termwise(form, s_dagger_image, form.k - 1, form.l + 1)
    return form


def koszul(omega: PolyForm) -> PolyForm:
    """Contraction of the first slot with the position field x."""
    if omega.k == 0:
        return PolyForm.zero(omega.n, -1, omega.l)
    out: dict = {}
    for (m, I, J), v in omega.terms.items():
        for a, i in enumerate(I):
            m2 = tuple(e + (1 if b == i - 1 else 0) for b, e in enumerate(m))
            key = (m2, I[:a] + I[a + 1 :], J)
            out[key] = out.get(key, 0) + (v if a % 2 == 0 else -v)
    return PolyForm(omega.n, omega.k - 1, omega.l, out)


# ---------------------------------------------------------------------------
# Whitney forms and the scalar bases


def _scalar_from_const(form: ConstForm, poly: Poly) -> PolyForm:
    return PolyForm.from_const(form, poly)


def whitney_form(sigma: Sequence[int], vertices: tuple | None = None, n: int | None = None) -> PolyForm:
    """phi_sigma = sum_j (-1)^j lambda_{sigma_j} dlambda_{sigma_0} ^ .. (omit j) .. ^ dlambda_{sigma_k}."""
    if vertices is None:
        if n is None:
            raise ValueError("give the simplex vertices or the dimension n")
        vertices = reference_vertices(n)
    n = len(vertices[0])
    sigma = tuple(sigma)
    out = PolyForm.zero(n, len(sigma) - 1, 0)
    for j, sj in enumerate(sigma):
        rest = sigma[:j] + sigma[j + 1 :]
        d = ConstForm(n, 0, 0, {((), ()): 1})
        for r in rest:
            d = _wedge_const(d, dlambda(vertices, r))
        term = PolyForm.from_const(d, lambda_poly(vertices, sj))
        out = out + (term if j % 2 == 0 else -term)
    return out


def _wedge_const(a: ConstForm, b: ConstForm) -> ConstForm:
    from .exterior import wedge

    return wedge(a, b)


def dlambda_wedge(vertices: tuple, idx: Sequence[int]) -> ConstForm:
    n = len(vertices[0])
    d = ConstForm(n, 0, 0, {((), ()): 1})
    for r in idx:
        d = _wedge_const(d, dlambda(vertices, r))
    return d


@dataclass(frozen=True)
class AttributedForm:
    """A scalar basis form together with the face (vertex tuple) it belongs to."""

    form: PolyForm
    face: tuple
    label: tuple


def _pr_minus_labels(n: int, r: int, k: int):
    out = []
    for I in combinations(range(n + 1), k + 1):
        for alpha in multi_indices(n + 1, r - 1):
            if any(alpha[i] for i in range(I[0])):
                continue
            face = tuple(sorted(set(I) | {i for i, a in enumerate(alpha) if a}))
            out.append((alpha, I, face))
    return out


def _pr_labels(n: int, r: int, k: int):
    out = []
    for I in combinations(range(n + 1), k):
        for alpha in multi_indices(n + 1, r):
            face = set(I) | {i for i, a in enumerate(alpha) if a}
            rest = face - set(I)
            if not rest:
                continue
            lo = min(rest)
            if any(alpha[i] for i in range(lo)):
                continue
            out.append((alpha, I, tuple(sorted(face))))
    return out


@lru_cache(maxsize=None)
def basis_Pr_minus(n: int, r: int, k: int, vertices: tuple | None = None) -> tuple:
    """Basis lambda^alpha phi_I of P_r^- Lambda^k, each tagged with its face.

    ``|alpha| = r - 1``, ``alpha_i = 0`` for ``i < min I``; the face is
    ``supp(alpha) u I``.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    vertices = reference_vertices(n) if vertices is None else vertices
    out = []
    phis = {}
    for alpha, I, face in _pr_minus_labels(n, r, k):
        if I not in phis:
            phis[I] = whitney_form(I, vertices)
        f = phis[I].times_poly(BarycentricMonomial(alpha).to_poly(vertices))
        out.append(AttributedForm(f, face, (alpha, I)))
    return tuple(out)


@lru_cache(maxsize=None)
def basis_Pr(n: int, r: int, k: int, vertices: tuple | None = None) -> tuple:
    """Basis lambda^alpha dlambda_I of P_r Lambda^k, each tagged with its face.

    ``|alpha| = r``, the face is ``sigma = supp(alpha) u I`` and
    ``alpha_i = 0`` for ``i < min(sigma minus I)``.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    vertices = reference_vertices(n) if vertices is None else vertices
    out = []
    for alpha, I, face in _pr_labels(n, r, k):
        d = dlambda_wedge(vertices, I)
        f = PolyForm.from_const(d, BarycentricMonomial(alpha).to_poly(vertices))
        out.append(AttributedForm(f, face, (alpha, I)))
    return tuple(out)


def scalar_basis(poly: str, n: int, r: int, k: int, vertices: tuple | None = None) -> tuple:
    if poly == "minus":
        return basis_Pr_minus(n, r, k, vertices)
    if poly == "full":
        return basis_Pr(n, r, k, vertices)
    raise ValueError(f"unknown polynomial family {poly!r} (use 'minus' or 'full')")


# ---------------------------------------------------------------------------
# Dimension formulas


def dim_Pr_minus(n: int, r: int, k: int, l: int | None = None) -> int:
    d = binom(n + r, k + r) * binom(r + k - 1, k) if r >= 1 and 0 <= k <= n else 0
    return d if l is None else d * binom(n, l)


def dim_Pr(n: int, r: int, k: int, l: int | None = None) -> int:
    d = binom(n + r, n) * binom(n, k) if r >= 0 else 0
    return d if l is None else d * binom(n, l)


def dim_P(poly: str, n: int, r: int, k: int, l: int | None = None) -> int:
    return dim_Pr_minus(n, r, k, l) if poly == "minus" else dim_Pr(n, r, k, l)


def dim_scalar_bubble(poly: str, m: int, r: int, k: int) -> int:
    """Closed form for the scalar bubbles of P_r^- Lambda^k or P_r Lambda^k on an m-simplex."""
    if poly == "minus":
        return binom(r + k - 1, r - 1) * binom(r - 1, m - k) if r >= 1 else 0
    return binom(r + k, r) * binom(r - 1, m - k) if r >= 1 else 0


def dim_bubble(poly: str, n: int, r: int, k: int, l: int) -> int:
    """Closed form for dim of the (k, l) bubbles on an n-simplex."""
    return sum(
        binom(n + 1, m + 1) * dim_scalar_bubble(poly, m, r, k) * binom(m, l + m - n) for m in range(n + 1)
    )


# ---------------------------------------------------------------------------
# Tensor product bases and S-dagger kernels


@lru_cache(maxsize=None)
def tensor_basis(poly: str, n: int, r: int, k: int, l: int, vertices: tuple | None = None) -> tuple:
    """Basis psi (x) dx^J of P Lambda^{k,l} (scalar basis times Cartesian J)."""
    scal = scalar_basis(poly, n, r, k, vertices)
    out = []
    for J in increasing_tuples(n, l):
        for a in scal:
            out.append(a.form.tensor(ConstForm(n, l, 0, {(tuple(J), ()): 1})))
    return tuple(out)


def key_index(forms: Iterable[PolyForm]) -> dict:
    keys = set()
    for f in forms:
        keys.update(f.terms)
    return {key: i for i, key in enumerate(sorted(keys))}


def coefficient_matrix(forms: Sequence[PolyForm], index: dict | None = None):
    """Rows = forms, columns = monomial/pair keys."""
    if index is None:
        index = key_index(forms)
    return [f.vector(index) for f in forms], index


def combine(forms: Sequence[PolyForm], coeffs: Sequence) -> PolyForm:
    out: dict = {}
    for f, c in zip(forms, coeffs):
        if c:
            for key, v in f.terms.items():
                out[key] = out.get(key, 0) + c * v
    f0 = forms[0]
    return PolyForm(f0.n, f0.k, f0.l, out)


def kernel_coefficients(forms: Sequence[PolyForm], op) -> list[list[Fraction]]:
    """Coefficient vectors c with ``op(sum c_i forms_i) = 0``."""
    images = [op(f) for f in forms]
    rows, _ = coefficient_matrix(images)
    if not rows or not rows[0]:
        return [[Fraction(int(i == j)) for i in range(len(forms))] for j in range(len(forms))]
    return linalg.nullspace(linalg.transpose(rows), len(forms))


@lru_cache(maxsize=None)
def pw_kernel(poly: str, n: int, r: int, k: int, l: int, p: int, vertices: tuple | None = None):
    """``(tensor basis, kernel coefficient vectors)`` of S-dagger_[p] on P Lambda^{k,l}."""
    basis = tensor_basis(poly, n, r, k, l, vertices)
    if p == 0 or k - p < 0 or l + p > n:
        coeffs = [[Fraction(int(i == j)) for i in range(len(basis))] for j in range(len(basis))]
    else:
        coeffs = kernel_coefficients(basis, lambda f: apply_S_dagger(f, p))
    return basis, tuple(tuple(c) for c in coeffs)


def kernel_space_PrW(n: int, r: int, k: int, l: int, p: int = 1, poly: str = "minus") -> list[PolyForm]:
    """Basis of ker S-dagger_[p] inside P_r^- Lambda^{k,l} (or P_r with ``poly='full'``)."""
    basis, coeffs = pw_kernel(poly, n, r, k, l, p)
    return [combine(basis, c) for c in coeffs]


def dim_PW(poly: str, n: int, r: int, k: int, l: int, p: int = 1) -> int:
    """Closed form dim P W^{k,l}_[p] = dim P Lambda^{k,l} - dim P Lambda^{k-p,l+p} (k <= l+p-1)."""
    return dim_P(poly, n, r, k, l) - (dim_P(poly, n, r, k - p, l + p) if k - p >= 0 else 0)


def homogeneous_forms(n: int, s: int, k: int, l: int = 0) -> list[PolyForm]:
    """Monomial basis of homogeneous degree-s polynomial (k, l)-forms."""
    out = []
    for m in monomials(n, s):
        for I in increasing_tuples(n, k):
            for J in increasing_tuples(n, l):
                out.append(PolyForm(n, k, l, {(m, tuple(I), tuple(J)): 1}))
    return out
