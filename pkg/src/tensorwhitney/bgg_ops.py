"""Connecting maps S and S-dagger, their iterates and the symmetric spaces.

For a basis element ``dx^I (x) dx^J`` the maps act by moving one index
between the two factors:

    S       (dx^I (x) dx^J) = sum_i (-1)^(i+1) (dx^{J_i} ^ dx^I) (x) dx^{J minus J_i}
    S-dagger(dx^I (x) dx^J) = sum_i (-1)^(i+1) dx^{I minus I_i} (x) (dx^{I_i} ^ dx^J)

which is the basis form of the evaluation formula
``S w(v_1..v_{k+1})(u..) = sum_j (-1)^(j+1) w(v_1..^v_j..v_{k+1})(v_j, u..)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from . import linalg
from .exterior import ConstForm, alt_dim, increasing_tuples, merge, pair_basis, pair_index

Signature = tuple[int, int, int]


def _valid(n: int, k: int, l: int) -> bool:
    return 0 <= k <= n and 0 <= l <= n


def binom(a: int, b: int) -> int:
    """Binomial coefficient that vanishes outside ``0 <= b <= a``."""
    return comb(a, b) if 0 <= b <= a else 0


@dataclass(frozen=True, eq=False)
class LinearMap:
    """A linear map between spaces of constant form-valued forms.

    ``matrix`` has one row per codomain basis pair and one column per
    domain basis pair, both in the lexicographic pair order.
    """

    domain: Signature
    codomain: Signature
    matrix: tuple = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (alt_dim(self.codomain[0], *self.codomain[1:]), alt_dim(self.domain[0], *self.domain[1:]))

    def rows(self) -> list[list[Fraction]]:
        return [list(r) for r in self.matrix]

    def rank(self) -> int:
        return linalg.bareiss_rank(self.matrix, self.shape[1])

    def kernel(self) -> list[ConstForm]:
        n, k, l = self.domain
        return [ConstForm.from_vector(n, k, l, v) for v in linalg.nullspace(self.matrix, self.shape[1])]

    def apply(self, form: ConstForm) -> ConstForm:
        if form.signature != self.domain:
            raise ValueError(f"form of degree {form.signature} given to map on {self.domain}")
        vec = form.vector()
        out = [sum((a * x for a, x in zip(row, vec) if x), Fraction(0)) for row in self.matrix]
        n, k, l = self.codomain
        return ConstForm.from_vector(n, k, l, out)

    __call__ = apply

    def __matmul__(self, other: "LinearMap") -> "LinearMap":
        if other.codomain != self.domain:
            raise ValueError("maps cannot be composed")
        inner = other.shape[0]
        if inner == 0:
            m = linalg.zeros(self.shape[0], other.shape[1])
        else:
            m = linalg.matmul(self.matrix, other.matrix)
        return LinearMap(other.domain, self.codomain, _freeze(m, self.shape[0], other.shape[1]))

    def __mul__(self, c) -> "LinearMap":
        c = Fraction(c)
        return LinearMap(self.domain, self.codomain, tuple(tuple(c * x for x in r) for r in self.matrix))

    __rmul__ = __mul__

    def __add__(self, other: "LinearMap") -> "LinearMap":
        if (self.domain, self.codomain) != (other.domain, other.codomain):
            raise ValueError("maps have different signatures")
        return LinearMap(
            self.domain,
            self.codomain,
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.matrix, other.matrix)),
        )

    def transpose(self) -> "LinearMap":
        rows, cols = self.shape
        return LinearMap(self.codomain, self.domain, _freeze(linalg.transpose(self.matrix, cols), cols, rows))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LinearMap)
            and (self.domain, self.codomain) == (other.domain, other.codomain)
            and self.matrix == other.matrix
        )

    def __hash__(self):
        return hash((self.domain, self.codomain, self.matrix))


def _freeze(m, nrows: int, ncols: int) -> tuple:
    if nrows == 0:
        return ()
    return tuple(tuple(x if type(x) is Fraction else Fraction(x) for x in r) if ncols else () for r in m)


def _from_images(domain: Signature, codomain: Signature, images) -> LinearMap:
    """Assemble a map from sparse column images ``{(I, J): coeff}``."""
    n, k2, l2 = codomain
    rows = len(pair_basis(n, k2, l2)) if _valid(*codomain) else 0
    cols = len(images)
    m = [[Fraction(0)] * cols for _ in range(rows)]
    index = pair_index(n, k2, l2) if rows else {}
    for j, img in enumerate(images):
        for key, v in img.items():
            m[index[key]][j] += v
    return LinearMap(domain, codomain, _freeze(m, rows, cols))


def _domain_basis(n, k, l):
    return pair_basis(n, k, l) if _valid(n, k, l) else ()


def s_image(I: tuple, J: tuple) -> dict:
    """Image of the basis pair ``(I, J)`` under S."""
    out: dict = {}
    for i, j in enumerate(J):
        sgn, I2 = merge((j,), I)
        if sgn:
            key = (I2, J[:i] + J[i + 1 :])
            out[key] = out.get(key, 0) + (sgn if i % 2 == 0 else -sgn)
    return out


def s_dagger_image(I: tuple, J: tuple) -> dict:
    """Image of the basis pair ``(I, J)`` under S-dagger."""
    out: dict = {}
    for i, a in enumerate(I):
        sgn, J2 = merge((a,), J)
        if sgn:
            key = (I[:i] + I[i + 1 :], J2)
            out[key] = out.get(key, 0) + (sgn if i % 2 == 0 else -sgn)
    return out


@lru_cache(maxsize=None)
def build_S(n: int, k: int, l: int) -> LinearMap:
    """S^{k,l}: Alt^{k,l} -> Alt^{k+1,l-1} (zero map of the right shape out of range)."""
    dom, cod = (n, k, l), (n, k + 1, l - 1)
    basis = _domain_basis(n, k, l)
    if not _valid(*cod):
        return _from_images(dom, cod, [{} for _ in basis])
    return _from_images(dom, cod, [s_image(I, J) for I, J in basis])


@lru_cache(maxsize=None)
def build_S_dagger_1(n: int, k: int, l: int) -> LinearMap:
    dom, cod = (n, k, l), (n, k - 1, l + 1)
    basis = _domain_basis(n, k, l)
    if not _valid(*cod):
        return _from_images(dom, cod, [{} for _ in basis])
    return _from_images(dom, cod, [s_dagger_image(I, J) for I, J in basis])


def _identity(n, k, l) -> LinearMap:
    d = alt_dim(n, k, l) if _valid(n, k, l) else 0
    return LinearMap((n, k, l), (n, k, l), _freeze(linalg.identity(d), d, d))


@lru_cache(maxsize=None)
def build_S_p(n: int, k: int, l: int, p: int = 1) -> LinearMap:
    """S_[p]^{k,l} = S^{k+p-1,l-p+1} o ... o S^{k,l}; the identity for p = 0."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    if p == 0:
        return _identity(n, k, l)
    out = build_S(n, k, l)
    for i in range(1, p):
        out = build_S(n, k + i, l - i) @ out
    return out


@lru_cache(maxsize=None)
def build_S_dagger(n: int, k: int, l: int, p: int = 1) -> LinearMap:
    """S-dagger_[p]^{k,l}: Alt^{k,l} -> Alt^{k-p,l+p}, the p-fold composition."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    if p == 0:
        return _identity(n, k, l)
    out = build_S_dagger_1(n, k, l)
    for i in range(1, p):
        out = build_S_dagger_1(n, k - i, l + i) @ out
    return out


def w_dim(n: int, k: int, l: int, p: int = 1) -> int:
    """Closed-form dimension of W^{k,l}_[p] (valid when k <= l + p)."""
    return binom(n, k) * binom(n, l) - binom(n, k - p) * binom(n, l + p)


def w_tilde_dim(n: int, k: int, l: int, p: int = 1) -> int:
    """Closed-form dimension of the kernel of S_[p]^{k,l} (valid when k >= l - p)."""
    return binom(n, k) * binom(n, l) - binom(n, k + p) * binom(n, l - p)


@dataclass(frozen=True, eq=False)
class SymmetricSpaceBasis:
    """A basis of W^{k,l}_[p] = ker S-dagger_[p] (or of ker S_[p] when ``tilde``)."""

    signature: tuple
    basis: tuple
    tilde: bool = False

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> list[list[Fraction]]:
        """Basis vectors as rows in the lexicographic pair coordinates."""
        return [b.vector() for b in self.basis]


@lru_cache(maxsize=None)
def symmetric_space(n: int, k: int, l: int, p: int = 1, tilde: bool = False) -> SymmetricSpaceBasis:
    """Exact kernel basis of S-dagger_[p]^{k,l}, or of S_[p]^{k,l} if ``tilde``."""
    op = build_S_p(n, k, l, p) if tilde else build_S_dagger(n, k, l, p)
    return SymmetricSpaceBasis((n, k, l, p), tuple(op.kernel()), tilde)


def telescope_decompose(n: int, k: int, l: int, p: int) -> list[list[ConstForm]]:
    """Bases of S_[s] W^{k-s,l+s} for s = 0..p-1.

    Their direct sum is W^{k,l}_[p]; the pieces are mutually orthogonal.
    The sum is direct only when every S_[s] is injective on W^{k-s,l+s},
    which needs k <= l + 1 besides k <= l + p - 1.
    """
    if k > l + p - 1 or (p > 1 and k > l + 1):
        raise ValueError(f"the telescope decomposition needs k <= l + p - 1 and k <= l + 1 (got k={k}, l={l}, p={p})")
    pieces = []
    for s in range(p):
        if k - s < 0 or l + s > n:
            pieces.append([])
            continue
        w = symmetric_space(n, k - s, l + s, 1)
        op = build_S_p(n, k - s, l + s, s)
        pieces.append([op.apply(b) for b in w.basis])
    return pieces


# ---------------------------------------------------------------------------
# Bianchi map


def sym_map(n: int) -> LinearMap:
    """Symmetrization of Alt^{2,2}: w(X,Y)(Z,W) -> (w(X,Y)(Z,W) + w(Z,W)(X,Y)) / 2."""
    half = Fraction(1, 2)
    images = []
    for I, J in _domain_basis(n, 2, 2):
        img = {(I, J): half}
        img[(J, I)] = img.get((J, I), 0) + half
        images.append(img)
    return _from_images((n, 2, 2), (n, 2, 2), images)


def _component(I: tuple, J: tuple, a: tuple, b: tuple) -> int:
    """Coefficient picked by evaluating dx^I (x) dx^J on (e_a0, e_a1)(e_b0, e_b1)."""
    s1, t1 = merge(a, ())
    s2, t2 = merge(b, ())
    return s1 * s2 if (t1 == I and t2 == J) else 0


@lru_cache(maxsize=None)
def bianchi_map(n: int) -> LinearMap:
    """b: Alt^{2,2} -> Alt^{0,4} given by

        b w(X,Y,Z,W) = (w(X,Y)(Z,W) + w(Y,Z)(X,W) + w(Z,X)(Y,W)) / 2,

    evaluated on increasing quadruples of coordinate vectors.  The top
    degree form is identified with Alt^{0,4} so that it can be compared with
    S-dagger_[2]^{2,2}.  For n < 4 the target is zero.
    """
    images = []
    quads = increasing_tuples(n, 4)
    half = Fraction(1, 2)
    for I, J in _domain_basis(n, 2, 2):
        img = {}
        for q in quads:
            x, y, z, w = q
            v = (
                _component(I, J, (x, y), (z, w))
                + _component(I, J, (y, z), (x, w))
                + _component(I, J, (z, x), (y, w))
            )
            if v:
                img[((), tuple(q))] = half * v
        images.append(img)
    return _from_images((n, 2, 2), (n, 0, 4), images)


@lru_cache(maxsize=None)
def alt4_inclusion(n: int) -> LinearMap:
    """The inclusion Alt^4 -> Alt^{2,2}, eta -> eta(X,Y,Z,W) viewed as a (2,2)-form."""
    images = []
    for _, q in _domain_basis(n, 0, 4):
        img = {}
        for I in increasing_tuples(n, 2):
            if not set(I) <= set(q):
                continue
            J = tuple(i for i in q if i not in I)
            sgn, _ = merge(I, J)
            img[(tuple(I), J)] = Fraction(sgn)
        images.append(img)
    return _from_images((n, 0, 4), (n, 2, 2), images)


def bianchi_projection(n: int) -> LinearMap:
    """Idempotent projection of Alt^{2,2} onto the Alt^4 part of its symmetric forms.

    With the normalization of ``bianchi_map`` one has ``b o incl = (3/2) id``,
    so the projection is ``(2/3) incl o b o sym``.
    """
    return Fraction(2, 3) * (alt4_inclusion(n) @ bianchi_map(n) @ sym_map(n))


# ---------------------------------------------------------------------------
# Flip isomorphism


@dataclass(frozen=True)
class FlipIsomorphism:
    """The pair of maps between W^{l,k}_[1+l-k] and W^{k,l} (k <= l).

    ``forward`` is S-dagger_[l-k]^{l,k} and ``backward`` is S_[l-k]^{k,l}; the
    ranks are those of their restrictions to the respective kernels.
    """

    forward: LinearMap
    backward: LinearMap
    source: SymmetricSpaceBasis
    target: SymmetricSpaceBasis
    forward_rank: int
    backward_rank: int

    @property
    def is_isomorphism(self) -> bool:
        d = self.source.dim
        return d == self.target.dim == self.forward_rank == self.backward_rank


def flip_isomorphism(n: int, k: int, l: int) -> FlipIsomorphism:
    if k > l:
        raise ValueError("flip_isomorphism needs k <= l")
    q = l - k
    forward = build_S_dagger(n, l, k, q)
    backward = build_S_p(n, k, l, q)
    source = symmetric_space(n, l, k, q + 1)
    target = symmetric_space(n, k, l, 1)
    fimg = [forward.apply(b).vector() for b in source.basis]
    bimg = [backward.apply(b).vector() for b in target.basis]
    tgt_rows = target.matrix()
    src_rows = source.matrix()
    # images must land in the kernels: the rank does not grow when appended
    if fimg and linalg.bareiss_rank(tgt_rows + fimg) != len(tgt_rows):
        raise AssertionError("S-dagger image leaves W^{k,l}")
    if bimg and linalg.bareiss_rank(src_rows + bimg) != len(src_rows):
        raise AssertionError("S image leaves W^{l,k}_[1+l-k]")
    return FlipIsomorphism(
        forward,
        backward,
        source,
        target,
        linalg.bareiss_rank(fimg) if fimg else 0,
        linalg.bareiss_rank(bimg) if bimg else 0,
    )


# ---------------------------------------------------------------------------
# Proxy names

PROXY_3D = {
    (0, 0): "R", (0, 1): "V", (0, 2): "V", (0, 3): "R",
    (1, 0): "V", (1, 1): "M", (1, 2): "M", (1, 3): "V",
    (2, 0): "V", (2, 1): "M", (2, 2): "M", (2, 3): "V",
    (3, 0): "R", (3, 1): "V", (3, 2): "V", (3, 3): "R",
}

PROXY_W_3D = dict(PROXY_3D)
PROXY_W_3D.update({(1, 1): "S", (1, 2): "T", (2, 1): "T", (2, 2): "S"})

PROXY_4D = {
    (0, 0): "R", (0, 1): "V", (0, 2): "K", (0, 3): "V", (0, 4): "R",
    (1, 0): "V", (1, 1): "M", (1, 2): "V(x)K", (1, 3): "M", (1, 4): "V",
    (2, 0): "K", (2, 1): "K(x)V", (2, 2): "K(x)K", (2, 3): "K(x)V", (2, 4): "K",
    (3, 0): "V", (3, 1): "M", (3, 2): "V(x)K", (3, 3): "M", (3, 4): "V",
    (4, 0): "R", (4, 1): "V", (4, 2): "K", (4, 3): "V", (4, 4): "R",
}

PROXY_W_4D = {
    (0, 0): "R", (0, 1): "V", (0, 2): "K", (0, 3): "V", (0, 4): "R",
    (1, 0): "V", (1, 1): "S", (1, 2): "B", (1, 3): "T", (1, 4): "V",
    (2, 0): "K", (2, 1): "B", (2, 2): "AC", (2, 3): "N", (2, 4): "K",
    (3, 0): "V", (3, 1): "T", (3, 2): "N", (3, 3): "S", (3, 4): "V",
    (4, 0): "R", (4, 1): "V", (4, 2): "K", (4, 3): "V", (4, 4): "R",
}

PROXY_DIMS = {
    3: {"R": 1, "V": 3, "M": 9, "S": 6, "T": 8},
    4: {"R": 1, "V": 4, "K": 6, "M": 16, "V(x)K": 24, "K(x)V": 24, "K(x)K": 36,
        "S": 10, "T": 15, "B": 20, "N": 20, "AC": 20},
}


def proxy_table(n: int, symmetric: bool = True) -> dict:
    """Named proxies of Alt^{k,l} for n = 3, 4.

    With ``symmetric`` the entry for k <= l names W^{k,l} = ker S-dagger and
    the entry for k > l names the kernel of S^{k,l}.
    """
    if n == 3:
        return dict(PROXY_W_3D if symmetric else PROXY_3D)
    if n == 4:
        return dict(PROXY_W_4D if symmetric else PROXY_4D)
    raise ValueError("proxy tables exist for n = 3 and n = 4 only")
