"""Constant alternating forms, form-valued forms and the free-group maps.

Index sets are strictly increasing tuples of integers in ``1..n``.  A
constant (k, l)-form on R^n is stored as a sparse map from pairs ``(I, J)``
of such tuples to exact rationals, with respect to the basis
``dx^I (x) dx^J``.  This basis is orthonormal for the Frobenius product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping

Tuple = tuple[int, ...]


class IncreasingTuple(tuple):
    """A strictly increasing tuple of indices in ``1..ambient``.

    It compares and hashes like the underlying plain tuple, so it can be used
    interchangeably with ordinary tuples as a dictionary key.
    """

    def __new__(cls, indices: Iterable[int], ambient: int):
        t = tuple(indices)
        if any(a >= b for a, b in zip(t, t[1:])):
            raise ValueError(f"indices {t} are not strictly increasing")
        if t and (t[0] < 1 or t[-1] > ambient):
            raise ValueError(f"indices {t} are not in 1..{ambient}")
        obj = super().__new__(cls, t)
        obj.ambient = ambient
        return obj

    @property
    def indices(self) -> Tuple:
        return tuple(self)

    def __repr__(self) -> str:
        return f"IncreasingTuple({tuple(self)!r}, ambient={self.ambient})"


@lru_cache(maxsize=None)
def _tuples(n: int, k: int) -> tuple:
    if k < 0 or k > n:
        return ()
    return tuple(IncreasingTuple(c, n) for c in combinations(range(1, n + 1), k))


def increasing_tuples(n: int, k: int) -> list[IncreasingTuple]:
    """All increasing k-tuples in ``1..n`` in lexicographic order."""
    return list(_tuples(n, k))


@lru_cache(maxsize=None)
def tuple_index(n: int, k: int) -> dict:
    return {t: i for i, t in enumerate(_tuples(n, k))}


@lru_cache(maxsize=None)
def pair_basis(n: int, k: int, l: int) -> tuple:
    """Basis pairs of Alt^{k,l}(R^n), lexicographic in I and then in J."""
    return tuple((I, J) for I in _tuples(n, k) for J in _tuples(n, l))


@lru_cache(maxsize=None)
def pair_index(n: int, k: int, l: int) -> dict:
    return {b: i for i, b in enumerate(pair_basis(n, k, l))}


def alt_dim(n: int, k: int, l: int | None = None) -> int:
    from math import comb

    def c(a, b):
        return comb(a, b) if 0 <= b <= a else 0

    return c(n, k) if l is None else c(n, k) * c(n, l)


def perm_sign(seq: Iterable[int]) -> int:
    """Sign of the permutation that sorts ``seq``; 0 if an entry repeats."""
    s = list(seq)
    if len(set(s)) != len(s):
        return 0
    sign = 1
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            if s[i] > s[j]:
                sign = -sign
    return sign


def merge(a: Tuple, b: Tuple) -> tuple[int, Tuple]:
    """Sign and sorted union of the concatenation ``a + b``."""
    sgn = perm_sign(a + b)
    if sgn == 0:
        return 0, ()
    return sgn, tuple(sorted(a + b))


def _clean(coeffs: Mapping) -> dict:
    return {key: Fraction(v) for key, v in coeffs.items() if v != 0}


@dataclass(frozen=True, eq=False)
class ConstForm:
    """A constant element of Alt^k(R^n) (x) Alt^l(R^n)."""

    n: int
    k: int
    l: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (I, J), v in self.coeffs.items():
            I, J = tuple(I), tuple(J)
            if len(I) != self.k or len(J) != self.l:
                raise ValueError(f"pair {(I, J)} does not have degree ({self.k},{self.l})")
            for t in (I, J):
                if any(a >= b for a, b in zip(t, t[1:])) or (t and (t[0] < 1 or t[-1] > self.n)):
                    raise ValueError(f"{t} is not an increasing tuple in 1..{self.n}")
            if v != 0:
                clean[(I, J)] = Fraction(v)
        object.__setattr__(self, "coeffs", clean)

    @property
    def signature(self) -> tuple[int, int, int]:
        return (self.n, self.k, self.l)

    @classmethod
    def basis(cls, n: int, I: Tuple, J: Tuple = ()) -> "ConstForm":
        return cls(n, len(I), len(J), {(tuple(I), tuple(J)): Fraction(1)})

    @classmethod
    def dx(cls, n: int, *indices: int) -> "ConstForm":
        """The scalar form dx^{i1} ^ ... ^ dx^{ik} (indices in any order)."""
        sgn, t = merge(tuple(indices), ())
        return cls(n, len(indices), 0, {(t, ()): sgn} if sgn else {})

    @classmethod
    def from_vector(cls, n: int, k: int, l: int, vec) -> "ConstForm":
        return cls(n, k, l, {b: v for b, v in zip(pair_basis(n, k, l), vec) if v != 0})

    def vector(self) -> list[Fraction]:
        return [self.coeffs.get(b, Fraction(0)) for b in pair_basis(self.n, self.k, self.l)]

    def _check(self, other: "ConstForm"):
        if self.signature != other.signature:
            raise ValueError(f"degree mismatch {self.signature} vs {other.signature}")

    def __add__(self, other: "ConstForm") -> "ConstForm":
        self._check(other)
        out = dict(self.coeffs)
        for key, v in other.coeffs.items():
            out[key] = out.get(key, 0) + v
        return ConstForm(self.n, self.k, self.l, out)

    def __neg__(self) -> "ConstForm":
        return ConstForm(self.n, self.k, self.l, {key: -v for key, v in self.coeffs.items()})

    def __sub__(self, other: "ConstForm") -> "ConstForm":
        return self + (-other)

    def __mul__(self, c) -> "ConstForm":
        c = Fraction(c)
        return ConstForm(self.n, self.k, self.l, {key: c * v for key, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, ConstForm) and self.signature == other.signature and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.signature, frozenset(self.coeffs.items())))

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self) -> str:
        return f"ConstForm(n={self.n}, k={self.k}, l={self.l}, {self.coeffs})"


def wedge(a: ConstForm, b: ConstForm) -> ConstForm:
    """Wedge product of two scalar (degree (k, 0)) constant forms."""
    if a.n != b.n:
        raise ValueError(f"ambient dimension mismatch {a.n} vs {b.n}")
    if a.l != 0 or b.l != 0:
        raise ValueError("wedge is defined here for scalar forms of degree (k, 0)")
    out: dict = {}
    for (I, _), x in a.coeffs.items():
        for (K, _), y in b.coeffs.items():
            sgn, t = merge(I, K)
            if sgn:
                out[(t, ())] = out.get((t, ()), 0) + sgn * x * y
    return ConstForm(a.n, a.k + b.k, 0, out)


def frobenius(a: ConstForm, b: ConstForm) -> Fraction:
    """Frobenius inner product in the orthonormal basis dx^I (x) dx^J."""
    a._check(b)
    if len(a.coeffs) > len(b.coeffs):
        a, b = b, a
    return sum((v * b.coeffs.get(key, 0) for key, v in a.coeffs.items()), Fraction(0))


def evaluate(form: ConstForm, vs: list, us: list) -> Fraction:
    """Evaluate a constant (k, l)-form on vectors ``vs`` (k of them) and ``us`` (l of them).

    Vectors are sequences of length n indexed from 0.  The value is
    ``sum c_{IJ} det[v_a(I_b)] det[u_a(J_b)]``; used as an independent oracle.
    """
    from .linalg import bareiss_det

    total = Fraction(0)
    for (I, J), c in form.coeffs.items():
        d1 = bareiss_det([[v[i - 1] for i in I] for v in vs]) if I else Fraction(1)
        d2 = bareiss_det([[u[j - 1] for j in J] for u in us]) if J else Fraction(1)
        total += c * d1 * d2
    return total


# ---------------------------------------------------------------------------
# Free groups X(n, k) and X(n, k, l)


@dataclass(frozen=True, eq=False)
class FreeGroupElement:
    """A finite formal combination of tuples ``[I]`` or tuple pairs ``[I, J]``."""

    n: int
    degrees: tuple
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "degrees", tuple(self.degrees))
        clean = {}
        for key, v in self.coeffs.items():
            key = tuple(tuple(t) for t in key) if self.double else tuple(key)
            parts = key if self.double else (key,)
            if tuple(len(t) for t in parts) != self.degrees:
                raise ValueError(f"generator {key} does not have degrees {self.degrees}")
            if v != 0:
                clean[key] = clean.get(key, 0) + Fraction(v)
        object.__setattr__(self, "coeffs", {k: v for k, v in clean.items() if v != 0})

    @property
    def double(self) -> bool:
        return len(self.degrees) == 2

    @classmethod
    def single(cls, n: int, I: Tuple) -> "FreeGroupElement":
        return cls(n, (len(I),), {tuple(I): 1})

    @classmethod
    def pair(cls, n: int, I: Tuple, J: Tuple) -> "FreeGroupElement":
        return cls(n, (len(I), len(J)), {(tuple(I), tuple(J)): 1})

    def basis(self) -> tuple:
        if self.double:
            return pair_basis(self.n, *self.degrees)
        return _tuples(self.n, self.degrees[0])

    def vector(self) -> list[Fraction]:
        return [self.coeffs.get(b, Fraction(0)) for b in self.basis()]

    def __add__(self, other: "FreeGroupElement") -> "FreeGroupElement":
        if (self.n, self.degrees) != (other.n, other.degrees):
            raise ValueError("free group elements live in different groups")
        out = dict(self.coeffs)
        for key, v in other.coeffs.items():
            out[key] = out.get(key, 0) + v
        return FreeGroupElement(self.n, self.degrees, out)

    def __mul__(self, c) -> "FreeGroupElement":
        return FreeGroupElement(self.n, self.degrees, {key: c * v for key, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FreeGroupElement)
            and (self.n, self.degrees) == (other.n, other.degrees)
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.n, self.degrees, frozenset(self.coeffs.items())))

    def inner(self, other: "FreeGroupElement") -> Fraction:
        """Standard inner product making the generators orthonormal."""
        return sum((v * other.coeffs.get(key, 0) for key, v in self.coeffs.items()), Fraction(0))


def _subsets(pool: Tuple, p: int):
    return combinations(pool, p) if 0 <= p <= len(pool) else ()


def s_map(x: FreeGroupElement, p: int = 1) -> FreeGroupElement:
    """``[I] -> sum_{P in [n] minus I, |P| = p} [I u P]``.

    On pairs this is ``[I, J] -> sum_{P in J minus I, |P| = p} [I u P, J minus P]``.
    Degrees out of range give the zero element of the target group.
    """
    n = x.n
    if x.double:
        k, l = x.degrees
        out: dict = {}
        if k + p <= n and l - p >= 0:
            for (I, J), c in x.coeffs.items():
                pool = tuple(j for j in J if j not in I)
                for P in _subsets(pool, p):
                    key = (tuple(sorted(I + P)), tuple(j for j in J if j not in P))
                    out[key] = out.get(key, 0) + c
        return FreeGroupElement(n, (k + p, l - p), out if k + p <= n and l - p >= 0 else {})
    (k,) = x.degrees
    out = {}
    if k + p <= n:
        for I, c in x.coeffs.items():
            pool = tuple(i for i in range(1, n + 1) if i not in I)
            for P in _subsets(pool, p):
                key = tuple(sorted(I + P))
                out[key] = out.get(key, 0) + c
    return FreeGroupElement(n, (k + p,), out if k + p <= n else {})


def s_dagger_map(x: FreeGroupElement, p: int = 1) -> FreeGroupElement:
    """``[J] -> sum_{P in J, |P| = p} [J minus P]``.

    On pairs this is ``[I, J] -> sum_{P in I minus J, |P| = p} [I minus P, J u P]``.
    """
    n = x.n
    if x.double:
        k, l = x.degrees
        ok = k - p >= 0 and l + p <= n
        out: dict = {}
        if ok:
            for (I, J), c in x.coeffs.items():
                pool = tuple(i for i in I if i not in J)
                for P in _subsets(pool, p):
                    key = (tuple(i for i in I if i not in P), tuple(sorted(J + P)))
                    out[key] = out.get(key, 0) + c
        return FreeGroupElement(n, (k - p, l + p), out)
    (k,) = x.degrees
    out = {}
    if k - p >= 0:
        for J, c in x.coeffs.items():
            for P in _subsets(J, p):
                key = tuple(j for j in J if j not in P)
                out[key] = out.get(key, 0) + c
    return FreeGroupElement(n, (k - p,), out if k - p >= 0 else {})


def free_matrix(n: int, degrees: tuple, op, p: int = 1) -> list[list[Fraction]]:
    """Matrix of a free-group map (rows index the target generators)."""
    src = FreeGroupElement(n, degrees)
    images = [op(FreeGroupElement(n, degrees, {b: 1}), p) for b in src.basis()]
    if images:
        tgt_basis = images[0].basis()
    else:
        probe = op(src, p)
        tgt_basis = probe.basis()
    index = {b: i for i, b in enumerate(tgt_basis)}
    m = [[Fraction(0)] * len(images) for _ in tgt_basis]
    for j, img in enumerate(images):
        for key, v in img.coeffs.items():
            m[index[key]][j] = v
    return m


def y_blocks(n: int, k: int, l: int) -> dict:
    """Partition of the generators ``[I, J]`` by ``(I u J, I n J)``.

    The double-index maps s and s-dagger preserve both the union and the
    intersection, so each block is an invariant subspace.
    """
    blocks: dict = {}
    for I, J in pair_basis(n, k, l):
        key = (tuple(sorted(set(I) | set(J))), tuple(sorted(set(I) & set(J))))
        blocks.setdefault(key, []).append((I, J))
    return blocks
