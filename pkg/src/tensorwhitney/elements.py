"""Finite element families of form-valued forms.

Each family is a shape space (polynomial forms, possibly cut down to the
kernel of an iterated S-dagger) together with degrees of freedom attached to
faces.  Two kinds of functionals occur:

* bubble moments  <iota* iota* w, b>_sigma  with b a bubble on sigma;
* skeletal moments  <iota* vartheta_{m-s} w, b>_sigma  with
  b in B Lambda^k(sigma) (x) Alt^{m-s}(sigma) (x) Alt^{l-m+s}(sigma-perp).

Every functional depends only on the face (its labels and coordinates), so
two cells sharing a face produce identical functionals there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from . import linalg
from .bgg_ops import binom, build_S_dagger, build_S_p, symmetric_space, w_dim
from .bubbles import (
    poly_kind,
    reference_bubbles,
    reference_scalar_bubbles,
    reference_W_bubbles,
)
from .geometry import Simplex, TestForm, TraceValue, make_test, restrict
from .polyspaces import (
    PolyForm,
    apply_S,
    apply_S_dagger,
    dim_P,
    dim_PW,
    pw_kernel,
    reference_vertices,
)

FAMILIES = ("ii_alt", "ii_W", "ij_alt", "ij_W", "ijp_alt", "ijp_W", "ii_Wp", "const_W")
ALIASES = {"ij_Wp": "ijp_W", "ij_altp": "ijp_alt", "ijp_Alt": "ijp_alt", "ii_Alt": "ii_alt", "ij_Alt": "ij_alt"}
POLY_NAMES = {"Pminus": "minus", "Pr_minus": "minus", "Pr": "full", "minus": "minus", "full": "full"}


class ElementError(ValueError):
    """Raised when family parameters violate a constraint."""


@dataclass(frozen=True)
class Params:
    family: str
    n: int
    k: int
    l: int
    p: int
    r: int
    poly: str = "minus"
    q: int | None = None

    @property
    def symmetric(self) -> bool:
        return self.family in ("ii_W", "ii_Wp", "ij_W", "ijp_W", "const_W")

    @property
    def trace(self) -> str:
        return "ii" if self.family.startswith("ii") or self.family == "const_W" else "ij"

    @property
    def jp(self) -> int:
        """The order of the generalized trace on the second slot (q for the mixed variant)."""
        return self.p if self.q is None else self.q


def normalize(family: str, n: int, k: int, l: int, p: int = 1, r: int = 1, poly: str = "minus", q=None) -> Params:
    """Validate parameters and return a canonical Params record."""
    family = ALIASES.get(family, family)
    if family not in FAMILIES:
        raise ElementError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    if poly not in POLY_NAMES:
        raise ElementError(f"unknown polynomial space {poly!r}; use minus (P_r^-) or full (P_r)")
    poly = POLY_NAMES[poly]
    if n < 1:
        raise ElementError("n must be at least 1")
    if not (0 <= k <= n and 0 <= l <= n):
        raise ElementError(f"degrees must satisfy 0 <= k, l <= n (got k={k}, l={l}, n={n})")
    if r < 1:
        raise ElementError("r must be at least 1")
    if p < 1:
        raise ElementError("p must be at least 1")
    if family in ("ij_alt", "ij_W", "ii_W") and p != 1:
        raise ElementError(f"{family} is the p = 1 family; use {family.replace('_', 'p_', 1) if family.startswith('ij') else 'ii_Wp'} for p > 1")
    if family in ("ii_W", "ii_Wp", "ij_W", "ijp_W") and k > l + p - 1:
        raise ElementError(f"symmetric families need k <= l + p - 1 (got k={k}, l={l}, p={p})")
    if family == "const_W":
        if not (p <= k <= l <= n - p):
            raise ElementError(f"constant construction needs p <= k <= l <= n - p (got p={p}, k={k}, l={l}, n={n})")
        r, poly = 1, "minus"
    if family == "ii_alt":
        p = 1
    if q is not None:
        if family != "ijp_W":
            raise ElementError("the mixed order q is only defined for ijp_W")
        if not 1 <= q <= p:
            raise ElementError("the mixed order must satisfy 1 <= q <= p")
        if q == p:
            q = None
    return Params(family, n, k, l, p, r, poly, q)


def expected_dim(P: Params) -> int:
    if P.family == "const_W":
        return w_dim(P.n, P.k, P.l, P.p)
    if P.symmetric:
        return dim_PW(P.poly, P.n, P.r, P.k, P.l, P.p)
    return dim_P(P.poly, P.n, P.r, P.k, P.l)


# ---------------------------------------------------------------------------
# Degrees of freedom


@dataclass(frozen=True, eq=False)
class DoFFunctional:
    """A moment functional attached to a face.

    ``kind`` is ``ii`` for double pullback moments and ``ij`` for skeletal
    moments against the block with ``m - s`` tangential second-slot entries.
    """

    face: Simplex
    kind: str
    tag: str
    test: TestForm = field(repr=False)
    components: dict = field(repr=False)

    def trace(self, omega: PolyForm) -> TraceValue:
        return restrict(self.face, omega, "rho")

    def evaluate(self, omega: PolyForm) -> Fraction:
        return self.test.pair(self.trace(omega))

    __call__ = evaluate


def _bubble_dofs(face: Simplex, forms, tag: str) -> list[DoFFunctional]:
    return [DoFFunctional(face, "ii", tag, make_test(face, dict(b.terms)), dict(b.terms)) for b in forms]


def _skeletal_dofs(face: Simplex, P: Params, s_max: int) -> list[DoFFunctional]:
    n, m, k, l = face.n, face.dim, P.k, P.l
    scal = reference_scalar_bubbles(P.poly, m, P.r, k)
    out = []
    for s in range(s_max):
        a, b = m - s, l - m + s
        if a < 0 or b < 0 or a > m or b > n - m:
            continue
        for A in combinations(range(1, m + 1), a):
            for B in combinations(range(m + 1, n + 1), b):
                J = A + B
                for psi in scal:
                    comp = {(tm, I, J): c for (tm, I, _), c in psi.terms.items()}
                    out.append(DoFFunctional(face, "ij", f"skeletal s={s}", make_test(face, comp), comp))
    return out


@lru_cache(maxsize=None)
def _const_tests(m: int, k: int, l: int, p: int) -> tuple:
    """Mirror-space tests on the reference m-simplex for the constant construction.

    For s < p: S_[s] S-dagger_[l-k+2s] applied to the W^{l+s,k-s}_[l-k+2s+1] bubbles.
    """
    out = []
    for s in range(p):
        a, b, q = l + s, k - s, l - k + 2 * s
        if a > m or b < 0:
            continue
        for w in reference_W_bubbles("minus", m, 1, a, b, q + 1):
            t = apply_S_dagger(w, q) if q else w
            t = apply_S(t, s) if s else t
            if not t.is_zero():
                out.append((s, t))
    return tuple(out)


def face_dofs(P: Params, face: Simplex) -> list[DoFFunctional]:
    """The ordered list of functionals a family attaches to one face."""
    m = face.dim
    k, l, p, r, poly = P.k, P.l, P.p, P.r, P.poly
    if m < k:
        return []
    fam = P.family
    if fam == "const_W":
        tests = _const_tests(m, k, l, p)
        return [DoFFunctional(face, "ii", f"mirror s={s}", make_test(face, dict(t.terms)), dict(t.terms)) for s, t in tests]
    if fam == "ii_alt":
        return _bubble_dofs(face, reference_bubbles(poly, m, r, k, l), "bubble")
    if fam in ("ii_W", "ii_Wp"):
        return _bubble_dofs(face, reference_W_bubbles(poly, m, r, k, l, p), "bubble")
    jp = P.jp
    if m <= l + jp - 1:
        return _skeletal_dofs(face, P, jp)
    if fam in ("ij_alt", "ijp_alt"):
        return _bubble_dofs(face, reference_bubbles(poly, m, r, k, l), "bubble")
    return _bubble_dofs(face, reference_W_bubbles(poly, m, r, k, l, p), "bubble")


@lru_cache(maxsize=None)
def _reference_face_dofs(P: Params, m: int) -> int:
    K = Simplex(reference_vertices(P.n))
    return len(face_dofs(P, K.face(tuple(range(m + 1)))))


def dof_table(family: str, n: int, k: int, l: int, p: int = 1, r: int = 1, poly: str = "minus", q=None) -> list[int]:
    """DoF counts per face, indexed by face dimension 0..n."""
    P = normalize(family, n, k, l, p, r, poly, q)
    return [_reference_face_dofs(P, m) for m in range(n + 1)]


# ---------------------------------------------------------------------------
# Element specification


@dataclass(eq=False)
class ElementSpec:
    """A family instance on one cell: shape space, DoFs and expected dimension."""

    params: Params
    cell: Simplex
    basis: tuple = field(repr=False)  # spanning polynomial forms of the ambient space
    coefficients: tuple = field(repr=False)  # shape functions as combinations of ``basis``
    dofs: tuple = field(repr=False)
    expected_dim: int = 0
    notes: tuple = ()
    _traces: dict = field(default_factory=dict, repr=False)

    @property
    def family(self) -> str:
        return self.params.family

    @property
    def dim(self) -> int:
        return len(self.coefficients)

    @property
    def shape_basis(self) -> list[PolyForm]:
        from .polyspaces import combine

        return [combine(self.basis, c) for c in self.coefficients]

    def dofs_by_face(self) -> dict:
        out: dict = {}
        for d in self.dofs:
            out.setdefault(d.face.labels, []).append(d)
        return out

    def counts_by_dimension(self) -> list[int]:
        """Total DoFs on faces of each dimension (summed over faces of the cell)."""
        out = [0] * (self.cell.dim + 1)
        for d in self.dofs:
            out[d.face.dim] += 1
        return out

    def per_face_counts(self) -> list[int]:
        """DoFs on a single face of each dimension."""
        out = []
        for m in range(self.cell.dim + 1):
            faces = self.cell.faces(m)
            counts = {len([d for d in self.dofs if d.face.labels == f.labels]) for f in faces}
            if len(counts) != 1:
                raise AssertionError("faces of equal dimension carry different DoF counts")
            out.append(counts.pop())
        return out

    def basis_traces(self, face: Simplex) -> list[TraceValue]:
        if face.labels not in self._traces:
            self._traces[face.labels] = [restrict(face, b, "rho") for b in self.basis]
        return self._traces[face.labels]

    def dof_matrix(self) -> list[list[Fraction]]:
        """M[i][j] = dof_i(shape_j)."""
        rows_basis = []
        by_face = self.dofs_by_face()
        traces = {lab: self.basis_traces(ds[0].face) for lab, ds in by_face.items()}
        for d in self.dofs:
            tr = traces[d.face.labels]
            rows_basis.append([d.test.pair(t) for t in tr])
        if not self.coefficients:
            return [[] for _ in self.dofs]
        coeff_t = linalg.transpose(self.coefficients)
        return linalg.matmul(rows_basis, coeff_t) if rows_basis else []


def _shape_space(P: Params, cell: Simplex):
    n = P.n
    if P.family == "const_W":
        w = symmetric_space(n, P.k, P.l, P.p)
        basis = tuple(PolyForm.from_const(b) for b in w.basis)
        coeffs = tuple(tuple(Fraction(int(i == j)) for i in range(len(basis))) for j in range(len(basis)))
        return basis, coeffs
    p = P.p if P.symmetric else 0
    basis, coeffs = pw_kernel(P.poly, n, P.r, P.k, P.l, p, cell.vertices)
    return basis, coeffs


def build_element(family: str, n: int, k: int, l: int, p: int = 1, r: int = 1, poly: str = "minus", q=None, cell: Simplex | None = None) -> ElementSpec:
    """Assemble shape space and DoFs of a family instance on ``cell`` (default: reference simplex)."""
    P = normalize(family, n, k, l, p, r, poly, q)
    cell = Simplex(reference_vertices(n)) if cell is None else cell
    if cell.dim != n or cell.n != n:
        raise ElementError("the cell must be a full-dimensional simplex in R^n")
    basis, coeffs = _shape_space(P, cell)
    dofs = []
    for face in cell.all_faces():
        dofs.extend(face_dofs(P, face))
    notes = []
    if P.q is not None:
        notes.append("mixed order variant: conformity is checked here but has no published proof")
    return ElementSpec(P, cell, basis, coeffs, tuple(dofs), expected_dim(P), tuple(notes))


def constant_element(n: int, k: int, l: int, p: int, cell: Simplex | None = None) -> ElementSpec:
    """Constant W^{k,l}_[p] element with mirror-space DoFs (needs p <= k <= l <= n - p)."""
    return build_element("const_W", n, k, l, p, 1, cell=cell)


# ---------------------------------------------------------------------------
# Checks


@dataclass(frozen=True)
class UnisolvencyReport:
    family: str
    params: Params
    expected_dim: int
    shape_dim: int
    num_dofs: int
    rank: int
    determinant: Fraction | None
    verdict: bool
    reason: str = ""

    def line(self) -> str:
        P = self.params
        status = "PASS" if self.verdict else "FAIL"
        det = "" if self.determinant is None else f" det={self.determinant}"
        return (
            f"{P.family} n={P.n} k={P.k} l={P.l} p={P.p} r={P.r} poly={P.poly}"
            f"{'' if P.q is None else f' q={P.q}'}: dim={self.shape_dim} dofs={self.num_dofs}"
            f" rank={self.rank}{det} {status}{(' ' + self.reason) if self.reason else ''}"
        )


def unisolvency_check(spec: ElementSpec, det_limit: int = 24) -> UnisolvencyReport:
    """Exact rank of the DoF matrix; PASS iff it is square of full rank equal to the expected dimension."""
    N, D, E = spec.dim, len(spec.dofs), spec.expected_dim
    if not (N == D == E):
        return UnisolvencyReport(spec.family, spec.params, E, N, D, -1, None, False, "dimension mismatch")
    if N == 0:
        return UnisolvencyReport(spec.family, spec.params, E, N, D, 0, Fraction(1), True)
    M = spec.dof_matrix()
    rank = linalg.bareiss_rank(M, N)
    det = linalg.bareiss_det(M) if N <= det_limit else None
    return UnisolvencyReport(spec.family, spec.params, E, N, D, rank, det, rank == E)


def two_cell_patch(n: int) -> tuple[Simplex, Simplex]:
    """Reference simplex and its neighbour across the facet opposite the origin.

    The second cell reuses labels 1..n and adds vertex label n + 1 at (1,..,1),
    with a small shear so that no symmetry hides orientation errors.
    """
    K1 = Simplex(reference_vertices(n), tuple(range(n + 1)))
    apex = tuple(Fraction(1) + Fraction(i, 3) for i in range(n))
    verts = list(reference_vertices(n)[1:]) + [apex]
    K2 = Simplex(tuple(verts), tuple(range(1, n + 2)))
    return K1, K2


def family_trace(P: Params, face: Simplex, omega_or_tv, kind: str | None = None, jp: int | None = None) -> TraceValue:
    """The generalized trace whose single-valuedness defines the family's conformity.

    ``kind`` and ``jp`` override the family's own trace (``ii`` or ``ij``) and order.
    """
    tv = omega_or_tv if isinstance(omega_or_tv, TraceValue) else restrict(face, omega_or_tv, "rho")
    m = face.dim
    kind = P.trace if kind is None else kind
    jp = P.jp if jp is None else jp
    if kind == "ij" and m <= P.l + jp - 1:
        lo = max(0, m - jp + 1)
        return tv.select(range(lo, m + 1))
    return tv.select({tv.l})


@dataclass(frozen=True)
class ConformityReport:
    params: Params
    shared_faces: int
    checks: int
    failures: tuple
    verdict: bool

    def line(self) -> str:
        P = self.params
        status = "PASS" if self.verdict else "FAIL"
        return (
            f"{P.family} n={P.n} k={P.k} l={P.l} p={P.p} r={P.r} poly={P.poly}"
            f"{'' if P.q is None else f' q={P.q}'}: shared faces={self.shared_faces}"
            f" checks={self.checks} {status}"
        )


def _dual_basis(spec: ElementSpec):
    M = spec.dof_matrix()
    N = spec.dim
    # columns of inv(M) give dual shape functions in shape coordinates
    inv = linalg.inverse(M)
    coeff_t = linalg.transpose(spec.coefficients)  # basis x shape
    return linalg.matmul(coeff_t, inv) if N else []  # basis x dofs


def conformity_check(family_or_spec, n: int | None = None, k: int | None = None, l: int | None = None, p: int = 1, r: int = 1, poly: str = "minus", q=None, patch: tuple | None = None, trace: str | None = None, trace_order: int | None = None) -> ConformityReport:
    """Verify on a two-cell patch that the family's generalized trace is single-valued.

    For every face sigma of the shared facet and every local DoF d:
    if d sits on a face of sigma, the traces on sigma of the dual basis
    functions of d agree from both cells; otherwise they vanish.
    """
    if isinstance(family_or_spec, ElementSpec):
        P = family_or_spec.params
    else:
        P = normalize(family_or_spec, n, k, l, p, r, poly, q)
    K1, K2 = two_cell_patch(P.n) if patch is None else patch
    shared = sorted(set(K1.labels) & set(K2.labels))
    if len(shared) != P.n:
        raise ElementError("the two cells must share exactly one facet")
    for lab in shared:
        if K1.vertices[K1.labels.index(lab)] != K2.vertices[K2.labels.index(lab)]:
            raise ElementError("shared vertices have different coordinates")
    specs = [build_element(P.family, P.n, P.k, P.l, P.p, P.r, P.poly, P.q, cell=K) for K in (K1, K2)]
    for s in specs:
        if s.dim != len(s.dofs):
            return ConformityReport(P, 0, 0, ("dimension mismatch",), False)
    duals = [_dual_basis(s) for s in specs]
    dof_ids = [[(t.face.labels, t.index) for t in _face_local_index(s)] for s in specs]
    facet = K1.face_by_labels(shared)
    failures = []
    checks = 0
    nfaces = 0
    for face in facet.all_faces():
        nfaces += 1
        per_cell = []
        for s, dual in zip(specs, duals):
            traces = [family_trace(P, face, t, trace, trace_order) for t in s.basis_traces(face)]
            keys = sorted({key for t in traces for key in t.components})
            mat = [[t.components.get(key, Fraction(0)) for t in traces] for key in keys]
            vals = linalg.matmul(mat, dual) if mat and dual else []
            per_cell.append((keys, vals))
        fl = set(face.labels)
        tables = []
        for (keys, vals), ids in zip(per_cell, dof_ids):
            table = {}
            for j, did in enumerate(ids):
                table[did] = {key: vals[i][j] for i, key in enumerate(keys) if vals[i][j]}
            tables.append(table)
        all_ids = set(tables[0]) | set(tables[1])
        for did in sorted(all_ids):
            local = set(did[0]) <= fl
            t1 = tables[0].get(did)
            t2 = tables[1].get(did)
            checks += 1
            if local:
                if t1 is None or t2 is None or t1 != t2:
                    failures.append((face.labels, did, "trace differs"))
            else:
                for t in (t1, t2):
                    if t:
                        failures.append((face.labels, did, "nonlocal DoF has nonzero trace"))
                        break
    return ConformityReport(P, nfaces, checks, tuple(failures), not failures)


def _face_local_index(spec: ElementSpec):
    """DoFs in order; the identifier is (face labels, index within that face)."""
    out = []
    seen: dict = {}
    for d in spec.dofs:
        i = seen.get(d.face.labels, 0)
        seen[d.face.labels] = i + 1
        out.append(_Tagged(d.face, i))
    return out


@dataclass(frozen=True)
class _Tagged:
    face: Simplex
    index: int


# ---------------------------------------------------------------------------
# Proxy names for reports

PROXY_NAMES = {
    # (family, n, k, l, p)
    ("ii_W", 3, 1, 1, 1): "Regge",
    ("ii_alt", 3, 1, 1, 1): "full Regge",
    ("ii_alt", 3, 2, 1, 1): "full MCS",
    ("ii_alt", 3, 1, 2, 1): "full MCS^T",
    ("ii_alt", 3, 2, 2, 1): "full HHJ",
    ("ii_W", 3, 2, 2, 1): "HHJ",
    ("ii_W", 3, 1, 2, 1): "traceless MCS^T",
    ("ii_Wp", 3, 2, 1, 2): "MCS",
    ("ij_W", 3, 1, 1, 1): "Regge",
    ("ij_W", 3, 1, 2, 1): "HLZ",
    ("ij_W", 3, 2, 2, 1): "HHJ",
    ("ijp_W", 3, 2, 1, 2): "MCS",
    ("ijp_W", 3, 1, 1, 1): "Regge",
    ("ijp_W", 3, 1, 2, 1): "HLZ",
    ("ijp_W", 3, 2, 2, 1): "HHJ",
    ("ii_W", 4, 3, 3, 1): "4D HHJ",
    ("ij_W", 4, 3, 3, 1): "4D HHJ",
    ("ii_W", 4, 1, 1, 1): "4D Regge",
    ("ij_W", 4, 1, 1, 1): "4D Regge",
    ("const_W", 3, 1, 2, 1): "MCS^T (constant)",
    ("const_W", 4, 2, 2, 2): "constant W^{2,2}_[2]",
}

_GENERIC = {
    (0, 0): "Lagrange", (1, 0): "first type Nedelec", (2, 0): "Raviart-Thomas", (3, 0): "DG",
}


def proxy_name(P: Params) -> str | None:
    if P.r != 1 or P.poly != "minus":
        return None
    name = PROXY_NAMES.get((P.family, P.n, P.k, P.l, P.p))
    if name is None and P.n == 3 and P.l == 0:
        name = _GENERIC.get((P.k, 0))
    return name
