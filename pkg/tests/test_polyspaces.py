from fractions import Fraction
from itertools import combinations
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tensorwhitney import linalg
from tensorwhitney.bubbles import span_equal
from tensorwhitney.exterior import ConstForm
from tensorwhitney.geometry import Simplex, restrict, simplex_moment
from tensorwhitney.polyspaces import (
    BarycentricMonomial,
    PolyForm,
    apply_S_dagger,
    basis_Pr,
    basis_Pr_minus,
    coefficient_matrix,
    combine,
    dim_P,
    dim_PW,
    dim_Pr,
    dim_Pr_minus,
    dim_scalar_bubble,
    homogeneous_forms,
    kernel_space_PrW,
    koszul,
    lambda_poly,
    poly_eval,
    reference_vertices,
    tensor_basis,
    whitney_form,
)


def _rank(forms):
    forms = [f for f in forms if not f.is_zero()]
    if not forms:
        return 0
    rows, _ = coefficient_matrix(forms)
    return linalg.bareiss_rank(rows)


def _full_space(n, r, k):
    return [f for s in range(r + 1) for f in homogeneous_forms(n, s, k)]


def _minus_space(n, r, k):
    """P_{r-1} Lambda^k + kappa H_{r-1} Lambda^{k+1}, built from monomials."""
    out = [f for s in range(r) for f in homogeneous_forms(n, s, k)]
    if k + 1 <= n:
        out += [koszul(f) for f in homogeneous_forms(n, r - 1, k + 1)]
    return out


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("r", range(1, 4))
def test_dimension_formulas(n, r):
    for k in range(n + 1):
        for l in range(n + 1):
            assert dim_Pr_minus(n, r, k, l) == comb(n + r, k + r) * comb(r + k - 1, k) * comb(n, l)
            assert dim_Pr(n, r, k, l) == comb(n + r, n) * comb(n, k) * comb(n, l)


@pytest.mark.parametrize("n", range(1, 4))
@pytest.mark.parametrize("r", range(1, 4))
def test_scalar_bases_against_monomial_spaces(n, r):
    for k in range(n + 1):
        minus = [a.form for a in basis_Pr_minus(n, r, k)]
        full = [a.form for a in basis_Pr(n, r, k)]
        assert len(minus) == _rank(minus) == _rank(_minus_space(n, r, k)) == dim_Pr_minus(n, r, k)
        assert len(full) == _rank(full) == _rank(_full_space(n, r, k)) == dim_Pr(n, r, k)
        assert span_equal(minus, [f for f in _minus_space(n, r, k) if not f.is_zero()])
        assert span_equal(full, _full_space(n, r, k))


@pytest.mark.parametrize("n", range(1, 4))
@pytest.mark.parametrize("r", range(1, 4))
def test_tensor_dimensions(n, r):
    for poly in ("minus", "full"):
        for k in range(n + 1):
            for l in range(n + 1):
                basis = tensor_basis(poly, n, r, k, l)
                assert len(basis) == _rank(basis) == dim_P(poly, n, r, k, l)


def test_basis_examples():
    assert len(basis_Pr_minus(3, 1, 1)) == 6
    assert len(basis_Pr_minus(3, 2, 1)) == 20
    assert len(basis_Pr(3, 1, 1)) == 12
    assert len(basis_Pr(2, 2, 1)) == 12
    with pytest.raises(ValueError):
        basis_Pr_minus(3, 0, 1)


def _scalar_bubble_oracle(basis, m, r, k):
    """Dimension of the forms with vanishing pullback on every facet of the reference m-simplex."""
    if m == 0:
        return 1 if k == 0 else 0
    K = Simplex.reference(m)
    forms = [a.form for a in basis(m, r, k)]
    rows = []
    for i in range(m + 1):
        facet = K.face([j for j in range(m + 1) if j != i])
        traces = [restrict(facet, f, "iota") for f in forms]
        keys = sorted({key for t in traces for key in t.components})
        rows += [[t.components.get(key, Fraction(0)) for t in traces] for key in keys]
    return len(forms) - (linalg.bareiss_rank(rows, len(forms)) if rows else 0)


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("r", range(1, 4))
def test_attribution_counts_match_bubble_dims(n, r):
    if n == 4 and r == 3:
        return
    for poly, basis in (("minus", basis_Pr_minus), ("full", basis_Pr)):
        for k in range(n + 1):
            counts = {}
            for a in basis(n, r, k):
                counts[a.face] = counts.get(a.face, 0) + 1
            for m in range(n + 1):
                want = _scalar_bubble_oracle(basis, m, r, k) if k <= m else 0
                assert want == dim_scalar_bubble(poly, m, r, k)
                for face in combinations(range(n + 1), m + 1):
                    assert counts.get(face, 0) == want


def test_whitney_edge_form_1d():
    phi = whitney_form((0, 1), n=1)
    v = reference_vertices(1)
    expected = PolyForm.from_const(ConstForm.dx(1, 1), {(0,): Fraction(1)})
    assert phi == expected
    # average of the coefficient over the edge (normalized measure) is 1
    assert poly_eval({m: c for (m, _, _), c in phi.terms.items()}, [Fraction(1, 2)]) == 1
    assert v == ((Fraction(0),), (Fraction(1),))


@pytest.mark.parametrize("n", range(1, 5))
def test_whitney_duality(n):
    K = Simplex.reference(n)
    for k in range(n + 1):
        faces = list(combinations(range(n + 1), k + 1))
        forms = [whitney_form(s, n=n) for s in faces]
        assert _rank(forms) == comb(n + 1, k + 1)
        for s, phi in zip(faces, forms):
            for t in faces:
                tv = restrict(K.face(t), phi, "iota")
                if t != s:
                    assert tv.is_zero()
                else:
                    # the pullback is a nonzero constant multiple of the volume form
                    assert len(tv.components) == 1
                    ((mono, _, _), c), = tv.components.items()
                    assert sum(mono) == 0 and c != 0


def test_barycentric_monomials_partition_unity():
    v = reference_vertices(3)
    total = {}
    for i in range(4):
        for m, c in lambda_poly(v, i).items():
            total[m] = total.get(m, 0) + c
    assert {m: c for m, c in total.items() if c} == {(0, 0, 0): 1}
    with pytest.raises(ValueError):
        BarycentricMonomial((1, -1))
    assert BarycentricMonomial((2, 0, 1)).degree == 3
    assert simplex_moment((1, 0)) == Fraction(1, 3)


def test_koszul_examples():
    dx1 = PolyForm.from_const(ConstForm.dx(3, 1))
    assert koszul(dx1) == PolyForm(3, 0, 0, {((1, 0, 0), (), ()): 1})
    assert koszul(PolyForm.from_const(ConstForm(3, 0, 0, {((), ()): 1}))).is_zero()


@pytest.mark.parametrize("k", range(0, 4))
def test_koszul_squares_to_zero(k):
    for s in range(3):
        for f in homogeneous_forms(3, s, k):
            assert koszul(koszul(f)).is_zero()


@pytest.mark.parametrize("k", range(0, 4))
@pytest.mark.parametrize("l", range(0, 4))
def test_koszul_anticommutes_with_s_dagger(k, l):
    for s in range(3):
        for f in homogeneous_forms(3, s, k, l):
            assert koszul(apply_S_dagger(f)) == -apply_S_dagger(koszul(f))


@pytest.mark.parametrize("n", range(1, 4))
def test_koszul_exactness(n):
    """ker kappa on H_s Lambda^k equals kappa H_{s-1} Lambda^{k+1}."""
    for s in range(1, 3):
        for k in range(1, n):
            dom = homogeneous_forms(n, s, k)
            images = [koszul(f) for f in dom]
            rank_kappa = _rank(images)
            kernel_dim = len(dom) - rank_kappa
            image_dim = _rank([koszul(f) for f in homogeneous_forms(n, s - 1, k + 1)])
            assert kernel_dim == image_dim


@pytest.mark.parametrize(
    "n,r,k,l,p,dim",
    [(3, 1, 1, 1, 1, 6), (3, 1, 1, 2, 1, 14), (3, 2, 1, 1, 1, 30), (3, 1, 2, 2, 1, 6), (3, 1, 2, 1, 2, 8)],
)
def test_kernel_space_examples(n, r, k, l, p, dim):
    forms = kernel_space_PrW(n, r, k, l, p)
    assert len(forms) == _rank(forms) == dim == dim_PW("minus", n, r, k, l, p)
    assert all(apply_S_dagger(f, p).is_zero() for f in forms)


@pytest.mark.parametrize("n", range(1, 4))
@pytest.mark.parametrize("r", range(1, 4))
def test_s_dagger_surjective_on_polynomial_spaces(n, r):
    for poly in ("minus", "full"):
        for k in range(n + 1):
            for l in range(n + 1):
                for p in range(1, n + 1):
                    if k - p < 0 or l + p > n or k > l + p - 1:
                        continue
                    images = [apply_S_dagger(f, p) for f in tensor_basis(poly, n, r, k, l)]
                    assert _rank(images) == dim_P(poly, n, r, k - p, l + p)


@given(st.integers(0, 2), st.integers(0, 3), st.lists(st.integers(-3, 3), min_size=30, max_size=30))
def test_koszul_linear_and_degree_raising(s, k, coeffs):
    forms = homogeneous_forms(3, s, k)
    f = combine(forms, coeffs[: len(forms)] + [0] * max(0, len(forms) - len(coeffs)))
    kf = koszul(f)
    if k == 0 or f.is_zero():
        assert kf.is_zero()
    else:
        assert kf.degree in (-1, s + 1)
        assert kf == combine([koszul(g) for g in forms], coeffs[: len(forms)] + [0] * max(0, len(forms) - len(coeffs)))
