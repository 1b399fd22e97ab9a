from math import comb

import pytest

from tensorwhitney import linalg
from tensorwhitney.bubbles import (
    bubble_basis,
    bubble_dim_formula,
    bubble_nullspace,
    bubble_W_basis,
    n_space,
    n_space_nullspace,
    poly_kind,
    reference_simplex,
    s_dagger_rank_on_bubbles,
    span_equal,
    w_bubble_dim_formula,
)
from tensorwhitney.geometry import Simplex, restrict
from tensorwhitney.polyspaces import apply_S_dagger, coefficient_matrix


def _const_span_equal(a, b):
    if not a and not b:
        return True
    ra = linalg.bareiss_rank([f.vector() for f in a]) if a else 0
    rb = linalg.bareiss_rank([f.vector() for f in b]) if b else 0
    return ra == rb == linalg.bareiss_rank([f.vector() for f in a + b])


def test_n_space_examples():
    K = Simplex.reference(3)
    assert n_space(K.face((0, 1)), K, 1) == []
    assert len(n_space(K.face((0, 1, 2)), K, 2)) == 2
    K4 = Simplex.reference(4)
    assert len(n_space(K4.face((0, 1, 2)), K4, 2)) == 1


@pytest.mark.parametrize("n", range(1, 5))
def test_n_space_matches_definition(n):
    K = Simplex.reference(n)
    for sigma in K.all_faces():
        for l in range(n + 1):
            a = n_space(sigma, K, l)
            b = n_space_nullspace(sigma, K, l)
            d = sigma.dim
            assert len(a) == (comb(d, l + d - n) if 0 <= l + d - n <= d else 0)
            assert _const_span_equal(a, b)


@pytest.mark.parametrize("n", range(1, 4))
@pytest.mark.parametrize("r", [1, 2])
@pytest.mark.parametrize("poly", ["minus", "full"])
def test_structural_bubbles_equal_definitional_nullspace(n, r, poly):
    K = reference_simplex(n)
    for k in range(n + 1):
        for l in range(n + 1):
            a = list(bubble_basis(K, poly, k, l, 1, r).basis)
            b = bubble_nullspace(K, poly, k, l, r)
            assert len(a) == len(b) == bubble_dim_formula(poly, n, r, k, l)
            assert span_equal(a, b)


@pytest.mark.parametrize("r", [1, 2])
def test_bubbles_on_a_sheared_cell(r):
    K = Simplex(((0, 0, 0), (2, 0, 0), (1, 3, 0), (1, 1, 5)))
    for k, l in [(1, 1), (2, 2), (1, 2), (2, 1)]:
        a = list(bubble_basis(K, "minus", k, l, 1, r).basis)
        b = bubble_nullspace(K, "minus", k, l, r)
        assert span_equal(a, b)


@pytest.mark.parametrize("m", range(1, 4))
def test_bubbles_have_vanishing_double_trace(m):
    K = reference_simplex(m)
    for k in range(m + 1):
        for l in range(m + 1):
            for f in bubble_basis(K, "minus", k, l, 1, 2).basis:
                for face in K.all_faces():
                    if face.dim < m:
                        assert restrict(face, f, "iota").is_zero()


@pytest.mark.parametrize(
    "k,expected",
    [(1, {1: 1, 2: 3, 3: 0, 4: 0}), (2, {2: 1, 3: 8, 4: 10, 5: 0}), (3, {3: 1, 4: 15, 5: 45, 6: 35})],
)
def test_lowest_order_bubble_tables(k, expected):
    for m, dim in expected.items():
        assert bubble_dim_formula("minus", m, 1, k, k) == dim
        if m <= 4:
            assert len(bubble_basis(reference_simplex(m), "minus", k, k, 1, 1).basis) == dim


def test_w_bubble_examples():
    assert bubble_W_basis(reference_simplex(1), 1, 1).dim == 1
    assert bubble_W_basis(reference_simplex(2), 1, 1).dim == 0
    assert bubble_W_basis(reference_simplex(3), 2, 2).dim == 2
    assert bubble_W_basis(reference_simplex(4), 2, 2, p=2).dim == 5


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("r", [1, 2])
def test_s_dagger_surjective_on_bubbles(n, r):
    K = reference_simplex(n)
    for poly in ("minus", "full"):
        for k in range(n + 1):
            for l in range(n + 1):
                for p in range(1, n + 1):
                    if k - p < 0 or l + p > n or k > l + p - 1:
                        continue
                    rank = s_dagger_rank_on_bubbles(K, k, l, p, r, poly)
                    assert rank == bubble_dim_formula(poly, n, r, k - p, l + p)
                    W = bubble_W_basis(K, k, l, p, r, poly)
                    assert W.dim == w_bubble_dim_formula(poly, n, r, k, l, p)
                    assert all(apply_S_dagger(f, p).is_zero() for f in W.basis)


@pytest.mark.parametrize("n", range(1, 6))
def test_vanishing_threshold(n):
    for r in range(1, 4):
        for k in range(n + 1):
            for l in range(n + 1):
                if n > l + k + r - 1:
                    assert bubble_dim_formula("minus", n, r, k, l) == 0


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("r", range(1, 6))
def test_high_order_regge_identity(n, r):
    diff = bubble_dim_formula("full", n, r, 1, 1) - bubble_dim_formula("full", n, r, 0, 2)
    assert diff == comb(n + 1, 2) * comb(r + 1, n)


@pytest.mark.parametrize("n,r", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_high_order_regge_identity_by_nullspace(n, r):
    K = reference_simplex(n)
    diff = len(bubble_nullspace(K, "full", 1, 1, r)) - len(bubble_nullspace(K, "full", 0, 2, r))
    assert diff == comb(n + 1, 2) * comb(r + 1, n)


def _psi(m, l, p):
    def B(t, j):
        return bubble_dim_formula("minus", m, 1, t, j) if t >= 0 and 0 <= j <= m else 0

    return sum((-1) ** t * (B(t, l) - B(t - p, l + p)) for t in range(l + p))


@pytest.mark.parametrize("m", range(0, 8))
def test_bubble_alternating_sums(m):
    """Psi_sigma vanishes on faces of dimension at least l + p; below it is (-1)^(m-l)."""
    for l in range(m + 2):
        for p in range(1, m + 3):
            if m >= l + p:
                assert _psi(m, l, p) == 0
            elif m >= l:
                assert _psi(m, l, p) == (-1) ** (m - l)
            else:
                assert _psi(m, l, p) == 0


def test_poly_kind_and_errors():
    assert poly_kind("Pminus") == poly_kind("Pr_minus") == "minus"
    assert poly_kind("Pr") == "full"
    with pytest.raises(ValueError):
        poly_kind("Q")
    K = Simplex.reference(3)
    with pytest.raises(ValueError):
        bubble_basis(K.face((0, 1, 2)), "minus", 1, 1)
