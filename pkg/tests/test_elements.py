from math import comb

import pytest

from tensorwhitney import linalg
from tensorwhitney.elements import (
    ElementError,
    build_element,
    conformity_check,
    constant_element,
    dof_table,
    normalize,
    proxy_name,
    two_cell_patch,
    unisolvency_check,
)
from tensorwhitney.geometry import Simplex
from tensorwhitney.polyspaces import coefficient_matrix, key_index


def _total(family, n, k, l, p=1, r=1, poly="minus", q=None):
    return sum(comb(n + 1, m + 1) * c for m, c in enumerate(dof_table(family, n, k, l, p, r, poly, q)))


@pytest.mark.parametrize(
    "args,dim,per_face,name",
    [
        (("ii_W", 3, 1, 1), 6, [0, 1, 0, 0], "Regge"),
        (("ii_alt", 3, 1, 1), 18, [0, 1, 3, 0], "full Regge"),
        (("ii_W", 3, 2, 2), 6, [0, 0, 1, 2], "HHJ"),
        (("ij_W", 3, 2, 2), 6, [0, 0, 1, 2], "HHJ"),
        (("ijp_W", 3, 2, 1, 2), 8, [0, 0, 2, 0], "MCS"),
        (("ij_Wp", 3, 2, 1, 2), 8, [0, 0, 2, 0], "MCS"),
        (("ij_W", 3, 1, 2), 14, [0, 2, 0, 2], "HLZ"),
        (("ii_W", 4, 3, 3), 10, [0, 0, 0, 1, 5], "4D HHJ"),
        (("ii_W", 4, 2, 2), 20, [0, 0, 1, 2, 0], None),
    ],
)
def test_named_elements(args, dim, per_face, name):
    spec = build_element(*args)
    rep = unisolvency_check(spec)
    assert rep.verdict and spec.dim == dim == rep.rank
    assert spec.per_face_counts() == per_face
    assert rep.determinant != 0
    if name:
        assert proxy_name(spec.params) == name


def test_constant_elements():
    spec = constant_element(4, 2, 2, 2)
    assert spec.dim == 35
    assert spec.per_face_counts() == [0, 0, 1, 5, 0]
    assert unisolvency_check(spec).verdict
    mcs_t = constant_element(3, 1, 2, 1)
    assert mcs_t.dim == 8 and unisolvency_check(mcs_t).verdict
    with pytest.raises(ElementError, match="p <= k <= l <= n - p"):
        constant_element(3, 2, 2, 2)


@pytest.mark.parametrize("n,k", [(3, 1), (3, 2), (4, 2)])
def test_constant_p1_coincides_with_ii_w(n, k):
    a = constant_element(n, k, k, 1)
    b = build_element("ii_W", n, k, k, 1, 1)
    assert a.dim == b.dim
    index = key_index(a.shape_basis + b.shape_basis)
    ra = coefficient_matrix(a.shape_basis, index)[0]
    rb = coefficient_matrix(b.shape_basis, index)[0]
    assert linalg.bareiss_rank(ra + rb) == a.dim
    assert a.counts_by_dimension() == b.counts_by_dimension()


def test_dof_table_examples():
    assert dof_table("ijp_alt", 4, 2, 2, 2) == [0, 0, 5, 0, 10]
    assert dof_table("ijp_alt", 6, 3, 3, 3)[3] == 19
    assert dof_table("ii_W", 3, 1, 1) == [0, 1, 0, 0]


@pytest.mark.parametrize("n", range(1, 5))
def test_dof_count_conservation(n):
    """Moving DoFs between faces keeps the total per cell."""
    for k in range(n + 1):
        for l in range(n + 1):
            for poly in ("minus", "full"):
                base = _total("ii_alt", n, k, l, 1, 1, poly)
                assert base == _total("ij_alt", n, k, l, 1, 1, poly)
                for p in range(1, n + 1):
                    assert base == _total("ijp_alt", n, k, l, p, 1, poly)
                if k <= l:
                    assert _total("ii_W", n, k, l, 1, 1, poly) == _total("ij_W", n, k, l, 1, 1, poly)
                for p in range(2, n + 1):
                    if k <= l + p - 1:
                        assert _total("ii_Wp", n, k, l, p, 1, poly) == _total("ijp_W", n, k, l, p, 1, poly)


@pytest.mark.parametrize("n", range(1, 5))
def test_symmetry_reduction_is_local(n):
    """W and Alt counts agree on faces of dimension below l + p."""
    for k in range(n + 1):
        for l in range(n + 1):
            for r in (1, 2):
                alt = dof_table("ii_alt", n, k, l, 1, r)
                for p in range(1, n + 1):
                    if k > l + p - 1:
                        continue
                    w = dof_table("ii_W" if p == 1 else "ii_Wp", n, k, l, p, r)
                    assert all(w[m] == alt[m] for m in range(min(l + p, n + 1)))


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("r", [1, 2, 3])
def test_unisolvency_low_dimensions(n, r):
    from tensorwhitney.cli import family_instances

    for case in family_instances(n, r, ("minus", "full")):
        if case[5] != r or case[1] != n:
            continue
        rep = unisolvency_check(build_element(*case))
        assert rep.verdict, rep.line()


def test_unisolvency_on_a_sheared_cell():
    K = Simplex(((0, 0, 0), (3, 0, 0), (1, 2, 0), (1, 1, 4)))
    for args in [("ii_W", 3, 1, 1), ("ij_W", 3, 1, 2), ("ijp_W", 3, 2, 1, 2), ("ii_alt", 3, 2, 1)]:
        assert unisolvency_check(build_element(*args, cell=K)).verdict


def test_mixed_order_variant():
    P = normalize("ijp_W", 3, 2, 1, 2, q=1)
    assert P.jp == 1 and P.p == 2
    spec = build_element("ijp_W", 3, 2, 1, 2, q=1)
    assert unisolvency_check(spec).verdict
    assert normalize("ijp_W", 3, 2, 1, 2, q=2).q is None
    assert dof_table("ijp_W", 6, 3, 3, 3, q=2) == [0, 0, 0, 10, 0, 45, 28]
    assert dof_table("ijp_W", 6, 3, 3, 3) == [0, 0, 0, 19, 0, 0, 28]


@pytest.mark.parametrize(
    "args,match",
    [
        (("nope", 3, 1, 1), "unknown family"),
        (("ii_W", 3, 2, 1), "k <= l \\+ p - 1"),
        (("ij_W", 3, 1, 1, 2), "p = 1 family"),
        (("ii_alt", 3, 4, 1), "0 <= k, l <= n"),
        (("ii_alt", 0, 0, 0), "n must be"),
        (("ijp_W", 3, 1, 1, 2, 0), "r must be"),
        (("ii_W", 3, 1, 1, 1, 1, "cubic"), "unknown polynomial"),
    ],
)
def test_parameter_errors(args, match):
    with pytest.raises(ElementError, match=match):
        normalize(*args)


def test_mixed_order_errors():
    with pytest.raises(ElementError, match="only defined for ijp_W"):
        normalize("ii_W", 3, 1, 1, q=1)
    with pytest.raises(ElementError, match="1 <= q <= p"):
        normalize("ijp_W", 3, 2, 1, 2, q=3)


def test_aliases():
    assert normalize("ij_Wp", 3, 2, 1, 2).family == "ijp_W"
    assert normalize("ii_W", 3, 1, 1, poly="Pr_minus").poly == "minus"
    assert normalize("ii_W", 3, 1, 1, poly="Pr").poly == "full"


def test_two_cell_patch_shares_a_facet():
    K1, K2 = two_cell_patch(3)
    assert set(K1.labels) & set(K2.labels) == {1, 2, 3}
    for lab in (1, 2, 3):
        assert K1.vertices[K1.labels.index(lab)] == K2.vertices[K2.labels.index(lab)]


@pytest.mark.parametrize(
    "args",
    [
        ("ii_W", 2, 1, 1),
        ("ii_W", 3, 1, 1),
        ("ij_W", 3, 2, 2),
        ("ijp_W", 3, 2, 1, 2),
        ("ij_W", 3, 1, 2),
        ("ij_W", 3, 0, 2),
        ("ii_alt", 3, 1, 1, 1, 2),
        ("ij_alt", 2, 1, 1, 1, 2, "full"),
        ("const_W", 3, 1, 2),
        ("ii_W", 4, 3, 3),
    ],
)
def test_conformity(args):
    rep = conformity_check(*args)
    assert rep.verdict, rep.failures[:3]
    assert rep.checks > 0


def test_conformity_negative_control():
    """Regge functions are not tangential-normal continuous on edges."""
    assert conformity_check("ii_W", 3, 1, 1, trace="ij", trace_order=1).verdict
    rep = conformity_check("ii_W", 3, 1, 1, trace="ij", trace_order=2)
    assert not rep.verdict
    assert any(f[2] == "trace differs" for f in rep.failures)


def test_conformity_patch_validation():
    K1, K2 = two_cell_patch(2)
    K3 = Simplex(K2.vertices, (5, 6, 7))
    with pytest.raises(ElementError):
        conformity_check("ii_W", 2, 1, 1, patch=(K1, K3))


@pytest.mark.parametrize(
    "case",
    [
        ("ii_W", 4, 1, 1, 1, 2, "minus"),
        ("ii_Wp", 4, 1, 1, 2, 2, "minus"),
        ("ii_alt", 4, 1, 1, 1, 2, "minus"),
        ("ij_W", 4, 3, 3, 1, 2, "full"),
        ("ij_alt", 4, 1, 1, 1, 2, "full"),
        ("ijp_W", 4, 1, 3, 3, 2, "full"),
        ("ijp_alt", 4, 1, 3, 3, 2, "full"),
    ],
)
def test_unisolvency_4d_second_order(case):
    """A sample of the second-order 4D instances; the full sweep is a CLI run."""
    spec = build_element(*case)
    rep = unisolvency_check(spec)
    assert rep.verdict and spec.dim == spec.expected_dim
