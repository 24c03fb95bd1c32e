"""Tests for the prime-field linear algebra kernel."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snakedec import gf
from snakedec.errors import DimensionMismatch, FieldMismatch, SizeLimitExceeded, Singular


def M(rows, p):
    return gf.Matrix.from_rows(rows, p)


def fe(v, p):
    return gf.FieldElem(v, p)


# ---------------------------------------------------------------------------
# independent little-integer oracle for small conjugacy questions


def _int_mul(a, b, p):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) % p for j in range(n)] for i in range(n)]


def _int_gl2(p):
    out = []
    for a, b, c, d in itertools.product(range(p), repeat=4):
        if (a * d - b * c) % p:
            out.append([[a, b], [c, d]])
    return out


def _int_inverse2(m, p):
    a, b = m[0]
    c, d = m[1]
    det_inv = pow((a * d - b * c) % p, p - 2, p)
    return [[d * det_inv % p, -b * det_inv % p], [-c * det_inv % p, a * det_inv % p]]


def _brute_conjugate2(a, b, p):
    return any(_int_mul(_int_mul(s, a, p), _int_inverse2(s, p), p) == b for s in _int_gl2(p))


# ---------------------------------------------------------------------------
# field elements


def test_field_elem_arithmetic():
    a, b = fe(2, 3), fe(2, 3)
    assert (a + b).value == 1
    assert (a - b).value == 0
    assert (a * b).value == 1
    assert (a / b).value == 1
    assert (-a).value == 1
    assert a.inverse().value == 2
    assert bool(fe(0, 3)) is False and bool(a) is True
    assert (a + 2).value == 1 and (2 * a).value == 1


def test_field_elem_validation():
    with pytest.raises(ValueError):
        gf.FieldElem(1, 4)
    with pytest.raises(ValueError):
        gf.FieldElem(1, 1)
    with pytest.raises(Singular):
        fe(0, 5).inverse()
    with pytest.raises(FieldMismatch):
        fe(1, 2) + fe(1, 3)
    assert fe(7, 5).value == 2


# ---------------------------------------------------------------------------
# matrices


def test_matrix_basics():
    a = M([[1, 1], [0, 1]], 2)
    assert a.rows == 2 and a.cols == 2
    assert a[0, 1].value == 1
    assert (a * a) == gf.Matrix.identity(2, 2)
    assert a.transpose() == M([[1, 0], [1, 1]], 2)
    assert (a + a) == gf.Matrix.zeros(2, 2, 2)
    assert a.apply((fe(0, 2), fe(1, 2))) == (fe(1, 2), fe(1, 2))
    with pytest.raises(DimensionMismatch):
        a * M([[1], [0], [0]], 2)


def test_invert_examples():
    assert gf.invert(gf.Matrix.identity(3, 2)) == gf.Matrix.identity(3, 2)
    a = M([[1, 1], [0, 1]], 2)
    assert gf.invert(a) == a
    assert gf.invert(M([[2]], 3)) == M([[2]], 3)
    with pytest.raises(Singular):
        gf.invert(M([[1, 1], [1, 1]], 2))
    with pytest.raises(DimensionMismatch):
        gf.invert(M([[1, 0]], 2))


def test_block_diag():
    b = gf.block_diag([M([[2]], 3), gf.Matrix.identity(2, 3)])
    assert b == M([[2, 0, 0], [0, 1, 0], [0, 0, 1]], 3)


# ---------------------------------------------------------------------------
# permutations


def test_perm_matrix_is_a_homomorphism():
    for a in itertools.permutations(range(3)):
        for b in itertools.permutations(range(3)):
            lhs = gf.perm_matrix(gf.perm_compose(a, b), 2)
            rhs = gf.perm_matrix(a, 2) * gf.perm_matrix(b, 2)
            assert lhs == rhs
    for a in itertools.permutations(range(4)):
        assert gf.perm_compose(a, gf.perm_inverse(a)) == gf.perm_identity(4)


def test_cycle_type():
    assert gf.cycle_type((1, 0, 2)) == (1, 2)
    assert gf.cycle_type((1, 2, 0)) == (3,)
    assert gf.cycle_type(()) == ()


# ---------------------------------------------------------------------------
# elementary factors and factorizations


def test_factor_matrix_shapes():
    p = 3
    assert gf.factor_matrix(gf.Transposition(1, 2), 2, p) == M([[0, 1], [1, 0]], p)
    assert gf.factor_matrix(gf.AddUnit(1, 2), 2, p) == M([[1, 1], [0, 1]], p)
    assert gf.factor_matrix(gf.Scale(2, fe(2, p)), 2, p) == M([[1, 0], [0, 2]], p)
    with pytest.raises(DimensionMismatch):
        gf.factor_matrix(gf.AddUnit(1, 3), 2, p)
    with pytest.raises(ValueError):
        gf.Transposition(1, 1)
    with pytest.raises(ValueError):
        gf.Scale(1, fe(0, 3))


def test_ltu_trivial_cases():
    assert gf.ltu_factorize(gf.Matrix.identity(3, 2)) == ([], (0, 1, 2), [])
    swap = gf.perm_matrix((1, 0), 2)
    assert gf.ltu_factorize(swap) == ([], (1, 0), [])


def test_ltu_mixed_example():
    # the topmost-pivot sweep sends [[1,1],[1,0]] to L=E_21, T=id, U=E_12
    a = M([[1, 1], [1, 0]], 2)
    lower, sigma, upper = gf.ltu_factorize(a)
    assert sigma == (0, 1)
    assert lower == [gf.AddUnit(2, 1)]
    assert upper == [gf.AddUnit(1, 2)]
    reasm = (
        gf.factor_product(lower, 2, 2)
        * gf.perm_matrix(sigma, 2)
        * gf.factor_product(upper, 2, 2)
    )
    assert reasm == a


def test_ltu_structure_and_reassembly_exhaustive_gl2():
    for p in (2, 3):
        for rows in _int_gl2(p):
            a = M(rows, p)
            lower, sigma, upper = gf.ltu_factorize(a)
            for f in lower:
                assert isinstance(f, (gf.AddUnit, gf.Scale))
                if isinstance(f, gf.AddUnit):
                    assert f.i > f.j
            for f in upper:
                assert isinstance(f, (gf.AddUnit, gf.Scale))
                if isinstance(f, gf.AddUnit):
                    assert f.i < f.j
            reasm = (
                gf.factor_product(lower, 2, p)
                * gf.perm_matrix(sigma, p)
                * gf.factor_product(upper, 2, p)
            )
            assert reasm == a


def test_ltu_rejects_singular():
    with pytest.raises(Singular):
        gf.ltu_factorize(M([[1, 1], [1, 1]], 2))


def test_elementary_factorize_examples():
    assert gf.elementary_factorize(gf.Matrix.identity(4, 3)) == []
    assert gf.elementary_factorize(M([[2, 0], [0, 1]], 3)) == [gf.Scale(1, fe(2, 3))]
    # unit-coefficient additions only: E_12^2 = D_1^2 E_12 D_1^(1/2)
    assert gf.elementary_factorize(M([[1, 2], [0, 1]], 3)) == [
        gf.Scale(1, fe(2, 3)),
        gf.AddUnit(1, 2),
        gf.Scale(1, fe(2, 3)),
    ]


@st.composite
def invertible_matrices(draw, max_n=5, chars=(2, 3, 5)):
    p = draw(st.sampled_from(chars))
    n = draw(st.integers(min_value=1, max_value=max_n))
    rows = draw(
        st.lists(
            st.lists(st.integers(min_value=0, max_value=p - 1), min_size=n, max_size=n),
            min_size=n,
            max_size=n,
        )
    )
    m = gf.Matrix.from_rows(rows, p)
    if not m.is_invertible():
        # nudge onto GL by mixing in an identity: try the shifted matrix
        m = m + gf.Matrix.identity(n, p)
    return m


@given(invertible_matrices())
@settings(max_examples=120, deadline=None)
def test_factorizations_reassemble(m):
    if not m.is_invertible():
        return
    n, p = m.rows, m.char
    lower, sigma, upper = gf.ltu_factorize(m)
    reasm = (
        gf.factor_product(lower, n, p)
        * gf.perm_matrix(sigma, p)
        * gf.factor_product(upper, n, p)
    )
    assert reasm == m
    assert gf.factor_product(gf.elementary_factorize(m), n, p) == m


# ---------------------------------------------------------------------------
# polynomials


def test_poly_helpers():
    p = 3
    f = gf.pnorm([1, 0, 2, 0], p)
    assert f == (1, 0, 2)
    assert gf.pdeg(f) == 2
    assert gf.padd(f, (2,), p) == (0, 0, 2)
    assert gf.pmul((1, 1), (1, 1), 2) == (1, 0, 1)
    q, r = gf.pdivmod((1, 0, 1), (1, 1), 2)
    assert q == (1, 1) and r == ()
    assert gf.pgcd((1, 0, 1), (1, 1), 2) == (1, 1)
    assert gf.pmonic((2, 2), 3) == (1, 1)
    assert gf.ppow((1, 1), 2, 2) == (1, 0, 1)


def test_irreducibles_and_factor_poly():
    deg2_f2 = [q for q in gf.irreducibles(2, 2) if gf.pdeg(q) == 2]
    assert deg2_f2 == [(1, 1, 1)]
    # (x^2+x+1)(x+1)^2 over F_2
    f = gf.pmul((1, 1, 1), gf.pmul((1, 1), (1, 1), 2), 2)
    assert gf.factor_poly(f, 2) == [((1, 1), 2), ((1, 1, 1), 1)]
    with pytest.raises(SizeLimitExceeded):
        gf.irreducibles(1499, 2)


@given(st.integers(min_value=0, max_value=3 ** 6 - 1), st.sampled_from([2, 3]))
@settings(max_examples=80, deadline=None)
def test_factor_poly_roundtrip(seed, p):
    digits = []
    s = seed
    for _ in range(6):
        digits.append(s % p)
        s //= p
    f = gf.pnorm(digits + [1], p)
    prod = gf.PONE
    for q, e in gf.factor_poly(f, p):
        prod = gf.pmul(prod, gf.ppow(q, e, p), p)
    assert prod == f


# ---------------------------------------------------------------------------
# canonical forms and conjugacy


def test_rcf_identity_fixed():
    for n in (1, 2, 3, 4):
        assert gf.rational_canonical_form(gf.Matrix.identity(n, 2)) == gf.Matrix.identity(n, 2)


def test_rcf_known_pair():
    a = M([[1, 1], [0, 1]], 2)
    b = M([[0, 1], [1, 0]], 2)
    assert gf.rational_canonical_form(a) == gf.rational_canonical_form(b)
    assert gf.rational_canonical_form(a) == b
    # independent route: some S in GL_2(F_2) conjugates one to the other
    assert _brute_conjugate2([[1, 1], [0, 1]], [[0, 1], [1, 0]], 2)


def test_rcf_separates_non_conjugates():
    a = M([[1, 1], [1, 0]], 2)
    b = M([[0, 1], [1, 0]], 2)
    assert gf.rational_canonical_form(a) != gf.rational_canonical_form(b)
    assert not _brute_conjugate2([[1, 1], [1, 0]], [[0, 1], [1, 0]], 2)


@given(invertible_matrices(max_n=4))
@settings(max_examples=60, deadline=None)
def test_rcf_idempotent(m):
    if not m.is_invertible():
        return
    r = gf.rational_canonical_form(m)
    assert gf.rational_canonical_form(r) == r


def test_conjugate_test_examples():
    a = M([[1, 1], [0, 1]], 2)
    assert gf.conjugate_test(a, a)
    assert gf.conjugate_test(a, M([[0, 1], [1, 0]], 2))
    assert not gf.conjugate_test(M([[1, 1], [1, 0]], 2), gf.Matrix.identity(2, 2))
    with pytest.raises(DimensionMismatch):
        gf.conjugate_test(a, gf.Matrix.identity(3, 2))
    with pytest.raises(FieldMismatch):
        gf.conjugate_test(a, gf.Matrix.identity(2, 3))


def test_conjugate_test_matches_brute_force_on_gl2():
    for p in (2, 3):
        group = [M(rows, p) for rows in _int_gl2(p)]
        for a in group[:12]:
            for b in group[:12]:
                expected = _brute_conjugate2(a.to_lists(), b.to_lists(), p)
                assert gf.conjugate_test(a, b) is expected


def _gl(n, p):
    out = []
    for flat in itertools.product(range(p), repeat=n * n):
        m = gf.Matrix.from_rows([flat[i * n : (i + 1) * n] for i in range(n)], p)
        if m.is_invertible():
            out.append(m)
    return out


def _gl_generators(n, p):
    gens = []
    for i in range(1, n):
        gens.append(gf.factor_matrix(gf.Transposition(i, i + 1), n, p))
    if n >= 2:
        gens.append(gf.factor_matrix(gf.AddUnit(1, 2), n, p))
    if p > 2:
        gens.append(gf.factor_matrix(gf.Scale(1, fe(2, p)), n, p))
    return gens


# number of conjugacy classes of GL_n(F_p): p-1, p^2-1, p^3-p for n = 1, 2, 3
CLASS_COUNTS = {(1, 2): 1, (2, 2): 3, (3, 2): 6, (1, 3): 2, (2, 3): 8, (3, 3): 24}


@pytest.mark.parametrize("n,p", sorted(CLASS_COUNTS))
def test_conjugacy_classes_exhaustive(n, p):
    group = _gl(n, p)
    order = 1
    for i in range(n):
        order *= p**n - p**i
    assert len(group) == order
    forms = {m: gf.rational_canonical_form(m) for m in group}
    assert len(set(forms.values())) == CLASS_COUNTS[(n, p)]
    # conjugation by a generating set cannot change the canonical form,
    # so constancy on generators gives constancy on whole classes
    for m in group:
        for g in _gl_generators(n, p):
            assert forms[g * m * g.inverse()] == forms[m]


def test_primary_form_agrees_with_rcf_content():
    a = M([[1, 1], [0, 1]], 2)
    s, pairs = gf.primary_rational_form(a)
    assert pairs == (((1, 1), 2),)
    target = gf.block_diag([gf.companion(gf.ppow((1, 1), 2, 2), 2)], 2)
    assert s.inverse() * a * s == target


@given(invertible_matrices(max_n=4, chars=(2, 3)))
@settings(max_examples=60, deadline=None)
def test_primary_form_reassembles(m):
    if not m.is_invertible():
        return
    s, pairs = gf.primary_rational_form(m)
    target = gf.block_diag(
        [gf.companion(gf.ppow(q, e, m.char), m.char) for q, e in pairs], m.char
    )
    assert s.inverse() * m * s == target
    assert sum(gf.pdeg(q) * e for q, e in pairs) == m.rows
    assert gf.elementary_divisors(m) == tuple(sorted(pairs, key=lambda qe: (gf.pdeg(qe[0]), qe[0], qe[1])))


def test_elementary_divisors_split_semisimple():
    assert gf.elementary_divisors(M([[2, 0], [0, 2]], 3)) == (((1, 1), 1), ((1, 1), 1))
    assert gf.invariant_factors(M([[2, 0], [0, 2]], 3)) == ((1, 1), (1, 1))


# ---------------------------------------------------------------------------
# permutation containment


def test_class_contains_permutation_examples():
    assert gf.class_contains_permutation(gf.Matrix.identity(3, 2))
    assert gf.class_contains_permutation(M([[1, 1], [0, 1]], 2))
    assert not gf.class_contains_permutation(M([[1, 1], [1, 0]], 2))
    with pytest.raises(SizeLimitExceeded):
        gf.class_contains_permutation(gf.Matrix.identity(9, 2))
    with pytest.raises(Singular):
        gf.class_contains_permutation(M([[1, 1], [1, 1]], 2))


def test_class_contains_permutation_on_permutations():
    for n in (1, 2, 3, 4):
        for sigma in itertools.permutations(range(n)):
            assert gf.class_contains_permutation(gf.perm_matrix(sigma, 3))


def test_class_contains_permutation_scaled_identity():
    # 2I over F_3 has charpoly (x+1)^2; permutations with that charpoly do
    # not exist, so the class contains none
    assert not gf.class_contains_permutation(M([[2, 0], [0, 2]], 3))
