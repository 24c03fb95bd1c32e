"""Simplified bases for the two single-variable quotients of a complex.

A vertically simplified basis makes the differential of C/U a partial
matching: every basis element either emits exactly one vertical arrow
d(x_i) = V^a x_j, or is closed and receives at most one such arrow.
A horizontally simplified basis does the same for C/V and powers of U.
Both always exist; a basis doing both jobs at once generally does not.

The two bases are produced by graded Gaussian elimination on the quotient
complexes, pivoting on the shortest arrow first.  `normalize_transition`
then adjusts them, without disturbing either quotient structure, so that
the transition matrix between them has all entries in the ground field.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import gf
from .complexes import (
    Arrow,
    BasisChange,
    Complex,
    Generator,
    Monomial,
    RING_R1,
    apply_basis_change,
    has_length_zero_arrow,
    quotient_u,
    quotient_v,
)
from .errors import CountMismatch

VERTICAL = "vertical"
HORIZONTAL = "horizontal"


@dataclass(frozen=True)
class SimplifiedBasis:
    """An ordered basis whose quotient differential is a partial matching.

    Attributes
    ----------
    direction : str
        "vertical" for C/U (arrows are powers of V), "horizontal" for C/V.
    generators : tuple of Generator
        The basis, in order; gradings are those of the underlying elements.
    arrows : tuple of (int, int, int)
        One entry (source index, target index, length) per arrow of the
        quotient differential, all with unit coefficient.
    change : BasisChange
        Transforms the basis of the input complex into this basis.
    """

    direction: str
    generators: tuple[Generator, ...]
    arrows: tuple[tuple[int, int, int], ...]
    change: BasisChange


@dataclass(frozen=True)
class TransitionData:
    """Aligned simplified bases with a scalar transition matrix.

    x_basis[i] and y_basis[i] sit in the same bigrading, and
    x_i = sum_j matrix[i][j] y_j with matrix over the ground field.
    inverse is the transition matrix in the other direction.
    """

    x_basis: SimplifiedBasis
    y_basis: SimplifiedBasis
    matrix: gf.Matrix
    inverse: gf.Matrix


def matching_violations(sb: SimplifiedBasis) -> list[str]:
    """Clause checks for a simplified basis: return [] if it qualifies."""
    out = []
    sources = {}
    targets = {}
    for i, j, _ in sb.arrows:
        sources[i] = sources.get(i, 0) + 1
        targets[j] = targets.get(j, 0) + 1
    for i, k in sources.items():
        if k > 1:
            out.append(f"index {i} emits {k} arrows")
    for j, k in targets.items():
        if k > 1:
            out.append(f"index {j} receives {k} arrows")
    for i in sources:
        if i in targets:
            out.append(f"index {i} both emits and receives")
    return out


def _quotient_arrows(c: Complex) -> list[tuple[int, int, Monomial]]:
    idx = c.gen_index()
    return [(idx[a.src], idx[a.tgt], a.mono) for a in c.arrows]


def _one_step_change(c: Complex, rows: dict[int, dict[int, Monomial]]) -> BasisChange:
    """Basis change equal to the identity outside the given sparse rows."""
    n = c.rank
    one = gf.FieldElem(1, c.char)
    entries = []
    for i in range(n):
        row = [None] * n
        if i in rows:
            for j, m in rows[i].items():
                row[j] = m
        else:
            row[i] = Monomial(one, 0, 0)
        entries.append(tuple(row))
    return BasisChange(c.ring, c.char, c.generators, c.generators, tuple(entries))


def _simplify_quotient(c: Complex, direction: str) -> SimplifiedBasis:
    """Gaussian elimination making the quotient differential a matching."""
    assert c.ring == RING_R1, "simplification works over the modulo-UV ring"
    assert not has_length_zero_arrow(c), "strip zero complexes first"
    quot = quotient_u(c) if direction == VERTICAL else quotient_v(c)
    length = (lambda m: m.v_exp) if direction == VERTICAL else (lambda m: m.u_exp)
    power = (lambda k: (0, k)) if direction == VERTICAL else (lambda k: (k, 0))
    one = gf.FieldElem(1, c.char)

    cur = quot
    total = BasisChange.identity(c)
    retired: set[int] = set()
    while True:
        live = [
            (length(m), i, j, m)
            for i, j, m in _quotient_arrows(cur)
            if i not in retired and j not in retired
        ]
        if not live:
            break
        a, si, ti, piv = min(live)
        gens = cur.generators
        s, t = gens[si].id, gens[ti].id

        # fold the other targets of s into t, so that d(s) hits t alone
        absorb = {}
        for arr in cur.terms_from(s):
            if arr.tgt != t:
                j = cur.gen_index()[arr.tgt]
                assert j not in absorb, "two terms share a target bidegree"
                b = length(arr.mono)
                coeff = arr.mono.coeff / piv.coeff
                absorb[j] = Monomial(coeff, *power(b - a))
        if absorb:
            absorb[ti] = Monomial(one, 0, 0)
            step = _one_step_change(cur, {ti: absorb})
            cur = apply_basis_change(cur, step)
            total = step.compose(total)

        # clear every other arrow into t by sliding its source along s
        clear = {}
        for arr in cur.terms_into(t):
            if arr.src != s:
                i = cur.gen_index()[arr.src]
                assert i not in clear, "two terms share a source bidegree"
                b = length(arr.mono)
                assert b >= a, "pivot was not minimal"
                coeff = -(arr.mono.coeff / piv.coeff)
                clear[i] = {i: Monomial(one, 0, 0), si: Monomial(coeff, *power(b - a))}
        if clear:
            step = _one_step_change(cur, clear)
            cur = apply_basis_change(cur, step)
            total = step.compose(total)

        # normalize the surviving arrow to unit coefficient
        if piv.coeff != one:
            step = _one_step_change(cur, {ti: {ti: Monomial(piv.coeff, 0, 0)}})
            cur = apply_basis_change(cur, step)
            total = step.compose(total)

        assert len(cur.terms_from(s)) == 1 and not cur.terms_into(s)
        assert len(cur.terms_into(t)) == 1 and not cur.terms_from(t)
        retired.update((si, ti))

    prefix = "x" if direction == VERTICAL else "y"
    renamed = tuple(
        Generator(f"{prefix}{i + 1}", g.gr_u, g.gr_v) for i, g in enumerate(cur.generators)
    )
    change = BasisChange(c.ring, c.char, c.generators, renamed, total.entries)
    arrows = tuple(sorted((i, j, length(m)) for i, j, m in _quotient_arrows(cur)))
    sb = SimplifiedBasis(direction, renamed, arrows, change)
    assert matching_violations(sb) == []
    return sb


def vertical_simplify(c: Complex) -> SimplifiedBasis:
    """A basis making the differential of C/U a partial matching."""
    return _simplify_quotient(c, VERTICAL)


def horizontal_simplify(c: Complex) -> SimplifiedBasis:
    """A basis making the differential of C/V a partial matching."""
    return _simplify_quotient(c, HORIZONTAL)


def align_gradings(
    xb: SimplifiedBasis, yb: SimplifiedBasis
) -> tuple[SimplifiedBasis, SimplifiedBasis]:
    """Reorder the y-basis so that positions match the x-basis bigradings."""
    if len(xb.generators) != len(yb.generators):
        raise CountMismatch("bases have different ranks")
    pools: dict[tuple[int, int], list[int]] = {}
    for j, g in enumerate(yb.generators):
        pools.setdefault(g.grading, []).append(j)
    perm = []
    for g in xb.generators:
        pool = pools.get(g.grading)
        if not pool:
            raise CountMismatch(f"no spare y-basis element in bigrading {g.grading}")
        perm.append(pool.pop(0))
    if any(pools.values()):
        raise CountMismatch("y-basis has leftover bigradings")
    if perm == sorted(perm):
        return xb, yb
    pos = {old: new for new, old in enumerate(perm)}
    gens = tuple(yb.generators[j] for j in perm)
    arrows = tuple(sorted((pos[i], pos[j], a) for i, j, a in yb.arrows))
    entries = tuple(yb.change.entries[j] for j in perm)
    change = BasisChange(
        yb.change.ring, yb.change.char, yb.change.old_gens, gens, entries
    )
    return xb, SimplifiedBasis(yb.direction, gens, arrows, change)


def _split_by_variable(p: BasisChange) -> tuple[BasisChange, BasisChange, BasisChange]:
    """Split a transition matrix into scalar, scalar+U and scalar+V parts."""

    def filtered(keep):
        entries = tuple(
            tuple(m if m is not None and keep(m) else None for m in row)
            for row in p.entries
        )
        return BasisChange(p.ring, p.char, p.old_gens, p.new_gens, entries)

    scalar = filtered(lambda m: m.is_scalar())
    with_u = filtered(lambda m: m.v_exp == 0)
    with_v = filtered(lambda m: m.u_exp == 0)
    return scalar, with_u, with_v


def normalize_transition(
    c: Complex, xb: SimplifiedBasis, yb: SimplifiedBasis
) -> TransitionData:
    """Adjust both bases so the transition matrix lives in the ground field.

    The raw transition P' between the aligned bases factors over the
    modulo-UV ring as (S + P_U) S^{-1} (S + P_V) where S is its scalar
    part: the cross terms P_U S^{-1} P_V die because UV = 0.  Replacing
    the x-basis via S (S + P_U)^{-1}, which is the identity modulo U, and
    the y-basis via S^{-1} (S + P_V), the identity modulo V, leaves both
    quotient structures untouched and the new transition matrix is S.
    """
    assert all(
        gx.grading == gy.grading for gx, gy in zip(xb.generators, yb.generators)
    ), "align the bases first"
    p_raw = xb.change.compose(yb.change.inverse())
    scalar, with_u, with_v = _split_by_variable(p_raw)

    x_adjust = scalar.compose(with_u.inverse())
    y_adjust = scalar.inverse().compose(with_v)
    x_change = x_adjust.compose(xb.change)
    y_change = y_adjust.compose(yb.change)

    p_new = x_change.compose(y_change.inverse())
    assert all(
        m is None or m.is_scalar() for row in p_new.entries for m in row
    ), "transition matrix still has nonscalar entries"
    p_mat = p_new.scalar_part()
    q_mat = p_mat.inverse()

    # the adjustments are trivial on the respective quotients, so the
    # arrow data of both bases carries over verbatim
    one = gf.FieldElem(1, c.char)
    for sb, change, quot in (
        (xb, x_change, quotient_u),
        (yb, y_change, quotient_v),
    ):
        moved = quot(apply_basis_change(c, change))
        got = tuple(
            sorted(
                (i, j, m.u_exp + m.v_exp) for i, j, m in _quotient_arrows(moved)
            )
        )
        assert got == sb.arrows, "adjustment disturbed a simplified structure"
        assert all(m.coeff == one for _, _, m in _quotient_arrows(moved))

    xb2 = SimplifiedBasis(xb.direction, xb.generators, xb.arrows, x_change)
    yb2 = SimplifiedBasis(yb.direction, yb.generators, yb.arrows, y_change)
    assert p_mat * q_mat == gf.Matrix.identity(p_mat.rows, c.char)
    return TransitionData(xb2, yb2, p_mat, q_mat)


def simplified_transition(c: Complex) -> TransitionData:
    """Convenience pipeline: simplify both quotients, align, normalize."""
    xb = vertical_simplify(c)
    yb = horizontal_simplify(c)
    xb, yb = align_gradings(xb, yb)
    return normalize_transition(c, xb, yb)
