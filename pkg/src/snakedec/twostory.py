"""Two-story complexes: graphical calculus for the transition between bases.

A complex over F[U,V]/(UV) carries two simplified bases at once: a bottom
basis whose vertical quotient is a partial matching and a top basis doing
the same for the horizontal quotient.  The pair of floors together with
the scalar transition between the bases is a two-story complex.  Within
each bigrading the transition block is drawn as a bundle of elevator
strands wearing crossings, crossover arrows and black dots; this module
stores that word per bigrading, traces strand journeys through the
floors, measures how fast neighbouring journeys diverge, and slides
crossover arrows along parallel stretches until every surviving arrow
connects strands that stay parallel forever.

Tokens are kept in a normal form per shaft: crossover arrows near the
bottom, then black dots, then a permutation block of crossings, then
crossover arrows near the top.  Public views regenerate the token list
from the normal form, so equal engine states print identically.

Floor arrows carry a coefficient internally (sliding a black dot out of
a shaft rescales a basis element, which taints the adjacent floor
arrows), while the structural views expose only (source, target,
length).
"""

from __future__ import annotations

import math
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
    mono_mul,
    quotient_u,
    quotient_v,
    validate,
)
from .errors import (
    BoundExceeded,
    Parallel,
    PatternMismatch,
    StrandsDiverge,
    ValidationError,
    WrongOrientation,
)
from .simplify import (
    HORIZONTAL,
    SimplifiedBasis,
    VERTICAL,
    simplified_transition,
)

BOTTOM = "bottom"
TOP = "top"
LOWER = "lower"
UPPER = "upper"
TOWARD_FLOOR = "toward-floor"
TOWARD_SHAFT = "toward-shaft"


# ---------------------------------------------------------------------------
# tokens


@dataclass(frozen=True)
class Crossing:
    """Two elevator strands exchanging positions i and j (1-based)."""

    i: int
    j: int

    def __post_init__(self):
        if self.i < 1 or self.j < 1 or self.i == self.j:
            raise ValueError("crossing needs two distinct 1-based positions")
        if self.i > self.j:
            i, j = self.j, self.i
            object.__setattr__(self, "i", i)
            object.__setattr__(self, "j", j)


@dataclass(frozen=True)
class CrossoverArrow:
    """Arrow adding lam times strand i into strand j (1-based positions)."""

    i: int
    j: int
    lam: gf.FieldElem

    def __post_init__(self):
        if self.i < 1 or self.j < 1 or self.i == self.j:
            raise ValueError("crossover arrow needs two distinct positions")
        if not self.lam:
            raise ValueError("crossover arrow decoration must be nonzero")


@dataclass(frozen=True)
class BlackDot:
    """Decoration scaling strand i by a nonzero field element."""

    i: int
    lam: gf.FieldElem

    def __post_init__(self):
        if self.i < 1:
            raise ValueError("black dot position is 1-based")
        if not self.lam:
            raise ValueError("black dot decoration must be nonzero")


def token_matrix(token, width: int, char: int) -> gf.Matrix:
    """The elementary matrix a single token stands for."""
    if isinstance(token, Crossing):
        return gf.factor_matrix(gf.Transposition(token.i, token.j), width, char)
    if isinstance(token, BlackDot):
        return gf.factor_matrix(gf.Scale(token.i, token.lam), width, char)
    if isinstance(token, CrossoverArrow):
        return _ca_matrix(width, token.j - 1, token.i - 1, token.lam, char)
    raise TypeError(f"not a token: {token!r}")


def shaft_matrix(tokens, width: int, char: int) -> gf.Matrix:
    """Product of the token matrices, bottom-most token leftmost."""
    out = gf.Matrix.identity(width, char)
    for t in tokens:
        out = out * token_matrix(t, width, char)
    return out


def tokens_from_factors(factors, char: int) -> list:
    """Translate elementary factors into graphical tokens, order kept."""
    out = []
    for f in factors:
        if isinstance(f, gf.Transposition):
            out.append(Crossing(f.i, f.j))
        elif isinstance(f, gf.Scale):
            out.append(BlackDot(f.i, f.lam))
        elif isinstance(f, gf.AddUnit):
            out.append(CrossoverArrow(f.j, f.i, gf.FieldElem(1, char)))
        else:
            raise TypeError(f"not an elementary factor: {f!r}")
    return out


def factors_from_tokens(tokens) -> list:
    """Translate tokens back into elementary factors, order kept."""
    out = []
    for t in tokens:
        if isinstance(t, Crossing):
            out.append(gf.Transposition(t.i, t.j))
        elif isinstance(t, BlackDot):
            out.append(gf.Scale(t.i, t.lam))
        elif isinstance(t, CrossoverArrow):
            if t.lam.value == 1:
                out.append(gf.AddUnit(t.j, t.i))
            else:
                out.extend(gf._general_addunit(t.j, t.i, t.lam))
        else:
            raise TypeError(f"not a token: {t!r}")
    return out


def _token_indices(t) -> set:
    if isinstance(t, (Crossing, CrossoverArrow)):
        return {t.i, t.j}
    return {t.i}


# ---------------------------------------------------------------------------
# traversal sequences and the unusual order


def unusual_key(v: int) -> tuple:
    """Sort key realizing -1 < -2 < ... < 0 < ... < 3 < 2 < 1."""
    if v < 0:
        return (0, -v)
    if v == 0:
        return (1, 0)
    return (2, -v)


def _min_cycle(cycle: tuple) -> tuple:
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle == cycle[:d] * (n // d):
            return cycle[:d]
    return cycle


@dataclass(frozen=True)
class TraversalSequence:
    """An eventually periodic journey record: prefix, then repeating cycle.

    A terminated journey is stored with cycle ``(0,)``: the record is
    padded with infinitely many zeros.
    """

    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        cycle = _min_cycle(tuple(self.cycle))
        prefix = tuple(self.prefix)
        while prefix and prefix[-1] == cycle[-1]:
            cycle = (cycle[-1],) + cycle[:-1]
            prefix = prefix[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "cycle", cycle)

    @property
    def terminating(self) -> bool:
        return self.cycle == (0,)

    @property
    def period(self):
        """Length of the repeating part, None for a terminated journey."""
        return None if self.terminating else len(self.cycle)

    def term(self, k: int) -> int:
        if k < len(self.prefix):
            return self.prefix[k]
        return self.cycle[(k - len(self.prefix)) % len(self.cycle)]

    def realize(self, n: int) -> tuple:
        return tuple(self.term(k) for k in range(n))

    def terms(self):
        """Infinite generator of the sequence's terms."""
        k = 0
        while True:
            yield self.term(k)
            k += 1

    def __repr__(self):
        head = ", ".join(str(v) for v in self.prefix + self.cycle)
        return f"({head}, ...)"


def _compare_window(s: TraversalSequence, t: TraversalSequence) -> int:
    lead = max(len(s.prefix), len(t.prefix))
    return lead + math.lcm(len(s.cycle), len(t.cycle))


def _as_sequence(s) -> TraversalSequence:
    if isinstance(s, TraversalSequence):
        return s
    return TraversalSequence(tuple(s), (0,))


def unusual_compare(s, t, limit=math.inf) -> str:
    """Compare two journeys lexicographically in the unusual order.

    With a finite limit only the first ``limit`` terms are compared;
    with an infinite limit both arguments must be eventually periodic
    records and the comparison is exact.
    """
    if limit == math.inf:
        if not isinstance(s, TraversalSequence) or not isinstance(t, TraversalSequence):
            raise ValueError("unbounded comparison needs periodic records")
        window = _compare_window(s, t)
    else:
        window = int(limit)
        s, t = _as_sequence(s), _as_sequence(t)
    for k in range(window):
        a, b = s.term(k), t.term(k)
        if a != b:
            return "less" if unusual_key(a) < unusual_key(b) else "greater"
    return "equal"


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class Weight:
    """Divergence record of an arrow's strand pair, one term per side.

    ``w_hat`` measures the journeys out of the arrow's own floor
    boundary, ``w_check`` the journeys out of the opposite boundary.  A
    positive sign means the receiving strand's journey comes first in
    the unusual order, which is the removable orientation.
    """

    w_hat: object  # int or math.inf
    w_check: object

    def __post_init__(self):
        for w in (self.w_hat, self.w_check):
            if w != math.inf and abs(w) < 1:
                raise ValueError("finite weight components are nonzero")

    @property
    def depth(self):
        return min(abs(self.w_hat), abs(self.w_check))

    def __repr__(self):
        def show(w):
            return "inf" if w == math.inf else str(w)

        return f"Weight({show(self.w_hat)}, {show(self.w_check)})"


# ---------------------------------------------------------------------------
# engine shaft state


class _ShaftState:
    """Normal form of one shaft's word: lower, dots, crossings, upper.

    Crossover arrows are mutable ``[r, g, lam]`` triples meaning the
    matrix I + lam * e_{rg} (0-based strand positions, r receives);
    ``up`` sends a bottom position to the top position of its strand.
    """

    __slots__ = ("lower", "dots", "up", "upper")

    def __init__(self, lower, dots, up, upper):
        self.lower = lower
        self.dots = dots
        self.up = up
        self.upper = upper


def _ca_matrix(width, r, g, lam, char):
    rows = [
        [gf.FieldElem(1 if a == b else 0, char) for b in range(width)]
        for a in range(width)
    ]
    rows[r][g] = lam
    return gf.Matrix.from_rows(rows, char)


def _state_matrix(state: _ShaftState, width: int, char: int) -> gf.Matrix:
    out = gf.Matrix.identity(width, char)
    for r, g, lam in state.lower:
        out = out * _ca_matrix(width, r, g, lam, char)
    one, zero = gf.FieldElem(1, char), gf.FieldElem(0, char)
    diag = [
        [state.dots.get(a, one) if a == b else zero for b in range(width)]
        for a in range(width)
    ]
    out = out * gf.Matrix.from_rows(diag, char)
    out = out * gf.perm_matrix(gf.perm_inverse(state.up), char)
    for r, g, lam in state.upper:
        out = out * _ca_matrix(width, r, g, lam, char)
    return out


def _state_tokens(state: _ShaftState, char: int) -> list:
    toks = []
    one = gf.FieldElem(1, char)
    for r, g, lam in state.lower:
        toks.append(CrossoverArrow(g + 1, r + 1, lam))
    for p in sorted(state.dots):
        if state.dots[p] != one:
            toks.append(BlackDot(p + 1, state.dots[p]))
    for t in gf._perm_transpositions(gf.perm_inverse(state.up)):
        toks.append(Crossing(t.i, t.j))
    for r, g, lam in state.upper:
        toks.append(CrossoverArrow(g + 1, r + 1, lam))
    return toks


def _seed_state(lower_factors, sigma, upper_factors, char: int) -> _ShaftState:
    """Normal form from a raw triangular factorization.

    Scale factors are bubbled into a single diagonal sitting between
    the lower arrows and the permutation block, adjusting the
    decoration of every crossover arrow they pass.
    """
    one = gf.FieldElem(1, char)
    lower: list = []
    dots: dict = {}
    for f in reversed(lower_factors):
        if isinstance(f, gf.Scale):
            i0 = f.i - 1
            for ca in lower:
                if ca[0] == i0:
                    ca[2] = ca[2] * f.lam
                if ca[1] == i0:
                    ca[2] = ca[2] / f.lam
            dots[i0] = dots.get(i0, one) * f.lam
        else:
            lower.insert(0, [f.i - 1, f.j - 1, one])
    upper: list = []
    updots: dict = {}
    for f in upper_factors:
        if isinstance(f, gf.Scale):
            i0 = f.i - 1
            for ca in upper:
                if ca[1] == i0:
                    ca[2] = ca[2] * f.lam
                if ca[0] == i0:
                    ca[2] = ca[2] / f.lam
            updots[i0] = updots.get(i0, one) * f.lam
        else:
            upper.append([f.i - 1, f.j - 1, one])
    for q, lam in updots.items():
        p = sigma[q]
        dots[p] = dots.get(p, one) * lam
    dots = {p: lam for p, lam in dots.items() if lam != one}
    return _ShaftState(lower, dots, tuple(gf.perm_inverse(sigma)), upper)


def _ordered_ltu(mat: gf.Matrix, x_keys, y_keys, char: int) -> _ShaftState:
    """Refactor an invertible scalar block along strand orderings.

    Rows (bottom positions) are processed by descending key with stable
    position ties, columns (top positions) by ascending key, so every
    lower arrow of the result has its receiver's bottom key at most the
    giver's, and every upper arrow has its receiver's top key at most
    the giver's.
    """
    w = mat.rows
    xorder = sorted(range(w), key=lambda p: x_keys[p], reverse=True)
    yorder = sorted(range(w), key=lambda q: (y_keys[q], q))
    sub = gf.Matrix.from_rows(
        [[mat[xorder[a], yorder[b]] for b in range(w)] for a in range(w)], char
    )
    lower_f, sigma, upper_f = gf.ltu_factorize(sub)
    local = _seed_state(lower_f, sigma, upper_f, char)
    lower = [[xorder[r], xorder[g], lam] for r, g, lam in local.lower]
    dots = {xorder[p]: lam for p, lam in local.dots.items()}
    up = [0] * w
    for a in range(w):
        up[xorder[a]] = yorder[local.up[a]]
    upper = [[yorder[r], yorder[g], lam] for r, g, lam in local.upper]
    return _ShaftState(lower, dots, tuple(up), upper)


def _refactor_tokens(mat: gf.Matrix, char: int) -> list:
    """Plain normal-form token word for an invertible scalar matrix."""
    lower, sigma, upper = gf.ltu_factorize(mat)
    return _state_tokens(_seed_state(lower, sigma, upper, char), char)


# ---------------------------------------------------------------------------
# public shaft views and the pure shaft calculus


@dataclass(frozen=True)
class Shaft:
    """One bigrading's bundle of elevator strands and its token word."""

    bigrading: tuple
    strands: int
    tokens: tuple
    char: int

    def matrix(self) -> gf.Matrix:
        return shaft_matrix(self.tokens, self.strands, self.char)


_MOVES = (
    "merge_dots",
    "merge_arrows",
    "swap_disjoint",
    "swap_arrow_dot",
    "swap_dot_crossing",
    "swap_arrow_crossing",
    "swap_sharing_arrows",
    "resolve_crossing",
)


def apply_local_move(shaft: Shaft, position: int, move_id: str) -> Shaft:
    """Rewrite the adjacent tokens at position, position + 1 by a named
    local identity.  The word changes, its product does not."""
    if move_id not in _MOVES:
        raise PatternMismatch(f"unknown move {move_id!r}")
    toks = list(shaft.tokens)
    if not 0 <= position < len(toks) - 1:
        raise PatternMismatch("position does not name an adjacent pair")
    a, b = toks[position], toks[position + 1]
    char = shaft.char

    def done(replacement):
        new = toks[:position] + list(replacement) + toks[position + 2 :]
        out = Shaft(shaft.bigrading, shaft.strands, tuple(new), char)
        assert out.matrix() == shaft.matrix(), "local move changed the product"
        return out

    if move_id == "merge_dots":
        if isinstance(a, BlackDot) and isinstance(b, BlackDot) and a.i == b.i:
            lam = a.lam * b.lam
            return done([] if lam.value == 1 else [BlackDot(a.i, lam)])
        raise PatternMismatch("needs two dots on one strand")

    if move_id == "merge_arrows":
        if (
            isinstance(a, CrossoverArrow)
            and isinstance(b, CrossoverArrow)
            and (a.i, a.j) == (b.i, b.j)
        ):
            s = a.lam + b.lam
            return done([] if not s else [CrossoverArrow(a.i, a.j, s)])
        raise PatternMismatch("needs two same-direction arrows on one pair")

    if move_id == "swap_disjoint":
        if _token_indices(a) & _token_indices(b):
            raise PatternMismatch("tokens share a strand")
        return done([b, a])

    if move_id == "swap_arrow_dot":
        if {type(a), type(b)} != {CrossoverArrow, BlackDot}:
            raise PatternMismatch("needs an arrow and a dot")
        arrow, dot = (a, b) if isinstance(a, CrossoverArrow) else (b, a)
        lam = arrow.lam
        if dot.i == arrow.i:
            lam = lam * dot.lam if arrow is a else lam / dot.lam
        elif dot.i == arrow.j:
            lam = lam / dot.lam if arrow is a else lam * dot.lam
        moved = CrossoverArrow(arrow.i, arrow.j, lam)
        return done([dot, moved] if arrow is a else [moved, dot])

    if move_id == "swap_dot_crossing":
        if {type(a), type(b)} != {BlackDot, Crossing}:
            raise PatternMismatch("needs a dot and a crossing")
        dot, cross = (a, b) if isinstance(a, BlackDot) else (b, a)
        swap = {cross.i: cross.j, cross.j: cross.i}
        moved = BlackDot(swap.get(dot.i, dot.i), dot.lam)
        return done([cross, moved] if dot is a else [moved, cross])

    if move_id == "swap_arrow_crossing":
        if {type(a), type(b)} != {CrossoverArrow, Crossing}:
            raise PatternMismatch("needs an arrow and a crossing")
        arrow, cross = (a, b) if isinstance(a, CrossoverArrow) else (b, a)
        if {arrow.i, arrow.j} == {cross.i, cross.j}:
            raise PatternMismatch("use resolve_crossing for a full overlap")
        swap = {cross.i: cross.j, cross.j: cross.i}
        moved = CrossoverArrow(
            swap.get(arrow.i, arrow.i), swap.get(arrow.j, arrow.j), arrow.lam
        )
        return done([cross, moved] if arrow is a else [moved, cross])

    if move_id == "swap_sharing_arrows":
        if not (
            isinstance(a, CrossoverArrow)
            and isinstance(b, CrossoverArrow)
            and _token_indices(a) & _token_indices(b)
            and (a.i, a.j) != (b.i, b.j)
        ):
            raise PatternMismatch("needs two arrows sharing one strand")
        prod = token_matrix(a, shaft.strands, char) * token_matrix(
            b, shaft.strands, char
        )
        return done(_refactor_tokens(prod, char))

    # resolve_crossing
    kinds = {type(a), type(b)}
    if kinds == {CrossoverArrow, Crossing}:
        arrow = a if isinstance(a, CrossoverArrow) else b
        cross = b if arrow is a else a
        if {arrow.i, arrow.j} == {cross.i, cross.j}:
            prod = token_matrix(a, shaft.strands, char) * token_matrix(
                b, shaft.strands, char
            )
            return done(_refactor_tokens(prod, char))
    raise PatternMismatch("needs an arrow and a crossing on one pair")


def straighten(shaft: Shaft, order=None) -> Shaft:
    """Rewrite the word in straight form sorted by a per-strand order.

    ``order`` ranks the strands by their bottom position (0-based); the
    same rank applies at a strand's top end.  The default puts every
    strand in one class, reproducing a plain factorization: left-leaning
    arrows, dots, crossings, then right-leaning arrows.
    """
    w = shaft.strands
    ranks = list(order) if order is not None else [0] * w
    if len(ranks) != w:
        raise ValueError("order must rank every strand")
    carrier = list(range(w))
    for tok in shaft.tokens:
        if isinstance(tok, Crossing):
            i0, j0 = tok.i - 1, tok.j - 1
            carrier[i0], carrier[j0] = carrier[j0], carrier[i0]
    y_ranks = [ranks[carrier[q]] for q in range(w)]
    state = _ordered_ltu(shaft.matrix(), ranks, y_ranks, shaft.char)
    out = Shaft(
        shaft.bigrading, w, tuple(_state_tokens(state, shaft.char)), shaft.char
    )
    assert out.matrix() == shaft.matrix(), "straightening changed the product"
    return out


# ---------------------------------------------------------------------------
# the two-story complex engine


class TwoStoryComplex:
    """Floors, shafts and the cumulative basis-change log of one complex.

    Operations mutate the instance in place and return it; ``verify``
    replays the log against the stored input complex and checks every
    structural invariant.  With ``paranoid`` set, sliding operations
    re-verify after every step.
    """

    def __init__(self):
        self.char: int = 0
        self.original: Complex = None
        self.x_gens: tuple = ()
        self.y_gens: tuple = ()
        self.paranoid: bool = False
        self.rounds: int = 0
        self._x0_change: BasisChange = None
        self._y0_change: BasisChange = None
        self._slots: dict = {}
        self._pos: dict = {}
        self._shafts: dict = {}
        self._vert: dict = {}
        self._vert_in: dict = {}
        self._horiz: dict = {}
        self._horiz_in: dict = {}
        self._xsteps: list = []
        self._ysteps: list = []
        self._seq_cache: dict = {}

    # -- construction -------------------------------------------------

    @classmethod
    def _new(cls, char, x_gens, y_gens, vert, horiz):
        t = cls()
        t.char = char
        t.x_gens = tuple(x_gens)
        t.y_gens = tuple(y_gens)
        slots: dict = {}
        for i, g in enumerate(t.x_gens):
            assert t.y_gens[i].grading == g.grading, "floor gradings disagree"
            slots.setdefault(g.grading, []).append(i)
        t._slots = slots
        t._pos = {
            i: (gr, p) for gr, members in slots.items() for p, i in enumerate(members)
        }
        t._vert = {s: [tg, l, mu] for s, (tg, l, mu) in vert.items()}
        t._vert_in = {v[0]: s for s, v in t._vert.items()}
        t._horiz = {s: [tg, l, mu] for s, (tg, l, mu) in horiz.items()}
        t._horiz_in = {v[0]: s for s, v in t._horiz.items()}
        return t

    # -- addressing ---------------------------------------------------

    def gradings(self) -> tuple:
        return tuple(sorted(self._slots))

    def width(self, grading) -> int:
        return len(self._slots[grading])

    def _idx(self, grading, p) -> int:
        return self._slots[grading][p]

    def _elevator(self, floor, idx) -> int:
        g, p = self._pos[idx]
        st = self._shafts[g]
        if floor == BOTTOM:
            return self._idx(g, st.up[p])
        return self._idx(g, st.up.index(p))

    def _name_index(self, name: str):
        for i, g in enumerate(self.x_gens):
            if g.id == name:
                return BOTTOM, i
        for i, g in enumerate(self.y_gens):
            if g.id == name:
                return TOP, i
        raise KeyError(f"no floor basis element named {name!r}")

    # -- logging ---------------------------------------------------------

    def _log_add(self, side, r_idx, g_idx, mono: Monomial):
        steps = self._xsteps if side == "x" else self._ysteps
        steps.append(("add", r_idx, g_idx, mono))

    def _log_scale(self, side, idx, lam: gf.FieldElem):
        steps = self._xsteps if side == "x" else self._ysteps
        steps.append(("scale", idx, lam))

    @property
    def log(self) -> tuple:
        return tuple(
            [("x",) + s for s in self._xsteps] + [("y",) + s for s in self._ysteps]
        )

    def _fold_change(self, side) -> BasisChange:
        gens = self.x_gens if side == "x" else self.y_gens
        steps = self._xsteps if side == "x" else self._ysteps
        char, ring = self.char, self.original.ring
        one = gf.FieldElem(1, char)
        rows = [{i: Monomial(one, 0, 0)} for i in range(len(gens))]
        for step in steps:
            if step[0] == "add":
                _, r, g, m = step
                target = rows[r]
                for j, mj in rows[g].items():
                    add = mono_mul(m, mj, ring)
                    if add is None:
                        continue
                    cur = target.get(j)
                    if cur is None:
                        target[j] = add
                        continue
                    assert (cur.u_exp, cur.v_exp) == (add.u_exp, add.v_exp)
                    s = cur.coeff + add.coeff
                    if not s:
                        target.pop(j)
                    else:
                        target[j] = Monomial(s, cur.u_exp, cur.v_exp)
            else:
                _, i, lam = step
                rows[i] = {
                    j: Monomial(m.coeff * lam, m.u_exp, m.v_exp)
                    for j, m in rows[i].items()
                }
        entries = tuple(
            tuple(rows[i].get(j) for j in range(len(gens))) for i in range(len(gens))
        )
        return BasisChange(ring, char, gens, gens, entries)

    # -- views -------------------------------------------------------------

    def shaft(self, grading) -> Shaft:
        st = self._shafts[grading]
        return Shaft(
            grading,
            self.width(grading),
            tuple(_state_tokens(st, self.char)),
            self.char,
        )

    def shafts(self) -> dict:
        return {g: self.shaft(g) for g in self.gradings()}

    def _floor_view(self, floor) -> SimplifiedBasis:
        if floor == BOTTOM:
            gens, table, direction = self.x_gens, self._vert, VERTICAL
            change = self._fold_change("x").compose(self._x0_change)
        else:
            gens, table, direction = self.y_gens, self._horiz, HORIZONTAL
            change = self._fold_change("y").compose(self._y0_change)
        arrows = tuple(sorted((s, v[0], v[1]) for s, v in table.items()))
        return SimplifiedBasis(direction, gens, arrows, change)

    @property
    def bottom(self) -> SimplifiedBasis:
        return self._floor_view(BOTTOM)

    @property
    def top(self) -> SimplifiedBasis:
        return self._floor_view(TOP)

    def floor_arrows(self, floor) -> tuple:
        """Structural floor arrows with coefficients: (src, tgt, len, mu)."""
        table = self._vert if floor == BOTTOM else self._horiz
        return tuple(sorted((s, v[0], v[1], v[2]) for s, v in table.items()))

    # -- journeys -------------------------------------------------------------

    def _floor_step(self, floor, idx):
        table = self._vert if floor == BOTTOM else self._horiz
        rev = self._vert_in if floor == BOTTOM else self._horiz_in
        if idx in table:
            tgt, length, _ = table[idx]
            return (-length, tgt)
        if idx in rev:
            src = rev[idx]
            return (table[src][1], src)
        return None

    def _sequence(self, floor, idx) -> TraversalSequence:
        key = (floor, idx)
        hit = self._seq_cache.get(key)
        if hit is not None:
            return hit
        seen: dict = {}
        terms: list = []
        state = key
        while True:
            if state in seen:
                k = seen[state]
                prefix, cycle = terms[:k], terms[k:]
                break
            seen[state] = len(terms)
            floor_, i = state
            step = self._floor_step(floor_, i)
            if step is None:
                prefix, cycle = terms, [0]
                break
            term, j = step
            terms.append(term)
            other = TOP if floor_ == BOTTOM else BOTTOM
            state = (other, self._elevator(floor_, j))
        seq = TraversalSequence(tuple(prefix), tuple(cycle))
        self._seq_cache[key] = seq
        return seq

    def _dirty(self):
        self._seq_cache.clear()

    # -- weights ------------------------------------------------------------------

    def _component(self, floor, idx_r, idx_g):
        sr = self._sequence(floor, idx_r)
        sg = self._sequence(floor, idx_g)
        for k in range(_compare_window(sr, sg)):
            a, b = sr.term(k), sg.term(k)
            if a != b:
                return (k + 1) if unusual_key(a) < unusual_key(b) else -(k + 1)
        return math.inf

    def _arrow_weight(self, grading, tier, r, g) -> Weight:
        st = self._shafts[grading]
        if tier == LOWER:
            near = (BOTTOM, self._idx(grading, r), self._idx(grading, g))
            far = (TOP, self._idx(grading, st.up[r]), self._idx(grading, st.up[g]))
        else:
            near = (TOP, self._idx(grading, r), self._idx(grading, g))
            inv = gf.perm_inverse(st.up)
            far = (BOTTOM, self._idx(grading, inv[r]), self._idx(grading, inv[g]))
        return Weight(self._component(*near), self._component(*far))

    def _all_arrows(self):
        out = []
        for g in self.gradings():
            st = self._shafts[g]
            out.extend((g, LOWER, k) for k in range(len(st.lower)))
            out.extend((g, UPPER, k) for k in range(len(st.upper)))
        return out

    def _arrow_at(self, grading, tier, k):
        st = self._shafts[grading]
        return (st.lower if tier == LOWER else st.upper)[k]

    def depth(self):
        best = math.inf
        for g, tier, k in self._all_arrows():
            ca = self._arrow_at(g, tier, k)
            w = self._arrow_weight(g, tier, ca[0], ca[1])
            best = min(best, w.depth)
        return best

    # -- verification ----------------------------------------------------------------

    def verify(self) -> None:
        """Replay the log on the input complex and recheck everything."""
        x_change = self._fold_change("x").compose(self._x0_change)
        y_change = self._fold_change("y").compose(self._y0_change)
        cx = apply_basis_change(self.original, x_change)
        cy = apply_basis_change(self.original, y_change)
        self._check_floor(cx, quotient_u, self._vert, "bottom")
        self._check_floor(cy, quotient_v, self._horiz, "top")
        p = x_change.compose(y_change.inverse())
        for i, row in enumerate(p.entries):
            for j, m in enumerate(row):
                if m is None:
                    continue
                gi, gj = self.x_gens[i].grading, self.x_gens[j].grading
                if gi == gj:
                    assert m.is_scalar(), "same-grading transition entry left the ground field"
                else:
                    du, dv = gi[0] - gj[0], gi[1] - gj[1]
                    assert (-2 * m.u_exp, -2 * m.v_exp) == (du, dv), (
                        "transition entry breaks grading homogeneity"
                    )
        mat = p.scalar_part()
        for grading in self.gradings():
            members = self._slots[grading]
            block = gf.Matrix.from_rows(
                [[mat[i, j] for j in members] for i in members], self.char
            )
            want = _state_matrix(self._shafts[grading], len(members), self.char)
            assert block == want, f"shaft product drifted at {grading}"

    def _check_floor(self, moved: Complex, quot, table, label):
        q = quot(moved)
        idx = q.gen_index()
        got = {}
        for a in q.arrows:
            s, t = idx[a.src], idx[a.tgt]
            assert s not in got, f"{label} floor source repeated"
            got[s] = (t, a.mono.u_exp + a.mono.v_exp, a.mono.coeff)
        want = {s: (v[0], v[1], v[2]) for s, v in table.items()}
        assert got == want, f"{label} floor drifted from the engine tables"

    def _verify_if_paranoid(self):
        if self.paranoid:
            self.verify()

    # -- black dot slides ----------------------------------------------------------

    def _slide_dot(self, grading, p, direction):
        st = self._shafts[grading]
        if p not in st.dots:
            raise PatternMismatch("no dot to slide at this position")
        lam = st.dots.pop(p)
        if direction == "down":
            for ca in st.lower:
                if ca[1] == p:
                    ca[2] = ca[2] * lam
                if ca[0] == p:
                    ca[2] = ca[2] / lam
            idx = self._idx(grading, p)
            self._log_scale("x", idx, lam.inverse())
            if idx in self._vert:
                self._vert[idx][2] = self._vert[idx][2] / lam
            if idx in self._vert_in:
                src = self._vert_in[idx]
                self._vert[src][2] = self._vert[src][2] * lam
        elif direction == "up":
            q = st.up[p]
            for ca in st.upper:
                if ca[0] == q:
                    ca[2] = ca[2] * lam
                if ca[1] == q:
                    ca[2] = ca[2] / lam
            idx = self._idx(grading, q)
            self._log_scale("y", idx, lam)
            if idx in self._horiz:
                self._horiz[idx][2] = self._horiz[idx][2] * lam
            if idx in self._horiz_in:
                src = self._horiz_in[idx]
                self._horiz[src][2] = self._horiz[src][2] / lam
        else:
            raise ValueError(f"unknown slide direction {direction!r}")
        self._dirty()

    # -- crossover arrow turns -------------------------------------------------------

    def _one_turn(self, grading, tier, k):
        """Slide the boundary arrow through the adjacent floor.

        Returns (handle, arrow record) for the arrow in its new shaft.
        Raises StrandsDiverge when the strand pair does not run parallel
        through the floor.
        """
        st = self._shafts[grading]
        if tier == LOWER:
            assert k == 0, "arrow must sit at the bottom boundary"
            r, g, lam = st.lower[0]
            floor = BOTTOM
        else:
            assert k == len(st.upper) - 1, "arrow must sit at the top boundary"
            r, g, lam = st.upper[k]
            floor = TOP
        idx_r, idx_g = self._idx(grading, r), self._idx(grading, g)
        ar = self._floor_step(floor, idx_r)
        ag = self._floor_step(floor, idx_g)
        if ar is None or ag is None or ar[0] != ag[0]:
            raise StrandsDiverge(f"pair at {grading} splits at the {floor} floor")
        table = self._vert if floor == BOTTOM else self._horiz
        jr, jg = ar[1], ag[1]
        if ar[0] < 0:
            mu_r, mu_g = table[idx_r][2], table[idx_g][2]
            coeff = lam * mu_g / mu_r
        else:
            mu_r, mu_g = table[jr][2], table[jg][2]
            coeff = lam * mu_r / mu_g
        if tier == LOWER:
            st.lower.pop(0)
            self._log_add("x", idx_r, idx_g, Monomial(-lam, 0, 0))
            self._log_add("x", jr, jg, Monomial(-coeff, 0, 0))
        else:
            st.upper.pop()
            self._log_add("y", idx_r, idx_g, Monomial(lam, 0, 0))
            self._log_add("y", jr, jg, Monomial(coeff, 0, 0))
        g2 = self._pos[jr][0]
        assert self._pos[jg][0] == g2, "parallel step lands in two bigradings"
        st2 = self._shafts[g2]
        p_r, p_g = self._pos[jr][1], self._pos[jg][1]
        ca = [p_r, p_g, -coeff]
        if tier == LOWER:
            st2.lower.insert(0, ca)
            handle = (g2, LOWER, 0)
        else:
            st2.upper.append(ca)
            handle = (g2, UPPER, len(st2.upper) - 1)
        self._dirty()
        return handle, ca

    def _remove_turn(self, grading, tier, k):
        """Remove the boundary arrow at a floor where its pair diverges."""
        st = self._shafts[grading]
        if tier == LOWER:
            assert k == 0
            r, g, lam = st.lower[0]
            floor, side = BOTTOM, "x"
        else:
            assert k == len(st.upper) - 1
            r, g, lam = st.upper[k]
            floor, side = TOP, "y"
        idx_r, idx_g = self._idx(grading, r), self._idx(grading, g)
        ar = self._floor_step(floor, idx_r)
        ag = self._floor_step(floor, idx_g)
        vr = ar[0] if ar else 0
        vg = ag[0] if ag else 0
        ends = ar is None and ag is None
        if not ends and not unusual_key(vr) < unusual_key(vg):
            raise WrongOrientation(
                f"arrow at {grading} points up the divergence order"
            )
        table = self._vert if floor == BOTTOM else self._horiz
        if tier == LOWER:
            st.lower.pop(0)
            self._log_add(side, idx_r, idx_g, Monomial(-lam, 0, 0))
        else:
            st.upper.pop()
            self._log_add(side, idx_r, idx_g, Monomial(lam, 0, 0))
        sign = gf.FieldElem(-1 if tier == LOWER else 1, self.char)
        if vr < 0 and vg < 0:
            nr, ng = ar[1], ag[1]
            mu_r, mu_g = table[idx_r][2], table[idx_g][2]
            delta = (-vg) - (-vr)
            coeff = sign * lam * mu_g / mu_r
            self._log_add(side, nr, ng, _power_mono(coeff, floor, delta))
        elif vr > 0 and vg > 0:
            ur, ug = ar[1], ag[1]
            mu_r, mu_g = table[ur][2], table[ug][2]
            delta = vr - vg
            coeff = sign * lam * mu_r / mu_g
            self._log_add(side, ur, ug, _power_mono(coeff, floor, delta))
        self._dirty()

    # -- extraction and the snowplow ----------------------------------------------------

    def _swap_adjacent(self, seq, a):
        ca, cb = seq[a], seq[a + 1]
        if {ca[0], ca[1]} & {cb[0], cb[1]}:
            return False
        seq[a], seq[a + 1] = cb, ca
        return True

    def _cross_middle(self, grading, ca, upward):
        """Carry an arrow through the dot and crossing block."""
        st = self._shafts[grading]
        one = gf.FieldElem(1, self.char)
        if upward:
            dr = st.dots.get(ca[0], one)
            dg = st.dots.get(ca[1], one)
            ca[2] = ca[2] * dg / dr
            ca[0], ca[1] = st.up[ca[0]], st.up[ca[1]]
            st.upper.insert(0, ca)
        else:
            inv = gf.perm_inverse(st.up)
            ca[0], ca[1] = inv[ca[0]], inv[ca[1]]
            dr = st.dots.get(ca[0], one)
            dg = st.dots.get(ca[1], one)
            ca[2] = ca[2] * dr / dg
            st.lower.append(ca)

    def _extract(self, grading, tier, k, side, convoy):
        """Bring the arrow at (tier, k) to the exit boundary for side.

        Index-sharing blockers are pushed out through the exit floor
        first and recorded in the convoy for later restoration.
        """
        st = self._shafts[grading]
        seq = st.lower if tier == LOWER else st.upper
        ca = seq[k]
        target_tier = LOWER if side == "down" else UPPER
        if tier != target_tier:
            while True:
                k = seq.index(ca)
                if tier == LOWER:
                    if k == len(seq) - 1:
                        break
                    if not self._swap_adjacent(seq, k):
                        self._displace(grading, tier, k + 1, side, convoy)
                else:
                    if k == 0:
                        break
                    if not self._swap_adjacent(seq, k - 1):
                        self._displace(grading, tier, k - 1, side, convoy)
            seq.remove(ca)
            self._cross_middle(grading, ca, upward=(side == "up"))
            tier = target_tier
            seq = st.lower if tier == LOWER else st.upper
        while True:
            k = seq.index(ca)
            if side == "down":
                if k == 0:
                    return (grading, tier, 0)
                if not self._swap_adjacent(seq, k - 1):
                    self._displace(grading, tier, k - 1, side, convoy)
            else:
                if k == len(seq) - 1:
                    return (grading, tier, k)
                if not self._swap_adjacent(seq, k):
                    self._displace(grading, tier, k + 1, side, convoy)

    def _displace(self, grading, tier, k, side, convoy):
        """Push the blocking arrow at (tier, k) out through the exit floor."""
        g_, tier_, k_ = self._extract(grading, tier, k, side, convoy)
        try:
            handle, ca = self._one_turn(g_, tier_, k_)
        except StrandsDiverge:
            # a blocker that cannot ride along leaves for good
            self._remove_turn(g_, tier_, k_)
            return
        convoy.append((handle, ca))

    def _restore_convoy(self, convoy):
        for (grading, tier, _), ca in reversed(convoy):
            st = self._shafts[grading]
            seq = st.lower if tier == LOWER else st.upper
            k = seq.index(ca)
            if tier == LOWER:
                assert k == 0, "convoy entry drifted from the boundary"
            else:
                assert k == len(seq) - 1, "convoy entry drifted from the boundary"
            self._one_turn(grading, tier, k)

    def _snowplow_remove(self, grading, tier, k, side):
        """Slide the arrow along parallel turns, remove it where the
        strands diverge, then send every displaced arrow back."""
        convoy: list = []
        handle = (grading, tier, k)
        while True:
            g_, tier_, k_ = self._extract(*handle, side, convoy)
            try:
                handle, _ = self._one_turn(g_, tier_, k_)
            except StrandsDiverge:
                self._remove_turn(g_, tier_, k_)
                break
            side = "up" if side == "down" else "down"
        self._restore_convoy(convoy)
        self._dirty()
        self._verify_if_paranoid()

    # -- reparametrization ------------------------------------------------------------

    def _journey_keys(self, grading, terms):
        x_keys, y_keys = [], []
        for p in range(self.width(grading)):
            idx = self._idx(grading, p)
            down = self._sequence(BOTTOM, idx).realize(terms)
            upw = self._sequence(TOP, idx).realize(terms)
            x_keys.append(tuple(unusual_key(v) for v in down))
            y_keys.append(tuple(unusual_key(v) for v in upw))
        return x_keys, y_keys

    def _reparametrize(self, grading, terms):
        """Refactor one shaft so arrows respect the journey-prefix order.

        Bottom positions are keyed by prefixes of their downward
        journeys, top positions by prefixes of their upward ones; after
        the refactorization every arrow between strands that separate
        inside the window points in the removable direction.
        """
        w = self.width(grading)
        if w <= 1:
            return
        x_keys, y_keys = self._journey_keys(grading, terms)
        mat = _state_matrix(self._shafts[grading], w, self.char)
        self._shafts[grading] = _ordered_ltu(mat, x_keys, y_keys, self.char)
        self._dirty()

    def _reparametrize_lower_region(self, grading, terms):
        """Refactor the shaft word below its upper arrows, keeping those.

        Leaving the upper arrows out of the refactorization keeps every
        replacement strand parallel to the old one for a full extra step
        downward, which is what lets one more journey term survive the
        change of basis.  Fresh upper factors come out underneath the
        kept ones.
        """
        w = self.width(grading)
        if w <= 1:
            return
        x_keys, y_keys = self._journey_keys(grading, terms)
        st = self._shafts[grading]
        region = _ShaftState(st.lower, st.dots, st.up, [])
        mat = _state_matrix(region, w, self.char)
        new = _ordered_ltu(mat, x_keys, y_keys, self.char)
        new.upper.extend(st.upper)
        self._shafts[grading] = new
        self._dirty()

    # -- depth raising ----------------------------------------------------------------

    def _candidates(self, predicate, tier):
        out = []
        for g in self.gradings():
            st = self._shafts[g]
            seq = st.lower if tier == LOWER else st.upper
            for k, ca in enumerate(seq):
                if predicate(self._arrow_weight(g, tier, ca[0], ca[1])):
                    out.append((g, tier, k))
        return out

    def _remove_all(self, predicate, tier, side):
        """Remove matching arrows one at a time, nearest the exit first."""
        while True:
            found = self._candidates(predicate, tier)
            if not found:
                return
            per_shaft: dict = {}
            for g, _, k in found:
                per_shaft.setdefault(g, []).append(k)
            grading = sorted(per_shaft)[0]
            ks = per_shaft[grading]
            near_exit = (side == "down") == (tier == LOWER)
            if tier == UPPER:
                k = max(ks) if near_exit else min(ks)
            else:
                k = min(ks) if near_exit else max(ks)
            self._snowplow_remove(grading, tier, k, side)

    def _slide_out(self, grading, tier):
        """Turn every arrow of one tier out into the neighbouring shafts.

        The arrow at the exit boundary always goes first, so nothing is
        ever displaced.  A pair whose journeys have both already ended
        falls off for free instead of turning.
        """
        st = self._shafts[grading]
        seq = st.lower if tier == LOWER else st.upper
        while seq:
            k = 0 if tier == LOWER else len(seq) - 1
            try:
                self._one_turn(grading, tier, k)
            except StrandsDiverge:
                self._remove_turn(grading, tier, k)
        self._dirty()

    def increase_depth(self, m: int):
        """Raise the depth of the complex past m.

        Four sweeps, one per way a weight component can sit at m.
        First every shaft is refactored along m-term journey prefixes,
        which points each divergence-m arrow in the removable direction,
        and those arrows are snowplowed out through their near floors.
        Then, shaft by shaft, the word below the upper arrows is
        refactored along (m + 1)-term prefixes and the whole lower tier
        is turned out to the neighbouring shafts; the turn trades each
        arrow's weight components, so no far component at -m survives
        it.  The upper tier gets the mirrored treatment.  Finally the
        arrows whose far component equals +m are snowplowed out through
        their far floors.
        """
        d = self.depth()
        if d > m:
            return self
        assert d == m, "depth drifted below the claimed value"
        for g in self.gradings():
            self._reparametrize(g, m)
        self._verify_if_paranoid()
        self._remove_all(lambda w: w.w_hat == m, UPPER, "up")
        self._remove_all(lambda w: w.w_hat == m, LOWER, "down")
        for g in self.gradings():
            self._reparametrize_lower_region(g, m + 1)
            self._verify_if_paranoid()
            self._remove_all(lambda w: w.w_hat == m, UPPER, "up")
            self._slide_out(g, LOWER)
            self._reparametrize(g, m + 1)
            self._verify_if_paranoid()
            self._remove_all(lambda w: w.w_hat == m, LOWER, "down")
            self._slide_out(g, UPPER)
        self._remove_all(lambda w: w.w_check == m, UPPER, "down")
        self._remove_all(lambda w: w.w_check == m, LOWER, "up")
        self._verify_if_paranoid()
        assert self.depth() >= m + 1, "depth pass fell short"
        return self

    def run_to_depth_infinity(self):
        """Iterate depth raising until every weight is (inf, inf)."""
        n = len(self.x_gens)
        bound = max(1, n * (n - 1))
        self.rounds = 0
        while True:
            d = self.depth()
            if d == math.inf:
                break
            if self.rounds >= bound:
                raise BoundExceeded(
                    f"more than {bound} depth-raising rounds on rank {n}"
                )
            self.increase_depth(d)
            self.rounds += 1
        self.verify()
        return self


def _power_mono(lam: gf.FieldElem, floor, delta: int) -> Monomial:
    if floor == BOTTOM:
        return Monomial(lam, 0, delta)
    return Monomial(lam, delta, 0)


# ---------------------------------------------------------------------------
# construction


def build(c: Complex) -> TwoStoryComplex:
    """Simplify both quotients of a complex and assemble its two-story form."""
    if c.ring != RING_R1:
        raise ValidationError("two-story complexes live over the modulo-UV ring")
    problems = validate(c)
    if problems:
        raise ValidationError(problems[0])
    if has_length_zero_arrow(c):
        raise ValidationError("cancel length-zero arrows before building")
    td = simplified_transition(c)
    one = gf.FieldElem(1, c.char)
    vert = {s: (t, l, one) for s, t, l in td.x_basis.arrows}
    horiz = {s: (t, l, one) for s, t, l in td.y_basis.arrows}
    t = TwoStoryComplex._new(
        c.char, td.x_basis.generators, td.y_basis.generators, vert, horiz
    )
    t.original = c
    t._x0_change = td.x_basis.change
    t._y0_change = td.y_basis.change
    zero = gf.FieldElem(0, c.char)
    for i in range(td.matrix.rows):
        for j in range(td.matrix.cols):
            if t._pos[i][0] != t._pos[j][0]:
                assert td.matrix[i, j] == zero, "transition crosses bigradings"
    for grading in t.gradings():
        members = t._slots[grading]
        block = gf.Matrix.from_rows(
            [[td.matrix[i, j] for j in members] for i in members], c.char
        )
        lower, sigma, upper = gf.ltu_factorize(block)
        t._shafts[grading] = _seed_state(lower, sigma, upper, c.char)
    t.verify()
    return t


def _from_parts(char, gradings, vert, horiz, shaft_tokens) -> TwoStoryComplex:
    """Assemble a two-story complex from explicit floor and shaft data.

    ``gradings`` lists one bigrading per strand slot; ``vert`` and
    ``horiz`` map slot indices to (target, length) or (target, length,
    coefficient) on the bottom and top index spaces; ``shaft_tokens``
    maps bigradings to public token lists.  The underlying complex is
    reconstructed on the bottom basis and everything is verified.
    """
    one = gf.FieldElem(1, char)
    n = len(gradings)
    x_gens = tuple(
        Generator(f"x{i + 1}", gradings[i][0], gradings[i][1]) for i in range(n)
    )
    y_gens = tuple(
        Generator(f"y{i + 1}", gradings[i][0], gradings[i][1]) for i in range(n)
    )

    def norm(table):
        return {
            s: (v[0], v[1], v[2] if len(v) > 2 else one) for s, v in table.items()
        }

    t = TwoStoryComplex._new(char, x_gens, y_gens, norm(vert), norm(horiz))
    for grading in t.gradings():
        w = t.width(grading)
        mat = shaft_matrix(shaft_tokens.get(grading, ()), w, char)
        lower, sigma, upper = gf.ltu_factorize(mat)
        t._shafts[grading] = _seed_state(lower, sigma, upper, char)
    p_blocks = {g: _state_matrix(t._shafts[g], t.width(g), char) for g in t.gradings()}
    arrows = []
    for s, (tg, l, mu) in t._vert.items():
        arrows.append(Arrow(x_gens[s].id, x_gens[tg].id, Monomial(mu, 0, l)))
    for s, (tg, l, mu) in t._horiz.items():
        gs, ps = t._pos[s]
        gt, pt = t._pos[tg]
        msrc = p_blocks[gs]
        minv = p_blocks[gt].inverse()
        for a, ia in enumerate(t._slots[gs]):
            lam1 = msrc[a, ps]
            if not lam1:
                continue
            for b, jb in enumerate(t._slots[gt]):
                coeff = lam1 * mu * minv[pt, b]
                if not coeff:
                    continue
                arrows.append(
                    Arrow(x_gens[ia].id, x_gens[jb].id, Monomial(coeff, l, 0))
                )
    c = Complex(RING_R1, char, x_gens, tuple(arrows))
    t.original = c
    t._x0_change = BasisChange.identity(c)
    flat = [[gf.FieldElem(0, char) for _ in range(n)] for _ in range(n)]
    for g in t.gradings():
        members = t._slots[g]
        inv = p_blocks[g].inverse()
        for a, ia in enumerate(members):
            for b, jb in enumerate(members):
                flat[ia][jb] = inv[a, b]
    entries = tuple(
        tuple(Monomial(flat[i][j], 0, 0) if flat[i][j] else None for j in range(n))
        for i in range(n)
    )
    t._y0_change = BasisChange(RING_R1, char, x_gens, y_gens, entries)
    t.verify()
    return t


# ---------------------------------------------------------------------------
# public operations


def _normalize_direction(direction: str) -> str:
    d = direction.replace("_", "-").lower()
    if d in (TOWARD_FLOOR, "floor"):
        return TOWARD_FLOOR
    if d in (TOWARD_SHAFT, "shaft"):
        return TOWARD_SHAFT
    raise ValueError(f"unknown direction {direction!r}")


def traversal_sequence(t: TwoStoryComplex, z: str, direction: str) -> TraversalSequence:
    """Journey record of a floor basis element in the given direction.

    ``toward-floor`` starts with the element's own floor arrow;
    ``toward-shaft`` crosses the elevator first and continues from the
    strand's other endpoint.
    """
    d = _normalize_direction(direction)
    floor, idx = t._name_index(z)
    if d == TOWARD_FLOOR:
        return t._sequence(floor, idx)
    other = TOP if floor == BOTTOM else BOTTOM
    return t._sequence(other, t._elevator(floor, idx))


def strand_top(t: TwoStoryComplex, x_name: str) -> str:
    """Name of the top endpoint of the strand holding a bottom element."""
    floor, idx = t._name_index(x_name)
    assert floor == BOTTOM, "expected a bottom basis element"
    return t.y_gens[t._elevator(BOTTOM, idx)].id


def strand_bottom(t: TwoStoryComplex, y_name: str) -> str:
    """Name of the bottom endpoint of the strand holding a top element."""
    floor, idx = t._name_index(y_name)
    assert floor == TOP, "expected a top basis element"
    return t.x_gens[t._elevator(TOP, idx)].id


def _resolve_arrow(t: TwoStoryComplex, arrow):
    """Map a public (bigrading, token index) handle to engine terms."""
    grading, pos = arrow
    grading = tuple(grading)
    if grading not in t._shafts:
        raise PatternMismatch(f"no shaft at bigrading {grading}")
    st = t._shafts[grading]
    view = t.shaft(grading).tokens
    if not 0 <= pos < len(view):
        raise PatternMismatch("token index out of range")
    token = view[pos]
    if pos < len(st.lower):
        return grading, LOWER, pos, token
    offset = len(view) - len(st.upper)
    if pos >= offset:
        return grading, UPPER, pos - offset, token
    return grading, "middle", pos, token


def weight_of(t: TwoStoryComplex, arrow) -> Weight:
    """Weight of the crossover arrow named by (bigrading, token index)."""
    grading, tier, k, token = _resolve_arrow(t, arrow)
    if not isinstance(token, CrossoverArrow):
        raise PatternMismatch("weights are defined for crossover arrows")
    ca = t._arrow_at(grading, tier, k)
    return t._arrow_weight(grading, tier, ca[0], ca[1])


def slide_arrow_step(t: TwoStoryComplex, arrow, direction: str) -> TwoStoryComplex:
    """Transport a boundary token across one floor segment.

    Black dots dissolve into a rescaling of the floor element they exit
    through; crossover arrows reappear in the neighbouring shaft.
    """
    grading, tier, k, token = _resolve_arrow(t, arrow)
    if isinstance(token, BlackDot):
        t._slide_dot(grading, token.i - 1, direction)
        t._verify_if_paranoid()
        return t
    if not isinstance(token, CrossoverArrow):
        raise PatternMismatch("only arrows and dots slide through floors")
    st = t._shafts[grading]
    if direction == "down":
        if tier != LOWER or k != 0:
            raise PatternMismatch("arrow is not at the bottom boundary")
    elif direction == "up":
        if tier != UPPER or k != len(st.upper) - 1:
            raise PatternMismatch("arrow is not at the top boundary")
    else:
        raise ValueError(f"unknown slide direction {direction!r}")
    t._one_turn(grading, tier, k)
    t._verify_if_paranoid()
    return t


def remove_diverging_arrow(t: TwoStoryComplex, arrow) -> TwoStoryComplex:
    """Slide an arrow out along its near floor and remove it at the
    point of divergence, restoring every other displaced arrow."""
    grading, tier, k, token = _resolve_arrow(t, arrow)
    if not isinstance(token, CrossoverArrow):
        raise PatternMismatch("only crossover arrows are removable")
    ca = t._arrow_at(grading, tier, k)
    w = t._arrow_weight(grading, tier, ca[0], ca[1])
    if w.w_hat == math.inf:
        raise Parallel("the strand pair never diverges")
    if w.w_hat < 0:
        raise WrongOrientation("the arrow points up the divergence order")
    side = "down" if tier == LOWER else "up"
    t._snowplow_remove(grading, tier, k, side)
    return t


def increase_depth(t: TwoStoryComplex, m: int) -> TwoStoryComplex:
    """Raise the depth of the two-story complex past m."""
    return t.increase_depth(m)


def run_to_depth_infinity(t: TwoStoryComplex) -> TwoStoryComplex:
    """Iterate depth raising until every arrow's weight is (inf, inf)."""
    return t.run_to_depth_infinity()


def dump(t: TwoStoryComplex) -> str:
    """Deterministic structured text of floors, shafts and tokens."""
    lines = [f"two-story complex over F_{t.char}, rank {len(t.x_gens)}"]
    one = gf.FieldElem(1, t.char)

    def floor_lines(label, gens, table, power):
        lines.append(f"{label}:")
        for s in sorted(table):
            tg, l, mu = table[s]
            text = f"  {gens[s].id} -{power}^{l}-> {gens[tg].id}"
            if mu != one:
                text += f"  (coefficient {mu.value})"
            lines.append(text)

    floor_lines("bottom floor", t.x_gens, t._vert, "V")
    floor_lines("top floor", t.y_gens, t._horiz, "U")
    lines.append("shafts:")
    for grading in t.gradings():
        shaft = t.shaft(grading)
        names = ",".join(t.x_gens[i].id for i in t._slots[grading])
        head = f"  {grading} strands={shaft.strands} [{names}]"
        if not shaft.tokens:
            lines.append(head + " token-free")
            continue
        lines.append(head)
        for tok in shaft.tokens:
            lines.append(f"    {tok}")
    return "\n".join(lines) + "\n"
