"""Free bigraded chain complexes over F[U,V] and over R1 = F[U,V]/(UV).

The data model is a finite ordered basis of bigraded generators together
with a differential whose matrix entries are monomials lambda U^a V^b.
Over R1 every mixed monomial is zero, so differentials there carry pure
U-powers, pure V-powers and scalars only.

Grading conventions: gr(U) = (-2, 0), gr(V) = (0, -2), gr(d) = (-1, -1).
An arrow src -> tgt labelled U^a V^b therefore forces
gr(tgt) = gr(src) + (2a - 1, 2b - 1), which is what the grading inference
helper walks along.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .errors import (
    FieldMismatch,
    GradingViolation,
    NotInvertible,
    ValidationError,
)
from .gf import FieldElem, Matrix

RING_R1 = "r1"
RING_FUV = "fuv"
_RINGS = (RING_R1, RING_FUV)


@dataclass(frozen=True, slots=True)
class Monomial:
    """A nonzero term lambda U^u V^v with lambda in F_p."""

    coeff: FieldElem
    u_exp: int
    v_exp: int

    def __post_init__(self):
        if not self.coeff.value:
            raise ValueError("monomials store nonzero coefficients only")
        if self.u_exp < 0 or self.v_exp < 0:
            raise ValueError("negative exponent")

    @property
    def grading(self) -> tuple:
        return (-2 * self.u_exp, -2 * self.v_exp)

    def is_scalar(self) -> bool:
        return self.u_exp == 0 and self.v_exp == 0

    def __str__(self):
        parts = []
        if self.u_exp:
            parts.append("U" + (f"^{self.u_exp}" if self.u_exp > 1 else ""))
        if self.v_exp:
            parts.append("V" + (f"^{self.v_exp}" if self.v_exp > 1 else ""))
        if self.coeff.value != 1 or not parts:
            parts.insert(0, str(self.coeff.value))
        return "*".join(parts)


def mono(coeff, u_exp: int, v_exp: int, char: Optional[int] = None) -> Monomial:
    """Convenience constructor accepting an int or FieldElem coefficient."""
    if not isinstance(coeff, FieldElem):
        coeff = FieldElem(coeff, char)
    return Monomial(coeff, u_exp, v_exp)


def mono_mul(a: Monomial, b: Monomial, ring: str) -> Optional[Monomial]:
    """Product of two monomials, None when it dies in the ring."""
    c = a.coeff * b.coeff
    if not c.value:
        return None
    u, v = a.u_exp + b.u_exp, a.v_exp + b.v_exp
    if ring == RING_R1 and u > 0 and v > 0:
        return None
    return Monomial(c, u, v)


@dataclass(frozen=True, slots=True)
class Generator:
    """A basis element with its bigrading."""

    id: str
    gr_u: int
    gr_v: int

    @property
    def grading(self) -> tuple:
        return (self.gr_u, self.gr_v)


class Arrow(NamedTuple):
    """One differential term: d(src) gains mono * tgt."""

    src: str
    tgt: str
    mono: Monomial


@dataclass(frozen=True, slots=True)
class Complex:
    """A finitely generated free bigraded chain complex.

    ``arrows`` is kept canonical: terms merged per (src, tgt, exponents),
    zero and ring-zero terms dropped, sorted by generator order.  Over R1
    a stored mixed monomial is the zero element, so it is dropped silently.
    """

    ring: str
    char: int
    generators: Tuple[Generator, ...]
    arrows: Tuple[Arrow, ...]

    def __post_init__(self):
        if self.ring not in _RINGS:
            raise ValidationError(f"unknown ring tag {self.ring!r}")
        gens = tuple(self.generators)
        ids = [g.id for g in gens]
        if len(set(ids)) != len(ids):
            dup = next(i for i in ids if ids.count(i) > 1)
            raise ValidationError(f"duplicate generator id {dup!r}")
        index = {g.id: k for k, g in enumerate(gens)}
        merged: Dict[tuple, FieldElem] = {}
        for a in tuple(self.arrows):
            if a.src not in index or a.tgt not in index:
                raise ValidationError(f"arrow {a.src} -> {a.tgt} references unknown generator")
            if a.mono.coeff.char != self.char:
                raise ValidationError(f"arrow {a.src} -> {a.tgt} coefficient outside F_{self.char}")
            if self.ring == RING_R1 and a.mono.u_exp > 0 and a.mono.v_exp > 0:
                continue  # UV = 0: the term is zero in R1
            key = (a.src, a.tgt, a.mono.u_exp, a.mono.v_exp)
            merged[key] = merged.get(key, FieldElem(0, self.char)) + a.mono.coeff
        canon = [
            Arrow(s, t, Monomial(c, u, v))
            for (s, t, u, v), c in merged.items()
            if c.value
        ]
        canon.sort(key=lambda a: (index[a.src], index[a.tgt], a.mono.u_exp, a.mono.v_exp))
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "arrows", tuple(canon))

    # -- accessors ---------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.generators)

    def gen_index(self) -> Dict[str, int]:
        return {g.id: k for k, g in enumerate(self.generators)}

    def gen_map(self) -> Dict[str, Generator]:
        return {g.id: g for g in self.generators}

    def grading(self, gen_id: str) -> tuple:
        return self.gen_map()[gen_id].grading

    def terms_from(self, src: str) -> List[Arrow]:
        return [a for a in self.arrows if a.src == src]

    def terms_into(self, tgt: str) -> List[Arrow]:
        return [a for a in self.arrows if a.tgt == tgt]

    def __str__(self):
        lines = [f"Complex({self.ring}, F_{self.char}, rank {self.rank})"]
        for g in self.generators:
            lines.append(f"  {g.id} at ({g.gr_u},{g.gr_v})")
        for a in self.arrows:
            lines.append(f"  d{a.src} += {a.mono}*{a.tgt}")
        return "\n".join(lines)


def empty_complex(ring: str, char: int) -> Complex:
    return Complex(ring, char, (), ())


# ---------------------------------------------------------------------------
# validation


def validate(c: Complex) -> list:
    """Check the chain complex axioms; the empty list means ok.

    Violations are human-readable strings naming offending generators:
    every differential term must have bidegree (-1,-1), and d^2 must
    vanish (computed with UV = 0 when the ring is R1).
    """
    out = []
    gm = c.gen_map()
    for a in c.arrows:
        src, tgt = gm[a.src], gm[a.tgt]
        got = (tgt.gr_u - 2 * a.mono.u_exp, tgt.gr_v - 2 * a.mono.v_exp)
        want = (src.gr_u - 1, src.gr_v - 1)
        if got != want:
            out.append(
                f"term {a.src} -> {a.tgt} ({a.mono}) lands in bidegree {got}, expected {want}"
            )
    by_src: Dict[str, List[Arrow]] = {}
    for a in c.arrows:
        by_src.setdefault(a.src, []).append(a)
    for s in (g.id for g in c.generators):
        acc: Dict[tuple, FieldElem] = {}
        for a1 in by_src.get(s, ()):
            for a2 in by_src.get(a1.tgt, ()):
                m = mono_mul(a1.mono, a2.mono, c.ring)
                if m is None:
                    continue
                key = (a2.tgt, m.u_exp, m.v_exp)
                acc[key] = acc.get(key, FieldElem(0, c.char)) + m.coeff
        for (t, u, v), coeff in sorted(acc.items()):
            if coeff.value:
                out.append(f"d^2 != 0 at {s}: term {Monomial(coeff, u, v)} -> {t}")
    return out


def has_length_zero_arrow(c: Complex) -> bool:
    """True when some differential term is a plain scalar (length 0)."""
    return any(a.mono.is_scalar() for a in c.arrows)


# ---------------------------------------------------------------------------
# ring-element matrices (internal): entry = dict (u_exp, v_exp) -> FieldElem


def _rel_from_mono(m: Optional[Monomial]) -> dict:
    return {} if m is None else {(m.u_exp, m.v_exp): m.coeff}


def _rel_add_term(acc: dict, exps: tuple, coeff: FieldElem) -> None:
    cur = acc.get(exps)
    s = coeff if cur is None else cur + coeff
    if s.value:
        acc[exps] = s
    elif exps in acc:
        del acc[exps]


def _rel_mul(a: dict, b: dict, ring: str, char: int) -> dict:
    out: dict = {}
    for (u1, v1), c1 in a.items():
        for (u2, v2), c2 in b.items():
            u, v = u1 + u2, v1 + v2
            if ring == RING_R1 and u > 0 and v > 0:
                continue
            _rel_add_term(out, (u, v), c1 * c2)
    return out


def _rel_to_mono(e: dict) -> Optional[Monomial]:
    if not e:
        return None
    assert len(e) == 1, f"entry is not a single monomial: {e}"
    (u, v), c = next(iter(e.items()))
    return Monomial(c, u, v)


def _mat_mul(a: list, b: list, ring: str, char: int) -> list:
    n, m = len(a), len(b[0]) if b else 0
    out = [[dict() for _ in range(m)] for _ in range(n)]
    for i in range(n):
        for k in range(len(b)):
            aik = a[i][k]
            if not aik:
                continue
            for j in range(m):
                if b[k][j]:
                    prod = _rel_mul(aik, b[k][j], ring, char)
                    for exps, cc in prod.items():
                        _rel_add_term(out[i][j], exps, cc)
    return out


# ---------------------------------------------------------------------------
# basis changes


@dataclass(frozen=True, slots=True)
class BasisChange:
    """An expression of a new basis through an old one.

    Row i states new_i = sum_j entries[i][j] * old_j; entries are single
    monomials or None.  Legal changes are grading-homogeneous and have an
    invertible scalar part, which makes them invertible over the ring.
    """

    ring: str
    char: int
    old_gens: Tuple[Generator, ...]
    new_gens: Tuple[Generator, ...]
    entries: Tuple[Tuple[Optional[Monomial], ...], ...]

    def __post_init__(self):
        n = len(self.old_gens)
        if len(self.new_gens) != n or len(self.entries) != n:
            raise ValidationError("basis change must be square")
        for row in self.entries:
            if len(row) != n:
                raise ValidationError("ragged basis change")

    @classmethod
    def identity(cls, c: Complex) -> "BasisChange":
        n = c.rank
        one = FieldElem(1, c.char)
        ents = tuple(
            tuple(Monomial(one, 0, 0) if i == j else None for j in range(n)) for i in range(n)
        )
        return cls(c.ring, c.char, c.generators, c.generators, ents)

    def check_homogeneous(self) -> None:
        for i, gnew in enumerate(self.new_gens):
            for j, gold in enumerate(self.old_gens):
                m = self.entries[i][j]
                if m is None:
                    continue
                if self.ring == RING_R1 and m.u_exp > 0 and m.v_exp > 0:
                    raise GradingViolation(
                        f"entry {gnew.id} <- {gold.id} is zero in R1 (mixed monomial)"
                    )
                want = (gold.gr_u - 2 * m.u_exp, gold.gr_v - 2 * m.v_exp)
                if gnew.grading != want:
                    raise GradingViolation(
                        f"entry {gnew.id} <- {gold.id} ({m}) breaks the bigrading"
                    )

    def scalar_part(self) -> Matrix:
        rows = []
        for row in self.entries:
            rows.append(
                [m.coeff if (m is not None and m.is_scalar()) else FieldElem(0, self.char) for m in row]
            )
        return Matrix(tuple(tuple(r) for r in rows), self.char)

    def _rel_rows(self) -> list:
        return [[_rel_from_mono(m) for m in row] for row in self.entries]

    def inverse(self) -> "BasisChange":
        """Invert via the terminating geometric series around the scalar part."""
        self.check_homogeneous()
        n = len(self.old_gens)
        sbar = self.scalar_part()
        if not sbar.is_invertible():
            raise NotInvertible("scalar part of the basis change is singular")
        sbar_inv = sbar.inverse()
        sbar_inv_rel = [[_rel_from_mono(_scalar_mono(sbar_inv[i, j])) for j in range(n)] for i in range(n)]
        # K = sbar^-1 * (P - sbar) has strictly positive-degree entries
        p_rel = self._rel_rows()
        nonscalar = [
            [{e: c for e, c in ent.items() if e != (0, 0)} for ent in row] for row in p_rel
        ]
        k = _mat_mul(sbar_inv_rel, nonscalar, self.ring, self.char)
        # (I + K)^-1 = sum (-K)^m; homogeneity makes K nilpotent
        phis = [g.gr_u + g.gr_v for g in self.old_gens]
        cap = 2 + (max(phis) - min(phis)) // 2 if phis else 1
        acc = [[_rel_from_mono(_scalar_mono(FieldElem(1 if i == j else 0, self.char))) for j in range(n)] for i in range(n)]
        neg_k = [[{e: -c for e, c in ent.items()} for ent in row] for row in k]
        power = [[dict(ent) for ent in row] for row in neg_k]
        steps = 0
        while any(ent for row in power for ent in row):
            steps += 1
            assert steps <= cap, "geometric series failed to terminate"
            for i in range(n):
                for j in range(n):
                    for exps, cc in power[i][j].items():
                        _rel_add_term(acc[i][j], exps, cc)
            power = _mat_mul(power, neg_k, self.ring, self.char)
        inv_rel = _mat_mul(acc, sbar_inv_rel, self.ring, self.char)
        ents = tuple(tuple(_rel_to_mono(inv_rel[i][j]) for j in range(n)) for i in range(n))
        return BasisChange(self.ring, self.char, self.new_gens, self.old_gens, ents)

    def compose(self, first: "BasisChange") -> "BasisChange":
        """The change performing ``first`` and then this one."""
        if self.old_gens != first.new_gens:
            raise ValidationError("composition bases do not line up")
        prod = _mat_mul(self._rel_rows(), first._rel_rows(), self.ring, self.char)
        n = len(first.old_gens)
        ents = tuple(tuple(_rel_to_mono(prod[i][j]) for j in range(n)) for i in range(len(self.new_gens)))
        return BasisChange(self.ring, self.char, first.old_gens, self.new_gens, ents)


def _scalar_mono(c: FieldElem) -> Optional[Monomial]:
    return Monomial(c, 0, 0) if c.value else None


def apply_basis_change(c: Complex, b: BasisChange) -> Complex:
    """Rewrite the differential in a new basis: D_new = P D P^-1."""
    if b.char != c.char or b.ring != c.ring:
        raise FieldMismatch("basis change over a different ring or field")
    if b.old_gens != c.generators:
        raise GradingViolation("basis change source basis does not match the complex")
    b.check_homogeneous()
    b_inv = b.inverse()  # raises NotInvertible when singular
    n = c.rank
    index = c.gen_index()
    d = [[dict() for _ in range(n)] for _ in range(n)]
    for a in c.arrows:
        _rel_add_term(d[index[a.src]][index[a.tgt]], (a.mono.u_exp, a.mono.v_exp), a.mono.coeff)
    new_d = _mat_mul(_mat_mul(b._rel_rows(), d, c.ring, c.char), b_inv._rel_rows(), c.ring, c.char)
    arrows = []
    for i in range(n):
        for j in range(n):
            for (u, v), coeff in new_d[i][j].items():
                arrows.append(Arrow(b.new_gens[i].id, b.new_gens[j].id, Monomial(coeff, u, v)))
    return Complex(c.ring, c.char, b.new_gens, tuple(arrows))


# ---------------------------------------------------------------------------
# structural operations


def reduce_mod_uv(c: Complex) -> Complex:
    """Pass from F[U,V] to R1 by deleting every mixed (diagonal) term."""
    assert c.ring == RING_FUV, "already over R1"
    kept = tuple(a for a in c.arrows if not (a.mono.u_exp > 0 and a.mono.v_exp > 0))
    out = Complex(RING_R1, c.char, c.generators, kept)
    assert not validate(out), "reduction mod UV left a non-complex"
    return out


def quotient_u(c: Complex) -> Complex:
    """Set U = 0: drop every term with a positive U power.

    The result only carries V-power arrows and is read as a complex of
    free graded F[V]-modules; the container type is unchanged.
    """
    kept = tuple(a for a in c.arrows if a.mono.u_exp == 0)
    return Complex(c.ring, c.char, c.generators, kept)


def quotient_v(c: Complex) -> Complex:
    """Set V = 0: drop every term with a positive V power."""
    kept = tuple(a for a in c.arrows if a.mono.v_exp == 0)
    return Complex(c.ring, c.char, c.generators, kept)


def bar(c: Complex) -> Complex:
    """Exchange the roles of U and V: swap exponents and swap gradings."""
    gens = tuple(Generator(g.id, g.gr_v, g.gr_u) for g in c.generators)
    arrows = tuple(
        Arrow(a.src, a.tgt, Monomial(a.mono.coeff, a.mono.v_exp, a.mono.u_exp)) for a in c.arrows
    )
    return Complex(c.ring, c.char, gens, arrows)


def _relabel(c: Complex, mapping: Dict[str, str]) -> Complex:
    gens = tuple(Generator(mapping.get(g.id, g.id), g.gr_u, g.gr_v) for g in c.generators)
    arrows = tuple(
        Arrow(mapping.get(a.src, a.src), mapping.get(a.tgt, a.tgt), a.mono) for a in c.arrows
    )
    return Complex(c.ring, c.char, gens, arrows)


def direct_sum(cs: Sequence[Complex]) -> Complex:
    """Block sum; generator ids are kept unless they collide, in which case
    the later copy gets an ``@k`` suffix (k = component index)."""
    if not cs:
        raise ValidationError("direct sum needs an explicit component; none given")
    ring, char = cs[0].ring, cs[0].char
    for c in cs[1:]:
        if c.char != char:
            raise FieldMismatch(f"components over F_{char} and F_{c.char}")
        if c.ring != ring:
            raise FieldMismatch(f"components over rings {ring} and {c.ring}")
    taken: set = set()
    parts = []
    for k, c in enumerate(cs):
        mapping = {}
        for g in c.generators:
            new_id = g.id
            while new_id in taken:
                new_id = f"{g.id}@{k}" if new_id == g.id else new_id + "'"
            mapping[g.id] = new_id
            taken.add(new_id)
        parts.append(_relabel(c, mapping))
    gens = tuple(itertools.chain.from_iterable(p.generators for p in parts))
    arrows = tuple(itertools.chain.from_iterable(p.arrows for p in parts))
    return Complex(ring, char, gens, arrows)


# ---------------------------------------------------------------------------
# zero complex stripping


def _strip_one(c: Complex, retired: set):
    """Split off the minimal active length-0 arrow, or return None."""
    index = c.gen_index()
    cands = [
        a
        for a in c.arrows
        if a.mono.is_scalar() and a.src not in retired and a.tgt not in retired
    ]
    if not cands:
        return None
    arrow = min(cands, key=lambda a: (index[a.src], index[a.tgt]))
    s, t, lam = arrow.src, arrow.tgt, arrow.mono.coeff
    n = c.rank
    one = FieldElem(1, c.char)
    rows = [[Monomial(one, 0, 0) if i == j else None for j in range(n)] for i in range(n)]
    si, ti = index[s], index[t]
    # row t becomes d(s) itself; its t-coefficient lam is an invertible scalar
    rows[ti] = [None] * n
    for a in c.terms_from(s):
        assert a.tgt not in retired, "arrow into a retired zero pair"
        assert rows[ti][index[a.tgt]] is None
        rows[ti][index[a.tgt]] = a.mono
    # every other generator absorbs its t-arrow: x' = x - (nu/lam) m s
    lam_inv = lam.inverse()
    for a in c.terms_into(t):
        if a.src == s:
            continue
        assert a.src not in retired, "arrow out of a retired zero pair"
        xi = index[a.src]
        assert rows[xi][si] is None
        rows[xi][si] = Monomial(-a.mono.coeff * lam_inv, a.mono.u_exp, a.mono.v_exp)
    change = BasisChange(c.ring, c.char, c.generators, c.generators, tuple(tuple(r) for r in rows))
    moved = apply_basis_change(c, change)
    # the pair must now be fully split: s -> t with unit coefficient, nothing else
    for a in moved.arrows:
        touches = {a.src, a.tgt} & {s, t}
        if touches:
            assert (a.src, a.tgt) == (s, t) and a.mono == Monomial(one, 0, 0), (
                f"zero pair failed to split: {a}"
            )
    return moved, change, (s, t)


def strip_zero_complexes(c: Complex):
    """Split off every zero complex (length-0 arrow pair).

    Returns (d, k, b): the stripped complex, the number of zero complexes,
    and the accumulated basis change.  b maps the input onto the direct sum
    arrangement [survivors..., s_1, t_1, ..., s_k, t_k].
    """
    cur = c
    total = BasisChange.identity(c)
    retired: set = set()
    pairs: List[tuple] = []
    while True:
        step = _strip_one(cur, retired)
        if step is None:
            break
        cur, change, pair = step
        total = change.compose(total)
        retired.update(pair)
        pairs.append(pair)
    index = cur.gen_index()
    survivors = [g for g in cur.generators if g.id not in retired]
    order = [g.id for g in survivors] + [gid for pair in pairs for gid in pair]
    gm = cur.gen_map()
    new_gens = tuple(gm[gid] for gid in order)
    n = cur.rank
    one = FieldElem(1, c.char)
    perm_rows = tuple(
        tuple(Monomial(one, 0, 0) if index[gid] == j else None for j in range(n))
        for gid in order
    )
    reorder = BasisChange(c.ring, c.char, cur.generators, new_gens, perm_rows)
    total = reorder.compose(total)
    d = Complex(
        c.ring,
        c.char,
        tuple(survivors),
        tuple(a for a in cur.arrows if a.src not in retired and a.tgt not in retired),
    )
    assert not has_length_zero_arrow(d)
    assert d.rank == c.rank - 2 * len(pairs)
    return d, len(pairs), total


# ---------------------------------------------------------------------------
# grading inference


def infer_gradings(
    gen_ids: Sequence[str],
    arrows: Sequence[tuple],
    anchors: Dict[str, tuple],
) -> Dict[str, tuple]:
    """Propagate bigradings along arrows from per-component anchors.

    ``arrows`` holds (src, tgt, u_exp, v_exp) tuples.  Each arrow forces
    gr(tgt) = gr(src) + (2u - 1, 2v - 1); anchors pin one generator per
    connected component.  Conflicts or unanchored components raise
    ValidationError.
    """
    neighbors: Dict[str, List[tuple]] = {g: [] for g in gen_ids}
    for src, tgt, u, v in arrows:
        delta = (2 * u - 1, 2 * v - 1)
        neighbors[src].append((tgt, delta))
        neighbors[tgt].append((src, (-delta[0], -delta[1])))
    known: Dict[str, tuple] = {}
    for gid, gr in anchors.items():
        if gid not in neighbors:
            raise ValidationError(f"anchor names unknown generator {gid!r}")
        known[gid] = gr
    queue = list(known)
    while queue:
        cur = queue.pop()
        for other, delta in neighbors[cur]:
            want = (known[cur][0] + delta[0], known[cur][1] + delta[1])
            if other in known:
                if known[other] != want:
                    raise ValidationError(
                        f"grading conflict at {other!r}: {known[other]} vs {want}"
                    )
            else:
                known[other] = want
                queue.append(other)
    missing = [g for g in gen_ids if g not in known]
    if missing:
        raise ValidationError(
            f"no anchor reaches generator {missing[0]!r}; add an anchor or explicit grading"
        )
    return known
