"""Exact linear algebra over prime fields.

Everything the decomposition engine needs from plain linear algebra lives
here: field elements, dense matrices, elementary factorizations (the LTU
form used to straighten shafts of crossover arrows), and rational canonical
forms (the canonical representatives used to compare holonomy classes).

Conventions
-----------
* Matrices act on column vectors; ``factor_product([f1, f2, f3], ...)``
  is the matrix product M(f1) M(f2) M(f3).
* ``ElementaryFactor`` indices are 1-based, matching the classical names
  T_ij, E_ij, D_i.  Permutations are plain 0-based tuples ``sigma`` with
  ``sigma[j]`` the image of j; their matrix has a 1 in row ``sigma[j]``
  of column j, so perm_matrix(a) * perm_matrix(b) = perm_matrix(a o b).
* Polynomials over F_p are tuples of int coefficients in ascending degree
  with no trailing zeros; the zero polynomial is the empty tuple.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .errors import DimensionMismatch, FieldMismatch, SizeLimitExceeded, Singular

_PRIMES_SEEN: set[int] = set()


def _check_prime(p: int) -> None:
    if p in _PRIMES_SEEN:
        return
    if not isinstance(p, int) or p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise ValueError(f"characteristic {p} is not prime")
    _PRIMES_SEEN.add(p)


@dataclass(frozen=True, slots=True)
class FieldElem:
    """An element of the prime field F_p, stored as the residue in [0, p)."""

    value: int
    char: int

    def __post_init__(self):
        _check_prime(self.char)
        object.__setattr__(self, "value", self.value % self.char)

    @classmethod
    def zero(cls, char: int) -> "FieldElem":
        return cls(0, char)

    @classmethod
    def one(cls, char: int) -> "FieldElem":
        return cls(1, char)

    def _lift(self, other):
        if isinstance(other, FieldElem):
            if other.char != self.char:
                raise FieldMismatch(f"F_{self.char} vs F_{other.char}")
            return other
        if isinstance(other, int):
            return FieldElem(other, self.char)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return FieldElem(self.value + other.value, self.char)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return FieldElem(self.value - other.value, self.char)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return FieldElem(self.value * other.value, self.char)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __neg__(self):
        return FieldElem(-self.value, self.char)

    def __bool__(self):
        return self.value != 0

    def inverse(self) -> "FieldElem":
        if self.value == 0:
            raise Singular(f"0 has no inverse in F_{self.char}")
        return FieldElem(pow(self.value, self.char - 2, self.char), self.char)

    def __repr__(self):
        return f"{self.value}#F{self.char}"


@dataclass(frozen=True, slots=True)
class Matrix:
    """Dense immutable matrix over F_p.

    ``entries`` is a tuple of row tuples of FieldElem; ``char`` is kept
    separately so 0-row matrices still know their field.
    """

    entries: tuple
    char: int

    def __post_init__(self):
        _check_prime(self.char)
        width = None
        for row in self.entries:
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise DimensionMismatch("ragged rows")
            for e in row:
                if not isinstance(e, FieldElem) or e.char != self.char:
                    raise FieldMismatch("entry outside F_%d" % self.char)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], char: int) -> "Matrix":
        """Build a matrix from rows of ints or FieldElems."""
        ents = tuple(
            tuple(e if isinstance(e, FieldElem) else FieldElem(e, char) for e in row)
            for row in rows
        )
        return cls(ents, char)

    @classmethod
    def identity(cls, n: int, char: int) -> "Matrix":
        return cls.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)], char)

    @classmethod
    def zeros(cls, rows: int, cols: int, char: int) -> "Matrix":
        return cls.from_rows([[0] * cols for _ in range(rows)], char)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i) -> tuple:
        return self.entries[i]

    def column(self, j) -> tuple:
        return tuple(row[j] for row in self.entries)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            if self.char != other.char:
                raise FieldMismatch("matrix product across fields")
            if self.cols != other.rows:
                raise DimensionMismatch(f"{self.rows}x{self.cols} times {other.rows}x{other.cols}")
            ocols = list(zip(*other.entries)) if other.entries else []
            zero = FieldElem.zero(self.char)
            ents = tuple(
                tuple(sum((a * b for a, b in zip(row, col)), zero) for col in ocols)
                for row in self.entries
            )
            return Matrix(ents, self.char)
        if isinstance(other, (FieldElem, int)):
            lam = other if isinstance(other, FieldElem) else FieldElem(other, self.char)
            return Matrix(tuple(tuple(e * lam for e in row) for row in self.entries), self.char)
        return NotImplemented

    def __add__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("sum of unequal shapes")
        ents = tuple(
            tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)
        )
        return Matrix(ents, self.char)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Matrix(tuple(tuple(-e for e in row) for row in self.entries), self.char)

    def transpose(self) -> "Matrix":
        return Matrix(tuple(zip(*self.entries)) if self.entries else (), self.char)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def apply(self, vec: Sequence[FieldElem]) -> tuple:
        """Matrix times column vector."""
        if len(vec) != self.cols:
            raise DimensionMismatch("vector length")
        zero = FieldElem.zero(self.char)
        return tuple(sum((a * b for a, b in zip(row, vec)), zero) for row in self.entries)

    def _gauss_inverse(self) -> Optional["Matrix"]:
        # Gauss-Jordan on [A | I]; None when a pivot is missing.
        n = self.rows
        aug = [list(row) + [FieldElem(1 if i == j else 0, self.char) for j in range(n)]
               for i, row in enumerate(self.entries)]
        for j in range(n):
            piv = next((i for i in range(j, n) if aug[i][j]), None)
            if piv is None:
                return None
            aug[j], aug[piv] = aug[piv], aug[j]
            inv = aug[j][j].inverse()
            aug[j] = [e * inv for e in aug[j]]
            for i in range(n):
                if i != j and aug[i][j]:
                    c = aug[i][j]
                    aug[i] = [a - c * b for a, b in zip(aug[i], aug[j])]
        return Matrix(tuple(tuple(row[n:]) for row in aug), self.char)

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise DimensionMismatch("inverse of non-square matrix")
        inv = self._gauss_inverse()
        if inv is None:
            raise Singular("matrix is not invertible")
        return inv

    def is_invertible(self) -> bool:
        return self.is_square() and self._gauss_inverse() is not None

    def to_lists(self) -> list:
        return [[e.value for e in row] for row in self.entries]

    def __str__(self):
        return "[" + "; ".join(" ".join(str(e.value) for e in row) for row in self.entries) + "]"


def invert(m: Matrix) -> Matrix:
    """Inverse of a square matrix; raises Singular when none exists."""
    return m.inverse()


def block_diag(blocks: Sequence[Matrix], char: Optional[int] = None) -> Matrix:
    """Direct sum of square blocks along the diagonal."""
    if not blocks:
        if char is None:
            raise DimensionMismatch("empty block list needs an explicit field")
        return Matrix((), char)
    char = blocks[0].char
    n = sum(b.rows for b in blocks)
    rows = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        if b.char != char:
            raise FieldMismatch("blocks over different fields")
        for i in range(b.rows):
            for j in range(b.cols):
                rows[off + i][off + j] = b[i, j].value
        off += b.rows
    return Matrix.from_rows(rows, char)


# ---------------------------------------------------------------------------
# permutations (0-based image tuples)


def perm_identity(n: int) -> tuple:
    return tuple(range(n))


def perm_compose(a: Sequence[int], b: Sequence[int]) -> tuple:
    """Function composition a o b (apply b first)."""
    return tuple(a[b[j]] for j in range(len(b)))

def perm_inverse(a: Sequence[int]) -> tuple:
    out = [0] * len(a)
    for j, i in enumerate(a):
        out[i] = j
    return tuple(out)


def perm_matrix(sigma: Sequence[int], char: int) -> Matrix:
    """Permutation matrix sending basis vector j to basis vector sigma[j]."""
    n = len(sigma)
    rows = [[0] * n for _ in range(n)]
    for j, i in enumerate(sigma):
        rows[i][j] = 1
    return Matrix.from_rows(rows, char)


def cycle_type(sigma: Sequence[int]) -> tuple:
    """Sorted cycle lengths of a permutation."""
    seen = [False] * len(sigma)
    lens = []
    for s in range(len(sigma)):
        if seen[s]:
            continue
        ln, j = 0, s
        while not seen[j]:
            seen[j] = True
            j = sigma[j]
            ln += 1
        lens.append(ln)
    return tuple(sorted(lens))


# ---------------------------------------------------------------------------
# elementary factors (1-based indices, classical notation)


@dataclass(frozen=True, slots=True)
class Transposition:
    """T_ij: the permutation matrix swapping basis vectors i and j (1-based)."""

    i: int
    j: int

    def __post_init__(self):
        if self.i < 1 or self.j < 1 or self.i == self.j:
            raise ValueError("transposition needs two distinct 1-based indices")


@dataclass(frozen=True, slots=True)
class AddUnit:
    """E_ij = I + e_ij (1-based): as a left factor, adds row j into row i."""

    i: int
    j: int

    def __post_init__(self):
        if self.i < 1 or self.j < 1 or self.i == self.j:
            raise ValueError("unit addition needs two distinct 1-based indices")


@dataclass(frozen=True, slots=True)
class Scale:
    """D_i^lam (1-based): scales coordinate i by a nonzero field element."""

    i: int
    lam: FieldElem

    def __post_init__(self):
        if self.i < 1:
            raise ValueError("scale index is 1-based")
        if not self.lam.value:
            raise ValueError("scale coefficient must be nonzero")


ElementaryFactor = Union[Transposition, AddUnit, Scale]


def factor_matrix(f: ElementaryFactor, n: int, char: int) -> Matrix:
    """The n x n matrix of a single elementary factor."""
    if max(f.i, getattr(f, "j", 1)) > n:
        raise DimensionMismatch("factor index exceeds matrix size")
    rows = [[FieldElem(1 if i == j else 0, char) for j in range(n)] for i in range(n)]
    if isinstance(f, Transposition):
        i, j = f.i - 1, f.j - 1
        rows[i][i] = rows[j][j] = FieldElem(0, char)
        rows[i][j] = rows[j][i] = FieldElem(1, char)
    elif isinstance(f, AddUnit):
        rows[f.i - 1][f.j - 1] = FieldElem(1, char)
    elif isinstance(f, Scale):
        if f.lam.char != char:
            raise FieldMismatch("scale coefficient outside F_%d" % char)
        rows[f.i - 1][f.i - 1] = f.lam
    else:
        raise TypeError(f"not an elementary factor: {f!r}")
    return Matrix(tuple(tuple(r) for r in rows), char)


def factor_product(factors: Iterable[ElementaryFactor], n: int, char: int) -> Matrix:
    """Ordered product of elementary factors (identity for the empty list)."""
    acc = Matrix.identity(n, char)
    for f in factors:
        acc = acc * factor_matrix(f, n, char)
    return acc


def _general_addunit(i: int, j: int, lam: FieldElem) -> list:
    # E_ij^lam = D_i^lam E_ij^1 D_i^(1/lam); unit coefficient stays a single factor.
    if not lam.value:
        return []
    if lam.value == 1:
        return [AddUnit(i, j)]
    return [Scale(i, lam), AddUnit(i, j), Scale(i, lam.inverse())]


def _perm_transpositions(sigma: Sequence[int]) -> list:
    # Each cycle (c0 c1 ... c_{m-1}) factors as T_{c0 c1} T_{c1 c2} ... in
    # product order, using 1-based labels.
    out = []
    seen = [False] * len(sigma)
    for s in range(len(sigma)):
        if seen[s] or sigma[s] == s:
            seen[s] = True
            continue
        cyc, j = [], s
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = sigma[j]
        for a, b in zip(cyc, cyc[1:]):
            out.append(Transposition(a + 1, b + 1))
    return out


def ltu_factorize(m: Matrix):
    """Factor an invertible matrix as (lower) (permutation) (upper).

    Returns ``(lower, sigma, upper)`` where ``lower`` and ``upper`` are lists
    of elementary factors, ``sigma`` is a 0-based permutation tuple, and
    factor_product(lower) * perm_matrix(sigma) * factor_product(upper)
    reproduces the input.  Every AddUnit in ``lower`` has i > j, every
    AddUnit in ``upper`` has i < j, scales may appear in either list, and
    neither list contains a transposition.

    The sweep is column by column: entries in already-pivoted rows are
    cleared with column operations (upper factors), then the topmost
    unpivoted nonzero row becomes the pivot and everything below it is
    cleared with row operations (lower factors).
    """
    if not m.is_square():
        raise DimensionMismatch("LTU factorization needs a square matrix")
    n = m.rows
    char = m.char
    a = [list(row) for row in m.entries]
    pivot_of_col: list = [None] * n
    pivoted_rows: set = set()
    row_ops = []  # applied left factors, in time order
    col_ops = []  # applied right factors, in time order

    for j in range(n):
        # clear entries sitting in pivoted rows via earlier pivot columns
        for r in sorted(pivoted_rows):
            if a[r][j]:
                jp = next(jj for jj, pr in enumerate(pivot_of_col) if pr == r)
                c = a[r][j]
                for i in range(n):
                    a[i][j] = a[i][j] - c * a[i][jp]
                col_ops.append((jp, j, -c))  # right factor I + (-c) e_{jp, j}
        piv = next((i for i in range(n) if i not in pivoted_rows and a[i][j]), None)
        if piv is None:
            raise Singular("column %d is dependent on earlier columns" % j)
        for i in range(piv + 1, n):
            if i in pivoted_rows or not a[i][j]:
                continue
            c = a[i][j]
            coeff = -c * a[piv][j].inverse()
            for jj in range(n):
                a[i][jj] = a[i][jj] + coeff * a[piv][jj]
            row_ops.append(("add", i, piv, coeff))
        if a[piv][j].value != 1:
            c = a[piv][j]
            inv = c.inverse()
            for jj in range(n):
                a[piv][jj] = a[piv][jj] * inv
            row_ops.append(("scale", piv, inv))
        pivot_of_col[j] = piv
        pivoted_rows.add(piv)

    # a is now the permutation matrix with 1 at (pivot_of_col[j], j)
    sigma = tuple(pivot_of_col)
    lower: list = []
    for op in row_ops:
        # L = (applied ops, newest leftmost)^-1 = inverses in time order
        if op[0] == "add":
            _, i, r, c = op
            lower.extend(_general_addunit(i + 1, r + 1, -c))
        else:
            _, r, c = op
            lower.append(Scale(r + 1, c.inverse()))
    upper: list = []
    for jp, j, c in reversed(col_ops):
        upper.extend(_general_addunit(jp + 1, j + 1, -c))
    return lower, sigma, upper


def elementary_factorize(m: Matrix) -> list:
    """Write an invertible matrix as an ordered product of transpositions,
    unit additions and scales."""
    lower, sigma, upper = ltu_factorize(m)
    return lower + _perm_transpositions(sigma) + upper


# ---------------------------------------------------------------------------
# polynomials over F_p: int coefficient tuples, ascending degree


PZERO: tuple = ()
PONE: tuple = (1,)


def pnorm(coeffs: Iterable[int], p: int) -> tuple:
    out = [c % p for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def pdeg(f: tuple) -> int:
    return len(f) - 1


def padd(f: tuple, g: tuple, p: int) -> tuple:
    n = max(len(f), len(g))
    return pnorm([(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)], p)


def psub(f: tuple, g: tuple, p: int) -> tuple:
    n = max(len(f), len(g))
    return pnorm([(f[i] if i < len(f) else 0) - (g[i] if i < len(g) else 0) for i in range(n)], p)


def pmul(f: tuple, g: tuple, p: int) -> tuple:
    if not f or not g:
        return PZERO
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return pnorm(out, p)


def pdivmod(f: tuple, g: tuple, p: int) -> tuple:
    """Polynomial division with remainder; g must be nonzero."""
    assert g, "division by the zero polynomial"
    inv_lead = pow(g[-1], p - 2, p)
    rem = list(f)
    q = [0] * max(len(f) - len(g) + 1, 0)
    while len(rem) >= len(g) and any(rem):
        while rem and rem[-1] % p == 0:
            rem.pop()
        if len(rem) < len(g):
            break
        shift = len(rem) - len(g)
        c = (rem[-1] * inv_lead) % p
        q[shift] = c
        for i, b in enumerate(g):
            rem[shift + i] = (rem[shift + i] - c * b) % p
        rem.pop()
    return pnorm(q, p), pnorm(rem, p)


def pmonic(f: tuple, p: int) -> tuple:
    if not f:
        return f
    inv = pow(f[-1], p - 2, p)
    return pnorm([c * inv for c in f], p)


def pgcd(f: tuple, g: tuple, p: int) -> tuple:
    while g:
        f, g = g, pdivmod(f, g, p)[1]
    return pmonic(f, p)


def ppow(f: tuple, e: int, p: int) -> tuple:
    out = PONE
    for _ in range(e):
        out = pmul(out, f, p)
    return out


_IRR_CACHE: dict = {}
_IRR_BUDGET = 2_000_000


def irreducibles(p: int, max_deg: int) -> list:
    """Monic irreducibles over F_p up to max_deg, in (degree, coeffs) order."""
    _check_prime(p)
    have = _IRR_CACHE.setdefault(p, {})
    for d in range(1, max_deg + 1):
        if d in have:
            continue
        if p**d > _IRR_BUDGET:
            raise SizeLimitExceeded(f"irreducible table of degree {d} over F_{p}")
        found = []
        smaller = [q for dd in range(1, d // 2 + 1) for q in have[dd]]
        for tail in itertools.product(range(p), repeat=d):
            cand = pnorm(list(tail) + [1], p)
            if d == 1 or all(pdivmod(cand, q, p)[1] for q in smaller):
                found.append(cand)
        have[d] = found
    return [q for d in range(1, max_deg + 1) for q in have[d]]


def factor_poly(f: tuple, p: int) -> list:
    """Factor a monic polynomial into [(irreducible, multiplicity)] pairs,
    sorted by (degree, coefficients)."""
    f = pmonic(f, p)
    assert pdeg(f) >= 1
    out = []
    for q in irreducibles(p, pdeg(f)):
        if pdeg(f) < 1:
            break
        if pdeg(q) > pdeg(f):
            break
        e = 0
        while True:
            quo, rem = pdivmod(f, q, p)
            if rem:
                break
            f, e = quo, e + 1
        if e:
            out.append((q, e))
    assert f == PONE, "leftover non-unit factor"
    return out


def companion(f: tuple, p: int) -> Matrix:
    """Companion matrix of a monic polynomial: ones on the subdiagonal,
    negated coefficients in the last column."""
    m = pdeg(f)
    assert m >= 1 and f[-1] % p == 1
    rows = [[0] * m for _ in range(m)]
    for i in range(m - 1):
        rows[i + 1][i] = 1
    for i in range(m):
        rows[i][m - 1] = -f[i] % p
    return Matrix.from_rows(rows, p)


# ---------------------------------------------------------------------------
# rational canonical form via diagonalization of xI - A over F_p[x]


def _poly_snf(w: list, p: int, track_pinv: bool):
    """Bring a square F_p[x] matrix to diagonal form d_1 | d_2 | ... with
    unimodular row and column operations.

    Returns (diag, pinv) where pinv is the inverse of the accumulated row
    operations (a polynomial matrix), or None when not tracked; pinv's
    columns present the cokernel generators in the original coordinates.
    """
    n = len(w)
    w = [list(row) for row in w]
    pinv = [[PONE if i == j else PZERO for j in range(n)] for i in range(n)] if track_pinv else None

    def row_add(i, j, f):  # row_i += f * row_j
        for c in range(n):
            w[i][c] = padd(w[i][c], pmul(f, w[j][c], p), p)
        if pinv is not None:  # pinv: col_j -= f * col_i
            for r in range(n):
                pinv[r][j] = psub(pinv[r][j], pmul(f, pinv[r][i], p), p)

    def row_swap(i, j):
        w[i], w[j] = w[j], w[i]
        if pinv is not None:
            for r in range(n):
                pinv[r][i], pinv[r][j] = pinv[r][j], pinv[r][i]

    def row_scale(i, c):  # multiply row i by the unit c
        w[i] = [pnorm([cc * c for cc in f], p) for f in w[i]]
        if pinv is not None:
            cinv = pow(c, p - 2, p)
            for r in range(n):
                pinv[r][i] = pnorm([cc * cinv for cc in pinv[r][i]], p)

    def col_add(j, i, f):  # col_j += f * col_i
        for r in range(n):
            w[r][j] = padd(w[r][j], pmul(f, w[r][i], p), p)

    def col_swap(i, j):
        for r in range(n):
            w[r][i], w[r][j] = w[r][j], w[r][i]

    for t in range(n):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    if w[i][j] and (best is None or pdeg(w[i][j]) < pdeg(w[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break  # submatrix is zero
            if best[0] != t:
                row_swap(t, best[0])
            if best[1] != t:
                col_swap(t, best[1])
            dirty = False
            for i in range(t + 1, n):
                if w[i][t]:
                    q, _ = pdivmod(w[i][t], w[t][t], p)
                    row_add(i, t, psub(PZERO, q, p))
                    if w[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if w[t][j]:
                    q, _ = pdivmod(w[t][j], w[t][t], p)
                    col_add(j, t, psub(PZERO, q, p))
                    if w[t][j]:
                        dirty = True
            if dirty:
                continue
            bad = next(
                (
                    i
                    for i in range(t + 1, n)
                    if any(pdivmod(w[i][j], w[t][t], p)[1] for j in range(t + 1, n) if w[i][j])
                ),
                None,
            )
            if bad is None:
                break
            row_add(t, bad, PONE)
        if w[t][t] and w[t][t][-1] != 1:
            row_scale(t, pow(w[t][t][-1], p - 2, p))
    return [w[t][t] for t in range(n)], pinv


def _char_matrix(a: Matrix) -> list:
    n = a.rows
    p = a.char
    w = []
    for i in range(n):
        row = []
        for j in range(n):
            lin = [-a[i, j].value % p, 1 if i == j else 0]
            row.append(pnorm(lin, p))
        w.append(row)
    return w


def invariant_factors(a: Matrix) -> tuple:
    """Nonconstant invariant factors of a square matrix, in divisibility
    order (each divides the next; the last is the minimal polynomial)."""
    if not a.is_square():
        raise DimensionMismatch("invariant factors need a square matrix")
    diag, _ = _poly_snf(_char_matrix(a), a.char, track_pinv=False)
    facs = [d for d in diag if pdeg(d) >= 1]
    assert sum(pdeg(d) for d in facs) == a.rows
    return tuple(facs)


def charpoly(a: Matrix) -> tuple:
    """Characteristic polynomial (monic, as a coefficient tuple)."""
    out = PONE
    for d in invariant_factors(a):
        out = pmul(out, d, a.char)
    return out


def rational_canonical_form(a: Matrix) -> Matrix:
    """Frobenius normal form: companion blocks of the invariant factors in
    divisibility order.  Conjugate inputs give identical outputs."""
    if not a.is_square():
        raise DimensionMismatch("canonical form needs a square matrix")
    if not a.is_invertible():
        raise Singular("canonical form restricted to invertible matrices")
    return block_diag([companion(d, a.char) for d in invariant_factors(a)], a.char)


def primary_rational_form(a: Matrix):
    """Similarity transform to the primary form: S with S^-1 A S equal to a
    direct sum of companion blocks of prime powers.

    Returns (s, pairs) with pairs a tuple of (irreducible, multiplicity),
    sorted by (degree, coefficients, multiplicity), and the block layout of
    S^-1 A S matching that order.
    """
    if not a.is_square():
        raise DimensionMismatch("primary form needs a square matrix")
    if not a.is_invertible():
        raise Singular("primary form restricted to invertible matrices")
    n, p = a.rows, a.char
    diag, pinv = _poly_snf(_char_matrix(a), p, track_pinv=True)

    powers = [Matrix.identity(n, p)]

    def eval_at_a(f: tuple) -> Matrix:
        acc = Matrix.zeros(n, n, p)
        while len(powers) <= pdeg(f):
            powers.append(powers[-1] * a)
        for k, c in enumerate(f):
            if c:
                acc = acc + powers[k] * FieldElem(c, p)
        return acc

    chunks = []  # (sort key, [column vectors])
    for t in range(n):
        d = diag[t]
        if pdeg(d) < 1:
            continue
        # generator of the cyclic summand F[x]/(d): column t of pinv, read
        # through the module structure (x acts as a)
        v = [FieldElem(0, p)] * n
        for i in range(n):
            f = pinv[i][t]
            if not f:
                continue
            col = eval_at_a(f).column(i)
            v = [x + y for x, y in zip(v, col)]
        for q, e in factor_poly(d, p):
            qe = ppow(q, e, p)
            cof, rem = pdivmod(d, qe, p)
            assert not rem
            wvec = eval_at_a(cof).apply(v)
            cols = []
            cur = tuple(wvec)
            for _ in range(pdeg(qe)):
                cols.append(cur)
                cur = a.apply(cur)
            chunks.append(((pdeg(q), q, e), cols))

    chunks.sort(key=lambda ch: ch[0])
    pairs = tuple((key[1], key[2]) for key, _ in chunks)
    all_cols = [c for _, cols in chunks for c in cols]
    assert len(all_cols) == n
    s = Matrix(tuple(zip(*all_cols)), p)
    target = block_diag([companion(ppow(q, e, p), p) for q, e in pairs], p)
    assert s.is_invertible(), "primary basis failed to span"
    assert s.inverse() * a * s == target, "primary form reassembly failed"
    return s, pairs


def elementary_divisors(a: Matrix) -> tuple:
    """Multiset of (irreducible, multiplicity) prime-power divisors, sorted."""
    out = []
    for d in invariant_factors(a):
        out.extend(factor_poly(d, a.char))
    out.sort(key=lambda qe: (pdeg(qe[0]), qe[0], qe[1]))
    return tuple(out)


def conjugate_test(a: Matrix, b: Matrix) -> bool:
    """Whether two invertible matrices are conjugate in GL_n(F_p), decided
    by comparing rational canonical forms."""
    if a.char != b.char:
        raise FieldMismatch("conjugacy across different fields")
    if not (a.is_square() and b.is_square()) or a.rows != b.rows:
        raise DimensionMismatch("conjugacy needs equal square sizes")
    return rational_canonical_form(a) == rational_canonical_form(b)


_PERMUTATION_BOUND = 8


def class_contains_permutation(a: Matrix) -> bool:
    """Whether the conjugacy class of an invertible matrix contains a
    permutation matrix.

    Decided by conjugate_test against size-w permutation matrices; the w!
    enumeration caps at w = 8 and raises SizeLimitExceeded beyond.  A
    characteristic-polynomial comparison (cycle lengths give x^l - 1
    factors) skips candidates that cannot match.
    """
    if not a.is_square():
        raise DimensionMismatch("needs a square matrix")
    n, p = a.rows, a.char
    if n > _PERMUTATION_BOUND:
        raise SizeLimitExceeded(f"permutation search beyond size {_PERMUTATION_BOUND}")
    if not a.is_invertible():
        raise Singular("conjugacy classes taken inside GL only")
    cp = charpoly(a)
    verdict_by_type: dict = {}
    for sigma in itertools.permutations(range(n)):
        ct = cycle_type(sigma)
        perm_cp = PONE
        for ln in ct:
            perm_cp = pmul(perm_cp, pnorm([-1] + [0] * (ln - 1) + [1], p), p)
        if perm_cp != cp:
            continue
        if ct not in verdict_by_type:
            verdict_by_type[ct] = conjugate_test(a, perm_matrix(sigma, p))
        if verdict_by_type[ct]:
            return True
    return False
