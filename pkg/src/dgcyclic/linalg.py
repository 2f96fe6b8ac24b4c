"""Exact scalars and sparse exact linear algebra over Q and F_p.

Scalars are plain python objects: ``fractions.Fraction`` over the rationals,
``int`` residues in ``[0, p)`` over a prime field.  A :class:`Field` value
carries the arithmetic; matrices are immutable-by-convention sparse maps
``(row, col) -> scalar`` with no stored zeros.

Elimination uses Markowitz minimal-fill pivoting with lexicographic
``(row, col)`` tie-breaking, so every derived basis is reproducible across
runs and platforms.  Over the rationals the forward pass is fraction-free
(one-step Bareiss on integer-scaled rows) to keep coefficient growth under
control on the large sparse matrices coming out of bar complexes; divisions
only happen in the final reduction pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class FieldError(ValueError):
    pass


class MatrixError(ValueError):
    pass


@dataclass(frozen=True)
class Field:
    """Exact base field: the rationals (char == 0) or F_p (char == p prime)."""

    char: int

    def __post_init__(self):
        if self.char != 0 and not _is_prime(self.char):
            raise FieldError(f"characteristic must be 0 or prime, got {self.char}")

    @staticmethod
    def rationals() -> "Field":
        return Field(0)

    @staticmethod
    def prime(p: int) -> "Field":
        if p < 2:
            raise FieldError(f"not a prime: {p}")
        return Field(p)

    @property
    def is_rationals(self) -> bool:
        return self.char == 0

    # -- scalar arithmetic -------------------------------------------------

    def of(self, x):
        """Normalize an int / Fraction / scalar string into this field."""
        if isinstance(x, str):
            return self.parse(x)
        if self.char == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator % self.char == 0:
                raise FieldError(f"denominator not invertible mod {self.char}")
            return (x.numerator * self.inv(x.denominator % self.char)) % self.char
        return int(x) % self.char

    def zero(self):
        return Fraction(0) if self.char == 0 else 0

    def one(self):
        return Fraction(1) if self.char == 0 else 1

    def add(self, a, b):
        return a + b if self.char == 0 else (a + b) % self.char

    def sub(self, a, b):
        return a - b if self.char == 0 else (a - b) % self.char

    def mul(self, a, b):
        return a * b if self.char == 0 else (a * b) % self.char

    def neg(self, a):
        return -a if self.char == 0 else (-a) % self.char

    def inv(self, a):
        if self.char == 0:
            if a == 0:
                raise ZeroDivisionError("inverse of zero")
            return 1 / Fraction(a)
        a = int(a) % self.char
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.char - 2, self.char)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def sign(self, s: int):
        """The field element (-1)**s."""
        return self.one() if s % 2 == 0 else self.neg(self.one())

    # -- serialization -----------------------------------------------------

    def parse(self, text: str):
        """Parse a coefficient string: "a" or "a/b" over Q, an integer mod p."""
        text = str(text).strip()
        if "/" in text:
            num_s, den_s = text.split("/", 1)
            num, den = int(num_s), int(den_s)
            if den == 0:
                raise FieldError(f"malformed coefficient {text!r}: zero denominator")
            if self.char == 0:
                return Fraction(num, den)
            return self.of(Fraction(num, den))
        return self.of(int(text))

    def format(self, value) -> str:
        if self.char == 0:
            f = Fraction(value)
            return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
        return str(int(value) % self.char)

    def __str__(self):
        return "Q" if self.char == 0 else f"F{self.char}"


QQ = Field.rationals()


class SparseMatrix:
    """Immutable sparse matrix over an exact field.

    Entries are stored column-major (``cols[j][i] = value``) because almost
    every algorithm here consumes columns: matrix application, composition,
    image/kernel extraction.
    """

    __slots__ = ("field", "nrows", "ncols", "cols")

    def __init__(self, field: Field, nrows: int, ncols: int, entries=None):
        if nrows < 0 or ncols < 0:
            raise MatrixError("negative matrix dimension")
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        cols: dict = {}
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for item in items:
                if isinstance(entries, dict):
                    (i, j), v = item
                else:
                    i, j, v = item
                if not (0 <= i < nrows and 0 <= j < ncols):
                    raise MatrixError(f"entry ({i},{j}) out of range {nrows}x{ncols}")
                v = field.of(v)
                if v == 0:
                    continue
                col = cols.setdefault(j, {})
                if i in col:
                    raise MatrixError(f"duplicate entry at ({i},{j})")
                col[i] = v
        self.cols = cols

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(field: Field, nrows: int, ncols: int) -> "SparseMatrix":
        return SparseMatrix(field, nrows, ncols)

    @staticmethod
    def identity(field: Field, n: int) -> "SparseMatrix":
        return SparseMatrix(field, n, n, [(i, i, field.one()) for i in range(n)])

    @staticmethod
    def from_dense(field: Field, rows) -> "SparseMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        entries = []
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise MatrixError("ragged dense matrix")
            for j, v in enumerate(row):
                entries.append((i, j, v))
        return SparseMatrix(field, nrows, ncols, entries)

    @staticmethod
    def from_columns(field: Field, nrows: int, columns) -> "SparseMatrix":
        entries = []
        for j, col in enumerate(columns):
            for i, v in col.items():
                entries.append((i, j, v))
        return SparseMatrix(field, nrows, len(columns), entries)

    # -- access ------------------------------------------------------------

    def entries(self):
        """Iterate (row, col, value) sorted by (row, col)."""
        out = []
        for j in self.cols:
            for i, v in self.cols[j].items():
                out.append((i, j, v))
        out.sort(key=lambda t: (t[0], t[1]))
        return out

    def column(self, j: int) -> dict:
        return dict(self.cols.get(j, {}))

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols.values())

    def is_zero(self) -> bool:
        return not self.cols

    def to_dense(self):
        out = [[self.field.zero()] * self.ncols for _ in range(self.nrows)]
        for j, col in self.cols.items():
            for i, v in col.items():
                out[i][j] = v
        return out

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.field == other.field and self.nrows == other.nrows
                and self.ncols == other.ncols and self.cols == other.cols)

    def __hash__(self):
        return hash((self.field, self.nrows, self.ncols,
                     tuple(self.entries())))

    def __repr__(self):
        return f"SparseMatrix({self.field}, {self.nrows}x{self.ncols}, nnz={self.nnz()})"

    # -- arithmetic ----------------------------------------------------------

    def _check_same_shape(self, other):
        if self.field != other.field:
            raise MatrixError("field mismatch")
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise MatrixError("shape mismatch")

    def __add__(self, other):
        self._check_same_shape(other)
        f = self.field
        cols = {j: dict(c) for j, c in self.cols.items()}
        for j, col in other.cols.items():
            tgt = cols.setdefault(j, {})
            for i, v in col.items():
                s = f.add(tgt.get(i, f.zero()), v)
                if s == 0:
                    tgt.pop(i, None)
                else:
                    tgt[i] = s
        m = SparseMatrix(f, self.nrows, self.ncols)
        m.cols = {j: c for j, c in cols.items() if c}
        return m

    def __neg__(self):
        return self.scale(self.field.neg(self.field.one()))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        f = self.field
        c = f.of(c)
        m = SparseMatrix(f, self.nrows, self.ncols)
        if c == 0:
            return m
        m.cols = {j: {i: f.mul(v, c) for i, v in col.items()}
                  for j, col in self.cols.items()}
        return m

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.field != other.field:
            raise MatrixError("field mismatch")
        if self.ncols != other.nrows:
            raise MatrixError(f"shape mismatch {self.nrows}x{self.ncols} @ "
                              f"{other.nrows}x{other.ncols}")
        f = self.field
        out = SparseMatrix(f, self.nrows, other.ncols)
        cols = {}
        for j, bcol in other.cols.items():
            acc: dict = {}
            for k, bv in bcol.items():
                acol = self.cols.get(k)
                if not acol:
                    continue
                for i, av in acol.items():
                    acc[i] = acc.get(i, 0) + av * bv
            if f.char:
                acc = {i: v % f.char for i, v in acc.items()}
            acc = {i: v for i, v in acc.items() if v != 0}
            if acc:
                cols[j] = acc
        out.cols = cols
        return out

    def apply(self, vec: dict) -> dict:
        """Apply to a sparse column vector {index: value}."""
        f = self.field
        acc: dict = {}
        for j, x in vec.items():
            col = self.cols.get(j)
            if not col:
                continue
            for i, v in col.items():
                acc[i] = acc.get(i, 0) + v * x
        if f.char:
            acc = {i: v % f.char for i, v in acc.items()}
        return {i: v for i, v in acc.items() if v != 0}

    def transpose(self) -> "SparseMatrix":
        m = SparseMatrix(self.field, self.ncols, self.nrows)
        cols: dict = {}
        for j, col in self.cols.items():
            for i, v in col.items():
                cols.setdefault(i, {})[j] = v
        m.cols = cols
        return m

    # -- block constructions -------------------------------------------------

    @staticmethod
    def hstack(mats) -> "SparseMatrix":
        mats = list(mats)
        if not mats:
            raise MatrixError("hstack of nothing")
        f, nrows = mats[0].field, mats[0].nrows
        out = SparseMatrix(f, nrows, sum(m.ncols for m in mats))
        cols = {}
        off = 0
        for m in mats:
            if m.field != f or m.nrows != nrows:
                raise MatrixError("hstack mismatch")
            for j, col in m.cols.items():
                cols[off + j] = dict(col)
            off += m.ncols
        out.cols = cols
        return out

    @staticmethod
    def vstack(mats) -> "SparseMatrix":
        mats = list(mats)
        if not mats:
            raise MatrixError("vstack of nothing")
        f, ncols = mats[0].field, mats[0].ncols
        out = SparseMatrix(f, sum(m.nrows for m in mats), ncols)
        cols: dict = {}
        off = 0
        for m in mats:
            if m.field != f or m.ncols != ncols:
                raise MatrixError("vstack mismatch")
            for j, col in m.cols.items():
                tgt = cols.setdefault(j, {})
                for i, v in col.items():
                    tgt[off + i] = v
            off += m.nrows
        out.cols = cols
        return out


# ---------------------------------------------------------------------------
# elimination core


def _rows_of(M: SparseMatrix):
    rows = [dict() for _ in range(M.nrows)]
    for j, col in M.cols.items():
        for i, v in col.items():
            rows[i][j] = v
    return rows


def _scale_row_integral(row: dict) -> dict:
    """Scale a Fraction row to a primitive integer row (kernel-safe)."""
    if not row:
        return row
    lcm = 1
    for v in row.values():
        d = Fraction(v).denominator
        lcm = lcm // gcd(lcm, d) * d
    ints = {j: int(Fraction(v) * lcm) for j, v in row.items()}
    g = 0
    for v in ints.values():
        g = gcd(g, abs(v))
    if g > 1:
        ints = {j: v // g for j, v in ints.items()}
    return ints


def _forward_eliminate(field: Field, rows, pivot_cols_bound: int):
    """In-place forward elimination; returns pivots [(row_index, col)] in order.

    Pivots are restricted to columns < pivot_cols_bound (extra columns act
    as an augmented right-hand side).  Over Q the rows must hold ints and the
    updates are one-step Bareiss (exact integer division by the previous
    pivot); over F_p classical normalized elimination.
    """
    active = set(i for i, r in enumerate(rows) if r)
    pivots = []
    prev = 1
    while True:
        colcount: dict = {}
        for i in active:
            for j in rows[i]:
                if j < pivot_cols_bound:
                    colcount[j] = colcount.get(j, 0) + 1
        best = None
        for i in sorted(active):
            r = rows[i]
            rc = sum(1 for j in r if j < pivot_cols_bound)
            if rc == 0:
                continue
            for j in sorted(r):
                if j >= pivot_cols_bound:
                    continue
                key = ((rc - 1) * (colcount[j] - 1), i, j)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        _, pi, pj = best
        prow = rows[pi]
        pval = prow[pj]
        active.discard(pi)
        pivots.append((pi, pj))
        if field.char == 0:
            for i in list(active):
                r = rows[i]
                rv = r.get(pj, 0)
                new = {}
                for j in set(r) | (set(prow) if rv else set()):
                    val = pval * r.get(j, 0) - rv * prow.get(j, 0)
                    if val:
                        new[j] = val // prev
                rows[i] = new
                if not new:
                    active.discard(i)
            prev = pval
        else:
            p = field.char
            pinv = pow(pval, p - 2, p)
            for i in list(active):
                r = rows[i]
                rv = r.get(pj)
                if not rv:
                    continue
                factor = (rv * pinv) % p
                for j, w in prow.items():
                    val = (r.get(j, 0) - factor * w) % p
                    if val:
                        r[j] = val
                    else:
                        r.pop(j, None)
                if not r:
                    active.discard(i)
    return pivots, active


def _reduce_pivot_rows(field: Field, rows, pivots):
    """Gauss-Jordan second pass: normalize pivots to 1, clear other pivot rows."""
    if field.char == 0:
        for pi, _ in pivots:
            rows[pi] = {j: Fraction(v) for j, v in rows[pi].items()}
    for k in range(len(pivots) - 1, -1, -1):
        pi, pj = pivots[k]
        prow = rows[pi]
        inv = field.inv(prow[pj])
        prow = {j: field.mul(v, inv) for j, v in prow.items()}
        rows[pi] = prow
        for l, (qi, _) in enumerate(pivots):
            if l == k:
                continue
            qrow = rows[qi]
            c = qrow.get(pj)
            if not c:
                continue
            for j, v in prow.items():
                val = field.sub(qrow.get(j, field.zero()), field.mul(c, v))
                if val == 0:
                    qrow.pop(j, None)
                else:
                    qrow[j] = val


def _prepare_rows(field: Field, M: SparseMatrix, extra: SparseMatrix | None = None):
    rows = _rows_of(M)
    if extra is not None:
        for i in range(M.nrows):
            for j, v in extra.cols.items():
                if i in v:
                    rows[i][M.ncols + j] = v[i]
    if field.char == 0:
        rows = [_scale_row_integral(r) for r in rows]
    return rows


def rref(M: SparseMatrix):
    """Reduced echelon data: (pivots [(row, col)] sorted by col, reduced rows)."""
    rows = _prepare_rows(M.field, M)
    pivots, _ = _forward_eliminate(M.field, rows, M.ncols)
    _reduce_pivot_rows(M.field, rows, pivots)
    pivots = sorted(pivots, key=lambda t: t[1])
    return pivots, rows


def rank(M: SparseMatrix) -> int:
    rows = _prepare_rows(M.field, M)
    pivots, _ = _forward_eliminate(M.field, rows, M.ncols)
    return len(pivots)


def kernel_basis(M: SparseMatrix) -> SparseMatrix:
    """Basis of the right kernel, one column per non-pivot column of M.

    Each basis vector has coefficient 1 at its free column and 0 at every
    other free column (reduced relative to the deterministic pivot choice).
    """
    f = M.field
    pivots, rows = rref(M)
    pivot_cols = {pj for _, pj in pivots}
    free = [j for j in range(M.ncols) if j not in pivot_cols]
    columns = []
    for fc in free:
        vec = {fc: f.one()}
        for pi, pj in pivots:
            v = rows[pi].get(fc)
            if v:
                vec[pj] = f.neg(v)
        columns.append(vec)
    return SparseMatrix.from_columns(f, M.ncols, columns)


def _column_echelon(M: SparseMatrix):
    """(basis, pivot_rows): reduced column-echelon basis of the column space.

    Column j of the basis has value 1 at pivot_rows[j]; every other basis
    column vanishes there.
    """
    f = M.field
    pivots, rows = rref(M.transpose())
    columns = [dict(rows[pi]) for pi, _ in pivots]
    pivot_rows = [pj for _, pj in pivots]
    return SparseMatrix.from_columns(f, M.nrows, columns), pivot_rows


def image_basis(M: SparseMatrix) -> SparseMatrix:
    """Reduced column-echelon basis of the column space of M."""
    return _column_echelon(M)[0]


def solve(M: SparseMatrix, b: dict | SparseMatrix):
    """Some x with Mx = b (free coordinates 0), or None if inconsistent."""
    f = M.field
    if isinstance(b, SparseMatrix):
        if b.ncols != 1 or b.nrows != M.nrows:
            raise MatrixError("rhs shape mismatch")
        bcol = b.column(0)
    else:
        bcol = dict(b)
        if any(not (0 <= i < M.nrows) for i in bcol):
            raise MatrixError("rhs index out of range")
    rhs = SparseMatrix.from_columns(f, M.nrows, [bcol])
    sols = solve_matrix(M, rhs)
    return None if sols is None else sols.column(0)


def solve_matrix(M: SparseMatrix, B: SparseMatrix):
    """Columnwise solve MX = B; None if any column is inconsistent."""
    f = M.field
    if B.nrows != M.nrows or B.field != f:
        raise MatrixError("rhs mismatch")
    rows = _prepare_rows(f, M, extra=B)
    pivots, active = _forward_eliminate(f, rows, M.ncols)
    for i in active:
        if rows[i]:
            return None
    _reduce_pivot_rows(f, rows, pivots)
    columns = [dict() for _ in range(B.ncols)]
    for pi, pj in pivots:
        for j, v in rows[pi].items():
            if j >= M.ncols:
                columns[j - M.ncols][pj] = v
    return SparseMatrix.from_columns(f, M.ncols, columns)


def inverse(M: SparseMatrix) -> SparseMatrix:
    if M.nrows != M.ncols:
        raise MatrixError("inverse of non-square matrix")
    X = solve_matrix(M, SparseMatrix.identity(M.field, M.nrows))
    if X is None or rank(M) != M.nrows:
        raise MatrixError("matrix not invertible")
    return X


# ---------------------------------------------------------------------------
# subspace toolkit (subspaces are given by basis matrices, vectors as columns)


def subspace_sum(*spaces: SparseMatrix) -> SparseMatrix:
    return image_basis(SparseMatrix.hstack(spaces))


def subspace_intersection(U: SparseMatrix, V: SparseMatrix) -> SparseMatrix:
    """Basis of im(U) ∩ im(V)."""
    if U.nrows != V.nrows:
        raise MatrixError("ambient dimension mismatch")
    K = kernel_basis(SparseMatrix.hstack([U, -V]))
    top = SparseMatrix(U.field, U.ncols, K.ncols,
                       [(i, j, v) for (i, j, v) in K.entries() if i < U.ncols])
    return image_basis(U @ top)


def preimage_basis(F: SparseMatrix, U: SparseMatrix) -> SparseMatrix:
    """Basis of {x : Fx in im(U)}."""
    if F.nrows != U.nrows:
        raise MatrixError("target dimension mismatch")
    K = kernel_basis(SparseMatrix.hstack([F, -U]))
    top = SparseMatrix(F.field, F.ncols, K.ncols,
                       [(i, j, v) for (i, j, v) in K.entries() if i < F.ncols])
    return image_basis(top)


def coords_in(U: SparseMatrix, W: SparseMatrix) -> SparseMatrix:
    """Express the columns of W in the basis U; raises if not contained."""
    X = solve_matrix(U, W)
    if X is None:
        raise MatrixError("vectors not contained in subspace")
    return X


def quotient_map(U: SparseMatrix):
    """Projection / section pair for the quotient of k^n by im(U).

    Returns (proj, sect) with proj of shape (n-r) x n, sect of shape
    n x (n-r), proj @ sect = id, ker(proj) = im(U).  The complement basis is
    the set of standard vectors away from the pivot rows of the reduced
    column echelon form of U -- deterministic by the pivoting contract.
    """
    f = U.field
    n = U.nrows
    E, pivot_rows = _column_echelon(U)
    pivot_set = set(pivot_rows)
    comp = [i for i in range(n) if i not in pivot_set]
    proj_entries = []
    for a, q in enumerate(comp):
        proj_entries.append((a, q, f.one()))
        for jcol, pr in enumerate(pivot_rows):
            v = E.column(jcol).get(q)
            if v:
                proj_entries.append((a, pr, f.neg(v)))
    proj = SparseMatrix(f, len(comp), n, proj_entries)
    sect = SparseMatrix(f, n, len(comp), [(q, a, f.one()) for a, q in enumerate(comp)])
    return proj, sect
