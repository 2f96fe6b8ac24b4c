"""Finite-dimensional unital associative DG algebras by structure constants.

An algebra is a labeled basis with integer degrees, a unit vector, a sparse
multiplication table and a degree -1 differential.  Validation is finite and
exact: associativity, unitality, degree additivity, the Leibniz rule and
d² = 0 are checked on all basis tuples and failures come with witnesses.

Smoothness is witnessed, never decided: a resolution of the diagonal
bimodule by corner-projective terms A·u ⊗ g ⊗ w·A (u, w idempotents, both
defaulting to the unit) is supplied and the tool checks exactness of the
augmented total complex.  Strictly free terms (u = w = 1) do not suffice
even for k × k or M_n(k) -- no finite free bimodule resolution exists for
those by a K-theory obstruction -- so the witness format carries the corner
idempotents explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from dgcyclic.linalg import Field, SparseMatrix, _column_echelon, image_basis
from dgcyclic.complexes import (
    ChainComplex, ComplexError, GradedSpace, quotient_complex,
)


class AlgebraError(ValueError):
    pass


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: str = ""


@dataclass
class ValidationReport:
    checks: list = dc_field(default_factory=list)

    def add(self, name: str, passed: bool, witness: str = ""):
        self.checks.append(CheckResult(name, passed, witness))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            extra = f"  [{c.witness}]" if (c.witness and not c.passed) else ""
            lines.append(f"{c.name}: {status}{extra}")
        return "\n".join(lines)


class DGAlgebra:
    """Unital associative DG algebra on an explicit finite basis.

    ``mult[(i, j)]`` is the sparse expansion of e_i · e_j; ``diff[j]`` the
    expansion of d(e_j).  Vectors over the basis are sparse dicts.
    """

    def __init__(self, field: Field, labels, degrees, unit, mult, diff=None,
                 name: str = ""):
        self.field = field
        self.labels = list(labels)
        self.degrees = [int(d) for d in degrees]
        if len(self.labels) != len(self.degrees):
            raise AlgebraError("labels/degrees length mismatch")
        self.dim = len(self.labels)
        self.unit = {i: field.of(v) for i, v in dict(unit).items() if field.of(v) != 0}
        self.mult = {}
        for (i, j), expansion in mult.items():
            clean = {k: field.of(v) for k, v in expansion.items() if field.of(v) != 0}
            if clean:
                self.mult[(i, j)] = clean
        self.diff = {}
        for j, expansion in (diff or {}).items():
            clean = {i: field.of(v) for i, v in expansion.items() if field.of(v) != 0}
            if clean:
                self.diff[j] = clean
        self.name = name
        for (i, j) in self.mult:
            if not (0 <= i < self.dim and 0 <= j < self.dim):
                raise AlgebraError(f"multiplication index out of range: ({i}, {j})")

    # -- arithmetic on sparse coefficient vectors ---------------------------

    def multiply(self, u: dict, v: dict) -> dict:
        f = self.field
        acc: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                exp = self.mult.get((i, j))
                if not exp:
                    continue
                ab = a * b
                for k, c in exp.items():
                    acc[k] = acc.get(k, 0) + ab * c
        if f.char:
            acc = {k: v % f.char for k, v in acc.items()}
        return {k: v for k, v in acc.items() if v != 0}

    def d_of(self, u: dict) -> dict:
        f = self.field
        acc: dict = {}
        for j, a in u.items():
            for i, c in self.diff.get(j, {}).items():
                acc[i] = acc.get(i, 0) + a * c
        if f.char:
            acc = {k: v % f.char for k, v in acc.items()}
        return {k: v for k, v in acc.items() if v != 0}

    def basis_vector(self, i: int) -> dict:
        return {i: self.field.one()}

    def diff_matrix(self) -> SparseMatrix:
        entries = []
        for j, exp in self.diff.items():
            for i, v in exp.items():
                entries.append((i, j, v))
        return SparseMatrix(self.field, self.dim, self.dim, entries)

    def left_mult_matrix(self, vec: dict) -> SparseMatrix:
        cols = [self.multiply(vec, self.basis_vector(j)) for j in range(self.dim)]
        return SparseMatrix.from_columns(self.field, self.dim, cols)

    def right_mult_matrix(self, vec: dict) -> SparseMatrix:
        cols = [self.multiply(self.basis_vector(j), vec) for j in range(self.dim)]
        return SparseMatrix.from_columns(self.field, self.dim, cols)

    def label_of(self, vec: dict) -> str:
        if not vec:
            return "0"
        parts = []
        for i in sorted(vec):
            c = self.field.format(vec[i])
            parts.append(self.labels[i] if c == "1" else f"{c}*{self.labels[i]}")
        return " + ".join(parts)

    def __repr__(self):
        tag = self.name or "DGAlgebra"
        return f"{tag}(dim {self.dim} over {self.field})"


def validate(A: DGAlgebra) -> ValidationReport:
    """Check every algebra axiom, reporting a witness tuple on failure."""
    f = A.field
    report = ValidationReport()

    ok, witness = True, ""
    for (i, j), exp in A.mult.items():
        for k in exp:
            if A.degrees[k] != A.degrees[i] + A.degrees[j]:
                ok, witness = False, (f"deg({A.labels[i]}*{A.labels[j]}) component "
                                      f"{A.labels[k]} breaks additivity")
                break
        if not ok:
            break
    if ok:
        for j, exp in A.diff.items():
            for i in exp:
                if A.degrees[i] != A.degrees[j] - 1:
                    ok, witness = False, f"d({A.labels[j]}) has a degree-{A.degrees[i]} component"
                    break
            if not ok:
                break
    report.add("degree", ok, witness)

    ok, witness = True, ""
    for i in range(A.dim):
        e = A.basis_vector(i)
        if A.multiply(A.unit, e) != e or A.multiply(e, A.unit) != e:
            ok, witness = False, f"unit fails on {A.labels[i]}"
            break
    if ok and any(A.degrees[i] != 0 for i in A.unit):
        ok, witness = False, "unit not concentrated in degree 0"
    if ok and A.d_of(A.unit):
        ok, witness = False, "d(1) != 0"
    report.add("unit", ok, witness)

    ok, witness = True, ""
    for i in range(A.dim):
        for j in range(A.dim):
            ij = A.mult.get((i, j), {})
            for k in range(A.dim):
                lhs = A.multiply(ij, A.basis_vector(k))
                rhs = A.multiply(A.basis_vector(i), A.mult.get((j, k), {}))
                if lhs != rhs:
                    ok, witness = False, (f"({A.labels[i]}*{A.labels[j]})*{A.labels[k]} != "
                                          f"{A.labels[i]}*({A.labels[j]}*{A.labels[k]})")
                    break
            if not ok:
                break
        if not ok:
            break
    report.add("associativity", ok, witness)

    ok, witness = True, ""
    for i in range(A.dim):
        for j in range(A.dim):
            lhs = A.d_of(A.mult.get((i, j), {}))
            rhs = A.multiply(A.diff.get(i, {}), A.basis_vector(j))
            sgn = f.sign(A.degrees[i])
            for k, v in A.multiply(A.basis_vector(i), A.diff.get(j, {})).items():
                s = f.add(rhs.get(k, f.zero()), f.mul(sgn, v))
                if s == 0:
                    rhs.pop(k, None)
                else:
                    rhs[k] = s
            if lhs != rhs:
                ok, witness = False, f"Leibniz fails on ({A.labels[i]}, {A.labels[j]})"
                break
        if not ok:
            break
    report.add("leibniz", ok, witness)

    ok, witness = True, ""
    for j in range(A.dim):
        if A.d_of(A.diff.get(j, {})):
            ok, witness = False, f"d²({A.labels[j]}) != 0"
            break
    report.add("d_squared", ok, witness)
    return report


def opposite(A: DGAlgebra) -> DGAlgebra:
    """Opposite algebra: mult(i, j) -> (-1)^{|e_i||e_j|} mult(j, i)."""
    f = A.field
    mult = {}
    for (i, j), exp in A.mult.items():
        sgn = f.sign(A.degrees[i] * A.degrees[j])
        mult[(j, i)] = {k: f.mul(sgn, v) for k, v in exp.items()}
    return DGAlgebra(f, A.labels, A.degrees, A.unit, mult, A.diff,
                     name=f"{A.name}^op" if A.name else "")


def enveloping(A: DGAlgebra) -> DGAlgebra:
    """A^op ⊗ A with Koszul signs; basis pairs indexed i * dim + j."""
    f = A.field
    n = A.dim
    op = opposite(A)
    labels = [f"{A.labels[i]}°⊗{A.labels[j]}" for i in range(n) for j in range(n)]
    degrees = [A.degrees[i] + A.degrees[j] for i in range(n) for j in range(n)]
    unit = {}
    for a, va in A.unit.items():
        for b, vb in A.unit.items():
            unit[a * n + b] = f.mul(va, vb)
    mult = {}
    for (i1, k1), exp1 in op.mult.items():
        for (j1, l1), exp2 in A.mult.items():
            sgn = f.sign(A.degrees[j1] * A.degrees[k1])
            tgt = {}
            for a, v1 in exp1.items():
                for b, v2 in exp2.items():
                    tgt[a * n + b] = f.mul(sgn, f.mul(v1, v2))
            key = (i1 * n + j1, k1 * n + l1)
            acc = mult.setdefault(key, {})
            for t, v in tgt.items():
                s = f.add(acc.get(t, f.zero()), v)
                if s == 0:
                    acc.pop(t, None)
                else:
                    acc[t] = s
    mult = {k: v for k, v in mult.items() if v}
    diff = {}
    for i in range(n):
        for j in range(n):
            exp = {}
            for t, v in A.diff.get(i, {}).items():
                exp[t * n + j] = v
            sgn = f.sign(A.degrees[i])
            for t, v in A.diff.get(j, {}).items():
                key = i * n + t
                exp[key] = f.add(exp.get(key, f.zero()), f.mul(sgn, v))
            exp = {k: v for k, v in exp.items() if v != 0}
            if exp:
                diff[i * n + j] = exp
    return DGAlgebra(f, labels, degrees, unit, mult, diff,
                     name=f"env({A.name})" if A.name else "")


# ---------------------------------------------------------------------------
# builtins

BUILTIN_NAMES = ("ground_field", "product_of_fields", "matrix_algebra",
                 "upper_triangular", "dual_numbers", "truncated_poly",
                 "exterior_odd")


def builtin(name: str, field: Field, n: int | None = None) -> DGAlgebra:
    """Construct a named example algebra over the given field."""
    one = field.one()
    if name == "ground_field":
        return DGAlgebra(field, ["1"], [0], {0: one}, {(0, 0): {0: one}},
                         name="ground_field")
    if name == "product_of_fields":
        if not n or n < 1:
            raise AlgebraError("product_of_fields needs n >= 1")
        mult = {(i, i): {i: one} for i in range(n)}
        unit = {i: one for i in range(n)}
        return DGAlgebra(field, [f"e{i + 1}" for i in range(n)], [0] * n, unit, mult,
                         name=f"product_of_fields({n})")
    if name == "matrix_algebra":
        if not n or n < 1:
            raise AlgebraError("matrix_algebra needs n >= 1")
        idx = {(i, j): i * n + j for i in range(n) for j in range(n)}
        labels = [f"e{i + 1}{j + 1}" for i in range(n) for j in range(n)]
        mult = {}
        for (i, j) in idx:
            for (k, l) in idx:
                if j == k:
                    mult[(idx[(i, j)], idx[(k, l)])] = {idx[(i, l)]: one}
        unit = {idx[(i, i)]: one for i in range(n)}
        return DGAlgebra(field, labels, [0] * (n * n), unit, mult,
                         name=f"matrix_algebra({n})")
    if name == "upper_triangular":
        if not n or n < 1:
            raise AlgebraError("upper_triangular needs n >= 1")
        pairs = [(i, j) for i in range(n) for j in range(i, n)]
        idx = {p: a for a, p in enumerate(pairs)}
        labels = [f"e{i + 1}{j + 1}" for (i, j) in pairs]
        mult = {}
        for (i, j) in pairs:
            for (k, l) in pairs:
                if j == k:
                    mult[(idx[(i, j)], idx[(k, l)])] = {idx[(i, l)]: one}
        unit = {idx[(i, i)]: one for i in range(n)}
        return DGAlgebra(field, labels, [0] * len(pairs), unit, mult,
                         name=f"upper_triangular({n})")
    if name == "dual_numbers":
        A = builtin("truncated_poly", field, 2)
        A.name = "dual_numbers"
        return A
    if name == "truncated_poly":
        if not n or n < 2:
            raise AlgebraError("truncated_poly needs n >= 2")
        labels = ["1"] + [f"x^{k}" if k > 1 else "x" for k in range(1, n)]
        mult = {}
        for i in range(n):
            for j in range(n):
                if i + j < n:
                    mult[(i, j)] = {i + j: one}
        return DGAlgebra(field, labels, [0] * n, {0: one}, mult,
                         name=f"truncated_poly({n})")
    if name == "exterior_odd":
        mult = {(0, 0): {0: one}, (0, 1): {1: one}, (1, 0): {1: one}}
        return DGAlgebra(field, ["1", "xi"], [0, 1], {0: one}, mult,
                         name="exterior_odd")
    raise AlgebraError(f"unknown builtin {name!r}")


def is_proper(A: DGAlgebra):
    """Finite-dimensional over a field, hence always proper; certificate = dims."""
    by_degree = {}
    for d in A.degrees:
        by_degree[d] = by_degree.get(d, 0) + 1
    return True, {"total_dimension": A.dim,
                  "by_degree": dict(sorted(by_degree.items()))}


# ---------------------------------------------------------------------------
# bimodules and witnessed smoothness


class Bimodule:
    """Graded (A, A)-bimodule given by flat action matrices on a chosen basis."""

    def __init__(self, algebra: DGAlgebra, degrees, left, right, diff=None,
                 labels=None):
        self.algebra = algebra
        self.field = algebra.field
        self.degrees = [int(d) for d in degrees]
        self.dim = len(self.degrees)
        self.left = left      # basis index -> SparseMatrix (action of e_a)
        self.right = right
        self.diff = diff if diff is not None else SparseMatrix.zero(self.field, self.dim, self.dim)
        self.labels = labels or [f"m{i}" for i in range(self.dim)]

    def _action_of(self, table, vec: dict) -> SparseMatrix:
        acc = SparseMatrix.zero(self.field, self.dim, self.dim)
        for a, c in vec.items():
            acc = acc + table[a].scale(c)
        return acc

    def validate(self) -> ValidationReport:
        A, f = self.algebra, self.field
        report = ValidationReport()
        ident = SparseMatrix.identity(f, self.dim)

        ok = (self._action_of(self.left, A.unit) == ident
              and self._action_of(self.right, A.unit) == ident)
        report.add("bimodule_unital", ok)

        ok, witness = True, ""
        for i in range(A.dim):
            for j in range(A.dim):
                prod = A.mult.get((i, j), {})
                if self.left[i] @ self.left[j] != self._action_of(self.left, prod):
                    ok, witness = False, f"left action fails on ({A.labels[i]}, {A.labels[j]})"
                    break
                if self.right[j] @ self.right[i] != self._action_of(self.right, prod):
                    ok, witness = False, f"right action fails on ({A.labels[i]}, {A.labels[j]})"
                    break
            if not ok:
                break
        report.add("bimodule_associative", ok, witness)

        ok, witness = True, ""
        for i in range(A.dim):
            for j in range(A.dim):
                if self.left[i] @ self.right[j] != self.right[j] @ self.left[i]:
                    ok, witness = False, f"actions do not commute on ({A.labels[i]}, {A.labels[j]})"
                    break
            if not ok:
                break
        report.add("bimodule_actions_commute", ok, witness)

        sign_diag = SparseMatrix(f, self.dim, self.dim,
                                 [(i, i, f.sign(self.degrees[i])) for i in range(self.dim)])
        ok, witness = True, ""
        for a in range(A.dim):
            da = A.diff.get(a, {})
            lhs = self.diff @ self.left[a]
            rhs = self._action_of(self.left, da) + self.left[a].scale(f.sign(A.degrees[a])) @ self.diff
            if lhs != rhs:
                ok, witness = False, f"left Leibniz fails on {A.labels[a]}"
                break
            lhs = self.diff @ self.right[a]
            rhs = self.right[a] @ self.diff + (self._action_of(self.right, da) @ sign_diag)
            if lhs != rhs:
                ok, witness = False, f"right Leibniz fails on {A.labels[a]}"
                break
        report.add("bimodule_leibniz", ok, witness)

        report.add("bimodule_d_squared", (self.diff @ self.diff).is_zero())
        return report


@dataclass
class ResolutionGenerator:
    """Generator of a corner term A·u ⊗ g ⊗ w·A (u, w = None means the unit)."""
    label: str
    degree: int = 0
    left: dict | None = None
    right: dict | None = None


class BimoduleTerm:
    """One resolution term: the direct sum over generators of corner bimodules."""

    def __init__(self, algebra: DGAlgebra, generators):
        self.algebra = algebra
        self.field = algebra.field
        self.generators = list(generators)
        self.left_bases = []    # per generator: (basis matrix, degrees, pivot rows)
        self.right_bases = []
        self.left_idem = []
        self.right_idem = []
        for g in self.generators:
            u = g.left if g.left is not None else dict(algebra.unit)
            w = g.right if g.right is not None else dict(algebra.unit)
            self.left_idem.append(u)
            self.right_idem.append(w)
            self.left_bases.append(self._graded_image(algebra.right_mult_matrix(u)))
            self.right_bases.append(self._graded_image(algebra.left_mult_matrix(w)))
        self.basis = []         # (gen_idx, left_col, right_col)
        self.degrees = []
        self.index = {}
        for gi, g in enumerate(self.generators):
            L, R = self.left_bases[gi], self.right_bases[gi]
            for a in range(L[0].ncols):
                for b in range(R[0].ncols):
                    self.index[(gi, a, b)] = len(self.basis)
                    self.basis.append((gi, a, b))
                    self.degrees.append(L[1][a] + g.degree + R[1][b])
        self.dim = len(self.basis)

    def _graded_image(self, op: SparseMatrix):
        """Homogeneous reduced basis of im(op), its degrees and pivot rows."""
        A = self.algebra
        by_degree: dict = {}
        for i, d in enumerate(A.degrees):
            by_degree.setdefault(d, []).append(i)
        columns, degs, pivots = [], [], []
        for d in sorted(by_degree):
            idxs = by_degree[d]
            pos = {i: a for a, i in enumerate(idxs)}
            entries = []
            for j in range(op.ncols):
                col = op.column(j)
                for i, v in col.items():
                    if i in pos:
                        entries.append((pos[i], j, v))
            block = SparseMatrix(self.field, len(idxs), op.ncols, entries)
            basis, pivot_rows = _column_echelon(block)
            for c in range(basis.ncols):
                col = basis.column(c)
                columns.append({idxs[i]: v for i, v in col.items()})
                degs.append(d)
                pivots.append(idxs[pivot_rows[c]])
        return (SparseMatrix.from_columns(self.field, A.dim, columns), degs, pivots)

    def idempotency_report(self, report: ValidationReport, tag: str):
        A = self.algebra
        for gi, g in enumerate(self.generators):
            for side, e in (("left", self.left_idem[gi]), ("right", self.right_idem[gi])):
                ok = (A.multiply(e, e) == e and not A.d_of(e)
                      and all(A.degrees[i] == 0 for i in e))
                report.add(f"{tag}:{g.label}:{side}_idempotent", ok,
                           "" if ok else f"{side} element of {g.label} is not a closed degree-0 idempotent")

    def coords_of_ambient(self, gi: int, tensor_coeffs: dict):
        """Corner coordinates of Σ c_{a,b} e_a ⊗ g_i ⊗ e_b, or None if outside."""
        f = self.field
        L, _, Lp = self.left_bases[gi]
        R, _, Rp = self.right_bases[gi]
        coords = {}
        for a in range(L.ncols):
            for b in range(R.ncols):
                v = tensor_coeffs.get((Lp[a], Rp[b]))
                if v:
                    coords[(a, b)] = v
        # reconstruct and compare to confirm membership in the corner
        recon: dict = {}
        for (a, b), c in coords.items():
            for i, lv in L.column(a).items():
                for j, rv in R.column(b).items():
                    key = (i, j)
                    s = recon.get(key, 0) + c * lv * rv
                    recon[key] = s
        if f.char:
            recon = {k: v % f.char for k, v in recon.items()}
        recon = {k: v for k, v in recon.items() if v != 0}
        clean = {k: v for k, v in tensor_coeffs.items() if v != 0}
        if recon != clean:
            return None
        return coords

    def element_vector(self, gi: int, left_vec: dict, right_vec: dict) -> dict:
        """Coordinates of x ⊗ g_i ⊗ y in the term basis (x ∈ A·u, y ∈ w·A)."""
        tensor = {}
        for i, lv in left_vec.items():
            for j, rv in right_vec.items():
                tensor[(i, j)] = tensor.get((i, j), 0) + lv * rv
        if self.field.char:
            tensor = {k: v % self.field.char for k, v in tensor.items()}
        coords = self.coords_of_ambient(gi, tensor)
        if coords is None:
            raise AlgebraError(f"element escapes the corner of generator {gi}")
        out = {}
        for (a, b), v in coords.items():
            out[self.index[(gi, a, b)]] = v
        return out

    def left_action(self, a_idx: int) -> SparseMatrix:
        A = self.algebra
        cols = []
        for (gi, a, b) in self.basis:
            x = {i: v for i, v in self.left_bases[gi][0].column(a).items()}
            y = {j: v for j, v in self.right_bases[gi][0].column(b).items()}
            ax = A.multiply(A.basis_vector(a_idx), x)
            cols.append(self.element_vector(gi, ax, y))
        return SparseMatrix.from_columns(self.field, self.dim, cols)

    def right_action(self, a_idx: int) -> SparseMatrix:
        A = self.algebra
        cols = []
        for (gi, a, b) in self.basis:
            x = {i: v for i, v in self.left_bases[gi][0].column(a).items()}
            y = {j: v for j, v in self.right_bases[gi][0].column(b).items()}
            yb = A.multiply(y, A.basis_vector(a_idx))
            cols.append(self.element_vector(gi, x, yb))
        return SparseMatrix.from_columns(self.field, self.dim, cols)

    def internal_diff(self) -> SparseMatrix:
        """d(x ⊗ g ⊗ y) = dx ⊗ g ⊗ y + (-1)^{|x|+|g|} x ⊗ g ⊗ dy."""
        A, f = self.algebra, self.field
        cols = []
        for (gi, a, b) in self.basis:
            g = self.generators[gi]
            Lb, Ldeg, _ = self.left_bases[gi]
            Rb, _, _ = self.right_bases[gi]
            x = {i: v for i, v in Lb.column(a).items()}
            y = {j: v for j, v in Rb.column(b).items()}
            acc: dict = {}
            dx = A.d_of(x)
            if dx:
                for k, v in self.element_vector(gi, dx, y).items():
                    acc[k] = acc.get(k, 0) + v
            dy = A.d_of(y)
            if dy:
                sgn = f.sign(Ldeg[a] + g.degree)
                for k, v in self.element_vector(gi, x, dy).items():
                    acc[k] = acc.get(k, 0) + sgn * v
            if f.char:
                acc = {k: v % f.char for k, v in acc.items()}
            cols.append({k: v for k, v in acc.items() if v != 0})
        return SparseMatrix.from_columns(f, self.dim, cols)

    def as_bimodule(self) -> Bimodule:
        left = {a: self.left_action(a) for a in range(self.algebra.dim)}
        right = {a: self.right_action(a) for a in range(self.algebra.dim)}
        labels = [f"({self.generators[gi].label};{a},{b})"
                  for (gi, a, b) in self.basis]
        return Bimodule(self.algebra, self.degrees, left, right,
                        self.internal_diff(), labels)

    def commutator_columns(self):
        """Spanning set of [A, P] with the graded sign on total degree."""
        A, f = self.algebra, self.field
        cols = []
        lefts = {t: self.left_action(t) for t in range(A.dim)}
        rights = {t: self.right_action(t) for t in range(A.dim)}
        for t in range(A.dim):
            for m in range(self.dim):
                col_l = lefts[t].column(m)
                col_r = rights[t].column(m)
                sgn = f.sign(A.degrees[t] * self.degrees[m])
                acc = dict(col_l)
                for i, v in col_r.items():
                    s = f.sub(acc.get(i, f.zero()), f.mul(sgn, v))
                    if s == 0:
                        acc.pop(i, None)
                    else:
                        acc[i] = s
                if acc:
                    cols.append((self.degrees[m] + A.degrees[t], acc))
        return cols


class BimoduleResolution:
    """Witness P_m -> ... -> P_0 -> A by corner terms, with generator data.

    ``diffs[m]`` (for m = 1..len(terms)-1) maps generator index of P_m to a
    list of (a_idx, gen'_idx, b_idx, coeff) describing the image of
    u ⊗ g ⊗ w in the ambient A ⊗ V_{m-1} ⊗ A; ``augmentation`` maps each
    generator of P_0 to a coefficient vector in A.
    """

    def __init__(self, algebra: DGAlgebra, terms, diffs, augmentation):
        self.algebra = algebra
        self.field = algebra.field
        self.terms = [BimoduleTerm(algebra, gens) for gens in terms]
        self.diffs = list(diffs)
        self.augmentation = [
            {i: algebra.field.of(v) for i, v in vec.items() if algebra.field.of(v) != 0}
            for vec in augmentation]
        if len(self.diffs) != max(len(self.terms) - 1, 0):
            raise AlgebraError("need exactly one differential per adjacent term pair")
        if len(self.augmentation) != len(self.terms[0].generators):
            raise AlgebraError("augmentation must cover the generators of P_0")

    @property
    def length(self) -> int:
        return len(self.terms) - 1

    def generator_image(self, m: int, gi: int) -> dict:
        """Ambient dict (a, g', b) -> coeff for the image of generator gi of P_m."""
        out = {}
        for (a, gp, b, c) in self.diffs[m - 1].get(gi, []):
            v = self.field.of(c)
            if v:
                out[(a, gp, b)] = self.field.add(out.get((a, gp, b), self.field.zero()), v)
        return {k: v for k, v in out.items() if v != 0}

    def differential_matrix(self, m: int) -> SparseMatrix:
        """Matrix of f_m : P_m -> P_{m-1} in corner bases."""
        src, tgt = self.terms[m], self.terms[m - 1]
        A, f = self.algebra, self.field
        gen_images = {}
        for gi in range(len(src.generators)):
            amb = self.generator_image(m, gi)
            by_gp: dict = {}
            for (a, gp, b), c in amb.items():
                by_gp.setdefault(gp, {})[(a, b)] = c
            img: dict = {}
            for gp, tensor in by_gp.items():
                coords = tgt.coords_of_ambient(gp, tensor)
                if coords is None:
                    raise AlgebraError(
                        f"differential image of generator {src.generators[gi].label} "
                        f"escapes the corner of {tgt.generators[gp].label}")
                for (a, b), v in coords.items():
                    img[tgt.index[(gp, a, b)]] = v
            gen_images[gi] = img
        cols = []
        for (gi, a, b) in src.basis:
            x = {i: v for i, v in src.left_bases[gi][0].column(a).items()}
            y = {j: v for j, v in src.right_bases[gi][0].column(b).items()}
            acc: dict = {}
            for tgt_idx, c in gen_images[gi].items():
                (gp, ap, bp) = tgt.basis[tgt_idx]
                xp = {i: v for i, v in tgt.left_bases[gp][0].column(ap).items()}
                yp = {j: v for j, v in tgt.right_bases[gp][0].column(bp).items()}
                xa = A.multiply(x, xp)
                by = A.multiply(yp, y)
                if not xa or not by:
                    continue
                for k, v in tgt.element_vector(gp, xa, by).items():
                    acc[k] = acc.get(k, 0) + c * v
            if f.char:
                acc = {k: v % f.char for k, v in acc.items()}
            cols.append({k: v for k, v in acc.items() if v != 0})
        return SparseMatrix.from_columns(f, tgt.dim, cols)

    def augmentation_matrix(self) -> SparseMatrix:
        """Matrix of ε : P_0 -> A."""
        term = self.terms[0]
        A, f = self.algebra, self.field
        cols = []
        for (gi, a, b) in term.basis:
            x = {i: v for i, v in term.left_bases[gi][0].column(a).items()}
            y = {j: v for j, v in term.right_bases[gi][0].column(b).items()}
            val = A.multiply(A.multiply(x, self.augmentation[gi]), y)
            cols.append(val)
        return SparseMatrix.from_columns(f, A.dim, cols)

    def total_complex(self, augmented: bool):
        """Totalize positions (m) against internal degrees; A sits at m = -1.

        Returns (ChainComplex, blocks) with blocks[(m)] = (degree list,
        global index function n, local -> offset) suitable for embedding.
        """
        f = self.algebra.field
        parts = []  # (m, degree list)
        if augmented:
            parts.append((-1, list(self.algebra.degrees)))
        for m, term in enumerate(self.terms):
            parts.append((m, term.degrees))
        dims: dict = {}
        pos = {}
        for m, degs in parts:
            for loc, k in enumerate(degs):
                n = m + k
                pos[(m, loc)] = (n, dims.get(n, 0))
                dims[n] = dims.get(n, 0) + 1
        entries: dict = {}

        def put(src_key, tgt_key, v):
            (ns, off_s) = pos[src_key]
            (nt, off_t) = pos[tgt_key]
            if nt != ns - 1:
                raise AlgebraError("inhomogeneous differential in resolution data")
            entries.setdefault(ns, []).append((off_t, off_s, v))

        for m, term in enumerate(self.terms):
            dint = term.internal_diff()
            sgn = f.sign(m)
            for (i, j, v) in dint.entries():
                put((m, j), (m, i), f.mul(sgn, v))
            if m >= 1:
                F = self.differential_matrix(m)
                for (i, j, v) in F.entries():
                    put((m, j), (m - 1, i), v)
        if augmented:
            E = self.augmentation_matrix()
            for (i, j, v) in E.entries():
                put((0, j), (-1, i), v)
            DA = self.algebra.diff_matrix()
            for (i, j, v) in DA.entries():
                put((-1, j), (-1, i), f.neg(v))
        elif len(self.terms) == 0:
            raise AlgebraError("empty resolution")
        diff = {n: SparseMatrix(f, dims.get(n - 1, 0), dims.get(n, 0), ents)
                for n, ents in entries.items()}
        C = ChainComplex(GradedSpace(f, dims), diff)
        return C, pos

    def coinvariants_complex(self) -> ChainComplex:
        """Quotient of the (non-augmented) total complex by graded commutators."""
        C, pos = self.total_complex(augmented=False)
        f = self.field
        subspaces: dict = {}
        per_degree: dict = {}
        for m, term in enumerate(self.terms):
            for (deg_shift, col) in term.commutator_columns():
                n = m + deg_shift
                vec = {}
                for loc, v in col.items():
                    (nn, off) = pos[(m, loc)]
                    if nn != n:
                        raise AlgebraError("inhomogeneous commutator")
                    vec[off] = v
                per_degree.setdefault(n, []).append(vec)
        for n, cols in per_degree.items():
            subspaces[n] = image_basis(
                SparseMatrix.from_columns(f, C.dim(n), cols))
        Q, _, _ = quotient_complex(C, subspaces)
        return Q


def validate_smoothness_witness(A: DGAlgebra, P: BimoduleResolution) -> ValidationReport:
    """Pass iff the terms are corner-shaped as declared and P -> A is exact."""
    report = ValidationReport()
    if P.algebra is not A and (P.algebra.labels != A.labels or P.algebra.mult != A.mult
                               or P.algebra.field != A.field):
        report.add("witness_matches_algebra", False, "resolution built over a different algebra")
        return report
    report.add("witness_matches_algebra", True)
    for m, term in enumerate(P.terms):
        term.idempotency_report(report, f"P_{m}")
    if not report.passed:
        return report
    try:
        total, _ = P.total_complex(augmented=True)
    except (AlgebraError, ComplexError) as exc:
        report.add("witness_total_complex", False, str(exc))
        return report
    report.add("witness_total_complex", True)
    hom = total.homology_dims()
    report.add("witness_exact", not hom,
               "" if not hom else f"nonzero homology in degrees {sorted(hom)}")
    return report


# ---------------------------------------------------------------------------
# builtin witnesses


def builtin_witness(A: DGAlgebra) -> BimoduleResolution | None:
    """Shipped smoothness witnesses for the separable / hereditary builtins.

    dual_numbers, truncated_poly and exterior_odd deliberately ship none:
    they are not smooth, and arbitrary finite truncations of their periodic
    resolutions fail the exactness check.
    """
    f = A.field
    name = A.name.split("(")[0] if A.name else ""
    one = f.one()
    if name == "ground_field":
        gens = [ResolutionGenerator("g")]
        return BimoduleResolution(A, [gens], [], [{0: one}])
    if name == "product_of_fields":
        n = A.dim
        gens = [ResolutionGenerator(f"g{i + 1}", 0, {i: one}, {i: one}) for i in range(n)]
        return BimoduleResolution(A, [gens], [], [{i: one} for i in range(n)])
    if name == "matrix_algebra":
        e11 = {0: one}
        gens = [ResolutionGenerator("g", 0, e11, e11)]
        return BimoduleResolution(A, [gens], [], [e11])
    if name == "upper_triangular":
        # vertices e_vv, arrows a_v = e_{v,v+1}:  0 -> ⊕_v Ae_vv⊗e_{v+1,v+1}A
        # -> ⊕_v Ae_vv⊗e_vvA -> A -> 0
        pairs = [(i, j) for i in range(_ut_size(A)) for j in range(i, _ut_size(A))]
        idx = {p: a for a, p in enumerate(pairs)}
        nv = _ut_size(A)
        vert = [ResolutionGenerator(f"v{v + 1}", 0, {idx[(v, v)]: one}, {idx[(v, v)]: one})
                for v in range(nv)]
        arrows = [ResolutionGenerator(f"a{v + 1}", 0, {idx[(v, v)]: one},
                                      {idx[(v + 1, v + 1)]: one})
                  for v in range(nv - 1)]
        aug = [{idx[(v, v)]: one} for v in range(nv)]
        diffs = {}
        for v in range(nv - 1):
            arrow = idx[(v, v + 1)]
            diffs[v] = [(arrow, v + 1, idx[(v + 1, v + 1)], one),
                        (idx[(v, v)], v, arrow, f.neg(one))]
        if nv == 1:
            return BimoduleResolution(A, [vert], [], aug)
        return BimoduleResolution(A, [vert, arrows], [diffs], aug)
    return None


def _ut_size(A: DGAlgebra) -> int:
    # dim = n (n + 1) / 2
    n = int((-1 + (1 + 8 * A.dim) ** 0.5) / 2)
    if n * (n + 1) // 2 != A.dim:
        raise AlgebraError("not an upper-triangular dimension")
    return n
