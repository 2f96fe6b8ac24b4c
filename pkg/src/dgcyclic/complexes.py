"""Bounded chain complexes of finite-dimensional vector spaces.

Grading conventions, fixed once for the whole package:

* homological (lower) indexing everywhere; differentials have degree -1;
* cohomological statements are translated by negation of degrees, so the
  periodicity generator u lives in homological degree -2 and the exterior
  generator ε of the Tate ring in homological degree -1;
* Koszul sign rule: d(x ⊗ y) = dx ⊗ y + (-1)^{|x|} x ⊗ dy;
* shifts: C[n]_i = C_{i-n}, with differential multiplied by (-1)^n.

Bicomplexes carry anticommuting differentials (d_h d_v + d_v d_h = 0), so
direct-sum totalization needs no extra signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from dgcyclic.linalg import (
    Field, MatrixError, SparseMatrix, image_basis, kernel_basis, coords_in,
    quotient_map, rank, subspace_sum,
)


class ComplexError(ValueError):
    pass


@dataclass(frozen=True)
class GradedSpace:
    """Finitely supported map degree -> dimension, with optional basis labels."""

    field: Field
    dims: dict
    labels: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        clean = {int(n): int(d) for n, d in self.dims.items() if d}
        for n, d in clean.items():
            if d < 1:
                raise ComplexError(f"dimension must be >= 1 where present, got {d} at {n}")
        object.__setattr__(self, "dims", clean)
        for n, labs in self.labels.items():
            if len(labs) != clean.get(n, 0):
                raise ComplexError(f"label count mismatch in degree {n}")

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def degrees(self):
        return sorted(self.dims)


class ChainComplex:
    """Bounded complex with validated d ∘ d = 0.

    ``diff[n]`` is the matrix of d_n : C_n -> C_{n-1}.  Missing matrices are
    zero.  ``meta`` carries bookkeeping such as reliable ranges for truncated
    constructions; it does not affect equality of the underlying complex.
    """

    def __init__(self, space: GradedSpace, diff: dict, meta: dict | None = None,
                 check: bool = True):
        self.space = space
        self.field = space.field
        self.diff = {}
        for n, m in diff.items():
            if m is None or m.is_zero():
                continue
            if m.nrows != space.dim(n - 1) or m.ncols != space.dim(n):
                raise ComplexError(
                    f"differential at degree {n} has shape {m.nrows}x{m.ncols}, "
                    f"expected {space.dim(n - 1)}x{space.dim(n)}")
            if m.field != space.field:
                raise ComplexError("field mismatch in differential")
            self.diff[n] = m
        self.meta = dict(meta or {})
        if check:
            self._check_dd()

    def _check_dd(self):
        for n in sorted(self.diff):
            if (n + 1) in self.diff:
                if not (self.diff[n] @ self.diff[n + 1]).is_zero():
                    raise ComplexError(f"d∘d != 0 between degrees {n + 1} and {n - 1}")

    def dim(self, n: int) -> int:
        return self.space.dim(n)

    def degrees(self):
        return self.space.degrees()

    def differential(self, n: int) -> SparseMatrix:
        m = self.diff.get(n)
        if m is None:
            m = SparseMatrix.zero(self.field, self.space.dim(n - 1), self.space.dim(n))
        return m

    def homology_dims(self) -> dict:
        """dim H_n = dim ker d_n - rank d_{n+1} for every supported degree."""
        out = {}
        for n in self.degrees():
            z = self.dim(n) - rank(self.differential(n))
            b = rank(self.differential(n + 1))
            h = z - b
            if h:
                out[n] = h
        return out

    def euler_characteristic(self) -> int:
        return sum((-1) ** n * d for n, d in self.space.dims.items())

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return (self.space.dims == other.space.dims
                and self.field == other.field
                and {n: m for n, m in self.diff.items()} ==
                    {n: m for n, m in other.diff.items()})

    def __repr__(self):
        lo, hi = (min(self.degrees()), max(self.degrees())) if self.degrees() else (0, 0)
        return f"ChainComplex({self.field}, degrees [{lo},{hi}], total dim {self.space.total_dim})"


def single_space(field: Field, degree: int = 0, dim: int = 1) -> ChainComplex:
    """The complex with one space in one degree and zero differential."""
    return ChainComplex(GradedSpace(field, {degree: dim}), {})


def zero_complex(field: Field) -> ChainComplex:
    return ChainComplex(GradedSpace(field, {}), {})


class ChainMap:
    """Degree-0 map of complexes, validated to commute with differentials."""

    def __init__(self, source: ChainComplex, target: ChainComplex, components: dict,
                 check: bool = True):
        if source.field != target.field:
            raise ComplexError("field mismatch in chain map")
        self.source = source
        self.target = target
        self.components = {}
        for n, m in components.items():
            if m is None:
                continue
            if m.nrows != target.dim(n) or m.ncols != source.dim(n):
                raise ComplexError(f"chain map component at {n} has wrong shape")
            if not m.is_zero():
                self.components[n] = m
        if check:
            self._check_commutes()

    def component(self, n: int) -> SparseMatrix:
        m = self.components.get(n)
        if m is None:
            m = SparseMatrix.zero(self.source.field, self.target.dim(n), self.source.dim(n))
        return m

    def _check_commutes(self):
        degs = set(self.source.degrees()) | set(self.target.degrees())
        for n in degs:
            lhs = self.target.differential(n) @ self.component(n)
            rhs = self.component(n - 1) @ self.source.differential(n)
            if lhs != rhs:
                raise ComplexError(f"not a chain map at degree {n}")


def shift(C: ChainComplex, n: int) -> ChainComplex:
    """C[n]_i = C_{i-n}; differentials pick up the sign (-1)^n."""
    dims = {i + n: d for i, d in C.space.dims.items()}
    sgn = C.field.sign(n)
    diff = {i + n: C.diff[i].scale(sgn) for i in C.diff}
    return ChainComplex(GradedSpace(C.field, dims), diff, meta=dict(C.meta), check=False)


def direct_sum(C: ChainComplex, D: ChainComplex) -> ChainComplex:
    if C.field != D.field:
        raise ComplexError("field mismatch")
    f = C.field
    dims = {}
    for n in set(C.degrees()) | set(D.degrees()):
        dims[n] = C.dim(n) + D.dim(n)
    diff = {}
    for n in sorted(set(list(C.diff) + list(D.diff))):
        entries = []
        dC = C.differential(n)
        dD = D.differential(n)
        for (i, j, v) in dC.entries():
            entries.append((i, j, v))
        for (i, j, v) in dD.entries():
            entries.append((C.dim(n - 1) + i, C.dim(n) + j, v))
        diff[n] = SparseMatrix(f, dims.get(n - 1, 0), dims.get(n, 0), entries)
    return ChainComplex(GradedSpace(f, dims), diff, check=False)


def cone(f: ChainMap) -> ChainComplex:
    """Mapping cone: cone(f)_n = C_{n-1} ⊕ D_n, d(c, x) = (-dc, f(c) + dx)."""
    C, D = f.source, f.target
    fld = C.field
    dims = {}
    for n in set(d + 1 for d in C.degrees()) | set(D.degrees()):
        dims[n] = C.dim(n - 1) + D.dim(n)
    diff = {}
    for n in sorted(dims):
        if dims.get(n - 1, 0) == 0 and dims.get(n, 0) == 0:
            continue
        entries = []
        dC = C.differential(n - 1)
        for (i, j, v) in dC.entries():
            entries.append((i, j, fld.neg(v)))
        fc = f.component(n - 1)
        for (i, j, v) in fc.entries():
            entries.append((C.dim(n - 2) + i, j, v))
        dD = D.differential(n)
        for (i, j, v) in dD.entries():
            entries.append((C.dim(n - 2) + i, C.dim(n - 1) + j, v))
        m = SparseMatrix(fld, dims.get(n - 1, 0), dims.get(n, 0), entries)
        if not m.is_zero():
            diff[n] = m
    return ChainComplex(GradedSpace(fld, dims), diff)


def tensor(C: ChainComplex, D: ChainComplex) -> ChainComplex:
    """(C ⊗ D)_n = ⊕_{i+j=n} C_i ⊗ D_j with the Koszul sign on id ⊗ d.

    Within degree n the blocks are ordered by increasing i, and each block
    C_i ⊗ D_j is indexed row-major: (a, b) -> a * dim D_j + b.
    """
    if C.field != D.field:
        raise ComplexError("field mismatch")
    fld = C.field
    dims = {}
    offsets = {}
    for i in C.degrees():
        for j in D.degrees():
            n = i + j
            offsets[(i, j)] = dims.get(n, 0)
            dims[n] = dims.get(n, 0) + C.dim(i) * D.dim(j)
    diff = {}
    for n in sorted(dims):
        if dims.get(n - 1, 0) == 0:
            continue
        entries = []
        for i in C.degrees():
            j = n - i
            if D.dim(j) == 0:
                continue
            src_off = offsets[(i, j)]
            # d_C ⊗ id
            if C.dim(i - 1):
                tgt_off = offsets[(i - 1, j)]
                for (a2, a, v) in C.differential(i).entries():
                    for b in range(D.dim(j)):
                        entries.append((tgt_off + a2 * D.dim(j) + b,
                                        src_off + a * D.dim(j) + b, v))
            # (-1)^i id ⊗ d_D
            if D.dim(j - 1):
                tgt_off = offsets[(i, j - 1)]
                sgn = fld.sign(i)
                for (b2, b, v) in D.differential(j).entries():
                    w = fld.mul(sgn, v)
                    for a in range(C.dim(i)):
                        entries.append((tgt_off + a * D.dim(j - 1) + b2,
                                        src_off + a * D.dim(j) + b, w))
        m = SparseMatrix(fld, dims.get(n - 1, 0), dims.get(n, 0), entries)
        if not m.is_zero():
            diff[n] = m
    dims = {n: d for n, d in dims.items() if d}
    return ChainComplex(GradedSpace(fld, dims), diff)


class Bicomplex:
    """Bounded bicomplex with anticommuting differentials.

    ``dims[(i, j)]`` give the dimensions; ``horiz[(i, j)]`` maps (i, j) to
    (i-1, j) and ``vert[(i, j)]`` maps (i, j) to (i, j-1).  Validation checks
    d_h² = 0, d_v² = 0 and d_h d_v + d_v d_h = 0 exactly.
    """

    def __init__(self, field: Field, dims: dict, horiz: dict, vert: dict,
                 check: bool = True):
        self.field = field
        self.dims = {k: int(v) for k, v in dims.items() if v}
        self.horiz = {k: m for k, m in horiz.items() if m is not None and not m.is_zero()}
        self.vert = {k: m for k, m in vert.items() if m is not None and not m.is_zero()}
        for (i, j), m in list(self.horiz.items()) + list(self.vert.items()):
            if m.ncols != self.dims.get((i, j), 0):
                raise ComplexError(f"differential source shape mismatch at {(i, j)}")
        if check:
            self._validate()

    def dim(self, i: int, j: int) -> int:
        return self.dims.get((i, j), 0)

    def _h(self, i, j):
        m = self.horiz.get((i, j))
        if m is None:
            m = SparseMatrix.zero(self.field, self.dim(i - 1, j), self.dim(i, j))
        return m

    def _v(self, i, j):
        m = self.vert.get((i, j))
        if m is None:
            m = SparseMatrix.zero(self.field, self.dim(i, j - 1), self.dim(i, j))
        return m

    def _validate(self):
        for (i, j) in self.dims:
            if not (self._h(i - 1, j) @ self._h(i, j)).is_zero():
                raise ComplexError(f"d_h² != 0 at {(i, j)}")
            if not (self._v(i, j - 1) @ self._v(i, j)).is_zero():
                raise ComplexError(f"d_v² != 0 at {(i, j)}")
            anti = (self._v(i - 1, j) @ self._h(i, j)) + (self._h(i, j - 1) @ self._v(i, j))
            if not anti.is_zero():
                raise ComplexError(f"d_h d_v + d_v d_h != 0 at {(i, j)}")


def total_complex(B: Bicomplex) -> ChainComplex:
    """Direct-sum totalization Tot_n = ⊕_{i+j=n} B_{i,j} (bounded input only)."""
    fld = B.field
    dims = {}
    offsets = {}
    for (i, j) in sorted(B.dims):
        n = i + j
        offsets[(i, j)] = dims.get(n, 0)
        dims[n] = dims.get(n, 0) + B.dims[(i, j)]
    diff = {}
    for n in sorted(dims):
        entries = []
        for (i, j) in sorted(B.dims):
            if i + j != n:
                continue
            src = offsets[(i, j)]
            if B.dim(i - 1, j):
                tgt = offsets[(i - 1, j)]
                for (a, b, v) in B._h(i, j).entries():
                    entries.append((tgt + a, src + b, v))
            if B.dim(i, j - 1):
                tgt = offsets[(i, j - 1)]
                for (a, b, v) in B._v(i, j).entries():
                    entries.append((tgt + a, src + b, v))
        m = SparseMatrix(fld, dims.get(n - 1, 0), dims.get(n, 0), entries)
        if not m.is_zero():
            diff[n] = m
    return ChainComplex(GradedSpace(fld, dims), diff)


# ---------------------------------------------------------------------------
# homology with representatives, induced maps, quotient complexes


class HomologyBasis:
    """Cycle representatives and quotient coordinates for H_n(C)."""

    def __init__(self, C: ChainComplex, n: int):
        self.complex = C
        self.n = n
        f = C.field
        self.cycles = kernel_basis(C.differential(n))        # dim(C_n) x z
        bnd = image_basis(C.differential(n + 1))             # dim(C_n) x b
        if bnd.ncols:
            bnd_in_z = coords_in(self.cycles, bnd)           # z x b
        else:
            bnd_in_z = SparseMatrix.zero(f, self.cycles.ncols, 0)
        self.proj, self.sect = quotient_map(bnd_in_z)        # h x z, z x h
        self.dim = self.proj.nrows

    def class_of(self, vec: SparseMatrix) -> SparseMatrix:
        """Coordinates in H_n of cycle columns given in C_n coordinates."""
        return self.proj @ coords_in(self.cycles, vec)

    def representative(self, coords: SparseMatrix) -> SparseMatrix:
        return self.cycles @ (self.sect @ coords)


def induced_map_on_homology(F: SparseMatrix, source: HomologyBasis,
                            target: HomologyBasis) -> SparseMatrix:
    """Matrix of H(f) in homology coordinates (h_target x h_source)."""
    reps = source.cycles @ source.sect
    return target.class_of(F @ reps)


def quotient_complex(C: ChainComplex, subspaces: dict):
    """Quotient of C by a subcomplex given per degree as basis matrices.

    The caller must supply subspaces closed under the differential; this is
    validated.  Returns (quotient complex, projections, sections).
    """
    f = C.field
    projs, sects, dims = {}, {}, {}
    for n in C.degrees():
        U = subspaces.get(n)
        if U is None or U.ncols == 0:
            U = SparseMatrix.zero(f, C.dim(n), 0)
        p, s = quotient_map(U)
        projs[n], sects[n] = p, s
        if p.nrows:
            dims[n] = p.nrows
    for n in C.degrees():
        U = subspaces.get(n)
        if U is None or U.ncols == 0:
            continue
        img = C.differential(n) @ U
        P = projs.get(n - 1)
        if P is not None and not (P @ img).is_zero():
            raise ComplexError(f"subspaces not closed under d at degree {n}")
    diff = {}
    for n in C.degrees():
        if dims.get(n, 0) and dims.get(n - 1, 0):
            m = projs[n - 1] @ C.differential(n) @ sects[n]
            if not m.is_zero():
                diff[n] = m
    Q = ChainComplex(GradedSpace(f, dims), diff)
    return Q, projs, sects
