"""Hochschild chains, the cyclic module, and the chain-level circle action.

Sign conventions (the single source of truth for every module downstream):

* faces on A^{⊗(n+1)}: d_i multiplies the i-th and (i+1)-st factors with no
  sign for i < n; the last face carries the Koszul sign
  (-1)^{|a_n|(|a_0|+...+|a_{n-1}|)} for rotating a_n to the front;
* the cyclic operator t is the same rotation with the same Koszul sign and
  no simplicial sign, so t^{n+1} = id on the nose;
* the chain complex is the totalization by (simplicial degree + internal
  degree), with differential b = Σ (-1)^i d_i + (-1)^n d_internal;
* Connes' operator is built from the signed rotation τ = (-1)^n t as
  B = s_{-1} N with N = Σ τ^l, computed on un-normalized representatives and
  projected to normalized chains (the (1 - τ) factor of the textbook formula
  dies in the quotient because τ s_{-1} always produces a unit factor).

Normalized chains are A ⊗ Ā^{⊗ n} where Ā = A / (unit line); the quotient
basis is the set of algebra basis vectors away from the leading index of the
unit vector.

Truncation at simplicial degree N keeps b intact (b lowers simplicial
degree) but B is only defined out of simplicial degrees <= N - 1; the
"reliable range" of homology is the set of total degrees realizable only by
simplicial degrees <= N - 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product

from dgcyclic.linalg import Field, SparseMatrix
from dgcyclic.complexes import ChainComplex, GradedSpace
from dgcyclic.dga import (
    BimoduleResolution, DGAlgebra, ValidationReport, validate_smoothness_witness,
)


class HochschildError(ValueError):
    pass


# ---------------------------------------------------------------------------
# tensor-level operators on sparse {index tuple: coefficient} states


def _reduce(field: Field, acc: dict) -> dict:
    if field.char:
        acc = {t: v % field.char for t, v in acc.items()}
    return {t: v for t, v in acc.items() if v != 0}


def _add_into(acc: dict, tup, val):
    acc[tup] = acc.get(tup, 0) + val


def tensor_face(A: DGAlgebra, state: dict, i: int) -> dict:
    """Face d_i on {tuple: coeff} over A^{⊗(n+1)}; i = n is the wrap-around."""
    acc: dict = {}
    for tup, c in state.items():
        n = len(tup) - 1
        if i < n:
            exp = A.mult.get((tup[i], tup[i + 1]))
            if not exp:
                continue
            head, tail = tup[:i], tup[i + 2:]
            for k, v in exp.items():
                _add_into(acc, head + (k,) + tail, c * v)
        else:
            exp = A.mult.get((tup[n], tup[0]))
            if not exp:
                continue
            s = A.degrees[tup[n]] * sum(A.degrees[t] for t in tup[:n])
            sgn = -1 if s % 2 else 1
            for k, v in exp.items():
                _add_into(acc, (k,) + tup[1:n], sgn * c * v)
    return _reduce(A.field, acc)


def tensor_degeneracy(A: DGAlgebra, state: dict, j: int) -> dict:
    """s_j inserts the unit after position j; j = -1 prepends it."""
    acc: dict = {}
    for tup, c in state.items():
        for u, uv in A.unit.items():
            new = tup[:j + 1] + (u,) + tup[j + 1:]
            _add_into(acc, new, c * uv)
    return _reduce(A.field, acc)


def tensor_rotate(A: DGAlgebra, state: dict) -> dict:
    """Cyclic operator t: move the last factor to the front, Koszul sign only."""
    acc: dict = {}
    for tup, c in state.items():
        n = len(tup) - 1
        s = A.degrees[tup[n]] * sum(A.degrees[t] for t in tup[:n])
        _add_into(acc, (tup[n],) + tup[:n], (-1 if s % 2 else 1) * c)
    return _reduce(A.field, acc)


def tensor_internal(A: DGAlgebra, state: dict) -> dict:
    """Internal differential Σ_k (-1)^{|a_0|+..+|a_{k-1}|} 1⊗..⊗d⊗..⊗1."""
    acc: dict = {}
    for tup, c in state.items():
        prefix = 0
        for k, idx in enumerate(tup):
            exp = A.diff.get(idx)
            if exp:
                sgn = -1 if prefix % 2 else 1
                for tgt, v in exp.items():
                    _add_into(acc, tup[:k] + (tgt,) + tup[k + 1:], sgn * c * v)
            prefix += A.degrees[idx]
    return _reduce(A.field, acc)


def tensor_b_prime_sum(A: DGAlgebra, state: dict, last_face: bool) -> dict:
    """Σ (-1)^i d_i, over all faces or (for b') all but the last."""
    acc: dict = {}
    if not state:
        return acc
    n = len(next(iter(state))) - 1
    top = n if last_face else n - 1
    for i in range(top + 1):
        for tup, v in tensor_face(A, state, i).items():
            _add_into(acc, tup, -v if i % 2 else v)
    return _reduce(A.field, acc)


# ---------------------------------------------------------------------------
# normalized chains


class _Normalizer:
    """Projection data for Ā = A / (unit line)."""

    def __init__(self, A: DGAlgebra):
        self.algebra = A
        if not A.unit:
            raise HochschildError("algebra without unit vector")
        self.pivot = min(A.unit)
        self.indices = [i for i in range(A.dim) if i != self.pivot]
        f = A.field
        upv = A.unit[self.pivot]
        self.pivot_expansion = [
            (q, f.neg(f.div(A.unit[q], upv)))
            for q in sorted(A.unit) if q != self.pivot]

    def project_state(self, field: Field, state: dict) -> dict:
        """Project factors 1..n of every tuple to the complement basis."""
        acc: dict = {}
        for tup, c in state.items():
            options = [[(tup[0], 1)]]
            dead = False
            for t in tup[1:]:
                if t != self.pivot:
                    options.append([(t, 1)])
                elif self.pivot_expansion:
                    options.append(list(self.pivot_expansion))
                else:
                    dead = True
                    break
            if dead:
                continue
            for combo in product(*options):
                coeff = c
                for (_, w) in combo[1:]:
                    coeff = coeff * w
                _add_into(acc, tuple(idx for idx, _ in combo), coeff)
        return _reduce(field, acc)


@dataclass
class _Blocks:
    """Index bookkeeping for the totalized truncated chains."""
    dims: dict = dc_field(default_factory=dict)           # total degree -> dim
    offsets: dict = dc_field(default_factory=dict)        # (n, tuple) -> (m, pos)
    layout: dict = dc_field(default_factory=dict)         # m -> [(n, k, offset, size)]


def _enumerate_normalized(A: DGAlgebra, norm: _Normalizer, N: int):
    """Basis tuples and block layout of ⊕_{n<=N} A ⊗ Ā^{⊗n} by total degree."""
    blocks = _Blocks()
    basis_by_n = []
    for n in range(N + 1):
        tuples = []
        if n == 0:
            tuples = [(i,) for i in range(A.dim)]
        elif norm.indices:
            tuples = [(i,) + rest for i in range(A.dim)
                      for rest in product(norm.indices, repeat=n)]
        basis_by_n.append(tuples)
    # group by (n, internal degree) and assign global offsets, n ascending
    per_degree: dict = {}
    for n, tuples in enumerate(basis_by_n):
        for tup in tuples:
            k = sum(A.degrees[t] for t in tup)
            per_degree.setdefault(n + k, []).append((n, k, tup))
    for m in sorted(per_degree):
        # insertion order is already n ascending, tuples in enumeration order
        entries = per_degree[m]
        pos = 0
        layout = []
        for n in range(N + 1):
            block = [tup for (bn, _, tup) in entries if bn == n]
            if not block:
                continue
            start = pos
            for tup in block:
                blocks.offsets[(n, tup)] = (m, pos)
                pos += 1
            layout.append((n, m - n, start, pos - start))
        blocks.dims[m] = pos
        blocks.layout[m] = layout
    return basis_by_n, blocks


def _block_possible(A: DGAlgebra, norm: _Normalizer, n: int, k: int) -> bool:
    if n == 0:
        return (not A.degrees) or (min(A.degrees) <= k <= max(A.degrees))
    if not norm.indices:
        return False
    degs = [A.degrees[q] for q in norm.indices]
    lo = min(A.degrees) + n * min(degs)
    hi = max(A.degrees) + n * max(degs)
    return lo <= k <= hi


def _degrees_with_simplicial_at_least(A, norm, bound_n, total_degrees):
    """Total degrees m realizable by blocks (n, m-n) with n >= bound_n."""
    hit = set()
    if not norm.indices:
        return hit
    degs = [A.degrees[q] for q in norm.indices]
    if min(degs) + 1 <= 0:
        # simplicial and internal degrees can cancel without bound: nothing
        # is certifiably reliable
        return set(total_degrees)
    for m in total_degrees:
        n = bound_n
        # block (n, m - n) needs m - n >= min|A| + n min|Ā|, bounding n
        while n * (1 + min(degs)) + min(A.degrees) <= m:
            if _block_possible(A, norm, n, m - n):
                hit.add(m)
                break
            n += 1
    return hit


def _candidate_degrees(blocks: "_Blocks", N: int):
    """Degrees worth flagging: the chain support padded out to at least N."""
    support = sorted(blocks.dims)
    lo = min([0] + support)
    hi = max([N] + support)
    return list(range(lo, hi + 1))


@dataclass
class HochschildComplex:
    """Truncated normalized Hochschild chains, totalized by total degree."""
    algebra: DGAlgebra
    trunc: int
    chains: ChainComplex
    blocks: dict
    reliable_range: list

    def dims(self) -> dict:
        return dict(self.chains.space.dims)


@dataclass
class MixedComplex:
    """Chains with b (the differential of ``chains``) and Connes' B.

    ``B[m]`` maps C_m -> C_{m+1}.  ``complete_degrees`` are total degrees
    whose chain space is unaffected by the simplicial truncation (for both m
    and m+1, so b into them is complete as well); ``B_complete`` are degrees
    where every column of B[m] is present.
    """
    chains: ChainComplex
    B: dict
    trunc: int | None = None
    reliable_range: list = dc_field(default_factory=list)
    complete_degrees: list = dc_field(default_factory=list)
    B_complete: list = dc_field(default_factory=list)

    @property
    def field(self):
        return self.chains.field

    def b(self, m: int) -> SparseMatrix:
        return self.chains.differential(m)

    def B_matrix(self, m: int) -> SparseMatrix:
        mat = self.B.get(m)
        if mat is None:
            mat = SparseMatrix.zero(self.field, self.chains.dim(m + 1), self.chains.dim(m))
        return mat

    def verify_relations(self) -> ValidationReport:
        report = ValidationReport()
        degs = sorted(self.chains.space.dims)
        ok = all((self.b(m) @ self.b(m + 1)).is_zero() for m in degs)
        report.add("b_squared", ok)
        okB, okmix = True, True
        Bset = set(self.B_complete)
        for m in degs:
            if m in Bset and (m + 1) in Bset:
                if not (self.B_matrix(m + 1) @ self.B_matrix(m)).is_zero():
                    okB = False
            if m in Bset and (m - 1) in Bset:
                anti = self.b(m + 1) @ self.B_matrix(m) + self.B_matrix(m - 1) @ self.b(m)
                if not anti.is_zero():
                    okmix = False
        report.add("B_squared", okB)
        report.add("bB_plus_Bb", okmix)
        return report


def zero_mixed_complex(field: Field) -> MixedComplex:
    return MixedComplex(ChainComplex(GradedSpace(field, {}), {}), {})


def hochschild_complex(A: DGAlgebra, N: int) -> HochschildComplex:
    """Normalized chains through simplicial degree N with the b differential."""
    if N < 2:
        raise HochschildError("truncation must be at least 2")
    f = A.field
    norm = _Normalizer(A)
    basis_by_n, blocks = _enumerate_normalized(A, norm, N)
    entries_by_degree: dict = {}
    for n in range(N + 1):
        for tup in basis_by_n[n]:
            m, pos = blocks.offsets[(n, tup)]
            state = {tup: 1}
            out: dict = {}
            simp = tensor_b_prime_sum(A, state, last_face=(n >= 1))
            if n >= 1:
                for t2, v in norm.project_state(f, simp).items():
                    _add_into(out, (n - 1, t2), v)
            dint = tensor_internal(A, state)
            if dint:
                sgn = -1 if n % 2 else 1
                for t2, v in norm.project_state(f, dint).items():
                    _add_into(out, (n, t2), sgn * v)
            col = _reduce(f, out)
            for (n2, t2), v in col.items():
                m2, pos2 = blocks.offsets[(n2, t2)]
                if m2 != m - 1:
                    raise HochschildError("differential is not of total degree -1")
                entries_by_degree.setdefault(m, []).append((pos2, pos, v))
    diff = {m: SparseMatrix(f, blocks.dims.get(m - 1, 0), blocks.dims.get(m, 0), ents)
            for m, ents in entries_by_degree.items()}
    chains = ChainComplex(GradedSpace(f, blocks.dims), diff,
                          meta={"trunc": N, "normalized": True})
    candidates = _candidate_degrees(blocks, N)
    bad = _degrees_with_simplicial_at_least(A, norm, N - 1, candidates)
    reliable = [m for m in candidates if m not in bad]
    return HochschildComplex(A, N, chains, blocks.layout, reliable)


def mixed_complex(A: DGAlgebra, N: int) -> MixedComplex:
    """Normalized chains with b and the projected Connes operator B."""
    f = A.field
    hc = hochschild_complex(A, N)
    norm = _Normalizer(A)
    basis_by_n, blocks = _enumerate_normalized(A, norm, N)
    B_entries: dict = {}
    for n in range(N):          # B out of simplicial degree N is not available
        for tup in basis_by_n[n]:
            m, pos = blocks.offsets[(n, tup)]
            state = {tup: 1}
            norm_sum: dict = {}
            power = dict(state)
            for l in range(n + 1):
                if l:
                    power = tensor_rotate(A, power)
                    if n % 2:   # τ = (-1)^n t
                        power = {t: -v for t, v in power.items()}
                for t2, v in power.items():
                    _add_into(norm_sum, t2, v)
            norm_sum = _reduce(f, norm_sum)
            prepended = tensor_degeneracy(A, norm_sum, -1)
            col = norm.project_state(f, prepended)
            for t2, v in col.items():
                m2, pos2 = blocks.offsets[(n + 1, t2)]
                if m2 != m + 1:
                    raise HochschildError("B is not of total degree +1")
                B_entries.setdefault(m, []).append((pos2, pos, v))
    B = {}
    for m, ents in B_entries.items():
        mat = SparseMatrix(f, blocks.dims.get(m + 1, 0), blocks.dims.get(m, 0), ents)
        if not mat.is_zero():
            B[m] = mat
    candidates = _candidate_degrees(blocks, N)
    incomplete = _degrees_with_simplicial_at_least(A, norm, N + 1, candidates + [max(candidates) + 1])
    complete = [m for m in candidates
                if m not in incomplete and (m + 1) not in incomplete]
    b_incomplete = _degrees_with_simplicial_at_least(A, norm, N, candidates)
    B_complete = [m for m in candidates if m not in b_incomplete]
    return MixedComplex(hc.chains, B, N, hc.reliable_range, complete, B_complete)


@dataclass
class HHResult:
    dims: dict
    reliable_range: list
    trunc: int

    def table(self):
        degs = sorted(set(list(self.dims) + list(self.reliable_range)))
        return [(m, self.dims.get(m, 0), m in self.reliable_range) for m in degs]


def hh_dims(A: DGAlgebra, N: int) -> HHResult:
    hc = hochschild_complex(A, N)
    return HHResult(hc.chains.homology_dims(), hc.reliable_range, N)


def hh_via_witness(A: DGAlgebra, P: BimoduleResolution) -> dict:
    """Exact HH dims as homology of P ⊗_{A^e} A = P / [A, P]."""
    report = validate_smoothness_witness(A, P)
    if not report.passed:
        raise HochschildError("invalid smoothness witness:\n" + report.summary())
    return P.coinvariants_complex().homology_dims()


# ---------------------------------------------------------------------------
# the un-normalized cyclic module


class TensorBasis:
    def __init__(self, A: DGAlgebra, n: int):
        self.tuples = list(product(range(A.dim), repeat=n + 1))
        self.index = {t: i for i, t in enumerate(self.tuples)}
        self.degrees = [sum(A.degrees[i] for i in t) for t in self.tuples]
        self.dim = len(self.tuples)


class CyclicModule:
    """A^{⊗(n+1)} for n <= N with faces, degeneracies, t, internal differential."""

    def __init__(self, algebra: DGAlgebra, N: int):
        self.algebra = algebra
        self.field = algebra.field
        self.trunc = N
        self.spaces = [TensorBasis(algebra, n) for n in range(N + 1)]
        self._cache: dict = {}

    def _matrix_of(self, n_src: int, n_tgt: int, op) -> SparseMatrix:
        src, tgt = self.spaces[n_src], self.spaces[n_tgt]
        cols = []
        for tup in src.tuples:
            out = op({tup: 1})
            cols.append({tgt.index[t]: v for t, v in out.items()})
        return SparseMatrix.from_columns(self.field, tgt.dim, cols)

    def face(self, n: int, i: int) -> SparseMatrix:
        if not (0 <= i <= n <= self.trunc):
            raise HochschildError(f"face d_{i} out of range at level {n}")
        key = ("d", n, i)
        if key not in self._cache:
            self._cache[key] = self._matrix_of(
                n, n - 1, lambda s: tensor_face(self.algebra, s, i))
        return self._cache[key]

    def degeneracy(self, n: int, j: int) -> SparseMatrix:
        if not (0 <= j <= n) or n + 1 > self.trunc:
            raise HochschildError(f"degeneracy s_{j} out of range at level {n}")
        key = ("s", n, j)
        if key not in self._cache:
            self._cache[key] = self._matrix_of(
                n, n + 1, lambda s: tensor_degeneracy(self.algebra, s, j))
        return self._cache[key]

    def cyclic(self, n: int) -> SparseMatrix:
        key = ("t", n)
        if key not in self._cache:
            self._cache[key] = self._matrix_of(
                n, n, lambda s: tensor_rotate(self.algebra, s))
        return self._cache[key]

    def internal(self, n: int) -> SparseMatrix:
        key = ("int", n)
        if key not in self._cache:
            self._cache[key] = self._matrix_of(
                n, n, lambda s: tensor_internal(self.algebra, s))
        return self._cache[key]

    def verify_relations(self, full: bool = False) -> ValidationReport:
        """Cyclic-category relations; ``full`` adds all simplicial identities."""
        report = ValidationReport()
        N = self.trunc
        ok = True
        for n in range(N + 1):
            t = self.cyclic(n)
            power = SparseMatrix.identity(self.field, self.spaces[n].dim)
            for _ in range(n + 1):
                power = t @ power
            if power != SparseMatrix.identity(self.field, self.spaces[n].dim):
                ok = False
                break
        report.add("t_order", ok, "" if ok else f"t^{n + 1} != id at level {n}")

        ok, witness = True, ""
        for n in range(1, N + 1):
            t, t1 = self.cyclic(n), self.cyclic(n - 1)
            if self.face(n, 0) @ t != self.face(n, n):
                ok, witness = False, f"d_0 t != d_n at level {n}"
                break
            for i in range(1, n + 1):
                if self.face(n, i) @ t != t1 @ self.face(n, i - 1):
                    ok, witness = False, f"d_{i} t != t d_{i - 1} at level {n}"
                    break
            if not ok:
                break
        report.add("t_face_compatibility", ok, witness)

        ok, witness = True, ""
        for n in range(0, N):
            t, t1 = self.cyclic(n), self.cyclic(n + 1)
            if self.degeneracy(n, 0) @ t != (t1 @ t1) @ self.degeneracy(n, n):
                ok, witness = False, f"s_0 t != t² s_n at level {n}"
                break
            for j in range(1, n + 1):
                if self.degeneracy(n, j) @ t != t1 @ self.degeneracy(n, j - 1):
                    ok, witness = False, f"s_{j} t != t s_{j - 1} at level {n}"
                    break
            if not ok:
                break
        report.add("t_degeneracy_compatibility", ok, witness)

        ok, witness = True, ""
        for n in range(N + 1):
            dint = self.internal(n)
            if not (dint @ dint).is_zero():
                ok, witness = False, f"internal d² != 0 at level {n}"
                break
            if not (self.cyclic(n) @ dint == dint @ self.cyclic(n)):
                ok, witness = False, f"t does not commute with internal d at level {n}"
                break
        report.add("internal_differential", ok, witness)

        if full:
            ok, witness = True, ""
            for n in range(2, N + 1):
                for i in range(n):
                    for j in range(i + 1, n + 1):
                        lhs = self.face(n - 1, i) @ self.face(n, j)
                        rhs = self.face(n - 1, j - 1) @ self.face(n, i)
                        if lhs != rhs:
                            ok, witness = False, f"d_{i} d_{j} fails at level {n}"
                            break
                    if not ok:
                        break
                if not ok:
                    break
            report.add("simplicial_faces", ok, witness)

            ok, witness = True, ""
            for n in range(0, N - 1):
                for i in range(n + 2):
                    for j in range(n + 1):
                        di = self.face(n + 1, i)
                        sj = self.degeneracy(n, j)
                        if i < j:
                            if n >= 1 and di @ sj != self.degeneracy(n - 1, j - 1) @ self.face(n, i):
                                ok, witness = False, f"d_{i} s_{j} at level {n}"
                                break
                        elif i in (j, j + 1):
                            if di @ sj != SparseMatrix.identity(self.field, self.spaces[n].dim):
                                ok, witness = False, f"d_{i} s_{j} != id at level {n}"
                                break
                        else:
                            if n >= 1 and di @ sj != self.degeneracy(n - 1, j) @ self.face(n, i - 1):
                                ok, witness = False, f"d_{i} s_{j} at level {n}"
                                break
                    if not ok:
                        break
                if not ok:
                    break
            report.add("simplicial_mixed", ok, witness)
        return report


def cyclic_module(A: DGAlgebra, N: int) -> CyclicModule:
    return CyclicModule(A, N)


def unnormalized_chains(X: CyclicModule) -> ChainComplex:
    """Totalization of the un-normalized chains with b = Σ(-1)^i d_i ± d_int."""
    A, f = X.algebra, X.field
    dims: dict = {}
    offsets = {}
    for n in range(X.trunc + 1):
        basis = X.spaces[n]
        for pos, tup in enumerate(basis.tuples):
            m = n + basis.degrees[pos]
            offsets[(n, pos)] = (m, dims.get(m, 0))
            dims[m] = dims.get(m, 0) + 1
    entries: dict = {}
    for n in range(X.trunc + 1):
        basis = X.spaces[n]
        for pos, tup in enumerate(basis.tuples):
            m, off = offsets[(n, pos)]
            state = {tup: 1}
            acc: dict = {}
            if n >= 1:
                for t2, v in tensor_b_prime_sum(A, state, last_face=True).items():
                    _add_into(acc, (n - 1, t2), v)
            sgn = -1 if n % 2 else 1
            for t2, v in tensor_internal(A, state).items():
                _add_into(acc, (n, t2), sgn * v)
            for (n2, t2), v in _reduce(f, acc).items():
                m2, off2 = offsets[(n2, X.spaces[n2].index[t2])]
                entries.setdefault(m, []).append((off2, off, v))
    diff = {m: SparseMatrix(f, dims.get(m - 1, 0), dims.get(m, 0), ents)
            for m, ents in entries.items()}
    return ChainComplex(GradedSpace(f, dims), diff)
