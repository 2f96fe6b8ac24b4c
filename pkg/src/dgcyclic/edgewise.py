"""Edgewise subdivision of cyclic modules and its comparison checks.

The p-fold subdivision re-indexes a cyclic object by [n] -> [p(n+1)-1]: the
subdivided object has Y_n = X_{p(n+1)-1}, faces and degeneracies obtained by
applying the p-fold join of the elementary simplicial maps, and a C_p-action
generated by the (n+1)-st power of the cyclic operator (one full block of
rotation).  The generator convention (last factor to the front) matches the
cyclic operator of the base module; the opposite rotation differs by
inversion and changes none of the checks.

The comparison map to the base is induced by the natural inclusion of the
last join block, kappa_n : [n] -> [p(n+1)-1], t -> t + (p-1)(n+1); it is
simplicial, hence a chain map, and the quasi-isomorphism check asserts that
it induces isomorphisms on homology inside the mutual reliable range (the
subdivision consumes simplicial degrees p at a time, so its reliable window
is floor((N-1)/p) - 1 for algebras concentrated in degree 0).
"""

from __future__ import annotations

from dataclasses import dataclass

from dgcyclic.linalg import SparseMatrix, rank
from dgcyclic.complexes import (
    ChainComplex, ChainMap, GradedSpace, HomologyBasis,
    induced_map_on_homology,
)
from dgcyclic.dga import (
    BimoduleResolution, DGAlgebra, ValidationReport, validate_smoothness_witness,
)
from dgcyclic.hochschild import CyclicModule, unnormalized_chains
from dgcyclic.tate import CpAction, TateResult, tate_dims


class EdgewiseError(ValueError):
    pass


def _entries_matrix(field, nrows, ncols, pairs) -> SparseMatrix:
    """Sum duplicate (row, col) contributions before building the matrix."""
    acc: dict = {}
    for (i, j, v) in pairs:
        acc[(i, j)] = field.add(acc.get((i, j), field.zero()), v)
    return SparseMatrix(field, nrows, ncols,
                        [(i, j, v) for (i, j), v in acc.items() if v != 0])


def _monotone_matrix(X: CyclicModule, values: tuple, level_target: int) -> SparseMatrix:
    """X(f) for a monotone map f : [m] -> [level_target] given by its values.

    Factor f through its image: apply the missing faces largest-first, then
    the collapsing degeneracies.
    """
    m = len(values) - 1
    for a, b in zip(values, values[1:]):
        if b < a:
            raise EdgewiseError("map is not monotone")
    if values and (values[0] < 0 or values[-1] > level_target):
        raise EdgewiseError("values out of range")
    mat = SparseMatrix.identity(X.field, X.spaces[level_target].dim)
    level = level_target
    missing = sorted(set(range(level_target + 1)) - set(values), reverse=True)
    for s in missing:
        mat = X.face(level, s) @ mat
        level -= 1
    # now apply degeneracies for repeated values, smallest collapse first
    vals = list(values)
    pending = []
    while True:
        j = next((i for i in range(len(vals) - 1) if vals[i] == vals[i + 1]), None)
        if j is None:
            break
        pending.append(j)
        vals.pop(j + 1)
    for j in reversed(pending):
        mat = X.degeneracy(level, j) @ mat
        level += 1
    if level != m:
        raise EdgewiseError("monotone factorization mismatch")
    return mat


def _join_values(f_values: tuple, p: int, target_level: int) -> tuple:
    """Values of the p-fold join f * f * ... * f into [p(target_level+1)-1]."""
    out = []
    for block in range(p):
        off = block * (target_level + 1)
        out.extend(off + v for v in f_values)
    return tuple(out)


class SubdividedModule:
    """p-fold edgewise subdivision of a cyclic module, with its C_p-action."""

    def __init__(self, base: CyclicModule, p: int):
        if p < 2:
            raise EdgewiseError("subdivision order must be at least 2")
        if base.trunc < 2 * p - 1:
            raise EdgewiseError(
                f"base must be validated through degree {2 * p - 1} for p = {p}")
        self.base = base
        self.p = p
        self.field = base.field
        self.algebra = base.algebra
        self.n_max = (base.trunc + 1) // p - 1
        self._cache: dict = {}

    def level(self, n: int) -> int:
        return self.p * (n + 1) - 1

    def space(self, n: int):
        return self.base.spaces[self.level(n)]

    def face(self, n: int, i: int) -> SparseMatrix:
        if not (0 <= i <= n <= self.n_max):
            raise EdgewiseError(f"face d_{i} out of range at level {n}")
        key = ("d", n, i)
        if key not in self._cache:
            delta = tuple(v for v in range(n + 1) if v != i)   # δ_i : [n-1] -> [n]
            values = _join_values(delta, self.p, n)
            self._cache[key] = _monotone_matrix(self.base, values, self.level(n))
        return self._cache[key]

    def degeneracy(self, n: int, j: int) -> SparseMatrix:
        if not (0 <= j <= n) or n + 1 > self.n_max:
            raise EdgewiseError(f"degeneracy s_{j} out of range at level {n}")
        key = ("s", n, j)
        if key not in self._cache:
            sigma = tuple(min(v, j) if v <= j + 1 else v - 1 for v in range(n + 2))
            values = _join_values(sigma, self.p, n)
            self._cache[key] = _monotone_matrix(self.base, values, self.level(n))
        return self._cache[key]

    def sigma(self, n: int) -> SparseMatrix:
        """The C_p generator: one block of rotation, t^{n+1} on X_{p(n+1)-1}."""
        key = ("sigma", n)
        if key not in self._cache:
            t = self.base.cyclic(self.level(n))
            power = SparseMatrix.identity(self.field, self.space(n).dim)
            for _ in range(n + 1):
                power = t @ power
            self._cache[key] = power
        return self._cache[key]

    def internal(self, n: int) -> SparseMatrix:
        return self.base.internal(self.level(n))

    def verify(self) -> ValidationReport:
        report = ValidationReport()
        ok, witness = True, ""
        for n in range(self.n_max + 1):
            s = self.sigma(n)
            power = SparseMatrix.identity(self.field, self.space(n).dim)
            for _ in range(self.p):
                power = s @ power
            if power != SparseMatrix.identity(self.field, self.space(n).dim):
                ok, witness = False, f"sigma^{self.p} != id at level {n}"
                break
        report.add("sigma_order", ok, witness)

        ok, witness = True, ""
        for n in range(1, self.n_max + 1):
            for i in range(n + 1):
                if self.face(n, i) @ self.sigma(n) != self.sigma(n - 1) @ self.face(n, i):
                    ok, witness = False, f"sigma not equivariant for d_{i} at level {n}"
                    break
            if not ok:
                break
        for n in range(0, self.n_max):
            if not ok:
                break
            for j in range(n + 1):
                if self.degeneracy(n, j) @ self.sigma(n) != self.sigma(n + 1) @ self.degeneracy(n, j):
                    ok, witness = False, f"sigma not equivariant for s_{j} at level {n}"
                    break
        report.add("sigma_equivariance", ok, witness)

        ok, witness = True, ""
        for n in range(2, self.n_max + 1):
            for i in range(n):
                for j in range(i + 1, n + 1):
                    if self.face(n - 1, i) @ self.face(n, j) != \
                            self.face(n - 1, j - 1) @ self.face(n, i):
                        ok, witness = False, f"d_{i} d_{j} fails at level {n}"
                        break
                if not ok:
                    break
            if not ok:
                break
        report.add("subdivided_simplicial_faces", ok, witness)

        ok, witness = True, ""
        for n in range(self.n_max + 1):
            dint = self.internal(n)
            if not (self.sigma(n) @ dint == dint @ self.sigma(n)):
                ok, witness = False, f"sigma does not commute with internal d at level {n}"
                break
        report.add("sigma_internal", ok, witness)
        return report


def subdivide(X: CyclicModule, p: int) -> SubdividedModule:
    sub = SubdividedModule(X, p)
    report = sub.verify()
    if not report.passed:
        raise EdgewiseError("subdivision failed validation:\n" + report.summary())
    return sub


def subdivided_chains(Y: SubdividedModule):
    """Totalized chains of the subdivision with b = Σ(-1)^i d_i ± d_int.

    Returns (complex, offsets) with offsets[(n, pos)] = (m, offset).
    """
    f = Y.field
    dims: dict = {}
    offsets = {}
    for n in range(Y.n_max + 1):
        basis = Y.space(n)
        for pos in range(basis.dim):
            m = n + basis.degrees[pos]
            offsets[(n, pos)] = (m, dims.get(m, 0))
            dims[m] = dims.get(m, 0) + 1
    entries: dict = {}

    def add(src, tgt_level, col, sgn):
        (m, off) = offsets[src]
        for i, v in col.items():
            (m2, off2) = offsets[(tgt_level, i)]
            if m2 != m - 1:
                raise EdgewiseError("subdivided differential not of degree -1")
            entries.setdefault(m, []).append((off2, off, f.mul(f.sign(sgn), v)))

    for n in range(Y.n_max + 1):
        faces = [Y.face(n, i) for i in range(n + 1)] if n >= 1 else []
        dint = Y.internal(n)
        for pos in range(Y.space(n).dim):
            for i, mat in enumerate(faces):
                col = mat.column(pos)
                if col:
                    add((n, pos), n - 1, col, i)
            col = dint.column(pos)
            if col:
                add((n, pos), n, col, n)
    diff = {m: _entries_matrix(f, dims.get(m - 1, 0), dims.get(m, 0), ents)
            for m, ents in entries.items()}
    return ChainComplex(GradedSpace(f, dims), diff), offsets


def _chain_reliable_range(A: DGAlgebra, top_level: int, candidates):
    """Total degrees realizable only by simplicial levels <= top_level."""
    out = []
    dmin, dmax = min(A.degrees), max(A.degrees)
    for m in candidates:
        bad = False
        n = top_level + 1
        while n * (1 + dmin) + dmin <= m:
            if (n + 1) * dmin + n <= m <= (n + 1) * dmax + n:
                bad = True
                break
            n += 1
            if dmin + 1 <= 0:
                bad = True
                break
        if not bad:
            out.append(m)
    return out


@dataclass
class SubdivisionCheck:
    p: int
    trunc: int
    mutual_range: list
    base_dims: dict
    subdivided_dims: dict
    comparison_ranks: dict
    dims_agree: bool
    comparison_iso: bool

    @property
    def passed(self) -> bool:
        return self.dims_agree and self.comparison_iso


def subdivision_quasi_iso_check(X: CyclicModule, p: int, N: int | None = None) -> SubdivisionCheck:
    """Homology comparison between the subdivision and the base cyclic module."""
    Y = subdivide(X, p)
    A = X.algebra
    base_chains = unnormalized_chains(X)
    sub_chains, _ = subdivided_chains(Y)
    hb = base_chains.homology_dims()
    hs = sub_chains.homology_dims()
    sub_reliable_top = (X.trunc - 1) // p - 1
    candidates = range(0, max([0] + list(sub_chains.space.dims)) + 1)
    mutual = sorted(set(_chain_reliable_range(A, sub_reliable_top, candidates))
                    & set(_chain_reliable_range(A, X.trunc - 2, candidates)))
    # comparison chain map: last-block inclusion kappa_n
    comps = {}
    f = X.field
    for n in range(Y.n_max + 1):
        kappa = tuple(t + (p - 1) * (n + 1) for t in range(n + 1))
        comps[n] = _monotone_matrix(X, kappa, Y.level(n))
    # assemble as map of totalized complexes
    sub_offsets = subdivided_chains(Y)[1]
    base_offsets = {}
    dims_seen: dict = {}
    for lvl in range(X.trunc + 1):
        basis = X.spaces[lvl]
        for pos in range(basis.dim):
            m = lvl + basis.degrees[pos]
            base_offsets[(lvl, pos)] = (m, dims_seen.get(m, 0))
            dims_seen[m] = dims_seen.get(m, 0) + 1
    comp_entries: dict = {}
    for n in range(Y.n_max + 1):
        mat = comps[n]
        for (i, j, v) in mat.entries():
            (m, off_s) = sub_offsets[(n, j)]
            (m2, off_t) = base_offsets[(n, i)]
            if m2 != m:
                raise EdgewiseError("comparison map is not degree preserving")
            comp_entries.setdefault(m, []).append((off_t, off_s, v))
    components = {m: _entries_matrix(f, base_chains.dim(m), sub_chains.dim(m), ents)
                  for m, ents in comp_entries.items()}
    cmp_map = ChainMap(sub_chains, base_chains, components)
    ranks = {}
    dims_ok, iso_ok = True, True
    for m in mutual:
        if hb.get(m, 0) != hs.get(m, 0):
            dims_ok = False
        src = HomologyBasis(sub_chains, m)
        tgt = HomologyBasis(base_chains, m)
        r = rank(induced_map_on_homology(cmp_map.component(m), src, tgt))
        ranks[m] = r
        if r != tgt.dim or r != src.dim:
            iso_ok = False
    return SubdivisionCheck(p, X.trunc, mutual,
                            {m: hb.get(m, 0) for m in mutual},
                            {m: hs.get(m, 0) for m in mutual},
                            ranks, dims_ok, iso_ok)


# ---------------------------------------------------------------------------
# Tate commutes with finite totalization (desk-scale content of the retract
# argument for smooth algebras)


@dataclass
class TateTotalizationCheck:
    p: int
    trunc: int
    window: list
    termwise_then_total: dict
    tate_of_total: dict
    agree: bool
    smooth_witness_validated: bool
    informational: bool

    @property
    def passed(self) -> bool:
        return self.agree and self.smooth_witness_validated


def _termwise_tate_totalized(Y: SubdividedModule, window) -> dict:
    """Homology of Tot_n(Tate(Y_n)) over the probe window of total degrees.

    Triple-complex blocks (j, n, k) sit at total degree n + k - j with
    differential h + (-1)^j Σ(-1)^i d_i + (-1)^{j+n} d_int.
    """
    f = Y.field
    p = Y.p
    lo, hi = min(window) - 1, max(window) + 1
    blocks = {}
    dims: dict = {}
    for n in range(Y.n_max + 1):
        space = Y.space(n)
        ks = sorted(set(space.degrees))
        positions_by_k = {k: [i for i, d in enumerate(space.degrees) if d == k]
                          for k in ks}
        for k in ks:
            for m in range(lo, hi + 1):
                j = n + k - m
                key = (j, n, k)
                size = len(positions_by_k[k])
                blocks[key] = (m, dims.get(m, 0), positions_by_k[k])
                dims[m] = dims.get(m, 0) + size
    index_of = {}
    for (j, n, k), (m, off, positions) in blocks.items():
        for a, pos in enumerate(positions):
            index_of[(j, n, pos)] = (m, off + a)
    entries: dict = {}

    def add_entry(src_key, tgt_key, v):
        (ms, so) = index_of[src_key]
        (mt, to) = index_of.get(tgt_key, (None, None))
        if mt is None:
            return
        if mt != ms - 1:
            raise EdgewiseError("termwise Tate block not of degree -1")
        entries.setdefault(ms, []).append((to, so, v))

    for (j, n, k), (m, off, positions) in sorted(blocks.items()):
        space = Y.space(n)
        sig = Y.sigma(n)
        horiz = (sig - SparseMatrix.identity(f, space.dim)) if j % 2 == 0 else _norm(sig, p, f)
        sgn_f = f.sign(j)
        sgn_int = f.sign(j + n)
        faces = [Y.face(n, i) for i in range(n + 1)] if n >= 1 else []
        dint = Y.internal(n)
        for pos in positions:
            if (j, n, pos) not in index_of:
                continue
            col = horiz.column(pos)
            for i2, v in col.items():
                add_entry((j, n, pos), (j + 1, n, i2), v)
            for i, mat in enumerate(faces):
                col = mat.column(pos)
                s = f.mul(sgn_f, f.sign(i))
                for i2, v in col.items():
                    add_entry((j, n, pos), (j, n - 1, i2), f.mul(s, v))
            col = dint.column(pos)
            for i2, v in col.items():
                add_entry((j, n, pos), (j, n, i2), f.mul(sgn_int, v))
    diff = {m: _entries_matrix(f, dims.get(m - 1, 0), dims.get(m, 0), ents)
            for m, ents in entries.items() if dims.get(m - 1, 0)}
    total = ChainComplex(GradedSpace(f, dims), diff)
    hom = total.homology_dims()
    return {m: hom.get(m, 0) for m in window}


def _norm(sig: SparseMatrix, p: int, f) -> SparseMatrix:
    acc = SparseMatrix.identity(f, sig.nrows)
    out = acc
    for _ in range(p - 1):
        acc = sig @ acc
        out = out + acc
    return out


def tate_totalization_check(A: DGAlgebra, P: BimoduleResolution | None, p: int,
                            N: int) -> TateTotalizationCheck:
    """Termwise Tate then totalize vs Tate of the totalization.

    With a validated smoothness witness this is the desk-scale shadow of the
    retract argument: both sides are finite and must agree exactly.  Without
    a witness (non-smooth input) the report is informational.
    """
    if p < 3 or p % 2 == 0:
        raise EdgewiseError("the check is asserted for odd primes")
    if A.field.char != p:
        raise EdgewiseError(f"characteristic mismatch: field {A.field}, p = {p}")
    witness_ok = False
    if P is not None:
        rep = validate_smoothness_witness(A, P)
        if not rep.passed:
            raise EdgewiseError("invalid smoothness witness:\n" + rep.summary())
        witness_ok = True
    from dgcyclic.hochschild import cyclic_module
    X = cyclic_module(A, N)
    Y = subdivide(X, p)
    tot, offsets = subdivided_chains(Y)
    f = A.field
    sigma: dict = {}
    sig_entries: dict = {}
    for n in range(Y.n_max + 1):
        sig = Y.sigma(n)
        for (i, j, v) in sig.entries():
            (m, off_t) = offsets[(n, i)]
            (m2, off_s) = offsets[(n, j)]
            if m != m2:
                raise EdgewiseError("sigma is not degree preserving")
            sig_entries.setdefault(m, []).append((off_t, off_s, v))
    for m, ents in sig_entries.items():
        sigma[m] = SparseMatrix(f, tot.dim(m), tot.dim(m), ents)
    action = CpAction(tot, sigma, p)
    side_total = tate_dims(action, cross_check_localization=False)
    degrees = tot.degrees()
    lo, hi = min(degrees) - 2, max(degrees) + 2
    window = list(range(lo, hi + 1))
    side_termwise = _termwise_tate_totalized(Y, window)
    tate_table = {m: side_total.dims.get(m, 0) for m in window}
    agree = all(side_termwise[m] == tate_table[m] for m in window)
    return TateTotalizationCheck(p, N, window, side_termwise, tate_table, agree,
                                 witness_ok, informational=P is None)
