"""Homotopy fixed points, homotopy quotients and Tate cohomology of C_n.

The group algebra k[C_n] is resolved by the standard 2-periodic resolution
... -> k[C_n] --(σ-1)--> k[C_n] --(Norm)--> k[C_n] -> k -> 0, spliced to a
complete resolution indexed over all of Z with d_j = σ-1 for j odd and
d_j = Norm for j even.  For a bounded complex M with C_n-action σ:

* homotopy fixed points:  column j >= 0 holds M at total degree c - j, the
  horizontal map out of column j is (σ-1) for j even and Norm for j odd,
  the internal differential carries the sign (-1)^j;
* homotopy quotient: column j >= 0 holds M at total degree c + j with the
  horizontal map into column j-1 equal to (σ-1) for j odd, Norm for j even;
* Tate: the homotopy-fixed-points layout extended over all j in Z.  For
  bounded M every total degree meets finitely many columns, so Tate is an
  exact, truncation-free computation, and it is exactly 2-periodic because
  the complete resolution is.

Homotopy fixed points and quotients are windowed (N resolution stages) and
carry explicit reliable ranges; Tate needs no window.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product

from dgcyclic.linalg import Field, SparseMatrix, rank
from dgcyclic.complexes import (
    ChainComplex, ChainMap, GradedSpace, HomologyBasis, cone,
    induced_map_on_homology,
)
from dgcyclic.dga import ValidationReport


class TateError(ValueError):
    pass


@dataclass(frozen=True)
class GroupDescriptor:
    """Finite cyclic group C_n; dimension 0 as a compact group."""
    order: int
    dimension: int = 0

    def __post_init__(self):
        if self.order < 1:
            raise TateError("group order must be positive")
        if self.dimension != 0:
            raise TateError("finite groups have dimension 0")


class CpAction:
    """Bounded complex with a degreewise automorphism σ of finite order."""

    def __init__(self, complex: ChainComplex, sigma: dict, order: int,
                 check: bool = True):
        self.complex = complex
        self.field = complex.field
        self.group = GroupDescriptor(order)
        self.sigma = {}
        for n in complex.degrees():
            m = sigma.get(n)
            if m is None:
                m = SparseMatrix.identity(self.field, complex.dim(n))
            if m.nrows != complex.dim(n) or m.ncols != complex.dim(n):
                raise TateError(f"sigma has wrong shape in degree {n}")
            self.sigma[n] = m
        if check:
            self.validate()

    @property
    def order(self) -> int:
        return self.group.order

    def validate(self):
        C = self.complex
        for n in C.degrees():
            power = SparseMatrix.identity(self.field, C.dim(n))
            for _ in range(self.order):
                power = self.sigma[n] @ power
            if power != SparseMatrix.identity(self.field, C.dim(n)):
                raise TateError(f"sigma^{self.order} != id in degree {n}")
        for n in C.degrees():
            if C.dim(n - 1):
                lhs = C.differential(n) @ self.sigma[n]
                rhs = self.sigma.get(n - 1, SparseMatrix.identity(self.field, C.dim(n - 1))) \
                    @ C.differential(n)
                if lhs != rhs:
                    raise TateError(f"sigma does not commute with d in degree {n}")

    def sigma_minus_one(self, n: int) -> SparseMatrix:
        return self.sigma[n] - SparseMatrix.identity(self.field, self.complex.dim(n))

    def norm_map(self, n: int) -> SparseMatrix:
        acc = SparseMatrix.identity(self.field, self.complex.dim(n))
        out = acc
        for _ in range(self.order - 1):
            acc = self.sigma[n] @ acc
            out = out + acc
        return out


def trivial_action(C: ChainComplex, order: int) -> CpAction:
    return CpAction(C, {}, order, check=False)


def free_module_action(field: Field, order: int, degree: int = 0) -> CpAction:
    """k[C_n] in one degree with σ = the regular-representation shift."""
    C = ChainComplex(GradedSpace(field, {degree: order}), {})
    shift = SparseMatrix(field, order, order,
                         [((i + 1) % order, i, field.one()) for i in range(order)])
    return CpAction(C, {degree: shift}, order)


# ---------------------------------------------------------------------------
# tower assembly


def _tower_complex(X: CpAction, columns, placement: str) -> tuple:
    """ChainComplex of the (co)homology tower over the given column indices.

    placement 'hom' puts column j of chain degree c at total degree c - j
    with horizontal maps j -> j+1 ((σ-1) for j even, Norm for j odd);
    placement 'tensor' puts it at c + j with horizontal maps j -> j-1
    ((σ-1) for j odd, Norm for j even).  Internal differential gets (-1)^j.
    Returns (complex, offsets) with offsets[(j, c)] = (m, start).
    """
    C, f = X.complex, X.field
    cols = sorted(columns)
    colset = set(cols)
    dims: dict = {}
    offsets = {}
    for j in cols:
        for c in C.degrees():
            m = c - j if placement == "hom" else c + j
            offsets[(j, c)] = (m, dims.get(m, 0))
            dims[m] = dims.get(m, 0) + C.dim(c)
    entries: dict = {}

    def add_block(src, tgt, mat):
        (ms, so) = offsets[src]
        (mt, to) = offsets[tgt]
        if mt != ms - 1:
            raise TateError("tower block is not of degree -1")
        for (i, jj, v) in mat.entries():
            entries.setdefault(ms, []).append((to + i, so + jj, v))

    for j in cols:
        for c in C.degrees():
            if C.dim(c - 1):
                mat = C.differential(c)
                if j % 2:
                    mat = -mat
                add_block((j, c), (j, c - 1), mat)
            if placement == "hom":
                if (j + 1) in colset:
                    h = X.sigma_minus_one(c) if j % 2 == 0 else X.norm_map(c)
                    if not h.is_zero():
                        add_block((j, c), (j + 1, c), h)
            else:
                if (j - 1) in colset:
                    h = X.sigma_minus_one(c) if j % 2 else X.norm_map(c)
                    if not h.is_zero():
                        add_block((j, c), (j - 1, c), h)
    diff = {m: SparseMatrix(f, dims.get(m - 1, 0), dims.get(m, 0), ents)
            for m, ents in entries.items()}
    return ChainComplex(GradedSpace(f, dims), diff), offsets


@dataclass
class TowerResult:
    dims: dict
    window: tuple
    reliable: list

    def table(self):
        return [(m, self.dims.get(m, 0)) for m in sorted(self.reliable, reverse=True)]


def fixed_points_dims(X: CpAction, N: int) -> TowerResult:
    """Group hypercohomology from N stages of the standard resolution."""
    if not X.complex.degrees():
        return TowerResult({}, (0, 0), [])
    cmin, cmax = min(X.complex.degrees()), max(X.complex.degrees())
    T, _ = _tower_complex(X, range(0, N + 1), "hom")
    hom = T.homology_dims()
    reliable = [m for m in range(cmax - N + 1, cmax + 1)]
    return TowerResult({m: hom.get(m, 0) for m in reliable},
                       (cmax - N, cmax), reliable)


def quotient_dims(X: CpAction, N: int) -> TowerResult:
    """Group hyperhomology from N stages of the standard resolution."""
    if not X.complex.degrees():
        return TowerResult({}, (0, 0), [])
    cmin, cmax = min(X.complex.degrees()), max(X.complex.degrees())
    T, _ = _tower_complex(X, range(0, N + 1), "tensor")
    hom = T.homology_dims()
    reliable = [m for m in range(cmin, cmin + N)]
    return TowerResult({m: hom.get(m, 0) for m in reliable},
                       (cmin, cmin + N), reliable)


def _tate_space_dims(X: CpAction, m: int):
    C = X.complex
    return [(c - m, c) for c in C.degrees()]   # (j, c) blocks at total degree m


def _tate_homology_at(X: CpAction, m: int) -> int:
    """dim of Tate cohomology at total degree m (finite, no truncation)."""
    C, f = X.complex, X.field
    if not C.degrees():
        return 0
    js = set()
    for mm in (m - 1, m, m + 1):
        for (j, _) in _tate_space_dims(X, mm):
            js.add(j)
    lo, hi = min(js), max(js)
    T, offsets = _tower_complex(X, range(lo, hi + 1), "hom")
    # all blocks of total degrees m-1, m, m+1 are present by construction
    z = T.dim(m) - rank(T.differential(m))
    b = rank(T.differential(m + 1))
    return z - b


@dataclass
class TateResult:
    dims: dict
    window: tuple
    periodic: bool
    generator_degrees: dict = dc_field(default_factory=lambda: {"epsilon": -1, "u": -2})
    localization_agrees: bool | None = None

    def dim_at(self, m: int) -> int:
        if self.periodic and self.dims:
            lo, hi = self.window
            if m < lo:
                m = lo + ((m - lo) % 2)
            if m > hi:
                m = hi - ((hi - m) % 2)
        return self.dims.get(m, 0)


def tate_dims(X: CpAction, cross_check_localization: bool = True) -> TateResult:
    """Exact 2-periodic Tate dims via the complete resolution."""
    C = X.complex
    if not C.degrees():
        return TateResult({}, (0, 0), True, localization_agrees=True)
    cmin, cmax = min(C.degrees()), max(C.degrees())
    lo, hi = cmin - 3, cmax + 3
    dims = {m: _tate_homology_at(X, m) for m in range(lo, hi + 1)}
    periodic = all(dims.get(m, 0) == dims.get(m + 2, 0) for m in range(lo, hi - 1))
    loc = None
    if cross_check_localization:
        loc_dims = _localized_fixed_points(X)
        loc = (loc_dims[0] == dims.get(_match_parity(lo, hi, 0), 0)
               and loc_dims[1] == dims.get(_match_parity(lo, hi, 1), 0))
    return TateResult(dims, (lo, hi), periodic, localization_agrees=loc)


def _match_parity(lo, hi, parity):
    m = lo if lo % 2 == parity % 2 else lo + 1
    return m


def _localized_fixed_points(X: CpAction):
    """Stabilized dims of u-shift powers on deep fixed-point towers.

    u shifts the resolution column by 2; at total degrees below the bottom
    of the complex the windowed tower coincides with the Tate tower, so the
    stable rank of u-powers computes the localized fixed points per parity.
    """
    C, f = X.complex, X.field
    cmin, cmax = min(C.degrees()), max(C.degrees())
    spread = cmax - cmin
    depth = spread // 2 + 3
    # deep enough that every total degree probed sees the full Tate tower
    W = spread + 2 * depth + 8
    T, offsets = _tower_complex(X, range(0, W + 1), "hom")
    out = {}
    for parity in (0, 1):
        m0 = cmin - 1 - ((cmin - 1 - parity) % 2)
        bases = {}
        for k in range(depth + 1):
            bases[k] = HomologyBasis(T, m0 - 2 * k)
        # u: total degree m -> m - 2 via block shift (j, c) -> (j + 2, c)
        mats = []
        for k in range(depth):
            src_m, tgt_m = m0 - 2 * k, m0 - 2 * (k + 1)
            entries = []
            for c in C.degrees():
                j = c - src_m
                if 0 <= j <= W and 0 <= j + 2 <= W:
                    (_, so) = offsets[(j, c)]
                    (_, to) = offsets[(j + 2, c)]
                    for i in range(C.dim(c)):
                        entries.append((to + i, so + i, f.one()))
            U = SparseMatrix(f, T.dim(tgt_m), T.dim(src_m), entries)
            mats.append(induced_map_on_homology(U, bases[k], bases[k + 1]))
        ranks = []
        comp = None
        for k in range(len(mats)):
            comp = mats[k] if comp is None else mats[k] @ comp
            ranks.append(rank(comp))
        stable = ranks[-1] if ranks else bases[0].dim
        out[parity] = stable
    return out


# ---------------------------------------------------------------------------
# trace triangle


@dataclass
class TraceTriangleReport:
    order: int
    dimension_shift: int
    window: list
    quotient_dims: dict
    fixed_dims: dict
    tate_dims: dict
    cone_matches_tate: bool
    les_ranks_match: bool

    @property
    def passed(self) -> bool:
        return self.cone_matches_tate and self.les_ranks_match


def trace_triangle_check(X: CpAction, N: int) -> TraceTriangleReport:
    """Exactness bookkeeping for (M_hG --avg--> M^hG -> M^tG)."""
    C, f = X.complex, X.field
    if not C.degrees():
        return TraceTriangleReport(X.order, 0, [], {}, {}, {}, True, True)
    cmin, cmax = min(C.degrees()), max(C.degrees())
    Q, qoff = _tower_complex(X, range(0, N + 1), "tensor")
    F, foff = _tower_complex(X, range(0, N + 1), "hom")
    comps = {}
    for c in C.degrees():
        nm = X.norm_map(c)
        entries = []
        (mq, qo) = qoff[(0, c)]
        (mf, fo) = foff[(0, c)]
        for (i, j, v) in nm.entries():
            entries.append((fo + i, qo + j, v))
        mat = SparseMatrix(f, F.dim(c), Q.dim(c), entries)
        prev = comps.get(c)
        comps[c] = mat if prev is None else prev + mat
    avg = ChainMap(Q, F, comps)
    cne = cone(avg)
    hq = Q.homology_dims()
    hf = F.homology_dims()
    hcone = cne.homology_dims()
    # degrees where both towers and the cone are complete
    window = [m for m in range(cmax - N + 2, cmin + N - 1)]
    tate = {m: _tate_homology_at(X, m) for m in window}
    cone_ok = all(hcone.get(m, 0) == tate[m] for m in window)
    les_ok = True
    for m in window:
        hb_q_m = HomologyBasis(Q, m)
        hb_f_m = HomologyBasis(F, m)
        hb_q_m1 = HomologyBasis(Q, m - 1)
        hb_f_m1 = HomologyBasis(F, m - 1)
        r_m = rank(induced_map_on_homology(avg.component(m), hb_q_m, hb_f_m))
        r_m1 = rank(induced_map_on_homology(avg.component(m - 1), hb_q_m1, hb_f_m1))
        expect = (hb_f_m.dim - r_m) + (hb_q_m1.dim - r_m1)
        if hcone.get(m, 0) != expect:
            les_ok = False
    return TraceTriangleReport(
        X.order, 0, window,
        {m: hq.get(m, 0) for m in window},
        {m: hf.get(m, 0) for m in window},
        tate, cone_ok, les_ok)


# ---------------------------------------------------------------------------
# cyclic permutation action on tensor powers


def tensor_power_complex(M: ChainComplex, p: int):
    """M^{⊗p} with basis tuples of (degree, index) pairs, plus the tuple index."""
    f = M.field
    flat = [(d, i) for d in M.degrees() for i in range(M.dim(d))]
    tuples = list(product(flat, repeat=p))
    by_degree: dict = {}
    index = {}
    for tup in tuples:
        n = sum(d for (d, _) in tup)
        index[tup] = (n, by_degree.setdefault(n, 0))
        by_degree[n] = by_degree[n] + 1
    dims = dict(by_degree)
    entries: dict = {}
    for tup in tuples:
        (n, pos) = index[tup]
        prefix = 0
        for slot in range(p):
            (d, i) = tup[slot]
            dmat = M.differential(d)
            col = dmat.column(i) if dmat.ncols else {}
            for i2, v in col.items():
                new = tup[:slot] + ((d - 1, i2),) + tup[slot + 1:]
                (n2, pos2) = index[new]
                entries.setdefault(n, []).append(
                    (pos2, pos, v if prefix % 2 == 0 else f.neg(v)))
            prefix += d
    diff = {n: SparseMatrix(f, dims.get(n - 1, 0), dims.get(n, 0), ents)
            for n, ents in entries.items()}
    return ChainComplex(GradedSpace(f, dims), diff), index


def cyclic_power_action(M: ChainComplex, p: int) -> CpAction:
    """M^{⊗p} with the longest-cycle rotation, Koszul signs per basis tensor."""
    if p < 2:
        raise TateError("tensor power order must be at least 2")
    f = M.field
    power, index = tensor_power_complex(M, p)
    sig_entries: dict = {}
    for tup, (n, pos) in index.items():
        last_deg = tup[-1][0]
        rest = sum(d for (d, _) in tup[:-1])
        sgn = -1 if (last_deg * rest) % 2 else 1
        new = (tup[-1],) + tup[:-1]
        (n2, pos2) = index[new]
        if n2 != n:
            raise TateError("rotation changed total degree")
        sig_entries.setdefault(n, []).append((pos2, pos, f.of(sgn)))
    sigma = {n: SparseMatrix(f, power.dim(n), power.dim(n), ents)
             for n, ents in sig_entries.items()}
    return CpAction(power, sigma, p)


@dataclass
class BetaReport:
    prime: int
    total_homology_dim: int
    tate: TateResult
    window: list
    passed: bool
    failures: list


def beta_dimension_check(M: ChainComplex, p: int) -> BetaReport:
    """Every Tate degree of the cyclic-power action has dim = total dim H(M)."""
    if p < 3 or not _is_prime_int(p):
        raise TateError("the dimension law is asserted for odd primes only")
    if M.field.char != p:
        raise TateError(f"characteristic mismatch: field {M.field}, prime {p}")
    total_h = sum(M.homology_dims().values())
    X = cyclic_power_action(M, p)
    t = tate_dims(X)
    window = list(range(t.window[0] + 1, t.window[1]))
    failures = [(m, t.dims.get(m, 0)) for m in window if t.dims.get(m, 0) != total_h]
    if not M.degrees():
        window, failures = [0, 1], ([] if total_h == 0 else [(0, 0)])
    return BetaReport(p, total_h, t, window, not failures, failures)


def _is_prime_int(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True
