"""Glued root lattices N = sqrt(p) (A_{p-1}^r, G) for p in {2, 3, 5, 7}, their
discriminant groups, short-vector enumeration, and coset theta series.

Vectors live in the weight lattice P of A_q^r (q = p-1): ambient coordinates
are integer coefficient vectors over the fundamental-weight basis, block by
block.  The glued lattice L0 = (A_q^r, G) is spanned by the root lattices of
the blocks together with one glue lift per codeword, where the lift of the
class c in Z/p is the fundamental weight with that index (0 -> 0).  N is L0
rescaled by sqrt(p); its gram matrix (p times the glued gram) is integral
and even.  Dual vectors of N are (1/sqrt p) u with u in L0' = (A_q^r, Gperp),
and the discriminant group N'/N = (Z/p)^(m+2) with m = 24/(p+1) is read off
the Smith-style reduction of p S^-1 mod p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np
import sympy

from . import fpalg
from .affine import finite_root_data
from .discweil import DiscriminantForm, discriminant_form
from .qexact import QSeries

__all__ = [
    "BadCode",
    "GlueCode",
    "GluedLattice",
    "CosetRep",
    "glue_code",
    "code_from_generators",
    "code_from_words",
    "build_lattice",
    "discriminant_group",
    "coset_reps",
    "short_vectors",
    "dual_short_vectors",
    "coset_theta",
    "minimal_norm",
    "code_class",
]


class BadCode(ValueError):
    """The glue code has the wrong size or is not closed under addition."""


RANKS = {2: 16, 3: 12, 5: 8, 7: 6}


def _params(p: int):
    if p not in (2, 3, 5, 7):
        raise BadCode(f"unsupported p = {p}")
    q = p - 1
    m = 24 // (p + 1)
    r = 48 // (q * (p + 1))
    return q, m, r


# ---------------------------------------------------------------------------
# glue codes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GlueCode:
    p: int
    length: int
    generators: tuple
    codewords: tuple        # full list, lexicographically sorted
    dual_codewords: tuple   # dual under the standard F_p inner product


def _expected_log_size(p: int) -> int:
    q, _, _ = _params(p)
    e2 = 24 // q - 2
    if e2 % 2:
        raise BadCode(f"no valid code size for p = {p}")
    return e2 // 2


def code_from_generators(p: int, length: int, generators) -> GlueCode:
    gens = tuple(tuple(int(x) % p for x in g) for g in generators)
    for g in gens:
        if len(g) != length:
            raise BadCode("generator length mismatch")
    words = fpalg.span(gens, p)
    if len(words) != p ** _expected_log_size(p):
        raise BadCode(
            f"|G| = {len(words)}, expected {p ** _expected_log_size(p)}")
    dual = fpalg.span(fpalg.nullspace(gens, p) or [tuple([0] * length)], p)
    code = GlueCode(p, length, gens, tuple(words), tuple(dual))
    _validate_code(code)
    return code


def code_from_words(p: int, length: int, words) -> GlueCode:
    """Build a code from an explicit codeword list, checking closure."""
    ws = sorted({tuple(int(x) % p for x in w) for w in words})
    for w in ws:
        if len(w) != length:
            raise BadCode("codeword length mismatch")
    if sorted(fpalg.span(ws, p)) != ws:
        raise BadCode("codeword list is not closed under addition")
    if len(ws) != p ** _expected_log_size(p):
        raise BadCode(f"|G| = {len(ws)}, expected {p ** _expected_log_size(p)}")
    basis, _ = fpalg.rref(ws, p)
    dual = fpalg.span(fpalg.nullspace(basis, p) or [tuple([0] * length)], p)
    code = GlueCode(p, length, tuple(basis), tuple(ws), tuple(dual))
    _validate_code(code)
    return code


def _validate_code(code: GlueCode) -> None:
    p = code.p
    if not set(code.dual_codewords) <= set(code.codewords):
        raise BadCode("dual code is not contained in the code")
    for w in code.codewords:
        if sum(c * (p - c) for c in w) % 2:
            raise BadCode("code would glue to an odd lattice")
    if p == 2:
        weights = {sum(w) for w in code.codewords if any(w)}
        if min(weights) != 4:
            raise BadCode(f"minimum distance {min(weights)}, expected 4")


def _reed_muller_2_4_generators():
    """Generators of the length-16 extended Hamming code [16,11,4]: values of
    the degree <= 2 monomials in 4 bits, over all points of F_2^4."""
    monomials = [()]
    monomials += [(i,) for i in range(4)]
    monomials += [(i, j) for i in range(4) for j in range(i + 1, 4)]
    gens = []
    for mono in monomials:
        gens.append(tuple(
            int(all((v >> b) & 1 for b in mono)) for v in range(16)))
    return gens


@lru_cache(maxsize=None)
def glue_code(p: int) -> GlueCode:
    q, _, r = _params(p)
    if p == 2:
        gens = _reed_muller_2_4_generators()
    elif p == 3:
        gens = [tuple(1 if j == i else (2 if j == r - 1 else 0)
                      for j in range(r)) for i in range(r - 1)]
    elif p == 5:
        gens = [(1, 0), (0, 1)]
    else:
        gens = [(1,)]
    return code_from_generators(p, r, gens)


def code_class(p: int, ambient) -> tuple:
    """Per-block classes in (A_q'/A_q)^r = (Z/p)^r of an ambient coordinate
    vector (weight-basis coefficients, concatenated blocks)."""
    q = p - 1
    r = len(ambient) // q
    out = []
    for k in range(r):
        block = ambient[k * q:(k + 1) * q]
        out.append(sum((i + 1) * x for i, x in enumerate(block)) % p)
    return tuple(out)


# ---------------------------------------------------------------------------
# lattice construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GluedLattice:
    p: int
    q: int
    rfac: int
    code: GlueCode
    basis: tuple      # rows: ambient coordinates of N/sqrt(p)
    gram: tuple       # gram of N: p * (glued gram); integral, even
    det: int
    provenance: str

    @property
    def rank(self) -> int:
        return self.q * self.rfac


@lru_cache(maxsize=None)
def _block_gram(q: int):
    """Gram of the fundamental-weight basis of one A_q factor."""
    rd = finite_root_data(q)
    return tuple(
        tuple(Fraction(rd.inv_cartan_scaled[i][j], q + 1) for j in range(q))
        for i in range(q))


@lru_cache(maxsize=None)
def _ambient_gram(q: int, r: int):
    blk = _block_gram(q)
    n = q * r
    g = [[Fraction(0)] * n for _ in range(n)]
    for k in range(r):
        for i in range(q):
            for j in range(q):
                g[k * q + i][k * q + j] = blk[i][j]
    return tuple(tuple(row) for row in g)


def _row_hnf(rows):
    """Row-style Hermite normal form: returns a basis of the integer row
    span, pivots positive, entries above each pivot reduced into [0, pivot)."""
    mat = [list(r) for r in rows]
    if not mat:
        return []
    ncols = len(mat[0])
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        for i in range(r + 1, len(mat)):
            while mat[i][col]:
                t = mat[r][col] // mat[i][col]
                mat[r] = [a - t * b for a, b in zip(mat[r], mat[i])]
                mat[r], mat[i] = mat[i], mat[r]
        if mat[r][col] < 0:
            mat[r] = [-a for a in mat[r]]
        r += 1
        if r == len(mat):
            break
    mat = [row for row in mat[:r] if any(row)]
    for i, row in enumerate(mat):
        c = next(k for k, v in enumerate(row) if v)
        for i2 in range(i):
            t = mat[i2][c] // row[c]
            if t:
                mat[i2] = [a - t * b for a, b in zip(mat[i2], row)]
    return [tuple(row) for row in mat]


@lru_cache(maxsize=None)
def build_lattice(p: int, code: GlueCode | None = None) -> GluedLattice:
    q, m, r = _params(p)
    if code is None:
        code = glue_code(p)
    if code.p != p or code.length != r:
        raise BadCode("code does not match the block structure")
    n = q * r
    rd = finite_root_data(q)
    rows = []
    for k in range(r):
        for i in range(q):
            row = [0] * n
            for j in range(q):
                row[k * q + j] = rd.cartan[i][j]
            rows.append(tuple(row))
    for gen in code.generators:
        row = [0] * n
        for k, c in enumerate(gen):
            if c:
                row[k * q + (c - 1)] = 1
        rows.append(tuple(row))
    basis = _row_hnf(rows)
    if len(basis) != n:
        raise BadCode("glue generators do not span a full-rank lattice")
    gp = _ambient_gram(q, r)
    gram = []
    for a in basis:
        row = []
        for b in basis:
            val = p * sum(a[i] * gp[i][j] * b[j]
                          for i in range(n) for j in range(n) if a[i] and b[j])
            if val.denominator != 1:
                raise BadCode("glued gram is not integral")
            row.append(int(val))
        gram.append(tuple(row))
    for i in range(n):
        if gram[i][i] % 2:
            raise BadCode("glued lattice is not even")
    det = int(sympy.Matrix([list(row) for row in gram]).det())
    assert det == p ** (m + 2)
    prov = (f"sqrt({p}) * (A_{q}^{r}, G) with |G| = {len(code.codewords)}, "
            f"|Gperp| = {len(code.dual_codewords)}")
    return GluedLattice(p=p, q=q, rfac=r, code=code, basis=tuple(basis),
                        gram=tuple(gram), det=det, provenance=prov)


# ---------------------------------------------------------------------------
# discriminant group
# ---------------------------------------------------------------------------


def _mat_inv_frac(rows):
    """Exact inverse of a square integer/Fraction matrix."""
    n = len(rows)
    aug = [[Fraction(x) for x in row] + [Fraction(1 if j == i else 0)
                                         for j in range(n)]
           for i, row in enumerate(rows)]
    for col in range(n):
        piv = next(i for i in range(col, n) if aug[i][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                c = aug[i][col]
                aug[i] = [a - c * b for a, b in zip(aug[i], aug[col])]
    return [tuple(row[n:]) for row in aug]


@lru_cache(maxsize=None)
def _disc_data(L: GluedLattice):
    """(Sinv, pSinv, gens, pivots): exact dual gram, its p-scaled integer
    form, and the rref-mod-p generator rows of N'/N with their pivot
    columns."""
    p = L.p
    n = L.rank
    sinv = _mat_inv_frac(L.gram)
    psinv = []
    for row in sinv:
        irow = []
        for x in row:
            v = p * x
            assert v.denominator == 1, "pN' is not contained in N"
            irow.append(int(v))
        psinv.append(tuple(irow))
    gens, pivots = fpalg.rref(psinv, p)
    q, m, r = _params(p)
    assert len(gens) == m + 2, "discriminant group has unexpected rank"
    return tuple(sinv), tuple(psinv), tuple(gens), tuple(pivots)


def discriminant_group(L: GluedLattice) -> DiscriminantForm:
    """The finite quadratic module N'/N = (Z/p)^(m+2), presented by the
    pairings of its canonical generators."""
    _, _, gens, _ = _disc_data(L)
    p = L.p
    n = L.rank
    gram = []
    for a in gens:
        row = []
        for b in gens:
            num = sum(a[i] * L.gram[i][j] * b[j]
                      for i in range(n) for j in range(n) if a[i] and b[j])
            row.append(Fraction(num, p * p))
        gram.append(row)
    return discriminant_form(p, gram)


@dataclass(frozen=True)
class CosetRep:
    """A coset of N in N': coefficients over the discriminant generators,
    the canonical representative (in N-basis coordinates and in ambient
    sqrt(p)-scaled weight coordinates), its norm, and gamma^2/2 mod 1."""

    coeffs: tuple
    ncoords: tuple      # Fractions, entries in [0, 1)
    ambient: tuple      # integer weight coordinates of sqrt(p) * gamma
    norm: Fraction
    norm_class: Fraction


@lru_cache(maxsize=None)
def coset_reps(L: GluedLattice):
    """All |N'/N| cosets, in lexicographic order of their coefficient tuples
    (matching discweil element order)."""
    _, _, gens, _ = _disc_data(L)
    p = L.p
    s = len(gens)
    n = L.rank
    G = np.array([list(g) for g in gens], dtype=np.int64)
    S = np.array([list(row) for row in L.gram], dtype=np.int64)
    B = np.array([list(row) for row in L.basis], dtype=np.int64)
    T = np.indices((p,) * s).reshape(s, -1).T.astype(np.int64)
    reps = (T @ G) % p                      # p * (N-basis coords), reduced
    norms_num = np.einsum("ki,ij,kj->k", reps, S, reps)
    ambients = reps @ B
    out = []
    for idx in range(len(T)):
        g = reps[idx]
        norm = Fraction(int(norms_num[idx]), p * p)
        out.append(CosetRep(
            coeffs=tuple(int(x) for x in T[idx]),
            ncoords=tuple(Fraction(int(x), p) for x in g),
            ambient=tuple(int(x) for x in ambients[idx]),
            norm=norm,
            norm_class=(norm / 2) % 1,
        ))
    return tuple(out)


def coset_of(L: GluedLattice, gcoords) -> tuple:
    """Coefficient tuple of the coset containing the dual vector whose
    p-scaled N-basis coordinates are gcoords."""
    _, _, _, pivots = _disc_data(L)
    return tuple(int(gcoords[c]) % L.p for c in pivots)


# ---------------------------------------------------------------------------
# short vectors (rational Cholesky + bounded depth-first search)
# ---------------------------------------------------------------------------


def _cholesky(gram):
    n = len(gram)
    C = [[Fraction(x) for x in row] for row in gram]
    d = [Fraction(0)] * n
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = C[i][i]
        if d[i] <= 0:
            raise ValueError("gram matrix is not positive definite")
        for j in range(i + 1, n):
            mu[i][j] = C[i][j] / d[i]
        for j in range(i + 1, n):
            cij = C[i][j]
            if not cij:
                continue
            for k in range(j, n):
                C[j][k] -= cij * C[i][k] / d[i]
    return d, mu


@lru_cache(maxsize=None)
def _cholesky_cached(gram: tuple):
    d, mu = _cholesky([list(r) for r in gram])
    return tuple(d), tuple(tuple(row) for row in mu)


def _lattice_points(gram, bound, shift=None, canonical_half=False):
    """Integer coordinate vectors x with Q(x + shift) <= bound for the
    positive definite form Q given by gram, as (x, Q(x + shift)) pairs in
    lexicographic order of x.

    With canonical_half (only valid for zero shift) one vector per +/- pair
    is kept (first nonzero coordinate positive) plus the zero vector.

    The search runs entirely in integer arithmetic: the Cholesky data is
    rescaled so each level contributes c_i (s_i x_i + u_i)^2 on a common
    1/L grid, and coordinate ranges come from math.isqrt; exactness is
    preserved throughout."""
    n = len(gram)
    bound = Fraction(bound)
    if bound < 0:
        return []
    if n == 0:
        return [((), Fraction(0))]
    if shift is None:
        shift = (Fraction(0),) * n
    else:
        shift = tuple(Fraction(x) for x in shift)
        if canonical_half and any(shift):
            raise ValueError("canonical_half needs a zero shift")
    d, mu = _cholesky_cached(tuple(tuple(Fraction(x) for x in row)
                                   for row in gram))
    shift_den = math.lcm(*[x.denominator for x in shift]) if n else 1
    s = []
    for i in range(n):
        den = shift_den
        for j in range(i + 1, n):
            den = math.lcm(den, mu[i][j].denominator * shift_den)
        s.append(den)
    L = bound.denominator
    for i in range(n):
        L = math.lcm(L, d[i].denominator * s[i] * s[i])
    # level cost: d_i (x_i + U_i)^2 * L = c_i (s_i x_i + u_i)^2 exactly,
    # where U_i = shift_i + sum_{j>i} mu_ij (x_j + shift_j)
    c = []
    k = []
    for i in range(n):
        v = d[i] * L
        assert v.denominator == 1 and int(v) % (s[i] * s[i]) == 0
        c.append(int(v) // (s[i] * s[i]))
        const = s[i] * (shift[i] + sum((mu[i][j] * shift[j]
                                        for j in range(i + 1, n)),
                                       Fraction(0)))
        assert const.denominator == 1
        k.append(int(const))
    M = [[int(mu[i][j] * s[i]) for j in range(n)] for i in range(n)]
    B = int(bound * L)
    out = []
    x = [0] * n

    def descend(i: int, remaining: int):
        if i < 0:
            vec = tuple(x)
            if canonical_half:
                first = next((v for v in vec if v), 0)
                if first < 0:
                    return
            out.append((vec, Fraction(B - remaining, L)))
            return
        row = M[i]
        u = k[i]
        for j in range(i + 1, n):
            if x[j]:
                u += row[j] * x[j]
        ci, si = c[i], s[i]
        r = math.isqrt(remaining // ci)
        lo = -((r + u) // si)
        hi = (r - u) // si
        for xi in range(lo, hi + 1):
            t = si * xi + u
            cost = ci * t * t
            if cost > remaining:
                continue
            x[i] = xi
            descend(i - 1, remaining - cost)
        x[i] = 0

    descend(n - 1, B)
    out.sort(key=lambda t: t[0])
    return out


def _short_vectors_gram(gram, bound):
    """All vectors x with x G x^T <= bound, one per +/- pair (first nonzero
    coordinate positive) plus the zero vector; lexicographically sorted
    (coords, norm) pairs."""
    return _lattice_points(gram, bound, canonical_half=True)


def short_vectors(L: GluedLattice, bound, include_negatives: bool = False):
    """Vectors of N with norm <= bound as (N-basis coordinates, norm) pairs.
    By default one vector per +/- pair is emitted (plus the zero vector at
    norm 0); include_negatives=True emits both signs.  Deterministic
    lexicographic order."""
    found = [(coords, int(norm)) for coords, norm
             in _short_vectors_gram(L.gram, bound)]
    if include_negatives:
        mirrored = [(tuple(-c for c in coords), norm)
                    for coords, norm in found if any(coords)]
        found = sorted(found + mirrored, key=lambda t: t[0])
    return found


def dual_short_vectors(L: GluedLattice, bound):
    """Vectors of N' with norm <= bound, one per +/- pair plus zero, as
    (dual-basis coordinates, p-scaled N-basis coordinates, norm) triples in
    deterministic order."""
    sinv, psinv, _, _ = _disc_data(L)
    out = []
    for coords, norm in _short_vectors_gram(sinv, bound):
        g = tuple(sum(c * psinv[i][k] for i, c in enumerate(coords) if c)
                  for k in range(L.rank))
        out.append((coords, g, norm))
    return out


def minimal_norm(L: GluedLattice) -> int:
    bound = 2
    while True:
        nonzero = [norm for coords, norm in short_vectors(L, bound) if any(coords)]
        if nonzero:
            return min(nonzero)
        bound += 2


# ---------------------------------------------------------------------------
# coset theta series
# ---------------------------------------------------------------------------


_THETA_CACHE: dict = {}


def coset_theta(L: GluedLattice, gamma, order) -> QSeries:
    """The theta series of the coset gamma + N, truncated at the given order:
    sum over x in gamma + N of q^(x^2/2).  gamma may be a CosetRep or a
    coefficient tuple.  Exponents lie on the gamma^2/2 + Z grid; order <= 0
    yields an empty series.

    Each coset is enumerated directly (lattice points around the shifted
    origin), so the cost scales with the number of contributing vectors in
    that one coset, not with the ambient discriminant group."""
    order = Fraction(order)
    p = L.p
    den = 2 * p * p
    if order <= 0:
        return QSeries(den, {}, order)
    t = gamma.coeffs if isinstance(gamma, CosetRep) else tuple(int(x) % p for x in gamma)
    key = (L.p, t, order)
    cached = _THETA_CACHE.get(key)
    if cached is not None:
        return cached
    reps = coset_reps(L)
    idx = 0
    for x in t:
        idx = idx * p + x
    delta = reps[idx].ncoords
    counts: dict = {}
    for _, norm in _lattice_points(L.gram, 2 * order, shift=delta):
        if norm / 2 >= order:
            continue
        num = norm * p * p  # exponent numerator on the 1/(2 p^2) grid: norm/2
        assert num.denominator == 1
        counts[int(num)] = counts.get(int(num), 0) + 1
    series = QSeries(den, {num: Fraction(cnt) for num, cnt in counts.items()},
                     order)
    _THETA_CACHE[key] = series
    return series
