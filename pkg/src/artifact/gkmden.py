"""Hyperbolic extension of the glued lattice and the denominator identity
of the associated generalized Kac-Moody algebra.

The ambient lattice L is the direct sum of the dual of the glued lattice
with a hyperbolic plane, with the whole quadratic form rescaled by p: its
Gram matrix is block_diag(p * inverse(glued gram), [[0, p], [p, 0]]).  It
is even of signature (2m+1, 1) with determinant -p^m, where m = 24/(p+1),
and p*dual(L) is a finite-index sublattice of L (membership: all pairings
with L divisible by p).

Root multiplicities come from the coefficients of the eta quotient
f = 1/(eta(t)^m eta(p*t)^m) = q^-1 + m + ...: a nonzero vector alpha has
multiplicity [f](-alpha^2/2), plus [f](-alpha^2/(2p)) when alpha lies in
p*dual(L).  In particular the roots of positive norm are the norm 2
vectors and the norm 2p vectors of p*dual(L), each of multiplicity one.

Everything downstream of the build is organized around a hyperbolic
splitting off a cusp: a primitive norm 0 vector rho whose pairings with L
have unit content, a second null vector rhoTilde with (rho, rhoTilde) = 1,
and the orthogonal complement K of the pair, an even positive definite
lattice of rank 2m and determinant p^m with no vectors of norm 2.  Each
vector x splits as x = c*rhoTilde + d*rho + k and carries the bigrade
a(x) = -(rho, x) = -c, b(x) = (rhoTilde, x) = d, so x^2 = k^2 - 2ab.
Positive roots are those with a > 0, or a = 0 and b > 0; the a = 0
positive roots are exactly the multiples n*rho (n >= 1), which is what
makes truncation by the bigrade sound, and is guarded by BadGrading.

The denominator identity compares, monomial by monomial in the group ring
of L,

    e^rho * prod_{alpha > 0} (1 - e^alpha)^mult(alpha)

with

    sum_w det(w) * w(e^rho * prod_{n>=1} (1-e^{n*rho})^m (1-e^{pn*rho})^m)

over the group W generated by reflections in the real roots.  Both sides
are expanded exactly over the wedge a <= A, b <= B: every positive root
satisfies b(alpha) >= -min(a(alpha), 1), so monomials outside the wedge
can never re-enter it and discarding them is exact.  The w-sum is closed
breadth-first over reflection generators and its completeness inside the
window is certified against an independent enumeration of the candidate
images: primitive null vectors of unit pairing content in the forward
cone.  Any candidate the search fails to reach raises InsufficientOrder
rather than producing a silently truncated sum.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .glulat import _lattice_points, _mat_inv_frac, build_lattice
from .qexact import BadParameters, OrderExceeded, QSeries, coeff, eta_quotient
from .report import CheckReport, Stopwatch, finish


class BadGrading(ValueError):
    """The chosen cusp grading has an infinite degree slice: the complement
    lattice carries vectors that would make roots of degree zero other than
    the multiples of the cusp vector."""


class ParityConflict(ArithmeticError):
    """Two isometries found by the Weyl search share an image of the cusp
    vector but disagree in determinant (or the cusp stabilizer is not
    trivial), so a per-image determinant is ill-defined."""


class InsufficientOrder(ArithmeticError):
    """A search bound (cusp search, reflection generators, breadth-first
    closure) is too small for the requested window."""


# ---------------------------------------------------------------------------
# integer linear algebra helpers
# ---------------------------------------------------------------------------


def _int_det(rows) -> int:
    """Exact determinant of an integer matrix (Bareiss elimination)."""
    mat = [[int(x) for x in row] for row in rows]
    n = len(mat)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for col in range(n - 1):
        piv = next((i for i in range(col, n) if mat[i][col]), None)
        if piv is None:
            return 0
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            sign = -sign
        for i in range(col + 1, n):
            for j in range(col + 1, n):
                mat[i][j] = (mat[i][j] * mat[col][col]
                             - mat[i][col] * mat[col][j]) // prev
            mat[i][col] = 0
        prev = mat[col][col]
    return sign * mat[n - 1][n - 1]


def _kernel_basis(vecs, n):
    """Basis of the full integer kernel {x in Z^n : x . v = 0 for v in vecs},
    found by Hermite-reducing the pairing columns with a tracked unimodular
    row transform; the basis is saturated by construction."""
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    b = [[sum(u[i][k] * v[k] for k in range(n)) for v in vecs]
         for i in range(n)]
    r = 0
    for c in range(len(vecs)):
        while True:
            live = [i for i in range(r, n) if b[i][c]]
            if not live:
                break
            piv = min(live, key=lambda i: abs(b[i][c]))
            b[r], b[piv] = b[piv], b[r]
            u[r], u[piv] = u[piv], u[r]
            done = True
            for i in range(r + 1, n):
                t = b[i][c] // b[r][c]
                if t:
                    b[i] = [x - t * y for x, y in zip(b[i], b[r])]
                    u[i] = [x - t * y for x, y in zip(u[i], u[r])]
                if b[i][c]:
                    done = False
            if done:
                r += 1
                break
    return [tuple(row) for row in u[r:]]


def _content(vals) -> int:
    g = 0
    for v in vals:
        g = math.gcd(g, int(v))
    return g


def _reduce_gram(gram):
    """Heuristic LLL reduction of a positive definite integer Gram matrix.

    Returns (reduced_gram, transform) with the transform unimodular and
    reduced_gram = transform * gram * transform^T maintained in exact
    integer arithmetic; only the Gram-Schmidt bookkeeping that steers the
    reduction is floating point, so the output is always a correct change
    of basis and merely heuristically short."""
    n = len(gram)
    g = [[int(x) for x in row] for row in gram]
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_op(i, j, q):
        u[i] = [a - q * b for a, b in zip(u[i], u[j])]
        g[i] = [a - q * b for a, b in zip(g[i], g[j])]
        for r in range(n):
            g[r][i] -= q * g[r][j]

    def swap(i, j):
        u[i], u[j] = u[j], u[i]
        g[i], g[j] = g[j], g[i]
        for r in range(n):
            g[r][i], g[r][j] = g[r][j], g[r][i]

    def gso():
        mu = [[0.0] * n for _ in range(n)]
        b = [0.0] * n
        for i in range(n):
            b[i] = float(g[i][i])
            for j in range(i):
                if not b[j]:
                    continue
                mu[i][j] = (float(g[i][j]) - math.fsum(
                    mu[i][k] * mu[j][k] * b[k] for k in range(j))) / b[j]
                b[i] -= mu[i][j] ** 2 * b[j]
        return mu, b

    k = 1
    guard = 0
    while k < n and guard < 20000:
        guard += 1
        mu, b = gso()
        changed = False
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                row_op(k, j, q)
                changed = True
        if changed:
            mu, b = gso()
        if b[k] >= (0.75 - mu[k][k - 1] ** 2) * b[k - 1]:
            k += 1
        else:
            swap(k, k - 1)
            k = max(k - 1, 1)
    return g, u


# ---------------------------------------------------------------------------
# the hyperbolic lattice and its cusp splitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HypLattice:
    """The rescaled hyperbolic extension together with a fixed cusp split.

    gram is over the model basis (rescaled-dual block, then the hyperbolic
    pair).  split holds the rows rhoTilde, rho, K-basis expressed in model
    coordinates; it is unimodular, so split-basis coordinates are an exact
    relabeling of L.  k_gram is the Gram matrix of the positive definite
    complement K."""

    p: int
    m: int
    rank: int
    gram: tuple
    det: int
    rho: tuple
    rho_tilde: tuple
    split: tuple
    k_gram: tuple
    k_det: int
    k_min: int


@dataclass(frozen=True)
class RootDatum:
    """A root with its multiplicity; alpha is in model coordinates."""

    alpha: tuple
    norm: int
    rescaled_dual: bool
    mult: int


@dataclass(frozen=True)
class WeylElement:
    """A reflection-group element tracked as a full isometry matrix (row
    vectors act on the right), with its image of the cusp vector."""

    matrix: tuple
    image: tuple
    det: int
    word_length: int


def _cusp_candidates(gn, p, max_level):
    """Vectors a of the rescaled-dual block with a.Gn.a = 2p, 4p, ... up to
    2p*max_level and Gn.a not divisible by p, yielded level by level in
    (norm, coords) order: each gives the primitive null vector
    rho = (a; a.Gn.a/(2p), -1) of unit pairing content.

    Candidates are pre-filtered by a fast necessary condition: when some
    norm 2 vector v of the block has v.Gn.a divisible by p, that v extends
    to a norm 2 vector of the full lattice orthogonal to rho, so the
    complement would have minimum 2 and the candidate cannot be sound."""
    gn_np = np.array(gn, dtype=np.int64)
    v2 = [crd for crd, nrm in _lattice_points(gn, 2, canonical_half=True)
          if int(nrm) == 2]
    pairing_rows = (np.array(v2, dtype=np.int64) @ gn_np) % p if v2 else None
    for level in range(1, max_level + 1):
        target = 2 * p * level
        out = []
        for coords, norm in _lattice_points(gn, target, canonical_half=True):
            if int(norm) != target:
                continue
            a_np = np.array(coords, dtype=np.int64)
            if not ((gn_np @ a_np) % p).any():
                continue
            if pairing_rows is not None and \
                    not ((pairing_rows @ a_np) % p).all():
                continue
            out.append((target, coords))
        yield from sorted(out)


def _split_for_rho(gram, rho, rank):
    """Given a primitive null vector rho of unit pairing content, return
    (rho_tilde, k_basis): a second null vector pairing to 1 with rho, and a
    saturated basis of the orthogonal complement of the pair."""
    g_np = np.array(gram, dtype=object)
    rho_np = np.array(rho, dtype=object)
    w = rho_np @ g_np
    assert rho_np @ w == 0
    assert _content(w) == 1

    # integer u with (rho, u) = 1 by an extended-gcd sweep over the pairings
    g = 0
    coeffs = {}
    for i, wi in enumerate(int(x) for x in w):
        if wi == 0:
            continue
        if g == 0:
            g = wi
            coeffs = {i: 1}
        else:
            g2, s, t = _ext_gcd(g, wi)
            coeffs = {k: v * s for k, v in coeffs.items()}
            coeffs[i] = coeffs.get(i, 0) + t
            g = g2
        if g == 1:
            break
    if g == -1:
        coeffs = {k: -v for k, v in coeffs.items()}
        g = 1
    assert g == 1
    u = [0] * rank
    for k, v in coeffs.items():
        u[k] = v
    u_np = np.array(u, dtype=object)
    assert u_np @ w == 1
    usq = int(u_np @ g_np @ u_np)
    assert usq % 2 == 0
    rho_tilde = tuple(int(x) - (usq // 2) * int(r) for x, r in zip(u, rho))
    rt_np = np.array(rho_tilde, dtype=object)
    assert rt_np @ g_np @ rt_np == 0
    assert rt_np @ g_np @ rho_np == 1
    kbasis = _kernel_basis([[int(x) for x in w],
                            [int(x) for x in rt_np @ g_np]], rank)
    assert len(kbasis) == rank - 2
    return rho_tilde, kbasis


def _complement_profile(k_gram, p):
    """Exact isometry invariant of a complement lattice: the number of
    +-pairs of vectors at each norm 2, 4, ..., 2p, plus how many of the
    norm 2p pairs lie in the p-scaled dual.  Isometric complements always
    have equal profiles, so a differing profile certifies that two cusps
    are in different orbits of the isometry group."""
    counts = [0] * p
    dual = 0
    kg = np.array(k_gram, dtype=object)
    for crd, nrm in _lattice_points(k_gram, 2 * p, canonical_half=True):
        if not any(crd):
            continue
        nrm = int(nrm)
        counts[nrm // 2 - 1] += 1
        if nrm == 2 * p:
            pair = kg @ np.array(crd, dtype=object)
            if not any(int(x) % p for x in pair):
                dual += 1
    return tuple(counts), dual


def _complement_is_sound(k_gram, p):
    """True when the complement lattice has no vector of norm 2 and no
    norm 2p vector inside its p-scaled dual (either would put real roots
    in the degree-zero slice of the grading)."""
    counts, dual = _complement_profile(k_gram, p)
    return counts[0] == 0 and dual == 0


@functools.lru_cache(maxsize=None)
def build_hyp_lattice(p: int) -> HypLattice:
    """Build the rescaled hyperbolic extension for p and split off a cusp
    whose grading is sound (no real roots in the degree-zero slice).

    Checks performed exactly: the Gram matrix is integral, even and
    symmetric with determinant -p^m; the rescaled dual is a sublattice;
    rho and rhoTilde are null with (rho, rhoTilde) = 1 and rho has unit
    pairing content; the split basis is unimodular; K is even positive
    definite of determinant p^m with minimal norm at least 4.  Cusps are
    tried in a deterministic (norm, coordinates) order and the first with
    a sound complement is kept, so the construction is reproducible."""
    if p not in (2, 3, 5, 7):
        raise BadParameters(f"unsupported p = {p}")
    m = 24 // (p + 1)
    glued = build_lattice(p)
    gn_frac = _mat_inv_frac(glued.gram)
    gn = []
    for row in gn_frac:
        out = []
        for x in row:
            v = p * Fraction(x)
            assert v.denominator == 1, "rescaled dual block must be integral"
            out.append(int(v))
        gn.append(out)
    nn = glued.rank
    rank = nn + 2
    gram = [[0] * rank for _ in range(rank)]
    for i in range(nn):
        for j in range(nn):
            gram[i][j] = gn[i][j]
    gram[nn][nn + 1] = gram[nn + 1][nn] = p
    for i in range(rank):
        assert gram[i][i] % 2 == 0, "lattice must be even"
        for j in range(rank):
            assert gram[i][j] == gram[j][i]
    det = _int_det(gram)
    assert det == -p**m, f"determinant {det} != -{p}^{m}"
    assert rank == 2 * m + 2
    for row in _mat_inv_frac(gram):
        for x in row:
            assert (p * Fraction(x)).denominator == 1, \
                "p times the dual lattice must lie inside the lattice"

    g_np = np.array(gram, dtype=object)
    chosen = None
    for norm, acoords in _cusp_candidates(gn, p, 6):
        rho = tuple(int(c) for c in acoords) + (norm // (2 * p), -1)
        rho_tilde, kbasis = _split_for_rho(gram, rho, rank)
        kb_np = np.array(kbasis, dtype=object)
        raw_kg = kb_np @ g_np @ kb_np.T
        _, v = _reduce_gram([[int(x) for x in row] for row in raw_kg])
        assert abs(_int_det(v)) == 1
        v_np = np.array(v, dtype=object)
        kbasis = [tuple(int(x) for x in row) for row in v_np @ kb_np]
        split = [rho_tilde, rho] + kbasis
        assert abs(_int_det(split)) == 1, "cusp split must be unimodular"
        t_np = np.array(split, dtype=object)
        s_np = t_np @ g_np @ t_np.T
        expect_hyp = [[0, 1], [1, 0]]
        for i in range(2):
            for j in range(2):
                assert s_np[i][j] == expect_hyp[i][j]
            for j in range(2, rank):
                assert s_np[i][j] == 0 and s_np[j][i] == 0
        k_gram = [[int(s_np[i][j]) for j in range(2, rank)]
                  for i in range(2, rank)]
        if _complement_is_sound(k_gram, p):
            chosen = (rho, rho_tilde, split, k_gram)
            break
    if chosen is None:
        raise InsufficientOrder(
            "no cusp with a sound grading in the search window")
    rho, rho_tilde, split, k_gram = chosen
    k_det = _int_det(k_gram)
    assert k_det == p**m, f"complement determinant {k_det} != {p}^{m}"
    for i in range(rank - 2):
        assert k_gram[i][i] % 2 == 0
        assert _int_det([row[:i + 1] for row in k_gram[:i + 1]]) > 0, \
            "complement must be positive definite"
    k_min = 0
    bound = 2 * p
    while not k_min:
        nonzero = [int(nrm) for crd, nrm in
                   _lattice_points(k_gram, bound, canonical_half=True)
                   if any(crd)]
        if nonzero:
            k_min = min(nonzero)
        bound += 2
    return HypLattice(
        p=p, m=m, rank=rank,
        gram=tuple(tuple(row) for row in gram), det=det,
        rho=tuple(int(x) for x in rho), rho_tilde=tuple(rho_tilde),
        split=tuple(tuple(int(x) for x in row) for row in split),
        k_gram=tuple(tuple(row) for row in k_gram),
        k_det=k_det, k_min=k_min)


def _ext_gcd(a, b):
    """(g, s, t) with s*a + t*b = g = gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qq = old_r // r
        old_r, r = r, old_r - qq * r
        old_s, s = s, old_s - qq * s
        old_t, t = t, old_t - qq * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _check_grading(hl: HypLattice) -> None:
    """Certify that the only degree-zero positive roots are the multiples of
    the cusp vector.  A norm 2 vector of K, or a norm 2p vector of K whose
    K-pairings all vanish mod p, would give an infinite slice of real roots
    at degree zero (translates by the cusp vector), poisoning truncation."""
    p = hl.p
    if hl.k_min < 4:
        raise BadGrading(
            f"complement lattice has minimal norm {hl.k_min} < 4")
    kg = np.array(hl.k_gram, dtype=np.int64)
    for crd, nrm in _lattice_points(hl.k_gram, 2 * p, canonical_half=True):
        if int(nrm) == 2 * p and any(crd):
            pair = kg @ np.array(crd, dtype=np.int64)
            if not (pair % p).any():
                raise BadGrading(
                    "complement lattice has a norm 2p vector inside its "
                    "p-scaled dual: degree-zero slice would be infinite")


# ---------------------------------------------------------------------------
# bigrade bookkeeping in split coordinates
# ---------------------------------------------------------------------------


def _split_to_model(hl: HypLattice, key):
    t = hl.split
    n = hl.rank
    return tuple(sum(key[i] * t[i][j] for i in range(n) if key[i])
                 for j in range(n))


def _grade(key):
    """(a, b) of a split-coordinate vector."""
    return -key[0], key[1]


def _f_coeff_table(f: QSeries):
    table = {}
    for e, c in f.items():
        assert e.denominator == 1 and c.denominator == 1
        table[int(e)] = int(c)
    return table


def root_mult(hl: HypLattice, f: QSeries, alpha) -> int:
    """Multiplicity of the vector alpha (model coordinates): the coefficient
    [f](-alpha^2/2), plus [f](-alpha^2/(2p)) when every pairing of alpha
    with the lattice is divisible by p.  Zero for norms too large for a
    root; OrderExceeded if f was not expanded far enough for the requested
    (necessarily non-positive-norm) vector."""
    a_np = np.array([int(x) for x in alpha], dtype=object)
    assert a_np.any(), "root multiplicity of the zero vector is undefined"
    g_np = np.array(hl.gram, dtype=object)
    pair = a_np @ g_np
    norm = int(pair @ a_np)
    assert norm % 2 == 0
    mult = int(coeff(f, Fraction(-norm, 2)))
    if not any(int(x) % hl.p for x in pair):
        e2, rem = divmod(-norm, 2 * hl.p)
        assert rem == 0, "rescaled-dual vectors have norms divisible by 2p"
        mult += int(coeff(f, e2))
    return mult


# ---------------------------------------------------------------------------
# simple roots
# ---------------------------------------------------------------------------


def simple_roots_up_to(hl: HypLattice, f: QSeries,
                       degree_bound: int) -> tuple:
    """All simple roots of auxiliary degree b(alpha) <= degree_bound.

    Real simples are the norm 2 vectors with (rho, alpha) = -1, i.e.
    -rhoTilde + ((k^2-2)/2) rho + k for k in K, and the norm 2p vectors of
    the rescaled dual with (rho, alpha) = -p; both families are finite per
    degree.  Imaginary simples are n*rho (1 <= n <= degree_bound) with
    multiplicity m, doubled when p | n.  Raises BadGrading when the cusp
    grading is unsound."""
    _check_grading(hl)
    if degree_bound < 1:
        raise BadParameters("degree bound must be at least 1")
    p, m = hl.p, hl.m
    nk = hl.rank - 2
    found = []
    for n_ in range(1, degree_bound + 1):
        key = (0, n_) + (0,) * nk
        mult = m * (2 if n_ % p == 0 else 1)
        found.append((n_, key, 0, n_ % p == 0, mult))
    for crd, nrm in _lattice_points(hl.k_gram, 2 * degree_bound + 2):
        nrm = int(nrm)
        b = (nrm - 2) // 2
        if b > degree_bound:
            continue
        key = (-1, b) + tuple(int(c) for c in crd)
        found.append((b, key, 2, False, 1))
    kg = np.array(hl.k_gram, dtype=np.int64)
    for crd, nrm in _lattice_points(hl.k_gram, 2 * p * (degree_bound + 1)):
        nrm = int(nrm)
        if (nrm - 2 * p) % (2 * p):
            continue
        b = (nrm - 2 * p) // (2 * p)
        if b > degree_bound or b % p:
            continue
        pair = kg @ np.array(crd, dtype=np.int64)
        if (pair % p).any():
            continue
        key = (-p, b) + tuple(int(c) for c in crd)
        found.append((b, key, 2 * p, True, 1))
    out = []
    for b, key, norm, dual, mult in sorted(found):
        alpha = _split_to_model(hl, key)
        assert root_mult(hl, f, alpha) == mult
        out.append(RootDatum(alpha=alpha, norm=norm,
                             rescaled_dual=dual, mult=mult))
    return tuple(out)


# ---------------------------------------------------------------------------
# Weyl group breadth-first search
# ---------------------------------------------------------------------------


def _split_gram(hl: HypLattice):
    n = hl.rank
    s = [[0] * n for _ in range(n)]
    s[0][1] = s[1][0] = 1
    for i in range(n - 2):
        for j in range(n - 2):
            s[i + 2][j + 2] = hl.k_gram[i][j]
    return np.array(s, dtype=np.int64)


def _reflection_generators(hl: HypLattice, gen_degree: int, a_window: int):
    """Reflection matrices (split coordinates, acting on row vectors from
    the right) in the norm 2 simple roots of degree <= gen_degree, plus the
    norm 2p simples when their level p fits inside the exploration window."""
    s = _split_gram(hl)
    p = hl.p
    n = hl.rank
    gens = []
    for crd, nrm in _lattice_points(hl.k_gram, 2 * gen_degree + 2):
        nrm = int(nrm)
        alpha = np.zeros(n, dtype=np.int64)
        alpha[0] = -1
        alpha[1] = (nrm - 2) // 2
        alpha[2:] = crd
        gens.append(np.eye(n, dtype=np.int64) - np.outer(s @ alpha, alpha))
    if p <= a_window:
        kg = np.array(hl.k_gram, dtype=np.int64)
        for crd, nrm in _lattice_points(hl.k_gram,
                                        2 * p * (gen_degree + 1)):
            nrm = int(nrm)
            if (nrm - 2 * p) % (2 * p):
                continue
            b = (nrm - 2 * p) // (2 * p)
            if b % p:
                continue
            pair = kg @ np.array(crd, dtype=np.int64)
            if (pair % p).any():
                continue
            alpha = np.zeros(n, dtype=np.int64)
            alpha[0] = -p
            alpha[1] = b
            alpha[2:] = crd
            outer = np.outer(s @ alpha, alpha)
            assert not (outer % p).any()
            gens.append(np.eye(n, dtype=np.int64) - outer // p)
    return gens


def weyl_bfs(hl: HypLattice, degree_bound: int, b_bound=None, *,
             gen_degree=None, margin: int = 0, cap: int = 200000) -> tuple:
    """Breadth-first closure of the cusp vector's orbit under the
    reflection generators, restricted to images with
    0 <= a <= degree_bound + margin and 0 <= b <= b_bound + margin.

    Once the grading is sound no reflection fixes the cusp vector, and the
    stabilizer of a boundary point of the positive cone in a reflection
    group is generated by the reflections fixing it, so the stabilizer is
    trivial and group elements are in bijection with their images; the
    search therefore walks images (cheap matrix-vector sweeps) and
    reconstructs each element's isometry matrix along its accepting edge.
    An image reached by words of both parities raises ParityConflict, and
    exceeding cap raises InsufficientOrder."""
    _check_grading(hl)
    a_win = degree_bound + margin
    b_win = (degree_bound if b_bound is None else b_bound) + margin
    if gen_degree is None:
        gen_degree = b_win
    gens = _reflection_generators(hl, gen_degree, a_win)
    if not gens:
        raise InsufficientOrder("no reflection generators in range")
    n = hl.rank
    ngen = len(gens)
    gens_flat = np.hstack(gens)
    gens_obj = [m.astype(object) for m in gens]
    rho_key = (0, 1) + (0,) * (n - 2)
    ident = np.eye(n, dtype=object)
    info = {rho_key: (ident, 0)}
    frontier = [rho_key]
    word = 0
    chunk = max(1, 20_000_000 // (ngen * n))
    while frontier:
        word += 1
        imgs = np.array(frontier, dtype=np.int64)
        mats = [info[k][0] for k in frontier]
        nxt = []
        for lo in range(0, len(frontier), chunk):
            block = imgs[lo:lo + chunk]
            children = (block @ gens_flat).reshape(len(block), ngen, n)
            assert int(np.abs(children).max()) < 1 << 40
            a_vals = -children[:, :, 0]
            b_vals = children[:, :, 1]
            ok = ((a_vals >= 0) & (a_vals <= a_win)
                  & (b_vals >= 0) & (b_vals <= b_win))
            for fi, gi in np.argwhere(ok):
                key = tuple(int(x) for x in children[fi, gi])
                prev = info.get(key)
                if prev is not None:
                    if (prev[1] ^ word) & 1:
                        raise ParityConflict(
                            f"image {key} reached by words of both parities")
                    continue
                info[key] = (mats[lo + fi] @ gens_obj[gi], word)
                nxt.append(key)
                if len(info) > cap:
                    raise InsufficientOrder(
                        f"breadth-first closure exceeded {cap} elements")
        frontier = nxt
    out = []
    for image, (mat, wlen) in info.items():
        out.append(WeylElement(
            matrix=tuple(tuple(int(x) for x in row) for row in mat),
            image=image, det=-1 if wlen % 2 else 1, word_length=wlen))
    out.sort(key=lambda el: (el.word_length, el.image))
    return tuple(out)


def null_orbit_window(hl: HypLattice, a_bound: int, b_bound: int) -> tuple:
    """Independent enumeration of every candidate image of the cusp vector
    in the window: primitive null vectors of unit pairing content in the
    closed forward cone with 0 <= a <= a_bound, 0 <= b <= b_bound (split
    coordinates; a = 0 forces the cusp vector itself)."""
    n = hl.rank
    kg = np.array(hl.k_gram, dtype=np.int64)
    by_norm = {}
    for crd, nrm in _lattice_points(hl.k_gram, 2 * a_bound * b_bound):
        key = tuple(int(c) for c in crd)
        pair = kg @ np.array(key, dtype=np.int64) if any(key) else \
            np.zeros(n - 2, dtype=np.int64)
        by_norm.setdefault(int(nrm), []).append((key, _content(pair)))
    found = [(0, 1) + (0,) * (n - 2)]
    for a in range(1, a_bound + 1):
        for b in range(0, b_bound + 1):
            for key, kcontent in by_norm.get(2 * a * b, ()):
                if math.gcd(math.gcd(a, b), kcontent) != 1:
                    continue
                found.append((-a, b) + key)
    return tuple(sorted(found))


def null_vector_profile(hl: HypLattice, u_split) -> tuple:
    """Complement profile of a primitive unit-content null vector given in
    split coordinates.  Only candidates whose profile matches the cusp's
    own can lie in the reflection orbit of the cusp, so the completeness
    check skips candidates with a different profile."""
    u_model = _split_to_model(hl, tuple(int(x) for x in u_split))
    _, kbasis = _split_for_rho(hl.gram, u_model, hl.rank)
    kb_np = np.array(kbasis, dtype=object)
    g_np = np.array(hl.gram, dtype=object)
    raw = kb_np @ g_np @ kb_np.T
    red, v = _reduce_gram([[int(x) for x in row] for row in raw])
    assert abs(_int_det(v)) == 1
    return _complement_profile(red, hl.p)


def _norm2_orthogonal_mask(hl: HypLattice, cands):
    """For each candidate null vector (split coordinates), detect a norm 2
    vector of the full lattice orthogonal to it whose hyperbolic part
    (c, d) has cd in {-1, -2}.  Such a vector projects to a norm 2 vector
    of the candidate's complement, certifying that the complement class
    has minimum 2 and the candidate lies outside the cusp's reflection
    orbit.  This is a fast sufficient test; candidates it misses fall
    through to the exact profile comparison."""
    out = np.zeros(len(cands), dtype=bool)
    if not cands:
        return out
    kg = np.array(hl.k_gram, dtype=np.int64)
    vec4, vec6 = [], []
    for crd, nrm in _lattice_points(hl.k_gram, 6):
        if int(nrm) == 4:
            vec4.append(crd)
        elif int(nrm) == 6:
            vec6.append(crd)
    p4 = np.array(vec4, dtype=np.int64) @ kg if vec4 else None
    p6 = np.array(vec6, dtype=np.int64) @ kg if vec6 else None
    chunk = 2000
    for lo in range(0, len(cands), chunk):
        sub = cands[lo:lo + chunk]
        ku = np.array([c[2:] for c in sub], dtype=np.int64).T
        a = -np.array([c[0] for c in sub], dtype=np.int64)
        b = np.array([c[1] for c in sub], dtype=np.int64)
        hit = np.zeros(len(sub), dtype=bool)
        if p4 is not None:
            s4 = p4 @ ku
            hit |= (s4 == (a + b)[None, :]).any(axis=0)
        if p6 is not None:
            s6 = p6 @ ku
            hit |= (s6 == (2 * a + b)[None, :]).any(axis=0)
            hit |= (s6 == (a + 2 * b)[None, :]).any(axis=0)
        out[lo:lo + len(sub)] = hit
    return out


# ---------------------------------------------------------------------------
# denominator identity
# ---------------------------------------------------------------------------

DEFAULT_DENOMINATOR_BOUNDS = {2: (2, 1), 3: (2, 2), 5: (3, 3), 7: (4, 4)}


def _enumerate_roots(hl: HypLattice, fc: dict, a_max: int, bmax) -> list:
    """Positive roots with 1 <= a <= a_max and b <= bmax(a), as
    (split key, mult) pairs; mults combine the plain channel with the
    rescaled-dual channel exactly as in root_mult."""
    p = hl.p
    nkc = hl.rank - 2
    kg = np.array(hl.k_gram, dtype=np.int64)
    roots = []
    for a in range(1, a_max + 1):
        top = bmax(a)
        plain_bound = 2 + 2 * a * top
        mults = {}
        if plain_bound >= 0:
            for crd, nrm in _lattice_points(hl.k_gram, plain_bound):
                nrm = int(nrm)
                half = nrm // 2
                # smallest b with a*b - nrm/2 >= -1, i.e. b >= (nrm-2)/(2a)
                lo = -((2 - nrm) // (2 * a))
                for b in range(lo, top + 1):
                    mult = fc.get(a * b - half, 0)
                    if mult:
                        mults[(b, crd)] = mult
        if a % p == 0:
            dual_bound = 2 * p + 2 * a * top
            if dual_bound >= 0:
                for crd, nrm in _lattice_points(hl.k_gram, dual_bound):
                    nrm = int(nrm)
                    if any(crd):
                        pair = kg @ np.array(crd, dtype=np.int64)
                        if (pair % p).any():
                            continue
                    half = nrm // 2
                    lo = -((2 * p - nrm) // (2 * a))
                    start = lo + (-lo) % p if lo % p else lo
                    for b in range(start, top + 1, p):
                        idx, rem = divmod(a * b - half, p)
                        assert rem == 0
                        extra = fc.get(idx, 0)
                        if extra:
                            mults[(b, crd)] = mults.get((b, crd), 0) + extra
        for (b, crd), mult in sorted(mults.items()):
            key = (-a, b) + tuple(int(c) for c in crd)
            roots.append((key, mult))
    return roots


def _expand_product(roots, rho_mults, a_max: int, bmax, nkeys: int) -> dict:
    """Exact expansion of prod (1 - e^alpha)^mult over the wedge
    a <= a_max, b <= bmax(a).  Roots are processed by descending degree so
    each factor only sweeps parts that can still absorb it; the factors in
    the cusp direction (a = 0) are applied last from a snapshot."""
    parts = [dict() for _ in range(a_max + 1)]
    parts[0][(0,) * nkeys] = 1
    by_slab = {}
    for key, mult in roots:
        by_slab.setdefault(-key[0], []).append((key, mult))
    for a_r in sorted(by_slab, reverse=True):
        for key, mult in by_slab[a_r]:
            b_r = key[1]
            imax = a_max // a_r
            terms = [(i, (-1) ** i * math.comb(mult, i))
                     for i in range(1, min(imax, mult) + 1)]
            if not terms:
                continue
            for a_src in range(a_max - a_r, -1, -1):
                src = parts[a_src]
                if not src:
                    continue
                for i, coef in terms:
                    a_t = a_src + i * a_r
                    if a_t > a_max:
                        break
                    tgt = parts[a_t]
                    cap = bmax(a_t)
                    shift = tuple(i * x for x in key)
                    for k, c in src.items():
                        if k[1] + shift[1] > cap:
                            continue
                        nk = tuple(x + y for x, y in zip(k, shift))
                        tgt[nk] = tgt.get(nk, 0) + coef * c
    for n_, mult in sorted(rho_mults.items()):
        imax = max(bmax(a) for a in range(a_max + 1)) // n_
        terms = [(i, (-1) ** i * math.comb(mult, i))
                 for i in range(1, min(imax, mult) + 1)]
        if not terms:
            continue
        for a_src in range(a_max + 1):
            src = parts[a_src]
            cap = bmax(a_src)
            for k, c in list(src.items()):
                for i, coef in terms:
                    bt = k[1] + i * n_
                    if bt > cap:
                        break
                    nk = k[:1] + (bt,) + k[2:]
                    src[nk] = src.get(nk, 0) + coef * c
    merged = {}
    for part in parts:
        for k, c in part.items():
            if c:
                merged[k] = c
    return merged


def _rho_direction_series(p: int, m: int, order: int) -> list:
    """Coefficients of prod_{n>=1} (1-t^n)^m (1-t^{pn})^m up to t^order."""
    acc = [0] * (order + 1)
    acc[0] = 1
    for n_ in range(1, order + 1):
        for step in (n_, p * n_):
            if step > order:
                continue
            for _ in range(m):
                for e in range(order, step - 1, -1):
                    acc[e] -= acc[e - step]
    return acc


def _resolve_bounds(p: int, degree_bound):
    if degree_bound is None:
        return DEFAULT_DENOMINATOR_BOUNDS[p]
    if isinstance(degree_bound, int):
        if degree_bound < 1:
            raise BadParameters("degree bound must be at least 1")
        return degree_bound, degree_bound
    a, b = degree_bound
    if a < 1 or b < 1:
        raise BadParameters("degree bounds must be at least 1")
    return int(a), int(b)


def denominator_check(p: int, degree_bound=None, *,
                      audit: bool = False) -> CheckReport:
    """Exact comparison of both sides of the denominator identity on every
    lattice point of the window a <= A, b <= B (bigrades with respect to
    the recorded cusp pair).

    The product side runs over the positive roots inside the closed wedge
    a <= A, b <= B - 1 + (A - a); since every positive root satisfies
    b >= -min(a, 1), monomials discarded at the wedge boundary can never
    re-enter the comparison window, so the truncation is exact.  The sum
    side closes the reflection group breadth-first and certifies window
    completeness against the independent null-vector enumeration; a missed
    candidate raises InsufficientOrder."""
    watch = Stopwatch()
    a_max, b_max = _resolve_bounds(p, degree_bound)
    hl = build_hyp_lattice(p)
    _check_grading(hl)
    m = hl.m
    nkeys = hl.rank

    def bmax(a):
        return a_max + b_max - 1 - a

    top_idx = max(a * bmax(a) for a in range(0, a_max + 1))
    f = eta_quotient(p, m, top_idx + 2)
    fc = _f_coeff_table(f)

    roots = _enumerate_roots(hl, fc, a_max, bmax)
    rho_mults = {n_: m * (2 if n_ % p == 0 else 1)
                 for n_ in range(1, bmax(0) + 1)}
    product = _expand_product(roots, rho_mults, a_max, bmax, nkeys)

    # left side: e^rho * product; shift the cusp coordinate by one
    lhs = {}
    for k, c in product.items():
        lhs[k[:1] + (k[1] + 1,) + k[2:]] = c

    elements = weyl_bfs(hl, a_max, b_max)
    images = {el.image for el in elements}
    in_window = {im for im in images
                 if -im[0] <= a_max and im[1] <= b_max}
    candidates = null_orbit_window(hl, a_max, b_max)
    assert in_window <= set(candidates), \
        "reflection images must be unit-content null vectors"
    ref_profile = _complement_profile(hl.k_gram, p)
    missing = [c for c in candidates if c not in images]
    caught = _norm2_orthogonal_mask(hl, missing)
    foreign = int(caught.sum())
    missed = []
    for c, is_caught in zip(missing, caught):
        if is_caught:
            continue
        if null_vector_profile(hl, c) == ref_profile:
            missed.append(c)
        else:
            foreign += 1
    if missed:
        raise InsufficientOrder(
            f"{len(missed)} candidate null images not reached by the "
            f"reflection search, first {missed[0]}")

    cj = _rho_direction_series(p, m, max(a_max, b_max))
    rhs = {}
    for el in elements:
        a_im, b_im = _grade(el.image)
        j = 0
        while True:
            scale = j + 1
            if scale * a_im > a_max or scale * b_im > b_max or j >= len(cj):
                break
            c = cj[j]
            if c:
                point = tuple(scale * x for x in el.image)
                rhs[point] = rhs.get(point, 0) + el.det * c
            j += 1

    keys = set(rhs)
    for k in lhs:
        a_k, b_k = _grade(k)
        if 0 <= a_k <= a_max and b_k <= b_max:
            keys.add(k)
    witnesses = []
    audit_rows = []
    compared = 0
    for k in sorted(keys):
        left = lhs.get(k, 0)
        right = rhs.get(k, 0)
        compared += 1
        if audit and (left or right):
            audit_rows.append((_split_to_model(hl, k), left, right))
        if left != right:
            if len(witnesses) < 50:
                a_k, b_k = _grade(k)
                witnesses.append({
                    "kind": "coefficientMismatch",
                    "point": list(_split_to_model(hl, k)),
                    "bigrade": [a_k, b_k],
                    "lhs": left, "rhs": right,
                })
    params = {
        "p": p,
        "degreeBoundA": a_max,
        "degreeBoundB": b_max,
        "grading": "cusp pair: degree a = -(rho, .), auxiliary b = "
                   "(rhoTilde, .); window a <= A, b <= B",
        "rho": list(hl.rho),
        "rhoTilde": list(hl.rho_tilde),
        "complementDet": hl.k_det,
        "complementMin": hl.k_min,
        "fOrder": top_idx + 2,
        "rootsInWedge": len(roots),
        "weylElements": len(elements),
        "nullCandidates": len(candidates),
        "foreignCusps": foreign,
        "pointsCompared": compared,
    }
    if audit:
        params["expansions"] = [
            [list(pt), left, right] for pt, left, right in audit_rows]
    return finish(f"denominator p={p}", params, witnesses, watch)
