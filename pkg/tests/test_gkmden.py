"""Tests for the hyperbolic extension, its reflection group, and the
truncated denominator-identity verifier.

Oracles
-------
* The root-multiplicity source series is recomputed here by plain
  geometric-series convolution (in-place prefix sums for each factor
  (1-q^k)^{-1}), sharing no code with the production eta quotient; the
  frozen coefficient tables below were produced by this oracle and
  cross-checked against the production series.
* The sound complements are even p-modular lattices of minimum 4 with
  classical theta series; the frozen norm-4/norm-6 vector counts
  4320/61440 (rank 16), 756/4032 (rank 12), 120/240 (rank 8), 42/56
  (rank 6) are textbook values, checked against direct enumeration.
* Null-vector windows are re-enumerated in this file by a bare double loop
  over bigrades with a k^2 = 2ab shell lookup per cell, independent of the
  production bucketing, and the reflection orbit is reconciled against
  them cell by cell (the derived completeness oracle).
* The cusp-direction rows of the identity are compared against polynomial
  coefficients of prod (1-t^n)^m (1-t^{pn})^m multiplied out directly with
  list arithmetic.
* Orbit/element counts, word-length histograms, and report parameters were
  frozen from enumeration runs after the oracles above validated the
  multiplicities.
"""

import dataclasses
import math
import random
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from artifact.gkmden import (
    DEFAULT_DENOMINATOR_BOUNDS,
    BadGrading,
    InsufficientOrder,
    RootDatum,
    WeylElement,
    _complement_profile,
    _grade,
    _int_det,
    _kernel_basis,
    _norm2_orthogonal_mask,
    _reduce_gram,
    _rho_direction_series,
    _split_to_model,
    build_hyp_lattice,
    denominator_check,
    null_orbit_window,
    null_vector_profile,
    root_mult,
    simple_roots_up_to,
    weyl_bfs,
)
from artifact.glulat import _lattice_points, _mat_inv_frac
from artifact.qexact import BadParameters, OrderExceeded, coeff, eta_quotient

M_FOR_P = {2: 8, 3: 6, 5: 4, 7: 3}


# ---------------------------------------------------------------------------
# oracles (written before the frozen values below were read off)
# ---------------------------------------------------------------------------


def oracle_mult_table(p, order):
    """e -> [f](e) for f = q^{-1} prod (1-q^n)^{-m} (1-q^{pn})^{-m}, by
    repeated geometric-series prefix sums; exponents -1 <= e < order."""
    m = M_FOR_P[p]
    n = order + 1
    acc = [0] * n
    acc[0] = 1
    for k in range(1, n):
        for step in (k, p * k):
            if step >= n:
                continue
            for _ in range(m):
                for e in range(step, n):
                    acc[e] += acc[e - step]
    return {e - 1: acc[e] for e in range(n)}


def oracle_eta_power_poly(p, m, order):
    """Coefficients of prod (1-t^n)^m (1-t^{pn})^m by direct list
    multiplication, one binomial factor at a time."""
    out = [1]
    for n in range(1, order + 1):
        for step in (n, p * n):
            if step > order:
                continue
            for _ in range(m):
                nxt = [0] * min(order + 1, len(out) + step)
                for e, c in enumerate(out):
                    if c:
                        nxt[e] += c
                        if e + step <= order and e + step < len(nxt):
                            nxt[e + step] -= c
                out = nxt
    return out[:order + 1]


def det_frac(rows):
    """Determinant by Fraction Gaussian elimination (independent of the
    production Bareiss routine)."""
    mat = [[Fraction(x) for x in row] for row in rows]
    n = len(mat)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if mat[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            mat[col], mat[piv] = mat[piv], mat[col]
            det = -det
        det *= mat[col][col]
        inv = 1 / mat[col][col]
        for r in range(col + 1, n):
            if mat[r][col]:
                factor = mat[r][col] * inv
                for c in range(col, n):
                    mat[r][c] -= factor * mat[col][c]
    return det


def solve_exact(rows, target):
    """x with x . rows = target over the rationals, or None."""
    mat = [[Fraction(rows[r][c]) for r in range(len(rows))]
           for c in range(len(rows[0]))]
    rhs = [Fraction(t) for t in target]
    ncols = len(rows)
    pivots = []
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, len(mat)) if mat[r][col]), None)
        if piv is None:
            continue
        mat[row], mat[piv] = mat[piv], mat[row]
        rhs[row], rhs[piv] = rhs[piv], rhs[row]
        inv = 1 / mat[row][col]
        mat[row] = [x * inv for x in mat[row]]
        rhs[row] *= inv
        for r in range(len(mat)):
            if r != row and mat[r][col]:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[row])]
                rhs[r] -= f * rhs[row]
        pivots.append(col)
        row += 1
    for r in range(row, len(mat)):
        if rhs[r]:
            return None
    x = [Fraction(0)] * ncols
    for r, col in enumerate(pivots):
        x[col] = rhs[r]
    return x


def split_gram_obj(hl):
    n = hl.rank
    s = [[0] * n for _ in range(n)]
    s[0][1] = s[1][0] = 1
    for i in range(n - 2):
        for j in range(n - 2):
            s[i + 2][j + 2] = hl.k_gram[i][j]
    return np.array(s, dtype=object)


def split_content(hl, key):
    """Pairing content of a split-coordinate vector with the lattice."""
    pair = np.array(key, dtype=object) @ split_gram_obj(hl)
    return math.gcd(*(int(x) for x in pair))


# ---------------------------------------------------------------------------
# frozen values
# ---------------------------------------------------------------------------

FROZEN_F = {
    2: [1, 8, 52, 256, 1122, 4352, 15640, 52224],
    3: [1, 6, 27, 104, 351, 1080, 3107, 8424],
    5: [1, 4, 14, 40, 105, 256, 590, 1296],
    7: [1, 3, 9, 22, 51, 108, 221, 432],
}

FROZEN_CJ = {
    2: [1, -8, 12, 64, -210, -96, 1016, -512, -2043],
    3: [1, -6, 9, 4, 6, -54, -40, 168, 81],
    5: [1, -4, 2, 8, -5, -8, 6, 0, -23],
    7: [1, -3, 0, 5, 0, 0, -7, -3, 9],
}

FROZEN_BUILD = {
    2: dict(rank=18, k_det=2 ** 8,
            rho=(0, 0, 0, 0, 0, 0, 0, 1, -2, -1, -1, -1, -1, -1, -1, 1,
                 2, -1)),
    3: dict(rank=14, k_det=3 ** 6,
            rho=(0, 1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 0, 2, -1)),
    5: dict(rank=10, k_det=5 ** 4,
            rho=(0, 1, -1, -2, -2, -3, -3, -2, 2, -1)),
    7: dict(rank=8, k_det=7 ** 3,
            rho=(0, 1, -2, -4, -5, -3, 2, -1)),
}

FROZEN_SHELLS = {2: (4320, 61440), 3: (756, 4032), 5: (120, 240),
                 7: (42, 56)}

FROZEN_SIMPLE_COUNTS = {
    # (p, degree bound) -> total, {(norm, rescaled_dual, mult): count}
    (7, 2): (101, {(2, False, 1): 99, (0, False, 3): 2}),
    (5, 2): (363, {(2, False, 1): 361, (0, False, 4): 2}),
    (3, 1): (758, {(2, False, 1): 757, (0, False, 6): 1}),
    (2, 1): (4322, {(2, False, 1): 4321, (0, False, 8): 1}),
}

FROZEN_ORBIT = {
    # p -> elements, word-length histogram, candidates, foreign (window 2,2)
    7: (86, {0: 1, 1: 43, 2: 42}, 170, 84),
    5: (242, {0: 1, 1: 121, 2: 120}, 842, 600),
}

DUAL_ROOT_K7 = (0, 0, 2, -5, 3, 0)  # norm 112 vector of 7K' inside K


def rho_key(hl):
    return (0, 1) + (0,) * (hl.rank - 2)


# ---------------------------------------------------------------------------
# the multiplicity series
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_mult_series_matches_oracle_and_frozen_values(p):
    table = oracle_mult_table(p, 30)
    f = eta_quotient(p, M_FOR_P[p], 30)
    for e in range(-1, 30):
        assert int(coeff(f, Fraction(e))) == table[e]
    assert [table[e] for e in range(-1, 7)] == FROZEN_F[p]
    assert table[-1] == 1
    assert table[0] == M_FOR_P[p]


# ---------------------------------------------------------------------------
# lattice construction
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_build_frozen_fields(p):
    hl = build_hyp_lattice(p)
    m = M_FOR_P[p]
    exp = FROZEN_BUILD[p]
    assert hl.p == p and hl.m == m
    assert hl.rank == exp["rank"] == 2 * m + 2
    assert hl.det == -p ** m
    assert hl.rho == exp["rho"]
    assert hl.k_det == exp["k_det"] == p ** m
    assert hl.k_min == 4
    assert build_hyp_lattice(p) is hl  # memoized


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_build_bilinear_invariants(p):
    hl = build_hyp_lattice(p)
    g = np.array(hl.gram, dtype=object)
    n = hl.rank
    assert (g == g.T).all()
    assert all(int(g[i][i]) % 2 == 0 for i in range(n))
    assert det_frac(hl.gram) == hl.det

    rho = np.array(hl.rho, dtype=object)
    rt = np.array(hl.rho_tilde, dtype=object)
    assert rho @ g @ rho == 0
    assert rt @ g @ rt == 0
    assert rt @ g @ rho == 1
    assert math.gcd(*(int(x) for x in rho @ g)) == 1

    split = np.array(hl.split, dtype=object)
    assert abs(det_frac(hl.split)) == 1
    conj = split @ g @ split.T
    assert (conj == split_gram_obj(hl)).all()
    assert tuple(int(x) for x in split[1]) == hl.rho
    assert tuple(int(x) for x in split[0]) == hl.rho_tilde

    # the p-scaled dual sits inside the lattice: p * gram^{-1} is integral
    inv = _mat_inv_frac([list(row) for row in hl.gram])
    assert all((p * x).denominator == 1 for row in inv for x in row)

    # complement: positive definite, even, determinant p^m, minimum 4
    kd = det_frac(hl.k_gram)
    assert kd == hl.k_det
    nk = n - 2
    for lead in range(1, nk + 1):
        assert det_frac([row[:lead] for row in hl.k_gram[:lead]]) > 0
    assert all(int(hl.k_gram[i][i]) % 2 == 0 for i in range(nk))
    norms = sorted(int(nrm) for crd, nrm in _lattice_points(hl.k_gram, 4)
                   if any(crd))
    assert norms and norms[0] == 4


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_complement_shell_counts(p):
    hl = build_hyp_lattice(p)
    cnt = Counter(int(nrm) for crd, nrm in _lattice_points(hl.k_gram, 6)
                  if any(crd))
    assert (cnt[4], cnt[6]) == FROZEN_SHELLS[p]
    assert cnt[2] == 0


def test_build_rejects_bad_p():
    with pytest.raises(BadParameters):
        build_hyp_lattice(4)
    with pytest.raises(BadParameters):
        build_hyp_lattice(11)


# ---------------------------------------------------------------------------
# root multiplicities
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_root_mult_cusp_multiples(p):
    hl = build_hyp_lattice(p)
    m = M_FOR_P[p]
    f = eta_quotient(p, m, 4)
    for n in range(1, 2 * p + 1):
        alpha = tuple(n * x for x in hl.rho)
        expected = 2 * m if n % p == 0 else m
        assert root_mult(hl, f, alpha) == expected


def test_root_mult_norm2_and_dual_channel():
    hl = build_hyp_lattice(7)
    f = eta_quotient(7, 3, 6)
    kg = np.array(hl.k_gram, dtype=object)

    # a norm 2 real root: multiplicity [f](-1) = 1
    alpha = _split_to_model(hl, (-1, -1) + (0,) * 6)
    g = np.array(hl.gram, dtype=object)
    a = np.array(alpha, dtype=object)
    assert a @ g @ a == 2
    assert root_mult(hl, f, alpha) == 1

    # a norm 2p vector of the rescaled dual: the plain channel reads
    # [f](-p) = 0 and the dual channel reads [f](-1) = 1
    k = np.array(DUAL_ROOT_K7, dtype=object)
    assert k @ kg @ k == 112
    assert not any(int(x) % 7 for x in kg @ k)
    beta = _split_to_model(hl, (-7, 7) + DUAL_ROOT_K7)
    b = np.array(beta, dtype=object)
    assert b @ g @ b == 14
    gp = b @ g
    assert not any(int(x) % 7 for x in gp)
    assert root_mult(hl, f, beta) == 1


def test_root_mult_raises_beyond_series_order():
    hl = build_hyp_lattice(7)
    f = eta_quotient(7, 3, 2)
    deep = _split_to_model(hl, (-3, 3) + (0,) * 6)  # norm -18, needs [f](9)
    with pytest.raises(OrderExceeded):
        root_mult(hl, f, deep)


def test_root_mult_invariant_under_reflection_group():
    hl = build_hyp_lattice(7)
    f = eta_quotient(7, 3, 6)
    elements = weyl_bfs(hl, 2, 2)
    simples = simple_roots_up_to(hl, f, 2)
    rng = random.Random(20240817)
    s = split_gram_obj(hl)
    split_inv = None
    for _ in range(60):
        el = rng.choice(elements)
        datum = rng.choice(simples)
        mat = np.array(el.matrix, dtype=object)
        if split_inv is None:
            split_inv = np.array(
                [[Fraction(x) for x in row]
                 for row in _mat_inv_frac([list(r) for r in hl.split])],
                dtype=object)
        # model -> split coords -> act -> back to model
        key = np.array(datum.alpha, dtype=object) @ split_inv
        assert all(x.denominator == 1 for x in key)
        key = np.array([int(x) for x in key], dtype=object)
        image = key @ mat
        assert image @ s @ image == key @ s @ key
        moved = _split_to_model(hl, tuple(int(x) for x in image))
        assert root_mult(hl, f, moved) == datum.mult


# ---------------------------------------------------------------------------
# simple roots
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("p,bound", [(7, 2), (5, 2), (3, 1), (2, 1)])
def test_simple_root_frozen_counts(p, bound):
    hl = build_hyp_lattice(p)
    f = eta_quotient(p, M_FOR_P[p], 4)
    simples = simple_roots_up_to(hl, f, bound)
    total, kinds = FROZEN_SIMPLE_COUNTS[(p, bound)]
    assert len(simples) == total
    assert Counter((s.norm, s.rescaled_dual, s.mult)
                   for s in simples) == kinds


@pytest.mark.parametrize("p", [5, 7])
def test_simple_root_structure(p):
    hl = build_hyp_lattice(p)
    f = eta_quotient(p, M_FOR_P[p], 4)
    simples = simple_roots_up_to(hl, f, 2)
    g = np.array(hl.gram, dtype=object)
    rho = np.array(hl.rho, dtype=object)
    rt = np.array(hl.rho_tilde, dtype=object)
    degrees = []
    seen = set()
    for datum in simples:
        a = np.array(datum.alpha, dtype=object)
        norm = a @ g @ a
        assert int(norm) == datum.norm
        # defining property of a simple root w.r.t. the cusp vector
        assert rho @ g @ a == -Fraction(datum.norm, 2)
        if datum.norm:
            assert datum.mult == 1
        degrees.append(int(rt @ g @ a))
        pairings = a @ g
        is_dual = not any(int(x) % p for x in pairings)
        assert is_dual == (datum.rescaled_dual or datum.norm == 0 and
                           (int(rt @ g @ a)) % p == 0)
        seen.add(datum.alpha)
    assert len(seen) == len(simples)
    assert degrees == sorted(degrees)
    assert all(-1 <= d <= 2 for d in degrees)


def test_simple_roots_validates_degree():
    hl = build_hyp_lattice(7)
    f = eta_quotient(7, 3, 4)
    with pytest.raises(BadParameters):
        simple_roots_up_to(hl, f, 0)


# ---------------------------------------------------------------------------
# grading soundness
# ---------------------------------------------------------------------------


def test_bad_grading_detected():
    hl = build_hyp_lattice(7)
    f = eta_quotient(7, 3, 4)

    shallow = dataclasses.replace(hl, k_min=2)
    with pytest.raises(BadGrading):
        simple_roots_up_to(shallow, f, 1)
    with pytest.raises(BadGrading):
        weyl_bfs(shallow, 1)

    # min 4, but a norm 2p vector lies in the p-scaled dual of K
    diag = tuple(tuple(14 if i == j and i < 2 else (4 if i == j else 0)
                       for j in range(6)) for i in range(6))
    poisoned = dataclasses.replace(hl, k_gram=diag, k_min=4)
    with pytest.raises(BadGrading):
        simple_roots_up_to(poisoned, f, 1)


# ---------------------------------------------------------------------------
# reflection-group closure
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("p", [5, 7])
def test_weyl_bfs_frozen_counts(p):
    hl = build_hyp_lattice(p)
    elements = weyl_bfs(hl, 2, 2)
    count, hist, _, _ = FROZEN_ORBIT[p]
    assert len(elements) == count
    assert Counter(el.word_length for el in elements) == hist
    assert len({el.image for el in elements}) == count


def test_weyl_bfs_element_integrity():
    hl = build_hyp_lattice(7)
    elements = weyl_bfs(hl, 2, 2)
    s = split_gram_obj(hl)
    base = rho_key(hl)

    first = elements[0]
    assert first.word_length == 0
    assert first.image == base
    assert first.det == 1
    assert first.matrix == tuple(
        tuple(int(i == j) for j in range(hl.rank)) for i in range(hl.rank))

    rng = random.Random(7321)
    sample = rng.sample(elements, 12)
    for el in elements:
        mat = np.array(el.matrix, dtype=object)
        image = np.array(base, dtype=object) @ mat
        assert tuple(int(x) for x in image) == el.image
        assert image @ s @ image == 0
        assert split_content(hl, el.image) == 1
        assert el.det == (-1) ** el.word_length
        assert _int_det([list(r) for r in el.matrix]) == el.det
    for el in sample:
        mat = np.array(el.matrix, dtype=object)
        assert (mat @ s @ mat.T == s).all()
        assert det_frac(el.matrix) == el.det


def test_weyl_single_reflections_add_a_simple_root():
    hl = build_hyp_lattice(7)
    f = eta_quotient(7, 3, 6)
    elements = weyl_bfs(hl, 2, 2)
    s = split_gram_obj(hl)
    rho = np.array(rho_key(hl), dtype=object)
    # reflection in alpha sends the cusp vector to itself + alpha
    for el in elements:
        if el.word_length != 1:
            continue
        diff_key = tuple(i - b for i, b in zip(el.image, rho_key(hl)))
        diff = np.array(diff_key, dtype=object)
        assert diff @ s @ diff == 2
        assert rho @ s @ diff == -1
        alpha = _split_to_model(hl, diff_key)
        assert root_mult(hl, f, alpha) == 1
    assert sum(1 for el in elements if el.word_length == 1) == 43


def test_weyl_bfs_cap_raises():
    hl = build_hyp_lattice(7)
    with pytest.raises(InsufficientOrder):
        weyl_bfs(hl, 2, 2, cap=10)


# ---------------------------------------------------------------------------
# orbit completeness against independent null-vector enumeration
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("p", [5, 7])
def test_null_window_matches_direct_enumeration(p):
    hl = build_hyp_lattice(p)
    cands = null_orbit_window(hl, 2, 2)
    _, _, count, _ = FROZEN_ORBIT[p]
    assert len(cands) == count
    assert cands == tuple(sorted(cands))
    assert rho_key(hl) in cands

    # independent route: loop bigrade cells, pick the k^2 = 2ab shell
    direct = {rho_key(hl)}
    kg = np.array(hl.k_gram, dtype=object)
    for a in range(1, 3):
        for b in range(0, 3):
            for crd, nrm in _lattice_points(hl.k_gram, 2 * a * b):
                if int(nrm) != 2 * a * b:
                    continue
                kc = 0
                if any(crd):
                    kc = math.gcd(*(int(x) for x in
                                    kg @ np.array(crd, dtype=object)))
                if math.gcd(a, math.gcd(b, kc)) != 1:
                    continue
                direct.add((-a, b) + tuple(int(c) for c in crd))
    assert set(cands) == direct

    s = split_gram_obj(hl)
    for key in cands:
        vec = np.array(key, dtype=object)
        assert vec @ s @ vec == 0
        assert split_content(hl, key) == 1


@pytest.mark.parametrize("p", [5, 7])
def test_reflection_orbit_complete_modulo_foreign_cusps(p):
    hl = build_hyp_lattice(p)
    elements = weyl_bfs(hl, 2, 2)
    cands = null_orbit_window(hl, 2, 2)
    images = {el.image for el in elements}
    assert images <= set(cands)

    missing = [c for c in cands if c not in images]
    _, _, count, foreign = FROZEN_ORBIT[p]
    assert len(missing) == foreign == count - len(elements)

    # every unreached candidate is certified foreign by the fast
    # norm-2-orthogonality mask alone at this window size
    caught = _norm2_orthogonal_mask(hl, missing)
    assert bool(caught.all())

    # and the exact profile invariant agrees on a sample
    ref = _complement_profile(hl.k_gram, p)
    assert null_vector_profile(hl, rho_key(hl)) == ref
    rng = random.Random(p * 1009)
    for c in rng.sample(missing, 5):
        assert null_vector_profile(hl, c) != ref
    in_orbit = rng.sample(sorted(images), 3)
    for c in in_orbit:
        assert null_vector_profile(hl, c) == ref


def test_complement_profile_is_basis_invariant():
    hl = build_hyp_lattice(7)
    base = _complement_profile(hl.k_gram, 7)
    assert base == ((0, 21, 28, 42, 84, 140, 168), 0)
    rng = random.Random(424242)
    g = np.array(hl.k_gram, dtype=object)
    n = len(hl.k_gram)
    u = np.eye(n, dtype=object)
    for _ in range(25):
        i, j = rng.sample(range(n), 2)
        u[i] += rng.choice([-2, -1, 1, 2]) * u[j]
    assert abs(det_frac([[int(x) for x in row] for row in u])) == 1
    twisted = [[int(x) for x in row] for row in u @ g @ u.T]
    assert _complement_profile(twisted, 7) == base


# ---------------------------------------------------------------------------
# low-level helpers
# ---------------------------------------------------------------------------


def test_int_det_matches_fraction_elimination():
    rng = random.Random(1234)
    assert _int_det([[2, 1], [1, 2]]) == 3
    assert _int_det([[1, 2], [2, 4]]) == 0
    for _ in range(20):
        mat = [[rng.randrange(-4, 5) for _ in range(4)] for _ in range(4)]
        assert _int_det(mat) == det_frac(mat)
    hl = build_hyp_lattice(7)
    assert _int_det([list(r) for r in hl.gram]) == -343


def test_kernel_basis_is_saturated():
    rng = random.Random(977)
    for _ in range(15):
        rows = [[rng.randrange(-3, 4) for _ in range(5)] for _ in range(2)]
        basis = _kernel_basis(rows, 5)
        a = np.array(rows, dtype=object)
        for vec in basis:
            assert not (a @ np.array(vec, dtype=object)).any()
        # dimension check against a float rank (entries are tiny)
        fr_rank = np.linalg.matrix_rank(np.array(rows, dtype=float))
        assert 5 - len(basis) == fr_rank
        if not basis:
            continue
        # brute-force kernel vectors in a small box must be integer
        # combinations of the returned basis
        for v in _box_kernel_vectors(rows, 2):
            x = solve_exact(basis, v)
            assert x is not None
            assert all(c.denominator == 1 for c in x)


def _box_kernel_vectors(rows, radius):
    a = np.array(rows, dtype=object)
    n = len(rows[0])
    out = []
    def rec(idx, cur):
        if idx == n:
            vec = np.array(cur, dtype=object)
            if any(cur) and not (a @ vec).any():
                out.append(tuple(cur))
            return
        for val in range(-radius, radius + 1):
            rec(idx + 1, cur + [val])
    rec(0, [])
    return out[:40]


def test_reduce_gram_is_exact_change_of_basis():
    rng = random.Random(5150)
    for _ in range(10):
        a = np.array([[rng.randrange(-3, 4) for _ in range(4)]
                      for _ in range(4)], dtype=object)
        g = a @ a.T + 2 * np.eye(4, dtype=object)
        g = [[int(x) for x in row] for row in g]
        red, u = _reduce_gram(g)
        u_np = np.array(u, dtype=object)
        assert abs(det_frac(u)) == 1
        assert [[int(x) for x in row] for row in
                u_np @ np.array(g, dtype=object) @ u_np.T] == \
            [list(r) for r in red]
        assert det_frac(red) == det_frac(g)


def test_rho_direction_series_matches_polynomial_oracle():
    for p, m in M_FOR_P.items():
        assert _rho_direction_series(p, m, 8) == \
            oracle_eta_power_poly(p, m, 8) == FROZEN_CJ[p]


# ---------------------------------------------------------------------------
# the truncated identity
# ---------------------------------------------------------------------------


def test_denominator_small_window_report():
    rep = denominator_check(7, (2, 2), audit=True)
    assert rep.name == "denominator p=7"
    assert rep.status == "pass"
    assert rep.witnesses == ()
    pr = rep.params
    assert pr["p"] == 7
    assert pr["degreeBoundA"] == pr["degreeBoundB"] == 2
    assert pr["complementDet"] == 343
    assert pr["complementMin"] == 4
    assert pr["fOrder"] == 4
    assert pr["rootsInWedge"] == 244
    assert pr["weylElements"] == 86
    assert pr["nullCandidates"] == 170
    assert pr["foreignCusps"] == 84
    assert pr["pointsCompared"] == 88
    hl = build_hyp_lattice(7)
    assert pr["rho"] == list(hl.rho)
    assert pr["rhoTilde"] == list(hl.rho_tilde)

    rows = pr["expansions"]
    assert rows and all(left == right for _, left, right in rows)
    assert all(left or right for _, left, right in rows)

    # rows along the cusp direction carry the eta-power coefficients
    by_point = {tuple(pt): left for pt, left, right in rows}
    for n, expect in [(1, 1), (2, -3)]:
        pt = tuple(n * x for x in hl.rho)
        assert by_point[pt] == expect == FROZEN_CJ[7][n - 1]
    deeper = tuple(3 * x for x in hl.rho)
    assert deeper not in by_point  # outside the window


def test_denominator_audit_only_on_request():
    rep = denominator_check(7, (2, 2))
    assert "expansions" not in rep.params
    assert rep.status == "pass"


def test_denominator_reports_are_deterministic():
    a = denominator_check(7, (2, 2), audit=True).to_jsonable()
    b = denominator_check(7, (2, 2), audit=True).to_jsonable()
    a.pop("runtimeMillis")
    b.pop("runtimeMillis")
    assert a == b


def test_denominator_integer_bound_equals_pair():
    rep = denominator_check(7, 2)
    assert rep.params["degreeBoundA"] == rep.params["degreeBoundB"] == 2
    assert rep.params["pointsCompared"] == 88
    assert rep.status == "pass"


def test_denominator_asymmetric_window():
    rep = denominator_check(7, (2, 3))
    assert rep.status == "pass"
    assert rep.params["pointsCompared"] == 312


def test_denominator_refuses_unreachable_window():
    # degree-1 generators cannot reach every orbit point of an a-heavy
    # window without leaving it; the check must refuse, not under-report
    with pytest.raises(InsufficientOrder):
        denominator_check(7, (3, 2))


def test_denominator_validates_bounds():
    for bad in (0, -1, (0, 2), (2, 0)):
        with pytest.raises(BadParameters):
            denominator_check(7, bad)
    with pytest.raises(BadParameters):
        denominator_check(6)


def test_default_bounds_table():
    assert DEFAULT_DENOMINATOR_BOUNDS == {2: (2, 1), 3: (2, 2),
                                          5: (3, 3), 7: (4, 4)}
