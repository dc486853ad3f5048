"""Tests for the glued lattices, their discriminant groups, short vectors,
and coset theta series.

Oracles
-------
* Box enumeration (written before the implementation results were viewed):
  for p = 5 the lattice is sqrt(5) times the full weight lattice of A_4^2,
  so its norm-4 vectors project to one block's weight vectors of norm 4/5.
  The oracle enumerates a coordinate box with its own gram formula
  b_ij = min(i,j)(5 - max(i,j))/5 and counts; the expected count 20 (both
  signs) is frozen below.
* Code combinatorics as an independent route to theta coefficients: the
  q^2 coefficient of the trivial coset's theta series must equal
  (number of roots) + (sign choices) x (number of minimal-weight
  codewords), both read off the stored codeword list, not the lattice.
* Known code data: the length-16 binary code is [16, 11, 4] whose dual is
  [16, 5, 8] with weight distribution {0: 1, 8: 30, 16: 1}.
"""

from fractions import Fraction

import pytest

from artifact.discweil import qvalue
from artifact.glulat import (
    BadCode,
    build_lattice,
    code_class,
    code_from_generators,
    code_from_words,
    coset_of,
    coset_reps,
    coset_theta,
    discriminant_group,
    dual_short_vectors,
    glue_code,
    minimal_norm,
    short_vectors,
)

PARAMS = {2: (1, 8, 16), 3: (2, 6, 6), 5: (4, 4, 2), 7: (6, 3, 1)}


# ---------------------------------------------------------------------------
# oracle: box enumeration for the p = 5 norm-4 count
# ---------------------------------------------------------------------------


def _a4_weight_gram():
    # b_ij = min(i,j) * (5 - max(i,j)) / 5 with 1-based indices
    return [[Fraction(min(i, j) * (5 - max(i, j)), 5)
             for j in range(1, 5)] for i in range(1, 5)]


def _box_count_norm4_p5(radius: int) -> int:
    """Vectors of sqrt(5) * (weight lattice of A_4)^2 with norm exactly 4,
    counted with both signs, via brute-force box enumeration."""
    g = _a4_weight_gram()
    span = range(-radius, radius + 1)
    per_block = {}
    for a in ((w, x, y, z) for w in span for x in span
              for y in span for z in span):
        n = sum(a[i] * g[i][j] * a[j] for i in range(4) for j in range(4))
        key = 5 * n
        if key <= 4:
            per_block[key] = per_block.get(key, 0) + 1
    count = 0
    for n1, c1 in per_block.items():
        c2 = per_block.get(4 - n1)
        if c2:
            count += c1 * c2
    return count


EXPECTED_NORM4_P5 = 20


def test_box_oracle_p5():
    # growing the box does not change the count, so no vector was clipped
    assert _box_count_norm4_p5(2) == _box_count_norm4_p5(3) == EXPECTED_NORM4_P5


def test_short_vectors_match_box_oracle_p5():
    L = build_lattice(5)
    canonical = [v for v, n in short_vectors(L, 4) if n == 4]
    assert len(canonical) == EXPECTED_NORM4_P5 // 2
    both = [v for v, n in short_vectors(L, 4, include_negatives=True) if n == 4]
    assert len(both) == EXPECTED_NORM4_P5


# ---------------------------------------------------------------------------
# glue codes
# ---------------------------------------------------------------------------


def test_code_sizes_and_duals():
    expected = {2: 2 ** 11, 3: 3 ** 5, 5: 5 ** 2, 7: 7}
    dual_sizes = {2: 2 ** 5, 3: 3, 5: 1, 7: 1}
    for p, want in expected.items():
        code = glue_code(p)
        assert len(code.codewords) == want
        assert len(code.dual_codewords) == dual_sizes[p]
        assert set(code.dual_codewords) <= set(code.codewords)


def test_binary_code_is_16_11_4_with_known_dual():
    code = glue_code(2)
    weights = {}
    for w in code.codewords:
        weights[sum(w)] = weights.get(sum(w), 0) + 1
    assert min(k for k in weights if k) == 4
    dual_weights = {}
    for w in code.dual_codewords:
        dual_weights[sum(w)] = dual_weights.get(sum(w), 0) + 1
    assert dual_weights == {0: 1, 8: 30, 16: 1}


def test_ternary_code_is_zero_sum():
    code = glue_code(3)
    assert all(sum(w) % 3 == 0 for w in code.codewords)
    assert (1, 1, 1, 1, 1, 1) in code.dual_codewords


def test_code_from_words_rejects_wrong_size():
    with pytest.raises(BadCode):
        code_from_words(5, 2, [(0, 0), (1, 0), (2, 0), (3, 0), (4, 0)])


def test_code_from_words_rejects_not_closed():
    with pytest.raises(BadCode):
        code_from_words(7, 1, [(0,), (1,)])


def test_code_from_generators_rejects_wrong_span():
    with pytest.raises(BadCode):
        code_from_generators(2, 16, [tuple(int(i < 2) for i in range(16))])


def test_binary_code_minimum_distance_enforced():
    base = glue_code(2)
    # swap one degree-2 generator for a weight-2 word outside the code:
    # right size, but minimum distance 2
    gens = [g for g in base.generators]
    gens[-1] = tuple(int(i < 2) for i in range(16))
    with pytest.raises(BadCode):
        code_from_generators(2, 16, gens)


# ---------------------------------------------------------------------------
# lattice invariants
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("p,rank,det,minn", [
    (2, 16, 2 ** 10, 4),
    (3, 12, 3 ** 8, 4),
    (5, 8, 5 ** 6, 4),
    (7, 6, 7 ** 5, 6),
])
def test_rank_det_min(p, rank, det, minn):
    L = build_lattice(p)
    assert L.rank == rank
    assert len(L.basis) == rank
    assert L.det == det
    assert minimal_norm(L) == minn


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_gram_integral_even_symmetric(p):
    L = build_lattice(p)
    n = L.rank
    for i in range(n):
        assert L.gram[i][i] % 2 == 0
        for j in range(n):
            assert isinstance(L.gram[i][j], int)
            assert L.gram[i][j] == L.gram[j][i]


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_provenance_mentions_glue(p):
    L = build_lattice(p)
    assert str(len(L.code.codewords)) in L.provenance


# ---------------------------------------------------------------------------
# cosets and the discriminant group
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_coset_reps_structure(p):
    q, m, r = PARAMS[p]
    L = build_lattice(p)
    reps = coset_reps(L)
    assert len(reps) == p ** (m + 2) == L.det
    zero = reps[0]
    assert not any(zero.coeffs) and zero.norm == 0 and zero.norm_class == 0
    dual_classes = set(L.code.dual_codewords)
    for rep in reps:
        # the representative is a dual vector with p * gamma in the lattice
        assert all((p * x).denominator == 1 for x in rep.ncoords)
        assert all(0 <= x < 1 for x in rep.ncoords)
        assert rep.norm_class == (rep.norm / 2) % 1
        # its sqrt(p)-scaled ambient vector lies in the dual-code gluing
        assert code_class(p, rep.ambient) in dual_classes
    # identification of cosets from p-scaled coordinates is consistent
    for rep in reps[:: max(1, len(reps) // 97)]:
        assert coset_of(L, [int(p * x) for x in rep.ncoords]) == rep.coeffs


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_norm_classes_match_discriminant_form(p):
    L = build_lattice(p)
    d = discriminant_group(L)
    reps = coset_reps(L)
    step = max(1, len(reps) // 211)
    for rep in reps[::step]:
        assert qvalue(d, rep.coeffs) == rep.norm_class


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_pole_norm_class_attained(p):
    classes = {rep.norm_class for rep in coset_reps(build_lattice(p))}
    assert Fraction(1, p) % 1 in classes
    if p == 7:
        assert classes == {Fraction(k, 7) for k in range(7)}


# ---------------------------------------------------------------------------
# short vectors
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_short_vector_contract(p):
    L = build_lattice(p)
    bound = 4 if p != 7 else 6
    vecs = short_vectors(L, bound)
    assert vecs == short_vectors(L, bound)  # deterministic
    assert (tuple([0] * L.rank), 0) in vecs
    n = L.rank
    for coords, norm in vecs:
        direct = sum(coords[i] * L.gram[i][j] * coords[j]
                     for i in range(n) for j in range(n))
        assert direct == norm <= bound
        first = next((c for c in coords if c), 0)
        assert first >= 0
    doubled = short_vectors(L, bound, include_negatives=True)
    assert len(doubled) == 2 * len(vecs) - 1
    assert doubled == sorted(doubled, key=lambda t: t[0])


def test_bound_below_minimum_gives_only_zero():
    L = build_lattice(7)
    assert short_vectors(L, 4) == [(tuple([0] * 6), 0)]
    assert short_vectors(L, -1) == []


def test_dual_short_vectors_consistency():
    # for p = 7 the duals are (1/sqrt 7) x root-lattice vectors: norms are
    # even integers divided by 7, and below norm 6 no nonzero vector has
    # trivial class (a trivial-class dual vector is sqrt(7) x a dual root
    # vector, of norm at least 6)
    L = build_lattice(7)
    zero_class = (0,) * 5
    seen = 0
    for coords, g, norm in dual_short_vectors(L, 2):
        assert (7 * norm).denominator == 1 and (7 * norm) % 2 == 0
        if any(coords):
            seen += 1
            assert coset_of(L, g) != zero_class
        else:
            assert norm == 0 and coset_of(L, g) == zero_class
    assert seen > 0


# ---------------------------------------------------------------------------
# coset theta series
# ---------------------------------------------------------------------------


def test_theta_trivial_coset_leading_terms():
    # q^2 coefficient equals (roots) + (per-block sign choices) x (minimal
    # codewords), both counted from the stored code, independent of the
    # lattice enumeration.
    for p, margin in ((2, Fraction(1, 8)), (3, Fraction(1, 18)), (5, Fraction(1, 50))):
        L = build_lattice(p)
        code = L.code
        q = p - 1
        if p == 2:
            min_codewords = sum(1 for w in code.codewords if sum(w) == 4)
            expected2 = 2 * L.rank + 16 * min_codewords  # 32 roots + 2^4 lifts
        elif p == 3:
            # roots are rescaled to norm 6 here, so norm 4 is glue only:
            # each weight-2 codeword contributes 3 x 3 minimal lifts
            min_codewords = sum(
                1 for w in code.codewords
                if sorted(c for c in w if c) in ([1, 2],))
            expected2 = 9 * min_codewords
        else:
            # full glue: the lattice is sqrt(5) x the whole weight lattice,
            # so the norm-4 vectors counted by the box oracle all lie in it
            expected2 = EXPECTED_NORM4_P5
        theta = coset_theta(L, tuple([0] * (24 // (p + 1) + 2)), 2 + margin)
        assert theta.coeff(0) == 1
        assert theta.coeff(1) == 0
        assert theta.coeff(2) == expected2


def test_theta_p7_trivial_before_q3():
    L = build_lattice(7)
    theta = coset_theta(L, (0, 0, 0, 0, 0), 3)
    assert dict(theta.coeffs) == {0: 1}


def test_theta_zero_order_empty():
    L = build_lattice(7)
    assert coset_theta(L, (0, 0, 0, 0, 0), 0).coeffs == {}
    assert coset_theta(L, (0, 0, 0, 0, 0), -2).coeffs == {}


def test_theta_grid_and_symmetry():
    L = build_lattice(7)
    reps = coset_reps(L)
    d = discriminant_group(L)
    for rep in reps[:: max(1, len(reps) // 23)]:
        theta = coset_theta(L, rep, Fraction(3, 2))
        for e, c in theta.items():
            assert e % 1 == rep.norm_class
            assert c > 0
        neg = tuple((-x) % 7 for x in rep.coeffs)
        assert coset_theta(L, neg, Fraction(3, 2)).coeffs == theta.coeffs


def test_theta_counts_include_the_representative():
    # every small-norm coset representative is itself counted by its theta
    L = build_lattice(7)
    reps = [rep for rep in coset_reps(L) if 0 < rep.norm <= 2][:8]
    assert reps
    for rep in reps:
        theta = coset_theta(L, rep, Fraction(3, 2))
        assert theta.coeff(rep.norm / 2) >= 1
