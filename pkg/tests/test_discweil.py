"""Tests for finite quadratic modules, their metaplectic action, and the
vector-valued eta lift.

Oracles
-------
* Hand-computed Gauss sums for tiny forms (rank-one odd forms, the two
  rank-two 2-torsion forms), fixing the signature octics independently of
  the library's histogram route.
* Dense matrix products: unitarity, the square of the duality matrix, and
  the braid relation are explicit matrix-arithmetic identities over exact
  cyclotomics; the tests freeze the expected outcome (no witnesses) on
  forms small enough to verify by hand.
* The lift's defining expansion: coefficients of the scalar eta quotient
  are recomputed via the Euler product in test_qexact; here we pin the
  distribution of those coefficients into components against directly
  stated residue arithmetic.
"""

from fractions import Fraction

import pytest

from artifact.discweil import (
    DegenerateForm,
    OddSignature,
    UnsupportedLevel,
    dense_weil_checks,
    direct_sum,
    discriminant_form,
    elements,
    is_nondegenerate,
    level,
    lift_eta,
    milgram_signature,
    negated,
    pairing,
    qvalue,
    rank,
    size,
    verify_T_covariance,
    verify_weil,
    weil_S,
    weil_T,
)
from artifact.glulat import build_lattice, discriminant_group
from artifact.qexact import OrderExceeded

H = Fraction(1, 2)


def form_a2():
    """Z/3 with q(1) = 1/3: the discriminant form of the hexagonal root
    lattice.  Gauss sum 1 + 2 e(1/3) = i sqrt(3), so signature 2."""
    return discriminant_form(3, ((Fraction(2, 3),),))


def form_u():
    """(Z/2)^2 with q = t1 t2 / 2.  Gauss sum 3 + e(1/2) = 2: signature 0."""
    return discriminant_form(2, ((0, H), (H, 0)))


def form_v():
    """(Z/2)^2 with q = (t1^2 + t1 t2 + t2^2)/2.  Gauss sum
    1 + 2 e(1/2) + e(3/2) = -2: signature 4."""
    return discriminant_form(2, ((1, H), (H, 1)))


def form_odd():
    """Z/2 with q(1) = 1/4.  Gauss sum 1 + i: signature 1 (odd)."""
    return discriminant_form(2, ((H,),))


def test_milgram_on_hand_checked_forms():
    assert milgram_signature(form_a2()) == 2
    assert milgram_signature(form_u()) == 0
    assert milgram_signature(form_v()) == 4
    assert milgram_signature(form_odd()) == 1


def test_trivial_form_has_signature_zero():
    triv = discriminant_form(3, ())
    assert rank(triv) == 0 and size(triv) == 1
    assert milgram_signature(triv) == 0
    assert level(triv) == 1


def test_form_plus_negation_has_signature_zero():
    d = form_a2()
    assert milgram_signature(direct_sum(d, negated(d))) == 0
    assert milgram_signature(direct_sum(form_v(), form_v())) == 0


def test_degenerate_form_rejected():
    dead = discriminant_form(3, ((0,),))
    assert not is_nondegenerate(dead)
    with pytest.raises(DegenerateForm):
        milgram_signature(dead)


def test_qvalue_and_pairing_small():
    d = form_a2()
    assert [qvalue(d, t) for t in elements(d)] == [0, Fraction(1, 3), Fraction(1, 3)]
    # (g, 2g) = 2 (g, g) = 4/3 = 1/3 mod 1
    assert pairing(d, (1,), (2,)) == Fraction(1, 3)
    u = form_u()
    assert [qvalue(u, t) for t in elements(u)] == [0, 0, 0, H]


def test_weil_T_requires_even_signature():
    with pytest.raises(OddSignature):
        weil_T(form_odd())
    with pytest.raises(OddSignature):
        weil_S(form_odd())


def test_dense_weil_checks_small_forms():
    # Unitarity, duality-squared, and the braid relation as explicit
    # matrix-product identities over exact cyclotomics.
    for d in (form_a2(), form_u(), form_v(),
              direct_sum(form_a2(), negated(form_a2())),
              direct_sum(form_u(), form_v())):
        assert dense_weil_checks(d) == []


@pytest.mark.parametrize("p,two_m", [(2, 16), (3, 12), (5, 8), (7, 6)])
def test_lattice_forms_milgram_and_weil(p, two_m):
    d = discriminant_group(build_lattice(p))
    assert milgram_signature(d) == two_m % 8
    assert level(d) in (1, p)
    report = verify_weil(d)
    assert report.ok, report.witnesses
    assert report.params["signature"] == two_m % 8


# ---------------------------------------------------------------------------
# the vector-valued lift of the eta quotient
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("p,m", [(2, 8), (3, 6), (5, 4), (7, 3)])
def test_lift_leading_coefficients(p, m):
    F = lift_eta(p, order=4)
    assert F.weight == -m
    zero = F.component(tuple([0] * rank(F.form)))
    assert zero.coeff(-1) == 1
    assert zero.coeff(0) == 2 * m


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_component_grids_and_poles(p):
    F = lift_eta(p, order=4)
    d = F.form
    pole_classes = set()
    integer_pole = []
    for t in elements(d):
        comp = F.component(t)
        expected = (-qvalue(d, t)) % 1
        for e, c in comp.items():
            assert c != 0
            assert e % 1 == expected, (t, e)
            if e < 0:
                pole_classes.add(qvalue(d, t))
                if e.denominator == 1:
                    integer_pole.append(t)
            assert e >= -1
    # poles occur exactly at the zero class and the class of value 1/p
    assert qvalue(d, tuple([0] * rank(d))) == 0
    assert pole_classes == {Fraction(0), Fraction(1, p) % 1}
    assert integer_pole == [tuple([0] * rank(d))]


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_lift_component_contents_match_residues(p):
    """Each nonzero class's component collects exactly the scalar
    coefficients whose exponent falls in the right residue class mod 1."""
    from artifact.qexact import eta_quotient

    m = 24 // (p + 1)
    F = lift_eta(p, order=3)
    f = eta_quotient(p, m, 3 * p)
    d = F.form
    for t in elements(d):
        if not any(t):
            continue
        comp = F.component(t)
        expected = (-qvalue(d, t)) % 1
        j = int((expected * p) % p)
        for e, c in comp.items():
            n = e * p
            assert n.denominator == 1 and int(n) % p == j % p
            assert c == f.coeff(Fraction(int(n)))


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_T_covariance_report(p):
    report = verify_T_covariance(lift_eta(p, order=3))
    assert report.ok, report.witnesses
    assert report.status == "pass"


def test_lift_rejects_bad_level():
    with pytest.raises(UnsupportedLevel):
        lift_eta(4)
    with pytest.raises(UnsupportedLevel):
        lift_eta(11)
    with pytest.raises(UnsupportedLevel):
        lift_eta(5, form=discriminant_group(build_lattice(3)))


def test_component_order_tracking():
    F = lift_eta(7, order=5)
    zero = F.component((0, 0, 0, 0, 0))
    assert zero.coeff(4) is not None
    with pytest.raises(OrderExceeded):
        zero.coeff(5)
