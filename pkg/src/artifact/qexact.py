"""Exact scalars and truncated q-series.

Ground scalars are arbitrary-precision rationals (``fractions.Fraction``) and
elements of cyclotomic fields Q(zeta_n), the latter kept in the canonical
normal form obtained by reduction mod the n-th cyclotomic polynomial.  On top
of these, :class:`QSeries` implements finitely truncated Puiseux series in
q**(1/den) with an explicit *reliable order*: every operation computes the
exact order to which its result is trustworthy, so a coefficient query either
returns an exact value or raises :class:`OrderExceeded`.  Silent truncation
loss cannot happen.

The module also provides the series constructors everything downstream is
built from: the eta product ``1/(eta(t)^m eta(p t)^m)`` with ``m = 24/(p+1)``
(leading term ``q**-1``) and its congruence split into the p sub-series
supported on a fixed residue class of exponents mod p.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import lcm

import sympy

_ZERO = Fraction(0)


class ZeroLeadingCoefficient(ArithmeticError):
    """Inverting a series with no nonzero leading term."""


class OrderExceeded(LookupError):
    """A coefficient at or beyond the reliable truncation order was requested."""


class BadParameters(ValueError):
    """Parameter combination outside the supported (p, m) table."""


# ---------------------------------------------------------------------------
# cyclotomic field elements
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _phi_rule(n: int) -> tuple[int, tuple[tuple[int, int], ...]]:
    """Reduction rule mod Phi_n: returns (d, rule) with d = deg Phi_n and
    zeta^d = sum of c * zeta^e over (e, c) in rule, all e < d."""
    x = sympy.Symbol("x")
    coeffs = sympy.Poly(sympy.cyclotomic_poly(n, x), x).all_coeffs()
    d = len(coeffs) - 1
    rule = tuple(
        (d - i, -int(c)) for i, c in enumerate(coeffs) if i > 0 and c != 0
    )
    return d, rule


def _reduce_mod_phi(n: int, raw: dict) -> dict:
    d, rule = _phi_rule(n)
    buf = [_ZERO] * n
    nonempty = False
    for e, c in raw.items():
        if c:
            buf[e % n] += c
            nonempty = True
    if not nonempty:
        return {}
    for k in range(n - 1, d - 1, -1):
        c = buf[k]
        if c:
            buf[k] = _ZERO
            for e, s in rule:
                buf[k - d + e] += c * s
    return {k: c for k, c in enumerate(buf[:d]) if c}


class Cyclotomic:
    """An element of Q(zeta_n) with zeta_n = e(1/n) = exp(2*pi*i/n).

    Stored reduced mod Phi_n: ``coeffs`` maps exponents 0 <= k < deg Phi_n to
    nonzero rational coefficients, and this normal form is unique, so the zero
    test is just emptiness.  Arithmetic between different orders coerces both
    operands into Q(zeta_lcm); pipelines that care pick one fixed order up
    front and stay in it.
    """

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: dict | None = None, *, _reduced: bool = False):
        self.n = n
        if coeffs is None:
            self.coeffs = {}
        elif _reduced:
            self.coeffs = coeffs
        else:
            self.coeffs = _reduce_mod_phi(n, coeffs)

    # -- constructors

    @classmethod
    def zero(cls, n: int = 1) -> "Cyclotomic":
        return cls(n, {}, _reduced=True)

    @classmethod
    def from_rational(cls, c, n: int = 1) -> "Cyclotomic":
        c = Fraction(c)
        return cls(n, {0: c} if c else {}, _reduced=True)

    @classmethod
    def root(cls, n: int, k: int = 1) -> "Cyclotomic":
        """zeta_n^k."""
        return cls(n, {k % n: Fraction(1)})

    # -- structure

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_rational(self) -> bool:
        return not self.coeffs or set(self.coeffs) == {0}

    def rational(self) -> Fraction:
        """The value as a Fraction; raises ValueError if not rational."""
        if not self.coeffs:
            return _ZERO
        if set(self.coeffs) == {0}:
            return Fraction(self.coeffs[0])
        raise ValueError(f"not a rational element: {self!r}")

    def embed(self, m: int) -> "Cyclotomic":
        """The same value viewed in Q(zeta_m); requires n | m."""
        if m == self.n:
            return self
        if m % self.n:
            raise ValueError(f"cannot embed Q(zeta_{self.n}) into Q(zeta_{m})")
        step = m // self.n
        return Cyclotomic(m, {k * step: c for k, c in self.coeffs.items()})

    @staticmethod
    def _common(a: "Cyclotomic", b: "Cyclotomic"):
        if a.n == b.n:
            return a, b
        m = lcm(a.n, b.n)
        return a.embed(m), b.embed(m)

    def _wrap(self, other):
        if isinstance(other, Cyclotomic):
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic.from_rational(other, 1)
        return None

    # -- arithmetic

    def __add__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        a, b = Cyclotomic._common(self, o)
        out = dict(a.coeffs)
        for k, c in b.coeffs.items():
            s = out.get(k, _ZERO) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Cyclotomic(a.n, out, _reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.n, {k: -c for k, c in self.coeffs.items()}, _reduced=True)

    def __sub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Cyclotomic.zero(self.n)
            return Cyclotomic(
                self.n, {k: c * other for k, c in self.coeffs.items()}, _reduced=True
            )
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b = Cyclotomic._common(self, other)
        raw: dict[int, Fraction] = {}
        for k1, c1 in a.coeffs.items():
            for k2, c2 in b.coeffs.items():
                k = k1 + k2
                raw[k] = raw.get(k, _ZERO) + c1 * c2
        return Cyclotomic(a.n, raw)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        if isinstance(other, Cyclotomic):
            return self * other.inverse()
        return NotImplemented

    def inverse(self) -> "Cyclotomic":
        """Multiplicative inverse, by solving the d x d rational linear system
        (multiplication by self) x = 1 in the power basis."""
        if not self.coeffs:
            raise ZeroDivisionError("inverse of zero cyclotomic element")
        if self.is_rational():
            return Cyclotomic.from_rational(Fraction(1) / Fraction(self.coeffs[0]), self.n)
        d, _ = _phi_rule(self.n)
        cols = []
        for j in range(d):
            col = (self * Cyclotomic.root(self.n, j)).coeffs
            cols.append([col.get(i, _ZERO) for i in range(d)])
        # solve sum_j x_j * cols[j] = e_0 by Gaussian elimination
        mat = [[cols[j][i] for j in range(d)] + [Fraction(1) if i == 0 else _ZERO]
               for i in range(d)]
        for c in range(d):
            piv = next((r for r in range(c, d) if mat[r][c]), None)
            if piv is None:
                raise ZeroDivisionError("singular multiplication matrix")
            mat[c], mat[piv] = mat[piv], mat[c]
            inv = Fraction(1) / Fraction(mat[c][c])
            mat[c] = [v * inv for v in mat[c]]
            for r in range(d):
                if r != c and mat[r][c]:
                    f = mat[r][c]
                    mat[r] = [vr - f * vc for vr, vc in zip(mat[r], mat[c])]
        return Cyclotomic(self.n, {j: mat[j][d] for j in range(d) if mat[j][d]},
                          _reduced=True)

    def conjugate(self) -> "Cyclotomic":
        """Complex conjugation zeta -> zeta^-1."""
        return Cyclotomic(self.n, {(-k) % self.n: c for k, c in self.coeffs.items()})

    # -- comparison

    def __eq__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        a, b = Cyclotomic._common(self, o)
        return a.coeffs == b.coeffs

    __hash__ = None

    def __repr__(self):
        if not self.coeffs:
            return "Cyc(0)"
        terms = " + ".join(
            f"{c}*z{self.n}^{k}" if k else f"{c}" for k, c in sorted(self.coeffs.items())
        )
        return f"Cyc({terms})"


def e_frac(x, n: int | None = None) -> Cyclotomic:
    """The root of unity e(x) = exp(2*pi*i*x) for rational x, as a Cyclotomic
    of order x.denominator (or of the given order n, which must be a multiple)."""
    x = Fraction(x)
    m = x.denominator
    z = Cyclotomic.root(m, x.numerator % m)
    return z.embed(n) if n is not None and n != m else z


@lru_cache(maxsize=None)
def sqrt_cyclotomic(n: int) -> Cyclotomic:
    """sqrt(n) for a positive integer n, represented exactly inside a
    cyclotomic field via quadratic Gauss sums:

        sqrt(2)   = zeta_8 + zeta_8^-1
        sqrt(l)   = g_l            for an odd prime l = 1 mod 4
        sqrt(l)   = -i * g_l       for an odd prime l = 3 mod 4

    with g_l = sum_t zeta_l^(t^2); square factors come out as integers.
    """
    if n <= 0:
        raise ValueError("need a positive integer")
    out = Cyclotomic.from_rational(1, 1)
    for prime, mult in sympy.factorint(n).items():
        out = out * (int(prime) ** (mult // 2))
        if mult % 2 == 0:
            continue
        if prime == 2:
            root2 = Cyclotomic(8, {1: Fraction(1), 7: Fraction(1)})
            out = out * root2
        else:
            g = Cyclotomic(int(prime), {})
            for t in range(int(prime)):
                g = g + Cyclotomic.root(int(prime), (t * t) % int(prime))
            if prime % 4 == 3:
                g = g * e_frac(Fraction(3, 4))  # -i
            out = out * g
    return out


# ---------------------------------------------------------------------------
# truncated Puiseux series
# ---------------------------------------------------------------------------


class QSeries:
    """A truncated series  sum_e c_e q**(e/den)  with tracked reliability.

    ``coeffs`` maps integer exponent numerators (on the 1/den grid) to nonzero
    coefficients; ``order`` is the reliable bound: every exponent < order has
    its exact coefficient stored (absence meaning zero), and nothing at all is
    known at exponents >= order.  Instances are immutable by convention.
    """

    __slots__ = ("den", "coeffs", "order")

    def __init__(self, den: int, coeffs: dict, order):
        if den <= 0:
            raise ValueError("den must be positive")
        order = Fraction(order)
        self.den = den
        self.order = order
        cut = order * den
        self.coeffs = {e: c for e, c in coeffs.items() if c and e < cut}

    # -- constructors

    @classmethod
    def zero(cls, order, den: int = 1) -> "QSeries":
        return cls(den, {}, order)

    @classmethod
    def one(cls, order, den: int = 1) -> "QSeries":
        return cls(den, {0: Fraction(1)}, order)

    @classmethod
    def monomial(cls, e, coefficient=1, order=None, den: int | None = None) -> "QSeries":
        """coefficient * q**e, reliable below ``order`` (default e + 1)."""
        e = Fraction(e)
        if den is None:
            den = e.denominator
        if (e * den).denominator != 1:
            raise ValueError(f"exponent {e} not on the 1/{den} grid")
        if order is None:
            order = e + 1
        return cls(den, {int(e * den): coefficient}, order)

    # -- structure

    @property
    def lowest(self):
        """Lowest stored exponent (a Fraction), or None for a zero series."""
        if not self.coeffs:
            return None
        return Fraction(min(self.coeffs), self.den)

    def _low_or_order(self) -> Fraction:
        low = self.lowest
        return self.order if low is None else low

    def regrid(self, den: int) -> "QSeries":
        if den == self.den:
            return self
        if den % self.den:
            raise ValueError("new grid must refine the old one")
        f = den // self.den
        return QSeries(den, {e * f: c for e, c in self.coeffs.items()}, self.order)

    def truncate(self, order) -> "QSeries":
        order = min(Fraction(order), self.order)
        return QSeries(self.den, self.coeffs, order)

    def shift(self, e) -> "QSeries":
        """Multiply by q**e."""
        e = Fraction(e)
        den = lcm(self.den, e.denominator)
        s = int(e * den)
        f = den // self.den
        return QSeries(den, {t * f + s: c for t, c in self.coeffs.items()},
                       self.order + e)

    def coeff(self, e):
        return coeff(self, e)

    def items(self):
        """Sorted (exponent: Fraction, coefficient) pairs."""
        return [(Fraction(e, self.den), c) for e, c in sorted(self.coeffs.items())]

    # -- ring operations

    def __add__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        den = lcm(self.den, other.den)
        a, b = self.regrid(den), other.regrid(den)
        out = dict(a.coeffs)
        for e, c in b.coeffs.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return QSeries(den, out, min(a.order, b.order))

    def __neg__(self):
        return QSeries(self.den, {e: -c for e, c in self.coeffs.items()}, self.order)

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, QSeries):
            return series_mul(self, other)
        if isinstance(other, (int, Fraction, Cyclotomic)):
            if not other:
                return QSeries(self.den, {}, self.order)
            return QSeries(self.den, {e: c * other for e, c in self.coeffs.items()},
                           self.order)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.order == other.order and self.agrees_with(other)

    __hash__ = None

    def agrees_with(self, other: "QSeries", up_to=None) -> bool:
        """Coefficient-for-coefficient equality below min(orders) (or below
        ``up_to`` if given, which must not exceed either reliable order)."""
        bound = min(self.order, other.order)
        if up_to is not None:
            up_to = Fraction(up_to)
            if up_to > bound:
                raise OrderExceeded(
                    f"cannot compare to order {up_to}: reliable only below {bound}"
                )
            bound = up_to
        den = lcm(self.den, other.den)
        a, b = self.regrid(den), other.regrid(den)
        cut = bound * den
        for e, c in a.coeffs.items():
            if e < cut and b.coeffs.get(e, 0) != c:
                return False
        for e, c in b.coeffs.items():
            if e < cut and e not in a.coeffs:
                return False
        return True

    def __repr__(self):
        if not self.coeffs:
            return f"QSeries(0 + O(q^{self.order}))"
        parts = []
        for e, c in self.items()[:8]:
            if e == 0:
                parts.append(f"{c}")
            else:
                parts.append(f"{c}*q^({e})")
        if len(self.coeffs) > 8:
            parts.append("...")
        return f"QSeries({' + '.join(parts)} + O(q^{self.order}))"


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    """Exact Cauchy product, truncated at the reliable order
    min(order(a) + lowest(b), order(b) + lowest(a))."""
    den = lcm(a.den, b.den)
    a, b = a.regrid(den), b.regrid(den)
    order = min(a.order + b._low_or_order(), b.order + a._low_or_order())
    cut = order * den
    out: dict = {}
    if len(b.coeffs) < len(a.coeffs):
        a, b = b, a
    for e1, c1 in a.coeffs.items():
        for e2, c2 in b.coeffs.items():
            e = e1 + e2
            if e >= cut:
                continue
            s = out.get(e, 0) + c1 * c2
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return QSeries(den, out, order)


def series_inv(a: QSeries) -> QSeries:
    """Inverse series: a * series_inv(a) = 1 to the reliable order."""
    if not a.coeffs:
        raise ZeroLeadingCoefficient("cannot invert a series with no terms")
    low = min(a.coeffs)
    c0 = a.coeffs[low]
    if isinstance(c0, Cyclotomic):
        c0_inv = c0.inverse()
    else:
        if not c0:
            raise ZeroLeadingCoefficient("zero leading coefficient")
        c0_inv = Fraction(1) / Fraction(c0)
    # normalized tail u: a = c0 q^(low/den) (1 + u), u known below order - low/den
    steps_bound = a.order * a.den - low  # exponent numerators t of v run t < this
    u = {e - low: c * c0_inv for e, c in a.coeffs.items() if e != low}
    v = {0: 1}
    t = 1
    while t < steps_bound:
        s = 0
        for eu, cu in u.items():
            if eu <= t:
                cv = v.get(t - eu)
                if cv is not None:
                    s = s - cu * cv
        if s:
            v[t] = s
        t += 1
    out = {t - low: cv * c0_inv for t, cv in v.items()}
    return QSeries(a.den, out, a.order - 2 * Fraction(low, a.den))


def series_pow(a: QSeries, k: int) -> QSeries:
    """a**k for integer k (negative k inverts first), with the tight reliable
    order order(a) + (k-1) * lowest(a): the base is normalized to lowest
    exponent zero before the binary powering so no order is lost."""
    if k < 0:
        return series_pow(series_inv(a), -k)
    if k == 0:
        return QSeries.one(a.order, a.den)
    low = a._low_or_order()
    if low:
        return series_pow(a.shift(-low), k).shift(low * k)
    result = QSeries.one(a.order, a.den)
    base = a
    while k:
        if k & 1:
            result = series_mul(result, base)
        k >>= 1
        if k:
            base = series_mul(base, base)
    return result


def coeff(a: QSeries, e):
    """The exact coefficient of q**e; raises OrderExceeded past the reliable
    order, returns 0 for any absent exponent below it."""
    e = Fraction(e)
    if e >= a.order:
        raise OrderExceeded(f"coefficient at {e} requested, reliable only below {a.order}")
    t = e * a.den
    if t.denominator != 1:
        return _ZERO
    return a.coeffs.get(int(t), _ZERO)


# ---------------------------------------------------------------------------
# eta products and congruence splits
# ---------------------------------------------------------------------------


def _euler_inv_pow(acc: list, n: int, m: int) -> None:
    """In-place multiply the dense integer series by (1 - q^n)^(-m)."""
    size = len(acc)
    for _ in range(m):
        for e in range(n, size):
            acc[e] += acc[e - n]


def eta_quotient(p: int, m: int, order) -> QSeries:
    """The series  1/(eta(t)^m eta(p t)^m)  with m = 24/(p+1), as a QSeries on
    the integer exponent grid.  The eta prefactors q^(m/24) q^(pm/24) combine
    to exactly q^(-1), so the expansion is q^-1 + m + ... with nonnegative
    integer coefficients.
    """
    if p not in (2, 3, 5, 7):
        raise BadParameters(f"unsupported p = {p}")
    if m * (p + 1) != 24:
        raise BadParameters(f"m must equal 24/(p+1) = {24 // (p + 1)}, got {m}")
    order = Fraction(order)
    bound = order + 1  # product part needed below this exponent
    size = max(int(bound) + (1 if bound > int(bound) else 0), 0)
    acc = [0] * size
    if size:
        acc[0] = 1
        for n in range(1, size):
            _euler_inv_pow(acc, n, m)
            if p * n < size:
                _euler_inv_pow(acc, p * n, m)
    return QSeries(1, {e - 1: c for e, c in enumerate(acc)}, order)


def g_split(f: QSeries, p: int) -> list[QSeries]:
    """Split a series with integer exponents into its p residue-class parts:
    part j collects the terms [f](n) q^(n/p) with n = j mod p.  Summing the
    parts recovers f with q replaced by q^(1/p)."""
    parts: list[dict] = [{} for _ in range(p)]
    for e, c in f.coeffs.items():
        n, r = divmod(e, f.den)
        if r:
            raise ValueError("series must have integer exponents")
        parts[n % p][n] = c
    order = f.order / p
    return [QSeries(p, part, order) for part in parts]
