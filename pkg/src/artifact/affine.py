"""Root data of A_q and its untwisted affinization.

Weights are held by their integer labels (n_0, ..., n_q) = values on the
simple coroots, plus an explicit rational delta coefficient.  The bilinear
form is normalized so the highest root has norm 2; to keep everything in
integer arithmetic, pairings of finite weights are usually handled scaled by
(q+1), the determinant of the A_q Cartan matrix.

Provides Weyl-group dominantization, weight multiplicities of integrable
highest-weight modules by Freudenthal's recursion, string functions (the
graded multiplicities along a delta string, with their fractional leading
exponent), theta series of the translated root lattice, the normalized
character assembled from both, and the exact modular S data of the
string-function vector.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt, lcm

from .qexact import Cyclotomic, QSeries, e_frac


class NotInTitsCone(ValueError):
    """Dominantization failed to terminate: the weight is not in the level > 0
    Tits cone (or is malformed)."""


class NumericalImpossibility(ArithmeticError):
    """The Freudenthal left-hand factor vanished (or a multiplicity came out
    non-integral) for a weight the recursion needs: indicates a bug, these
    states are mathematically impossible."""


_DOMINANTIZE_MAX_STEPS = 200_000


# ---------------------------------------------------------------------------
# finite root data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteRootData:
    """Static data of the finite root system A_q, plus its affinization's
    Cartan matrix.  All pairing helpers return (q+1)-scaled integers."""

    q: int
    cartan: tuple = field(repr=False)            # q x q
    affine_cartan: tuple = field(repr=False)     # (q+1) x (q+1)
    inv_cartan_scaled: tuple = field(repr=False)  # (q+1) * inverse Cartan
    positive_roots: tuple = field(repr=False)    # (labels, simple-coeffs) pairs
    theta_labels: tuple = field(repr=False)
    h_dual: int = 0

    @property
    def num_positive_roots(self) -> int:
        return self.q * (self.q + 1) // 2

    def labels_to_coords(self, finite_labels) -> tuple:
        """(q+1)-scaled standard coordinates of the weight with the given
        finite labels: a sum-zero integer vector X with X/(q+1) the usual
        realization of A_q inside R^(q+1)."""
        q = self.q
        total = sum((i + 1) * n for i, n in enumerate(finite_labels))
        coords = []
        tail = sum(finite_labels)
        for j in range(q + 1):
            coords.append((q + 1) * tail - total)
            if j < q:
                tail -= finite_labels[j]
        return tuple(coords)

    def pair_scaled(self, a, b) -> int:
        """(q+1) * (a, b) for finite weights given by labels."""
        xa = self.labels_to_coords(a)
        xb = self.labels_to_coords(b)
        s = sum(u * v for u, v in zip(xa, xb))
        return s // ((self.q + 1))

    def norm_scaled(self, a) -> int:
        return self.pair_scaled(a, a)

    def weight_norm(self, finite_labels) -> Fraction:
        """The exact norm |lambda|^2 of a finite weight."""
        return Fraction(self.norm_scaled(finite_labels), self.q + 1)


@lru_cache(maxsize=None)
def finite_root_data(q: int) -> FiniteRootData:
    if q < 1:
        raise ValueError("rank must be >= 1")
    n = q + 1
    cartan = tuple(
        tuple(2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(q))
        for i in range(q)
    )
    if q == 1:
        affine = ((2, -2), (-2, 2))
    else:
        affine = tuple(
            tuple(
                2 if i == j else (-1 if (i - j) % n in (1, n - 1) else 0)
                for j in range(n)
            )
            for i in range(n)
        )
    inv_scaled = tuple(
        tuple(min(i + 1, j + 1) * (n - max(i + 1, j + 1)) for j in range(q))
        for i in range(q)
    )
    roots = []
    for a in range(q):
        for b in range(a, q):
            coeffs = tuple(1 if a <= i <= b else 0 for i in range(q))
            labels = tuple(
                sum(coeffs[i] * cartan[i][j] for i in range(q)) for j in range(q)
            )
            roots.append((labels, coeffs))
    theta_labels = tuple(
        sum(cartan[i][j] for i in range(q)) for j in range(q)
    )
    return FiniteRootData(
        q=q,
        cartan=cartan,
        affine_cartan=affine,
        inv_cartan_scaled=inv_scaled,
        positive_roots=tuple(roots),
        theta_labels=theta_labels,
        h_dual=n,
    )


def weight_class(finite_labels) -> int:
    """The class of a finite weight in the weight/root quotient (order q+1):
    sum of i * n_i mod (q+1)."""
    q = len(finite_labels)
    return sum((i + 1) * n for i, n in enumerate(finite_labels)) % (q + 1)


def cyclic_shift(labels, i: int) -> tuple:
    """Rotate the affine labels (n_0, ..., n_q) to the right by i places; this
    is the diagram automorphism implementing the i-th simple current."""
    n = len(labels)
    i %= n
    return tuple(labels[(j - i) % n] for j in range(n))


# ---------------------------------------------------------------------------
# affine weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineWeight:
    """A weight of the affinization of A_q: integer labels on the q+1 simple
    coroots plus an explicit delta coefficient."""

    labels: tuple
    delta: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "delta", Fraction(self.delta))

    @property
    def q(self) -> int:
        return len(self.labels) - 1

    @property
    def level(self) -> int:
        return sum(self.labels)

    @property
    def finite(self) -> tuple:
        return self.labels[1:]

    @property
    def norm(self) -> Fraction:
        """Norm of the finite projection (independent of n_0 and delta)."""
        return finite_root_data(self.q).weight_norm(self.finite)

    @property
    def is_dominant(self) -> bool:
        return all(n >= 0 for n in self.labels)

    def reflected(self, i: int) -> "AffineWeight":
        """Apply the simple reflection r_i."""
        rd = finite_root_data(self.q)
        ni = self.labels[i]
        row = rd.affine_cartan[i]
        labels = tuple(n - ni * row[j] for j, n in enumerate(self.labels))
        delta = self.delta - ni if i == 0 else self.delta
        return AffineWeight(labels, delta)


@lru_cache(maxsize=None)
def _dominantize_labels(labels: tuple) -> tuple:
    """Dominantize by simple reflections (first negative label each step).

    Returns (dominant labels, delta shift, sign): the input weight with delta
    coefficient d maps to the dominant labels with delta coefficient
    d + shift, and sign is the parity of the reflection word used."""
    q = len(labels) - 1
    rd = finite_root_data(q)
    aff = rd.affine_cartan
    cur = list(labels)
    shift = 0
    sign = 1
    for _ in range(_DOMINANTIZE_MAX_STEPS):
        for i, ni in enumerate(cur):
            if ni < 0:
                row = aff[i]
                for j in range(q + 1):
                    cur[j] -= ni * row[j]
                if i == 0:
                    shift -= ni
                sign = -sign
                break
        else:
            return tuple(cur), shift, sign
    raise NotInTitsCone(f"dominantization did not terminate for labels {labels}")


def dominantize(weight: AffineWeight, level: int | None = None):
    """Canonical dominant representative of a weight under the affine Weyl
    group, with the parity of the reflection word.  The level must be
    positive; for weights on a chamber wall the parity is convention-bound
    (the identity word is used when the input is already dominant)."""
    k = weight.level
    if level is not None and level != k:
        raise ValueError(f"stated level {level} != label sum {k}")
    if k <= 0:
        raise NotInTitsCone(f"level must be positive, got {k}")
    dom, shift, sign = _dominantize_labels(weight.labels)
    return AffineWeight(dom, weight.delta + shift), sign


def dominant_labels(q: int, k: int):
    """All dominant affine label vectors (n_0, ..., n_q) of level k."""
    if q == 0:
        yield (k,)
        return
    for head in range(k + 1):
        for tail in dominant_labels(q - 1, k - head):
            yield (head,) + tail


# ---------------------------------------------------------------------------
# Freudenthal multiplicities
# ---------------------------------------------------------------------------


@dataclass
class MultTable:
    """Weight multiplicities of the integrable highest-weight module L(Lambda)
    down to a fixed delta depth.

    Keys of ``entries`` are (dominant labels, depth): the multiplicity of the
    Weyl orbit whose dominant representative has the given labels at depth
    many delta steps below the top.  Only nonzero entries are stored; at
    depth <= max_depth, absence means multiplicity zero."""

    q: int
    level: int
    top: tuple
    max_depth: int
    entries: dict

    def mult(self, weight: AffineWeight, depth: int | None = None) -> int:
        """Multiplicity of an arbitrary weight; its delta coefficient is
        interpreted relative to the highest weight's (delta 0 at the top) or
        overridden by an explicit depth."""
        dom, shift, _ = _dominantize_labels(weight.labels)
        if depth is None:
            rel = -(weight.delta + shift)
            if rel.denominator != 1:
                return 0
            depth_eff = int(rel)
        else:
            depth_eff = depth - shift
        if depth_eff < 0:
            return 0
        if depth_eff > self.max_depth:
            raise ValueError(
                f"depth {depth_eff} beyond computed table depth {self.max_depth}"
            )
        return self.entries.get((dom, depth_eff), 0)

    def string(self, finite_labels, count: int) -> list:
        """Multiplicities along the delta string below the canonical class
        representative of finite_labels: the dominantized labels with delta
        part reset to zero (the weight class is taken mod delta, so the shift
        accumulated during dominantization is deliberately discarded)."""
        n0 = self.level - sum(finite_labels)
        dom, _, _ = _dominantize_labels((n0,) + tuple(finite_labels))
        if count - 1 > self.max_depth:
            raise ValueError(
                f"need depth {count - 1}, table holds {self.max_depth}"
            )
        return [self.entries.get((dom, n), 0) for n in range(count)]

    def to_jsonable(self) -> dict:
        return {
            "schemaVersion": 1,
            "q": str(self.q),
            "level": str(self.level),
            "Lambda": [str(n) for n in self.top],
            "maxDepth": str(self.max_depth),
            "entries": [
                [[str(n) for n in labels], str(depth), str(mult)]
                for (labels, depth), mult in sorted(self.entries.items())
            ],
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "MultTable":
        if data.get("schemaVersion") != 1:
            raise ValueError(f"unsupported cache schema {data.get('schemaVersion')}")
        entries = {
            (tuple(int(n) for n in labels), int(depth)): int(mult)
            for labels, depth, mult in data["entries"]
        }
        return cls(
            q=int(data["q"]),
            level=int(data["level"]),
            top=tuple(int(n) for n in data["Lambda"]),
            max_depth=int(data["maxDepth"]),
            entries=entries,
        )


def _hull_coefficients(rd: FiniteRootData, top_finite, finite, depth):
    """Coefficients (c_1..c_q) expressing top - mu + depth*theta in the simple
    roots, or None if not a nonnegative integer combination."""
    q = rd.q
    diff = [
        top_finite[j] - finite[j] + depth * rd.theta_labels[j] for j in range(q)
    ]
    coeffs = []
    for i in range(q):
        s = sum(rd.inv_cartan_scaled[i][j] * diff[j] for j in range(q))
        if s < 0 or s % (q + 1):
            return None
        coeffs.append(s // (q + 1))
    return tuple(coeffs)


def freudenthal(Lambda: AffineWeight, max_depth: int) -> MultTable:
    """Weight multiplicities of L(Lambda) for all weights within max_depth
    delta steps of the highest weight, by Freudenthal's recursion computed
    entirely in scaled integer arithmetic.

    The recursion runs over canonical dominant keys in order of increasing
    height of Lambda - mu, so every right-hand-side lookup (which has strictly
    smaller height at the same or smaller depth) is already available.  Real
    affine roots enter with multiplicity one, imaginary ones with
    multiplicity q.
    """
    if not Lambda.is_dominant:
        raise ValueError(f"highest weight must be dominant: {Lambda.labels}")
    k = Lambda.level
    if k <= 0:
        raise ValueError("level must be positive")
    q = Lambda.q
    rd = finite_root_data(q)
    n1 = q + 1
    hd = rd.h_dual
    top_fin = Lambda.finite
    rho_plus_top = tuple(n + 1 for n in top_fin)
    top_norm_sc = rd.norm_scaled(rho_plus_top)

    # over both signs: (labels, simple-coefficients signed, coords)
    all_roots = []
    for labels, coeffs in rd.positive_roots:
        coords = rd.labels_to_coords(labels)
        neg_labels = tuple(-n for n in labels)
        neg_coords = tuple(-x for x in coords)
        all_roots.append((labels, coeffs, coords, True))
        all_roots.append((neg_labels, tuple(-c for c in coeffs), neg_coords, False))

    entries: dict = {}
    candidates = list(dominant_labels(q, k))

    def lookup(labels_tuple, depth):
        if depth < 0:
            return 0
        dom, shift, _ = _dominantize_labels(labels_tuple)
        d = depth - shift
        if d < 0:
            return 0
        return entries.get((dom, d), 0)

    for depth in range(max_depth + 1):
        staged = []
        for labels in candidates:
            fin = labels[1:]
            coeffs = _hull_coefficients(rd, top_fin, fin, depth)
            if coeffs is None:
                continue
            staged.append((depth + sum(coeffs), labels, fin, coeffs))
        staged.sort()
        for _, labels, fin, coeffs in staged:
            if depth == 0 and labels == Lambda.labels:
                entries[(labels, 0)] = 1
                continue
            rho_plus = tuple(n + 1 for n in fin)
            lhs = (
                top_norm_sc
                - rd.norm_scaled(rho_plus)
                + 2 * (k + hd) * depth * n1
            )
            if lhs <= 0:
                raise NumericalImpossibility(
                    f"vanishing Casimir factor at {labels}, depth {depth}"
                )
            mu_coords = rd.labels_to_coords(fin)
            rhs = 0
            # real roots: alpha_bar + n*delta
            for rl, rc, rcoords, positive in all_roots:
                base_pair = (
                    sum(u * v for u, v in zip(mu_coords, rcoords)) // n1
                )
                # n = 0: only positive finite roots; stop at hull exit
                if positive:
                    j = 1
                    while True:
                        remaining = tuple(
                            c - j * dc for c, dc in zip(coeffs, rc)
                        )
                        if any(c < 0 for c in remaining):
                            break
                        shifted = tuple(
                            n + j * d for n, d in zip(fin, rl)
                        )
                        m = lookup((labels[0] - j * sum(rl),) + shifted, depth)
                        # n_0 entry of mu + j*alpha keeps the level: recompute
                        if m:
                            rhs += m * (base_pair + 2 * j * n1)
                        j += 1
                # n >= 1: both signs
                for n in range(1, depth + 1):
                    j = 1
                    while j * n <= depth:
                        shifted = tuple(
                            nn + j * d for nn, d in zip(fin, rl)
                        )
                        m = lookup(
                            (k - sum(shifted),) + shifted, depth - j * n
                        )
                        if m:
                            rhs += m * (base_pair + n1 * (k * n + 2 * j))
                        j += 1
            # imaginary roots n*delta, multiplicity q
            for n in range(1, depth + 1):
                j = 1
                while j * n <= depth:
                    m = entries.get((labels, depth - j * n), 0)
                    if m:
                        rhs += q * m * (n1 * k * n)
                    j += 1
            num = 2 * rhs
            if num % lhs:
                raise NumericalImpossibility(
                    f"non-integral multiplicity at {labels}, depth {depth}"
                )
            mult = num // lhs
            if mult:
                entries[(labels, depth)] = mult
    return MultTable(q=q, level=k, top=Lambda.labels, max_depth=max_depth,
                     entries=entries)


_TABLE_REGISTRY: dict = {}


def get_mult_table(Lambda: AffineWeight, max_depth: int) -> MultTable:
    """Freudenthal table, memoized per highest weight; recomputed only when a
    deeper truncation is requested than any seen before."""
    key = Lambda.labels
    cached = _TABLE_REGISTRY.get(key)
    if cached is None or cached.max_depth < max_depth:
        cached = freudenthal(Lambda, max_depth)
        _TABLE_REGISTRY[key] = cached
    return cached


def register_mult_table(table: MultTable) -> None:
    """Install a table (e.g. loaded from the disk cache) into the registry."""
    cached = _TABLE_REGISTRY.get(table.top)
    if cached is None or cached.max_depth < table.max_depth:
        _TABLE_REGISTRY[table.top] = table


# ---------------------------------------------------------------------------
# string functions
# ---------------------------------------------------------------------------


def m_of_top(Lambda: AffineWeight) -> Fraction:
    """The modular anomaly of the highest weight: the conformal weight of the
    top minus c/24 for the level-k module."""
    q = Lambda.q
    rd = finite_root_data(q)
    k = Lambda.level
    hd = rd.h_dual
    rho_plus = tuple(n + 1 for n in Lambda.finite)
    rho = (1,) * q
    return Fraction(rd.norm_scaled(rho_plus), 2 * (k + hd) * (q + 1)) - Fraction(
        rd.norm_scaled(rho), 2 * hd * (q + 1)
    )


def leading_exponent(Lambda: AffineWeight, lam: AffineWeight) -> Fraction:
    """m_{Lambda, lambda}: the exponent of the first (depth 0) term of the
    string series, computed at the canonical dominant representative."""
    k = Lambda.level
    dom, _, _ = _dominantize_labels(lam.labels)
    lam_norm = finite_root_data(Lambda.q).weight_norm(dom[1:])
    return m_of_top(Lambda) - lam_norm / (2 * k)


@dataclass
class StringFunction:
    """A string function: the delta-graded multiplicities below (the canonical
    representative of) lambda in L(Lambda), as a q-series whose exponents sit
    in m_{Lambda,lambda} + Z_{>=0}."""

    Lambda: AffineWeight
    lam: AffineWeight
    series: QSeries


def string_function(Lambda: AffineWeight, lam: AffineWeight, count: int) -> StringFunction:
    """The string function of lambda in L(Lambda) with ``count`` graded terms.

    The representative is canonical: lambda is dominantized and its delta part
    reset to zero, which makes the result invariant under the affine Weyl
    group and under translation by level * (root lattice) as required.
    Weights in a different congruence class than Lambda give the zero series.
    """
    if not Lambda.is_dominant:
        raise ValueError("Lambda must be dominant")
    k = Lambda.level
    if lam.level != k:
        raise ValueError(f"level mismatch: {lam.level} != {k}")
    m = leading_exponent(Lambda, lam)
    den = m.denominator
    order = m + count
    if weight_class(lam.finite) != weight_class(Lambda.finite):
        return StringFunction(Lambda, lam, QSeries(den, {}, order))
    table = get_mult_table(Lambda, count - 1 if count > 0 else 0)
    mults = table.string(lam.finite, count)
    coeffs = {}
    for n, c in enumerate(mults):
        if c:
            exp = (m + n) * den
            coeffs[int(exp)] = c
    return StringFunction(Lambda, lam, QSeries(den, coeffs, order))


# ---------------------------------------------------------------------------
# theta series of the translated root lattice
# ---------------------------------------------------------------------------


def theta_lambda(lam: AffineWeight, k: int | None = None, order=None) -> QSeries:
    """Theta series of the coset lambda/k + (root lattice), specialized to its
    q-expansion: sum of q^(k |gamma|^2 / 2) over gamma in the coset, truncated
    below ``order``."""
    if k is None:
        k = lam.level
    if k <= 0:
        raise ValueError("level must be positive")
    if order is None:
        raise ValueError("an explicit truncation order is required")
    order = Fraction(order)
    q = lam.q
    rd = finite_root_data(q)
    n1 = q + 1
    den = 2 * k * n1 * n1
    if order <= 0:
        return QSeries(den, {}, order)
    w = rd.labels_to_coords(lam.finite)  # (q+1)-scaled coords of lambda bar
    s = k * n1
    # enumerate X in Z^(q+1), X_i = w_i mod s, sum X = 0, |X|^2 < 2 k (q+1)^2 order
    bound_num = 2 * k * n1 * n1 * order
    bmax = int(bound_num) if bound_num.denominator == 1 else int(bound_num) + 1
    counts: dict = {}

    def descend(idx: int, part_sum: int, part_norm: int, rem_bound: int):
        if idx == q:
            x = -part_sum
            norm = part_norm + x * x
            if (x - w[q]) % s == 0 and norm <= bmax \
                    and Fraction(norm, 2 * k * n1 * n1) < order:
                counts[norm] = counts.get(norm, 0) + 1
            return
        limit = isqrt(rem_bound) if rem_bound >= 0 else -1
        base = w[idx] % s
        start = -((limit + base) // s) * s + base
        x = start
        while x <= limit:
            if x * x <= rem_bound:
                descend(idx + 1, part_sum + x, part_norm + x * x,
                        rem_bound - x * x)
            x += s
        return

    descend(0, 0, 0, bmax)
    coeffs = {norm: Fraction(c) for norm, c in counts.items()}
    # grid: exponent numerators on 1/den grid are exactly the norms
    return QSeries(den, coeffs, order)


def normalized_character(Lambda: AffineWeight, order) -> QSeries:
    """The specialized normalized character of L(Lambda), assembled as the sum
    over weight classes of string function times theta series.  Slow; used as
    a cross-check oracle on small algebras."""
    q = Lambda.q
    k = Lambda.level
    rd = finite_root_data(q)
    order = Fraction(order)
    total = None
    for lam in weight_classes(q, k):
        m = leading_exponent(Lambda, lam)
        count_f = order - m
        count = max(int(count_f) + (1 if count_f.denominator != 1 else 0), 0)
        c = string_function(Lambda, lam, count).series
        if not c.coeffs:
            continue
        th = theta_lambda(lam, k, order - c.lowest)
        term = c * th
        total = term if total is None else total + term
    if total is None:
        return QSeries(1, {}, order)
    return total.truncate(order)


def weight_classes(q: int, k: int):
    """Representatives of the level-k weights mod k * (root lattice) and
    delta: root-lattice points mod k shifted by each fundamental class."""
    rd = finite_root_data(q)
    for cvec in itertools.product(range(k), repeat=q):
        base = [
            sum(cvec[i] * rd.cartan[i][j] for i in range(q)) for j in range(q)
        ]
        for j in range(q + 1):
            fin = list(base)
            if j:
                fin[j - 1] += 1
            yield AffineWeight((k - sum(fin),) + tuple(fin))


# ---------------------------------------------------------------------------
# modular S data
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _signed_permutations(n: int) -> tuple:
    """All permutations of range(n) with their signs."""
    out = []
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = [False] * n
        for i in range(n):
            if seen[i]:
                continue
            j = i
            clen = 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                clen += 1
            if clen % 2 == 0:
                sign = -sign
        out.append((perm, sign))
    return tuple(out)


def finite_weyl_sum(q: int, kappa: int, x_finite, y_finite, order: int) -> Cyclotomic:
    """sum over the finite Weyl group W = S_{q+1} of det(w) e(-(x, w y)/kappa)
    for finite weights x, y given by labels, as a Cyclotomic of the given
    order (which must be divisible by kappa (q+1))."""
    rd = finite_root_data(q)
    n1 = q + 1
    if order % (kappa * n1):
        raise ValueError("order must be divisible by kappa*(q+1)")
    xc = rd.labels_to_coords(x_finite)
    yc = rd.labels_to_coords(y_finite)
    total = Cyclotomic.zero(order)
    for perm, sign in _signed_permutations(n1):
        dot = sum(xc[i] * yc[perm[i]] for i in range(n1))
        # dot = (q+1)^2 (x, wy); exponent -(x,wy)/kappa = -dot/(kappa (q+1)^2)
        num, rem = divmod(dot, n1)
        if rem:
            raise ValueError("pairing not on the expected grid")
        expo = (-num * (order // (kappa * n1))) % order
        term = Cyclotomic.root(order, expo)
        total = total + (term if sign > 0 else -term)
    return total


@dataclass
class StringSMatrix:
    """The exact S-transformation data of the string-function vector.

    ``entries[r][c]`` holds the matrix element with the positive scalar
    1/sqrt(scale_square) factored out: the true matrix is
    entries / sqrt(scale_square) with scale_square = |M'/kappa M| |M'/k M|.
    Rows and columns are indexed by (Lambda, lambda) pairs in the order
    produced by iterating ``tops`` outer and ``classes`` inner."""

    q: int
    level: int
    tops: list
    classes: list
    entries: list
    scale_square: int
    order: int


def string_s_matrix(q: int, k: int) -> StringSMatrix:
    """Assemble the full S data for rank q at level k.

    Entries are i^{|Delta_+|} (sum over W of det(w) e(-(top+rho, w(top'+rho))/
    (k+h))) e((lam, lam')/k); the square root |M'/(k+h)M|^{-1/2} |M'/kM|^{-1/2}
    is factored out as documented on StringSMatrix, keeping the whole matrix
    inside one cyclotomic field.  Feasible for small (q, k) only; the large
    verification runs use the same Weyl-sum kernel through a batched path.
    """
    rd = finite_root_data(q)
    n1 = q + 1
    kappa = k + rd.h_dual
    order = lcm(4, kappa * n1, k * n1)  # covers every exponent denominator used
    tops = [AffineWeight(l) for l in dominant_labels(q, k)]
    classes = list(weight_classes(q, k))
    i_power = e_frac(Fraction(rd.num_positive_roots, 4), order)
    kernels: dict = {}
    for a, top in enumerate(tops):
        xa = tuple(n + 1 for n in top.finite)
        for b, top2 in enumerate(tops):
            xb = tuple(n + 1 for n in top2.finite)
            kernels[(a, b)] = i_power * finite_weyl_sum(q, kappa, xa, xb, order)
    entries = []
    for a, top in enumerate(tops):
        for lam in classes:
            row = []
            lc = rd.labels_to_coords(lam.finite)
            for b, top2 in enumerate(tops):
                for lam2 in classes:
                    l2c = rd.labels_to_coords(lam2.finite)
                    dot = sum(u * v for u, v in zip(lc, l2c)) // n1
                    phase = e_frac(Fraction(dot, k * n1), order)
                    row.append(kernels[(a, b)] * phase)
            entries.append(row)
    scale_square = (kappa ** q * n1) * (k ** q * n1)
    return StringSMatrix(q=q, level=k, tops=tops, classes=classes,
                         entries=entries, scale_square=scale_square, order=order)
