"""Exact truncated-precision arithmetic in Q_p and its unramified extensions.

Elements of Q_{p^m} are stored as polynomials in a fixed generator of the
residue field lift, with integer coefficients modulo a power of p and an
explicit p-power denominator.  Every value carries an absolute precision N:
the element is known modulo p^N.  A valuation is either an exact integer or
the marker ``AtLeast(N)`` when the element is indistinguishable from zero at
the working precision; that ambiguity is always surfaced, never coerced.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

try:  # optional acceleration for integer characteristic polynomials
    import numpy as _np
except ImportError:  # pragma: no cover
    _np = None


class AtLeast(NamedTuple):
    """Valuation lower bound: the true valuation is >= n (possibly infinite)."""

    n: int

    def __str__(self):
        return f">={self.n}"


Valuation = Union[int, AtLeast]


def is_exact(v: Valuation) -> bool:
    return isinstance(v, int)


class PrecisionError(ArithmeticError):
    """Raised when a result cannot be certified at the working precision."""


# ---------------------------------------------------------------------------
# polynomial helpers over Z/p^M (coefficient lists, low degree first)


def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul(a, b, mod):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % mod
    return _poly_trim(out)


def _poly_rem(a, f, mod):
    # f monic
    a = list(a)
    df = len(f) - 1
    while len(a) - 1 >= df:
        c = a[-1] % mod
        k = len(a) - 1 - df
        if c:
            for i in range(df + 1):
                a[k + i] = (a[k + i] - c * f[i]) % mod
        a.pop()
    return _poly_trim(a)


def _poly_mulmod(a, b, f, mod):
    return _poly_rem(_poly_mul(a, b, mod), f, mod)


def _poly_powmod(a, e, f, mod):
    r = [1]
    a = _poly_rem(a, f, mod)
    while e:
        if e & 1:
            r = _poly_mulmod(r, a, f, mod)
        a = _poly_mulmod(a, a, f, mod)
        e >>= 1
    return r


def _poly_gcd_fp(a, b, p):
    a = [x % p for x in a]
    b = [x % p for x in b]
    _poly_trim(a), _poly_trim(b)
    while b:
        # make b monic
        inv = pow(b[-1], -1, p)
        b = [(x * inv) % p for x in b]
        a, b = b, _poly_rem(a, b, p)
    return a


def _is_irreducible_mod_p(f, p):
    m = len(f) - 1
    if m < 1:
        return False
    x = [0, 1]
    xq = _poly_powmod(x, p ** m, f, p)
    if _poly_trim([(xi - yi) % p for xi, yi in itertools.zip_longest(xq, x, fillvalue=0)]):
        return False
    for ell in {q for q in range(2, m + 1) if m % q == 0 and _is_prime(q)}:
        xd = _poly_powmod(x, p ** (m // ell), f, p)
        g = _poly_gcd_fp(
            [(xi - yi) % p for xi, yi in itertools.zip_longest(xd, x, fillvalue=0)], f, p
        )
        if len(g) - 1 != 0:
            return False
    return True


def _is_prime(n):
    if n < 2:
        return False
    for d in range(2, int(n ** 0.5) + 1):
        if n % d == 0:
            return False
    return True


def _poly_inverse(a, f, p, M):
    """Inverse of a modulo (f, p^M); a must be a unit (nonzero residue)."""
    # invert mod p by extended Euclid over F_p, then Hensel lift
    r0, r1 = [x % p for x in f], [x % p for x in a]
    s0, s1 = [], [1]
    _poly_trim(r0), _poly_trim(r1)
    while r1:
        inv = pow(r1[-1], -1, p)
        r1m = [(x * inv) % p for x in r1]
        q = _poly_quo_fp(r0, r1m, p)
        q = [(x * inv) % p for x in q]
        r0, r1 = r1, _poly_trim(
            [
                (x - y) % p
                for x, y in itertools.zip_longest(r0, _poly_mul(q, r1, p), fillvalue=0)
            ]
        )
        s0, s1 = s1, _poly_trim(
            [
                (x - y) % p
                for x, y in itertools.zip_longest(s0, _poly_mul(q, s1, p), fillvalue=0)
            ]
        )
    lead_inv = pow(r0[-1], -1, p) if r0 else None
    if lead_inv is None:
        raise ZeroDivisionError("not a unit")
    z = [(x * lead_inv) % p for x in s0]
    prec = 1
    while prec < M:
        prec = min(2 * prec, M)
        mod = p ** prec
        az = _poly_mulmod(a, z, f, mod)
        two_minus = [(-x) % mod for x in az]
        if two_minus:
            two_minus[0] = (two_minus[0] + 2) % mod
        else:
            two_minus = [2 % mod]
        z = _poly_mulmod(z, two_minus, f, mod)
    return z


def _poly_quo_fp(a, b, p):
    # b monic over F_p
    a = [x % p for x in a]
    q = [0] * max(len(a) - len(b) + 1, 0)
    db = len(b) - 1
    while len(_poly_trim(a)) - 1 >= db:
        c = a[-1] % p
        k = len(a) - 1 - db
        q[k] = c
        for i in range(db + 1):
            a[k + i] = (a[k + i] - c * b[i]) % p
        a.pop()
    return _poly_trim(q)


# ---------------------------------------------------------------------------
# field descriptors


@dataclass(frozen=True)
class FieldDescriptor:
    """Unramified extension Q_{p^m} at working precision.

    ``modulus`` is the monic degree-m integer polynomial cut out of the
    deterministic search (lexicographically smallest irreducible mod p); its
    coefficients are exact integers.  ``frobenius_image`` is the polynomial
    giving the image of the generator under the lift of x -> x^p, computed to
    the descriptor precision.
    """

    p: int
    m: int
    modulus: tuple
    frobenius_image: tuple
    precision: int

    @property
    def degree(self):
        return self.m

    def zero(self, precision=None):
        N = self.precision if precision is None else precision
        return PadicElement(self, (0,) * self.m, 0, N)

    def one(self, precision=None):
        N = self.precision if precision is None else precision
        return self.from_int(1, N)

    def from_int(self, a, precision=None):
        N = self.precision if precision is None else precision
        coeffs = [a % self.p ** N] + [0] * (self.m - 1)
        return PadicElement(self, tuple(coeffs), 0, N)

    def from_coeffs(self, coeffs, precision=None, shift=0):
        N = self.precision if precision is None else precision
        M = self.p ** (N + shift)
        c = [x % M for x in coeffs] + [0] * (self.m - len(coeffs))
        return PadicElement(self, tuple(c[: self.m]), shift, N)

    def generator(self, precision=None):
        if self.m == 1:
            return self.one(precision)
        return self.from_coeffs([0, 1], precision)

    def frobenius_poly(self, min_precision):
        """Image of the generator under sigma, to at least the given precision."""
        if min_precision <= self.precision:
            return list(self.frobenius_image)
        return _frobenius_image(self.p, list(self.modulus), min_precision)


def _find_modulus(p, m):
    if m == 1:
        return [0, 1]  # generator is 1; modulus x - 0 placeholder unused
    for code in range(p ** m):
        coeffs = []
        c = code
        for _ in range(m):
            coeffs.append(c % p)
            c //= p
        f = coeffs + [1]
        if _is_irreducible_mod_p(f, p):
            return f
    raise PrecisionError("no irreducible polynomial found")  # pragma: no cover


def _frobenius_image(p, f, N):
    """Hensel-lift the root of f congruent to x^p mod p, modulo p^N."""
    m = len(f) - 1
    if m == 1:
        return [0]
    y = _poly_powmod([0, 1], p, f, p)
    fprime = [(i * f[i]) for i in range(1, m + 1)]
    prec = 1
    while prec < N:
        prec = min(2 * prec, N)
        mod = p ** prec
        fy = _poly_eval_poly(f, y, f, mod)
        fpy = _poly_eval_poly(fprime, y, f, mod)
        inv = _poly_inverse(fpy, f, p, prec)
        corr = _poly_mulmod(fy, inv, f, mod)
        y = _poly_trim(
            [
                (a - b) % mod
                for a, b in itertools.zip_longest(y, corr, fillvalue=0)
            ]
        )
    return y


def _poly_eval_poly(g, y, f, mod):
    """g(y) modulo (f, mod), Horner."""
    acc = []
    for c in reversed(g):
        acc = _poly_mulmod(acc, y, f, mod)
        add = c % mod
        if acc:
            acc[0] = (acc[0] + add) % mod
        elif add:
            acc = [add]
        _poly_trim(acc)
    return acc


def make_field(p, m, precision):
    """Descriptor of the unramified extension Q_{p^m} at absolute precision."""
    if precision < 1:
        raise ValueError("precision must be >= 1")
    if m < 1:
        raise ValueError("extension degree must be >= 1")
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    modulus = _find_modulus(p, m)
    frob = _frobenius_image(p, modulus, precision)
    frob = frob + [0] * (m - len(frob))
    return FieldDescriptor(p, m, tuple(modulus), tuple(frob[:m]), precision)


# ---------------------------------------------------------------------------
# elements


class PadicElement:
    """Element of Q_{p^m} at absolute precision N.

    The value is p^(-shift) * (c_0 + c_1*w + ... + c_{m-1}*w^{m-1}) with the
    c_i stored modulo p^(N+shift).  Since the basis 1, w, ..., w^{m-1} is an
    integral basis of the unramified extension, the valuation is the minimum
    coefficient valuation minus the shift.
    """

    __slots__ = ("field", "coeffs", "shift", "abs_precision")

    def __init__(self, field, coeffs, shift, abs_precision):
        p = field.p
        # normalize: pull p-powers out of the denominator when possible
        coeffs = list(coeffs)
        M = p ** (abs_precision + shift)
        coeffs = [c % M for c in coeffs]
        while shift > 0 and all(c % p == 0 for c in coeffs):
            coeffs = [c // p for c in coeffs]
            shift -= 1
        self.field = field
        self.coeffs = tuple(coeffs)
        self.shift = shift
        self.abs_precision = abs_precision

    # -- queries ----------------------------------------------------------

    def valuation(self) -> Valuation:
        """Exact p-adic valuation, or AtLeast(N) when indistinguishable from 0."""
        p = self.field.p
        best = None
        for c in self.coeffs:
            if c:
                v = 0
                while c % p == 0:
                    c //= p
                    v += 1
                best = v if best is None else min(best, v)
        if best is None:
            return AtLeast(self.abs_precision)
        return best - self.shift

    def is_zero_at_precision(self):
        return all(c == 0 for c in self.coeffs)

    def is_integral(self):
        v = self.valuation()
        return v >= 0 if is_exact(v) else True

    # -- arithmetic -------------------------------------------------------

    def _align(self, other):
        if self.field is not other.field and self.field != other.field:
            raise ValueError("field mismatch")
        s = max(self.shift, other.shift)
        N = min(self.abs_precision, other.abs_precision)
        p = self.field.p
        a = [c * p ** (s - self.shift) for c in self.coeffs]
        b = [c * p ** (s - other.shift) for c in other.coeffs]
        return a, b, s, N

    def __add__(self, other):
        other = self._coerce(other)
        a, b, s, N = self._align(other)
        return PadicElement(self.field, [x + y for x, y in zip(a, b)], s, N)

    def __sub__(self, other):
        other = self._coerce(other)
        a, b, s, N = self._align(other)
        return PadicElement(self.field, [x - y for x, y in zip(a, b)], s, N)

    def __neg__(self):
        return PadicElement(self.field, [-c for c in self.coeffs], self.shift, self.abs_precision)

    def __mul__(self, other):
        other = self._coerce(other)
        f = self.field
        v1, v2 = self.valuation(), other.valuation()
        e1 = v1 if is_exact(v1) else self.abs_precision
        e2 = v2 if is_exact(v2) else other.abs_precision
        N = min(self.abs_precision + e2, other.abs_precision + e1)
        if N < 1:
            raise PrecisionError("product has no significant digits")
        s = self.shift + other.shift
        mod = f.p ** (N + s)
        prod = _poly_mulmod(list(self.coeffs), list(other.coeffs), list(f.modulus), mod) \
            if f.m > 1 else [(self.coeffs[0] * other.coeffs[0]) % mod]
        prod = prod + [0] * (f.m - len(prod))
        return PadicElement(f, prod, s, N)

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return self._coerce(other) - self

    def inverse(self):
        f = self.field
        v = self.valuation()
        if not is_exact(v):
            raise ZeroDivisionError("element indistinguishable from zero")
        p = f.p
        rel = self.abs_precision - v
        N = self.abs_precision - 2 * v
        if N < 1 or rel < 1:
            raise PrecisionError("inverse has no significant digits")
        w = v + self.shift  # coefficient-level valuation
        unit = [c // p ** w for c in self.coeffs]
        if f.m > 1:
            inv = _poly_inverse(unit, list(f.modulus), p, rel)
        else:
            inv = [pow(unit[0], -1, p ** rel)]
        inv = inv + [0] * (f.m - len(inv))
        shift_out = max(v, 0)
        scale = p ** (shift_out - v)
        return PadicElement(f, [c * scale for c in inv], shift_out, N)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        r = self.field.one(self.abs_precision)
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b if e > 1 else b
            e >>= 1
        return r

    def _coerce(self, other):
        if isinstance(other, PadicElement):
            return other
        if isinstance(other, int):
            return self.field.from_int(other, self.abs_precision)
        return NotImplemented

    # -- structure maps ---------------------------------------------------

    def frobenius(self):
        """The lift of x -> x^p; a Q_p-linear ring automorphism of order m."""
        f = self.field
        if f.m == 1:
            return self
        M = f.p ** (self.abs_precision + self.shift)
        g = f.frobenius_poly(self.abs_precision + self.shift)
        img = _poly_eval_poly(list(self.coeffs), g, list(f.modulus), M)
        img = img + [0] * (f.m - len(img))
        return PadicElement(f, img, self.shift, self.abs_precision)

    def frobenius_iterate(self, k):
        x = self
        for _ in range(k % self.field.m):
            x = x.frobenius()
        return x

    def qp_coordinates(self):
        """Coordinates in the Q_p-basis 1, w, ..., w^{m-1}, as prime-field elements."""
        base = make_field_cached(self.field.p, 1, self.abs_precision)
        return [
            PadicElement(base, (c,), self.shift, self.abs_precision)
            for c in self.coeffs
        ]

    # -- comparisons ------------------------------------------------------

    def approx_equal(self, other):
        """True when the difference is indistinguishable from zero."""
        return (self - self._coerce(other)).is_zero_at_precision()

    def __eq__(self, other):
        if isinstance(other, (PadicElement, int)):
            o = self._coerce(other)
            if o is NotImplemented:
                return NotImplemented
            return self.approx_equal(o)
        return NotImplemented

    def __hash__(self):  # pragma: no cover
        raise TypeError("PadicElement is not hashable")

    def __repr__(self):
        f = self.field
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mag = c if 2 * c <= f.p ** (self.abs_precision + self.shift) else c - f.p ** (self.abs_precision + self.shift)
                terms.append(f"{mag}" + ("" if i == 0 else f"*w^{i}" if i > 1 else "*w"))
        body = " + ".join(terms) if terms else "0"
        pre = f"p^-{self.shift}*(" if self.shift else ""
        post = ")" if self.shift else ""
        return f"{pre}{body}{post} + O({f.p}^{self.abs_precision})"


_FIELD_CACHE = {}


def make_field_cached(p, m, precision):
    key = (p, m, precision)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = make_field(p, m, precision)
    return _FIELD_CACHE[key]


def valuation(x: PadicElement) -> Valuation:
    return x.valuation()


def frobenius(x: PadicElement) -> PadicElement:
    return x.frobenius()


def teichmueller(field: FieldDescriptor, residue_coeffs, precision=None):
    """The (p^m - 1)-th root of unity (or 0) lifting the given residue.

    ``residue_coeffs`` are the coordinates of the residue-field element in
    the reduction of the basis 1, w, ..., w^{m-1}.
    """
    N = field.precision if precision is None else precision
    p, m = field.p, field.m
    if isinstance(residue_coeffs, int):
        residue_coeffs = [residue_coeffs]
    x = list(residue_coeffs) + [0] * (m - len(residue_coeffs))
    x = [c % p for c in x]
    if all(c == 0 for c in x):
        return field.zero(N)
    mod = p ** N
    q = p ** m
    cur = x
    for _ in range(N + 1):
        nxt = _poly_powmod(cur, q, list(field.modulus), mod) if m > 1 else [pow(cur[0], q, mod)]
        nxt = nxt + [0] * (m - len(nxt))
        if nxt == cur:
            break
        cur = nxt
    return PadicElement(field, cur, 0, N)


def field_embedding(sub: FieldDescriptor, big: FieldDescriptor):
    """Return the image in ``big`` of the generator of ``sub``.

    Requires sub.m | big.m.  The chosen root is the Hensel lift of a root of
    the sub-modulus in the residue field of ``big``; the first root in the
    deterministic enumeration of the residue field is picked.
    """
    if big.m % sub.m != 0 or sub.p != big.p:
        raise ValueError("no embedding: degree must divide")
    if sub.m == 1:
        return big.one()
    p, N = big.p, big.precision
    f = list(sub.modulus)
    # find a residue-level root by scanning F_{p^m}
    for code in range(p ** big.m):
        coeffs = []
        c = code
        for _ in range(big.m):
            coeffs.append(c % p)
            c //= p
        val = _poly_eval_poly([x % p for x in f], coeffs, list(big.modulus), p)
        if not val:
            root = coeffs
            break
    else:  # pragma: no cover
        raise PrecisionError("no residue root found")
    # Hensel lift inside big
    fprime = [i * f[i] for i in range(1, len(f))]
    y = root
    prec = 1
    while prec < N:
        prec = min(2 * prec, N)
        mod = p ** prec
        fy = _poly_eval_poly(f, y, list(big.modulus), mod)
        fpy = _poly_eval_poly(fprime, y, list(big.modulus), mod)
        inv = _poly_inverse(fpy, list(big.modulus), p, prec)
        corr = _poly_mulmod(fy, inv, list(big.modulus), mod)
        y = _poly_trim([(a - b) % mod for a, b in itertools.zip_longest(y, corr, fillvalue=0)])
    y = y + [0] * (big.m - len(y))
    return PadicElement(big, y, 0, N)


def embed_element(x: PadicElement, big: FieldDescriptor, gen_image=None):
    """Map x from its field into ``big`` along a fixed embedding."""
    if gen_image is None:
        gen_image = field_embedding(x.field, big)
    acc = big.zero(min(x.abs_precision, big.precision))
    powg = big.one()
    for c in x.coeffs:
        acc = acc + powg * big.from_int(c)
        powg = powg * gen_image
    if x.shift:
        acc = acc * big.from_int(x.field.p ** x.shift).inverse()
    return acc


# ---------------------------------------------------------------------------
# matrices


class PadicMatrix:
    """Dense matrix of PadicElements over a single field descriptor."""

    __slots__ = ("field", "rows")

    def __init__(self, field, rows):
        self.field = field
        self.rows = [list(r) for r in rows]

    @classmethod
    def from_ints(cls, field, rows, precision=None):
        return cls(field, [[field.from_int(x, precision) for x in r] for r in rows])

    @classmethod
    def identity(cls, field, n, precision=None):
        return cls.from_ints(
            field, [[1 if i == j else 0 for j in range(n)] for i in range(n)], precision
        )

    @classmethod
    def zero(cls, field, r, c, precision=None):
        return cls.from_ints(field, [[0] * c for _ in range(r)], precision)

    @property
    def nrows(self):
        return len(self.rows)

    @property
    def ncols(self):
        return len(self.rows[0]) if self.rows else 0

    @property
    def precision(self):
        return min(e.abs_precision for r in self.rows for e in r)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def copy(self):
        return PadicMatrix(self.field, self.rows)

    def transpose(self):
        return PadicMatrix(self.field, list(map(list, zip(*self.rows))))

    def __add__(self, other):
        return PadicMatrix(
            self.field,
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)],
        )

    def __sub__(self, other):
        return PadicMatrix(
            self.field,
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)],
        )

    def __mul__(self, other):
        if isinstance(other, PadicMatrix):
            bt = list(zip(*other.rows))
            return PadicMatrix(
                self.field,
                [
                    [_dot(row, col) for col in bt]
                    for row in self.rows
                ],
            )
        return PadicMatrix(self.field, [[e * other for e in r] for r in self.rows])

    def scale(self, x):
        return PadicMatrix(self.field, [[e * x for e in r] for r in self.rows])

    def stack(self, other):
        return PadicMatrix(self.field, self.rows + other.rows)

    def map_frobenius(self, k=1):
        return PadicMatrix(
            self.field, [[e.frobenius_iterate(k) for e in r] for r in self.rows]
        )

    def approx_equal(self, other):
        return all(
            a.approx_equal(b)
            for ra, rb in zip(self.rows, other.rows)
            for a, b in zip(ra, rb)
        )

    def is_zero_at_precision(self):
        return all(e.is_zero_at_precision() for r in self.rows for e in r)

    def submatrix(self, rows, cols):
        return PadicMatrix(self.field, [[self.rows[i][j] for j in cols] for i in rows])

    def __repr__(self):  # pragma: no cover
        return "PadicMatrix([\n  " + ",\n  ".join(str(r) for r in self.rows) + "\n])"

    # -- elimination ------------------------------------------------------

    def smith_form(self):
        return smith_form(self)

    def elementary_divisors(self):
        return smith_form(self).divisors

    def inverse(self):
        n = self.nrows
        if n != self.ncols:
            raise ValueError("not square")
        sf = smith_form(self)
        if any(not is_exact(d) for d in sf.divisors):
            raise ZeroDivisionError("matrix not invertible at precision")
        # M = Linv D Rinv  =>  M^-1 = R D^-1 L
        f = self.field
        Dinv = PadicMatrix.zero(f, n, n, self.precision)
        for k in range(n):
            Dinv.rows[k][k] = sf.pivots[k].inverse()
        return sf.R * Dinv * sf.L

    def det_valuation(self) -> Valuation:
        """Valuation of the determinant (sum of elementary divisor valuations)."""
        total = 0
        for d in self.elementary_divisors():
            if not is_exact(d):
                return AtLeast(total + d.n)
            total += d
        return total


def _dot(row, col):
    acc = None
    for a, b in zip(row, col):
        t = a * b
        acc = t if acc is None else acc + t
    return acc


@dataclass
class SmithForm:
    """L*M*R = D diagonal; Linv, Rinv are the inverses of the transforms.

    ``divisors`` are the elementary divisor valuations in non-decreasing
    order; entries indistinguishable from zero produce AtLeast markers.
    ``pivots`` holds the actual diagonal elements for the exact divisors.
    """

    divisors: list
    pivots: list
    L: PadicMatrix
    Linv: PadicMatrix
    R: PadicMatrix
    Rinv: PadicMatrix
    rank: int


def smith_form(M: PadicMatrix) -> SmithForm:
    """Smith-style reduction with minimal-valuation pivoting."""
    f = M.field
    r, c = M.nrows, M.ncols
    N = M.precision
    work = [row[:] for row in M.rows]
    L = PadicMatrix.identity(f, r, N)
    Linv = PadicMatrix.identity(f, r, N)
    R = PadicMatrix.identity(f, c, N)
    Rinv = PadicMatrix.identity(f, c, N)
    divisors, pivots = [], []
    k = 0
    while k < min(r, c):
        best = None
        for i in range(k, r):
            for j in range(k, c):
                v = work[i][j].valuation()
                if is_exact(v) and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        v, bi, bj = best
        if bi != k:
            work[k], work[bi] = work[bi], work[k]
            L.rows[k], L.rows[bi] = L.rows[bi], L.rows[k]
            for row in Linv.rows:
                row[k], row[bi] = row[bi], row[k]
        if bj != k:
            for row in work:
                row[k], row[bj] = row[bj], row[k]
            for row in R.rows:
                row[k], row[bj] = row[bj], row[k]
            Rinv.rows[k], Rinv.rows[bj] = Rinv.rows[bj], Rinv.rows[k]
        pivot = work[k][k]
        for i in range(k + 1, r):
            e = work[i][k]
            if e.is_zero_at_precision():
                continue
            fct = e / pivot
            for j in range(k, c):
                work[i][j] = work[i][j] - fct * work[k][j]
            for j in range(r):
                L.rows[i][j] = L.rows[i][j] - fct * L.rows[k][j]
                Linv.rows[j][k] = Linv.rows[j][k] + fct * Linv.rows[j][i]
        for j in range(k + 1, c):
            e = work[k][j]
            if e.is_zero_at_precision():
                continue
            fct = e / pivot
            for i in range(r):
                work[i][j] = work[i][j] - work[i][k] * fct
            for i in range(c):
                R.rows[i][j] = R.rows[i][j] - R.rows[i][k] * fct
            for jj in range(c):
                Rinv.rows[k][jj] = Rinv.rows[k][jj] + fct * Rinv.rows[j][jj]
        divisors.append(v)
        pivots.append(pivot)
        k += 1
    rank = k
    rest_prec = N
    for _ in range(min(r, c) - k):
        divisors.append(AtLeast(rest_prec))
    return SmithForm(divisors, pivots, L, Linv, R, Rinv, rank)


def certified_rank(M: PadicMatrix, threshold=None):
    """(rank, divisor valuations); rank counts divisors certified below threshold."""
    sf = smith_form(M)
    thr = M.precision if threshold is None else threshold
    rank = sum(1 for d in sf.divisors if is_exact(d) and d < thr)
    return rank, sf.divisors


def kernel_basis(M: PadicMatrix):
    """Certified right-kernel basis vectors (columns indistinguishable from 0)."""
    sf = smith_form(M)
    cols = []
    for k in range(M.ncols):
        if k >= len(sf.divisors) or not is_exact(sf.divisors[k]):
            cols.append([sf.R.rows[i][k] for i in range(M.ncols)])
    return cols


def column_space_basis(M: PadicMatrix):
    """Basis of the column span: the first ``rank`` columns of Linv."""
    sf = smith_form(M)
    return [[sf.Linv.rows[i][k] for i in range(M.nrows)] for k in range(sf.rank)], sf


def saturate_lattice(M: PadicMatrix) -> PadicMatrix:
    """Basis of the smallest direct summand containing the column span.

    Entries must be integral; elementary divisors are divided out, so the
    returned basis has all divisors of valuation zero.
    """
    for row in M.rows:
        for e in row:
            if not e.is_integral():
                raise ValueError("entries must be integral")
    sf = smith_form(M)
    if sf.rank < min(M.nrows, M.ncols) and sf.rank < M.ncols:
        # columns beyond the certified rank contribute nothing certifiable
        pass
    if sf.rank == 0:
        raise PrecisionError("rank indeterminate at precision")
    basis = [[sf.Linv.rows[i][k] for i in range(M.nrows)] for k in range(sf.rank)]
    return PadicMatrix(M.field, basis).transpose()


# ---------------------------------------------------------------------------
# characteristic polynomial (division-free Samuelson-Berkowitz)


def charpoly(M: PadicMatrix):
    """Coefficients [a_0, ..., a_n] of det(tI - M), low degree first."""
    n = M.nrows
    if n != M.ncols:
        raise ValueError("not square")
    f = M.field
    one = f.one(M.precision)
    zero = f.zero(M.precision)
    A = M.rows
    # fast integer path for prime-field integral matrices
    if f.m == 1 and all(e.shift == 0 for r in A for e in r):
        N = M.precision
        mod = f.p ** N
        Ai = [[e.coeffs[0] % mod for e in r] for r in A]
        coeffs = _berkowitz_int(Ai, mod)
        return [PadicElement(f, (c,), 0, N) for c in coeffs]
    vec = [one]
    for i in range(1, n + 1):
        a = A[i - 1][i - 1]
        Rrow = A[i - 1][: i - 1]
        Ccol = [A[t][i - 1] for t in range(i - 1)]
        Msub = [row[: i - 1] for row in A[: i - 1]]
        T = [one, zero - a]
        cur = Ccol
        for _ in range(i - 1):
            T.append(zero - _dot_z(Rrow, cur, zero))
            cur = [_dot_z(Msub[t], cur, zero) for t in range(len(Msub))]
        new = []
        for s in range(i + 1):
            acc = zero
            for t in range(min(s, len(T) - 1) + 1):
                if s - t < len(vec):
                    acc = acc + T[t] * vec[s - t]
            new.append(acc)
        vec = new
    # vec is highest-degree-first
    return list(reversed(vec))


def _dot_z(row, col, zero):
    acc = zero
    for a, b in zip(row, col):
        acc = acc + a * b
    return acc


def _berkowitz_int(A, mod):
    n = len(A)
    # int64 matvec path: safe when row sums of products cannot overflow
    if _np is not None and n > 4 and n * (mod - 1) ** 2 < 2 ** 62:
        return _berkowitz_int_np(A, mod, n)
    return _berkowitz_int_py(A, mod, n)


def _berkowitz_int_np(A, mod, n):
    M = _np.array(A, dtype=_np.int64) % mod
    vec = [1]
    for i in range(1, n + 1):
        a = int(M[i - 1, i - 1])
        Rrow = M[i - 1, : i - 1]
        Msub = M[: i - 1, : i - 1]
        T = [1, (-a) % mod]
        cur = M[: i - 1, i - 1].copy()
        for _ in range(i - 1):
            T.append(int(-(Rrow @ cur)) % mod)
            cur = (Msub @ cur) % mod
        new = []
        for s in range(i + 1):
            acc = 0
            for t in range(min(s, len(T) - 1) + 1):
                if s - t < len(vec):
                    acc += T[t] * vec[s - t]
            new.append(acc % mod)
        vec = new
    return list(reversed(vec))


def _berkowitz_int_py(A, mod, n):
    vec = [1]
    for i in range(1, n + 1):
        a = A[i - 1][i - 1]
        Rrow = A[i - 1][: i - 1]
        Msub = [row[: i - 1] for row in A[: i - 1]]
        T = [1, (-a) % mod]
        cur = [A[t][i - 1] for t in range(i - 1)]
        for _ in range(i - 1):
            T.append((-sum(x * y for x, y in zip(Rrow, cur))) % mod)
            cur = [sum(x * y for x, y in zip(Msub[t], cur)) % mod for t in range(len(Msub))]
        new = []
        for s in range(i + 1):
            acc = 0
            for t in range(min(s, len(T) - 1) + 1):
                if s - t < len(vec):
                    acc += T[t] * vec[s - t]
            new.append(acc % mod)
        vec = new
    return list(reversed(vec))


# ---------------------------------------------------------------------------
# serialization


def element_to_json(x: PadicElement):
    return {
        "p": x.field.p,
        "m": x.field.m,
        "modulus": [int(c) for c in x.field.modulus],
        "precision": x.abs_precision,
        "shift": x.shift,
        "coeffs": [str(c) for c in x.coeffs],
    }


def element_from_json(d):
    field = make_field_cached(d["p"], d["m"], d["precision"])
    return PadicElement(field, [int(c) for c in d["coeffs"]], d.get("shift", 0), d["precision"])


def matrix_to_json(M: PadicMatrix):
    return {
        "p": M.field.p,
        "m": M.field.m,
        "modulus": [int(c) for c in M.field.modulus],
        "precision": M.precision,
        "coeffs": [
            [[str(c) for c in e.coeffs] for e in row] for row in M.rows
        ],
        "shifts": [[e.shift for e in row] for row in M.rows],
    }


def matrix_from_json(d):
    field = make_field_cached(d["p"], d["m"], d["precision"])
    shifts = d.get("shifts")
    rows = []
    for i, row in enumerate(d["coeffs"]):
        out = []
        for j, coeffs in enumerate(row):
            s = shifts[i][j] if shifts else 0
            out.append(PadicElement(field, [int(c) for c in coeffs], s, d["precision"]))
        rows.append(out)
    return PadicMatrix(field, rows)
