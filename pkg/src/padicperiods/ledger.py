"""Exact-rational valuation bookkeeping: CM period valuations, determinant
laws, height normalization and transfer, beta-integrality.

All quantities are p-adic valuations normalized by v(p) = 1, held as exact
``fractions.Fraction`` values; nothing here touches the truncated-precision
field arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ValuationExpr:
    """An exact p-adic valuation (v(p) = 1)."""

    value: Fraction

    def __add__(self, other):
        return ValuationExpr(self.value + _val(other))

    def __sub__(self, other):
        return ValuationExpr(self.value - _val(other))

    def __neg__(self):
        return ValuationExpr(-self.value)

    def __mul__(self, other):
        return ValuationExpr(self.value * _val(other))

    def __eq__(self, other):
        return self.value == _val(other)

    def __lt__(self, other):
        return self.value < _val(other)

    def __le__(self, other):
        return self.value <= _val(other)

    def __hash__(self):
        return hash(self.value)

    def __str__(self):
        return _frac_str(self.value)

    def to_json(self):
        return _frac_str(self.value)


def _val(x):
    if isinstance(x, ValuationExpr):
        return x.value
    return Fraction(x)


@dataclass
class HeightLedger:
    """Heights of the two quasi-isogenies and the connecting isogeny.

    ``degree`` is [F:Q_p]; normalized heights divide by it (always 1 here).
    """

    n: int
    ht_rho_H: int
    ht_rho_G: int
    ht_Delta: int
    degree: int = 1

    def normalized(self, ht):
        return Fraction(ht, self.degree)


@dataclass
class CMDatum:
    """One-dimensional CM datum of height h with critical index i_0.

    The general multi-index type (a_i with sum d) is stored for forward
    compatibility but only the d = 1 case is computed.
    """

    p: int
    h: int
    i_0: int
    a: list = dc_field(default_factory=list)

    def __post_init__(self):
        if not (0 <= self.i_0 < self.h):
            raise ValueError("critical index out of range")
        if not self.a:
            self.a = [1 if i == self.i_0 else 0 for i in range(self.h)]
        if any(x < 0 for x in self.a):
            raise ValueError("negative multiplicity")

    @property
    def d(self):
        return sum(self.a)

    def y_valuations(self):
        return cm_period_valuations(self.p, self.h, self.i_0)


def cm_period_valuations(p, h, i_0):
    """Valuations of the h flat periods of the height-h CM group.

    v(y_i) = p^{h+i-i_0}/(p^h - 1) for i < i_0 and p^{i-i_0}/(p^h - 1)
    for i >= i_0.
    """
    if not (0 <= i_0 < h):
        raise ValueError("critical index out of range")
    q = p ** h - 1
    out = []
    for i in range(h):
        e = i - i_0 if i >= i_0 else h + i - i_0
        out.append(ValuationExpr(Fraction(p ** e, q)))
    return out


def check_sum_identity(datum: CMDatum) -> bool:
    """Sum of the period valuations equals v(t) = 1/(p-1)."""
    if datum.d != 1:
        raise ValueError("only d = 1 is computed")
    total = sum((v.value for v in datum.y_valuations()), Fraction(0))
    return total == Fraction(1, datum.p - 1)


def functional_equation_valuations(datum: CMDatum) -> bool:
    """Frobenius multiplies flat-coordinate valuations by p, inserting one
    factor of p per cycle: p*v(y_i) = v(y_{i+1 mod h}) + [i+1 = i_0 mod h].
    """
    if datum.d != 1:
        raise ValueError("only d = 1 is computed")
    ys = [v.value for v in datum.y_valuations()]
    p, h, i0 = datum.p, datum.h, datum.i_0
    for i in range(h):
        bump = 1 if (i + 1) % h == i0 % h else 0
        if p * ys[i] != ys[(i + 1) % h] + bump:
            return False
    return True


def det_valuation_LT(ledger: HeightLedger) -> ValuationExpr:
    """v_p of the period determinant scalar on the rank-n side:
    -ht_rho_H - n(n-1)/2."""
    n = ledger.n
    return ValuationExpr(-Fraction(ledger.ht_rho_H) - Fraction(n * (n - 1), 2))


def det_valuation_Dr(ledger: HeightLedger) -> ValuationExpr:
    """v_p of the determinant scalar on the rank-n^2 side:
    -ht_rho_G/n - ht_Delta."""
    return ValuationExpr(-Fraction(ledger.ht_rho_G, ledger.n) - ledger.ht_Delta)


@dataclass
class TransferVerdict:
    consistent: bool
    lt_value: ValuationExpr
    dr_value: ValuationExpr
    normalized_height: Fraction | None

    def to_json(self):
        return {
            "consistent": self.consistent,
            "det_valuation_LT": self.lt_value.to_json(),
            "det_valuation_Dr": self.dr_value.to_json(),
            "normalized_height": (
                _frac_str(self.normalized_height)
                if self.normalized_height is not None
                else None
            ),
        }


def height_transfer(ledger: HeightLedger) -> TransferVerdict:
    """With ht_Delta = n(n-1)/2, the two determinant laws agree exactly when
    the normalized heights match: ht_rho_H = ht_rho_G / n."""
    n = ledger.n
    if ledger.ht_Delta != n * (n - 1) // 2 or (n * (n - 1)) % 2 != 0:
        raise ValueError(
            f"transfer requires ht_Delta = n(n-1)/2 = {Fraction(n * (n - 1), 2)}"
        )
    lt = det_valuation_LT(ledger)
    dr = det_valuation_Dr(ledger)
    consistent = lt == dr
    assert consistent == (Fraction(ledger.ht_rho_H) == Fraction(ledger.ht_rho_G, n))
    height = Fraction(ledger.ht_rho_H) if consistent else None
    return TransferVerdict(consistent, lt, dr, height)


def lt_character_valuation(i, p, h) -> ValuationExpr:
    """Valuation p^i/(p^h - 1) of the canonical invariant attached to the
    i-th Frobenius twist of the height-h character."""
    if not (0 <= i < h):
        raise ValueError("index out of range")
    return ValuationExpr(Fraction(p ** i, p ** h - 1))


def beta_integrality(datum: CMDatum) -> ValuationExpr:
    """v(beta) = sum v(y_i) - 1/(p-1); the determinant-of-periods unit law
    says this is exactly 0."""
    if datum.d != 1:
        raise ValueError("only d = 1 is computed")
    total = sum((v.value for v in datum.y_valuations()), Fraction(0))
    return ValuationExpr(total - Fraction(1, datum.p - 1))


def check_report(check, inputs, expected, computed):
    """Uniform JSON report row for one exact check."""

    def enc(x):
        if isinstance(x, ValuationExpr):
            return x.to_json()
        if isinstance(x, Fraction):
            return _frac_str(x)
        if isinstance(x, (list, tuple)):
            return [enc(e) for e in x]
        if isinstance(x, dict):
            return {k: enc(v) for k, v in x.items()}
        return x

    return {
        "check": check,
        "inputs": enc(inputs),
        "expected": enc(expected),
        "computed": enc(computed),
        "pass": enc(expected) == enc(computed),
    }
