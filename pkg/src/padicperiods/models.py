"""Explicit integral models: the height-n module, its special n^2 companion,
the quaternion-order action, and the block isogeny between them.

Basis conventions.  The height-n model has basis labels Pi^j (x) 1 for
j = 0..n-1; the normalized coordinates are obtained by multiplying grade j
by Pi^{-j}, which identifies every graded piece with the base field.  In
those coordinates the Verschiebung-style operator V is the cyclic matrix
with subdiagonal ones and a single p in the wrap position, and the actual
Frobenius is p * V^{-1}, the matrix with superdiagonal p's and a 1 in the
bottom-left corner.

The special model has basis e_{a,b} indexed by (a, b) in (Z/n)^2, flattened
as a*n + b; the grading index of e_{a,b} is a + b mod n.
"""

from __future__ import annotations

from dataclasses import dataclass

from .padic import (
    FieldDescriptor,
    PadicElement,
    PadicMatrix,
    make_field_cached,
    matrix_to_json,
)
from .semilinear import Isocrystal


@dataclass
class LubinTateModel:
    """Rank-n module with V(Pi^j (x) a) = Pi^{j+1} (x) sigma^{-1}(a), Pi^n = p."""

    n: int
    field: FieldDescriptor  # W(F_{p^n})-approximant, used for the order action
    V_matrix: PadicMatrix  # sigma^{-1}-semilinear, normalized coordinates
    frobenius_matrix: PadicMatrix  # p * V^{-1}, sigma-semilinear

    @property
    def basis_labels(self):
        return [f"Pi^{j}" for j in range(self.n)]

    def isocrystal(self, field=None):
        """Slope-carrying operator as an isocrystal (entries are rational)."""
        if field is None:
            return Isocrystal(self.V_matrix.field, self.n, self.V_matrix)
        M = PadicMatrix.from_ints(
            field, [[_int_entry(e) for e in row] for row in self.V_matrix.rows]
        )
        return Isocrystal(field, self.n, M)

    def to_json(self):
        return {
            "n": self.n,
            "basis_labels": self.basis_labels,
            "V_matrix": matrix_to_json(self.V_matrix),
            "phi_matrix": matrix_to_json(self.frobenius_matrix),
        }


@dataclass
class SpecialModel:
    """Rank-n^2 module with V(e_{a,b}) = p^{[b = n-1]} e_{a,b+1}."""

    n: int
    field: FieldDescriptor
    V_matrix: PadicMatrix
    frobenius_matrix: PadicMatrix

    def index(self, a, b):
        return (a % self.n) * self.n + (b % self.n)

    @property
    def basis_labels(self):
        n = self.n
        return [f"e_{a},{b}" for a in range(n) for b in range(n)]

    def grading(self, flat_index):
        a, b = divmod(flat_index, self.n)
        return (a + b) % self.n

    def graded_piece_indices(self, i):
        return [k for k in range(self.n * self.n) if self.grading(k) == i]

    def isocrystal(self, field=None):
        if field is None:
            return Isocrystal(self.V_matrix.field, self.n * self.n, self.V_matrix)
        M = PadicMatrix.from_ints(
            field, [[_int_entry(e) for e in row] for row in self.V_matrix.rows]
        )
        return Isocrystal(field, self.n * self.n, M)

    def unit_root_operator(self, field=None):
        """V^{-1} Pi restricted to the grade-0 piece: the identity matrix,
        acting sigma-semilinearly (a unit-root isocrystal of rank n)."""
        f = self.V_matrix.field if field is None else field
        return Isocrystal(f, self.n, PadicMatrix.identity(f, self.n))

    def to_json(self):
        return {
            "n": self.n,
            "basis_labels": self.basis_labels,
            "V_matrix": matrix_to_json(self.V_matrix),
            "phi_matrix": matrix_to_json(self.frobenius_matrix),
            "grading": [self.grading(k) for k in range(self.n * self.n)],
        }


@dataclass
class DeltaIsogeny:
    n: int
    matrix: PadicMatrix  # maps (height-n model)^n -> special model
    height: int

    def to_json(self):
        return {"n": self.n, "height": self.height, "matrix": matrix_to_json(self.matrix)}


def _int_entry(e: PadicElement) -> int:
    if e.shift != 0 or any(e.coeffs[1:]):
        raise ValueError("entry is not a plain integer")
    return e.coeffs[0]


def _v_cycle_matrix(field, n, precision=None):
    """Subdiagonal 1s, p in the top-right wrap position; [p] when n = 1."""
    p = field.p
    rows = [[0] * n for _ in range(n)]
    if n == 1:
        rows[0][0] = p
    else:
        for j in range(n - 1):
            rows[j + 1][j] = 1
        rows[0][n - 1] = p
    return PadicMatrix.from_ints(field, rows, precision)


def build_DH(n, precision=32, base_p=2):
    """The rank-n model over W(F_{p^n}); V has slope 1/n with multiplicity n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    coeff_field = make_field_cached(base_p, n, precision)
    rational = make_field_cached(base_p, 1, precision)
    V = _v_cycle_matrix(rational, n, precision)
    phi = phi_matrix(n, precision, base_p)
    return LubinTateModel(n, coeff_field, V, phi)


def phi_matrix(n, precision=32, base_p=2):
    """The Frobenius matrix: superdiagonal p's, bottom-left 1; [p] for n = 1."""
    rational = make_field_cached(base_p, 1, precision)
    p = base_p
    rows = [[0] * n for _ in range(n)]
    if n == 1:
        rows[0][0] = p
    else:
        for j in range(n - 1):
            rows[j][j + 1] = p
        rows[n - 1][0] = 1
    return PadicMatrix.from_ints(rational, rows, precision)


def build_DG(n, precision=32, base_p=2):
    """The rank-n^2 special model; V permutes e_{a,b} -> e_{a,b+1} with one p."""
    if n < 1:
        raise ValueError("n must be >= 1")
    coeff_field = make_field_cached(base_p, n, precision)
    rational = make_field_cached(base_p, 1, precision)
    p = base_p
    nn = n * n
    rowsV = [[0] * nn for _ in range(nn)]
    rowsF = [[0] * nn for _ in range(nn)]
    for a in range(n):
        for b in range(n):
            src = a * n + b
            dst = a * n + (b + 1) % n
            rowsV[dst][src] = p if b == n - 1 else 1
            # phi = p * V^{-1}: e_{a,b+1} -> p^{1-[b=n-1]} e_{a,b}
            rowsF[src][dst] = 1 if b == n - 1 else p
    V = PadicMatrix.from_ints(rational, rowsV, precision)
    phi = PadicMatrix.from_ints(rational, rowsF, precision)
    return SpecialModel(n, coeff_field, V, phi)


def iota_matrix(model: LubinTateModel, d):
    """Matrix of left multiplication by d = sum_i a_i Pi^i on the rank-n model.

    ``d`` is a list of n coefficients, each an element of the model's
    coefficient field W(F_{p^n}) (or an int).  Uses a Pi^m = Pi^m sigma^{-m}(a)
    and Pi^n = p.
    """
    n = model.n
    f = model.field
    coeffs = [c if isinstance(c, PadicElement) else f.from_int(c) for c in d]
    if len(coeffs) != n:
        raise ValueError(f"expected {n} coefficients")
    if all(c.is_zero_at_precision() for c in coeffs):
        raise ZeroDivisionError("d = 0")
    rows = [[f.zero() for _ in range(n)] for _ in range(n)]
    p = f.p
    for i, a in enumerate(coeffs):
        if a.is_zero_at_precision():
            continue
        for j in range(n):
            k = (i + j) % n
            carry = (i + j) // n
            term = a.frobenius_iterate(-(i + j) % f.m if f.m > 1 else 0)
            if carry:
                term = term * (p ** carry)
            rows[k][j] = rows[k][j] + term
    return PadicMatrix(f, rows)


def dg_iota_matrix(model: SpecialModel, d):
    """Matrix of iota(d) on the special model, d = sum_i a_i Pi^i as above.

    iota(a) for a in W(F_{p^n}) acts on grade i by sigma^{-i}(a);
    iota(Pi) sends e_{a,b} to p^{[b = n-1]} e_{a,b+1}.
    """
    n = model.n
    f = model.field
    coeffs = [c if isinstance(c, PadicElement) else f.from_int(c) for c in d]
    nn = n * n
    rows = [[f.zero() for _ in range(nn)] for _ in range(nn)]
    p = f.p
    for i, x in enumerate(coeffs):
        if x.is_zero_at_precision():
            continue
        for a in range(n):
            for b in range(n):
                src = a * n + b
                dst = a * n + (b + i) % n
                carry = (b + i) // n
                grade = model.grading(dst)
                term = x.frobenius_iterate(-grade % f.m if f.m > 1 else 0)
                if carry:
                    term = term * (p ** carry)
                rows[dst][src] = rows[dst][src] + term
    return PadicMatrix(f, rows)


def od_multiply(model: LubinTateModel, d1, d2):
    """Product of two order elements in Pi-power coordinates."""
    n = model.n
    f = model.field
    a = [c if isinstance(c, PadicElement) else f.from_int(c) for c in d1]
    b = [c if isinstance(c, PadicElement) else f.from_int(c) for c in d2]
    out = [f.zero() for _ in range(n)]
    p = f.p
    for i in range(n):
        for j in range(n):
            k = (i + j) % n
            carry = (i + j) // n
            # Pi^i b = sigma^i(b) Pi^i under the rule a Pi = Pi sigma^{-1}(a)
            term = a[i] * b[j].frobenius_iterate(i % f.m if f.m > 1 else 0)
            if carry:
                term = term * (p ** carry)
            out[k] = out[k] + term
    return out


def delta_matrix(n, precision=32, base_p=2) -> DeltaIsogeny:
    """Block isogeny from n copies of the rank-n model to the special model.

    Copy k, basis vector j, maps to p^{floor((j+k)/n)} e_{n-k, j+k mod n};
    the component index keeps the grading equal to j so the map intertwines
    the diagonal order action with iota.
    """
    rational = make_field_cached(base_p, 1, precision)
    nn = n * n
    rows = [[0] * nn for _ in range(nn)]
    for k in range(n):
        for j in range(n):
            src = k * n + j  # copy k, basis j
            a = (-k) % n
            b = (j + k) % n
            dst = a * n + b
            rows[dst][src] = base_p ** ((j + k) // n)
    M = PadicMatrix.from_ints(rational, rows, precision)
    return DeltaIsogeny(n, M, n * (n - 1) // 2)
