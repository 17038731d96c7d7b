"""Semilinear Frobenius modules: Newton slopes, fixed points, admissibility.

An isocrystal here is a finite free module over Q_{p^m} together with an
invertible matrix A encoding the sigma-semilinear operator v -> A*sigma(v).
Slopes are read off the Newton polygon of the characteristic polynomial of
the sigma^m-linearization.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .padic import (
    FieldDescriptor,
    PadicMatrix,
    PrecisionError,
    charpoly,
    certified_rank,
    is_exact,
    kernel_basis,
    make_field_cached,
    matrix_from_json,
    matrix_to_json,
    smith_form,
)


@dataclass
class Isocrystal:
    field: FieldDescriptor
    dim: int
    frob_matrix: PadicMatrix

    def __post_init__(self):
        if self.frob_matrix.nrows != self.dim or self.frob_matrix.ncols != self.dim:
            raise ValueError("frobenius matrix shape mismatch")

    def apply(self, vec):
        """phi(v) = A * sigma(v) for a column vector (list of elements)."""
        sv = [x.frobenius() for x in vec]
        return [
            sum((a * b for a, b in zip(row[1:], sv[1:])), row[0] * sv[0])
            for row in self.frob_matrix.rows
        ]

    def to_json(self):
        return {
            "field": {"p": self.field.p, "m": self.field.m},
            "dim": self.dim,
            "frob_matrix": matrix_to_json(self.frob_matrix),
        }

    @classmethod
    def from_json(cls, d):
        M = matrix_from_json(d["frob_matrix"])
        return cls(M.field, d["dim"], M)


@dataclass
class FilteredIsocrystal:
    base: Isocrystal
    filtration: PadicMatrix  # columns span Fil inside K^dim, K an extension field
    hodge_type: int = 1  # codimension of the filtration

    def __post_init__(self):
        rank, _ = certified_rank(self.filtration)
        if rank != self.filtration.ncols:
            raise ValueError("filtration spanning matrix not of full certified rank")


def linearize(iso: Isocrystal) -> PadicMatrix:
    """B = A * sigma(A) * ... * sigma^{m-1}(A); the matrix of phi^m."""
    A = iso.frob_matrix
    B = A
    for k in range(1, iso.field.m):
        B = B * A.map_frobenius(k)
    return B


def newton_slopes(iso: Isocrystal):
    """Multiset of Newton slopes as a sorted list of Fractions.

    Slopes are 1/m times the polygon slopes of the characteristic polynomial
    of the linearization; their sum equals the valuation of det(A).
    """
    m = iso.field.m
    coeffs = charpoly(linearize(iso))
    pts = []
    unknown = []
    for i, c in enumerate(coeffs):
        v = c.valuation()
        if is_exact(v):
            pts.append((i, v))
        else:
            unknown.append((i, v.n))
    if not pts or pts[0][0] != 0:
        raise PrecisionError("Newton polygon unresolved: constant term indistinguishable from zero")
    hull = _lower_hull(pts)
    for i, bound in unknown:
        if _hull_value(hull, i) > bound:
            raise PrecisionError("precision insufficient to resolve the Newton polygon")
    slopes = []
    for (i1, v1), (i2, v2) in zip(hull, hull[1:]):
        s = Fraction(v1 - v2, i2 - i1) / m
        slopes.extend([s] * (i2 - i1))
    return sorted(slopes)


def _lower_hull(pts):
    hull = []
    for pt in pts:
        while len(hull) >= 2 and _turns_up(hull[-2], hull[-1], pt):
            hull.pop()
        hull.append(pt)
    return hull


def _turns_up(a, b, c):
    # drop b if it lies on or above segment a-c
    return (b[1] - a[1]) * (c[0] - a[0]) >= (c[1] - a[1]) * (b[0] - a[0])


def _hull_value(hull, x):
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if x1 <= x <= x2:
            return Fraction(y1 * (x2 - x) + y2 * (x - x1), x2 - x1)
    return Fraction(hull[-1][1])


def slopes_to_json(slopes):
    return [[s.numerator, s.denominator] for s in slopes]


def phi_fixed_points(iso: Isocrystal, twist=0):
    """Q_p-basis of { v : A*sigma(v) = p^twist * v }.

    Returns a list of vectors over the isocrystal's field.  A non-integral
    twist has no solutions and yields the empty list.
    """
    tw = Fraction(twist)
    if tw.denominator != 1:
        return []
    tw = tw.numerator
    f = iso.field
    n, m = iso.dim, f.m
    N = iso.frob_matrix.precision
    gen = f.generator(N) if m > 1 else f.one(N)
    # columns of the big Q_p-linear matrix of v -> A*sigma(v) - p^twist*v
    raw_cols = []
    for j in range(n):
        for k in range(m):
            vec = [f.zero(N)] * n
            vec[j] = gen ** k
            img = iso.apply(vec)
            if tw >= 0:
                img[j] = img[j] - vec[j] * (f.p ** tw)
            else:
                img[j] = img[j] - vec[j] * f.from_int(f.p ** (-tw)).inverse()
            raw_cols.append(img)
    Nc = min(x.abs_precision for col in raw_cols for x in col)
    base = make_field_cached(f.p, 1, Nc)
    cols = []
    for img in raw_cols:
        col = []
        for x in img:
            col.extend(
                base.from_coeffs([c.coeffs[0]], Nc, c.shift)
                for c in x.qp_coordinates()
            )
        cols.append(col)
    big = PadicMatrix(base, cols).transpose()
    kern = kernel_basis(big)
    out = []
    for vec in kern:
        grouped = []
        for j in range(n):
            coeffs = vec[j * m : (j + 1) * m]
            acc = f.zero(N)
            for k, c in enumerate(coeffs):
                lifted = f.from_coeffs([c.coeffs[0]], c.abs_precision, c.shift)
                acc = acc + lifted * (gen ** k)
            grouped.append(acc)
        out.append(grouped)
    return out


@dataclass
class AdmissibilityReport:
    sub_reports: list
    full_t_H: int
    full_t_N: Fraction
    admissible: bool

    def to_json(self):
        return {
            "sub_objects": [
                {
                    "dim": d,
                    "t_H": tH,
                    "t_N": [tN.numerator, tN.denominator],
                    "ok": ok,
                }
                for d, tH, tN, ok in self.sub_reports
            ],
            "full": {
                "t_H": self.full_t_H,
                "t_N": [self.full_t_N.numerator, self.full_t_N.denominator],
            },
            "admissible": self.admissible,
        }


def weak_admissibility_sample(fi: FilteredIsocrystal, sub_objects):
    """Check t_H(N) <= t_N(N) on the supplied phi-stable subspaces.

    Each sub-object is a spanning matrix over the base field.  t_N is the
    slope sum of the restricted operator, t_H the dimension of the
    intersection with the filtration.  Equality must hold on the full
    object for the verdict to be 'admissible'.
    """
    iso = fi.base
    reports = []
    ok_all = True
    for S in sub_objects:
        rest = restrict_frobenius(iso, S)
        t_N = sum(newton_slopes(rest), Fraction(0))
        t_H = intersection_dim(S, fi.filtration)
        ok = t_H <= t_N
        ok_all = ok_all and ok
        reports.append((S.ncols, t_H, t_N, ok))
    full_t_N = sum(newton_slopes(iso), Fraction(0))
    full_t_H = fi.filtration.ncols
    admissible = ok_all and Fraction(full_t_H) == full_t_N
    return AdmissibilityReport(reports, full_t_H, full_t_N, admissible)


def restrict_frobenius(iso: Isocrystal, S: PadicMatrix) -> Isocrystal:
    """Isocrystal structure on the span of the columns of S; errors if not phi-stable."""
    d = S.ncols
    imgs = []
    for j in range(d):
        col = [S.rows[i][j] for i in range(S.nrows)]
        imgs.append(iso.apply(col))
    B = PadicMatrix(S.field, imgs).transpose()  # n x d, images as columns
    X = solve_columns(S, B)
    if X is None:
        raise ValueError("subspace is not phi-stable at precision")
    return Isocrystal(iso.field, d, X)


def solve_columns(S: PadicMatrix, B: PadicMatrix):
    """Solve S*X = B for X when S has full column rank; None if inconsistent."""
    sf = smith_form(S)
    d = S.ncols
    if sf.rank < d:
        raise PrecisionError("spanning matrix rank indeterminate")
    f = S.field
    LB = sf.L * B
    # top d rows give D * Rinv * X; bottom rows must vanish
    for i in range(d, S.nrows):
        for e in LB.rows[i]:
            if not e.is_zero_at_precision():
                return None
    Dinv_top = PadicMatrix.zero(f, d, d, S.precision)
    for k in range(d):
        Dinv_top.rows[k][k] = sf.pivots[k].inverse()
    return sf.R * (Dinv_top * PadicMatrix(f, LB.rows[:d]))


def intersection_dim(A: PadicMatrix, B: PadicMatrix) -> int:
    """dim(colspan A  intersect  colspan B), certified at precision."""
    A2, B2 = _common_field(A, B)
    ra, _ = certified_rank(A2)
    rb, _ = certified_rank(B2)
    joint = PadicMatrix(A2.field, [ra_row + rb_row for ra_row, rb_row in zip(A2.rows, B2.rows)])
    rj, _ = certified_rank(joint)
    return ra + rb - rj


def _common_field(A, B):
    from .padic import embed_element, field_embedding

    if A.field == B.field:
        return A, B
    if B.field.m % A.field.m == 0:
        big, small, swap = B.field, A, False
    elif A.field.m % B.field.m == 0:
        big, small, swap = A.field, B, True
    else:
        raise ValueError("incomparable fields")
    gen = field_embedding(small.field, big)
    emb = PadicMatrix(big, [[embed_element(e, big, gen) for e in row] for row in small.rows])
    return (A, emb) if swap else (emb, B)
