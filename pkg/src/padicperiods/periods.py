"""Rank-(n-1) period matrices, the two filtrations they carry, hyperplane
membership in the rational-hyperplane complement, and the two-sided group
action with its transformation laws.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .padic import (
    FieldDescriptor,
    PadicMatrix,
    PrecisionError,
    certified_rank,
    embed_element,
    field_embedding,
    is_exact,
    make_field_cached,
    matrix_to_json,
    smith_form,
)
from .models import LubinTateModel, iota_matrix


class RankCertificationError(ValueError):
    """Matrix rejected: certified rank differs from n-1.

    ``kind`` is "full_rank" when all elementary divisors are exact (the
    determinant is provably nonzero at precision) and "rank_deficient" when
    fewer than n-1 divisors could be certified (the rank may be below n-1,
    or the precision may be insufficient to tell).
    """

    def __init__(self, kind, divisors):
        self.kind = kind
        self.divisors = divisors
        super().__init__(f"rank certification failed ({kind}): divisors {divisors}")


@dataclass
class ProjectivePoint:
    """A hyperplane in K^n: spanning basis (columns) plus normal covector."""

    basis: PadicMatrix  # n x (n-1), columns span the hyperplane
    normal: list  # length-n covector, normal . basis ~ 0

    @property
    def dim(self):
        return self.basis.ncols

    def to_json(self):
        return {
            "basis": matrix_to_json(self.basis),
            "normal": [[str(c) for c in e.coeffs] for e in self.normal],
        }


@dataclass
class PeriodMatrix:
    X: PadicMatrix
    n: int
    divisors: list

    @property
    def field(self):
        return self.X.field

    @property
    def precision(self):
        return self.X.precision


def from_matrix(X: PadicMatrix) -> PeriodMatrix:
    """Certify rank n-1 (det indistinguishable from zero) or reject."""
    n = X.nrows
    if X.ncols != n:
        raise ValueError("matrix must be square")
    rank, divisors = certified_rank(X)
    if rank == n:
        raise RankCertificationError("full_rank", divisors)
    if rank < n - 1:
        raise RankCertificationError("rank_deficient", divisors)
    return PeriodMatrix(X, n, divisors)


def fil_G(pm: PeriodMatrix) -> ProjectivePoint:
    """Column space of X with its left-kernel covector."""
    sf = smith_form(pm.X)
    n = pm.n
    basis = PadicMatrix(
        pm.field, [[sf.Linv.rows[i][k] for k in range(n - 1)] for i in range(n)]
    )
    normal = list(sf.L.rows[n - 1])
    return ProjectivePoint(basis, normal)


def fil_H(pm: PeriodMatrix) -> ProjectivePoint:
    """Row space of X with the right-kernel covector."""
    sf = smith_form(pm.X)
    n = pm.n
    basis = PadicMatrix(
        pm.field, [[sf.Rinv.rows[k][i] for k in range(n - 1)] for i in range(n)]
    )
    normal = [sf.R.rows[i][n - 1] for i in range(n)]
    return ProjectivePoint(basis, normal)


def correspond(pm: PeriodMatrix) -> PeriodMatrix:
    """The tower correspondence at the matrix level: transpose (an involution)."""
    return PeriodMatrix(pm.X.transpose(), pm.n, pm.divisors)


@dataclass
class OmegaVerdict:
    status: str  # "in_Omega" | "not_in_Omega" | "indeterminate"
    witness: list | None = None  # rational vector in the hyperplane, if any

    @property
    def in_omega(self):
        return self.status == "in_Omega"

    def to_json(self):
        d = {"status": self.status}
        if self.witness is not None:
            d["witness"] = [str(x) for x in self.witness]
        return d


def omega_membership(point: ProjectivePoint) -> OmegaVerdict:
    """Does the hyperplane avoid every nonzero rational vector?

    The normal covector coordinates are expanded over a Q_p-basis of K; the
    hyperplane misses all rational vectors iff that n x m rational matrix
    has full row rank n.  A certified deficiency yields a rational witness
    vector lying in the hyperplane at the working precision.
    """
    normal = point.normal
    n = len(normal)
    f = normal[0].field
    N = min(e.abs_precision for e in normal)
    if N < 1:
        return OmegaVerdict("indeterminate")
    base = make_field_cached(f.p, 1, N)
    # n x m over Q_p, homed in one field at the common precision
    rows = [
        [base.from_coeffs([c.coeffs[0]], N, c.shift) for c in e.qp_coordinates()]
        for e in normal
    ]
    M = PadicMatrix(base, rows)
    rank, divisors = certified_rank(M)
    if rank == n:
        return OmegaVerdict("in_Omega")
    # rank-deficient: extract a left-kernel vector of M as the witness
    sf = smith_form(M)
    witness = list(sf.L.rows[n - 1])
    witness = _primitive_scale(witness)
    if witness is None:
        return OmegaVerdict("indeterminate")
    return OmegaVerdict("not_in_Omega", witness)


def _primitive_scale(vec):
    """Rescale by a p-power so the vector is integral and primitive."""
    vals = [x.valuation() for x in vec]
    exact = [v for v in vals if is_exact(v)]
    if not exact:
        return None
    vmin = min(exact)
    p = vec[0].field.p
    if vmin > 0:
        inv = vec[0].field.from_int(p ** vmin).inverse()
        return [x * inv for x in vec]
    if vmin < 0:
        return [x * (p ** (-vmin)) for x in vec]
    return vec


def act(g, d, pm: PeriodMatrix, model: LubinTateModel, embedding_gen=None) -> PeriodMatrix:
    """(g, d) . X = g^T * X * iota(d)^{-1}.

    ``g`` is an n x n rational matrix (over Q_p, unit determinant up to
    p-powers), ``d`` an order element in Pi-power coordinates over the
    model's coefficient field W(F_{p^n}).  The period field must contain
    Q_{p^n} (n | m).
    """
    K = pm.field
    n = pm.n
    if K.m % model.field.m != 0:
        raise ValueError("period field must contain the coefficient field (n | m)")
    gK = _embed_rational(g, K, pm.precision)
    iota = iota_matrix(model, d)
    if embedding_gen is None:
        embedding_gen = field_embedding(model.field, K)
    iotaK = PadicMatrix(
        K, [[embed_element(e, K, embedding_gen) for e in row] for row in iota.rows]
    )
    try:
        iota_inv = iotaK.inverse()
    except ZeroDivisionError:
        raise ValueError("order element is not invertible at precision")
    Y = gK.transpose() * pm.X * iota_inv
    return from_matrix(Y)


def _embed_rational(g, K, precision):
    if isinstance(g, PadicMatrix):
        if g.field == K:
            return g
        return PadicMatrix(
            K,
            [
                [
                    K.from_coeffs([e.coeffs[0]], min(e.abs_precision, precision), e.shift)
                    if e.field.m == 1
                    else (_ for _ in ()).throw(ValueError("g must be rational"))
                    for e in row
                ]
                for row in g.rows
            ],
        )
    return PadicMatrix.from_ints(K, g, precision)


def subspaces_equal(A: ProjectivePoint, B: ProjectivePoint) -> bool:
    """Same hyperplane at precision: stacking the bases does not raise rank."""
    ra, _ = certified_rank(A.basis)
    joint = PadicMatrix(
        A.basis.field,
        [rowa + rowb for rowa, rowb in zip(A.basis.rows, B.basis.rows)],
    )
    rj, _ = certified_rank(joint)
    rb, _ = certified_rank(B.basis)
    return ra == rb == rj == A.dim


def translate_point(point: ProjectivePoint, M: PadicMatrix) -> ProjectivePoint:
    """The image hyperplane {M v : v in the hyperplane}."""
    basis = M * point.basis
    sf = smith_form(basis)
    n = M.nrows
    normal = list(sf.L.rows[n - 1]) if sf.rank == n - 1 else list(sf.L.rows[-1])
    return ProjectivePoint(basis, normal)


def random_point(n, field: FieldDescriptor, seed, max_tries=200) -> PeriodMatrix:
    """Deterministic seeded sampler for certified points with fil_G in Omega."""
    if field.m < n:
        raise ValueError(
            f"field too small: need [K:Q_p] >= {n}, got {field.m}"
        )
    rng = random.Random(seed)
    N = field.precision
    for _ in range(max_tries):
        normal = [_random_unit_vectorish(field, rng) for _ in range(n)]
        point = ProjectivePoint(PadicMatrix.identity(field, n), normal)  # basis unused here
        verdict = omega_membership(point)
        if not verdict.in_omega:
            continue
        # hyperplane basis: kernel of the covector
        row = PadicMatrix(field, [normal])
        sf = smith_form(row)
        B = PadicMatrix(
            field, [[sf.R.rows[i][k] for k in range(1, n)] for i in range(n)]
        )
        C = PadicMatrix.from_ints(
            field, [[rng.randrange(field.p ** N) for _ in range(n)] for _ in range(n - 1)]
        )
        rank_c, _ = certified_rank(C)
        if rank_c < n - 1:
            continue
        X = B * C
        try:
            pm = from_matrix(X)
        except RankCertificationError:
            continue
        if omega_membership(fil_G(pm)).in_omega:
            return pm
    raise PrecisionError("sampling budget exhausted")


def _random_unit_vectorish(field, rng):
    N = field.precision
    coeffs = [rng.randrange(field.p ** N) for _ in range(field.m)]
    return field.from_coeffs(coeffs, N)
