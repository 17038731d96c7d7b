"""Core field and matrix arithmetic: construction, valuations, Frobenius,
Teichmueller lifts, Smith-style reduction, saturation, rank certification,
characteristic polynomials, and JSON round-trips."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from padicperiods.padic import (
    AtLeast,
    PadicMatrix,
    PrecisionError,
    certified_rank,
    charpoly,
    element_from_json,
    element_to_json,
    embed_element,
    field_embedding,
    is_exact,
    kernel_basis,
    make_field,
    make_field_cached,
    matrix_from_json,
    matrix_to_json,
    saturate_lattice,
    smith_form,
    teichmueller,
)


class TestFieldConstruction:
    def test_prime_field(self):
        f = make_field(2, 1, 16)
        assert f.m == 1 and f.modulus == (0, 1)
        x = f.from_int(5)
        assert x.frobenius().approx_equal(x)

    def test_degree_two_modulus_and_frobenius(self, Q4):
        # lexicographically smallest irreducible: x^2 + x + 1
        assert Q4.modulus == (1, 1, 1)
        w = Q4.generator()
        # the conjugate root: sigma(w) = -1 - w
        sw = w.frobenius()
        assert sw.approx_equal(-(Q4.one()) - w)

    def test_frobenius_involution(self, Q9):
        rng = random.Random(0)
        for _ in range(50):
            x = Q9.from_coeffs([rng.randrange(3 ** 8) for _ in range(2)], 8)
            assert x.frobenius().frobenius().approx_equal(x)

    def test_modulus_irreducible_mod_p(self):
        f = make_field(5, 3, 10)
        # the defining invariant: frobenius_image is a root of the modulus
        y = f.from_coeffs(list(f.frobenius_image), 10)
        acc = f.zero(10)
        for c in reversed(f.modulus):
            acc = acc * y + f.from_int(c)
        assert acc.is_zero_at_precision()

    def test_bad_precision(self):
        with pytest.raises(ValueError):
            make_field(2, 1, 0)


class TestValuation:
    def test_p_power_times_unit(self, Q2):
        x = Q2.from_int(8 * 5)
        assert x.valuation() == 3

    def test_zero_reports_at_least(self, Q2):
        z = Q2.zero(8)
        v = z.valuation()
        assert not is_exact(v) and v.n >= 8

    def test_unit_sum(self, Q4):
        # 1 + w is a unit since (1 + w) is the other cube root of unity times -1
        w = Q4.generator()
        assert (Q4.one() + w).valuation() == 0

    def test_multiplicativity(self, Q4):
        rng = random.Random(1)
        for _ in range(30):
            x = Q4.from_coeffs([rng.randrange(2 ** 16) for _ in range(2)], 16)
            y = Q4.from_coeffs([rng.randrange(2 ** 16) for _ in range(2)], 16)
            vx, vy = x.valuation(), y.valuation()
            if is_exact(vx) and is_exact(vy):
                v = (x * y).valuation()
                if is_exact(v):
                    assert v == vx + vy


@st.composite
def q4_elements(draw):
    f = make_field_cached(2, 2, 16)
    coeffs = [draw(st.integers(0, 2 ** 16 - 1)) for _ in range(2)]
    return f.from_coeffs(coeffs, 16)


class TestRingAxioms:
    @settings(max_examples=100, deadline=None)
    @given(q4_elements(), q4_elements(), q4_elements())
    def test_ring_axioms(self, x, y, z):
        assert ((x + y) + z).approx_equal(x + (y + z))
        assert (x * y).approx_equal(y * x)
        assert (x * (y + z)).approx_equal(x * y + x * z)
        assert ((x * y) * z).approx_equal(x * (y * z))

    @settings(max_examples=60, deadline=None)
    @given(q4_elements(), q4_elements())
    def test_ultrametric(self, x, y):
        vx, vy, vs = x.valuation(), y.valuation(), (x + y).valuation()
        if is_exact(vx) and is_exact(vy) and is_exact(vs):
            assert vs >= min(vx, vy)

    @settings(max_examples=60, deadline=None)
    @given(q4_elements(), q4_elements())
    def test_frobenius_homomorphism(self, x, y):
        assert (x + y).frobenius().approx_equal(x.frobenius() + y.frobenius())
        assert (x * y).frobenius().approx_equal(x.frobenius() * y.frobenius())


class TestTeichmueller:
    def test_one_and_zero(self, Q4):
        assert teichmueller(Q4, [1]).approx_equal(Q4.one())
        assert teichmueller(Q4, [0]).is_zero_at_precision()

    def test_cube_root_of_unity(self, Q4):
        w = teichmueller(Q4, [0, 1])
        assert (w ** 3).approx_equal(Q4.one())
        assert not (w - Q4.one()).is_zero_at_precision()

    def test_frobenius_functoriality(self, Q9):
        # sigma([a]) = [a^p]
        t = teichmueller(Q9, [1, 1])
        assert t.frobenius().approx_equal(t ** 3)


class TestInverse:
    def test_unit_inverse(self, Q4):
        w = Q4.generator()
        x = Q4.one() + w * 2
        assert (x * x.inverse()).approx_equal(Q4.one(x.abs_precision))

    def test_nonunit_loses_precision(self, Q2):
        x = Q2.from_int(4)
        inv = x.inverse()
        assert inv.valuation() == -2
        assert (x * inv).approx_equal(Q2.one(inv.abs_precision))

    def test_zero_raises(self, Q2):
        with pytest.raises(ZeroDivisionError):
            Q2.zero(8).inverse()


class TestEmbedding:
    def test_tower(self):
        small = make_field_cached(2, 2, 16)
        big = make_field_cached(2, 4, 16)
        gen = field_embedding(small, big)
        w = small.generator()
        img = embed_element(w, big, gen)
        # the image satisfies the same minimal polynomial
        acc = big.zero(16)
        for c in reversed(small.modulus):
            acc = acc * img + big.from_int(c)
        assert acc.is_zero_at_precision()
        # embedding is a ring map on a sample
        x = small.from_coeffs([3, 5], 16)
        y = small.from_coeffs([7, 11], 16)
        assert embed_element(x * y, big, gen).approx_equal(
            embed_element(x, big, gen) * embed_element(y, big, gen)
        )


class TestSmith:
    def _random_matrix(self, f, r, c, rng, bound=None):
        bound = bound or f.p ** f.precision
        return PadicMatrix.from_ints(
            f, [[rng.randrange(bound) for _ in range(c)] for _ in range(r)]
        )

    def test_transform_invariants(self, Q4):
        rng = random.Random(3)
        for _ in range(10):
            M = self._random_matrix(Q4, 3, 3, rng)
            sf = smith_form(M)
            D = sf.L * M * sf.R
            for i in range(3):
                for j in range(3):
                    if i != j:
                        assert D.rows[i][j].is_zero_at_precision()
            assert (sf.L * sf.Linv).approx_equal(PadicMatrix.identity(Q4, 3))
            assert (sf.Rinv * sf.R).approx_equal(PadicMatrix.identity(Q4, 3))
            # divisors non-decreasing among exact ones
            ex = [d for d in sf.divisors if is_exact(d)]
            assert ex == sorted(ex)

    def test_identity_rank(self, Q2):
        I = PadicMatrix.identity(Q2, 4)
        rank, div = certified_rank(I)
        assert rank == 4 and div == [0, 0, 0, 0]

    def test_borderline_divisor(self):
        f = make_field_cached(2, 1, 8)
        M = PadicMatrix.from_ints(f, [[1, 0], [0, 2 ** 8]], 8)
        rank, div = certified_rank(M)
        assert rank == 1
        assert div[0] == 0 and not is_exact(div[1])

    def test_symbolic_rank_one(self, Q4):
        w = Q4.generator()
        M = PadicMatrix(Q4, [[Q4.one(), w], [w, w * w]])
        rank, _ = certified_rank(M)
        assert rank == 1

    def test_unimodular_invariance(self, Q2):
        rng = random.Random(4)
        M = PadicMatrix.from_ints(Q2, [[2, 4], [0, 8]])
        _, base = certified_rank(M)
        for _ in range(10):
            # random unit-determinant integer matrices
            a = rng.randrange(1, 2 ** 8, 2)
            b = rng.randrange(2 ** 8)
            G = PadicMatrix.from_ints(Q2, [[a, b], [0, 1]])
            _, div = certified_rank(G * M)
            assert div == base
            _, div = certified_rank(M * G)
            assert div == base

    def test_kernel(self, Q2):
        M = PadicMatrix.from_ints(Q2, [[1, 2], [2, 4]])
        kern = kernel_basis(M)
        assert len(kern) == 1
        v = kern[0]
        img = [sum((M.rows[i][j] * v[j] for j in range(2)), Q2.zero()) for i in range(2)]
        assert all(x.is_zero_at_precision() for x in img)

    def test_matrix_inverse(self, Q4):
        rng = random.Random(5)
        for _ in range(5):
            M = self._random_matrix(Q4, 3, 3, rng, bound=2 ** 10)
            try:
                inv = M.inverse()
            except ZeroDivisionError:
                continue
            assert (M * inv).approx_equal(PadicMatrix.identity(Q4, 3, inv.precision))


class TestSaturate:
    def test_divide_single_column(self, Q2):
        M = PadicMatrix.from_ints(Q2, [[2], [2]])
        S = saturate_lattice(M)
        _, div = certified_rank(S)
        assert div == [0]
        # span unchanged after inverting p: (1,1) generates the same line
        assert S.rows[0][0].approx_equal(S.rows[1][0])

    def test_identity(self, Q2):
        I = PadicMatrix.identity(Q2, 3)
        S = saturate_lattice(I)
        _, div = certified_rank(S)
        assert div == [0, 0, 0]

    def test_mixed_valuations(self, Q2):
        M = PadicMatrix.from_ints(Q2, [[4], [8]])
        S = saturate_lattice(M)
        _, div = certified_rank(S)
        assert div == [0]
        # the saturated generator is (1, 2) up to a unit
        ratio = S.rows[1][0] / S.rows[0][0]
        assert ratio.valuation() == 1

    def test_non_integral_rejected(self, Q2):
        x = Q2.from_int(2).inverse()
        with pytest.raises(ValueError):
            saturate_lattice(PadicMatrix(Q2, [[x]]))


class TestCharpoly:
    def test_companion(self, Q2):
        # companion matrix of t^2 - t - 1
        M = PadicMatrix.from_ints(Q2, [[0, 1], [1, 1]])
        c = charpoly(M)
        assert c[0].approx_equal(Q2.from_int(-1))
        assert c[1].approx_equal(Q2.from_int(-1))
        assert c[2].approx_equal(Q2.one())

    def test_matches_generic_path(self, Q4):
        # generic (extension-field) path against the plain-integer path
        rng = random.Random(6)
        rows = [[rng.randrange(2 ** 8) for _ in range(4)] for _ in range(4)]
        f1 = make_field_cached(2, 1, 16)
        c_int = charpoly(PadicMatrix.from_ints(f1, rows))
        c_gen = charpoly(PadicMatrix.from_ints(Q4, rows))
        for a, b in zip(c_int, c_gen):
            assert a.coeffs[0] == b.coeffs[0]

    def test_trace_and_det(self, Q2):
        M = PadicMatrix.from_ints(Q2, [[3, 1], [4, 5]])
        c = charpoly(M)
        # det = 11, trace = 8: t^2 - 8t + 11
        assert c[0].approx_equal(Q2.from_int(11))
        assert c[1].approx_equal(Q2.from_int(-8))


class TestJson:
    def test_element_round_trip(self, Q4):
        x = Q4.from_coeffs([123, 456], 16, shift=1)
        y = element_from_json(element_to_json(x))
        assert y.approx_equal(x) and y.shift == x.shift

    def test_matrix_round_trip(self, Q4):
        w = Q4.generator()
        M = PadicMatrix(Q4, [[Q4.one(), w], [w * 2, w.inverse()]])
        M2 = matrix_from_json(matrix_to_json(M))
        assert M2.approx_equal(M)
