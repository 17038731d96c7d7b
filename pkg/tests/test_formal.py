"""Truncated formal group: logarithm, group law axioms, [p]-series height,
roots-of-unity action."""

from fractions import Fraction

import pytest

from padicperiods.padic import make_field_cached, teichmueller
from padicperiods.formal import (
    BivariateSeriesTrunc,
    IntegralityError,
    PowerSeriesTrunc,
    group_law,
    height_certificate,
    lubin_tate_log,
    p_series,
    zeta_action,
)
from padicperiods.formal import _compose_univariate_bivariate

GRID = [(2, 1), (2, 2), (3, 1), (3, 2)]


class TestLog:
    def test_h1_series(self):
        f = lubin_tate_log(2, 1, 4)
        assert f.coeffs[1] == 1
        assert f.coeffs[2] == Fraction(1, 2)
        assert f.coeffs[3] == 0
        assert f.coeffs[4] == Fraction(1, 4)

    def test_h2_series(self):
        f = lubin_tate_log(2, 2, 4)
        assert f.coeffs[1] == 1 and f.coeffs[4] == Fraction(1, 2)
        assert f.coeffs[2] == 0 and f.coeffs[3] == 0

    def test_degree_one(self):
        assert lubin_tate_log(7, 3, 1).coeffs == [Fraction(0), Fraction(1)]

    def test_reversion_inverts(self):
        f = lubin_tate_log(3, 1, 9)
        g = f.reversion()
        comp = g.compose(f)
        assert comp.coeffs[1] == 1
        assert all(c == 0 for k, c in enumerate(comp.coeffs) if k != 1)


class TestGroupLaw:
    def test_degree_two_multiplicative_shape(self):
        fgl = group_law(2, 1, 2)
        assert fgl.law.get(1, 0) == 1
        assert fgl.law.get(0, 1) == 1
        assert fgl.law.get(1, 1) == -1

    def test_leading_correction_at_p_power(self):
        fgl = group_law(2, 2, 3)
        # first correction appears only at total degree p^h = 4
        for (i, j), c in fgl.law.coeffs.items():
            if i + j in (2, 3):
                assert c == 0, (i, j, c)

    def test_unit_axiom(self):
        for p, h in GRID:
            law = group_law(p, h, p ** h + p).law
            for (i, j), c in law.coeffs.items():
                if j == 0:
                    assert (i, c) == (1, Fraction(1))
                if i == 0:
                    assert (j, c) == (1, Fraction(1))

    def test_commutativity(self):
        for p, h in GRID:
            law = group_law(p, h, p ** h + p).law
            assert law.swap().coeffs == law.coeffs

    def test_log_additivity(self):
        for p, h in GRID:
            D = p ** h + p
            fgl = group_law(p, h, D)
            fx = BivariateSeriesTrunc(
                {(k, 0): c for k, c in enumerate(fgl.log.coeffs) if c != 0}, D
            )
            lhs = _compose_univariate_bivariate(fgl.log, fgl.law)
            diff = lhs + (fx + fx.swap()).scale(-1)
            assert not diff.coeffs

    def test_associativity(self):
        # direct trivariate check of F(F(X,Y),Z) = F(X,F(Y,Z))
        for p, h in [(2, 1), (2, 2), (3, 1)]:
            D = p ** h + p
            law = group_law(p, h, D).law

            def tri_mul(a, b):
                out = {}
                for k1, c1 in a.items():
                    for k2, c2 in b.items():
                        k = tuple(x + y for x, y in zip(k1, k2))
                        if sum(k) <= D:
                            out[k] = out.get(k, Fraction(0)) + c1 * c2
                return {k: v for k, v in out.items() if v != 0}

            def tri_eval(A, B):
                # law(A, B) with A, B trivariate, zero constant term
                apow = [{(0, 0, 0): Fraction(1)}]
                bpow = [{(0, 0, 0): Fraction(1)}]
                for _ in range(D):
                    apow.append(tri_mul(apow[-1], A))
                    bpow.append(tri_mul(bpow[-1], B))
                out = {}
                for (i, j), c in law.coeffs.items():
                    for k, v in tri_mul(apow[i], bpow[j]).items():
                        out[k] = out.get(k, Fraction(0)) + c * v
                return {k: v for k, v in out.items() if v != 0}

            X = {(1, 0, 0): Fraction(1)}
            Y = {(0, 1, 0): Fraction(1)}
            Z = {(0, 0, 1): Fraction(1)}
            lhs = tri_eval(tri_eval(X, Y), Z)
            rhs = tri_eval(X, tri_eval(Y, Z))
            assert lhs == rhs, (p, h)

    def test_integrality(self):
        for p, h in GRID:
            law = group_law(p, h, p ** h + p).law
            for c in law.coeffs.values():
                assert c.denominator % p != 0


class TestPSeries:
    def test_2_1_leading_terms(self):
        fgl = group_law(2, 1, 4)
        ps = p_series(fgl)
        assert ps.coeffs[1] == 2 and ps.coeffs[2] == -1

    def test_linear_term_is_p(self):
        for p, h in GRID:
            ps = p_series(group_law(p, h, p ** h + p))
            assert ps.coeffs[1] == p

    def test_height(self):
        for p, h in GRID:
            k, _ = height_certificate(group_law(p, h, p ** h + p))
            assert k == p ** h

    def test_truncation_too_small(self):
        fgl = group_law(2, 2, 3)
        with pytest.raises(ValueError):
            p_series(fgl)

    def test_p_exponent_support(self):
        # [p] is supported on exponents congruent to 1 mod p^h - 1
        fgl = group_law(2, 2, 8)
        ps = p_series(fgl)
        for k, c in enumerate(ps.coeffs):
            if c != 0:
                assert k % 3 == 1


class TestZetaAction:
    def test_identity_root(self):
        fgl = group_law(2, 1, 4)
        K = make_field_cached(2, 1, 16)
        s = zeta_action(fgl, K.one(16))
        assert s.coeffs[1].approx_equal(K.one(16))

    def test_mu3_endomorphism(self):
        fgl = group_law(2, 2, 6)
        K = make_field_cached(2, 2, 16)
        w = teichmueller(K, [0, 1])
        s = zeta_action(fgl, w)
        assert s.coeffs[1] is w

    def test_minus_one_for_odd_p(self):
        fgl = group_law(3, 1, 6)
        K = make_field_cached(3, 1, 16)
        z = teichmueller(K, [2])  # -1
        s = zeta_action(fgl, z)
        assert (s.coeffs[1] + K.one(16)).is_zero_at_precision()

    def test_wrong_order_rejected(self):
        fgl = group_law(2, 2, 6)
        K = make_field_cached(2, 2, 16)
        # 3 is not a root of unity of order dividing p^h - 1 = 3
        with pytest.raises(ValueError):
            zeta_action(fgl, K.from_int(3))


class TestSeriesPlumbing:
    def test_mul_truncation(self):
        a = PowerSeriesTrunc([0, 1, 1], 2)
        b = PowerSeriesTrunc([0, 1], 2)
        c = a * b
        assert c.coeffs == [Fraction(0), Fraction(0), Fraction(1)]

    def test_json(self):
        a = PowerSeriesTrunc([0, 1, Fraction(1, 2)], 2)
        assert a.to_json() == [[1, "1/1"], [2, "1/2"]]

    def test_bivariate_json_sorted(self):
        b = BivariateSeriesTrunc({(1, 0): Fraction(1), (0, 1): Fraction(1)}, 2)
        assert b.to_json() == [[[0, 1], "1/1"], [[1, 0], "1/1"]]
