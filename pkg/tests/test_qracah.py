from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbiortho.errors import DomainError, InvalidParameters
from qbiortho.qcore import qpochhammer
from qbiortho.qracah import (
    DEFAULT_PARAMS,
    RacahParams,
    degree_pairs,
    inner_product,
    racah_F,
    racah_F_alt,
    racah_G,
    racah_G_alt,
    racah_norm,
    racah_weight,
    support,
    validate_params,
    weight_sum,
)

P = DEFAULT_PARAMS


def test_default_params_are_admissible():
    assert validate_params(P) == []
    assert validate_params(P.with_N(4)) == []


def test_pole_at_c_equal_q_to_N():
    bad = RacahParams(3, P.alpha, P.gamma, P.gamma_p, P.q ** 3, P.q)
    violations = validate_params(bad)
    assert violations
    assert any("1 - c q^-N" in v for v in violations)


def test_pole_at_gamma_equal_inverse_q():
    bad = RacahParams(3, P.alpha, 1 / P.q, P.gamma_p, P.c, P.q)
    violations = validate_params(bad)
    assert any("(gamma)" in v for v in violations)


def test_floats_stay_floats_and_exact_stays_exact():
    assert isinstance(racah_weight(1, 1, P), F)
    fp = RacahParams(3, 1 / 3, 0.2, 1 / 7, 1.5, 0.5)
    assert isinstance(racah_weight(1, 1, fp), float)
    assert racah_weight(1, 1, fp) == pytest.approx(float(racah_weight(1, 1, P)), rel=1e-12)


def test_invalid_params():
    with pytest.raises(InvalidParameters):
        RacahParams(-1, P.alpha, P.gamma, P.gamma_p, P.c, P.q)
    with pytest.raises(InvalidParameters):
        RacahParams(3, 0, P.gamma, P.gamma_p, P.c, P.q)


class TestWeight:
    def test_zero_above_antidiagonal(self):
        for x in range(P.N + 1):
            for y in range(P.N + 1):
                w = racah_weight(x, y, P)
                assert (w == 0) == (x + y > P.N)

    def test_origin(self):
        a, g, gp, c, q, N = P.alpha, P.gamma, P.gamma_p, P.c, P.q, P.N
        num = qpochhammer(a * q / (g * gp), q, N) * qpochhammer(gp / c, q, N) * qpochhammer(a * c * q / gp, q, N)
        den = qpochhammer(a * q, q, N) * qpochhammer(1 / c, q, N) * qpochhammer(a * c * q / (g * gp), q, N)
        assert racah_weight(0, 0, P) == num / den

    @pytest.mark.parametrize("N", range(1, 7))
    def test_sums_to_one(self, N):
        assert weight_sum(P.with_N(N)) == 1

    def test_outside_grid(self):
        with pytest.raises(DomainError):
            racah_weight(4, 0, P)


class TestSeries:
    def test_trivial_degree(self):
        for x, y in support(P.N):
            assert racah_F(0, 0, x, y, P) == 1
            assert racah_F_alt(0, 0, x, y, P) == 1
            assert racah_G(0, 0, x, y, P) == 1
            assert racah_G_alt(0, 0, x, y, P) == 1

    @pytest.mark.parametrize("N", range(1, 5))
    def test_representations_agree(self, N):
        prm = P.with_N(N)
        for m, n in degree_pairs(N):
            for x, y in support(N):
                assert racah_F(m, n, x, y, prm) == racah_F_alt(m, n, x, y, prm)
                assert racah_G(m, n, x, y, prm) == racah_G_alt(m, n, x, y, prm)

    def test_F_alt_at_origin_is_prefactor(self):
        # both inner sums collapse to the j = k = 0 term
        a, g, gp, q, N = P.alpha, P.gamma, P.gamma_p, P.q, P.N
        for m, n in degree_pairs(N):
            expected = (a * q ** (N + n + 1) / (g * gp)) ** m * q ** (N * n)
            assert racah_F_alt(m, n, 0, 0, P) == expected

    def test_F_literal_two_term_sum(self):
        prm = P.with_N(2)
        a, g, gp, c, q, N = prm.alpha, prm.gamma, prm.gamma_p, prm.c, prm.q, prm.N
        ggp = g * gp
        x, y = 1, 0
        pre = (1 - a * q ** (N + 1 - x - y) / ggp) * (1 - a * c * q ** (1 + y - x) / ggp)
        pre /= (1 - q ** -N) * (1 - 1 / c)
        pre *= c ** -1 * q ** x
        i1 = (1 - q ** -1) * (1 - g * q ** x) * (1 - ggp * q ** (x - N - 1) / (a * c)) * (1 - ggp * q ** -1 / a)
        i1 /= (1 - q) * (1 - g) * (1 - ggp * q ** (x - y - 1) / (a * c)) * (1 - ggp * q ** (x + y - N - 1) / a)
        assert racah_F(1, 0, x, y, prm) == pre * (1 + i1 * q)

    def test_G_10_is_affine_in_u(self):
        a, g, gp, c, q, N = P.alpha, P.gamma, P.gamma_p, P.c, P.q, P.N
        pts = [(x, 0) for x in range(3)]
        u = [q ** -x + g * gp * q ** (x - N - 1) / (a * c) for x, _ in pts]
        v = [racah_G(1, 0, x, y, P) for x, y in pts]
        slope = (v[1] - v[0]) / (u[1] - u[0])
        assert v[2] - v[0] - slope * (u[2] - u[0]) == 0
        # and independent of y
        assert racah_G(1, 0, 1, 2, P) == v[1]

    def test_G_alt_boundary(self):
        for m, n in degree_pairs(P.N):
            if m + n == P.N:
                assert racah_G_alt(m, n, 1, 1, P) == racah_G(m, n, 1, 1, P)

    def test_domain_guards(self):
        with pytest.raises(DomainError):
            racah_F_alt(1, 0, 2, 2, P)
        with pytest.raises(DomainError):
            racah_G_alt(2, 2, 0, 0, P)
        with pytest.raises(DomainError):
            racah_F(-1, 0, 0, 0, P)


class TestBiorthogonality:
    def test_norm_examples(self):
        assert racah_norm(0, 0, P) == 1
        assert racah_norm(1, 0, P) != racah_norm(0, 1, P)

    def test_trivial_pair_is_weight_sum(self):
        assert inner_product(0, 0, 0, 0, P) == 1

    def test_diagonal(self):
        assert inner_product(1, 1, 1, 1, P) == racah_norm(1, 1, P)
        assert inner_product(1, 0, 1, 0, P) == racah_norm(1, 0, P)

    def test_off_diagonal_exact_zero(self):
        v = inner_product(1, 0, 0, 1, P)
        assert isinstance(v, F) and v == 0

    def test_full_table_N3(self):
        pairs = degree_pairs(3)
        for p1 in pairs:
            for p2 in pairs:
                expected = racah_norm(*p1, P) if p1 == p2 else 0
                assert inner_product(*p1, *p2, P) == expected

    def test_out_of_range_degree(self):
        with pytest.raises(DomainError):
            inner_product(3, 1, 0, 0, P)


small = st.fractions(min_value=F(1, 9), max_value=F(8, 9), max_denominator=9)


@given(small, small, small, st.sampled_from([F(3, 2), F(5, 3), F(7, 4), F(2, 5)]),
       st.sampled_from([F(1, 2), F(1, 3), F(2, 5)]), st.integers(1, 3))
@settings(max_examples=25, deadline=None)
def test_identities_for_random_admissible_params(alpha, gamma, gamma_p, c, q, N):
    prm = RacahParams(N, alpha, gamma, gamma_p, c, q)
    if validate_params(prm):
        return
    assert weight_sum(prm) == 1
    pairs = degree_pairs(N)
    for p1 in pairs:
        for p2 in pairs:
            expected = racah_norm(*p1, prm) if p1 == p2 else 0
            assert inner_product(*p1, *p2, prm) == expected
