import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbiortho.classical import (
    TratnikParams,
    WilsonParams,
    log_gamma_complex,
    log_wilson_weight,
    poch,
    tratnik_P,
    tratnik_Pbar,
    tratnik_Q,
    tratnik_Qbar,
    tratnik_weight,
    wilson_inner_product,
    wilson_norm,
    wilson_poly,
    wilson_poly_whipple,
    wilson_weight,
)
from qbiortho.errors import InvalidParameters, PoleError

DESK = WilsonParams(1, 0.8, 0.6, 0.4)
pos = st.floats(min_value=0.1, max_value=2.0)


class TestLogGamma:
    def test_simple_values(self):
        assert abs(log_gamma_complex(1)) < 1e-15
        assert log_gamma_complex(0.5).real == pytest.approx(0.5 * math.log(math.pi), rel=1e-15)

    @pytest.mark.parametrize("z", [2 + 3j, -9.5 + 0.01j, -3.3 - 40j, 10 + 50j, 0.3 - 0.2j, -0.5, 1e-3 + 1e-3j])
    def test_against_mpmath(self, z):
        ref = complex(mpmath.loggamma(z))
        assert abs(log_gamma_complex(z) - ref) <= 1e-13 * max(1.0, abs(ref))

    def test_poles(self):
        for z in (0, -1, -7):
            with pytest.raises(PoleError):
                log_gamma_complex(z)

    def test_poch_large_argument(self):
        assert poch(2000.5, 3) == pytest.approx(2000.5 * 2001.5 * 2002.5, rel=1e-12)
        assert poch(3, 0) == 1


class TestWilson:
    def test_degree_zero(self):
        assert wilson_poly(0, 1.7, DESK) == 1

    def test_degree_one_literal(self):
        a, b, c, d = 1, 0.8, 0.6, 0.4
        s = a + b + c + d
        expected = (a + b) * (a + c) * (a + d) - s * a * a
        assert wilson_poly(1, 0.0, DESK) == pytest.approx(expected, rel=1e-14)

    @given(pos, pos, pos, pos, st.floats(min_value=-3, max_value=3), st.integers(0, 4))
    @settings(max_examples=60, deadline=None)
    def test_parameter_symmetry(self, a, b, c, d, x, n):
        v1 = wilson_poly(n, x, WilsonParams(a, b, c, d))
        v2 = wilson_poly(n, x, WilsonParams(d, c, b, a))
        assert v1 == pytest.approx(v2, rel=1e-9, abs=1e-9)

    @pytest.mark.parametrize("n", range(4))
    @pytest.mark.parametrize("sign", [1, -1])
    def test_whipple_forms(self, n, sign):
        for x in (0.3, 1.1, 2.7):
            assert wilson_poly_whipple(n, x, DESK, sign) == pytest.approx(wilson_poly(n, x, DESK), rel=1e-11)

    def test_vectorized(self):
        x = np.array([0.1, 0.5, 2.0])
        assert np.allclose(wilson_poly(2, x, DESK), [wilson_poly(2, float(v), DESK) for v in x], rtol=1e-14)

    def test_bad_params(self):
        with pytest.raises(InvalidParameters):
            WilsonParams(1, -1, 0.5, 0.5)


class TestWeightAndNorm:
    @given(st.floats(min_value=0.01, max_value=10))
    @settings(max_examples=30, deadline=None)
    def test_even(self, x):
        assert wilson_weight(x, DESK) == wilson_weight(-x, DESK)

    def test_vanishes_at_origin(self):
        p = WilsonParams(1, 1, 1, 1)
        assert wilson_weight(0.0, p) == 0.0
        assert log_wilson_weight(0.0, p) == -math.inf
        # w(x) ~ C x^2 near 0
        r = wilson_weight(1e-4, p) / wilson_weight(1e-6, p)
        assert r == pytest.approx(1e4, rel=1e-6)

    def test_decay(self):
        p = WilsonParams(1, 1, 1, 1)
        assert wilson_weight(20, p) / wilson_weight(10, p) < 1e-20

    def test_matches_direct_gamma(self):
        x = 0.7
        g = [complex(mpmath.gamma(v + 1j * x)) for v in (1, 0.8, 0.6, 0.4)]
        direct = abs(g[0] * g[1] * g[2] * g[3] / complex(mpmath.gamma(2j * x))) ** 2
        assert wilson_weight(x, DESK) == pytest.approx(direct, rel=1e-12)

    def test_norm_degree_zero(self):
        a, b, c, d = 1, 0.8, 0.6, 0.4
        expected = 4 * math.pi
        for s in (a + b, a + c, a + d, b + c, b + d, c + d):
            expected *= math.gamma(s)
        expected /= math.gamma(a + b + c + d)
        assert wilson_norm(0, DESK) == pytest.approx(expected, rel=1e-13)
        assert wilson_norm(0, WilsonParams(0.5, 0.5, 0.5, 0.5)) == pytest.approx(4 * math.pi, rel=1e-14)

    def test_norm_ratio_by_quadrature(self):
        h1, _ = wilson_inner_product(1, 1, DESK)
        h0, _ = wilson_inner_product(0, 0, DESK)
        assert h1 / h0 == pytest.approx(wilson_norm(1, DESK) / wilson_norm(0, DESK), rel=1e-9)

    def test_orthogonality_small(self):
        v, est = wilson_inner_product(1, 2, DESK)
        assert abs(v) <= 1e-9 * math.sqrt(wilson_norm(1, DESK) * wilson_norm(2, DESK))


TP = TratnikParams((0.5, 0.7), (0.6, 0.4), 0.8, 0.9)


class TestTratnik:
    def test_trivial_degree(self):
        x = (0.3, -0.2)
        for f in (tratnik_P, tratnik_Pbar, tratnik_Q, tratnik_Qbar):
            assert f((0, 0), x, TP) == 1

    @pytest.mark.parametrize("n", range(4))
    def test_single_variable_is_wilson(self, n):
        a, b, c, d = 1, 0.8, 0.6, 0.4
        tp = TratnikParams((a,), (b,), c, d)
        for x in (0.0, 0.6, 1.9):
            ref = wilson_poly(n, x, WilsonParams(a, b, c, d))
            assert tratnik_P((n,), (x,), tp) == pytest.approx(ref, rel=1e-11, abs=1e-11)
            assert tratnik_Pbar((n,), (x,), tp) == pytest.approx(ref, rel=1e-11, abs=1e-11)

    @pytest.mark.parametrize("f", [tratnik_P, tratnik_Pbar, tratnik_Q, tratnik_Qbar])
    def test_conjugation(self, f):
        x = (0.3, -0.7)
        v = f((1, 2), x, TP)
        w = f((1, 2), tuple(-t for t in x), TP)
        assert w == pytest.approx(v.conjugate(), rel=1e-12)

    def test_weight(self):
        x = (0.4, 0.3)
        assert tratnik_weight((0.2, -0.2), TP) == 0
        X = sum(x)
        direct = (mpmath.gamma(1.2 - 1j * X) * mpmath.gamma(1.0 + 1j * X)
                  * abs(mpmath.gamma(0.8 + 1j * X) * mpmath.gamma(0.9 + 1j * X)) ** 2
                  / abs(mpmath.gamma(2j * X)) ** 2)
        for a, b, xk in zip(TP.a, TP.b, x):
            direct *= mpmath.gamma(a + 1j * xk) * mpmath.gamma(b - 1j * xk)
        assert cmath.isclose(tratnik_weight(x, TP), complex(direct), rel_tol=1e-11)

    def test_bad_params(self):
        with pytest.raises(InvalidParameters):
            TratnikParams((0.1,), (0.2, 0.3), 0.5, 0.5)
        with pytest.raises(InvalidParameters):
            tratnik_P((1,), (0.1, 0.2), TP)
