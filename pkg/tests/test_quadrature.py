import math

import numpy as np
import pytest

from qbiortho.classical import WilsonParams, wilson_weight
from qbiortho.errors import BudgetExceeded, InvalidParameters, TolNotReached
from qbiortho.quadrature import (
    LineQuadSpec,
    TorusGridSpec,
    choose_truncation,
    line_integrate,
    pairwise_sum,
    torus_integrate,
)
from qbiortho.qwilson import ContinuousParams, weight_q


def test_pairwise_sum():
    assert pairwise_sum([]) == 0.0
    assert pairwise_sum([1, 2, 3, 4, 5]) == 15
    assert pairwise_sum([0.1] * 1000) == pytest.approx(100.0, rel=1e-15)


class TestTorus:
    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_constant(self, p):
        value, est = torus_integrate(TorusGridSpec(p, 16, lambda th: np.ones(th.shape[1])))
        assert value == pytest.approx((2 * math.pi) ** p, rel=1e-14)
        assert est <= 1e-12

    @pytest.mark.parametrize("k", [1, 2, 5, 7])
    def test_trig_polynomial_below_nyquist(self, k):
        value, _ = torus_integrate(TorusGridSpec(1, 16, lambda th: np.exp(1j * k * th[0])))
        assert abs(value) < 1e-14

    def test_validation(self):
        with pytest.raises(InvalidParameters):
            TorusGridSpec(1, 24, lambda th: th[0])
        with pytest.raises(InvalidParameters):
            TorusGridSpec(1, 8, lambda th: th[0])
        with pytest.raises(BudgetExceeded):
            TorusGridSpec(3, 512, lambda th: th[0])

    def test_worker_count_invariance(self):
        params = ContinuousParams((0.3, 0.25), (0.2, 0.15), 0.1, 0.2, 0.4, 0.5)
        results = {jobs: torus_integrate(TorusGridSpec(2, 256, lambda th: weight_q(list(th), params), jobs=jobs))
                   for jobs in (1, 2, 8)}
        assert results[1] == results[2] == results[8]

    def test_spectral_convergence(self):
        # single-variable Askey-Wilson weight: estimates shrink fast once resolved
        params = ContinuousParams((0.6,), (0.5,), 0.4, 0.3, 0.4, 0.5)
        ests = [torus_integrate(TorusGridSpec(1, M, lambda th: weight_q(list(th), params)))[1]
                for M in (16, 32, 64, 128)]
        # the knee sits near M = 32 for these parameters
        assert ests[2] <= 1e-2 * ests[1]
        assert ests[3] <= 1e-2 * ests[2]

    def test_removable_zero_at_origin(self):
        # Theta = 0 lies on every lattice; the weight has a genuine zero there
        params = ContinuousParams((0.3,), (0.2,), 0.1, 0.2, 0.4, 0.5)
        assert weight_q([0.0], params) == 0
        theta = np.array([[-math.pi, 0.0, 1.0]])
        assert np.all(np.isfinite(weight_q(list(theta), params)))


class TestLine:
    def test_gaussian(self):
        value, est = line_integrate(LineQuadSpec(lambda x: math.exp(-x * x), 10.0))
        assert value == pytest.approx(math.sqrt(math.pi), rel=1e-10)
        assert est < 1e-9

    def test_odd(self):
        value, _ = line_integrate(LineQuadSpec(lambda x: x * math.exp(-x * x), 10.0))
        assert abs(value) < 1e-10

    def test_even_flag(self):
        f = lambda x: 1 / (1 + x ** 4) ** 10
        full, _ = line_integrate(LineQuadSpec(f, 20.0))
        half, _ = line_integrate(LineQuadSpec(f, 20.0, even=True))
        assert half == pytest.approx(full, rel=1e-12)

    def test_wilson_weight_truncation_stable(self):
        params = WilsonParams(1, 1, 1, 1)
        f = lambda x: wilson_weight(x, params)
        v30, _ = line_integrate(LineQuadSpec(f, 30.0, even=True))
        v40, _ = line_integrate(LineQuadSpec(f, 40.0, even=True))
        assert v30 > 0
        assert v30 == pytest.approx(v40, rel=1e-8)

    def test_choose_truncation(self):
        T = choose_truncation(lambda x: math.exp(-x), ratio=1e-30)
        assert math.exp(-T) < 1e-30
        with pytest.raises(TolNotReached):
            choose_truncation(lambda x: 1.0, limit=50)

    def test_spec_validation(self):
        with pytest.raises(InvalidParameters):
            LineQuadSpec(lambda x: x, -1.0)
