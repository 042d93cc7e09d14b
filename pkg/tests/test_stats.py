import math

import pytest

from cplxnet.errors import ContractError
from cplxnet.stats import betainc_reg, t_sf_two_sided, t_test_unpaired


class TestBetainc:
    def test_endpoints(self):
        assert betainc_reg(2.0, 0.5, 0.0) == 0.0
        assert betainc_reg(2.0, 0.5, 1.0) == 1.0

    def test_symmetric_half(self):
        # I_x(a, a) at x = 0.5 is exactly 0.5
        for a in (0.5, 1.0, 3.0, 7.5):
            assert abs(betainc_reg(a, a, 0.5) - 0.5) < 1e-12

    def test_uniform_case(self):
        # I_x(1, 1) = x
        for x in (0.1, 0.37, 0.9):
            assert abs(betainc_reg(1.0, 1.0, x) - x) < 1e-12

    def test_known_value(self):
        # I_{0.5}(2, 3) = 11/16 (polynomial case, by direct integration)
        assert abs(betainc_reg(2.0, 3.0, 0.5) - 11.0 / 16.0) < 1e-12

    def test_out_of_range(self):
        with pytest.raises(ContractError):
            betainc_reg(1.0, 1.0, 1.5)


class TestTSurvival:
    def test_df1_is_arctan(self):
        # t with 1 dof is Cauchy: P(|T| >= t) = 1 - (2/pi) arctan(t)
        for t in (0.5, 1.0, 3.0):
            ref = 1.0 - 2.0 / math.pi * math.atan(t)
            assert abs(t_sf_two_sided(t, 1) - ref) < 1e-12

    def test_zero_statistic(self):
        assert t_sf_two_sided(0.0, 10) == 1.0


class TestTTest:
    def test_identical_samples(self):
        r = t_test_unpaired([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert r.t == 0.0 and r.p == 1.0

    def test_textbook_case(self):
        r = t_test_unpaired([1, 2, 3], [2, 3, 4])
        assert abs(r.t - (-1.2247)) <= 0.0005
        assert r.df == 4
        assert abs(r.p - 0.2878) <= 0.001

    def test_symmetry(self):
        a, b = [1.0, 2.0, 3.5], [2.2, 3.1, 4.9]
        r1 = t_test_unpaired(a, b)
        r2 = t_test_unpaired(b, a)
        assert abs(r1.t + r2.t) < 1e-12
        assert abs(r1.p - r2.p) < 1e-12

    def test_degenerate_zero_variance(self):
        r = t_test_unpaired([1.0, 1.0], [2.0, 2.0])
        assert r.degenerate and r.p == 0.0
        same = t_test_unpaired([1.0, 1.0], [1.0, 1.0])
        assert same.p == 1.0 and not same.degenerate

    def test_small_samples_rejected(self):
        with pytest.raises(ContractError):
            t_test_unpaired([1.0], [2.0, 3.0])
