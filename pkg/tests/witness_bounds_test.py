from unittest import TestCase
import math
import numpy as np
import sure  # noqa: F401

from eprwit import EprwitError, TestFunction, separability_bounds
from eprwit.witness_bounds import (
    bound_closed_form, bound_via_1d_reduction, bound_via_2d_quadrature,
    duan_bound, gain_factor, moment_bound)
from .helper import StateHelper


class TestFunctionTest(TestCase):
    def test_evaluate(self):
        f = TestFunction.exponential(0.5, 2.0)

        f.evaluate(1.0).should.be.within(math.exp(-0.5) * 3 - 1e-12, math.exp(-0.5) * 3 + 1e-12)
        f.order.should.equal(1)
        f.poly.should.equal((2.0,))

    def test_power_law(self):
        f = TestFunction.power_law(3)

        f.evaluate(2.0).should.equal(8.0)
        f.C.should.equal(0.0)

    def test_rescaled(self):
        f = TestFunction(0.7, (1.5, -0.2))
        g = f.rescaled(1.25)

        g.evaluate(0.8).should.be.within(f.evaluate(1.0) - 1e-12, f.evaluate(1.0) + 1e-12)

    def test_invalid(self):
        with self.assertRaises(EprwitError) as context:
            TestFunction(-1.0)
        context.exception.error_type.should.equal("InvalidParameter")

        with self.assertRaises(EprwitError):
            TestFunction(1.0, (math.nan,))


class ClosedFormTest(TestCase):
    def test_unit_decay_limit(self):
        bound_closed_form(1, 0, 0).should.equal(0.5)
        bound_closed_form(1, 1, 0).should.equal(0.75)
        bound_closed_form(1, 2, 1).should.equal(0.5)
        for n in range(2, 6):
            bound_closed_form(1, 3, n).should.equal(0.0)

    def test_unit_decay_matches_series(self):
        f = TestFunction.exponential(1.0, 2.5)

        for n in range(6):
            series = bound_via_1d_reduction(f, n)
            series.should.be.within(bound_closed_form(1, 2.5, n) - 1e-12, bound_closed_form(1, 2.5, n) + 1e-12)

    def test_small_decay_normalization(self):
        for n in (0, 3, 10):
            bound_closed_form(1e-9, 0, n).should.be.within(1 - 1e-6, 1 + 1e-6)

    def test_needs_positive_decay(self):
        with self.assertRaises(EprwitError):
            bound_closed_form(0, 1, 0)

    def test_sign_alternates_above_unit_decay(self):
        values = [bound_closed_form(2.0, 0.0, n) for n in range(8)]

        for a, b in zip(values, values[1:]):
            (a * b).should.be.lower_than(0)


class OracleTest(TestCase):
    def test_reductions_agree_on_random_parameters(self):
        helper = StateHelper(seed=11)
        for _ in range(20):
            C = helper.faker.random.uniform(0.05, 10.0)
            D = helper.faker.random.uniform(-80.0, 80.0)
            n = helper.faker.random.randint(0, 10)
            f = TestFunction.exponential(C, D)

            closed = bound_closed_form(C, D, n)
            for method in ("series", "gauss_laguerre", "quad"):
                value = bound_via_1d_reduction(f, n, method=method)
                value.should.be.within(closed - 1e-6, closed + 1e-6)

    def test_2d_quadrature_agrees(self):
        for C, D in ((0.5, 0.0), (1.0, -0.8), (2.0, 3.0)):
            f = TestFunction.exponential(C, D)
            for n in range(3):
                closed = bound_closed_form(C, D, n)
                bound_via_2d_quadrature(f, n).should.be.within(closed - 1e-6, closed + 1e-6)

    def test_2d_quadrature_needs_decay(self):
        with self.assertRaises(EprwitError) as context:
            bound_via_2d_quadrature(TestFunction.power_law(1), 0)

        context.exception.error_type.should.equal("NonConverged")

    def test_unknown_method(self):
        with self.assertRaises(ValueError):
            bound_via_1d_reduction(TestFunction(1.0), 0, method="guess")

    def test_higher_order_polynomial(self):
        f = TestFunction(0.8, (0.5, -0.3, 0.1))

        for n in range(5):
            series = bound_via_1d_reduction(f, n)
            series.should.be.within(
                bound_via_1d_reduction(f, n, "quad") - 1e-8, bound_via_1d_reduction(f, n, "quad") + 1e-8)


class SeparabilityBoundsTest(TestCase):
    def test_exponential_maximum(self):
        for C in (0.5, 1.0, 2.0, 10.0):
            bounds = separability_bounds(TestFunction(C))

            bounds.f_max.should.be.within(1 / (1 + C) - 1e-9, 1 / (1 + C) + 1e-9)
            bounds.n_at_max.should.equal(0)
            bounds.converged.should.be.true

    def test_unit_decay_bound_is_one_half(self):
        separability_bounds(TestFunction(1.0)).f_max.should.equal(0.5)

    def test_moment_bounds(self):
        for m in range(1, 6):
            moment_bound(m).should.be.within(math.factorial(m) - 1e-7, math.factorial(m) + 1e-7)
            bounds = separability_bounds(TestFunction.power_law(m))
            bounds.n_at_min.should.equal(0)
            bounds.f_max.should.equal(math.inf)

    def test_large_slope_matches_exhaustive_scan(self):
        f = TestFunction.exponential(1.0, 80.0)
        bounds = separability_bounds(f)
        brute = [bound_via_1d_reduction(f, n) for n in range(201)]

        bounds.n_at_max.should.equal(int(np.argmax(brute)))
        bounds.f_max.should.be.within(max(brute) - 1e-9, max(brute) + 1e-9)

    def test_random_bounds_cover_exhaustive_scan(self):
        helper = StateHelper(seed=5)
        for _ in range(10):
            f = helper.test_function(max_c=5.0, max_d=20.0)
            bounds = separability_bounds(f)
            brute = [bound_via_1d_reduction(f, n) for n in range(301)]

            bounds.converged.should.be.true
            (bounds.f_max >= max(brute) - 1e-12).should.be.true
            (bounds.f_min <= min(brute) + 1e-12).should.be.true

    def test_provisional_without_decay(self):
        bounds = separability_bounds(TestFunction(0.0, (-1.0, 0.5)))

        bounds.converged.should.be.false
        bounds.provisional.should.be.true

    def test_gain_rescaling(self):
        C, g = 0.8, math.sqrt(2)
        bounds = separability_bounds(TestFunction(C), g=g)

        expected = 1 / (1 + C * gain_factor(g))
        bounds.f_max.should.be.within(expected - 1e-9, expected + 1e-9)

    def test_negative_cutoff(self):
        with self.assertRaises(EprwitError):
            separability_bounds(TestFunction(1.0), n_max=-1)

    def test_rows(self):
        rows = separability_bounds(TestFunction(1.0), n_max=4).rows()

        rows[0].should.equal((0, 0.5))


class DuanBoundTest(TestCase):
    def test_values(self):
        duan_bound(1).should.equal(1.0)
        duan_bound(math.sqrt(2)).should.be.within(1.25 - 1e-12, 1.25 + 1e-12)
        duan_bound(2).should.equal(2.125)

    def test_zero_gain(self):
        with self.assertRaises(EprwitError):
            duan_bound(0)
