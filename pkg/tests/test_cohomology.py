"""Tests for the integer cochain calculus."""

import math

import numpy as np
import pytest

from rotlab.cohomology import (
    ClassValue,
    DefectEstimate,
    IntegerCochain1,
    IntegerCochain2,
    circle_distance,
    coboundary1,
    coboundary_cochain2,
    cocycle_check2,
    defect,
    extract_class,
    floor_cochain,
    floor_cocycle,
    floor_cocycle_block,
    guarded_floor_mul,
    homogenize,
)


def brute_defect(f, window):
    """Independent O(window^2) oracle for the defect scan."""
    best = 0
    for n in range(-window, window + 1):
        for m in range(-window, window + 1):
            best = max(best, abs(f(n) + f(m) - f(n + m)))
    return best


class TestCoboundary1:
    def test_floor_half(self):
        f = floor_cochain(0.5)
        assert coboundary1(f, 1, 1) == -1

    def test_homomorphism_is_closed(self):
        f = IntegerCochain1(eval=lambda n: 2 * n)
        for n, m in [(0, 0), (3, 5), (-7, 2), (11, -11), (-4, -9)]:
            assert coboundary1(f, n, m) == 0

    def test_floor_third(self):
        f = floor_cochain(1.0 / 3.0)
        assert coboundary1(f, 1, 2) == -1


class TestCocycleCheck:
    def test_floor_cocycle_is_cocycle(self):
        c = coboundary_cochain2(floor_cochain(0.7))
        assert cocycle_check2(c, 20)

    def test_product_is_cocycle(self):
        c = IntegerCochain2(eval=lambda n, m: n * m)
        assert cocycle_check2(c, 10)

    def test_n_times_m_squared_is_not(self):
        c = IntegerCochain2(eval=lambda n, m: n * m * m)
        # delta c(1,1,1) = c(1,1) - c(2,1) + c(1,2) - c(1,1) = 1 - 2 + 4 - 1 = 2
        assert not cocycle_check2(c, 2)

    def test_rejects_bad_window(self):
        c = IntegerCochain2(eval=lambda n, m: 0)
        with pytest.raises(ValueError):
            cocycle_check2(c, 0)


class TestDefect:
    def test_floor_half_window_50(self):
        est = defect(floor_cochain(0.5), 50)
        assert est.value == brute_defect(floor_cochain(0.5), 50) == 1
        assert est.exact

    def test_homomorphism(self):
        est = defect(floor_cochain(3.0), 10)
        assert est.value == 0
        assert est.exact

    def test_floor_third_window_50(self):
        est = defect(floor_cochain(1.0 / 3.0), 50)
        assert est.value == brute_defect(floor_cochain(1.0 / 3.0), 50) == 1

    def test_monotone_in_window(self):
        f = floor_cochain(0.1234)
        assert defect(f, 4).value <= defect(f, 64).value


class TestHomogenize:
    def test_floor_point_seven(self):
        value, radius = homogenize(floor_cochain(0.7), 10_000)
        assert abs(value - 0.7) <= 1e-4
        assert abs(value - 0.7) <= radius + 1e-15

    def test_homomorphism_exact(self):
        value, radius = homogenize(IntegerCochain1(eval=lambda n: 3 * n), 100)
        assert value == 3.0
        assert radius == 0.0

    def test_floor_pi(self):
        value, radius = homogenize(floor_cochain(math.pi), 100_000)
        assert abs(value - math.pi) <= 1e-5

    def test_bound_holds_against_longer_run(self):
        # the D/k radius at k must cover the distance to a much longer run
        f = floor_cochain(0.37713)
        v_short, r_short = homogenize(f, 1_000)
        v_long, _ = homogenize(f, 300_000)
        assert abs(v_short - v_long) <= r_short + 1e-6

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            homogenize(floor_cochain(0.5), 0)


class TestFloorCocycle:
    def test_half(self):
        assert floor_cocycle(0.5, 1, 1) == -1

    @pytest.mark.parametrize("r", [-2.0, 0.0, 1.0, 5.0])
    def test_integer_parameter(self, r):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n, m = rng.integers(-100, 100, size=2)
            assert floor_cocycle(r, int(n), int(m)) == 0

    def test_third(self):
        assert floor_cocycle(1.0 / 3.0, 1, 1) == 0

    def test_guard_at_breakpoint(self):
        # 3 * float(1/3) rounds below 1; the rational guard must still see
        # floor(r*3) = 1
        assert guarded_floor_mul(1.0 / 3.0, 3) == 1

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            floor_cocycle(float("inf"), 1, 1)
        with pytest.raises(ValueError):
            floor_cocycle(float("nan"), 1, 1)

    def test_range_random(self):
        # one million random triples, vectorized through the block kernel
        rng = np.random.default_rng(11)
        total = 0
        for _ in range(25):
            r = float(rng.uniform(-3, 3))
            block = floor_cocycle_block(r, -100, 99)
            assert np.isin(block, (-1, 0)).all()
            total += block.size
        assert total >= 1_000_000

    def test_block_matches_scalar(self):
        rng = np.random.default_rng(12)
        for _ in range(5):
            r = float(rng.uniform(0, 1))
            block = floor_cocycle_block(r, -7, 7)
            for i, n in enumerate(range(-7, 8)):
                for j, m in enumerate(range(-7, 8)):
                    assert block[i, j] == floor_cocycle(r, n, m)


class TestExtractClass:
    def test_floor_third(self):
        c = coboundary_cochain2(floor_cochain(1.0 / 3.0))
        out = extract_class(c, 10_000)
        assert circle_distance(out.value, 2.0 / 3.0) <= 1e-4
        assert out.error_radius <= 1.01e-4

    def test_zero_cocycle(self):
        c = IntegerCochain2(eval=lambda n, m: 0)
        out = extract_class(c, 10_000)
        assert out.value == 0.0
        assert out.error_radius == 0.0

    def test_negated_quarter(self):
        c = IntegerCochain2(eval=lambda n, m: -floor_cocycle(0.25, n, m))
        out = extract_class(c, 10_000)
        assert circle_distance(out.value, 0.25) <= 1e-4

    def test_rejects_non_cocycle(self):
        c = IntegerCochain2(eval=lambda n, m: n * m * m)
        with pytest.raises(ValueError, match="cocycle"):
            extract_class(c, 100)

    def test_rejects_large_radius(self):
        c = coboundary_cochain2(floor_cochain(0.5))
        with pytest.raises(ValueError, match="radius"):
            extract_class(c, 1)

    def test_refinement_tightens(self):
        c = coboundary_cochain2(floor_cochain(0.3117))
        out = extract_class(c, 10_000, refine=17)
        assert circle_distance(out.value, (-0.3117) % 1.0) <= 1e-9
        assert out.error_radius <= 1e-9


class TestInvariants:
    @pytest.mark.parametrize("seed", range(5))
    def test_delta_delta_is_zero(self, seed):
        rng = np.random.default_rng(seed)
        r = float(rng.uniform(-2, 2))
        f = floor_cochain(r)
        c = coboundary_cochain2(f)
        assert cocycle_check2(c, 12)

    def test_extract_of_floor_coboundary_is_minus_r(self):
        rng = np.random.default_rng(101)
        for _ in range(20):
            r = float(rng.uniform(0, 1))
            c = coboundary_cochain2(floor_cochain(r))
            out = extract_class(c, 10_000)
            assert circle_distance(out.value, (-r) % 1.0) <= out.error_radius + 1e-12

    def test_invariance_under_bounded_coboundary(self):
        rng = np.random.default_rng(202)
        half = 30_000
        for trial in range(5):
            r = float(rng.uniform(0, 1))
            c = coboundary_cochain2(floor_cochain(r))
            # random 1-cochain with |b| <= 5, tabulated on [-half, half]
            b_vals = rng.integers(-5, 6, size=2 * half + 1)
            b = IntegerCochain1(eval=lambda n: int(b_vals[n + half]))
            delta_b = coboundary_cochain2(b)

            perturbed = IntegerCochain2(
                eval=lambda n, m: c(n, m) + delta_b(n, m),
                block=lambda lo, hi: c.table(lo, hi) + delta_b.table(lo, hi),
            )
            out_c = extract_class(c, 2_000)
            out_p = extract_class(perturbed, 2_000)
            tol = out_c.error_radius + out_p.error_radius
            assert circle_distance(out_c.value, out_p.value) <= tol + 1e-12

    def test_homogenize_floor_returns_r(self):
        rng = np.random.default_rng(303)
        for _ in range(20):
            r = float(rng.uniform(0, 1))
            value, radius = homogenize(floor_cochain(r), 10_000)
            assert abs(value - r) <= radius + 1e-12


class TestValueTypes:
    def test_class_value_validation(self):
        with pytest.raises(ValueError):
            ClassValue(1.2, 0.0)
        with pytest.raises(ValueError):
            ClassValue(0.2, 0.6)

    def test_cochain_rejects_non_integer(self):
        f = IntegerCochain1(eval=lambda n: 0.5)
        with pytest.raises(TypeError):
            f(1)

    def test_defect_estimate_fields(self):
        est = defect(floor_cochain(0.5), 8)
        assert isinstance(est, DefectEstimate)
        assert est.window == 8
