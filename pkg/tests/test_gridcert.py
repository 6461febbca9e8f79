"""Grid certification: covering invariants, net evaluation, Lipschitz chain."""

import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radsum.errors import (
    InvalidParams,
    InvalidPoint,
    NetTooCoarse,
    PointwiseViolated,
)
from radsum.gridcert import (
    AxisNet,
    GridSpec,
    default_grid_spec,
    f_31a3s,
    grad_bound_check,
    grid_verify,
)


def small_spec() -> GridSpec:
    # 11 x 11 corner patch of the default net, with a loosened target so
    # the margin invariant still holds at the coarser spacing
    axis = AxisNet(start=Fraction(9, 20), step=Fraction(1, 200), count=11)
    box = (Fraction(9, 20), Fraction(1, 2))
    return GridSpec(
        domain=(box, box),
        net=(axis, axis),
        spacing=Fraction(1, 200),
        lipschitz=4.0,
        pointwise_bound=0.6597,
        target_bound=0.674,
    )


class TestF31a3s:
    def test_origin_matches_closed_form(self):
        # all four thresholds equal 1, so the value is 4 * (1 - Phi(1))
        oracle = float(4 * (1 - mpmath.ncdf(1)))
        assert abs(f_31a3s(0.0, 0.0) - oracle) < 1e-12

    def test_half_half_pin(self):
        assert abs(f_31a3s(0.5, 0.5) - 0.6596) < 1e-4

    @settings(max_examples=50, deadline=None)
    @given(
        st.floats(min_value=0.0, max_value=0.7),
        st.floats(min_value=0.0, max_value=0.7),
    )
    def test_symmetry(self, a1, a2):
        assert f_31a3s(a1, a2) == pytest.approx(f_31a3s(a2, a1), abs=1e-12)

    def test_outside_unit_disc_rejected(self):
        with pytest.raises(InvalidPoint):
            f_31a3s(0.8, 0.7)
        with pytest.raises(InvalidPoint):
            f_31a3s(1.0, 0.0)


class TestGridSpec:
    def test_default_spec_validates(self):
        g = default_grid_spec()
        g.validate()
        assert g.covering_radius() == pytest.approx(0.0015 / math.sqrt(2))
        assert g.net[0].last == Fraction(1, 2)

    def test_coarse_step_rejected(self):
        g = default_grid_spec()
        axis = AxisNet(g.net[0].start, g.net[0].step * 2, 106)
        bad = GridSpec(g.domain, (axis, axis), g.spacing, 4.0, 0.6597, 0.664)
        with pytest.raises(NetTooCoarse):
            bad.validate()

    def test_uncovered_axis_rejected(self):
        g = default_grid_spec()
        axis = AxisNet(Fraction(1, 5), g.net[0].step, 201)
        bad = GridSpec(g.domain, (axis, g.net[1]), g.spacing, 4.0, 0.6597, 0.664)
        with pytest.raises(NetTooCoarse):
            bad.validate()

    def test_margin_invariant_rejected(self):
        g = default_grid_spec()
        # pointwise + 4 * spacing/sqrt(2) > target once the gap shrinks
        bad = GridSpec(g.domain, g.net, g.spacing, 4.0, 0.6597, 0.6630)
        with pytest.raises(NetTooCoarse):
            bad.validate()

    def test_dimension_cap(self):
        axis = AxisNet(Fraction(0), Fraction(1, 2), 3)
        box = (Fraction(0), Fraction(1))
        bad = GridSpec((box,) * 4, (axis,) * 4, Fraction(1, 2), 1.0, 9.0, 10.0)
        with pytest.raises(InvalidParams):
            bad.validate()

    def test_covering_property_on_random_points(self):
        g = default_grid_spec()
        rng = random.Random(7)
        start, step, count = g.net[0].start, g.net[0].step, g.net[0].count
        radius = g.covering_radius()
        for _ in range(300):
            point = [rng.uniform(0.19, 0.5) for _ in range(2)]
            dist_sq = 0.0
            for x in point:
                idx = min(max(round((x - start) / step), 0), count - 1)
                dist_sq += (x - float(start + step * idx)) ** 2
            assert math.sqrt(dist_sq) <= radius + 1e-12


class TestGridVerify:
    def test_constant_zero_passes(self):
        axis = AxisNet(Fraction(0), Fraction(1, 4), 5)
        g = GridSpec(
            domain=((Fraction(0), Fraction(1)),),
            net=(axis,),
            spacing=Fraction(1, 4),
            lipschitz=1.0,
            pointwise_bound=0.5,
            target_bound=1.0,
        )
        report = grid_verify(lambda x: 0.0, g)
        assert report.max_value == 0.0
        assert report.argmax == (0.0,)
        assert report.points_checked == 5

    def test_violation_carries_witness(self):
        axis = AxisNet(Fraction(0), Fraction(1, 4), 5)
        g = GridSpec(
            domain=((Fraction(0), Fraction(1)),) * 2,
            net=(axis, axis),
            spacing=Fraction(1, 4),
            lipschitz=1.0,
            pointwise_bound=1.5,
            target_bound=2.0,
        )
        with pytest.raises(PointwiseViolated) as err:
            grid_verify(lambda x, y: x + y, g)
        assert err.value.point == (1.0, 1.0)
        assert err.value.value == 2.0

    def test_corner_patch_of_default_instance(self):
        report = grid_verify(f_31a3s, small_spec())
        assert report.points_checked == 121
        assert report.argmax == (0.5, 0.5)
        assert report.max_value <= 0.6597

    def test_parallel_matches_sequential(self):
        g = small_spec()
        seq = grid_verify(f_31a3s, g, jobs=1)
        par = grid_verify(f_31a3s, g, jobs=2)
        assert par == seq

    def test_row_maxima_csv(self, tmp_path):
        report = grid_verify(f_31a3s, small_spec())
        assert len(report.row_maxima) == 11
        path = tmp_path / "rows.csv"
        report.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "axis0,row_max"
        assert len(lines) == 12

    def test_three_dimensional_net(self):
        axis = AxisNet(Fraction(0), Fraction(1, 2), 3)
        g = GridSpec(
            domain=((Fraction(0), Fraction(1)),) * 3,
            net=(axis,) * 3,
            spacing=Fraction(1, 2),
            lipschitz=1.0,
            pointwise_bound=3.5,
            target_bound=4.0,
        )
        report = grid_verify(lambda x, y, z: x + y + z, g)
        assert report.points_checked == 27
        assert report.max_value == 3.0
        assert report.argmax == (1.0, 1.0, 1.0)

    def test_soundness_spot_check(self):
        # a passing certificate really does dominate random interior points
        g = default_grid_spec()
        grid_verify(f_31a3s, g)
        rng = random.Random(11)
        for _ in range(1000):
            value = f_31a3s(rng.uniform(0.19, 0.5), rng.uniform(0.19, 0.5))
            assert value <= g.target_bound


class TestGradBound:
    def test_chain_of_bounds(self):
        report = grad_bound_check()
        assert report.ok
        assert report.inner_argmax == pytest.approx(
            (math.sqrt(6) - math.sqrt(2)) / 2, abs=1e-15
        )
        assert report.inner_max < 1.69
        assert report.partial_bound < 2.7
        assert report.gradient_bound < 4.0
        assert report.fd_max <= report.partial_bound

    def test_finite_difference_gradient_norm_below_c(self):
        rng = random.Random(3)
        h = 1e-6
        for _ in range(1000):
            a1 = rng.uniform(0.19 + h, 0.5 - h)
            a2 = rng.uniform(0.19 + h, 0.5 - h)
            d1 = (f_31a3s(a1 + h, a2) - f_31a3s(a1 - h, a2)) / (2 * h)
            d2 = (f_31a3s(a1, a2 + h) - f_31a3s(a1, a2 - h)) / (2 * h)
            assert math.hypot(d1, d2) <= 4.0

    def test_probe_count_guard(self):
        with pytest.raises(InvalidParams):
            grad_bound_check(probes=1)
