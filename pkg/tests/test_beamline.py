import dataclasses
import math

import numpy as np
import pytest

from mwmono import (
    BeamSpec,
    Beamline,
    EmptyTransmissionError,
    Pinhole,
    incidence_for_output,
    scan_speed_ratio,
    select_path,
    simulate_beam,
    single_reflection_baseline,
    trace_velocity,
    velocity_divergence,
)


@pytest.fixture()
def beamline(default_config):
    return default_config.beamline()


@pytest.fixture()
def objs(default_config, beamline):
    return default_config.particle(), default_config.grating(), beamline


def with_exit_pinholes(beamline, pinholes):
    return dataclasses.replace(beamline, exit_pinholes=tuple(pinholes))


class TestTraceVelocity:
    def test_central_ray_exits_at_theta_out(self, setting, objs):
        helium, grating, beamline = objs
        vbar = 1000.0
        theta_inc = incidence_for_output(setting, helium, grating, vbar)
        path = select_path(setting, helium, grating, vbar, beamline.device)
        ray = trace_velocity(vbar, path, beamline, helium, grating, theta_inc)
        assert ray is not None
        assert abs(ray.angle - setting.theta_out) <= 1e-12

    def test_exit_angle_deviation_matches_dispersion(self, setting, objs):
        helium, grating, beamline = objs
        vbar = 1000.0
        theta_inc = incidence_for_output(setting, helium, grating, vbar)
        path = select_path(setting, helium, grating, vbar, beamline.device)
        up = trace_velocity(vbar + 1.0, path, beamline, helium, grating, theta_inc)
        down = trace_velocity(vbar - 1.0, path, beamline, helium, grating, theta_inc)
        predicted = velocity_divergence(
            theta_inc, setting.order_magnitude, helium, grating, vbar
        )
        assert (up.angle - down.angle) / 2.0 == pytest.approx(predicted, rel=0.01)

    def test_below_cutoff_is_blocked(self, setting, objs):
        helium, grating, beamline = objs
        vbar = 1000.0
        theta_inc = incidence_for_output(setting, helium, grating, vbar)
        path = select_path(setting, helium, grating, vbar, beamline.device)
        # Far below the order cutoff the exit order is evanescent.
        assert trace_velocity(200.0, path, beamline, helium, grating, theta_inc) is None

    def test_offset_outside_entry_window_is_blocked(self, setting, objs):
        helium, grating, beamline = objs
        vbar = 1000.0
        theta_inc = incidence_for_output(setting, helium, grating, vbar)
        path = select_path(setting, helium, grating, vbar, beamline.device)
        assert trace_velocity(vbar, path, beamline, helium, grating, theta_inc, offset=1.0) is None


class TestSimulateBeam:
    def test_weight_conservation(self, objs):
        helium, grating, beamline = objs
        result = simulate_beam(BeamSpec(1000.0), beamline, helium, grating)
        assert 0.0 <= result.throughput <= 1.0
        assert np.all(result.weights >= 0.0)
        assert result.weights.sum() == pytest.approx(result.throughput)

    def test_selection_narrows_distribution(self, objs):
        helium, grating, beamline = objs
        spec = BeamSpec(1000.0)
        result = simulate_beam(spec, beamline, helium, grating)
        assert 0.0 < result.delta_v <= spec.full_width
        assert result.speed_ratio > result.input_speed_ratio

    def test_support_subset_of_input(self, objs):
        helium, grating, beamline = objs
        spec = BeamSpec(1000.0, 500.0)
        result = simulate_beam(spec, beamline, helium, grating)
        populated = result.velocities[result.weights > 0]
        assert populated.min() >= 750.0
        assert populated.max() <= 1250.0

    def test_central_ray_always_transmitted(self, objs):
        # Pinholes are centred on the central ray by construction, so even a
        # nanometre-sized final pinhole passes it (odd grids hit it exactly).
        helium, grating, beamline = objs
        tiny = with_exit_pinholes(
            beamline,
            [Pinhole(diameter=1e-9, distance=ph.distance) for ph in beamline.exit_pinholes],
        )
        result = simulate_beam(BeamSpec(1000.0), tiny, helium, grating,
                               velocity_bins=201, offset_samples=21)
        centre = np.argmin(np.abs(result.velocities - 1000.0))
        assert result.weights[centre] > 0.0

    def test_huge_pinholes_select_nothing_beyond_the_device(self, objs):
        helium, grating, beamline = objs
        huge = with_exit_pinholes(
            beamline,
            [Pinhole(diameter=1e3, distance=ph.distance) for ph in beamline.exit_pinholes],
        )
        spec = BeamSpec(1000.0)
        open_result = simulate_beam(spec, huge, helium, grating)
        closed_result = simulate_beam(spec, beamline, helium, grating)
        # Without apertures the device window alone survives: a flat top
        # with a soft edge where rays graze the plate's trailing edge.
        assert open_result.delta_v > closed_result.delta_v
        populated = open_result.weights[open_result.weights > 0]
        at_top = populated >= 0.99 * populated.max()
        assert at_top.mean() > 0.8

    def test_shrinking_final_pinhole_narrows_delta_v(self, objs):
        helium, grating, beamline = objs
        spec = BeamSpec(1000.0)
        widths = []
        for diameter in (20e-3, 10e-3, 5e-3, 2e-3, 1e-3):
            bl = with_exit_pinholes(
                beamline,
                [beamline.exit_pinholes[0],
                 Pinhole(diameter=diameter, distance=beamline.exit_pinholes[1].distance)],
            )
            widths.append(simulate_beam(spec, bl, helium, grating).delta_v)
        assert all(a >= b for a, b in zip(widths, widths[1:]))

    def test_aperture_monotonicity_of_throughput(self, objs):
        helium, grating, beamline = objs
        spec = BeamSpec(1000.0)
        throughputs = []
        for scale in (0.5, 1.0, 2.0, 4.0):
            bl = with_exit_pinholes(
                beamline,
                [Pinhole(diameter=ph.diameter * scale, distance=ph.distance)
                 for ph in beamline.exit_pinholes],
            )
            throughputs.append(simulate_beam(spec, bl, helium, grating).throughput)
        assert all(a <= b for a, b in zip(throughputs, throughputs[1:]))

    def test_empty_transmission_raises(self, objs):
        helium, grating, beamline = objs
        # Even grid counts put no ray exactly on the beam axis, so a
        # nanometre pinhole blocks everything.
        tiny = with_exit_pinholes(
            beamline,
            [Pinhole(diameter=1e-12, distance=ph.distance) for ph in beamline.exit_pinholes],
        )
        with pytest.raises(EmptyTransmissionError):
            simulate_beam(BeamSpec(1000.0), tiny, helium, grating,
                          velocity_bins=200, offset_samples=20)

    def test_grid_convergence(self, objs):
        helium, grating, beamline = objs
        spec = BeamSpec(1000.0)
        coarse = simulate_beam(spec, beamline, helium, grating,
                               velocity_bins=2001, offset_samples=201)
        fine = simulate_beam(spec, beamline, helium, grating,
                             velocity_bins=4001, offset_samples=401)
        assert fine.speed_ratio == pytest.approx(coarse.speed_ratio, rel=0.02)

    def test_deterministic(self, objs):
        helium, grating, beamline = objs
        spec = BeamSpec(900.0)
        a = simulate_beam(spec, beamline, helium, grating)
        b = simulate_beam(spec, beamline, helium, grating)
        assert np.array_equal(a.weights, b.weights)
        assert a.speed_ratio == b.speed_ratio


class TestBaseline:
    def test_improves_on_input(self, objs):
        helium, grating, beamline = objs
        spec = BeamSpec(1000.0)
        base = single_reflection_baseline(spec, beamline, helium, grating)
        assert base.speed_ratio > spec.speed_ratio

    def test_triple_beats_baseline_by_order_of_magnitude(self, objs):
        helium, grating, beamline = objs
        spec = BeamSpec(1000.0)
        triple = simulate_beam(spec, beamline, helium, grating)
        base = single_reflection_baseline(spec, beamline, helium, grating)
        assert 5.0 <= triple.speed_ratio / base.speed_ratio <= 20.0

    def test_specular_baseline_selects_nothing(self, objs):
        helium, grating, beamline = objs
        spec = BeamSpec(1000.0)
        base = single_reflection_baseline(spec, beamline, helium, grating, order=0)
        assert base.speed_ratio == pytest.approx(spec.speed_ratio, rel=1e-9)
        assert base.delta_v == pytest.approx(spec.full_width, rel=1e-9)


class TestScan:
    def test_single_point_matches_simulate(self, objs):
        helium, grating, beamline = objs
        rows = scan_speed_ratio([1000.0], 500.0, beamline, helium, grating)
        direct = simulate_beam(BeamSpec(1000.0), beamline, helium, grating)
        assert len(rows) == 1
        assert rows[0].final_ratio == direct.speed_ratio
        assert rows[0].throughput == direct.throughput
        assert rows[0].flag == ""

    def test_flagged_rows_below_cutoff(self, objs):
        helium, grating, beamline = objs
        rows = scan_speed_ratio([260.0, 1000.0], 20.0, beamline, helium, grating,
                                velocity_bins=201, offset_samples=21)
        assert rows[0].flag == "below_cutoff"
        assert rows[0].final_ratio is None
        assert rows[1].flag == ""

    def test_decreasing_at_high_velocity(self, objs):
        helium, grating, beamline = objs
        rows = scan_speed_ratio([2000.0, 3000.0, 4000.0, 5000.0], 500.0,
                                beamline, helium, grating,
                                velocity_bins=1001, offset_samples=101)
        finals = [r.final_ratio for r in rows]
        assert all(f is not None for f in finals)
        assert all(a > b for a, b in zip(finals, finals[1:]))


class TestBeamSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            BeamSpec(center_velocity=200.0, full_width=500.0)
        with pytest.raises(ValueError):
            BeamSpec(center_velocity=1000.0, full_width=0.0)
        with pytest.raises(ValueError):
            BeamSpec(center_velocity=1000.0, full_width=100.0, distribution="gaussian")

    def test_input_speed_ratio(self):
        assert BeamSpec(1000.0, 500.0).speed_ratio == 2.0


class TestBeamlineValidation:
    def test_pinhole_ordering(self, default_config):
        bl = default_config.beamline()
        with pytest.raises(ValueError):
            Beamline(
                source_pinhole=bl.source_pinhole,
                exit_pinholes=(bl.exit_pinholes[1], bl.exit_pinholes[0]),
                device=bl.device,
                setting=bl.setting,
            )

    def test_pinhole_validation(self):
        with pytest.raises(ValueError):
            Pinhole(diameter=0.0, distance=1.0)
