"""
Tests for bresse.timeint: implicit midpoint stepping, energy traces and
decay-rate fits.
"""

import numpy as np
import pytest

from bresse.config import SYSTEM_CACHE_SIZE
from bresse.exceptions import DecayFitError, DimensionError
from bresse.fem import build_system
from bresse.generator import StateVec, sample_state, smooth_random_state
from bresse.model import BresseParams
from bresse.timeint import (
    EnergyTrace,
    MidpointStepper,
    default_time_step,
    fit_decay_rate,
    midpoint_stepper,
    simulate,
    step_midpoint,
)


class TestStepMidpoint:
    """Single midpoint steps"""

    def test_zero_state(self, small_system):
        out = step_midpoint(StateVec.zeros(small_system.size), 0.01, small_system)
        assert not np.any(out.stacked())

    def test_conservative_step_keeps_energy(self, conservative_system, rng):
        U = StateVec(rng.standard_normal(conservative_system.size), rng.standard_normal(conservative_system.size))
        before = conservative_system.energy(U.u, U.v)
        V = step_midpoint(U, 0.05, conservative_system)
        assert conservative_system.energy(V.u, V.v) == pytest.approx(before, rel=1e-12)

    def test_one_step_balance(self, small_system, rng):
        U = StateVec(rng.standard_normal(small_system.size), rng.standard_normal(small_system.size))
        dt = 0.02
        stepper = MidpointStepper(small_system, dt)
        V, loss = stepper.step(U)
        v_mid = 0.5 * (U.v + V.v)
        assert loss == pytest.approx(dt * v_mid @ small_system.D @ v_mid, rel=1e-12)
        e0 = small_system.energy(U.u, U.v)
        e1 = small_system.energy(V.u, V.v)
        assert abs(e1 - e0 + loss) <= 1e-12 * e0

    def test_time_reversible_without_damping(self, conservative_system):
        U = smooth_random_state(conservative_system.grid, seed=8)
        V = step_midpoint(step_midpoint(U, 0.03, conservative_system), -0.03, conservative_system)
        np.testing.assert_allclose(V.stacked(), U.stacked(), rtol=0.0, atol=1e-10)

    def test_invalid_step(self, small_system):
        with pytest.raises(ValueError):
            MidpointStepper(small_system, 0.0)

    def test_size_mismatch(self, small_system):
        with pytest.raises(DimensionError):
            step_midpoint(StateVec.zeros(6), 0.01, small_system)

    def test_cached_steppers_are_bounded(self, small_system):
        for dt in (0.01, 0.02, 0.03, 0.04):
            step_midpoint(StateVec.zeros(small_system.size), dt, small_system)
        assert midpoint_stepper.cache_info().currsize <= SYSTEM_CACHE_SIZE


class TestSimulate:
    """Energy traces"""

    def test_step_count_and_times(self, small_system):
        trace = simulate(smooth_random_state(small_system.grid), 1.0, 0.3, small_system)
        assert trace.steps == 4
        np.testing.assert_allclose(trace.times, [0.0, 0.3, 0.6, 0.9, 1.2])
        assert trace.boundary_velocities.shape == (5, 3)
        assert trace.final_state.size == small_system.size

    def test_conservative_energy(self, conservative_system):
        trace = simulate(smooth_random_state(conservative_system.grid), 10.0, 0.01, conservative_system)
        assert trace.relative_drift <= 1e-10

    def test_damped_energy_decreases(self, small_system):
        trace = simulate(smooth_random_state(small_system.grid), 5.0, None, small_system)
        e0 = trace.energies[0]
        assert np.all(np.diff(trace.energies) <= 1e-14 * e0)
        assert trace.energies[-1] < 0.5 * e0
        assert np.all(trace.boundary_losses >= 0.0)

    def test_balance_residuals(self, small_system):
        trace = simulate(smooth_random_state(small_system.grid), 3.0, 0.01, small_system)
        assert np.max(np.abs(trace.balance_residuals)) <= 1e-11 * trace.energies[0]

    def test_large_step_stays_bounded(self, small_system):
        trace = simulate(smooth_random_state(small_system.grid), 20.0, 2.0, small_system)
        assert np.all(trace.energies <= trace.energies[0] * (1.0 + 1e-12))

    def test_default_time_step(self, small_system):
        assert default_time_step(small_system) == pytest.approx(small_system.grid.h / 2.0)

    def test_invalid_horizon(self, small_system):
        with pytest.raises(ValueError):
            simulate(smooth_random_state(small_system.grid), 0.0, 0.1, small_system)


class TestFitDecayRate:
    """Least-squares decay rates"""

    def test_exact_exponential(self):
        t = np.linspace(0.0, 20.0, 401)
        trace = EnergyTrace(t, np.exp(-2.0 * 0.3 * t))
        fit = fit_decay_rate(trace, (5.0, 15.0))
        assert fit.mu == pytest.approx(0.3, abs=1e-10)
        assert fit.residual_norm < 1e-8
        assert fit.points == 201

    def test_constant_trace(self):
        t = np.linspace(0.0, 10.0, 101)
        fit = fit_decay_rate(EnergyTrace(t, np.full_like(t, 2.5)), (1.0, 9.0))
        assert fit.mu == pytest.approx(0.0, abs=1e-12)

    def test_window_outside_trace(self):
        t = np.linspace(0.0, 10.0, 11)
        with pytest.raises(DecayFitError):
            fit_decay_rate(EnergyTrace(t, np.ones_like(t)), (5.0, 15.0))

    def test_nonpositive_energy(self):
        t = np.linspace(0.0, 10.0, 11)
        energies = np.ones_like(t)
        energies[7] = 0.0
        with pytest.raises(DecayFitError):
            fit_decay_rate(EnergyTrace(t, energies), (5.0, 9.0))

    def test_invariant_under_scaling(self, small_system):
        U = smooth_random_state(small_system.grid, seed=6)
        a = fit_decay_rate(simulate(U, 6.0, 0.01, small_system), (1.0, 5.0))
        b = fit_decay_rate(simulate(U * 1000.0, 6.0, 0.01, small_system), (1.0, 5.0))
        assert b.mu == pytest.approx(a.mu, rel=1e-9)

    def test_conservative_rate_is_zero(self, conservative_system):
        trace = simulate(smooth_random_state(conservative_system.grid), 6.0, 0.02, conservative_system)
        assert abs(fit_decay_rate(trace, (1.0, 5.0)).mu) <= 1e-8


class TestMatchedImpedance:
    """Total absorption of the decoupled longitudinal wave"""

    @pytest.mark.slow
    def test_pulse_is_absorbed_within_two_transits(self):
        p = BresseParams(ell=0.0)  # unit impedance, gamma3 = Z3
        system = build_system(p, 400)

        def bump(x):
            return np.where(np.abs(x - 0.5) < 0.25, np.cos(2.0 * np.pi * (x - 0.5)) ** 4, 0.0)

        U = sample_state(system.grid, [None, None, bump, None, None, None])
        trace = simulate(U, 2.2, None, system)
        # discrete dispersion leaves a small reflected residue
        assert trace.energies[-1] <= 1e-5 * trace.energies[0]
