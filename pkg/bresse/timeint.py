# bresse/timeint.py

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from tqdm import tqdm

from .config import SYSTEM_CACHE_SIZE
from .exceptions import DecayFitError, DimensionError, SolverError
from .fem import FemSystem
from .generator import StateVec
from .model import BresseParams, wave_speeds
from .utils.logging_utils import get_bresse_logger

logger = get_bresse_logger("timeint")


@dataclass
class EnergyTrace:
    """
    Energy history of a time-integrated state.

    ``boundary_losses[n]`` is the energy dt * v_mid^T D v_mid removed by the
    dampers during step n, so energies[n+1] - energies[n] + boundary_losses[n]
    vanishes up to round-off.
    """

    times: np.ndarray
    energies: np.ndarray
    boundary_losses: np.ndarray = field(default_factory=lambda: np.zeros(0))
    params: Optional[BresseParams] = None
    final_state: Optional[StateVec] = None
    boundary_velocities: Optional[np.ndarray] = None  # (steps+1, 3) values at x = 0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.energies = np.asarray(self.energies, dtype=float)
        self.boundary_losses = np.asarray(self.boundary_losses, dtype=float)
        if self.times.shape != self.energies.shape or self.times.ndim != 1:
            raise DimensionError(
                f"times {self.times.shape} and energies {self.energies.shape} must be equal-length vectors"
            )
        if self.boundary_losses.size and self.boundary_losses.size != self.times.size - 1:
            raise DimensionError(
                f"expected {self.times.size - 1} per-step losses, got {self.boundary_losses.size}"
            )

    @property
    def steps(self) -> int:
        return self.times.size - 1

    @property
    def balance_residuals(self) -> np.ndarray:
        """Per-step E_{n+1} - E_n + loss_n."""
        return np.diff(self.energies) + self.boundary_losses

    @property
    def relative_drift(self) -> float:
        """max |E_n - E_0| / E_0."""
        e0 = self.energies[0]
        if e0 == 0.0:
            return 0.0
        return float(np.max(np.abs(self.energies - e0)) / e0)


def default_time_step(system: FemSystem) -> float:
    """h / (2 * fastest wave speed)."""
    return system.grid.h / (2.0 * max(wave_speeds(system.params)))


class MidpointStepper:
    """
    Implicit midpoint rule for M u'' + D u' + K u = 0 in first-order form.

    With v_mid = (v_n + v_{n+1})/2 the update reduces to
    (M + dt/2 D + dt^2/4 K) v_mid = M v_n - dt/2 K u_n,
    then v_{n+1} = 2 v_mid - v_n and u_{n+1} = u_n + dt v_mid.
    The step matrix is factored once; the stepper holds no other state.
    """

    def __init__(self, system: FemSystem, dt: float):
        if not (math.isfinite(dt) and dt != 0.0):
            raise ValueError(f"time step must be finite and nonzero, got {dt!r}")
        self.system = system
        self.dt = float(dt)
        step_matrix = system.M + 0.5 * dt * system.D + 0.25 * dt ** 2 * system.K
        try:
            self.factor = scipy.linalg.cho_factor(step_matrix)
        except np.linalg.LinAlgError as e:
            raise SolverError(f"midpoint step matrix is not positive definite for dt={dt!r}: {e}") from e

    def step(self, state: StateVec) -> Tuple[StateVec, float]:
        """Advance one step; returns the new state and the boundary loss of the step."""
        s = self.system
        if state.size != s.size:
            raise DimensionError(f"state has {state.size} dofs per block, system has {s.size}")
        rhs = s.M @ state.v - 0.5 * self.dt * (s.K @ state.u)
        v_mid = scipy.linalg.cho_solve(self.factor, rhs)
        new_state = StateVec(state.u + self.dt * v_mid, 2.0 * v_mid - state.v)
        loss = self.dt * float(np.real(np.vdot(v_mid, s.D @ v_mid)))
        return new_state, loss


@lru_cache(maxsize=SYSTEM_CACHE_SIZE)
def midpoint_stepper(system: FemSystem, dt: float) -> MidpointStepper:
    """Stepper shared per (system, dt)."""
    return MidpointStepper(system, dt)


def step_midpoint(state: StateVec, dt: float, system: FemSystem) -> StateVec:
    """
    One implicit midpoint step of length dt.

    Negative dt steps backwards in time; this is only well posed without
    damping, where it inverts a forward step.
    """
    new_state, _ = midpoint_stepper(system, float(dt)).step(state)
    return new_state


def simulate(
    initial: StateVec,
    T: float,
    dt: Optional[float],
    system: FemSystem,
    progress: bool = False,
) -> EnergyTrace:
    """
    Integrate from ``initial`` over ceil(T/dt) midpoint steps.

    Args:
        initial: Initial state (u0, v0)
        T: Horizon (> 0)
        dt: Time step (> 0); None picks default_time_step(system)
        system: Assembled system
        progress: Show a progress bar

    Returns:
        EnergyTrace with energies, per-step losses, boundary velocities and
        the final state
    """
    if dt is None:
        dt = default_time_step(system)
    if not (T > 0.0 and math.isfinite(T)):
        raise ValueError(f"horizon must be positive, got {T!r}")
    if not dt > 0.0:
        raise ValueError(f"time step must be positive, got {dt!r}")

    n_steps = max(1, math.ceil(T / dt - 1e-9))
    stepper = midpoint_stepper(system, float(dt))
    grid = system.grid

    energies = np.empty(n_steps + 1)
    losses = np.empty(n_steps)
    velocities = np.empty((n_steps + 1, 3))
    state = initial
    energies[0] = system.energy(state.u, state.v)
    velocities[0] = np.real(state.boundary_velocities(grid))

    steps = range(n_steps)
    if progress:
        steps = tqdm(steps, desc="Time stepping", unit="step")
    for n in steps:
        state, losses[n] = stepper.step(state)
        energies[n + 1] = system.energy(state.u, state.v)
        velocities[n + 1] = np.real(state.boundary_velocities(grid))

    logger.debug(f"Simulated {n_steps} steps of dt={dt:.3e}: E0={energies[0]:.6e}, E_end={energies[-1]:.6e}")
    return EnergyTrace(
        times=dt * np.arange(n_steps + 1),
        energies=energies,
        boundary_losses=losses,
        params=system.params,
        final_state=state,
        boundary_velocities=velocities,
    )


@dataclass(frozen=True)
class DecayFit:
    mu: float
    residual_norm: float
    window: Tuple[float, float]
    points: int


def fit_decay_rate(trace: EnergyTrace, window: Sequence[float]) -> DecayFit:
    """
    Least-squares fit of ln E(t) = c - 2 mu t over a time window.

    Args:
        trace: Energy trace
        window: (t_a, t_b) inside the trace's time span

    Returns:
        DecayFit with mu = -slope/2 and the residual norm of the linear fit

    Raises:
        DecayFitError: window outside the trace, fewer than two samples, or
            nonpositive energies (decayed to round-off; shrink the window)
    """
    t_a, t_b = (float(t) for t in window)
    times = trace.times
    if times.size == 0:
        raise DecayFitError("empty energy trace")
    slack = 1e-9 * max(1.0, abs(times[-1]))
    if not (t_a < t_b and t_a >= times[0] - slack and t_b <= times[-1] + slack):
        raise DecayFitError(f"window [{t_a}, {t_b}] is not inside [{times[0]}, {times[-1]}]")

    mask = (times >= t_a - slack) & (times <= t_b + slack)
    if mask.sum() < 2:
        raise DecayFitError(f"window [{t_a}, {t_b}] holds fewer than two samples")
    energies = trace.energies[mask]
    if np.any(energies <= 0.0):
        raise DecayFitError(f"nonpositive energy in window [{t_a}, {t_b}]; the trace decayed to round-off")

    t = times[mask]
    log_e = np.log(energies)
    (slope, intercept), residuals, *_ = np.polyfit(t, log_e, 1, full=True)
    residual_norm = float(np.sqrt(residuals[0])) if residuals.size else 0.0
    mu = -0.5 * float(slope) + 0.0
    logger.debug(f"Decay fit over [{t_a}, {t_b}]: mu={mu:.6g}, residual={residual_norm:.3e}")
    return DecayFit(mu, residual_norm, (t_a, t_b), int(mask.sum()))
