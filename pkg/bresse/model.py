# bresse/model.py

import math
import numbers
from dataclasses import dataclass, asdict, replace
from typing import Dict, List, NamedTuple, Sequence, Tuple

import numpy as np

from .config import DEFAULT_PARAMS
from .exceptions import DimensionError, ParameterError

# Two-point Gauss rule on the reference element [0, 1]
GAUSS_POINTS = np.array([0.5 - 0.5 / math.sqrt(3.0), 0.5 + 0.5 / math.sqrt(3.0)])
GAUSS_WEIGHTS = np.array([0.5, 0.5])

_POSITIVE_FIELDS = ("rho1", "rho2", "kappa", "k0", "b", "L")
_NONNEGATIVE_FIELDS = ("ell", "gamma1", "gamma2", "gamma3")


@dataclass(frozen=True)
class BresseParams:
    """
    Physical constants of the Bresse arch and its three boundary gains.

    Units are documentary only (kg/m, kg*m, N, N*m^2, 1/m, m, N*s/m).
    ``ell = 0`` is the Timoshenko limit; zero gains give conservative systems.
    """

    rho1: float = DEFAULT_PARAMS["rho1"]
    rho2: float = DEFAULT_PARAMS["rho2"]
    kappa: float = DEFAULT_PARAMS["kappa"]
    k0: float = DEFAULT_PARAMS["k0"]
    b: float = DEFAULT_PARAMS["b"]
    ell: float = DEFAULT_PARAMS["ell"]
    L: float = DEFAULT_PARAMS["L"]
    gamma1: float = DEFAULT_PARAMS["gamma1"]
    gamma2: float = DEFAULT_PARAMS["gamma2"]
    gamma3: float = DEFAULT_PARAMS["gamma3"]

    def __post_init__(self):
        for name in _POSITIVE_FIELDS + _NONNEGATIVE_FIELDS:
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, numbers.Real):
                raise ParameterError(name, f"must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ParameterError(name, f"must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        for name in _POSITIVE_FIELDS:
            if getattr(self, name) <= 0.0:
                raise ParameterError(name, f"must be strictly positive, got {getattr(self, name)!r}")
        for name in _NONNEGATIVE_FIELDS:
            if getattr(self, name) < 0.0:
                raise ParameterError(name, f"must be nonnegative, got {getattr(self, name)!r}")

    @property
    def gammas(self) -> Tuple[float, float, float]:
        return (self.gamma1, self.gamma2, self.gamma3)

    def with_updates(self, **changes) -> "BresseParams":
        """Copy with some fields replaced; the copy is validated again."""
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


class WaveSpeeds(NamedTuple):
    c1: float  # shear, sqrt(kappa/rho1)
    c2: float  # bending, sqrt(b/rho2)
    c3: float  # longitudinal, sqrt(k0/rho1)


class Impedances(NamedTuple):
    z1: float
    z2: float
    z3: float


def wave_speeds(p: BresseParams) -> WaveSpeeds:
    """Propagation speeds of the three wave families."""
    return WaveSpeeds(
        math.sqrt(p.kappa / p.rho1),
        math.sqrt(p.b / p.rho2),
        math.sqrt(p.k0 / p.rho1),
    )


def impedances(p: BresseParams) -> Impedances:
    """
    Characteristic impedances sqrt(stiffness * density) of the three branches.

    A boundary gain equal to its branch impedance absorbs an incoming wave
    completely when the branch is decoupled.
    """
    return Impedances(
        math.sqrt(p.kappa * p.rho1),
        math.sqrt(p.b * p.rho2),
        math.sqrt(p.k0 * p.rho1),
    )


def has_equal_wave_speeds(p: BresseParams, rtol: float = 1e-12) -> bool:
    """True when all three wave families travel at the same speed."""
    c = wave_speeds(p)
    return math.isclose(c.c1, c.c2, rel_tol=rtol) and math.isclose(c.c1, c.c3, rel_tol=rtol)


def continuous_energy(
    u_fields: np.ndarray,
    v_fields: np.ndarray,
    p: BresseParams,
    x: np.ndarray,
    quadrature: str = "gauss",
) -> float:
    """
    Total energy of the piecewise-linear interpolant of nodal fields.

    Evaluates 1/2 * int( rho1|Phi|^2 + rho2|Psi|^2 + rho1|W|^2
    + kappa|phi_x + psi + ell w|^2 + b|psi_x|^2 + k0|w_x - ell phi|^2 ) dx.

    Args:
        u_fields: (3, n) nodal displacements (phi, psi, w), x=L included
        v_fields: (3, n) nodal velocities (Phi, Psi, W)
        p: Physical parameters
        x: n increasing node coordinates
        quadrature: "gauss" (two-point Gauss per element, exact for the
            interpolant) or "trapezoid" (composite trapezoid per element)

    Returns:
        Energy (nonnegative)
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u_fields)
    v = np.asarray(v_fields)
    if x.ndim != 1 or x.size < 2:
        raise DimensionError(f"need at least two nodes, got shape {x.shape}")
    for label, arr in (("u_fields", u), ("v_fields", v)):
        if arr.shape != (3, x.size):
            raise DimensionError(f"{label} has shape {arr.shape}, expected (3, {x.size})")

    h = np.diff(x)
    if quadrature == "gauss":
        xi, wts = GAUSS_POINTS, GAUSS_WEIGHTS
    elif quadrature == "trapezoid":
        xi, wts = np.array([0.0, 1.0]), np.array([0.5, 0.5])
    else:
        raise ValueError(f"unknown quadrature '{quadrature}'")

    def at(values, s):
        return values[..., :-1] * (1.0 - s) + values[..., 1:] * s

    slopes = np.diff(u, axis=-1) / h
    total = 0.0
    for s, wq in zip(xi, wts):
        phi, psi, w = at(u, s)
        Phi, Psi, W = at(v, s)
        phi_x, psi_x, w_x = slopes
        density = (
            p.rho1 * np.abs(Phi) ** 2
            + p.rho2 * np.abs(Psi) ** 2
            + p.rho1 * np.abs(W) ** 2
            + p.kappa * np.abs(phi_x + psi + p.ell * w) ** 2
            + p.b * np.abs(psi_x) ** 2
            + p.k0 * np.abs(w_x - p.ell * phi) ** 2
        )
        total += wq * np.sum(h * density)
    return 0.5 * float(total)


def dissipation_rate(v_at_0: Sequence[complex], p: BresseParams) -> float:
    """
    Rate of energy change dE/dt produced by the three boundary dampers.

    Args:
        v_at_0: Boundary velocities (Phi(0), Psi(0), W(0))
        p: Physical parameters

    Returns:
        -(gamma1|v1|^2 + gamma2|v2|^2 + gamma3|v3|^2), never positive
    """
    v = np.asarray(v_at_0)
    if v.shape != (3,):
        raise DimensionError(f"expected three boundary velocities, got shape {v.shape}")
    return -float(np.dot(p.gammas, np.abs(v) ** 2))


def analytic_wave_spectrum(p: BresseParams, k_max: int) -> List[complex]:
    """
    Closed-form eigenvalues of the decoupled longitudinal wave (ell = 0).

    The branch rho1 w_tt = k0 w_xx with w(L) = 0 and k0 w_x(0) = gamma3 w_t(0)
    has eigenvalues solving exp(-2 lam L / c3) = (Z3 + gamma3) / (gamma3 - Z3).
    Only roots with Im >= 0 are returned (k = 0..k_max-1); conjugates are implied.
    A matched gain gamma3 = Z3 has no point spectrum and yields an empty list.
    """
    if p.ell != 0.0:
        raise ParameterError("ell", f"the wave branch decouples only for ell = 0, got {p.ell!r}")
    if k_max < 0:
        raise ParameterError("k_max", f"must be nonnegative, got {k_max!r}")

    c3 = wave_speeds(p).c3
    z3 = impedances(p).z3
    g = p.gamma3
    if math.isclose(g, z3, rel_tol=1e-15, abs_tol=0.0):
        return []

    decay = -(c3 / (2.0 * p.L)) * math.log(abs((g + z3) / (g - z3)))
    spacing = math.pi * c3 / p.L
    offset = 0.0 if g > z3 else 0.5 * spacing
    return [complex(decay, offset + k * spacing) for k in range(k_max)]


def wave_characteristic_residual(lam: complex, p: BresseParams) -> float:
    """Residual |exp(-2 lam L/c3)(gamma3 - Z3) - (Z3 + gamma3)| of the wave relation."""
    c3 = wave_speeds(p).c3
    z3 = impedances(p).z3
    return abs(np.exp(-2.0 * lam * p.L / c3) * (p.gamma3 - z3) - (z3 + p.gamma3))
