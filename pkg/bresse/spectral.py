# bresse/spectral.py

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
from tqdm import tqdm

from .config import (
    CLEARANCE_TOL,
    DEDUP_TOL,
    DEFAULT_SHOOTING_MODES,
    DEFAULT_SWEEP_COUNT,
    DENSE_EIG_LIMIT,
    NEAR_SINGULARITY_TOL,
    RESOLVED_BAND,
    SHIFT_INVERT_MODES,
    SHIFT_INVERT_SHIFTS,
    SHOOTING_MATCH_TOL,
    SHOOTING_MAX_ITER,
    SHOOTING_TOL,
)
from .exceptions import NearSingularityError, ParameterError, SolverError
from .fem import FIELDS, FemSystem, build_system, field_dofs
from .generator import EnergyFrame, StateVec, energy_frame, energy_inner, energy_norm, solve_resolvent
from .model import BresseParams, has_equal_wave_speeds, wave_speeds
from .utils.logging_utils import get_bresse_logger

logger = get_bresse_logger("spectral")


def cutoff_frequency(system: FemSystem) -> float:
    """Highest frequency a P1 wave field carries on the mesh: 2 sqrt(3) c/h, or 2 c/h lumped."""
    factor = 2.0 if system.lumped else 2.0 * math.sqrt(3.0)
    return factor * max(wave_speeds(system.params)) / system.grid.h


def resolved_frequency(system: FemSystem, band: float = RESOLVED_BAND) -> float:
    """
    Upper end of the resolved band, band * cutoff_frequency.

    Below it the P1 dispersion error stays under a few percent; above it the
    discrete modes lose the damping of their continuous counterparts as h -> 0.
    """
    return band * cutoff_frequency(system)


@dataclass(frozen=True)
class SpectrumReport:
    """
    Eigenvalues of A_h with the stability quantities of the resolved band.

    ``spectral_abscissa`` and ``imag_axis_clearance`` are max Re and min |Re|
    over the eigenvalues with |Im| <= ``resolved_limit``; ``full_abscissa``
    and ``full_clearance`` cover every computed eigenvalue, cutoff modes
    included.
    """

    eigenvalues: np.ndarray
    spectral_abscissa: float
    imag_axis_clearance: float
    params: BresseParams
    N: int
    fields: Tuple[str, ...] = FIELDS
    resolved_limit: float = math.inf

    @property
    def full_abscissa(self) -> float:
        return float(np.max(self.eigenvalues.real))

    @property
    def full_clearance(self) -> float:
        return float(np.min(np.abs(self.eigenvalues.real)))

    def resolved(self) -> np.ndarray:
        """Eigenvalues with |Im| <= resolved_limit."""
        return self.eigenvalues[np.abs(self.eigenvalues.imag) <= self.resolved_limit]

    def upper_half(self) -> np.ndarray:
        """Eigenvalues with Im >= 0 ordered by modulus."""
        ev = self.eigenvalues[self.eigenvalues.imag >= 0.0]
        return ev[np.argsort(np.abs(ev), kind="stable")]

    def least_damped(self, modes: int) -> np.ndarray:
        """
        Resolved upper-half eigenvalues, rightmost first.

        Strongly damped modes with no continuous counterpart sort last and
        cutoff modes are excluded.
        """
        ev = self.resolved()
        ev = ev[ev.imag >= 0.0]
        return ev[np.argsort(-ev.real, kind="stable")][:modes]


def _check_fields(fields: Sequence[str]) -> Tuple[str, ...]:
    fields = tuple(fields)
    unknown = [name for name in fields if name not in FIELDS]
    if unknown or not fields:
        raise ParameterError("fields", f"expected a non-empty subset of {FIELDS}, got {fields}")
    return fields


def _restricted_frame(system: FemSystem, fields: Tuple[str, ...]) -> EnergyFrame:
    if fields == FIELDS:
        return energy_frame(system)
    idx = field_dofs(system.grid, fields)
    sub = np.ix_(idx, idx)
    return EnergyFrame(system.K[sub], system.M[sub], system.D[sub])


def _merge_conjugates(values: np.ndarray) -> np.ndarray:
    """Union of values and their conjugates, duplicates within DEDUP_TOL dropped."""
    merged: List[complex] = []
    for value in np.concatenate([values, np.conj(values)]):
        if all(abs(value - kept) > DEDUP_TOL * max(1.0, abs(kept)) for kept in merged):
            merged.append(complex(value))
    return np.asarray(merged)


def _shift_invert_eigenvalues(system: FemSystem, idx: np.ndarray, modes: int, limit: float) -> np.ndarray:
    """
    Eigenvalues nearest the imaginary axis over the resolved band.

    Shift-invert ARPACK runs on the sparse linearization with targets i*omega,
    omega spread over [0, limit]; each target returns the ``modes`` eigenvalues
    closest to it, which for a dissipative generator are the rightmost ones
    at that frequency. Conjugates complete the lower half.
    """
    sub = np.ix_(idx, idx)
    K = scipy.sparse.csr_matrix(system.K[sub])
    M = scipy.sparse.csr_matrix(system.M[sub])
    D = scipy.sparse.csr_matrix(system.D[sub])
    n = K.shape[0]
    eye = scipy.sparse.identity(n, format="csr")
    a = scipy.sparse.bmat([[None, eye], [-K, -D]], format="csc").astype(complex)
    b = scipy.sparse.block_diag([eye, M], format="csc").astype(complex)
    k = min(modes, 2 * n - 2)
    found = []
    for omega in np.linspace(0.0, limit, SHIFT_INVERT_SHIFTS):
        values = scipy.sparse.linalg.eigs(a, k=k, M=b, sigma=1j * omega, return_eigenvectors=False)
        found.append(np.asarray(values))
    return _merge_conjugates(np.concatenate(found))


def compute_spectrum(system: FemSystem, fields: Optional[Sequence[str]] = None) -> SpectrumReport:
    """
    Eigenvalues of A_h, the roots of det(lam^2 M + lam D + K) = 0.

    Args:
        system: Assembled system
        fields: Restrict to the dofs of these fields; only meaningful when
            they decouple from the rest (e.g. ("w",) for ell = 0)

    Returns:
        SpectrumReport whose abscissa and clearance are taken over the
        resolved band. Above DENSE_EIG_LIMIT unknowns only eigenvalues near
        the resolved stretch of the imaginary axis are computed.

    Raises:
        ParameterError: unknown or empty field selection
        SolverError: the eigensolver did not converge
    """
    fields = FIELDS if fields is None else _check_fields(fields)
    limit = resolved_frequency(system)
    idx = field_dofs(system.grid, fields)
    try:
        if 2 * idx.size <= DENSE_EIG_LIMIT:
            frame = _restricted_frame(system, fields)
            eigenvalues = scipy.linalg.eigvals(frame.matrix)
        else:
            logger.info(f"{2 * idx.size} unknowns exceed the dense limit; using shift-invert")
            eigenvalues = _shift_invert_eigenvalues(system, idx, SHIFT_INVERT_MODES, limit)
    except (np.linalg.LinAlgError, scipy.sparse.linalg.ArpackError) as e:
        raise SolverError(f"eigensolver failed: {e}") from e

    eigenvalues = eigenvalues[np.lexsort((eigenvalues.imag, eigenvalues.real))]
    resolved = eigenvalues[np.abs(eigenvalues.imag) <= limit]
    if resolved.size == 0:
        logger.warning(f"No eigenvalue below the resolved frequency {limit:.6g} at N={system.grid.N}; using all")
        resolved = eigenvalues
    abscissa = float(np.max(resolved.real))
    clearance = float(np.min(np.abs(resolved.real)))
    logger.debug(f"Spectrum N={system.grid.N} fields={fields}: abscissa={abscissa:.6g}, clearance={clearance:.3e} "
                 f"over |Im| <= {limit:.6g}")
    return SpectrumReport(eigenvalues, abscissa, clearance, system.params, system.grid.N, fields, limit)


def resolved_state(U: StateVec, system: FemSystem) -> StateVec:
    """
    H-orthogonal projection of U onto the invariant subspace of the resolved modes.

    The subspace is spanned by the leading Schur vectors of A_hat with the
    resolved eigenvalues sorted first, so the projected state evolves within
    it and its energy decays at the resolved rate.

    Raises:
        SolverError: the ordered Schur decomposition failed
    """
    if 2 * system.size > DENSE_EIG_LIMIT:
        raise SolverError(f"{2 * system.size} unknowns exceed the dense limit for the resolved projection")
    frame = energy_frame(system)
    limit = resolved_frequency(system)
    try:
        _, Z, sdim = scipy.linalg.schur(frame.matrix, output="complex", sort=lambda z: abs(z.imag) <= limit)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise SolverError(f"ordered Schur decomposition failed: {e}") from e
    basis = Z[:, :sdim]
    x = frame.to_frame(U)
    projected = basis @ (basis.conj().T @ x)
    if np.isrealobj(x):
        projected = projected.real
    logger.debug(f"Resolved projection keeps {sdim} of {Z.shape[0]} modes")
    return frame.from_frame(projected)


def resolvent_norm(lam: float, system: FemSystem) -> float:
    """
    ||(i lam I - A_h)^{-1}|| in the H-norm.

    Computed as 1 / sigma_min(i lam I - A_hat) in the energy frame.

    Raises:
        NearSingularityError: sigma_min <= NEAR_SINGULARITY_TOL * max(1, ||A_hat||)
    """
    frame = energy_frame(system)
    z = 1j * lam * np.eye(frame.matrix.shape[0]) - frame.matrix
    try:
        sigma_min = float(scipy.linalg.svdvals(z)[-1])
    except np.linalg.LinAlgError as e:
        raise SolverError(f"singular value computation failed at lambda={lam!r}: {e}") from e
    if sigma_min <= NEAR_SINGULARITY_TOL * max(1.0, frame.norm):
        raise NearSingularityError(lam, f"i*lambda is an eigenvalue up to {sigma_min:.3e} at lambda={lam!r}")
    return 1.0 / sigma_min


def apply_adjoint_resolvent(lam: float, G: StateVec, system: FemSystem) -> StateVec:
    """
    R(lam)^* G in the H-inner product, through R(lam)^* = P R(-lam) P.

    P flips the sign of the velocity block; the identity holds because the
    energy-frame generator satisfies A_hat^T = P A_hat P.
    """
    flipped = StateVec(G.u, -G.v)
    out = solve_resolvent(-lam, flipped, system)
    return StateVec(out.u, -out.v)


def resolvent_adjoint_identity(lam: float, F: StateVec, G: StateVec, system: FemSystem) -> float:
    """Relative gap |<R F, G> - <F, R^* G>| / (|F| |G|) in the H-inner product."""
    lhs = energy_inner(G, solve_resolvent(lam, F, system), system)
    rhs = energy_inner(apply_adjoint_resolvent(lam, G, system), F, system)
    scale = energy_norm(F, system) * energy_norm(G, system)
    return abs(lhs - rhs) / scale if scale > 0 else 0.0


def power_iteration_resolvent_norm(
    lam: float,
    system: FemSystem,
    iterations: int = 1000,
    seed: int = 0,
) -> float:
    """
    ||R(lam)|| estimated by power iteration on R^* R from a random load.

    Only solve_resolvent and the adjoint identity are used, so the value is
    an independent check of resolvent_norm.
    """
    rng = np.random.default_rng(seed)
    n = system.size
    F = StateVec(rng.standard_normal(n) + 1j * rng.standard_normal(n),
                 rng.standard_normal(n) + 1j * rng.standard_normal(n))
    F = F * (1.0 / energy_norm(F, system))
    estimate = 0.0
    for _ in range(iterations):
        U = solve_resolvent(lam, F, system)
        estimate = energy_norm(U, system)
        G = apply_adjoint_resolvent(lam, U, system)
        F = G * (1.0 / energy_norm(G, system))
    return estimate


@dataclass(frozen=True)
class ResolventSweep:
    lambdas: np.ndarray
    norms: np.ndarray
    sup_norm: float
    argmax: float
    near_singular: Tuple[float, ...] = ()

    @property
    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.norms)))


def sweep_grid(lambda_max: float, count: int) -> np.ndarray:
    """
    Symmetric grid on [-lambda_max, lambda_max]: linear near 0, logarithmic tail.

    The positive half has count // 2 points, half of them evenly spaced on
    (0, min(10, lambda_max)] and the rest geometrically spaced up to
    lambda_max. Odd counts include lambda = 0.
    """
    if not lambda_max > 0.0:
        raise ParameterError("lambda_max", f"must be positive, got {lambda_max!r}")
    if count < 2:
        raise ParameterError("sweep_count", f"must be at least 2, got {count!r}")
    half = count // 2
    knee = min(10.0, lambda_max)
    n_lin = max(1, half // 2) if knee < lambda_max else half
    linear = np.linspace(0.0, knee, n_lin + 1)[1:]
    tail = np.geomspace(knee, lambda_max, half - n_lin + 1)[1:] if half > n_lin else np.empty(0)
    positive = np.concatenate([linear, tail])
    middle = [0.0] if count % 2 else []
    return np.concatenate([-positive[::-1], middle, positive])


def resolvent_sweep(
    lambda_max: float,
    count: int,
    system: FemSystem,
    lambdas: Optional[Iterable[float]] = None,
    perturb: bool = True,
    progress: bool = False,
) -> ResolventSweep:
    """
    Resolvent norms over a symmetric frequency grid.

    Args:
        lambda_max: Half-width of the grid
        count: Number of grid points
        system: Assembled system
        lambdas: Explicit grid instead of sweep_grid(lambda_max, count)
        perturb: On a near-singular point retry half a grid step away and
            record the original lambda in ``near_singular``; without it the
            error propagates
        progress: Show a progress bar

    Returns:
        ResolventSweep; norms of points that stay singular after the retry
        are inf
    """
    grid = np.asarray(sweep_grid(lambda_max, count) if lambdas is None else list(lambdas), dtype=float)
    spacing = np.diff(grid) if grid.size > 1 else np.array([1.0])
    cache: Dict[float, float] = {}
    hits: List[float] = []
    singular_keys = set()
    norms = np.empty(grid.size)

    points = enumerate(grid)
    if progress:
        points = tqdm(points, total=grid.size, desc="Resolvent sweep", unit="lambda")
    for j, lam in points:
        key = abs(float(lam))
        # real A_hat: the norm is even in lambda
        if key not in cache:
            try:
                cache[key] = resolvent_norm(key, system)
            except NearSingularityError:
                if not perturb:
                    raise
                hits.append(float(lam))
                singular_keys.add(key)
                step = 0.5 * float(spacing[min(j, spacing.size - 1)])
                try:
                    cache[key] = resolvent_norm(key + step, system)
                except NearSingularityError:
                    logger.warning(f"Resolvent stays singular near lambda={lam!r}")
                    cache[key] = np.inf
        elif key in singular_keys:
            hits.append(float(lam))
        norms[j] = cache[key]

    k = int(np.argmax(norms))
    sweep = ResolventSweep(grid, norms, float(norms[k]), float(grid[k]), tuple(hits))
    logger.debug(f"Resolvent sweep over {grid.size} points: sup={sweep.sup_norm:.6g} at {sweep.argmax:.6g}")
    return sweep


def first_order_matrix(s: complex, p: BresseParams) -> np.ndarray:
    """
    Coefficient matrix of X' = A(s) X for X = (phi, psi, w, phi_x, psi_x, w_x).

    Obtained from the eigen-equations with time factor exp(s t):
        phi_xx = ((s^2 rho1 + k0 ell^2)/kappa) phi - psi_x - ((kappa + k0) ell/kappa) w_x
        psi_xx = ((s^2 rho2 + kappa)/b) psi + (kappa/b) phi_x + (kappa ell/b) w
        w_xx   = ((s^2 rho1 + kappa ell^2)/k0) w + ((kappa + k0) ell/k0) phi_x + (kappa ell/k0) psi
    """
    s2 = complex(s) ** 2
    ell = p.ell
    a = np.zeros((6, 6), dtype=complex)
    a[0:3, 3:6] = np.eye(3)
    a[3, 0] = (s2 * p.rho1 + p.k0 * ell ** 2) / p.kappa
    a[3, 4] = -1.0
    a[3, 5] = -(p.kappa + p.k0) * ell / p.kappa
    a[4, 1] = (s2 * p.rho2 + p.kappa) / p.b
    a[4, 2] = p.kappa * ell / p.b
    a[4, 3] = p.kappa / p.b
    a[5, 1] = p.kappa * ell / p.k0
    a[5, 2] = (s2 * p.rho1 + p.kappa * ell ** 2) / p.k0
    a[5, 3] = (p.kappa + p.k0) * ell / p.k0
    return a


def transfer_matrix(s: complex, p: BresseParams, length: Optional[float] = None) -> np.ndarray:
    """exp(length * A(s)) by scaling and squaring; length defaults to L."""
    length = p.L if length is None else float(length)
    return scipy.linalg.expm(length * first_order_matrix(s, p))


def boundary_basis(s: complex, p: BresseParams) -> np.ndarray:
    """
    6x3 basis of initial vectors X(0) satisfying the damped conditions at x = 0.

    Column j has (phi, psi, w)(0) = e_j and derivatives
    phi_x = gamma1 s phi/kappa - psi - ell w, psi_x = gamma2 s psi/b,
    w_x = gamma3 s w/k0 + ell phi.
    """
    s = complex(s)
    basis = np.zeros((6, 3), dtype=complex)
    basis[0:3, 0:3] = np.eye(3)
    basis[3, :] = [p.gamma1 * s / p.kappa, -1.0, -p.ell]
    basis[4, :] = [0.0, p.gamma2 * s / p.b, 0.0]
    basis[5, :] = [p.ell, 0.0, p.gamma3 * s / p.k0]
    return basis


def characteristic_function(s: complex, p: BresseParams) -> complex:
    """
    det of the (phi, psi, w)(L) values of the three propagated basis vectors.

    The zeros are exactly the eigenvalues of the continuous damped operator.
    """
    propagated = transfer_matrix(s, p) @ boundary_basis(s, p)
    return complex(np.linalg.det(propagated[0:3, :]))


@dataclass(frozen=True)
class ShootingResult:
    roots: List[complex]
    failed_seeds: List[complex] = field(default_factory=list)


def _secant(seed: complex, p: BresseParams, tol: float, max_iter: int) -> Optional[complex]:
    s0 = complex(seed)
    s1 = s0 * (1.0 + 1e-7) + 1e-7
    f0 = characteristic_function(s0, p)
    if f0 == 0.0:
        return s0
    f1 = characteristic_function(s1, p)
    for _ in range(max_iter):
        if f1 == 0.0:
            return s1
        if f1 == f0:
            return None
        step = f1 * (s1 - s0) / (f1 - f0)
        s0, f0 = s1, f1
        s1 = s1 - step
        if not np.isfinite(s1):
            return None
        if abs(step) <= tol * max(1.0, abs(s1)):
            return s1
        f1 = characteristic_function(s1, p)
    return None


def find_eigen_shooting(
    seeds: Sequence[complex],
    p: BresseParams,
    tol: float = SHOOTING_TOL,
    max_iter: int = SHOOTING_MAX_ITER,
) -> ShootingResult:
    """
    Refine eigenvalue guesses to zeros of the characteristic function.

    Args:
        seeds: Starting points, typically discrete eigenvalues
        p: Physical parameters
        tol: Stop once the secant step is below tol * max(1, |s|)
        max_iter: Iteration cap per seed

    Returns:
        ShootingResult with the roots (deduplicated within DEDUP_TOL, in seed
        order) and the seeds that did not converge
    """
    roots: List[complex] = []
    failed: List[complex] = []
    for seed in seeds:
        root = _secant(seed, p, tol, max_iter)
        if root is None:
            logger.warning(f"Shooting did not converge from seed {seed}")
            failed.append(complex(seed))
            continue
        if all(abs(root - r) > DEDUP_TOL * max(1.0, abs(r)) for r in roots):
            roots.append(root)
    return ShootingResult(roots, failed)


@dataclass
class StabilityCertificate:
    passed: bool
    spectral_abscissa: float
    imag_axis_clearance: float
    resolvent_sup: float
    resolvent_argmax: float
    mu_candidate: float
    shooting_deltas: List[float]
    failures: List[str]
    equal_wave_speeds: bool
    params: BresseParams
    N: int
    checks: Dict[str, bool] = field(default_factory=dict)
    resolved_limit: float = math.inf
    full_abscissa: float = math.nan
    full_clearance: float = math.nan
    full_resolvent_sup: float = math.nan

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "spectral_abscissa": self.spectral_abscissa,
            "imag_axis_clearance": self.imag_axis_clearance,
            "resolvent_sup": self.resolvent_sup,
            "resolvent_argmax": self.resolvent_argmax,
            "mu_candidate": self.mu_candidate,
            "shooting_deltas": list(self.shooting_deltas),
            "failures": list(self.failures),
            "equal_wave_speeds": self.equal_wave_speeds,
            "checks": dict(self.checks),
            "params": self.params.to_dict(),
            "N": self.N,
            "resolved_limit": self.resolved_limit,
            "full_spectrum": {
                "spectral_abscissa": self.full_abscissa,
                "imag_axis_clearance": self.full_clearance,
                "resolvent_sup": self.full_resolvent_sup,
            },
        }


def shooting_deltas(spectrum: SpectrumReport, modes: int) -> Tuple[List[float], List[complex]]:
    """
    Relative gaps between the least-damped resolved eigenvalues and their shooting roots.

    Returns the deltas and the seeds whose refinement failed.
    """
    seeds = spectrum.least_damped(modes)
    deltas: List[float] = []
    failed: List[complex] = []
    for seed in seeds:
        result = find_eigen_shooting([seed], spectrum.params)
        if not result.roots:
            failed.append(complex(seed))
            continue
        root = result.roots[0]
        deltas.append(float(abs(seed - root) / max(abs(root), 1.0)))
    return deltas, failed


def resolved_sup(sweep: ResolventSweep, limit: float) -> Tuple[float, float]:
    """Largest sweep norm and its lambda among points with |lambda| <= limit (all points if none)."""
    mask = np.abs(sweep.lambdas) <= limit
    if not np.any(mask):
        return sweep.sup_norm, sweep.argmax
    lambdas, norms = sweep.lambdas[mask], sweep.norms[mask]
    k = int(np.argmax(norms))
    return float(norms[k]), float(lambdas[k])


def certify_stability(
    p: BresseParams,
    N: int,
    lambda_max: float,
    count: int = DEFAULT_SWEEP_COUNT,
    shooting_modes: int = DEFAULT_SHOOTING_MODES,
    progress: bool = False,
) -> StabilityCertificate:
    """
    Floating-point evidence of exponential stability of the discrete system.

    Sub-checks: spectral abscissa < 0 and imaginary-axis clearance above
    CLEARANCE_TOL over the resolved band, a finite resolvent at every point
    of [-lambda_max, lambda_max], and the least-damped resolved eigenvalues
    matching shooting roots within SHOOTING_MATCH_TOL. Any failing sub-check
    is named in ``failures``.

    The reported abscissa, clearance, mu_candidate and resolvent sup are the
    resolved-band values, which converge under refinement; the full-spectrum
    values are kept as diagnostics.
    """
    system = build_system(p, N)
    spectrum = compute_spectrum(system)
    sweep = resolvent_sweep(lambda_max, count, system, progress=progress)
    sup, argmax = resolved_sup(sweep, spectrum.resolved_limit)
    deltas, failed_seeds = shooting_deltas(spectrum, shooting_modes)

    checks = {
        "spectral_abscissa": spectrum.spectral_abscissa < 0.0,
        "imag_axis_clearance": spectrum.imag_axis_clearance > CLEARANCE_TOL,
        "resolvent_sup": sweep.finite and not sweep.near_singular,
        "shooting": not failed_seeds and all(d <= SHOOTING_MATCH_TOL for d in deltas),
    }
    failures = []
    if not checks["spectral_abscissa"]:
        failures.append(f"spectral abscissa {spectrum.spectral_abscissa:.6g} is not negative")
    if not checks["imag_axis_clearance"]:
        failures.append(f"imaginary-axis clearance {spectrum.imag_axis_clearance:.3e} <= {CLEARANCE_TOL:g}")
    if not checks["resolvent_sup"]:
        failures.append(f"resolvent near-singular at lambda in {list(sweep.near_singular)}")
    if not checks["shooting"]:
        failures.append(f"shooting mismatch (deltas {deltas}, failed seeds {failed_seeds})")

    certificate = StabilityCertificate(
        passed=all(checks.values()),
        spectral_abscissa=spectrum.spectral_abscissa,
        imag_axis_clearance=spectrum.imag_axis_clearance,
        resolvent_sup=sup,
        resolvent_argmax=argmax,
        mu_candidate=-spectrum.spectral_abscissa,
        shooting_deltas=deltas,
        failures=failures,
        equal_wave_speeds=has_equal_wave_speeds(p),
        params=p,
        N=N,
        checks=checks,
        resolved_limit=spectrum.resolved_limit,
        full_abscissa=spectrum.full_abscissa,
        full_clearance=spectrum.full_clearance,
        full_resolvent_sup=sweep.sup_norm,
    )
    for message in failures:
        logger.warning(f"Certificate sub-check failed: {message}")
    return certificate


@dataclass(frozen=True)
class GainScanRow:
    factor: float
    spectral_abscissa: float
    imag_axis_clearance: float


def scan_gains(p: BresseParams, N: int, factors: Sequence[float]) -> List[GainScanRow]:
    """Spectral abscissa as the three gains are scaled by a common factor."""
    rows = []
    for factor in factors:
        if not factor >= 0.0:
            raise ParameterError("factor", f"gain factor must be nonnegative, got {factor!r}")
        scaled = p.with_updates(
            gamma1=factor * p.gamma1, gamma2=factor * p.gamma2, gamma3=factor * p.gamma3
        )
        spectrum = compute_spectrum(build_system(scaled, N))
        rows.append(GainScanRow(float(factor), spectrum.spectral_abscissa, spectrum.imag_axis_clearance))
    return rows
