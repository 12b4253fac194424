# bresse/fem.py

from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse

from .exceptions import DimensionError, ParameterError, SolverError
from .model import GAUSS_POINTS, GAUSS_WEIGHTS, BresseParams
from .utils.logging_utils import get_bresse_logger

logger = get_bresse_logger("fem")

FIELDS = ("phi", "psi", "w")


@dataclass(frozen=True)
class Grid:
    """
    Uniform mesh of (0, L) with N elements.

    Node 0 (x = 0) carries the dampers; node N (x = L) is clamped and its
    degrees of freedom are eliminated.
    """

    L: float
    N: int

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.N + 1)

    @property
    def free_nodes(self) -> np.ndarray:
        """Coordinates carrying unknowns (x_0 .. x_{N-1})."""
        return self.nodes[:-1]


def build_grid(L: float, N: int) -> Grid:
    """
    Build the uniform grid x_j = j*L/N, j = 0..N.

    Args:
        L: Beam length (> 0)
        N: Element count (>= 1)

    Returns:
        Grid
    """
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise ParameterError("N", f"element count must be an integer >= 1, got {N!r}")
    if not L > 0.0:
        raise ParameterError("L", f"length must be strictly positive, got {L!r}")
    return Grid(float(L), int(N))


def dof_index(grid: Grid, field_name: str, node: int) -> int:
    """Global index of a field at a free node in the [phi.., psi.., w..] ordering."""
    if not 0 <= node < grid.N:
        raise DimensionError(f"node {node} is not a free node of a {grid.N}-element grid")
    return FIELDS.index(field_name) * grid.N + node


def boundary_dofs(grid: Grid) -> Tuple[int, int, int]:
    """Indices of phi, psi and w at x = 0."""
    return (0, grid.N, 2 * grid.N)


def field_dofs(grid: Grid, fields: Iterable[str]) -> np.ndarray:
    """Global indices of every free node of the named fields."""
    blocks = [np.arange(grid.N) + FIELDS.index(name) * grid.N for name in fields]
    return np.concatenate(blocks)


def nodal_fields(vec: np.ndarray, grid: Grid) -> np.ndarray:
    """
    Reshape a 3N dof vector into (3, N+1) nodal fields with the clamped zero at x = L.
    """
    vec = np.asarray(vec)
    if vec.shape != (3 * grid.N,):
        raise DimensionError(f"expected {3 * grid.N} dofs, got shape {vec.shape}")
    out = np.zeros((3, grid.N + 1), dtype=vec.dtype)
    out[:, :-1] = vec.reshape(3, grid.N)
    return out


def _element_shape(s: float, h: float):
    values = np.array([1.0 - s, s])
    slopes = np.array([-1.0, 1.0]) / h
    return values, slopes


def element_stiffness(p: BresseParams, h: float) -> np.ndarray:
    """
    6x6 element matrix of the form B on one element.

    Local dofs are [phi_a, phi_b, psi_a, psi_b, w_a, w_b]; the three strains
    phi_x + psi + ell w, psi_x and w_x - ell phi are quadratic at most, so the
    two-point Gauss rule integrates them exactly.
    """
    ke = np.zeros((6, 6))
    zero = np.zeros(2)
    for s, wq in zip(GAUSS_POINTS, GAUSS_WEIGHTS):
        n, dn = _element_shape(s, h)
        shear = np.concatenate([dn, n, p.ell * n])
        bending = np.concatenate([zero, dn, zero])
        axial = np.concatenate([-p.ell * n, zero, dn])
        ke += h * wq * (
            p.kappa * np.outer(shear, shear)
            + p.b * np.outer(bending, bending)
            + p.k0 * np.outer(axial, axial)
        )
    return ke


def element_mass(h: float, lumped: bool = False) -> np.ndarray:
    """2x2 scalar mass matrix of one linear element."""
    if lumped:
        return np.diag([h / 2.0, h / 2.0])
    return h / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])


def _assemble(element_matrix: np.ndarray, grid: Grid, nfields: int) -> np.ndarray:
    """
    Scatter an identical element matrix over every element and drop the x = L dofs.

    COO duplicates are summed in a fixed order, so assembly is deterministic.
    """
    n_nodes = grid.N + 1
    rows, cols, data = [], [], []
    for e in range(grid.N):
        local = np.array([f * n_nodes + e + a for f in range(nfields) for a in (0, 1)])
        rows.append(np.repeat(local, local.size))
        cols.append(np.tile(local, local.size))
        data.append(element_matrix.ravel())
    size = nfields * n_nodes
    full = scipy.sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size),
    ).toarray()
    keep = np.array([f * n_nodes + j for f in range(nfields) for j in range(grid.N)])
    return full[np.ix_(keep, keep)]


def assemble_mass(p: BresseParams, grid: Grid, lumped: bool = False) -> np.ndarray:
    """
    Block-diagonal mass matrix diag(rho1 M1, rho2 M1, rho1 M1).

    Args:
        p: Physical parameters
        grid: Mesh
        lumped: Use row-sum lumping instead of the consistent mass

    Returns:
        (3N, 3N) symmetric positive-definite matrix
    """
    m1 = _assemble(element_mass(grid.h, lumped), grid, 1)
    return scipy.linalg.block_diag(p.rho1 * m1, p.rho2 * m1, p.rho1 * m1)


def assemble_stiffness(p: BresseParams, grid: Grid) -> np.ndarray:
    """
    Gram matrix of the sesquilinear form B on the piecewise-linear space.

    Args:
        p: Physical parameters
        grid: Mesh

    Returns:
        (3N, 3N) symmetric matrix with u^T K u = B(u, u)
    """
    k = _assemble(element_stiffness(p, grid.h), grid, 3)
    # exact symmetry regardless of summation round-off
    return 0.5 * (k + k.T)


def assemble_damping(p: BresseParams, grid: Grid) -> np.ndarray:
    """Rank <= 3 damping matrix holding gamma1..3 at the x = 0 dofs."""
    d = np.zeros((3 * grid.N, 3 * grid.N))
    for idx, gain in zip(boundary_dofs(grid), p.gammas):
        d[idx, idx] = gain
    return d


def check_coercivity(K: np.ndarray, M: np.ndarray = None) -> float:
    """
    Smallest eigenvalue of K, or of the pencil (K, M) when M is given.

    The pencil value is the discrete coercivity constant of B relative to the
    L2 mass norm and stays bounded away from zero under refinement; the plain
    smallest eigenvalue of K shrinks with h.

    Raises:
        SolverError: if the symmetric eigensolver fails
    """
    try:
        if M is None:
            values = scipy.linalg.eigh(K, eigvals_only=True, subset_by_index=[0, 0])
        else:
            values = scipy.linalg.eigh(K, M, eigvals_only=True, subset_by_index=[0, 0])
    except (np.linalg.LinAlgError, ValueError) as e:
        raise SolverError(f"coercivity eigensolve failed: {e}") from e
    return float(values[0])


@dataclass(frozen=True, eq=False)
class FemSystem:
    """Assembled mass, stiffness and damping matrices on one grid."""

    M: np.ndarray
    K: np.ndarray
    D: np.ndarray
    grid: Grid
    params: BresseParams
    lumped: bool = False

    def __post_init__(self):
        n = 3 * self.grid.N
        for name in ("M", "K", "D"):
            mat = getattr(self, name)
            if mat.shape != (n, n):
                raise DimensionError(f"{name} has shape {mat.shape}, expected ({n}, {n})")
            mat.setflags(write=False)

    @property
    def size(self) -> int:
        return 3 * self.grid.N

    def energy(self, u: np.ndarray, v: np.ndarray) -> float:
        """Discrete energy 1/2 (v^T M v + u^T K u) of a real or complex state."""
        return 0.5 * float(np.real(np.vdot(v, self.M @ v) + np.vdot(u, self.K @ u)))


def build_system(p: BresseParams, N: int, lumped: bool = False) -> FemSystem:
    """
    Assemble M, K and D for the given parameters on a uniform N-element grid.

    Args:
        p: Physical parameters
        N: Element count
        lumped: Lump the mass matrix

    Returns:
        FemSystem
    """
    grid = build_grid(p.L, N)
    system = FemSystem(
        M=assemble_mass(p, grid, lumped),
        K=assemble_stiffness(p, grid),
        D=assemble_damping(p, grid),
        grid=grid,
        params=p,
        lumped=lumped,
    )
    logger.debug(f"Assembled system N={N} (3N={system.size}, lumped={lumped})")
    return system
