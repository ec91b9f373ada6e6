"""Conservation-law systems: fluxes, eigenstructure and variable maps.

Arrays carry the component index on axis 0, so a field of ``n`` states of
an ``m``-component system has shape ``(m, n)`` (or ``(m, nx, ny)``).
Primitive layouts are ``(rho, u, p)`` in 1-D and ``(rho, u, v, p)`` in 2-D.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

ADVECTION = 0
BURGERS = 1
EULER1D = 2
EULER2D = 3

_KIND_NAMES = {
    "advection": ADVECTION,
    "burgers": BURGERS,
    "euler1d": EULER1D,
    "euler2d": EULER2D,
}


class DomainError(ValueError):
    """A state outside the admissible set (negative density, pressure, ...)."""


@dataclass(frozen=True)
class EquationSystem:
    name: str
    gamma: float = 1.4
    speed: float = 1.0  # advection velocity

    def __post_init__(self):
        if self.name not in _KIND_NAMES:
            raise ValueError(f"unknown system {self.name!r}; expected one of {sorted(_KIND_NAMES)}")
        if not self.gamma > 1.0:
            raise ValueError("gamma must exceed 1")

    @property
    def kind(self) -> int:
        return _KIND_NAMES[self.name]

    @property
    def m(self) -> int:
        return {ADVECTION: 1, BURGERS: 1, EULER1D: 3, EULER2D: 4}[self.kind]

    @property
    def dims(self) -> int:
        return 2 if self.kind == EULER2D else 1

    @property
    def is_euler(self) -> bool:
        return self.kind in (EULER1D, EULER2D)

    @property
    def has_flux_y(self) -> bool:
        return self.kind == EULER2D


def advection(speed=1.0):
    return EquationSystem("advection", speed=speed)


def burgers():
    return EquationSystem("burgers")


def euler1d(gamma=1.4):
    return EquationSystem("euler1d", gamma=gamma)


def euler2d(gamma=1.4):
    return EquationSystem("euler2d", gamma=gamma)


@dataclass(frozen=True)
class EigenDecomposition:
    lambdas: np.ndarray
    right: np.ndarray  # columns are right eigenvectors
    left: np.ndarray  # rows are left eigenvectors, left == inv(right)


# ---------------------------------------------------------------------------
# variable maps


def _check_physical(rho, p, what="state"):
    rho = np.asarray(rho)
    p = np.asarray(p)
    if not np.all(np.isfinite(rho)) or not np.all(np.isfinite(p)):
        raise DomainError(f"non-finite {what}")
    if np.any(rho <= 0.0):
        raise DomainError(f"density must be positive in {what} (min rho={rho.min():.6g})")
    if np.any(p <= 0.0):
        raise DomainError(f"pressure must be positive in {what} (min p={p.min():.6g})")


def prim_to_cons(sys, w):
    w = np.asarray(w, dtype=float)
    if not sys.is_euler:
        return w.copy()
    g = sys.gamma
    if sys.kind == EULER1D:
        rho, u, p = w
        _check_physical(rho, p, "primitive state")
        return np.array([rho, rho * u, p / (g - 1.0) + 0.5 * rho * u * u])
    rho, u, v, p = w
    _check_physical(rho, p, "primitive state")
    return np.array([rho, rho * u, rho * v, p / (g - 1.0) + 0.5 * rho * (u * u + v * v)])


def cons_to_prim(sys, u, check=True):
    u = np.asarray(u, dtype=float)
    if not sys.is_euler:
        return u.copy()
    g = sys.gamma
    rho = u[0]
    if check and np.any(rho <= 0.0):
        raise DomainError(f"density must be positive (min rho={np.min(rho):.6g})")
    if sys.kind == EULER1D:
        vel = u[1] / rho
        p = (g - 1.0) * (u[2] - 0.5 * rho * vel * vel)
        if check:
            _check_physical(rho, p, "conserved state")
        return np.array([rho, vel, p])
    vx = u[1] / rho
    vy = u[2] / rho
    p = (g - 1.0) * (u[3] - 0.5 * rho * (vx * vx + vy * vy))
    if check:
        _check_physical(rho, p, "conserved state")
    return np.array([rho, vx, vy, p])


def sound_speed(sys, u):
    rho, p = np.asarray(u)[0], cons_to_prim(sys, u)[-1]
    return np.sqrt(sys.gamma * p / rho)


# ---------------------------------------------------------------------------
# fluxes


def flux_x(sys, u):
    """Physical flux in x of conserved state(s) ``u``."""
    u = np.asarray(u, dtype=float)
    k = sys.kind
    if k == ADVECTION:
        return sys.speed * u
    if k == BURGERS:
        return 0.5 * u * u
    w = cons_to_prim(sys, u)
    if k == EULER1D:
        rho, vel, p = w
        return np.array([u[1], u[1] * vel + p, vel * (u[2] + p)])
    rho, vx, vy, p = w
    return np.array([u[1], u[1] * vx + p, u[2] * vx, vx * (u[3] + p)])


def flux_y(sys, u):
    if not sys.has_flux_y:
        raise ValueError(f"system {sys.name} has no y-flux")
    u = np.asarray(u, dtype=float)
    return flux_x(sys, u[[0, 2, 1, 3]])[[0, 2, 1, 3]]


def jacobian(sys, u, axis=0):
    """Analytic flux Jacobian dF/du at a single state."""
    u = np.asarray(u, dtype=float)
    if axis == 1:
        perm = [0, 2, 1, 3]
        a = jacobian(sys, u[perm], 0)
        return a[np.ix_(perm, perm)]
    k = sys.kind
    if k == ADVECTION:
        return np.array([[sys.speed]])
    if k == BURGERS:
        return np.array([[u[0]]])
    g = sys.gamma
    w = cons_to_prim(sys, u)
    if k == EULER1D:
        rho, vel, p = w
        h = (u[2] + p) / rho
        return np.array(
            [
                [0.0, 1.0, 0.0],
                [0.5 * (g - 3.0) * vel * vel, (3.0 - g) * vel, g - 1.0],
                [vel * (0.5 * (g - 1.0) * vel * vel - h), h - (g - 1.0) * vel * vel, g * vel],
            ]
        )
    rho, vx, vy, p = w
    h = (u[3] + p) / rho
    q2 = vx * vx + vy * vy
    return np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [0.5 * (g - 1.0) * q2 - vx * vx, (3.0 - g) * vx, -(g - 1.0) * vy, g - 1.0],
            [-vx * vy, vy, vx, 0.0],
            [vx * (0.5 * (g - 1.0) * q2 - h), h - (g - 1.0) * vx * vx, -(g - 1.0) * vx * vy, g * vx],
        ]
    )


def eigen(sys, u, axis=0):
    """Eigen-decomposition of the flux Jacobian at a single state.

    Right eigenvectors are scaled to unit Euclidean norm and the left
    eigenvectors are the exact inverse of the right eigenvector matrix.
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    k = sys.kind
    if k in (ADVECTION, BURGERS):
        lam = sys.speed if k == ADVECTION else u[0]
        return EigenDecomposition(np.array([lam]), np.eye(1), np.eye(1))
    if axis == 1:
        if k != EULER2D:
            raise ValueError("axis=1 requires a 2-D system")
        perm = [0, 2, 1, 3]
        e = eigen(sys, u[perm], 0)
        return EigenDecomposition(e.lambdas, e.right[perm, :], e.left[:, perm])
    lam, r, _ = _euler_eigen_np(sys, u)
    r = r / np.linalg.norm(r, axis=0)
    return EigenDecomposition(lam, r, np.linalg.inv(r))


def _euler_eigen_np(sys, u):
    g = sys.gamma
    w = cons_to_prim(sys, u)
    if sys.kind == EULER1D:
        rho, vel, p = w
        c = np.sqrt(g * p / rho)
        h = (u[2] + p) / rho
        lam = np.array([vel - c, vel, vel + c])
        r = np.array(
            [
                [1.0, 1.0, 1.0],
                [vel - c, vel, vel + c],
                [h - vel * c, 0.5 * vel * vel, h + vel * c],
            ]
        )
        return lam, r, c
    rho, vx, vy, p = w
    c = np.sqrt(g * p / rho)
    h = (u[3] + p) / rho
    lam = np.array([vx - c, vx, vx, vx + c])
    r = np.array(
        [
            [1.0, 1.0, 0.0, 1.0],
            [vx - c, vx, 0.0, vx + c],
            [vy, vy, 1.0, vy],
            [h - vx * c, 0.5 * (vx * vx + vy * vy), vy, h + vx * c],
        ]
    )
    return lam, r, c


def max_wavespeed(sys, field):
    """Largest |eigenvalue| over all cells and all axis directions.

    ``field`` is a conserved array with components on axis 0 (ghost cells
    excluded by the caller) or a :class:`~grp4fv.fvmesh.CellField`.
    """
    data = field.interior() if hasattr(field, "interior") else np.asarray(field, dtype=float)
    if data.size == 0 or data.shape[-1] == 0:
        raise ValueError("max_wavespeed of an empty field")
    k = sys.kind
    if k == ADVECTION:
        return abs(sys.speed)
    if k == BURGERS:
        return float(np.max(np.abs(data)))
    w = cons_to_prim(sys, data)
    c = np.sqrt(sys.gamma * w[-1] / w[0])
    speed = np.abs(w[1]) + c
    if k == EULER2D:
        speed = np.maximum(speed, np.abs(w[2]) + c)
    return float(np.max(speed))


# ---------------------------------------------------------------------------
# jitted per-state kernels shared by reconstruction, GRP and steppers


@njit(cache=True)
def nb_flux_x(kind, gamma, speed, u, out):
    if kind == ADVECTION:
        out[0] = speed * u[0]
    elif kind == BURGERS:
        out[0] = 0.5 * u[0] * u[0]
    elif kind == EULER1D:
        vel = u[1] / u[0]
        p = (gamma - 1.0) * (u[2] - 0.5 * u[1] * vel)
        out[0] = u[1]
        out[1] = u[1] * vel + p
        out[2] = vel * (u[2] + p)
    else:
        vx = u[1] / u[0]
        vy = u[2] / u[0]
        p = (gamma - 1.0) * (u[3] - 0.5 * (u[1] * vx + u[2] * vy))
        out[0] = u[1]
        out[1] = u[1] * vx + p
        out[2] = u[2] * vx
        out[3] = vx * (u[3] + p)


@njit(cache=True)
def nb_jac_times(kind, gamma, speed, u, vec, out):
    """out = A(u) @ vec for the x-direction flux Jacobian."""
    if kind == ADVECTION:
        out[0] = speed * vec[0]
    elif kind == BURGERS:
        out[0] = u[0] * vec[0]
    elif kind == EULER1D:
        g = gamma
        vel = u[1] / u[0]
        p = (g - 1.0) * (u[2] - 0.5 * u[1] * vel)
        h = (u[2] + p) / u[0]
        out[0] = vec[1]
        out[1] = 0.5 * (g - 3.0) * vel * vel * vec[0] + (3.0 - g) * vel * vec[1] + (g - 1.0) * vec[2]
        out[2] = (
            vel * (0.5 * (g - 1.0) * vel * vel - h) * vec[0]
            + (h - (g - 1.0) * vel * vel) * vec[1]
            + g * vel * vec[2]
        )
    else:
        g = gamma
        vx = u[1] / u[0]
        vy = u[2] / u[0]
        q2 = vx * vx + vy * vy
        p = (g - 1.0) * (u[3] - 0.5 * u[0] * q2)
        h = (u[3] + p) / u[0]
        out[0] = vec[1]
        out[1] = (0.5 * (g - 1.0) * q2 - vx * vx) * vec[0] + (3.0 - g) * vx * vec[1] - (g - 1.0) * vy * vec[2] + (g - 1.0) * vec[3]
        out[2] = -vx * vy * vec[0] + vy * vec[1] + vx * vec[2]
        out[3] = (
            vx * (0.5 * (g - 1.0) * q2 - h) * vec[0]
            + (h - (g - 1.0) * vx * vx) * vec[1]
            - (g - 1.0) * vx * vy * vec[2]
            + g * vx * vec[3]
        )


@njit(cache=True)
def nb_eigen_x(kind, gamma, u, lam, r, l):
    """Analytic x-direction eigensystem of an Euler state (unnormalized R).

    Fills ``lam`` (m,), ``r`` (m, m) with right eigenvectors as columns and
    ``l`` (m, m) = inv(r).  Returns False for a non-physical state.
    """
    g = gamma
    rho = u[0]
    if kind == EULER1D:
        vx = u[1] / rho
        vy = 0.0
        q2 = vx * vx
        p = (g - 1.0) * (u[2] - 0.5 * rho * q2)
        etot = u[2]
    else:
        vx = u[1] / rho
        vy = u[2] / rho
        q2 = vx * vx + vy * vy
        p = (g - 1.0) * (u[3] - 0.5 * rho * q2)
        etot = u[3]
    if not (rho > 0.0 and p > 0.0):
        return False
    c = np.sqrt(g * p / rho)
    h = (etot + p) / rho
    b1 = (g - 1.0) / (c * c)
    b2 = 0.5 * b1 * q2
    if kind == EULER1D:
        lam[0] = vx - c
        lam[1] = vx
        lam[2] = vx + c
        r[0, 0] = 1.0
        r[1, 0] = vx - c
        r[2, 0] = h - vx * c
        r[0, 1] = 1.0
        r[1, 1] = vx
        r[2, 1] = 0.5 * q2
        r[0, 2] = 1.0
        r[1, 2] = vx + c
        r[2, 2] = h + vx * c
        l[0, 0] = 0.5 * (b2 + vx / c)
        l[0, 1] = -0.5 * (b1 * vx + 1.0 / c)
        l[0, 2] = 0.5 * b1
        l[1, 0] = 1.0 - b2
        l[1, 1] = b1 * vx
        l[1, 2] = -b1
        l[2, 0] = 0.5 * (b2 - vx / c)
        l[2, 1] = -0.5 * (b1 * vx - 1.0 / c)
        l[2, 2] = 0.5 * b1
        return True
    lam[0] = vx - c
    lam[1] = vx
    lam[2] = vx
    lam[3] = vx + c
    r[0, 0] = 1.0
    r[1, 0] = vx - c
    r[2, 0] = vy
    r[3, 0] = h - vx * c
    r[0, 1] = 1.0
    r[1, 1] = vx
    r[2, 1] = vy
    r[3, 1] = 0.5 * q2
    r[0, 2] = 0.0
    r[1, 2] = 0.0
    r[2, 2] = 1.0
    r[3, 2] = vy
    r[0, 3] = 1.0
    r[1, 3] = vx + c
    r[2, 3] = vy
    r[3, 3] = h + vx * c
    l[0, 0] = 0.5 * (b2 + vx / c)
    l[0, 1] = -0.5 * (b1 * vx + 1.0 / c)
    l[0, 2] = -0.5 * b1 * vy
    l[0, 3] = 0.5 * b1
    l[1, 0] = 1.0 - b2
    l[1, 1] = b1 * vx
    l[1, 2] = b1 * vy
    l[1, 3] = -b1
    l[2, 0] = -vy
    l[2, 1] = 0.0
    l[2, 2] = 1.0
    l[2, 3] = 0.0
    l[3, 0] = 0.5 * (b2 - vx / c)
    l[3, 1] = -0.5 * (b1 * vx - 1.0 / c)
    l[3, 2] = -0.5 * b1 * vy
    l[3, 3] = 0.5 * b1
    return True


@njit(cache=True)
def nb_is_physical(kind, gamma, u):
    if kind == ADVECTION or kind == BURGERS:
        return np.isfinite(u[0])
    rho = u[0]
    if not (rho > 0.0):
        return False
    if kind == EULER1D:
        p = (gamma - 1.0) * (u[2] - 0.5 * u[1] * u[1] / rho)
    else:
        p = (gamma - 1.0) * (u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) / rho)
    return p > 0.0 and np.isfinite(p)
