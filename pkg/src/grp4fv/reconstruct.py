"""Fifth-order WENO reconstruction of interface values and slopes.

Interface values use the classical WENO-JS combination of three quadratic
candidates.  Slopes (and point values inside a cell, needed for the
transverse pass in 2-D) use an unequal-stencil combination: the degree-4
polynomial on the full five-cell stencil plus the three quadratics,

    P = (w_Q / g_Q) * (p_Q - sum_k g_k p_k) + sum_k w_k p_k,

with nonlinear weights built from the same smoothness indicators.  The
three quadratic derivatives alone cannot reproduce the quartic derivative,
which is why the full-stencil polynomial is included.  In linear mode
every combination collapses to the degree-4 polynomial.

Coordinates inside a cell are measured in cell widths with the cell
centred at 0; stencil cell ``i`` covers ``[i - 1/2, i + 1/2]``.
"""

import numpy as np
from numba import njit

from .eqsys import EULER1D, EULER2D, nb_eigen_x, nb_is_physical

EPS = 1e-6
GHOST = 3
D_OPT = np.array([0.1, 0.6, 0.3])
# linear weights of the unequal-stencil combination: quadratics then quartic
GAMMA_ZQ = np.array([1.0 / 30.0, 1.0 / 30.0, 1.0 / 30.0, 0.9])

WENO = 0
LINEAR = 1


def _mode_code(mode):
    if mode in ("weno", WENO):
        return WENO
    if mode in ("linear", LINEAR):
        return LINEAR
    raise ValueError(f"unknown reconstruction mode {mode!r}; expected 'weno' or 'linear'")


def _projection_flag(sys, projection):
    if projection is None:
        return sys.is_euler
    if projection in ("characteristic", True):
        return sys.is_euler
    if projection in ("component", False):
        return False
    raise ValueError(f"unknown projection {projection!r}; expected 'component' or 'characteristic'")


# ---------------------------------------------------------------------------
# polynomial coefficient tables


def _moment_matrix(offsets, degree):
    """Cell averages of monomials x^n over the cells of a stencil."""
    a = np.empty((len(offsets), degree + 1))
    for r, i in enumerate(offsets):
        for n in range(degree + 1):
            a[r, n] = ((i + 0.5) ** (n + 1) - (i - 0.5) ** (n + 1)) / (n + 1)
    return a


def point_coefficients(x):
    """Value/derivative weights of the candidate polynomials at ``x``.

    Returns an array of shape (2, 4, 5): [value|derivative, poly, cell],
    where poly 0..2 are the quadratics on cells (-2..0), (-1..1), (0..2)
    and poly 3 is the quartic on (-2..2).  Columns refer to cells -2..2.
    """
    tab = np.zeros((2, 4, 5))
    stencils = [(-2, -1, 0), (-1, 0, 1), (0, 1, 2), (-2, -1, 0, 1, 2)]
    for k, st in enumerate(stencils):
        deg = len(st) - 1
        inv = np.linalg.inv(_moment_matrix(st, deg))
        vrow = np.array([x**n for n in range(deg + 1)])
        drow = np.array([n * x ** (n - 1) if n else 0.0 for n in range(deg + 1)])
        cols = [c + 2 for c in st]
        tab[0, k, cols] = vrow @ inv
        tab[1, k, cols] = drow @ inv
    return tab


EDGE_TABLE = point_coefficients(0.5)


# ---------------------------------------------------------------------------
# scalar kernels


@njit(cache=True, fastmath=True)
def _betas(v0, v1, v2, v3, v4):
    b0 = 13.0 / 12.0 * (v0 - 2.0 * v1 + v2) ** 2 + 0.25 * (v0 - 4.0 * v1 + 3.0 * v2) ** 2
    b1 = 13.0 / 12.0 * (v1 - 2.0 * v2 + v3) ** 2 + 0.25 * (v1 - v3) ** 2
    b2 = 13.0 / 12.0 * (v2 - 2.0 * v3 + v4) ** 2 + 0.25 * (3.0 * v2 - 4.0 * v3 + v4) ** 2
    return b0, b1, b2


@njit(cache=True, fastmath=True)
def _js_weights(b0, b1, b2):
    a0 = 0.1 / (EPS + b0) ** 2
    a1 = 0.6 / (EPS + b1) ** 2
    a2 = 0.3 / (EPS + b2) ** 2
    s = a0 + a1 + a2
    return a0 / s, a1 / s, a2 / s


@njit(cache=True, fastmath=True)
def _zq_weights(b0, b1, b2, gam):
    bq = (b0 + b1 + b2) / 3.0
    a0 = gam[0] / (EPS + b0) ** 2
    a1 = gam[1] / (EPS + b1) ** 2
    a2 = gam[2] / (EPS + b2) ** 2
    aq = gam[3] / (EPS + bq) ** 2
    s = a0 + a1 + a2 + aq
    return a0 / s, a1 / s, a2 / s, aq / s


@njit(cache=True, fastmath=True)
def _zq_combine(tab, which, v, w0, w1, w2, wq, gam):
    """Unequal-stencil combination of the candidate polynomials."""
    p0 = tab[which, 0, 0] * v[0] + tab[which, 0, 1] * v[1] + tab[which, 0, 2] * v[2]
    p1 = tab[which, 1, 1] * v[1] + tab[which, 1, 2] * v[2] + tab[which, 1, 3] * v[3]
    p2 = tab[which, 2, 2] * v[2] + tab[which, 2, 3] * v[3] + tab[which, 2, 4] * v[4]
    pq = 0.0
    for c in range(5):
        pq += tab[which, 3, c] * v[c]
    corr = pq - gam[0] * p0 - gam[1] * p1 - gam[2] * p2
    return wq / gam[3] * corr + w0 * p0 + w1 * p1 + w2 * p2


@njit(cache=True, fastmath=True)
def weno_edge(v, linear, tab, gam):
    """Value and derivative (per cell width) at the right edge of cell 0.

    ``v`` holds the five cell averages of cells -2..2.
    """
    if linear:
        val = 0.0
        der = 0.0
        for c in range(5):
            val += tab[0, 3, c] * v[c]
            der += tab[1, 3, c] * v[c]
        return val, der
    b0, b1, b2 = _betas(v[0], v[1], v[2], v[3], v[4])
    w0, w1, w2 = _js_weights(b0, b1, b2)
    q0 = (2.0 * v[0] - 7.0 * v[1] + 11.0 * v[2]) / 6.0
    q1 = (-v[1] + 5.0 * v[2] + 2.0 * v[3]) / 6.0
    q2 = (2.0 * v[2] + 5.0 * v[3] - v[4]) / 6.0
    z0, z1, z2, zq = _zq_weights(b0, b1, b2, gam)
    return w0 * q0 + w1 * q1 + w2 * q2, _zq_combine(tab, 1, v, z0, z1, z2, zq, gam)


@njit(cache=True, fastmath=True)
def weno_edge_value(v, linear, tab):
    """WENO-JS value at the right edge of cell 0 (no derivative)."""
    if linear:
        val = 0.0
        for c in range(5):
            val += tab[0, 3, c] * v[c]
        return val
    b0, b1, b2 = _betas(v[0], v[1], v[2], v[3], v[4])
    w0, w1, w2 = _js_weights(b0, b1, b2)
    q0 = (2.0 * v[0] - 7.0 * v[1] + 11.0 * v[2]) / 6.0
    q1 = (-v[1] + 5.0 * v[2] + 2.0 * v[3]) / 6.0
    q2 = (2.0 * v[2] + 5.0 * v[3] - v[4]) / 6.0
    return w0 * q0 + w1 * q1 + w2 * q2


@njit(cache=True, fastmath=True)
def weno_point(v, linear, tab, gam):
    """Value and derivative at an interior point described by ``tab``."""
    if linear:
        val = 0.0
        der = 0.0
        for c in range(5):
            val += tab[0, 3, c] * v[c]
            der += tab[1, 3, c] * v[c]
        return val, der
    b0, b1, b2 = _betas(v[0], v[1], v[2], v[3], v[4])
    z0, z1, z2, zq = _zq_weights(b0, b1, b2, gam)
    return _zq_combine(tab, 0, v, z0, z1, z2, zq, gam), _zq_combine(tab, 1, v, z0, z1, z2, zq, gam)


# ---------------------------------------------------------------------------
# line reconstruction (normal direction)


@njit(cache=True)
def recon_line(kind, g, base, data, linear, char, dx, tab, gam, ul, sl, ur, sr):
    """Traces at the faces of a line of cells.

    ``base`` (m, n) supplies the states defining the characteristic frame
    at each face, ``data`` (m, n) is the quantity reconstructed (usually
    ``base`` itself).  Face f sits between cells f+2 and f+3, so there are
    n - 5 faces.  Slopes are per unit length.
    """
    _recon_faces(kind, g, base, data, linear, char, dx, tab, gam, ul, sl, ur, sr, False, data, ul, ur)


@njit(cache=True, fastmath=True)
def _recon_faces(kind, g, base, data, linear, char, dx, tab, gam, ul, sl, ur, sr, with_t, tdata, tl, tr):
    m, n = data.shape
    nf = n - 5
    lam = np.empty(m)
    r = np.empty((m, m))
    l = np.empty((m, m))
    ubar = np.empty(m)
    w = np.empty((m, 6))
    wt = np.empty((m, 6))
    v = np.empty(5)
    vl = np.empty(m)
    dl = np.empty(m)
    vr = np.empty(m)
    dr = np.empty(m)
    tvl = np.empty(m)
    tvr = np.empty(m)
    for f in range(nf):
        k = f + 2
        use_char = char
        if use_char:
            for c in range(m):
                ubar[c] = 0.5 * (base[c, k] + base[c, k + 1])
            use_char = nb_eigen_x(kind, g, ubar, lam, r, l)
        if use_char:
            for i in range(m):
                for s in range(6):
                    acc = 0.0
                    acc_t = 0.0
                    for c in range(m):
                        acc += l[i, c] * data[c, k - 2 + s]
                        if with_t:
                            acc_t += l[i, c] * tdata[c, k - 2 + s]
                    w[i, s] = acc
                    wt[i, s] = acc_t
        else:
            for i in range(m):
                for s in range(6):
                    w[i, s] = data[i, k - 2 + s]
                    if with_t:
                        wt[i, s] = tdata[i, k - 2 + s]
        for i in range(m):
            for s in range(5):
                v[s] = w[i, s]
            vl[i], dl[i] = weno_edge(v, linear, tab, gam)
            for s in range(5):
                v[s] = w[i, 5 - s]
            a, b = weno_edge(v, linear, tab, gam)
            vr[i] = a
            dr[i] = -b
            if with_t:
                for s in range(5):
                    v[s] = wt[i, s]
                tvl[i] = weno_edge_value(v, linear, tab)
                for s in range(5):
                    v[s] = wt[i, 5 - s]
                tvr[i] = weno_edge_value(v, linear, tab)
        if use_char:
            for c in range(m):
                a0 = 0.0
                a1 = 0.0
                a2 = 0.0
                a3 = 0.0
                a4 = 0.0
                a5 = 0.0
                for i in range(m):
                    a0 += r[c, i] * vl[i]
                    a1 += r[c, i] * dl[i]
                    a2 += r[c, i] * vr[i]
                    a3 += r[c, i] * dr[i]
                    if with_t:
                        a4 += r[c, i] * tvl[i]
                        a5 += r[c, i] * tvr[i]
                ul[c, f] = a0
                sl[c, f] = a1 / dx
                ur[c, f] = a2
                sr[c, f] = a3 / dx
                if with_t:
                    tl[c, f] = a4
                    tr[c, f] = a5
        else:
            for c in range(m):
                ul[c, f] = vl[c]
                sl[c, f] = dl[c] / dx
                ur[c, f] = vr[c]
                sr[c, f] = dr[c] / dx
                if with_t:
                    tl[c, f] = tvl[c]
                    tr[c, f] = tvr[c]


@njit(cache=True)
def fix_nonphysical(kind, g, cells, ul, sl, ur, sr, tl, tr):
    """Replace non-physical Euler traces by the adjacent cell average.

    Slopes of a replaced trace are zeroed.  ``cells`` is the (m, n) line
    the traces came from.  Returns the number of replaced traces.
    """
    m, nf = ul.shape
    count = 0
    if kind != EULER1D and kind != EULER2D:
        return 0
    have_t = tl.shape[0] > 0
    for f in range(nf):
        if not nb_is_physical(kind, g, ul[:, f]):
            count += 1
            for c in range(m):
                ul[c, f] = cells[c, f + 2]
                sl[c, f] = 0.0
                if have_t:
                    tl[c, f] = 0.0
        if not nb_is_physical(kind, g, ur[:, f]):
            count += 1
            for c in range(m):
                ur[c, f] = cells[c, f + 3]
                sr[c, f] = 0.0
                if have_t:
                    tr[c, f] = 0.0
    return count


# ---------------------------------------------------------------------------
# transverse reconstruction (2-D)


@njit(cache=True)
def _y_eigen(kind, g, u, pu, lam, r, l):
    """Eigen-system of the y-Jacobian at u, in the permuted (y-as-x) frame."""
    pu[0] = u[0]
    pu[1] = u[2]
    pu[2] = u[1]
    pu[3] = u[3]
    return nb_eigen_x(kind, g, pu, lam, r, l)


@njit(cache=True, fastmath=True)
def recon_transverse(kind, g, field, j0, j1, linear, char, dy, tabs, gam, q, dq):
    """Point values and y-derivatives at Gauss ordinates, for rows j0..j1-1.

    ``field`` is (4, nx, ny) with ghosts; ``tabs`` is (K, 2, 4, 5).
    Outputs ``q``/``dq`` have shape (K, j1 - j0, 4, nx).
    """
    m, nx, ny = field.shape
    nk = tabs.shape[0]
    lam = np.empty(m)
    r = np.empty((m, m))
    l = np.empty((m, m))
    pu = np.empty(m)
    u = np.empty(m)
    w = np.empty((m, 5))
    v = np.empty(5)
    val = np.empty(m)
    der = np.empty(m)
    perm = np.array([0, 2, 1, 3])
    for i in range(nx):
        for jj in range(j1 - j0):
            j = j0 + jj
            for c in range(m):
                u[c] = field[c, i, j]
            use_char = char
            if use_char:
                use_char = _y_eigen(kind, g, u, pu, lam, r, l)
            if use_char:
                for a in range(m):
                    for s in range(5):
                        acc = 0.0
                        for c in range(m):
                            acc += l[a, c] * field[perm[c], i, j - 2 + s]
                        w[a, s] = acc
            else:
                for a in range(m):
                    for s in range(5):
                        w[a, s] = field[a, i, j - 2 + s]
            for kk in range(nk):
                for a in range(m):
                    for s in range(5):
                        v[s] = w[a, s]
                    val[a], der[a] = weno_point(v, linear, tabs[kk], gam)
                if use_char:
                    for c in range(m):
                        a0 = 0.0
                        a1 = 0.0
                        for a in range(m):
                            a0 += r[c, a] * val[a]
                            a1 += r[c, a] * der[a]
                        q[kk, jj, perm[c], i] = a0
                        dq[kk, jj, perm[c], i] = a1 / dy
                else:
                    for c in range(m):
                        q[kk, jj, c, i] = val[c]
                        dq[kk, jj, c, i] = der[c] / dy


@njit(cache=True)
def recon_normal_2d(kind, g, cells, q, dq, linear, char, dx, tab, gam, ul, sl, ur, sr, tl, tr):
    """Normal-direction pass over every Gauss ordinate and row.

    Values and normal slopes come from ``q``; tangential slopes are the
    face traces of ``dq`` reconstructed in the frame of ``q``.
    ``q``/``dq`` are (K, ny, m, nx+6); outputs are (K, m, nx+1, ny).
    Non-physical traces fall back to the averages in ``cells`` (m, nx+6, ny+6).
    """
    nk, ny, m, nxg = q.shape
    nf = nxg - 5
    a = np.empty((m, nf))
    b = np.empty((m, nf))
    c_ = np.empty((m, nf))
    d = np.empty((m, nf))
    ta = np.empty((m, nf))
    tc = np.empty((m, nf))
    row = np.empty((m, nxg))
    replaced = 0
    for jj in range(ny):
        for c in range(m):
            for i in range(nxg):
                row[c, i] = cells[c, i, jj + GHOST]
        for kk in range(nk):
            line = q[kk, jj]
            _recon_faces(kind, g, line, line, linear, char, dx, tab, gam, a, b, c_, d, True, dq[kk, jj], ta, tc)
            replaced += fix_nonphysical(kind, g, row, a, b, c_, d, ta, tc)
            for c in range(m):
                for f in range(nf):
                    ul[kk, c, f, jj] = a[c, f]
                    sl[kk, c, f, jj] = b[c, f]
                    ur[kk, c, f, jj] = c_[c, f]
                    sr[kk, c, f, jj] = d[c, f]
                    tl[kk, c, f, jj] = ta[c, f]
                    tr[kk, c, f, jj] = tc[c, f]
    return replaced


# ---------------------------------------------------------------------------
# Python API


class InterfaceTraces:
    """One-sided traces at every interface (and Gauss point in 2-D).

    Arrays have shape (m, nfaces) in 1-D and (K, m, nfaces_normal, ncells_t)
    in 2-D.  ``tan_l``/``tan_r`` hold tangential slopes in 2-D.
    """

    def __init__(self, ul, sl, ur, sr, tan_l=None, tan_r=None, replaced=0):
        self.value_l = ul
        self.slope_l = sl
        self.value_r = ur
        self.slope_r = sr
        self.tan_l = tan_l
        self.tan_r = tan_r
        self.replaced = replaced

    def __len__(self):
        shape = self.value_l.shape
        if len(shape) == 2:
            return shape[1]
        return shape[0] * shape[2] * shape[3]


def _data_of(field):
    return field.data if hasattr(field, "data") else np.asarray(field, dtype=float)


def weno5_traces(sys, cells, dx=1.0, mode="weno", projection=None, ghost=GHOST):
    """Interface traces of a 1-D field of cell averages with ghost cells.

    ``cells`` is a CellField or an (m, n) array whose first and last
    ``ghost`` columns are ghosts.  Faces returned are the n_interior + 1
    faces bounding the interior cells.
    """
    if ghost < GHOST:
        raise ValueError(f"WENO5 needs at least {GHOST} ghost cells, got {ghost}")
    if hasattr(cells, "grid"):
        dx = cells.grid.dx
    u = np.ascontiguousarray(_data_of(cells), dtype=float)
    if u.ndim == 1:
        u = u[None, :]
    if u.shape[0] != sys.m:
        raise ValueError(f"expected {sys.m} components, got {u.shape[0]}")
    # trim surplus ghosts so that the kernel sees exactly three
    extra = ghost - GHOST
    if extra:
        u = np.ascontiguousarray(u[:, extra:-extra])
    if u.shape[1] < 2 * GHOST + 1:
        raise ValueError("field too small for a five-cell stencil")
    nf = u.shape[1] - 5
    out = [np.empty((sys.m, nf)) for _ in range(4)]
    recon_line(sys.kind, sys.gamma, u, u, _mode_code(mode) == LINEAR, _projection_flag(sys, projection), float(dx), EDGE_TABLE, GAMMA_ZQ, *out)
    empty = np.empty((0, 0))
    n = fix_nonphysical(sys.kind, sys.gamma, u, out[0], out[1], out[2], out[3], empty, empty)
    return InterfaceTraces(*out, replaced=n)


def gauss_tables(offsets):
    return np.ascontiguousarray(np.stack([point_coefficients(float(x)) for x in offsets]))


def x_face_traces_2d(sys, u, dx, dy, offsets, linear, char):
    """x-face traces of a (4, nx+6, ny+6) field at Gauss ordinates.

    Returns an InterfaceTraces with arrays of shape (K, 4, nx+1, ny).
    """
    m, nxg, nyg = u.shape
    ny = nyg - 2 * GHOST
    nk = len(offsets)
    q = np.empty((nk, ny, m, nxg))
    dq = np.empty((nk, ny, m, nxg))
    recon_transverse(sys.kind, sys.gamma, u, GHOST, GHOST + ny, linear, char, dy, gauss_tables(offsets), GAMMA_ZQ, q, dq)
    shape = (nk, m, nxg - 5, ny)
    out = [np.empty(shape) for _ in range(6)]
    replaced = recon_normal_2d(sys.kind, sys.gamma, u, q, dq, linear, char, dx, EDGE_TABLE, GAMMA_ZQ, *out)
    return InterfaceTraces(*out, replaced=replaced)


PERM_XY = [0, 2, 1, 3]


def gauss_offsets(k):
    """Gauss-Legendre ordinates on the unit cell (-1/2, 1/2)."""
    if k not in (1, 2, 3):
        raise ValueError(f"gauss_k must be 1, 2 or 3, got {k}")
    return 0.5 * np.polynomial.legendre.leggauss(k)[0]


def weno5_traces_2d(sys, cells, axis, gauss_k=2, mode="weno", projection=None, dx=None, dy=None):
    """Face traces at Gauss points of a 2-D field with three ghost layers.

    ``axis=0`` gives x-faces with arrays shaped (K, 4, nx+1, ny); ``axis=1``
    gives y-faces shaped (K, 4, ny+1, nx), i.e. always (Gauss point,
    component, normal face index, tangential cell index).  Tangential
    slopes are derivatives along the face.
    """
    offsets = gauss_offsets(gauss_k)
    if hasattr(cells, "grid"):
        dx, dy = cells.grid.dx, cells.grid.dy
    if dx is None or dy is None:
        raise ValueError("dx and dy are required for raw arrays")
    u = np.asarray(_data_of(cells), dtype=float)
    if u.ndim != 3 or u.shape[0] != 4:
        raise ValueError("expected a (4, nx+6, ny+6) 2-D Euler field")
    if min(u.shape[1:]) < 2 * GHOST + 1:
        raise ValueError("field too small for a five-cell stencil")
    linear = _mode_code(mode) == LINEAR
    char = _projection_flag(sys, projection)
    if axis == 0:
        return x_face_traces_2d(sys, np.ascontiguousarray(u), dx, dy, offsets, linear, char)
    if axis != 1:
        raise ValueError(f"axis must be 0 or 1, got {axis}")
    swapped = np.ascontiguousarray(u[PERM_XY].transpose(0, 2, 1))
    tr = x_face_traces_2d(sys, swapped, dy, dx, offsets, linear, char)
    back = [np.ascontiguousarray(a[:, PERM_XY]) for a in (tr.value_l, tr.slope_l, tr.value_r, tr.slope_r, tr.tan_l, tr.tan_r)]
    return InterfaceTraces(*back, replaced=tr.replaced)


def js_weights(v):
    """WENO-JS nonlinear weights for a five-cell stencil (left-biased edge)."""
    return np.array(_js_weights(*_betas(*map(float, v))))


def slope_weights(v):
    """Nonlinear weights (quadratics, quartic) of the slope combination."""
    return np.array(_zq_weights(*_betas(*map(float, v)), GAMMA_ZQ))
