"""Spherical-wave kernels for the multipole solvers.

Conventions used throughout the package
---------------------------------------
* time dependence exp(-i*omega*t); outgoing waves use h_n^(1).
* Riccati-Bessel functions ``psi_n = z j_n``, ``chi_n = -z y_n`` and
  ``xi_n = psi_n - 1j*chi_n = z h_n^(1)``.
* Scalar waves ``u_nm = z_n(kr) Y_nm`` with orthonormal, Condon-Shortley
  spherical harmonics.
* Vector waves ``M_nm = z_n(kr) X_nm`` with ``X_nm = L Y_nm / sqrt(n(n+1))``,
  ``L = -i r x grad``, and ``N_nm = curl(M_nm) / k``.
* Multipole coefficients of one expansion are stored as a vector of length
  ``2*L`` with ``L = n_max*(n_max+2)``: M-type first, then N-type, each block
  indexed by ``l = n*(n+1) + m - 1``.
"""

from dataclasses import dataclass
from functools import lru_cache
from math import ceil

import numpy as np

from .errors import DomainError


def block_size(n_max):
    """Number of (n, m) pairs with 1 <= n <= n_max."""
    return n_max * (n_max + 2)


def mode_index(n, m):
    return n * (n + 1) + m - 1


def mode_numbers(n_max):
    """Arrays ``(n, m)`` listing every mode of one block in storage order."""
    n = np.concatenate([np.full(2 * k + 1, k) for k in range(1, n_max + 1)])
    m = np.concatenate([np.arange(-k, k + 1) for k in range(1, n_max + 1)])
    return n, m


# --- Riccati-Bessel functions -----------------------------------------------


@dataclass(frozen=True)
class RiccatiBesselTable:
    """Riccati-Bessel functions and derivatives for orders ``0..n_max``.

    Index ``n`` of every array holds order ``n``; ``log_derivative`` is
    ``psi_n'/psi_n``.
    """

    z: complex
    psi: np.ndarray
    chi: np.ndarray
    xi: np.ndarray
    dpsi: np.ndarray
    dchi: np.ndarray
    dxi: np.ndarray
    log_derivative: np.ndarray

    @property
    def n_max(self):
        return self.psi.size - 1

    def wronskian(self):
        """``psi_n' chi_n - psi_n chi_n'``, identically 1 for ``chi_n = -z y_n``."""
        return self.dpsi * self.chi - self.psi * self.dchi


def log_derivative_psi(n_max, z):
    """``D_n(z) = psi_n'(z)/psi_n(z)`` for n = 0..n_max by downward recurrence."""
    z = complex(z)
    n_start = n_max + max(15, ceil(abs(z)))
    d = np.zeros(n_start + 1, dtype=complex)
    for n in range(n_start, 0, -1):
        d[n - 1] = n / z - 1.0 / (d[n] + n / z)
    return d[: n_max + 1]


def riccati_bessel(n_max, z):
    """Tabulate psi, chi, xi and their derivatives at complex ``z``.

    psi comes from the downward log-derivative recurrence followed by an
    upward ratio product (stable for all n); xi uses upward three-term
    recurrence, where it is the dominant solution, and ``chi = i(xi - psi)``.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    z = complex(z)
    if z == 0:
        raise DomainError("Riccati-Bessel functions need z != 0")
    d = log_derivative_psi(n_max, z)
    sin_z, cos_z = np.sin(z), np.cos(z)
    eiz = np.exp(1j * z)

    psi = np.empty(n_max + 1, dtype=complex)
    psi[0] = sin_z
    for n in range(1, n_max + 1):
        psi[n] = psi[n - 1] / (d[n] + n / z)

    xi = np.empty(n_max + 2, dtype=complex)
    # slot -1 holds order -1
    xi[-1], xi[0] = eiz, -1j * eiz
    for n in range(1, n_max + 1):
        xi[n] = (2 * n - 1) / z * xi[n - 1] - xi[n - 2]

    orders = np.arange(n_max + 1)
    prev_xi = np.concatenate(([xi[-1]], xi[:n_max]))
    prev_psi = np.concatenate(([cos_z], psi[:n_max]))
    xi = xi[: n_max + 1]
    dpsi = prev_psi - orders / z * psi
    dxi = prev_xi - orders / z * xi
    # chi from the two accurate solutions; its own upward recurrence loses
    # digits once Im z is large
    chi = 1j * (xi - psi)
    dchi = 1j * (dxi - dpsi)
    return RiccatiBesselTable(z, psi, chi, xi, dpsi, dchi, dxi, d)


def spherical_bessel(n_max, z, kind):
    """``j_n(z)`` (kind='regular') or ``h_n^(1)(z)`` (kind='outgoing'), n = 0..n_max."""
    rb = riccati_bessel(max(n_max, 1), z)
    if kind == "regular":
        out = rb.psi / rb.z
    elif kind == "outgoing":
        out = rb.xi / rb.z
    else:
        raise ValueError(f"unknown radial kind {kind!r}")
    return out[: n_max + 1]


def _radial(n_max, rho, kind):
    """``z_n(rho)`` and ``[rho z_n(rho)]'/rho`` for n = 1..n_max."""
    rb = riccati_bessel(n_max, rho)
    if kind == "regular":
        f, df = rb.psi, rb.dpsi
    else:
        f, df = rb.xi, rb.dxi
    return f[1:] / rho, df[1:] / rho


# --- angular functions ------------------------------------------------------


def legendre_pi_tau(n_max, cos_theta):
    """Mie angular functions ``pi_n`` and ``tau_n`` (m = 1), n = 0..n_max.

    ``pi_n = P_n^1/sin(theta)`` and ``tau_n = dP_n^1/dtheta`` without the
    Condon-Shortley phase; index 0 is zero.
    """
    mu = float(cos_theta)
    if abs(mu) > 1:
        raise DomainError("|cos_theta| must be <= 1")
    pi = np.zeros(n_max + 1)
    tau = np.zeros(n_max + 1)
    if n_max >= 1:
        pi[1] = 1.0
        tau[1] = mu
    for n in range(2, n_max + 1):
        pi[n] = (2 * n - 1) / (n - 1) * mu * pi[n - 1] - n / (n - 1) * pi[n - 2]
        tau[n] = n * mu * pi[n] - (n + 1) * pi[n - 1]
    return pi, tau


def normalized_angular(n_max, cos_theta):
    """Normalized Legendre functions with their pi/tau companions for all m.

    Returns ``(P, pi, tau)`` with shape ``(n_max+1, 2*n_max+1) + cos_theta.shape``;
    entry ``[n, m + n_max]`` holds ``Pbar_nm`` (so that
    ``Y_nm = Pbar_nm * exp(i m phi)``), ``m*Pbar_nm/sin(theta)`` and
    ``dPbar_nm/dtheta``. The recurrences carry ``Pbar/sin(theta)`` so the
    poles need no special casing.
    """
    x = np.asarray(cos_theta, dtype=float)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    shape = (n_max + 1, 2 * n_max + 1) + x.shape
    P = np.zeros(shape)
    PI = np.zeros(shape)
    TAU = np.zeros(shape)
    c = n_max  # column offset of m = 0

    # m = 0
    p0 = np.zeros((n_max + 1,) + x.shape)
    p0[0] = 1.0 / np.sqrt(4 * np.pi)
    if n_max >= 1:
        p0[1] = np.sqrt(3.0) * x * p0[0]
    for n in range(2, n_max + 1):
        a = np.sqrt((4.0 * n * n - 1) / (n * n))
        b = np.sqrt(((n - 1.0) ** 2) / (4.0 * (n - 1) ** 2 - 1))
        p0[n] = a * (x * p0[n - 1] - b * p0[n - 2])
    P[:, c] = p0

    u_sect = None
    for m in range(1, n_max + 1):
        if m == 1:
            u_sect = -np.sqrt(3.0 / (8 * np.pi)) * np.ones_like(x)
        else:
            u_sect = -np.sqrt((2.0 * m + 1) / (2.0 * m)) * s * u_sect
        u = np.zeros((n_max + 1,) + x.shape)
        u[m] = u_sect
        if m + 1 <= n_max:
            u[m + 1] = np.sqrt(2.0 * m + 3) * x * u_sect
        for n in range(m + 2, n_max + 1):
            a = np.sqrt((4.0 * n * n - 1) / (n * n - m * m))
            b = np.sqrt(((n - 1.0) ** 2 - m * m) / (4.0 * (n - 1) ** 2 - 1))
            u[n] = a * (x * u[n - 1] - b * u[n - 2])
        sign = (-1) ** m
        for n in range(m, n_max + 1):
            pbar = s * u[n]
            pim = m * u[n]
            lower = u[n - 1] if n - 1 >= m else 0.0
            taum = n * x * u[n] - np.sqrt((n * n - m * m) * (2.0 * n + 1) / (2.0 * n - 1)) * lower
            P[n, c + m], PI[n, c + m], TAU[n, c + m] = pbar, pim, taum
            P[n, c - m], PI[n, c - m], TAU[n, c - m] = sign * pbar, -sign * pim, sign * taum
        if m == 1:
            for n in range(1, n_max + 1):
                TAU[n, c] = np.sqrt(n * (n + 1.0)) * s * u[n]
    return P, PI, TAU


def _spherical_frame(points):
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.linalg.norm(pts, axis=1)
    cos_t = np.where(r > 0, pts[:, 2] / np.where(r > 0, r, 1.0), 1.0)
    cos_t = np.clip(cos_t, -1.0, 1.0)
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    sin_t = np.sqrt(1.0 - cos_t**2)
    cp, sp = np.cos(phi), np.sin(phi)
    r_hat = np.stack([sin_t * cp, sin_t * sp, cos_t], axis=-1)
    t_hat = np.stack([cos_t * cp, cos_t * sp, -sin_t], axis=-1)
    p_hat = np.stack([-sp, cp, np.zeros_like(cp)], axis=-1)
    return r, cos_t, phi, r_hat, t_hat, p_hat


def vector_harmonics(n_max, directions):
    """``Y_nm``, ``X_nm`` and ``r_hat x X_nm`` at unit ``directions``.

    Shapes: ``Y`` is ``(L, npts)``; the vector fields are ``(L, npts, 3)`` in
    Cartesian components.
    """
    _, cos_t, phi, r_hat, t_hat, p_hat = _spherical_frame(directions)
    P, PI, TAU = normalized_angular(n_max, cos_t)
    n, m = mode_numbers(n_max)
    col = m + n_max
    phase = np.exp(1j * np.outer(m, phi))
    norm = 1.0 / np.sqrt(n * (n + 1.0))
    Pn, PIn, TAUn = P[n, col], PI[n, col], TAU[n, col]
    Y = Pn * phase
    x_theta = -PIn * phase * norm[:, None]
    x_phi = -1j * TAUn * phase * norm[:, None]
    X = x_theta[..., None] * t_hat + x_phi[..., None] * p_hat
    RX = (-x_phi)[..., None] * t_hat + x_theta[..., None] * p_hat
    return Y, X, RX


def vswf(n_max, k, points, kind="regular"):
    """Evaluate ``M_nm`` and ``N_nm`` at Cartesian ``points`` (nm).

    Returns two complex arrays of shape ``(L, npts, 3)``. Regular waves are
    finite at the origin; outgoing waves need ``points`` away from it.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    r, _, _, r_hat, _, _ = _spherical_frame(pts)
    Y, X, RX = vector_harmonics(n_max, pts)
    n, _ = mode_numbers(n_max)
    npts = pts.shape[0]
    zr = np.empty((n_max, npts), dtype=complex)
    dzr = np.empty((n_max, npts), dtype=complex)
    ratio = np.empty((n_max, npts), dtype=complex)
    for i in range(npts):
        rho = k * r[i]
        if rho == 0:
            if kind != "regular":
                raise DomainError("outgoing waves are singular at the origin")
            zr[:, i] = 0.0
            dzr[:, i] = 0.0
            ratio[:, i] = 0.0
            # only n = 1 survives at the origin: j_1/rho -> 1/3, (rho j_1)'/rho -> 2/3
            ratio[0, i] = 1.0 / 3.0
            dzr[0, i] = 2.0 / 3.0
            continue
        f, df = _radial(n_max, rho, kind)
        zr[:, i] = f
        dzr[:, i] = df
        ratio[:, i] = f / rho
    zn, dzn, rat = zr[n - 1], dzr[n - 1], ratio[n - 1]
    M = zn[..., None] * X
    sq = np.sqrt(n * (n + 1.0))
    N = (1j * sq[:, None] * rat * Y)[..., None] * r_hat + dzn[..., None] * RX
    return M, N


def plane_wave_coefficients(n_max, k_hat, polarization):
    """Regular-wave coefficients of ``polarization * exp(i k k_hat . r)``.

    ``a^M_nm = 4 pi i^n  e . conj(X_nm(k_hat))`` and
    ``a^N_nm = 4 pi i^(n+1) (k_hat x e) . conj(X_nm(k_hat))``; the returned
    vector has the standard M-then-N layout.
    """
    k_hat = np.asarray(k_hat, dtype=float)
    e = np.asarray(polarization, dtype=complex)
    _, X, _ = vector_harmonics(n_max, k_hat[None, :])
    X = X[:, 0, :]
    n, _ = mode_numbers(n_max)
    h = np.cross(k_hat, e)
    aM = 4 * np.pi * (1j**n) * (np.conj(X) @ e)
    aN = 4 * np.pi * (1j ** (n + 1)) * (np.conj(X) @ h)
    return np.concatenate([aM, aN])


def far_field_amplitude(n_max, k, coefficients, directions, origin=(0.0, 0.0, 0.0)):
    """Far-field amplitude ``F`` with ``E_scat ~ F exp(ikr)/r`` of an outgoing expansion.

    ``origin`` is the expansion centre; its phase ``exp(-i k r_hat . origin)``
    refers the amplitude to the coordinate origin.
    """
    dirs = np.atleast_2d(np.asarray(directions, dtype=float))
    dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    _, X, RX = vector_harmonics(n_max, dirs)
    n, _ = mode_numbers(n_max)
    size = block_size(n_max)
    pM = np.asarray(coefficients[:size])
    pN = np.asarray(coefficients[size:])
    wM = pM * (-1j) ** (n + 1)
    wN = pN * (-1j) ** n
    F = np.einsum("l,lpc->pc", wM, X) + np.einsum("l,lpc->pc", wN, RX)
    phase = np.exp(-1j * k * dirs @ np.asarray(origin, dtype=float))
    return F * phase[:, None] / k


# --- rotations --------------------------------------------------------------


def _jy_matrix(j):
    m = np.arange(-j, j + 1)
    jp = np.zeros((2 * j + 1, 2 * j + 1))
    for i, mm in enumerate(m[:-1]):
        jp[i + 1, i] = np.sqrt((j - mm) * (j + mm + 1.0))
    return (jp - jp.T) / 2j


def wigner_d(j, beta):
    """Small Wigner matrix ``d^j_{m'm}(beta)``, rows/cols ordered m = -j..j."""
    size = 2 * j + 1
    if beta == 0.0:
        return np.eye(size)
    m = np.arange(-j, j + 1)
    if beta == np.pi:
        d = np.zeros((size, size))
        d[np.arange(size)[::-1], np.arange(size)] = (-1.0) ** (j + m)
        return d
    w, v = np.linalg.eigh(_jy_matrix(j))
    d = (v * np.exp(-1j * beta * w)) @ v.conj().T
    return d.real


def rotation_matrix(n_max, alpha, beta, gamma=0.0):
    """Block-diagonal matrix ``D^n_{m'm}(alpha, beta, gamma)`` over one coefficient block.

    Under the active rotation ``R = Rz(alpha) Ry(beta) Rz(gamma)`` a wave
    ``W_nm`` maps to ``sum_m' W_nm' D^n_{m'm}``.
    """
    size = block_size(n_max)
    D = np.zeros((size, size), dtype=complex)
    for n in range(1, n_max + 1):
        m = np.arange(-n, n + 1)
        blk = np.exp(-1j * m * alpha)[:, None] * wigner_d(n, beta) * np.exp(-1j * m * gamma)[None, :]
        s = mode_index(n, -n)
        D[s : s + 2 * n + 1, s : s + 2 * n + 1] = blk
    return D


# --- translations -----------------------------------------------------------


def _a_coef(n, m):
    """``cos(theta) Y_nm = a(n,m) Y_{n+1,m} + a(n-1,m) Y_{n-1,m}``."""
    n = np.asarray(n, dtype=float)
    val = (n + 1 + m) * (n + 1 - m) / ((2 * n + 1) * (2 * n + 3))
    return np.where((n >= abs(m)) & (val > 0), np.sqrt(np.clip(val, 0, None)), 0.0)


def _sectoral_coefs(n, m):
    """Coefficients of ``(d_x + i d_y)/k u_nm = c1 u_{n-1,m+1} + c2 u_{n+1,m+1}``."""
    n = np.asarray(n, dtype=float)
    v1 = (n - m - 1) * (n - m) / ((2 * n - 1) * (2 * n + 1))
    v2 = (n + m + 1) * (n + m + 2) / ((2 * n + 1) * (2 * n + 3))
    c1 = np.where(n - 1 >= m + 1, np.sqrt(np.clip(v1, 0, None)), 0.0)
    c2 = np.sqrt(np.clip(v2, 0, None))
    return c1, c2


@lru_cache(maxsize=32)
def _coefficient_tables(n_max):
    """``a(n, m)``, ``c1(n, m)``, ``c2(n, m)`` on a grid with n offset by one.

    Row ``m`` (0..n_max), column ``n + 1`` for n = -1..2*n_max+3.
    """
    n = np.arange(-1, 2 * n_max + 4)
    a = np.array([_a_coef(n, mm) for mm in range(n_max + 1)])
    c1 = np.array([_sectoral_coefs(np.maximum(n, 0), mm)[0] for mm in range(n_max + 1)])
    c2 = np.array([_sectoral_coefs(np.maximum(n, 0), mm)[1] for mm in range(n_max + 1)])
    c1[:, 0] = 0.0
    c2[:, 0] = 0.0
    for arr in (a, c1, c2):
        arr.setflags(write=False)
    return a, c1, c2


def scalar_axial_coefficients(n_max, kt, kind):
    """Scalar translation coefficients along z for signed ``kt``.

    Returns ``S[m, nu, n]`` (m = 0..n_max, nu = 0..n_max+1, n = 0..n_max) with
    ``u_nm(r + t z_hat) = sum_nu S[m, nu, n] u'_num(r)`` where ``u`` has the
    radial ``kind`` of the source wave and ``u'`` is regular (or outgoing for
    ``kind='regular'`` outside the translation sphere). Built by the
    derivative recurrences from the monopole column; the lower triangle
    follows from ``S_{nu n} = (-1)^(nu+n) S_{n nu}``.
    """
    p_max = 2 * n_max + 2
    a_tab, c1_tab, c2_tab = _coefficient_tables(n_max)
    dist = abs(kt)
    sign = 1.0 if kt > 0 else -1.0
    radial = spherical_bessel(p_max, dist, kind)
    nu_all = np.arange(p_max + 1)
    out = np.zeros((n_max + 1, n_max + 2, n_max + 1), dtype=complex)
    nu_g = np.arange(n_max + 2)[:, None]
    n_g = np.arange(n_max + 1)[None, :]
    parity = (-1.0) ** (nu_g + n_g)

    def nu_top(col):
        return 2 * n_max + 1 - col

    col = ((-sign) ** nu_all) * np.sqrt(2 * nu_all + 1.0) * radial
    cur_sect = col
    for m in range(0, n_max + 1):
        if m > 0:
            # sectoral step from S^{m-1}_{., m-1}
            prev = cur_sect
            nus = np.arange(m, nu_top(m) + 1)
            c1 = c1_tab[m - 1, nus + 2]
            c2 = c2_tab[m - 1, nus]
            col = np.zeros(p_max + 1, dtype=complex)
            col[nus] = (c1 * prev[nus + 1] + c2 * prev[nus - 1]) / c2_tab[m - 1, m]
        cur_sect = col
        am = a_tab[m]
        S = np.zeros((p_max + 2, n_max + 2), dtype=complex)
        S[: p_max + 1, m] = col
        for n in range(m, n_max):
            nus = np.arange(n + 1, nu_top(n + 1) + 1)
            lower = S[nus, n - 1] if n - 1 >= m else 0.0
            S[nus, n + 1] = (am[n] * lower - am[nus + 1] * S[nus + 1, n]
                             + am[nus] * S[nus - 1, n]) / am[n + 1]
        upper = S[: n_max + 2, : n_max + 1]
        mirrored = S[: n_max + 1, : n_max + 2].T * parity
        mask = (nu_g < n_g) & (nu_g >= m)
        out[m] = np.where(mask, mirrored, upper)
    return out


def axial_blocks(n_max, kt, kind):
    """Per-m blocks of the axial vector translation coefficients.

    Returns ``{m: (A_m, B_m)}`` for m = -n_max..n_max, each block indexed by
    the orders ``max(1, |m|)..n_max`` (target order first). The block for a
    lower order is the leading square of the block for a higher one.
    """
    S = scalar_axial_coefficients(n_max, kt, kind)
    a_tab, _, _ = _coefficient_tables(n_max)
    out = {}
    for m in range(-n_max, n_max + 1):
        am = abs(m)
        orders = np.arange(max(1, am), n_max + 1)
        Sm = S[am]
        J = orders[:, None].astype(float)
        n = orders[None, :].astype(float)
        s_here = Sm[orders][:, orders]
        s_down = Sm[orders - 1][:, orders]
        s_up = Sm[orders + 1][:, orders]
        a_down = a_tab[am, orders][:, None]
        a_here = a_tab[am, orders + 1][:, None]
        Ablk = (np.sqrt(J * (J + 1)) * s_here
                + kt * (a_down * np.sqrt((J + 1) / J) * s_down + a_here * np.sqrt(J / (J + 1)) * s_up))
        Ablk = Ablk / np.sqrt(n * (n + 1))
        Bblk = 1j * kt * m * s_here / np.sqrt(n * (n + 1) * J * (J + 1))
        out[m] = (Ablk, Bblk)
    return out


def axial_vector_coefficients(n_max, kt, kind):
    """Vector translation coefficients ``A``, ``B`` for a translation ``t`` along z.

    ``A`` and ``B`` are full ``(L, L)`` matrices (target index first) with
    ``M_nm(r + t) = sum (A M'_num(r) + B N'_num(r))`` and the same with M and N
    exchanged; only equal-m entries are non-zero.
    """
    size = block_size(n_max)
    A = np.zeros((size, size), dtype=complex)
    B = np.zeros((size, size), dtype=complex)
    for m, (Ablk, Bblk) in axial_blocks(n_max, kt, kind).items():
        orders = np.arange(max(1, abs(m)), n_max + 1)
        idx = orders * (orders + 1) + m - 1
        A[np.ix_(idx, idx)] = Ablk
        B[np.ix_(idx, idx)] = Bblk
    return A, B


@dataclass(frozen=True)
class TranslationOperator:
    """Re-expansion of vector waves about a displaced origin.

    ``matrix`` acts on coefficient vectors (M block then N block): if a field
    has coefficients ``c`` about the source origin, ``matrix @ c`` are its
    coefficients about ``target = source + d``. ``kind='regular'`` maps
    regular to regular waves (and outgoing to outgoing outside ``|d|``);
    ``kind='outgoing'`` maps outgoing waves to regular ones inside ``|d|``.
    """

    matrix: np.ndarray
    d: np.ndarray
    k: complex
    n_max: int
    kind: str

    def apply(self, coefficients):
        return self.matrix @ coefficients


def _assemble(A, B):
    return np.block([[A, B], [B, A]])


def translation_coefficients(k_host, d, n_max, kind="regular"):
    """Translation operator for displacement ``d`` (nm) from source to target origin.

    Axial displacements are evaluated directly; any other direction is
    rotated onto the z axis, translated, and rotated back.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    d = np.asarray(d, dtype=float)
    dist = float(np.linalg.norm(d))
    size = block_size(n_max)
    if dist == 0.0:
        if kind != "regular":
            raise DomainError("outgoing-to-regular translation needs d != 0")
        return TranslationOperator(np.eye(2 * size, dtype=complex), d, k_host, n_max, kind)
    if d[0] == 0.0 and d[1] == 0.0:
        A, B = axial_vector_coefficients(n_max, k_host * d[2], kind)
        return TranslationOperator(_assemble(A, B), d, k_host, n_max, kind)
    beta = float(np.arccos(np.clip(d[2] / dist, -1.0, 1.0)))
    alpha = float(np.arctan2(d[1], d[0]))
    A, B = axial_vector_coefficients(n_max, k_host * dist, kind)
    D = rotation_matrix(n_max, alpha, beta)
    Dh = D.conj().T
    A = D @ A @ Dh
    B = D @ B @ Dh
    return TranslationOperator(_assemble(A, B), d, k_host, n_max, kind)
