"""Multiple scattering by clusters of (layered) spheres.

Each member scatters the incident wave plus the outgoing waves of all other
members, re-expanded about its own centre with the addition theorem. The
coupled equations ``(I - T H) p = T q`` are solved densely; for collinear
clusters the frame is rotated so the axis is z, where the system splits into
independent blocks of fixed azimuthal index m.
"""

import logging
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .errors import DomainError, GeometryError, InputError, NumericalError
from .mie import CrossSections, LayeredSphere, stratified_coefficients, wiscombe_order
from .swf import (axial_blocks, block_size, mode_numbers, plane_wave_coefficients,
                  rotation_matrix, translation_coefficients)
from .units import host_wavenumber

log = logging.getLogger(__name__)

RESIDUAL_LIMIT = 1e-9
CONVERGENCE_RTOL = 1e-6
DEFAULT_NMAX_CAP = 24


@dataclass(frozen=True)
class Incidence:
    """Plane-wave propagation direction and linear polarization (unit vectors)."""

    direction: tuple = (1.0, 0.0, 0.0)
    polarization: tuple = (0.0, 0.0, 1.0)


@dataclass(frozen=True)
class ClusterMember:
    center: tuple
    sphere: LayeredSphere
    name: str = ""


@dataclass(frozen=True)
class SphereCluster:
    """Positioned spheres in a real host. Member ``host_eps`` values are ignored."""

    members: tuple
    host_eps: float = 1.0
    incidence: Incidence = field(default_factory=Incidence)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))

    @property
    def centers(self):
        return np.array([np.asarray(m.center, dtype=float) for m in self.members])

    def label(self, i):
        return self.members[i].name or f"member {i}"


def validate_geometry(cluster):
    """Check pairwise non-overlap and the incidence vectors; returns True."""
    if not cluster.members:
        raise InputError("cluster has no members")
    if float(cluster.host_eps) < 1:
        raise InputError("host permittivity must be >= 1")
    c = cluster.centers
    for i, j in combinations(range(len(cluster.members)), 2):
        dist = np.linalg.norm(c[i] - c[j])
        reach = cluster.members[i].sphere.radius + cluster.members[j].sphere.radius
        if dist < reach:
            pair = (cluster.label(i), cluster.label(j))
            raise GeometryError(f"spheres {pair[0]} and {pair[1]} overlap "
                                f"(centre distance {dist:g} nm < {reach:g} nm)", pair=pair)
    k_hat = np.asarray(cluster.incidence.direction, dtype=float)
    e_hat = np.asarray(cluster.incidence.polarization, dtype=float)
    if k_hat.shape != (3,) or e_hat.shape != (3,):
        raise InputError("incidence vectors must have three components")
    for name, v in (("direction", k_hat), ("polarization", e_hat)):
        if abs(np.linalg.norm(v) - 1.0) > 1e-9:
            raise InputError(f"incidence {name} must be a unit vector")
    if abs(k_hat @ e_hat) > 1e-12:
        raise InputError("polarization must be orthogonal to the propagation direction")
    return True


@dataclass(frozen=True)
class MultipoleSolution:
    """Outgoing coefficients of every member, referred to its own centre (lab frame)."""

    cluster: SphereCluster
    energy: float
    n_max: int
    k_host: float
    coefficients: np.ndarray
    incident: np.ndarray
    residual: float
    # solve frame (rotated for collinear clusters): centres and coefficients
    frame_centers: np.ndarray = field(repr=False, default=None)
    frame_coefficients: np.ndarray = field(repr=False, default=None)
    coupling: object = field(repr=False, default=None)
    converged: bool = True


def _t_matrix_diagonal(sphere, host_eps, E, n_max):
    coeffs = stratified_coefficients(sphere.layer_radii, sphere.permittivities(E), host_eps, E, n_max)
    n, _ = mode_numbers(n_max)
    return np.concatenate([-coeffs.b[n - 1], -coeffs.a[n - 1]])


def _collinear_frame(centers):
    """Rotation (alpha, beta) mapping z onto the cluster axis, or None if not collinear."""
    if len(centers) == 1:
        return 0.0, 0.0
    rel = centers - centers[0]
    scale = np.max(np.linalg.norm(rel, axis=1))
    axis = rel[np.argmax(np.linalg.norm(rel, axis=1))] / scale
    off = rel - np.outer(rel @ axis, axis)
    if np.max(np.linalg.norm(off, axis=1)) > 1e-12 * scale:
        return None
    if axis[2] < 0:
        axis = -axis
    beta = float(np.arccos(np.clip(axis[2], -1.0, 1.0)))
    alpha = float(np.arctan2(axis[1], axis[0])) if beta != 0.0 else 0.0
    return alpha, beta


def _rot(alpha, beta):
    ca, sa, cb, sb = np.cos(alpha), np.sin(alpha), np.cos(beta), np.sin(beta)
    rz = np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[cb, 0.0, sb], [0.0, 1.0, 0.0], [-sb, 0.0, cb]])
    return rz @ ry


def _balance(t_diag):
    """Diagonal scaling ``sqrt|t|`` that balances the coupled system.

    Sphere responses fall off steeply with multipole order while outgoing
    translations grow, so the unscaled matrix spans many decades. Solving for
    ``p / sqrt|t|`` makes the coupling blocks symmetric in magnitude.
    """
    s = np.sqrt(np.abs(t_diag))
    return np.where(s > 0, s, 1.0)


def _solve_blocks(matrix, rhs, E):
    try:
        x = np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular cluster system at E={E:g} eV",
                             condition=float(np.linalg.cond(matrix)), energy=E) from exc
    if not np.all(np.isfinite(x)):
        raise NumericalError(f"non-finite cluster solution at E={E:g} eV",
                             condition=float(np.linalg.cond(matrix)), energy=E)
    r = matrix @ x - rhs
    return x, float(np.vdot(r, r).real), matrix


def _incident_coefficients(n_max, k, centers_lab, k_hat, e_hat, centers_frame=None, R=None):
    kh, eh = (k_hat, e_hat) if R is None else (R.T @ k_hat, R.T @ e_hat)
    base = plane_wave_coefficients(n_max, kh, eh)
    phases = np.exp(1j * k * centers_lab @ k_hat)
    return phases[:, None] * base[None, :]


def solve_cluster(cluster, E, n_max, method="auto", coupling=None):
    """Solve the coupled multipole equations at photon energy ``E`` (eV).

    ``method`` is ``'auto'`` (axial blocks when the members are collinear) or
    ``'dense'`` (full system with general translations). ``coupling`` may
    carry precomputed axial blocks of at least order ``n_max`` for this
    cluster and energy (see :func:`solve_converged`).
    """
    validate_geometry(cluster)
    if E <= 0:
        raise DomainError("photon energy must be positive")
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    k = float(host_wavenumber(E, cluster.host_eps))
    centers = cluster.centers
    k_hat = np.asarray(cluster.incidence.direction, dtype=float)
    e_hat = np.asarray(cluster.incidence.polarization, dtype=float)
    L2 = 2 * block_size(n_max)
    n_mem = len(cluster.members)
    t_diag = np.array([_t_matrix_diagonal(m.sphere, cluster.host_eps, E, n_max) for m in cluster.members])

    frame = _collinear_frame(centers) if method == "auto" else None
    if method not in ("auto", "dense"):
        raise ValueError(f"unknown method {method!r}")

    if frame is None:
        q = _incident_coefficients(n_max, k, centers, k_hat, e_hat)
        scale = _balance(t_diag)
        big = np.eye(n_mem * L2, dtype=complex)
        for i in range(n_mem):
            for j in range(n_mem):
                if i == j:
                    continue
                H = translation_coefficients(k, centers[i] - centers[j], n_max, "outgoing").matrix
                big[i * L2:(i + 1) * L2, j * L2:(j + 1) * L2] -= (
                    (t_diag[i] / scale[i])[:, None] * H * scale[j][None, :])
        rhs = (t_diag * q / scale).ravel()
        x, r2, matrix = _solve_blocks(big, rhs, E)
        p = x.reshape(n_mem, L2) * scale
        residual = np.sqrt(r2) / np.linalg.norm(rhs) if np.linalg.norm(rhs) > 0 else 0.0
        frame_centers, frame_p = centers, p
    else:
        alpha, beta = frame
        R = _rot(alpha, beta)
        frame_centers = centers @ R  # rows are R^T c
        q_frame = _incident_coefficients(n_max, k, centers, k_hat, e_hat, R=R)
        if coupling is None or coupling.n_top < n_max:
            coupling = AxialCoupling(frame_centers[:, 2], k, n_max)
        frame_p, residual = _solve_axial(coupling, t_diag, q_frame, n_max, E)
        D = rotation_matrix(n_max, alpha, beta)
        size = block_size(n_max)
        p = np.empty_like(frame_p)
        p[:, :size] = frame_p[:, :size] @ D.T
        p[:, size:] = frame_p[:, size:] @ D.T
        q = _incident_coefficients(n_max, k, centers, k_hat, e_hat)

    if residual > RESIDUAL_LIMIT:
        raise NumericalError(f"cluster residual {residual:.2e} exceeds {RESIDUAL_LIMIT:g} at E={E:g} eV",
                             energy=E)
    return MultipoleSolution(cluster, float(E), int(n_max), k, p, q, float(residual),
                             frame_centers, frame_p, coupling if frame is not None else None)


class AxialCoupling:
    """Per-m translation blocks between members on the z axis, up to order ``n_top``.

    Only pairs ``i < j`` are stored; the reverse translation follows from the
    parity ``(-1)**(n + nu)`` (with an extra sign on the B blocks). Lower
    orders are leading sub-blocks, so one table serves every order up to
    ``n_top``.
    """

    def __init__(self, z, k, n_top):
        self.z = np.asarray(z, dtype=float)
        self.k = k
        self.n_top = int(n_top)
        self._tables = {}
        for i, j in combinations(range(self.z.size), 2):
            kt = k * (self.z[i] - self.z[j])
            self._tables[i, j, "outgoing"] = axial_blocks(self.n_top, kt, "outgoing")
            self._tables[i, j, "regular"] = axial_blocks(self.n_top, kt, "regular")

    def block(self, i, j, m, n_max, kind="outgoing"):
        """``[[A, B], [B, A]]`` re-expanding waves about member j at member i."""
        size = n_max - max(1, abs(m)) + 1
        if i < j:
            A, B = self._tables[i, j, kind][m]
            a, b = A[:size, :size], B[:size, :size]
        else:
            A, B = self._tables[j, i, kind][m]
            orders = np.arange(max(1, abs(m)), max(1, abs(m)) + size)
            par = (-1.0) ** (orders[:, None] + orders[None, :])
            a, b = par * A[:size, :size], -par * B[:size, :size]
        out = np.empty((2 * size, 2 * size), dtype=complex)
        out[:size, :size] = out[size:, size:] = a
        out[:size, size:] = out[size:, :size] = b
        return out


def _m_indices(n_max, m):
    orders = np.arange(max(1, abs(m)), n_max + 1)
    idx = orders * (orders + 1) + m - 1
    return np.concatenate([idx, idx + block_size(n_max)])


def _solve_axial(coupling, t_diag, q, n_max, E):
    """Per-m solve for members on the z axis of the solve frame."""
    n_mem = t_diag.shape[0]
    scale = _balance(t_diag)
    p = np.zeros_like(q)
    r2_total = 0.0
    rhs_total = 0.0
    for m in range(-n_max, n_max + 1):
        both = _m_indices(n_max, m)
        nb = both.size
        big = np.eye(n_mem * nb, dtype=complex)
        for i in range(n_mem):
            for j in range(n_mem):
                if i == j:
                    continue
                H = coupling.block(i, j, m, n_max)
                big[i * nb:(i + 1) * nb, j * nb:(j + 1) * nb] -= (
                    (t_diag[i][both] / scale[i][both])[:, None] * H * scale[j][both][None, :])
        rhs = np.concatenate([t_diag[i][both] * q[i][both] / scale[i][both] for i in range(n_mem)])
        x, r2, _ = _solve_blocks(big, rhs, E)
        r2_total += r2
        rhs_total += float(np.vdot(rhs, rhs).real)
        for i in range(n_mem):
            p[i, both] = x[i * nb:(i + 1) * nb] * scale[i][both]
    residual = np.sqrt(r2_total / rhs_total) if rhs_total > 0 else 0.0
    return p, residual


def extinction(solution):
    """Extinction cross section (nm**2) by the optical theorem."""
    k = solution.k_host
    return -float(np.sum(solution.coefficients * np.conj(solution.incident)).real) / k**2


def cluster_cross_sections(solution):
    """Extinction (optical theorem), scattering (total outgoing power) and absorption."""
    k = solution.k_host
    ext = extinction(solution)
    centers = solution.frame_centers
    p = solution.frame_coefficients
    n_max = solution.n_max
    n_mem = len(centers)
    scat = float(np.sum(np.abs(p) ** 2)) / k**2
    coupling = solution.coupling
    if coupling is None and n_mem > 1 and np.allclose(
            centers[:, :2], centers[0, :2], rtol=0, atol=1e-12 * max(1.0, np.abs(centers).max())):
        coupling = AxialCoupling(centers[:, 2], k, n_max)
    for i in range(n_mem):
        for j in range(i + 1, n_mem):
            if coupling is not None:
                for m in range(-n_max, n_max + 1):
                    both = _m_indices(n_max, m)
                    J = coupling.block(i, j, m, n_max, "regular")
                    scat += 2.0 * float(np.vdot(p[i, both], J @ p[j, both]).real) / k**2
            else:
                J = translation_coefficients(k, centers[i] - centers[j], n_max, "regular").matrix
                scat += 2.0 * float(np.vdot(p[i], J @ p[j]).real) / k**2
    return CrossSections(ext, scat, ext - scat)


def member_absorption(solution):
    """Absorption cross section of each member from its exciting field (nm**2)."""
    cluster = solution.cluster
    k = solution.k_host
    p = solution.coefficients
    out = []
    for i, member in enumerate(cluster.members):
        t = _t_matrix_diagonal(member.sphere, cluster.host_eps, solution.energy, solution.n_max)
        with np.errstate(divide="ignore", invalid="ignore"):
            exc = np.where(t != 0, p[i] / t, 0.0)
        out.append(float(np.sum(np.abs(exc) ** 2 * (-t.real - np.abs(t) ** 2))) / k**2)
    return np.array(out)


def seed_order(cluster, E):
    k = host_wavenumber(E, cluster.host_eps)
    x = max(k * m.sphere.radius for m in cluster.members)
    n = wiscombe_order(x)
    return n + (n % 2)


def choose_cluster_order(cluster, energies, rtol=CONVERGENCE_RTOL, cap=DEFAULT_NMAX_CAP, start=None):
    """Smallest even order whose extinction moves by < ``rtol`` when raised by 2.

    The change is measured jointly over all probe ``energies``; if no order up
    to ``cap`` converges, ``cap`` is returned and a warning is logged.
    """
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    n = start if start is not None else max(seed_order(cluster, E) for E in energies)
    n = min(max(n, 2), cap)

    def ext(order):
        return np.array([extinction(solve_cluster(cluster, E, order)) for E in energies])

    prev = ext(n)
    while n + 2 <= cap:
        cur = ext(n + 2)
        if np.all(np.abs(cur - prev) <= rtol * np.abs(cur)):
            return n
        n, prev = n + 2, cur
    log.warning("cluster multipole order not converged to %g below cap %d", rtol, cap)
    return n


def solve_converged(cluster, E, rtol=CONVERGENCE_RTOL, cap=DEFAULT_NMAX_CAP, start=None):
    """Solution at the first even order where raising it by 2 moves σ_ext by < ``rtol``.

    Orders grow from the seed in steps of two; the higher order of the
    converged pair is returned. Collinear clusters share one table of
    translation blocks across all orders. Without convergence below ``cap``
    the ``cap`` solution is returned with ``converged=False``.
    """
    n = start if start is not None else seed_order(cluster, E)
    n = min(max(n, 2), cap)
    coupling = None
    frame = _collinear_frame(cluster.centers)
    if frame is not None and len(cluster.members) > 1:
        z = (cluster.centers @ _rot(*frame))[:, 2]
        coupling = AxialCoupling(z, host_wavenumber(E, cluster.host_eps), cap)
    sol = solve_cluster(cluster, E, n, coupling=coupling)
    prev = extinction(sol)
    while n + 2 <= cap:
        n += 2
        sol = solve_cluster(cluster, E, n, coupling=coupling)
        cur = extinction(sol)
        if abs(cur - prev) <= rtol * abs(cur):
            return sol
        prev = cur
    log.warning("cluster multipole order not converged to %g below cap %d at E=%g eV", rtol, cap, E)
    return replace(sol, converged=False)
