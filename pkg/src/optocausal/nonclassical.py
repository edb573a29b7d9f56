"""Single-mode nonclassicality through a balanced beam splitter.

A zero-mean Gaussian mode is mixed with vacuum on a 50:50 splitter; the
logarithmic negativity of the resulting two-mode state, maximized over the
splitter phase, is the nonclassicality measure. For Gaussian inputs it is
positive exactly when ``|<a^2>| > <a^dag a>``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NegativeDiscriminant, NonPositiveEta, UnphysicalMoments
from .steady import SingleModeMoments

EN_FLOOR = _kernels.EN_FLOOR
_PHYS_TOL = 1e-10


@dataclass(frozen=True)
class NonclassicalityResult:
    eta_minus: float
    eta_plus: float
    e_n: float
    phi_opt: float
    dgcz: bool


def phase_rotate(m: SingleModeMoments, phi: float) -> SingleModeMoments:
    return SingleModeMoments(m.a_sq * cmath.exp(2j * phi), m.n_occ, m.tag)


def _check_physical(m: SingleModeMoments):
    if m.n_occ < -_PHYS_TOL or abs(m.a_sq) ** 2 > m.n_occ * (m.n_occ + 1.0) + _PHYS_TOL:
        raise UnphysicalMoments(
            f"|<a^2>|^2 = {abs(m.a_sq) ** 2:.6g} exceeds n(n+1) = {m.n_occ * (m.n_occ + 1):.6g}")


def beamsplit_covariance(m: SingleModeMoments, phi: float) -> np.ndarray:
    """Two-mode covariance over ``(x1, p1, x2, p2)`` after mixing with vacuum.

    Both local blocks equal ``I/2`` plus half the input excess noise; the
    cross block is that excess noise itself.
    """
    _check_physical(m)
    s = m.a_sq * cmath.exp(2j * phi)
    a = 0.5 + 0.5 * (m.n_occ + s.real)
    b = 0.5 + 0.5 * (m.n_occ - s.real)
    c = 0.5 * s.imag
    local = np.array([[a, c], [c, b]])
    cross = local - 0.5 * np.eye(2)
    return np.block([[local, cross], [cross, local]])


def symplectic_eigs(v: np.ndarray, tol: float = 1e-12) -> tuple[float, float]:
    """Partial-transpose symplectic eigenvalues ``(eta_minus, eta_plus)``.

    ``eta_minus`` uses ``2 det V / (sigma + sqrt(disc))``, algebraically the
    same as the difference form but free of cancellation.
    """
    vm, vc, vmc = v[:2, :2], v[2:, 2:], v[:2, 2:]
    sigma = np.linalg.det(vm) + np.linalg.det(vc) - 2.0 * np.linalg.det(vmc)
    det_v = np.linalg.det(v)
    disc = sigma * sigma - 4.0 * det_v
    if disc < 0.0:
        if disc < -tol * max(1.0, sigma * sigma):
            raise NegativeDiscriminant(f"sigma^2 - 4 det V = {disc:.3e}")
        disc = 0.0
    root = math.sqrt(disc)
    if sigma + root <= 0.0 or det_v < 0.0:
        raise NegativeDiscriminant(f"sigma = {sigma:.3e}, det V = {det_v:.3e}")
    eta_p = math.sqrt(0.5 * (sigma + root))
    eta_m = math.sqrt(2.0 * det_v / (sigma + root))
    return eta_m, eta_p


def log_negativity(eta_minus: float) -> float:
    if not eta_minus > 0.0:
        raise NonPositiveEta(f"eta_minus must be > 0, got {eta_minus}")
    return max(0.0, -math.log(2.0 * eta_minus))


def measure_nonclassicality(m: SingleModeMoments, n_grid: int = 64,
                            tol: float = 1e-10) -> NonclassicalityResult:
    """Log-negativity maximized over the splitter phase ``phi in [0, pi)``.

    Evaluated from the moments directly: for the split state
    ``4 eta_minus**2 = 1 + 2 (n - |s|)``, and ``n - |s|`` is formed as
    ``(n**2 - |s|**2) / (n + |s|)``. Going through the 4x4 covariance would
    bury squeezing of order 1e-9 under the vacuum contribution.
    """
    _check_physical(m)
    en, phi, eta_m, eta_p = _kernels.max_en_over_phase(
        np.array([m.a_sq.real]), np.array([m.a_sq.imag]), np.array([max(m.n_occ, 0.0)]),
        n_grid, tol)
    return NonclassicalityResult(float(eta_m[0]), float(eta_p[0]), float(en[0]), float(phi[0]),
                                 bool(abs(m.a_sq) > m.n_occ))


def measure_batch(a_sq, n_occ, n_grid: int = 64, tol: float = 1e-10):
    """Vectorized :func:`measure_nonclassicality`; returns ``(e_n, phi_opt, dgcz)`` arrays.

    Inputs are not validated for physicality.
    """
    a_sq = np.asarray(a_sq, dtype=complex)
    n_occ = np.asarray(n_occ, dtype=float)
    en, phi, _, _ = _kernels.max_en_over_phase(a_sq.real, a_sq.imag, n_occ, n_grid, tol)
    return en, phi, np.abs(a_sq) > n_occ


def squeezed_vacuum(r: float, phase: float = 0.0) -> SingleModeMoments:
    """Moments of a squeezed vacuum with squeezing parameter ``r``."""
    return SingleModeMoments(-0.5 * math.sinh(2.0 * r) * cmath.exp(1j * phase),
                             math.sinh(r) ** 2, "squeezed")
