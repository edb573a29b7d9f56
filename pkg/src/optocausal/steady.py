"""Gaussian steady state of the linearized quantum Langevin system.

Basis ordering is ``(dq_m, dp_m, dX_c, dY_c)`` with the optical quadratures
``X = (c + c^dag)/sqrt(2)``, ``Y = (c - c^dag)/(i sqrt(2))``. The covariance
holds symmetrized second moments, so the vacuum is ``I/2``.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_continuous_lyapunov

from .errors import (DefectiveMatrixWarning, Unstable, UnphysicalCovariance)
from .params import SystemParams

SCHEMA_VERSION = 1
SQRT2 = math.sqrt(2.0)

def build_drift(params: SystemParams) -> np.ndarray:
    """Drift matrix of the fluctuation quadratures.

    The optomechanical rows follow from the linearized interaction
    ``-(g* c + g c^dag) q``: ``dp_m`` is pushed by ``sqrt(2)(g_R X + g_I Y)``
    and ``dX_c``, ``dY_c`` pick up ``-sqrt(2) g_I q`` and ``+sqrt(2) g_R q``.
    Both optical quadratures are damped at ``kappa_c``.
    """
    wm, gm, kc, d = params.omega_m, params.gamma_m, params.kappa_c, params.delta
    gr, gi = SQRT2 * params.g_r, SQRT2 * params.g_i
    return np.array([[0.0, wm, 0.0, 0.0],
                     [-wm, -gm, gr, gi],
                     [-gi, 0.0, -kc, d],
                     [gr, 0.0, -d, -kc]])


def build_diffusion(params: SystemParams) -> np.ndarray:
    """Symmetrized noise power ``diag(0, gamma_m (2 n_th + 1), kappa_c, kappa_c)``."""
    return np.diag([0.0, params.gamma_m * (2.0 * params.n_th + 1.0), params.kappa_c, params.kappa_c])


def stability_check(a: np.ndarray) -> tuple[bool, float]:
    """``(stable, max Re eig)``; stable means every eigenvalue decays."""
    top = float(np.max(np.linalg.eigvals(a).real))
    return top < 0.0, top


def lyapunov_steady(a: np.ndarray, d: np.ndarray, rtol: float = 1e-12,
                    dense_max: int = 8) -> np.ndarray:
    """Solve ``a v + v a^T + d = 0`` for the steady covariance.

    Small systems are solved as the vectorized ``(I x a + a x I) vec v = -vec d``
    by LU. Schur-based solvers lose ``eps / gamma_m`` to the tiny mechanical
    damping (1e-10 absolute at ``gamma_m = 1e-6``); the dense solve keeps the
    vacuum exact. Larger systems go to :func:`scipy.linalg.solve_continuous_lyapunov`.
    """
    stable, top = stability_check(a)
    if not stable:
        raise Unstable(f"drift has an eigenvalue with real part {top:.3e} >= 0")
    n = a.shape[0]

    def solve(rhs):
        if n <= dense_max:
            eye = np.eye(n)
            return np.linalg.solve(np.kron(a, eye) + np.kron(eye, a), -rhs.reshape(-1)).reshape(n, n)
        return solve_continuous_lyapunov(a, -rhs)

    v = solve(d)
    v = 0.5 * (v + v.T)
    res = np.linalg.norm(a @ v + v @ a.T + d)
    if res > rtol * max(np.linalg.norm(d), np.finfo(float).tiny):
        # one step of iterative refinement on the residual usually suffices
        v = v + solve(a @ v + v @ a.T + d)
        v = 0.5 * (v + v.T)
    return v


def integral_moments(a: np.ndarray, d: np.ndarray, cond_max: float = 1e8) -> np.ndarray:
    """Closed-form ``int_0^inf exp(a s) d exp(a^T s) ds`` via eigendecomposition.

    With ``a = P L P^-1`` the integrand is ``P e^{Ls} B e^{Ls} P^T`` where
    ``B = P^-1 d P^-T``, and each entry integrates to
    ``-B_mn / (l_m + l_n)``. Eigenvalue real parts carry an absolute error
    of order ``eps * |a|``, so entries tied to a damping rate ``gamma`` are
    good to about ``eps / gamma``. Falls back to :func:`lyapunov_steady` with a
    :class:`DefectiveMatrixWarning` when ``P`` is badly conditioned.
    """
    stable, top = stability_check(a)
    if not stable:
        raise Unstable(f"drift has an eigenvalue with real part {top:.3e} >= 0")
    lam, p = np.linalg.eig(a)
    cond = np.linalg.cond(p)
    if not np.isfinite(cond) or cond > cond_max:
        warnings.warn(f"eigenvector matrix condition {cond:.3e} > {cond_max:g}; "
                      "using the Lyapunov solver", DefectiveMatrixWarning, stacklevel=2)
        return lyapunov_steady(a, d)
    pinv = np.linalg.inv(p)
    b = pinv @ d @ pinv.T
    w = -b / (lam[:, None] + lam[None, :])
    v = (p @ w @ p.T).real
    return 0.5 * (v + v.T)


def is_physical(v: np.ndarray, tol: float = 1e-10) -> bool:
    """Robertson-Schroedinger bound ``v + (i/2) Omega >= 0``."""
    n = v.shape[0] // 2
    omega = np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    return bool(np.min(np.linalg.eigvalsh(v + 0.5j * omega)) >= -tol)


@dataclass(frozen=True)
class SingleModeMoments:
    """Zero-mean Gaussian single mode: ``<a^2>`` and ``<a^dag a>``."""

    a_sq: complex
    n_occ: float
    tag: str = "cavity"

    @property
    def dgcz_margin(self) -> float:
        return abs(self.a_sq) - self.n_occ


def cavity_moments(v: np.ndarray, clamp_tol: float = 1e-10) -> SingleModeMoments:
    """Optical-mode moments from the 4x4 covariance."""
    v33, v44, v34 = v[2, 2], v[3, 3], v[2, 3]
    n_occ = 0.5 * (v33 + v44 - 1.0)
    if n_occ < 0.0:
        if n_occ < -clamp_tol:
            raise UnphysicalCovariance(f"<a^dag a> = {n_occ:.3e} < 0")
        n_occ = 0.0
    return SingleModeMoments(complex(0.5 * (v33 - v44), v34), float(n_occ), "cavity")


def output_moments(cavity: SingleModeMoments) -> SingleModeMoments:
    """Output-field moments, up to a common positive scale set to 1.

    The input-output relations multiply both moments by the same factor
    and the input-cavity cross terms vanish at equal times, so the sign of
    ``|a^2| - n`` (and the onset) is unaffected.
    """
    return SingleModeMoments(cavity.a_sq, cavity.n_occ, "output")


@dataclass(frozen=True)
class SteadyState:
    params: SystemParams
    drift: np.ndarray
    diffusion: np.ndarray
    stable: bool
    max_real_eig: float
    covariance: np.ndarray | None
    moments: SingleModeMoments | None

    def to_json(self) -> str:
        def arr(x):
            return None if x is None else np.asarray(x).tolist()
        m = self.moments
        return json.dumps({
            "schema": "optocausal.steady",
            "version": SCHEMA_VERSION,
            "params": self.params.to_dict(),
            "drift": arr(self.drift),
            "diffusion": arr(self.diffusion),
            "stable": self.stable,
            "max_real_eig": self.max_real_eig,
            "covariance": arr(self.covariance),
            "moments": None if m is None else {
                "re_a_sq": m.a_sq.real, "im_a_sq": m.a_sq.imag, "n_occ": m.n_occ, "tag": m.tag},
        }, indent=2)


def steady_state(params: SystemParams, *, method: str = "lyapunov") -> SteadyState:
    """Drift, diffusion, covariance and output moments at one parameter point.

    Unstable points return ``covariance = moments = None``.
    """
    a = build_drift(params)
    d = build_diffusion(params)
    stable, top = stability_check(a)
    if not stable:
        return SteadyState(params, a, d, False, top, None, None)
    if method == "lyapunov":
        v = lyapunov_steady(a, d)
    elif method == "integral":
        v = integral_moments(a, d)
    else:
        raise ValueError(f"unknown method {method!r}")
    return SteadyState(params, a, d, True, top, v, output_moments(cavity_moments(v)))
