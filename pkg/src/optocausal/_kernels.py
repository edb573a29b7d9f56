"""Hot numeric kernels with a numba path and a pure-numpy path.

Two kernels dominate runtime in sweeps and acceptance runs:

* ``response_parts``: numerator/denominator of the probe response on a
  (large) real frequency grid;
* ``max_en_over_phase``: log-negativity of the beam-split single-mode state,
  maximized over the splitter phase, for a batch of moment pairs.

Set ``OPTOCAUSAL_DISABLE_JIT=1`` to force the numpy path. Both paths are
importable as :data:`numpy_impl` and :data:`numba_impl` (the latter is
``None`` when numba is unavailable or disabled).
"""
from __future__ import annotations

import math
import os
from types import SimpleNamespace

import numpy as np

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
EN_FLOOR = 1e-12


def _jit_disabled() -> bool:
    return os.environ.get("OPTOCAUSAL_DISABLE_JIT", "").strip().lower() in {"1", "true", "yes", "on"}


def golden_iterations(width: float, tol: float) -> int:
    if width <= tol:
        return 0
    return int(math.ceil(math.log(tol / width) / math.log(GOLDEN)))


# ---------------------------------------------------------------- numpy path

def _response_parts_np(x, kappa, delta, gamma_m, omega_m, g2):
    x = np.asarray(x, dtype=np.float64)
    mech = x * x - omega_m * omega_m + 1j * gamma_m * x
    num = (kappa - 1j * (delta + x)) * mech - 1j * omega_m * g2
    cav = (kappa - 1j * x) ** 2 + delta * delta
    den = cav * mech + 2.0 * omega_m * delta * g2
    return num, den


def _split_np(s_re, s_im, n):
    # excess noise E = [[n + Re s, Im s], [Im s, n - Re s]] of the split mode;
    # t = n - |s| = det E / (n + |s|) avoids cancelling against the vacuum 1/2
    mod = np.hypot(s_re, s_im)
    det_e = (n + s_re) * (n - s_re) - s_im * s_im
    den = n + mod
    t = np.where(den > 0.0, det_e / np.where(den > 0.0, den, 1.0), 0.0)
    eta_m = np.sqrt(0.25 + 0.5 * t)
    eta_p = np.sqrt(0.25 + 0.5 * (n + mod))
    en = np.maximum(0.0, -0.5 * np.log1p(2.0 * t))
    return en, eta_m, eta_p


def _en_at_np(a_re, a_im, n, phi):
    c2, s2 = np.cos(2.0 * phi), np.sin(2.0 * phi)
    return _split_np(a_re * c2 - a_im * s2, a_re * s2 + a_im * c2, n)


def _max_en_over_phase_np(a_re, a_im, n, n_grid, tol):
    a_re = np.asarray(a_re, dtype=np.float64)[:, None]
    a_im = np.asarray(a_im, dtype=np.float64)[:, None]
    n = np.asarray(n, dtype=np.float64)[:, None]
    step = math.pi / n_grid
    grid = step * np.arange(n_grid)[None, :]
    en, _, _ = _en_at_np(a_re, a_im, n, grid)
    k = np.argmax(en, axis=1)
    lo = grid[0, k][:, None] - step
    hi = grid[0, k][:, None] + step
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1 = _en_at_np(a_re, a_im, n, x1)[0]
    f2 = _en_at_np(a_re, a_im, n, x2)[0]
    for _ in range(golden_iterations(2.0 * step, tol)):
        left = f1 >= f2
        new_hi = np.where(left, x2, hi)
        new_lo = np.where(left, lo, x1)
        new_x1 = np.where(left, new_hi - GOLDEN * (new_hi - new_lo), x2)
        new_x2 = np.where(left, x1, new_lo + GOLDEN * (new_hi - new_lo))
        new_f1 = np.where(left, _en_at_np(a_re, a_im, n, new_x1)[0], f2)
        new_f2 = np.where(left, f1, _en_at_np(a_re, a_im, n, new_x2)[0])
        lo, hi, x1, x2, f1, f2 = new_lo, new_hi, new_x1, new_x2, new_f1, new_f2
    phi = 0.5 * (lo + hi)
    en_ref = _en_at_np(a_re, a_im, n, phi)[0]
    en_grid = en[np.arange(en.shape[0]), k][:, None]
    phi = np.where(en_grid > en_ref, grid[0, k][:, None], phi)
    en_best, eta_m, eta_p = _en_at_np(a_re, a_im, n, phi)
    en_best = np.where(en_best < EN_FLOOR, 0.0, en_best)
    phi = np.mod(phi, math.pi)
    return en_best[:, 0], phi[:, 0], eta_m[:, 0], eta_p[:, 0]


numpy_impl = SimpleNamespace(
    name="numpy",
    response_parts=_response_parts_np,
    max_en_over_phase=_max_en_over_phase_np,
)


# ---------------------------------------------------------------- numba path

def _build_numba():
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is optional
        return None

    @njit(cache=True)
    def response_parts(x, kappa, delta, gamma_m, omega_m, g2):
        num = np.empty(x.shape[0], dtype=np.complex128)
        den = np.empty(x.shape[0], dtype=np.complex128)
        for i in range(x.shape[0]):
            xi = x[i]
            mech = complex(xi * xi - omega_m * omega_m, gamma_m * xi)
            num[i] = complex(kappa, -(delta + xi)) * mech - 1j * omega_m * g2
            cav = complex(kappa, -xi) ** 2 + delta * delta
            den[i] = cav * mech + 2.0 * omega_m * delta * g2
        return num, den

    @njit(cache=True)
    def split(s_re, s_im, n):
        mod = math.hypot(s_re, s_im)
        det_e = (n + s_re) * (n - s_re) - s_im * s_im
        den = n + mod
        t = det_e / den if den > 0.0 else 0.0
        v = -0.5 * math.log1p(2.0 * t)
        if v < 0.0:
            v = 0.0
        return v, math.sqrt(0.25 + 0.5 * t), math.sqrt(0.25 + 0.5 * (n + mod))

    @njit(cache=True)
    def en_at(a_re, a_im, n, phi):
        c2 = math.cos(2.0 * phi)
        s2 = math.sin(2.0 * phi)
        return split(a_re * c2 - a_im * s2, a_re * s2 + a_im * c2, n)[0]

    @njit(cache=True)
    def max_en_over_phase(a_re, a_im, n, n_grid, tol):
        m = a_re.shape[0]
        en_out = np.empty(m)
        phi_out = np.empty(m)
        eta_m_out = np.empty(m)
        eta_p_out = np.empty(m)
        step = math.pi / n_grid
        width = 2.0 * step
        iters = 0
        if width > tol:
            iters = int(math.ceil(math.log(tol / width) / math.log(GOLDEN)))
        for j in range(m):
            best_k = 0
            best = -1.0
            for k in range(n_grid):
                v = en_at(a_re[j], a_im[j], n[j], step * k)
                if v > best:
                    best = v
                    best_k = k
            lo = step * best_k - step
            hi = step * best_k + step
            x1 = hi - GOLDEN * (hi - lo)
            x2 = lo + GOLDEN * (hi - lo)
            f1 = en_at(a_re[j], a_im[j], n[j], x1)
            f2 = en_at(a_re[j], a_im[j], n[j], x2)
            for _ in range(iters):
                if f1 >= f2:
                    hi = x2
                    x2 = x1
                    f2 = f1
                    x1 = hi - GOLDEN * (hi - lo)
                    f1 = en_at(a_re[j], a_im[j], n[j], x1)
                else:
                    lo = x1
                    x1 = x2
                    f1 = f2
                    x2 = lo + GOLDEN * (hi - lo)
                    f2 = en_at(a_re[j], a_im[j], n[j], x2)
            phi = 0.5 * (lo + hi)
            if best > en_at(a_re[j], a_im[j], n[j], phi):
                phi = step * best_k
            c2 = math.cos(2.0 * phi)
            s2 = math.sin(2.0 * phi)
            v, eta_m, eta_p = split(a_re[j] * c2 - a_im[j] * s2, a_re[j] * s2 + a_im[j] * c2, n[j])
            if v < EN_FLOOR:
                v = 0.0
            en_out[j] = v
            phi_out[j] = phi % math.pi
            eta_m_out[j] = eta_m
            eta_p_out[j] = eta_p
        return en_out, phi_out, eta_m_out, eta_p_out

    def max_en_wrapper(a_re, a_im, n, n_grid, tol):
        return max_en_over_phase(np.ascontiguousarray(a_re, dtype=np.float64),
                                 np.ascontiguousarray(a_im, dtype=np.float64),
                                 np.ascontiguousarray(n, dtype=np.float64),
                                 int(n_grid), float(tol))

    def response_wrapper(x, kappa, delta, gamma_m, omega_m, g2):
        x = np.ascontiguousarray(np.atleast_1d(x), dtype=np.float64).ravel()
        return response_parts(x, float(kappa), float(delta), float(gamma_m),
                              float(omega_m), float(g2))

    return SimpleNamespace(name="numba", response_parts=response_wrapper,
                           max_en_over_phase=max_en_wrapper)


numba_impl = None if _jit_disabled() else _build_numba()
active = numba_impl if numba_impl is not None else numpy_impl
BACKEND = active.name


def response_parts(x, kappa, delta, gamma_m, omega_m, g2):
    x = np.asarray(x, dtype=np.float64)
    num, den = active.response_parts(x.ravel(), kappa, delta, gamma_m, omega_m, g2)
    return num.reshape(x.shape), den.reshape(x.shape)


def max_en_over_phase(a_re, a_im, n, n_grid=64, tol=1e-10):
    return active.max_en_over_phase(np.atleast_1d(a_re), np.atleast_1d(a_im),
                                    np.atleast_1d(n), n_grid, tol)
