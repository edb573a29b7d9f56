"""Classical linear response of the cavity to a weak probe.

The probe response is exposed only through the normalized coefficient
``C+ = (2 gamma_c / g_c) c+``: the coupling to the external modes and the
density of states cancel from every observable once the cavity damping
``gamma_c = pi D g_c**2`` is substituted.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (DegenerateSlabPhase, DenominatorZero, NoConvergence,
                     PerfectMirror, ValidationError)
from .params import Sidedness, SystemParams

# |denominator| below this (relative to its scale) is treated as an exact pole
_POLE_RTOL = 1e-300

RESPONSE_COLUMNS = (
    "delta_p", "re_c_plus", "im_c_plus", "re_refl", "im_refl", "re_trans", "im_trans",
    "re_eps_over_mu", "im_eps_over_mu", "re_n", "im_n", "re_z", "im_z",
)


@dataclass(frozen=True)
class ProbeResponse:
    delta_p: float
    c_plus_norm: complex
    refl: complex
    trans: complex


@dataclass(frozen=True)
class SlabParameters:
    kL: float
    eps_over_mu: complex
    n: complex
    z: complex
    branch_index: int
    ambiguous: bool = False
    residual: float = 0.0


def response_parts(params: SystemParams, delta_p):
    """Numerator and denominator of ``c+ / g_c`` on a grid of probe detunings."""
    return _kernels.response_parts(delta_p, params.kappa, params.delta, params.gamma_m,
                                   params.omega_m, params.g_mag ** 2)


def response_coefficient(params: SystemParams, delta_p):
    """Normalized probe response ``C+(delta_p)``.

    Accepts a scalar (returns ``complex``) or an array. Raises
    :class:`DenominatorZero` if a requested detuning sits exactly on a pole.
    """
    scalar = np.ndim(delta_p) == 0
    num, den = response_parts(params, np.atleast_1d(np.asarray(delta_p, dtype=float)))
    if np.any(np.abs(den) <= _POLE_RTOL):
        bad = np.atleast_1d(delta_p)[np.abs(den) <= _POLE_RTOL]
        raise DenominatorZero(f"probe detuning {bad[0]!r} sits on a pole of the response")
    out = 2.0 * params.gamma_c * num / den
    return complex(out[0]) if scalar else out


def reflect_transmit(params: SystemParams, delta_p: float) -> ProbeResponse:
    c = response_coefficient(params, float(delta_p))
    trans = c if params.sidedness is Sidedness.TWO_SIDED else 0j
    return ProbeResponse(float(delta_p), c, -1.0 + c, trans)


def eps_over_mu_from_amplitudes(refl, trans_tilde):
    """Permittivity/permeability ratio from the reflected amplitude and the
    phase-shifted transmitted amplitude ``trans * exp(i k L)``."""
    refl = np.asarray(refl)
    trans_tilde = np.asarray(trans_tilde)
    return (-(refl - 1.0) ** 2 + trans_tilde ** 2) / ((refl + 1.0) ** 2 - trans_tilde ** 2)


def eps_over_mu(params: SystemParams, delta_p, kL: float, *, printed_variant: bool = False):
    """``epsilon/mu`` of the model slab replacing the cavity.

    With the default transmitted-wave convention this is
    ``[-(C-2)**2 + C**2 e] / [C**2 (1 - e)]`` with ``e = exp(2ikL)``.
    ``printed_variant=True`` builds the phase-shifted transmission from the
    reflected wave instead (kept for comparison only).
    """
    phase = cmath.exp(2j * kL)
    if abs(phase - 1.0) < 1e-14:
        raise DegenerateSlabPhase(f"exp(2ikL) = 1 for kL = {kL}")
    c = response_coefficient(params, delta_p)
    c_arr = np.atleast_1d(c)
    if np.any(np.abs(c_arr) == 0.0):
        raise PerfectMirror("C+ = 0: the cavity reflects perfectly and eps/mu is singular")
    if printed_variant:
        refl = -1.0 + c_arr
        out = eps_over_mu_from_amplitudes(refl, refl * cmath.exp(1j * kL))
    else:
        out = (-(c_arr - 2.0) ** 2 + c_arr ** 2 * phase) / (c_arr ** 2 * (1.0 - phase))
    return complex(out[0]) if np.ndim(delta_p) == 0 else out


# ------------------------------------------------------------- slab inversion

def slab_forward(n: complex, z: complex, kL: float) -> tuple[complex, complex]:
    """Reflection and transmission of a homogeneous slab in vacuum.

    ``kL`` is the vacuum phase thickness; the transmission carries the full
    propagation phase, so a vacuum slab gives ``(0, exp(i kL))``.
    """
    nk = n * kL
    cos_, sin_ = cmath.cos(nk), cmath.sin(nk)
    t = 1.0 / (cos_ - 0.5j * (z + 1.0 / z) * sin_)
    r = 0.5j * (1.0 / z - z) * sin_ * t
    return r, t


def _forward_residual(n, z, kL, refl, trans):
    r, t = slab_forward(n, z, kL)
    return max(abs(r - refl), abs(t - trans))


def _newton_polish(n, z, kL, refl, trans, iters=8):
    target = np.array([refl, trans])
    for _ in range(iters):
        r, t = slab_forward(n, z, kL)
        f = np.array([r, t]) - target
        if np.max(np.abs(f)) < 1e-15:
            break
        jac = np.empty((2, 2), dtype=complex)
        for col, (dn, dz) in enumerate(((1e-7, 0.0), (0.0, 1e-7))):
            hn = dn * max(1.0, abs(n))
            hz = dz * max(1.0, abs(z))
            rp, tp = slab_forward(n + hn, z + hz, kL)
            rm, tm = slab_forward(n - hn, z - hz, kL)
            h = hn + hz
            jac[:, col] = (np.array([rp, tp]) - np.array([rm, tm])) / (2.0 * h)
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            break
        n, z = n + step[0], z + step[1]
    return n, z


def slab_retrieval(refl: complex, trans: complex, kL: float, branch_hint: int = 0,
                   *, previous_n: complex | None = None, tol: float = 1e-9) -> SlabParameters:
    """Invert ``(refl, trans)`` of a homogeneous slab for ``(n, z)``.

    Passive roots are preferred (``Re z >= 0`` and ``Im n >= 0``). The real
    part of ``n`` is fixed up to ``2 pi m / kL``; ``m`` is ``branch_hint``
    unless ``previous_n`` is given, in which case the branch closest to it is
    taken. When both impedance signs give acceptable slabs the one with the
    smaller ``|Im n|`` wins and ``ambiguous`` is set.
    """
    if kL <= 0.0:
        raise ValidationError(f"kL must be > 0, got {kL}")
    refl = complex(refl)
    trans = complex(trans)
    if abs(trans) < 1e-14:
        raise NoConvergence("transmission vanishes: opaque slab cannot be inverted")
    num = (1.0 + refl) ** 2 - trans ** 2
    den = (1.0 - refl) ** 2 - trans ** 2
    if den == 0:
        raise NoConvergence("impedance denominator vanishes")
    z0 = cmath.sqrt(num / den)

    cos_nkl = (1.0 - refl ** 2 + trans ** 2) / (2.0 * trans)
    base = cmath.acos(cos_nkl)
    candidates = []
    for z in (z0, -z0):
        for nkl in (base, -base):
            if previous_n is not None:
                m = round((previous_n * kL - nkl).real / (2.0 * math.pi))
            else:
                m = branch_hint
            seed = (nkl + 2.0 * math.pi * m) / kL
            try:
                n, z_fit = _newton_polish(seed, z, kL, refl, trans)
                res = _forward_residual(n, z_fit, kL, refl, trans)
            except (OverflowError, ZeroDivisionError):
                continue
            # a seed that is not already a solution may wander onto an aliased branch
            if not math.isfinite(res) or abs(n - seed) > 1e-6 * max(1.0, abs(seed)):
                continue
            passive = z_fit.real >= -1e-12 and n.imag >= -1e-12
            if any(abs(n - c[3]) < 1e-9 and abs(z_fit - c[4]) < 1e-9 for c in candidates):
                continue
            candidates.append((not passive, res, abs(n.imag), n, z_fit, m))

    good = [c for c in candidates if c[1] < tol]
    if not good:
        best = min(candidates, key=lambda c: c[1]) if candidates else None
        raise NoConvergence(
            f"slab inversion residual {best[1] if best else float('nan'):.3e} exceeds {tol:g}")
    passive = [c for c in good if not c[0]]
    pool = passive or good
    chosen = min(pool, key=lambda c: c[2])
    ambiguous = any(abs(c[2] - chosen[2]) <= tol and abs(c[3] - chosen[3]) > 1e-6 for c in pool
                    if c is not chosen)
    _, res, _, n, z, m = chosen
    return SlabParameters(kL=kL, eps_over_mu=complex(n / z / (n * z)), n=complex(n),
                          z=complex(z), branch_index=int(m), ambiguous=ambiguous,
                          residual=float(res))


def response_table(params: SystemParams, delta_p, kL: float) -> list[tuple]:
    """Rows for the response CSV, in :data:`RESPONSE_COLUMNS` order.

    The slab columns are NaN where the inversion is undefined (single-sided
    cavity, opaque points); the index branch is tracked along the grid.
    """
    rows = []
    prev_n = None
    nan = float("nan")
    for dp in np.asarray(delta_p, dtype=float):
        pr = reflect_transmit(params, dp)
        try:
            em = eps_over_mu(params, dp, kL)
        except (PerfectMirror, DegenerateSlabPhase):
            em = complex(nan, nan)
        n = z = complex(nan, nan)
        if params.sidedness is Sidedness.TWO_SIDED:
            try:
                slab = slab_retrieval(pr.refl, pr.trans, kL, previous_n=prev_n)
                n, z = slab.n, slab.z
                prev_n = n
            except NoConvergence:
                pass
        rows.append((dp, pr.c_plus_norm.real, pr.c_plus_norm.imag, pr.refl.real, pr.refl.imag,
                     pr.trans.real, pr.trans.imag, em.real, em.imag, n.real, n.imag,
                     z.real, z.imag))
    return rows
