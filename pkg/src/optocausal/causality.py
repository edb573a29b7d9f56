"""Nonanalyticities of the linear response and their causal classification.

The zeros of the cubic numerator of ``c+`` are the poles of ``epsilon/mu``
(and of the slab index). A root with positive imaginary part makes the
response noncausal under the ``exp(-i w t)`` convention. Two routes are
provided: the analytic one (:func:`solve_roots` + :func:`causality_verdict`)
and a numerical time-domain check of the response kernel
(:func:`kernel_check`).
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.signal.windows import tukey

from . import _kernels
from .errors import IllConditioned, NoConvergence, WindowTooNarrow
from .params import SystemParams

ROOT_LABELS = ("near_plus_wm", "near_minus_wm", "near_cavity")
MARGINAL_BAND = 1e-12
LEAKAGE_THRESHOLD = 5e-2


class Verdict(str, Enum):
    CAUSAL = "causal"
    NONCAUSAL = "noncausal"


# ------------------------------------------------------------------ the cubic

def numerator_cubic(params: SystemParams) -> np.ndarray:
    """Coefficients ``(a3, a2, a1, a0)`` of the cubic numerator in ``delta_p``.

    Expansion of ``[kappa - i(delta + x)](x**2 - wm**2 + i gm x) - i wm |g|**2``.
    """
    k, d, gm, wm = params.kappa, params.delta, params.gamma_m, params.omega_m
    g2 = params.g_mag ** 2
    a3 = -1j
    a2 = gm + k - 1j * d
    a1 = 1j * wm * wm + 1j * gm * k + gm * d
    a0 = -k * wm * wm + 1j * d * wm * wm - 1j * wm * g2
    return np.array([a3, a2, a1, a0], dtype=complex)


def numerator_product(params: SystemParams, x):
    """The same cubic evaluated in factored form (no expansion)."""
    x = np.asarray(x, dtype=complex)
    mech = x * x - params.omega_m ** 2 + 1j * params.gamma_m * x
    return (params.kappa - 1j * (params.delta + x)) * mech - 1j * params.omega_m * params.g_mag ** 2


def _horner(coeffs, x):
    val = 0j
    der = 0j
    for c in coeffs:
        der = der * x + val
        val = val * x + c
    return val, der


def polynomial_roots(coeffs: Sequence[complex], polish_steps: int = 2) -> np.ndarray:
    """Roots from companion-matrix eigenvalues, then Newton polishing."""
    c = np.asarray(coeffs, dtype=complex)
    if c[0] == 0:
        raise IllConditioned("leading coefficient vanishes")
    monic = c[1:] / c[0]
    deg = monic.size
    comp = np.zeros((deg, deg), dtype=complex)
    comp[0, :] = -monic
    comp[np.arange(1, deg), np.arange(deg - 1)] = 1.0
    roots = np.linalg.eigvals(comp)
    for i, r in enumerate(roots):
        for _ in range(polish_steps):
            val, der = _horner(c, r)
            if der == 0:
                break
            cand = r - val / der
            if abs(_horner(c, cand)[0]) >= abs(val):
                break
            r = cand
        roots[i] = r
    return roots


@dataclass(frozen=True)
class ComplexRootSet:
    roots: tuple[complex, complex, complex]
    labels: tuple[str, str, str]
    max_imag: float
    residuals: tuple[float, float, float]
    marginal: bool = False

    def by_label(self, label: str) -> complex:
        return self.roots[self.labels.index(label)]


def reference_roots(params: SystemParams) -> np.ndarray:
    """Roots at zero coupling, in :data:`ROOT_LABELS` order."""
    wm, gm = params.omega_m, params.gamma_m
    shift = cmath.sqrt(wm * wm - gm * gm / 4.0)
    return np.array([shift - 0.5j * gm, -shift - 0.5j * gm, -params.delta - 1j * params.kappa])


def _match(found: np.ndarray, reference: np.ndarray) -> np.ndarray:
    best, best_cost = None, math.inf
    for perm in itertools.permutations(range(3)):
        cost = sum(abs(found[p] - reference[i]) for i, p in enumerate(perm))
        if cost < best_cost:
            best, best_cost = perm, cost
    return found[list(best)]


def solve_roots(params: SystemParams, previous: ComplexRootSet | None = None,
                residual_tol: float = 1e-10) -> ComplexRootSet:
    """Three roots of the numerator cubic, labeled for continuity.

    With ``previous`` the roots are matched to its labels by minimal total
    displacement; otherwise they are matched to the zero-coupling roots.
    """
    coeffs = numerator_cubic(params)
    roots = polynomial_roots(coeffs)
    ref = np.array(previous.roots) if previous is not None else reference_roots(params)
    ordered = _match(roots, ref)
    scale = np.max(np.abs(coeffs))
    residuals = tuple(float(abs(_horner(coeffs, r)[0])) for r in ordered)
    if max(residuals) >= residual_tol * scale:
        raise IllConditioned(f"root residual {max(residuals):.3e} above {residual_tol:g}*{scale:.3g}")
    max_imag = float(np.max(ordered.imag))
    return ComplexRootSet(tuple(complex(r) for r in ordered), ROOT_LABELS, max_imag, residuals,
                          abs(max_imag) < MARGINAL_BAND)


def causality_verdict(roots: ComplexRootSet) -> Verdict:
    return Verdict.NONCAUSAL if roots.max_imag > 0.0 else Verdict.CAUSAL


def perturbative_gcrt(params: SystemParams) -> float:
    """Leading-order root crossing, ``2 sqrt(gamma_m / kappa) omega_m``."""
    return 2.0 * math.sqrt(params.gamma_m / params.kappa) * params.omega_m


def perturbative_gcrt_gamma_c(params: SystemParams) -> float:
    """Variant written with the per-mirror rate, ``2 sqrt(gamma_m / gamma_c) omega_m``."""
    return 2.0 * math.sqrt(params.gamma_m / params.gamma_c) * params.omega_m


# ----------------------------------------------------------- slab pole finder

def _c_plus_parts(params: SystemParams, x: complex, deriv: bool = False):
    """``(2 gamma_c num, den)`` of the probe response at complex ``x``.

    With ``deriv`` the two ``x``-derivatives are appended.
    """
    gm, d0, k = params.gamma_m, params.delta, params.kappa
    mech = x * x - params.omega_m ** 2 + 1j * gm * x
    g2 = params.g_mag ** 2
    lin = k - 1j * (d0 + x)
    quad = (k - 1j * x) ** 2 + d0 ** 2
    num = lin * mech - 1j * params.omega_m * g2
    den = quad * mech + 2.0 * params.omega_m * d0 * g2
    two_gc = 2.0 * params.gamma_c
    if not deriv:
        return two_gc * num, den
    dmech = 2.0 * x + 1j * gm
    dnum = -1j * mech + lin * dmech
    dden = -2j * (k - 1j * x) * mech + quad * dmech
    return two_gc * num, den, two_gc * dnum, dden


def _c_plus_complex(params: SystemParams, x: complex) -> complex:
    n, d = _c_plus_parts(params, x)
    return n / d


def eps_over_mu_poles(params: SystemParams, kL: float, seeds: Sequence[complex] | None = None,
                      tol: float = 1e-14, max_iter: int = 100) -> np.ndarray:
    """Poles of ``epsilon/mu`` in the complex ``delta_p`` plane at slab phase ``kL``.

    Each pole is a double zero of ``mu/epsilon``; it is located by
    multiplicity-2 Newton iteration on ``mu/epsilon`` continued to complex
    frequency, starting from ``seeds`` (default: the response roots).
    With ``C = n/d`` the continuation is written as
    ``n^2 (1 - e) / (n^2 e - (n - 2 d)^2)``, ``e = exp(2i kL)``, so the
    response denominator never appears on its own. Near the cavity root
    ``n`` and ``d`` vanish within about 1e-11 of each other, and the plain
    ratio would leave Newton no basin to work in.
    """
    phase = cmath.exp(2j * kL)

    def inv(x):
        n, d = _c_plus_parts(params, x)
        return n * n * (1.0 - phase) / (n * n * phase - (n - 2.0 * d) ** 2)

    def inv_and_slope(x):
        n, d, dn, dd = _c_plus_parts(params, x, deriv=True)
        top, bot = n * n * (1.0 - phase), n * n * phase - (n - 2.0 * d) ** 2
        dtop = 2.0 * n * dn * (1.0 - phase)
        dbot = 2.0 * n * dn * phase - 2.0 * (n - 2.0 * d) * (dn - 2.0 * dd)
        return top / bot, (dtop * bot - top * dbot) / (bot * bot)

    if seeds is None:
        seeds = solve_roots(params).roots
    out = []
    for x in seeds:
        x = complex(x)
        for _ in range(max_iter):
            f, df = inv_and_slope(x)
            if f == 0 or df == 0:
                break
            step = 2.0 * f / df
            for _ in range(60):
                if abs(inv(x - step)) < abs(f):
                    break
                step *= 0.5
            x -= step
            if abs(step) < tol * max(1.0, abs(x)):
                break
        else:
            raise NoConvergence(f"pole search from {x} did not converge")
        out.append(x)
    return np.array(out)


# ------------------------------------------------------------ kernel check

@dataclass(frozen=True)
class FrequencyWindow:
    """Uniform real-frequency window with a Tukey taper."""

    center: float
    half_width: float
    samples: int = 2 ** 14
    taper: float = 0.1

    def __post_init__(self):
        if self.samples % 2 or self.samples < 16:
            raise ValueError("samples must be even and >= 16")
        if self.half_width <= 0:
            raise ValueError("half_width must be > 0")

    @property
    def step(self) -> float:
        return 2.0 * self.half_width / self.samples

    @property
    def grid(self) -> np.ndarray:
        return self.center - self.half_width + self.step * np.arange(self.samples)

    @property
    def guard(self) -> float:
        """Delay below which the taper itself smears the kernel."""
        return 2.0 * math.pi / (self.taper * self.half_width)


def default_window(params: SystemParams) -> FrequencyWindow:
    return FrequencyWindow(0.0, 8.0 * max(abs(params.delta), params.omega_m))


@dataclass(frozen=True)
class KernelCheck:
    tau_grid: np.ndarray
    kernel: np.ndarray
    precausal_leakage: float
    verdict: Verdict
    threshold: float = LEAKAGE_THRESHOLD
    windows: tuple = field(default=())


def response_kernel(values: np.ndarray, window: FrequencyWindow) -> tuple[np.ndarray, np.ndarray]:
    """``G(tau) = int dw R(w) exp(-i w tau)`` on the window, by tapered FFT."""
    n = window.samples
    x0 = window.center - window.half_width
    h = window.step
    spectrum = np.fft.fftshift(np.fft.fft(values * tukey(n, window.taper)))
    tau = 2.0 * math.pi * np.arange(-n // 2, n // 2) / (n * h)
    return tau, h * np.exp(-1j * x0 * tau) * spectrum


def precausal_leakage(tau: np.ndarray, kernel: np.ndarray, guard: float) -> float:
    """``max |G(tau < -guard)|`` relative to ``max |G(|tau| > guard)|``."""
    mag = np.abs(kernel)
    outside = np.abs(tau) > guard
    if not np.any(outside):
        return 0.0
    ref = mag[outside].max()
    if ref == 0.0:
        return 0.0
    neg = tau < -guard
    return float(mag[neg].max() / ref) if np.any(neg) else 0.0


def kernel_check_response(fn: Callable[[np.ndarray], np.ndarray], window: FrequencyWindow,
                          threshold: float = LEAKAGE_THRESHOLD,
                          poles: Sequence[complex] = ()) -> KernelCheck:
    """Time-domain causality check of an arbitrary response sampled on ``window``.

    ``poles`` (optional) are only used to reject windows whose edge cuts
    through a resonance.
    """
    _check_edges(window, poles)
    tau, kern = response_kernel(np.asarray(fn(window.grid), dtype=complex), window)
    leak = precausal_leakage(tau, kern, window.guard)
    verdict = Verdict.NONCAUSAL if leak > threshold else Verdict.CAUSAL
    return KernelCheck(tau, kern, leak, verdict, threshold,
                       ((window.center, window.half_width, leak),))


def _check_edges(window: FrequencyWindow, poles: Sequence[complex]):
    lo = window.center - window.half_width
    hi = window.center + window.half_width
    for p in poles:
        lw = abs(p.imag)
        if lo - 3 * lw <= p.real <= hi + 3 * lw and min(abs(p.real - lo), abs(p.real - hi)) < 3 * lw:
            raise WindowTooNarrow(f"pole {p} lies within 3 linewidths of the window edge")


def _numerator_grid(params: SystemParams, x: np.ndarray) -> np.ndarray:
    num, _ = _kernels.response_parts(x, params.kappa, params.delta, params.gamma_m,
                                     params.omega_m, params.g_mag ** 2)
    return num


def kernel_check(params: SystemParams, window: FrequencyWindow | None = None,
                 threshold: float = LEAKAGE_THRESHOLD, *, zoom: float = 50.0,
                 samples: int = 2 ** 14, taper: float = 0.1,
                 linewidth_floor: float = 1e-9) -> KernelCheck:
    """Numerical causality check of the reciprocal numerator response.

    The sampled response is ``1 / N(delta_p)`` with ``N`` the cubic
    numerator of ``c+``: it has exactly the nonanalyticities of
    ``epsilon/mu``. ``c+`` itself is analytic in the upper half plane for any
    stable cavity and cannot serve here.

    The mechanical roots sit ~1e-7 from the real axis, far below any
    resolution reachable by a single window spanning all roots. Without an
    explicit ``window`` every root therefore gets its own window of half
    width ``zoom`` linewidths; narrower roots falling inside a wider root's
    window are divided out of the sampled response. The reported leakage is
    the largest over all windows.
    """
    roots = solve_roots(params)
    poles = list(roots.roots)
    if window is not None:
        return kernel_check_response(lambda x: 1.0 / _numerator_grid(params, x), window,
                                     threshold, poles)
    results = []
    for j, root in enumerate(poles):
        lw = max(abs(root.imag), linewidth_floor)
        half = zoom * lw
        inner = [p for i, p in enumerate(poles) if i != j
                 and max(abs(p.imag), linewidth_floor) < lw
                 and abs(p.real - root.real) < half + 3 * max(abs(p.imag), linewidth_floor)]
        win = FrequencyWindow(root.real, half, samples, taper)

        def fn(x, inner=inner):
            val = 1.0 / _numerator_grid(params, x)
            for p in inner:
                val = val * (x - p)
            return val

        results.append(kernel_check_response(fn, win, threshold))
    worst = max(results, key=lambda r: r.precausal_leakage)
    windows = tuple(w for r in results for w in r.windows)
    return KernelCheck(worst.tau_grid, worst.kernel, worst.precausal_leakage, worst.verdict,
                       threshold, windows)
