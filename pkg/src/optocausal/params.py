"""Physical parameters of the linearized optomechanical cavity.

Every rate and detuning is a dimensionless ratio to the mechanical frequency,
so ``omega_m`` is pinned to 1 and is not a field.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping

from .errors import NegativeCoupling, NonPositiveRate, ValidationError

OMEGA_M = 1.0


class Sidedness(str, Enum):
    TWO_SIDED = "two_sided"
    SINGLE_SIDED = "single_sided"

    @classmethod
    def parse(cls, value: "Sidedness | str") -> "Sidedness":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        aliases = {"twosided": "two_sided", "two": "two_sided", "2": "two_sided",
                   "singlesided": "single_sided", "single": "single_sided", "1": "single_sided"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValidationError(f"unknown sidedness {value!r}") from None


@dataclass(frozen=True)
class SystemParams:
    """Validated parameter point. Build with :func:`make_params`.

    ``kappa_c_override`` replaces the cavity rate used by the quantum drift and
    diffusion blocks; ``n_th`` is the mechanical bath occupation (0 means the
    zero-temperature bath).
    """

    gamma_m: float
    gamma_c: float
    sidedness: Sidedness
    delta: float
    g_mag: float
    theta: float
    kappa_c_override: float | None = None
    n_th: float = 0.0

    @property
    def omega_m(self) -> float:
        return OMEGA_M

    @property
    def kappa(self) -> float:
        if self.sidedness is Sidedness.TWO_SIDED:
            return 2.0 * self.gamma_c
        return self.gamma_c

    @property
    def kappa_c(self) -> float:
        """Cavity rate shared by the quantum drift damping and optical diffusion."""
        if self.kappa_c_override is not None:
            return self.kappa_c_override
        return self.kappa

    @property
    def g(self) -> complex:
        return self.g_mag * complex(math.cos(self.theta), math.sin(self.theta))

    @property
    def g_r(self) -> float:
        return self.g_mag * math.cos(self.theta)

    @property
    def g_i(self) -> float:
        return self.g_mag * math.sin(self.theta)

    def with_coupling(self, g_mag: float, theta: float | None = None) -> "SystemParams":
        return make_params(**{**self.to_dict(), "g_mag": g_mag,
                              "theta": self.theta if theta is None else theta})

    def replace(self, **changes: Any) -> "SystemParams":
        return make_params(**{**self.to_dict(), **changes})

    def to_dict(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        out["sidedness"] = self.sidedness.value
        return out

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "SystemParams":
        fields = {f.name for f in dataclasses.fields(cls)}
        return make_params(**{k: v for k, v in raw.items() if k in fields})


def make_params(
    gamma_m: float = 1e-6,
    gamma_c: float = 0.1,
    sidedness: Sidedness | str = Sidedness.TWO_SIDED,
    delta: float = 1.0,
    g_mag: float = 0.0,
    theta: float = 0.0,
    kappa_c_override: float | None = None,
    n_th: float = 0.0,
) -> SystemParams:
    """Validate raw values and return a :class:`SystemParams`.

    ``theta`` is wrapped into ``[0, 2*pi)``. Raises :class:`NonPositiveRate`
    for non-positive damping rates and :class:`NegativeCoupling` for
    ``g_mag < 0``.
    """
    values = {"gamma_m": gamma_m, "gamma_c": gamma_c, "delta": delta,
              "g_mag": g_mag, "theta": theta, "n_th": n_th}
    for name, v in values.items():
        try:
            values[name] = float(v)
        except (TypeError, ValueError):
            raise ValidationError(f"{name} must be a real number, got {v!r}") from None
        if not math.isfinite(values[name]):
            raise ValidationError(f"{name} must be finite, got {v!r}")
    if values["gamma_m"] <= 0.0:
        raise NonPositiveRate(f"gamma_m must be > 0, got {gamma_m}")
    if values["gamma_c"] <= 0.0:
        raise NonPositiveRate(f"gamma_c must be > 0, got {gamma_c}")
    if values["g_mag"] < 0.0:
        raise NegativeCoupling(f"g_mag must be >= 0, got {g_mag}")
    if values["n_th"] < 0.0:
        raise ValidationError(f"n_th must be >= 0, got {n_th}")
    if kappa_c_override is not None:
        kappa_c_override = float(kappa_c_override)
        if not math.isfinite(kappa_c_override) or kappa_c_override <= 0.0:
            raise NonPositiveRate(f"kappa_c_override must be > 0, got {kappa_c_override}")
    th = values["theta"] % (2.0 * math.pi)
    return SystemParams(
        gamma_m=values["gamma_m"],
        gamma_c=values["gamma_c"],
        sidedness=Sidedness.parse(sidedness),
        delta=values["delta"],
        g_mag=values["g_mag"],
        theta=th,
        kappa_c_override=kappa_c_override,
        n_th=values["n_th"],
    )


def fig2_params(**overrides: Any) -> SystemParams:
    """Reference point: gamma_m = 1e-6, gamma_c = 0.1, two-sided, delta = +1."""
    base = dict(gamma_m=1e-6, gamma_c=0.1, sidedness="two_sided", delta=1.0, g_mag=0.0, theta=0.0)
    base.update(overrides)
    return make_params(**base)


@dataclass(frozen=True)
class StabilityThresholds:
    """Couplings at which the linearized dynamics loses stability.

    ``g_pt_plus`` belongs to red-detuned driving (delta > 0) and
    ``g_pt_minus`` to delta < 0; ``applicable`` names the one that matches the
    sign of the detuning, the other is informational.
    """

    g_pt_plus: float
    g_pt_minus: float
    applicable: str


def _threshold_formulas(delta: float, gamma_m: float, kappa: float,
                        omega_m: float = OMEGA_M) -> tuple[float, float]:
    return math.sqrt(abs(delta) * omega_m / 2.0), math.sqrt(gamma_m * kappa)


def pt_thresholds(params: SystemParams) -> StabilityThresholds:
    plus, minus = _threshold_formulas(params.delta, params.gamma_m, params.kappa)
    return StabilityThresholds(plus, minus, "plus" if params.delta > 0 else "minus")
