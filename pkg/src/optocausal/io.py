"""Config files and CSV/JSON writers."""
from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .errors import ValidationError
from .params import SystemParams, make_params

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

PARAM_KEYS = ("gamma_m", "gamma_c", "sidedness", "delta", "g_mag", "theta", "kappa_c_override")
RUN_KEYS = ("grid_min", "grid_max", "grid_points", "out_dir")
CONFIG_KEYS = PARAM_KEYS + RUN_KEYS

FIG2A_COLUMNS = ("g", "re_root1", "im_root1", "re_root2", "im_root2", "re_root3", "im_root3",
                 "max_imag", "verdict")
FIG2B_COLUMNS = ("g", "theta_opt", "e_n", "dgcz", "stable")


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    grid_min: float = 0.0
    grid_max: float = 0.01
    grid_points: int = 101
    out_dir: str = "results"


def load_config_mapping(path: str | Path) -> dict[str, Any]:
    """Read a flat TOML or JSON table. Missing or malformed files raise
    :class:`ValidationError`."""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"config file not found: {path}")
    text = path.read_bytes()
    try:
        if path.suffix.lower() == ".json":
            raw = json.loads(text)
        else:
            raw = tomllib.loads(text.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise ValidationError(f"cannot parse {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ValidationError(f"{path}: top level must be a table")
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        raise ValidationError(f"{path}: unknown keys {unknown}")
    return raw


def build_run_config(raw: Mapping[str, Any]) -> RunConfig:
    params = make_params(**{k: raw[k] for k in PARAM_KEYS if raw.get(k) is not None})
    try:
        points = int(raw.get("grid_points", 101))
        gmin = float(raw.get("grid_min", 0.0))
        gmax = float(raw.get("grid_max", 0.01))
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc)) from None
    if points < 1:
        raise ValidationError("grid_points must be >= 1")
    if not (math.isfinite(gmin) and math.isfinite(gmax)) or gmin < 0 or gmax < gmin \
            or (points > 1 and gmax == gmin):
        raise ValidationError(f"bad grid [{gmin}, {gmax}]")
    return RunConfig(params, gmin, gmax, points, str(raw.get("out_dir", "results")))


def fmt(x) -> str:
    """17 significant digits; booleans and enums as lowercase words."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    if hasattr(x, "value"):
        return str(x.value)
    if x is None:
        return ""
    return "%.17g" % x


def write_csv(path: str | Path, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(f"row has {len(row)} fields, expected {len(columns)}")
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "value") and not isinstance(obj, (int, float)):
        return obj.value
    if hasattr(obj, "item"):
        return _jsonable(obj.item())
    return obj


def write_json(path: str | Path, payload: Mapping[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(dict(payload)), indent=2, sort_keys=True) + "\n")
    return path


def fig2a_rows(records):
    for r in records:
        roots = r.roots
        yield (r.g, roots[0].real, roots[0].imag, roots[1].real, roots[1].imag,
               roots[2].real, roots[2].imag, r.max_imag, r.verdict)


def fig2b_rows(records):
    for r in records:
        yield (r.g, r.theta_opt, r.e_n, r.dgcz, r.stable)
