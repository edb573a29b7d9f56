"""Command line entry point.

Exit codes: 0 success, 2 bad input (including a missing config file),
3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .causality import (FrequencyWindow, causality_verdict, kernel_check, perturbative_gcrt,
                        solve_roots)
from .errors import NumericalError, ValidationError
from .io import (FIG2A_COLUMNS, FIG2B_COLUMNS, build_run_config, fig2a_rows, fig2b_rows,
                 load_config_mapping, write_csv, write_json)
from .nonclassical import measure_nonclassicality
from .response import RESPONSE_COLUMNS, response_table
from .steady import steady_state
from .sweep import critical_report, fig2_report, quantum_point, sweep_g

log = logging.getLogger("optocausal")

_OVERRIDES = (
    ("gamma_m", float), ("gamma_c", float), ("sidedness", str), ("delta", float),
    ("g_mag", float), ("theta", float), ("kappa_c_override", float),
    ("grid_min", float), ("grid_max", float), ("grid_points", int), ("out_dir", str),
)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="TOML or JSON config file")
    p.add_argument("--gamma-m", dest="gamma_m", type=float)
    p.add_argument("--gamma-c", dest="gamma_c", type=float)
    p.add_argument("--sidedness", choices=["two_sided", "single_sided"])
    p.add_argument("--delta", type=float)
    p.add_argument("--g", dest="g_mag", type=float, help="coupling magnitude")
    p.add_argument("--theta", type=float, help="coupling phase (rad)")
    p.add_argument("--kappa-c", dest="kappa_c_override", type=float,
                   help="cavity rate in the quantum drift/diffusion")
    p.add_argument("--grid-min", dest="grid_min", type=float)
    p.add_argument("--grid-max", dest="grid_max", type=float)
    p.add_argument("--grid-points", dest="grid_points", type=int)
    p.add_argument("--out", dest="out_dir", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optocausal",
        description="Causality of the probe response and output nonclassicality "
                    "of a linearized optomechanical cavity.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("roots", help="labeled response roots over the coupling grid")
    _common(p)

    p = sub.add_parser("response", help="probe response and slab parameters vs detuning")
    _common(p)
    p.add_argument("--kl", type=float, default=1.0, help="slab phase thickness kL")
    p.add_argument("--dp-min", type=float, default=-2.0)
    p.add_argument("--dp-max", type=float, default=2.0)
    p.add_argument("--dp-points", type=int, default=2001)

    p = sub.add_parser("kernel", help="time-domain causality check of the response")
    _common(p)
    p.add_argument("--threshold", type=float, default=5e-2)
    p.add_argument("--samples", type=int, default=2 ** 14)
    p.add_argument("--window", type=float, nargs=2, metavar=("CENTER", "HALF_WIDTH"),
                   help="single explicit window instead of per-root zoom windows")

    p = sub.add_parser("steady", help="drift, diffusion, steady covariance and moments")
    _common(p)
    p.add_argument("--method", choices=["lyapunov", "integral"], default="lyapunov")

    p = sub.add_parser("en", help="log-negativity of the output field at one coupling")
    _common(p)
    p.add_argument("--fixed-theta", action="store_true", help="do not maximize over theta")

    for name, text in (("sweep", "classical and quantum columns over the coupling grid"),
                       ("critical", "bisect both critical couplings"),
                       ("fig2", "sweep, bisections and report in one go")):
        p = sub.add_parser(name, help=text)
        _common(p)
        if name != "critical":
            p.add_argument("--workers", type=int, default=1)
        if name != "sweep":
            p.add_argument("--tol", type=float, default=1e-6)
    return parser


def _config(args):
    raw = load_config_mapping(args.config) if args.config is not None else {}
    for key, _ in _OVERRIDES:
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = val
    return build_run_config(raw)


def _grid(cfg):
    return np.linspace(cfg.grid_min, cfg.grid_max, cfg.grid_points)


def _run(args) -> int:
    cfg = _config(args)
    out = Path(cfg.out_dir)
    p = cfg.params
    cmd = args.command

    if cmd == "roots":
        rows, prev = [], None
        for g in _grid(cfg):
            rs = solve_roots(p.with_coupling(float(g)), previous=prev)
            prev = rs
            r = rs.roots
            rows.append((g, r[0].real, r[0].imag, r[1].real, r[1].imag, r[2].real, r[2].imag,
                         rs.max_imag, causality_verdict(rs)))
        write_csv(out / "roots.csv", FIG2A_COLUMNS, rows)
        print(f"roots.csv: {len(rows)} rows, perturbative g_crt = {perturbative_gcrt(p):.6g}")

    elif cmd == "response":
        if args.dp_points < 1:
            raise ValidationError("--dp-points must be >= 1")
        rows = response_table(p, np.linspace(args.dp_min, args.dp_max, args.dp_points), args.kl)
        write_csv(out / "response.csv", RESPONSE_COLUMNS, rows)
        print(f"response.csv: {len(rows)} rows")

    elif cmd == "kernel":
        window = None
        if args.window is not None:
            window = FrequencyWindow(args.window[0], args.window[1], args.samples)
        kc = kernel_check(p, window, args.threshold, samples=args.samples)
        write_csv(out / "kernel.csv", ("tau", "re_g", "im_g"),
                  zip(kc.tau_grid, kc.kernel.real, kc.kernel.imag))
        verdict = causality_verdict(solve_roots(p))
        write_json(out / "kernel.json", {
            "precausal_leakage": kc.precausal_leakage, "verdict": kc.verdict,
            "threshold": kc.threshold, "root_verdict": verdict,
            "windows": [{"center": c, "half_width": w, "leakage": lk} for c, w, lk in kc.windows],
            "params": p.to_dict()})
        print(f"leakage {kc.precausal_leakage:.4g}: {kc.verdict.value} "
              f"(roots say {verdict.value})")

    elif cmd == "steady":
        st = steady_state(p, method=args.method)
        out.mkdir(parents=True, exist_ok=True)
        (out / "steady.json").write_text(st.to_json() + "\n")
        print(f"stable={st.stable} max Re eig={st.max_real_eig:.6g}")

    elif cmd == "en":
        q = quantum_point(p, p.g_mag, maximize_theta=not args.fixed_theta)
        payload = {"g": p.g_mag, "stable": q.stable, "theta_opt": q.theta_opt,
                   "e_n": q.e_n, "dgcz": q.dgcz, "max_real_eig": q.max_real_eig,
                   "params": p.to_dict()}
        if q.moments is not None:
            r = measure_nonclassicality(q.moments)
            payload.update(a_sq=q.moments.a_sq, n_occ=q.moments.n_occ,
                           eta_minus=r.eta_minus, eta_plus=r.eta_plus, phi_opt=r.phi_opt)
        write_json(out / "en.json", payload)
        print(f"e_n={q.e_n:.6g} stable={q.stable}")

    elif cmd == "sweep":
        recs = sweep_g(p, _grid(cfg), True, workers=args.workers)
        write_csv(out / "sweep_roots.csv", FIG2A_COLUMNS, fig2a_rows(recs))
        write_csv(out / "sweep_en.csv", FIG2B_COLUMNS, fig2b_rows(recs))
        print(f"sweep: {len(recs)} points")

    elif cmd == "critical":
        rep = critical_report(p, (cfg.grid_min, cfg.grid_max), args.tol)
        write_json(out / "report.json", rep.to_dict())
        print(f"g_crt_cls={rep.g_crt_cls} g_crt_ncls={rep.g_crt_ncls} ratio={rep.ratio}")

    elif cmd == "fig2":
        res = fig2_report(p, _grid(cfg), bracket=(cfg.grid_min, cfg.grid_max),
                          workers=args.workers, tol=args.tol)
        write_csv(out / "fig2a.csv", FIG2A_COLUMNS, fig2a_rows(res.records))
        write_csv(out / "fig2b.csv", FIG2B_COLUMNS, fig2b_rows(res.records))
        write_json(out / "report.json", res.report.to_dict())
        rep = res.report
        print(f"g_crt_cls={rep.g_crt_cls} g_crt_ncls={rep.g_crt_ncls} ratio={rep.ratio}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
