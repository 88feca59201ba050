"""Command-line interface.

Exit codes: 0 success, 2 usage or parameter error, 3 numerical failure.
CCF_TOL in the environment overrides the oracle tolerances used by
``sweep`` and ``bounds``: either "REL" or "REL,ABS".
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import bounds as bd
from .chebyshev import cc_points, cheb_fit
from .errors import CCFError, RegimeError
from .functions import get_function
from .golden import write_golden
from .moments import MomentParams, Regime, compute_moments, moments_bvp, moments_forward
from .oracle import OracleConfig, reference_integral
from .problem import IntegralSpec
from .quadrature import ccf_callable, hccf

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


def _num(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return repr(float(x))


def oracle_config_from_env(env=os.environ) -> OracleConfig:
    raw = env.get("CCF_TOL")
    if not raw:
        return OracleConfig(abs_tol=1e-18, rel_tol=1e-15)
    parts = [float(p) for p in raw.split(",")]
    rel = parts[0]
    abs_ = parts[1] if len(parts) > 1 else rel * 1e-3
    return OracleConfig(abs_tol=abs_, rel_tol=rel)


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(" ", "").split(",") if t]


def _add_spec_args(p, omega_required=True):
    p.add_argument("--f", default="exp", help="registry function id (e.g. exp, abs_power:3)")
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--omega", type=float, required=omega_required)
    p.add_argument("--kernel", choices=("plain", "log"), default="plain")


def _spec(a, omega=None) -> IntegralSpec:
    return IntegralSpec(a.b, a.alpha, a.m, a.omega if omega is None else omega, a.kernel)


def cmd_integrate(a, out) -> int:
    spec = _spec(a)
    f = get_function(a.f, spec.b)
    if a.s and (a.deriv0 or a.derivb):
        if not (a.deriv0 and a.derivb):
            raise ValueError("--deriv0 and --derivb must be given together")
        x = cc_points(a.N, spec.b)
        res = hccf(spec, f(x), _floats(a.deriv0), _floats(a.derivb), a.N, a.s)
    else:
        res = ccf_callable(spec, f, a.N, a.s)
    out.write(",".join([_num(res.value), str(res.N_used), str(res.s_used),
                        res.moment_regime.value, _num(res.diagnostics["residual"])]) + "\n")
    return EXIT_OK


def _trailing_slope(xs, errs, log_x=True):
    k = len(xs)
    if k < 2:
        return None
    n = max(2, math.ceil(k / 2))
    xs, errs = xs[-n:], errs[-n:]
    if any(e == 0 for e in errs):
        return None
    if log_x:
        return bd.loglog_slope(xs, errs)
    return float(np.polyfit(np.asarray(xs, float), np.log10(np.abs(errs)), 1)[0])


def cmd_sweep(a, out) -> int:
    grid = _floats(a.grid)
    if len(grid) < 3 or any(g2 <= g1 for g1, g2 in zip(grid, grid[1:])):
        raise ValueError("sweep grid must be strictly increasing with at least 3 values")
    cfg = oracle_config_from_env()
    out.write("parameter,ccf_value,oracle_value,abs_error,fitted_slope_so_far\n")
    xs, errs = [], []
    ref = None
    for g in grid:
        if a.variable == "omega":
            spec, N, s = _spec(a, g), a.N, a.s
        elif a.variable == "N":
            spec, N, s = _spec(a), int(g), a.s
        else:
            spec, N, s = _spec(a), a.N, int(g)
        f = get_function(a.f, spec.b)
        val = ccf_callable(spec, f, N, s).value
        if a.variable != "omega" and ref is not None:
            oval = ref
        else:
            oval = reference_integral(spec, f, cfg).value
            ref = oval
        err = abs(val - oval)
        xs.append(g)
        errs.append(err)
        slope = _trailing_slope(xs, errs, log_x=a.variable != "s")
        out.write(",".join([_num(g), _num(val), _num(oval), _num(err), _num(slope)]) + "\n")
    return EXIT_OK


def cmd_moments(a, out) -> int:
    p = MomentParams(a.r, a.m, a.alpha)
    if a.force_bvp:
        t = moments_bvp(p, a.J, log=a.log)
    elif a.force_forward:
        t = moments_forward(p, a.J, log=a.log)
    else:
        t = compute_moments(p, a.J, log=a.log)
    out.write("j,M_j" + (",Mlog_j" if a.log else "") + "\n")
    for j in range(a.J + 1):
        row = [str(j), _num(t.M[j])]
        if a.log:
            row.append(_num(t.Mlog[j]))
        out.write(",".join(row) + "\n")
    res = t.residual if t.log_residual is None else max(t.residual, t.log_residual)
    out.write(f"# regime={t.regime.value},residual={_num(res)},K={t.K if t.K else ''}\n")
    return EXIT_OK


def cmd_golden(a, out) -> int:
    n = write_golden(a.out, a.only)
    sys.stderr.write(f"wrote {n} cases to {a.out}\n")
    return EXIT_OK


def cmd_bounds(a, out) -> int:
    spec = _spec(a)
    f = get_function(a.f, spec.b)
    x = cc_points(a.N, spec.b)
    p = cheb_fit(f(x) * np.ones_like(x), spec.b)
    sup = float(bd.measured_sup_errors(f, p, (0,))[0])
    bound = bd.explicit_ccf_bound(spec, sup)
    value = ccf_callable(spec, f, a.N).value
    rep_w = bd.rate_predictor(spec, "HCCF" if a.s else "FixedN_vs_omega", s=a.s) \
        if spec.supports_rates else bd.ErrorReport()
    rep_n = bd.rate_predictor(spec, "FixedOmega_vs_N", k=a.k)
    record = {
        "value": value, "sup_interp_error": sup, "explicit_bound": bound,
        "rate_omega": rep_w.rate_omega, "omega_log_factor": rep_w.omega_log_factor,
        "rate_N": rep_n.rate_N, "N_log_factor": rep_n.N_log_factor,
    }
    if a.format == "json":
        out.write(json.dumps(record) + "\n")
    else:
        out.write(",".join(record) + "\n")
        out.write(",".join(_num(v) if isinstance(v, float) else str(v).lower() if
                           isinstance(v, bool) else ("" if v is None else str(v))
                           for v in record.values()) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ccfbessel", description=(
        "Clenshaw-Curtis-Filon quadrature for int_0^b x^alpha [ln x] f(x) J_m(omega x) dx"))
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("integrate", help="one CCF/HCCF value")
    _add_spec_args(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--s", type=int, default=0, help="endpoint derivative order (HCCF)")
    p.add_argument("--deriv0", help="comma list f(0), f'(0), ... (default: registry derivatives)")
    p.add_argument("--derivb", help="comma list f(b), f'(b), ...")
    p.set_defaults(run=cmd_integrate)

    p = sub.add_parser("sweep", help="error against the oracle over a parameter grid")
    _add_spec_args(p, omega_required=False)
    p.add_argument("--variable", choices=("omega", "N", "s"), required=True)
    p.add_argument("--grid", required=True, help="comma-separated, strictly increasing")
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--s", type=int, default=0)
    p.set_defaults(run=cmd_sweep)

    p = sub.add_parser("moments", help="modified moment table")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--J", type=int, required=True)
    p.add_argument("--log", action="store_true", help="also print log moments")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--force-bvp", action="store_true")
    g.add_argument("--force-forward", action="store_true")
    p.set_defaults(run=cmd_moments)

    p = sub.add_parser("golden", help="regenerate the golden-value file from the oracle")
    p.add_argument("--out", required=True)
    p.add_argument("--only", help="keep only cases whose id contains this text")
    p.set_defaults(run=cmd_golden)

    p = sub.add_parser("bounds", help="explicit bound and predicted rates")
    _add_spec_args(p)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, default=1, help="smoothness index for the N-rate")
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(run=cmd_bounds)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if a.command == "sweep" and a.variable != "omega" and a.omega is None:
            raise ValueError("--omega is required unless sweeping omega")
        if a.command in ("integrate", "bounds") and a.N < 1:
            raise ValueError("--N must be at least 1")
        return a.run(a, out)
    except RegimeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERIC
    except (ValueError, KeyError, TypeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (CCFError, ArithmeticError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
