"""Command-line front end.

Every library operation is exposed as a subcommand emitting deterministic
JSON (schema "1") or CSV.  Complex numbers are serialized as two-element
arrays [re, im]; every output echoes the fully resolved parameter set.
Quantities that rest on the conjectural mu > 0 bulk-boundary formula carry
"conjectural": true.

Exit codes: 0 success, 2 domain/validation failure, 3 numerical
non-convergence.  The environment variable LIOUVILLE_THREADS caps worker
parallelism (evaluation is single-threaded and deterministic regardless, so
outputs are byte-identical across thread counts).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import bootstrap as bt
from . import structure_constants as sc
from . import virasoro as vir
from .errors import DomainError, LiouvilleError, NonConvergence
from .numerics import QuadratureSpec
from .specialfn import (LiouvilleParams, dedekind_eta, double_sine,
                        gamma_complex, l_ratio, log_double_gamma,
                        partition_count, upsilon)

SCHEMA = "1"


def _thread_cap() -> int:
    raw = os.environ.get("LIOUVILLE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"LIOUVILLE_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise DomainError("LIOUVILLE_THREADS must be >= 1")
    return n


def _cnum(value):
    """Parse 're' or 're,im' into a complex number."""
    parts = str(value).split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise argparse.ArgumentTypeError(f"cannot parse complex number {value!r}")


def _c(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _params_from(args) -> LiouvilleParams:
    kw = {"gamma": args.gamma, "mu": args.mu}
    if getattr(args, "theta", None) is not None:
        kw["theta"] = complex(args.theta)
    elif getattr(args, "theta_imag", None) is not None:
        kw["theta"] = 1j * args.theta_imag
    elif getattr(args, "mu_b", None) is not None:
        kw["mu_boundary"] = args.mu_b
    return LiouvilleParams(**kw)


def _params_echo(params: LiouvilleParams) -> dict:
    echo = {
        "gamma": params.gamma,
        "mu": params.mu,
        "Q": params.q_charge,
        "c_L": params.c_liouville,
        "c_matter": params.c_matter,
    }
    try:
        echo["theta"] = _c(params.theta_value)
        echo["mu_boundary"] = params.mu_boundary_value
    except (DomainError, LiouvilleError):
        pass
    return echo


def _spec_from(args) -> QuadratureSpec:
    return QuadratureSpec(rel_tol=args.rel_tol, abs_tol=args.abs_tol,
                          max_subdivisions=args.max_subdivisions,
                          truncation_bound=args.truncation_bound)


def _emit(args, payload: dict, csv_rows=None, csv_header=None):
    """Write JSON (default) or CSV deterministically."""
    if args.format == "json":
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    else:
        lines = ["# " + json.dumps(payload.get("parameters", {}),
                                   sort_keys=True)]
        lines.append(csv_header or "value_re,value_im")
        if csv_rows is None:
            v = payload.get("value", [0.0, 0.0])
            csv_rows = [(v[0], v[1])]
        for row in csv_rows:
            lines.append(",".join(repr(float(x)) for x in row))
        text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common(p, bootstrapish=False):
    p.add_argument("--gamma", type=float, required=True,
                   help="Liouville coupling in (0, 2)")
    p.add_argument("--mu", type=float, default=1.0,
                   help="bulk cosmological constant")
    p.add_argument("--mu-b", dest="mu_b", type=float, default=None,
                   help="boundary cosmological constant")
    p.add_argument("--theta", type=float, default=None,
                   help="FZZ parameter (real branch)")
    p.add_argument("--theta-imag", dest="theta_imag", type=float, default=None,
                   help="imaginary part for the imaginary theta branch")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", default=None, help="output path (default stdout)")
    p.add_argument("--rel-tol", dest="rel_tol", type=float, default=1e-10)
    p.add_argument("--abs-tol", dest="abs_tol", type=float, default=1e-14)
    p.add_argument("--max-subdivisions", dest="max_subdivisions", type=int,
                   default=4000)
    p.add_argument("--truncation-bound", dest="truncation_bound", type=float,
                   default=50.0)
    if bootstrapish:
        p.add_argument("--mu-b2", dest="mu_b2", type=float, default=None,
                       help="independent boundary constant for the second "
                            "boundary (two-boundary mode)")
        p.add_argument("--N", type=int, default=bt.DEFAULT_TRUNCATION,
                       help="block truncation level")


def _inner_params(args, params):
    if getattr(args, "mu_b2", None) is None:
        return None
    return LiouvilleParams(gamma=params.gamma, mu=params.mu,
                           mu_boundary=args.mu_b2)


def _beta_value(raw, params):
    if isinstance(raw, str) and raw.strip().lower() == "gamma":
        return params.gamma
    return float(raw)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="liouville",
        description="Boundary Liouville CFT numerics on the annulus")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("specialfn", help="evaluate one special function")
    p.add_argument("--fn", required=True,
                   choices=("gamma", "log-double-gamma", "double-gamma",
                            "double-sine", "upsilon", "l-ratio", "eta",
                            "partition"))
    p.add_argument("--z", type=_cnum, default=None, help="argument, re[,im]")
    p.add_argument("--q", type=float, default=None, help="eta argument")
    p.add_argument("--n", type=int, default=None, help="partition argument")
    p.add_argument("--n-terms", dest="n_terms", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("dozz", help="DOZZ three-point structure constant")
    p.add_argument("--a1", type=_cnum, required=True)
    p.add_argument("--a2", type=_cnum, required=True)
    p.add_argument("--a3", type=_cnum, required=True)
    _add_common(p)

    p = sub.add_parser("reflection", help="reflection coefficient R(alpha)")
    p.add_argument("--alpha", type=_cnum, required=True)
    _add_common(p)

    p = sub.add_parser("fzz", help="FZZ bulk one-point constant U(alpha)")
    p.add_argument("--alpha", type=_cnum, required=True)
    _add_common(p)

    p = sub.add_parser("bulk-boundary",
                       help="bulk-boundary correlator G(alpha, beta)")
    p.add_argument("--alpha", type=_cnum, required=True)
    p.add_argument("--beta", type=_cnum, required=True)
    _add_common(p)

    p = sub.add_parser("gram", help="Shapovalov Gram matrix at one level")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--delta", type=_cnum, default=None,
                   help="highest weight (default: from --P)")
    p.add_argument("--c", type=_cnum, default=None,
                   help="central charge (default: c_L of gamma)")
    p.add_argument("--P", type=float, default=None,
                   help="spectrum parameter fixing delta")
    _add_common(p)

    p = sub.add_parser("block", help="conformal block coefficient table")
    p.add_argument("--kind", required=True,
                   choices=("annulus-1pt", "annulus-2pt", "torus-1pt",
                            "torus-2pt"))
    p.add_argument("--beta", default=None,
                   help="insertion charge (number or 'gamma')")
    p.add_argument("--beta1", default=None)
    p.add_argument("--beta2", default=None)
    p.add_argument("--P", type=float, required=True)
    p.add_argument("--P2", type=float, default=None,
                   help="second spectrum parameter (torus-2pt)")
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--q", type=float, default=None,
                   help="also evaluate the partial sum at this modulus")
    p.add_argument("--b1b2", type=_cnum, default=complex(1.0),
                   help="product of boundary positions (annulus-2pt)")
    _add_common(p)

    p = sub.add_parser("bootstrap-2pt", help="annulus two-point bootstrap")
    p.add_argument("--beta1", required=True)
    p.add_argument("--beta2", required=True)
    p.add_argument("--b1", type=_cnum, default=complex(1.0))
    p.add_argument("--b2", type=_cnum, default=complex(1.0))
    p.add_argument("--q", type=float, required=True)
    _add_common(p, bootstrapish=True)

    p = sub.add_parser("bootstrap-1pt", help="annulus one-point bootstrap")
    p.add_argument("--beta1", required=True)
    p.add_argument("--b", type=_cnum, default=complex(1.0))
    p.add_argument("--q", type=float, required=True)
    _add_common(p, bootstrapish=True)

    p = sub.add_parser("bootstrap-gamma",
                       help="gamma-insertion bootstrap (eta-form block)")
    p.add_argument("--q", type=float, required=True)
    _add_common(p, bootstrapish=True)

    p = sub.add_parser("lqg", help="bosonic LQG annulus partition function")
    _add_common(p, bootstrapish=True)

    return ap


def _run_specialfn(args, params):
    fn = args.fn
    if fn == "eta":
        if args.q is None:
            raise DomainError("eta needs --q")
        return {"value": [dedekind_eta(args.q, args.n_terms), 0.0]}
    if fn == "partition":
        if args.n is None:
            raise DomainError("partition needs --n")
        return {"value": [float(partition_count(args.n)), 0.0],
                "integer": partition_count(args.n)}
    if args.z is None:
        raise DomainError(f"{fn} needs --z")
    z = args.z
    value = {
        "gamma": lambda: gamma_complex(z),
        "log-double-gamma": lambda: log_double_gamma(z, params),
        "double-gamma": lambda: complex(np.exp(log_double_gamma(z, params))),
        "double-sine": lambda: double_sine(z, params),
        "upsilon": lambda: upsilon(z, params),
        "l-ratio": lambda: l_ratio(z),
    }[fn]()
    return {"value": _c(value)}


def _run_block(args, params):
    kind = args.kind.replace("-", "_")
    if kind in ("annulus_1pt", "torus_1pt"):
        beta = _beta_value(args.beta if args.beta is not None else args.beta1,
                           params)
        weights = (beta,)
    else:
        weights = (_beta_value(args.beta1, params),
                   _beta_value(args.beta2, params))
    P = (args.P, args.P2 if args.P2 is not None else args.P) \
        if kind == "torus_2pt" else args.P
    series = vir.block_series(kind, weights, P, params, args.N)
    coeffs = []
    for (n, m), cf in sorted(series.coefficients.items()):
        if kind in ("annulus_1pt", "torus_1pt"):
            coeffs.append({"level": n, "value": _c(cf)})
        else:
            coeffs.append({"levels": [n, m], "value": _c(cf)})
    out = {"kind": args.kind, "weights": [_c(w) for w in weights],
           "truncation": args.N, "coefficients": coeffs}
    if args.q is not None:
        out["partial_sum"] = _c(vir.evaluate_block(series, args.q,
                                                   b1b2=args.b1b2))
        out["q"] = args.q
    return out


def _csv_rows_block(payload):
    rows = []
    for entry in payload["coefficients"]:
        lv = entry.get("level")
        if lv is None:
            n, m = entry["levels"]
        else:
            n, m = lv, 0
        rows.append((n, m, entry["value"][0], entry["value"][1]))
    return rows, "n,m,re,im"


def _bootstrap_payload(res, conjectural):
    out = {"value": _c(res.value), "P_max": res.P_max,
           "error_estimate": res.quadrature_error}
    if conjectural:
        out["conjectural"] = True
    return out


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _thread_cap()
        params = _params_from(args)
        spec = _spec_from(args)
        payload = {"schema": SCHEMA, "command": args.command}
        csv_rows = None
        csv_header = None

        if args.command == "specialfn":
            payload.update(_run_specialfn(args, params))
        elif args.command == "dozz":
            payload["value"] = _c(sc.dozz(args.a1, args.a2, args.a3, params))
        elif args.command == "reflection":
            payload["value"] = _c(sc.reflection(args.alpha, params))
        elif args.command == "fzz":
            payload["value"] = _c(sc.fzz_one_point(args.alpha, params))
        elif args.command == "bulk-boundary":
            payload["value"] = _c(sc.bulk_boundary(args.alpha, args.beta,
                                                   params, spec))
            if params.mu > 0:
                payload["conjectural"] = True
        elif args.command == "gram":
            if args.delta is not None:
                delta = args.delta
            elif args.P is not None:
                delta = params.weight(complex(params.q_charge, args.P))
            else:
                raise DomainError("gram needs --delta or --P")
            cval = args.c if args.c is not None else complex(params.c_liouville)
            g = vir.gram_matrix(args.level, delta, cval)
            payload["level"] = args.level
            payload["delta"] = _c(delta)
            payload["c"] = _c(cval)
            payload["partitions"] = [list(p.parts) for p in g.partitions]
            payload["entries"] = [[_c(x) for x in row] for row in g.entries]
            payload["determinant"] = _c(g.determinant())
        elif args.command == "block":
            payload.update(_run_block(args, params))
            csv_rows, csv_header = _csv_rows_block(payload)
        elif args.command == "bootstrap-2pt":
            res = bt.two_point_bootstrap(
                _beta_value(args.beta1, params), _beta_value(args.beta2, params),
                args.b1, args.b2, args.q, params, spec,
                params_inner=_inner_params(args, params), n_trunc=args.N)
            payload.update(_bootstrap_payload(res, conjectural=True))
            payload["q"] = args.q
            csv_rows = [(p, v.real, v.imag) for p, v in res.integrand_samples]
            csv_header = "P,re,im"
        elif args.command == "bootstrap-1pt":
            res = bt.one_point_bootstrap(
                _beta_value(args.beta1, params), args.b, args.q, params, spec,
                params_inner=_inner_params(args, params), n_trunc=args.N)
            payload.update(_bootstrap_payload(res, conjectural=True))
            payload["q"] = args.q
            csv_rows = [(p, v.real, v.imag) for p, v in res.integrand_samples]
            csv_header = "P,re,im"
        elif args.command == "bootstrap-gamma":
            res = bt.gamma_insertion_bootstrap(
                args.q, params, spec,
                params_inner=_inner_params(args, params))
            payload.update(_bootstrap_payload(res, conjectural=False))
            payload["q"] = args.q
            csv_rows = [(p, v.real, v.imag) for p, v in res.integrand_samples]
            csv_header = "P,re,im"
        elif args.command == "lqg":
            res = bt.lqg_partition(params, spec,
                                   params_inner=_inner_params(args, params))
            payload["value"] = [res.value, 0.0]
            payload["inner_P_tolerance"] = res.inner_P_tolerance
            payload["outer_q_tolerance"] = res.outer_q_tolerance
            csv_rows = [(q, v.real, v.imag) for q, v in res.q_grid_report]
            csv_header = "q,inner_re,inner_im"

        payload["parameters"] = _params_echo(params)
        _emit(args, payload, csv_rows=csv_rows, csv_header=csv_header)
        return 0
    except NonConvergence as exc:
        err = {"error": "NonConvergence", "message": str(exc),
               "error_estimate": exc.error, "tolerance": exc.tolerance,
               "subdivisions": exc.subdivisions}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 3
    except (DomainError, LiouvilleError, ValueError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(err, sort_keys=True) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
