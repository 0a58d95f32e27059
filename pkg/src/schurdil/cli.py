"""Command-line interface.

Artifacts are canonical JSON on stdout (or ``--out``); human-readable
summaries and timing go to stderr so artifacts stay byte-deterministic for
a fixed seed.  Failures print a machine-readable error object to stderr
and exit with 1 (validation), 2 (numerical non-convergence), or 3 (I/O).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import instances, report
from .algebra import TracialAlgebra
from .dilation import (
    beyond_window_residual,
    big_space_pairing,
    build,
    pairing_closed_form,
    verify_dilation,
)
from .multiplier import cp_check, norm_bounds, schur_apply
from .representation import build_multiplier, gauge_normalize, validate
from .search import TargetRejected, brute_oracle, search
from .serialize import (
    dilation_from_json,
    dilation_to_json,
    dumps,
    mat_from_json,
    mat_to_json,
    multiplier_from_json,
    multiplier_to_json,
    rep_from_json,
    rep_to_json,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONVERGENCE = 2
EXIT_IO = 3


class ConvergenceError(RuntimeError):
    """Numerical procedure ran but did not reach its target."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; route them to the validation code
    def error(self, message):
        raise ValueError(f"usage error: {message}")


def _read_json(path: str) -> dict:
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path} is not valid JSON: {exc}") from exc


def _emit(obj: dict, out: str | None) -> None:
    text = dumps(obj)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _parse_spec(text: str) -> TracialAlgebra:
    try:
        blocks = tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise ValueError(f"bad algebra spec {text!r}: expected comma-separated sizes") from exc
    return TracialAlgebra.uniform(blocks)


def _parse_omega(text: str | None, angle: float | None) -> complex:
    if (text is None) == (angle is None):
        raise ValueError("give exactly one of --omega or --angle")
    if angle is not None:
        return complex(np.exp(1j * np.deg2rad(angle)))
    try:
        return complex(text.replace("i", "j"))
    except ValueError as exc:
        raise ValueError(f"cannot parse omega {text!r}") from exc


def _verify_entries(rep_report) -> list[dict]:
    return [
        {"k": e.k, "max_residual": e.max_residual, "pass": e.ok} for e in rep_report.entries
    ]


# ---------------------------------------------------------------- commands


def cmd_gen(args) -> int:
    if args.name == "omega":
        omega = _parse_omega(args.omega, args.angle)
        rep = instances.omega_rep(omega)
    elif args.name == "allones":
        rep = instances.allones_rep(args.n)
    elif args.name == "identity-fourier":
        rep = instances.identity_fourier_rep(args.n)
    elif args.name == "pauli":
        rep = instances.pauli_rep()
    else:  # planted
        rep, _ = instances.planted(args.n, _parse_spec(args.spec), args.seed)
    phi = build_multiplier(rep)
    _emit(multiplier_to_json(phi), args.out)
    if args.rep_out:
        Path(args.rep_out).write_text(dumps(rep_to_json(rep)))
    _note(f"generated {args.name} multiplier, n={phi.n}")
    return EXIT_OK


def cmd_rep(args) -> int:
    obj = _read_json(args.rep)
    if args.action == "validate":
        rep = rep_from_json(obj, strict=False)
        result = validate(rep, tol=args.tol)
        _emit(
            {
                "schema": "schurdil.validation/1",
                "ok": result.ok,
                "unitarity_residuals": list(result.unitarity_residuals),
                "normalization_residual": result.normalization_residual,
                "messages": list(result.messages),
            },
            args.out,
        )
        if not result.ok:
            raise ValueError("; ".join(result.messages))
        _note("representation valid")
        return EXIT_OK
    rep = rep_from_json(obj)
    if args.action == "build-multiplier":
        _emit(multiplier_to_json(build_multiplier(rep)), args.out)
    else:  # gauge
        _emit(rep_to_json(gauge_normalize(rep)), args.out)
    return EXIT_OK


def cmd_schur(args) -> int:
    phi = multiplier_from_json(_read_json(args.multiplier))
    if args.action == "apply":
        if not args.matrix:
            raise ValueError("schur apply needs a matrix file argument")
        a = mat_from_json(_read_json(args.matrix))
        out = schur_apply(phi, a)
        _emit({"schema": "schurdil.matrix/1", **mat_to_json(out)}, args.out)
    elif args.action == "cp-check":
        res = cp_check(phi)
        _emit(
            {
                "schema": "schurdil.cp/1",
                "ok": res.ok,
                "min_eigenvalue": None if np.isnan(res.min_eigenvalue) else res.min_eigenvalue,
                "witness_alpha": None if res.alpha is None else mat_to_json(res.alpha),
                "message": res.message,
            },
            args.out,
        )
        _note(f"cp-check: {res.message}")
    else:  # norm
        nb = norm_bounds(phi, tol=args.tol, seed=args.seed)
        _emit(
            {
                "schema": "schurdil.norm/1",
                "lower": nb.lower,
                "upper": nb.upper,
                "witness": {"alpha": mat_to_json(nb.alpha), "beta": mat_to_json(nb.beta)},
                "feasibility_residual": nb.feasibility_residual,
                "bisection_steps": nb.bisection_steps,
            },
            args.out,
        )
        _note(f"norm in [{nb.lower:.8f}, {nb.upper:.8f}]")
    return EXIT_OK


def cmd_dilate(args) -> int:
    if args.action == "build":
        rep = rep_from_json(_read_json(args.source))
        sys_ = build(rep, args.window, dim_cap=args.dim_cap)
        _emit(dilation_to_json(rep, args.window, sys_.diagnostics), args.out)
        _note(f"built dilation system, ambient dimension {sys_.dim}")
        return EXIT_OK

    rep, window = dilation_from_json(_read_json(args.source))
    sys_ = build(rep, window, dim_cap=args.dim_cap)
    if args.action == "verify":
        k_max = window if args.kmax is None else args.kmax
        if k_max > window:
            raise ValueError(f"window exceeded: k_max={k_max} > K={window}")
        rep_report = verify_dilation(
            sys_, k_max=k_max, tol=args.tol, n_random=args.samples, seed=args.seed
        )
        entries = _verify_entries(rep_report)
        _emit(
            {
                "schema": "schurdil.verify/1",
                "window": window,
                "k_max": k_max,
                "tol": args.tol,
                "entries": entries,
                "ok": rep_report.ok,
            },
            args.out,
        )
        if args.report_dir:
            paths = report.write_residual_report(entries, args.tol, args.report_dir)
            _note("report files: " + ", ".join(str(p) for p in paths))
        worst = max(e["max_residual"] for e in entries)
        _note(f"verify: worst residual {worst:.3e} over k <= {k_max} (tol {args.tol:g})")
        if not rep_report.ok:
            raise ConvergenceError(f"dilation residual {worst:.3e} above tolerance {args.tol:g}")
        return EXIT_OK

    # pair: closed form against the ambient pairing on seeded random vectors
    rng = np.random.default_rng(args.seed)
    entries = []
    worst = 0.0
    for _ in range(args.samples):
        vecs = [rng.standard_normal(sys_.n) + 1j * rng.standard_normal(sys_.n) for _ in range(4)]
        closed = pairing_closed_form(rep, args.k, *vecs)
        big = big_space_pairing(sys_, args.k, *vecs)
        resid = abs(closed - big)
        worst = max(worst, resid)
        entries.append(
            {
                "closed_form": {"re": closed.real, "im": closed.imag},
                "big_space": {"re": big.real, "im": big.imag},
                "residual": resid,
            }
        )
    _emit(
        {
            "schema": "schurdil.pair/1",
            "k": args.k,
            "samples": args.samples,
            "entries": entries,
            "max_residual": worst,
        },
        args.out,
    )
    _note(f"pairing: max residual {worst:.3e} over {args.samples} samples at k={args.k}")
    return EXIT_OK


def _run_search(phi, algebras, args):
    """Try each algebra in order; stop at the first converged result."""
    attempts = []
    result = None
    for alg in algebras:
        result = search(
            phi,
            alg,
            restarts=args.restarts,
            seed=args.seed,
            target_residual=args.target_residual,
            max_iters=getattr(args, "iters", 150),
        )
        attempts.append(
            {
                "blocks": list(alg.blocks),
                "residual": result.residual,
                "converged": result.converged,
            }
        )
        if result.converged:
            break
    return result, attempts


def cmd_search(args) -> int:
    phi = multiplier_from_json(_read_json(args.target))
    if args.ladder:
        algebras = [_parse_spec(p) for p in args.ladder.split(";")]
    else:
        algebras = [_parse_spec(args.spec)]
    t0 = time.perf_counter()
    result, attempts = _run_search(phi, algebras, args)
    elapsed = time.perf_counter() - t0
    _emit(
        {
            "schema": "schurdil.search/1",
            "attempts": attempts,
            "best_rep": rep_to_json(result.best_rep),
            "residual": result.residual,
            "converged": result.converged,
            "message": result.message,
            "trace": [list(t) for t in result.traces],
        },
        args.out,
    )
    if args.report_dir:
        paths = report.write_search_report(result.traces, args.report_dir)
        _note("report files: " + ", ".join(str(p) for p in paths))
    _note(f"search: residual {result.residual:.3e} in {elapsed:.2f}s ({result.message})")
    if not result.converged:
        raise ConvergenceError(result.message)
    return EXIT_OK


def cmd_brute(args) -> int:
    phi = multiplier_from_json(_read_json(args.target))
    rep, residual = brute_oracle(phi, _parse_spec(args.spec), grid=args.grid)
    _emit(
        {
            "schema": "schurdil.brute/1",
            "grid": args.grid,
            "best_rep": rep_to_json(rep),
            "residual": residual,
        },
        args.out,
    )
    _note(f"brute grid minimum: residual {residual:.3e}")
    return EXIT_OK


def cmd_roundtrip(args) -> int:
    alg = _parse_spec(args.spec)
    rep_planted, phi = instances.planted(args.n, alg, args.seed)
    t0 = time.perf_counter()
    result, attempts = _run_search(phi, [alg], args)
    sys_ = build(result.best_rep, args.window)
    rep_report = verify_dilation(sys_, tol=args.tol, seed=args.seed)
    entries = _verify_entries(rep_report)
    boundary = beyond_window_residual(sys_, args.window + 1)
    elapsed = time.perf_counter() - t0
    ok = result.converged and rep_report.ok
    _emit(
        {
            "schema": "schurdil.roundtrip/1",
            "config": {
                "n": args.n,
                "spec": list(alg.blocks),
                "window": args.window,
                "seed": args.seed,
                "restarts": args.restarts,
                "target": args.target_residual,
                "tol": args.tol,
            },
            "target": multiplier_to_json(phi),
            "search": {
                "attempts": attempts,
                "residual": result.residual,
                "converged": result.converged,
                "best_rep": rep_to_json(result.best_rep),
                "trace": [list(t) for t in result.traces],
            },
            "dilation": {
                "entries": entries,
                "ok": rep_report.ok,
                "boundary_residual": boundary,
            },
            "ok": ok,
        },
        args.out,
    )
    if args.report_dir:
        paths = report.write_residual_report(entries, args.tol, args.report_dir)
        paths += report.write_search_report(result.traces, args.report_dir)
        _note("report files: " + ", ".join(str(p) for p in paths))
    _note(
        f"roundtrip: search residual {result.residual:.3e}, dilation ok={rep_report.ok}, "
        f"boundary residual {boundary:.3e}, {elapsed:.2f}s"
    )
    if not result.converged:
        raise ConvergenceError(f"search did not converge: {result.message}")
    if not rep_report.ok:
        raise ConvergenceError("dilation verification failed")
    return EXIT_OK


# ---------------------------------------------------------------- wiring


def _build_parser() -> _Parser:
    p = _Parser(prog="schurdil", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit a named example multiplier")
    g.add_argument("name", choices=["omega", "allones", "identity-fourier", "pauli", "planted"])
    g.add_argument("--omega", help="unimodular scalar, e.g. 'i' or '0.6+0.8i'")
    g.add_argument("--angle", type=float, help="phase angle in degrees (alternative to --omega)")
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--spec", default="2", help="algebra block sizes, e.g. '2' or '2,1'")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.add_argument("--rep-out", help="also write the generating representation here")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("rep", help="operate on representation files")
    r.add_argument("action", choices=["build-multiplier", "validate", "gauge"])
    r.add_argument("rep")
    r.add_argument("--tol", type=float, default=1e-10)
    r.add_argument("--out")
    r.set_defaults(func=cmd_rep)

    s = sub.add_parser("schur", help="apply/check a multiplier table")
    s.add_argument("action", choices=["apply", "norm", "cp-check"])
    s.add_argument("multiplier")
    s.add_argument("matrix", nargs="?", help="input matrix file (for apply)")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--seed", type=int, default=7)
    s.add_argument("--out")
    s.set_defaults(func=cmd_schur)

    d = sub.add_parser("dilate", help="build and test dilation systems")
    d.add_argument("action", choices=["build", "verify", "pair"])
    d.add_argument("source", help="representation file (build) or dilation file (verify/pair)")
    d.add_argument("--window", type=int, default=3)
    d.add_argument("--kmax", type=int, default=None)
    d.add_argument("--k", type=int, default=1)
    d.add_argument("--tol", type=float, default=1e-10)
    d.add_argument("--samples", type=int, default=10)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--dim-cap", type=int, default=None)
    d.add_argument("--out")
    d.add_argument("--report-dir")
    d.set_defaults(func=cmd_dilate)

    se = sub.add_parser("search", help="find a representation for a target table")
    se.add_argument("target")
    se.add_argument("--spec", default="2")
    se.add_argument("--ladder", help="semicolon list of specs to escalate through")
    se.add_argument("--restarts", type=int, default=8)
    se.add_argument("--seed", type=int, default=0)
    se.add_argument("--target", dest="target_residual", type=float, default=1e-8)
    se.add_argument("--iters", type=int, default=150)
    se.add_argument("--out")
    se.add_argument("--report-dir")
    se.set_defaults(func=cmd_search)

    br = sub.add_parser("brute", help="grid-search oracle over scalar algebras")
    br.add_argument("target")
    br.add_argument("--spec", default="1")
    br.add_argument("--grid", type=int, default=360)
    br.add_argument("--out")
    br.set_defaults(func=cmd_brute)

    rt = sub.add_parser("roundtrip", help="plant, search, dilate, verify")
    rt.add_argument("--n", type=int, default=3)
    rt.add_argument("--spec", default="2")
    rt.add_argument("--window", type=int, default=3)
    rt.add_argument("--seed", type=int, default=7)
    rt.add_argument("--restarts", type=int, default=8)
    rt.add_argument("--target", dest="target_residual", type=float, default=1e-8)
    rt.add_argument("--tol", type=float, default=1e-10)
    rt.add_argument("--out")
    rt.add_argument("--report-dir")
    rt.set_defaults(func=cmd_roundtrip)

    return p


def _error_json(kind: str, code: int, message: str) -> str:
    return dumps(
        {"schema": "schurdil.error/1", "kind": kind, "exit_code": code, "message": message}
    )


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (TargetRejected, ValueError) as exc:
        sys.stderr.write(_error_json("validation", EXIT_VALIDATION, str(exc)))
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        sys.stderr.write(_error_json("convergence", EXIT_CONVERGENCE, str(exc)))
        return EXIT_CONVERGENCE
    except OSError as exc:
        sys.stderr.write(_error_json("io", EXIT_IO, str(exc)))
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
