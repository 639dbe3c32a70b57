"""Command-line front end: profiles in, reports/tables/meshes out.

Commands
    analyze    validate a profile, run every embeddability test, emit JSON
    spectrum   enumerate all eigenvalues below a cutoff (CSV + JSON)
    mesh       export the embedded surface of revolution as OBJ + sidecar JSON
    sweep      scan the pinch family c(1-x^2)/(1 + eps*x^(2n)) into a CSV table
    verify     recompute the pinned reference constants and report pass/fail

Profile sources (exactly one): ``--builtin round|paper-example``,
``--expr "10*(1-x^2)/(1+9*x^36)"``, or ``--profile FILE`` where FILE is JSON
of one of three kinds:

    {"kind": "expression", "expr": "1 - x^2", "name": "..."}
    {"kind": "samples", "x": [...], "f": [...], "name": "..."}
    {"kind": "arclength-expression", "a": "sin(s)", "length": 3.14159...}

The arclength kind is rescaled to total area 4*pi and transformed into
momentum coordinates before use (its reported eigenvalues refer to the
normalized metric; the applied scale factor is printed).

Exit codes: 0 success / embeddable; 2 not embeddable; 3 profile validation
failed; 1 I/O or solver failure; 4 verify-suite failure; 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .exprs import ExprError, EvalDomainError, differentiate, evaluate, parse
from .families import BUILTIN_EXPRESSIONS, squeeze_profile
from .profile import (ArclengthProfile, InvalidProfileError, Profile,
                      ProfileDefinitionError, gauss_bonnet_residual,
                      make_profile, momentum_transform, normalize_area,
                      profile_from_text, require_valid, validate)
from .quadrature import QuadratureError
from .obstruction import full_report
from .embed import (NotEmbeddableError, curve_csv_text, embed_profile_curve,
                    euler_characteristic, export_obj, induced_metric_residual,
                    make_mesh, mesh_area)
from .solver import ConvergenceError, SolverError, rayleigh_quotient, refine
from .spectrum import (BudgetError, bounds_report, channel_lower_bound,
                       enumerate_below, lambda01_upper_bound)
from .serialize import fmt17, json_text, write_bytes, write_text

__all__ = ["main", "build_parser", "load_profile", "RunConfig"]

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_NOT_EMBEDDABLE = 2
EXIT_INVALID_PROFILE = 3
EXIT_VERIFY_FAILED = 4
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage failures exit with the dedicated code.

    The default argparse exit status (2) is taken here by the
    "not embeddable" verdict, so usage problems get the sysexits-style 64.
    """

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs, extracted from parsed flags."""

    command: str
    builtin: str | None = None
    expr: str | None = None
    profile_path: str | None = None
    tol: float = 1e-8
    basis_cap: int = 1024
    cluster_tol: float = 1e-6
    out: str | None = None
    fmt: str = "json"
    below: float | None = None
    n_theta: int = 64
    n_samples: int = 256
    eps_values: tuple[float, ...] = ()
    n_values: tuple[int, ...] = ()
    quad_mult: int = 4


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="revspec",
                     description="spectra, embeddability verdicts, and "
                                 "surfaces of revolution for rotation-"
                                 "invariant sphere metrics")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, profile_required=True):
        if profile_required:
            grp = sp.add_mutually_exclusive_group(required=True)
            grp.add_argument("--builtin", choices=sorted(BUILTIN_EXPRESSIONS))
            grp.add_argument("--expr", metavar="TEXT",
                             help="profile as an expression in x")
            grp.add_argument("--profile", metavar="FILE", dest="profile_path",
                             help="profile description JSON file")
        sp.add_argument("--tol", type=float, default=1e-8,
                        help="relative eigenvalue tolerance (default 1e-8)")
        sp.add_argument("--basis-cap", type=int, default=1024,
                        help="largest Galerkin basis size (default 1024)")
        sp.add_argument("--cluster-tol", type=float, default=1e-6,
                        help="relative tolerance merging eigenvalues "
                             "across channels (default 1e-6)")
        sp.add_argument("--out", metavar="PATH", help="output path")
        sp.add_argument("--format", choices=("json", "csv"), default="json",
                        dest="fmt", help="stdout format where applicable")

    sp = sub.add_parser("analyze", help="validation, bounds, and "
                                        "embeddability report")
    add_common(sp)

    sp = sub.add_parser("spectrum", help="all eigenvalues below a cutoff")
    add_common(sp)
    sp.add_argument("--below", type=float, required=True, metavar="LAMBDA",
                    help="enumerate the spectrum in (0, LAMBDA]")

    sp = sub.add_parser("mesh", help="OBJ surface of revolution")
    add_common(sp)
    sp.add_argument("--n-theta", type=int, default=64,
                    help="vertices per ring (default 64)")
    sp.add_argument("--n-samples", type=int, default=256,
                    help="meridian samples (default 256)")

    sp = sub.add_parser("sweep", help="scan the pinch family into a CSV")
    add_common(sp, profile_required=False)
    sp.add_argument("--eps", default="0,0.5,1,2,4,9", metavar="LIST",
                    help="comma-separated pinch strengths (default "
                         "0,0.5,1,2,4,9)")
    sp.add_argument("--n", default="18", metavar="LIST",
                    help="comma-separated half-exponents; the profile "
                         "exponent is 2n (default 18)")

    sp = sub.add_parser("verify", help="recompute the pinned reference "
                                       "constants")
    add_common(sp, profile_required=False)
    sp.add_argument("--quad-mult", type=int, default=4,
                    help="quadrature nodes per basis function (default 4; "
                         "lowering demonstrates sensitivity)")
    return parser


def _config_from_args(args: argparse.Namespace,
                      parser: argparse.ArgumentParser) -> RunConfig:
    eps_values: tuple[float, ...] = ()
    n_values: tuple[int, ...] = ()
    if args.command == "sweep":
        try:
            eps_values = tuple(float(v) for v in args.eps.split(","))
            n_values = tuple(int(v) for v in args.n.split(","))
        except ValueError:
            parser.error("--eps and --n must be comma-separated numbers")
        if any(e < 0 for e in eps_values) or any(n < 1 for n in n_values):
            parser.error("--eps entries must be >= 0 and --n entries >= 1")
    below = getattr(args, "below", None)
    if below is not None and not below > 0:
        parser.error("--below must be positive")
    if getattr(args, "tol", 1e-8) < 1e-12:
        parser.error("--tol below 1e-12 is not resolvable")
    if args.command == "mesh":
        if args.out is None:
            parser.error("mesh requires --out PATH for the OBJ file")
        if args.n_theta < 8:
            parser.error("--n-theta must be at least 8")
        if args.n_samples < 16:
            parser.error("--n-samples must be at least 16")
    return RunConfig(
        command=args.command,
        builtin=getattr(args, "builtin", None),
        expr=getattr(args, "expr", None),
        profile_path=getattr(args, "profile_path", None),
        tol=getattr(args, "tol", 1e-8),
        basis_cap=getattr(args, "basis_cap", 1024),
        cluster_tol=getattr(args, "cluster_tol", 1e-6),
        out=args.out,
        fmt=getattr(args, "fmt", "json"),
        below=below,
        n_theta=getattr(args, "n_theta", 64),
        n_samples=getattr(args, "n_samples", 256),
        eps_values=eps_values,
        n_values=n_values,
        quad_mult=getattr(args, "quad_mult", 4),
    )


# ---------------------------------------------------------------------------
# profile loading
# ---------------------------------------------------------------------------

def _profile_from_file(path: str) -> Profile:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ProfileDefinitionError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ProfileDefinitionError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ProfileDefinitionError(f"{path}: top level must be an object")
    kind = payload.get("kind")
    name = payload.get("name", Path(path).stem)
    if kind == "expression":
        if "expr" not in payload:
            raise ProfileDefinitionError(f"{path}: missing \"expr\"")
        return profile_from_text(str(payload["expr"]), name=name)
    if kind == "samples":
        if "x" not in payload or "f" not in payload:
            raise ProfileDefinitionError(f"{path}: need \"x\" and \"f\" arrays")
        xs, fs = payload["x"], payload["f"]
        if len(xs) != len(fs):
            raise ProfileDefinitionError(f"{path}: x and f lengths differ")
        return make_profile(list(zip(xs, fs)), name=name)
    if kind == "arclength-expression":
        return _profile_from_arclength(payload, path, name)
    raise ProfileDefinitionError(
        f"{path}: unknown kind {kind!r} (expected expression, samples, or "
        f"arclength-expression)")


def _profile_from_arclength(payload: dict, path: str, name: str) -> Profile:
    if "a" not in payload or "length" not in payload:
        raise ProfileDefinitionError(f"{path}: need \"a\" expression and \"length\"")
    length = float(payload["length"])
    if not (length > 0 and np.isfinite(length)):
        raise ProfileDefinitionError(f"{path}: length must be positive")
    a_expr = parse(str(payload["a"]), var="s")
    da_expr = differentiate(a_expr)
    d2a_expr = differentiate(da_expr)
    ap = ArclengthProfile(
        a=lambda s: evaluate(a_expr, s),
        da=lambda s: evaluate(da_expr, s),
        d2a=lambda s: evaluate(d2a_expr, s),
        length=length, source="expression")
    normalized = normalize_area(ap)
    if abs(normalized.scale_factor - 1.0) > 1e-12:
        print(f"note: area normalized by homothety factor "
              f"{fmt17(normalized.scale_factor)}; eigenvalues refer to the "
              f"normalized metric", file=sys.stderr)
    p = momentum_transform(normalized)
    return Profile(f=p.f, df=p.df, d2f=p.d2f, source=p.source, expr=None,
                   name=name, knots=p.knots)


def load_profile(cfg: RunConfig) -> Profile:
    """Resolve the configured profile source; raises the profile errors."""
    if cfg.builtin is not None:
        return profile_from_text(BUILTIN_EXPRESSIONS[cfg.builtin],
                                 name=cfg.builtin)
    if cfg.expr is not None:
        return profile_from_text(cfg.expr, name="command-line")
    if cfg.profile_path is not None:
        return _profile_from_file(cfg.profile_path)
    raise ProfileDefinitionError("no profile source configured")


def _load_validated(cfg: RunConfig) -> Profile:
    p = load_profile(cfg)
    require_valid(p, context=p.name or "profile")
    return p


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _emit(cfg: RunConfig, text: str, suffix: str | None = None) -> None:
    if cfg.out:
        out = Path(cfg.out)
        if suffix is not None:
            out = out.with_suffix(suffix)
        write_text(out, text)
    else:
        sys.stdout.write(text)


def cmd_analyze(cfg: RunConfig) -> int:
    try:
        p = _load_validated(cfg)
    except (ProfileDefinitionError, ExprError) as exc:
        print(f"profile error: {exc}", file=sys.stderr)
        return EXIT_INVALID_PROFILE
    except InvalidProfileError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        payload = {"profile": exc.report.to_json_dict() if exc.report else None,
                   "verdict": "invalid_profile"}
        _emit(cfg, json_text(payload))
        return EXIT_INVALID_PROFILE
    report = full_report(p, cluster_tol=cfg.cluster_tol)
    payload = {
        "profile": {"name": p.name, "source": p.source},
        "validation": validate(p).to_json_dict(),
        "gauss_bonnet_residual": gauss_bonnet_residual(p),
        "bounds": bounds_report(p).to_json_dict(),
        "obstructions": report.to_json_dict(),
    }
    _emit(cfg, json_text(payload))
    for line in report.consistency_failures:
        print(f"internal consistency failure: {line}", file=sys.stderr)
    return EXIT_OK if report.verdict == "embeddable" else EXIT_NOT_EMBEDDABLE


def cmd_spectrum(cfg: RunConfig) -> int:
    try:
        p = _load_validated(cfg)
    except (ProfileDefinitionError, ExprError) as exc:
        print(f"profile error: {exc}", file=sys.stderr)
        return EXIT_INVALID_PROFILE
    except InvalidProfileError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_INVALID_PROFILE
    table = enumerate_below(p, cfg.below, cluster_tol=cfg.cluster_tol,
                            target_rel_err=cfg.tol, basis_cap=cfg.basis_cap)
    doc = json_text({"profile": {"name": p.name},
                     "requested_below": cfg.below,
                     "table": table.to_json_dict()})
    csv = table.to_csv_text()
    if cfg.out:
        base = Path(cfg.out)
        write_text(base.with_suffix(".json"), doc)
        write_text(base.with_suffix(".csv"), csv)
    else:
        sys.stdout.write(csv if cfg.fmt == "csv" else doc)
    print(f"certified complete below {fmt17(table.cutoff)} "
          f"({len(table.entries)} distinct eigenvalues)", file=sys.stderr)
    return EXIT_OK


def cmd_mesh(cfg: RunConfig) -> int:
    try:
        p = _load_validated(cfg)
    except (ProfileDefinitionError, ExprError) as exc:
        print(f"profile error: {exc}", file=sys.stderr)
        return EXIT_INVALID_PROFILE
    except InvalidProfileError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_INVALID_PROFILE
    try:
        curve = embed_profile_curve(p, n_samples=cfg.n_samples)
    except NotEmbeddableError as exc:
        print(f"cannot mesh: {exc}", file=sys.stderr)
        return EXIT_NOT_EMBEDDABLE
    mesh = make_mesh(curve, n_theta=cfg.n_theta)
    res = induced_metric_residual(mesh, p)
    write_bytes(Path(cfg.out), export_obj(mesh))
    sidecar = {
        "profile": {"name": p.name, "source": p.source},
        "n_theta": cfg.n_theta,
        "n_samples": cfg.n_samples,
        "mesh": {"vertices": int(mesh.vertices.shape[0]),
                 "faces": int(mesh.faces.shape[0]),
                 "euler_characteristic": euler_characteristic(mesh),
                 "area": mesh_area(mesh)},
        "meridian_length": curve.length,
        "induced_metric_residual": res.to_json_dict(),
    }
    write_text(Path(cfg.out).with_suffix(".json"), json_text(sidecar))
    print(f"induced-metric residual sup {fmt17(res.sup)}, rms {fmt17(res.rms)}")
    return EXIT_OK


_SWEEP_HEADER = ("eps,n,exponent,c,max_slope,lambda01,multiplicities,"
                 "verdict,spectral_verdict,error")


def _sweep_row(eps: float, n: int, cfg: RunConfig) -> str:
    c = 1.0 + eps
    base = f"{fmt17(eps)},{n},{2 * n},{fmt17(c)}"
    try:
        p = squeeze_profile(eps, n=2 * n)
        report = full_report(p, cluster_tol=cfg.cluster_tol)
        mults = ";".join(str(m) for m in
                         report.even_multiplicity_test.multiplicities)
        return (f"{base},{fmt17(report.sup_test.max_slope)},"
                f"{fmt17(report.spectral_test.lambda01)},{mults},"
                f"{report.verdict},{report.spectral_verdict},")
    except (InvalidProfileError, SolverError, BudgetError, QuadratureError,
            ValueError) as exc:
        reason = str(exc).replace("\n", " ").replace(",", ";")
        return f"{base},,,,,,{reason}"


def cmd_sweep(cfg: RunConfig) -> int:
    rows = [_SWEEP_HEADER]
    for n in cfg.n_values:
        for eps in cfg.eps_values:
            rows.append(_sweep_row(eps, n, cfg))
    _emit(cfg, "\n".join(rows) + "\n", suffix=".csv" if cfg.out else None)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    """Recompute the pinned constants of the strongly pinched example and the
    round sphere; any mismatch exits with the dedicated failure code."""
    checks: list[tuple[str, bool, str]] = []

    def record(name: str, ok: bool, detail: str) -> None:
        checks.append((name, bool(ok), detail))

    squeeze = profile_from_text(BUILTIN_EXPRESSIONS["paper-example"],
                                name="paper-example")
    rnd = profile_from_text(BUILTIN_EXPRESSIONS["round"], name="round")

    target = Fraction(185, 23)
    bound = channel_lower_bound(squeeze, 0, 1)
    rel = abs(bound - float(target)) / float(target)
    record("invariant-channel lower bound 2/int((1-x^2)/f) = 185/23",
           rel <= 1e-9, f"computed {fmt17(bound)}, target {fmt17(float(target))}, "
                        f"rel err {rel:.3e}")

    u = parse("sqrt(1 - x^2)")
    rq = rayleigh_quotient(squeeze, 4, u)
    record("channel-4 quotient with sqrt(1-x^2) below 8",
           rq < 8.0, f"computed {fmt17(rq)}")
    bracket = float(Fraction(1477, 185))
    record("channel-4 quotient within the 1477/185 bracketing value",
           rq <= bracket + 1e-12, f"computed {fmt17(rq)} vs {fmt17(bracket)}")

    lam01 = refine(rnd, 0, 1, target_rel_err=cfg.tol,
                   basis_cap=cfg.basis_cap,
                   quad_mult=cfg.quad_mult).eigenvalues[0]
    upper = lambda01_upper_bound(rnd)
    record("round sphere saturates the (3/2) int f bound: bound 2, "
           "first invariant eigenvalue 2",
           abs(lam01 - 2.0) <= 1e-7 and abs(upper - 2.0) <= 1e-10,
           f"eigenvalue {fmt17(lam01)}, bound {fmt17(upper)}")

    failed = [c for c in checks if not c[1]]
    width = max(len(name) for name, _, _ in checks)
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}")
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    if failed:
        print(f"verify failed on: {failed[0][0]} ({failed[0][2]})",
              file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


_COMMANDS = {
    "analyze": cmd_analyze,
    "spectrum": cmd_spectrum,
    "mesh": cmd_mesh,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _config_from_args(args, parser)
    try:
        return _COMMANDS[cfg.command](cfg)
    except (ConvergenceError, SolverError, BudgetError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (QuadratureError, EvalDomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
