"""Command-line front end: ``mvoptbl <command> [flags]``.

Exit codes: 0 all checks pass, 1 usage error, 2 a check failed, 3 a numerical
guard tripped (ill-conditioned norms or an ambiguous least-squares residual).
"""

from __future__ import annotations

import argparse
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__, regress, tbl
from .families import FamilyError, build_family, family_catalog, pearson_residuals, switching_residual
from .mvop import MVOPError, generate_mvop
from .report import Check, Report

EXIT_OK, EXIT_USAGE, EXIT_CHECK, EXIT_GUARD = 0, 1, 2, 3

FAMILY_NAMES = {
    "hermite": "hermite",
    "laguerre": "laguerre",
    "gegenbauer": "gegenbauer",
    "charlier": "charlier",
    "hermite-free": "hermite_free",
    "hermite_free": "hermite_free",
}


class UsageError(Exception):
    pass


class _Guard(Exception):
    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


class _CheckFailure(Exception):
    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _add_output(p):
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", help="write the JSON report to this path")


def _add_family(p):
    p.add_argument("--family", required=True, choices=sorted(FAMILY_NAMES))
    p.add_argument("--set", dest="set_id", type=int, help="parameter set (hermite, laguerre)")
    p.add_argument("--size", type=int, help="matrix size N")
    p.add_argument("--ell", type=float, help="gegenbauer: N = 2 ell + 1")
    p.add_argument("--nu", type=float)
    p.add_argument("--a", type=float, help="charlier parameter; laguerre parameter of L")
    p.add_argument("--lam", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--C", type=float)
    p.add_argument("--alpha", type=_floats, help="hermite-free alpha_1..alpha_N")
    p.add_argument("--t", type=_floats, help="hermite-free t_1..t_N")
    p.add_argument("--random", action="store_true", help="hermite-free: draw alpha and t from --seed")


def _add_tolerances(p):
    p.add_argument("--tol-identity", type=float, default=1e-10)
    p.add_argument("--tol-consistent", type=float, default=tbl.TOL_CONSISTENT)
    p.add_argument("--tol-inconsistent", type=float, default=tbl.TOL_INCONSISTENT)
    p.add_argument("--nodes", type=int, help="quadrature nodes (default max(40, n_max + 2N + 5))")
    p.add_argument("--seed", type=int, default=7)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mvoptbl", description="Matrix time and band limiting workbench.")
    parser.add_argument("--version", action="version", version=f"mvoptbl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("families", help="list families and parameter sets")
    _add_output(p)

    p = sub.add_parser("verify-pearson", help="Pearson, switching and eigenvalue identities")
    _add_family(p)
    _add_tolerances(p)
    p.add_argument("--tol-eigen", type=float, default=1e-8)
    p.add_argument("--nmax", type=int, default=8)
    _add_output(p)

    p = sub.add_parser("solve-r", help="solve the linear system for R")
    _add_family(p)
    _add_tolerances(p)
    p.add_argument("--M", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("build-t", help="assemble the commuting operator T")
    _add_family(p)
    _add_tolerances(p)
    p.add_argument("--M", type=int, default=0)
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--check", action="store_true", help="run the commutation checks")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--tol-coupling", type=float, default=1e-8)
    p.add_argument("--tol-band", type=float, default=1e-8)
    _add_output(p)

    p = sub.add_parser("counterexample", help="free weight sweep over sizes and draws")
    p.add_argument("--sizes", type=_ints, default=[3, 4, 5, 6])
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--M", type=int, default=0)
    _add_tolerances(p)
    _add_output(p)

    p = sub.add_parser("regress", help="run the full acceptance grid")
    _add_tolerances(p)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--threads", type=int, help="worker threads (default MVOPTBL_THREADS or 1)")
    _add_output(p)
    return parser


# -- family selection ------------------------------------------------------------

def family_from_args(args):
    kind = FAMILY_NAMES[args.family]
    N = args.size
    if kind == "gegenbauer" and args.ell is not None:
        n_ell = 2 * args.ell + 1
        if n_ell != int(n_ell) or (N is not None and N != int(n_ell)):
            raise UsageError("--ell must be a nonnegative half-integer matching --size")
        N = int(n_ell)
    if N is None:
        raise UsageError("--size (or --ell for gegenbauer) is required")
    if kind == "hermite_free":
        alpha, t = args.alpha, args.t
        if args.random:
            rng = tbl.Lcg64(args.seed)
            draw_alpha, draw_t = tbl.free_draw(N, rng)
            alpha = draw_alpha if alpha is None else alpha
            t = draw_t if t is None else t
        return build_family(kind, N, alpha=alpha, t=t)
    nu = args.nu
    if nu is None:
        raise UsageError("--nu is required for this family")
    if kind == "charlier":
        if nu != int(nu):
            raise UsageError("charlier needs an integer --nu")
        nu = int(nu)
    extra = {"lam": args.lam, "rho": args.rho, "C": args.C, "a": args.a}
    if kind == "gegenbauer":
        extra = {}
    elif kind == "hermite":
        extra.pop("a")
    return build_family(kind, N, nu, args.set_id, **extra)


def _family_config(args, f) -> dict:
    return {"family": f.kind, "N": f.N, "nu": f.nu, "set": f.set_id,
            "params": {k: (v.tolist() if isinstance(v, np.ndarray) else v)
                       for k, v in f.params.items()}}


# -- commands -----------------------------------------------------------------------

def cmd_families(args) -> Report:
    rep = Report("families", {})
    rep.sections["families"] = family_catalog()
    return rep


def cmd_verify_pearson(args) -> Report:
    f = family_from_args(args)
    if not f.has_pearson:
        raise UsageError(f"{args.family} has no Pearson data; choose a Pearson family")
    rep = Report("verify-pearson", _family_config(args, f))
    res_phi, res_psi = pearson_residuals(f)
    rep.add(Check("pearson residual (Phi)", "W1 = W Phi", res_phi, args.tol_identity),
            Check("pearson residual (Psi)", "nabla W1 = W Psi" if f.is_discrete else "W1' = W Psi",
                  res_psi, args.tol_identity),
            Check("switching residual", "W Phi = Phi^T W, W Psi = Psi^T W", switching_residual(f),
                  args.tol_identity))
    seq = generate_mvop(f, args.nmax, args.nodes)
    rep.add(Check(f"eigen identity n <= {args.nmax}", "P_n . D = Lambda_n P_n",
                  regress.eigen_residual(f, seq, args.nmax), args.tol_eigen))
    rep.sections["family"] = f.to_dict()
    return rep


def _solve(f, S, args):
    try:
        return tbl.solve_R(f, S, tol_consistent=args.tol_consistent,
                           tol_inconsistent=args.tol_inconsistent)
    except tbl.AmbiguousSystemError as exc:
        raise _Guard(str(exc), exc.report) from exc


def cmd_solve_r(args) -> Report:
    f = family_from_args(args)
    S = tbl.sigma(f, args.M)
    sol = _solve(f, S, args)
    rep = Report("solve-r", {**_family_config(args, f), "M": args.M})
    rep.add(Check("rows assembled beyond 2 N^3", "N^2 unknowns, at most 2N * N^2 rows",
                  max(0, sol.rows_assembled - 2 * f.N ** 3), 0.5))
    rep.notes.append(f"status {sol.status}, relative residual {sol.residual:.3e}, "
                     f"rank {sol.rank} of {sol.cols}, null space dimension {len(sol.nullspace)}")
    if f.has_pearson:
        R = tbl.closed_form_R(f, args.M)
        rep.add(Check("closed-form R in solution set", "distance to affine solution set",
                      sol.distance_to(R), args.tol_consistent))
        rep.sections["closed_form_R"] = R.tolist()
    elif f.N == 2:
        rep.add(Check("known N=2 solution in solution set", "[[0,-1/r],[-t2/(t1 r),0]]",
                      sol.distance_to(tbl.free_R_two(f)), args.tol_consistent))
    rep.sections["solve"] = sol.to_dict()
    rep.sections["sigma"] = S.tolist()
    return rep


def _R_for(f, M, args):
    if f.has_pearson:
        return tbl.closed_form_R(f, M)
    if f.N == 2:
        return tbl.free_R_two(f)
    sol = _solve(f, tbl.sigma(f, M), args)
    if not sol.consistent:
        raise _CheckFailure(f"no R exists for this weight (relative residual {sol.residual:.3e})",
                            sol.to_dict())
    return sol.particular


def cmd_build_t(args) -> Report:
    f = family_from_args(args)
    R = _R_for(f, args.M, args)
    T = tbl.build_T(f, args.M, args.omega, R, seed=args.seed)
    rep = Report("build-t", {**_family_config(args, f), "M": args.M, "omega": args.omega})
    rep.add(Check("assembled T vs direct", "xD + D(x - 2 omega) - x S + R", T.validation_residual,
                  1e-11),
            Check("R identity", "(R - x S) Q = Q (R - x S)^T", tbl.eq9_residual(f, R, T.S),
                  args.tol_identity))
    if args.check:
        seq = generate_mvop(f, args.M + 3, args.nodes)
        coupling, ref = tbl.check_time_commutation(seq, T)
        rep.add(Check("coupling at M", "<P_M.T, P_(M+1)> = 0", coupling, args.tol_coupling),
                Check("reference coupling at M+1", "<P_(M+1).T, P_(M+2)> != 0", ref, 1e-3, above=True),
                Check("band symmetry", "<F.T, G>_omega = <F, G.T>_omega",
                      tbl.check_band_symmetry(f, T, trials=args.trials, seed=args.seed), args.tol_band))
    rep.sections["R"] = R.tolist()
    rep.sections["T"] = {str(k): c.to_list() for k, c in sorted(T.op.terms.items())}
    rep.sections["T_flavor"] = T.op.flavor
    return rep


def cmd_counterexample(args) -> Report:
    if any(n < 1 or n > 8 for n in args.sizes):
        raise UsageError("--sizes must lie in 1..8")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    reports, summary = tbl.counterexample_sweep(args.sizes, args.trials, args.seed, args.M,
                                                args.tol_consistent, args.tol_inconsistent)
    rep = Report("counterexample", {"sizes": args.sizes, "trials": args.trials, "seed": args.seed,
                                    "M": args.M})
    if summary["ambiguous"]:
        raise _Guard(f"{summary['ambiguous']} draws landed between the thresholds",
                     [r.to_dict() for r in reports])
    for N in args.sizes:
        rs = [r for r in reports if r.meta["N"] == N]
        if N == 2:
            rep.add(Check("N=2 draws without a solution", "affine solution family",
                          sum(not r.consistent for r in rs), 0.5))
        elif N > 2:
            rep.add(Check(f"N={N} smallest relative residual", "no R exists",
                          min(r.residual for r in rs), args.tol_inconsistent, above=True))
    rep.notes.append(f"{len(reports)} draws, {sum(r.status == tbl.INCONSISTENT for r in reports)} inconsistent")
    rep.sections["summary"] = summary
    rep.sections["reports"] = [r.to_dict() for r in reports]
    return rep


def cmd_regress(args) -> Report:
    cfg = regress.RegressConfig(seed=args.seed, trials=args.trials, tol_identity=args.tol_identity,
                                tol_consistent=args.tol_consistent,
                                tol_inconsistent=args.tol_inconsistent, n_nodes=args.nodes,
                                threads=args.threads)
    crits, timing = regress.run_criteria(cfg)
    rep = Report("regress", cfg.to_dict())
    for c in crits:
        for chk in c.checks:
            rep.add(Check(f"[{c.number}] {chk.name}", chk.identity, chk.value, chk.tolerance, chk.above))
    rep.sections["criteria"] = [c.to_dict() for c in crits]
    for c in crits:
        rep.notes.append(f"criterion {c.number} ({c.title}): {'PASS' if c.passed else 'FAIL'}")
        rep.notes.extend(f"criterion {c.number}: {n}" for n in c.notes)
    rep.timing.update(timing)
    return rep


COMMANDS = {
    "families": cmd_families,
    "verify-pearson": cmd_verify_pearson,
    "solve-r": cmd_solve_r,
    "build-t": cmd_build_t,
    "counterexample": cmd_counterexample,
    "regress": cmd_regress,
}


def _emit(rep: Report, args, started: float):
    rep.version = __version__
    rep.timing["wall_time_s"] = round(time.perf_counter() - started, 3)
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    doc = rep.to_json(stamp)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(doc)
    if args.format == "json" and not args.out:
        sys.stdout.write(doc)
    elif rep.command == "families":
        for fam in rep.sections["families"]:
            sets = ",".join(map(str, fam["sets"])) or "-"
            sys.stdout.write(f"{fam['kind']:<13} sets={sets:<6} {fam['support']:<21} "
                             f"{fam['scalar_weight']:<18} {fam['extras']}\n")
    else:
        sys.stdout.write(rep.to_text())


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help, or a usage error already printed
        return int(exc.code or 0)
    started = time.perf_counter()
    try:
        rep = COMMANDS[args.command](args)
    except (UsageError, FamilyError) as exc:
        print(f"mvoptbl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (_Guard, MVOPError) as exc:
        print(f"mvoptbl: numerical guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except _CheckFailure as exc:
        print(f"mvoptbl: check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except ValueError as exc:
        print(f"mvoptbl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(rep, args, started)
    if rep.command == "regress" and not all(rep.timing.get("runtime_within_limits", {}).values()):
        return EXIT_CHECK
    return EXIT_OK if rep.passed else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
