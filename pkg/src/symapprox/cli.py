"""Command-line front end.

Subcommands ``analyze``, ``canonical``, ``approx``, ``oracle`` and
``connect`` read JSON documents (see :mod:`symapprox.documents`), write a
JSON report to stdout and a short human summary to stderr.

Exit codes: 0 success, 1 an oracle comparison failed, 2 unreadable or
invalid input, 3 numerical failure, 4 infeasible component index,
5 input too large for brute force, 6 frames in different components.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from typing import Sequence

import numpy as np

from . import __version__, approximator, diagonal, documents, tolerances
from .diagonal import INF, DiagonalModel
from .errors import (
    ComponentMismatchError,
    FrameError,
    InfeasibleComponentError,
    NumericFailure,
    ResourceLimitError,
)
from .frames import Frame, canonical_parseval
from .linalg import svd

EXIT_OK = 0
EXIT_ORACLE_FAIL = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_INFEASIBLE = 4
EXIT_SIZE = 5
EXIT_MISMATCH = 6


def _g(x) -> str:
    """Human formatting at 12 significant digits."""
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def _num(x):
    # finite JSON number, or "inf"/"-inf"
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _report_component(rep: approximator.ComponentReport) -> dict:
    return {
        "n1": _num(rep.n1),
        "n2": _num(rep.n2),
        "n3": _num(rep.n3),
        "indexSet": {"lower": _num(rep.lower), "upper": _num(rep.upper)},
        "nonempty": rep.nonempty,
    }


def _family_json(family: dict) -> dict:
    out = {}
    for key, val in sorted(family.items()):
        name = "".join(w.capitalize() if i else w for i, w in enumerate(key.split("_")))
        if isinstance(val, np.ndarray):
            out[name] = documents.encode_matrix(val)
        else:
            out[name] = _num(val)
    return out


def _result_json(res: approximator.ApproximationResult, with_matrix: bool = True) -> dict:
    out = {
        "k": res.k,
        "squaredDistance": res.squared_distance,
        "uniqueness": res.uniqueness,
        "count": _num(res.count),
        "flags": list(res.flags),
    }
    if with_matrix:
        out["minimizer"] = documents.encode_matrix(res.minimizer.synthesis)
        out["family"] = _family_json(res.family)
    return out


def _global_json(res: approximator.ApproximationResult, with_matrix: bool = True) -> dict:
    out = _result_json(res, with_matrix)
    out.update(
        r=res.r,
        boundary=res.boundary,
        tied=[_result_json(t, with_matrix) for t in res.tied],
        notes=list(res.notes),
    )
    return out


def _diag_global_json(g) -> dict:
    return {
        "r": _num(g.r),
        "squaredDistance": g.value,
        "tiedComponents": list(g.tied),
        "uniqueness": g.uniqueness,
        "count": _num(g.count),
        "boundary": g.boundary,
        "notes": list(g.notes),
        "minimizers": {
            str(k): [list(b.values) for b in fam.representatives] for k, fam in g.families.items()
        },
    }


def _family_entry(k: int, fam: diagonal.MinimizerFamily) -> dict:
    return {
        "k": k,
        "squaredDistance": _num(fam.value),
        "uniqueness": {"unique": "unique", "finite": "finitelyMany",
                       "infinite": "infinitelyMany", "none": "none"}[fam.kind],
        "count": _num(fam.count),
    }


# -- subcommands --------------------------------------------------------------

def cmd_analyze(args) -> tuple:
    obj = args.obj
    rep = approximator.component_report(obj)
    report = {"componentReport": _report_component(rep)}
    if isinstance(obj, DiagonalModel):
        ks = rep.indices(window=args.window)
        report["components"] = [
            _family_entry(k, diagonal.minimize_k(obj, k, limit=1)) for k in ks
        ] if rep.nonempty else []
        report["global"] = _diag_global_json(approximator.global_diagonal(obj, limit=1)) if rep.nonempty else None
        g = report["global"]
        summary = "no nearby Parseval frame" if g is None else (
            f"global: components {g['tiedComponents']}, d^2 = {_g(g['squaredDistance'])}, {g['uniqueness']}"
        )
    else:
        fs = svd(obj.synthesis)
        ks = rep.indices(window=args.window)
        report["singularValues"] = [float(x) for x in fs.sigma]
        report["groups"] = [list(g) for g in fs.groups]
        report["components"] = [
            _result_json(approximator.approx_in_component(obj, k), with_matrix=False) for k in ks
        ]
        res = approximator.global_approx(obj)
        report["global"] = _global_json(res, with_matrix=False)
        summary = (
            f"global: k = {res.k}, r = {res.r}, d^2 = {_g(res.squared_distance)}, {res.uniqueness}"
        )
    lines = [f"index set: [{_g(rep.lower)}, {_g(rep.upper)}]"]
    for c in report["components"]:
        lines.append(f"  k = {c['k']:>3}  d^2 = {_g(c['squaredDistance'])}  {c['uniqueness']}")
    lines.append(summary)
    return report, lines, EXIT_OK


def cmd_canonical(args) -> tuple:
    obj = _require_frame(args.obj)
    U = canonical_parseval(obj).synthesis
    doc = documents.frame_document(U, obj.label)
    return doc, [f"canonical Parseval frame, {U.shape[0]} x {U.shape[1]}"], EXIT_OK


def cmd_approx(args) -> tuple:
    obj = _require_frame(args.obj)
    if args.component is not None:
        res = approximator.approx_in_component(obj, args.component)
        body = _result_json(res)
    else:
        res = approximator.global_approx(obj)
        body = _global_json(res)
    report = {"result": body}
    if args.enumerate:
        reps = approximator.enumerate_family(res, obj, args.enumerate, seed=args.seed)
        report["representatives"] = [
            {"k": k, "matrix": documents.encode_matrix(Y)} for k, Y in reps
        ]
    lines = [f"k = {res.k}  d^2 = {_g(res.squared_distance)}  {res.uniqueness}"]
    if res.tied:
        lines.append(f"tied components: {list(res.tied_components)}")
    lines.extend(res.notes)
    return report, lines, EXIT_OK


def _as_sequence_model(obj) -> DiagonalModel:
    if isinstance(obj, DiagonalModel):
        if not obj.is_finite:
            raise ResourceLimitError("brute force needs a finite model")
        return obj
    F = obj.synthesis
    d, n = F.shape
    off = F.copy()
    np.fill_diagonal(off, 0)
    if np.any(off):
        raise documents.DocumentError("oracle needs a diagonal input")
    a = np.abs(np.diagonal(F)).tolist() + [0.0] * max(0, n - d)
    r = sum(1 for x in a if x > 0)
    return DiagonalModel(tuple(a), cokernel_dim=d - r)


def cmd_oracle(args) -> tuple:
    model = _as_sequence_model(args.obj)
    a = model.materialize()
    if a.size > diagonal.MAX_ORACLE_LENGTH:
        raise ResourceLimitError(
            f"brute force is capped at {diagonal.MAX_ORACLE_LENGTH} entries, got {a.size}"
        )
    seq = DiagonalModel.from_sequence(a)
    lo, hi = diagonal.model_index_bounds(seq)
    ks = [args.k] if args.k is not None else list(range(lo, hi + 1))
    oracle = diagonal.brute_force_all(a)
    rows, lines, ok = [], [], True
    for k in ks:
        closed = diagonal.minimize_k(seq, k)
        brute = oracle.get(k, diagonal.MinimizerFamily("none", (), 0, INF))
        same_value = closed.value == brute.value
        same_set = {b.values for b in closed.representatives} == {b.values for b in brute.representatives}
        passed = same_value and same_set and closed.count == brute.count
        ok &= passed
        rows.append({
            "k": k,
            "closedForm": _num(closed.value),
            "bruteForce": _num(brute.value),
            "count": _num(brute.count),
            "status": "PASS" if passed else "FAIL",
        })
        lines.append(f"k = {k:>3}  {'PASS' if passed else 'FAIL'}  d^2 = {_g(closed.value)}  minimizers = {brute.count}")
    g = approximator.global_diagonal(seq)
    if len(g.tied) > 1:
        lines.append(f"tie across components {list(g.tied)} at d^2 = {_g(g.value)}")
    lines.extend(g.notes)
    report = {"oracle": rows, "passed": ok, "global": _diag_global_json(g)}
    return report, lines, EXIT_OK if ok else EXIT_ORACLE_FAIL


def cmd_connect(args) -> tuple:
    X = _require_frame(args.obj).synthesis
    Y = _require_frame(args.obj_y).synthesis
    F = _require_frame(args.obj_f)
    cert = approximator.connect(X, Y, F, samples=args.samples)
    tol = tolerances.current()
    ok = (
        cert.residual <= tol.tol_recon
        and cert.path_residual <= tol.tol_unitary
        and cert.endpoint_residual <= tol.tol_recon
    )
    report = {
        "k": cert.k,
        "v": documents.encode_matrix(cert.v),
        "w": documents.encode_matrix(cert.w),
        "generators": [documents.encode_matrix(g) for g in cert.generators],
        "samples": [{"t": t, "point": documents.encode_matrix(P)} for t, P in cert.samples],
        "residuals": {
            "reconstruction": cert.residual,
            "partialIsometry": cert.path_residual,
            "endpoint": cert.endpoint_residual,
        },
        "withinTolerance": ok,
    }
    lines = [
        f"component k = {cert.k}",
        f"||X - V Y W*|| = {_g(cert.residual)}",
        f"max path partial-isometry defect = {_g(cert.path_residual)}",
    ]
    return report, lines, EXIT_OK if ok else EXIT_NUMERIC


def _require_frame(obj) -> Frame:
    if not isinstance(obj, Frame):
        raise documents.DocumentError("this command needs a frame document")
    return obj


# -- driver -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symapprox", description="Best Parseval approximations of finite frames."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="component report, distances and global result")
    p.add_argument("input")
    p.add_argument("--window", type=int, default=16,
                   help="clip infinite index sets to [-window, window] (default 16)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("canonical", help="canonical Parseval frame as a frame document")
    p.add_argument("input")
    p.set_defaults(func=cmd_canonical)

    p = sub.add_parser("approx", help="best approximation in one component or globally")
    p.add_argument("input")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--component", type=int, metavar="K")
    which.add_argument("--global", dest="global_", action="store_true")
    p.add_argument("--enumerate", type=int, default=0, metavar="LIMIT",
                   help="list up to LIMIT members of the minimizer family")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("oracle", help="compare closed forms with brute force (diagonal input)")
    p.add_argument("input")
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("connect", help="unitaries relating two Parseval frames of one component")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("f")
    p.add_argument("--samples", type=int, default=5)
    p.set_defaults(func=cmd_connect)
    return parser


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, InfeasibleComponentError):
        return EXIT_INFEASIBLE
    if isinstance(exc, ResourceLimitError):
        return EXIT_SIZE
    if isinstance(exc, ComponentMismatchError):
        return EXIT_MISMATCH
    if isinstance(exc, NumericFailure):
        return EXIT_NUMERIC
    return EXIT_INPUT


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run one subcommand and return its exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_INPUT
    start = time.perf_counter()
    try:
        tolerances.current()
        args.obj, input_digest = documents.load(args.input if args.command != "connect" else args.x)
        if args.command == "connect":
            (args.obj_y, dy), (args.obj_f, df) = documents.load(args.y), documents.load(args.f)
            input_digest = documents.digest((input_digest + dy + df).encode())
        body, lines, code = args.func(args)
    except FrameError as exc:
        print(f"error: {exc}", file=stderr)
        return _exit_code(exc)
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except np.linalg.LinAlgError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_NUMERIC
    if args.command == "canonical":
        doc = body
    else:
        doc = {
            "command": {"name": args.command, "argv": list(argv) if argv is not None else sys.argv[1:]},
            "inputDigest": input_digest,
            "report": body,
            "timing": {"seconds": time.perf_counter() - start},
        }
    try:
        text = documents.dumps(doc)
    except ValueError as exc:
        print(f"error: report has a non-finite value: {exc}", file=stderr)
        return EXIT_NUMERIC
    print(text, file=stdout)
    for line in lines:
        print(line, file=stderr)
    return code


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
